"""
Reference ground-state energies of ``-psi'' + x**(2K) psi = E psi``.

Rayleigh-Ritz in the even harmonic-oscillator states ``|0>, |2>, |4>, ...``
of frequency ``omega``, where ``x = (a + a^dag) / sqrt(2 omega)``.  The
``(a + a^dag)**(2K)`` matrix elements are integers times ``sqrt(m!/n!)`` and
are generated exactly before conversion, so assembly loses nothing.  This
path shares no code with the perturbative solver.
"""
from __future__ import annotations

import functools
import logging
from dataclasses import dataclass

import mpmath

from .errors import OracleNotConverged
from .numkernel import scalar, working_precision

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleConfig:
    """
    basis_size : starting number of even basis states
    scale : multiplier on the default frequency (see :func:`default_omega`)
    precision : decimal digits for assembly and diagonalisation
    convergence_window : states added for the stability check
    target_digits : significant digits that must agree between the two sizes
    max_basis_size : give up (OracleNotConverged) beyond this many states
    """

    basis_size: int = 40
    scale: float = 1.0
    precision: int = 30
    convergence_window: int = 20
    target_digits: int = 14
    max_basis_size: int = 320

    def __post_init__(self):
        if self.basis_size < 4:
            raise ValueError("basis_size must be >= 4")
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        if self.convergence_window < 1:
            raise ValueError("convergence_window must be >= 1")


@dataclass(frozen=True)
class OracleResult:
    K: int
    eigenvalue: mpmath.mpf
    basis_size: int
    converged: bool
    precision: int

    def to_json(self) -> dict:
        with working_precision(self.precision):
            return {"K": self.K, "eigenvalue": mpmath.nstr(self.eigenvalue, self.precision - 5),
                    "basis_size": self.basis_size, "converged": self.converged}


@functools.lru_cache(maxsize=None)
def ladder_power_column(q: int, n: int) -> dict:
    """``(a + a^dag)**q (a^dag)**n |0>`` in the unnormalised basis ``(a^dag)**k |0>``.

    Returns ``{k: integer}``; with ``a (a^dag)**k|0> = k (a^dag)**(k-1)|0>`` every
    coefficient stays an integer.
    """
    state = {n: 1}
    for _ in range(q):
        nxt: dict = {}
        for k, c in state.items():
            nxt[k + 1] = nxt.get(k + 1, 0) + c
            if k:
                nxt[k - 1] = nxt.get(k - 1, 0) + c * k
        state = nxt
    return state


def default_omega(K: int) -> mpmath.mpf:
    """Twice the frequency that minimises ``<0|H|0>``.

    A single Gaussian is too narrow for a converged basis; doubling the
    optimum centres the plateau of the basis-scale dependence.
    """
    single = (mpmath.mpf(2 * K) * mpmath.fac2(2 * K - 1) / 2 ** K) ** (mpmath.mpf(1) / (K + 1))
    return 2 * single


def hamiltonian_matrix(K: int, size: int, omega, coupling=1) -> mpmath.matrix:
    """Even-sector matrix of ``-d^2/dx^2 + coupling * x**(2K)``."""
    omega, coupling = scalar(omega), scalar(coupling)
    H = mpmath.zeros(size, size)
    pref = coupling * (2 * omega) ** (-K)
    top = 2 * (size - 1)
    for i in range(size):
        n = 2 * i
        for m, c in ladder_power_column(2 * K, n).items():
            if m <= top and m % 2 == 0:
                # <m| = (a^dag)^m|0> / sqrt(m!) and (m|m) = m!
                H[m // 2, i] += pref * c * mpmath.sqrt(mpmath.factorial(m) / mpmath.factorial(n))
        H[i, i] += omega / 2 * (2 * n + 1)
        if i + 1 < size:
            off = -omega / 2 * mpmath.sqrt((n + 1) * (n + 2))
            H[i + 1, i] += off
            H[i, i + 1] += off
    return H


def ground_energy(K: int, size: int, omega, coupling=1) -> mpmath.mpf:
    evals = mpmath.eigsy(hamiltonian_matrix(K, size, omega, coupling), eigvals_only=True)
    return min(evals)


def _converged_energy(K: int, config: OracleConfig, coupling=1) -> OracleResult:
    with working_precision(config.precision):
        omega = default_omega(K) * scalar(config.scale) * scalar(coupling) ** (mpmath.mpf(1) / (K + 1))
        tol = mpmath.mpf(10) ** (-config.target_digits)
        n = config.basis_size
        while n + config.convergence_window <= config.max_basis_size:
            small = ground_energy(K, n, omega, coupling)
            big = ground_energy(K, n + config.convergence_window, omega, coupling)
            log.debug("K=%d basis %d/%d: %s %s", K, n, n + config.convergence_window,
                      mpmath.nstr(small, 20), mpmath.nstr(big, 20))
            if abs(big - small) <= tol * abs(big):
                return OracleResult(K, +big, n + config.convergence_window, True, config.precision)
            n *= 2
    raise OracleNotConverged(
        f"K={K}: {config.target_digits} digits not stable below {config.max_basis_size} basis states")


def reference_eigenvalue(K: int, config: OracleConfig | None = None) -> mpmath.mpf:
    return reference_result(K, config).eigenvalue


def reference_result(K: int, config: OracleConfig | None = None) -> OracleResult:
    if K < 1:
        raise ValueError("K must be >= 1")
    config = config or OracleConfig()
    if K == 1:
        with working_precision(config.precision):
            return OracleResult(1, mpmath.mpf(1), config.basis_size, True, config.precision)
    return _converged_energy(K, config)


def scaled_eigenvalue(K: int, coupling, config: OracleConfig | None = None) -> mpmath.mpf:
    """Ground energy of ``-psi'' + coupling * x**(2K) psi``.

    Rescaling ``x`` by ``coupling**(-1/(2K+2))`` maps it onto the pure power,
    so the energy is ``coupling**(1/(K+1))`` times the reference value.
    """
    config = config or OracleConfig()
    with working_precision(config.precision):
        coupling = scalar(coupling)
        if coupling <= 0:
            raise ValueError("coupling must be positive")
        ref = reference_eigenvalue(K, config)
        if coupling == 1:
            return ref
        return coupling ** (mpmath.mpf(1) / (K + 1)) * ref


def direct_eigenvalue(K: int, coupling, config: OracleConfig | None = None) -> mpmath.mpf:
    """Diagonalise ``-d^2 + coupling x**(2K)`` directly, without the scaling law."""
    config = config or OracleConfig()
    return _converged_energy(K, config, coupling).eigenvalue


__all__ = [
    "OracleConfig",
    "OracleResult",
    "default_omega",
    "direct_eigenvalue",
    "ground_energy",
    "hamiltonian_matrix",
    "ladder_power_column",
    "reference_eigenvalue",
    "reference_result",
    "scaled_eigenvalue",
]
