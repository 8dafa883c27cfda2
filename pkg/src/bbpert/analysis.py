"""
Summation and diagnostics for a computed energy series.

Partial sums, smallest-term truncation, diagonal Pade approximants at
``beta = 1``, the ``log10|E_j/E_0|`` convergence profile, the zeroth-order
wavefunction and the Riccati residual of a truncated solution.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import mpmath

from .bbcore import AnsatzSpec, BBSeries, PotentialSpec, run_series
from .errors import BBError, PadeError, SingularSystemError
from .numkernel import (
    EVEN,
    ODD,
    ParityPolynomial,
    lu_solve,
    poly_antiderivative,
    poly_diff,
    poly_eval,
    poly_mul,
    scalar,
    to_decimal,
    working_precision,
)

LOG_BASE = 10


@dataclass(frozen=True)
class TruncationReport:
    partial_sums: tuple
    argmin_index: int
    best_estimate: mpmath.mpf
    search_bound: int

    @property
    def smallest_term(self) -> mpmath.mpf:
        return self.partial_sums[self.argmin_index] - self.partial_sums[self.argmin_index - 1]

    def to_json(self) -> dict:
        return {
            "argmin_index": self.argmin_index,
            "smallest_term": to_decimal(self.smallest_term),
            "best_estimate": to_decimal(self.best_estimate),
            "search_bound": self.search_bound,
            "partial_sums": [to_decimal(s) for s in self.partial_sums],
        }


@dataclass(frozen=True)
class PadeTable:
    values: dict

    @property
    def N_max(self) -> int:
        return max(self.values)

    def rows(self) -> list[tuple[int, mpmath.mpf]]:
        return sorted(self.values.items())


class ProfilePoint(NamedTuple):
    j: int
    value: mpmath.mpf | None
    terminated: bool


def partial_sums(series: BBSeries) -> list:
    if not series.terms:
        raise ValueError("empty series")
    with working_precision(series.precision):
        out, acc = [], mpmath.mpf(0)
        for E in series.energies:
            acc += E
            out.append(acc)
    return out


def optimal_truncation(series: BBSeries, search_bound: int | None = None) -> TruncationReport:
    """Stop before the smallest ``|E_j|``, ``1 <= j <= search_bound``.

    Ties go to the smaller index.  The default bound is ``J - 1``.
    """
    if search_bound is None:
        search_bound = max(series.J - 1, 1)
    if search_bound > series.J:
        raise ValueError(f"search bound {search_bound} exceeds the {series.J} computed orders")
    if search_bound < 1:
        raise ValueError("need at least one correction term to truncate")
    sums = partial_sums(series)
    energies = series.energies
    # min() returns the first minimal element, which is the tie-break we want
    j_star = min(range(1, search_bound + 1), key=lambda j: abs(energies[j]))
    return TruncationReport(tuple(sums), j_star, sums[j_star - 1], search_bound)


def pade_coefficients(coeffs: Sequence, N: int) -> tuple[list, list]:
    """Numerator and denominator of the ``[N/N]`` approximant, ``den[0] == 1``."""
    a = [scalar(c) for c in coeffs]
    if 2 * N + 1 > len(a):
        raise PadeError(f"insufficient terms: [{N},{N}] needs {2 * N + 1}, have {len(a)}")
    if N == 0:
        return [a[0]], [mpmath.mpf(1)]
    matrix = [[a[n - k] if n >= k else mpmath.mpf(0) for k in range(1, N + 1)] for n in range(N + 1, 2 * N + 1)]
    rhs = [-a[n] for n in range(N + 1, 2 * N + 1)]
    try:
        q = [mpmath.mpf(1)] + lu_solve(matrix, rhs)
    except SingularSystemError as exc:
        raise PadeError(f"degenerate Pade system for N={N} ({exc})") from exc
    p = [mpmath.fsum(q[k] * a[n - k] for k in range(min(n, N) + 1)) for n in range(N + 1)]
    return p, q


def pade_diagonal(series: BBSeries, N: int, beta=1) -> mpmath.mpf:
    """``[N,N]`` of ``sum E_j beta**j`` evaluated at ``beta`` (default 1)."""
    if N < 0:
        raise ValueError("N must be >= 0")
    with working_precision(series.precision):
        p, q = pade_coefficients(series.energies, N)
        beta = scalar(beta)
        den = mpmath.polyval(q[::-1], beta)
        if den == 0:
            raise PadeError(f"degenerate Pade approximant: denominator vanishes at beta={beta}")
        return mpmath.polyval(p[::-1], beta) / den


def max_pade_order(series: BBSeries) -> int:
    return series.J // 2


def pade_table(series: BBSeries, N_max: int | None = None) -> PadeTable:
    if N_max is None:
        N_max = max_pade_order(series)
    if 2 * N_max + 1 > len(series.terms):
        raise PadeError(f"insufficient terms for N_max={N_max}; largest feasible N is {max_pade_order(series)}")
    return PadeTable({N: pade_diagonal(series, N) for N in range(N_max + 1)})


def convergence_profile(series: BBSeries) -> list[ProfilePoint]:
    """``log10|E_j / E_0|``; exactly vanishing terms are flagged, not logged."""
    with working_precision(series.precision):
        E0 = series.energies[0]
        if E0 == 0:
            raise ValueError("E_0 vanishes; ratio undefined")
        out = []
        for j, E in enumerate(series.energies):
            if E == 0:
                out.append(ProfilePoint(j, None, True))
            else:
                out.append(ProfilePoint(j, mpmath.log10(abs(E / E0)), False))
    return out


def truncated_f(series: BBSeries, M: int) -> ParityPolynomial:
    acc = ParityPolynomial.zero(ODD)
    for t in series.terms[:M + 1]:
        acc = acc + t.f
    return acc


def global_riccati_residual(series: BBSeries, M: int, xs: Sequence) -> list:
    """``F' - F**2 + V - E^[M]`` at each x, with ``F = f_0 + ... + f_M``.

    At ``beta = 1`` the auxiliary potential drops out, so this is the residual
    of the physical Riccati equation for the truncated solution.
    """
    if M > series.J:
        raise ValueError(f"M={M} exceeds the {series.J} computed orders")
    with working_precision(series.precision):
        F = truncated_f(series, M)
        energy = mpmath.fsum(series.energies[:M + 1])
        res = poly_diff(F) - poly_mul(F, F) + series.potential.as_polynomial() \
            - ParityPolynomial(EVEN, (energy,))
        return [poly_eval(res, x) for x in xs]


def psi0_exponent(series: BBSeries) -> ParityPolynomial:
    """Even polynomial ``-int_0^x f_0``; ``Psi_0 = exp`` of it."""
    with working_precision(series.precision):
        return -poly_antiderivative(series.terms[0].f)


def wavefunction_profile(series: BBSeries, xs: Sequence) -> list:
    """Unnormalised ``Psi_0(x) = exp(-int_0^x f_0)``."""
    if not series.terms:
        raise ValueError("order-zero term missing")
    expo = psi0_exponent(series)
    with working_precision(series.precision):
        return [mpmath.exp(poly_eval(expo, x)) for x in xs]


def taylor_of_rational(p: Sequence, q: Sequence, n_terms: int) -> list:
    """First ``n_terms`` Taylor coefficients of ``p/q`` about 0 (``q[0] != 0``)."""
    out = []
    for n in range(n_terms):
        acc = p[n] if n < len(p) else mpmath.mpf(0)
        for k in range(1, min(n, len(q) - 1) + 1):
            acc -= q[k] * out[n - k]
        out.append(acc / q[0])
    return out


def ansatz_scan(K: int, offsets: Sequence[int], J: int, index: int, precision: int = 80) -> list[dict]:
    """Try several ansatz offsets for ``x**(2K)`` and report ``E_index`` and ``E^[index-1]``.

    Offsets whose order-zero problem has no admissible root are reported
    with the error text instead of values.
    """
    rows = []
    for p in offsets:
        row: dict = {"K": K, "p": p}
        try:
            series = run_series(PotentialSpec.pure_power(K), AnsatzSpec(p), J, precision)
        except (BBError, ValueError) as exc:
            row.update(status="failed", error=str(exc))
            rows.append(row)
            continue
        with working_precision(precision):
            sums = partial_sums(series)
            row.update(status="ok", E=mpmath.nstr(series.energies[index], 12),
                       partial_sum=mpmath.nstr(sums[index - 1], 12),
                       argmin_index=optimal_truncation(series, min(J, 2 * index)).argmin_index)
        rows.append(row)
    return rows
