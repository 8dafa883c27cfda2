"""
Order-by-order construction of the ground-state Riccati hierarchy.

With ``f = -psi'/psi`` the Schroedinger equation ``-psi'' + V psi = E psi``
becomes ``f' - f**2 + V - E = 0``.  Embedding it in the family

    f' - f**2 + V - E + (beta - 1) W = 0

and expanding ``f``, ``E`` and ``W`` in powers of ``beta`` gives, at order j,

    f_j' - sum_{k=0..j} f_k f_{j-k} + V delta_{j0} - E_j + W_{j-1} - W_j = 0.

Each ``f_j`` is an odd polynomial of degree ``2(j+p)+1``.  The coefficients of
``x**2 .. x**(2(j+p+1))`` are matched to zero, the higher ones are absorbed
into ``W_j`` and the constant term fixes ``E_j``.  The physical energy is the
series evaluated at ``beta = 1`` where the ``W`` term drops out.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import mpmath
from mpmath import mp

from .errors import RootIsolationError, SingularSystemError, SolverError
from .numkernel import (
    DEFAULT_PRECISION,
    EVEN,
    ODD,
    ParityPolynomial,
    from_decimal,
    lu_solve,
    poly_diff,
    poly_mul,
    real_roots,
    scalar,
    to_decimal,
    working_precision,
)

log = logging.getLogger(__name__)

ALGORITHM_VERSION = "1"

# residual coefficients must sit below 10**(RESIDUAL_DIGITS - dps) times the order's scale
RESIDUAL_DIGITS = 10


@dataclass(frozen=True)
class PotentialSpec:
    """Even confining potential ``V(x) = sum v_{2k} x**(2k)``.

    ``coeffs`` is a tuple of ``(exponent, value)`` pairs.  Any coupling in
    front of the leading power is simply folded into its coefficient.
    """

    coeffs: tuple
    s: int = 0

    def __post_init__(self):
        items = {}
        for e, v in self.coeffs:
            e = int(e)
            if e < 2 or e % 2:
                raise ValueError(f"potential exponents must be even and >= 2, got {e}")
            v = scalar(v)
            if v != 0:
                items[e] = items.get(e, mpmath.mpf(0)) + v
        if not items:
            raise ValueError("potential has no terms")
        object.__setattr__(self, "coeffs", tuple(sorted(items.items())))
        if self.coeffs[-1][1] <= 0:
            raise ValueError("leading potential coefficient must be positive (confining)")

    @classmethod
    def pure_power(cls, K: int, coupling=1) -> "PotentialSpec":
        return cls(((2 * K, coupling),))

    @property
    def K(self) -> int:
        return self.coeffs[-1][0] // 2

    def coeff(self, exponent: int):
        for e, v in self.coeffs:
            if e == exponent:
                return v
        return mpmath.mpf(0)

    def as_polynomial(self) -> ParityPolynomial:
        return ParityPolynomial.from_powers(EVEN, dict(self.coeffs))

    def is_pure_power(self) -> bool:
        return len(self.coeffs) == 1

    def to_json(self) -> dict:
        return {"coeffs": [{"power": e, "value": to_decimal(v)} for e, v in self.coeffs], "s": self.s}

    @classmethod
    def from_json(cls, d: dict) -> "PotentialSpec":
        return cls(tuple((int(c["power"]), from_decimal(c["value"])) for c in d["coeffs"]), s=int(d.get("s", 0)))


@dataclass(frozen=True)
class AnsatzSpec:
    """``f_j`` carries odd powers ``x**(2m+1)`` for ``m = 0 .. j + p``."""

    p: int

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 0:
            raise ValueError(f"ansatz offset must be a nonnegative integer, got {self.p}")

    @classmethod
    def canonical(cls, K: int) -> "AnsatzSpec":
        return cls(K - 1)

    def check(self, potential: PotentialSpec) -> None:
        if self.p < potential.K - 1:
            raise ValueError(f"ansatz offset p={self.p} must be >= K-1={potential.K - 1}")


@dataclass(frozen=True)
class OrderTerm:
    j: int
    E: mpmath.mpf
    f: ParityPolynomial
    W: ParityPolynomial

    def to_json(self) -> dict:
        return {"j": self.j, "E": to_decimal(self.E), "f": self.f.to_json(), "W": self.W.to_json()}

    @classmethod
    def from_json(cls, d: dict) -> "OrderTerm":
        return cls(int(d["j"]), from_decimal(d["E"]),
                   ParityPolynomial.from_json(ODD, d["f"]), ParityPolynomial.from_json(EVEN, d["W"]))


@dataclass(frozen=True)
class BBSeries:
    potential: PotentialSpec
    ansatz: AnsatzSpec
    precision: int
    terms: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        for i, t in enumerate(self.terms):
            if t.j != i:
                raise ValueError(f"terms must be contiguous from 0; slot {i} holds order {t.j}")

    @property
    def J(self) -> int:
        return len(self.terms) - 1

    @property
    def energies(self) -> list:
        return [t.E for t in self.terms]

    def extend(self, term: OrderTerm) -> "BBSeries":
        return BBSeries(self.potential, self.ansatz, self.precision, self.terms + (term,))

    def truncated(self, J: int) -> "BBSeries":
        return BBSeries(self.potential, self.ansatz, self.precision, self.terms[:J + 1])

    def to_json(self) -> dict:
        with working_precision(self.precision):
            return {
                "potential": self.potential.to_json(),
                "ansatz": {"p": self.ansatz.p},
                "precision": self.precision,
                "terms": [t.to_json() for t in self.terms],
            }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, d: dict) -> "BBSeries":
        precision = int(d["precision"])
        with working_precision(precision):
            return cls(PotentialSpec.from_json(d["potential"]), AnsatzSpec(int(d["ansatz"]["p"])), precision,
                       tuple(OrderTerm.from_json(t) for t in d["terms"]))

    @classmethod
    def loads(cls, text: str) -> "BBSeries":
        return cls.from_json(json.loads(text))


def _band(poly: ParityPolynomial, lo_m: int, hi_m: int) -> ParityPolynomial:
    """Even polynomial keeping only indices ``lo_m <= m <= hi_m``."""
    return ParityPolynomial(EVEN, tuple(c if lo_m <= m <= hi_m else 0 for m, c in enumerate(poly.coeffs)))


# polynomials in the unknown c_{0,1}, ascending coefficient lists
def _tmul(a: list, b: list) -> list:
    out = [mpmath.mpf(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for k, y in enumerate(b):
            out[i + k] += x * y
    return out


def _tadd(a: list, b: list) -> list:
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def _square_sum(cs: list, m: int) -> list:
    """``sum_{u+v=m} c_u c_v`` for polynomial-valued c."""
    acc = [mpmath.mpf(0)]
    for u in range(m + 1):
        acc = _tadd(acc, _tmul(cs[u], cs[m - u]))
    return acc


def closure_polynomial(potential: PotentialSpec, ansatz: AnsatzSpec) -> tuple[list, list]:
    """Reduce the order-zero equations to one polynomial in ``t = c_{0,1}``.

    Matching ``x**(2m)`` for ``m = 1..p`` gives
    ``c_m = (sum_{u+v=m-1} c_u c_v - v_{2m}) / (2m+1)`` by forward substitution;
    the ``m = p+1`` equation ``sum_{u+v=p} c_u c_v = v_{2p+2}`` is the closure.
    Returns ``(closure, [c_0(t), ..., c_p(t)])``.
    """
    p = ansatz.p
    cs = [[mpmath.mpf(0), mpmath.mpf(1)]]
    for m in range(1, p + 1):
        q = _square_sum(cs, m - 1)
        q[0] -= potential.coeff(2 * m)
        cs.append([c / (2 * m + 1) for c in q])
    closure = _square_sum(cs, p)
    closure[0] -= potential.coeff(2 * p + 2)
    return closure, cs


def _cauchy_bound(q: list):
    lead = q[-1]
    return 1 + max(abs(c / lead) for c in q[:-1])


def solve_zeroth_order(potential: PotentialSpec, ansatz: AnsatzSpec) -> OrderTerm:
    if potential.s != 0:
        raise SolverError("only ground-state s=0 supported", 0)
    ansatz.check(potential)
    p = ansatz.p
    closure, cs = closure_polynomial(potential, ansatz)
    while closure and closure[-1] == 0:
        closure.pop()
    if len(closure) < 2:
        raise SolverError("degenerate ansatz: order-zero closure does not involve c_{0,1}", 0)
    try:
        roots = real_roots(closure, (0, _cauchy_bound(closure)))
    except RootIsolationError as exc:
        raise SolverError(f"no admissible real root ({exc})", 0) from exc

    admissible = []
    for t in roots:
        coeffs = [mpmath.polyval(list(reversed(c)), t) for c in cs]
        if t > 0 and coeffs[-1] > 0:
            admissible.append((t, coeffs))
    if not admissible:
        raise SolverError("no admissible real root: need c_{0,1} > 0 and a positive leading coefficient", 0)
    if len(admissible) > 1:
        log.warning("order zero has %d admissible roots %s; taking the smallest",
                    len(admissible), [mpmath.nstr(t, 12) for t, _ in admissible])
    t, coeffs = admissible[0]

    f0 = ParityPolynomial(ODD, tuple(coeffs))
    raw = poly_diff(f0) - poly_mul(f0, f0) + potential.as_polynomial()
    W0 = _band(raw, p + 2, 2 * p + 1)
    return OrderTerm(0, f0.coeffs[0] if f0.coeffs else mpmath.mpf(0), f0, W0)


def _known_part(terms, j: int) -> ParityPolynomial:
    """``R_j = -sum_{k=1}^{j-1} f_k f_{j-k} + W_{j-1}``."""
    acc = ParityPolynomial.zero(EVEN)
    for k in range(1, (j + 1) // 2):
        acc = acc + poly_mul(terms[k].f, terms[j - k].f).scale(2)
    if j % 2 == 0 and j >= 2:
        acc = acc + poly_mul(terms[j // 2].f, terms[j // 2].f)
    return terms[j - 1].W - acc


def _linear_part(f0: ParityPolynomial, fj: ParityPolynomial) -> ParityPolynomial:
    """``f_j' - 2 f_0 f_j``."""
    return poly_diff(fj) - poly_mul(f0, fj).scale(2)


def _solve_order(terms, p: int, j: int) -> tuple[OrderTerm, ParityPolynomial]:
    f0 = terms[0].f
    c0 = [f0.coeffs[u] if u < len(f0.coeffs) else mpmath.mpf(0) for u in range(p + 1)]
    known = _known_part(terms, j)
    n = j + p + 1
    matrix = [[mpmath.mpf(0)] * n for _ in range(n)]
    rhs = [mpmath.mpf(0)] * n
    # row m-1 holds the x^(2m) coefficient for m = 1..j+p+1
    for m in range(1, n + 1):
        row = matrix[m - 1]
        if m < n:
            row[m] += 2 * m + 1
        for u in range(p + 1):
            v = m - 1 - u
            if 0 <= v < n:
                row[v] -= 2 * c0[u]
        rhs[m - 1] = -known.coeff(2 * m)
    try:
        c = lu_solve(matrix, rhs)
    except SingularSystemError as exc:
        raise SolverError(f"singular order-j system ({exc})", j) from exc
    fj = ParityPolynomial(ODD, tuple(c))
    raw = _linear_part(f0, fj) + known
    Wj = _band(raw, j + p + 2, j + 2 * p + 1)
    Ej = c[0]
    return OrderTerm(j, Ej, fj, Wj), known


def solve_order_j(series: BBSeries, j: int) -> OrderTerm:
    if j < 1:
        raise ValueError("solve_order_j handles j >= 1; use solve_zeroth_order for j = 0")
    if len(series.terms) < j:
        raise SolverError(f"orders 0..{j - 1} must be present", j)
    with working_precision(series.precision):
        term, _ = _solve_order(series.terms, series.ansatz.p, j)
    return term


def _residual_from_parts(term: OrderTerm, f0: ParityPolynomial, known: ParityPolynomial) -> tuple:
    lin = _linear_part(f0, term.f)
    res = lin + known - ParityPolynomial(EVEN, (term.E,)) - term.W
    scale = max(lin.max_abs(), known.max_abs(), abs(term.E), term.W.max_abs())
    return res, scale


def _check_residual(res: ParityPolynomial, scale, j: int) -> None:
    tol = mpmath.mpf(10) ** (RESIDUAL_DIGITS - mp.dps) * scale
    worst = res.max_abs()
    if worst > tol:
        raise SolverError(
            f"residual {mpmath.nstr(worst, 5)} exceeds {mpmath.nstr(tol, 5)}; precision exhausted", j)


def _order_zero_residual(potential: PotentialSpec, term: OrderTerm) -> tuple:
    d = poly_diff(term.f)
    sq = poly_mul(term.f, term.f)
    V = potential.as_polynomial()
    res = d - sq + V - ParityPolynomial(EVEN, (term.E,)) - term.W
    scale = max(d.max_abs(), sq.max_abs(), V.max_abs(), abs(term.E), term.W.max_abs())
    return res, scale


def run_series(potential: PotentialSpec, ansatz: AnsatzSpec, J: int,
               precision: int = DEFAULT_PRECISION) -> BBSeries:
    """Compute orders ``0..J``, validating each order's residual as it goes."""
    if J < 0:
        raise ValueError("J must be >= 0")
    if potential.s != 0:
        raise SolverError("only ground-state s=0 supported")
    with working_precision(precision):
        term0 = solve_zeroth_order(potential, ansatz)
        _check_residual(*_order_zero_residual(potential, term0), 0)
        terms = [term0]
        for j in range(1, J + 1):
            term, known = _solve_order(terms, ansatz.p, j)
            _check_residual(*_residual_from_parts(term, term0.f, known), j)
            terms.append(term)
            log.debug("order %d: E = %s", j, mpmath.nstr(term.E, 15))
    return BBSeries(potential, ansatz, precision, tuple(terms))


def riccati_order_residual(series: BBSeries, j: int) -> ParityPolynomial:
    """Full order-j residual with the stored ``f_j``, ``W_j``, ``E_j`` substituted."""
    if not 0 <= j <= series.J:
        raise IndexError(f"order {j} not present (series has 0..{series.J})")
    with working_precision(series.precision):
        if j == 0:
            return _order_zero_residual(series.potential, series.terms[0])[0]
        known = _known_part(series.terms, j)
        return _residual_from_parts(series.terms[j], series.terms[0].f, known)[0]


def residual_scale(series: BBSeries, j: int):
    """Largest intermediate coefficient magnitude entering the order-j residual."""
    with working_precision(series.precision):
        if j == 0:
            return _order_zero_residual(series.potential, series.terms[0])[1]
        known = _known_part(series.terms, j)
        return _residual_from_parts(series.terms[j], series.terms[0].f, known)[1]
