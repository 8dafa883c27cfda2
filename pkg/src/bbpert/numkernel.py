"""
Arbitrary-precision scalars and parity-restricted polynomials.

Scalars are plain :class:`mpmath.mpf` values; the working precision is the
usual mpmath decimal precision (``mp.dps``) and is set once per run through
:func:`working_precision`.  Everything else in the package is written in terms
of the helpers here, so swapping the arithmetic substrate only touches this
module.
"""
from __future__ import annotations

import contextlib
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import mpmath
from mpmath import mp
from mpmath.libmp import repr_dps, to_str

from .errors import RootIsolationError, SingularSystemError

DEFAULT_PRECISION = 80

Scalar = mpmath.mpf

EVEN = "even"
ODD = "odd"


@contextlib.contextmanager
def working_precision(digits: int) -> Iterator[int]:
    """Run the enclosed block with ``digits`` significant decimal digits."""
    if digits < 1:
        raise ValueError(f"precision must be a positive digit count, got {digits}")
    with mp.workdps(digits):
        yield digits


def scalar(value) -> mpmath.mpf:
    """Coerce ints, Fractions, decimal strings and mpf values to a Scalar."""
    if hasattr(value, "numerator") and hasattr(value, "denominator") and not isinstance(value, int):
        return mpmath.mpf(value.numerator) / value.denominator
    return mpmath.mpf(value)


def kth_root(value, k: int) -> mpmath.mpf:
    """Real principal k-th root; negative input is allowed only for odd k."""
    value = scalar(value)
    if k < 1:
        raise ValueError("root order must be >= 1")
    if value < 0:
        if k % 2 == 0:
            raise ValueError("even root of a negative number")
        return -mpmath.root(-value, k)
    return mpmath.root(value, k)


def to_decimal(value) -> str:
    """Decimal string carrying enough digits to round-trip at the current precision."""
    value = scalar(value)
    if value == 0:
        return "0.0"
    return to_str(value._mpf_, repr_dps(mp.prec))


def from_decimal(text: str) -> mpmath.mpf:
    return mpmath.mpf(text)


def rel_close(a, b, digits_lost: int = 10) -> bool:
    """``|a-b| <= 10**(digits_lost - dps) * max(|a|, |b|)``, with an absolute floor at zero."""
    a, b = scalar(a), scalar(b)
    tol = mpmath.mpf(10) ** (digits_lost - mp.dps)
    scale = max(abs(a), abs(b))
    if scale == 0:
        return True
    return abs(a - b) <= tol * scale


@dataclass(frozen=True)
class ParityPolynomial:
    """Polynomial whose exponents all share one parity.

    ``coeffs[m]`` multiplies ``x**(2*m)`` for even polynomials and
    ``x**(2*m + 1)`` for odd ones.  Trailing zeros are trimmed on
    construction, so equal polynomials compare equal.
    """

    parity: str
    coeffs: tuple = ()

    def __post_init__(self):
        if self.parity not in (EVEN, ODD):
            raise ValueError(f"parity must be 'even' or 'odd', got {self.parity!r}")
        cs = [scalar(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def zero(cls, parity: str) -> "ParityPolynomial":
        return cls(parity, ())

    @classmethod
    def from_powers(cls, parity: str, terms: dict) -> "ParityPolynomial":
        """Build from ``{exponent: coefficient}``; exponents must match ``parity``."""
        offset = 1 if parity == ODD else 0
        if not terms:
            return cls(parity, ())
        size = 0
        for e in terms:
            if e < 0 or (e - offset) % 2:
                raise ValueError(f"exponent {e} does not have {parity} parity")
            size = max(size, (e - offset) // 2 + 1)
        cs = [mpmath.mpf(0)] * size
        for e, c in terms.items():
            cs[(e - offset) // 2] = scalar(c)
        return cls(parity, tuple(cs))

    def exponent(self, m: int) -> int:
        return 2 * m + 1 if self.parity == ODD else 2 * m

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        """Largest exponent with a nonzero coefficient; -1 for the zero polynomial."""
        if not self.coeffs:
            return -1
        return self.exponent(len(self.coeffs) - 1)

    def coeff(self, exponent: int) -> mpmath.mpf:
        offset = 1 if self.parity == ODD else 0
        if exponent < 0 or (exponent - offset) % 2:
            return mpmath.mpf(0)
        m = (exponent - offset) // 2
        return self.coeffs[m] if m < len(self.coeffs) else mpmath.mpf(0)

    def terms(self) -> list[tuple[int, mpmath.mpf]]:
        """Nonzero ``(exponent, coefficient)`` pairs in increasing exponent order."""
        return [(self.exponent(m), c) for m, c in enumerate(self.coeffs) if c != 0]

    def max_abs(self) -> mpmath.mpf:
        return max((abs(c) for c in self.coeffs), default=mpmath.mpf(0))

    def __add__(self, other: "ParityPolynomial") -> "ParityPolynomial":
        if self.is_zero():
            return ParityPolynomial(other.parity, other.coeffs) if isinstance(other, ParityPolynomial) else NotImplemented
        if other.is_zero():
            return self
        if self.parity != other.parity:
            raise ValueError("cannot add polynomials of different parity")
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return ParityPolynomial(self.parity, tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> "ParityPolynomial":
        return ParityPolynomial(self.parity, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "ParityPolynomial") -> "ParityPolynomial":
        return self + (-other)

    def scale(self, factor) -> "ParityPolynomial":
        factor = scalar(factor)
        return ParityPolynomial(self.parity, tuple(factor * c for c in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, ParityPolynomial):
            return poly_mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def __call__(self, x):
        return poly_eval(self, x)

    def to_json(self) -> list[dict]:
        return [{"power": e, "value": to_decimal(c)} for e, c in self.terms()]

    @classmethod
    def from_json(cls, parity: str, items: Iterable[dict]) -> "ParityPolynomial":
        return cls.from_powers(parity, {int(d["power"]): from_decimal(d["value"]) for d in items})


def poly_mul(a: ParityPolynomial, b: ParityPolynomial) -> ParityPolynomial:
    """Exact convolution; odd*odd and even*even give even, mixed gives odd."""
    parity = EVEN if a.parity == b.parity else ODD
    if a.is_zero() or b.is_zero():
        return ParityPolynomial.zero(parity)
    # odd*odd: x^(2u+1) x^(2v+1) = x^(2(u+v+1)), so the product index shifts by one
    shift = 1 if (a.parity == ODD and b.parity == ODD) else 0
    out = [mpmath.mpf(0)] * (len(a.coeffs) + len(b.coeffs) - 1 + shift)
    for u, cu in enumerate(a.coeffs):
        if cu == 0:
            continue
        for v, cv in enumerate(b.coeffs):
            out[u + v + shift] += cu * cv
    return ParityPolynomial(parity, tuple(out))


def poly_diff(p: ParityPolynomial) -> ParityPolynomial:
    if p.parity == ODD:
        return ParityPolynomial(EVEN, tuple((2 * m + 1) * c for m, c in enumerate(p.coeffs)))
    return ParityPolynomial(ODD, tuple(2 * m * c for m, c in enumerate(p.coeffs) if m > 0))


def poly_antiderivative(p: ParityPolynomial) -> ParityPolynomial:
    """Term-wise antiderivative with zero constant of integration."""
    if p.parity == ODD:
        return ParityPolynomial(EVEN, (mpmath.mpf(0),) + tuple(c / (2 * m + 2) for m, c in enumerate(p.coeffs)))
    return ParityPolynomial(ODD, tuple(c / (2 * m + 1) for m, c in enumerate(p.coeffs)))


def poly_eval(p: ParityPolynomial, x) -> mpmath.mpf:
    """Horner evaluation in ``x**2``."""
    x = scalar(x)
    x2 = x * x
    acc = mpmath.mpf(0)
    for c in reversed(p.coeffs):
        acc = acc * x2 + c
    return acc * x if p.parity == ODD else acc


# --- dense univariate helpers (ascending coefficient lists) -----------------

def _trim(q: Sequence) -> list:
    q = list(q)
    while q and q[-1] == 0:
        q.pop()
    return q


def horner(q: Sequence, x) -> mpmath.mpf:
    acc = mpmath.mpf(0)
    for c in reversed(q):
        acc = acc * x + c
    return acc


def _derivative(q: Sequence) -> list:
    return [k * q[k] for k in range(1, len(q))]


def _poly_rem(a: list, b: list) -> list:
    a = list(a)
    while len(a) >= len(b) and a:
        factor = a[-1] / b[-1]
        shift = len(a) - len(b)
        for i, bc in enumerate(b):
            a[shift + i] -= factor * bc
        a.pop()
        a = _trim(a)
    return a


def sturm_sequence(q: Sequence) -> list[list]:
    q = _trim([scalar(c) for c in q])
    seq = [q, _derivative(q)]
    # relative cutoff keeps round-off residue from posing as a nonzero remainder
    eps = mpmath.mpf(10) ** (8 - mp.dps) * max(abs(c) for c in q)
    while len(seq[-1]) > 1:
        rem = _poly_rem(seq[-2], seq[-1])
        rem = _trim([c if abs(c) > eps else 0 for c in rem])
        if not rem:
            break
        seq.append([-c for c in rem])
    return seq


def _sign_changes(seq: list[list], x) -> int:
    signs = []
    for s in seq:
        v = horner(s, x)
        if v != 0:
            signs.append(v > 0)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _bisect(q: Sequence, lo, hi) -> mpmath.mpf:
    flo = horner(q, lo)
    if flo == 0:
        return lo
    for _ in range(4 * mp.prec):
        mid = (lo + hi) / 2
        if mid == lo or mid == hi:
            break
        fm = horner(q, mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return (lo + hi) / 2


def real_roots(q: Sequence, interval: tuple, max_depth: int = 200) -> list[mpmath.mpf]:
    """Real roots of ``sum(q[k] * c**k)`` inside the open interval ``(lo, hi)``.

    Roots are isolated with a Sturm sequence and refined by bisection to the
    working precision, so they must be simple.  A root that cannot be
    separated from its neighbours (a multiple or near-multiple root) raises
    :class:`RootIsolationError`.
    """
    q = _trim([scalar(c) for c in q])
    if not q:
        raise ValueError("polynomial must have a nonzero coefficient")
    lo, hi = scalar(interval[0]), scalar(interval[1])
    if not lo < hi:
        raise ValueError("interval must satisfy lo < hi")
    if len(q) == 1:
        return []
    seq = sturm_sequence(q)
    roots: list = []
    # nudge the endpoints off exact roots so the open interval is respected
    stack = [(lo, hi, 0)]
    while stack:
        a, b, depth = stack.pop()
        count = _sign_changes(seq, a) - _sign_changes(seq, b)
        if count <= 0:
            continue
        fa, fb = horner(q, a), horner(q, b)
        if count == 1 and fa != 0 and fb != 0 and (fa > 0) != (fb > 0):
            roots.append(_bisect(q, a, b))
            continue
        if depth >= max_depth:
            raise RootIsolationError(
                f"could not isolate roots in ({mpmath.nstr(a, 15)}, {mpmath.nstr(b, 15)}) "
                f"at {mp.dps} digits; multiple root suspected")
        mid = (a + b) / 2
        if horner(q, mid) == 0:
            roots.append(mid)
            # shave the exact root out of both halves
            delta = (b - a) * mpmath.mpf(10) ** (-mp.dps // 2)
            stack.append((a, mid - delta, depth + 1))
            stack.append((mid + delta, b, depth + 1))
        else:
            stack.append((a, mid, depth + 1))
            stack.append((mid, b, depth + 1))
    return sorted(r for r in roots if lo < r < hi)


def lu_solve(matrix: Sequence[Sequence], rhs: Sequence, rel_pivot_tol=None) -> list[mpmath.mpf]:
    """Dense Gaussian elimination with partial pivoting at working precision.

    A pivot smaller than ``rel_pivot_tol`` times the largest matrix entry
    raises :class:`SingularSystemError` rather than producing garbage.
    """
    n = len(matrix)
    a = [[scalar(v) for v in row] for row in matrix]
    b = [scalar(v) for v in rhs]
    if any(len(row) != n for row in a) or len(b) != n:
        raise ValueError("lu_solve needs a square system")
    if rel_pivot_tol is None:
        rel_pivot_tol = mpmath.mpf(10) ** (5 - mp.dps)
    scale = max((abs(v) for row in a for v in row), default=mpmath.mpf(0))
    if scale == 0:
        raise SingularSystemError("zero matrix")
    for k in range(n):
        piv = max(range(k, n), key=lambda r: abs(a[r][k]))
        if abs(a[piv][k]) <= rel_pivot_tol * scale:
            raise SingularSystemError(f"pivot {k} vanishes at {mp.dps} digits")
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            b[k], b[piv] = b[piv], b[k]
        inv = 1 / a[k][k]
        row_k = a[k]
        for r in range(k + 1, n):
            factor = a[r][k] * inv
            if factor == 0:
                continue
            row_r = a[r]
            for c in range(k + 1, n):
                row_r[c] -= factor * row_k[c]
            row_r[k] = mpmath.mpf(0)
            b[r] -= factor * b[k]
    x = [mpmath.mpf(0)] * n
    for k in range(n - 1, -1, -1):
        acc = b[k]
        row_k = a[k]
        for c in range(k + 1, n):
            acc -= row_k[c] * x[c]
        x[k] = acc / row_k[k]
    return x
