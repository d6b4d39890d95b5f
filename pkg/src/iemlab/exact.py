"""Exact scalar arithmetic in three modes.

The library runs every length computation in one of three scalar algebras:

``rational``
    Plain ``fractions.Fraction``.  All operations and comparisons are exact.

``real`` (tracked)
    :class:`TrackedReal`: a rational center plus a rational error radius.
    Arithmetic propagates radii outward (interval arithmetic); any comparison
    whose answer is not certified by the intervals raises
    :class:`~iemlab.errors.PrecisionExhausted` instead of guessing.

``eigen``
    Elements of a real number field Q(rho), rho the Perron root of a primitive
    integer matrix.  Elements are polynomials in rho of degree < deg(minpoly)
    with Fraction coefficients; this representation is canonical, so equality
    and hashing are exact.  Signs are decided by exact interval evaluation on
    a certified rational enclosure of rho, refined on demand; the refinement
    terminates because a nonzero element cannot vanish at a root of an
    irreducible polynomial of higher degree.

Modes never mix: combining a TrackedReal with a FieldElement is a bug and
raises TypeError.  Plain ints and Fractions embed into every mode.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

import mpmath

from .errors import PrecisionExhausted

RATIONAL = "rational"
REAL = "real"
EIGEN = "eigen"


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


def sgn(x) -> int:
    """Exact sign of a scalar: -1, 0, or +1.

    Raises PrecisionExhausted for a tracked real whose interval straddles 0.
    Floats are rejected: every comparison in the pipeline must be certified.
    """
    if isinstance(x, (int, Fraction)):
        return (x > 0) - (x < 0)
    if isinstance(x, (TrackedReal, FieldElement)):
        return x.sign()
    raise TypeError(f"no exact sign for {type(x).__name__}")


def to_float(x) -> float:
    if isinstance(x, (int, Fraction)):
        return float(x)
    if isinstance(x, (TrackedReal, FieldElement)):
        return float(x)
    raise TypeError(f"cannot convert {type(x).__name__} to float")


def ensure_scalar(x, like):
    """Embed an int or Fraction into the scalar algebra of ``like``."""
    if isinstance(x, (TrackedReal, FieldElement)):
        return x
    q = _as_fraction(x)
    if isinstance(like, TrackedReal):
        return TrackedReal(q)
    if isinstance(like, FieldElement):
        return like.field.from_rational(q)
    return q


def scalar_mode(x) -> str:
    if isinstance(x, (int, Fraction)):
        return RATIONAL
    if isinstance(x, TrackedReal):
        return REAL
    if isinstance(x, FieldElement):
        return EIGEN
    raise TypeError(f"not a pipeline scalar: {type(x).__name__}")


def scalar_abs(x):
    return -x if sgn(x) < 0 else x


def abs_upper(x):
    """Certified upper bound for |x|; usable when the sign is undecidable.

    A tracked value whose interval straddles zero has no sign, but
    max(|lo|, |hi|) still bounds its magnitude; everything else falls back
    to the exact absolute value.
    """
    if isinstance(x, TrackedReal):
        return max(abs(x.lo), abs(x.hi))
    return scalar_abs(x)


def same_scalar(a, b) -> bool:
    """Structural equality: no refinement, no PrecisionExhausted."""
    if isinstance(a, TrackedReal) and isinstance(b, TrackedReal):
        return a.center == b.center and a.radius == b.radius
    if isinstance(a, FieldElement) and isinstance(b, FieldElement):
        return a.field is b.field and a.coeffs == b.coeffs
    if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)):
        return Fraction(a) == Fraction(b)
    return False


def scalar_max(a, b):
    return a if sgn(a - b) >= 0 else b


def scalar_min(a, b):
    return a if sgn(a - b) <= 0 else b


# ---------------------------------------------------------------------------
# tracked reals


class TrackedReal:
    """A real number known to lie in [center - radius, center + radius].

    Both fields are Fractions, so the interval bookkeeping itself is exact.
    A radius of 0 denotes an exactly known value; rationals embed that way.
    """

    __slots__ = ("center", "radius")

    def __init__(self, center, radius=Fraction(0)):
        self.center = _as_fraction(center)
        self.radius = _as_fraction(radius)
        if self.radius < 0:
            raise ValueError("negative radius")

    @property
    def lo(self) -> Fraction:
        return self.center - self.radius

    @property
    def hi(self) -> Fraction:
        return self.center + self.radius

    @staticmethod
    def from_interval(lo: Fraction, hi: Fraction) -> "TrackedReal":
        return TrackedReal((lo + hi) / 2, (hi - lo) / 2)

    def _coerce(self, other):
        if isinstance(other, TrackedReal):
            return other
        if isinstance(other, (int, Fraction)):
            return TrackedReal(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return TrackedReal(self.center + o.center, self.radius + o.radius)

    __radd__ = __add__

    def __neg__(self):
        return TrackedReal(-self.center, self.radius)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return TrackedReal(self.center - o.center, self.radius + o.radius)

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        r = (
            abs(self.center) * o.radius
            + abs(o.center) * self.radius
            + self.radius * o.radius
        )
        return TrackedReal(self.center * o.center, r)

    __rmul__ = __mul__

    def _reciprocal(self) -> "TrackedReal":
        if self.lo <= 0 <= self.hi:
            raise PrecisionExhausted(
                "division by an interval containing zero",
                center=str(self.center),
                radius=str(self.radius),
            )
        return TrackedReal.from_interval(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o._reciprocal()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self._reciprocal()

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        hi = max(-self.lo, self.hi)
        return TrackedReal.from_interval(Fraction(0), hi)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = TrackedReal(Fraction(1))
        for _ in range(n):
            out = out * self
        return out

    def sign(self) -> int:
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        if self.radius == 0:
            return 0
        raise PrecisionExhausted(
            "sign undecidable at radius " + str(float(self.radius)),
            center=str(self.center),
            radius=str(self.radius),
        )

    def __lt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() < 0

    def __le__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() <= 0

    def __gt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() > 0

    def __ge__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() >= 0

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.radius == 0 and o.radius == 0:
            return self.center == o.center
        if self.hi < o.lo or o.hi < self.lo:
            return False
        raise PrecisionExhausted("equality undecidable for overlapping intervals")

    def __hash__(self):
        return hash((self.center, self.radius))

    def __float__(self):
        return float(self.center)

    def __repr__(self):
        return f"TrackedReal({float(self.center)!r}, rad={float(self.radius):.3e})"


# ---------------------------------------------------------------------------
# rational polynomial helpers (dense, ascending coefficients)


def _ptrim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _pmul(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return _ptrim(out)


def _psub(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    n = max(len(a), len(b))
    out = [Fraction(0)] * n
    for i, ai in enumerate(a):
        out[i] += ai
    for i, bi in enumerate(b):
        out[i] -= bi
    return _ptrim(out)


def _pdivmod(a: Sequence[Fraction], b: Sequence[Fraction]):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    inv = 1 / b[-1]
    while len(a) >= len(b) and _ptrim(list(a)):
        a = _ptrim(a)
        if len(a) < len(b):
            break
        c = a[-1] * inv
        k = len(a) - len(b)
        q[k] = c
        for i, bi in enumerate(b):
            a[k + i] -= c * bi
        a.pop()
    return _ptrim(q), _ptrim(a)


def _peval_fraction(p: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _peval_interval(p: Sequence[Fraction], lo: Fraction, hi: Fraction):
    """Interval Horner evaluation; exact rational endpoints."""
    alo = ahi = Fraction(0)
    for c in reversed(p):
        cands = (alo * lo, alo * hi, ahi * lo, ahi * hi)
        alo, ahi = min(cands) + c, max(cands) + c
    return alo, ahi


# ---------------------------------------------------------------------------
# number fields


class NumberField:
    """Q(rho) for rho the Perron root of a primitive integer matrix.

    Parameters
    ----------
    minpoly : sequence of Fraction
        Monic minimal polynomial of rho, ascending coefficients.
    lo, hi : Fraction
        A rational enclosure of rho with a strict sign change of the minimal
        polynomial across it, verified exactly at construction.

    The enclosure is refined in place as sign decisions demand; refinement
    uses high-precision floating seeds but only accepts endpoints whose signs
    are certified by exact rational evaluation.
    """

    def __init__(self, minpoly: Sequence[Fraction], lo: Fraction, hi: Fraction):
        self.minpoly = tuple(_as_fraction(c) for c in minpoly)
        if self.minpoly[-1] != 1:
            raise ValueError("minimal polynomial must be monic")
        self.degree = len(self.minpoly) - 1
        self._lo = _as_fraction(lo)
        self._hi = _as_fraction(hi)
        slo = sgn(_peval_fraction(self.minpoly, self._lo))
        shi = sgn(_peval_fraction(self.minpoly, self._hi))
        if slo == 0 or shi == 0 or slo == shi:
            raise ValueError("enclosure endpoints must bracket a sign change")
        self._sign_lo = slo
        # representations of rho^k, k = degree .. 2*degree-2, as reduced rows
        self._red = []
        row = [-c for c in self.minpoly[:-1]]
        self._red.append(tuple(row))
        for _ in range(self.degree - 2):
            shifted = [Fraction(0)] + list(self._red[-1])
            top = shifted.pop()
            row = [shifted[i] + top * self._red[0][i] for i in range(self.degree)]
            self._red.append(tuple(row))
        self._rho_float: float | None = None

    # -- construction -------------------------------------------------------

    @staticmethod
    def from_matrix(matrix: Sequence[Sequence[int]]) -> "NumberField":
        """Field generated by the Perron root of a nonnegative integer matrix."""
        import numpy as np
        import sympy

        m = sympy.Matrix([[int(v) for v in row] for row in matrix])
        chi = m.charpoly()
        arr = np.array([[float(v) for v in row] for row in matrix])
        eigs = np.linalg.eigvals(arr)
        rho_f = max(e.real for e in eigs if abs(e.imag) < 1e-9 * (1 + abs(e)))
        best = None
        for factor, _mult in sympy.factor_list(chi.as_expr())[1]:
            poly = sympy.Poly(factor, chi.gen)
            roots = np.roots([float(c) for c in poly.all_coeffs()])
            real = [r.real for r in roots if abs(r.imag) < 1e-7 * (1 + abs(r))]
            if not real:
                continue
            dist = min(abs(r - rho_f) for r in real)
            if best is None or dist < best[0]:
                best = (dist, poly, sorted(real))
        if best is None or best[0] > 1e-6 * (1 + abs(rho_f)):
            raise ValueError("could not locate the Perron root among factors")
        _, poly, real_roots = best
        lead = poly.all_coeffs()[0]
        coeffs = [Fraction(sympy.Rational(c / lead)) for c in reversed(poly.all_coeffs())]
        # initial isolation width: half the gap to the nearest other real root
        others = [r for r in real_roots if abs(r - rho_f) > 1e-7 * (1 + rho_f)]
        gap = min((abs(rho_f - r) for r in others), default=1.0)
        width = min(gap / 4, 0.25, rho_f / 4 if rho_f > 0 else 0.25)
        lo, hi = _certify_enclosure(coeffs, rho_f, width)
        return NumberField(coeffs, lo, hi)

    # -- enclosure management ------------------------------------------------

    @property
    def enclosure(self):
        return self._lo, self._hi

    def refine(self, max_width: Fraction) -> None:
        """Shrink the enclosure of rho below ``max_width`` (exact bisection)."""
        lo, hi, s = self._lo, self._hi, self._sign_lo
        if hi - lo <= max_width:
            return
        # seed with a high-precision float root to skip most bisection steps
        seeded = _reseed_enclosure(self.minpoly, lo, hi, max_width)
        if seeded is not None:
            self._lo, self._hi = seeded
            self._sign_lo = sgn(_peval_fraction(self.minpoly, self._lo))
            return
        while hi - lo > max_width:
            mid = (lo + hi) / 2
            sm = sgn(_peval_fraction(self.minpoly, mid))
            if sm == 0:
                lo = hi = mid
                break
            if sm == s:
                lo = mid
            else:
                hi = mid
        self._lo, self._hi = lo, hi

    def rho_float(self) -> float:
        if self._rho_float is None:
            self.refine(Fraction(1, 1 << 60))
            self._rho_float = float((self._lo + self._hi) / 2)
        return self._rho_float

    # -- elements ------------------------------------------------------------

    def from_rational(self, q) -> "FieldElement":
        coeffs = [Fraction(0)] * self.degree
        coeffs[0] = _as_fraction(q)
        return FieldElement(self, coeffs)

    def zero(self) -> "FieldElement":
        return self.from_rational(0)

    def one(self) -> "FieldElement":
        return self.from_rational(1)

    def rho(self) -> "FieldElement":
        coeffs = [Fraction(0)] * self.degree
        if self.degree == 1:
            return self.from_rational(-self.minpoly[0])
        coeffs[1] = Fraction(1)
        return FieldElement(self, coeffs)

    def element(self, coeffs: Iterable) -> "FieldElement":
        c = [_as_fraction(v) for v in coeffs]
        if len(c) > self.degree:
            raise ValueError("coefficient vector longer than field degree")
        c += [Fraction(0)] * (self.degree - len(c))
        return FieldElement(self, c)

    def _reduce(self, conv: list[Fraction]) -> tuple[Fraction, ...]:
        out = list(conv[: self.degree])
        out += [Fraction(0)] * (self.degree - len(out))
        for k in range(self.degree, len(conv)):
            ck = conv[k]
            if ck:
                row = self._red[k - self.degree]
                for j in range(self.degree):
                    out[j] += ck * row[j]
        return tuple(out)

    def __repr__(self):
        mp = [str(c) for c in self.minpoly]
        return f"NumberField(degree={self.degree}, minpoly={mp})"


def _certify_enclosure(coeffs, center: float, width: float):
    """Find a rational sign-change interval around a simple real root."""
    for attempt in range(60):
        w = width / (2**attempt)
        if w == 0:
            break
        lo = Fraction(center - w).limit_denominator(10**30)
        hi = Fraction(center + w).limit_denominator(10**30)
        if lo >= hi:
            continue
        slo = sgn(_peval_fraction(coeffs, lo))
        shi = sgn(_peval_fraction(coeffs, hi))
        if slo != 0 and shi != 0 and slo != shi:
            return lo, hi
        # recenter with a higher-precision root if the bracket keeps failing
        if attempt in (6, 12, 24):
            center = _mp_root_near(coeffs, center, dps=30 + 10 * attempt)
    raise ValueError("failed to certify a root enclosure")


def _mp_root_near(coeffs, seed: float, dps: int) -> float:
    with mpmath.workdps(dps):
        poly = [mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator) for c in reversed(coeffs)]
        try:
            roots = mpmath.polyroots(poly, maxsteps=200, extraprec=120)
        except mpmath.libmp.NoConvergence:
            return seed
        tol = mpmath.mpf(10) ** (-dps // 2)
        real = [mpmath.re(r) for r in roots if abs(mpmath.im(r)) < tol]
        if not real:
            return seed
        return float(min(real, key=lambda r: abs(float(r) - seed)))


def _reseed_enclosure(coeffs, lo: Fraction, hi: Fraction, max_width: Fraction):
    """High-precision seed for refine(); returns a certified interval or None."""
    if max_width < 1:
        # width can underflow float range at deep refinement, so take
        # -log2 from the integer bit lengths instead of float(max_width)
        bits = max(
            16,
            max_width.denominator.bit_length() - max_width.numerator.bit_length() + 1,
        )
    else:
        bits = 16
    dps = int(bits * 0.302) + 25
    with mpmath.workdps(dps):
        poly = [mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator) for c in reversed(coeffs)]
        seed = (float(lo) + float(hi)) / 2
        try:
            root = mpmath.findroot(
                lambda x: mpmath.polyval(poly, x), mpmath.mpf(seed), maxsteps=200
            )
        except (ValueError, ZeroDivisionError, mpmath.libmp.NoConvergence):
            return None
        root = mpmath.re(root)
        pad = mpmath.mpf(2) ** (-(bits + 8))
        a = Fraction(mpmath.nstr(root - pad, dps, strip_zeros=False))
        b = Fraction(mpmath.nstr(root + pad, dps, strip_zeros=False))
    if not (lo <= a < b <= hi) or b - a > max_width:
        return None
    sa = sgn(_peval_fraction(coeffs, a))
    sb = sgn(_peval_fraction(coeffs, b))
    if sa != 0 and sb != 0 and sa != sb:
        return a, b
    return None


class FieldElement:
    """An element of a NumberField: a polynomial in rho, degree < field degree.

    The coefficient vector is the canonical representative, so ``==`` and
    ``hash`` are exact and cheap.  Order comparisons go through :meth:`sign`,
    which refines the field's root enclosure until the interval evaluation of
    the element excludes zero.
    """

    __slots__ = ("field", "coeffs", "_f")

    def __init__(self, field: NumberField, coeffs: Sequence[Fraction]):
        self.field = field
        self.coeffs = tuple(coeffs)
        if len(self.coeffs) != field.degree:
            raise ValueError("coefficient vector has wrong length")
        self._f = None

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise TypeError("elements of different number fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.from_rational(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.field, [a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, [-a for a in self.coeffs])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.field, [a - b for a, b in zip(self.coeffs, o.coeffs)])

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        conv = _pmul(self.coeffs, o.coeffs)
        if not conv:
            return self.field.zero()
        return FieldElement(self.field, self.field._reduce(conv))

    __rmul__ = __mul__

    def _inverse(self) -> "FieldElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        # extended Euclid: u*self + v*minpoly = 1
        a = list(self.field.minpoly)
        b = _ptrim(list(self.coeffs))
        s_a, s_b = [], [Fraction(1)]
        while b:
            q, r = _pdivmod(a, b)
            a, b = b, r
            s_a, s_b = s_b, _psub(s_a, _pmul(q, s_b))
        if len(a) != 1:
            raise ZeroDivisionError("element not invertible (gcd degree > 0)")
        inv_lead = 1 / a[0]
        u = [c * inv_lead for c in s_a]
        return FieldElement(self.field, self.field._reduce(u if u else [Fraction(0)]))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o._inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self._inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is irrational")
        return self.coeffs[0]

    def sign(self) -> int:
        if self.is_zero():
            return 0
        if self.is_rational():
            return sgn(self.coeffs[0])
        lo, hi = self.field.enclosure
        while True:
            vlo, vhi = _peval_interval(self.coeffs, lo, hi)
            if vlo > 0:
                return 1
            if vhi < 0:
                return -1
            self.field.refine((hi - lo) / 16)
            lo, hi = self.field.enclosure

    def enclose(self, bits: int):
        """Rational (center, radius) with radius <= 2**-bits."""
        target = Fraction(1, 1 << bits)
        lo, hi = self.field.enclosure
        while True:
            vlo, vhi = _peval_interval(self.coeffs, lo, hi)
            if vhi - vlo <= 2 * target:
                return (vlo + vhi) / 2, (vhi - vlo) / 2
            self.field.refine((hi - lo) / 16)
            lo, hi = self.field.enclosure

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __lt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() < 0

    def __le__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() <= 0

    def __gt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() > 0

    def __ge__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() >= 0

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field is other.field and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __float__(self):
        # naive Horner in doubles cancels catastrophically once the rational
        # coordinates outgrow the value; go through the exact interval instead
        if self._f is None:
            if self.is_zero():
                self._f = 0.0
            elif self.is_rational():
                self._f = float(self.coeffs[0])
            else:
                self.sign()  # refines until the value's interval clears 0
                lo, hi = self.field.enclosure
                while True:
                    vlo, vhi = _peval_interval(self.coeffs, lo, hi)
                    bound = min(abs(vlo), abs(vhi))
                    if (vhi - vlo) * (1 << 60) <= bound:
                        break
                    self.field.refine((hi - lo) / 16)
                    lo, hi = self.field.enclosure
                self._f = float((vlo + vhi) / 2)
        return self._f

    def __repr__(self):
        return f"FieldElement({float(self):.12g})"


# ---------------------------------------------------------------------------
# enclosures of derived quantities (sup norms, variations)


class Enclosure(NamedTuple):
    """A certified two-sided bound [lo, hi] on a derived scalar quantity.

    Exact computations return point enclosures (lo == hi).  Inequality checks
    between enclosures use the sound direction: A <= B is certified when
    A.hi <= B.lo.
    """

    lo: object
    hi: object

    @staticmethod
    def point(x) -> "Enclosure":
        return Enclosure(x, x)

    @property
    def is_point(self) -> bool:
        return self.lo is self.hi or sgn(self.hi - self.lo) == 0

    def __add__(self, other: "Enclosure") -> "Enclosure":
        return Enclosure(self.lo + other.lo, self.hi + other.hi)

    def max_with(self, other: "Enclosure") -> "Enclosure":
        return Enclosure(scalar_max(self.lo, other.lo), scalar_max(self.hi, other.hi))

    def scale_nonneg(self, c) -> "Enclosure":
        if sgn(c) < 0:
            raise ValueError("scale factor must be nonnegative")
        return Enclosure(c * self.lo, c * self.hi)

    def certifies_leq(self, other: "Enclosure") -> bool:
        """True when this quantity is provably <= the other."""
        return sgn(self.hi - other.lo) <= 0

    def mid_float(self) -> float:
        return (to_float(self.lo) + to_float(self.hi)) / 2
