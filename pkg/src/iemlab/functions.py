"""Piecewise observables on the intervals of an exchange map.

A function is a piece per letter, written in the local coordinate
u = x - left(alpha) of its interval.  Two piece kinds exist:

:class:`PolyPiece`
    a polynomial with exact scalar coefficients.  Closed under the pipeline's
    operators (translation sums keep the degree), with exact sup-norm and
    variation through degree 2 and certified enclosures above that.

:class:`SampledPiece`
    a right-open step function given by interior breakpoints and cell values.
    Its own variation and sup are exact; as a stand-in for a sampled smooth
    function its variation is only a lower bound, and operators that need
    smooth structure refuse it with UnsupportedKind.

Sup-norms and variations are reported as :class:`~iemlab.exact.Enclosure`
values so inequality checks can always take the sound direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import PrecisionExhausted, UnsupportedKind
from .exact import Enclosure, ensure_scalar, same_scalar, scalar_abs, scalar_max, sgn, to_float


def _pow_small(x, n: int):
    out = 1
    for _ in range(n):
        out = x * out
    return out


@dataclass(frozen=True)
class PolyPiece:
    """Polynomial on [0, length) in the local coordinate, ascending coeffs."""

    coeffs: tuple

    def __post_init__(self):
        if not self.coeffs:
            object.__setattr__(self, "coeffs", (Fraction(0),))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def eval(self, u):
        acc = ensure_scalar(0, u) if not isinstance(u, (int, Fraction)) else Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * u + c
        return acc

    def map_coeffs(self, f) -> "PolyPiece":
        return PolyPiece(tuple(f(c) for c in self.coeffs))

    def add(self, other: "PolyPiece") -> "PolyPiece":
        n = max(len(self.coeffs), len(other.coeffs))
        out = []
        for i in range(n):
            a = self.coeffs[i] if i < len(self.coeffs) else 0
            b = other.coeffs[i] if i < len(other.coeffs) else 0
            out.append(a + b)
        return PolyPiece(tuple(out))

    def scale(self, c) -> "PolyPiece":
        return self.map_coeffs(lambda a: c * a)

    def neg(self) -> "PolyPiece":
        return self.map_coeffs(lambda a: -a)

    def shift(self, c) -> "PolyPiece":
        """The piece u -> p(u + c), exact binomial expansion."""
        deg = self.degree
        powers = [1]
        for _ in range(deg):
            powers.append(powers[-1] * c)
        out = []
        for k in range(deg + 1):
            acc = None
            for i in range(k, deg + 1):
                term = math.comb(i, k) * self.coeffs[i] * powers[i - k]
                acc = term if acc is None else acc + term
            out.append(acc)
        return PolyPiece(tuple(out))

    def derivative(self) -> "PolyPiece":
        if self.degree == 0:
            return PolyPiece((Fraction(0),))
        return PolyPiece(tuple((i + 1) * c for i, c in enumerate(self.coeffs[1:])))

    def antiderivative(self) -> "PolyPiece":
        out = [Fraction(0)]
        for i, c in enumerate(self.coeffs):
            out.append(c * Fraction(1, i + 1))
        return PolyPiece(tuple(out))

    def integral(self, length):
        return self.antiderivative().eval(length)

    def trimmed(self) -> "PolyPiece":
        coeffs = list(self.coeffs)
        while len(coeffs) > 1 and _is_zero_scalar(coeffs[-1]):
            coeffs.pop()
        return PolyPiece(tuple(coeffs))

    def sup_abs(self, length) -> Enclosure:
        p = self.trimmed()
        if p.degree <= 2:
            cands = [p.eval(ensure_scalar(0, length)), p.eval(length)]
            if p.degree == 2:
                crit = -p.coeffs[1] / (2 * p.coeffs[2])
                if sgn(crit) > 0 and sgn(crit - length) < 0:
                    cands.append(p.eval(crit))
            best = scalar_abs(cands[0])
            for v in cands[1:]:
                best = scalar_max(best, scalar_abs(v))
            return Enclosure.point(best)
        return _sup_enclosure(p, length)

    def variation(self, length) -> Enclosure:
        """Total variation on [0, length]; exact through degree 2."""
        p = self.trimmed()
        d = p.derivative().trimmed()
        if d.degree == 0:
            return Enclosure.point(scalar_abs(p.eval(length) - p.eval(ensure_scalar(0, length))))
        if d.degree == 1:
            root = -d.coeffs[0] / d.coeffs[1]
            zero = ensure_scalar(0, length)
            if sgn(root) > 0 and sgn(root - length) < 0:
                v = scalar_abs(p.eval(root) - p.eval(zero)) + scalar_abs(
                    p.eval(length) - p.eval(root)
                )
            else:
                v = scalar_abs(p.eval(length) - p.eval(zero))
            return Enclosure.point(v)
        return _variation_enclosure(p, d, length)


def _is_zero_scalar(c) -> bool:
    try:
        return sgn(c) == 0
    except PrecisionExhausted:
        return False


def _coeff_abs_bound(p: PolyPiece, length):
    """Upper bound for |p| on [0, length] from coefficient magnitudes."""
    total = None
    for i, c in enumerate(p.coeffs):
        term = scalar_abs(c) * _pow_small(_max_one(length), i)
        total = term if total is None else total + term
    return total


def _max_one(length):
    one = ensure_scalar(1, length)
    return scalar_max(length, one)


def _sup_enclosure(p: PolyPiece, length, cells: int = 64) -> Enclosure:
    dbound = _coeff_abs_bound(p.derivative(), length)
    h = length * Fraction(1, cells)
    lo = None
    for i in range(cells + 1):
        v = scalar_abs(p.eval(h * i))
        lo = v if lo is None else scalar_max(lo, v)
    hi = lo + dbound * h * Fraction(1, 2)
    return Enclosure(lo, hi)


def _variation_enclosure(p: PolyPiece, d: PolyPiece, length, cells: int = 64) -> Enclosure:
    d2bound = _coeff_abs_bound(d.derivative(), length)
    h = length * Fraction(1, cells)
    lo = None
    prev = p.eval(ensure_scalar(0, length))
    hi_sum = None
    for i in range(1, cells + 1):
        cur = p.eval(h * i)
        jump = scalar_abs(cur - prev)
        lo = jump if lo is None else lo + jump
        mid_slope = scalar_abs(d.eval(h * i - h * Fraction(1, 2)))
        cell_hi = h * mid_slope + h * h * d2bound * Fraction(1, 2)
        hi_sum = cell_hi if hi_sum is None else hi_sum + cell_hi
        prev = cur
    return Enclosure(lo, hi_sum)


@dataclass(frozen=True)
class SampledPiece:
    """Right-open step function: values[i] on [breaks[i-1], breaks[i])."""

    breaks: tuple
    values: tuple

    def __post_init__(self):
        if len(self.values) != len(self.breaks) + 1:
            raise ValueError("need one more value than interior breakpoints")

    def eval(self, u):
        for b, v in zip(self.breaks, self.values):
            if sgn(u - b) < 0:
                return v
        return self.values[-1]

    def integral(self, length):
        edges = [ensure_scalar(0, length), *self.breaks, length]
        total = None
        for i, v in enumerate(self.values):
            term = v * (edges[i + 1] - edges[i])
            total = term if total is None else total + term
        return total

    def sup_abs(self, length) -> Enclosure:
        best = scalar_abs(self.values[0])
        for v in self.values[1:]:
            best = scalar_max(best, scalar_abs(v))
        return Enclosure.point(best)

    def variation(self, length) -> Enclosure:
        total = ensure_scalar(0, self.values[0]) if not isinstance(self.values[0], (int, Fraction)) else Fraction(0)
        for a, b in zip(self.values, self.values[1:]):
            total = total + scalar_abs(b - a)
        return Enclosure.point(total)


class PiecewiseFunction:
    """One piece per letter of an exchange map's domain layout."""

    __slots__ = ("iem", "pieces", "level")

    def __init__(self, iem, pieces: dict, level: int | None = None):
        missing = set(iem.alphabet) - set(pieces)
        if missing:
            raise ValueError(f"missing pieces for letters {sorted(missing)}")
        self.iem = iem
        self.pieces = {a: pieces[a] for a in iem.alphabet}
        self.level = level

    # -- constructors --------------------------------------------------------

    @staticmethod
    def constants(iem, values, level: int | None = None) -> "PiecewiseFunction":
        """A per-letter constant function (values: dict or alphabet-ordered)."""
        if not isinstance(values, dict):
            values = dict(zip(iem.alphabet, values))
        return PiecewiseFunction(
            iem, {a: PolyPiece((values[a],)) for a in iem.alphabet}, level
        )

    @staticmethod
    def from_coeffs(iem, coeffs: dict, level: int | None = None) -> "PiecewiseFunction":
        return PiecewiseFunction(
            iem, {a: PolyPiece(tuple(c)) for a, c in coeffs.items()}, level
        )

    @staticmethod
    def from_global_poly(iem, coeffs, level: int | None = None) -> "PiecewiseFunction":
        """Restrict one polynomial in the ambient coordinate to every piece."""
        like = iem.lengths[0]
        base = PolyPiece(tuple(ensure_scalar(c, like) for c in coeffs))
        pieces = {a: base.shift(iem.left(a)) for a in iem.pair.alphabet}
        return PiecewiseFunction(iem, pieces, level)

    @staticmethod
    def indicator(iem, letter: str, level: int | None = None) -> "PiecewiseFunction":
        values = {a: Fraction(1 if a == letter else 0) for a in iem.alphabet}
        return PiecewiseFunction.constants(iem, values, level)

    # -- structure -----------------------------------------------------------

    def piece(self, letter: str):
        return self.pieces[letter]

    def is_polynomial(self) -> bool:
        return all(isinstance(p, PolyPiece) for p in self.pieces.values())

    def require_polynomial(self, op: str) -> None:
        bad = [a for a, p in self.pieces.items() if not isinstance(p, PolyPiece)]
        if bad:
            raise UnsupportedKind(
                f"{op} needs polynomial pieces; letters {bad} are sampled", letters=bad
            )

    def max_degree(self) -> int:
        self.require_polynomial("degree")
        return max(p.trimmed().degree for p in self.pieces.values())

    def is_constant(self) -> bool:
        return self.is_polynomial() and all(
            p.trimmed().degree == 0 for p in self.pieces.values()
        )

    def gamma_vector(self) -> list:
        if not self.is_constant():
            raise UnsupportedKind("function is not constant per letter")
        return [self.pieces[a].trimmed().coeffs[0] for a in self.iem.alphabet]

    def kind_tag(self) -> str:
        if not self.is_polynomial():
            return "sampled-bv"
        base = "gamma" if self.is_constant() else f"poly-deg{self.max_degree()}"
        try:
            if sgn(self.integral()) == 0:
                return base + "*"
        except PrecisionExhausted:
            pass
        return base

    # -- evaluation and calculus ---------------------------------------------

    def evaluate(self, x):
        letter = self.iem.locate(x)
        return self.pieces[letter].eval(x - self.iem.left(letter))

    def letter_integral(self, letter: str):
        return self.pieces[letter].integral(self.iem.length(letter))

    def integral(self):
        total = None
        for a in self.iem.alphabet:
            v = self.letter_integral(a)
            total = v if total is None else total + v
        return total

    def letter_means(self) -> dict:
        return {
            a: self.letter_integral(a) / self.iem.length(a) for a in self.iem.alphabet
        }

    def is_mean_zero_per_letter(self) -> bool:
        return all(sgn(v) == 0 for v in self.letter_means().values())

    def sup_norm(self) -> Enclosure:
        out = None
        for a in self.iem.alphabet:
            e = self.pieces[a].sup_abs(self.iem.length(a))
            out = e if out is None else out.max_with(e)
        return out

    def variation_by_letter(self) -> dict[str, Enclosure]:
        return {
            a: self.pieces[a].variation(self.iem.length(a)) for a in self.iem.alphabet
        }

    def variation_total(self) -> Enclosure:
        out = None
        for e in self.variation_by_letter().values():
            out = e if out is None else out + e
        return out

    def derivative(self) -> "PiecewiseFunction":
        self.require_polynomial("derivative")
        return PiecewiseFunction(
            self.iem, {a: p.derivative() for a, p in self.pieces.items()}, self.level
        )

    # -- algebra ---------------------------------------------------------------

    def _check_same_domain(self, other: "PiecewiseFunction") -> None:
        if self.iem is other.iem:
            return
        if self.iem.pair != other.iem.pair or not all(
            same_scalar(a, b) for a, b in zip(self.iem.lengths, other.iem.lengths)
        ):
            raise ValueError("functions live on different domains")

    def __add__(self, other: "PiecewiseFunction") -> "PiecewiseFunction":
        self._check_same_domain(other)
        self.require_polynomial("add")
        other.require_polynomial("add")
        return PiecewiseFunction(
            self.iem,
            {a: self.pieces[a].add(other.pieces[a]) for a in self.iem.alphabet},
            self.level,
        )

    def __neg__(self) -> "PiecewiseFunction":
        self.require_polynomial("negate")
        return PiecewiseFunction(
            self.iem, {a: p.neg() for a, p in self.pieces.items()}, self.level
        )

    def __sub__(self, other: "PiecewiseFunction") -> "PiecewiseFunction":
        return self + (-other)

    def scale(self, c) -> "PiecewiseFunction":
        self.require_polynomial("scale")
        return PiecewiseFunction(
            self.iem, {a: p.scale(c) for a, p in self.pieces.items()}, self.level
        )

    def add_constants(self, values) -> "PiecewiseFunction":
        """Add a per-letter constant vector (dict or alphabet order)."""
        if not isinstance(values, dict):
            values = dict(zip(self.iem.alphabet, values))
        self.require_polynomial("add constants")
        return PiecewiseFunction(
            self.iem,
            {a: p.add(PolyPiece((values[a],))) for a, p in self.pieces.items()},
            self.level,
        )

    def float_table(self, samples_per_piece: int = 8) -> list[tuple[float, float]]:
        """(x, value) floats for plotting and CSV emission."""
        rows = []
        for a in self.iem.alphabet:
            left = self.iem.left(a)
            ln = self.iem.length(a)
            for k in range(samples_per_piece):
                u = ln * Fraction(k, samples_per_piece)
                rows.append((to_float(left + u), to_float(self.pieces[a].eval(u))))
        rows.sort()
        return rows

    def __repr__(self):
        return f"PiecewiseFunction({self.kind_tag()}, level={self.level})"
