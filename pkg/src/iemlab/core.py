"""Interval exchange maps: permutation pairs, lengths, evaluation, Keane check.

An interval exchange map is determined by a pair of bijections pi0, pi1 from a
finite alphabet onto {1..d} and a positive length per letter.  The map cuts
[0, |I|) into half-open intervals I_alpha laid out in pi0 order and reorders
them into pi1 order by translations.  The pair must be admissible: no proper
prefix {1..k} is sent to the same letter set by pi0 and pi1, otherwise the map
splits into smaller invariant blocks.

Lengths live in one of the scalar algebras of :mod:`iemlab.exact`; every
membership decision goes through exact signs, so tracked-real inputs raise
PrecisionExhausted rather than misclassify a point near a cut.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import exact
from .errors import NotAdmissible, PrecisionExhausted, RangeError
from .exact import ensure_scalar, scalar_mode, sgn


@dataclass(frozen=True)
class PermutationPair:
    """A pair of letter orders (top = domain layout, bottom = image layout).

    ``alphabet`` fixes the basis order used by every matrix and vector in the
    pipeline.  ``top[i]`` and ``bottom[i]`` are the 1-based ranks of
    ``alphabet[i]`` in the two orders.
    """

    alphabet: tuple[str, ...]
    top: tuple[int, ...]
    bottom: tuple[int, ...]

    def __post_init__(self):
        d = len(self.alphabet)
        if len(set(self.alphabet)) != d or d < 2:
            raise NotAdmissible("alphabet must have at least 2 distinct letters")
        for ranks in (self.top, self.bottom):
            if sorted(ranks) != list(range(1, d + 1)):
                raise NotAdmissible(f"ranks {ranks} are not a bijection onto 1..{d}")

    @staticmethod
    def from_rows(top_row: Sequence[str], bottom_row: Sequence[str]) -> "PermutationPair":
        """Build from the two left-to-right letter rows; alphabet = top row."""
        alphabet = tuple(top_row)
        if set(bottom_row) != set(alphabet) or len(bottom_row) != len(alphabet):
            raise NotAdmissible("rows must contain the same letters")
        top = tuple(range(1, len(alphabet) + 1))
        pos = {a: i + 1 for i, a in enumerate(bottom_row)}
        bottom = tuple(pos[a] for a in alphabet)
        return PermutationPair(alphabet, top, bottom)

    @staticmethod
    def from_maps(alphabet: Sequence[str], pi0: dict, pi1: dict) -> "PermutationPair":
        alphabet = tuple(alphabet)
        return PermutationPair(
            alphabet,
            tuple(int(pi0[a]) for a in alphabet),
            tuple(int(pi1[a]) for a in alphabet),
        )

    @property
    def d(self) -> int:
        return len(self.alphabet)

    def rank(self, eps: int, letter: str) -> int:
        ranks = self.top if eps == 0 else self.bottom
        return ranks[self.alphabet.index(letter)]

    def order(self, eps: int) -> tuple[str, ...]:
        """Letters in left-to-right order on side eps."""
        ranks = self.top if eps == 0 else self.bottom
        return tuple(a for _, a in sorted(zip(ranks, self.alphabet)))

    def letter_at(self, eps: int, rank: int) -> str:
        return self.order(eps)[rank - 1]

    def last_letter(self, eps: int) -> str:
        return self.letter_at(eps, self.d)

    def first_letter(self, eps: int) -> str:
        return self.letter_at(eps, 1)

    def is_admissible(self) -> bool:
        order0, order1 = self.order(0), self.order(1)
        for k in range(1, self.d):
            if set(order0[:k]) == set(order1[:k]):
                return False
        return True

    def require_admissible(self) -> "PermutationPair":
        if not self.is_admissible():
            raise NotAdmissible(
                f"pair {self} splits at a proper prefix", pair=str(self)
            )
        return self

    def swapped(self) -> "PermutationPair":
        """The pair of the inverse map: roles of the two rows exchanged."""
        return PermutationPair(self.alphabet, self.bottom, self.top)

    def __eq__(self, other):
        # same rows left to right, whatever order the alphabet indexes them
        if not isinstance(other, PermutationPair):
            return NotImplemented
        return (self.order(0), self.order(1)) == (other.order(0), other.order(1))

    def __hash__(self):
        return hash((self.order(0), self.order(1)))

    def __str__(self):
        return " ".join(self.order(0)) + " / " + " ".join(self.order(1))


@dataclass(frozen=True)
class KeaneVerdict:
    """Outcome of an orbit-collision scan of the discontinuities."""

    status: str  # "pass" | "fail" | "inconclusive"
    horizon: int
    step: int | None = None
    source: object = None
    target: object = None

    @property
    def passed(self) -> bool:
        return self.status == "pass"


class Iem:
    """An interval exchange map with exact lengths.

    Parameters
    ----------
    pair : PermutationPair
        Admissible combinatorial datum.
    lengths : sequence of scalars
        Positive lengths aligned with ``pair.alphabet``.  All entries must
        belong to a single scalar mode (rational, tracked real, or one shared
        number field).

    Instances are immutable; derived layouts are computed once.  Induction
    produces new instances rather than mutating.
    """

    __slots__ = (
        "pair",
        "lengths",
        "mode",
        "_lefts0",
        "_lefts1",
        "_translations",
        "_total",
        "_inverse",
        "self_similarity",
    )

    def __init__(self, pair: PermutationPair, lengths: Sequence, self_similarity=None):
        pair.require_admissible()
        if len(lengths) != pair.d:
            raise ValueError("one length per letter required")
        lengths = tuple(lengths)
        modes = {scalar_mode(v) for v in lengths}
        if len(modes) != 1:
            raise TypeError(f"mixed scalar modes in lengths: {sorted(modes)}")
        for letter, v in zip(pair.alphabet, lengths):
            if sgn(v) <= 0:
                raise ValueError(f"length of {letter} is not positive")
        self.pair = pair
        self.lengths = lengths
        self.mode = modes.pop()
        self.self_similarity = self_similarity
        zero = ensure_scalar(0, lengths[0]) if self.mode != exact.RATIONAL else Fraction(0)
        lefts0, lefts1 = {}, {}
        acc = zero
        for a in pair.order(0):
            lefts0[a] = acc
            acc = acc + self.length(a, lengths)
        total = acc
        acc = zero
        for a in pair.order(1):
            lefts1[a] = acc
            acc = acc + self.length(a, lengths)
        self._lefts0 = lefts0
        self._lefts1 = lefts1
        self._total = total
        self._translations = {a: lefts1[a] - lefts0[a] for a in pair.alphabet}
        self._inverse = None

    def length(self, letter: str, _lengths=None):
        lengths = self.lengths if _lengths is None else _lengths
        return lengths[self.pair.alphabet.index(letter)]

    @property
    def alphabet(self) -> tuple[str, ...]:
        return self.pair.alphabet

    @property
    def d(self) -> int:
        return self.pair.d

    def total(self):
        return self._total

    def left(self, letter: str, side: int = 0):
        return (self._lefts0 if side == 0 else self._lefts1)[letter]

    def interval(self, letter: str, side: int = 0):
        lo = self.left(letter, side)
        return lo, lo + self.length(letter)

    def translation(self, letter: str):
        return self._translations[letter]

    def zero(self):
        return ensure_scalar(0, self.lengths[0])

    def locate(self, x, side: int = 0) -> str:
        """Letter of the half-open interval containing x on the given side."""
        if sgn(x) < 0 or sgn(x - self._total) >= 0:
            raise RangeError("point outside the domain", x=exact.to_float(x))
        letters = self.pair.order(side)
        # scan from the left; the first right endpoint strictly above x wins
        acc = self.zero()
        for a in letters:
            acc = acc + self.length(a)
            if sgn(x - acc) < 0:
                return a
        return letters[-1]

    def evaluate(self, x):
        return x + self._translations[self.locate(x, side=0)]

    def inverse(self) -> "Iem":
        if self._inverse is None:
            inv = Iem(self.pair.swapped(), self.lengths)
            inv._inverse = self
            self._inverse = inv
        return self._inverse

    def evaluate_inverse(self, y):
        return self.inverse().evaluate(y)

    def orbit(self, x, count: int) -> list:
        """[x, T x, ..., T^(count-1) x]."""
        pts = [x]
        for _ in range(count - 1):
            pts.append(self.evaluate(pts[-1]))
        return pts

    def discontinuities(self, include_zero: bool = False) -> list:
        """Left endpoints of the domain layout; the interior ones cut T."""
        pts = [self._lefts0[a] for a in self.pair.order(0)]
        return pts if include_zero else pts[1:]

    def normalized_lengths(self) -> tuple:
        t = self._total
        return tuple(v / t for v in self.lengths)

    def keane_check(self, horizon: int) -> KeaneVerdict:
        """Scan forward orbits of the marked points for collisions with cuts.

        Marked points are the interior cuts and 0 (whose orbit is the tail of
        a cut orbit, so scanning it reports the same connections one step
        sooner); a collision at step k means T^k of a source equals an
        interior cut.  Exact ties fail the check.  Tracked-real mode reports
        "inconclusive" at the first comparison its radii cannot decide.
        """
        sources = self.discontinuities(include_zero=True)
        targets = self.discontinuities(include_zero=False)
        for src in sources:
            x = src
            for step in range(1, horizon + 1):
                try:
                    x = self.evaluate(x)
                    hit = next((t for t in targets if sgn(x - t) == 0), None)
                except PrecisionExhausted:
                    return KeaneVerdict("inconclusive", horizon, step=step, source=src)
                if hit is not None:
                    return KeaneVerdict(
                        "fail", horizon, step=step, source=src, target=hit
                    )
        return KeaneVerdict("pass", horizon)

    def __repr__(self):
        lens = ", ".join(f"{exact.to_float(v):.6g}" for v in self.lengths)
        return f"Iem({self.pair}, [{lens}], mode={self.mode})"


def rational_iem(top_row: Iterable[str], bottom_row: Iterable[str], lengths) -> Iem:
    """Convenience constructor from letter rows and int/Fraction lengths."""
    pair = PermutationPair.from_rows(tuple(top_row), tuple(bottom_row))
    return Iem(pair, tuple(Fraction(v) for v in lengths))
