"""Induction on interval exchange maps and the length cocycle.

One elementary step compares the two last-slot letters: the one with the
larger interval (the winner) absorbs the other.  Exact ties mean the map
fails the minimality condition and raise KeaneViolation.  Lengths transform
as lambda(before) = E lambda(after) with E = I + e_{winner,loser}, so a run
of steps gives lambda(m) = Q(m,n) lambda(n) with Q a product of the
elementary matrices in step order: nonnegative integer entries, det +-1.

Steps are grouped into blocks three ways:

``rv``           one elementary step per block;
``zorich``       maximal runs of steps of one type;
``accelerated``  the longest run whose arrow-name set stays a proper subset
                 of the alphabet (adding one more arrow would complete it).

Block n carries the matrix Z(n) = product of its elementary matrices, and
Q(m,n) = Z(m+1) ... Z(n) is served from a cache of balanced partial products.
Accelerated grouping consults arrow names and defaults to the ``winner``
convention; the ``first`` convention is accepted for diagnostics but its
name set is capped at two letters, so for alphabets of three or more letters
accelerated blocks cannot close and the step cap triggers HorizonExceeded.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from . import matutil
from .core import Iem, PermutationPair
from .diagram import rauzy_move
from .errors import (
    HorizonExceeded,
    KeaneViolation,
    NotPrimitive,
    RangeError,
)
from .exact import NumberField, sgn, to_float

MODES = ("rv", "zorich", "accelerated")


def step_type(iem: Iem) -> int:
    """0 or 1 according to which last-slot letter has the larger interval."""
    a0 = iem.pair.last_letter(0)
    a1 = iem.pair.last_letter(1)
    s = sgn(iem.length(a0) - iem.length(a1))
    if s == 0:
        raise KeaneViolation(
            "the two last-slot intervals tie exactly",
            letters=(a0, a1),
            length=str(iem.length(a0)),
        )
    return 0 if s > 0 else 1


def rv_step(iem: Iem):
    """One elementary step.

    Returns
    -------
    (next_iem, eps, winner, first, E) where lambda(before) = E lambda(after).
    """
    eps = step_type(iem)
    pair = iem.pair
    winner = pair.last_letter(eps)
    loser = pair.last_letter(1 - eps)
    first = pair.first_letter(eps)
    wi = pair.alphabet.index(winner)
    li = pair.alphabet.index(loser)
    new_lengths = list(iem.lengths)
    new_lengths[wi] = iem.lengths[wi] - iem.lengths[li]
    e_matrix = tuple(
        tuple(1 if i == j or (i == wi and j == li) else 0 for j in range(pair.d))
        for i in range(pair.d)
    )
    next_iem = Iem(rauzy_move(pair, eps), new_lengths)
    return next_iem, eps, winner, first, e_matrix


@dataclass(frozen=True)
class BlockRecord:
    """One block of elementary steps and its cocycle matrix."""

    index: int  # 1-based: block n maps level n-1 to level n
    types: tuple[int, ...]
    winners: tuple[str, ...]
    firsts: tuple[str, ...]
    z: matutil.Matrix

    @property
    def elementary_count(self) -> int:
        return len(self.types)


class InductionTrace:
    """A lazily extended run of induction blocks from a base map.

    The trace owns the level maps T(0), T(1), ... and the block matrices;
    everything else (return times, towers, positivity horizons) is derived.
    Instances never mutate already-computed levels; extension appends.
    """

    def __init__(
        self,
        iem: Iem,
        mode: str = "accelerated",
        convention: str = "winner",
        step_cap: int = 10**6,
    ):
        if mode not in MODES:
            raise ValueError(f"unknown block mode {mode!r}")
        if convention not in ("winner", "first"):
            raise ValueError(f"unknown name convention {convention!r}")
        self._iems = [iem]
        self._blocks: list[BlockRecord] = []
        self.mode = mode
        self.convention = convention
        self.step_cap = step_cap
        self._qcache: dict[tuple[int, int], matutil.Matrix] = {}

    # -- extension -----------------------------------------------------------

    @property
    def n_blocks(self) -> int:
        return len(self._blocks)

    @property
    def base(self) -> Iem:
        return self._iems[0]

    @property
    def alphabet(self) -> tuple[str, ...]:
        return self.base.alphabet

    def extend_to(self, n_blocks: int) -> "InductionTrace":
        while self.n_blocks < n_blocks:
            self._append_block()
        return self

    def _append_block(self) -> None:
        t = self._iems[-1]
        full = set(t.alphabet)
        types: list[int] = []
        winners: list[str] = []
        firsts: list[str] = []
        z = matutil.identity(t.d)
        names: set[str] = set()
        while True:
            if len(types) >= self.step_cap:
                raise HorizonExceeded(
                    "block did not close within the step cap",
                    mode=self.mode,
                    convention=self.convention,
                    steps=len(types),
                )
            nxt, eps, winner, first, e = rv_step(t)
            name = winner if self.convention == "winner" else first
            if self.mode == "accelerated" and names and names | {name} == full:
                break
            t = nxt
            types.append(eps)
            winners.append(winner)
            firsts.append(first)
            names.add(name)
            z = matutil.matmul(z, e)
            if self.mode == "rv":
                break
            if self.mode == "zorich" and step_type(t) != types[0]:
                break
        self._iems.append(t)
        self._blocks.append(
            BlockRecord(
                index=len(self._blocks) + 1,
                types=tuple(types),
                winners=tuple(winners),
                firsts=tuple(firsts),
                z=z,
            )
        )

    # -- accessors -----------------------------------------------------------

    def _check_level(self, n: int) -> None:
        if not 0 <= n <= self.n_blocks:
            raise RangeError(
                f"level {n} not computed (trace has {self.n_blocks} blocks)"
            )

    def iem_at(self, n: int) -> Iem:
        self._check_level(n)
        return self._iems[n]

    def block(self, n: int) -> BlockRecord:
        if not 1 <= n <= self.n_blocks:
            raise RangeError(f"block {n} not computed")
        return self._blocks[n - 1]

    def z_matrix(self, n: int) -> matutil.Matrix:
        return self.block(n).z

    def q_matrix(self, m: int, n: int) -> matutil.Matrix:
        """Q(m,n) = Z(m+1) ... Z(n); cached balanced products."""
        self._check_level(m)
        self._check_level(n)
        if m > n:
            raise RangeError(f"need m <= n, got {m} > {n}")
        if m == n:
            return matutil.identity(self.base.d)
        if n - m == 1:
            return self.z_matrix(n)
        key = (m, n)
        if key not in self._qcache:
            mid = (m + n) // 2
            self._qcache[key] = matutil.matmul(
                self.q_matrix(m, mid), self.q_matrix(mid, n)
            )
        return self._qcache[key]

    def norm_z(self, n: int) -> int:
        return matutil.norm_colsum(self.z_matrix(n))

    def norm_q(self, m: int, n: int) -> int:
        return matutil.norm_colsum(self.q_matrix(m, n))

    def lengths_at(self, n: int) -> tuple:
        return self.iem_at(n).lengths

    def return_times(self, m: int, n: int) -> dict[str, int]:
        """Per-letter first-return time of I(n) inside the level-m dynamics."""
        sums = matutil.col_sums(self.q_matrix(m, n))
        return dict(zip(self.alphabet, sums))

    def positivity_horizon(self, m: int) -> int:
        """Least computed n > m with Q(m,n) entrywise positive."""
        self._check_level(m)
        for n in range(m + 1, self.n_blocks + 1):
            if matutil.is_positive(self.q_matrix(m, n)):
                return n
        raise HorizonExceeded(
            "no positive window within the computed trace",
            m=m,
            computed=self.n_blocks,
        )

    def tower(self, m: int, n: int) -> dict[str, list]:
        """Orbit itineraries of the level-n intervals under T(m).

        For each letter beta, the list holds (alpha_l, p_l) for
        l = 0 .. Q_beta(m,n)-1: p_l = T(m)^l applied to the left endpoint of
        I_beta(n) and alpha_l the level-m letter whose interval contains the
        whole translated copy of I_beta(n).  Containment and the per-letter
        visit counts against Q(m,n) are asserted along the way.
        """
        if m >= n:
            raise RangeError("tower needs m < n")
        tm, tn = self.iem_at(m), self.iem_at(n)
        q = self.q_matrix(m, n)
        sums = matutil.col_sums(q)
        out: dict[str, list] = {}
        for bi, beta in enumerate(self.alphabet):
            p = tn.left(beta)
            w = tn.length(beta)
            itinerary = []
            counts: Counter = Counter()
            for _ in range(sums[bi]):
                alpha = tm.locate(p)
                lo, hi = tm.interval(alpha)
                if sgn(p - lo) < 0 or sgn((p + w) - hi) > 0:
                    raise AssertionError(
                        f"tower slice of {beta} leaves I_{alpha} at level {m}"
                    )
                itinerary.append((alpha, p))
                counts[alpha] += 1
                p = tm.evaluate(p)
            for ai, alpha in enumerate(self.alphabet):
                if counts.get(alpha, 0) != q[ai][bi]:
                    raise AssertionError(
                        f"visit counts of {beta} disagree with the cocycle"
                    )
            _assert_zero(p - tn.evaluate(tn.left(beta)))
            out[beta] = itinerary
        return out

    def name_coverage(self, window: int, convention: str | None = None) -> list[dict]:
        """Arrow-name coverage over consecutive windows of blocks."""
        convention = convention or self.convention
        full = set(self.alphabet)
        reports = []
        for start in range(0, self.n_blocks - window + 1, window):
            covered: set[str] = set()
            for n in range(start + 1, start + window + 1):
                b = self.block(n)
                covered |= set(b.winners if convention == "winner" else b.firsts)
            reports.append(
                {
                    "start": start,
                    "end": start + window,
                    "covered": sorted(covered),
                    "complete": covered == full,
                    "convention": convention,
                }
            )
        return reports


def _assert_zero(diff) -> None:
    # exact modes: sign must vanish; tracked mode: the rational centers follow
    # the same exact arithmetic, so the center must vanish
    from .exact import TrackedReal

    if isinstance(diff, TrackedReal):
        if diff.center != 0:
            raise AssertionError("exact identity violated in tracked centers")
    elif sgn(diff) != 0:
        raise AssertionError("exact identity violated")


# ---------------------------------------------------------------------------
# self-similar maps from loops


@dataclass(frozen=True)
class SelfSimilarity:
    """Certificate that a map reproduces itself after one loop of steps."""

    types: tuple[int, ...]
    matrix: matutil.Matrix
    base: PermutationPair


def loop_matrix(pair: PermutationPair, types) -> matutil.Matrix:
    """Product of elementary matrices along a type sequence; must be a loop."""
    p = pair
    total = matutil.identity(pair.d)
    for eps in types:
        winner = p.last_letter(eps)
        loser = p.last_letter(1 - eps)
        wi = pair.alphabet.index(winner)
        li = pair.alphabet.index(loser)
        e = tuple(
            tuple(1 if i == j or (i == wi and j == li) else 0 for j in range(pair.d))
            for i in range(pair.d)
        )
        total = matutil.matmul(total, e)
        p = rauzy_move(p, eps)
    if p != pair:
        raise RangeError(
            "type sequence does not close a loop", end=str(p), start=str(pair)
        )
    return total


def self_similar_iem(pair: PermutationPair, types, verify_periods: int = 3) -> Iem:
    """The map whose induction repeats the given loop forever.

    Lengths are the Perron eigenvector of the loop matrix, exact in the number
    field generated by the Perron root; the loop matrix must be primitive.
    The construction is verified by running ``verify_periods`` loops of
    elementary steps and asserting the type sequence, the pair, and the exact
    geometric scaling of the lengths.
    """
    types = tuple(int(e) for e in types)
    matrix = loop_matrix(pair, types)
    if not matutil.is_primitive(matrix):
        raise NotPrimitive(
            "loop matrix has no positive power", matrix=matutil.mat_to_lists(matrix)
        )
    field = NumberField.from_matrix(matrix)
    rho = field.rho()
    v = _perron_vector(matrix, field, rho)
    total = v[0]
    for x in v[1:]:
        total = total + x
    v = [x / total for x in v]
    iem = Iem(pair, v, self_similarity=SelfSimilarity(types, matrix, pair))
    _verify_self_similar(iem, types, rho, verify_periods)
    return iem


def _perron_vector(matrix, field: NumberField, rho):
    """Positive nullspace vector of (matrix - rho I), exact in the field."""
    d = len(matrix)
    m = [
        [field.from_rational(matrix[i][j]) - (rho if i == j else 0) for j in range(d)]
        for i in range(d)
    ]
    piv_rows: list[int] = []
    piv_cols: list[int] = []
    r = 0
    for c in range(d):
        pivot = next((i for i in range(r, d) if not m[i][c].is_zero()), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = m[r][c]
        m[r] = [x / inv for x in m[r]]
        for i in range(d):
            if i != r and not m[i][c].is_zero():
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        piv_rows.append(r)
        piv_cols.append(c)
        r += 1
        if r == d:
            break
    if r != d - 1:
        raise NotPrimitive("Perron eigenvalue is not simple", rank=r)
    free = next(c for c in range(d) if c not in piv_cols)
    v = [field.zero()] * d
    v[free] = field.one()
    for row, col in zip(piv_rows, piv_cols):
        v[col] = -m[row][free]
    signs = {x.sign() for x in v}
    if signs == {-1}:
        v = [-x for x in v]
    elif signs != {1}:
        raise NotPrimitive("eigenvector is not strictly one-signed", signs=sorted(signs))
    return v


def _verify_self_similar(iem: Iem, types, rho, periods: int) -> None:
    t = iem
    period = len(types)
    for k in range(periods * period):
        t, eps, _w, _f, _e = rv_step(t)
        if eps != types[k % period]:
            raise AssertionError(
                f"self-similar loop broke at step {k}: type {eps} vs {types[k % period]}"
            )
        if (k + 1) % period == 0:
            if t.pair != iem.pair:
                raise AssertionError("pair did not return to base after one period")
            scale = rho ** ((k + 1) // period)
            for a, b in zip(t.lengths, iem.lengths):
                if a * scale != b:
                    raise AssertionError("lengths did not contract by the Perron root")


def golden_iem() -> Iem:
    """The standard two-letter self-similar benchmark (loop types 0,1)."""
    return self_similar_iem(PermutationPair.from_rows("AB", "BA"), (0, 1))


def fibonacci(n: int) -> int:
    """F(1) = F(2) = 1; the norm profile of the golden benchmark."""
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def float_lengths(iem: Iem) -> list[float]:
    return [to_float(v) for v in iem.lengths]
