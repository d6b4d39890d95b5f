"""Instance factories and independent oracles shared by the test modules.

The oracles here deliberately avoid the induction bookkeeping: they walk
orbits with Iem.evaluate/locate only, or run plain integer Euclid, so that
agreement with the library is evidence rather than tautology.
"""

import itertools
from fractions import Fraction

from iemlab.core import Iem, PermutationPair
from iemlab.errors import KeaneViolation, NotAdmissible
from iemlab.exact import TrackedReal
from iemlab.induction import InductionTrace

_POOLS: dict[int, list[PermutationPair]] = {}


def admissible_pairs(d: int) -> list[PermutationPair]:
    """Every admissible pair on d letters with the top row alphabetical."""
    if d not in _POOLS:
        letters = "ABCDEFGH"[:d]
        pool = []
        for perm in itertools.permutations(letters):
            try:
                pair = PermutationPair.from_rows(letters, "".join(perm))
            except NotAdmissible:
                continue
            if pair.is_admissible():
                pool.append(pair)
        _POOLS[d] = pool
    return _POOLS[d]


def random_rational_iem(rng, d: int, bits: int = 192) -> Iem:
    """Random admissible pair with odd integer lengths of about `bits` bits."""
    pool = admissible_pairs(d)
    pair = pool[rng.randrange(len(pool))]
    lengths = [Fraction(rng.randrange(1, 1 << bits) * 2 + 1) for _ in range(d)]
    return Iem(pair, lengths)


def top_height(trace) -> int:
    """Return time over 0 at the deepest computed level of the trace."""
    n = trace.n_blocks
    beta = trace.iem_at(n).locate(trace.base.zero())
    return trace.return_times(0, n)[beta]


def rational_trace(
    rng,
    d: int,
    n_blocks: int,
    bits: int = 192,
    mode: str = "accelerated",
    max_norm: int | None = None,
    min_top_height: int | None = None,
):
    """A random rational instance that survives n_blocks; resamples on a tie.

    ``max_norm`` caps ||Q(0, n_blocks)||: orbit-walking tests cost that many
    exact evaluations, so they need instances with small return times.
    ``min_top_height`` instead deepens the trace until the return time over 0
    exceeds the given budget, resampling instances that die first.
    """
    for _ in range(300):
        trace = InductionTrace(random_rational_iem(rng, d, bits), mode=mode)
        try:
            trace.extend_to(n_blocks)
            if min_top_height is not None:
                while top_height(trace) <= min_top_height:
                    trace.extend_to(trace.n_blocks + 2)
        except KeaneViolation:
            continue
        if max_norm is not None and trace.norm_q(0, n_blocks) > max_norm:
            continue
        return trace
    raise AssertionError(f"could not sample a d={d} instance surviving {n_blocks} blocks")


def tracked_copy(iem: Iem, bits: int = 256) -> Iem:
    """The same map with lengths demoted to tracked intervals of 2^-bits radius."""
    radius = Fraction(1, 1 << bits)

    def center(x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, TrackedReal):
            return Fraction(x.center)
        return x.enclose(bits + 44)[0]

    return Iem(iem.pair, [TrackedReal(center(x), radius) for x in iem.lengths])


# -- oracles ----------------------------------------------------------------


def brute_visit_counts(t_m: Iem, i_n: Iem, beta: str) -> dict[str, int]:
    """Level-m letter visit counts along one return orbit to the level-n interval.

    Walks T(m) from the midpoint of I_beta(n) until the orbit first falls
    back into [0, |I(n)|), tallying the letter of each point.  These tallies
    are the height data that the cocycle matrix columns claim to encode.
    """
    total_n = i_n.total()
    counts = {a: 0 for a in t_m.alphabet}
    y = i_n.left(beta) + i_n.length(beta) / 2
    while True:
        counts[t_m.locate(y)] += 1
        y = t_m.evaluate(y)
        if y < total_n:
            break
    return counts


def continued_fraction(q: Fraction) -> list[int]:
    """Euclid quotients of a positive rational."""
    p, d = q.numerator, q.denominator
    out = []
    while d:
        out.append(p // d)
        p, d = d, p % d
    return out


def direct_orbit_sum(iem: Iem, fn, count: int, base=None):
    """Plain forward-orbit sum of fn, written independently of the library."""
    x = iem.zero() if base is None else base
    evaluate = fn.evaluate if hasattr(fn, "evaluate") else fn
    acc = None
    for _ in range(count):
        v = evaluate(x)
        acc = v if acc is None else acc + v
        x = iem.evaluate(x)
    return acc


def grid_max_abs(f, length, samples: int = 400):
    """Exact lower bound for sup |f| on [0, length) from a uniform grid."""
    best = None
    for i in range(samples):
        v = abs(f(length * Fraction(i, samples)))
        if best is None or v > best:
            best = v
    return best


def grid_variation(f, length, samples: int = 400):
    """Exact lower bound for the total variation of f on [0, length)."""
    pts = [f(length * Fraction(i, samples)) for i in range(samples)]
    return sum(abs(b - a) for a, b in zip(pts, pts[1:]))
