"""Special Birkhoff sums and their decay bookkeeping.

S(m,n) maps a function on the level-m intervals to a function on the level-n
intervals by summing along the return-time towers:

    (S(m,n) f)(x) = sum of f over the level-m orbit segment of x of length
                    Q_beta(m,n),   x in I_beta(n).

The sums are computed structurally, one block at a time, by translating each
piece along its tower itinerary; no point orbits are walked beyond the
itineraries the induction already certifies.  Consequences that hold exactly
and are asserted where cheap: polynomial degree is preserved, the integral
over the domain is preserved, and on per-letter constants S(m,n) acts as the
transpose of Q(m,n).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import log

from . import matutil
from .errors import HorizonExceeded, RangeError
from .exact import Enclosure, ensure_scalar, scalar_abs, scalar_max, sgn, to_float
from .fit import FitResult, fit_slope, tail_slice
from .functions import PiecewiseFunction, PolyPiece
from .induction import InductionTrace


def single_block_sum(trace: InductionTrace, n: int, fn: PiecewiseFunction) -> PiecewiseFunction:
    """S(n-1,n) applied to a function on the level-(n-1) intervals."""
    fn.require_polynomial("special Birkhoff sums")
    tower = trace.tower(n - 1, n)
    tm = trace.iem_at(n - 1)
    tn = trace.iem_at(n)
    pieces = {}
    for beta, itinerary in tower.items():
        acc = None
        for alpha, p in itinerary:
            contrib = fn.pieces[alpha].shift(p - tm.left(alpha))
            acc = contrib if acc is None else acc.add(contrib)
        pieces[beta] = acc
    return PiecewiseFunction(tn, pieces, level=n)


def special_sum(trace: InductionTrace, m: int, n: int, fn: PiecewiseFunction) -> PiecewiseFunction:
    """S(m,n) via composition of single blocks; S(m,m) is the identity."""
    if m > n:
        raise RangeError(f"need m <= n, got {m} > {n}")
    out = fn
    for k in range(m + 1, n + 1):
        out = single_block_sum(trace, k, out)
    return out


def gamma_matrix(trace: InductionTrace, m: int, n: int) -> matutil.Matrix:
    """Matrix of S(m,n) on per-letter constants: the transpose of Q(m,n)."""
    return matutil.transpose(trace.q_matrix(m, n))


def mean_decompose(fn: PiecewiseFunction):
    """Split fn = fn0 + chi: chi the per-letter means, fn0 mean-zero pieces."""
    fn.require_polynomial("mean decomposition")
    means = fn.letter_means()
    fn0 = fn.add_constants({a: -v for a, v in means.items()})
    return fn0, [means[a] for a in fn.iem.alphabet]


# ---------------------------------------------------------------------------
# orbit decomposition


@dataclass
class OrbitDecomposition:
    """A length-N orbit of 0 cut into tower blocks of non-increasing level.

    ``terms`` lists (level, start point) in orbit order; consuming a term
    advances the orbit by the level's return time at the start point's
    letter.  The per-level term counts are bounded by the column-sum norm of
    the next block matrix; ``count_bound`` records that ceiling.
    """

    budget: int
    terms: list
    counts: dict
    max_level: int
    count_bound: dict
    _trace: InductionTrace = field(repr=False)

    def reconstruct(self, fn: PiecewiseFunction):
        """Evaluate the Birkhoff sum of fn over the decomposed orbit."""
        level_sums: dict[int, PiecewiseFunction] = {}
        total = None
        for level, x in self.terms:
            if level not in level_sums:
                level_sums[level] = special_sum(self._trace, 0, level, fn)
            v = level_sums[level].evaluate(x)
            total = v if total is None else total + v
        return total if total is not None else ensure_scalar(0, self._trace.base.lengths[0])

    def counts_within_bound(self) -> bool:
        return all(self.counts[n] <= self.count_bound[n] for n in self.counts)


def orbit_decomposition(trace: InductionTrace, budget: int) -> OrbitDecomposition:
    """Decompose the length-``budget`` orbit of 0 under T(0) into tower blocks.

    Greedy from the deepest computed level whose tower block at the running
    point fits the remaining budget, never ascending.  The running point
    always lies in the current level's domain, because consuming a level-n
    block maps within I(n) and descending only shrinks n.  Needs the trace
    deep enough that some computed level's block at 0 exceeds the budget.
    """
    if budget < 1:
        raise RangeError("budget must be at least 1")
    zero = trace.base.zero()

    def height(level: int, x) -> int:
        beta = trace.iem_at(level).locate(x)
        return trace.return_times(0, level)[beta]

    top = None
    for n in range(trace.n_blocks + 1):
        if height(n, zero) > budget:
            top = n - 1
            break
    if top is None:
        raise HorizonExceeded(
            "every computed level's block at 0 fits the budget; extend the trace",
            budget=budget,
            computed=trace.n_blocks,
        )
    terms = []
    counts: dict[int, int] = {}
    x = zero
    remaining = budget
    for level in range(top, -1, -1):
        while remaining > 0:
            h = height(level, x)
            if h > remaining:
                break
            terms.append((level, x))
            counts[level] = counts.get(level, 0) + 1
            x = trace.iem_at(level).evaluate(x)
            remaining -= h
        if remaining == 0:
            break
    if remaining != 0:
        raise AssertionError("descent finished with budget left over")
    bound = {n: trace.norm_z(n + 1) for n in counts}
    return OrbitDecomposition(
        budget=budget,
        terms=terms,
        counts=counts,
        max_level=max(counts),
        count_bound=bound,
        _trace=trace,
    )


# ---------------------------------------------------------------------------
# decay profiles


@dataclass(frozen=True)
class ProfileRow:
    n: int
    norm_z: int | None  # ||Z(n)||, None at n = 0
    norm_q: int  # ||Q(0,n)||
    sup_block: Enclosure | None  # ||S(n-1,n) phi_{n-1}||_inf
    sup_phi: Enclosure  # ||phi_n||_inf  (mean-zero part)
    maxvar_phi: Enclosure  # max_alpha Var_{I_alpha(n)} phi_n
    chi_norm: Enclosure  # ||chi_n||_inf  (per-letter mean vector)
    sup_total: Enclosure  # ||S(0,n) phi||_inf
    bounded_by_maxvar: bool
    maxvar_bounded: bool
    chi_bounded: bool
    block_bounded: bool


@dataclass
class DecayProfile:
    """Per-level records of the mean/zero-mean splitting of S(0,n) phi.

    The recorded inequalities: the sup of the mean-zero part is bounded by
    its largest per-letter variation; that variation never exceeds the total
    variation of the input; the mean vector extracted at level n is bounded
    by the block sum's sup, which in turn is bounded by ||Z(n)|| times the
    input variation.
    """

    rows: list[ProfileRow]
    var_total: Enclosure
    fit: FitResult | None
    mode: str
    convention: str

    @property
    def inequalities_hold(self) -> bool:
        return all(
            r.bounded_by_maxvar and r.maxvar_bounded and r.chi_bounded and r.block_bounded
            for r in self.rows
        )

    def sup_floats(self) -> list[float]:
        return [r.sup_total.mid_float() for r in self.rows]

    def is_decaying(self, k: float = 2.0) -> bool:
        return self.fit is not None and self.fit.clears_below(0.0, k)


def decay_profile(trace: InductionTrace, fn: PiecewiseFunction, n_max: int) -> DecayProfile:
    """Track sup norms, means, and variations of S(0,n) fn for n <= n_max."""
    fn.require_polynomial("decay profile")
    trace.extend_to(n_max)
    var_total = fn.variation_total()
    sup_fn = fn.sup_norm()
    phi, chi = mean_decompose(fn)
    rows: list[ProfileRow] = []

    def chi_enclosure(vec) -> Enclosure:
        best = None
        for v in vec:
            e = Enclosure.point(scalar_abs(v))
            best = e if best is None else best.max_with(e)
        return best

    def maxvar(f: PiecewiseFunction) -> Enclosure:
        best = None
        for e in f.variation_by_letter().values():
            best = e if best is None else best.max_with(e)
        return best

    sup_phi0 = phi.sup_norm()
    maxvar0 = maxvar(phi)
    chi0 = chi_enclosure(chi)
    rows.append(
        ProfileRow(
            n=0,
            norm_z=None,
            norm_q=1,
            sup_block=None,
            sup_phi=sup_phi0,
            maxvar_phi=maxvar0,
            chi_norm=chi0,
            sup_total=sup_fn,
            bounded_by_maxvar=sup_phi0.certifies_leq(maxvar0),
            maxvar_bounded=maxvar0.certifies_leq(var_total),
            chi_bounded=chi0.certifies_leq(sup_fn),
            block_bounded=True,
        )
    )
    carried = list(chi)
    phi_prev = phi
    for n in range(1, n_max + 1):
        block = single_block_sum(trace, n, phi_prev)
        sup_block = block.sup_norm()
        phi_n, chi_n = mean_decompose(block)
        carried = [
            a + b for a, b in zip(matutil.vec_mat(carried, trace.z_matrix(n)), chi_n)
        ]
        total_fn = phi_n.add_constants(carried)
        sup_phi_n = phi_n.sup_norm()
        maxvar_n = maxvar(phi_n)
        chi_norm = chi_enclosure(chi_n)
        z_norm = trace.norm_z(n)
        rows.append(
            ProfileRow(
                n=n,
                norm_z=z_norm,
                norm_q=trace.norm_q(0, n),
                sup_block=sup_block,
                sup_phi=sup_phi_n,
                maxvar_phi=maxvar_n,
                chi_norm=chi_norm,
                sup_total=total_fn.sup_norm(),
                bounded_by_maxvar=sup_phi_n.certifies_leq(maxvar_n),
                maxvar_bounded=maxvar_n.certifies_leq(var_total),
                chi_bounded=chi_norm.certifies_leq(sup_block),
                block_bounded=sup_block.certifies_leq(var_total.scale_nonneg(z_norm)),
            )
        )
        phi_prev = phi_n
    fitted = None
    xs, ys = [], []
    for r in rows[1:]:
        s = r.sup_total.mid_float()
        if s > 0 and r.norm_q > 1:
            xs.append(log(r.norm_q))
            ys.append(log(s))
    window = tail_slice(len(xs))
    if len(xs[window.start : window.stop]) >= 3:
        fitted = fit_slope(xs[window], ys[window])
    return DecayProfile(
        rows=rows,
        var_total=var_total,
        fit=fitted,
        mode=trace.mode,
        convention=trace.convention,
    )


def sup_profile(trace: InductionTrace, fn: PiecewiseFunction, n_max: int):
    """Floats of ||S(0,n) fn||_inf with a tail fit against log ||Q(0,n)||.

    Returns (sups, fit): sups[n] for n = 0..n_max; fit over the trailing half
    (None when degenerate).
    """
    trace.extend_to(n_max)
    cur = fn
    sups = [fn.sup_norm().mid_float()]
    for n in range(1, n_max + 1):
        cur = single_block_sum(trace, n, cur)
        sups.append(cur.sup_norm().mid_float())
    xs, ys = [], []
    for n in range(1, n_max + 1):
        if sups[n] > 0:
            xs.append(log(trace.norm_q(0, n)))
            ys.append(log(sups[n]))
    window = tail_slice(len(xs))
    try:
        fitted = fit_slope(xs[window], ys[window])
    except Exception:
        fitted = None
    return sups, fitted


def direct_birkhoff_sum(iem, fn_eval, x, count: int):
    """Plain orbit-walk sum of fn over x, T x, ..., T^(count-1) x.

    The independent cross-check for the structural machinery; cost is one
    evaluation per orbit point.  ``fn_eval`` is a callable or a
    PiecewiseFunction.
    """
    evaluate = fn_eval.evaluate if isinstance(fn_eval, PiecewiseFunction) else fn_eval
    total = None
    for _ in range(count):
        v = evaluate(x)
        total = v if total is None else total + v
        x = iem.evaluate(x)
    return total
