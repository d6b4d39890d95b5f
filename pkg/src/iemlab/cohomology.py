"""Constructive solver for Psi - Psi o T = Phi on interval exchange maps.

Pipeline: a mean-zero piecewise function phi is integrated per letter
(``p0_primitive``), the integration constants are corrected by a series of
quotient-cocycle inverses (``delta_p``) so that the special sums of the
primitive decay, and the solution Psi is realized on the orbit of a base
point as a normalized sequence of partial Birkhoff sums (``psi_on_orbit``).
A summable majorant over tower levels then certifies that every plain sum
|S_N Phi(base)| is bounded (``boundedness_certificate``).

Exactness policy: everything that can be exact is exact (integration, the
per-letter constancy and zero-integral identities, the final DPhi = phi
check, orbit identities through tracked centers).  The correction vector
itself rests on the floating stable-space estimate; it is rationalized and
then re-projected exactly onto the zero-integral hyperplane, so the exact
invariants survive while the float error stays confined to *which* zero-mean
constant got added.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import exp, log

import numpy as np

from .birkhoff import orbit_decomposition, special_sum
from .errors import NotInGammaStar, NotSummable, RangeError, SeriesDiverging
from .exact import abs_upper, ensure_scalar, scalar_abs, sgn, to_float, TrackedReal
from .fit import fit_slope, tail_slice
from .functions import PiecewiseFunction, PolyPiece
from .induction import InductionTrace, _assert_zero
from .roth import StableSpaceEstimate, estimate_stable_space, quotient_setup


def _zero_exact(x) -> None:
    _assert_zero(x)


def p0_primitive(fn: PiecewiseFunction) -> PiecewiseFunction:
    """Per-letter antiderivative of fn whose mean vanishes on every letter.

    The input must have exactly zero total integral (constants from the
    zero-mean hyperplane are fine; a nonzero-mean function has no primitive
    in the space the solver works in).  The derivative of the result is fn,
    piece by piece, restoring exactly what integration absorbed.
    """
    fn.require_polynomial("p0_primitive")
    total = fn.integral()
    if isinstance(total, TrackedReal):
        if total.center != 0:
            raise NotInGammaStar(
                "total integral is nonzero", integral=str(total)
            )
    elif sgn(total) != 0:
        raise NotInGammaStar("total integral is nonzero", integral=str(total))
    pieces = {}
    for letter, piece in fn.pieces.items():
        length = fn.iem.length(letter)
        anti = piece.antiderivative()
        mean = anti.integral(length) / length
        shifted = list(anti.coeffs)
        shifted[0] = shifted[0] - mean
        pieces[letter] = PolyPiece(tuple(shifted))
    return PiecewiseFunction(fn.iem, pieces, level=fn.level)


def lambda_correction(trace: InductionTrace, n: int, fn_prev: PiecewiseFunction):
    """Defect of integration against one induction block, as exact constants.

    Integrating then summing differs from summing then integrating by a
    function that is provably constant on each letter of level n with zero
    total integral; both facts are asserted exactly, and the per-letter
    constants are returned as a vector on the level-n alphabet.
    """
    if fn_prev.level != n - 1:
        raise RangeError("function lives at the wrong level", level=fn_prev.level, n=n)
    after = p0_primitive(special_sum(trace, n - 1, n, fn_prev))
    before = special_sum(trace, n - 1, n, p0_primitive(fn_prev))
    diff = after - before
    vec = []
    for letter in diff.iem.pair.alphabet:
        coeffs = diff.pieces[letter].coeffs
        for c in coeffs[1:]:
            _zero_exact(c)
        vec.append(coeffs[0])
    acc = None
    for c, lam in zip(vec, trace.lengths_at(n)):
        term = c * lam
        acc = term if acc is None else acc + term
    _zero_exact(acc)
    return tuple(vec)


@dataclass
class DeltaPCorrection:
    """Truncated correction series, expressed at the base level.

    ``vector`` is the float representative (a zero-mean constant vector in
    the estimated complement of the decaying space); ``term_norms`` are the
    sup norms of the accumulated terms, and ``tail_bound`` the geometric
    extrapolation fitted from their decay.  ``lambda_rows`` record the decay
    of each raw defect against the cocycle, for reporting.
    """

    level: int
    truncation: int
    vector: tuple
    term_norms: tuple
    tail_bound: float
    quotient_dim: int
    lambda_rows: tuple
    estimates: dict = field(repr=False, default_factory=dict)


def delta_p(
    trace: InductionTrace,
    m: int,
    fn: PiecewiseFunction,
    truncation: int,
    depth: int = 10,
    delta: float = 0.1,
    estimates: dict | None = None,
) -> DeltaPCorrection:
    """Sum the quotient-inverted integration defects back to level m.

    Each level n in (m, m+truncation] contributes the level-n defect of
    fn's running special sum, reduced to the estimated quotient, pulled back
    through the inverse quotient cocycle.  Term norms must decay over the
    range; otherwise SeriesDiverging (the series is extrapolated only when
    the observed part is honestly geometric).
    """
    if truncation < 1:
        raise RangeError("truncation must be at least 1", truncation=truncation)
    trace.extend_to(m + truncation + depth)
    cache = estimates if estimates is not None else {}

    def est(level: int) -> StableSpaceEstimate:
        if level not in cache:
            cache[level] = estimate_stable_space(trace, level, depth, delta)
        return cache[level]

    est_m = est(m)
    d = trace.iem_at(m).pair.d
    total = np.zeros(d)
    psi = fn if fn.level is not None else PiecewiseFunction(fn.iem, fn.pieces, level=m)
    if psi.level != m:
        raise RangeError("function lives at the wrong level", level=psi.level, m=m)
    term_norms: list[float] = []
    lambda_rows: list[dict] = []
    w_dim = None
    for n in range(m + 1, m + truncation + 1):
        lam_vec = lambda_correction(trace, n, psi)
        psi = special_sum(trace, n - 1, n, psi)
        w_m, w_n, b = quotient_setup(trace, m, n, est_m, est(n))
        w_dim = int(w_m.shape[0])
        lam_float = np.array([to_float(c) for c in lam_vec])
        sup_lam = float(np.max(np.abs(lam_float))) if lam_float.size else 0.0
        lambda_rows.append(
            {
                "n": n,
                "sup_lambda": sup_lam,
                "log_ratio": (
                    log(sup_lam) / log(trace.norm_q(0, n))
                    if sup_lam > 0 and trace.norm_q(0, n) > 1
                    else None
                ),
            }
        )
        if b is None:
            term_norms.append(0.0)
            continue
        u = np.linalg.solve(b, w_n @ lam_float)
        rep = w_m.T @ u
        total += rep
        term_norms.append(float(np.max(np.abs(rep))))
    if all(t == 0.0 for t in term_norms):
        return DeltaPCorrection(
            level=m,
            truncation=truncation,
            vector=tuple(map(float, total)),
            term_norms=tuple(term_norms),
            tail_bound=0.0,
            quotient_dim=w_dim or 0,
            lambda_rows=tuple(lambda_rows),
            estimates=cache,
        )
    quarter = [t for t in term_norms[tail_slice(len(term_norms), 0.25)]]
    if len(quarter) >= 2 and all(
        b >= a for a, b in zip(quarter, quarter[1:])
    ) and quarter[-1] > 0:
        raise SeriesDiverging(
            "correction terms stopped decaying", terms=term_norms
        )
    pos = [(i + 1, t) for i, t in enumerate(term_norms) if t > 0]
    window = tail_slice(len(pos))
    fitted = fit_slope([p[0] for p in pos][window], [log(p[1]) for p in pos][window])
    ratio = exp(fitted.slope)
    if ratio >= 1.0:
        raise SeriesDiverging(
            "fitted term ratio is not below 1", ratio=ratio, terms=term_norms
        )
    tail = pos[-1][1] * ratio / (1.0 - ratio)
    return DeltaPCorrection(
        level=m,
        truncation=truncation,
        vector=tuple(map(float, total)),
        term_norms=tuple(term_norms),
        tail_bound=float(tail),
        quotient_dim=w_dim or 0,
        lambda_rows=tuple(lambda_rows),
        estimates=cache,
    )


@dataclass
class PrimitiveCandidate:
    """A corrected primitive: integrate, then fix the integration constants.

    ``phi`` is the piecewise primitive whose derivative is exactly the input
    and whose total integral is exactly zero; ``correction`` carries the
    float series data the constants came from, and ``corrected_vector`` the
    exact constants actually added (rationalized from the float
    representative, then re-projected exactly onto the zero-integral
    hyperplane).
    """

    phi: PiecewiseFunction
    correction: DeltaPCorrection
    corrected_vector: tuple
    truncation: int
    tail_bound: float
    functoriality: tuple = ()


def _rationalize(values, like_scalar, max_den: int = 10**12):
    fracs = [Fraction(float(v)).limit_denominator(max_den) for v in values]
    return [ensure_scalar(f, like_scalar) for f in fracs]


def build_primitive(
    trace: InductionTrace,
    fn: PiecewiseFunction,
    truncation: int,
    depth: int = 10,
    delta: float = 0.1,
    estimates: dict | None = None,
    check_pairs: tuple = (),
) -> PrimitiveCandidate:
    """Corrected primitive of fn at level 0.

    The correction constants are exact scalars; adding them preserves both
    exact invariants (derivative identity, zero total integral), which are
    asserted before returning.  ``check_pairs`` optionally lists (m, n)
    levels at which the integration/summation exchange residual is measured
    against the certified decay of the stable estimate.
    """
    if fn.level not in (None, 0):
        raise RangeError("input must live at level 0", level=fn.level)
    cache = estimates if estimates is not None else {}
    base = p0_primitive(fn)
    correction = delta_p(
        trace, 0, fn, truncation, depth=depth, delta=delta, estimates=cache
    )
    lengths = trace.lengths_at(0)
    like = lengths[0]
    constants = _rationalize(correction.vector, like)
    weighted = None
    for c, lam in zip(constants, lengths):
        term = c * lam
        weighted = term if weighted is None else weighted + term
    mean_shift = weighted / trace.iem_at(0).total()
    constants = [c - mean_shift for c in constants]
    phi = base.add_constants(constants)
    deriv = phi.derivative() - fn
    for piece in deriv.pieces.values():
        for c in piece.coeffs:
            _zero_exact(c)
    _zero_exact(phi.integral())
    checks = []
    for pair in check_pairs:
        checks.append(
            functoriality_residual(
                trace,
                fn,
                truncation,
                pair[0],
                pair[1],
                depth=depth,
                delta=delta,
                estimates=cache,
            )
        )
    return PrimitiveCandidate(
        phi=phi,
        correction=correction,
        corrected_vector=tuple(constants),
        truncation=truncation,
        tail_bound=correction.tail_bound,
        functoriality=tuple(checks),
    )


def _primitive_at_level(
    trace: InductionTrace,
    fn_level: PiecewiseFunction,
    level: int,
    truncation: int,
    depth: int,
    delta: float,
    estimates: dict,
):
    base = p0_primitive(fn_level)
    correction = delta_p(
        trace, level, fn_level, truncation, depth=depth, delta=delta,
        estimates=estimates,
    )
    lengths = trace.lengths_at(level)
    constants = _rationalize(correction.vector, lengths[0])
    weighted = None
    for c, lam in zip(constants, lengths):
        term = c * lam
        weighted = term if weighted is None else weighted + term
    mean_shift = weighted / trace.iem_at(level).total()
    return base.add_constants([c - mean_shift for c in constants]), correction


def functoriality_residual(
    trace: InductionTrace,
    fn: PiecewiseFunction,
    truncation: int,
    m: int,
    n: int,
    depth: int = 10,
    delta: float = 0.1,
    estimates: dict | None = None,
) -> dict:
    """How far summation and corrected integration are from commuting.

    The residual R = S(m,n)(P at m) - (P at n)(S(m,n) fn_m) is exactly a
    zero-integral constant vector (asserted); its component transverse to
    the estimated decaying space is compared against the pushed-forward tail
    bounds of the two correction series plus the estimate-misalignment leak:
    the decaying component of R bleeds into the measured complement by the
    angle error of each finite-window estimate, for which the singular-value
    gap ratio is the first-order scale (the level-m part rides the cocycle).
    """
    if not 0 <= m < n:
        raise RangeError("need 0 <= m < n", m=m, n=n)
    cache = estimates if estimates is not None else {}
    fn_m = special_sum(trace, 0, m, fn) if m > 0 else fn
    p_m, corr_m = _primitive_at_level(
        trace, fn_m, m, truncation, depth, delta, cache
    )
    fn_n = special_sum(trace, m, n, fn_m)
    p_n, corr_n = _primitive_at_level(
        trace, fn_n, n, truncation, depth, delta, cache
    )
    resid = special_sum(trace, m, n, p_m) - p_n
    vec = []
    for letter in resid.iem.pair.alphabet:
        coeffs = resid.pieces[letter].coeffs
        for c in coeffs[1:]:
            _zero_exact(c)
        vec.append(coeffs[0])
    acc = None
    for c, lam in zip(vec, trace.lengths_at(n)):
        term = c * lam
        acc = term if acc is None else acc + term
    _zero_exact(acc)
    est_m = cache[m] if m in cache else estimate_stable_space(trace, m, depth, delta)
    est_n = cache[n] if n in cache else estimate_stable_space(trace, n, depth, delta)
    lam_n = np.array([to_float(v) for v in trace.lengths_at(n)])
    from .roth import mean_zero_complement

    w_n = mean_zero_complement(lam_n, est_n.basis_array())
    vec_float = np.array([to_float(c) for c in vec])
    transverse = (
        float(np.max(np.abs(w_n.T @ (w_n @ vec_float)))) if w_n.size else 0.0
    )
    resid_sup = float(np.max(np.abs(vec_float))) if vec_float.size else 0.0
    corr_sup = max((abs(v) for v in corr_m.vector), default=0.0)
    gap_m = est_m.gap_ratio or 0.0
    gap_n = est_n.gap_ratio or 0.0
    bound = (
        trace.norm_q(m, n) * corr_m.tail_bound
        + corr_n.tail_bound
        + gap_n * resid_sup
        + trace.norm_q(m, n) * gap_m * corr_sup
        + 1e-9 * (1.0 + trace.norm_q(m, n))
    )
    return {
        "m": m,
        "n": n,
        "residual": tuple(map(to_float, vec)),
        "transverse_norm": transverse,
        "bound": float(bound),
        "within_bound": transverse <= bound,
    }


# ---------------------------------------------------------------------------
# orbit realization


@dataclass
class PsiOrbitTable:
    """Solution values along the forward orbit of the base point.

    Entries are (k, T^k base, Psi value); the normalization constant makes
    the recorded Psi values average to zero.  The defining identity
    Psi(x_k) - Psi(x_{k+1}) = Phi(x_k) holds exactly for every recorded k
    (asserted at construction), and ``sup_abs_sums`` is the observed
    sup_k |S_k Phi(base)|.
    """

    base: object
    entries: tuple
    normalization: object
    sup_abs_sums: object
    mode: str

    def values(self) -> list:
        return [e[2] for e in self.entries]

    def float_rows(self) -> list[tuple[int, float, float]]:
        return [(k, to_float(x), to_float(v)) for k, x, v in self.entries]


def psi_on_orbit(
    iem,
    phi,
    count: int,
    base=None,
    check_keane: bool = True,
) -> PsiOrbitTable:
    """Realize the transfer solution on base, T base, ..., T^(count-1) base.

    Psi(x_k) = c - S_k with S_k the plain Birkhoff sum of phi and c the mean
    of the S_k, so the recorded values have mean zero.  ``phi`` may be a
    PiecewiseFunction or any callable.  The orbit must be free of marked
    points up to the horizon (Keane check, unless disabled).
    """
    if base is None:
        base = iem.zero()
    if check_keane:
        verdict = iem.keane_check(count)
        if verdict.status == "fail":
            raise RangeError(
                "orbit hits a marked point before the horizon",
                step=verdict.step,
            )
    evaluate = phi.evaluate if isinstance(phi, PiecewiseFunction) else phi
    xs = [base]
    for _ in range(count):
        xs.append(iem.evaluate(xs[-1]))
    zero = base - base
    sums = [zero]
    for k in range(count):
        sums.append(sums[-1] + evaluate(xs[k]))
    acc = sums[0]
    for s in sums[1:count]:
        acc = acc + s
    c = acc / count
    values = [c - sums[k] for k in range(count)]
    for k in range(count - 1):
        _zero_exact(values[k] - values[k + 1] - evaluate(xs[k]))
    sup = None
    for s in sums[:count]:
        a = abs_upper(s)
        sup = a if sup is None else (a if to_float(a) > to_float(sup) else sup)
    mean_check = None
    for v in values:
        mean_check = v if mean_check is None else mean_check + v
    _zero_exact(mean_check)
    mode = iem.mode if hasattr(iem, "mode") else "rational"
    return PsiOrbitTable(
        base=base,
        entries=tuple((k, xs[k], values[k]) for k in range(count)),
        normalization=c,
        sup_abs_sums=sup,
        mode=mode,
    )


# ---------------------------------------------------------------------------
# boundedness certificate


@dataclass
class BoundednessCertificate:
    """Summable majorant for all plain Birkhoff sums at the base point.

    Any orbit segment of budget N decomposes into at most ||Z(n+1)|| tower
    blocks per level n, so sum_n ||Z(n+1)|| * sup|S(0,n) phi| bounds every
    |S_N phi(base)| whose decomposition stays within the computed levels
    (N <= valid_horizon).  ``majorant`` includes the fitted geometric tail.
    """

    terms: tuple
    partial_sums: tuple
    majorant: float
    tail: float
    fit: object
    valid_horizon: int
    n_levels: int
    _trace: InductionTrace = field(repr=False, default=None)
    _phi: PiecewiseFunction = field(repr=False, default=None)

    def check_bound(self, budget: int) -> dict:
        """Exactly reconstruct S_budget phi(0) and compare to the majorant."""
        if budget > self.valid_horizon:
            raise RangeError(
                "budget exceeds the certified horizon",
                budget=budget,
                horizon=self.valid_horizon,
            )
        dec = orbit_decomposition(self._trace, budget)
        value = dec.reconstruct(self._phi)
        ok = to_float(scalar_abs(value)) <= self.majorant
        return {
            "budget": budget,
            "value": to_float(value),
            "majorant": self.majorant,
            "within": ok,
            "levels_used": dec.max_level,
        }


def boundedness_certificate(
    trace: InductionTrace, phi: PiecewiseFunction, n_levels: int
) -> BoundednessCertificate:
    """Certify sup_N |S_N phi(0)| via geometrically decaying level terms.

    Terms t_n = ||Z(n+1)|| * sup|S(0,n) phi| are summed for n = 0..n_levels;
    the last quarter must fit a negative geometric slope by two standard
    errors, else NotSummable.  The certificate is valid for budgets whose
    greedy decomposition stays within the computed levels.
    """
    trace.extend_to(n_levels + 1)
    terms = []
    cur = phi
    for n in range(n_levels + 1):
        if n > 0:
            cur = special_sum(trace, n - 1, n, cur)
        sup = to_float(cur.sup_norm().hi)
        terms.append(trace.norm_z(n + 1) * sup)
    quarter = tail_slice(len(terms), 0.25)
    xs = [n for n in range(n_levels + 1)][quarter]
    ys = terms[quarter]
    pos = [(x, y) for x, y in zip(xs, ys) if y > 0]
    if len(pos) < 3:
        tail = 0.0
        fitted = None
        if any(y > 0 for y in terms[quarter.start or 0 :]):
            raise NotSummable(
                "too few positive tail terms to certify decay", terms=terms
            )
    else:
        fitted = fit_slope([p[0] for p in pos], [log(p[1]) for p in pos])
        if not fitted.clears_below(0.0):
            raise NotSummable(
                "level terms do not decay geometrically",
                slope=fitted.slope,
                stderr=fitted.stderr,
                terms=terms,
            )
        ratio = exp(fitted.slope)
        tail = pos[-1][1] * ratio / (1.0 - ratio)
    partial = []
    acc = 0.0
    for t in terms:
        acc += t
        partial.append(acc)
    majorant = acc + tail
    top = trace.iem_at(n_levels + 1)
    first_letter = top.pair.letter_at(0, 1)
    horizon = trace.return_times(0, n_levels + 1)[first_letter] - 1
    return BoundednessCertificate(
        terms=tuple(terms),
        partial_sums=tuple(partial),
        majorant=float(majorant),
        tail=float(tail),
        fit=fitted,
        valid_horizon=horizon,
        n_levels=n_levels,
        _trace=trace,
        _phi=phi,
    )


# ---------------------------------------------------------------------------
# round trip


@dataclass
class RoundtripReport:
    deviation: float
    constant: float
    count: int
    sup_abs_sums: float
    mode: str


def coboundary_roundtrip(iem, psi0, count: int, base=None) -> RoundtripReport:
    """Plant a solution, difference it, re-solve, and measure the gap.

    phi := psi0 - psi0 o T is fed to psi_on_orbit; the recovered values must
    match psi0 along the orbit up to one additive constant.  The deviation
    is the sup of |recovered - planted - constant| with the constant chosen
    as the mean gap.
    """
    evaluate = psi0.evaluate if isinstance(psi0, PiecewiseFunction) else psi0

    def phi(x):
        return evaluate(x) - evaluate(iem.evaluate(x))

    table = psi_on_orbit(iem, phi, count, base=base, check_keane=False)
    gaps = [v - evaluate(x) for _, x, v in table.entries]
    acc = gaps[0]
    for g in gaps[1:]:
        acc = acc + g
    c = acc / len(gaps)
    # the gap is constant up to tracking radius, so its sign can straddle
    # zero; bound the magnitude instead of resolving the sign
    deviation = max(to_float(abs_upper(g - c)) for g in gaps)
    return RoundtripReport(
        deviation=deviation,
        constant=to_float(c),
        count=count,
        sup_abs_sums=to_float(table.sup_abs_sums),
        mode=table.mode,
    )
