"""Diophantine-type growth diagnostics for an induction trace.

Three observable conditions are profiled over a finite range and judged
"consistent", "violated" (with a concrete witness), or "inconclusive".
Verdicts are statements about the observed range only, never proofs.

(a) block norms are eventually negligible against the accumulated cocycle:
    log ||Z(n+1)|| / log ||Q(0,n)|| should tend to 0;

(b) the cocycle contracts mean-zero constants by a definite power:
    ||S(0,n) restricted to the zero-mean hyperplane|| <= ||Q(0,n)||^(1-theta)
    for some theta > 0, fitted in log-log coordinates;

(c) the inverse of the quotient cocycle (mean-zero constants modulo the
    estimated decaying subspace) grows slower than any power:
    log ||inverse|| / log ||Q(0,n)|| should tend to 0.

The restricted norm in (b) is computed exactly: the unit ball of the
hyperplane slice of the sup-norm cube is a polytope whose vertices are edge
crossings, and a convex maximum is attained at a vertex.  The stable-space
estimate behind (c) is floating point (SVD over a finite window), certified
by replaying the window: the per-vector contraction ratios must fit a
negative slope by two standard errors.  Estimated bases are projected onto
the zero-mean hyperplane (the decaying space provably lives there) and the
projection residual is reported.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from itertools import combinations, product
from math import log

import numpy as np

from . import matutil
from .errors import DegenerateFit, NoGap, SingularQuotient
from .exact import scalar_abs, scalar_max, sgn, to_float
from .fit import FitResult, fit_slope, tail_slice
from .induction import InductionTrace


def mean_zero_vertices(weights) -> list[list]:
    """Vertices of {||c||_inf <= 1} cut by the hyperplane <weights, c> = 0.

    Exact scalars in, exact scalars out.  Each vertex fixes all coordinates
    at +-1 except one, determined by the zero-mean constraint; sign patterns
    whose determined coordinate overshoots are discarded.  Cube corners that
    happen to satisfy the constraint exactly are included as degenerate
    crossings.
    """
    d = len(weights)
    verts: list[list] = []
    one = 1
    for free in range(d):
        others = [j for j in range(d) if j != free]
        for signs in product((1, -1), repeat=d - 1):
            dot = None
            for j, s in zip(others, signs):
                term = s * weights[j]
                dot = term if dot is None else dot + term
            t = -dot / weights[free]
            s_t = sgn(t - one)
            s_b = sgn(t + one)
            if s_t > 0 or s_b < 0:
                continue
            if (s_t == 0 or s_b == 0) and free > 0:
                continue  # cube corner; keep it only once (via the first slot)
            c = [None] * d
            for j, s in zip(others, signs):
                c[j] = s * one
            c[free] = t
            verts.append(c)
    return verts


def opnorm_on_mean_zero(matrix_rows, weights):
    """Exact sup-operator norm of c -> matrix_rows @ c on the zero-mean slice."""
    best = None
    for c in mean_zero_vertices(weights):
        image_max = None
        for row in matrix_rows:
            acc = None
            for a, x in zip(row, c):
                term = a * x
                acc = term if acc is None else acc + term
            acc = scalar_abs(acc)
            image_max = acc if image_max is None else scalar_max(image_max, acc)
        best = image_max if best is None else scalar_max(best, image_max)
    return best


# ---------------------------------------------------------------------------
# condition (a)


@dataclass
class ConditionReport:
    name: str
    rows: list
    verdict: str  # consistent | violated | inconclusive
    witness: dict | None
    fit: FitResult | None
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "verdict": self.verdict,
            "witness": self.witness,
            "fit": None if self.fit is None else asdict(self.fit),
            "rows": self.rows,
            "notes": self.notes,
        }


def condition_a_profile(
    trace: InductionTrace,
    n_max: int,
    threshold: float = 0.1,
    violation_floor: float = 0.5,
) -> ConditionReport:
    """Profile log||Z(n+1)|| / log||Q(0,n)|| for n = 1..n_max."""
    trace.extend_to(n_max + 1)
    rows = []
    for n in range(1, n_max + 1):
        ratio = log(trace.norm_z(n + 1)) / log(trace.norm_q(0, n))
        rows.append({"n": n, "norm_z_next": trace.norm_z(n + 1), "ratio": ratio})
    tail = rows[tail_slice(len(rows), 0.25)]
    tail_max = max(r["ratio"] for r in tail)
    tail_min = min(r["ratio"] for r in tail)
    fitted = None
    try:
        fitted = fit_slope([r["n"] for r in rows], [r["ratio"] for r in rows])
    except DegenerateFit:
        pass
    if tail_max < threshold:
        verdict, witness = "consistent", None
    elif tail_min > violation_floor:
        worst = max(tail, key=lambda r: r["ratio"])
        verdict = "violated"
        witness = {
            "n": worst["n"],
            "ratio": worst["ratio"],
            "direction": f"ratio stayed above {violation_floor} across the tail",
        }
    else:
        verdict, witness = "inconclusive", None
    return ConditionReport("a", rows, verdict, witness, fitted)


# ---------------------------------------------------------------------------
# condition (b)


def condition_b_theta(trace: InductionTrace, n_max: int) -> ConditionReport:
    """Fit the contraction exponent on the zero-mean hyperplane.

    theta = 1 - slope of log||S(0,n)|mean-zero|| against log||Q(0,n)||,
    fitted over the trailing half; consistent when theta clears 0 by two
    standard errors.
    """
    trace.extend_to(n_max)
    weights = trace.lengths_at(0)
    rows = []
    for n in range(1, n_max + 1):
        tq = matutil.transpose(trace.q_matrix(0, n))
        norm = opnorm_on_mean_zero(tq, weights)
        rows.append(
            {
                "n": n,
                "norm_restricted": to_float(norm),
                "norm_q": trace.norm_q(0, n),
            }
        )
    pts = [
        (log(r["norm_q"]), log(r["norm_restricted"]))
        for r in rows
        if r["norm_restricted"] > 0 and r["norm_q"] > 1
    ]
    window = tail_slice(len(pts))
    xs = [p[0] for p in pts][window]
    ys = [p[1] for p in pts][window]
    fitted = fit_slope(xs, ys)
    theta = 1.0 - fitted.slope
    ok = theta - 2.0 * fitted.stderr > 0.0
    report = ConditionReport(
        "b",
        rows,
        "consistent" if ok else "inconclusive",
        None,
        fitted,
        notes=[f"theta={theta:.6g}", f"stderr={fitted.stderr:.3g}"],
    )
    if not ok and theta < 0:
        worst = rows[-1]
        report.verdict = "violated"
        report.witness = {
            "n": worst["n"],
            "direction": "restricted norm grew as fast as the full cocycle",
            "theta": theta,
        }
    return report


def condition_b_theta_value(report: ConditionReport) -> float:
    return 1.0 - report.fit.slope


# ---------------------------------------------------------------------------
# stable-space estimation


@dataclass
class StableSpaceEstimate:
    """Float estimate of the decaying subspace at a level, with certificates.

    ``basis`` holds orthonormal row vectors spanning the estimate, already
    projected onto the zero-mean hyperplane; ``residual_mean_zero`` is the
    largest change that projection made (how far the raw SVD directions were
    from the hyperplane the true space lives in).  ``gap_ratio`` is the
    largest retained-below-threshold singular value over the smallest one
    above it; ``replay_fits`` are the per-vector decay fits that certify the
    estimate by rerunning the window.
    """

    level: int
    depth: int
    delta: float
    dim: int
    basis: tuple
    singular_values: tuple
    gap_ratio: float | None
    residual_mean_zero: float
    replay_fits: tuple
    threshold: float

    def basis_array(self) -> np.ndarray:
        if self.dim == 0:
            return np.zeros((0, len(self.singular_values)))
        return np.array(self.basis, dtype=float)

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "depth": self.depth,
            "delta": self.delta,
            "dim": self.dim,
            "gap_ratio": self.gap_ratio,
            "residual_mean_zero": self.residual_mean_zero,
            "singular_values": list(self.singular_values),
            "threshold": self.threshold,
        }


def estimate_stable_space(
    trace: InductionTrace, m: int, depth: int, delta: float = 0.1
) -> StableSpaceEstimate:
    """SVD estimate of the contracted directions of the transposed cocycle.

    Directions of tQ(m, m+depth) whose singular value is at most
    ||Q(m, m+depth)||^(-delta) form the candidate basis; each candidate must
    be certified by replaying the window (contraction ratios fitting a
    negative log-log slope by two standard errors), otherwise NoGap.
    """
    if depth < 3:
        raise NoGap("replay certification needs depth >= 3", depth=depth)
    trace.extend_to(m + depth)
    a = np.array(matutil.transpose(trace.q_matrix(m, m + depth)), dtype=float)
    d = a.shape[0]
    norm_q = trace.norm_q(m, m + depth)
    threshold = float(norm_q) ** (-delta)
    _u, svals, vt = np.linalg.svd(a)
    stable = [i for i, s in enumerate(svals) if s <= threshold]
    if len(stable) == d:
        raise NoGap(
            "every singular value sits below the threshold",
            singular_values=list(map(float, svals)),
            threshold=threshold,
        )
    if not stable:
        return StableSpaceEstimate(
            level=m,
            depth=depth,
            delta=delta,
            dim=0,
            basis=(),
            singular_values=tuple(map(float, svals)),
            gap_ratio=None,
            residual_mean_zero=0.0,
            replay_fits=(),
            threshold=threshold,
        )
    gap_ratio = float(max(svals[i] for i in stable) / min(
        svals[i] for i in range(d) if i not in stable
    ))
    raw = vt[stable, :]
    lam = np.array([to_float(v) for v in trace.lengths_at(m)])
    u = lam / np.linalg.norm(lam)
    projected = raw - np.outer(raw @ u, u)
    residual = float(np.max(np.abs(raw - projected))) if raw.size else 0.0
    q_mat, r_mat = np.linalg.qr(projected.T)
    keep = [i for i in range(r_mat.shape[0]) if abs(r_mat[i, i]) > 1e-10]
    if len(keep) != len(stable):
        raise NoGap(
            "stable directions collapsed onto the mean direction",
            residual=residual,
        )
    basis = q_mat.T[keep]
    replay_fits = []
    for v in basis:
        xs, ys = [], []
        for j in range(1, depth + 1):
            aj = np.array(matutil.transpose(trace.q_matrix(m, m + j)), dtype=float)
            r = float(np.max(np.abs(aj @ v))) / trace.norm_q(m, m + j)
            if r > 0:
                xs.append(log(trace.norm_q(m, m + j)))
                ys.append(log(r))
        try:
            f = fit_slope(xs, ys)
        except DegenerateFit as exc:
            raise NoGap("replay fit degenerate", reason=str(exc)) from exc
        if not f.clears_below(0.0):
            raise NoGap(
                "replay ratios do not certify contraction",
                slope=f.slope,
                stderr=f.stderr,
                level=m,
            )
        replay_fits.append(f)
    return StableSpaceEstimate(
        level=m,
        depth=depth,
        delta=delta,
        dim=len(stable),
        basis=tuple(map(tuple, basis)),
        singular_values=tuple(map(float, svals)),
        gap_ratio=gap_ratio,
        residual_mean_zero=residual,
        replay_fits=tuple(replay_fits),
        threshold=threshold,
    )


# ---------------------------------------------------------------------------
# quotient cocycle (condition c)


def mean_zero_complement(lam: np.ndarray, est_basis: np.ndarray) -> np.ndarray:
    """Orthonormal rows spanning mean-zero directions orthogonal to the estimate."""
    u = lam / np.linalg.norm(lam)
    stack = np.vstack([u[None, :], est_basis]) if est_basis.size else u[None, :]
    _u2, s2, vt2 = np.linalg.svd(stack)
    rank = int(np.sum(s2 > 1e-10))
    return vt2[rank:, :]


def quotient_setup(
    trace: InductionTrace,
    m: int,
    n: int,
    est_m: StableSpaceEstimate,
    est_n: StableSpaceEstimate,
):
    """(W_m rows, W_n rows, matrix of the quotient cocycle in those frames).

    Raises SingularQuotient on dimension mismatch or numerical singularity;
    the matrix is None when the quotient is zero-dimensional.
    """
    lam_m = np.array([to_float(v) for v in trace.lengths_at(m)])
    lam_n = np.array([to_float(v) for v in trace.lengths_at(n)])
    w_m = mean_zero_complement(lam_m, est_m.basis_array())
    w_n = mean_zero_complement(lam_n, est_n.basis_array())
    if w_m.shape[0] != w_n.shape[0]:
        raise SingularQuotient(
            "quotient dimensions differ between levels",
            m=m,
            n=n,
            dims=(int(w_m.shape[0]), int(w_n.shape[0])),
        )
    if w_m.shape[0] == 0:
        return w_m, w_n, None
    a = np.array(matutil.transpose(trace.q_matrix(m, n)), dtype=float)
    b = w_n @ a @ w_m.T
    cond = np.linalg.cond(b)
    if not np.isfinite(cond) or cond > 1e12:
        raise SingularQuotient(
            "quotient cocycle numerically singular",
            m=m,
            n=n,
            cond=float(cond),
        )
    return w_m, w_n, b


def _sup_ball_vertices(w_rows: np.ndarray) -> np.ndarray:
    """Vertices of {y : ||w_rows.T @ y||_inf <= 1} in coordinate space."""
    w, d = w_rows.shape
    if w == 0:
        return np.zeros((0, 0))
    cols = w_rows.T  # d x w: constraint |cols[j] . y| <= 1 per ambient slot j
    verts = []
    for rows_idx in combinations(range(d), w):
        sub = cols[list(rows_idx), :]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        for signs in product((1.0, -1.0), repeat=w):
            y = np.linalg.solve(sub, np.array(signs))
            if np.max(np.abs(cols @ y)) <= 1.0 + 1e-9:
                verts.append(y)
    return np.array(verts)


def quotient_pair_norms(
    trace: InductionTrace,
    m: int,
    n: int,
    est_m: StableSpaceEstimate,
    est_n: StableSpaceEstimate,
):
    """(forward, inverse) sup-norms of the quotient cocycle W(m) -> W(n).

    W(level) is the orthocomplement of the stable estimate inside the
    zero-mean hyperplane; norms are measured in the ambient sup norm through
    the orthonormal coordinates.  Raises SingularQuotient when the matrix is
    numerically singular or the two quotients have different dimensions.
    """
    w_m, w_n, b = quotient_setup(trace, m, n, est_m, est_n)
    if b is None:
        return None, None  # trivial quotient
    b_inv = np.linalg.inv(b)
    fwd = 0.0
    for y in _sup_ball_vertices(w_m):
        fwd = max(fwd, float(np.max(np.abs(w_n.T @ (b @ y)))))
    inv = 0.0
    for y in _sup_ball_vertices(w_n):
        inv = max(inv, float(np.max(np.abs(w_m.T @ (b_inv @ y)))))
    return fwd, inv


def condition_c_profile(
    trace: InductionTrace,
    n_max: int,
    m: int = 0,
    depth: int = 10,
    delta: float = 0.1,
    threshold: float = 0.1,
    violation_floor: float = 0.5,
    estimates: dict | None = None,
) -> ConditionReport:
    """Profile log||inverse quotient(m,n)|| / log||Q(0,n)|| for n in (m, n_max]."""
    trace.extend_to(n_max + depth)
    cache = estimates if estimates is not None else {}

    def est(level: int) -> StableSpaceEstimate:
        if level not in cache:
            cache[level] = estimate_stable_space(trace, level, depth, delta)
        return cache[level]

    est_m = est(m)
    rows = []
    notes = [
        "quotient norms are float estimates over the observed window",
        f"stable estimate at m={m}: dim {est_m.dim}, gap {est_m.gap_ratio}",
    ]
    for n in range(m + 1, n_max + 1):
        fwd, inv = quotient_pair_norms(trace, m, n, est_m, est(n))
        if inv is None:
            rows.append({"n": n, "norm_inverse": None, "ratio": 0.0, "trivial": True})
            continue
        ratio = log(max(inv, 1.0)) / log(trace.norm_q(0, n))
        rows.append(
            {
                "n": n,
                "norm_forward": fwd,
                "norm_inverse": inv,
                "ratio": ratio,
                "trivial": False,
            }
        )
    tail = rows[tail_slice(len(rows), 0.25)]
    tail_max = max(r["ratio"] for r in tail)
    tail_min = min(r["ratio"] for r in tail)
    fitted = None
    try:
        fitted = fit_slope([r["n"] for r in rows], [r["ratio"] for r in rows])
    except DegenerateFit:
        pass
    if all(r.get("trivial") for r in rows):
        verdict, witness = "consistent", None
        notes.append("quotient is zero-dimensional at every level: vacuously consistent")
    elif tail_max < threshold:
        verdict, witness = "consistent", None
    elif tail_min > violation_floor:
        worst = max(tail, key=lambda r: r["ratio"])
        verdict = "violated"
        witness = {
            "n": worst["n"],
            "ratio": worst["ratio"],
            "direction": f"inverse-norm ratio stayed above {violation_floor}",
        }
    else:
        verdict, witness = "inconclusive", None
    return ConditionReport("c", rows, verdict, witness, fitted, notes)


# ---------------------------------------------------------------------------
# combined report


@dataclass
class RothReport:
    mode: str
    convention: str
    n_max: int
    depth: int
    delta: float
    a: ConditionReport | None
    b: ConditionReport | None
    c: ConditionReport | None
    errors: dict
    verdict: str
    witness: dict | None
    estimates: dict

    def to_json(self) -> dict:
        return {
            "meta": {
                "mode": self.mode,
                "convention": self.convention,
                "n_max": self.n_max,
                "depth": self.depth,
                "delta": self.delta,
            },
            "conditions": {
                k: (r.to_json() if r is not None else {"error": self.errors.get(k)})
                for k, r in (("a", self.a), ("b", self.b), ("c", self.c))
            },
            "estimates": {str(k): v.to_json() for k, v in self.estimates.items()},
            "verdict": self.verdict,
            "witness": self.witness,
        }


def roth_report(
    trace: InductionTrace,
    n_max: int,
    depth: int = 10,
    delta: float = 0.1,
    threshold: float = 0.1,
) -> RothReport:
    """Run all three condition profiles and combine verdicts.

    "violated" wins (with its witness), then "inconclusive"; "consistent"
    requires all three.  Conditions that fail with NoGap, SingularQuotient,
    or DegenerateFit are recorded as errors and count as inconclusive.
    """
    reports: dict[str, ConditionReport | None] = {}
    errors: dict[str, str] = {}
    estimates: dict[int, StableSpaceEstimate] = {}
    runners = {
        "a": lambda: condition_a_profile(trace, n_max, threshold=threshold),
        "b": lambda: condition_b_theta(trace, n_max),
        "c": lambda: condition_c_profile(
            trace, n_max, depth=depth, delta=delta, threshold=threshold,
            estimates=estimates,
        ),
    }
    for key, run in runners.items():
        try:
            reports[key] = run()
        except (NoGap, SingularQuotient, DegenerateFit) as exc:
            reports[key] = None
            errors[key] = f"{type(exc).__name__}: {exc}"
    verdict, witness = "consistent", None
    for key in ("a", "b", "c"):
        r = reports[key]
        if r is not None and r.verdict == "violated":
            verdict, witness = "violated", {"condition": key, **(r.witness or {})}
            break
    else:
        if errors or any(r.verdict == "inconclusive" for r in reports.values() if r):
            verdict = "inconclusive"
    return RothReport(
        mode=trace.mode,
        convention=trace.convention,
        n_max=n_max,
        depth=depth,
        delta=delta,
        a=reports["a"],
        b=reports["b"],
        c=reports["c"],
        errors=errors,
        verdict=verdict,
        witness=witness,
        estimates=estimates,
    )
