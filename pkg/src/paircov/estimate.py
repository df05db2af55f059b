"""Box-constrained minimization of the likelihood objectives.

The two-parameter objectives all have the shape
A ln(sigma2) + B(theta)/sigma2 + D(theta), so for any fixed theta the exact
constrained minimizer over sigma2 is the clamped profile B/A.  Estimation
therefore reduces to a one-dimensional search over theta, run as a
multi-start grid refined by golden section.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .likelihood import FullObjective, PairwiseObjective, pl_general
from .types import (
    BracketExhausted,
    CorrelationModel,
    CovParams,
    DegeneratePair,
    Interval,
    NonFinite,
    ParamBox,
    SamplePath,
    WeightSeq,
)

# Search bracket for an open-ray side, in the original parameter scale.
RAY_BRACKET = (1e-4, 1e6)
RAY_MAX_EXPANSIONS = 3

F_TOL = 1e-12   # objective improvement threshold
X_TOL = 1e-10   # relative parameter step threshold

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class EstimationResult:
    psi_hat: CovParams
    microergodic: float
    objective_value: float
    evaluations: int
    converged: bool
    active_bounds: frozenset[str]


@dataclass
class _Search1D:
    """Bookkeeping for a 1-d bounded minimization."""

    fun: object
    evaluations: int = 0

    def __call__(self, x: float) -> float:
        self.evaluations += 1
        v = float(self.fun(x))
        if not math.isfinite(v):
            raise NonFinite(f"objective returned {v} at x={x}")
        return v


def _golden_section(f: _Search1D, lo: float, hi: float) -> tuple[float, float]:
    """Golden-section search on [lo, hi]; stops on the F_TOL/X_TOL contract."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    best = min(fc, fd)
    for _ in range(200):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
        new_best = min(fc, fd)
        if (b - a) < X_TOL * max(1.0, abs(a) + abs(b)) and best - new_best < F_TOL:
            best = new_best
            break
        best = min(best, new_best)
    x = c if fc < fd else d
    return x, min(fc, fd)


def _parabolic_polish(
    f: _Search1D, x: float, v: float, lo: float, hi: float
) -> tuple[float, float]:
    """Refine an interior minimizer by fitting a parabola through points
    spaced well above the floating-point noise floor of the objective.

    Near the minimum the objective is flat relative to rounding noise, so
    golden-section alone stalls inside a noise basin; the fitted vertex
    recovers the minimizer to much higher accuracy.
    """
    for h in (1e-3 * max(1.0, abs(x)), 1e-5 * max(1.0, abs(x))):
        a, b = x - h, x + h
        if a <= lo or b >= hi:
            break
        fa, fb = f(a), f(b)
        denom = fa - 2.0 * v + fb
        if denom <= 0.0:  # no usable curvature at this scale
            continue
        step = 0.5 * h * (fa - fb) / denom
        if abs(step) >= h:
            continue
        cand = x + step
        fc = f(cand)
        if fc <= v:
            x, v = cand, fc
        else:
            x = cand  # within noise of v; vertex is the better point estimate
    return x, v


def _minimize_interval(f: _Search1D, lo: float, hi: float, starts: int) -> tuple[float, float]:
    """Best of a log-spaced interior grid, refined by golden section."""
    if hi <= lo or hi - lo < 1e-15 * max(1.0, abs(lo)):
        return lo, f(lo)
    if lo > 0.0:
        grid = np.exp(np.linspace(math.log(lo), math.log(hi), starts + 2))
    else:
        grid = np.linspace(lo, hi, starts + 2)
    grid[0], grid[-1] = lo, hi
    vals = [f(x) for x in grid]
    i = int(np.argmin(vals))  # ties break to the lowest parameter
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, len(grid) - 1)]
    x, v = _golden_section(f, a, b)
    if vals[i] < v:
        x, v = grid[i], vals[i]
    return _parabolic_polish(f, x, v, lo, hi)


def minimize_scalar_box(
    fun,
    interval: Interval,
    starts: int = 16,
) -> tuple[float, float, int, bool]:
    """Minimize a scalar function over a closed interval or the ray (0, inf).

    Returns (x, value, evaluations, converged).  Open rays are searched over
    an expanding log bracket; BracketExhausted is raised when the optimum
    keeps sitting on the bracket edge after RAY_MAX_EXPANSIONS expansions.
    """
    f = _Search1D(fun)
    if interval is not None:
        lo, hi = interval
        x, v = _minimize_interval(f, lo, hi, starts)
        return x, v, f.evaluations, True
    lo, hi = RAY_BRACKET
    for _ in range(RAY_MAX_EXPANSIONS + 1):
        x, v = _minimize_interval(f, lo, hi, starts)
        at_lower = x <= lo * (1.0 + 1e-6)
        at_upper = x >= hi * (1.0 - 1e-6)
        if not (at_lower or at_upper):
            return x, v, f.evaluations, True
        if at_lower:
            lo /= 10.0
        if at_upper:
            hi *= 10.0
    raise BracketExhausted(
        f"open-ray optimum stuck at bracket edge after {RAY_MAX_EXPANSIONS} expansions"
    )


def minimize_box(objective, box: ParamBox, starts: int = 8):
    """Minimize a function of (theta, sigma2) over a parameter box.

    Generic derivative-free routine: best of a log-spaced starts x starts
    grid, polished by Nelder-Mead.  Returns (psi, value, evaluations,
    converged, active_bounds).  The likelihood estimators below use the
    exact sigma2 profile instead; this entry point serves arbitrary
    objectives.
    """
    from scipy.optimize import minimize

    evaluations = 0

    def axis_points(interval: Interval) -> np.ndarray:
        lo, hi = interval if interval is not None else RAY_BRACKET
        return np.exp(np.linspace(math.log(lo), math.log(hi), starts))

    def clip(x: np.ndarray) -> np.ndarray:
        out = x.copy()
        for d, interval in enumerate((box.theta_range, box.sigma2_range)):
            lo, hi = interval if interval is not None else RAY_BRACKET
            out[d] = min(max(out[d], lo), hi)
        return out

    def f(x: np.ndarray) -> float:
        nonlocal evaluations
        evaluations += 1
        v = float(objective(CovParams(*clip(np.asarray(x, dtype=float)))))
        if not math.isfinite(v):
            raise NonFinite(f"objective returned {v} at {x}")
        return v

    t_grid = axis_points(box.theta_range)
    s_grid = axis_points(box.sigma2_range)
    best_x, best_v = None, math.inf
    for t in t_grid:
        for s in s_grid:
            v = f(np.array([t, s]))
            if v < best_v - 0.0 or (v == best_v and best_x is not None and t < best_x[0]):
                best_x, best_v = np.array([t, s]), v
    res = minimize(
        f,
        best_x,
        method="Nelder-Mead",
        options={"xatol": X_TOL, "fatol": F_TOL, "maxiter": 2000},
    )
    x = clip(np.asarray(res.x, dtype=float))
    v = f(x)
    if best_v < v:
        x, v = best_x, best_v
    psi = CovParams(float(x[0]), float(x[1]))
    return psi, v, evaluations, bool(res.success), _active_bounds(psi, box)


def _active_bounds(psi: CovParams, box: ParamBox) -> frozenset[str]:
    active = set()
    for name, interval, value in (
        ("theta", box.theta_range, psi.theta),
        ("sigma2", box.sigma2_range, psi.sigma2),
    ):
        if interval is None:
            continue
        lo, hi = interval
        if abs(value - lo) <= 1e-8 * max(1.0, lo):
            active.add(f"{name}_lower")
        if abs(value - hi) <= 1e-8 * max(1.0, hi):
            active.add(f"{name}_upper")
    return frozenset(active)


def _profile_value(B: float, A: float, sigma2_range: Interval) -> tuple[float, bool]:
    """Constrained minimizer over sigma2 for fixed theta; (value, degenerate)."""
    if B <= 0.0:
        # all-zero quadratic form: unconstrained argmin is 0, outside (0, inf)
        lo = sigma2_range[0] if sigma2_range is not None else RAY_BRACKET[0]
        return lo, True
    prof = B / A
    if sigma2_range is not None:
        prof = min(max(prof, sigma2_range[0]), sigma2_range[1])
    return prof, False


def _estimate_profiled(objective, box: ParamBox) -> EstimationResult:
    """Minimize A ln(sigma2) + B(theta)/sigma2 + D(theta) over the box."""
    A = objective.ln_sigma2_coeff
    degenerate_seen = False

    def h(theta: float) -> float:
        nonlocal degenerate_seen
        B, D = objective.quad_and_const(theta)
        s, degen = _profile_value(B, A, box.sigma2_range)
        degenerate_seen |= degen
        return A * math.log(s) + B / s + D

    theta_hat, value, evaluations, converged = minimize_scalar_box(h, box.theta_range)
    B, D = objective.quad_and_const(theta_hat)
    sigma2_hat, degen = _profile_value(B, A, box.sigma2_range)
    psi = CovParams(theta_hat, sigma2_hat)
    value = A * math.log(sigma2_hat) + B / sigma2_hat + D
    return EstimationResult(
        psi_hat=psi,
        microergodic=psi.microergodic,
        objective_value=value,
        evaluations=evaluations,
        converged=converged and not (degen or degenerate_seen),
        active_bounds=_active_bounds(psi, box),
    )


def wpmle(path: SamplePath, w: WeightSeq, box: ParamBox) -> EstimationResult:
    """Weighted pairwise maximum likelihood estimator of (theta, sigma2)."""
    return _estimate_profiled(PairwiseObjective(path, w, conditional=False), box)


def wpcmle(path: SamplePath, w: WeightSeq, box: ParamBox) -> EstimationResult:
    """Weighted pairwise conditional maximum likelihood estimator."""
    return _estimate_profiled(PairwiseObjective(path, w, conditional=True), box)


def mle(path: SamplePath, box: ParamBox) -> EstimationResult:
    """Full maximum likelihood estimator via the O(n) Markov likelihood."""
    return _estimate_profiled(FullObjective(path), box)


def profile_sigma2(kind: str, theta: float, path: SamplePath, w: WeightSeq | None = None) -> float:
    """Unconstrained argmin over sigma2 in (0, inf) for fixed theta.

    kind is one of "pl", "pcl", "full".  Returns 0.0 for degenerate
    (all-zero) paths, whose unconstrained argmin lies outside (0, inf).
    """
    if theta <= 0:
        raise ValueError("theta must be positive")
    if kind == "full":
        obj = FullObjective(path)
    elif kind in ("pl", "pcl"):
        if w is None:
            raise ValueError("pairwise profiles need a weight sequence")
        obj = PairwiseObjective(path, w, conditional=(kind == "pcl"))
    else:
        raise ValueError(f"unknown objective kind {kind!r}")
    B, _ = obj.quad_and_const(theta)
    return B / obj.ln_sigma2_coeff


def variance_wpmle_closed_form(
    points: np.ndarray,
    values: np.ndarray,
    corr: CorrelationModel,
    weights=None,
) -> float:
    """Closed-form variance estimator with known correlation (all pairs).

    Weighted average of [Y_i^2 + Y_j^2 - 2 C_ij Y_i Y_j] / (1 - C_ij^2)
    over pairs i < j, divided by twice the total weight.
    """
    pts = np.atleast_1d(np.asarray(points, dtype=float))
    if pts.ndim == 1:
        pts = pts[:, None]
    y = np.asarray(values, dtype=float)
    iu, ju = np.triu_indices(len(pts), k=1)
    diff = pts[ju] - pts[iu]
    c = corr.at_distance(np.sqrt(np.sum(diff * diff, axis=-1)))
    wij = np.ones(len(iu)) if weights is None else np.asarray(
        [float(weights(d)) for d in diff], dtype=float
    )
    w_total = float(wij.sum())
    if w_total <= 0:
        raise ValueError("total pair weight must be positive")
    active = wij > 0
    if np.any(np.abs(c[active]) >= 1.0 - 1e-12):
        raise DegeneratePair("a weighted pair has |correlation| >= 1 - 1e-12")
    yi, yj, cij, wij = y[iu[active]], y[ju[active]], c[active], wij[active]
    quad = (yi * yi + yj * yj - 2.0 * cij * yi * yj) / (1.0 - cij * cij)
    return float(np.sum(wij * quad) / (2.0 * w_total))
