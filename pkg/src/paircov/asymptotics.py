"""Normalized variance tau_n^2 of the weighted squared-increment sum, its
piecewise-coefficient approximation, and the derived asymptotic variances."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .types import CovParams, Design, WeightSeq


@dataclass(frozen=True)
class TauResult:
    tau2: float
    method: str  # "exact" or "approx"
    n: int
    K: int


def b_coeff(i: int, j: int, k: int, l: int, design: Design) -> float:
    """Piecewise overlap coefficient for index pairs (i, j) and (k, l), 1-based.

    Defined for i < j and k < l, symmetric under swapping the two pairs, and
    always in [0, 1].  Values on branch boundaries (j = k or j = l) agree
    under either adjacent branch.
    """
    n = design.n
    if not (1 <= i < j <= n and 1 <= k < l <= n):
        raise IndexError(f"need 1 <= i < j <= n and 1 <= k < l <= n, got {(i, j, k, l)}")
    if i > k:
        i, j, k, l = k, l, i, j
    s = design.points
    si, sj, sk, sl = s[i - 1], s[j - 1], s[k - 1], s[l - 1]
    if j <= k:
        return 0.0
    if j <= l:
        return (sj - sk) ** 2 / ((sj - si) * (sl - sk))
    return (sl - sk) / (sj - si)


def _b_vec(s, i1, j1, i2, j2):
    """Vectorized b coefficient over 0-based index arrays (pairs may need swapping)."""
    swap = i1 > i2
    a = np.where(swap, i2, i1)
    b = np.where(swap, j2, j1)
    c = np.where(swap, i1, i2)
    d = np.where(swap, j1, j2)
    sa, sb, sc, sd = s[a], s[b], s[c], s[d]
    middle = (sb - sc) ** 2 / ((sb - sa) * (sd - sc))
    outer = (sd - sc) / (sb - sa)
    return np.where(b <= c, 0.0, np.where(b <= d, middle, outer))


def tau2_approx(design: Design, w: WeightSeq) -> TauResult:
    """Deterministic approximation of tau_n^2 from the overlap coefficients.

    (2/n) sum over pairs-of-pairs within lag K of w w b; terms with pair
    offsets beyond K vanish, giving O(n K^3) work.
    """
    n, K = design.n, w.K
    if n <= K:
        raise ValueError("need n > K")
    s = design.points
    total = 0.0
    for dj in range(1, K + 1):
        wj = w.at_lag(dj)
        if wj == 0.0:
            continue
        for dl in range(1, K + 1):
            wl = w.at_lag(dl)
            if wl == 0.0:
                continue
            for off in range(-K, K + 1):
                # 0-based first indices: i and i + off, both pairs in range
                lo = max(0, -off)
                hi = min(n - dj, n - off - dl)  # exclusive
                if hi <= lo:
                    continue
                i1 = np.arange(lo, hi)
                i2 = i1 + off
                total += wj * wl * float(np.sum(_b_vec(s, i1, i1 + dj, i2, i2 + dl)))
    return TauResult(tau2=2.0 * total / n, method="approx", n=n, K=K)


def _w_cov(s, i1, j1, i2, j2, theta0):
    """Closed-form cov(W over [s_i1, s_j1], W over [s_i2, s_j2]) for the
    exponential model; the variance sigma0^2 cancels in the normalization."""
    a, b = s[i1], s[j1]
    c, d = s[i2], s[j2]
    rho1 = np.exp(-theta0 * (b - a))
    rho2 = np.exp(-theta0 * (d - c))
    num = (
        np.exp(-theta0 * np.abs(b - d))
        - rho2 * np.exp(-theta0 * np.abs(b - c))
        - rho1 * np.exp(-theta0 * np.abs(a - d))
        + rho1 * rho2 * np.exp(-theta0 * np.abs(a - c))
    )
    den = np.sqrt(
        (-np.expm1(-2.0 * theta0 * (b - a))) * (-np.expm1(-2.0 * theta0 * (d - c)))
    )
    return num / den


def tau2_exact(design: Design, w: WeightSeq, theta0: float) -> TauResult:
    """Exact tau_n^2 via cov(W^2 - 1, W^2 - 1) = 2 cov(W, W)^2.

    Pairs of increments over disjoint intervals are exactly independent
    (Markov innovations), so offsets beyond the lag cutoff contribute zero;
    the truncation is validated against a dense oracle in the test suite.
    """
    n, K = design.n, w.K
    if n <= K:
        raise ValueError("need n > K")
    if theta0 <= 0:
        raise ValueError("theta0 must be positive")
    s = design.points
    total = 0.0
    for dj in range(1, K + 1):
        wj = w.at_lag(dj)
        if wj == 0.0:
            continue
        for dl in range(1, K + 1):
            wl = w.at_lag(dl)
            if wl == 0.0:
                continue
            # nonzero only when the intervals overlap: -dl < off < dj
            for off in range(-dl + 1, dj):
                lo = max(0, -off)
                hi = min(n - dj, n - off - dl)
                if hi <= lo:
                    continue
                i1 = np.arange(lo, hi)
                i2 = i1 + off
                cov = _w_cov(s, i1, i1 + dj, i2, i2 + dl, theta0)
                total += wj * wl * float(np.sum(cov * cov))
    return TauResult(tau2=2.0 * total / n, method="exact", n=n, K=K)


def asymptotic_variance(
    kind: str,
    psi0: CovParams,
    design: Design | None = None,
    w: WeightSeq | None = None,
    n: int | None = None,
) -> float:
    """Per-n asymptotic variance of the microergodic estimator.

    kind "MLE": 2 (sigma0^2 theta0)^2 / n.  kind "WP" (both pairwise
    estimators): (sigma0^2 theta0)^2 tau_n^2 / (n (sum w)^2) with the
    approximate tau_n^2.
    """
    mu = psi0.microergodic
    if kind == "MLE":
        if n is None:
            if design is None:
                raise ValueError("MLE variance needs n or a design")
            n = design.n
        return 2.0 * mu * mu / n
    if kind == "WP":
        if design is None or w is None:
            raise ValueError("WP variance needs a design and weights")
        tau2 = tau2_approx(design, w).tau2
        return mu * mu * tau2 / (design.n * w.total**2)
    raise ValueError(f"unknown kind {kind!r}")


def normalize(estimate: float, psi0: CovParams, n: int, C: float) -> float:
    """Standardized statistic sqrt(n)/C * (estimate / (sigma0^2 theta0) - 1)."""
    if C <= 0:
        raise ValueError("C must be positive")
    return math.sqrt(n) / C * (estimate / psi0.microergodic - 1.0)
