"""Pairwise, pairwise-conditional and full negative log-likelihood objectives.

All criteria are -2 log densities with the 2*pi constants dropped (one
2 ln(2pi) per pair, n ln(2pi) for the full likelihood); argmins are
unaffected.  Every objective of the two-parameter family has the shape

    A * ln(sigma2) + B(theta) / sigma2 + D(theta),

which the estimation module exploits for closed-form sigma2 profiles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .types import (
    CorrelationModel,
    CovParams,
    DegeneratePair,
    MIN_SPACING,
    SamplePath,
    WeightSeq,
)


def _log1mexp(x):
    """ln(1 - e^(-x)) for x > 0, stable for tiny x."""
    return np.log(-np.expm1(-x))


def pair_loglik(psi: CovParams, s: float, t: float, zs: float, zt: float) -> float:
    """-2 log density (sans constant) of the bivariate vector (Z(s), Z(t))."""
    gap = abs(s - t)
    if gap < MIN_SPACING:
        raise DegeneratePair(f"|s - t| = {gap} below {MIN_SPACING}")
    rho = math.exp(-psi.theta * gap)
    one_m_rho2 = -math.expm1(-2.0 * psi.theta * gap)
    resid = zt - rho * zs
    return (
        2.0 * math.log(psi.sigma2)
        + math.log(one_m_rho2)
        + zs * zs / psi.sigma2
        + resid * resid / (psi.sigma2 * one_m_rho2)
    )


def cond_pair_loglik(psi: CovParams, s: float, t: float, zs: float, zt: float) -> float:
    """-2 log conditional density (sans constant) of Z(t) given Z(s)."""
    gap = abs(s - t)
    if gap < MIN_SPACING:
        raise DegeneratePair(f"|s - t| = {gap} below {MIN_SPACING}")
    rho = math.exp(-psi.theta * gap)
    one_m_rho2 = -math.expm1(-2.0 * psi.theta * gap)
    resid = zt - rho * zs
    return (
        math.log(psi.sigma2)
        + math.log(one_m_rho2)
        + resid * resid / (psi.sigma2 * one_m_rho2)
    )


@dataclass(frozen=True)
class _LagStats:
    """Per-lag pair data; collapses to scalar sufficient statistics when the
    gaps at this lag are all equal (equispaced designs)."""

    weight: float
    count: int
    gap: float | None  # common gap, or None if gaps vary within the lag
    gaps: np.ndarray | None
    zs: np.ndarray
    zt: np.ndarray
    s_ss: float
    s_tt: float
    s_st: float


def _lag_stats(path: SamplePath, w: WeightSeq) -> list[_LagStats]:
    pts, z, n = path.design.points, path.values, path.n
    out = []
    for k in range(1, min(w.K, n - 1) + 1):
        wk = w.at_lag(k)
        if wk == 0.0:
            continue
        gaps = pts[k:] - pts[:-k]
        zs, zt = z[:-k], z[k:]
        common = float(gaps[0]) if np.ptp(gaps) <= 1e-15 * gaps[0] else None
        out.append(
            _LagStats(
                weight=wk,
                count=n - k,
                gap=common,
                gaps=None if common is not None else gaps,
                zs=zs,
                zt=zt,
                s_ss=float(zs @ zs),
                s_tt=float(zt @ zt),
                s_st=float(zs @ zt),
            )
        )
    return out


class PairwiseObjective:
    """Weighted pairwise (conditional) likelihood with precomputed pair data.

    Evaluation is O(K) on equispaced designs and O(nK) otherwise.
    """

    def __init__(self, path: SamplePath, w: WeightSeq, conditional: bool):
        if path.n < 2:
            raise ValueError("pairwise criteria need at least 2 points")
        self.conditional = conditional
        self._lags = _lag_stats(path, w)
        self._ln_coeff = 2.0 * sum(ls.weight * ls.count for ls in self._lags)

    @property
    def ln_sigma2_coeff(self) -> float:
        """A in  A ln(sigma2) + B(theta)/sigma2 + D(theta)."""
        return self._ln_coeff

    def quad_and_const(self, theta: float) -> tuple[float, float]:
        """(B(theta), D(theta)) for the decomposition above."""
        B = 0.0
        D = 0.0
        for ls in self._lags:
            if ls.gap is not None:
                x = theta * ls.gap
                rho = math.exp(-x)
                omr = -math.expm1(-2.0 * x)
                log_omr = math.log(omr)
                # sum (zt - rho zs)^2 = s_tt - 2 rho s_st + rho^2 s_ss
                q_fwd = ls.s_tt - 2.0 * rho * ls.s_st + rho * rho * ls.s_ss
                if self.conditional:
                    q_bwd = ls.s_ss - 2.0 * rho * ls.s_st + rho * rho * ls.s_tt
                    B += ls.weight * (q_fwd + q_bwd) / omr
                    D += ls.weight * 2.0 * ls.count * log_omr
                else:
                    B += ls.weight * (ls.s_ss + q_fwd / omr)
                    D += ls.weight * ls.count * log_omr
            else:
                x = theta * ls.gaps
                rho = np.exp(-x)
                omr = -np.expm1(-2.0 * x)
                log_omr = np.log(omr)
                r_fwd = ls.zt - rho * ls.zs
                if self.conditional:
                    r_bwd = ls.zs - rho * ls.zt
                    B += ls.weight * float(np.sum((r_fwd * r_fwd + r_bwd * r_bwd) / omr))
                    D += ls.weight * 2.0 * float(np.sum(log_omr))
                else:
                    B += ls.weight * float(ls.s_ss + np.sum(r_fwd * r_fwd / omr))
                    D += ls.weight * float(np.sum(log_omr))
        return B, D

    def __call__(self, psi: CovParams) -> float:
        B, D = self.quad_and_const(psi.theta)
        return self._ln_coeff * math.log(psi.sigma2) + B / psi.sigma2 + D


class FullObjective:
    """O(n) Markov form of the full -2 log-likelihood (constant dropped)."""

    def __init__(self, path: SamplePath):
        self.n = path.n
        z = path.values
        self.z1_sq = float(z[0] ** 2)
        if self.n > 1:
            gaps = path.design.spacings
            self._gap = float(gaps[0]) if np.ptp(gaps) <= 1e-15 * gaps[0] else None
            self._gaps = None if self._gap is not None else gaps
            self._zs, self._zt = z[:-1], z[1:]
            self._s_ss = float(self._zs @ self._zs)
            self._s_tt = float(self._zt @ self._zt)
            self._s_st = float(self._zs @ self._zt)

    @property
    def ln_sigma2_coeff(self) -> float:
        return float(self.n)

    def quad_and_const(self, theta: float) -> tuple[float, float]:
        if self.n == 1:
            return self.z1_sq, 0.0
        if self._gap is not None:
            x = theta * self._gap
            rho = math.exp(-x)
            omr = -math.expm1(-2.0 * x)
            quad = self._s_tt - 2.0 * rho * self._s_st + rho * rho * self._s_ss
            return self.z1_sq + quad / omr, (self.n - 1) * math.log(omr)
        x = theta * self._gaps
        rho = np.exp(-x)
        omr = -np.expm1(-2.0 * x)
        resid = self._zt - rho * self._zs
        return (
            self.z1_sq + float(np.sum(resid * resid / omr)),
            float(np.sum(np.log(omr))),
        )

    def __call__(self, psi: CovParams) -> float:
        B, D = self.quad_and_const(psi.theta)
        return self.n * math.log(psi.sigma2) + B / psi.sigma2 + D


def pl_direct(psi: CovParams, path: SamplePath, w: WeightSeq) -> float:
    """Weighted pairwise log-likelihood, lag-cutoff double sum, O(nK)."""
    return PairwiseObjective(path, w, conditional=False)(psi)


def pcl_direct(psi: CovParams, path: SamplePath, w: WeightSeq) -> float:
    """Weighted pairwise conditional log-likelihood (both orderings per pair)."""
    return PairwiseObjective(path, w, conditional=True)(psi)


def _reindexed(psi: CovParams, path: SamplePath, w: WeightSeq, conditional: bool) -> float:
    """Triple-sum evaluation over subsampled point sequences x_j = s_{1+a+jk}.

    Mathematically identical to the direct forms; kept as an alternate path
    for identity testing.
    """
    pts, z, n = path.design.points, path.values, path.n
    total = 0.0
    for k in range(1, min(w.K, n - 1) + 1):
        wk = w.at_lag(k)
        if wk == 0.0:
            continue
        for a in range(k):
            for j in range((n - 1 - a - k) // k + 1):
                i0 = a + j * k          # 0-based index of s_{1+a+jk}
                i1 = i0 + k
                if conditional:
                    total += wk * (
                        cond_pair_loglik(psi, pts[i0], pts[i1], z[i0], z[i1])
                        + cond_pair_loglik(psi, pts[i1], pts[i0], z[i1], z[i0])
                    )
                else:
                    total += wk * pair_loglik(psi, pts[i0], pts[i1], z[i0], z[i1])
    return total


def pl_reindexed(psi: CovParams, path: SamplePath, w: WeightSeq) -> float:
    return _reindexed(psi, path, w, conditional=False)


def pcl_reindexed(psi: CovParams, path: SamplePath, w: WeightSeq) -> float:
    return _reindexed(psi, path, w, conditional=True)


def full_neg2_loglik(psi: CovParams, path: SamplePath) -> float:
    """Full -2 log-likelihood (sans n ln(2pi)), O(n) via the Markov property."""
    return FullObjective(path)(psi)


def pl_general(
    sigma2: float,
    points: np.ndarray,
    values: np.ndarray,
    corr: CorrelationModel,
    weights=None,
) -> float:
    """Variance-only weighted pairwise log-likelihood with known correlation.

    `weights` is a symmetric pair-weight function g(x_j - x_i) applied to the
    separation vectors (g = 1 when omitted).
    """
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
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
    active = wij > 0
    if np.any(np.abs(c[active]) >= 1.0 - 1e-12):
        raise DegeneratePair("a weighted pair has |correlation| >= 1 - 1e-12")
    yi, yj, cij, wij = y[iu[active]], y[ju[active]], c[active], wij[active]
    one_m_c2 = 1.0 - cij * cij
    resid = yj - cij * yi
    terms = (
        2.0 * math.log(sigma2)
        + np.log(one_m_c2)
        + yi * yi / sigma2
        + resid * resid / (sigma2 * one_m_c2)
    )
    return float(np.sum(wij * terms))
