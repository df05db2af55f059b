"""Core domain types: covariance parameters, designs, weights, paths, boxes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

MIN_SPACING = 1e-12


class DegeneratePair(ValueError):
    """A pair of points is too close (or too correlated) to carry information."""


class NotPositiveDefinite(ValueError):
    """Covariance matrix failed Cholesky factorization, even after jitter."""


class NonFinite(ValueError):
    """Objective returned a non-finite value where a finite one is required."""


class BracketExhausted(RuntimeError):
    """Open-ray search kept hitting the bracket edge after repeated expansion."""


class InsufficientSamples(ValueError):
    """Too few samples to compute the requested summary."""


@dataclass(frozen=True)
class CovParams:
    """Candidate (or true) parameter pair: scale theta and variance sigma2."""

    theta: float
    sigma2: float

    def __post_init__(self):
        if not (math.isfinite(self.theta) and self.theta > 0):
            raise ValueError(f"theta must be positive and finite, got {self.theta}")
        if not (math.isfinite(self.sigma2) and self.sigma2 > 0):
            raise ValueError(f"sigma2 must be positive and finite, got {self.sigma2}")

    @property
    def microergodic(self) -> float:
        """The product sigma2 * theta, the only consistently estimable quantity."""
        return self.sigma2 * self.theta


@dataclass(frozen=True)
class Design:
    """Strictly increasing observation points in [0, 1]."""

    points: np.ndarray

    def __init__(self, points: Sequence[float]):
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 1 or pts.size < 1:
            raise ValueError("design needs at least one one-dimensional point")
        if not np.all(np.isfinite(pts)):
            raise ValueError("design points must be finite")
        if pts[0] < 0.0 or pts[-1] > 1.0:
            raise ValueError("design points must lie in [0, 1]")
        if pts.size > 1 and np.min(np.diff(pts)) < MIN_SPACING:
            raise ValueError(
                f"design points must be strictly increasing with spacing >= {MIN_SPACING}"
            )
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.size

    @property
    def spacings(self) -> np.ndarray:
        return np.diff(self.points)


def grid_design(level: int) -> Design:
    """Equispaced design s_{i+1} = s_i + 0.02/L on [0, 1]; n = 50 L + 1 points."""
    if level < 1:
        raise ValueError("grid level must be >= 1")
    n = 50 * level + 1
    return Design(np.linspace(0.0, 1.0, n))


@dataclass(frozen=True)
class WeightSeq:
    """Nonnegative lag weights w_1..w_K with w_K > 0."""

    w: np.ndarray

    def __init__(self, w: Sequence[float]):
        arr = np.asarray(w, dtype=float)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("weights must be a nonempty 1-d sequence")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise ValueError("weights must be finite and nonnegative")
        if arr[-1] <= 0:
            raise ValueError("the last weight (lag K) must be positive")
        arr.setflags(write=False)
        object.__setattr__(self, "w", arr)

    @classmethod
    def unit(cls, K: int) -> "WeightSeq":
        """w_k = 1 for k <= K."""
        return cls(np.ones(K))

    @property
    def K(self) -> int:
        return self.w.size

    @property
    def total(self) -> float:
        return float(self.w.sum())

    def at_lag(self, k: int) -> float:
        """Weight at lag k >= 1; zero beyond the cutoff."""
        return float(self.w[k - 1]) if 1 <= k <= self.K else 0.0


@dataclass(frozen=True)
class SamplePath:
    """A design together with observed process values."""

    design: Design
    values: np.ndarray

    def __init__(self, design: Design, values: Sequence[float]):
        vals = np.asarray(values, dtype=float)
        if vals.shape != (design.n,):
            raise ValueError("values length must match the design")
        if not np.all(np.isfinite(vals)):
            raise ValueError("values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "design", design)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.design.n


# An interval side of the parameter box: (lo, hi) closed, or None for the
# open ray (0, inf).
Interval = Optional[tuple[float, float]]


def _check_interval(rng: Interval, name: str) -> None:
    if rng is None:
        return
    lo, hi = rng
    if not (0 < lo <= hi < math.inf):
        raise ValueError(f"{name} bounds must satisfy 0 < lo <= hi < inf, got {rng}")


@dataclass(frozen=True)
class ParamBox:
    """Admissible set J for (theta, sigma2); each side closed or the ray (0, inf)."""

    theta_range: Interval
    sigma2_range: Interval

    def __post_init__(self):
        _check_interval(self.theta_range, "theta")
        _check_interval(self.sigma2_range, "sigma2")
        if self.theta_range is None and self.sigma2_range is None:
            raise ValueError("at most one side of the box may be the open ray (0, inf)")

    def contains(self, params: CovParams, tol: float = 1e-10) -> bool:
        for rng, value in ((self.theta_range, params.theta), (self.sigma2_range, params.sigma2)):
            if rng is None:
                if value <= 0:
                    return False
            elif not (rng[0] - tol <= value <= rng[1] + tol):
                return False
        return True


@dataclass(frozen=True)
class CorrelationModel:
    """Known stationary correlation on [0,1]^d (unit variance at lag 0)."""

    kind: str  # "exponential" or "matern"
    theta: float
    nu: float = 0.5
    dim: int = 1

    _MATERN_NU = (0.5, 1.5, 2.5)

    def __post_init__(self):
        if self.kind not in ("exponential", "matern"):
            raise ValueError(f"unknown correlation kind {self.kind!r}")
        if not (math.isfinite(self.theta) and self.theta > 0):
            raise ValueError("theta must be positive and finite")
        if self.kind == "matern" and self.nu not in self._MATERN_NU:
            raise ValueError(f"matern smoothness must be one of {self._MATERN_NU}")
        if self.dim not in (1, 2):
            raise ValueError("dim must be 1 or 2")

    def at_distance(self, r: np.ndarray) -> np.ndarray:
        """Correlation at (arrays of) separation distances; all kinds are isotropic."""
        r = np.abs(np.asarray(r, dtype=float))
        if self.kind == "exponential" or self.nu == 0.5:
            return np.exp(-self.theta * r)
        if self.nu == 1.5:
            u = math.sqrt(3.0) * self.theta * r
            return (1.0 + u) * np.exp(-u)
        u = math.sqrt(5.0) * self.theta * r
        return (1.0 + u + u * u / 3.0) * np.exp(-u)
