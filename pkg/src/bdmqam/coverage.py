"""Receiver SNR distribution over a circular cell and coverage thresholds.

A receiver at distance ``r`` km sees
``SNR_dB = intercept_db - slope * log10(r) - X`` with ``X ~ N(0, sigma_db**2)``.
Receivers are uniform over the disc, so ``r`` has density ``2 r / R**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import bisect
from scipy.special import ndtr

RADIAL_NODES = 256
BRACKET_DB = (-50.0, 60.0)
# Coverage fractions tabulated for the default cell.
REFERENCE_COVERAGES = (0.98, 0.95, 0.90, 0.80, 0.70)


@dataclass(frozen=True)
class CellModel:
    intercept_db: float = 10.81
    slope: float = 37.6
    sigma_db: float = 8.0
    radius_km: float = 0.75

    def __post_init__(self):
        for name in ("intercept_db", "slope", "sigma_db", "radius_km"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.sigma_db <= 0:
            raise ValueError("sigma_db must be > 0")
        if self.radius_km <= 0:
            raise ValueError("radius_km must be > 0")
        if self.slope <= 0:
            raise ValueError("slope must be > 0")

    def mean_snr_db(self, r_km):
        return self.intercept_db - self.slope * np.log10(r_km)


@dataclass(frozen=True)
class CoveragePair:
    coverage: float
    threshold_db: float

    def __post_init__(self):
        if not 0 < self.coverage < 1:
            raise ValueError("coverage must lie strictly between 0 and 1")


@lru_cache(maxsize=4)
def _legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def coverage_of_threshold(m: CellModel, s_db: float, nodes: int = RADIAL_NODES) -> float:
    """Fraction of receivers whose SNR is at least ``s_db``."""
    if not math.isfinite(s_db):
        raise ValueError(f"threshold must be finite, got {s_db!r}")
    x, w = _legendre(nodes)
    R = m.radius_km
    r = 0.5 * R * (x + 1.0)
    density = 2.0 * r / R**2
    p = ndtr((m.mean_snr_db(r) - s_db) / m.sigma_db)
    return float(0.5 * R * np.sum(w * density * p))


def outage_of_threshold(m: CellModel, s_db: float, nodes: int = RADIAL_NODES) -> float:
    """``1 - coverage_of_threshold``, evaluated directly so it stays accurate near 0."""
    if not math.isfinite(s_db):
        raise ValueError(f"threshold must be finite, got {s_db!r}")
    x, w = _legendre(nodes)
    R = m.radius_km
    r = 0.5 * R * (x + 1.0)
    q = ndtr((s_db - m.mean_snr_db(r)) / m.sigma_db)
    return float(0.5 * R * np.sum(w * (2.0 * r / R**2) * q))


def threshold_of_coverage(m: CellModel, g: float, xtol: float = 1e-9) -> float:
    """SNR threshold (dB) reached by a fraction ``g`` of the receivers."""
    if not (math.isfinite(g) and 0 < g < 1):
        raise ValueError(f"coverage must lie strictly between 0 and 1, got {g!r}")
    lo, hi = BRACKET_DB
    f = lambda s: coverage_of_threshold(m, s) - g
    if f(lo) < 0 or f(hi) > 0:
        raise ValueError(f"coverage {g} not reachable within {BRACKET_DB} dB")
    return float(bisect(f, lo, hi, xtol=xtol))


def mc_coverage(m: CellModel, s_db: float, draws: int, rng_seed: int) -> tuple[float, float]:
    """Monte Carlo coverage estimate with its standard error."""
    if draws < 1:
        raise ValueError("draws must be positive")
    if not math.isfinite(s_db):
        raise ValueError("threshold must be finite")
    rng = np.random.default_rng(rng_seed)
    # inverse CDF of 2r/R^2 on [0, R]
    r = m.radius_km * np.sqrt(rng.random(draws))
    snr = m.mean_snr_db(r) - rng.normal(scale=m.sigma_db, size=draws)
    hit = snr >= s_db
    p = float(hit.mean())
    return p, math.sqrt(p * (1.0 - p) / draws)


def reference_table(m: CellModel | None = None,
                    coverages=REFERENCE_COVERAGES) -> list[CoveragePair]:
    m = m or CellModel()
    return [CoveragePair(g, threshold_of_coverage(m, g)) for g in coverages]


def coverage_cdf_rows(m: CellModel, thresholds) -> list[tuple[float, float]]:
    return [(float(s), coverage_of_threshold(m, float(s))) for s in thresholds]
