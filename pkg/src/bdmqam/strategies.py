"""Spectral efficiency versus rate ratio for two-stream broadcast allocations.

Four strategies are compared at fixed coverage targets for a base and an
enhanced stream:

* ``time_sharing``: uniform 16-QAM, a fraction ``x`` of symbols carries
  the enhanced stream.
* ``hierarchical``: bits 1-2 carry the base stream, bits 3-4 the enhanced
  stream; the rate ratio is steered by the constellation parameter alpha.
* ``bdm_uniform``: bit division multiplexing on uniform 16-QAM.
* ``bdm_nonuniform``: bit division multiplexing with alpha optimized over
  a grid.

Rate ratio ``t`` is always enhanced rate divided by base rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import bisect

from .bitcap import BitCapacities, capacity_table
from .coverage import CellModel, threshold_of_coverage

STRATEGIES = ("time_sharing", "hierarchical", "bdm_uniform", "bdm_nonuniform")
# (G_b, G_e) pairs of the four published trade-off panels
REFERENCE_TARGETS = ((0.98, 0.90), (0.98, 0.80), (0.95, 0.80), (0.95, 0.70))
ALPHA_MAX = 15.0


def uniform_grid(start: float, stop: float, step: float) -> np.ndarray:
    """Inclusive grid ``start, start + step, ..., stop`` free of drift."""
    if not step > 0:
        raise ValueError("step must be > 0")
    if stop < start:
        raise ValueError("stop must be >= start")
    n = int(math.floor((stop - start) / step + 1e-9))
    return np.round(start + step * np.arange(n + 1), 12)


def default_alpha_grid() -> np.ndarray:
    return uniform_grid(0.0, ALPHA_MAX, 0.02)


def default_t_grid() -> np.ndarray:
    return uniform_grid(0.0, 5.0, 0.05)


@dataclass(frozen=True)
class StreamTargets:
    g_base: float
    g_enh: float
    thr_base_db: float
    thr_enh_db: float

    def __post_init__(self):
        if not 0 < self.g_enh < self.g_base < 1:
            raise ValueError("need 0 < g_enh < g_base < 1")
        if not self.thr_base_db < self.thr_enh_db:
            raise ValueError("base threshold must be below the enhanced threshold")

    @classmethod
    def from_coverage(cls, g_base: float, g_enh: float,
                      cell: CellModel | None = None) -> "StreamTargets":
        cell = cell or CellModel()
        if not 0 < g_enh < g_base < 1:
            raise ValueError("need 0 < g_enh < g_base < 1")
        return cls(g_base, g_enh, threshold_of_coverage(cell, g_base),
                   threshold_of_coverage(cell, g_enh))


@dataclass(frozen=True)
class Allocation:
    """Fraction of each bit index given to the base stream."""

    beta: tuple[float, float, float, float]

    def __post_init__(self):
        if len(self.beta) != 4 or any(not 0.0 <= b <= 1.0 for b in self.beta):
            raise ValueError(f"beta must be four values in [0, 1], got {self.beta}")

    def se_base(self, caps_base) -> float:
        return float(np.dot(self.beta, _as_caps(caps_base)))

    def se_enh(self, caps_enh) -> float:
        return float(np.dot(1.0 - np.asarray(self.beta), _as_caps(caps_enh)))


@dataclass(frozen=True)
class StrategyPoint:
    strategy: str
    t_ratio: float
    se_base: float
    se_enh: float
    alpha: Optional[float] = None
    allocation: Optional[Allocation] = None
    time_share_x: Optional[float] = None

    @property
    def se_total(self) -> float:
        return self.se_base + self.se_enh


def _as_caps(caps) -> np.ndarray:
    if isinstance(caps, BitCapacities):
        return caps.as_array()
    c = np.asarray(caps, dtype=float)
    if c.shape != (4,):
        raise ValueError("expected four bit capacities")
    return c


def _check_t(t: float) -> None:
    if not (math.isfinite(t) and t >= 0):
        raise ValueError(f"rate ratio must be finite and >= 0, got {t!r}")


# -- capacity cache ---------------------------------------------------------

@lru_cache(maxsize=64)
def _grid_caps(alphas: tuple[float, ...], thr_db: float) -> np.ndarray:
    table = capacity_table(alphas, thr_db)
    table.setflags(write=False)
    return table


@lru_cache(maxsize=4096)
def _point_caps(alpha: float, thr_db: float) -> np.ndarray:
    row = capacity_table([alpha], thr_db)[0]
    row.setflags(write=False)
    return row


def caps_at(alpha: float, thr_db: float) -> BitCapacities:
    return BitCapacities(tuple(float(v) for v in _point_caps(float(alpha), float(thr_db))))


# -- time sharing -----------------------------------------------------------

def time_sharing_point(caps_total_base: float, caps_total_enh: float, t: float) -> StrategyPoint:
    """Uniform 16-QAM shared in time between the two streams.

    With ``x`` the fraction of symbols carrying the enhanced stream,
    ``t = x C_e / ((1 - x) C_b)`` gives ``x = t C_b / (C_e + t C_b)`` and a
    total of ``C_b C_e (1 + t) / (C_e + t C_b)``.
    """
    cb, ce = caps_total_base, caps_total_enh
    if not (cb > 0 and ce > 0):
        raise ValueError("capacities must be > 0")
    _check_t(t)
    x = t * cb / (ce + t * cb)
    return StrategyPoint("time_sharing", t, (1.0 - x) * cb, x * ce,
                         alpha=1.0, time_share_x=x)


def time_sharing_total(cb: float, ce: float, t: float) -> float:
    return cb * ce * (1.0 + t) / (ce + t * cb)


# -- hierarchical modulation ------------------------------------------------

def _hm_rates(targets: StreamTargets, alpha: float) -> tuple[float, float]:
    cb = _point_caps(float(alpha), targets.thr_base_db)
    ce = _point_caps(float(alpha), targets.thr_enh_db)
    return cb[0] + cb[1], ce[2] + ce[3]


def hm_curve(targets: StreamTargets, alpha_grid: Sequence[float]) -> list[tuple[float, float, float]]:
    """Trace ``(alpha, t, se_total)`` of hierarchical modulation over a grid."""
    alphas = tuple(float(a) for a in alpha_grid)
    if not alphas:
        raise ValueError("alpha grid is empty")
    if min(alphas) < 0:
        raise ValueError("alpha values must be >= 0")
    cb = _grid_caps(alphas, targets.thr_base_db)
    ce = _grid_caps(alphas, targets.thr_enh_db)
    base = cb[:, 0] + cb[:, 1]
    enh = ce[:, 2] + ce[:, 3]
    return [(a, float(e / b), float(b + e)) for a, b, e in zip(alphas, base, enh)]


def _hm_point(targets: StreamTargets, alpha: float) -> StrategyPoint:
    b, e = _hm_rates(targets, alpha)
    return StrategyPoint("hierarchical", e / b, b, e, alpha=alpha,
                         allocation=Allocation((1.0, 1.0, 0.0, 0.0)))


def hm_point_at_t(targets: StreamTargets, t: float, alpha_max: float = ALPHA_MAX,
                  xtol: float = 1e-12) -> Optional[StrategyPoint]:
    """Hierarchical operating point with rate ratio ``t``, or None if unattainable.

    The ratio falls monotonically with alpha, so the largest reachable
    ratio sits at alpha = 0 and the smallest at ``alpha_max``.
    """
    _check_t(t)
    return _hm_solve(targets, float(t), float(alpha_max), xtol)


@lru_cache(maxsize=8192)
def _hm_solve(targets: StreamTargets, t: float, alpha_max: float,
              xtol: float) -> Optional[StrategyPoint]:
    t_of = lambda a: (lambda b, e: e / b)(*_hm_rates(targets, a))
    t_hi, t_lo = t_of(0.0), t_of(alpha_max)
    if t > t_hi or t < t_lo:
        return None
    if t == t_hi:
        return _hm_point(targets, 0.0)
    if t == t_lo:
        return _hm_point(targets, alpha_max)
    alpha = bisect(lambda a: t_of(a) - t, 0.0, alpha_max, xtol=xtol)
    return _hm_point(targets, float(alpha))


# -- bit division multiplexing ----------------------------------------------

def _allocate_batch(cb: np.ndarray, ce: np.ndarray, t: float) -> np.ndarray:
    """Ratio-ordering allocation for rows of capacities, returns beta (n, 4).

    Bits with the smallest ``C_e / C_b`` go to the base stream first; the
    bit straddling the boundary is split so that ``se_enh = t * se_base``.
    """
    n = cb.shape[0]
    if t == 0:
        return np.ones((n, 4))
    order = np.argsort(ce / cb, axis=1, kind="stable")
    cb_s = np.take_along_axis(cb, order, axis=1)
    ce_s = np.take_along_axis(ce, order, axis=1)
    zeros = np.zeros((n, 1))
    base_k = np.hstack([zeros, np.cumsum(cb_s, axis=1)])  # base after k whole bits
    enh_k = ce_s.sum(axis=1, keepdims=True) - np.hstack([zeros, np.cumsum(ce_s, axis=1)])
    enh_k[:, 4] = 0.0
    # first k >= 1 at which the enhanced share no longer exceeds t * base
    k = np.argmax(enh_k[:, 1:] <= t * base_k[:, 1:], axis=1) + 1
    rows = np.arange(n)
    split = (enh_k[rows, k - 1] - t * base_k[rows, k - 1]) / (
        ce_s[rows, k - 1] + t * cb_s[rows, k - 1])
    beta_s = (np.arange(4)[None, :] < (k - 1)[:, None]).astype(float)
    beta_s[rows, k - 1] = np.clip(split, 0.0, 1.0)
    beta = np.empty_like(beta_s)
    np.put_along_axis(beta, order, beta_s, axis=1)
    return beta


def bdm_allocate(caps_base, caps_enh, t: float) -> Allocation:
    cb, ce = _as_caps(caps_base), _as_caps(caps_enh)
    if np.any(cb <= 0) or np.any(ce <= 0):
        raise ValueError("bit capacities must be > 0")
    _check_t(t)
    beta = _allocate_batch(cb[None, :], ce[None, :], t)[0]
    return Allocation(tuple(float(b) for b in beta))


@lru_cache(maxsize=2)
def _unit_mesh(steps: int) -> np.ndarray:
    g = np.linspace(0.0, 1.0, steps + 1)
    mesh = np.stack(np.meshgrid(g, g, g, indexing="ij"), axis=-1).reshape(-1, 3)
    mesh.setflags(write=False)
    return mesh


def brute_force_allocate(caps_base, caps_enh, t: float, grid_steps: int = 100) -> Allocation:
    """Exhaustive search for the best ratio-feasible allocation.

    Each bit index in turn is left free; the other three run over a
    uniform grid and the free one is solved from the ratio constraint.
    """
    if grid_steps < 1:
        raise ValueError("grid_steps must be positive")
    cb, ce = _as_caps(caps_base), _as_caps(caps_enh)
    _check_t(t)
    mesh = _unit_mesh(grid_steps)
    weight = ce + t * cb  # constraint: sum(beta * weight) == sum(ce)
    best, best_beta = -np.inf, None
    for j in range(4):
        others = [i for i in range(4) if i != j]
        free = (ce.sum() - mesh @ weight[others]) / weight[j]
        ok = (free >= -1e-12) & (free <= 1 + 1e-12)
        if not ok.any():
            continue
        beta = np.empty((ok.sum(), 4))
        beta[:, others] = mesh[ok]
        beta[:, j] = np.clip(free[ok], 0.0, 1.0)
        total = beta @ cb + (1.0 - beta) @ ce
        i = int(np.argmax(total))
        if total[i] > best:
            best, best_beta = total[i], beta[i]
    if best_beta is None:
        raise ValueError("no feasible allocation on the grid")
    return Allocation(tuple(float(b) for b in best_beta))


def _bdm_from_caps(strategy: str, cb: np.ndarray, ce: np.ndarray, t: float,
                   alpha: float) -> StrategyPoint:
    alloc = bdm_allocate(cb, ce, t)
    return StrategyPoint(strategy, t, alloc.se_base(cb), alloc.se_enh(ce),
                         alpha=alpha, allocation=alloc)


def bdm_point(targets: StreamTargets, t: float, alpha: float = 1.0) -> StrategyPoint:
    _check_t(t)
    if not (math.isfinite(alpha) and alpha >= 0):
        raise ValueError("alpha must be finite and >= 0")
    strategy = "bdm_uniform" if alpha == 1.0 else "bdm_nonuniform"
    cb = _point_caps(float(alpha), targets.thr_base_db)
    ce = _point_caps(float(alpha), targets.thr_enh_db)
    return _bdm_from_caps(strategy, cb, ce, t, float(alpha))


def bdm_nu_point(targets: StreamTargets, t: float,
                 alpha_grid: Sequence[float] | None = None,
                 include_hierarchical: bool = True) -> StrategyPoint:
    """Best bit division multiplexing point over a grid of alpha values.

    With ``include_hierarchical`` the alpha at which hierarchical
    modulation reaches ``t`` joins the candidates, so the search space
    always contains the hierarchical operating point.
    """
    _check_t(t)
    alphas = tuple(float(a) for a in (default_alpha_grid() if alpha_grid is None else alpha_grid))
    if not alphas:
        raise ValueError("alpha grid is empty")
    cb = _grid_caps(alphas, targets.thr_base_db)
    ce = _grid_caps(alphas, targets.thr_enh_db)
    beta = _allocate_batch(cb, ce, t)
    totals = np.sum(beta * cb + (1.0 - beta) * ce, axis=1)
    i = int(np.argmax(totals))
    best = _bdm_from_caps("bdm_nonuniform", cb[i], ce[i], t, alphas[i])
    if include_hierarchical:
        hm = hm_point_at_t(targets, t, alpha_max=max(alphas))
        if hm is not None and hm.alpha not in alphas:
            cand = _bdm_from_caps("bdm_nonuniform", _point_caps(hm.alpha, targets.thr_base_db),
                                  _point_caps(hm.alpha, targets.thr_enh_db), t, hm.alpha)
            if cand.se_total > best.se_total:
                best = cand
    return best


def sweep(targets: StreamTargets, t_grid: Iterable[float],
          strategies: Iterable[str] = STRATEGIES,
          alpha_grid: Sequence[float] | None = None) -> list[StrategyPoint]:
    """Evaluate each requested strategy at every rate ratio in ``t_grid``.

    Hierarchical points that cannot reach a given ratio are omitted.
    Output is ordered by strategy (in ``STRATEGIES`` order) then by ratio.
    """
    ts = [float(t) for t in t_grid]
    if not ts:
        raise ValueError("t grid is empty")
    for t in ts:
        _check_t(t)
    wanted = set(strategies)
    unknown = wanted - set(STRATEGIES)
    if unknown:
        raise ValueError(f"unknown strategies: {sorted(unknown)}")
    if not wanted:
        raise ValueError("no strategies requested")
    alphas = default_alpha_grid() if alpha_grid is None else alpha_grid
    out: list[StrategyPoint] = []
    for name in STRATEGIES:
        if name not in wanted:
            continue
        for t in ts:
            if name == "time_sharing":
                cb = float(np.sum(_point_caps(1.0, targets.thr_base_db)))
                ce = float(np.sum(_point_caps(1.0, targets.thr_enh_db)))
                out.append(time_sharing_point(cb, ce, t))
            elif name == "hierarchical":
                p = hm_point_at_t(targets, t, alpha_max=float(np.max(alphas)))
                if p is not None:
                    out.append(p)
            elif name == "bdm_uniform":
                out.append(bdm_point(targets, t, 1.0))
            else:
                out.append(bdm_nu_point(targets, t, alphas))
    return out
