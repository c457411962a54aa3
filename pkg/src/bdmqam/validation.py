"""Cross-checks of the quadrature routes against independent oracles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bitcap import all_bit_capacities, mc_bit_capacities
from .constellation import build_constellation
from .coverage import (REFERENCE_COVERAGES, CellModel, coverage_of_threshold, mc_coverage,
                       threshold_of_coverage)
from .strategies import StreamTargets, bdm_allocate, brute_force_allocate, default_alpha_grid, hm_curve

# Published thresholds for the reference coverages, used only for comparison.
PUBLISHED_THRESHOLDS_DB = {0.98: 3.4, 0.95: 7.0, 0.90: 10.3, 0.80: 14.4, 0.70: 17.4}
# Quadrature is accurate to this level; added to the 3-sigma Monte Carlo band.
QUADRATURE_FLOOR = 1e-6


@dataclass
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def check_threshold_table(cell: CellModel) -> list[Check]:
    out = []
    for g in REFERENCE_COVERAGES:
        s = threshold_of_coverage(cell, g)
        ref = PUBLISHED_THRESHOLDS_DB[g]
        out.append(Check(f"threshold G={g:.0%}", abs(s - ref) <= 0.15,
                         f"{s:.3f} dB vs {ref} dB (tol 0.15 dB)"))
    return out


def check_coverage_oracle(cell: CellModel, draws: int, seed: int) -> list[Check]:
    out = []
    for k, ref in enumerate(PUBLISHED_THRESHOLDS_DB.values()):
        q = coverage_of_threshold(cell, ref)
        est, se = mc_coverage(cell, ref, draws, seed + k)
        out.append(Check(f"coverage MC at {ref} dB", abs(q - est) <= 3 * se,
                         f"quad {q:.6f} mc {est:.6f} (tol 3*{se:.2e})"))
    return out


def capacity_sample_points(n: int, seed: int) -> list[tuple[float, float, int]]:
    """Random ``(alpha, esn0_db, bit)`` triples in the informative SNR range."""
    rng = np.random.default_rng(seed)
    alphas = rng.uniform(0.0, 15.0, n)
    snrs = rng.uniform(-5.0, 20.0, n)
    bits = rng.integers(1, 5, n)
    return [(float(a), float(s), int(b)) for a, s, b in zip(alphas, snrs, bits)]


def check_capacity_oracle(points, draws: int, seed: int) -> list[Check]:
    out = []
    for k, (alpha, snr, i) in enumerate(points):
        c = build_constellation(alpha)
        q = all_bit_capacities(c, snr)[i]
        est, se = mc_bit_capacities(c, snr, draws, seed + k)
        tol = 3 * se[i - 1] + QUADRATURE_FLOOR
        out.append(Check(f"C{i} alpha={alpha:.3f} Es/N0={snr:.2f} dB", abs(q - est[i - 1]) <= tol,
                         f"quad {q:.6f} mc {est[i - 1]:.6f} (tol {tol:.2e})"))
    return out


def random_capacity_instance(rng: np.random.Generator):
    """Capacities with the enhanced threshold above the base threshold."""
    cb = rng.uniform(0.05, 1.0, 4)
    ce = np.minimum(cb + rng.uniform(0.0, 0.6, 4), 1.0)
    t = float(rng.uniform(0.0, 5.0))
    return cb, ce, t


def check_allocation_oracle(instances: int, seed: int, grid_steps: int = 100) -> list[Check]:
    rng = np.random.default_rng(seed)
    worst_gap = 0.0
    worst_ratio = 0.0
    for _ in range(instances):
        cb, ce, t = random_capacity_instance(rng)
        rule = bdm_allocate(cb, ce, t)
        brute = brute_force_allocate(cb, ce, t, grid_steps)
        sb, se = rule.se_base(cb), rule.se_enh(ce)
        gap = (brute.se_base(cb) + brute.se_enh(ce)) - (sb + se)
        worst_gap = max(worst_gap, gap)
        worst_ratio = max(worst_ratio, abs(se - t * sb))
    return [
        Check("allocation rule vs brute force", worst_gap <= 1e-3,
              f"worst shortfall {worst_gap:.2e} over {instances} instances (tol 1e-3)"),
        Check("allocation ratio identity", worst_ratio <= 1e-9,
              f"worst |se_enh - t*se_base| {worst_ratio:.2e} (tol 1e-9)"),
    ]


def check_hierarchical_tmax(cell: CellModel) -> list[Check]:
    targets = StreamTargets.from_coverage(0.98, 0.90, cell)
    curve = hm_curve(targets, default_alpha_grid())
    ts = [t for _, t, _ in curve]
    tmax = max(ts)
    return [Check("hierarchical T_max (98%, 90%)",
                  2.9 <= tmax <= 3.3 and ts.index(tmax) == 0,
                  f"{tmax:.4f} at alpha={curve[ts.index(tmax)][0]} (band [2.9, 3.3], alpha=0)")]


def run_all(cell: CellModel | None = None, seed: int = 2024, capacity_points: int = 6,
            capacity_draws: int = 10**6, coverage_draws: int = 10**6,
            allocation_instances: int = 20) -> list[Check]:
    cell = cell or CellModel()
    checks = check_threshold_table(cell)
    checks += check_coverage_oracle(cell, coverage_draws, seed)
    checks += check_capacity_oracle(capacity_sample_points(capacity_points, seed),
                                    capacity_draws, seed)
    checks += check_allocation_oracle(allocation_instances, seed)
    checks += check_hierarchical_tmax(cell)
    return checks
