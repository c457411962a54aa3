"""Spectral efficiency and coverage of two-stream broadcasting on non-uniform 16-QAM."""

__version__ = "0.1.0"

from .bitcap import (BitCapacities, all_bit_capacities, bit_capacity, capacity_table,
                     mc_bit_capacity, subchannel_capacity)
from .constellation import NuQam16, build_constellation, label_of
from .coverage import CellModel, CoveragePair, coverage_of_threshold, mc_coverage, threshold_of_coverage
from .strategies import (Allocation, StrategyPoint, StreamTargets, bdm_allocate, bdm_nu_point,
                         bdm_point, brute_force_allocate, hm_curve, hm_point_at_t, sweep,
                         time_sharing_point)

__all__ = [
    "Allocation", "BitCapacities", "CellModel", "CoveragePair", "NuQam16", "StrategyPoint",
    "StreamTargets", "all_bit_capacities", "bdm_allocate", "bdm_nu_point", "bdm_point",
    "bit_capacity", "brute_force_allocate", "build_constellation", "capacity_table",
    "coverage_of_threshold", "hm_curve", "hm_point_at_t", "label_of", "mc_bit_capacity",
    "mc_coverage", "subchannel_capacity", "sweep", "threshold_of_coverage", "time_sharing_point",
]
