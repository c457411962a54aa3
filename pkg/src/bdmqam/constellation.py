"""Non-uniform 16-QAM built as the product of two Gray-labeled 4-PAM axes.

Each axis carries the levels ``±d_h`` and ``±(d_h + 2 d_l)`` with
``alpha = d_h / d_l``. Bit 1 (bit 2) is the sign of the in-phase
(quadrature) coordinate, bit 3 (bit 4) selects the inner or outer level
on that same axis. Mean symbol energy is always 1.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

# Per-axis codes in level order (-outer, -inner, +inner, +outer).
# Sign bit 0 means positive half-plane, magnitude bit 0 means outer level.
AXIS_SIGN_BITS = np.array([1, 1, 0, 0])
AXIS_MAG_BITS = np.array([0, 1, 1, 0])


def axis_distances(alpha: float) -> tuple[float, float]:
    """Return ``(d_h, d_l)`` giving unit mean symbol energy."""
    _check_alpha(alpha)
    # E_s = 2 * (d_h**2 + (d_h + 2 d_l)**2) / 2 with d_h = alpha * d_l
    d_l = 1.0 / math.sqrt(alpha * alpha + (alpha + 2.0) ** 2)
    return alpha * d_l, d_l


def pam_levels(alpha: float) -> np.ndarray:
    """The four ascending per-axis amplitude levels for ``alpha``."""
    d_h, d_l = axis_distances(alpha)
    outer = d_h + 2.0 * d_l
    return np.array([-outer, -d_h, d_h, outer])


def _check_alpha(alpha: float) -> None:
    if not math.isfinite(alpha) or alpha < 0:
        raise ValueError(f"alpha must be finite and >= 0, got {alpha!r}")


@dataclass(frozen=True)
class NuQam16:
    """A labeled, unit-energy non-uniform 16-QAM constellation.

    Points are ordered as the Cartesian product of the per-axis levels:
    ``index = 4 * i + q`` where ``i`` and ``q`` index the ascending
    in-phase and quadrature levels.

    Attributes
    ----------
    alpha : float
        Ratio ``d_h / d_l``; 1 is the uniform 16-QAM.
    points : ndarray, shape (16, 2)
        In-phase and quadrature coordinates.
    labels : tuple of str
        Four-character bit strings ``"b1b2b3b4"``, one per point.
    pam_levels : ndarray, shape (4,)
        Ascending per-axis levels.
    """

    alpha: float
    points: np.ndarray
    labels: tuple[str, ...]
    pam_levels: np.ndarray

    @property
    def complex_points(self) -> np.ndarray:
        return self.points[:, 0] + 1j * self.points[:, 1]

    @property
    def label_bits(self) -> np.ndarray:
        """Labels as a (16, 4) integer array."""
        return np.array([[int(ch) for ch in lab] for lab in self.labels])

    def mean_energy(self) -> float:
        return float(np.mean(np.sum(self.points**2, axis=1)))


def build_constellation(alpha: float) -> NuQam16:
    levels = pam_levels(alpha)
    points = np.empty((16, 2))
    labels = []
    for i in range(4):
        for q in range(4):
            points[4 * i + q] = levels[i], levels[q]
            labels.append(
                f"{AXIS_SIGN_BITS[i]}{AXIS_SIGN_BITS[q]}{AXIS_MAG_BITS[i]}{AXIS_MAG_BITS[q]}"
            )
    points.setflags(write=False)
    levels.setflags(write=False)
    return NuQam16(float(alpha), points, tuple(labels), levels)


def label_of(c: NuQam16, index: int) -> str:
    if not 0 <= index < 16:
        raise IndexError(f"point index must be in 0..15, got {index}")
    return c.labels[index]


def write_constellation_csv(c: NuQam16, path: str | Path, comment: str | None = None) -> None:
    """Dump points and labels with columns ``index, b1b2b3b4, I, Q``."""
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "b1b2b3b4", "I", "Q"])
        for k, (lab, (i, q)) in enumerate(zip(c.labels, c.points)):
            w.writerow([k, lab, f"{i:.9g}", f"{q:.9g}"])
