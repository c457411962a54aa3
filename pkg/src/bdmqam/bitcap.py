"""Per-bit BICM mutual information of non-uniform 16-QAM over complex AWGN.

Symbol energy is 1, so ``N0 = 10 ** (-esn0_db / 10)`` and each real
dimension sees noise variance ``N0 / 2``. Because the labeling is a
product of two per-axis Gray codes, the capacity of every bit reduces to
a one-dimensional 4-PAM problem, integrated with Gauss-Hermite quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from numba import njit
from scipy.special import logsumexp

from .constellation import AXIS_MAG_BITS, AXIS_SIGN_BITS, NuQam16, pam_levels

DEFAULT_NODES = 64
LN2 = math.log(2.0)


@dataclass(frozen=True)
class BitCapacities:
    """C_1..C_4 in bits per channel use at one operating point."""

    c: tuple[float, float, float, float]

    def __post_init__(self):
        if len(self.c) != 4:
            raise ValueError("expected four bit capacities")

    def __getitem__(self, i: int) -> float:
        """1-based access, ``caps[1]`` is C_1."""
        if not 1 <= i <= 4:
            raise IndexError(f"bit index must be in 1..4, got {i}")
        return self.c[i - 1]

    def as_array(self) -> np.ndarray:
        return np.array(self.c)

    @property
    def total(self) -> float:
        return float(sum(self.c))


def noise_density(esn0_db: float) -> float:
    if not math.isfinite(esn0_db):
        raise ValueError(f"Es/N0 must be finite, got {esn0_db!r}")
    return 10.0 ** (-esn0_db / 10.0)


@lru_cache(maxsize=8)
def _hermite(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.hermite.hermgauss(nodes)
    return x, w / math.sqrt(math.pi)


def axis_capacity(levels: np.ndarray, bits: np.ndarray, esn0_db: float,
                  nodes: int = DEFAULT_NODES) -> np.ndarray:
    """Capacity of one binary label position on a 4-PAM axis.

    ``levels`` has shape (..., 4); the result has shape (...).
    """
    n0 = noise_density(esn0_db)
    x, w = _hermite(nodes)
    levels = np.asarray(levels, dtype=float)
    noise = math.sqrt(n0) * x  # N(0, N0/2) after the 1/sqrt(pi) weight
    # y[..., k, j] = level k plus the j-th noise node
    y = levels[..., :, None] + noise
    metric = -((y[..., None] - levels[..., None, None, :]) ** 2) / n0
    log_all = logsumexp(metric, axis=-1)
    same = bits[:, None] == bits[None, :]  # [sent k, candidate m]
    masked = np.where(same[:, None, :], metric, -np.inf)
    log_same = logsumexp(masked, axis=-1)
    penalty = (log_all - log_same) @ w / LN2
    return 1.0 - penalty.mean(axis=-1)


def _check_bit(i: int) -> None:
    if i not in (1, 2, 3, 4):
        raise ValueError(f"bit index must be in 1..4, got {i!r}")


def bit_capacity(c: NuQam16, esn0_db: float, i: int, nodes: int = DEFAULT_NODES) -> float:
    """Mutual information between label bit ``i`` (1-based) and the channel output."""
    _check_bit(i)
    bits = AXIS_SIGN_BITS if i <= 2 else AXIS_MAG_BITS
    return float(axis_capacity(c.pam_levels, bits, esn0_db, nodes))


def all_bit_capacities(c: NuQam16, esn0_db: float, nodes: int = DEFAULT_NODES) -> BitCapacities:
    # Bits 1/2 and 3/4 are the same axis problem on the I and Q rails.
    c1 = bit_capacity(c, esn0_db, 1, nodes)
    c3 = bit_capacity(c, esn0_db, 3, nodes)
    return BitCapacities((c1, c1, c3, c3))


def capacity_table(alphas: Sequence[float], esn0_db: float,
                   nodes: int = DEFAULT_NODES) -> np.ndarray:
    """Bit capacities for many constellations at once, shape (len(alphas), 4)."""
    levels = np.array([pam_levels(float(a)) for a in alphas]).reshape(-1, 4)
    c_sign = axis_capacity(levels, AXIS_SIGN_BITS, esn0_db, nodes)
    c_mag = axis_capacity(levels, AXIS_MAG_BITS, esn0_db, nodes)
    return np.stack([c_sign, c_sign, c_mag, c_mag], axis=1)


def subchannel_capacity(caps: BitCapacities | Sequence[float], fractions: Sequence[float]) -> float:
    """Capacity of a sub-channel holding ``fractions[i]`` of each bit index."""
    f = np.asarray(fractions, dtype=float)
    if f.shape != (4,):
        raise ValueError("expected four fractions")
    if np.any(~np.isfinite(f)) or np.any(f < 0) or np.any(f > 1):
        raise ValueError(f"fractions must lie in [0, 1], got {list(f)}")
    c = caps.as_array() if isinstance(caps, BitCapacities) else np.asarray(caps, dtype=float)
    return float(f @ c)


@njit(cache=True)
def _mc_kernel(pts_i, pts_q, bits, sent, noise, n0, s1, s2):
    metric = np.empty(16)
    expd = np.empty(16)
    for k in range(sent.shape[0]):
        t = sent[k]
        yi = pts_i[t] + noise[k, 0]
        yq = pts_q[t] + noise[k, 1]
        top = -np.inf
        for m in range(16):
            d = -((yi - pts_i[m]) ** 2 + (yq - pts_q[m]) ** 2) / n0
            metric[m] = d
            if d > top:
                top = d
        acc = 0.0
        for m in range(16):
            expd[m] = math.exp(metric[m] - top)
            acc += expd[m]
        for i in range(4):
            b = bits[t, i]
            sub = 0.0
            for m in range(16):
                if bits[m, i] == b:
                    sub += expd[m]
            if sub > 1e-200:
                term = math.log(acc / sub) / LN2
            else:
                # every same-bit point underflowed: re-centre on the subset
                top_b = -np.inf
                for m in range(16):
                    if bits[m, i] == b and metric[m] > top_b:
                        top_b = metric[m]
                sub = 0.0
                for m in range(16):
                    if bits[m, i] == b:
                        sub += math.exp(metric[m] - top_b)
                term = (top + math.log(acc) - top_b - math.log(sub)) / LN2
            s1[i] += term
            s2[i] += term * term


def mc_bit_capacities(c: NuQam16, esn0_db: float, draws: int, rng_seed: int,
                      chunk: int = 1_000_000) -> tuple[np.ndarray, np.ndarray]:
    """Monte Carlo estimate of all four bit capacities on the full 2-D constellation.

    Returns ``(estimates, std_errors)``, each of shape (4,). Draws uniform
    symbols and complex Gaussian noise; no use is made of the product
    structure.
    """
    if draws < 1:
        raise ValueError("draws must be positive")
    n0 = noise_density(esn0_db)
    rng = np.random.default_rng(rng_seed)
    pts_i = np.ascontiguousarray(c.points[:, 0])
    pts_q = np.ascontiguousarray(c.points[:, 1])
    bits = c.label_bits.astype(np.int64)
    s1 = np.zeros(4)
    s2 = np.zeros(4)
    done = 0
    while done < draws:
        n = min(chunk, draws - done)
        sent = rng.integers(0, 16, size=n)
        noise = rng.normal(scale=math.sqrt(n0 / 2), size=(n, 2))
        _mc_kernel(pts_i, pts_q, bits, sent, noise, n0, s1, s2)
        done += n
    mean = s1 / draws
    var = np.maximum(s2 / draws - mean**2, 0.0)
    return 1.0 - mean, np.sqrt(var / draws)


def mc_bit_capacity(c: NuQam16, esn0_db: float, i: int, draws: int,
                    rng_seed: int) -> tuple[float, float]:
    _check_bit(i)
    if draws < 1:
        raise ValueError("draws must be positive")
    est, se = mc_bit_capacities(c, esn0_db, draws, rng_seed)
    return float(est[i - 1]), float(se[i - 1])


def capacity_curve_rows(alphas: Sequence[float], esn0_grid: Sequence[float],
                        nodes: int = DEFAULT_NODES) -> list[list[float]]:
    """Rows ``esn0_db, alpha, C1..C4, total`` for capacity-vs-SNR plots."""
    rows = []
    for a in alphas:
        for s in esn0_grid:
            caps = capacity_table([a], s, nodes)[0]
            rows.append([s, a, *caps, caps.sum()])
    return rows
