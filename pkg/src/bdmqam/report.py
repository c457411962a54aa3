"""Deterministic CSV output shared by the command-line tools."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

from .strategies import STRATEGIES, StrategyPoint, StreamTargets

TIE_TOL = 1e-9
SWEEP_COLUMNS = ["strategy", "g_base", "g_enh", "t", "alpha", "beta1", "beta2",
                 "beta3", "beta4", "x", "se_base", "se_enh", "se_total"]


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    return format(float(v), ".9g")


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence],
              config: dict | None = None) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if config is not None:
            fh.write("# config: " + json.dumps(config, sort_keys=True) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def sweep_rows(targets: StreamTargets, points: Iterable[StrategyPoint]) -> list[list]:
    rows = []
    for p in points:
        beta = p.allocation.beta if p.allocation is not None else (None,) * 4
        rows.append([p.strategy, targets.g_base, targets.g_enh, p.t_ratio, p.alpha, *beta,
                     p.time_share_x, p.se_base, p.se_enh, p.se_total])
    return rows


def compare_rows(t_grid: Sequence[float], points: Iterable[StrategyPoint]) -> tuple[list[str], list[list]]:
    """One row per ratio with every strategy's total and the winner.

    Hierarchical points are matched to the requested ratio they were solved for.
    """
    by_key: dict[tuple[str, int], float] = {}
    pts = list(points)
    for name in STRATEGIES:
        seq = [p for p in pts if p.strategy == name]
        for p in seq:
            k = min(range(len(t_grid)), key=lambda j: abs(t_grid[j] - p.t_ratio))
            by_key[(name, k)] = p.se_total
    header = ["t", *(f"se_{s}" for s in STRATEGIES), "best", "margin"]
    rows = []
    for k, t in enumerate(t_grid):
        vals = [by_key.get((s, k)) for s in STRATEGIES]
        present = [(v, s) for v, s in zip(vals, STRATEGIES) if v is not None]
        top = max(v for v, _ in present)
        # strategies within TIE_TOL of the top are reported jointly
        best = "|".join(s for v, s in present if top - v <= TIE_TOL)
        rest = [v for v, _ in present if top - v > TIE_TOL]
        margin = top - max(rest) if rest else None
        rows.append([t, *vals, best, margin])
    return header, rows
