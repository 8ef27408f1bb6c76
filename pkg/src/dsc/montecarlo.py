"""Monte Carlo evaluation over noise-level (sigma) and impulse-rate (gamma)
grids: per-cell ENVSI distributions per class and fault-frequency detection
rates.

Every iteration draws its seeds from a counter keyed by
(base_seed, sigma index, gamma index, iteration), so cells and iterations can
run in any order, or in parallel, without changing the report.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DscError, InvalidParameterError
from .pipeline import AnalysisConfig, analyze_signal
from .signals import SimulationParams, simulate

DESK_SIGMA_LEVELS = (0.6, 1.0, 1.6)
DESK_GAMMA_LEVELS = (1.0, 3.0, 7.0)
FULL_SIGMA_LEVELS = (0.6, 0.8, 1.0, 1.2, 1.4, 1.6)
FULL_GAMMA_LEVELS = (1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0)


@dataclass
class MCGrid:
    """Grid definition plus the shared pipeline configuration.

    The default is a desk-scale preset (20 iterations over a 3 x 3 grid);
    ``full()`` returns the 100-iteration 6 x 7 grid.
    """

    sigma_levels: tuple = DESK_SIGMA_LEVELS
    gamma_levels: tuple = DESK_GAMMA_LEVELS
    iterations: int = 20
    base_seed: int = 0
    simulation: SimulationParams = field(default_factory=SimulationParams)
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    detection_tolerance_hz: float = 0.5

    def __post_init__(self):
        if self.iterations < 1:
            raise InvalidParameterError(f"iterations must be >= 1, got {self.iterations}")
        if not self.sigma_levels or not self.gamma_levels:
            raise InvalidParameterError("sigma_levels and gamma_levels must be non-empty")

    @classmethod
    def full(cls, base_seed: int = 0, **kwargs) -> "MCGrid":
        return cls(sigma_levels=FULL_SIGMA_LEVELS, gamma_levels=FULL_GAMMA_LEVELS,
                   iterations=100, base_seed=base_seed, **kwargs)


@dataclass
class IterationOutcome:
    sigma_index: int
    gamma_index: int
    iteration: int
    envsi: dict[str, float] | None
    frequency: float | None
    detected: bool
    failure: str | None


def run_iteration(grid: MCGrid, sigma_index: int, gamma_index: int,
                  iteration: int) -> IterationOutcome:
    """Simulate one signal, run the pipeline, classify the frequency estimate.

    Pipeline failures (stage collapse, too few peaks) are recorded as
    non-detections; they never raise.
    """
    sigma = grid.sigma_levels[sigma_index]
    gamma = grid.gamma_levels[gamma_index]
    base = grid.simulation
    params = replace(
        base,
        seed=(grid.base_seed, sigma_index, gamma_index, iteration),
        gauss=replace(base.gauss, sigma=sigma),
        impulses=replace(base.impulses, rate_per_second=gamma),
    )
    sim = simulate(params)
    try:
        result = analyze_signal(sim.signal, grid.analysis)
    except DscError as exc:
        return IterationOutcome(sigma_index, gamma_index, iteration,
                                None, None, False, exc.code)
    frequency = None if result.fault is None else result.fault.frequency
    detected = (
        frequency is not None
        and abs(frequency - base.soi.mod_freq) <= grid.detection_tolerance_hz
    )
    return IterationOutcome(sigma_index, gamma_index, iteration,
                            result.envsi_values, frequency, detected, result.failure)


def run_cell(grid: MCGrid, sigma_index: int, gamma_index: int) -> list[IterationOutcome]:
    """All iterations of one (sigma, gamma) cell, serially."""
    return [run_iteration(grid, sigma_index, gamma_index, it)
            for it in range(grid.iterations)]


def resolve_threads(explicit: int | None = None) -> int:
    if explicit is not None:
        return max(1, explicit)
    env = os.environ.get("DSC_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_grid(grid: MCGrid, threads: int | None = None,
             progress=None) -> "MCReport":
    """Run every cell and summarize. ``threads`` caps worker processes
    (default: DSC_THREADS environment variable, then machine parallelism)."""
    workers = resolve_threads(threads)
    jobs = [(si, gi, it)
            for si in range(len(grid.sigma_levels))
            for gi in range(len(grid.gamma_levels))
            for it in range(grid.iterations)]
    outcomes: dict[tuple, IterationOutcome] = {}
    if workers <= 1:
        for si, gi, it in jobs:
            outcomes[(si, gi, it)] = run_iteration(grid, si, gi, it)
            if progress:
                progress(len(outcomes), len(jobs))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(run_iteration, grid, si, gi, it): (si, gi, it)
                       for si, gi, it in jobs}
            for n_done, future in enumerate(as_completed(futures), start=1):
                key = futures[future]
                outcomes[key] = future.result()
                if progress:
                    progress(n_done, len(jobs))
    ordered = [[[outcomes[(si, gi, it)] for it in range(grid.iterations)]
                for gi in range(len(grid.gamma_levels))]
               for si in range(len(grid.sigma_levels))]
    return summarize(grid, ordered)


def boxplot_stats(samples) -> dict:
    """Median, quartiles (linear interpolation), 1.5*IQR whiskers and outliers."""
    x = np.asarray(samples, dtype=np.float64)
    q1, med, q3 = np.percentile(x, [25, 50, 75])
    iqr = q3 - q1
    lo_fence, hi_fence = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    inside = x[(x >= lo_fence) & (x <= hi_fence)]
    return {
        "median": float(med),
        "q1": float(q1),
        "q3": float(q3),
        "whisker_low": float(inside.min()),
        "whisker_high": float(inside.max()),
        "outliers": sorted(float(v) for v in x[(x < lo_fence) | (x > hi_fence)]),
    }


@dataclass
class CellReport:
    sigma: float
    gamma: float
    outcomes: list[dict]
    envsi_samples: dict[str, list[float]]
    envsi_stats: dict[str, dict]
    detection_rate: float

    def to_dict(self) -> dict:
        return {
            "sigma": self.sigma,
            "gamma": self.gamma,
            "outcomes": self.outcomes,
            "envsi_samples": self.envsi_samples,
            "envsi_stats": self.envsi_stats,
            "detection_rate": self.detection_rate,
        }


@dataclass
class MCReport:
    sigma_levels: list[float]
    gamma_levels: list[float]
    iterations: int
    base_seed: int
    cells: list[list[CellReport]]
    detection_matrix: list[list[float]]

    def cell(self, sigma_index: int, gamma_index: int) -> CellReport:
        return self.cells[sigma_index][gamma_index]

    def to_dict(self) -> dict:
        return {
            "sigma_levels": list(self.sigma_levels),
            "gamma_levels": list(self.gamma_levels),
            "iterations": self.iterations,
            "base_seed": self.base_seed,
            "detection_matrix": self.detection_matrix,
            "cells": [[c.to_dict() for c in row] for row in self.cells],
        }


def summarize(grid: MCGrid, outcomes: list[list[list[IterationOutcome]]]) -> MCReport:
    """Boxplot statistics per cell and class plus the detection-rate matrix."""
    cells = []
    matrix = []
    for si, sigma in enumerate(grid.sigma_levels):
        row = []
        rates = []
        for gi, gamma in enumerate(grid.gamma_levels):
            cell = outcomes[si][gi]
            samples: dict[str, list[float]] = {}
            per_iteration = []
            for out in cell:
                per_iteration.append({
                    "envsi": None if out.envsi is None else dict(out.envsi),
                    "frequency": out.frequency,
                    "detected": out.detected,
                    "failure": out.failure,
                })
                if out.envsi is None:
                    continue
                for name, value in out.envsi.items():
                    samples.setdefault(name, []).append(float(value))
            stats = {name: boxplot_stats(vals) for name, vals in samples.items() if vals}
            rate = float(np.mean([o.detected for o in cell])) if cell else 0.0
            row.append(CellReport(
                sigma=float(sigma),
                gamma=float(gamma),
                outcomes=per_iteration,
                envsi_samples=samples,
                envsi_stats=stats,
                detection_rate=rate,
            ))
            rates.append(rate)
        cells.append(row)
        matrix.append(rates)
    return MCReport(
        sigma_levels=[float(s) for s in grid.sigma_levels],
        gamma_levels=[float(g) for g in grid.gamma_levels],
        iterations=grid.iterations,
        base_seed=grid.base_seed,
        cells=cells,
        detection_matrix=matrix,
    )
