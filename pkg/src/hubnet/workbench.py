"""Parameter sweeps over a fixed plan and the solver comparison experiment.

A sweep re-prices one frozen (design, plan) pair while a single knob
moves, which isolates the knob's effect from solver noise; objectives are
recomputed without re-checking feasibility because the plan is kept on
purpose even where it would no longer be chosen.

The comparison experiment runs a (instance, algorithm, seed) grid of
cells, each cell fully self-contained, and aggregates per-algorithm
averages plus a closeness ranking.  Cells can run in a process pool; all
output bytes except the timing column are independent of the worker
count because cell results are collected and written in grid order.
"""

from __future__ import annotations

import dataclasses
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .analysis import DecisionMatrix, FrontMetrics, compute_metrics, topsis_rank
from .evaluation import compute_objectives
from .exact import (
    DEFAULT_BUDGET,
    EnumerationBudgetError,
    EpsilonGrid,
    epsilon_constraint_front,
)
from .fileio import load_instance, write_csv, _solution_row, FRONT_COLUMNS
from .fronts import ParetoFront
from .metaheuristics import ALGORITHMS, AlgorithmParams
from .model import EvaluatedSolution, ProblemInstance

__all__ = [
    "SWEEP_PARAMETERS",
    "sweep_rows",
    "ExperimentConfig",
    "CellResult",
    "run_compare",
    "run_solver",
]

SWEEP_PARAMETERS = ("alpha", "beta", "phi", "alpha_prime")


def sweep_rows(inst: ProblemInstance, solution: EvaluatedSolution,
               param: str, values: Sequence[float]) -> list[tuple[float, float, float, float]]:
    """Objectives of the frozen plan as one knob moves; rows (value, z1, z2, z3).

    ``alpha``/``beta`` are the inter-hub and collection discounts, ``phi``
    the aircraft capacity, ``alpha_prime`` the demand defuzzification
    rate.  Other instance data stays put.
    """
    if param not in SWEEP_PARAMETERS:
        raise ValueError(f"unknown sweep parameter {param!r}, expected one of {SWEEP_PARAMETERS}")
    rows = []
    for v in values:
        v = float(v)
        rate = solution.alpha_prime
        swept = inst
        if param == "alpha":
            swept = dataclasses.replace(inst, alpha_discount=v)
        elif param == "beta":
            swept = dataclasses.replace(inst, beta_discount=v)
        elif param == "phi":
            swept = dataclasses.replace(inst, aircraft_capacity=v)
        else:
            rate = v
        z1, z2, z3 = compute_objectives(swept, solution.design, solution.plan, rate)
        rows.append((v, z1, z2, z3))
    return rows


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one comparison run."""

    instances: tuple[str, ...]
    algorithms: tuple[str, ...]
    seeds: tuple[int, ...]
    out_dir: str
    alpha_prime: float = 0.5
    params: AlgorithmParams = AlgorithmParams()
    grid_z2: int = 6
    grid_z3: int = 6
    budget: int = DEFAULT_BUDGET
    workers: Optional[int] = None   # None: HUBNET_WORKERS env var, else 1

    def __post_init__(self) -> None:
        if not self.instances or not self.algorithms or not self.seeds:
            raise ValueError("need at least one instance, algorithm and seed")
        known = set(ALGORITHMS) | {"exact"}
        bad = [a for a in self.algorithms if a not in known]
        if bad:
            raise ValueError(f"unknown algorithms {bad}, expected subset of {sorted(known)}")


@dataclass(frozen=True)
class CellResult:
    instance: str
    algorithm: str
    seed: int
    metrics: Optional[FrontMetrics]           # None when the cell failed
    front_rows: tuple[tuple[str, ...], ...]   # rendered front CSV records
    error: Optional[str] = None


def run_solver(inst: ProblemInstance, algorithm: str, seed: int, alpha_prime: float,
               params: AlgorithmParams, grid: EpsilonGrid,
               budget: int = DEFAULT_BUDGET) -> tuple[ParetoFront, float]:
    """One solver run with wall-clock timing; the seed is inert for ``exact``."""
    start = time.perf_counter()
    if algorithm == "exact":
        front = epsilon_constraint_front(inst, grid, alpha_prime=alpha_prime, budget=budget)
    else:
        front = ALGORITHMS[algorithm](inst, params, seed=seed, alpha_prime=alpha_prime)
    return front, time.perf_counter() - start


def _run_cell(payload: tuple) -> CellResult:
    path, name, algorithm, seed, alpha_prime, params, grid_z2, grid_z3, budget = payload
    inst = load_instance(path)
    try:
        front, elapsed = run_solver(inst, algorithm, seed, alpha_prime, params,
                                    EpsilonGrid(grid_z2, grid_z3), budget)
        metrics = compute_metrics(front, elapsed)
    except (EnumerationBudgetError, ValueError) as exc:
        # a failed solve (budget blown, empty front) aborts this cell only
        return CellResult(instance=name, algorithm=algorithm, seed=seed,
                          metrics=None, front_rows=(), error=str(exc))
    rows = tuple(tuple(_solution_row(s)) for s in front.solutions)
    return CellResult(instance=name, algorithm=algorithm, seed=seed,
                      metrics=metrics, front_rows=rows)


def _resolve_workers(workers: Optional[int]) -> int:
    if workers is not None:
        return max(1, workers)
    env = os.environ.get("HUBNET_WORKERS", "")
    return max(1, int(env)) if env.strip() else 1


def run_compare(config: ExperimentConfig) -> list[CellResult]:
    """Run the cell grid, write cells/averages/ranking tables and all fronts.

    A cell whose solve fails (enumeration budget, empty front) is recorded
    as missing: its row keeps blank indicator fields, no front file is
    written, and the averages and ranking cover only algorithms with at
    least one completed cell.
    """
    out = Path(config.out_dir)
    fronts_dir = out / "fronts"
    fronts_dir.mkdir(parents=True, exist_ok=True)

    names = [Path(p).stem for p in config.instances]
    if len(set(names)) != len(names):
        raise ValueError(f"instance file stems must be unique, got {names}")
    payloads = []
    for path, name in zip(config.instances, names):
        for algorithm in config.algorithms:
            for seed in config.seeds:
                payloads.append((path, name, algorithm, seed, config.alpha_prime,
                                 config.params, config.grid_z2, config.grid_z3,
                                 config.budget))

    workers = _resolve_workers(config.workers)
    if workers == 1:
        results = [_run_cell(p) for p in payloads]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_cell, payloads))

    cell_rows = []
    for r in results:
        if r.metrics is None:
            cell_rows.append([r.instance, r.algorithm, str(r.seed), "", "", "", ""])
            continue
        cell_rows.append([r.instance, r.algorithm, str(r.seed),
                          str(r.metrics.npf), repr(r.metrics.msi),
                          repr(r.metrics.sm), repr(r.metrics.cpt)])
        front_path = fronts_dir / f"{r.instance}_{r.algorithm}_seed{r.seed}.csv"
        write_csv(front_path, FRONT_COLUMNS, [list(row) for row in r.front_rows])
    write_csv(out / "cells.csv",
              ("instance", "algorithm", "seed", "npf", "msi", "sm", "cpt"), cell_rows)

    ranked = []
    averages = []
    for algorithm in config.algorithms:
        cells = [r.metrics for r in results
                 if r.algorithm == algorithm and r.metrics is not None]
        if not cells:
            continue
        ranked.append(algorithm)
        averages.append([
            float(np.mean([m.npf for m in cells])),
            float(np.mean([m.msi for m in cells])),
            float(np.mean([m.sm for m in cells])),
            float(np.mean([m.cpt for m in cells])),
        ])
    write_csv(out / "averages.csv", ("algorithm", "npf", "msi", "sm", "cpt"),
              [[a] + [repr(v) for v in row] for a, row in zip(ranked, averages)])

    if ranked:
        matrix = DecisionMatrix(
            alternatives=tuple(ranked),
            criteria=("npf", "msi", "sm", "cpt"),
            values=np.asarray(averages),
            directions=("benefit", "benefit", "cost", "cost"),
            weights=(0.25, 0.25, 0.25, 0.25),
        )
        ci, order = topsis_rank(matrix)
        write_csv(out / "ranking.csv", ("rank", "algorithm", "closeness"),
                  [[str(pos + 1), ranked[a], repr(float(ci[a]))]
                   for pos, a in enumerate(order)])
    else:
        write_csv(out / "ranking.csv", ("rank", "algorithm", "closeness"), [])
    return results
