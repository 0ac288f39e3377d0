"""Objective evaluation: cost, emissions and time-window penalty.

Two equivalent code paths are kept on purpose.  The typed path
(:func:`eval_cost`, :func:`eval_emissions`, :func:`eval_time_penalty`,
:func:`evaluate`) walks ``RoutePlan`` objects with plain scalar arithmetic
and serves as the readable reference.  The array path
(:class:`EvalContext`, :func:`hub_tables`, :func:`evaluate_mask`) expresses
a plan as a boolean hub-route mask over the pair grid and is what the
solvers use; a property test pins the two paths to each other.

Objective semantics, per ordered pair with crisp demand ``q``:

* cost -- direct flights pay full transport cost; spoke-hub legs are
  discounted by ``beta``, the hub-hub leg by ``alpha``; every visited hub
  charges its per-unit handling cost; open hubs add fixed costs once.
* emissions -- the pair needs ``ceil(q / aircraft_capacity)`` aircraft;
  each aircraft emits one landing/take-off dose per leg plus a
  per-distance climb/cruise/descent dose, for two pollutant types.
* time-window penalty -- earliness below the pair's lower window edge and
  lateness above the upper edge are charged per time unit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    FEAS_TOL,
    Direct,
    EvaluatedSolution,
    NetworkDesign,
    ObjectiveVector,
    OneHub,
    ProblemInstance,
    Route,
    RoutePlan,
    TwoHub,
    feasibility_violations,
    round6,
    route_time,
)

__all__ = [
    "aircraft_count",
    "eval_cost",
    "eval_emissions",
    "eval_time_penalty",
    "evaluate",
    "compute_objectives",
    "solution_from_plan",
    "route_time",
    "EvalContext",
    "DesignTables",
    "make_context",
    "hub_tables",
    "evaluate_mask",
    "loads_from_mask",
    "mask_from_plan",
    "plan_from_mask",
]


def aircraft_count(q: float, phi: float) -> int:
    """Aircraft needed to move quantity ``q`` with per-aircraft capacity ``phi``.

    Zero demand needs zero aircraft; otherwise the count is the ceiling of
    ``q / phi``.  Quantities within 1e-9 of an integer multiple snap down
    so float noise cannot add a phantom aircraft.
    """
    if phi <= 0:
        raise ValueError(f"aircraft capacity must be > 0, got {phi}")
    if q < 0:
        raise ValueError(f"demand must be >= 0, got {q}")
    return max(0, math.ceil(q / phi - FEAS_TOL))


def _route_distance(inst: ProblemInstance, route: Route, i: int, j: int) -> tuple[float, int]:
    """Total flown distance and leg count of a route."""
    d = inst.distance
    if isinstance(route, Direct):
        return float(d[i, j]), 1
    if isinstance(route, OneHub):
        return float(d[i, route.hub] + d[route.hub, j]), 2
    k, l = route.first, route.second
    return float(d[i, k] + d[k, l] + d[l, j]), 3


def eval_cost(inst: ProblemInstance, design: NetworkDesign, plan: RoutePlan,
              alpha_prime: float) -> float:
    """Transport + handling + fixed hub operating cost of a plan."""
    q = inst.demand_matrix(alpha_prime)
    cd = inst.unit_transport_cost * inst.distance
    beta, alpha = inst.beta_discount, inst.alpha_discount
    u = inst.handling_cost
    total = float(inst.fixed_cost[list(design.hubs)].sum())
    for i, j, route in plan.items():
        if isinstance(route, Direct):
            total += cd[i, j] * q[i, j]
        elif isinstance(route, OneHub):
            k = route.hub
            total += (beta * (cd[i, k] + cd[k, j]) + u[k]) * q[i, j]
        else:
            k, l = route.first, route.second
            total += (beta * (cd[i, k] + cd[l, j]) + alpha * cd[k, l] + u[k] + u[l]) * q[i, j]
    return round6(total)


def eval_emissions(inst: ProblemInstance, design: NetworkDesign, plan: RoutePlan,
                   alpha_prime: float) -> float:
    """Two-pollutant emission total over all aircraft movements of a plan."""
    q = inst.demand_matrix(alpha_prime)
    phi = inst.aircraft_capacity
    total = 0.0
    for i, j, route in plan.items():
        m = aircraft_count(q[i, j], phi)
        if m == 0:
            continue
        dist, legs = _route_distance(inst, route, i, j)
        total += (legs * inst.lto_p1 + inst.ccd_rate_p1 * dist) * m
        total += (legs * inst.lto_p2 + inst.ccd_rate_p2 * dist) * m
    return round6(total)


def eval_time_penalty(inst: ProblemInstance, design: NetworkDesign, plan: RoutePlan,
                      alpha_prime: float) -> float:
    """Earliness/lateness penalty of a plan against per-pair delivery windows.

    Depends only on route times, never on demand, so it is constant in the
    uncertainty rate (the argument is kept for signature uniformity).
    """
    total = 0.0
    for i, j, route in plan.items():
        t = route_time(inst, route, i, j)
        total += inst.early_penalty[i, j] * max(0.0, inst.window_lower[i, j] - t)
        total += inst.late_penalty[i, j] * max(0.0, t - inst.window_upper[i, j])
    return round6(total)


def compute_objectives(inst: ProblemInstance, design: NetworkDesign, plan: RoutePlan,
                       alpha_prime: float) -> tuple[float, float, float]:
    """Objective triple without feasibility enforcement (sweeps use this)."""
    return (
        eval_cost(inst, design, plan, alpha_prime),
        eval_emissions(inst, design, plan, alpha_prime),
        eval_time_penalty(inst, design, plan, alpha_prime),
    )


def evaluate(inst: ProblemInstance, design: NetworkDesign, plan: RoutePlan,
             alpha_prime: float) -> ObjectiveVector:
    """Objectives of a feasible (design, plan); raises on any violation."""
    violations = feasibility_violations(inst, design, plan, alpha_prime)
    if violations:
        raise ValueError("infeasible solution:\n" + "\n".join(violations))
    return ObjectiveVector(*compute_objectives(inst, design, plan, alpha_prime))


def solution_from_plan(inst: ProblemInstance, design: NetworkDesign, plan: RoutePlan,
                       alpha_prime: float) -> EvaluatedSolution:
    """Canonical constructor keeping the objectives-match-reevaluation invariant."""
    return EvaluatedSolution(design=design, plan=plan,
                             objectives=evaluate(inst, design, plan, alpha_prime),
                             alpha_prime=alpha_prime)


# --- array path -----------------------------------------------------------
#
# A plan under a fixed design is fully described by one boolean per ordered
# pair: False = Direct, True = the unique hub route implied by the endpoint
# assignments.  Everything below works on that mask representation.


@dataclass(frozen=True)
class EvalContext:
    """Design-independent per-instance arrays at one uncertainty rate."""

    inst: ProblemInstance
    alpha_prime: float
    q: np.ndarray              # (n, n) crisp demand
    m: np.ndarray              # (n, n) aircraft counts
    offdiag: np.ndarray        # (n, n) bool, True off the diagonal
    cd: np.ndarray             # unit_transport_cost * distance
    direct_z1: np.ndarray
    direct_z2: np.ndarray
    direct_z3: np.ndarray
    direct_time: np.ndarray
    direct_feasible: np.ndarray


def make_context(inst: ProblemInstance, alpha_prime: float) -> EvalContext:
    n = inst.n
    q = inst.demand_matrix(alpha_prime)
    m = np.maximum(0, np.ceil(q / inst.aircraft_capacity - FEAS_TOL))
    offdiag = ~np.eye(n, dtype=bool)
    cd = inst.unit_transport_cost * inst.distance
    t = inst.travel_time
    lto = inst.lto_p1 + inst.lto_p2
    rate = inst.ccd_rate_p1 + inst.ccd_rate_p2
    direct_z1 = cd * q
    direct_z2 = (lto + rate * inst.distance) * m
    direct_z3 = np.where(
        offdiag,
        inst.early_penalty * np.maximum(0.0, inst.window_lower - t)
        + inst.late_penalty * np.maximum(0.0, t - inst.window_upper),
        0.0,
    )
    direct_feasible = t <= inst.max_transfer_time + FEAS_TOL
    return EvalContext(inst=inst, alpha_prime=alpha_prime, q=q, m=m, offdiag=offdiag,
                       cd=cd, direct_z1=direct_z1, direct_z2=direct_z2,
                       direct_z3=direct_z3, direct_time=t, direct_feasible=direct_feasible)


@dataclass(frozen=True)
class DesignTables:
    """Per-pair contributions of the hub route implied by an assignment."""

    assignment: np.ndarray     # (n,) int
    same_hub: np.ndarray       # (n, n) bool, endpoints share a hub
    hub_z1: np.ndarray
    hub_z2: np.ndarray
    hub_z3: np.ndarray
    hub_time: np.ndarray
    hub_feasible: np.ndarray


def hub_tables(ctx: EvalContext, assignment: np.ndarray) -> DesignTables:
    inst = ctx.inst
    a = np.asarray(assignment, dtype=np.intp)
    n = inst.n
    idx = np.arange(n)
    d, t, cd, u = inst.distance, inst.travel_time, ctx.cd, inst.handling_cost

    same = a[:, None] == a[None, :]
    diff = ~same
    d_ik = d[idx, a][:, None]
    d_lj = d[a, idx][None, :]
    d_kl = d[a[:, None], a[None, :]]
    t_ik = t[idx, a][:, None]
    t_lj = t[a, idx][None, :]
    t_kl = t[a[:, None], a[None, :]]
    cd_ik = cd[idx, a][:, None]
    cd_lj = cd[a, idx][None, :]
    cd_kl = cd[a[:, None], a[None, :]]
    u_k = u[a][:, None]
    u_l = u[a][None, :]

    legs_d = d_ik + np.where(diff, d_kl, 0.0) + d_lj
    legs_t = t_ik + np.where(diff, t_kl, 0.0) + t_lj
    unit_cost = (inst.beta_discount * (cd_ik + cd_lj)
                 + np.where(diff, inst.alpha_discount * cd_kl + u_l, 0.0) + u_k)
    n_lto = 2.0 + diff
    lto = inst.lto_p1 + inst.lto_p2
    rate = inst.ccd_rate_p1 + inst.ccd_rate_p2

    hub_z1 = unit_cost * ctx.q
    hub_z2 = (n_lto * lto + rate * legs_d) * ctx.m
    hub_z3 = np.where(
        ctx.offdiag,
        inst.early_penalty * np.maximum(0.0, inst.window_lower - legs_t)
        + inst.late_penalty * np.maximum(0.0, legs_t - inst.window_upper),
        0.0,
    )
    hub_feasible = legs_t <= inst.max_transfer_time + FEAS_TOL
    return DesignTables(assignment=a, same_hub=same, hub_z1=hub_z1, hub_z2=hub_z2,
                        hub_z3=hub_z3, hub_time=legs_t, hub_feasible=hub_feasible)


def evaluate_mask(ctx: EvalContext, tables: DesignTables, hubs: np.ndarray,
                  mask: np.ndarray) -> tuple[float, float, float]:
    """Objectives of the plan encoded by a hub-route mask (True = hub route)."""
    use_hub = mask & ctx.offdiag
    use_dir = ~mask & ctx.offdiag
    z1 = (float(ctx.inst.fixed_cost[hubs].sum())
          + float(np.sum(ctx.direct_z1, where=use_dir))
          + float(np.sum(tables.hub_z1, where=use_hub)))
    z2 = (float(np.sum(ctx.direct_z2, where=use_dir))
          + float(np.sum(tables.hub_z2, where=use_hub)))
    z3 = (float(np.sum(ctx.direct_z3, where=use_dir))
          + float(np.sum(tables.hub_z3, where=use_hub)))
    return (round6(z1), round6(z2), round6(z3))


def loads_from_mask(ctx: EvalContext, tables: DesignTables, mask: np.ndarray) -> np.ndarray:
    """Per-node hub throughput of a masked plan (TwoHub loads both hubs)."""
    a = tables.assignment
    qm = np.where(mask & ctx.offdiag, ctx.q, 0.0)
    loads = np.zeros(ctx.inst.n)
    np.add.at(loads, a, qm.sum(axis=1))                                # origin-side hub
    np.add.at(loads, a, np.where(~tables.same_hub, qm, 0.0).sum(axis=0))  # destination-side hub
    return loads


def mask_from_plan(plan: RoutePlan) -> np.ndarray:
    n = plan.n
    mask = np.zeros((n, n), dtype=bool)
    for i, j, route in plan.items():
        mask[i, j] = not isinstance(route, Direct)
    return mask


def plan_from_mask(design: NetworkDesign, mask: np.ndarray) -> RoutePlan:
    n = design.n
    a = design.assignment
    grid: list[list[Route | None]] = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if mask[i, j]:
                grid[i][j] = OneHub(a[i]) if a[i] == a[j] else TwoHub(a[i], a[j])
            else:
                grid[i][j] = Direct()
    return RoutePlan(routes=tuple(tuple(row) for row in grid))
