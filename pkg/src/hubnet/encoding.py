"""Random-key genome shared by all population solvers.

Layout for an n-node instance, every gene in [0, 1):

    [0]                 hub-count gene: opens 1 + floor(g * p) hubs
    [1 : 1+n]           hub-choice keys: the h largest open (ties: lower node)
    [1+n : 1+2n]        assignment keys: pick a feasible hub by distance rank
    [1+2n : 1+2n+n*n]   route keys row-major: >= 0.5 prefers the hub route

Decoding never consumes randomness, so evaluation order cannot change
results.  A genome with an uncoverable spoke or an untimeable pair fails
to decode; capacity overruns are repaired by flipping the heaviest
offending hub-routed pairs to direct shipment.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .evaluation import (
    DesignTables,
    EvalContext,
    hub_tables,
    loads_from_mask,
    make_context,
    plan_from_mask,
)
from .model import FEAS_TOL, NetworkDesign, ProblemInstance, RoutePlan

__all__ = ["Genome", "genome_length", "decode", "repair_capacity"]


def genome_length(n: int) -> int:
    return 1 + 2 * n + n * n


@dataclass(frozen=True)
class Genome:
    """Structured view of one random-key vector."""

    count_gene: float
    hub_keys: tuple[float, ...]
    assign_keys: tuple[float, ...]
    route_keys: tuple[float, ...]   # row-major n*n

    @classmethod
    def from_vector(cls, vec: np.ndarray) -> "Genome":
        vec = np.asarray(vec, dtype=float)
        n_sq = len(vec) - 1
        # solve 2n + n^2 = len - 1 for n
        n = int(round((-2 + np.sqrt(4 + 4 * n_sq)) / 2))
        if genome_length(n) != len(vec):
            raise ValueError(f"vector length {len(vec)} is not 1 + 2n + n^2 for any n")
        if np.any(vec < 0.0) or np.any(vec >= 1.0):
            raise ValueError("genes must lie in [0, 1)")
        return cls(
            count_gene=float(vec[0]),
            hub_keys=tuple(vec[1:1 + n]),
            assign_keys=tuple(vec[1 + n:1 + 2 * n]),
            route_keys=tuple(vec[1 + 2 * n:]),
        )

    def to_vector(self) -> np.ndarray:
        return np.concatenate([[self.count_gene], self.hub_keys,
                               self.assign_keys, self.route_keys])


def _decode_arrays(ctx: EvalContext, vec: np.ndarray
                   ) -> Optional[tuple[np.ndarray, np.ndarray, np.ndarray, DesignTables]]:
    """Vector -> (assignment, hubs, route mask, tables), or None if undecodable."""
    inst = ctx.inst
    n = inst.n
    h = 1 + int(vec[0] * inst.p)
    if h > inst.p:
        h = inst.p
    hub_keys = vec[1:1 + n]
    ranked = np.lexsort((np.arange(n), -hub_keys))
    hubs = np.sort(ranked[:h])

    dist = inst.distance[:, hubs]
    feasible = dist <= inst.omega + FEAS_TOL
    if not feasible.any(axis=1).all():
        return None
    # the key picks a feasible hub by distance rank; the sixth power keeps
    # most draws on the nearest hub while every coverable assignment stays
    # reachable
    order = np.argsort(np.where(feasible, dist, np.inf), axis=1, kind="stable")
    counts = feasible.sum(axis=1)
    keys = vec[1 + n:1 + 2 * n]
    rank = np.minimum((keys ** 6 * counts).astype(np.intp), counts - 1)
    assignment = hubs[order[np.arange(n), rank]]
    assignment[hubs] = hubs   # hubs serve themselves regardless of keys

    tables = hub_tables(ctx, assignment)
    route_keys = vec[1 + 2 * n:].reshape(n, n)
    fh = tables.hub_feasible
    fd = ctx.direct_feasible
    if np.any(ctx.offdiag & ~fh & ~fd):
        return None
    prefer_hub = route_keys >= 0.5
    mask = np.where(prefer_hub, fh, fh & ~fd)
    mask &= ctx.offdiag
    return assignment, hubs, mask, tables


def _repair_mask(ctx: EvalContext, tables: DesignTables,
                 mask: np.ndarray) -> Optional[np.ndarray]:
    """Flip hub-routed pairs to direct until every hub load fits, or None."""
    inst = ctx.inst
    mask = mask.copy()
    loads = loads_from_mask(ctx, tables, mask)
    a = tables.assignment
    while True:
        over = loads - inst.capacity
        worst = int(np.argmax(over))
        if over[worst] <= FEAS_TOL:
            return mask
        touches = mask & ((a[:, None] == worst) | (~tables.same_hub & (a[None, :] == worst)))
        movable = touches & ctx.direct_feasible
        if not movable.any():
            return None
        qs = np.where(movable, ctx.q, -np.inf)
        flat = int(np.argmax(qs))          # max demand, ties lowest pair index
        i, j = divmod(flat, inst.n)
        mask[i, j] = False
        q = ctx.q[i, j]
        loads[a[i]] -= q
        if a[j] != a[i]:
            loads[a[j]] -= q


def decode(genome: Genome, inst: ProblemInstance,
           alpha_prime: float = 0.5) -> Optional[tuple[NetworkDesign, RoutePlan]]:
    """Genome -> capacity-repaired (design, plan), or None when infeasible."""
    ctx = make_context(inst, alpha_prime)
    dec = _decode_arrays(ctx, genome.to_vector())
    if dec is None:
        return None
    assignment, hubs, mask, tables = dec
    mask = _repair_mask(ctx, tables, mask)
    if mask is None:
        return None
    design = NetworkDesign.from_hubs(inst.n, hubs, assignment)
    return design, plan_from_mask(design, mask)


def repair_capacity(inst: ProblemInstance, design: NetworkDesign, plan: RoutePlan,
                    alpha_prime: float = 0.5) -> Optional[RoutePlan]:
    """Public repair: heaviest offending hub-routed pair goes direct, repeat."""
    from .evaluation import mask_from_plan   # local to avoid cycle at import

    ctx = make_context(inst, alpha_prime)
    tables = hub_tables(ctx, np.asarray(design.assignment, dtype=np.intp))
    mask = _repair_mask(ctx, tables, mask_from_plan(plan))
    if mask is None:
        return None
    return plan_from_mask(design, mask)
