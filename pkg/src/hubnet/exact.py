"""Exact solvers: configuration enumeration, epsilon-constraint front, oracle.

The main objective is cost; emissions and time-window penalty are turned
into inclusive upper bounds over a grid derived from the individual optima
of the three objectives.  Per grid cell the solver takes the minimum over
every configuration (hub set + assignment) of an exact routing
branch-and-bound; configurations are visited in lower-bound order so most
are pruned without search.  ``brute_force_oracle`` independently exhausts
every configuration and every per-pair route combination (with
exactness-preserving dominance pruning on partial states) and is the
ground truth the solver is tested against.

Determinism: ties between equal-objective routings break on the route
encoding (Direct=0, hub route=1, canonical pair order), ties between
configurations on the canonical enumeration index.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .evaluation import (
    EvalContext,
    hub_tables,
    make_context,
    plan_from_mask,
    solution_from_plan,
)
from .fronts import ParetoFront, nondominated_mask
from .model import (
    FEAS_TOL,
    EvaluatedSolution,
    NetworkDesign,
    ProblemInstance,
    RoutePlan,
    round6,
)

__all__ = [
    "DEFAULT_BUDGET",
    "EnumerationBudgetError",
    "EpsilonGrid",
    "configuration_count",
    "enumerate_configurations",
    "solve_routing",
    "epsilon_constraint_front",
    "brute_force_oracle",
]

DEFAULT_BUDGET = 10 ** 8
ORACLE_MAX_NODES = 6

# Objectives are rounded to 1e-6; a bound within half that of an incumbent
# could still tie after rounding, so pruning leaves this much slack.
_ROUND_SLACK = 6e-7


class EnumerationBudgetError(RuntimeError):
    """Configuration space too large to enumerate exactly."""

    def __init__(self, count: int, budget: int):
        self.count = count
        self.budget = budget
        super().__init__(
            f"configuration count {count} exceeds enumeration budget {budget}; "
            "use a metaheuristic solver for this size"
        )

    def __reduce__(self):
        # two required init args: stock exception pickling rebuilds from the
        # formatted message alone and breaks process pools mid-transfer
        return (EnumerationBudgetError, (self.count, self.budget))


def configuration_count(n: int, p: int) -> int:
    """Upper bound sum_h C(n,h) * h^(n-h) on enumerable configurations."""
    return sum(math.comb(n, h) * h ** (n - h) for h in range(1, p + 1))


@dataclass(frozen=True)
class EpsilonGrid:
    """Bound grid over the secondary objectives (emissions, time penalty).

    ``segments`` splits of a range [lo, hi] yield the bound values
    ``lo + t*(hi-lo)/segments`` for t=1..segments: the upper edges of the
    segments.  A 1x1 grid therefore has exactly one, loosest cell whose
    optimum is the unconstrained minimum-cost solution.
    """

    segments_z2: int = 6
    segments_z3: int = 6

    def __post_init__(self) -> None:
        if self.segments_z2 < 1 or self.segments_z3 < 1:
            raise ValueError("grid segment counts must be >= 1")

    @staticmethod
    def bound_values(lo: float, hi: float, segments: int) -> list[float]:
        vals = [float(np.round(lo + t * (hi - lo) / segments, 6)) for t in range(1, segments + 1)]
        return sorted(set(vals))

    def cells(self, range_z2: tuple[float, float], range_z3: tuple[float, float]) -> list[tuple[float, float]]:
        v2 = self.bound_values(range_z2[0], range_z2[1], self.segments_z2)
        v3 = self.bound_values(range_z3[0], range_z3[1], self.segments_z3)
        return [(e2, e3) for e2 in v2 for e3 in v3]


def _spoke_choices(inst: ProblemInstance, hubs: Sequence[int]) -> Optional[list[np.ndarray]]:
    """Feasible hub positions (indices into ``hubs``) per non-hub node, or None."""
    hub_arr = np.asarray(hubs, dtype=np.intp)
    choices: list[np.ndarray] = []
    hub_set = set(int(k) for k in hubs)
    for i in range(inst.n):
        if i in hub_set:
            continue
        ok = np.where(inst.distance[i, hub_arr] <= inst.omega + FEAS_TOL)[0]
        if len(ok) == 0:
            return None
        choices.append(ok)
    return choices


def enumerate_configurations(inst: ProblemInstance,
                             budget: int = DEFAULT_BUDGET) -> Iterator[NetworkDesign]:
    """Yield every legal design: hub subsets of size 1..p, spokes within omega.

    Order is canonical: subsets by size then lexicographically, assignments
    in product order over spokes (node order, candidate hubs ascending).

    Raises:
        EnumerationBudgetError: when ``configuration_count`` exceeds ``budget``.
    """
    count = configuration_count(inst.n, inst.p)
    if count > budget:
        raise EnumerationBudgetError(count, budget)
    n = inst.n
    for h in range(1, inst.p + 1):
        for hubs in itertools.combinations(range(n), h):
            choices = _spoke_choices(inst, hubs)
            if choices is None:
                continue
            spokes = [i for i in range(n) if i not in hubs]
            hub_arr = list(hubs)
            for combo in itertools.product(*[list(c) for c in choices]):
                assignment = list(range(n))
                for s, cidx in zip(spokes, combo):
                    assignment[s] = hub_arr[cidx]
                for k in hubs:
                    assignment[k] = k
                yield NetworkDesign.from_hubs(n, hubs, assignment)


# --- per-hub-set tensors and the configuration index -----------------------


@dataclass
class _Block:
    """All configurations sharing one hub set, with hub-route tensors.

    Tensors are indexed ``[i, j, x, y]`` where x, y are positions in
    ``hubs`` of the origin's and destination's hub.
    """

    hubs: tuple[int, ...]
    spokes: np.ndarray            # non-hub node ids
    choices: list[np.ndarray]     # per spoke: feasible hub positions
    n_configs: int
    fixed_total: float
    z1h: np.ndarray               # (n, n, h, h)
    z2h: np.ndarray
    z3h: np.ndarray
    feas_h: np.ndarray            # (n, n, h, h) bool
    radices: list[int] = field(default_factory=list)


def _build_block(ctx: EvalContext, hubs: tuple[int, ...]) -> Optional[_Block]:
    inst = ctx.inst
    choices = _spoke_choices(inst, hubs)
    if choices is None:
        return None
    n = inst.n
    H = np.asarray(hubs, dtype=np.intp)
    h = len(H)
    d, t, cd, u = inst.distance, inst.travel_time, ctx.cd, inst.handling_cost
    same = np.eye(h, dtype=bool)

    d_iH = d[:, H][:, None, :, None]
    d_Hj = d[H, :].T[None, :, None, :]
    t_iH = t[:, H][:, None, :, None]
    t_Hj = t[H, :].T[None, :, None, :]
    cd_iH = cd[:, H][:, None, :, None]
    cd_Hj = cd[H, :].T[None, :, None, :]
    mid_d = np.where(same, 0.0, d[np.ix_(H, H)])[None, None, :, :]
    mid_t = np.where(same, 0.0, t[np.ix_(H, H)])[None, None, :, :]
    extra_cost = np.where(same, 0.0,
                          inst.alpha_discount * cd[np.ix_(H, H)] + u[H][None, :])[None, None, :, :]

    legs_d = d_iH + mid_d + d_Hj
    legs_t = t_iH + mid_t + t_Hj
    unit_cost = (inst.beta_discount * (cd_iH + cd_Hj) + extra_cost
                 + u[H][None, None, :, None])
    n_lto = np.where(same, 2.0, 3.0)[None, None, :, :]
    lto = inst.lto_p1 + inst.lto_p2
    rate = inst.ccd_rate_p1 + inst.ccd_rate_p2

    q4 = ctx.q[:, :, None, None]
    m4 = ctx.m[:, :, None, None]
    z1h = unit_cost * q4
    z2h = (n_lto * lto + rate * legs_d) * m4
    z3h = (inst.early_penalty[:, :, None, None] * np.maximum(0.0, inst.window_lower[:, :, None, None] - legs_t)
           + inst.late_penalty[:, :, None, None] * np.maximum(0.0, legs_t - inst.window_upper[:, :, None, None]))
    feas_h = legs_t <= inst.max_transfer_time[:, :, None, None] + FEAS_TOL
    diag = np.arange(n)
    z3h[diag, diag] = 0.0

    n_configs = 1
    radices = []
    for c in choices:
        n_configs *= len(c)
        radices.append(len(c))
    spokes = np.array([i for i in range(n) if i not in hubs], dtype=np.intp)
    return _Block(hubs=hubs, spokes=spokes, choices=choices, n_configs=n_configs,
                  fixed_total=float(inst.fixed_cost[H].sum()),
                  z1h=z1h, z2h=z2h, z3h=z3h, feas_h=feas_h, radices=radices)


@dataclass
class _ExactIndex:
    """Enumerated configuration space with per-config objective lower bounds."""

    ctx: EvalContext
    blocks: list[_Block]
    offsets: np.ndarray           # block start indices, len(blocks)+1
    lb: np.ndarray                # (3, total) objective lower bounds
    orders: list[np.ndarray]      # argsort of each lb row
    i_arr: np.ndarray             # canonical off-diagonal pair rows
    j_arr: np.ndarray
    pd_cache: dict = field(default_factory=dict)
    repair: Optional["_RepairIndex"] = None

    @property
    def total(self) -> int:
        return int(self.offsets[-1])

    def locate(self, g: int) -> tuple[_Block, int]:
        b = int(np.searchsorted(self.offsets, g, side="right")) - 1
        return self.blocks[b], g - int(self.offsets[b])

    def pair_data(self, g: int) -> tuple[_Block, np.ndarray, Optional[_PairData]]:
        """Config id -> (block, assignment, routing options), memoised."""
        cached = self.pd_cache.get(g)
        if cached is None:
            block, local = self.locate(g)
            a_idx = _assignment_chunk(block, local, local + 1)[0]
            cached = (block, a_idx, _pair_data(self, block, a_idx))
            if len(self.pd_cache) >= 1024:
                self.pd_cache.pop(next(iter(self.pd_cache)))
            self.pd_cache[g] = cached
        return cached


def _assignment_chunk(block: _Block, start: int, stop: int) -> np.ndarray:
    """(m, n) hub-position assignments for local config indices [start, stop)."""
    n = len(block.spokes) + len(block.hubs)
    m = stop - start
    out = np.empty((m, n), dtype=np.intp)
    for pos, k in enumerate(block.hubs):
        out[:, k] = pos
    local = np.arange(start, stop)
    for s_idx in range(len(block.spokes) - 1, -1, -1):
        r = block.radices[s_idx]
        out[:, block.spokes[s_idx]] = block.choices[s_idx][local % r]
        local //= r
    return out


_LB_CHUNK = 4096


def _build_index(inst: ProblemInstance, alpha_prime: float, budget: int) -> _ExactIndex:
    count = configuration_count(inst.n, inst.p)
    if count > budget:
        raise EnumerationBudgetError(count, budget)
    ctx = make_context(inst, alpha_prime)
    n = inst.n
    blocks: list[_Block] = []
    for h in range(1, inst.p + 1):
        for hubs in itertools.combinations(range(n), h):
            block = _build_block(ctx, hubs)
            if block is not None:
                blocks.append(block)

    i_arr, j_arr = np.where(ctx.offdiag)

    lb_parts = [np.empty((3, 0))]
    ii, jj = np.indices((n, n))
    fd = ctx.direct_feasible | ~ctx.offdiag          # diagonal never blocks
    d1, d2, d3 = ctx.direct_z1, ctx.direct_z2, ctx.direct_z3
    diag = np.arange(n)
    for block in blocks:
        rows = np.empty((3, block.n_configs))
        for start in range(0, block.n_configs, _LB_CHUNK):
            stop = min(start + _LB_CHUNK, block.n_configs)
            A = _assignment_chunk(block, start, stop)
            ai = A[:, :, None]
            aj = A[:, None, :]
            fh = block.feas_h[ii[None], jj[None], ai, aj]
            blocked = ~(fh | fd[None])
            for row, tensor, direct in ((0, block.z1h, d1), (1, block.z2h, d2), (2, block.z3h, d3)):
                hv = tensor[ii[None], jj[None], ai, aj]
                best = np.where(fh, hv, np.inf)
                best = np.minimum(best, np.where(fd[None], direct[None], np.inf))
                best[:, diag, diag] = 0.0
                sums = best.sum(axis=(1, 2))
                sums[blocked.any(axis=(1, 2))] = np.inf
                if row == 0:
                    sums = sums + block.fixed_total
                rows[row, start:stop] = sums
        lb_parts.append(rows)
    lb = np.concatenate(lb_parts, axis=1)
    offsets = np.zeros(len(blocks) + 1, dtype=np.int64)
    for b, block in enumerate(blocks):
        offsets[b + 1] = offsets[b] + block.n_configs
    orders = [np.argsort(lb[row], kind="stable") for row in range(3)]
    return _ExactIndex(ctx=ctx, blocks=blocks, offsets=offsets, lb=lb, orders=orders,
                       i_arr=i_arr, j_arr=j_arr)


@dataclass
class _RepairIndex:
    """Per-config fractional-repair tables for budget-aware cost bounds.

    For each config the cost floor takes every pair's cheapest option; the
    tables record how much emission/penalty that floor uses (``used``) and,
    in cost-per-saving order, the cumulative savings and costs of switching
    pairs to their other option (padded with zeros past the real entries).
    A budget's conditional cost bound is the floor plus the cheapest
    fractional repair covering the overuse, see _conditional_lb.
    """

    used: list[np.ndarray]        # per budget objective: (total,)
    cum_save: list[np.ndarray]    # per budget objective: (total, P)
    cum_cost: list[np.ndarray]
    ratio: list[np.ndarray]


def _build_repair(index: _ExactIndex) -> _RepairIndex:
    ctx = index.ctx
    i_arr, j_arr = index.i_arr, index.j_arr
    P = len(i_arr)
    total = index.total
    used = [np.zeros(total), np.zeros(total)]
    cum_save = [np.empty((total, P)), np.empty((total, P))]
    cum_cost = [np.empty((total, P)), np.empty((total, P))]
    ratio = [np.empty((total, P)), np.empty((total, P))]

    fd = ctx.direct_feasible[i_arr, j_arr]
    dir1 = np.where(fd, ctx.direct_z1[i_arr, j_arr], np.inf)
    dir_c = [np.where(fd, ctx.direct_z2[i_arr, j_arr], np.inf),
             np.where(fd, ctx.direct_z3[i_arr, j_arr], np.inf)]

    for b, block in enumerate(index.blocks):
        goff = int(index.offsets[b])
        for start in range(0, block.n_configs, _LB_CHUNK):
            stop = min(start + _LB_CHUNK, block.n_configs)
            A = _assignment_chunk(block, start, stop)
            ai = A[:, i_arr]
            aj = A[:, j_arr]
            fh = block.feas_h[i_arr[None, :], j_arr[None, :], ai, aj]
            hub1 = np.where(fh, block.z1h[i_arr[None, :], j_arr[None, :], ai, aj], np.inf)
            hub_c = [np.where(fh, block.z2h[i_arr[None, :], j_arr[None, :], ai, aj], np.inf),
                     np.where(fh, block.z3h[i_arr[None, :], j_arr[None, :], ai, aj], np.inf)]
            cheap_hub = hub1 < dir1[None, :]
            base1 = np.where(cheap_hub, hub1, dir1[None, :])
            alt1 = np.where(cheap_hub, dir1[None, :], hub1)
            sl = slice(goff + start, goff + stop)
            for c in range(2):
                base_c = np.where(cheap_hub, hub_c[c], dir_c[c][None, :])
                alt_c = np.where(cheap_hub, dir_c[c][None, :], hub_c[c])
                used[c][sl] = base_c.sum(axis=1)
                with np.errstate(invalid="ignore"):
                    d1 = alt1 - base1
                    dc = base_c - alt_c
                valid = np.isfinite(d1) & np.isfinite(dc) & (dc > 0)
                d1 = np.where(valid, d1, 0.0)
                dc = np.where(valid, dc, 0.0)
                with np.errstate(divide="ignore", invalid="ignore"):
                    r = np.where(valid, d1 / dc, np.inf)
                ord_ = np.argsort(r, axis=1, kind="stable")
                r_s = np.take_along_axis(np.where(valid, r, 0.0), ord_, axis=1)
                cum_save[c][sl] = np.cumsum(np.take_along_axis(dc, ord_, axis=1), axis=1)
                cum_cost[c][sl] = np.cumsum(np.take_along_axis(d1, ord_, axis=1), axis=1)
                ratio[c][sl] = r_s
    return _RepairIndex(used=used, cum_save=cum_save, cum_cost=cum_cost, ratio=ratio)


# the cached repair tables cost 48 bytes per (config, pair); past this cap
# fall back to the unconditioned bounds rather than exhaust memory
_REPAIR_BYTES_CAP = 768 * 2 ** 20


def _conditional_lb(index: _ExactIndex, eps2: float, eps3: float) -> np.ndarray:
    """Per-config cost lower bound conditioned on the cell's budgets.

    The unconstrained bound plus the cheapest fractional repair (greedy
    over cost/saving ratios) that brings each budget objective's floor
    usage inside its bound; inf marks configs that cannot fit the cell.
    The repairs for the two budgets are computed independently, so the
    max of the two penalties is still a valid joint bound.
    """
    if index.repair is None:
        if index.total * len(index.i_arr) * 48 > _REPAIR_BYTES_CAP:
            return index.lb[0].copy()
        index.repair = _build_repair(index)
    rep = index.repair
    pen = np.zeros(index.total)
    for c, eps in ((0, eps2), (1, eps3)):
        if not math.isfinite(eps):
            continue
        need = rep.used[c] - (eps + _ROUND_SLACK)
        rows = np.where((need > 0) & np.isfinite(need))[0]
        if not len(rows):
            continue
        nv = need[rows]
        cs = rep.cum_save[c][rows]
        cc = rep.cum_cost[c][rows]
        rr = rep.ratio[c][rows]
        p = np.full(len(rows), np.inf)
        ok = nv <= cs[:, -1]
        if ok.any():
            k = (cs[ok] < nv[ok, None]).sum(axis=1)
            ar = np.arange(len(k))
            prev_save = np.where(k > 0, cs[ok][ar, np.maximum(k - 1, 0)], 0.0)
            prev_cost = np.where(k > 0, cc[ok][ar, np.maximum(k - 1, 0)], 0.0)
            marg = rr[ok][ar, k]
            p[ok] = prev_cost + (nv[ok] - prev_save) * marg
        # cumsum drift must never push the bound past the true cost
        p = np.where(p > 1e-9, p - 1e-9, 0.0)
        pen[rows] = np.maximum(pen[rows], p)
    return index.lb[0] + pen


# --- routing branch and bound ----------------------------------------------


@dataclass
class _PairData:
    """Per-pair route options in search order, plus bounding suffixes."""

    contrib: np.ndarray       # (P, 2, 3) option contributions, inf = infeasible
    suffix_min: np.ndarray    # (P+1, 3) sum of per-pair best contributions below t
    load_nodes: np.ndarray    # (P, 2) nodes loaded by the hub option (-1 = none)
    load_q: np.ndarray        # (P,) demand added per loaded node
    canon_pos: np.ndarray     # (P,) canonical pair position of search position t
    budget: list = field(default_factory=list)   # repair tables, see _budget_tables


def _repair_tables(contrib: np.ndarray, v: int, b: int) -> tuple:
    """Fractional-repair table bounding objective ``v`` under a budget on ``b``.

    Taking every pair's option that is cheapest in ``v`` gives v's floor
    but uses some amount of ``b`` (``used``); honoring a budget on ``b``
    means switching pairs to their other option, paying that pair's delta
    in ``v`` for its saving in ``b``.  The cheapest total repair covering
    a given overuse is the continuous knapsack over deltas (greedy by
    cost/saving ratio), a valid lower bound on any integral routing.  Per
    suffix start t the table holds the suffix's switch candidates in ratio
    order with cumulative savings and costs.
    """
    P = len(contrib)
    rows = np.arange(P)
    cheap = np.where(contrib[:, 1, v] < contrib[:, 0, v], 1, 0)
    base_v = contrib[rows, cheap, v]
    alt_v = contrib[rows, 1 - cheap, v]
    base_b = contrib[rows, cheap, b]
    alt_b = contrib[rows, 1 - cheap, b]
    used = np.zeros(P + 1)
    used[:P] = base_b[::-1].cumsum()[::-1]
    with np.errstate(invalid="ignore"):
        dv = alt_v - base_v
        db = base_b - alt_b
    cand = np.where(np.isfinite(dv) & np.isfinite(db) & (db > 0))[0]
    ratio = dv[cand] / db[cand]
    order = np.lexsort((cand, ratio))
    ss = cand[order]
    valid = ss[None, :] >= np.arange(P + 1)[:, None]
    cum_save = np.cumsum(np.where(valid, db[ss][None, :], 0.0), axis=1)
    cum_cost = np.cumsum(np.where(valid, dv[ss][None, :], 0.0), axis=1)
    pos = np.full(P, P, dtype=np.intp)
    pos[ss] = np.arange(len(ss))
    return (used.tolist(), cum_save, cum_cost, ratio[order], pos.tolist())


def _budget_tables(contrib: np.ndarray) -> list:
    """Repair tables used by the search: cost under either budget, plus the
    cross pair (emissions under the penalty budget and vice versa), which
    prices out budget-infeasible subtrees before any incumbent exists."""
    return [_repair_tables(contrib, 0, 1), _repair_tables(contrib, 0, 2),
            _repair_tables(contrib, 1, 2), _repair_tables(contrib, 2, 1)]


def _pair_order(contrib: np.ndarray) -> np.ndarray:
    """Search order over pairs: forced ones first, then descending spread.

    Pairs whose two options diverge the most (any objective, range
    normalized) decide the most, so branching on them near the root keeps
    the budget and bound pruning sharp; pairs with a single feasible
    option carry no branching at all and go first.
    """
    with np.errstate(invalid="ignore"):
        d = np.abs(contrib[:, 1, :] - contrib[:, 0, :])
    d = np.where(np.isfinite(d), d, 0.0)
    scale = d.max(axis=0)
    scale[scale == 0] = 1.0
    score = (d / scale).sum(axis=1)
    forced = ~np.isfinite(contrib[:, 0, 0]) | ~np.isfinite(contrib[:, 1, 0])
    score[forced] = np.inf
    return np.lexsort((np.arange(len(score)), -score))


def _pair_data(index: _ExactIndex, block: _Block, a_idx: np.ndarray) -> Optional[_PairData]:
    ctx = index.ctx
    i_arr, j_arr = index.i_arr, index.j_arr
    ai = a_idx[i_arr]
    aj = a_idx[j_arr]
    hub_z = np.stack([
        block.z1h[i_arr, j_arr, ai, aj],
        block.z2h[i_arr, j_arr, ai, aj],
        block.z3h[i_arr, j_arr, ai, aj],
    ], axis=1)
    fh = block.feas_h[i_arr, j_arr, ai, aj]
    dir_z = np.stack([
        ctx.direct_z1[i_arr, j_arr],
        ctx.direct_z2[i_arr, j_arr],
        ctx.direct_z3[i_arr, j_arr],
    ], axis=1)
    fd = ctx.direct_feasible[i_arr, j_arr]
    if np.any(~fd & ~fh):
        return None

    P = len(i_arr)
    contrib = np.full((P, 2, 3), np.inf)
    contrib[fd, 0] = dir_z[fd]
    contrib[fh, 1] = hub_z[fh]
    order = _pair_order(contrib)
    contrib = contrib[order]

    hub_arr = np.asarray(block.hubs, dtype=np.intp)
    first = hub_arr[ai][order]
    second = hub_arr[aj][order]
    load_nodes = np.stack([first, np.where(first == second, -1, second)], axis=1)
    load_q = ctx.q[i_arr, j_arr][order]

    best = np.minimum(contrib[:, 0, :], contrib[:, 1, :])
    suffix = np.zeros((P + 1, 3))
    suffix[:P] = best[::-1].cumsum(axis=0)[::-1]
    return _PairData(contrib=contrib, suffix_min=suffix, load_nodes=load_nodes,
                     load_q=load_q, canon_pos=order)


def _bb_routing(pd: _PairData, caps: np.ndarray, fixed: float, main: int,
                eps2: float, eps3: float, incumbent: Optional[tuple],
                lexicographic: bool = True,
                node_limit: Optional[int] = None) -> Optional[tuple[tuple, np.ndarray]]:
    """Exact DFS over per-pair options minimising objective ``main``.

    Emission/penalty bounds are inclusive on 1e-6-rounded values.  Returns
    the best ``((z_main, z1, z2, z3, encoding), choices)`` or None.
    ``incumbent`` primes the bound with a 4-component key prefix from a
    competitor found elsewhere; only strictly better keys are returned.

    Pruning compares the componentwise lower-bound tuple with the best key
    lexicographically: since every leaf key is >= that tuple in lex order,
    a bound tuple already > the best key cannot contain an improvement.
    This also collapses tie plateaus (many routings sharing the same main
    value) that a plain value bound would fully enumerate.

    ``lexicographic=False`` keeps only the main value exact and settles
    ties by first discovery, skipping the full secondary-key hunt; the
    individual-optimum (payoff) solves use this because hunting, say, the
    cheapest among all zero-penalty routings is a hard subproblem whose
    answer the bound grid never uses.

    ``node_limit`` caps the number of search nodes; the result is then the
    best leaf found so far (a valid upper bound, not necessarily optimal),
    which scouting passes use to seed incumbents cheaply.
    """
    P = len(pd.contrib)
    contrib = pd.contrib
    suffix = pd.suffix_min
    loads = np.zeros(len(caps))
    choices = np.zeros(P, dtype=np.int8)
    best: Optional[tuple[tuple, np.ndarray]] = None
    best_prefix: Optional[tuple] = incumbent
    canon = pd.canon_pos

    constrained = math.isfinite(eps2) or math.isfinite(eps3)
    if constrained and not pd.budget:
        pd.budget = _budget_tables(pd.contrib)
    budget = pd.budget

    # greedy option order per pair: main value, cost breaks the frequent
    # main ties (zero-penalty plateaus), so early leaves are near-optimal
    hub_first = (contrib[:, 1, main] < contrib[:, 0, main]) | (
        (contrib[:, 1, main] == contrib[:, 0, main]) & (contrib[:, 1, 0] < contrib[:, 0, 0]))
    opt_order = [(1, 0) if flag else (0, 1) for flag in hub_first]

    def leaf_key(sums: tuple[float, float, float]) -> tuple:
        enc = np.empty(P, dtype=np.int8)
        enc[canon] = choices
        return (sums[main], sums[0], sums[1], sums[2], tuple(int(b) for b in enc))

    def pen_for(tab: tuple, t: int, used_b: float, eps_b: float) -> tuple[float, int]:
        """Fractional repair price for the suffix at t plus the marginal
        candidate index; (inf, k) when no repair fits, (0, -1) when slack."""
        used, cum_save, cum_cost, ratio, _ = tab
        need = used_b + used[t] - eps_b - _ROUND_SLACK
        if need <= 0.0:
            return 0.0, -1
        row = cum_save[t]
        k = int(np.searchsorted(row, need))
        if k >= len(ratio):
            return math.inf, k
        p = cum_cost[t, k - 1] + (need - row[k - 1]) * ratio[k] if k else need * ratio[k]
        # cumsum drift must never push the bound past the true cost
        return (p - 1e-9 if p > 1e-9 else 0.0), k

    pos2 = budget[0][4] if budget else None
    pos3 = budget[1][4] if budget else None
    nodes_left = node_limit if node_limit is not None else (1 << 62)

    def rec(t: int, s0: float, s1: float, s2: float) -> None:
        nonlocal best, best_prefix, nodes_left
        if nodes_left <= 0:
            return
        nodes_left -= 1
        pen = 0.0
        k2 = k3 = -1
        if constrained:
            # budget-priced floors: each objective's suffix floor plus the
            # cheapest fractional repair honoring the other budgets
            p23, _ = pen_for(budget[2], t, s2, eps3)
            if s1 + suffix[t, 1] + p23 > eps2 + _ROUND_SLACK:
                return
            p32, _ = pen_for(budget[3], t, s1, eps2)
            if s2 + suffix[t, 2] + p32 > eps3 + _ROUND_SLACK:
                return
            pen2, k2 = pen_for(budget[0], t, s1, eps2)
            pen3, k3 = pen_for(budget[1], t, s2, eps3)
            pen = pen2 if pen2 >= pen3 else pen3
            if pen == math.inf:
                return
        else:
            if s1 + suffix[t, 1] > eps2 + _ROUND_SLACK:
                return
            if s2 + suffix[t, 2] > eps3 + _ROUND_SLACK:
                return
        sums = (s0, s1, s2)
        if best_prefix is not None:
            if not lexicographic:
                bm = sums[main] + suffix[t, main] + (pen if main == 0 else 0.0)
                if bm >= best_prefix[0]:
                    return
            else:
                b1 = s0 + suffix[t, 0] + pen
                bound = (b1 if main == 0 else sums[main] + suffix[t, main], b1,
                         s1 + suffix[t, 1], s2 + suffix[t, 2])
                if bound > best_prefix:
                    return
        if t == P:
            # bounds are inclusive on the rounded objective values
            if round6(s1) > eps2 or round6(s2) > eps3:
                return
            key = leaf_key(sums)
            if best is None or key < best[0]:
                best = (key, choices.copy())
                best_prefix = key[:4]
            return
        opts = contrib[t]
        order_t = opt_order[t]
        if (k2 >= 0 and pos2[t] <= k2) or (k3 >= 0 and pos3[t] <= k3):
            # the fractional repair flips this pair, so follow it first:
            # the dive then lands near the relaxation's optimum
            order_t = (order_t[1], order_t[0])
        for opt in order_t:
            c0 = opts[opt, 0]
            if not math.isfinite(c0):
                continue
            if opt == 1:
                a, b = pd.load_nodes[t]
                q = pd.load_q[t]
                loads[a] += q
                ok = loads[a] <= caps[a] + FEAS_TOL
                if b >= 0:
                    loads[b] += q
                    ok = ok and loads[b] <= caps[b] + FEAS_TOL
                if ok:
                    choices[t] = 1
                    rec(t + 1, s0 + c0, s1 + opts[1, 1], s2 + opts[1, 2])
                loads[a] -= q
                if b >= 0:
                    loads[b] -= q
            else:
                choices[t] = 0
                rec(t + 1, s0 + c0, s1 + opts[0, 1], s2 + opts[0, 2])

    rec(0, fixed, 0.0, 0.0)
    return best


def _mask_from_choices(index: _ExactIndex, pd: _PairData, choices: np.ndarray) -> np.ndarray:
    n = index.ctx.inst.n
    mask = np.zeros((n, n), dtype=bool)
    flat = np.empty(len(choices), dtype=np.int8)
    flat[pd.canon_pos] = choices
    mask[index.i_arr, index.j_arr] = flat.astype(bool)
    return mask


def _design_of(index: _ExactIndex, block: _Block, a_idx: np.ndarray) -> NetworkDesign:
    hub_arr = np.asarray(block.hubs, dtype=np.intp)
    assignment = hub_arr[a_idx]
    return NetworkDesign.from_hubs(index.ctx.inst.n, block.hubs, assignment)


def _solve_min(index: _ExactIndex, main: int, eps2: float, eps3: float,
               incumbent_value: float = math.inf, lexicographic: bool = True,
               bound_v: Optional[np.ndarray] = None) -> Optional[EvaluatedSolution]:
    """Global minimum of objective ``main`` under the bounds.

    ``incumbent_value`` is an upper bound (a 1e-6 multiple from an already
    known feasible solution); returns None when nothing at least ties it,
    in which case the caller's incumbent solution is already optimal.
    ``bound_v`` replaces the stock per-config bound on ``main`` with a
    sharper one (e.g. budget-conditioned) for ordering and cutoff.

    Budget-constrained solves run two passes: a scouting pass of
    node-limited searches whose best leaf seeds the incumbent, then the
    full proofs, which close quickly once primed.  Without the scout a
    single config with a weak bound can burn minutes proving optimality
    from nothing.
    """
    if bound_v is None:
        bound_v = index.lb[main]
        order_v = index.orders[main]
    else:
        order_v = np.argsort(bound_v, kind="stable")
    best_key: Optional[tuple] = None
    best_payload = None

    def scan(node_limit: Optional[int]) -> None:
        nonlocal best_key, best_payload
        examined = 0
        for g in order_v:
            g = int(g)
            lbm = bound_v[g]
            # a config whose bound already matches the best value can only
            # tie; the first achiever in bound order is the winner
            cap = incumbent_value if best_key is None else min(incumbent_value, best_key[0])
            if not math.isfinite(lbm) or lbm >= cap:
                break
            if index.lb[1, g] > eps2 + _ROUND_SLACK or index.lb[2, g] > eps3 + _ROUND_SLACK:
                continue
            if node_limit is not None:
                examined += 1
                if examined > 64:
                    break
            block, a_idx, pd = index.pair_data(g)
            if pd is None:
                continue
            prime = best_key[:4] if best_key is not None else (
                (incumbent_value, math.inf, math.inf, math.inf)
                if math.isfinite(incumbent_value) else None)
            res = _bb_routing(pd, index.ctx.inst.capacity, block.fixed_total, main,
                              eps2, eps3, prime, lexicographic, node_limit)
            if res is None:
                continue
            key, choices = res
            if best_key is None or key < best_key:
                best_key = key
                best_payload = (block, a_idx, pd, choices)

    if math.isfinite(eps2) or math.isfinite(eps3):
        scan(node_limit=4000)
    scan(node_limit=None)
    if best_payload is None:
        return None
    block, a_idx, pd, choices = best_payload
    design = _design_of(index, block, a_idx)
    mask = _mask_from_choices(index, pd, choices)
    plan = plan_from_mask(design, mask)
    return solution_from_plan(index.ctx.inst, design, plan, index.ctx.alpha_prime)


def solve_routing(inst: ProblemInstance, design: NetworkDesign,
                  eps2: float = math.inf, eps3: float = math.inf,
                  alpha_prime: float = 0.5) -> Optional[RoutePlan]:
    """Minimum-cost routing for one fixed design under inclusive bounds.

    Exact branch-and-bound over per-pair route choices; bounds hold for
    emissions (eps2) and time penalty (eps3), hub capacities and per-pair
    time caps always.  Returns None when no routing satisfies everything.
    """
    ctx = make_context(inst, alpha_prime)
    tables = hub_tables(ctx, np.asarray(design.assignment, dtype=np.intp))
    i_arr, j_arr = np.where(ctx.offdiag)

    contrib = np.full((len(i_arr), 2, 3), np.inf)
    fd = ctx.direct_feasible[i_arr, j_arr]
    fh = tables.hub_feasible[i_arr, j_arr]
    if np.any(~fd & ~fh):
        return None
    dir_z = np.stack([m[i_arr, j_arr] for m in (ctx.direct_z1, ctx.direct_z2, ctx.direct_z3)], axis=1)
    hub_z = np.stack([m[i_arr, j_arr] for m in (tables.hub_z1, tables.hub_z2, tables.hub_z3)], axis=1)
    contrib[fd, 0] = dir_z[fd]
    contrib[fh, 1] = hub_z[fh]
    order = _pair_order(contrib)
    contrib = contrib[order]

    a = np.asarray(design.assignment, dtype=np.intp)
    first = a[i_arr][order]
    second = a[j_arr][order]
    load_nodes = np.stack([first, np.where(first == second, -1, second)], axis=1)
    load_q = ctx.q[i_arr, j_arr][order]
    best = np.minimum(contrib[:, 0, :], contrib[:, 1, :])
    suffix = np.zeros((len(i_arr) + 1, 3))
    suffix[:len(i_arr)] = best[::-1].cumsum(axis=0)[::-1]
    pd = _PairData(contrib=contrib, suffix_min=suffix, load_nodes=load_nodes,
                   load_q=load_q, canon_pos=order)
    fixed = float(inst.fixed_cost[list(design.hubs)].sum())
    res = _bb_routing(pd, inst.capacity, fixed, 0, eps2, eps3, None)
    if res is None:
        return None
    _, choices = res
    n = inst.n
    mask = np.zeros((n, n), dtype=bool)
    flat = np.empty(len(choices), dtype=np.int8)
    flat[pd.canon_pos] = choices
    mask[i_arr, j_arr] = flat.astype(bool)
    return plan_from_mask(design, mask)


def epsilon_constraint_front(inst: ProblemInstance, grid: EpsilonGrid = EpsilonGrid(),
                             alpha_prime: float = 0.5,
                             budget: int = DEFAULT_BUDGET) -> ParetoFront:
    """Exact Pareto front approximation via the epsilon-constraint scheme.

    Five steps: enumerate configurations; find each objective's individual
    optimum (payoff rows); span the secondary ranges with the grid's
    inclusive bounds; solve the cost minimum per cell; filter dominated and
    duplicate cell optima.
    """
    index = _build_index(inst, alpha_prime, budget)
    if not index.blocks or index.total == 0:
        return ParetoFront(solutions=())

    payoff: list[EvaluatedSolution] = []
    for main in range(3):
        # secondary objectives only need their optimum VALUE here (the
        # ranges), so their solves skip the lexicographic tie-break hunt
        res = _solve_min(index, main, math.inf, math.inf,
                         lexicographic=(main == 0))
        if res is None:
            return ParetoFront(solutions=())
        payoff.append(res)
    rows = np.array([s.objectives.as_tuple() for s in payoff])
    range2 = (float(rows[:, 1].min()), float(rows[:, 1].max()))
    range3 = (float(rows[:, 2].min()), float(rows[:, 2].max()))

    # cell winners seed later cells: any pooled solution inside a cell's
    # bounds primes the search with a proven-feasible cost
    pool: list[EvaluatedSolution] = list(payoff)
    candidates: list[EvaluatedSolution] = []
    for eps2, eps3 in grid.cells(range2, range3):
        inc_val = math.inf
        inc_sol: Optional[EvaluatedSolution] = None
        for s in pool:
            z = s.objectives
            if z.z2 <= eps2 and z.z3 <= eps3 and z.z1 < inc_val:
                inc_val = z.z1
                inc_sol = s
        clb = _conditional_lb(index, eps2, eps3)
        res = _solve_min(index, 0, eps2, eps3, incumbent_value=inc_val, bound_v=clb)
        winner = res if res is not None else inc_sol
        if winner is not None:
            candidates.append(winner)
            pool.append(winner)
    return ParetoFront.from_candidates(candidates)


# --- exhaustive oracle ------------------------------------------------------


def _oracle_config_states(index: _ExactIndex, block: _Block, a_idx: np.ndarray
                          ) -> Optional[tuple[np.ndarray, list[int]]]:
    """All nondominated (objectives, route-choice bitmask) states of a config.

    Walks pairs in canonical order, branching into every feasible route and
    pruning only states that are dominated in objectives (and in hub loads
    whenever capacity could bind), which preserves the exact front.
    """
    ctx = index.ctx
    inst = ctx.inst
    i_arr, j_arr = index.i_arr, index.j_arr
    ai = a_idx[i_arr]
    aj = a_idx[j_arr]
    hub_z = np.stack([
        block.z1h[i_arr, j_arr, ai, aj],
        block.z2h[i_arr, j_arr, ai, aj],
        block.z3h[i_arr, j_arr, ai, aj],
    ], axis=1)
    fh = block.feas_h[i_arr, j_arr, ai, aj]
    dir_z = np.stack([
        ctx.direct_z1[i_arr, j_arr],
        ctx.direct_z2[i_arr, j_arr],
        ctx.direct_z3[i_arr, j_arr],
    ], axis=1)
    fd = ctx.direct_feasible[i_arr, j_arr]
    if np.any(~fd & ~fh):
        return None

    hub_arr = np.asarray(block.hubs, dtype=np.intp)
    h = len(hub_arr)
    q_pairs = ctx.q[i_arr, j_arr]
    # worst-case per-hub load decides whether loads must join the dominance test
    worst = np.zeros(h)
    for x in range(h):
        touches = (ai == x) | (aj == x)
        worst[x] = q_pairs[touches & fh].sum()
    caps = inst.capacity[hub_arr]
    track_loads = bool(np.any(worst > caps + FEAS_TOL))

    objs = np.array([[block.fixed_total, 0.0, 0.0]])
    masks = [0]
    loads = np.zeros((1, h)) if track_loads else None

    P = len(i_arr)
    for t in range(P):
        parts_objs = []
        parts_masks: list[list[int]] = []
        parts_loads = []
        if fd[t]:
            parts_objs.append(objs + dir_z[t])
            parts_masks.append(masks)
            if track_loads:
                parts_loads.append(loads)
        if fh[t]:
            parts_objs.append(objs + hub_z[t])
            bit = 1 << t
            parts_masks.append([mk | bit for mk in masks])
            if track_loads:
                delta = np.zeros(h)
                delta[ai[t]] += q_pairs[t]
                if aj[t] != ai[t]:
                    delta[aj[t]] += q_pairs[t]
                parts_loads.append(loads + delta)
        objs = np.concatenate(parts_objs, axis=0)
        masks = [mk for part in parts_masks for mk in part]
        if track_loads:
            loads = np.concatenate(parts_loads, axis=0)
            ok = np.all(loads <= caps + FEAS_TOL, axis=1)
            if not ok.all():
                objs = objs[ok]
                loads = loads[ok]
                masks = [mk for mk, k in zip(masks, ok) if k]
            if len(objs) == 0:
                return None
            criteria = np.concatenate([objs, loads], axis=1)
        else:
            criteria = objs
        keep = nondominated_mask(criteria)
        objs = objs[keep]
        masks = [mk for mk, k in zip(masks, keep) if k]
        if track_loads:
            loads = loads[keep]
    return objs, masks


def brute_force_oracle(inst: ProblemInstance, alpha_prime: float = 0.5) -> ParetoFront:
    """Ground-truth Pareto front by exhausting designs and route combinations.

    Guarded to tiny instances (n <= 6); every configuration from
    ``enumerate_configurations`` is expanded into all feasible per-pair
    route combinations.
    """
    if inst.n > ORACLE_MAX_NODES:
        raise ValueError(
            f"oracle is limited to n <= {ORACLE_MAX_NODES} nodes, got n={inst.n}")
    index = _build_index(inst, alpha_prime, budget=DEFAULT_BUDGET)
    all_rows = []
    all_refs: list[tuple[_Block, np.ndarray, int]] = []
    for b, block in enumerate(index.blocks):
        for local in range(block.n_configs):
            a_idx = _assignment_chunk(block, local, local + 1)[0]
            states = _oracle_config_states(index, block, a_idx)
            if states is None:
                continue
            objs, masks = states
            all_rows.append(objs)
            all_refs.extend((block, a_idx, mk) for mk in masks)
    if not all_refs:
        return ParetoFront(solutions=())
    rows = np.concatenate(all_rows, axis=0)
    keep = nondominated_mask(np.round(rows, 6))
    candidates = []
    for flag, (block, a_idx, mk) in zip(keep, all_refs):
        if not flag:
            continue
        design = _design_of(index, block, a_idx)
        n = inst.n
        mask = np.zeros((n, n), dtype=bool)
        bits = np.array([(mk >> t) & 1 for t in range(len(index.i_arr))], dtype=bool)
        mask[index.i_arr, index.j_arr] = bits
        plan = plan_from_mask(design, mask)
        candidates.append(solution_from_plan(inst, design, plan, alpha_prime))
    return ParetoFront.from_candidates(candidates)
