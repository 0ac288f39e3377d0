"""Pareto dominance utilities and the front container.

All comparisons are minimisation over (z1, z2, z3) triples that were
rounded to 1e-6 at construction, so dominance is an exact float
comparison.  ``ParetoFront.from_candidates`` is deterministic regardless
of candidate order: it sorts by a full solution key before deduplicating
and filtering.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .model import Direct, EvaluatedSolution, OneHub, Route, TwoHub

__all__ = [
    "dominates",
    "nondominated_mask",
    "nondominated_sort",
    "crowding_distance",
    "ParetoFront",
    "route_code",
    "solution_sort_key",
]


def _triple(obj) -> tuple[float, float, float]:
    if hasattr(obj, "as_tuple"):
        return obj.as_tuple()
    t = tuple(float(v) for v in obj)
    if len(t) != 3:
        raise ValueError(f"expected a 3-component objective, got {obj!r}")
    return t


def dominates(a, b) -> bool:
    """True if ``a`` is no worse than ``b`` everywhere and better somewhere."""
    ta, tb = _triple(a), _triple(b)
    return all(x <= y for x, y in zip(ta, tb)) and any(x < y for x, y in zip(ta, tb))


def _staircase_filter_3d(rows: np.ndarray) -> np.ndarray:
    """Boolean keep-mask of nondominated rows among (S, 3) minimisation rows.

    Duplicates of a kept row are dropped.  Sweep in lexicographic order;
    a sorted staircase over (z2, z3) answers the dominance query in
    O(log S) per row.
    """
    order = np.lexsort((rows[:, 2], rows[:, 1], rows[:, 0]))
    keep = np.zeros(len(rows), dtype=bool)
    stair_z2: list[float] = []   # ascending
    stair_z3: list[float] = []   # strictly descending alongside
    prev = None
    for idx in order:
        z1, z2, z3 = rows[idx]
        if prev is not None and prev == (z1, z2, z3):
            continue
        prev = (z1, z2, z3)
        pos = bisect.bisect_right(stair_z2, z2)
        if pos > 0 and stair_z3[pos - 1] <= z3:
            continue  # dominated (weakly, and not identical because of dedupe)
        keep[idx] = True
        # insert (z2, z3); drop staircase entries it renders redundant
        while pos < len(stair_z2) and stair_z3[pos] >= z3:
            del stair_z2[pos]
            del stair_z3[pos]
        stair_z2.insert(pos, z2)
        stair_z3.insert(pos, z3)
    return keep


def _pairwise_filter(rows: np.ndarray) -> np.ndarray:
    """General-dimension nondominated keep-mask (duplicates collapse to one)."""
    order = np.lexsort(rows.T[::-1])
    rows = rows[order]
    s = len(rows)
    keep_sorted = np.ones(s, dtype=bool)
    for i in range(s):
        if not keep_sorted[i]:
            continue
        r = rows[i]
        later = rows[i + 1:]
        if len(later) == 0:
            break
        dominated = np.all(later >= r, axis=1) & np.any(later > r, axis=1)
        duplicate = np.all(later == r, axis=1)
        keep_sorted[i + 1:] &= ~(dominated | duplicate)
    keep = np.zeros(s, dtype=bool)
    keep[order] = keep_sorted
    return keep


def nondominated_mask(rows: np.ndarray) -> np.ndarray:
    """Keep-mask of nondominated minimisation rows; one survivor per duplicate set.

    For duplicated rows the survivor is the first in lexicographic row
    order, which callers exploit for deterministic representatives.
    """
    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2:
        raise ValueError(f"expected a 2-D row array, got shape {rows.shape}")
    if len(rows) <= 1:
        return np.ones(len(rows), dtype=bool)
    if rows.shape[1] == 3:
        return _staircase_filter_3d(rows)
    return _pairwise_filter(rows)


def nondominated_sort(objectives: Sequence) -> list[list[int]]:
    """Fast nondominated sorting into fronts of indices (rank 0 first).

    Accepts any sequence of 3-component objectives; nonfinite components
    are legal and sink to the worst fronts (any finite vector dominates
    the all-infinite penalty vector).
    """
    rows = np.array([_triple(o) for o in objectives], dtype=float)
    s = len(rows)
    if s == 0:
        return []
    a = rows[:, None, :]
    b = rows[None, :, :]
    with np.errstate(invalid="ignore"):
        dom = np.all(a <= b, axis=2) & np.any(a < b, axis=2)
    n_dominators = dom.sum(axis=0)
    fronts: list[list[int]] = []
    remaining = n_dominators.copy()
    assigned = np.zeros(s, dtype=bool)
    while not assigned.all():
        current = np.where(~assigned & (remaining == 0))[0]
        if len(current) == 0:  # defensive: cannot happen with a strict partial order
            current = np.where(~assigned)[0]
        fronts.append([int(i) for i in current])
        assigned[current] = True
        remaining = remaining - dom[current].sum(axis=0)
    return fronts


def crowding_distance(objectives: Sequence) -> np.ndarray:
    """Crowding distances within one front; boundary members get +inf.

    Objectives with zero (or nonfinite) spread contribute nothing to the
    interior distances.
    """
    rows = np.array([_triple(o) for o in objectives], dtype=float)
    s = len(rows)
    dist = np.zeros(s)
    if s <= 2:
        dist[:] = np.inf
        return dist
    for mcol in range(rows.shape[1]):
        vals = rows[:, mcol]
        order = np.argsort(vals, kind="stable")
        dist[order[0]] = np.inf
        dist[order[-1]] = np.inf
        with np.errstate(invalid="ignore"):   # all-inf penalty columns
            span = vals[order[-1]] - vals[order[0]]
        if span <= 0 or not np.isfinite(span):
            continue
        gaps = (vals[order[2:]] - vals[order[:-2]]) / span
        interior = order[1:-1]
        finite = np.isfinite(dist[interior])
        dist[interior] = np.where(finite, dist[interior] + gaps, dist[interior])
    return dist


def route_code(route: Route) -> int:
    """Canonical per-pair route code used in tie-breaking: Direct first."""
    return 0 if isinstance(route, Direct) else 1


def solution_sort_key(sol: EvaluatedSolution):
    codes = tuple(route_code(r) for _, _, r in sol.plan.items())
    return (sol.objectives.as_tuple(), sol.design.hubs, sol.design.assignment, codes)


@dataclass(frozen=True)
class ParetoFront:
    """Mutually nondominated solutions, sorted by (z1, z2, z3)."""

    solutions: tuple[EvaluatedSolution, ...]

    @classmethod
    def from_candidates(cls, candidates: Iterable[EvaluatedSolution]) -> "ParetoFront":
        """Deduplicate by objective triple, drop dominated, sort. Order-independent."""
        pool = sorted(candidates, key=solution_sort_key)
        unique: list[EvaluatedSolution] = []
        seen: set[tuple[float, float, float]] = set()
        for sol in pool:
            key = sol.objectives.as_tuple()
            if key not in seen:
                seen.add(key)
                unique.append(sol)
        if not unique:
            return cls(solutions=())
        rows = np.array([s.objectives.as_tuple() for s in unique])
        keep = nondominated_mask(rows)
        return cls(solutions=tuple(s for s, k in zip(unique, keep) if k))

    def objective_rows(self) -> np.ndarray:
        return np.array([s.objectives.as_tuple() for s in self.solutions], dtype=float)

    def __len__(self) -> int:
        return len(self.solutions)

    def __iter__(self) -> Iterator[EvaluatedSolution]:
        return iter(self.solutions)
