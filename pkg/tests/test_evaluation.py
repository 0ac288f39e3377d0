"""Objective oracles with hand-derived totals on the 3-node instance.

Derivations for the all-hub plan under hubs={1}, assignment=(1,1,1):

  cost    per pair (beta=0.8, u1=1): (0,1) 81*40, (1,0) 81*45,
          (1,2) 121*55, (2,1) 121*48, (0,2) 201*50, (2,0) 201*52;
          sum 39850, +400 fixed = 40250
  z2      lto sum 4, rate sum 2.5, phi=50 so m=1 except q=55,52 -> 2:
          258+258+766+383+633+1266 = 3564
  z3      hub times 10,10,15,15,25,25 against [12,22] at 1.2/1.3:
          2.4+2.4+0+0+3.9+3.9 = 12.6
"""

import dataclasses
import itertools

import numpy as np
import pytest

from conftest import make_instance
from hubnet.evaluation import (
    aircraft_count,
    compute_objectives,
    eval_cost,
    eval_emissions,
    eval_time_penalty,
    evaluate,
    evaluate_mask,
    hub_tables,
    loads_from_mask,
    make_context,
    mask_from_plan,
    plan_from_mask,
    solution_from_plan,
)
from hubnet.generator import GeneratorSpec, generate
from hubnet.model import (
    Direct,
    NetworkDesign,
    OneHub,
    RoutePlan,
    TwoHub,
    hub_loads,
)
from test_model import all_hub_plan


def test_aircraft_count_boundaries():
    assert aircraft_count(0.0, 50.0) == 0
    assert aircraft_count(49.9, 50.0) == 1
    assert aircraft_count(50.0, 50.0) == 1
    # within snapping tolerance of one aircraft
    assert aircraft_count(50.0 + 4e-8, 50.0) == 1
    assert aircraft_count(50.001, 50.0) == 2
    assert aircraft_count(100.0, 50.0) == 2
    with pytest.raises(ValueError):
        aircraft_count(10.0, 0.0)
    with pytest.raises(ValueError):
        aircraft_count(-1.0, 50.0)


def test_all_hub_plan_totals(tiny):
    design = NetworkDesign.from_hubs(3, [1], [1, 1, 1])
    plan = all_hub_plan(tiny, design)
    assert eval_cost(tiny, design, plan, 0.5) == 40250.0
    assert eval_emissions(tiny, design, plan, 0.5) == 3564.0
    assert eval_time_penalty(tiny, design, plan, 0.5) == 12.6


def test_mixed_plan_totals(tiny):
    # (0,2)/(2,0) go direct: d=200 so z1 swaps 201*q for 200*q,
    # z2 swaps 633-per-aircraft for 504, z3 drops both 3.9 penalties
    design = NetworkDesign.from_hubs(3, [1], [1, 1, 1])
    plan = RoutePlan.from_dict(3, {
        (0, 1): OneHub(1), (1, 0): OneHub(1),
        (1, 2): OneHub(1), (2, 1): OneHub(1),
        (0, 2): Direct(), (2, 0): Direct(),
    })
    assert compute_objectives(tiny, design, plan, 0.5) == (40148.0, 3177.0, 4.8)


def test_two_hub_route_totals(tiny):
    # all pairs direct except (1,2) via TwoHub(0,2):
    #   direct baseline: z1 44350+800, z2 3157, z3 4.8
    #   swap for (1,2): unit cost 182.5 (80+100+2.5), dist 300 legs 3 m=2,
    #   time 30 -> lateness 8*1.3
    design = NetworkDesign.from_hubs(3, [0, 2], [0, 0, 2])
    base = RoutePlan.from_dict(3, {(i, j): Direct() for i, j in tiny.pairs()})
    assert compute_objectives(tiny, design, base, 0.5) == (45150.0, 3157.0, 4.8)

    swapped = RoutePlan.from_dict(3, {
        **{(i, j): Direct() for i, j in tiny.pairs()},
        (1, 2): TwoHub(0, 2),
    })
    assert compute_objectives(tiny, design, swapped, 0.5) == (46937.5, 3923.0, 15.2)


def test_penalty_ignores_demand_rate(tiny):
    design = NetworkDesign.from_hubs(3, [1], [1, 1, 1])
    plan = all_hub_plan(tiny, design)
    vals = {eval_time_penalty(tiny, design, plan, r) for r in (0.0, 0.3, 1.0)}
    assert vals == {12.6}


def test_defuzzified_demand_scales_cost():
    fuzzy = np.zeros((3, 3, 4))
    fuzzy[0, 1] = [30.0, 40.0, 50.0, 60.0]   # interval [35, 55]
    inst = make_instance(3, 2, distance=np.where(np.eye(3), 0.0, 100.0),
                         demand=fuzzy, fixed=0.0, handling=0.0)
    design = NetworkDesign.from_hubs(3, [0], [0, 0, 0])
    plan = RoutePlan.from_dict(3, {(i, j): Direct() for i, j in inst.pairs()})
    assert eval_cost(inst, design, plan, 0.0) == 100.0 * 35.0
    assert eval_cost(inst, design, plan, 1.0) == 100.0 * 55.0
    assert eval_cost(inst, design, plan, 0.5) == 100.0 * 45.0


def test_evaluate_rejects_infeasible(tiny):
    starved = dataclasses.replace(tiny, capacity=np.array([0.0, 10.0, 0.0]))
    design = NetworkDesign.from_hubs(3, [1], [1, 1, 1])
    plan = all_hub_plan(tiny, design)
    with pytest.raises(ValueError, match="exceeds capacity"):
        evaluate(starved, design, plan, 0.5)
    sol = solution_from_plan(tiny, design, plan, 0.5)
    assert sol.objectives.as_tuple() == (40250.0, 3564.0, 12.6)
    assert sol.alpha_prime == 0.5


def test_mask_path_matches_typed_path():
    # every (instance, assignment, mask) drawn here must price identically
    # through evaluate_mask and through the RoutePlan walk
    rng = np.random.default_rng(7)
    for trial in range(20):
        n = int(rng.integers(3, 7))
        inst = generate(GeneratorSpec(n=n, p=min(3, n - 1), seed=int(rng.integers(1000))))
        rate = float(rng.uniform(0.0, 1.0))
        ctx = make_context(inst, rate)
        hubs = np.sort(rng.choice(n, size=int(rng.integers(1, inst.p + 1)), replace=False))
        assignment = hubs[rng.integers(0, len(hubs), size=n)]
        assignment[hubs] = hubs
        tables = hub_tables(ctx, assignment)
        mask = rng.random((n, n)) < 0.5
        mask &= ctx.offdiag

        design = NetworkDesign.from_hubs(n, hubs, assignment)
        plan = plan_from_mask(design, mask)
        typed = compute_objectives(inst, design, plan, rate)
        arrayed = evaluate_mask(ctx, tables, hubs, mask)
        assert typed == arrayed

        np.testing.assert_allclose(loads_from_mask(ctx, tables, mask),
                                   hub_loads(inst, plan, rate), atol=1e-9)
        assert np.array_equal(mask_from_plan(plan), mask)


def test_plan_mask_roundtrip(tiny):
    design = NetworkDesign.from_hubs(3, [0, 2], [0, 0, 2])
    for bits in itertools.product([False, True], repeat=6):
        mask = np.zeros((3, 3), dtype=bool)
        mask[~np.eye(3, dtype=bool)] = bits
        plan = plan_from_mask(design, mask)
        assert np.array_equal(mask_from_plan(plan), mask)
