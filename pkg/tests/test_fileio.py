import json

import numpy as np
import pytest

from hubnet.evaluation import evaluate, solution_from_plan
from hubnet.exact import EpsilonGrid, epsilon_constraint_front
from hubnet.fileio import (
    FRONT_COLUMNS,
    INSTANCE_SCHEMA,
    load_instance,
    parse_route,
    read_front_csv,
    render_route,
    save_instance,
    solution_from_row,
    write_csv,
    write_front_csv,
    write_metrics_csv,
)
from hubnet.generator import GeneratorSpec, generate
from hubnet.model import Direct, NetworkDesign, OneHub, RoutePlan, TwoHub

from test_model import all_hub_plan


def test_instance_roundtrip(tmp_path, gen5):
    path = tmp_path / "inst.json"
    save_instance(gen5, path)
    back = load_instance(path)
    assert back.n == gen5.n and back.p == gen5.p
    for name in ("omega", "alpha_discount", "beta_discount", "aircraft_capacity",
                 "lto_p1", "lto_p2", "ccd_rate_p1", "ccd_rate_p2"):
        assert getattr(back, name) == getattr(gen5, name)
    for name in ("fixed_cost", "capacity", "handling_cost", "distance",
                 "travel_time", "max_transfer_time", "unit_transport_cost",
                 "demand", "early_penalty", "late_penalty",
                 "window_lower", "window_upper"):
        assert np.array_equal(getattr(back, name), getattr(gen5, name)), name


def test_instance_writer_is_deterministic(tmp_path, gen5):
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    save_instance(gen5, p1)
    save_instance(gen5, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_load_rejects_wrong_schema(tmp_path, gen5):
    path = tmp_path / "inst.json"
    save_instance(gen5, path)
    doc = json.loads(path.read_text())
    doc["schema"] = "something-else/9"
    path.write_text(json.dumps(doc))
    with pytest.raises(ValueError, match="schema"):
        load_instance(path)


def test_route_tokens_roundtrip():
    for route in (Direct(), OneHub(5), TwoHub(1, 5)):
        assert parse_route(render_route(route)) == route
    assert render_route(TwoHub(0, 12)) == "k0->k12"
    for bad in ("x3", "k1->x2", "", "direct", "k"):
        with pytest.raises(ValueError):
            parse_route(bad)


def test_front_csv_roundtrip(tmp_path, tiny):
    front = epsilon_constraint_front(tiny, EpsilonGrid(3, 3))
    assert len(front) >= 1
    path = tmp_path / "front.csv"
    write_front_csv(front, path)

    rows = read_front_csv(path)
    assert len(rows) == len(front)
    for row, sol in zip(rows, front):
        assert (row.z1, row.z2, row.z3) == sol.objectives.as_tuple()
        assert row.hubs == sol.design.hubs
        assert row.assignment == sol.design.assignment
        rebuilt = solution_from_row(tiny, row)
        assert rebuilt.plan == sol.plan
        z = evaluate(tiny, rebuilt.design, rebuilt.plan, rebuilt.alpha_prime)
        assert z.as_tuple() == sol.objectives.as_tuple()

    # identical front, identical bytes
    path2 = tmp_path / "front2.csv"
    write_front_csv(front, path2)
    assert path.read_bytes() == path2.read_bytes()


def test_front_csv_missing_column(tmp_path):
    path = tmp_path / "broken.csv"
    path.write_text("z1,z2,z3\n1.0,2.0,3.0\n")
    with pytest.raises(ValueError, match="missing columns"):
        read_front_csv(path)


def test_solution_from_row_checks_token_count(tmp_path, tiny):
    design = NetworkDesign.from_hubs(3, [1], [1, 1, 1])
    sol = solution_from_plan(tiny, design, all_hub_plan(tiny, design), 0.5)
    path = tmp_path / "front.csv"
    write_front_csv([sol], path)
    row = read_front_csv(path)[0]
    truncated = row.__class__(**{**row.__dict__, "routes": row.routes[:-1]})
    with pytest.raises(ValueError, match="route tokens"):
        solution_from_row(tiny, truncated)


def test_write_csv_float_repr(tmp_path):
    path = tmp_path / "t.csv"
    write_csv(path, ("a", "b"), [[0.1, "x"], [2, 1.25]])
    assert path.read_text() == "a,b\n0.1,x\n2,1.25\n"


def test_write_metrics_csv(tmp_path):
    from hubnet.analysis import FrontMetrics
    path = tmp_path / "m.csv"
    write_metrics_csv(FrontMetrics(npf=3, msi=1.5, sm=0.25, cpt=0.125), path)
    assert path.read_text() == "npf,msi,sm,cpt\n3,1.5,0.25,0.125\n"
