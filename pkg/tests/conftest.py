"""Shared fixtures: a hand-checkable 3-node instance and small generated ones.

The hand instance keeps every number round so each objective can be
recomputed on paper; the frozen triples used by the evaluation tests are
derived in comments where they are asserted.
"""

import numpy as np
import pytest

from hubnet.generator import GeneratorSpec, generate
from hubnet.model import ProblemInstance

_ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    _ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in _ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


def make_instance(n, p, *, distance, demand, omega=1_000.0, fixed=100.0,
                  capacity=1e9, handling=1.0, transport=1.0, travel_time=None,
                  time_cap=1e9, alpha=0.5, beta=0.8, early=1.2, late=1.3,
                  window_lower=0.0, window_upper=1e9, phi=50.0,
                  lto=(1.0, 3.0), ccd=(2.0, 0.5)) -> ProblemInstance:
    """Compact instance builder: scalars broadcast, diagonals zeroed."""
    def vec(v):
        return np.full(n, float(v)) if np.isscalar(v) else np.asarray(v, dtype=float)

    def mat(v, zero_diag=False):
        m = np.full((n, n), float(v)) if np.isscalar(v) else np.asarray(v, dtype=float).copy()
        if zero_diag:
            np.fill_diagonal(m, 0.0)
        return m

    distance = np.asarray(distance, dtype=float)
    if travel_time is None:
        travel_time = distance / 10.0
    dem = np.asarray(demand, dtype=float)
    if dem.ndim == 2:          # crisp matrix -> degenerate trapezoids
        dem = np.repeat(dem[:, :, None], 4, axis=2)
    dem = dem.copy()
    dem[np.arange(n), np.arange(n), :] = 0.0
    return ProblemInstance(
        n=n, p=p, omega=omega,
        fixed_cost=vec(fixed), capacity=vec(capacity), handling_cost=vec(handling),
        distance=distance, travel_time=mat(travel_time),
        max_transfer_time=mat(time_cap, zero_diag=True),
        unit_transport_cost=mat(transport, zero_diag=True),
        demand=dem, alpha_discount=alpha, beta_discount=beta,
        early_penalty=mat(early), late_penalty=mat(late),
        window_lower=mat(window_lower), window_upper=mat(window_upper),
        aircraft_capacity=phi, lto_p1=lto[0], lto_p2=lto[1],
        ccd_rate_p1=ccd[0], ccd_rate_p2=ccd[1],
    )


# three nodes, all numbers chosen for paper arithmetic:
#   distances 100/150/200, unit transport 1 (so cost-distance = distance),
#   crisp demands 40..55, phi 50 (pair (0,2) needs exactly one aircraft),
#   windows [12, 22] catching the short legs early and the long detours late
TINY_DISTANCE = np.array([
    [0.0, 100.0, 200.0],
    [100.0, 0.0, 150.0],
    [200.0, 150.0, 0.0],
])
TINY_DEMAND = np.array([
    [0.0, 40.0, 50.0],
    [45.0, 0.0, 55.0],
    [52.0, 48.0, 0.0],
])


@pytest.fixture(scope="session")
def tiny():
    return make_instance(
        3, 2,
        distance=TINY_DISTANCE,
        demand=TINY_DEMAND,
        fixed=[300.0, 400.0, 500.0],
        handling=[2.0, 1.0, 0.5],
        window_lower=12.0, window_upper=22.0,
        time_cap=100.0,
    )


@pytest.fixture(scope="session")
def gen5():
    return generate(GeneratorSpec(n=5, p=2, seed=100))


@pytest.fixture(scope="session")
def gen6():
    return generate(GeneratorSpec(n=6, p=3, seed=11))
