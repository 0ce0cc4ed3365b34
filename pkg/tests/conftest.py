"""
Shared sources, cost functions and config files
"""
import json

import pytest

from overflow_core.costs import CostFunction, solve_cost_capacity
from overflow_core.sources import IIDSource, MarkovSource, MixtureSource


@pytest.fixture
def bern_quarter():
    return IIDSource([0.75, 0.25])


@pytest.fixture
def bern_half():
    return IIDSource([0.5, 0.5])


@pytest.fixture
def mixture():
    return MixtureSource([(0.3, IIDSource([0.9, 0.1])), (0.7, IIDSource([0.6, 0.4]))])


@pytest.fixture
def markov():
    return MarkovSource([0.5, 0.5], [[0.9, 0.1], [0.2, 0.8]])


@pytest.fixture
def unit_costs():
    return CostFunction.unit(2)


@pytest.fixture
def golden_costs():
    return CostFunction.memoryless([1, 2])


@pytest.fixture
def conditional_costs():
    return CostFunction(K=2, depth=1, table={(): [1, 2], (0,): [1, 2], (1,): [2, 1]})


@pytest.fixture
def unit_capacity(unit_costs):
    return solve_cost_capacity(unit_costs)


@pytest.fixture
def golden_capacity(golden_costs):
    return solve_cost_capacity(golden_costs)


@pytest.fixture
def write_config(tmp_path):
    """Write an experiment config to a JSON file and return its path."""

    def _write(data, name="experiment.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return str(path)

    return _write
