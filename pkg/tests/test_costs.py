import json
import math
from fractions import Fraction

import pytest

from overflow_core.costs import (
    CostFunction,
    load_cost_function,
    solve_context_capacity,
    solve_cost_capacity,
    string_cost,
)
from overflow_core.costs.capacity import precise_kraft_excess
from overflow_core.errors import CapacityNotUniformError, InvalidInputError
from tests.oracles import GOLDEN_ALPHA


@pytest.mark.parametrize("costs, u, expected", [
    ([1, 1], (0, 1, 1), 3.0),
    ([1, 2], (1, 1, 0), 5.0),
])
def test_string_cost_memoryless(costs, u, expected):
    assert string_cost(CostFunction.memoryless(costs), u) == expected


def test_string_cost_follows_context():
    cost_fn = CostFunction(K=2, depth=1, table={(): [1, 1], (0,): [1, 2], (1,): [2, 1]})
    assert string_cost(cost_fn, (0, 1, 1)) == 4.0
    assert cost_fn.string_cost_exact((1, 0)) == Fraction(3)


def test_string_cost_rejects_bad_strings(golden_costs):
    with pytest.raises(InvalidInputError):
        string_cost(golden_costs, (0, 2))
    with pytest.raises(InvalidInputError):
        string_cost(golden_costs, ())


def test_decimal_costs_are_exact():
    cost_fn = CostFunction.memoryless([0.1, 0.2])
    assert cost_fn.string_cost_exact((0, 0, 0)) == Fraction(3, 10)


@pytest.mark.parametrize("table", [
    {(): [1, 0]},
    {(): [1, -2]},
    {(): [1, 2, 3]},
])
def test_cost_table_validation(table):
    with pytest.raises(InvalidInputError):
        CostFunction(K=2, depth=0, table=table)


def test_cost_table_must_cover_every_context():
    with pytest.raises(InvalidInputError, match="missing contexts"):
        CostFunction(K=2, depth=1, table={(): [1, 1], (0,): [1, 1]})


def test_alphabet_size_at_least_two():
    with pytest.raises(InvalidInputError):
        CostFunction(K=1, depth=0, table={(): [1]})


def test_cheapest_symbol_prefers_lowest_index():
    assert CostFunction.memoryless([2, 1, 1]).cheapest_symbol() == 1
    assert CostFunction.unit(3).cheapest_symbol() == 0


def test_mapping_round_trip(conditional_costs):
    rebuilt = CostFunction.from_mapping(conditional_costs.to_mapping())
    assert dict(rebuilt.table) == dict(conditional_costs.table)
    assert rebuilt.c_max == 2.0


def test_load_cost_function_from_file(tmp_path):
    path = tmp_path / "costs.json"
    path.write_text(json.dumps({"K": 2, "depth": 0, "costs": {"": [1, 2]}}), encoding="utf-8")
    cost_fn = load_cost_function(path)
    assert cost_fn.K == 2
    assert cost_fn.costs_for(()) == (Fraction(1), Fraction(2))


def test_from_mapping_rejects_non_digit_context():
    with pytest.raises(InvalidInputError):
        CostFunction.from_mapping({"K": 2, "depth": 1, "costs": {"": [1, 1], "a": [1, 1], "1": [1, 1]}})


@pytest.mark.parametrize("cost_fn, expected", [
    (CostFunction.unit(2), 1.0),
    (CostFunction.unit(3), 1.0),
    (CostFunction.memoryless([1, 2]), GOLDEN_ALPHA),
])
def test_solve_context_capacity(cost_fn, expected):
    assert solve_context_capacity(cost_fn) == pytest.approx(expected, abs=1e-9)


def test_unit_cost_capacity_is_exactly_one():
    assert solve_cost_capacity(CostFunction.unit(2)).alpha_c == 1.0


def test_equal_costs_scale_capacity():
    assert solve_context_capacity(CostFunction.memoryless([2, 2])) == 0.5


@pytest.mark.parametrize("costs, scale", [
    ([1, 2], 3),
    ([1, 2], 0.5),
    ([1, 3, 4], 2.5),
    ([0.7, 1.1], 4),
])
def test_scaled_costs_scale_capacity_inversely(costs, scale):
    base = solve_context_capacity(CostFunction.memoryless(costs))
    scaled = solve_context_capacity(CostFunction.memoryless([c * scale for c in costs]))
    assert scaled == pytest.approx(base / scale, rel=1e-9)


@pytest.mark.parametrize("u, v", [
    ((0,), (1,)),
    ((2, 1, 0), (0, 0)),
    ((1, 1, 2, 2), (2, 0, 1)),
])
def test_memoryless_cost_is_additive(u, v):
    cost_fn = CostFunction.memoryless([1, 2.5, 0.3])
    assert cost_fn.string_cost_exact(u + v) == cost_fn.string_cost_exact(u) + cost_fn.string_cost_exact(v)
    assert string_cost(cost_fn, u + v) == pytest.approx(string_cost(cost_fn, u) + string_cost(cost_fn, v))


def test_golden_capacity_sits_on_the_feasible_side(golden_capacity):
    assert abs(golden_capacity.alpha_c - GOLDEN_ALPHA) < 1e-9
    assert precise_kraft_excess(2, golden_capacity.alpha_c, (Fraction(1), Fraction(2))) <= 1e-40


def test_uniform_conditional_capacity(conditional_costs):
    capacity = solve_cost_capacity(conditional_costs)
    assert capacity.alpha_c == pytest.approx(GOLDEN_ALPHA, abs=1e-9)
    assert set(capacity.per_context_roots) == {(), (0,), (1,)}


def test_all_unit_conditional_capacity():
    cost_fn = CostFunction(K=2, depth=1, table={(): [1, 1], (0,): [1, 1], (1,): [1, 1]})
    assert solve_cost_capacity(cost_fn).alpha_c == 1.0


def test_non_uniform_capacity_names_offending_context():
    cost_fn = CostFunction(K=2, depth=1, table={(): [1, 1], (0,): [1, 1], (1,): [1, 2]})
    with pytest.raises(CapacityNotUniformError) as info:
        solve_cost_capacity(cost_fn)
    assert info.value.offending == [(1,)]
    assert info.value.roots[(0,)] == 1.0
    assert info.value.roots[(1,)] == pytest.approx(GOLDEN_ALPHA, abs=1e-9)


def test_capacity_residuals_are_tiny(golden_capacity):
    assert all(math.isfinite(r) and abs(r) < 1e-9 for r in golden_capacity.residuals.values())
