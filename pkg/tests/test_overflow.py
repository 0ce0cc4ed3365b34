import math
from fractions import Fraction

import numpy as np
import pytest

from overflow_core.coding import build_encoder, corrupt_codebook, fixed_length_codebook
from overflow_core.costs import CostFunction, solve_cost_capacity
from overflow_core.errors import BoundViolationError, InvalidInputError
from overflow_core.overflow import (
    REPORT_COLUMNS,
    ThresholdSchedule,
    ZRule,
    evaluate_point,
    first_order_overflow,
    lemma1_rhs,
    lemma1_tight_rhs,
    lemma2_rhs,
    lemma2_value,
    overflow_exact,
    overflow_length_exact,
    overflow_mass,
    overflow_mc,
    raise_on_violation,
    reports_to_frame,
    second_order_overflow,
    verify_bounds,
)
from overflow_core.sources import IIDSource, MarkovSource, MixtureSource
from overflow_core.spectrum import gaussian_quantile
from tests.oracles import H_QUARTER, SIGMA2_QUARTER

SUITE_SOURCES = {
    "bernoulli": lambda: IIDSource([0.75, 0.25]),
    "ternary": lambda: IIDSource([0.5, 0.3, 0.2]),
    "markov": lambda: MarkovSource([0.5, 0.5], [[0.9, 0.1], [0.2, 0.8]]),
    "mixture": lambda: MixtureSource([(0.3, IIDSource([0.9, 0.1])), (0.7, IIDSource([0.6, 0.4]))]),
}
SUITE_COSTS = {
    "unit": lambda: CostFunction.unit(2),
    "golden": lambda: CostFunction.memoryless([1, 2]),
    "conditional": lambda: CostFunction(K=2, depth=1, table={(): [1, 2], (0,): [1, 2], (1,): [2, 1]}),
}
SUITE_Z = (0.001, 0.01, 0.1, 0.3)


def _suite_points():
    for source_name in SUITE_SOURCES:
        lengths = (1, 3, 5) if source_name == "ternary" else (2, 5, 8)
        for cost_name in SUITE_COSTS:
            for n in lengths:
                yield source_name, cost_name, n


def _suite_codes(src, cost_fn, capacity, n):
    code = build_encoder(src, n, cost_fn, capacity, mode="materialized")
    return [
        code,
        corrupt_codebook(code, "permute", seed=n),
        corrupt_codebook(code, "pad", seed=n),
        fixed_length_codebook(src, n, cost_fn, capacity),
    ]


def _thresholds(code):
    """Cost quantiles of the code plus an even grid one unit past either end."""
    costs = [w.cost for w in code.codebook().values()]
    etas = set(np.linspace(max(min(costs) - 1, 0.25), max(costs) + 1, 6).tolist())
    for q in np.quantile(costs, [0.0, 0.25, 0.5, 0.75, 1.0]):
        etas.add(float(q))
        etas.add(max(float(q) - 0.5, 0.25))
    return sorted(etas)


@pytest.mark.parametrize("source_name, cost_name, n", list(_suite_points()))
def test_converse_holds_for_every_prefix_code(source_name, cost_name, n):
    src = SUITE_SOURCES[source_name]()
    cost_fn = SUITE_COSTS[cost_name]()
    capacity = solve_cost_capacity(cost_fn)
    for code in _suite_codes(src, cost_fn, capacity, n):
        checked = 0
        for eta in _thresholds(code):
            measured = overflow_mass(code, src, eta)
            for z in SUITE_Z:
                bound = lemma2_value(src, eta, z, capacity.alpha_c, n, cost_fn.K)
                assert bound.mass.exact
                assert measured >= bound.mass.value - Fraction(z), (code, eta, z)
                checked += 1
        assert checked >= 20


@pytest.mark.parametrize("source_name, cost_name, n", list(_suite_points()))
def test_achievability_holds_for_the_interval_code(source_name, cost_name, n):
    src = SUITE_SOURCES[source_name]()
    cost_fn = SUITE_COSTS[cost_name]()
    capacity = solve_cost_capacity(cost_fn)
    code = build_encoder(src, n, cost_fn, capacity, mode="materialized")
    z = ZRule("direct", gamma=0.1).z(n, cost_fn.K)
    for eta in _thresholds(code):
        report = evaluate_point(code, src, capacity, eta, z)
        assert report.pass1, report
        assert report.pass2, report


def test_overflow_exact_limits(bern_quarter, golden_costs, golden_capacity):
    code = build_encoder(bern_quarter, 6, golden_costs, golden_capacity)
    costs = [w.cost for w in code.codebook().values()]
    assert overflow_exact(code, bern_quarter, max(costs)) == 0.0
    assert overflow_exact(code, bern_quarter, min(costs) - 0.5) == pytest.approx(1.0)


def test_overflow_exact_degenerate_source(golden_costs, golden_capacity):
    src = IIDSource([0, 1])
    code = build_encoder(src, 3, golden_costs, golden_capacity)
    assert overflow_exact(code, src, 0.5) == 1.0
    assert overflow_exact(code, src, 1.0) == 0.0


def test_overflow_exact_fair_coin(bern_half, unit_costs, unit_capacity):
    code = build_encoder(bern_half, 2, unit_costs, unit_capacity)
    assert overflow_exact(code, bern_half, 2) == 0.0
    assert overflow_exact(code, bern_half, 1.5) == 1.0


def test_overflow_is_non_increasing(markov, conditional_costs):
    capacity = solve_cost_capacity(conditional_costs)
    code = build_encoder(markov, 8, conditional_costs, capacity)
    values = [overflow_mass(code, markov, eta) for eta in np.arange(0.5, 20, 0.5)]
    assert all(a >= b for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("n", range(1, 11))
def test_unit_cost_overflow_is_length_overflow(n, bern_quarter, unit_costs, unit_capacity):
    code = build_encoder(bern_quarter, n, unit_costs, unit_capacity)
    for eta in np.arange(0.5, 2 * n + 4, 0.5):
        assert overflow_exact(code, bern_quarter, eta) == overflow_length_exact(code, bern_quarter, eta)


def test_overflow_mc_agrees_with_exact(bern_quarter, golden_costs, golden_capacity):
    code = build_encoder(bern_quarter, 8, golden_costs, golden_capacity)
    eta = float(np.median([w.cost for w in code.codebook().values()]))
    exact = overflow_exact(code, bern_quarter, eta)
    estimate = overflow_mc(code, bern_quarter, eta, trials=100_000, seed=11)
    assert abs(estimate.estimate - exact) <= 4 * math.sqrt(exact * (1 - exact) / 100_000)
    assert estimate.ci95 == pytest.approx(1.96 * math.sqrt(estimate.estimate * (1 - estimate.estimate) / 100_000))


def test_overflow_mc_huge_threshold(bern_quarter, golden_costs, golden_capacity):
    code = build_encoder(bern_quarter, 6, golden_costs, golden_capacity)
    assert overflow_mc(code, bern_quarter, 1e6, trials=1000, seed=0).estimate == 0.0


def test_overflow_mc_is_reproducible(mixture, golden_costs, golden_capacity):
    code = build_encoder(mixture, 8, golden_costs, golden_capacity)
    first = overflow_mc(code, mixture, 9.0, trials=5000, seed=42)
    second = overflow_mc(code, mixture, 9.0, trials=5000, seed=42)
    assert first == second


def test_overflow_mc_streaming_matches_materialized(bern_quarter, golden_costs, golden_capacity):
    full = build_encoder(bern_quarter, 10, golden_costs, golden_capacity, mode="materialized")
    lazy = build_encoder(bern_quarter, 10, golden_costs, golden_capacity, mode="streaming")
    assert overflow_mc(lazy, bern_quarter, 12.0, 300, 5) == overflow_mc(full, bern_quarter, 12.0, 300, 5)


def test_overflow_mc_needs_trials(bern_quarter, golden_costs, golden_capacity):
    code = build_encoder(bern_quarter, 4, golden_costs, golden_capacity)
    with pytest.raises(InvalidInputError):
        overflow_mc(code, bern_quarter, 3.0, trials=0, seed=0)


def test_exact_overflow_needs_codebook(bern_quarter, golden_costs, golden_capacity):
    lazy = build_encoder(bern_quarter, 4, golden_costs, golden_capacity, mode="streaming")
    with pytest.raises(InvalidInputError):
        overflow_exact(lazy, bern_quarter, 3.0)


def test_converse_value_on_fair_coin(bern_half):
    assert lemma2_rhs(bern_half, 2.0, 0.1, 1.0, 4) == pytest.approx(-0.1)


def test_converse_is_not_clamped(bern_half):
    assert lemma2_rhs(bern_half, 1.0, 2.0, 1.0, 4) < 0


def test_converse_from_type_classes(bern_half):
    # P = 2^-2000 sits exactly on z 2^-eta
    assert lemma2_rhs(bern_half, 1999.0, 0.5, 1.0, 2000) == pytest.approx(0.5)


def test_achievability_penalty_only(bern_quarter):
    assert lemma1_rhs(bern_quarter, 100.0, 1.0, 1.0, 1.0, 4) == pytest.approx(4.0)


def test_achievability_small_z_takes_whole_mass(bern_half):
    assert lemma1_rhs(bern_half, 1.0, 1e-6, 1.0, 1.0, 4) == pytest.approx(1.0 + 4e-6)


def test_achievability_large_z_is_vacuous(bern_quarter):
    assert lemma1_rhs(bern_quarter, 3.0, 10.0, 1.0, 1.0, 4) > 1


def test_tight_penalty_is_smaller(bern_quarter):
    alpha = solve_cost_capacity(CostFunction.memoryless([1, 2, 2])).alpha_c
    loose = lemma1_rhs(bern_quarter, 3.0, 0.01, alpha, 2.0, 4, K=3)
    tight = lemma1_tight_rhs(bern_quarter, 3.0, 0.01, alpha, 2.0, 4, K=3)
    assert tight < loose


@pytest.mark.parametrize("z", [0.0, -1.0, math.inf])
def test_bounds_reject_bad_z(bern_quarter, z):
    with pytest.raises(InvalidInputError):
        lemma1_rhs(bern_quarter, 3.0, z, 1.0, 1.0, 4)
    with pytest.raises(InvalidInputError):
        lemma2_rhs(bern_quarter, 3.0, z, 1.0, 4)


def test_threshold_schedules():
    assert ThresholdSchedule.first_order(0.5).eta(8) == 4.0
    assert ThresholdSchedule.second_order(1.0, 0.5).eta(16) == 18.0
    assert ThresholdSchedule.explicit([4, 8], [3.0, 5.0]).eta(8) == 5.0
    with pytest.raises(InvalidInputError):
        ThresholdSchedule.explicit([4], [3.0]).eta(8)
    with pytest.raises(InvalidInputError):
        ThresholdSchedule.first_order(-1.0).eta(4)
    with pytest.raises(InvalidInputError):
        ThresholdSchedule(kind="second", a=1.0)


def test_z_rules():
    assert ZRule("direct", gamma=0.1).z(16, 2) == pytest.approx(2 ** -0.4)
    assert ZRule("converse", gamma=0.1).z(16, 2) == pytest.approx(2 ** -1.6)
    assert ZRule("constant", value=0.25).z(7, 2) == 0.25
    with pytest.raises(InvalidInputError):
        ZRule("constant", value=0.0)
    with pytest.raises(InvalidInputError):
        ZRule("random")


def test_verify_bounds_default_suite(bern_quarter, golden_costs, golden_capacity):
    rate = H_QUARTER / golden_capacity.alpha_c
    reports = verify_bounds(
        bern_quarter, golden_costs, golden_capacity,
        schedule=[ThresholdSchedule.first_order(rate), ThresholdSchedule.second_order(rate, 0.5)],
        n_list=[12, 4, 8],
        z_rule=[ZRule("direct"), ZRule("converse")],
    )
    assert len(reports) == 12
    assert all(r.passed for r in reports)
    assert [r.n for r in reports] == sorted(r.n for r in reports)
    assert all(r.max_slack <= r.slack_bound for r in reports)
    raise_on_violation(reports)


def test_verify_bounds_is_thread_count_independent(mixture, golden_costs, golden_capacity):
    kwargs = dict(schedule=ThresholdSchedule.first_order(1.2), n_list=[3, 6, 9], z_rule=ZRule("direct"))
    serial = verify_bounds(mixture, golden_costs, golden_capacity, workers=1, **kwargs)
    threaded = verify_bounds(mixture, golden_costs, golden_capacity, workers=3, **kwargs)
    assert serial == threaded


def test_converse_near_one_far_below_the_rate(bern_quarter, golden_costs, golden_capacity):
    reports = verify_bounds(bern_quarter, golden_costs, golden_capacity,
                            schedule=ThresholdSchedule.first_order(0.2), n_list=[12],
                            z_rule=ZRule("converse", gamma=0.1))
    z = 2 ** -1.2
    assert reports[0].lemma2_rhs == pytest.approx(1 - z)
    assert reports[0].measured == 1.0


def test_no_overflow_far_above_the_rate(bern_quarter, golden_costs, golden_capacity):
    reports = verify_bounds(bern_quarter, golden_costs, golden_capacity,
                            schedule=ThresholdSchedule.first_order(4.0), n_list=[12])
    assert reports[0].measured == 0.0
    assert reports[0].passed


def test_padded_codes_fail_only_the_certificate(bern_quarter, golden_costs, golden_capacity):
    reports = verify_bounds(bern_quarter, golden_costs, golden_capacity,
                            schedule=ThresholdSchedule.first_order(1.2), n_list=[4, 8],
                            z_rule=[ZRule("direct"), ZRule("converse")], corrupt="pad")
    assert all(r.pass2 for r in reports)
    assert not any(r.cost_bound_ok for r in reports)
    assert all(r.code.startswith("pad:") for r in reports)
    with pytest.raises(BoundViolationError) as info:
        raise_on_violation(reports)
    assert len(info.value.rows) == len(reports)


def test_permuted_codes_keep_the_converse(markov, golden_costs, golden_capacity):
    reports = verify_bounds(markov, golden_costs, golden_capacity,
                            schedule=ThresholdSchedule.first_order(0.8), n_list=[6, 10],
                            z_rule=[ZRule("converse"), ZRule("constant", value=0.05)], corrupt="permute")
    assert all(r.pass2 for r in reports)


def test_verify_bounds_monte_carlo(bern_quarter, golden_costs, golden_capacity):
    reports = verify_bounds(bern_quarter, golden_costs, golden_capacity,
                            schedule=ThresholdSchedule.first_order(1.2), n_list=[10], method="mc",
                            trials=20_000, seed=3)
    assert reports[0].method == "mc"
    assert reports[0].ci95 > 0
    assert reports[0].passed


def test_verify_bounds_validates_inputs(bern_quarter, golden_costs, golden_capacity):
    with pytest.raises(InvalidInputError):
        verify_bounds(bern_quarter, golden_costs, golden_capacity, ThresholdSchedule.first_order(1.0), [4],
                      method="fast")
    with pytest.raises(InvalidInputError):
        verify_bounds(bern_quarter, golden_costs, golden_capacity, ThresholdSchedule.first_order(1.0), [0])


def test_report_frame_columns(bern_quarter, golden_costs, golden_capacity):
    reports = verify_bounds(bern_quarter, golden_costs, golden_capacity,
                            schedule=ThresholdSchedule.first_order(1.2), n_list=[4])
    frame = reports_to_frame(reports)
    assert list(frame.columns[:len(REPORT_COLUMNS)]) == REPORT_COLUMNS
    assert len(frame) == 1


@pytest.mark.parametrize("method", ["exact", "mc"])
def test_first_order_overflow_around_the_rate(method, bern_quarter, golden_capacity):
    alpha = golden_capacity.alpha_c
    above = first_order_overflow(bern_quarter, alpha, 2.0, (H_QUARTER + 0.05) / alpha, 4096, 2, method,
                                 trials=100_000, seed=0)
    below = first_order_overflow(bern_quarter, alpha, 2.0, (H_QUARTER - 0.05) / alpha, 4096, 2, method,
                                 trials=100_000, seed=1)
    assert above.lower <= above.upper <= 0.02
    assert below.upper >= below.lower >= 0.98


@pytest.mark.parametrize("costs", [[1, 1], [1, 2]])
@pytest.mark.parametrize("epsilon", [0.1, 0.5])
def test_second_order_overflow_matches_epsilon(costs, epsilon, bern_quarter):
    cost_fn = CostFunction.memoryless(costs)
    alpha = solve_cost_capacity(cost_fn).alpha_c
    a = H_QUARTER / alpha
    L = math.sqrt(SIGMA2_QUARTER) * gaussian_quantile(1 - epsilon) / alpha
    bracket = second_order_overflow(bern_quarter, alpha, cost_fn.c_max, a, L, 10_000, 2)
    assert abs(bracket.lower - epsilon) <= 0.05
    assert abs(bracket.upper - epsilon) <= 0.05
