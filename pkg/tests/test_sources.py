import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import binom, chisquare

from overflow_core.errors import EnumerationTooLargeError, InvalidInputError
from overflow_core.sources.models import _cumulative, _draw
from overflow_core.sources import (
    IIDSource,
    MarkovSource,
    MixtureSource,
    enumerate_strings,
    load_source_model,
    probability,
    sample,
    self_info_stats,
    self_information_distribution,
    source_from_mapping,
)
from tests.oracles import H_QUARTER, SIGMA2_QUARTER


def test_iid_probability(bern_quarter):
    assert probability(bern_quarter, (1, 1, 0)) == pytest.approx(0.046875)
    assert bern_quarter.probability_exact((1, 1, 0)) == Fraction(3, 64)


def test_mixture_probability(mixture):
    assert mixture.probability_exact((1,)) == Fraction(31, 100)


def test_alternating_markov_probability():
    src = MarkovSource([1, 0], [[0, 1], [1, 0]])
    assert probability(src, (0, 1, 0)) == 1.0
    assert probability(src, (0, 0, 1)) == 0.0


def test_probability_rejects_foreign_symbols(bern_quarter):
    with pytest.raises(InvalidInputError):
        probability(bern_quarter, (0, 2))


@pytest.mark.parametrize("pmf", [[0.5, 0.6], [-0.1, 1.1], []])
def test_invalid_pmf(pmf):
    with pytest.raises(InvalidInputError):
        IIDSource(pmf)


def test_markov_rows_must_be_stochastic():
    with pytest.raises(InvalidInputError):
        MarkovSource([0.5, 0.5], [[0.5, 0.5], [0.7, 0.7]])


def test_mixture_components_share_alphabet():
    with pytest.raises(InvalidInputError):
        MixtureSource([(0.5, IIDSource([0.5, 0.5])), (0.5, IIDSource([0.2, 0.3, 0.5]))])


def test_enumerate_equiprobable(bern_half):
    listed = list(enumerate_strings(bern_half, 2))
    assert [x for x, _ in listed] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert all(p == pytest.approx(0.25) for _, p in listed)


def test_enumerate_single_letter(bern_quarter):
    assert dict(bern_quarter.enumerate(1, exact=True)) == {(0,): Fraction(3, 4), (1,): Fraction(1, 4)}


def test_enumerate_degenerate_mixture():
    src = MixtureSource([(0.5, IIDSource([1, 0])), (0.5, IIDSource([0, 1]))])
    masses = dict(src.enumerate(3, exact=True))
    assert masses[(0, 0, 0)] == Fraction(1, 2)
    assert masses[(1, 1, 1)] == Fraction(1, 2)
    assert sum(masses.values()) == 1
    assert sum(1 for p in masses.values() if p == 0) == 6


@pytest.mark.parametrize("source_name", ["bern_quarter", "markov", "mixture"])
def test_enumeration_sums_to_one(source_name, request):
    src = request.getfixturevalue(source_name)
    assert sum(p for _, p in src.enumerate(8, exact=True)) == 1


def test_enumeration_budget_is_checked_eagerly(bern_quarter):
    with pytest.raises(EnumerationTooLargeError):
        bern_quarter.enumerate(30, budget=2 ** 20)


def test_sample_is_deterministic(markov):
    assert np.array_equal(sample(markov, 50, seed=7), sample(markov, 50, seed=7))


def test_degenerate_sample():
    assert sample(IIDSource([0, 1]), 4, seed=3).tolist() == [1, 1, 1, 1]


def test_sample_rejects_empty_block(bern_quarter):
    with pytest.raises(InvalidInputError):
        sample(bern_quarter, 0, seed=0)


def block_frequency_pvalue(src, n, trials, seed):
    X = src.sample_batch(n, trials, seed=seed)
    K = src.alphabet_size
    codes = X @ (K ** np.arange(n - 1, -1, -1))
    observed = np.bincount(codes, minlength=K ** n)
    expected = np.array([float(p) for _, p in enumerate_strings(src, n)]) * trials
    return chisquare(observed[expected > 0], expected[expected > 0]).pvalue


# fixed seeds, so the goodness-of-fit statistics are reproducible
def test_markov_block_frequencies(markov):
    assert block_frequency_pvalue(markov, 3, 100_000, seed=12345) > 1e-3


def test_iid_block_frequencies(bern_quarter):
    assert block_frequency_pvalue(bern_quarter, 4, 100_000, seed=2024) > 1e-3


def test_ternary_iid_block_frequencies():
    assert block_frequency_pvalue(IIDSource([0.5, 0.3, 0.2]), 3, 100_000, seed=99) > 1e-3


def test_mixture_block_frequencies(mixture):
    assert block_frequency_pvalue(mixture, 4, 100_000, seed=777) > 1e-3


def test_sampler_never_draws_a_trailing_zero_mass_symbol():
    src = IIDSource(["0.6", "0.3", "0.1", "0"])
    cum = _cumulative(src.pmf)
    assert cum[-2:].tolist() == [1.0, 1.0]
    assert _draw(cum, np.array([np.nextafter(1.0, 0.0)]))[0] == 2
    assert src.sample_batch(5, 20_000, seed=5).max() <= 2


def test_self_information_rate_concentrates(bern_quarter):
    n = 10_000
    rates = [-bern_quarter.log_probability(sample(bern_quarter, n, seed), base=2) / n for seed in range(100)]
    assert abs(np.mean(rates) - H_QUARTER) <= 4 * math.sqrt(SIGMA2_QUARTER / n)


def test_cumulative_interval(bern_quarter):
    lower, width = bern_quarter.cumulative_interval((1, 0))
    assert lower == Fraction(3, 4)
    assert width == Fraction(3, 16)


def test_self_info_stats_uniform():
    stats = self_info_stats([0.5, 0.5], 2)
    assert stats.entropy == pytest.approx(1.0)
    assert stats.sigma2 == 0.0


def test_self_info_stats_bernoulli_quarter():
    stats = self_info_stats([0.75, 0.25], 2)
    assert stats.entropy == pytest.approx(H_QUARTER, abs=1e-12)
    assert stats.sigma2 == pytest.approx(SIGMA2_QUARTER, rel=1e-12)


def test_self_info_stats_base_change():
    base2 = self_info_stats([0.75, 0.25], 2)
    base4 = self_info_stats([0.75, 0.25], 4)
    assert base4.entropy == pytest.approx(base2.entropy / 2)
    assert base4.sigma2 == pytest.approx(base2.sigma2 / 4)


def test_entropy_rates(bern_quarter, markov):
    assert bern_quarter.entropy_rate(2) == pytest.approx(H_QUARTER)
    h = lambda p: -p * math.log2(p) - (1 - p) * math.log2(1 - p)
    assert markov.entropy_rate(2) == pytest.approx(2 / 3 * h(0.1) + 1 / 3 * h(0.2))


def test_reducible_chain_has_no_entropy_rate():
    assert MarkovSource([0.5, 0.5], [[1, 0], [0, 1]]).entropy_rate(2) is None


def test_self_information_law_is_binomial(bern_quarter):
    n = 16
    law = self_information_distribution(bern_quarter, n, base=2)
    assert law.masses.sum() == pytest.approx(1.0)
    # -log2 P = (n - k) log2(4/3) + 2k for k ones
    k = np.arange(n + 1)
    atoms = (n - k) * math.log2(4 / 3) + 2 * k
    order = np.argsort(atoms)
    assert np.allclose(law.values, atoms[order])
    assert np.allclose(law.masses, binom.pmf(k, n, 0.25)[order])


def test_self_information_law_of_markov_matches_enumeration(markov):
    law = self_information_distribution(markov, 6, base=2)
    total = sum(p for _, p in markov.enumerate(6) if -math.log2(p) > 5)
    assert law.tail([5.0 + 1e-6])[0] == pytest.approx(total)


def test_source_from_mapping_builds_mixture():
    src = source_from_mapping({
        "type": "mixture",
        "components": [
            {"weight": 0.3, "source": {"type": "iid", "pmf": [0.9, 0.1]}},
            {"weight": 0.7, "source": {"type": "iid", "pmf": [0.6, 0.4]}},
        ],
    })
    assert isinstance(src, MixtureSource)
    assert src.probability_exact((1,)) == Fraction(31, 100)


def test_load_source_model_from_file(tmp_path):
    path = tmp_path / "source.json"
    path.write_text('{"type": "markov", "initial": [1, 0], "transition": [[0, 1], [1, 0]]}', encoding="utf-8")
    src = load_source_model(path)
    assert isinstance(src, MarkovSource)
    assert src.probability((0, 1)) == 1.0
