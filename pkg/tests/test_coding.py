import io
import math
from fractions import Fraction

import numpy as np
import pytest

from overflow_core.coding import (
    CodebookEncoder,
    IntervalEncoder,
    build_encoder,
    certify_cost_bound,
    channel_distribution,
    corrupt_codebook,
    cost_bound,
    decode,
    encode,
    export_codebook,
    fixed_length_codebook,
    is_prefix_free,
    kraft_sum,
    pack_symbols,
    unpack_symbols,
)
from overflow_core.costs import CostCapacity, CostFunction, solve_cost_capacity
from overflow_core.errors import (
    CostBoundViolationError,
    DecodeFailureError,
    InvalidInputError,
    UnencodableInputError,
)
from overflow_core.sources import IIDSource, MarkovSource


def test_complete_binary_code_for_fair_coin(bern_half, unit_costs, unit_capacity):
    enc = build_encoder(bern_half, 1, unit_costs, unit_capacity)
    book = enc.codebook()
    assert book[(0,)].symbols == (0,)
    assert book[(1,)].symbols == (1,)
    assert all(w.cost <= 3 for w in book.values())
    assert kraft_sum(enc) == 1.0


def test_fair_coin_pairs_get_two_symbols(bern_half, unit_costs, unit_capacity):
    enc = build_encoder(bern_half, 2, unit_costs, unit_capacity)
    assert sorted(w.symbols for w in enc.codebook().values()) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert kraft_sum(enc) == 1.0


def test_degenerate_source_uses_cheapest_symbol(golden_costs, golden_capacity):
    enc = build_encoder(IIDSource([0, 1]), 3, golden_costs, golden_capacity)
    assert encode(enc, (1, 1, 1)).symbols == (0,)
    assert decode(enc, (0,)) == (1, 1, 1)
    with pytest.raises(UnencodableInputError):
        encode(enc, (0, 1, 1))


def test_encode_is_deterministic(bern_quarter, golden_costs, golden_capacity):
    first = build_encoder(bern_quarter, 5, golden_costs, golden_capacity)
    second = build_encoder(bern_quarter, 5, golden_costs, golden_capacity)
    assert first.codebook() == second.codebook()
    assert encode(first, (1, 0, 0, 1, 0)) == encode(first, (1, 0, 0, 1, 0))


@pytest.mark.parametrize("n", range(1, 11))
def test_exhaustive_soundness(n, bern_quarter, golden_costs, golden_capacity):
    enc = build_encoder(bern_quarter, n, golden_costs, golden_capacity)
    book = enc.codebook()
    assert len(book) == 2 ** n
    assert is_prefix_free(w.symbols for w in book.values())
    assert 0 < kraft_sum(enc) <= 1.0
    for x, w in book.items():
        assert decode(enc, w) == x
    report = certify_cost_bound(enc)
    assert report.passed
    assert report.checked == 2 ** n
    assert report.max_slack <= cost_bound(golden_capacity.alpha_c, 2, 2) + 1e-9
    assert enc.near_ties == 0


def test_conditional_costs_are_sound(markov, conditional_costs):
    capacity = solve_cost_capacity(conditional_costs)
    enc = build_encoder(markov, 6, conditional_costs, capacity)
    assert is_prefix_free(w.symbols for w in enc.codebook().values())
    assert kraft_sum(enc) <= 1.0
    assert certify_cost_bound(enc).passed


def test_ternary_code_alphabet():
    cost_fn = CostFunction.memoryless([1, 2, 3])
    capacity = solve_cost_capacity(cost_fn)
    enc = build_encoder(IIDSource([0.5, 0.3, 0.2]), 3, cost_fn, capacity)
    assert is_prefix_free(w.symbols for w in enc.codebook().values())
    assert kraft_sum(enc) <= 1.0
    assert certify_cost_bound(enc).passed


def test_cost_bound_constants():
    assert cost_bound(1.0, 1.0, 2) == pytest.approx(2.0)
    assert cost_bound(0.694242, 2.0, 2) == pytest.approx(3.440, abs=1e-3)


def test_channel_rows_sum_to_one(conditional_costs, unit_costs, unit_capacity):
    assert channel_distribution(unit_costs, unit_capacity.alpha_c)[()] == (Fraction(1, 2), Fraction(1, 2))
    capacity = solve_cost_capacity(conditional_costs)
    for row in channel_distribution(conditional_costs, capacity.alpha_c).values():
        assert sum(row) == 1
        assert all(q > 0 for q in row)


def test_capacity_below_the_root_is_rejected(bern_quarter, golden_costs):
    low = CostCapacity(alpha_c=0.5, per_context_roots={(): 0.5}, tolerance=1e-12)
    with pytest.raises(InvalidInputError):
        IntervalEncoder(bern_quarter, 2, golden_costs, low)


def test_streaming_matches_materialized(markov, golden_costs, golden_capacity):
    full = build_encoder(markov, 6, golden_costs, golden_capacity, mode="materialized")
    lazy = build_encoder(markov, 6, golden_costs, golden_capacity, mode="streaming")
    assert not lazy.materialized
    for x, w in full.codebook().items():
        assert lazy.encode(x) == w
        assert lazy.decode(w) == x


def test_streaming_encoder_refuses_codebook(bern_quarter, golden_costs, golden_capacity):
    lazy = build_encoder(bern_quarter, 40, golden_costs, golden_capacity, budget=2 ** 10)
    assert not lazy.materialized
    with pytest.raises(InvalidInputError):
        lazy.codebook()


def test_streaming_long_blocks_round_trip(bern_quarter, golden_costs, golden_capacity):
    lazy = build_encoder(bern_quarter, 64, golden_costs, golden_capacity, mode="streaming")
    blocks = [tuple(int(s) for s in bern_quarter.sample(64, seed)) for seed in range(5)]
    for x in blocks:
        w = lazy.encode(x)
        slack = w.cost + bern_quarter.log_probability(x, base=2) / golden_capacity.alpha_c
        assert slack <= cost_bound(golden_capacity.alpha_c, 2, 2) + 1e-9
    assert lazy.decode_stream(lazy.encode_stream(blocks)) == blocks


def test_decode_stream_round_trip(mixture, golden_costs, golden_capacity):
    enc = build_encoder(mixture, 4, golden_costs, golden_capacity)
    rng = np.random.default_rng(3)
    blocks = [tuple(int(s) for s in row) for row in rng.integers(0, 2, size=(20, 4))]
    stream = enc.encode_stream(blocks)
    assert enc.decode_stream(stream) == blocks
    decoded, used = enc.decode_prefix(stream + [0], 20)
    assert decoded == blocks
    assert used == len(stream)


def test_decode_rejects_unknown_codewords(bern_half, unit_costs, unit_capacity):
    enc = build_encoder(bern_half, 2, unit_costs, unit_capacity)
    with pytest.raises(DecodeFailureError):
        decode(enc, (0,))
    with pytest.raises(DecodeFailureError):
        decode(enc, ())
    with pytest.raises(DecodeFailureError):
        enc.decode_stream([0, 1, 1])


def test_encode_checks_block_length(bern_quarter, golden_costs, golden_capacity):
    enc = build_encoder(bern_quarter, 3, golden_costs, golden_capacity)
    with pytest.raises(InvalidInputError):
        encode(enc, (0, 1))


def test_unknown_mode(bern_quarter, golden_costs, golden_capacity):
    with pytest.raises(InvalidInputError):
        build_encoder(bern_quarter, 3, golden_costs, golden_capacity, mode="lazy")


def test_unit_cost_codeword_cost_is_length(bern_quarter, unit_costs, unit_capacity):
    enc = build_encoder(bern_quarter, 8, unit_costs, unit_capacity)
    assert all(w.cost == len(w) for w in enc.codebook().values())


def test_is_prefix_free():
    assert is_prefix_free([(0,), (1, 0), (1, 1)])
    assert not is_prefix_free([(0,), (0, 1)])
    assert not is_prefix_free([(1, 0), (1, 0)])


def test_permuted_codebook_keeps_codewords(bern_quarter, golden_costs, golden_capacity):
    enc = build_encoder(bern_quarter, 5, golden_costs, golden_capacity)
    shuffled = corrupt_codebook(enc, "permute", seed=4)
    assert shuffled.label == "permute:4"
    assert sorted(w.symbols for w in shuffled.codebook().values()) == sorted(
        w.symbols for w in enc.codebook().values())
    assert kraft_sum(shuffled) == pytest.approx(kraft_sum(enc))


def test_padded_codebook_breaks_cost_bound(bern_quarter, golden_costs, golden_capacity):
    padded = corrupt_codebook(build_encoder(bern_quarter, 5, golden_costs, golden_capacity), "pad")
    assert is_prefix_free(w.symbols for w in padded.codebook().values())
    assert kraft_sum(padded) <= 1.0
    assert not certify_cost_bound(padded, raise_on_violation=False).passed
    with pytest.raises(CostBoundViolationError):
        certify_cost_bound(padded)


def test_unknown_corruption(bern_quarter, golden_costs, golden_capacity):
    with pytest.raises(InvalidInputError):
        corrupt_codebook(build_encoder(bern_quarter, 2, golden_costs, golden_capacity), "flip")


def test_fixed_length_codebook(bern_quarter, golden_costs, golden_capacity):
    enc = fixed_length_codebook(bern_quarter, 3, golden_costs, golden_capacity)
    assert {len(w) for w in enc.codebook().values()} == {3}
    assert enc.label == "fixed:3"
    assert kraft_sum(enc) <= 1.0 + 1e-12
    assert all(enc.decode(w) == x for x, w in enc.codebook().items())


def test_codebook_encoder_rejects_prefix_collisions(bern_half, unit_costs):
    with pytest.raises(InvalidInputError):
        CodebookEncoder(bern_half, 1, unit_costs, 1.0, {(0,): (0,), (1,): (0, 1)})


def test_export_codebook(bern_half, unit_costs, unit_capacity):
    buffer = io.StringIO()
    count = export_codebook(build_encoder(bern_half, 2, unit_costs, unit_capacity), buffer)
    lines = buffer.getvalue().splitlines()
    assert count == 4
    assert lines[0] == "00 00 2.000000000000"


def test_pack_symbols():
    symbols = (1, 0, 1, 1, 0, 0, 0, 1, 1, 1)
    data = pack_symbols(symbols)
    assert len(data) == 2
    assert unpack_symbols(data, len(symbols)) == symbols
    with pytest.raises(InvalidInputError):
        pack_symbols([0, 2])
    with pytest.raises(DecodeFailureError):
        unpack_symbols(data, 17)


def test_markov_kraft_slack_below_one(golden_costs, golden_capacity):
    src = MarkovSource([0.5, 0.5], [[0.5, 0.5], [0.5, 0.5]])
    enc = build_encoder(src, 4, golden_costs, golden_capacity)
    total = kraft_sum(enc)
    assert 0 < total <= 1.0
    assert math.isfinite(total)
