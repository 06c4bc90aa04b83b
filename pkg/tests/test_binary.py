import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nashcode import Channel, Codebook, Game, ModelError, check_nash, correct_decode_prob, is_monotonic, tie_structure
from nashcode.binary import (
    appendix_verdict,
    check_sign_monotonicity,
    decompose,
    multilinear,
    multilinear_check,
    q_value,
    verify_binary_theorem,
    z_channel_diagnostic,
)
from nashcode.decoding import DecoderTable, ExplicitTable, FixedOrder, Uniform, Weighted, decoder_from_rule
from nashcode.instances import BINARY_CODEBOOK, circular_table, fixed_order_table, random_instance, sample_binary_games
from nashcode.model import channel_prob

F = Fraction


def test_decomposition(four_code):
    dec = decompose(four_code, 1, "110")
    assert (dec.same, dec.diff, dec.zero_positions, dec.one_positions) == ((0, 2), (1,), (1,), ())
    assert dec.subset_word(set()) == ("1",) and dec.subset_word({1}) == ("0",)
    assert dec.assemble(("1", "0"), ("1",)) == tuple("110")
    assert len(list(dec.subsets())) == 2


def test_q_value_self_is_zero(bsc_game, four_code):
    dec = decompose(four_code, 2, "101")
    for y_S in dec.outputs_on_same():
        for A in dec.subsets():
            assert q_value(bsc_game, four_code, dec, y_S, 2, A) == 0


def test_q_value_tie_at_110(bsc_game, four_code):
    dec = decompose(four_code, 1, "110")
    # y = 110: y_S = (1, 0), y_D = (1,) which flips the codeword bit, so A is empty
    assert dec.assemble(("1", "0"), dec.subset_word(set())) == tuple("110")
    assert q_value(bsc_game, four_code, dec, ("1", "0"), 2, frozenset()) == 0
    assert q_value(bsc_game, four_code, dec, ("1", "0"), 0, frozenset()) > 0


def test_q_value_needs_binary(ternary):
    with pytest.raises(ModelError):
        q_value(ternary, Codebook.of("0", "1"), None, (), 0, ())


def test_sign_monotonicity_binary_example(bsc_game, four_code):
    assert check_sign_monotonicity(bsc_game, four_code, 1, "110")
    assert check_sign_monotonicity(bsc_game, four_code, 1, "100")  # D empty
    for i in bsc_game.states:
        for x in itertools.product("01", repeat=3):
            assert check_sign_monotonicity(bsc_game, four_code, i, x)


def test_multilinear_vertices_and_constant():
    h = [F(0), F(1, 3), F(1, 2), F(1)]
    for mask in range(4):
        assert multilinear(h, [F(mask & 1), F(mask >> 1 & 1)]) == h[mask]
    assert multilinear([1] * 8, [F(1, 7), F(2, 5), F(9, 10)]) == 1


def test_multilinear_check_binary_example(bsc_game, four_code):
    table = fixed_order_table(bsc_game)
    i, x = 1, tuple("110")
    dec = decompose(four_code, i, x)
    total_hi = total_lo = F(0)
    for y_S in dec.outputs_on_same():
        r = multilinear_check(bsc_game, four_code, table, i, x, y_S)
        assert r.holds and r.vertex_ok and r.h_monotone and r.identity_ok and r.dominance_ok
        weight = channel_prob(bsc_game.channel, [x[j] for j in dec.same], y_S)
        total_hi += weight * r.f_codeword
        total_lo += weight * r.f_alternative
    assert total_hi == correct_decode_prob(bsc_game, four_code, table, i, four_code[i])
    assert total_lo == correct_decode_prob(bsc_game, four_code, table, i, x)


def test_multilinear_constant_decoder(bsc_game):
    code = Codebook.of("000", "000", "000", "000")
    table = DecoderTable.from_mapping(bsc_game, {}, default=0)
    r = multilinear_check(bsc_game, code, table, 0, "101", ("0",))
    assert r.f_codeword == r.f_alternative == 1


def test_multilinear_rejects_non_monotonic(bsc_game, four_code):
    with pytest.raises(ModelError, match="not monotonic"):
        multilinear_check(bsc_game, four_code, circular_table(bsc_game), 1, "110", ("1", "0"))


def test_appendix_route_binary_example(bsc_game, four_code):
    circ = appendix_verdict(bsc_game, four_code, circular_table(bsc_game))
    assert not circ.is_nash and circ.receiver_side_ok
    assert circ.witness == (1, tuple("110"))
    assert appendix_verdict(bsc_game, four_code, fixed_order_table(bsc_game)).is_nash


def test_sweep_two_states_one_use():
    games = sample_binary_games(2, 1, 3, seed=5)
    rep = verify_binary_theorem(games, [Uniform(), FixedOrder((1, 0)), Weighted((1, 3))])
    assert rep.codebooks == 4 and rep.checks == 36 and rep.all_nash


def test_sweep_finds_circular_counterexample(bsc_game):
    rep = verify_binary_theorem([bsc_game], [ExplicitTable(circular_table(bsc_game))], codebooks=[BINARY_CODEBOOK])
    assert not rep.all_nash
    (ce,) = rep.counterexamples
    assert (ce["state"], ce["alternative"]) == (1, "110")


def test_sweep_independent_of_workers():
    games = sample_binary_games(3, 2, 2, seed=1)
    rules = [Uniform(), FixedOrder((2, 0, 1))]
    a = verify_binary_theorem(games, rules, workers=1, chunk=7)
    b = verify_binary_theorem(games, rules, workers=2, chunk=5)
    assert (a.checks, a.nash, a.counterexamples) == (b.checks, b.nash, b.counterexamples)
    assert a.all_nash


def test_z_channel_diagnostic(four_code):
    def make(eps):
        e0 = F(1, 4)
        return Game(Channel(("0", "1"), ("0", "1"), ((1 - e0, e0), (eps, 1 - eps))), 3, ("1/4",) * 4, (1,) * 4, (1,) * 4)

    out = z_channel_diagnostic(make, four_code, FixedOrder.natural(4))
    assert out["stable"]
    assert len(out["sequence"]) == 6
    assert out["tail_verdict"] is True


def test_z_channel_rejected_by_theorem_harness(four_code):
    ch = Channel(("0", "1"), ("0", "1"), ((F(3, 4), F(1, 4)), (0, 1)))
    game = Game(ch, 3, ("1/4",) * 4, (1,) * 4, (1,) * 4)
    with pytest.raises(ModelError):
        verify_binary_theorem([game], [Uniform()], codebooks=[four_code])


# --- properties ---------------------------------------------------------------

binary = st.builds(
    random_instance,
    seed=st.integers(0, 10**6),
    M=st.integers(1, 4),
    input_symbols=st.just(2),
    output_symbols=st.just(2),
    n=st.integers(1, 4),
    max_denominator=st.integers(3, 30),
    binary=st.just(True),
)


def pick_rule(rnd, M):
    return rnd.choice(
        [Uniform(), FixedOrder(tuple(rnd.sample(range(M), M))), Weighted(tuple(rnd.randint(1, 5) for _ in range(M)))]
    )


@given(binary, st.data())
def test_q_sign_matches_tie_structure(inst, data):
    game, code = inst.game, inst.codebook
    i = data.draw(st.integers(0, game.M - 1))
    x = data.draw(st.tuples(*[st.sampled_from("01")] * game.n))
    dec = decompose(code, i, x)
    ts = tie_structure(game, code)
    for y_S in dec.outputs_on_same():
        for A in dec.subsets():
            y = dec.assemble(y_S, dec.subset_word(A))
            member = all(q_value(game, code, dec, y_S, k, A) >= 0 for k in game.states)
            assert member == (i in ts.tie_set(y))
    assert check_sign_monotonicity(game, code, i, x)


@given(binary, st.randoms(use_true_random=False), st.data())
def test_multilinear_lemmas(inst, rnd, data):
    game, code = inst.game, inst.codebook
    table = decoder_from_rule(tie_structure(game, code), pick_rule(rnd, game.M))
    i = data.draw(st.integers(0, game.M - 1))
    x = data.draw(st.tuples(*[st.sampled_from("01")] * game.n))
    dec = decompose(code, i, x)
    for y_S in dec.outputs_on_same():
        r = multilinear_check(game, code, table, i, x, y_S)
        assert r.holds and r.vertex_ok and r.h_monotone and r.identity_ok and r.dominance_ok


@given(st.integers(1, 4), st.data())
def test_raising_a_coordinate_never_lowers_f(dim, data):
    raw = data.draw(st.lists(st.fractions(0, 1), min_size=1 << dim, max_size=1 << dim))
    # closing upward over subsets gives a monotone h
    h = [max(raw[sub] for sub in range(1 << dim) if sub & mask == sub) for mask in range(1 << dim)]
    z = data.draw(st.lists(st.fractions(0, 1), min_size=dim, max_size=dim))
    t = data.draw(st.integers(0, dim - 1))
    bumped = list(z)
    bumped[t] = data.draw(st.fractions(z[t], 1))
    assert multilinear(h, bumped) >= multilinear(h, z)


@given(binary, st.randoms(use_true_random=False))
def test_appendix_route_agrees_with_enumeration(inst, rnd):
    game, code = inst.game, inst.codebook
    ts = tie_structure(game, code)
    tables = [decoder_from_rule(ts, pick_rule(rnd, game.M))]
    # a best-response table chosen at random per output word; usually not monotonic
    tables.append(DecoderTable.deterministic(ts.outputs, [rnd.choice(sorted(T)) for T in ts.ties], game.M))
    for table in tables:
        assert appendix_verdict(game, code, table).is_nash == check_nash(game, code, table).is_nash


@given(binary, st.data())
def test_degenerate_bit_is_ignored(inst, data):
    game, code = inst.game, inst.codebook
    j = data.draw(st.integers(0, game.n - 1))
    bit = data.draw(st.sampled_from("01"))
    code = Codebook(tuple(w[:j] + (bit,) + w[j + 1 :] for w in code.words))
    table = decoder_from_rule(tie_structure(game, code), FixedOrder.natural(game.M))
    flip = "1" if bit == "0" else "0"
    for i in game.states:
        w = code[i]
        flipped = w[:j] + (flip,) + w[j + 1 :]
        assert correct_decode_prob(game, code, table, i, flipped) == correct_decode_prob(game, code, table, i, w)


@given(binary, st.randoms(use_true_random=False))
def test_monotonic_binary_codes_are_nash(inst, rnd):
    game, code = inst.game, inst.codebook
    rule = pick_rule(rnd, game.M)
    table = decoder_from_rule(tie_structure(game, code), rule)
    assert is_monotonic(table, tie_structure(game, code))
    assert check_nash(game, code, table).is_nash
