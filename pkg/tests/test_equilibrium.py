import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nashcode import Channel, Codebook, Game, check_nash, correct_decode_prob, pooling_code, receiver_payoff, sender_payoff, tie_structure
from nashcode.decoding import DecoderTable, FixedOrder, Uniform, Weighted, decoder_from_rule
from nashcode.equilibrium import BudgetExceeded, best_deviation, best_response_value
from nashcode.instances import circular_table, fixed_order_table, random_instance
from nashcode.search import all_codebooks

import oracles

F = Fraction


def table_for(game, code, rule=None):
    return decoder_from_rule(tie_structure(game, code), rule or FixedOrder.natural(game.M))


def test_correct_decode_prob(ternary):
    code = Codebook.of("0", "1")
    d = table_for(ternary, code)
    assert correct_decode_prob(ternary, code, d, 1, "1") == F(9, 10)
    assert correct_decode_prob(ternary, code, d, 1, "2") == 1
    never = DecoderTable.from_mapping(ternary, {}, default=0)
    assert correct_decode_prob(ternary, code, never, 1, "2") == 0


@pytest.mark.parametrize("cb, U, V", [("0,1", "89/20", "43/10"), ("2,0", "22/5", "97/20")])
def test_payoffs(ternary, cb, U, V):
    code = Codebook(tuple(cb.split(",")))
    d = table_for(ternary, code)
    assert sender_payoff(ternary, code, d) == F(U)
    assert receiver_payoff(ternary, code, d) == F(V)
    assert (F(U), F(V)) == oracles.payoffs(ternary, code, d)


def test_non_potential_quadruple(ternary):
    d = DecoderTable.from_mapping(ternary, {"0": 0, "1": 0, "2": 1})
    before, after = Codebook.of("0", "1"), Codebook.of("1", "2")
    assert (sender_payoff(ternary, before, d), sender_payoff(ternary, after, d)) == (F("1.95"), F("3.55"))
    assert (receiver_payoff(ternary, before, d), receiver_payoff(ternary, after, d)) == (F("4.05"), F("3.7"))


@pytest.mark.parametrize(
    "cb, nash, witness",
    [
        ("0,1", False, (1, "2", F(9, 10), F(1))),
        ("1,0", False, (0, "2", F(9, 10), F(1))),
        ("2,1", False, (1, "0", F(1, 10), F(17, 20))),
        ("0,2", True, None),
        ("1,2", True, None),
        ("2,0", True, None),
    ],
)
def test_ternary_verdicts(ternary, cb, nash, witness):
    report = check_nash(ternary, Codebook(tuple(cb.split(","))))
    assert report.is_nash is nash
    assert report.receiver_side_ok
    if witness is None:
        assert report.witness is None
    else:
        w = report.witness
        assert (w.state, "".join(w.alternative), w.current_prob, w.deviation_prob) == witness


def test_worked_deviation_payoff(ternary):
    w = check_nash(ternary, Codebook.of("0", "1")).witness
    assert ternary.sender_util[1] * w.current_prob == F("7.2")
    assert ternary.sender_util[1] * w.deviation_prob == 8


def test_binary_verdicts(bsc_game, four_code):
    report = check_nash(bsc_game, four_code, circular_table(bsc_game))
    assert not report.is_nash and report.receiver_side_ok
    assert (report.witness.state, report.witness.alternative) == (1, tuple("110"))
    assert check_nash(bsc_game, four_code, fixed_order_table(bsc_game)).is_nash


def test_non_best_response_table(ternary):
    bad = DecoderTable.from_mapping(ternary, {"0": 1, "1": 1, "2": 1})
    report = check_nash(ternary, Codebook.of("0", "1"), bad)
    assert not report.is_nash and not report.receiver_side_ok
    assert report.receiver_witness == (("0",), 1)


def test_best_deviation(ternary):
    code = Codebook.of("0", "1")
    d = table_for(ternary, code)
    assert best_deviation(ternary, code, d, 1).alternative == ("2",)
    code = Codebook.of("0", "2")
    assert best_deviation(ternary, code, table_for(ternary, code), 0) is None


def test_single_input_symbol():
    ch = Channel.from_rows("a", "xy", [["1/3", "2/3"]])
    game = Game(ch, 2, ("1/2", "1/2"), (1, 1), (1, 2))
    code = Codebook.of("aa", "aa")
    d = table_for(game, code)
    assert all(best_deviation(game, code, d, i) is None for i in game.states)


def test_pooling(ternary):
    code, d = pooling_code(ternary)
    assert code == Codebook.of("0", "0")
    assert all(d.prob(y, 0) == 1 for y in "012")
    assert check_nash(ternary, code, d).is_nash


def test_pooling_ties_and_one_state(ternary):
    uniform = ternary.replace(sender_util=(1, 1), receiver_util=(1, 1))
    code, d = pooling_code(uniform)
    assert all(d.prob(y, 0) == 1 for y in "012")
    single = ternary.replace(priors=(1,), sender_util=(1,), receiver_util=(1,))
    code, d = pooling_code(single)
    assert check_nash(single, code, d).is_nash


def test_budget(bsc_game, four_code, monkeypatch):
    with pytest.raises(BudgetExceeded):
        check_nash(bsc_game, four_code, budget=4)
    monkeypatch.setenv("NASHCODE_BUDGET", "4")
    with pytest.raises(BudgetExceeded):
        check_nash(bsc_game, four_code)


# --- properties ---------------------------------------------------------------

small = st.builds(
    random_instance,
    seed=st.integers(0, 10**6),
    M=st.integers(1, 3),
    input_symbols=st.integers(1, 3),
    output_symbols=st.integers(1, 3),
    n=st.integers(1, 2),
    max_denominator=st.integers(2, 10),
)


def rules_for(M, rnd):
    return [
        Uniform(),
        FixedOrder(tuple(rnd.sample(range(M), M))),
        Weighted(tuple(F(rnd.randint(1, 9), rnd.randint(1, 9)) for _ in range(M))),
    ]


@given(small, st.randoms(use_true_random=False))
def test_check_nash_matches_oracle(inst, rnd):
    game, code = inst.game, inst.codebook
    for rule in rules_for(game.M, rnd):
        d = table_for(game, code, rule)
        report = check_nash(game, code, d)
        assert report.is_nash == oracles.is_nash(game, code, d)
        assert (report.sender_payoff, report.receiver_payoff) == oracles.payoffs(game, code, d)


@given(small, st.randoms(use_true_random=False))
def test_receiver_payoff_same_for_all_best_responses(inst, rnd):
    game, code = inst.game, inst.codebook
    values = {receiver_payoff(game, code, table_for(game, code, r)) for r in rules_for(game.M, rnd)}
    assert values == {best_response_value(game, code)} == {oracles.best_response_value(game, code)}


@given(small, st.fractions(min_value=F(1, 100), max_value=100).filter(bool), st.sampled_from(["priors", "sender_util", "receiver_util"]))
def test_scale_invariance(inst, factor, field):
    game, code = inst.game, inst.codebook
    scaled = game.replace(**{field: tuple(v * factor for v in getattr(game, field))})
    assert tie_structure(game, code) == tie_structure(scaled, code)
    a, b = check_nash(game, code), check_nash(scaled, code)
    assert a.is_nash == b.is_nash
    assert (a.witness is None) == (b.witness is None)
    if a.witness is not None:
        assert (a.witness.state, a.witness.alternative) == (b.witness.state, b.witness.alternative)


@given(small, st.data())
def test_single_codeword_potential(inst, data):
    game, code = inst.game, inst.codebook
    d = table_for(game, code, data.draw(st.sampled_from([Uniform(), FixedOrder.natural(game.M)])))
    i = data.draw(st.sampled_from(list(game.states)))
    x = data.draw(st.tuples(*[st.sampled_from(game.channel.inputs)] * game.n))
    moved = code.with_word(i, x)
    dU = sender_payoff(game, moved, d) - sender_payoff(game, code, d)
    dV = receiver_payoff(game, moved, d) - receiver_payoff(game, code, d)
    assert (dU > 0) - (dU < 0) == (dV > 0) - (dV < 0)


@given(
    st.builds(
        random_instance,
        seed=st.integers(0, 10**6),
        M=st.integers(1, 3),
        input_symbols=st.integers(1, 3),
        output_symbols=st.integers(1, 3),
        n=st.just(1),
        max_denominator=st.integers(2, 10),
    )
)
def test_deviation_decomposition_and_agent_form(inst):
    """Some codebook beats ``c`` against fixed ``d`` iff a single-codeword change does."""
    game, code = inst.game, inst.codebook
    d = table_for(game, code)
    base = sender_payoff(game, code, d)
    any_better = any(sender_payoff(game, c, d) > base for c in all_codebooks(game))
    single_better = any(
        sender_payoff(game, code.with_word(i, x), d) > base
        for i in game.states
        for x in itertools.product(game.channel.inputs, repeat=game.n)
    )
    assert any_better == single_better
    assert check_nash(game, code, d).is_nash == (not single_better)


@given(small)
def test_one_output_symbol_is_always_nash(inst):
    game = inst.game
    ch = Channel(game.channel.inputs, ("z",), tuple((1,) for _ in game.channel.inputs))
    game = game.replace(channel=ch)
    assert check_nash(game, inst.codebook).is_nash
