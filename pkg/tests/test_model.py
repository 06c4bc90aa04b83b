import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nashcode import Channel, Codebook, ModelError, channel_prob, format_rational, make_binary_channel, parse_rational, validate_game
from nashcode.instances import random_instance
from nashcode.model import codebook_violations, ensure_codebook, format_word, parse_word, product_channel


@pytest.mark.parametrize(
    "text, value",
    [("0.85", Fraction(17, 20)), ("1/3", Fraction(1, 3)), ("0.65", Fraction(13, 20)), ("17/20", Fraction(17, 20)), ("2", Fraction(2))],
)
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("text", ["", "abc", "1/0", "0.8.5", "1//2"])
def test_parse_rational_rejects(text):
    with pytest.raises(ValueError):
        parse_rational(text)


def test_format_rational():
    assert format_rational(Fraction(17, 20)) == "17/20"
    assert format_rational(Fraction(4, 2)) == "2"


def test_channel_prob_ternary(ternary):
    assert channel_prob(ternary.channel, "0", "0") == Fraction(17, 20)
    assert channel_prob(ternary.channel, "2", "0") == 0


def test_channel_prob_bsc():
    eps = Fraction(1, 10)
    ch = make_binary_channel(eps, eps)
    assert channel_prob(ch, "100", "110") == eps * (1 - eps) ** 2
    assert channel_prob(ch, "100", "100") == (1 - eps) ** 3


def test_channel_prob_identity():
    ch = Channel.from_rows("abc", "abc", [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    for x in itertools.product("abc", repeat=2):
        assert channel_prob(ch, x, x) == 1


def test_channel_prob_errors():
    ch = make_binary_channel("1/10", "1/10")
    with pytest.raises(ModelError, match="length mismatch"):
        channel_prob(ch, "01", "0")
    with pytest.raises(ModelError, match="unknown input"):
        channel_prob(ch, "2", "0")
    with pytest.raises(ModelError, match="unknown output"):
        channel_prob(ch, "0", "x")


def test_make_binary_channel():
    ch = make_binary_channel("1/10", "1/10")
    assert ch.matrix == ((Fraction(9, 10), Fraction(1, 10)), (Fraction(1, 10), Fraction(9, 10)))
    ch = make_binary_channel("3/4", "1/8")
    assert ch.prob("1", "0") == Fraction(3, 4) and ch.prob("0", "1") == Fraction(1, 8)


@pytest.mark.parametrize(
    "e0, e1, fragment",
    [("1/2", "1/2", "eps0 + eps1 < 1"), ("0", "1/4", "eps0 > 0"), ("1/4", "0", "eps1 > 0"), ("3/4", "1/2", "sum = 5/4")],
)
def test_make_binary_channel_errors(e0, e1, fragment):
    with pytest.raises(ModelError, match=fragment.replace("+", r"\+")):
        make_binary_channel(e0, e1)


def test_channel_rejects_bad_row():
    with pytest.raises(ModelError, match="row 2 sums to 99/100"):
        Channel.from_rows("012", "012", [[1, 0, 0], [0, 1, 0], ["0.5", "0.49", 0]])


def test_validate_game(ternary):
    assert validate_game(ternary) == []
    bad = ternary.replace(priors=("1/2", "1/3"))
    assert validate_game(bad) == ["priors sum to 5/6, not 1"]
    bad = ternary.replace(receiver_util=(8, 0))
    assert validate_game(bad) == ["receiver utility of state 1 is 0, not positive"]


def test_validate_game_reports_everything(ternary):
    bad = ternary.replace(priors=("1/2", "1/3"), sender_util=(0, 8), receiver_util=(8, -1))
    assert len(validate_game(bad)) == 3


def test_codebook_checks(ternary):
    assert codebook_violations(ternary, Codebook.of("0", "2")) == []
    problems = codebook_violations(ternary, Codebook.of("0", "12"))
    assert problems == ["codeword for state 1 has length 2, expected 1"]
    with pytest.raises(ModelError, match="unknown input"):
        ensure_codebook(ternary, Codebook.of("0", "7"))
    # pooling codebooks are legal
    assert codebook_violations(ternary, Codebook.of("0", "0")) == []


def test_word_formatting():
    assert parse_word("010") == ("0", "1", "0")
    assert format_word(("0", "1")) == "01"
    assert format_word(("ab", "c")) == ["ab", "c"]


def test_kernel_matches_channel_prob():
    ch = Channel.from_rows("ab", "xyz", [["1/2", "1/3", "1/6"], ["0", "1/4", "3/4"]])
    kernel = product_channel(ch, 3)
    for x in kernel.inputs:
        for b, y in enumerate(kernel.outputs):
            assert kernel.prob(x, b) == channel_prob(ch, x, y)


# --- properties ---------------------------------------------------------------

instances = st.builds(
    random_instance,
    seed=st.integers(0, 10**6),
    M=st.integers(1, 3),
    input_symbols=st.integers(1, 3),
    output_symbols=st.integers(1, 3),
    n=st.integers(1, 3),
    max_denominator=st.integers(2, 50),
)


@given(instances)
def test_rows_of_product_channel_sum_to_one(inst):
    ch, n = inst.game.channel, inst.game.n
    for x in itertools.product(ch.inputs, repeat=n):
        assert sum(channel_prob(ch, x, y) for y in itertools.product(ch.outputs, repeat=n)) == 1


@given(instances, st.data())
def test_channel_prob_multiplicative(inst, data):
    ch = inst.game.channel
    word = st.lists(st.sampled_from(ch.inputs), min_size=0, max_size=3)
    out = st.lists(st.sampled_from(ch.outputs), min_size=0, max_size=3)
    x, x2 = data.draw(word), data.draw(word)
    y = data.draw(out.filter(lambda w: len(w) == len(x)) if x else st.just([]))
    y2 = data.draw(out.filter(lambda w: len(w) == len(x2)) if x2 else st.just([]))
    assert channel_prob(ch, x + x2, y + y2) == channel_prob(ch, x, y) * channel_prob(ch, x2, y2)


@given(st.fractions(min_value=-1000, max_value=1000))
def test_rational_round_trip(value):
    text = format_rational(value)
    assert parse_rational(text) == value
    assert format_rational(parse_rational(text)) == text


@given(st.integers(0, 10**6), st.integers(0, 10**6 - 1))
def test_decimal_parse_is_exact(whole, frac):
    text = f"{whole}.{frac:06d}"
    assert parse_rational(text) == whole + Fraction(frac, 10**6)
