"""Exact-arithmetic foundation: rationals, channels, games and codebooks.

All probabilities and payoffs are :class:`fractions.Fraction` values. Words
(channel inputs and outputs of length ``n``) are tuples of symbol strings.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

Rat = Fraction
Word = tuple  # tuple[str, ...]
RatLike = Union[str, int, Fraction]


class ModelError(ValueError):
    """Raised when a channel, game or codebook is malformed."""


def parse_rational(text: RatLike) -> Fraction:
    """Parse ``"0.85"``, ``"17/20"`` or an integer into an exact Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, bool):
        raise ValueError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"not a rational: {text!r}")
    s = text.strip()
    try:
        value = Fraction(s)
    except ZeroDivisionError:
        raise ValueError(f"zero denominator in {text!r}") from None
    except ValueError:
        raise ValueError(f"malformed rational {text!r}") from None
    return value


def format_rational(value: Fraction) -> str:
    """Canonical string form: ``"a/b"``, or ``"a"`` for integers."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_word(text: Union[str, Sequence[str]]) -> Word:
    """A word is either a string of single-character symbols or a list of symbols."""
    if isinstance(text, str):
        return tuple(text)
    return tuple(str(s) for s in text)


def format_word(word: Sequence[str]) -> Union[str, list]:
    if all(len(s) == 1 for s in word):
        return "".join(word)
    return list(word)


def word_str(word: Sequence[str]) -> str:
    """Human-readable word, used in messages and tables."""
    out = format_word(word)
    return out if isinstance(out, str) else " ".join(out)


@dataclass(frozen=True)
class Channel:
    """Discrete memoryless channel with exact transition matrix ``p(y|x)``.

    ``matrix[a][b]`` is the probability of output ``outputs[b]`` given
    input ``inputs[a]``. Zero entries are allowed.
    """

    inputs: tuple
    outputs: tuple
    matrix: tuple

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(str(s) for s in self.inputs))
        object.__setattr__(self, "outputs", tuple(str(s) for s in self.outputs))
        object.__setattr__(
            self, "matrix", tuple(tuple(parse_rational(p) for p in row) for row in self.matrix)
        )
        problems = channel_violations(self)
        if problems:
            raise ModelError("; ".join(problems))

    @classmethod
    def from_rows(cls, inputs: Iterable, outputs: Iterable, rows: Iterable[Iterable[RatLike]]) -> "Channel":
        return cls(tuple(inputs), tuple(outputs), tuple(tuple(r) for r in rows))

    def prob(self, y: str, x: str) -> Fraction:
        return self.matrix[self.input_index[x]][self.output_index[y]]

    @property
    def input_index(self) -> dict:
        return _index(self.inputs)

    @property
    def output_index(self) -> dict:
        return _index(self.outputs)

    @property
    def is_binary(self) -> bool:
        return self.inputs == ("0", "1") and self.outputs == ("0", "1")


@lru_cache(maxsize=256)
def _index(symbols: tuple) -> dict:
    return {s: k for k, s in enumerate(symbols)}


def channel_violations(channel: Channel) -> list:
    problems = []
    if not channel.inputs:
        problems.append("channel has no input symbols")
    if not channel.outputs:
        problems.append("channel has no output symbols")
    for name, symbols in (("input", channel.inputs), ("output", channel.outputs)):
        if len(set(symbols)) != len(symbols):
            problems.append(f"duplicate {name} symbols")
    if len(channel.matrix) != len(channel.inputs):
        problems.append(f"matrix has {len(channel.matrix)} rows, expected {len(channel.inputs)}")
    for a, row in enumerate(channel.matrix):
        if len(row) != len(channel.outputs):
            problems.append(f"row {a} has {len(row)} entries, expected {len(channel.outputs)}")
            continue
        for b, p in enumerate(row):
            if p < 0 or p > 1:
                problems.append(f"row {a} entry {b} is {format_rational(p)}, outside [0,1]")
        total = sum(row, Fraction(0))
        if total != 1:
            problems.append(f"row {a} sums to {format_rational(total)}")
    return problems


def make_binary_channel(eps0: RatLike, eps1: RatLike) -> Channel:
    """Binary channel with ``p(1|0) = eps0`` and ``p(0|1) = eps1``.

    Requires ``eps0 > 0``, ``eps1 > 0`` and ``eps0 + eps1 < 1``.
    """
    e0, e1 = parse_rational(eps0), parse_rational(eps1)
    failed = []
    if not e0 > 0:
        failed.append(f"eps0 > 0 fails (eps0 = {format_rational(e0)})")
    if not e1 > 0:
        failed.append(f"eps1 > 0 fails (eps1 = {format_rational(e1)})")
    if not e0 + e1 < 1:
        failed.append(f"eps0 + eps1 < 1 fails (sum = {format_rational(e0 + e1)})")
    if failed:
        raise ModelError("; ".join(failed))
    return Channel(("0", "1"), ("0", "1"), ((1 - e0, e0), (e1, 1 - e1)))


def binary_errors(channel: Channel) -> tuple:
    """Return ``(eps0, eps1)`` of a binary channel."""
    if not channel.is_binary:
        raise ModelError("channel is not binary with symbols 0, 1")
    return channel.matrix[0][1], channel.matrix[1][0]


def channel_prob(channel: Channel, x: Sequence[str], y: Sequence[str]) -> Fraction:
    """Memoryless product probability ``prod_j p(y_j | x_j)``."""
    if len(x) != len(y):
        raise ModelError(f"length mismatch: input has {len(x)} symbols, output {len(y)}")
    xi, yi = channel.input_index, channel.output_index
    p = Fraction(1)
    for a, b in zip(x, y):
        if a not in xi:
            raise ModelError(f"unknown input symbol {a!r}")
        if b not in yi:
            raise ModelError(f"unknown output symbol {b!r}")
        p *= channel.matrix[xi[a]][yi[b]]
    return p


@dataclass(frozen=True)
class Game:
    """Sender-receiver game: channel used ``n`` times, ``M`` states."""

    channel: Channel
    n: int
    priors: tuple
    sender_util: tuple
    receiver_util: tuple

    def __post_init__(self):
        for name in ("priors", "sender_util", "receiver_util"):
            object.__setattr__(self, name, tuple(parse_rational(v) for v in getattr(self, name)))

    @property
    def M(self) -> int:
        return len(self.priors)

    @property
    def states(self) -> range:
        return range(self.M)

    def receiver_weights(self) -> tuple:
        return tuple(q * v for q, v in zip(self.priors, self.receiver_util))

    def integer_receiver_weights(self) -> tuple:
        """``(ints, den)`` with ``q_k V_k == ints[k] / den``; cached."""
        hit = self.__dict__.get("_irw")
        if hit is None:
            hit = integer_weights(self.receiver_weights())
            self.__dict__["_irw"] = hit
        return hit

    def sender_weights(self) -> tuple:
        return tuple(q * u for q, u in zip(self.priors, self.sender_util))

    def replace(self, **changes) -> "Game":
        fields = dict(
            channel=self.channel,
            n=self.n,
            priors=self.priors,
            sender_util=self.sender_util,
            receiver_util=self.receiver_util,
        )
        fields.update(changes)
        return Game(**fields)


def validate_game(game: Game) -> list:
    """Return every violated invariant of ``game`` (empty list means ok)."""
    problems = []
    if not isinstance(game.n, int) or isinstance(game.n, bool) or game.n < 1:
        problems.append(f"n must be a positive integer, got {game.n!r}")
    M = len(game.priors)
    if M < 1:
        problems.append("game needs at least one state")
    for name, values in (("senderUtil", game.sender_util), ("receiverUtil", game.receiver_util)):
        if len(values) != M:
            problems.append(f"{name} has {len(values)} entries, expected {M}")
    for i, q in enumerate(game.priors):
        if not q > 0:
            problems.append(f"prior of state {i} is {format_rational(q)}, not positive")
    total = sum(game.priors, Fraction(0))
    if M and total != 1:
        problems.append(f"priors sum to {format_rational(total)}, not 1")
    for i, u in enumerate(game.sender_util):
        if not u > 0:
            problems.append(f"sender utility of state {i} is {format_rational(u)}, not positive")
    for i, v in enumerate(game.receiver_util):
        if not v > 0:
            problems.append(f"receiver utility of state {i} is {format_rational(v)}, not positive")
    return problems


def ensure_valid(game: Game) -> Game:
    problems = validate_game(game)
    if problems:
        raise ModelError("; ".join(problems))
    return game


@dataclass(frozen=True)
class Codebook:
    """One channel-input word per state. Repeated words are allowed."""

    words: tuple

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(parse_word(w) for w in self.words))

    @classmethod
    def of(cls, *words) -> "Codebook":
        return cls(tuple(words))

    def __len__(self) -> int:
        return len(self.words)

    def __getitem__(self, i: int) -> Word:
        return self.words[i]

    def with_word(self, i: int, word: Sequence[str]) -> "Codebook":
        words = list(self.words)
        words[i] = tuple(word)
        return Codebook(tuple(words))

    def __str__(self) -> str:
        return ",".join(word_str(w) for w in self.words)


def codebook_violations(game: Game, code: Codebook) -> list:
    problems = []
    if len(code.words) != game.M:
        problems.append(f"codebook has {len(code.words)} words, expected {game.M}")
    alphabet = set(game.channel.inputs)
    for i, w in enumerate(code.words):
        if len(w) != game.n:
            problems.append(f"codeword for state {i} has length {len(w)}, expected {game.n}")
        bad = sorted(set(w) - alphabet)
        if bad:
            problems.append(f"codeword for state {i} uses unknown input symbols {bad}")
    return problems


def ensure_codebook(game: Game, code: Codebook) -> Codebook:
    problems = codebook_violations(game, code)
    if problems:
        raise ModelError("; ".join(problems))
    return code


class ProductChannel:
    """The channel used ``n`` times, with integer-scaled probability rows.

    ``row(x)[b] / scale == p(outputs[b] | x)``. Rows are computed on demand
    and cached; outputs and inputs are listed in lexicographic order of
    symbol indices.
    """

    def __init__(self, channel: Channel, n: int):
        self.channel = channel
        self.n = n
        den = 1
        for row in channel.matrix:
            for p in row:
                den = math.lcm(den, p.denominator)
        self._symbol_rows = {
            x: [int(p * den) for p in row] for x, row in zip(channel.inputs, channel.matrix)
        }
        self.scale = den**n
        self._rows: dict = {}
        self._inputs = None
        self._outputs = None

    @property
    def inputs(self) -> list:
        if self._inputs is None:
            self._inputs = list(itertools.product(self.channel.inputs, repeat=self.n))
        return self._inputs

    @property
    def outputs(self) -> list:
        if self._outputs is None:
            self._outputs = list(itertools.product(self.channel.outputs, repeat=self.n))
        return self._outputs

    @property
    def input_count(self) -> int:
        return len(self.channel.inputs) ** self.n

    @property
    def output_count(self) -> int:
        return len(self.channel.outputs) ** self.n

    def row(self, x: Word) -> list:
        r = self._rows.get(x)
        if r is None:
            r = [1]
            for s in x:
                sym = self._symbol_rows[s]
                r = [a * b for a in r for b in sym]
            self._rows[x] = r
        return r

    def prob(self, x: Word, y_index: int) -> Fraction:
        return Fraction(self.row(x)[y_index], self.scale)


def product_channel(channel: Channel, n: int) -> ProductChannel:
    """Cached per channel object (hashing the exact matrix is slow)."""
    kernels = channel.__dict__.setdefault("_kernels", {})
    kernel = kernels.get(n)
    if kernel is None:
        kernel = kernels[n] = ProductChannel(channel, n)
    return kernel


def integer_weights(values: Sequence[Fraction]) -> tuple:
    """Scale positive rationals to integers with a common denominator."""
    den = 1
    for v in values:
        den = math.lcm(den, Fraction(v).denominator)
    return tuple(int(Fraction(v) * den) for v in values), den
