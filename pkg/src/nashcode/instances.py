"""Instance files, embedded worked examples and seeded random instances."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .decoding import (
    DecoderTable,
    DecodingError,
    ExplicitTable,
    FixedOrder,
    Uniform,
    Weighted,
    decoder_from_rule,
    tie_structure,
)
from .equilibrium import check_nash, correct_decode_prob, receiver_payoff, sender_payoff
from .model import (
    Channel,
    Codebook,
    Game,
    ModelError,
    codebook_violations,
    format_rational,
    format_word,
    make_binary_channel,
    parse_rational,
    parse_word,
    validate_game,
    word_str,
)


class InstanceError(ValueError):
    """Schema or consistency problem in an instance file."""


@dataclass
class Instance:
    game: Game
    codebook: Optional[Codebook] = None
    decoder: Optional[dict] = None  # raw decoder section; see decoder_from_json
    name: Optional[str] = None
    seed: Optional[int] = None


# --- JSON forms ----------------------------------------------------------------


def rats(values) -> list:
    return [format_rational(v) for v in values]


def channel_to_json(ch: Channel) -> dict:
    return {"inputs": list(ch.inputs), "outputs": list(ch.outputs), "matrix": [rats(r) for r in ch.matrix]}


def game_to_json(game: Game) -> dict:
    return {
        "n": game.n,
        "priors": rats(game.priors),
        "senderUtil": rats(game.sender_util),
        "receiverUtil": rats(game.receiver_util),
    }


def codebook_to_json(code: Codebook) -> dict:
    return {"words": [format_word(w) for w in code.words]}


def table_to_json(table: DecoderTable) -> dict:
    entries = {}
    for y, row in zip(table.outputs, table.rows):
        entries[word_str(y)] = {str(k): format_rational(p) for k, p in enumerate(row) if p}
    return {"rule": "table", "entries": entries}


def rule_to_json(rule) -> dict:
    if isinstance(rule, Uniform):
        return {"rule": "uniform"}
    if isinstance(rule, Weighted):
        return {"rule": "weighted", "weights": rats(rule.weights)}
    if isinstance(rule, FixedOrder):
        return {"rule": "fixed-order", "order": list(rule.order)}
    if isinstance(rule, ExplicitTable):
        return table_to_json(rule.table)
    if isinstance(rule, DecoderTable):
        return table_to_json(rule)
    raise TypeError(f"unknown decoder {rule!r}")


def instance_to_json(inst: Instance) -> dict:
    doc: dict = {}
    if inst.name is not None:
        doc["name"] = inst.name
    if inst.seed is not None:
        doc["seed"] = inst.seed
    doc["channel"] = channel_to_json(inst.game.channel)
    doc["game"] = game_to_json(inst.game)
    if inst.codebook is not None:
        doc["codebook"] = codebook_to_json(inst.codebook)
    if inst.decoder is not None:
        doc["decoder"] = inst.decoder
    return doc


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _field(doc: dict, key: str, where: str):
    if not isinstance(doc, dict):
        raise InstanceError(f"{where}: expected an object")
    if key not in doc:
        raise InstanceError(f"{where}.{key}: missing")
    return doc[key]


def _rat(value, where: str) -> Fraction:
    try:
        return parse_rational(value)
    except ValueError as exc:
        raise InstanceError(f"{where}: {exc}") from None


def _rat_list(values, where: str) -> tuple:
    if not isinstance(values, list):
        raise InstanceError(f"{where}: expected a list")
    return tuple(_rat(v, f"{where}[{k}]") for k, v in enumerate(values))


def channel_from_json(doc: dict, where: str = "channel") -> Channel:
    inputs = _field(doc, "inputs", where)
    outputs = _field(doc, "outputs", where)
    matrix = _field(doc, "matrix", where)
    if not isinstance(matrix, list):
        raise InstanceError(f"{where}.matrix: expected a list of rows")
    rows = tuple(_rat_list(r, f"{where}.matrix[{a}]") for a, r in enumerate(matrix))
    try:
        return Channel(tuple(str(s) for s in inputs), tuple(str(s) for s in outputs), rows)
    except ModelError as exc:
        raise InstanceError(f"{where}.matrix: {exc}") from None


def game_from_json(doc: dict, channel: Channel, where: str = "game") -> Game:
    n = _field(doc, "n", where)
    if not isinstance(n, int) or isinstance(n, bool):
        raise InstanceError(f"{where}.n: expected a positive integer")
    game = Game(
        channel=channel,
        n=n,
        priors=_rat_list(_field(doc, "priors", where), f"{where}.priors"),
        sender_util=_rat_list(_field(doc, "senderUtil", where), f"{where}.senderUtil"),
        receiver_util=_rat_list(_field(doc, "receiverUtil", where), f"{where}.receiverUtil"),
    )
    problems = validate_game(game)
    if problems:
        raise InstanceError(f"{where}: " + "; ".join(problems))
    return game


def codebook_from_json(doc: dict, game: Game, where: str = "codebook") -> Codebook:
    words = _field(doc, "words", where)
    if not isinstance(words, list):
        raise InstanceError(f"{where}.words: expected a list")
    code = Codebook(tuple(parse_word(w) for w in words))
    problems = codebook_violations(game, code)
    if problems:
        raise InstanceError(f"{where}.words: " + "; ".join(problems))
    return code


def _word_key(text: str) -> tuple:
    # table keys use word_str: symbols joined directly, or space-separated when longer
    return tuple(text.split()) if " " in text else tuple(text)


def decoder_from_json(doc: dict, game: Game, where: str = "decoder"):
    """Return a tie-breaking rule or a :class:`DecoderTable`."""
    kind = _field(doc, "rule", where)
    try:
        if kind == "uniform":
            return Uniform()
        if kind == "weighted":
            rule = Weighted(_rat_list(_field(doc, "weights", where), f"{where}.weights"))
            if len(rule.weights) != game.M:
                raise InstanceError(f"{where}.weights: {len(rule.weights)} weights for {game.M} states")
            return rule
        if kind == "fixed-order":
            order = _field(doc, "order", where)
            if sorted(order) != list(range(game.M)):
                raise InstanceError(f"{where}.order: not a permutation of the {game.M} states")
            return FixedOrder(tuple(order))
        if kind == "table":
            entries = _field(doc, "entries", where)
            return DecoderTable.from_mapping(
                game, {_word_key(y): d for y, d in entries.items()}, default=doc.get("default")
            )
    except DecodingError as exc:
        raise InstanceError(f"{where}: {exc}") from None
    raise InstanceError(f"{where}.rule: unknown rule {kind!r}")


def instance_from_json(doc: dict) -> Instance:
    if not isinstance(doc, dict):
        raise InstanceError("instance: expected a JSON object")
    channel = channel_from_json(_field(doc, "channel", "instance"))
    game = game_from_json(_field(doc, "game", "instance"), channel)
    code = codebook_from_json(doc["codebook"], game) if "codebook" in doc else None
    decoder = doc.get("decoder")
    if decoder is not None:
        decoder_from_json(decoder, game)  # validate eagerly
    return Instance(game, code, decoder, doc.get("name"), doc.get("seed"))


def load_instance(path) -> Instance:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return instance_from_json(doc)


def save_instance(inst: Instance, path) -> None:
    Path(path).write_text(dumps(instance_to_json(inst)))


# --- embedded worked examples ---------------------------------------------------


def ternary_game() -> Game:
    channel = Channel.from_rows(
        "012",
        "012",
        [["0.85", "0.1", "0.05"], ["0.1", "0.65", "0.25"], ["0", "0.3", "0.7"]],
    )
    return Game(channel, 1, ("1/2", "1/2"), (2, 8), (8, 2))


def binary_example_game(eps: Fraction = Fraction(1, 10)) -> Game:
    return Game(make_binary_channel(eps, eps), 3, ("1/4",) * 4, (1,) * 4, (1,) * 4)


BINARY_CODEBOOK = Codebook.of("000", "100", "010", "001")


def circular_table(game: Optional[Game] = None, tie_111: int = 1) -> DecoderTable:
    game = game or binary_example_game()
    entries = {"000": 0, "100": 1, "010": 2, "001": 3, "110": 1, "011": 2, "101": 3, "111": tie_111}
    return DecoderTable.from_mapping(game, {tuple(k): v for k, v in entries.items()})


def fixed_order_table(game: Optional[Game] = None) -> DecoderTable:
    game = game or binary_example_game()
    entries = {"000": 0, "100": 1, "010": 2, "001": 3, "110": 1, "011": 2, "101": 1, "111": 1}
    return DecoderTable.from_mapping(game, {tuple(k): v for k, v in entries.items()})


def _d(s: str) -> Fraction:
    return Fraction(s)


@dataclass
class PaperInstance:
    name: str
    game: Game
    codebooks: list
    expected: dict = field(default_factory=dict)


# codebook -> (Y0, Y1, p(Y0|x0), p(Y1|x1), U, V, Nash)
TERNARY_ROWS = {
    "0,1": ("0", "12", "0.85", "0.90", "4.45", "4.30", False),
    "0,2": ("01", "2", "0.95", "0.70", "3.75", "4.50", True),
    "1,0": ("12", "0", "0.90", "0.85", "4.30", "4.45", False),
    "1,2": ("012", "", "1.00", "0.00", "1.00", "4.00", True),
    "2,0": ("12", "0", "1.00", "0.85", "4.40", "4.85", True),
    "2,1": ("12", "0", "1.00", "0.10", "1.40", "4.10", False),
}

# receiver's q_i V_i p(y|x^i) for codebook 0,1
TERNARY_WEIGHTED_LIKELIHOODS = {0: ("3.4", "0.4", "0.2"), 1: ("0.1", "0.65", "0.25")}


def paper_examples() -> list:
    ternary = ternary_game()
    rows = {}
    for cb, (y0, y1, p0, p1, u, v, nash) in TERNARY_ROWS.items():
        rows[cb] = {
            "regions": (tuple((s,) for s in y0), tuple((s,) for s in y1)),
            "decode": (_d(p0), _d(p1)),
            "U": _d(u),
            "V": _d(v),
            "nash": nash,
        }
    ternary_inst = PaperInstance(
        "ternary",
        ternary,
        [Codebook(tuple(cb.split(","))) for cb in TERNARY_ROWS],
        {
            "rows": rows,
            "weighted_likelihoods": {
                i: tuple(_d(s) for s in vals) for i, vals in TERNARY_WEIGHTED_LIKELIHOODS.items()
            },
            "deviation": {"codebook": "0,1", "state": 1, "word": ("2",), "from": _d("7.2"), "to": _d("8")},
            "receiver_optimal": ("2,0", _d("4.85")),
        },
    )
    potential = PaperInstance(
        "non-potential",
        ternary,
        [Codebook.of("0", "1"), Codebook.of("1", "2")],
        {
            "decode_as": {"0": 0, "1": 0, "2": 1},
            "U": (_d("1.95"), _d("3.55")),
            "V": (_d("4.05"), _d("3.7")),
        },
    )
    bgame = binary_example_game()
    bits = lambda *ws: tuple(tuple(w) for w in ws)
    binary = PaperInstance(
        "binary-four-codewords",
        bgame,
        [BINARY_CODEBOOK],
        {
            "regions": (
                bits("000"),
                bits("100", "101", "110", "111"),
                bits("010", "011", "110", "111"),
                bits("001", "011", "101", "111"),
            ),
            "tie_111": frozenset({1, 2, 3}),
            "circular": circular_table(bgame),
            "fixed_order": fixed_order_table(bgame),
            "circular_witness": (1, tuple("110")),
            "monotonic_witness": (tuple("101"), tuple("111"), 1),
            "improving_move": (1, tuple("110")),
        },
    )
    return [ternary_inst, potential, binary]


@dataclass
class TableReport:
    cells: int = 0
    diffs: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.diffs


def reproduce_tables() -> TableReport:
    """Recompute every cell of the worked ternary tables and diff against the embedded values."""
    ternary, potential, binary = paper_examples()
    game = ternary.game
    report = TableReport()

    def cell(name: str, got, want) -> None:
        report.cells += 1
        if got != want:
            report.diffs.append({"cell": name, "expected": str(want), "got": str(got)})

    w = game.receiver_weights()
    code01 = Codebook.of("0", "1")
    for i, vals in ternary.expected["weighted_likelihoods"].items():
        for y, want in zip("012", vals):
            got = w[i] * game.channel.prob(y, code01[i][0])
            cell(f"likelihood[i={i},y={y}]", got, want)

    for code in ternary.codebooks:
        row = ternary.expected["rows"][str(code)]
        structure = tie_structure(game, code)
        table = decoder_from_rule(structure, FixedOrder.natural(game.M))
        regions = structure.regions()
        for i in game.states:
            cell(f"{code}:Y{i}", tuple(regions[i]), row["regions"][i])
            cell(f"{code}:p(Y{i}|x{i})", correct_decode_prob(game, code, table, i, code[i]), row["decode"][i])
        cell(f"{code}:U", sender_payoff(game, code, table), row["U"])
        cell(f"{code}:V", receiver_payoff(game, code, table), row["V"])
        cell(f"{code}:nash", check_nash(game, code, table).is_nash, row["nash"])

    pe = potential.expected
    d = DecoderTable.from_mapping(game, {(y,): s for y, s in pe["decode_as"].items()})
    for k, code in enumerate(potential.codebooks):
        cell(f"non-potential {code}:U", sender_payoff(game, code, d), pe["U"][k])
        cell(f"non-potential {code}:V", receiver_payoff(game, code, d), pe["V"][k])

    be = binary.expected
    bstruct = tie_structure(binary.game, BINARY_CODEBOOK)
    for i, want in enumerate(be["regions"]):
        cell(f"binary:Y{i}", tuple(bstruct.regions()[i]), want)
    return report


# --- random instances ---------------------------------------------------------


def random_distribution(rng: random.Random, size: int, denominator: int, positive: bool = True) -> tuple:
    """Random composition of ``denominator`` into ``size`` parts, as fractions."""
    if positive:
        denominator = max(denominator, size)
        cuts = sorted(rng.sample(range(1, denominator), size - 1))
        parts = [b - a for a, b in zip([0] + cuts, cuts + [denominator])]
    else:
        cuts = sorted(rng.randint(0, denominator) for _ in range(size - 1))
        parts = [b - a for a, b in zip([0] + cuts, cuts + [denominator])]
    return tuple(Fraction(p, denominator) for p in parts)


def random_positive(rng: random.Random, max_denominator: int) -> Fraction:
    return Fraction(rng.randint(1, max_denominator), rng.randint(1, max_denominator))


def random_binary_errors(rng: random.Random, max_denominator: int) -> tuple:
    """Rejection-sample ``(eps0, eps1)`` with both positive and sum below 1."""
    if max_denominator < 3:
        raise ValueError("binary error probabilities need max_denominator >= 3")
    while True:
        den = rng.randint(2, max_denominator)
        e0 = Fraction(rng.randint(1, den - 1), den)
        den = rng.randint(2, max_denominator)
        e1 = Fraction(rng.randint(1, den - 1), den)
        if e0 + e1 < 1:
            return e0, e1


def random_game(
    rng: random.Random,
    M: int,
    n: int,
    channel: Channel,
    max_denominator: int = 1000,
) -> Game:
    return Game(
        channel,
        n,
        random_distribution(rng, M, max_denominator),
        tuple(random_positive(rng, max_denominator) for _ in range(M)),
        tuple(random_positive(rng, max_denominator) for _ in range(M)),
    )


def random_instance(
    seed: int,
    M: int,
    input_symbols: int,
    output_symbols: int,
    n: int,
    max_denominator: int = 1000,
    binary: bool = False,
    with_codebook: bool = True,
) -> Instance:
    """Deterministic in ``seed``. ``binary=True`` gives a 0/1 channel with
    positive error probabilities summing below one."""
    if min(M, input_symbols, output_symbols, n) < 1:
        raise ValueError("sizes must be positive")
    if max_denominator < 2:
        raise ValueError("max_denominator must be at least 2")
    rng = random.Random(seed)
    if binary:
        channel = make_binary_channel(*random_binary_errors(rng, max_denominator))
    else:
        rows = [random_distribution(rng, output_symbols, max_denominator) for _ in range(input_symbols)]
        channel = Channel(
            tuple(str(k) for k in range(input_symbols)), tuple(str(k) for k in range(output_symbols)), tuple(rows)
        )
    game = random_game(rng, M, n, channel, max_denominator)
    code = None
    if with_codebook:
        code = Codebook(tuple(tuple(rng.choice(channel.inputs) for _ in range(n)) for _ in range(M)))
    return Instance(game, code, None, f"random-{seed}", seed)


def sample_binary_games(
    M: int,
    n: int,
    count: int,
    seed: int = 0,
    max_denominator: int = 1000,
    eps: Fraction = Fraction(1, 10),
) -> list:
    """The tie-rich uniform game on a symmetric channel, then random games."""
    games = [Game(make_binary_channel(eps, eps), n, (Fraction(1, M),) * M, (1,) * M, (1,) * M)]
    rng = random.Random(seed)
    while len(games) < count:
        channel = make_binary_channel(*random_binary_errors(rng, max_denominator))
        games.append(random_game(rng, M, n, channel, max_denominator))
    return games[:count]

