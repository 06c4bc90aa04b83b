"""Payoffs and Nash-code verification by exhaustive deviation enumeration."""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .decoding import (
    DecoderTable,
    ExplicitTable,
    FixedOrder,
    decoder_from_rule,
    is_best_response,
    tie_structure,
)
from .model import Codebook, Game, Word, product_channel

DEFAULT_BUDGET = 2**20


class BudgetExceeded(RuntimeError):
    """An exhaustive enumeration would exceed the configured budget."""


def resolve_budget(budget: Optional[int] = None) -> int:
    if budget is not None:
        return int(budget)
    env = os.environ.get("NASHCODE_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


def _require(count: int, budget: Optional[int], what: str) -> None:
    limit = resolve_budget(budget)
    if count > limit:
        raise BudgetExceeded(f"{what}: {count} candidates exceed budget {limit}")


def correct_decode_prob(game: Game, code: Codebook, table: DecoderTable, i: int, x: Sequence[str]) -> Fraction:
    """Probability that sending ``x`` is decoded as state ``i``."""
    kernel = product_channel(game.channel, game.n)
    ints, den = table.integer_column(i)
    row = kernel.row(tuple(x))
    return Fraction(sum(a * b for a, b in zip(row, ints) if b), kernel.scale * den)


def decode_probs(game: Game, code: Codebook, table: DecoderTable) -> list:
    return [correct_decode_prob(game, code, table, i, code[i]) for i in game.states]


def sender_payoff(game: Game, code: Codebook, table: DecoderTable) -> Fraction:
    probs = decode_probs(game, code, table)
    return sum((w * p for w, p in zip(game.sender_weights(), probs)), Fraction(0))


def receiver_payoff(game: Game, code: Codebook, table: DecoderTable) -> Fraction:
    probs = decode_probs(game, code, table)
    return sum((w * p for w, p in zip(game.receiver_weights(), probs)), Fraction(0))


def best_response_value(game: Game, code: Codebook) -> Fraction:
    """Receiver payoff of any best response: ``sum_y max_k q_k V_k p(y|x^k)``."""
    kernel = product_channel(game.channel, game.n)
    weights, den = game.integer_receiver_weights()
    rows = [kernel.row(x) for x in code.words]
    total = sum(max(w * r[b] for w, r in zip(weights, rows)) for b in range(kernel.output_count))
    return Fraction(total, kernel.scale * den)


@dataclass(frozen=True)
class DeviationWitness:
    state: int
    alternative: Word
    current_prob: Fraction
    deviation_prob: Fraction

    @property
    def improvement(self) -> Fraction:
        return self.deviation_prob - self.current_prob


@dataclass(frozen=True)
class StateScan:
    state: int
    current_prob: Fraction
    best: Optional[DeviationWitness]
    unique_optimum: bool


def scan_state(game: Game, code: Codebook, table: DecoderTable, i: int, budget: Optional[int] = None) -> StateScan:
    """Score every input word for state ``i``; deviations are strict improvements."""
    kernel = product_channel(game.channel, game.n)
    _require(kernel.input_count, budget, f"deviations for state {i}")
    ints, den = table.integer_column(i)
    support = [(b, a) for b, a in enumerate(ints) if a]
    own = tuple(code[i])
    row = kernel.row(own)
    current = sum(row[b] * a for b, a in support)
    best_score, best_x, ties_at_current = current, None, 0
    for x in kernel.inputs:
        if x == own:
            continue
        row = kernel.row(x)
        score = sum(row[b] * a for b, a in support)
        if score > best_score:
            best_score, best_x = score, x
        if score == current:
            ties_at_current += 1
    scale = kernel.scale * den
    cur = Fraction(current, scale)
    witness = None
    if best_x is not None:
        witness = DeviationWitness(i, best_x, cur, Fraction(best_score, scale))
    return StateScan(i, cur, witness, best_x is None and ties_at_current == 0)


def best_deviation(game: Game, code: Codebook, table: DecoderTable, i: int, budget: Optional[int] = None) -> Optional[DeviationWitness]:
    """Lexicographically least input word with the highest decode probability
    for state ``i``, if it strictly beats the codeword; otherwise None."""
    return scan_state(game, code, table, i, budget).best


@dataclass(frozen=True)
class NashReport:
    is_nash: bool
    per_state: tuple
    sender_payoff: Fraction
    receiver_payoff: Fraction
    witness: Optional[DeviationWitness]
    receiver_side_ok: bool
    receiver_witness: Optional[tuple] = None
    unique_optimum: tuple = ()
    table: Optional[DecoderTable] = None


def resolve_table(game: Game, code: Codebook, decoder=None) -> DecoderTable:
    if decoder is None:
        decoder = FixedOrder.natural(game.M)
    if isinstance(decoder, DecoderTable):
        return decoder
    return decoder_from_rule(tie_structure(game, code), decoder)


def check_nash(
    game: Game, code: Codebook, decoder=None, budget: Optional[int] = None, structure=None
) -> NashReport:
    """Exhaustive Nash check of ``(code, decoder)``.

    ``decoder`` is a tie-breaking rule (applied to this code's tie structure)
    or an explicit :class:`DecoderTable`, whose best-response property is
    then checked. ``structure`` may pass a precomputed tie structure for
    ``code``. The witness is the deviation with the largest gain in
    decode probability, lexicographically least in ``(state, word)``.
    """
    if isinstance(decoder, ExplicitTable):
        decoder = decoder.table
    if structure is None:
        structure = tie_structure(game, code)
    if isinstance(decoder, DecoderTable):
        table = decoder
        br = is_best_response(table, structure)
    else:
        table = decoder_from_rule(structure, decoder if decoder is not None else FixedOrder.natural(game.M))
        br = None
    scans = [scan_state(game, code, table, i, budget) for i in game.states]
    witness = None
    for s in scans:
        if s.best is not None and (witness is None or s.best.improvement > witness.improvement):
            witness = s.best
    per_state = tuple(s.current_prob for s in scans)
    receiver_ok = br is None or br.ok
    return NashReport(
        is_nash=receiver_ok and witness is None,
        per_state=per_state,
        sender_payoff=sum((w * p for w, p in zip(game.sender_weights(), per_state)), Fraction(0)),
        receiver_payoff=sum((w * p for w, p in zip(game.receiver_weights(), per_state)), Fraction(0)),
        witness=witness,
        receiver_side_ok=receiver_ok,
        receiver_witness=None if br is None else br.witness,
        unique_optimum=tuple(s.unique_optimum for s in scans),
        table=table,
    )


def pooling_code(game: Game) -> tuple:
    """All states send the first input symbol repeated; every output is
    decoded as the earliest state maximizing ``q_i V_i``."""
    word = (game.channel.inputs[0],) * game.n
    code = Codebook((word,) * game.M)
    weights = game.receiver_weights()
    best = max(weights)
    pick = next(i for i, w in enumerate(weights) if w == best)
    kernel = product_channel(game.channel, game.n)
    table = DecoderTable.deterministic(kernel.outputs, [pick] * kernel.output_count, game.M)
    return code, table
