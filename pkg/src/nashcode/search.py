"""Receiver-optimal code search and better-reply dynamics.

Receiver payoff acts as a potential: every accepted single-codeword change
strictly increases it, so all loops here terminate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .decoding import FixedOrder, decoder_from_rule, tie_structure
from .equilibrium import _require, best_deviation, best_response_value, check_nash
from .model import Codebook, Game, product_channel


@dataclass(frozen=True)
class SearchStep:
    codebook: Codebook
    changed_state: Optional[int]
    receiver_payoff: Fraction


@dataclass
class SearchTrace:
    steps: list = field(default_factory=list)

    @property
    def terminal(self) -> Codebook:
        return self.steps[-1].codebook

    @property
    def moves(self) -> int:
        return len(self.steps) - 1

    def check(self) -> None:
        """Assert the potential increases strictly and moves change one codeword."""
        for a, b in zip(self.steps, self.steps[1:]):
            assert b.receiver_payoff > a.receiver_payoff, "receiver payoff did not increase"
            changed = [i for i, (u, v) in enumerate(zip(a.codebook.words, b.codebook.words)) if u != v]
            assert changed == [b.changed_state], f"step changed states {changed}"


def single_codeword_neighbors(game: Game, code: Codebook):
    """Yield ``(state, word, neighbor)`` in lexicographic order of (state, word)."""
    kernel = product_channel(game.channel, game.n)
    for i in game.states:
        for x in kernel.inputs:
            if x != code[i]:
                yield i, x, code.with_word(i, x)


def local_receiver_search(game: Game, start: Codebook, budget: Optional[int] = None, max_rounds: int = 10_000):
    """Best-improvement hill climbing on the best-response receiver payoff.

    Returns ``(terminal codebook, trace)``; the terminal code is locally
    receiver-optimal (no single-codeword change strictly helps the receiver).
    """
    kernel = product_channel(game.channel, game.n)
    _require(game.M * kernel.input_count, budget, "single-codeword moves per round")
    code = start
    value = best_response_value(game, code)
    trace = SearchTrace([SearchStep(code, None, value)])
    for _ in range(max_rounds):
        best = None
        for i, _x, nb in single_codeword_neighbors(game, code):
            v = best_response_value(game, nb)
            if v > value and (best is None or v > best[0]):
                best = (v, i, nb)
        if best is None:
            return code, trace
        value, i, code = best
        trace.steps.append(SearchStep(code, i, value))
    raise RuntimeError("local search did not converge")


def all_codebooks(game: Game):
    kernel = product_channel(game.channel, game.n)
    for words in itertools.product(kernel.inputs, repeat=game.M):
        yield Codebook(words)


def global_receiver_optimal(game: Game, budget: Optional[int] = None) -> tuple:
    """Exhaustive maximizer of the receiver payoff; first in lexicographic order."""
    kernel = product_channel(game.channel, game.n)
    _require(kernel.input_count**game.M, budget, "codebooks")
    best_code, best_value = None, None
    for code in all_codebooks(game):
        v = best_response_value(game, code)
        if best_value is None or v > best_value:
            best_code, best_value = code, v
    return best_code, best_value


def better_reply_dynamics(game: Game, start: Codebook, rule=None, budget: Optional[int] = None, max_rounds: int = 10_000):
    """Sender moves against the receiver's current best response.

    Each round fixes the decoder for the current code, lets the lowest-index
    state with a strictly profitable deviation switch to its best deviation,
    and recomputes the decoder. Returns ``(terminal, trace)``.
    """
    rule = FixedOrder.natural(game.M) if rule is None else rule
    code = start
    trace = SearchTrace([SearchStep(code, None, best_response_value(game, code))])
    for _ in range(max_rounds):
        table = decoder_from_rule(tie_structure(game, code), rule)
        move = None
        for i in game.states:
            w = best_deviation(game, code, table, i, budget)
            if w is not None:
                move = w
                break
        if move is None:
            return code, trace
        code = code.with_word(move.state, move.alternative)
        value = best_response_value(game, code)
        if not value > trace.steps[-1].receiver_payoff:
            raise AssertionError("sender improvement did not raise the receiver payoff")
        trace.steps.append(SearchStep(code, move.state, value))
    raise RuntimeError("dynamics did not converge")


def sender_optimal_diagnostic(game: Game, rule=None, budget: Optional[int] = None) -> dict:
    """Codebook with the highest sender payoff under best-response decoding,
    together with its Nash verdict. Sender-optimal codes need not be Nash."""
    rule = FixedOrder.natural(game.M) if rule is None else rule
    kernel = product_channel(game.channel, game.n)
    _require(kernel.input_count**game.M, budget, "codebooks")
    best = None
    for code in all_codebooks(game):
        report = check_nash(game, code, rule, budget)
        if best is None or report.sender_payoff > best[1].sender_payoff:
            best = (code, report)
    return {"codebook": best[0], "report": best[1]}
