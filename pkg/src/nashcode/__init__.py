"""Sender-receiver coordination games over noisy channels: exact Nash-code checks."""

from .decoding import (
    DecoderTable,
    ExplicitTable,
    FixedOrder,
    GeneralDecoder,
    TieStructure,
    Uniform,
    Weighted,
    decoder_from_rule,
    derive_fixed_order,
    enumerate_general_deterministic_monotonic,
    is_best_response,
    is_monotonic,
    tie_structure,
)
from .equilibrium import (
    BudgetExceeded,
    NashReport,
    best_deviation,
    check_nash,
    correct_decode_prob,
    pooling_code,
    receiver_payoff,
    sender_payoff,
)
from .model import (
    Channel,
    Codebook,
    Game,
    ModelError,
    channel_prob,
    format_rational,
    make_binary_channel,
    parse_rational,
    validate_game,
)
from .search import better_reply_dynamics, global_receiver_optimal, local_receiver_search

__version__ = "0.1.0"

__all__ = [
    "best_deviation",
    "better_reply_dynamics",
    "BudgetExceeded",
    "Channel",
    "channel_prob",
    "check_nash",
    "Codebook",
    "correct_decode_prob",
    "decoder_from_rule",
    "DecoderTable",
    "derive_fixed_order",
    "enumerate_general_deterministic_monotonic",
    "ExplicitTable",
    "FixedOrder",
    "format_rational",
    "Game",
    "GeneralDecoder",
    "global_receiver_optimal",
    "is_best_response",
    "is_monotonic",
    "local_receiver_search",
    "make_binary_channel",
    "ModelError",
    "NashReport",
    "parse_rational",
    "pooling_code",
    "receiver_payoff",
    "sender_payoff",
    "tie_structure",
    "TieStructure",
    "Uniform",
    "validate_game",
    "Weighted",
]
