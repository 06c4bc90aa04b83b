"""Binary-channel specialization.

Checkers for the steps of the argument that every monotonically decoded
binary code is a Nash code: the split of positions into agreeing and
differing bits, the sign monotonicity of ``Q_k(A)``, the multilinear
interpolation ``f`` of decoding probabilities, and an exhaustive sweep.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .decoding import (
    Check,
    DecoderTable,
    ExplicitTable,
    FixedOrder,
    Uniform,
    Weighted,
    is_best_response,
    is_monotonic,
    tie_structure,
)
from .equilibrium import _require, check_nash
from .model import (
    Codebook,
    Game,
    ModelError,
    binary_errors,
    channel_prob,
    format_rational,
    integer_weights,
    product_channel,
    word_str,
)


def require_binary(game: Game) -> tuple:
    """Return ``(eps0, eps1)``; raise unless both are positive with sum below 1."""
    e0, e1 = binary_errors(game.channel)
    if not (e0 > 0 and e1 > 0 and e0 + e1 < 1):
        raise ModelError(
            f"binary channel needs eps0 > 0, eps1 > 0, eps0 + eps1 < 1 "
            f"(got {format_rational(e0)}, {format_rational(e1)})"
        )
    return e0, e1


def _flip(bit: str) -> str:
    return "1" if bit == "0" else "0"


@dataclass(frozen=True)
class DeviationDecomposition:
    """Positions (0-based) where ``x`` agrees with / differs from codeword ``i``."""

    state: int
    alternative: tuple
    codeword: tuple
    same: tuple
    diff: tuple
    zero_positions: tuple  # differing positions where the codeword has 0
    one_positions: tuple

    def subset_word(self, A) -> tuple:
        """``y_D^A``: codeword bits on ``A``, flipped bits on ``D - A`` (indexed like ``diff``)."""
        A = set(A)
        return tuple(self.codeword[j] if j in A else _flip(self.codeword[j]) for j in self.diff)

    def assemble(self, y_S: Sequence[str], y_D: Sequence[str]) -> tuple:
        y = [None] * len(self.codeword)
        for j, b in zip(self.same, y_S):
            y[j] = b
        for j, b in zip(self.diff, y_D):
            y[j] = b
        return tuple(y)

    def subsets(self):
        """All ``A`` subsets of the differing positions, by size then lexicographically."""
        for r in range(len(self.diff) + 1):
            for A in itertools.combinations(self.diff, r):
                yield frozenset(A)

    def outputs_on_same(self):
        return itertools.product("01", repeat=len(self.same))


def decompose(code: Codebook, i: int, x: Sequence[str]) -> DeviationDecomposition:
    xi = tuple(code[i])
    x = tuple(x)
    if len(x) != len(xi):
        raise ModelError("alternative word has the wrong length")
    same = tuple(j for j in range(len(x)) if x[j] == xi[j])
    diff = tuple(j for j in range(len(x)) if x[j] != xi[j])
    return DeviationDecomposition(
        state=i,
        alternative=x,
        codeword=xi,
        same=same,
        diff=diff,
        zero_positions=tuple(j for j in diff if xi[j] == "0"),
        one_positions=tuple(j for j in diff if xi[j] == "1"),
    )


def _sub(word: Sequence[str], positions: Sequence[int]) -> tuple:
    return tuple(word[j] for j in positions)


def q_value(game: Game, code: Codebook, decomp: DeviationDecomposition, y_S: Sequence[str], k: int, A) -> Fraction:
    """``Q_k(A) = p(y_D^A | x^i_D) - R_k p(y_D^A | x^k_D)``.

    The output ``(y_S, y_D^A)`` is a best response for state ``i`` exactly when
    ``Q_k(A) >= 0`` for every ``k``.
    """
    require_binary(game)
    ch = game.channel
    i = decomp.state
    y_D = decomp.subset_word(A)
    xk = code[k]
    w = game.receiver_weights()
    ratio = (w[k] * channel_prob(ch, _sub(xk, decomp.same), y_S)) / (
        w[i] * channel_prob(ch, _sub(decomp.codeword, decomp.same), y_S)
    )
    return channel_prob(ch, _sub(decomp.codeword, decomp.diff), y_D) - ratio * channel_prob(
        ch, _sub(xk, decomp.diff), y_D
    )


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def check_sign_monotonicity(game: Game, code: Codebook, i: int, x: Sequence[str], budget: Optional[int] = None) -> Check:
    """``sign Q_k(A + j) >= sign Q_k(A)`` for every ``y_S``, ``k``, ``A`` and ``j`` outside ``A``.

    Counterexample, if any, is ``(y_S, k, A, j)``.
    """
    require_binary(game)
    _require(2 ** game.n, budget, "sign-monotonicity outputs")
    dec = decompose(code, i, x)
    subsets = list(dec.subsets())
    for y_S in dec.outputs_on_same():
        for k in game.states:
            signs = {A: _sign(q_value(game, code, dec, y_S, k, A)) for A in subsets}
            for A in subsets:
                for j in dec.diff:
                    if j not in A and signs[A | {j}] < signs[A]:
                        return Check(False, (y_S, k, A, j), "sign decreased")
    return Check(True)


def multilinear(h: Sequence, z: Sequence, one=1):
    """Evaluate ``sum_A h_A prod_{l in A} z_l prod_{l not in A} (one - z_l)``.

    ``h`` is indexed by bitmask (bit ``t`` set means coordinate ``t`` in
    ``A``). With integer ``z`` scaled by ``one`` the result is scaled by
    ``one ** len(z)``.
    """
    vals = list(h)
    for t in range(len(z) - 1, -1, -1):
        half = 1 << t
        zt = z[t]
        vals = [(one - zt) * vals[m] + zt * vals[m | half] for m in range(half)]
    return vals[0]


def _multilinear_literal(h: Sequence, z: Sequence):
    total = Fraction(0)
    for mask, hv in enumerate(h):
        term = Fraction(hv)
        for t, zt in enumerate(z):
            term *= zt if mask >> t & 1 else 1 - zt
        total += term
    return total


@dataclass(frozen=True)
class MultilinearResult:
    f_codeword: Fraction  # f at z^i_D
    f_alternative: Fraction  # f at z_D
    holds: bool
    vertex_ok: bool
    h_monotone: bool
    identity_ok: bool  # f values equal the direct conditional decode sums
    dominance_ok: bool  # z^i_D > z_D componentwise


def _error_points(dec: DeviationDecomposition, e0: Fraction, e1: Fraction) -> tuple:
    high = [1 - e0 if dec.codeword[j] == "0" else 1 - e1 for j in dec.diff]
    low = [e1 if dec.codeword[j] == "0" else e0 for j in dec.diff]
    return high, low


def h_values(table: DecoderTable, dec: DeviationDecomposition, y_S: Sequence[str]) -> list:
    """``h_A = d((y_S, y_D^A), i)`` indexed by bitmask over ``dec.diff``."""
    i = dec.state
    m = len(dec.diff)
    out = []
    for mask in range(2**m):
        A = {dec.diff[t] for t in range(m) if mask >> t & 1}
        out.append(table.prob(dec.assemble(y_S, dec.subset_word(A)), i))
    return out


def multilinear_check(
    game: Game,
    code: Codebook,
    table: DecoderTable,
    i: int,
    x: Sequence[str],
    y_S: Sequence[str],
    check_monotonic: bool = True,
) -> MultilinearResult:
    """Compare ``f(z^i_D)`` with ``f(z_D)`` for one fixed ``y_S``.

    ``f(z^i_D)`` is the probability that codeword ``i`` is decoded as ``i``
    conditioned on ``y_S``, and ``f(z_D)`` the same for ``x``.
    """
    e0, e1 = require_binary(game)
    if check_monotonic:
        mono = is_monotonic(table, tie_structure(game, code))
        if not mono:
            raise ModelError(f"decoder is not monotonic: {mono.reason} at {mono.witness}")
    dec = decompose(code, i, x)
    h = h_values(table, dec, y_S)
    m = len(dec.diff)
    high, low = _error_points(dec, e0, e1)
    f_hi = multilinear(h, high)
    f_lo = multilinear(h, low)

    vertex_ok = all(
        multilinear(h, [Fraction(mask >> t & 1) for t in range(m)]) == h[mask] for mask in range(2**m)
    )
    h_mono = all(h[mask | 1 << t] >= h[mask] for mask in range(2**m) for t in range(m) if not mask >> t & 1)
    ch = game.channel
    direct_hi = direct_lo = Fraction(0)
    for mask in range(2**m):
        A = {dec.diff[t] for t in range(m) if mask >> t & 1}
        y_D = dec.subset_word(A)
        direct_hi += channel_prob(ch, _sub(dec.codeword, dec.diff), y_D) * h[mask]
        direct_lo += channel_prob(ch, _sub(dec.alternative, dec.diff), y_D) * h[mask]
    return MultilinearResult(
        f_codeword=f_hi,
        f_alternative=f_lo,
        holds=f_hi >= f_lo,
        vertex_ok=vertex_ok,
        h_monotone=h_mono,
        identity_ok=f_hi == direct_hi == _multilinear_literal(h, high) and f_lo == direct_lo,
        dominance_ok=all(a > b for a, b in zip(high, low)),
    )


@dataclass(frozen=True)
class AppendixVerdict:
    is_nash: bool
    receiver_side_ok: bool
    witness: Optional[tuple] = None  # (state, word) whose summed f comparison fails
    per_ys_failures: int = 0  # individual y_S comparisons with f(z_D) > f(z^i_D)


def appendix_verdict(game: Game, code: Codebook, table: DecoderTable, budget: Optional[int] = None) -> AppendixVerdict:
    """Nash verdict assembled from per-``y_S`` multilinear comparisons.

    For every state and alternative word, sums ``p(y_S|x_S) f(.)`` over
    ``y_S`` at both error points, in integer arithmetic. Independent of the
    direct enumeration in :func:`nashcode.equilibrium.check_nash`.
    """
    e0, e1 = require_binary(game)
    n = game.n
    _require(2**n, budget, "appendix route outputs")
    br = is_best_response(table, tie_structure(game, code))
    _, scale = integer_weights([e0, e1, 1 - e0, 1 - e1])
    e0i, e1i = int(e0 * scale), int(e1 * scale)
    sym = {("0", "0"): scale - e0i, ("0", "1"): e0i, ("1", "0"): e1i, ("1", "1"): scale - e1i}
    weight = [1 << (n - 1 - j) for j in range(n)]
    kernel = product_channel(game.channel, n)
    witness = None
    failures = 0
    for i in game.states:
        col, _den = table.integer_column(i)
        xi = tuple(code[i])
        for x in kernel.inputs:
            if x == xi:
                continue
            dec = decompose(code, i, x)
            m = len(dec.diff)
            hi = [scale - e0i if xi[j] == "0" else scale - e1i for j in dec.diff]
            lo = [e1i if xi[j] == "0" else e0i for j in dec.diff]
            dpart = []
            for mask in range(2**m):
                s = 0
                for t, j in enumerate(dec.diff):
                    bit = xi[j] if mask >> t & 1 else _flip(xi[j])
                    if bit == "1":
                        s += weight[j]
                dpart.append(s)
            lhs = rhs = 0
            for y_S in dec.outputs_on_same():
                base = 0
                p_S = 1
                for j, b in zip(dec.same, y_S):
                    if b == "1":
                        base += weight[j]
                    p_S *= sym[(x[j], b)]
                h = [col[base + dp] for dp in dpart]
                a = multilinear(h, hi, scale)
                b_ = multilinear(h, lo, scale)
                if b_ > a:
                    failures += 1
                lhs += p_S * a
                rhs += p_S * b_
            if rhs > lhs and witness is None:
                witness = (i, x)
    return AppendixVerdict(br.ok and witness is None, br.ok, witness, failures)


# --- sweeps ------------------------------------------------------------------


def rule_label(rule) -> str:
    if isinstance(rule, Uniform):
        return "uniform"
    if isinstance(rule, FixedOrder):
        return "fixed-order(" + ",".join(map(str, rule.order)) + ")"
    if isinstance(rule, Weighted):
        return "weighted(" + ",".join(format_rational(w) for w in rule.weights) + ")"
    if isinstance(rule, ExplicitTable):
        return "table"
    return repr(rule)


@dataclass
class SweepReport:
    M: int
    n: int
    games: int = 0
    codebooks: int = 0
    rules: list = field(default_factory=list)
    checks: int = 0
    nash: int = 0
    counterexamples: list = field(default_factory=list)

    @property
    def all_nash(self) -> bool:
        return self.checks == self.nash and not self.counterexamples

    def merge(self, other: "SweepReport") -> None:
        self.checks += other.checks
        self.nash += other.nash
        self.counterexamples.extend(other.counterexamples)


def _sweep_chunk(args) -> SweepReport:
    game_index, game, codes, rules, budget = args
    rep = SweepReport(game.M, game.n)
    for code in codes:
        structure = tie_structure(game, code)
        for rule in rules:
            report = check_nash(game, code, rule, budget, structure)
            rep.checks += 1
            if report.is_nash:
                rep.nash += 1
            else:
                w = report.witness
                rep.counterexamples.append(
                    {
                        "game": game_index,
                        "codebook": str(code),
                        "rule": rule_label(rule),
                        "receiverSideOk": report.receiver_side_ok,
                        "state": None if w is None else w.state,
                        "alternative": None if w is None else word_str(w.alternative),
                        "currentProb": None if w is None else format_rational(w.current_prob),
                        "deviationProb": None if w is None else format_rational(w.deviation_prob),
                    }
                )
    return rep


def binary_codebooks(M: int, n: int):
    words = list(itertools.product("01", repeat=n))
    for ws in itertools.product(words, repeat=M):
        yield Codebook(ws)


def verify_binary_theorem(
    games: Sequence[Game],
    rules: Sequence,
    codebooks: Optional[Sequence[Codebook]] = None,
    budget: Optional[int] = None,
    workers: int = 1,
    chunk: int = 512,
) -> SweepReport:
    """Run ``check_nash`` on every game x codebook x rule and tally the verdicts.

    A counterexample with a monotonic rule would falsify the implementation.
    Results do not depend on ``workers``: chunks are merged in input order.
    """
    if not games:
        raise ValueError("need at least one game")
    M, n = games[0].M, games[0].n
    for g in games:
        require_binary(g)
        if (g.M, g.n) != (M, n):
            raise ValueError("all games in a sweep must share M and n")
    if codebooks is None:
        _require(2 ** (n * M), budget, "codebooks")
        codebooks = list(binary_codebooks(M, n))
    else:
        codebooks = list(codebooks)
    tasks = []
    for gi, game in enumerate(games):
        for start in range(0, len(codebooks), chunk):
            tasks.append((gi, game, codebooks[start : start + chunk], list(rules), budget))
    report = SweepReport(M, n, games=len(games), codebooks=len(codebooks), rules=[rule_label(r) for r in rules])
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_sweep_chunk, tasks))
    else:
        parts = [_sweep_chunk(t) for t in tasks]
    for part in parts:
        report.merge(part)
    return report


def z_channel_diagnostic(
    make_game,
    code: Codebook,
    rule=None,
    steps: int = 6,
    start: Fraction = Fraction(1, 10),
) -> dict:
    """Nash verdicts as the small error probability shrinks towards a Z-channel.

    ``make_game(eps)`` builds the game for a given small error probability;
    ``eps = 0`` (the Z-channel itself) is checked through the general path.
    """
    rows = []
    eps = Fraction(start)
    for _ in range(steps):
        rep = check_nash(make_game(eps), code, rule)
        rows.append((eps, rep.is_nash))
        eps /= 10
    limit = check_nash(make_game(Fraction(0)), code, rule).is_nash
    verdicts = [v for _, v in rows]
    return {
        "sequence": rows,
        "stable": len(set(verdicts[len(verdicts) // 2 :])) == 1,
        "tail_verdict": verdicts[-1],
        "z_channel_verdict": limit,
    }
