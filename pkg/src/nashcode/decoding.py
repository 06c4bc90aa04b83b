"""Best-response tie structures, tie-breaking rules and monotonic decoding."""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional, Sequence, Union

from .model import (
    Codebook,
    Game,
    Word,
    format_rational,
    parse_rational,
    product_channel,
    word_str,
)

DEFAULT_MAX_STATES = 5


class DecodingError(ValueError):
    pass


@dataclass(frozen=True)
class TieStructure:
    """For every output word ``y`` (lexicographic order), the set ``T(y)`` of
    states maximizing ``q_k V_k p(y|x^k)``."""

    M: int
    outputs: tuple
    ties: tuple

    def tie_set(self, y: Sequence[str]) -> frozenset:
        return self.ties[self.index[tuple(y)]]

    @property
    def index(self) -> dict:
        idx = self.__dict__.get("_index")
        if idx is None:
            idx = {y: b for b, y in enumerate(self.outputs)}
            object.__setattr__(self, "_index", idx)
        return idx

    def regions(self) -> list:
        """The sets ``Y_i = {y : i in T(y)}`` as lists of words."""
        out = [[] for _ in range(self.M)]
        for y, T in zip(self.outputs, self.ties):
            for i in sorted(T):
                out[i].append(y)
        return out

    def distinct_tie_sets(self) -> set:
        return set(self.ties)


def tie_structure(game: Game, code: Codebook) -> TieStructure:
    kernel = product_channel(game.channel, game.n)
    weights, _ = game.integer_receiver_weights()
    rows = [kernel.row(x) for x in code.words]
    everyone = frozenset(range(game.M))
    ties = []
    for b in range(kernel.output_count):
        vals = [w * r[b] for w, r in zip(weights, rows)]
        best = max(vals)
        if best == 0:
            ties.append(everyone)
        else:
            ties.append(frozenset(k for k, v in enumerate(vals) if v == best))
    return TieStructure(game.M, tuple(kernel.outputs), tuple(ties))


# --- tie-breaking rules ----------------------------------------------------


@dataclass(frozen=True)
class Uniform:
    def distribution(self, T: frozenset, M: int) -> tuple:
        share = Fraction(1, len(T))
        return tuple(share if k in T else Fraction(0) for k in range(M))


@dataclass(frozen=True)
class Weighted:
    weights: tuple

    def __post_init__(self):
        w = tuple(parse_rational(v) for v in self.weights)
        if any(v <= 0 for v in w):
            raise DecodingError("tie-breaking weights must be positive")
        object.__setattr__(self, "weights", w)

    def distribution(self, T: frozenset, M: int) -> tuple:
        if len(self.weights) != M:
            raise DecodingError(f"{len(self.weights)} weights given for {M} states")
        total = sum((self.weights[k] for k in T), Fraction(0))
        return tuple(self.weights[k] / total if k in T else Fraction(0) for k in range(M))


@dataclass(frozen=True)
class FixedOrder:
    """Decode as the earliest state of ``order`` among the tied states."""

    order: tuple

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(int(k) for k in self.order))

    @classmethod
    def natural(cls, M: int) -> "FixedOrder":
        return cls(tuple(range(M)))

    def rank(self) -> dict:
        return {k: r for r, k in enumerate(self.order)}

    def choose(self, T: Iterable[int]) -> int:
        rank = self.rank()
        return min(T, key=rank.__getitem__)

    def distribution(self, T: frozenset, M: int) -> tuple:
        if sorted(self.order) != list(range(M)):
            raise DecodingError(f"order {list(self.order)} is not a permutation of {M} states")
        pick = self.choose(T)
        return tuple(Fraction(int(k == pick)) for k in range(M))


@dataclass(frozen=True)
class ExplicitTable:
    """A fixed decoding table used as-is, regardless of the tie structure."""

    table: "DecoderTable"


TieBreakRule = Union[Uniform, Weighted, FixedOrder]


@dataclass(frozen=True)
class DecoderTable:
    """``rows[b][i] = d(outputs[b], i)``; outputs cover ``Y^n`` in lexicographic order."""

    M: int
    outputs: tuple
    rows: tuple

    def __post_init__(self):
        if len(self.rows) != len(self.outputs):
            raise DecodingError("decoder table rows do not match outputs")
        checked = set()  # by identity: rule-derived tables share row objects
        for y, row in zip(self.outputs, self.rows):
            if id(row) in checked:
                continue
            checked.add(id(row))
            if len(row) != self.M:
                raise DecodingError(f"decoder row for {word_str(y)} has {len(row)} entries, expected {self.M}")
            if any(p < 0 for p in row):
                raise DecodingError(f"negative decoding probability at {word_str(y)}")
            if sum(row, Fraction(0)) != 1:
                raise DecodingError(
                    f"decoding probabilities at {word_str(y)} sum to {format_rational(sum(row, Fraction(0)))}"
                )

    @classmethod
    def from_mapping(cls, game: Game, entries: dict, default: Optional[int] = None) -> "DecoderTable":
        """Build from ``{word: {state: prob}}`` or ``{word: state}``.

        Every output word must appear unless ``default`` names a state to
        decode missing words as.
        """
        kernel = product_channel(game.channel, game.n)
        norm = {}
        for y, dist in entries.items():
            key = tuple(y) if not isinstance(y, str) else tuple(y)
            if isinstance(dist, int):
                dist = {dist: 1}
            norm[key] = {int(k): parse_rational(p) for k, p in dist.items()}
        unknown = set(norm) - set(kernel.outputs)
        if unknown:
            raise DecodingError(f"decoder names unknown output words {sorted(word_str(y) for y in unknown)}")
        rows = []
        for y in kernel.outputs:
            dist = norm.get(y)
            if dist is None:
                if default is None:
                    raise DecodingError(f"decoder table misses output word {word_str(y)}")
                dist = {default: Fraction(1)}
            bad = [k for k in dist if not 0 <= k < game.M]
            if bad:
                raise DecodingError(f"decoder names unknown states {bad}")
            rows.append(tuple(dist.get(k, Fraction(0)) for k in range(game.M)))
        return cls(game.M, tuple(kernel.outputs), tuple(rows))

    @classmethod
    def deterministic(cls, outputs: Sequence[Word], states: Sequence[int], M: int) -> "DecoderTable":
        rows = tuple(tuple(Fraction(int(k == s)) for k in range(M)) for s in states)
        return cls(M, tuple(outputs), rows)

    @property
    def index(self) -> dict:
        idx = self.__dict__.get("_index")
        if idx is None:
            idx = {y: b for b, y in enumerate(self.outputs)}
            object.__setattr__(self, "_index", idx)
        return idx

    def prob(self, y: Sequence[str], i: int) -> Fraction:
        return self.rows[self.index[tuple(y)]][i]

    def column(self, i: int) -> list:
        return [row[i] for row in self.rows]

    def integer_column(self, i: int) -> tuple:
        """``(ints, den)`` with ``d(outputs[b], i) == ints[b] / den``."""
        cache = self.__dict__.setdefault("_icols", {})
        hit = cache.get(i)
        if hit is None:
            col = self.column(i)
            den = 1
            for q in {p.denominator for p in col}:
                den = math.lcm(den, q)
            hit = ([p.numerator * (den // p.denominator) for p in col], den)
            cache[i] = hit
        return hit

    def is_deterministic(self) -> bool:
        return all(p in (0, 1) for row in self.rows for p in row)


def decoder_from_rule(structure: TieStructure, rule) -> DecoderTable:
    if isinstance(rule, ExplicitTable):
        if rule.table.outputs != structure.outputs or rule.table.M != structure.M:
            raise DecodingError("explicit table does not match the game's output space")
        return rule.table
    cache = {}
    rows = []
    for T in structure.ties:
        dist = cache.get(T)
        if dist is None:
            dist = cache[T] = rule.distribution(T, structure.M)
        rows.append(dist)
    return DecoderTable(structure.M, structure.outputs, tuple(rows))


def best_response_decoder(game: Game, code: Codebook, rule=None) -> DecoderTable:
    rule = FixedOrder.natural(game.M) if rule is None else rule
    return decoder_from_rule(tie_structure(game, code), rule)


class Check(NamedTuple):
    ok: bool
    witness: Optional[tuple] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def is_best_response(table: DecoderTable, structure: TieStructure) -> Check:
    """``d(y,i) > 0`` only for tied states ``i in T(y)``; witness is the first bad ``(y, i)``."""
    for y, row, T in zip(structure.outputs, table.rows, structure.ties):
        for i, p in enumerate(row):
            if p > 0 and i not in T:
                return Check(False, (y, i), "decodes outside the best-response set")
    return Check(True)


def is_monotonic(table: DecoderTable, structure: TieStructure) -> Check:
    """Decoding probability of ``i`` never grows as the tie set grows.

    Witness is the lexicographically least ``(y, y', i)`` with
    ``i in T(y) <= T(y')`` and ``d(y,i) < d(y',i)``.
    """
    br = is_best_response(table, structure)
    if not br:
        return Check(False, br.witness, "not a best response")
    # Group outputs by tie set: fast accept path.
    by_set: dict = {}
    for row, T in zip(table.rows, structure.ties):
        by_set.setdefault(T, set()).add(row)
    consistent = all(len(rows) == 1 for rows in by_set.values())
    if consistent:
        rep = {T: next(iter(rows)) for T, rows in by_set.items()}
        sets = list(rep)
        if all(
            rep[T][i] >= rep[U][i]
            for T in sets
            for U in sets
            if T <= U
            for i in T
        ):
            return Check(True)
    ties, rows = structure.ties, table.rows
    for a, y in enumerate(structure.outputs):
        T = ties[a]
        for b, y2 in enumerate(structure.outputs):
            U = ties[b]
            if not T <= U:
                continue
            for i in sorted(T):
                if rows[a][i] < rows[b][i]:
                    reason = "depends on more than the tie set" if T == U else "grows with the tie set"
                    return Check(False, (y, y2, i), reason)
    raise AssertionError("grouped monotonicity check disagreed with pairwise scan")


# --- general decoders over all nonempty subsets of states -----------------


def nonempty_subsets(M: int) -> list:
    """All nonempty subsets of ``range(M)``, by size then lexicographically."""
    return list(_subsets(M))


@functools.lru_cache(maxsize=None)
def _subsets(M: int) -> tuple:
    states = range(M)
    return tuple(frozenset(c) for r in range(1, M + 1) for c in itertools.combinations(states, r))


@functools.lru_cache(maxsize=None)
def _units(M: int) -> tuple:
    """Point masses on each state; shared so validation can skip them."""
    return tuple(tuple(Fraction(int(k == s)) for k in range(M)) for s in range(M))


@dataclass(frozen=True)
class GeneralDecoder:
    """Distribution ``d(T, .)`` for every nonempty ``T``, supported inside ``T``."""

    M: int
    by_set: tuple  # tuple of (frozenset, distribution) pairs, ordered as nonempty_subsets

    def __post_init__(self):
        sets = tuple(T for T, _ in self.by_set)
        if sets != _subsets(self.M) and (
            len(sets) != 2**self.M - 1 or sorted(sets, key=_set_key) != sorted(_subsets(self.M), key=_set_key)
        ):
            raise DecodingError("general decoder must be defined on every nonempty set of states")
        units = _units(self.M)
        for T, dist in self.by_set:
            if any(dist is units[k] for k in T):
                continue
            if len(dist) != self.M or sum(dist, Fraction(0)) != 1 or any(p < 0 for p in dist):
                raise DecodingError(f"d({_fmt_set(T)}, .) is not a distribution over {self.M} states")
            if any(p > 0 and k not in T for k, p in enumerate(dist)):
                raise DecodingError(f"d({_fmt_set(T)}, .) puts mass outside its set")

    @classmethod
    def from_rule(cls, rule, M: int) -> "GeneralDecoder":
        return cls(M, tuple((T, rule.distribution(T, M)) for T in nonempty_subsets(M)))

    @classmethod
    def from_choices(cls, M: int, choice: dict) -> "GeneralDecoder":
        """Deterministic decoder choosing ``choice[T]`` for each nonempty ``T``."""
        pairs = []
        for T in nonempty_subsets(M):
            if T not in choice:
                raise DecodingError(f"no choice given for {_fmt_set(T)}")
            s = choice[T]
            if s not in T:
                raise DecodingError(f"choice {s} lies outside {_fmt_set(T)}")
            pairs.append((T, _units(M)[s]))
        return cls(M, tuple(pairs))

    def dist(self, T: Iterable[int]) -> tuple:
        return self.as_dict()[frozenset(T)]

    def prob(self, T: Iterable[int], i: int) -> Fraction:
        return self.dist(T)[i]

    def as_dict(self) -> dict:
        d = self.__dict__.get("_dict")
        if d is None:
            d = dict(self.by_set)
            object.__setattr__(self, "_dict", d)
        return d

    def is_deterministic(self) -> bool:
        return all(p in (0, 1) for _, dist in self.by_set for p in dist)

    def choices(self) -> dict:
        if not self.is_deterministic():
            raise DecodingError("decoder is not deterministic")
        return {T: dist.index(1) for T, dist in self.by_set}

    def table_for(self, structure: TieStructure) -> DecoderTable:
        d = self.as_dict()
        return DecoderTable(structure.M, structure.outputs, tuple(d[T] for T in structure.ties))


def _set_key(T: frozenset) -> tuple:
    return (len(T), sorted(T))


def _fmt_set(T: Iterable[int]) -> str:
    return "{" + ",".join(str(k) for k in sorted(T)) + "}"


def general_monotonic_violation(g: GeneralDecoder) -> Optional[tuple]:
    """First ``(T, T', i)`` with ``i in T <= T'`` and ``d(T,i) < d(T',i)``, or None."""
    d = g.as_dict()
    sets = nonempty_subsets(g.M)
    for T in sets:
        for U in sets:
            if T <= U:
                for i in sorted(T):
                    if d[T][i] < d[U][i]:
                        return (T, U, i)
    return None


def deterministic_candidate_count(M: int) -> int:
    return math.prod(len(T) for T in nonempty_subsets(M))


def all_deterministic_general(M: int):
    """Every deterministic general decoder, as ``{T: chosen state}`` dicts."""
    sets = nonempty_subsets(M)
    for picks in itertools.product(*(sorted(T) for T in sets)):
        yield dict(zip(sets, picks))


def enumerate_general_deterministic_monotonic(M: int, max_states: int = DEFAULT_MAX_STATES) -> list:
    """All deterministic general decoders satisfying the subset monotonicity condition.

    Sets are assigned in order of increasing size; a choice ``s`` for ``T'``
    is kept only if ``d(T, s) = 1`` for every smaller ``T`` with
    ``s in T <= T'``, which is exactly the monotonicity condition restricted to
    the already-assigned sets.
    """
    if M < 1:
        raise DecodingError("need at least one state")
    if M > max_states:
        raise DecodingError(f"enumeration budget exceeded: M={M} > {max_states}")
    sets = nonempty_subsets(M)
    found = []
    choice: dict = {}

    def extend(pos: int) -> None:
        if pos == len(sets):
            found.append(GeneralDecoder.from_choices(M, choice))
            return
        U = sets[pos]
        for s in sorted(U):
            # d(T', s) = 1 forces d(T, s) = 1 for every T with s in T < T'.
            if all(choice[T] == s for T in sets[:pos] if s in T and T < U):
                # d(T', k) = 0 for k != s; smaller sets never need more than that.
                choice[U] = s
                extend(pos + 1)
                del choice[U]

    extend(0)
    if len(found) != math.factorial(M):
        raise AssertionError(f"found {len(found)} monotonic decoders, expected {math.factorial(M)}")
    return found


@dataclass(frozen=True)
class OrderCertificate:
    """Outcome of recovering a fixed order from a deterministic general decoder.

    Exactly one of ``order`` (success), ``cycle`` or ``violation`` is the
    primary result; a cycle always comes with the violation it implies.
    """

    order: Optional[tuple] = None
    cycle: Optional[tuple] = None
    violation: Optional[tuple] = None  # (T, T', i) with d(T,i)=0 < 1=d(T',i)

    @property
    def is_fixed_order(self) -> bool:
        return self.order is not None


def derive_fixed_order(g: GeneralDecoder) -> OrderCertificate:
    """Build ``i < j iff d({i,j}, i) = 1`` and check it explains every set."""
    choice = g.choices()
    M = g.M
    before = {(i, j): choice[frozenset((i, j))] == i for i in range(M) for j in range(M) if i != j}
    for i, j, k in itertools.combinations(range(M), 3):
        for a, b, c in ((i, j, k), (i, k, j)):
            if before[(a, b)] and before[(b, c)] and before[(c, a)]:
                s = choice[frozenset((a, b, c))]
                # predecessor of s on the cycle beats s in their pair
                pred = {a: c, b: a, c: b}[s]
                pair = frozenset((s, pred))
                return OrderCertificate(
                    cycle=(a, b, c), violation=(pair, frozenset((a, b, c)), s)
                )
    wins = {i: sum(before[(i, j)] for j in range(M) if j != i) for i in range(M)}
    order = tuple(sorted(range(M), key=lambda i: -wins[i]))
    rank = {k: r for r, k in enumerate(order)}
    for T in nonempty_subsets(M):
        s = choice[T]
        least = min(T, key=rank.__getitem__)
        if s != least:
            return OrderCertificate(violation=(frozenset((s, least)), T, s))
    return OrderCertificate(order=order)


def perturb_priors(game: Game, order: Sequence[int], delta: Fraction) -> Game:
    """Scale prior ``q_k`` by ``1 + (M-1-rank(k)) * delta`` and renormalize."""
    M = game.M
    rank = {k: r for r, k in enumerate(order)}
    raw = [q * (1 + (M - 1 - rank[k]) * Fraction(delta)) for k, q in enumerate(game.priors)]
    total = sum(raw, Fraction(0))
    return game.replace(priors=tuple(p / total for p in raw))


@dataclass
class PerturbationResult:
    delta: Fraction
    singleton: bool
    matches_fixed_order: bool
    steps: list = field(default_factory=list)


def generic_perturbation(
    game: Game,
    code: Codebook,
    order: Sequence[int],
    start: Fraction = Fraction(1, 10),
    max_halvings: int = 64,
) -> PerturbationResult:
    """Halve ``delta`` until the perturbed decoding is stable.

    Stops at the first ``delta`` whose unique decoder equals the decoder for
    ``delta / 2``; reports whether all tie sets became singletons and whether
    the decoder matches the fixed-order decoder of the unperturbed game.
    """
    base = tie_structure(game, code)
    target = decoder_from_rule(base, FixedOrder(tuple(order)))
    delta = Fraction(start)
    steps = []
    prev = None
    for _ in range(max_halvings):
        ts = tie_structure(perturb_priors(game, order, delta), code)
        steps.append((delta, ts.ties))
        if prev is not None and prev[1] == ts.ties:
            d, ties = prev
            single = all(len(T) == 1 for T in ties)
            table = DecoderTable.deterministic(
                ts.outputs, [min(T) for T in ties], game.M
            ) if single else None
            return PerturbationResult(d, single, table == target, steps)
        prev = (delta, ts.ties)
        delta /= 2
    raise DecodingError("perturbation did not stabilize")
