"""Exhaustive Nash check of every binary codebook under monotonic tie-breaking.

Example: python3 scripts/binary_sweep.py --states 4 --uses 3 --games 10 --orders 4
"""

import itertools
import random
import time
from dataclasses import dataclass
from fractions import Fraction

from _config import parse_config
from nashcode.binary import verify_binary_theorem
from nashcode.decoding import FixedOrder, Uniform, Weighted
from nashcode.instances import sample_binary_games


@dataclass
class SweepConfig:
    states: int = 4
    uses: int = 3
    games: int = 10
    orders: int = 4  # fixed orders sampled from all M! permutations
    weighted: int = 2  # random weight vectors
    seed: int = 0
    workers: int = 1


def rules_for(cfg):
    rng = random.Random(cfg.seed)
    perms = list(itertools.permutations(range(cfg.states)))
    rules = [Uniform()] + [FixedOrder(p) for p in rng.sample(perms, min(cfg.orders, len(perms)))]
    for _ in range(cfg.weighted):
        rules.append(Weighted(tuple(Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(cfg.states))))
    return rules


def main(argv=None):
    cfg = parse_config(SweepConfig, argv, __doc__.splitlines()[0])
    games = sample_binary_games(cfg.states, cfg.uses, cfg.games, seed=cfg.seed)
    rules = rules_for(cfg)
    start = time.perf_counter()
    report = verify_binary_theorem(games, rules, workers=cfg.workers)
    elapsed = time.perf_counter() - start
    print(
        f"M={cfg.states} n={cfg.uses}: {report.games} games x {report.codebooks} codebooks x "
        f"{len(rules)} rules = {report.checks} checks, {report.nash} Nash in {elapsed:.1f}s"
    )
    for label in report.rules:
        print("  rule", label)
    for ce in report.counterexamples[:10]:
        print("  counterexample", ce)
    return 0 if report.all_nash else 1


if __name__ == "__main__":
    raise SystemExit(main())
