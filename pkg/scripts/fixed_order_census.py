"""Classify every deterministic decoder on subsets of M states: fixed order, 3-cycle, or other monotonicity failure."""

import math
import time
from collections import Counter
from dataclasses import dataclass

from _config import parse_config
from nashcode.decoding import GeneralDecoder, all_deterministic_general, derive_fixed_order, deterministic_candidate_count


@dataclass
class CensusConfig:
    max_states: int = 4


def main(argv=None):
    cfg = parse_config(CensusConfig, argv, __doc__.splitlines()[0])
    for M in range(1, cfg.max_states + 1):
        start = time.perf_counter()
        kinds = Counter()
        for choice in all_deterministic_general(M):
            cert = derive_fixed_order(GeneralDecoder.from_choices(M, choice))
            kinds["fixed order" if cert.is_fixed_order else "cycle" if cert.cycle else "violation"] += 1
        print(
            f"M={M}: {deterministic_candidate_count(M)} candidates, {kinds['fixed order']} fixed orders "
            f"(M! = {math.factorial(M)}), {kinds['cycle']} cycles, {kinds['violation']} other violations "
            f"[{time.perf_counter() - start:.2f}s]"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
