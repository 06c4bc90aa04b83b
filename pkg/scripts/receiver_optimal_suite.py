"""Random small games: receiver-optimal, locally optimal and dynamics endpoints are Nash codes.

Also counts how often local search stops short of the global optimum.
"""

import random
import time
from collections import Counter
from dataclasses import dataclass

from _config import parse_config
from nashcode import check_nash
from nashcode.equilibrium import best_response_value
from nashcode.instances import random_instance
from nashcode.search import better_reply_dynamics, global_receiver_optimal, local_receiver_search


@dataclass
class SuiteConfig:
    instances: int = 200
    max_states: int = 3
    max_symbols: int = 3
    max_uses: int = 2
    max_denominator: int = 1000
    seed: int = 0


def main(argv=None):
    cfg = parse_config(SuiteConfig, argv, __doc__.splitlines()[0])
    tally = Counter()
    start = time.perf_counter()
    for k in range(cfg.instances):
        seed = cfg.seed + k
        rng = random.Random(seed)
        M, s, n = rng.randint(1, cfg.max_states), rng.randint(1, cfg.max_symbols), rng.randint(1, cfg.max_uses)
        inst = random_instance(seed, M, s, s, n, cfg.max_denominator)
        game = inst.game
        best, value = global_receiver_optimal(game)
        local, trace = local_receiver_search(game, inst.codebook)
        dyn, dtrace = better_reply_dynamics(game, inst.codebook)
        trace.check()
        dtrace.check()
        for name, code in (("global", best), ("local", local), ("dynamics", dyn)):
            tally[f"{name} Nash"] += check_nash(game, code).is_nash
        tally["local below global"] += best_response_value(game, local) < value
        tally["local moves"] += trace.moves
        tally["dynamics moves"] += dtrace.moves
    elapsed = time.perf_counter() - start
    print(f"{cfg.instances} instances in {elapsed:.1f}s")
    for key in sorted(tally):
        print(f"  {key:<20} {tally[key]}")
    ok = all(tally[f"{n} Nash"] == cfg.instances for n in ("global", "local", "dynamics"))
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
