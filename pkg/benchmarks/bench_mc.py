"""Time the numba and numpy session kernels on the same workload.

    python benchmarks/bench_mc.py --sessions 1000 10000 --repeat 3

Compilation is excluded from the numba timings by a warm-up call; the
first-call time is reported separately. Outputs of both kernels are
checked for bit equality before timing.
"""

import argparse
import time

import numpy as np

from labbubble import FactorPopulation, HeteroPopulation, MarketSpec, StrategyParams, speculative_asset, value_asset
from labbubble.mc import SimulationConfig, simulate

WORKLOADS = {
    "noise N=100": lambda m: SimulationConfig(MarketSpec(15, (speculative_asset(phi=0.01),)),
                                             FactorPopulation(100, 0, 0), m),
    "factor 2 assets": lambda m: SimulationConfig(MarketSpec(15, (speculative_asset(phi=0.01), value_asset(kappa=2))),
                                                 FactorPopulation(50, 25, 25), m),
    "hetero N=60": lambda m: SimulationConfig(MarketSpec(15, (speculative_asset(),)), HeteroPopulation(50, 6, 4), m,
                                             strategy=StrategyParams()),
}


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sessions", type=int, nargs="+", default=[1000, 10000])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    t0 = time.perf_counter()
    simulate(WORKLOADS["noise N=100"](2), "numba")
    print(f"numba first call (compile or cache load): {time.perf_counter() - t0:.2f}s")

    print(f"{'workload':<18}{'sessions':>10}{'numba s':>10}{'numpy s':>10}{'numpy/numba':>13}  identical")
    for name, make in WORKLOADS.items():
        for m in args.sessions:
            cfg = make(m)
            a, b = simulate(cfg, "numba"), simulate(cfg, "numpy")
            same = np.array_equal(a.sum_bid_quotes, b.sum_bid_quotes) and np.array_equal(a.anchor, b.anchor)
            t_nb = best_of(lambda: simulate(cfg, "numba"), args.repeat)
            t_np = best_of(lambda: simulate(cfg, "numpy"), args.repeat)
            print(f"{name:<18}{m:>10}{t_nb:>10.3f}{t_np:>10.3f}{t_np / t_nb:>13.2f}  {same}")


if __name__ == "__main__":
    main()
