"""st-connectivity: quantum SWAP-test decision vs the classical birthday baseline.

Runs connected and disconnected instances, reports empirical success rates,
then compares query growth on odd cycles.

    python3 scripts/stconn_suite.py --trials 100
"""

import argparse

import numpy as np

from qwseed import graph as G
from qwseed.experiments import ExperimentPlan, FamilySpec, fit_scaling, run_plan
from qwseed.graph import QueryLedger
from qwseed.sampler import SamplerConfig, component_info
from qwseed.stconn import CONNECTED, DISCONNECTED, classical_birthday_st, decide_st


def instances():
    yield "C5 adjacent", G.cycle(5), 0, 1, CONNECTED
    yield "C31 antipodal", G.cycle(31), 0, 15, CONNECTED
    yield "Petersen", G.petersen(), 0, 7, CONNECTED
    yield "K6", G.complete(6), 1, 4, CONNECTED
    yield "RR(64,3)", G.random_regular(64, 3, 11), 3, 40, CONNECTED
    yield "C5+C5", G.disjoint_union(G.cycle(5), G.cycle(5)), 0, 7, DISCONNECTED
    yield "C7+K4", G.disjoint_union(G.cycle(7), G.complete(4)), 2, 9, DISCONNECTED
    yield "RR(32)+RR(32)", G.disjoint_union(G.random_regular(32, 3, 1), G.random_regular(32, 3, 2)), 0, 40, DISCONNECTED


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--epsilon", type=float, default=0.05)
    args = ap.parse_args()
    print(f"{'instance':<16} {'truth':<13} {'quantum':>8} {'birthday':>9}")
    for name, g, s, t, truth in instances():
        gamma = min(component_info(g, s).spectral_gap, component_info(g, t).spectral_gap)
        q = b = 0
        for seed in range(args.trials):
            cfg = SamplerConfig(gamma=gamma, epsilon=args.epsilon, rng_seed=seed)
            q += decide_st(g, s, t, gamma, args.epsilon, cfg).decision == truth
            rng = np.random.default_rng(seed)
            b += classical_birthday_st(g, s, t, gamma, QueryLedger(), rng, args.epsilon).decision == truth
        print(f"{name:<16} {truth:<13} {q / args.trials:>8.2f} {b / args.trials:>9.2f}")
    plan = ExperimentPlan(
        family=FamilySpec("cycle", (31, 63, 127, 255)),
        seeds=tuple(range(20)),
        algorithms=("stconn", "classical_birthday"),
        epsilon=args.epsilon,
    )
    fits = fit_scaling(run_plan(plan), size_metric="n")
    for alg, f in fits.items():
        print(f"cycles: {alg:<20} {f.cost_metric:<17} slope {f.slope:.3f}  medians {[int(y) for _, y in f.points]}")


if __name__ == "__main__":
    main()
