"""Graph isomorphism on orbit graphs: all 4-node classes, orbit sizes and gaps.

    python3 scripts/iso_classes.py --trials 20
"""

import argparse
import itertools
import math

from qwseed import graph as G
from qwseed.iso import (
    ISOMORPHIC,
    NON_ISOMORPHIC,
    LabeledGraph,
    automorphism_count,
    build_permutation_graph,
    decide_isomorphic,
    gap_lower_bound,
    isomorphism_classes,
    permutation_graph_gap,
)
from qwseed.sampler import SamplerConfig


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--epsilon", type=float, default=0.05)
    args = ap.parse_args()

    print(f"{'graph':<10} {'|V|':>5} {'n!/|Aut|':>9} {'gap':>7} {'c/(n ln n)':>11}")
    for n in (3, 4, 5, 6):
        for name, g in (("path", G.path(n)), ("star", G.star(n)), ("cycle", G.cycle(n))):
            lg = LabeledGraph.from_graph(g)
            pg = build_permutation_graph(lg)
            print(
                f"{name}{n:<6} {pg.n:>5} {math.factorial(n) // automorphism_count(lg):>9} "
                f"{permutation_graph_gap(pg):>7.4f} {gap_lower_bound(n):>11.4f}"
            )

    classes = isomorphism_classes(4)
    worst = 1.0
    for a, b in itertools.combinations_with_replacement(range(len(classes)), 2):
        g1 = classes[a]
        g2 = classes[b].permuted((2, 0, 3, 1))  # compare against a relabeled copy
        truth = ISOMORPHIC if a == b else NON_ISOMORPHIC
        ok = 0
        for seed in range(args.trials):
            cfg = SamplerConfig(gamma=1.0, epsilon=args.epsilon, rng_seed=seed)
            ok += decide_isomorphic(g1, g2, None, args.epsilon, cfg).decision == truth
        worst = min(worst, ok / args.trials)
    print(f"4-node classes: {len(classes)}; worst pairwise success {worst:.2f}")


if __name__ == "__main__":
    main()
