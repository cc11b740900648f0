"""How many damping nodes each composer stage needs, and how close it comes to its budget."""

import argparse
import warnings
from collections import Counter

import numpy as np

from tameforge.composer import equivalence_chain, random_instance
from tameforge.errors import ConditioningWarning, TameforgeError


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--points", type=int, default=4)
    p.add_argument("--seeds", type=int, default=40)
    p.add_argument("--inner", type=float, default=2.0, help="radius of the first box")
    p.add_argument("--ratio", type=float, default=2.0, help="growth of the instance shells")
    p.add_argument("--eps", type=float, default=0.5)
    args = p.parse_args()
    warnings.simplefilter("ignore", ConditioningWarning)
    np.seterr(all="ignore")  # failed routes overflow before they are discarded
    nodes, shears, failures = Counter(), Counter(), []
    margins = []
    for seed in range(args.seeds):
        A, B = random_instance(np.random.default_rng(seed), args.points, args.inner, args.ratio)
        try:
            _, logs = equivalence_chain(A, B, args.eps, 2.0, seed=seed, base_radius=args.inner)
        except TameforgeError as exc:
            failures.append((seed, type(exc).__name__, str(exc)))
            continue
        for log in logs:
            nodes[log.damping_nodes_used] += 1
            shears[log.shears] += 1
            margins.append(log.measured_deviation / log.epsilon_target)
    print(f"instances: {args.seeds}, failed: {len(failures)}")
    print("damping nodes per stage:", dict(sorted(nodes.items())))
    print("shears per stage:", dict(sorted(shears.items())))
    if margins:
        print(f"deviation / budget: median {np.median(margins):.3f}, max {np.max(margins):.3f}")
    for seed, kind, msg in failures:
        print(f"  seed {seed}: {kind}: {msg}")


if __name__ == "__main__":
    main()
