"""Working precision that each construction's round trip needs at radius-2 points.

Double precision loses the round trip as soon as intermediate values grow past
about 1e16 times the input; the mpmath route reports how many digits made the
residual vanish instead.
"""

import argparse
import time
import warnings

import numpy as np

from tameforge.autochain import round_trip_precise, round_trip_residual
from tameforge.composer import equivalence_chain, random_instance
from tameforge.errors import ConditioningWarning
from tameforge.numerics import sample_disc, sample_polydisc
from tameforge.products import gizatullin_chain, product_chain
from tameforge.sl2 import seq1_chain, seq2_chain
from tameforge.symplectic import PairLattice, axis_relabel, flatten_pairs_c4


def chains(rng):
    for K in (10, 30, 50):
        yield f"seq1 K={K}", seq1_chain(rng.choice(np.arange(1, 4 * K + 1), K, replace=False))
    for K in (10, 30):
        yield f"seq2 K={K}", seq2_chain(rng.choice(np.arange(1, 4 * K + 1), K, replace=False))
    yield "axis relabel n=2", axis_relabel(sample_disc(rng, 8, 3.0), sample_disc(rng, 8, 3.0), 2)
    for K in (2, 4, 6):
        yield f"flatten K={K}", flatten_pairs_c4(PairLattice(K))
    yield "product K=12", product_chain(rng.permutation(np.arange(1, 13)))
    yield "gizatullin m=1", gizatullin_chain(1, rng.permutation(np.arange(1, 6)))
    A, B = random_instance(rng, 4)
    yield "equivalence 4 pairs", equivalence_chain(A, B)[0]


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--radius", type=float, default=2.0)
    args = p.parse_args()
    warnings.simplefilter("ignore")
    rng = np.random.default_rng(args.seed)
    print(f"{'chain':<22} {'double':>10} {'precise':>10} {'digits':>7} {'sec':>6}")
    for label, ch in chains(rng):
        Z = sample_polydisc(np.random.default_rng(args.seed), 20, ch.dim, args.radius)
        start = time.perf_counter()
        residual, digits, _ = round_trip_precise(ch, Z)
        took = time.perf_counter() - start
        print(f"{label:<22} {round_trip_residual(ch, Z):>10.1e} {residual:>10.1e} {digits:>7} {took:>6.2f}")


if __name__ == "__main__":
    main()
