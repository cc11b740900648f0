"""Residuals of the SL2 sequence interpolators as the number of points grows."""

import argparse
import time
import warnings

import numpy as np

from tameforge.errors import ConditioningWarning
from tameforge.sl2 import (det_residual, diagonal_points, haar_residual, seq1_chain, seq1_images, seq2_chain,
                           seq2_images, unipotent_points)
from tameforge.autochain import tame_action_residual

BUILDERS = {
    "seq1": (seq1_chain, seq1_images, unipotent_points),
    "seq2": (seq2_chain, seq2_images, diagonal_points),
}


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--which", choices=sorted(BUILDERS), default="seq1")
    p.add_argument("--sizes", default="5,10,20,30,40,50")
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--spread", type=int, default=4, help="injections draw from 1..spread*K")
    args = p.parse_args()
    build, images, points = BUILDERS[args.which]
    warnings.simplefilter("ignore", ConditioningWarning)
    print(f"{'K':>4} {'tame':>10} {'det':>10} {'haar':>10} {'sec/run':>8}")
    for K in (int(k) for k in args.sizes.split(",")):
        tame = det = haar = 0.0
        start = time.perf_counter()
        for seed in range(args.seeds):
            ell = np.random.default_rng(seed).choice(np.arange(1, args.spread * K + 1), K, replace=False)
            ch = build(ell)
            pts = points(range(1, K + 1))
            tame = max(tame, tame_action_residual(ch, pts, images(ell)))
            det = max(det, det_residual(ch.apply(pts)))
            haar = max(haar, haar_residual(ch, points=pts))
        per = (time.perf_counter() - start) / args.seeds
        print(f"{K:>4} {tame:>10.2e} {det:>10.2e} {haar:>10.2e} {per:>8.3f}")


if __name__ == "__main__":
    main()
