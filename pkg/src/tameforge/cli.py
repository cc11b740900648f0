"""``tameforge <command>``: build one construction, verify it, print a JSON report.

Exit status is 0 when every check passes (checks flagged ``expected_fail``
must fail instead), 1 on a failed check or construction error, 2 on a bad
configuration.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import __version__
from .autochain import (VerificationReport, chain_to_dict, check_symplectic,
                        round_trip_residual, tame_action_residual)
from .composer import equivalence_chain, random_instance, verify_equivalence
from .errors import ConfigError, TameforgeError
from .numerics import ToleranceConfig, sample_disc
from .products import (FIELD_INDEX, KRVariety, gizatullin_chain, kr_flow, kr_residual, lattice_points,
                       product_chain, sample_kr_cubic, PRODUCT_MAX_K, EXP_ARG_CAP)
from .sl2 import (PrimeMask, check_injection, oka_rank, sample_sl2, seq1_chain, seq1_images, seq2_chain,
                  seq2_images, unipotent_points, diagonal_points, verify_sl2_chain)
from .symplectic import (PairLattice, axis_points, axis_relabel, fiber_lift_chain, flatten_pairs_c4,
                         tame_c4_projection, verify_flatten)

COMMANDS = ("seq1", "seq2", "sympl-axis", "fiber-lift", "flatten-c4", "tame-c4", "product",
            "gizatullin", "kr-flow", "equivalence", "oka-rank")

# (default K, largest K) per command
K_LIMITS = {
    "seq1": (10, 60),
    "seq2": (10, 30),
    "sympl-axis": (8, 60),
    "fiber-lift": (6, 60),
    "flatten-c4": (4, 6),
    "tame-c4": (6, 30),
    "product": (5, PRODUCT_MAX_K),
    "gizatullin": (3, EXP_ARG_CAP),
    "kr-flow": (20, 1000),
    "equivalence": (3, 8),
    "oka-rank": (30, 200),
}


@dataclass(frozen=True)
class RunConfig:
    command: str
    K: int
    seed: int = 0
    injection: str = "identity"
    mode: str = "corrected"
    m: int = 0
    n: int = 2
    preset: str = "kr-cubic"
    eps: float = 0.5
    tol: ToleranceConfig = ToleranceConfig()
    out: str | None = None

    def as_dict(self) -> dict:
        return {"command": self.command, "K": self.K, "seed": self.seed, "injection": self.injection,
                "mode": self.mode, "m": self.m, "n": self.n, "preset": self.preset, "eps": self.eps,
                "tol": self.tol.as_dict()}


def parse_injection(text: str, K: int, seed: int, upper: int) -> list:
    """``identity``, ``random`` (K distinct values from ``1..upper``) or an explicit comma list."""
    if text == "identity":
        return list(range(1, K + 1))
    if text == "random":
        rng = np.random.default_rng(seed)
        return [int(x) for x in rng.choice(np.arange(1, upper + 1), size=K, replace=False)]
    try:
        ell = [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"injection must be 'identity', 'random' or a comma list: {text!r}") from exc
    if len(ell) != K:
        raise ConfigError(f"explicit injection has {len(ell)} entries but K = {K}")
    try:
        return check_injection(ell)
    except TameforgeError as exc:
        raise ConfigError(str(exc)) from exc


# --- runners: each returns (report, chain or None, extra report fields) -----

def _sl2(cfg: RunConfig, build, images, points):
    ell = parse_injection(cfg.injection, cfg.K, cfg.seed, 4 * cfg.K)
    chain = build(ell)
    pts = points(np.arange(1, cfg.K + 1))
    rep = verify_sl2_chain(chain, pts, images(ell), cfg.tol, seed=cfg.seed)
    return rep, chain, {"injection": ell}


def run_seq1(cfg):
    return _sl2(cfg, seq1_chain, seq1_images, unipotent_points)


def run_seq2(cfg):
    return _sl2(cfg, seq2_chain, seq2_images, diagonal_points)


def run_sympl_axis(cfg):
    rng = np.random.default_rng(cfg.seed)
    alpha = sample_disc(rng, cfg.K, 3.0)
    beta = sample_disc(rng, cfg.K, 3.0)
    chain = axis_relabel(alpha, beta, cfg.n)
    rep = VerificationReport(chain.name, sample_seed=cfg.seed, config=cfg.tol)
    rep.add("tame_action", tame_action_residual(chain, axis_points(alpha, cfg.n), axis_points(beta, cfg.n)),
            cfg.tol.residual_tol)
    rep.extend(check_symplectic(chain, cfg.n, cfg.tol, seed=cfg.seed))
    return rep, chain, {}


def run_fiber_lift(cfg):
    rng = np.random.default_rng(cfg.seed)
    b = sample_disc(rng, cfg.K, 3.0)
    dim = 2 * cfg.n
    targets = sample_disc(rng, cfg.K * dim, 3.0).reshape(cfg.K, dim)
    targets[:, 0] = b
    chain = fiber_lift_chain(b, targets, cfg.n)
    rep = VerificationReport(chain.name, sample_seed=cfg.seed, config=cfg.tol)
    rep.add("tame_action", tame_action_residual(chain, axis_points(b, cfg.n), targets), cfg.tol.residual_tol)
    rep.extend(check_symplectic(chain, cfg.n, cfg.tol, seed=cfg.seed))
    return rep, chain, {}


def run_flatten_c4(cfg):
    if cfg.mode not in ("corrected", "paper"):
        raise ConfigError("--mode must be 'corrected' or 'paper'")
    lattice = PairLattice(cfg.K)
    chain = flatten_pairs_c4(lattice, cfg.mode)
    return verify_flatten(chain, lattice, cfg.mode, cfg.tol, seed=cfg.seed), chain, {}


def run_tame_c4(cfg):
    rng = np.random.default_rng(cfg.seed)
    A = sample_disc(rng, 4 * cfg.K, 2.0).reshape(cfg.K, 4)
    chain = tame_c4_projection(A, seed=cfg.seed)
    img = chain.apply(A)
    rep = VerificationReport(chain.name, sample_seed=cfg.seed, config=cfg.tol)
    lattice_gap = np.max(np.abs(img[:, :2] - np.round(img[:, :2].real)))
    rep.add("lattice_target", max(lattice_gap, np.max(np.abs(img[:, 2:]))), cfg.tol.residual_tol)
    rep.extend(check_symplectic(chain, 2, cfg.tol, seed=cfg.seed))
    return rep, chain, {}


def run_product(cfg):
    ell = parse_injection(cfg.injection, cfg.K, cfg.seed, 2 * cfg.K)
    chain = product_chain(ell)
    pts = lattice_points(np.arange(1, cfg.K + 1))
    rep = VerificationReport(chain.name, sample_seed=cfg.seed, config=cfg.tol)
    rep.add("tame_action", tame_action_residual(chain, pts, lattice_points(ell)), cfg.tol.residual_tol)
    rep.add("round_trip", round_trip_residual(chain, pts), 1e-9)
    return rep, chain, {"injection": ell}


def run_gizatullin(cfg):
    ell = parse_injection(cfg.injection, cfg.K, cfg.seed, cfg.K + 2)
    chain = gizatullin_chain(cfg.m, ell)
    pts = lattice_points(np.arange(1, cfg.K + 1))
    rep = VerificationReport(chain.name, sample_seed=cfg.seed, config=cfg.tol)
    rep.add("tame_action", tame_action_residual(chain, pts, lattice_points(ell)), 1e-7)
    return rep, chain, {"injection": ell}


def run_kr_flow(cfg):
    try:
        var = KRVariety.preset(cfg.preset)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    rng = np.random.default_rng(cfg.seed)
    P = sample_kr_cubic(rng, cfg.K)
    s = sample_disc(rng, cfg.K, 1.0)
    t = sample_disc(rng, cfg.K, 1.0)
    rep = VerificationReport(f"kr_flow:{cfg.preset}", sample_seed=cfg.seed, config=cfg.tol)
    worst = max(kr_residual(kr_flow(f, t, P, var), var) for f in FIELD_INDEX)
    rep.add("on_variety", worst, 1e-7)
    vw = kr_flow("V", s, kr_flow("W", t, P, var), var)
    wv = kr_flow("W", t, kr_flow("V", s, P, var), var)
    rep.add("commutation", np.max(np.abs(vw - wv)), 1e-7)
    law = max(np.max(np.abs(kr_flow(f, s, kr_flow(f, t, P, var), var) - kr_flow(f, s + t, P, var)))
              for f in FIELD_INDEX)
    rep.add("group_law", law, 1e-8)
    return rep, None, {"variety": var.to_params()}


def run_equivalence(cfg):
    rng = np.random.default_rng(cfg.seed)
    A, B = random_instance(rng, cfg.K)
    chain, logs = equivalence_chain(A, B, cfg.eps, 2.0, cfg.tol, seed=cfg.seed)
    rep = verify_equivalence(chain, logs, A, B, cfg.tol, seed=cfg.seed)
    return rep, chain, {"stages": [log.to_dict() for log in logs]}


def run_oka_rank(cfg):
    mask = PrimeMask(cfg.K)
    rep = VerificationReport("oka_rank", sample_seed=cfg.seed, config=cfg.tol)
    k = np.asarray(mask.primes, dtype=complex)
    on_mask = [oka_rank(np.array([1 - p, p, -p, 1 + p]), mask) for p in k]
    rep.add("rank_on_mask", max(on_mask, default=0), 0)
    rep.add("rank_at_identity", abs(oka_rank(np.array([1, 0, 0, 1], dtype=complex), mask) - 3), 0)
    generic = sample_sl2(np.random.default_rng(cfg.seed), 5, 0.5)
    rep.add("rank_generic", max(abs(oka_rank(M, mask) - 3) for M in generic), 0)
    return rep, None, {"primes": mask.primes}


RUNNERS = {
    "seq1": run_seq1, "seq2": run_seq2, "sympl-axis": run_sympl_axis, "fiber-lift": run_fiber_lift,
    "flatten-c4": run_flatten_c4, "tame-c4": run_tame_c4, "product": run_product,
    "gizatullin": run_gizatullin, "kr-flow": run_kr_flow, "equivalence": run_equivalence,
    "oka-rank": run_oka_rank,
}


def _number(x):
    """JSON has no infinity; non-finite residuals are written as strings."""
    x = float(x)
    return x if math.isfinite(x) else str(x)


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return _number(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def run(cfg: RunConfig) -> tuple[int, dict]:
    """Run one construction; returns the exit code and the report."""
    report = {"construction": cfg.command, "config": cfg.as_dict(), "checks": [], "chain": {},
              "seed": cfg.seed, "version": __version__}
    try:
        with warnings.catch_warnings(), np.errstate(all="ignore"):
            warnings.simplefilter("ignore")
            rep, chain, extra = RUNNERS[cfg.command](cfg)
    except ConfigError:
        raise
    except (TameforgeError, ArithmeticError, ValueError) as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        return 1, _clean(report)
    report["checks"] = [c.to_dict() for c in rep.checks]
    if chain is not None:
        report["chain"] = chain_to_dict(chain)
    report.update(extra)
    return (0 if rep.passed else 1), _clean(report)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tameforge", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--k", type=int, help="number of points (prime cutoff for oka-rank)")
    p.add_argument("--points", type=int, help="alias of --k for equivalence")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--injection", default="identity", help="identity | random | comma list")
    p.add_argument("--tol", type=float, help="residual tolerance (overrides TAMEFORGE_TOL)")
    p.add_argument("--mode", default="corrected", help="flatten-c4: corrected | paper")
    p.add_argument("--m", type=int, default=0, help="gizatullin exponent")
    p.add_argument("--n", type=int, default=2, help="half dimension for sympl-axis and fiber-lift")
    p.add_argument("--preset", default="kr-cubic")
    p.add_argument("--eps", type=float, default=0.5, help="equivalence: first stage tolerance")
    p.add_argument("--out", help="write the report here instead of stdout")
    return p


def config_from_args(ns) -> RunConfig:
    try:
        tol = ToleranceConfig.from_env()
    except ValueError as exc:
        raise ConfigError(f"TAMEFORGE_TOL is not a number: {exc}") from exc
    if ns.tol is not None:
        if not ns.tol > 0:
            raise ConfigError("--tol must be positive")
        tol = replace(tol, residual_tol=ns.tol)
    default_k, cap = K_LIMITS[ns.command]
    K = ns.points if ns.points is not None else ns.k
    K = default_k if K is None else K
    if not 1 <= K <= cap:
        raise ConfigError(f"{ns.command}: K must lie in 1..{cap}, got {K}")
    if ns.m < 0:
        raise ConfigError("--m must be non-negative")
    if ns.n < 1:
        raise ConfigError("--n must be at least 1")
    if not ns.eps > 0:
        raise ConfigError("--eps must be positive")
    return RunConfig(command=ns.command, K=K, seed=ns.seed, injection=ns.injection, mode=ns.mode, m=ns.m,
                     n=ns.n, preset=ns.preset, eps=ns.eps, tol=tol, out=ns.out)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
        code, report = run(cfg)
    except ConfigError as exc:
        print(json.dumps({"error": {"type": "ConfigError", "message": str(exc)}}), file=sys.stderr)
        return 2
    text = json.dumps(report, indent=2)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
