"""Bad-direction census over subspaces of growing dimension, at several lambda values."""
import argparse
import csv
import math
import sys
from dataclasses import dataclass, field

from anticonc.fourier import EntropyParams, solve_parameters, tech_census
from anticonc.vertex_sets import random_subspace


@dataclass
class CensusConfig:
    n: int = 12
    theta: float = 0.125
    lams: list[float] = field(default_factory=lambda: [0.02, 0.05, 0.1])
    # the instantiated c is tiny at small lambda; c_override probes a
    # constant large enough for the census to register violations
    c_override: float | None = None
    seed: int = 0


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=CensusConfig.n)
    ap.add_argument("--theta", type=float, default=CensusConfig.theta)
    ap.add_argument("--lam", type=float, action="append")
    ap.add_argument("--c", type=float, default=None)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    cfg = CensusConfig(args.n, args.theta, args.lam or CensusConfig().lams, args.c, args.seed)

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["lambda", "dim", "c", "tested", "violations", "log2_violations", "log2_bound"])
    for lam in cfg.lams:
        p = solve_parameters(lam)
        if cfg.c_override is not None:
            p = EntropyParams(p.lam, p.kappa, p.tau, c=cfg.c_override)
        for dim in range(2, cfg.n + 1, 2):
            res = tech_census(random_subspace(cfg.n, dim, cfg.seed), cfg.theta, p)
            log_v = math.log2(res.violations) if res.violations else float("-inf")
            w.writerow([lam, dim, p.c, res.tested, res.violations, log_v, math.log2(res.bound)])


if __name__ == "__main__":
    main()
