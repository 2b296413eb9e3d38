"""r_ell counts, R_C and mu_C for distinct, Sidon and constant difference profiles."""
import argparse
import csv
import sys
from dataclasses import dataclass

from anticonc.halasz import HalaszParams, halasz_R, mian_chowla, mu_C


@dataclass
class StructureConfig:
    n_values: tuple[int, ...] = (8, 12, 16, 24, 32)
    C: float = 1.0
    ell_max: int = 2


def profiles(n: int) -> dict[str, tuple[int, ...]]:
    return {"sidon": mian_chowla(n), "distinct": tuple(range(1, n + 1)), "constant": (1,) * n}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--C", type=float, default=StructureConfig.C)
    ap.add_argument("--ell-max", type=int, default=StructureConfig.ell_max)
    args = ap.parse_args(argv)
    cfg = StructureConfig(C=args.C, ell_max=args.ell_max)
    params = HalaszParams(C=cfg.C, ell_max=cfg.ell_max)

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["profile", "n", "R_C", "argmin_ell", "mu_C", "nu_star"])
    for n in cfg.n_values:
        for name, d in profiles(n).items():
            R, ell = halasz_R(d, params)
            mu = mu_C(d, params)
            w.writerow([name, n, R, ell, mu.mu, mu.nu])


if __name__ == "__main__":
    main()
