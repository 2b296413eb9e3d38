"""Success rates of the sampling protocol against the gap k, with Wilson intervals."""
import argparse
import csv
import sys
from dataclasses import dataclass

from anticonc.protocols import default_rounds, estimate_success, sampling_decider


@dataclass
class RateConfig:
    n: int = 100
    trials: int = 2000
    seed: int = 0
    jobs: int = 1
    round_scale: float = 1.0  # multiplies the default number of sampled coordinates


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=RateConfig.n)
    ap.add_argument("--trials", type=int, default=RateConfig.trials)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--round-scale", type=float, default=1.0)
    a = ap.parse_args(argv)
    cfg = RateConfig(a.n, a.trials, a.seed, a.jobs, a.round_scale)

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "k", "m", "rate", "aborts", "ci_low", "ci_high"])
    for k in range(cfg.n % 2 + 2, cfg.n + 1, max(2, cfg.n // 10)):
        m = max(1, round(cfg.round_scale * default_rounds(cfg.n, k)))
        est = estimate_success(sampling_decider(m=m), cfg.n, k, trials=cfg.trials,
                               seed=cfg.seed, jobs=cfg.jobs)
        w.writerow([cfg.n, k, m, est.rate, est.aborts, *est.ci])


if __name__ == "__main__":
    main()
