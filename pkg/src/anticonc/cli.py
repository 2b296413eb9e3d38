"""Command-line driver.  Each subcommand writes one CSV and, on request, a JSON sidecar.

Exit status: 0 ok, 2 invalid input, 3 size beyond the exhaustive cap.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .exact_dist import (
    concentration_probability,
    direction_distribution,
    pair_distribution,
    smoothness_gap,
)
from .fourier import (
    CENSUS_HEADER,
    DEFAULT_NODES,
    smoothness_rhs,
    solve_parameters,
    star_bound,
    tech_census,
)
from .halasz import (
    STRUCTURE_HEADER,
    HalaszParams,
    default_nu_grid,
    halasz_R,
    mian_chowla,
    mu_C,
    structure_rows,
)
from .protocols import (
    PROTOCOLS,
    default_abort_threshold,
    default_rounds,
    estimate_success,
    protocol_csv,
)
from .vertex_sets import (
    InfeasibleError,
    SpecError,
    TwoCube,
    VertexSet,
    materialize,
    parse_set_spec,
    parse_sign_string,
    decode,
)

FOURIER_HEADER = ["quantity", "value", "eps_quad", "nodes", "exact"]
MU_HEADER = ["n", "C", "ell_max", "R_C", "argmin_ell", "mu_C", "nu_star"]
PARAMS_HEADER = ["lambda", "kappa", "tau", "c", "delta"]


@dataclass
class ExperimentConfig:
    """Every input of one run; ``asdict`` / ``from_dict`` round-trip exactly."""

    command: str
    a: str | None = None
    b: str | None = None
    x: str | None = None
    sidon: int | None = None
    theta: float = 0.125
    lam: float = 0.05
    mode: str = "exhaustive"
    count: int = 1000
    nodes: int = DEFAULT_NODES
    C: float = 1.0
    ell_max: int = 2
    nu_grid: list[float] = field(default_factory=lambda: list(default_nu_grid()))
    protocol: str = "mod4"
    n: int | None = None
    k: int | None = None
    m: int | None = None
    beta: float = 0.2
    trials: int = 1000
    exhaustive: bool = False
    seed: int = 0
    jobs: int = 1
    out: str | None = None
    json: str | None = None

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return v


def _parse_vector(text: str) -> np.ndarray:
    """'+-+' sign strings or comma-separated integers."""
    if set(text) <= {"+", "-"}:
        return decode(parse_sign_string(text), len(text)).astype(np.int64)
    try:
        return np.array([int(t) for t in text.split(",")], dtype=np.int64)
    except ValueError:
        raise ValueError(f"cannot parse vector {text!r}") from None


def _need(cfg: ExperimentConfig, *names: str) -> None:
    missing = [n for n in names if getattr(cfg, n) is None]
    if missing:
        raise ValueError(f"{cfg.command}: missing --{', --'.join(missing)}")


def _vertex_set(text: str, seed: int) -> VertexSet:
    obj = materialize(parse_set_spec(text), seed)
    if isinstance(obj, TwoCube):
        raise ValueError(f"{text!r} is a two-cube, expected a subset of the cube")
    return obj


def _differences(cfg: ExperimentConfig) -> tuple[int, ...]:
    if cfg.sidon is not None:
        return mian_chowla(cfg.sidon)
    _need(cfg, "a")
    obj = materialize(parse_set_spec(cfg.a), cfg.seed)
    if not isinstance(obj, TwoCube):
        raise ValueError("--a must be a twocube:@<path> spec")
    return obj.differences


# ---------------------------------------------------------------------------
# subcommands; each returns the CSV text
# ---------------------------------------------------------------------------

def run_dist(cfg: ExperimentConfig) -> str:
    _need(cfg, "b")
    B = _vertex_set(cfg.b, cfg.seed)
    if cfg.x is not None:
        d = direction_distribution(_parse_vector(cfg.x), B)
    else:
        _need(cfg, "a")
        d = pair_distribution(_vertex_set(cfg.a, cfg.seed), B)
    p = concentration_probability(d)
    print(f"concentration {p.numerator}/{p.denominator} = {float(p):.6g}", file=sys.stderr)
    return d.to_csv()


def run_fourier(cfg: ExperimentConfig) -> str:
    _need(cfg, "x", "b")
    x = _parse_vector(cfg.x)
    B = _vertex_set(cfg.b, cfg.seed)
    d = direction_distribution(x, B)
    star = star_bound(x, d, cfg.nodes)
    smooth = smoothness_rhs(x, d, cfg.nodes)
    conc = concentration_probability(d)
    gap = smoothness_gap(d, 4)
    rows = [
        ["star_bound", star.value, star.eps_quad, star.nodes, f"{conc.numerator}/{conc.denominator}"],
        ["smoothness_rhs", smooth.value, smooth.eps_quad, smooth.nodes, f"{gap.numerator}/{gap.denominator}"],
    ]
    return _rows_to_csv(FOURIER_HEADER, rows)


def run_census(cfg: ExperimentConfig) -> str:
    _need(cfg, "b")
    B = _vertex_set(cfg.b, cfg.seed)
    params = solve_parameters(cfg.lam)
    res = tech_census(B, cfg.theta, params, mode=cfg.mode, seed=cfg.seed, count=cfg.count)
    return _rows_to_csv(CENSUS_HEADER, [res.csv_row()])


def _halasz_params(cfg: ExperimentConfig) -> HalaszParams:
    return HalaszParams(cfg.C, cfg.ell_max, tuple(cfg.nu_grid))


def run_structure(cfg: ExperimentConfig) -> str:
    return _rows_to_csv(STRUCTURE_HEADER, structure_rows(_differences(cfg), _halasz_params(cfg)))


def run_mu(cfg: ExperimentConfig) -> str:
    d = _differences(cfg)
    params = _halasz_params(cfg)
    R, ell = halasz_R(d, params)
    mu = mu_C(d, params)
    return _rows_to_csv(MU_HEADER, [[len(d), float(cfg.C), cfg.ell_max, R, ell, mu.mu, mu.nu]])


def run_protocol(cfg: ExperimentConfig) -> str:
    _need(cfg, "n", "k")
    if cfg.protocol not in PROTOCOLS:
        raise ValueError(f"unknown protocol {cfg.protocol!r}; choose from {sorted(PROTOCOLS)}")
    m = cfg.m
    if cfg.protocol == "randomized":
        m = default_rounds(cfg.n, cfg.k) if m is None else m
        proto = PROTOCOLS["randomized"](
            m=m, abort_threshold=default_abort_threshold(cfg.n, cfg.beta), beta=cfg.beta
        )
    else:
        proto = PROTOCOLS[cfg.protocol]()
    est = estimate_success(proto, cfg.n, cfg.k, cfg.trials, cfg.seed,
                           exhaustive=cfg.exhaustive, jobs=cfg.jobs)
    return protocol_csv(cfg.protocol, cfg.n, cfg.k, "" if m is None else m, est)


def run_params(cfg: ExperimentConfig) -> str:
    p = solve_parameters(cfg.lam)
    return _rows_to_csv(PARAMS_HEADER, [[p.lam, p.kappa, p.tau, p.c, p.delta]])


COMMANDS = {
    "dist": run_dist,
    "fourier": run_fourier,
    "census": run_census,
    "structure": run_structure,
    "mu": run_mu,
    "protocol": run_protocol,
    "params": run_params,
}


def run_experiment(cfg: ExperimentConfig) -> str:
    text = COMMANDS[cfg.command](cfg)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    if cfg.json:
        sidecar = {"version": __version__, "config": cfg.to_dict()}
        Path(cfg.json).write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return text


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="anticonc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for all randomness (default 0)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("--out", help="CSV output path (default: stdout)")
    common.add_argument("--json", help="write a JSON sidecar with the config and version")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", parents=[common], help="exact law of <x,Y> or <X,Y>")
    p.add_argument("--a", help="set spec for X (pair law)")
    p.add_argument("--b", required=True, help="set spec for Y")
    p.add_argument("--x", help="fixed direction: '+-+' or comma-separated integers")

    p = sub.add_parser("fourier", parents=[common], help="grid integrals of |f_x| against exact values")
    p.add_argument("--x", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--nodes", type=int, default=DEFAULT_NODES)

    p = sub.add_parser("census", parents=[common], help="count directions with large |f_x(theta)|")
    p.add_argument("--b", required=True)
    p.add_argument("--theta", type=float, default=0.125)
    p.add_argument("--lam", type=float, default=0.05)
    p.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")
    p.add_argument("--count", type=int, default=1000, help="directions sampled in sampled mode")

    for name, helptext in (("structure", "r_ell, R_C and mu_C per ell"), ("mu", "mu_C summary")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--a", help="twocube:@<path>")
        p.add_argument("--sidon", type=int, help="use the greedy Sidon set of this size as differences")
        p.add_argument("--C", type=float, default=1.0)
        p.add_argument("--ell-max", dest="ell_max", type=int, default=2)
        p.add_argument("--nu-points", type=int, default=40, help="size of the grid {2^-i}")

    p = sub.add_parser("protocol", parents=[common], help="success rate on U_{n,k}")
    p.add_argument("--protocol", choices=sorted(PROTOCOLS), default="mod4")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, help="rounds of the randomized protocol")
    p.add_argument("--beta", type=float, default=0.2)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--exhaustive", action="store_true")

    p = sub.add_parser("params", parents=[common], help="solve the entropy balance for kappa, tau")
    p.add_argument("--lam", type=float, default=0.05)
    return parser


def config_from_args(ns: argparse.Namespace) -> ExperimentConfig:
    values = vars(ns).copy()
    points = values.pop("nu_points", None)
    if points is not None:
        if points < 1:
            raise ValueError("--nu-points must be >= 1")
        values["nu_grid"] = list(default_nu_grid(points))
    return ExperimentConfig.from_dict(values)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        run_experiment(cfg)
    except InfeasibleError as exc:
        print(f"anticonc: {exc}", file=sys.stderr)
        return 3
    except (SpecError, ValueError, ArithmeticError, OSError) as exc:
        print(f"anticonc: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
