"""Additive structure of the differences of a two-cube and the bounds it controls.

Counts are exact integers.  Trigonometric averages over theta use the periodic
rectangle rule, which is exact for trigonometric polynomials of degree below
the number of nodes.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .fourier import conditional_tables
from .vertex_sets import TwoCube, VertexSet, check_exhaustive, encode

BRUTE_FORCE_LIMIT = 200_000
STRUCTURE_HEADER = ["n", "ell", "r_ell", "R_Cl", "R_C", "mu_C", "nu_star"]


def default_nu_grid(points: int = 40) -> tuple[float, ...]:
    return tuple(2.0 ** -i for i in range(points))


@dataclass(frozen=True)
class DifferenceProfile:
    """Nonzero differences d_j = u_j - v_j; the flags are always recomputed."""

    d: tuple[int, ...]
    all_distinct: bool = field(init=False)
    weak_sidon: bool = field(init=False)

    def __post_init__(self):
        d = tuple(int(v) for v in self.d)
        if any(v == 0 for v in d):
            raise ValueError("differences must be nonzero")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "all_distinct", len(set(d)) == len(d))
        object.__setattr__(self, "weak_sidon", weak_sidon_check(d)[0])

    @classmethod
    def of(cls, A: TwoCube) -> "DifferenceProfile":
        return cls(A.differences)

    @property
    def n(self) -> int:
        return len(self.d)


@dataclass(frozen=True)
class HalaszParams:
    C: float = 1.0
    ell_max: int = 2
    nu_grid: tuple[float, ...] = field(default_factory=default_nu_grid)

    def __post_init__(self):
        if not (self.C > 0 and math.isfinite(self.C)):
            raise ValueError(f"C must be positive and finite, got {self.C}")
        if self.ell_max < 1:
            raise ValueError("ell_max must be >= 1")
        if not self.nu_grid or any(not 0 < nu <= 1 for nu in self.nu_grid):
            raise ValueError("nu_grid must be a nonempty subset of (0, 1]")


def _diffs(d) -> tuple[int, ...]:
    if isinstance(d, DifferenceProfile):
        return d.d
    return tuple(int(v) for v in d)


# ---------------------------------------------------------------------------
# counting
# ---------------------------------------------------------------------------

def _r_brute(d, ell: int) -> int:
    count = 0
    signed = [s * v for v in d for s in (1, -1)]
    for combo in itertools.product(signed, repeat=2 * ell):
        if sum(combo) == 0:
            count += 1
    return count


def _r_poly(d, ell: int) -> int:
    # constant term of (sum_j z^{d_j} + z^{-d_j})^{2 ell} = sum_s c_s c_{-s} with c = coeffs of the ell-th power
    base = Counter()
    for v in d:
        base[v] += 1
        base[-v] += 1
    power = Counter({0: 1})
    for _ in range(ell):
        nxt: Counter = Counter()
        for s, c in power.items():
            for t, e in base.items():
                nxt[s + t] += c * e
        power = nxt
    return sum(c * power.get(-s, 0) for s, c in power.items())


def count_solutions_r(d, ell: int, method: str = "auto") -> int:
    """r_ell: number of (eps, j) in {+-1}^{2 ell} x [n]^{2 ell} with sum eps_i d_{j_i} = 0."""
    d = _diffs(d)
    if ell < 1:
        raise ValueError("ell must be a positive integer")
    size = (2 * len(d)) ** (2 * ell)
    if method == "auto":
        method = "brute" if size <= BRUTE_FORCE_LIMIT else "poly"
    if method == "brute":
        if size > 10 * BRUTE_FORCE_LIMIT:
            raise ValueError(f"brute force over {size} tuples is infeasible")
        return _r_brute(d, ell)
    if method == "poly":
        return _r_poly(d, ell)
    raise ValueError(f"unknown method {method!r}")


def sidon_check(S) -> tuple[bool, int]:
    """(is Sidon, number of ordered (s1..s4) in S^4 with s1 + s2 = s3 + s4)."""
    S = sorted(set(int(s) for s in S))
    sums = Counter(a + b for a in S for b in S)
    count = sum(c * c for c in sums.values())
    n = len(S)
    return count == 4 * math.comb(n, 2) + n, count


def weak_sidon_check(S) -> tuple[bool, int]:
    """(count <= 100 |S|^2, number of (eps, s) with e1 s1 + e2 s2 = e3 s3 + e4 s4)."""
    S = sorted(set(int(s) for s in S))
    signed = [e * s for s in S for e in (1, -1)]
    sums = Counter(a + b for a in signed for b in signed)
    count = sum(c * c for c in sums.values())
    return count <= 100 * len(S) ** 2, count


def mian_chowla(n: int) -> tuple[int, ...]:
    """Greedy Sidon sequence 1, 2, 4, 8, 13, ... truncated to n terms."""
    if not 1 <= n <= 200:
        raise ValueError("need 1 <= n <= 200")
    seq = [1]
    diffs: set[int] = set()
    c = 1
    while len(seq) < n:
        c += 1
        new = [c - a for a in seq]
        if any(v in diffs for v in new):
            continue
        diffs.update(new)
        seq.append(c)
    return tuple(seq)


# ---------------------------------------------------------------------------
# the level function D(theta)
# ---------------------------------------------------------------------------

def D_theta(G, theta):
    """sum_{d in G} sin^2(2 pi theta d); ``theta`` may be an array."""
    G = np.asarray(_diffs(G), dtype=float)
    theta = np.asarray(theta, dtype=float)
    vals = np.sin(2 * np.pi * np.multiply.outer(theta, G)) ** 2
    out = vals.sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def _grid(nodes: int) -> np.ndarray:
    return np.arange(nodes) / nodes


def mean_D(G, nodes: int | None = None) -> float:
    """E_theta D(theta); exact on a grid with more than 2 max|d| nodes."""
    G = _diffs(G)
    if not G:
        return 0.0
    nodes = nodes or 2 * max(abs(v) for v in G) + 1
    return float(D_theta(G, _grid(nodes)).mean())


def level_set_probability(G, rho: float, nodes: int = 1 << 14) -> float:
    """Grid measure of {theta : D(theta) <= rho}."""
    if nodes < 1 << 14:
        raise ValueError("nodes must be at least 2^14")
    G = _diffs(G)
    if not G:
        return 1.0 if rho >= 0 else 0.0
    return float((D_theta(G, _grid(nodes)) <= rho).mean())


def level_set_bound(r_ell: int, lam: float, n: int, ell: int, rho: float) -> float:
    """4 r_ell / (lam n)^{2 ell + 1/2} * sqrt(rho)."""
    return 4.0 * r_ell / (lam * n) ** (2 * ell + 0.5) * math.sqrt(rho)


def level_set_arcs(G, rho: float, nodes: int = 1 << 14) -> int:
    """Number of boundary crossings of the grid level set (for grid-error bounds)."""
    inside = D_theta(_diffs(G), _grid(nodes)) <= rho
    return int(np.count_nonzero(inside != np.roll(inside, 1)))


def moment_check(G, ell: int, nodes: int | None = None) -> tuple[float, float]:
    """(E_theta (|G| - 2 D(theta))^{2 ell}, 2^{-2 ell} r_ell(G))."""
    G = _diffs(G)
    if not G:
        return 0.0, 0.0
    degree = 4 * ell * max(abs(v) for v in G)
    if nodes is None:
        nodes = degree + 1
    if nodes <= degree:
        raise ValueError(f"insufficient nodes: need more than {degree}")
    theta = _grid(nodes)
    vals = (len(G) - 2 * D_theta(G, theta)) ** (2 * ell)
    return float(vals.mean()), 2.0 ** (-2 * ell) * count_solutions_r(G, ell)


# ---------------------------------------------------------------------------
# R_C and mu_C
# ---------------------------------------------------------------------------

def halasz_R_terms(d, C: float, ell_max: int) -> list[tuple[int, int, float]]:
    """(ell, r_ell, R_{C,ell}) for ell = 1..ell_max."""
    d = _diffs(d)
    n = len(d)
    tail = math.exp(-n / C)
    rows = []
    for ell in range(1, ell_max + 1):
        r = count_solutions_r(d, ell)
        rows.append((ell, r, C ** ell * r / n ** (2 * ell + 0.5) + tail))
    return rows


def halasz_R(d, params: HalaszParams) -> tuple[float, int]:
    """(min_ell R_{C,ell}, minimizing ell)."""
    ell, _, R = min(halasz_R_terms(d, params.C, params.ell_max), key=lambda t: (t[2], t[0]))
    return R, ell


class MuResult(NamedTuple):
    mu: float
    nu: float | None


def mu_objective(R: float, n: int, C: float, nu: float) -> float:
    """[3 exp(-nu n / C) + R / (50 sqrt nu)]^{1 / (1 + nu)^2}."""
    rhs = 3.0 * math.exp(-nu * n / C) + R / (50.0 * math.sqrt(nu))
    return rhs ** (1.0 / (1.0 + nu) ** 2)


def mu_from_R(R: float, n: int, C: float, nu_grid) -> MuResult:
    best = MuResult(1.0, None)
    for nu in nu_grid:
        val = mu_objective(R, n, C, nu)
        if val < best.mu:
            best = MuResult(max(val, 0.0), nu)
    return best


def mu_C(d, params: HalaszParams) -> MuResult:
    """Grid version of mu_C(A); mu = 1 (with nu = None) when no grid point gives a value below 1."""
    R, _ = halasz_R(d, params)
    return mu_from_R(R, len(_diffs(d)), params.C, params.nu_grid)


def structure_rows(d, params: HalaszParams) -> list[list]:
    """Rows of the structure report, one per ell."""
    d = _diffs(d)
    terms = halasz_R_terms(d, params.C, params.ell_max)
    R = min(t[2] for t in terms)
    mu = mu_from_R(R, len(d), params.C, params.nu_grid)
    return [[len(d), ell, r, Rl, R, mu.mu, mu.nu] for ell, r, Rl in terms]


# ---------------------------------------------------------------------------
# the nu-power single-direction and average-direction bounds
# ---------------------------------------------------------------------------

class BoundCheck(NamedTuple):
    lhs: float
    rhs: float
    best_constant: float | None


def _largest_feasible(grid, lhs: float, rhs_of) -> float | None:
    ok = [c for c in grid if lhs <= rhs_of(c) + 1e-12]
    return max(ok) if ok else None


def nu_product_bound(x, B: VertexSet, eta: float, nu: float, kappa: float, c0: float = 0.01,
                     c0_grid=None) -> BoundCheck:
    """(|E exp(i eta <x,Y>)|^{1+nu}, E prod_{j in J(Y)} (1 - c0 nu sin^2(phi_j + x_j eta)))."""
    if not 0 < nu <= 1:
        raise ValueError("nu must lie in (0, 1]")
    check_exhaustive(B.n)
    x = np.asarray(x, dtype=float)
    t = conditional_tables(B.members(), B.n, x, eta)
    bits = (t.codes[:, None] >> np.arange(B.n - 1, -1, -1)) & 1
    ip = (x[None, :] * (1 - 2 * bits)).sum(axis=1)
    lhs = float(abs(np.exp(1j * eta * ip).mean()) ** (1 + nu))
    in_J = t.gamma >= kappa
    sin2 = np.sin(t.phi + x[None, :] * eta) ** 2

    def rhs_of(c):
        return float(np.prod(np.where(in_J, 1.0 - c * nu * sin2, 1.0), axis=1).mean())

    grid = np.linspace(0.01, 1.0, 100) if c0_grid is None else c0_grid
    return BoundCheck(lhs, rhs_of(c0), _largest_feasible(grid, lhs, rhs_of))


def nu_average_bound(A: TwoCube, B: VertexSet, y, eta: float, nu: float, kappa: float,
                     c0: float = 0.01, c: float | None = None, c_grid=None) -> BoundCheck:
    """Average over X uniform on the two-cube A, for a fixed y in B.

    lhs = (E_X prod_{j in J(y)} (1 - c0 nu sin^2(phi_j(X, y) + X_j eta)))^{1+nu}
    rhs = E_X exp(-c nu sum_{j in G} sin^2(d_j eta)),  G = J'(X) cap J(y).
    """
    if A.n != B.n:
        raise ValueError("dimension mismatch")
    if c is None:
        c = c0 * kappa / 8.0
    check_exhaustive(B.n)
    n = B.n
    codes = B.members()
    y_code = encode(y)
    d = np.array(A.differences, dtype=float)
    # X is uniform on a product of pairs, so every conditional min-probability mu_j is 1/2
    in_J_prime = np.full(n, 0.5 >= kappa)
    prods = []
    sums = []
    for x in A.members():
        t = conditional_tables(codes, n, x, eta)
        try:
            i = t.row(y_code)
        except KeyError:
            raise ValueError("y is not a member of B") from None
        in_J = t.gamma[i] >= kappa
        sin2 = np.sin(t.phi[i] + x * eta) ** 2
        prods.append(np.prod(np.where(in_J, 1.0 - c0 * nu * sin2, 1.0)))
        G = in_J & in_J_prime
        sums.append(float((np.sin(d * eta) ** 2)[G].sum()))
    lhs = float(np.mean(prods) ** (1 + nu))
    sums = np.array(sums)

    def rhs_of(cc):
        return float(np.exp(-cc * nu * sums).mean())

    grid = np.geomspace(1e-6, 1.0, 61) if c_grid is None else c_grid
    return BoundCheck(lhs, rhs_of(c), _largest_feasible(grid, lhs, rhs_of))


# ---------------------------------------------------------------------------
# strict convexity of zeta -> zeta^{1+nu}
# ---------------------------------------------------------------------------

def strict_convexity_phi(xi, p, nu):
    """(p + (1-p) xi^{1+nu}) - (p + (1-p) xi)^{1+nu}.

    Exact when given ``Fraction`` arguments with integer ``nu``.
    """
    if not 0 <= xi <= 0.5:
        raise ValueError(f"xi must lie in [0, 1/2], got {xi}")
    if not 0 < p < 1:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    if not 0 <= nu <= 1:
        raise ValueError(f"nu must lie in [0, 1], got {nu}")
    e = 1 + nu
    return (p + (1 - p) * xi ** e) - (p + (1 - p) * xi) ** e


def _phi_array(xi, p, nu):
    # with q = p + (1-p) xi the constant terms cancel exactly:
    # Phi = (1-p) xi expm1(nu ln xi) - q expm1(nu ln q), accurate for tiny nu
    xi, p, nu = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (xi, p, nu)))
    q = p + (1.0 - p) * xi
    with np.errstate(divide="ignore", invalid="ignore"):
        low = np.where(xi > 0, (1.0 - p) * xi * np.expm1(nu * np.log(xi)), 0.0)
    return low - q * np.expm1(nu * np.log(q))


def convexity_constant(kappa: float, nu_grid=None) -> float:
    """min over the nu grid and p in {kappa, 1 - kappa} of Phi(1/2, p, nu) / nu.

    Phi decreases in xi and is concave in p, so on xi in [0, 1/2],
    p in [kappa, 1 - kappa] it is smallest at xi = 1/2 and one of the two
    endpoints for p.
    """
    nus = np.asarray(default_nu_grid() if nu_grid is None else nu_grid, dtype=float)
    vals = np.minimum(_phi_array(0.5, kappa, nus), _phi_array(0.5, 1.0 - kappa, nus)) / nus
    return float(vals.min())


def convexity_ratio(alpha_plus: float, alpha_minus: float, p: float, nu: float) -> float:
    """E[alpha_W]^{1+nu} / E[alpha_W^{1+nu}] for Pr[W = 1] = p."""
    num = (p * alpha_plus + (1 - p) * alpha_minus) ** (1 + nu)
    den = p * alpha_plus ** (1 + nu) + (1 - p) * alpha_minus ** (1 + nu)
    return num / den


__all__ = [
    "STRUCTURE_HEADER", "default_nu_grid", "DifferenceProfile", "HalaszParams",
    "count_solutions_r", "sidon_check", "weak_sidon_check", "mian_chowla", "D_theta",
    "mean_D", "level_set_probability", "level_set_bound", "level_set_arcs", "moment_check",
    "halasz_R_terms", "halasz_R", "MuResult", "mu_objective", "mu_from_R", "mu_C",
    "structure_rows", "BoundCheck", "nu_product_bound", "nu_average_bound",
    "strict_convexity_phi", "convexity_constant", "convexity_ratio",
]
