"""Characteristic functions of <x, Y> and the witness quantities behind their decay.

Angles come in two units: ``theta`` is a turn fraction in [0, 1) and ``eta`` is
in radians, eta = 2 pi theta.  Coordinates are 0-based throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy.optimize import bisect
from scipy.special import entr

from .exact_dist import (
    IntDistribution,
    direction_distribution,
    encode,
    xor_correlation,
)
from .vertex_sets import VertexSet, check_exhaustive, popcount

DEFAULT_NODES = 1 << 16
PHASE_EPS = 1e-15
MAX_CENSUS_N = 16


def turns_to_radians(theta: float) -> float:
    return 2.0 * math.pi * (theta % 1.0)


def binary_entropy(xi):
    """H(xi) in bits."""
    xi = np.asarray(xi, dtype=float)
    return (entr(xi) + entr(1.0 - xi)) / math.log(2.0)


# ---------------------------------------------------------------------------
# characteristic function and the grid integrals built on it
# ---------------------------------------------------------------------------

def _as_distribution(x, B) -> IntDistribution:
    return B if isinstance(B, IntDistribution) else direction_distribution(x, B)


def characteristic_function(x, B: VertexSet, theta):
    """f_x(theta) = E_Y exp(2 pi i theta <x, Y>); ``theta`` may be an array."""
    ks, probs = _as_distribution(x, B).probabilities()
    theta = np.asarray(theta, dtype=float)
    phases = np.exp(2j * np.pi * np.multiply.outer(theta, ks))
    out = phases @ probs
    return complex(out) if out.ndim == 0 else out


def char_on_grid(dist: IntDistribution, nodes: int) -> np.ndarray:
    """f(m / nodes) for m = 0..nodes-1 via one inverse FFT (exact up to rounding)."""
    ks, probs = dist.probabilities()
    wrapped = np.zeros(nodes)
    np.add.at(wrapped, ks % nodes, probs)
    return nodes * np.fft.ifft(wrapped)


class QuadResult(NamedTuple):
    value: float
    eps_quad: float
    nodes: int


def _radius(x) -> int:
    return int(np.abs(np.asarray(x, dtype=np.int64)).sum())


def _check_nodes(x, nodes: int) -> None:
    need = 4 * _radius(x) + 4
    if nodes < need:
        raise ValueError(f"insufficient nodes: {nodes} < 4 L + 4 = {need}")


def _grid_mean(dist: IntDistribution, nodes: int, weight=None) -> tuple[float, float]:
    """Rectangle-rule mean of weight(theta) |f(theta)| and the halved-grid discrepancy."""

    def mean(m: int) -> float:
        vals = np.abs(char_on_grid(dist, m))
        if weight is not None:
            vals = vals * weight(np.arange(m) / m)
        return float(vals.mean())

    fine = mean(nodes)
    coarse = mean(nodes // 2)
    return fine, abs(fine - coarse)


def star_bound(x, B: VertexSet, nodes: int = DEFAULT_NODES) -> QuadResult:
    """Grid estimate of E_theta |f_x(theta)|, an upper bound on max_k Pr[<x, Y> = k].

    With nodes > 2L the discrete inversion formula is exact, so the grid mean
    itself already dominates every point probability.  ``eps_quad`` is the
    discrepancy between the full and the half-size grid, an estimate of the
    distance to the true integral.
    """
    _check_nodes(x, nodes)
    value, eps = _grid_mean(_as_distribution(x, B), nodes)
    return QuadResult(value, eps, nodes)


def smoothness_rhs(x, B: VertexSet, nodes: int = DEFAULT_NODES) -> QuadResult:
    """2 int_0^1 |sin(4 pi theta)| |f_x(theta)| dtheta, bounding the step-4 gap."""
    _check_nodes(x, nodes)
    value, eps = _grid_mean(
        _as_distribution(x, B), nodes, weight=lambda t: np.abs(np.sin(4 * np.pi * t))
    )
    return QuadResult(2 * value, 2 * eps, nodes)


def point_masses(dist: IntDistribution) -> dict[int, float]:
    """Recover P(k) from f on the (2L+1)-point grid by the discrete inversion formula."""
    L = max(abs(dist.k_min), abs(dist.k_max))
    m = 2 * L + 1
    f = char_on_grid(dist, m)
    grid = np.arange(m)
    out = {}
    for k in range(-L, L + 1):
        out[k] = float((f * np.exp(-2j * np.pi * k * grid / m)).mean().real)
    return out


# ---------------------------------------------------------------------------
# entropy parameters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EntropyParams:
    """lambda, kappa, tau tied by H(1/log2(1/kappa)) = tau + H(tau) = lambda."""

    lam: float
    kappa: float
    tau: float
    c: float = field(default=float("nan"))

    def __post_init__(self):
        if math.isnan(self.c):
            object.__setattr__(self, "c", default_decay_constant(self.kappa, self.tau, self.lam))

    @property
    def delta(self) -> float:
        """The slack delta = 6 lambda of the bad-direction count."""
        return 6.0 * self.lam

    def residuals(self) -> tuple[float, float]:
        xi = 1.0 / math.log2(1.0 / self.kappa)
        return (
            float(binary_entropy(xi)) - self.lam,
            self.tau + float(binary_entropy(self.tau)) - self.lam,
        )


def default_decay_constant(kappa: float, tau: float, lam: float) -> float:
    # exp(-(kappa/8) n tau s^2) + 2^(-lam n / 2) <= 2 exp(-c n s^2) for s^2 <= 1
    return min(kappa * tau / 8.0, lam * math.log(2.0) / 2.0)


def _root(fn, lo, hi) -> float:
    return bisect(fn, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=2000)


def solve_parameters(lam: float, c: float | None = None) -> EntropyParams:
    """Smallest positive roots kappa, tau of the entropy balance for a given lambda."""
    if not 0.0 < lam <= 1.0:
        raise ValueError(f"lambda must lie in (0, 1], got {lam}")
    tiny = 1e-300
    if lam == 1.0:
        xi = 0.5
    else:
        xi = _root(lambda t: float(binary_entropy(t)) - lam, tiny, 0.5)
    kappa = 2.0 ** (-1.0 / xi)
    if kappa == 0.0:
        raise ValueError(f"lambda={lam} too small: kappa = 2^(-{1 / xi:.3g}) underflows")
    tau = _root(lambda t: t + float(binary_entropy(t)) - lam, tiny, 2.0 / 3.0)
    params = EntropyParams(lam, kappa, tau) if c is None else EntropyParams(lam, kappa, tau, c)
    r1, r2 = params.residuals()
    if max(abs(r1), abs(r2)) >= 1e-12:
        raise ArithmeticError(f"entropy residuals {r1:.3g}, {r2:.3g} exceed 1e-12")
    return params


# ---------------------------------------------------------------------------
# conditional tables: gamma_j and phi_j for every member at once
# ---------------------------------------------------------------------------

@dataclass
class ConditionalTables:
    """Per-member arrays of shape (|B|, n).

    ``plus``/``minus`` count the members sharing the prefix y_<j with y_j = +1/-1;
    ``phi`` is half the principal phase of Z_+ conj(Z_-), and ``flat`` marks
    entries where that product vanished although gamma_j > 0.
    """

    codes: np.ndarray
    plus: np.ndarray
    minus: np.ndarray
    phi: np.ndarray
    flat: np.ndarray

    @property
    def gamma(self) -> np.ndarray:
        return np.minimum(self.plus, self.minus) / (self.plus + self.minus)

    def row(self, code: int) -> int:
        i = int(np.searchsorted(self.codes, code))
        if i >= len(self.codes) or self.codes[i] != code:
            raise KeyError(code)
        return i


def conditional_tables(codes, n: int, x, eta: float) -> ConditionalTables:
    """gamma_j(y) and phi_j(x, y) for all members; ``codes`` may repeat (a multiset law)."""
    codes = np.sort(np.asarray(codes, dtype=np.int64))
    x = np.asarray(x, dtype=float)
    size = len(codes)
    bits = (codes[:, None] >> np.arange(n - 1, -1, -1)) & 1
    contrib = x[None, :] * (1 - 2 * bits)
    # suffix[:, j] = <x_{>j}, y_{>j}>
    suffix = np.zeros((size, n))
    if n > 1:
        suffix[:, :-1] = np.cumsum(contrib[:, ::-1], axis=1)[:, ::-1][:, 1:]
    plus = np.zeros((size, n), dtype=np.int64)
    minus = np.zeros((size, n), dtype=np.int64)
    phi = np.zeros((size, n))
    flat = np.zeros((size, n), dtype=bool)
    for j in range(n):
        _, inv = np.unique(codes >> (n - j), return_inverse=True)
        groups = inv.max() + 1
        b = bits[:, j]
        n_plus = np.bincount(inv, weights=(b == 0), minlength=groups).astype(np.int64)
        n_minus = np.bincount(inv, weights=(b == 1), minlength=groups).astype(np.int64)
        plus[:, j] = n_plus[inv]
        minus[:, j] = n_minus[inv]
        if j == n - 1:
            continue
        w = np.exp(1j * eta * suffix[:, j])
        s_plus = (np.bincount(inv, weights=w.real * (b == 0), minlength=groups)
                  + 1j * np.bincount(inv, weights=w.imag * (b == 0), minlength=groups))
        s_minus = (np.bincount(inv, weights=w.real * (b == 1), minlength=groups)
                   + 1j * np.bincount(inv, weights=w.imag * (b == 1), minlength=groups))
        both = (n_plus > 0) & (n_minus > 0)
        prod = np.zeros(groups, dtype=complex)
        prod[both] = (s_plus[both] / n_plus[both]) * np.conj(s_minus[both] / n_minus[both])
        small = both & (np.abs(prod) < PHASE_EPS)
        half_phase = np.where(both & ~small, np.angle(prod) / 2.0, 0.0)
        phi[:, j] = half_phase[inv]
        flat[:, j] = small[inv]
    return ConditionalTables(codes, plus, minus, phi, flat)


@dataclass(frozen=True)
class WitnessProfile:
    gamma: tuple[Fraction, ...]
    phi: tuple[float, ...]
    J: frozenset[int]
    G: frozenset[int]
    flagged: frozenset[int] = frozenset()


def witness_profile(B: VertexSet, y, x, eta: float, kappa: float) -> WitnessProfile:
    """gamma_j, phi_j and the index sets J (gamma_j >= kappa) and G for one y in B.

    G keeps the j in J with sin^2(phi_j + x_j eta) >= sin^2(2 eta) / 4.
    ``flagged`` lists coordinates where gamma_j > 0 but the phase product vanished.
    """
    check_exhaustive(B.n)
    y_code = encode(y)
    tables = conditional_tables(B.members(), B.n, x, eta)
    try:
        i = tables.row(y_code)
    except KeyError:
        raise ValueError("y is not a member of B") from None
    x = np.asarray(x, dtype=float)
    gamma = tuple(
        Fraction(int(min(p, m)), int(p + m)) for p, m in zip(tables.plus[i], tables.minus[i])
    )
    phi = tuple(float(v) for v in tables.phi[i])
    J = frozenset(j for j, g in enumerate(gamma) if g >= kappa)
    threshold = math.sin(2 * eta) ** 2 / 4
    G = frozenset(j for j in J if math.sin(phi[j] + x[j] * eta) ** 2 >= threshold)
    flagged = frozenset(int(j) for j in np.flatnonzero(tables.flat[i]))
    return WitnessProfile(gamma, phi, J, G, flagged)


def lemma_tech_check(x, B: VertexSet, eta: float) -> tuple[float, float]:
    """(|E exp(i eta <x,Y>)|^2, E prod_j (1 - gamma_j sin^2(phi_j + x_j eta)))."""
    check_exhaustive(B.n)
    codes = B.members()
    tables = conditional_tables(codes, B.n, x, eta)
    x = np.asarray(x, dtype=float)
    ip = _inner(x, tables.codes, B.n)
    lhs = abs(np.exp(1j * eta * ip).mean()) ** 2
    factors = 1.0 - tables.gamma * np.sin(tables.phi + x[None, :] * eta) ** 2
    rhs = float(np.prod(factors, axis=1).mean())
    return float(lhs), rhs


def _inner(x, codes, n):
    bits = (codes[:, None] >> np.arange(n - 1, -1, -1)) & 1
    return (np.asarray(x, dtype=float)[None, :] * (1 - 2 * bits)).sum(axis=1)


def sin_gap_lower_bound(eta: float, u: int, v: int, grid: int = 1000) -> tuple[float, float]:
    """(min over phi of max{|sin(phi + eta u)|, |sin(phi + eta v)|}, |sin(eta (u - v))| / 2).

    The minimum is taken over a uniform grid on [0, pi) together with the points
    where the two magnitudes coincide, which is where the true minimum sits.
    """
    if grid < 1000:
        raise ValueError("grid must have at least 10^3 points")
    phis = np.concatenate([
        np.arange(grid) * (np.pi / grid),
        -eta * (u + v) / 2.0 + np.array([0.0, np.pi / 2]),
    ])
    g = np.maximum(np.abs(np.sin(phis + eta * u)), np.abs(np.sin(phis + eta * v)))
    return float(g.min()), abs(math.sin(eta * (u - v))) / 2.0


def sin_gap_lower_bound_batch(eta, u, v, grid: int = 1000) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`sin_gap_lower_bound` over arrays of triples."""
    eta, u, v = (np.asarray(a, dtype=float) for a in (eta, u, v))
    base = np.arange(grid) * (np.pi / grid)
    crit = -eta * (u + v) / 2.0
    phis = np.concatenate(
        [np.broadcast_to(base, eta.shape + (grid,)), crit[..., None], crit[..., None] + np.pi / 2],
        axis=-1,
    )
    g = np.maximum(
        np.abs(np.sin(phis + (eta * u)[..., None])), np.abs(np.sin(phis + (eta * v)[..., None]))
    )
    return g.min(axis=-1), np.abs(np.sin(eta * (u - v))) / 2.0


# ---------------------------------------------------------------------------
# bad-direction census
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CensusResult:
    theta: float
    c: float
    n: int
    beta: float
    delta: float
    tested: int
    violations: int

    @property
    def bound(self) -> float:
        """2^{n (1 - beta + delta)}."""
        return 2.0 ** (self.n * (1.0 - self.beta + self.delta))

    def csv_row(self) -> list:
        return [self.theta, self.c, self.n, self.beta, self.tested, self.violations, self.bound]


CENSUS_HEADER = ["theta", "c", "n", "beta", "tested", "violations", "bound_2^{n(1-beta+delta)}"]


def census_threshold(theta: float, c: float, n: int) -> float:
    return 2.0 * math.exp(-c * n * math.sin(4 * math.pi * theta) ** 2)


def all_char_values(B: VertexSet, theta: float) -> np.ndarray:
    """f_x(theta) for every x in {+-1}^n, indexed by code (n <= 16)."""
    n = B.n
    if n > MAX_CENSUS_N:
        raise ValueError(f"exhaustive census needs n <= {MAX_CENSUS_N}, got {n}")
    ind = np.zeros(1 << n)
    ind[B.members()] = 1.0
    weights = popcount(np.arange(1 << n))
    kernel = np.exp(2j * np.pi * theta * (n - 2 * weights))
    return xor_correlation(ind.astype(complex), kernel) / B.size


def tech_census(
    B: VertexSet,
    theta: float,
    params: EntropyParams,
    mode: str = "exhaustive",
    seed: int = 0,
    count: int = 1000,
    delta: float | None = None,
) -> CensusResult:
    """Count directions x with |f_x(theta)| >= 2 exp(-c n sin^2(4 pi theta))."""
    n = B.n
    threshold = census_threshold(theta, params.c, n)
    if mode == "exhaustive":
        mags = np.abs(all_char_values(B, theta))
        tested = 1 << n
    elif mode == "sampled":
        check_exhaustive(n)
        rng = np.random.default_rng(seed)
        codes = B.members()
        bits = rng.integers(0, 2, size=(count, n), dtype=np.int64)
        xcodes = (bits << np.arange(n - 1, -1, -1)).sum(axis=1)
        mags = np.empty(count)
        for i, xc in enumerate(xcodes):
            ip = n - 2 * popcount(codes ^ xc)
            mags[i] = abs(np.exp(2j * np.pi * theta * ip).mean())
        tested = count
    else:
        raise ValueError(f"unknown census mode {mode!r}")
    violations = int((mags >= threshold).sum())
    return CensusResult(
        theta, params.c, n, B.beta, params.delta if delta is None else delta, tested, violations
    )


__all__ = [
    "DEFAULT_NODES", "turns_to_radians", "binary_entropy", "characteristic_function",
    "char_on_grid", "QuadResult", "star_bound", "smoothness_rhs", "point_masses",
    "EntropyParams", "default_decay_constant", "solve_parameters", "ConditionalTables",
    "conditional_tables", "WitnessProfile", "witness_profile", "lemma_tech_check",
    "sin_gap_lower_bound", "sin_gap_lower_bound_batch", "CensusResult", "CENSUS_HEADER",
    "census_threshold", "all_char_values", "tech_census",
]
