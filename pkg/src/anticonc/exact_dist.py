"""Exact laws of <x, Y> and <X, Y> with big-integer counts.

Probabilities leave this module only as ``fractions.Fraction``; nothing here
is rounded.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from pathlib import Path

import numpy as np

from .vertex_sets import (
    Cube,
    VertexSet,
    check_exhaustive,
    encode,
    popcount,
)

# FWHT on int64 stays exact while 2^(3n) < 2^63
_FWHT_MAX_N = 20


@dataclass(frozen=True)
class IntDistribution:
    """Law of an integer random variable: counts[i] hits at k = k_min + i, out of total."""

    k_min: int
    counts: tuple[int, ...]
    total: int

    def __post_init__(self):
        counts = [int(c) for c in self.counts]
        if any(c < 0 for c in counts):
            raise ValueError("negative count")
        if sum(counts) != int(self.total) or self.total <= 0:
            raise ValueError(f"counts sum to {sum(counts)}, total is {self.total}")
        # canonical form: no zero counts at either end of the support
        lo = next(i for i, c in enumerate(counts) if c)
        hi = len(counts) - next(i for i, c in enumerate(reversed(counts)) if c)
        object.__setattr__(self, "k_min", int(self.k_min) + lo)
        object.__setattr__(self, "counts", tuple(counts[lo:hi]))
        object.__setattr__(self, "total", int(self.total))

    @classmethod
    def from_mapping(cls, mapping: dict[int, int], total: int | None = None) -> "IntDistribution":
        ks = [k for k, c in mapping.items() if c]
        lo, hi = min(ks), max(ks)
        counts = [0] * (hi - lo + 1)
        for k, c in mapping.items():
            if c:
                counts[k - lo] += int(c)
        return cls(lo, tuple(counts), sum(counts) if total is None else total)

    @property
    def k_max(self) -> int:
        return self.k_min + len(self.counts) - 1

    def count(self, k: int) -> int:
        i = k - self.k_min
        return self.counts[i] if 0 <= i < len(self.counts) else 0

    def prob(self, k: int) -> Fraction:
        return Fraction(self.count(k), self.total)

    def items(self):
        """(k, count) pairs with nonzero count, k ascending."""
        return [(self.k_min + i, c) for i, c in enumerate(self.counts) if c]

    def as_dict(self) -> dict[int, int]:
        return dict(self.items())

    def probabilities(self) -> tuple[np.ndarray, np.ndarray]:
        """Support points and float probabilities, for numerical consumers."""
        ks = np.arange(self.k_min, self.k_max + 1)
        probs = np.array([c / self.total for c in self.counts], dtype=float)
        return ks, probs

    def scaled(self, factor: int) -> "IntDistribution":
        return IntDistribution(self.k_min, tuple(c * factor for c in self.counts), self.total * factor)

    def to_csv(self, path=None) -> str:
        """CSV with header ``k,count,total``; one row per nonzero k, ascending."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "count", "total"])
        for k, c in self.items():
            w.writerow([k, c, self.total])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def parse_csv(cls, text: str) -> "IntDistribution":
        rows = list(csv.DictReader(io.StringIO(text)))
        totals = {int(r["total"]) for r in rows}
        if len(totals) != 1:
            raise ValueError("inconsistent total column")
        return cls.from_mapping({int(r["k"]): int(r["count"]) for r in rows}, totals.pop())

    @classmethod
    def read_csv(cls, path) -> "IntDistribution":
        return cls.parse_csv(Path(path).read_text())


# ---------------------------------------------------------------------------
# core counting
# ---------------------------------------------------------------------------

def fwht(a: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform along a length-2^m axis."""
    a = np.array(a, copy=True)
    size = a.shape[0]
    h = 1
    while h < size:
        a = a.reshape(-1, 2, h)
        lo = a[:, 0, :]
        hi = a[:, 1, :]
        a = np.stack((lo + hi, lo - hi), axis=1)
        h *= 2
    return a.reshape(size)


def xor_correlation(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """h(z) = sum_a f(a) g(a ^ z) over arrays indexed by n-bit codes."""
    size = f.shape[0]
    h = fwht(fwht(f) * fwht(g))
    if np.issubdtype(h.dtype, np.integer):
        return h // size
    return h / size


def _indicator(codes: np.ndarray, n: int) -> np.ndarray:
    ind = np.zeros(1 << n, dtype=np.int64)
    ind[codes] = 1
    return ind


def xor_weight_histogram(a_codes: np.ndarray, b_codes: np.ndarray, n: int) -> list[int]:
    """hist[w] = #{(a, b) : popcount(a ^ b) = w}, exactly."""
    a_codes = np.asarray(a_codes, dtype=np.int64)
    b_codes = np.asarray(b_codes, dtype=np.int64)
    if len(a_codes) > len(b_codes):
        a_codes, b_codes = b_codes, a_codes
    direct_cost = len(a_codes) * len(b_codes)
    hist = [0] * (n + 1)
    if n <= _FWHT_MAX_N and direct_cost > 8 * n * (1 << n):
        corr = xor_correlation(_indicator(a_codes, n), _indicator(b_codes, n))
        weights = popcount(np.arange(1 << n))
        for w in range(n + 1):
            hist[w] = int(corr[weights == w].sum())
        return hist
    acc = np.zeros(n + 1, dtype=np.int64)
    for a in a_codes:
        acc += np.bincount(popcount(b_codes ^ a), minlength=n + 1)
    return [int(c) for c in acc]


def _is_sign_vector(x: np.ndarray) -> bool:
    return bool(np.all(np.abs(x) == 1))


def _cube_direction(x: np.ndarray) -> IntDistribution:
    """Law of <x, Y> for Y uniform on the cube by exact convolution of {+-x_j}."""
    dist = {0: 1}
    for xj in x:
        xj = int(xj)
        nxt: dict[int, int] = {}
        for k, c in dist.items():
            nxt[k + xj] = nxt.get(k + xj, 0) + c
            nxt[k - xj] = nxt.get(k - xj, 0) + c
        dist = nxt
    return IntDistribution.from_mapping(dist, 1 << len(x))


def inner_products(x, codes: np.ndarray, n: int) -> np.ndarray:
    """<x, y> for every member code, as int64."""
    x = np.asarray(x, dtype=np.int64)
    codes = np.asarray(codes, dtype=np.int64)
    if _is_sign_vector(x):
        return n - 2 * popcount(codes ^ encode(x))
    vals = np.full(codes.shape, int(x.sum()), dtype=np.int64)
    for j in range(n):
        if x[j]:
            vals -= 2 * x[j] * ((codes >> (n - 1 - j)) & 1)
    return vals


def direction_distribution(x, B: VertexSet) -> IntDistribution:
    """counts[k] = #{y in B : <x, y> = k}, total = |B|."""
    x = np.asarray(x, dtype=np.int64)
    if x.shape != (B.n,):
        raise ValueError(f"dimension mismatch: x has shape {x.shape}, set has n={B.n}")
    check_exhaustive(B.n)
    if isinstance(B, Cube):
        return _cube_direction(x)
    vals = inner_products(x, B.members(), B.n)
    lo = int(vals.min())
    counts = np.bincount(vals - lo)
    return IntDistribution(lo, tuple(int(c) for c in counts), B.size)


def pair_distribution(A: VertexSet, B: VertexSet) -> IntDistribution:
    """counts[k] = #{(x, y) in A x B : <x, y> = k}, total = |A| |B|."""
    if A.n != B.n:
        raise ValueError(f"dimension mismatch: {A.n} vs {B.n}")
    n = A.n
    check_exhaustive(n)
    if isinstance(A, Cube) and isinstance(B, Cube):
        # X o Y is uniform on the cube: binomial law scaled by 2^n
        mapping = {n - 2 * j: comb(n, j) << n for j in range(n + 1)}
        return IntDistribution.from_mapping(mapping, 1 << (2 * n))
    hist = xor_weight_histogram(A.members(), B.members(), n)
    return IntDistribution.from_mapping({n - 2 * w: c for w, c in enumerate(hist)}, A.size * B.size)


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------

def concentration_probability(d: IntDistribution) -> Fraction:
    return Fraction(max(d.counts), d.total)


def smoothness_gap(d: IntDistribution, step: int = 4) -> Fraction:
    """max_k |P(k) - P(k + step)| with P = 0 off the support."""
    if step < 1:
        raise ValueError("step must be a positive integer")
    padded = [0] * step + list(d.counts) + [0] * step
    best = max(abs(padded[i] - padded[i + step]) for i in range(len(padded) - step))
    return Fraction(best, d.total)


def argmax_smoothness_gap(d: IntDistribution, step: int = 4) -> int:
    """Smallest k attaining :func:`smoothness_gap`."""
    target = smoothness_gap(d, step) * d.total
    for k in range(d.k_min - step, d.k_max + 1):
        if abs(d.count(k) - d.count(k + step)) == target:
            return k
    raise AssertionError("unreachable")


def interval_probability(d: IntDistribution, radius: int) -> Fraction:
    """Pr[|Z| <= radius]."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    inside = sum(c for k, c in d.items() if abs(k) <= radius)
    return Fraction(inside, d.total)


def slice_intersection_profile(a, B: VertexSet) -> list[int]:
    """entry w = |(a + B) cap S_w|, with + the F_2 sum and S_w the weight-w slice."""
    a = np.asarray(a)
    if a.shape != (B.n,):
        raise ValueError(f"dimension mismatch: a has shape {a.shape}, set has n={B.n}")
    check_exhaustive(B.n)
    w = popcount(B.members() ^ encode(a))
    return [int(c) for c in np.bincount(w, minlength=B.n + 1)]


def binomial_direction_law(n: int) -> IntDistribution:
    """Closed form for <x, Y> with x in {+-1}^n and Y uniform on the cube."""
    return IntDistribution.from_mapping({n - 2 * j: comb(n, j) for j in range(n + 1)}, 1 << n)


__all__ = [
    "IntDistribution", "fwht", "xor_correlation", "xor_weight_histogram",
    "inner_products", "direction_distribution", "pair_distribution",
    "concentration_probability", "smoothness_gap", "argmax_smoothness_gap",
    "interval_probability", "slice_intersection_profile", "binomial_direction_law",
]
