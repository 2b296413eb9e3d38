"""Independent brute-force oracles on plain tuples; no package code is imported here."""

from __future__ import annotations

import cmath
import itertools
import math
from collections import Counter
from fractions import Fraction


def cube(n):
    return list(itertools.product((1, -1), repeat=n))


def ip(x, y):
    return sum(a * b for a, b in zip(x, y))


def direction_law(x, B):
    c = Counter(ip(x, y) for y in B)
    return {k: Fraction(v, len(B)) for k, v in c.items()}


def pair_law(A, B):
    c = Counter(ip(x, y) for x in A for y in B)
    return {k: Fraction(v, len(A) * len(B)) for k, v in c.items()}


def step_gap(law, step):
    lo, hi = min(law) - step, max(law) + step
    return max(abs(law.get(k, 0) - law.get(k + step, 0)) for k in range(lo, hi + 1))


def span_f2(rows, n):
    """Members of the span as +-1 tuples (bit 1 -> -1), rows given as '110' strings."""
    vecs = {tuple([0] * n)}
    for r in rows:
        v = tuple(int(ch) for ch in r)
        vecs |= {tuple((a + b) % 2 for a, b in zip(w, v)) for w in vecs}
    return sorted(tuple(1 - 2 * b for b in w) for w in vecs)


def r_ell(d, ell):
    signed = [s * v for v in d for s in (1, -1)]
    return sum(1 for t in itertools.product(signed, repeat=2 * ell) if sum(t) == 0)


def sidon_quadruples(S):
    return sum(1 for a, b, c, e in itertools.product(S, repeat=4) if a + b == c + e)


def weak_sidon_quadruples(S):
    count = 0
    for s in itertools.product(S, repeat=4):
        for e in itertools.product((1, -1), repeat=4):
            if e[0] * s[0] + e[1] * s[1] == e[2] * s[2] + e[3] * s[3]:
                count += 1
    return count


def greedy_sidon(n):
    seq = []
    c = 0
    while len(seq) < n:
        c += 1
        cand = seq + [c]
        sums = [a + b for a, b in itertools.combinations_with_replacement(cand, 2)]
        if len(sums) == len(set(sums)):
            seq = cand
    return seq


def char_fn(x, B, theta):
    return sum(cmath.exp(2j * math.pi * theta * ip(x, y)) for y in B) / len(B)


def conditional_gamma(B, y):
    """gamma_j from prefix counts, as Fractions."""
    out = []
    for j in range(len(y)):
        rows = [b for b in B if b[:j] == y[:j]]
        plus = sum(1 for b in rows if b[j] == 1)
        minus = len(rows) - plus
        out.append(Fraction(min(plus, minus), plus + minus))
    return out


def phase_phi(B, y, x, eta):
    """phi_j by direct conditional expectations, 0 when undefined."""
    n = len(y)
    out = []
    for j in range(n):
        if j == n - 1:
            out.append(0.0)
            continue
        rows = [b for b in B if b[:j] == y[:j]]
        z = {}
        for eps in (1, -1):
            sel = [b for b in rows if b[j] == eps]
            if not sel:
                z[eps] = None
                continue
            z[eps] = sum(cmath.exp(1j * eta * sum(x[i] * b[i] for i in range(j + 1, n))) for b in sel) / len(sel)
        if z[1] is None or z[-1] is None:
            out.append(0.0)
            continue
        prod = z[1] * z[-1].conjugate()
        out.append(0.0 if abs(prod) < 1e-15 else cmath.phase(prod) / 2)
    return out


def promise_pairs(n, k):
    return [(x, y) for x in cube(n) for y in cube(n) if abs(ip(x, y)) == k]
