"""Exact gap-hamming and the small protocols around it.

Trial ``i`` of :func:`estimate_success` draws everything (input pair, then
protocol coins) from ``numpy.random.default_rng(seed ^ i)``.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from collections.abc import Callable
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np
from scipy.stats import binomtest

from .vertex_sets import check_exhaustive

ABORT = "abort"
STAR = None  # egh_eval's "otherwise"
PROTOCOL_HEADER = ["protocol", "n", "k", "m", "trials", "successes", "aborts", "rate", "ci"]
MAX_LIFT = 10**6


def _pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    return x, y


def egh_eval(x, y, k: int) -> int | None:
    """1 if <x,y> = k, 0 if <x,y> = -k, None otherwise."""
    x, y = _pair(x, y)
    ip = int(x @ y)
    if ip == k:
        return 1
    if ip == -k:
        return 0
    return STAR


@dataclass(frozen=True)
class ProtocolOutcome:
    output: int | str
    transcript: tuple[int, ...] = ()

    @property
    def bits(self) -> int:
        return len(self.transcript)

    @property
    def aborted(self) -> bool:
        return self.output == ABORT


def mod4_protocol(x, y, k: int | None = None) -> tuple[int, ProtocolOutcome]:
    """Exchange the parities of the number of -1 entries; they fix <x,y> mod 4.

    With ``k`` given the outcome decides EGH: for odd k the residues of k and -k
    differ mod 4 and the answer is exact; otherwise the residue carries no
    information and the decider answers 1.
    """
    x, y = _pair(x, y)
    n = len(x)
    p = int(np.count_nonzero(x == -1) % 2)
    q = int(np.count_nonzero(y == -1) % 2)
    residue = (n - 2 * (p + q)) % 4
    if k is None or k % 2 == 0:
        out = 1
    else:
        out = 1 if residue == k % 4 else 0
    return residue, ProtocolOutcome(out, (p, q))


def default_rounds(n: int, k: int) -> int:
    return math.ceil(20 * n * n / (k * k))


def default_abort_threshold(n: int, beta: float) -> int:
    return math.ceil((1 - beta) * n) - 1


def randomized_gh(x, y, k: int, m: int | None = None, abort_threshold: int | None = None,
                  seed=0, beta: float = 0.2) -> ProtocolOutcome:
    """Shared-coin sampling protocol: sign of sum_j x_{I_j} y_{I_j} over m coordinates.

    ``seed`` may be an int or a ``numpy.random.Generator``.  Alice sends x on the
    distinct sampled coordinates, Bob replies with one bit.
    """
    x, y = _pair(x, y)
    n = len(x)
    m = default_rounds(n, k) if m is None else m
    if m < 1:
        raise ValueError("m must be >= 1")
    if abort_threshold is None:
        abort_threshold = default_abort_threshold(n, beta)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    idx = rng.integers(0, n, size=m)
    support = np.unique(idx)
    if len(support) > abort_threshold:
        return ProtocolOutcome(ABORT)
    total = int((x[idx] * y[idx]).sum())
    if total == 0:
        return ProtocolOutcome(ABORT)
    bit = 1 if total > 0 else 0
    sent = tuple(int(v == -1) for v in x[support])
    return ProtocolOutcome(bit, sent + (bit,))


def lift_instance(x, y, t: int, seed=None) -> tuple[np.ndarray, np.ndarray]:
    """Repeat each entry t times, multiply by a shared random sign vector, permute.

    ``seed=None`` skips the sign flip and permutation (pure repetition).
    """
    x, y = _pair(x, y)
    if t < 1 or t * len(x) > MAX_LIFT:
        raise ValueError(f"need 1 <= t and t n <= {MAX_LIFT}")
    x3 = np.repeat(x, t)
    y3 = np.repeat(y, t)
    if seed is None:
        return x3, y3
    rng = np.random.default_rng(seed)
    z = rng.choice(np.array([-1, 1]), size=len(x3))
    perm = rng.permutation(len(x3))
    return (x3 * z)[perm], (y3 * z)[perm]


def _check_promise(n: int, k: int) -> None:
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    if (n - k) % 2:
        raise ValueError(f"empty support: k={k} and n={n} differ in parity")


def sample_Unk(n: int, k: int, seed=0) -> tuple[np.ndarray, np.ndarray]:
    """A pair uniform on {(x, y) : <x, y> = +k or -k}."""
    _check_promise(n, k)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    x = rng.choice(np.array([-1, 1]), size=n)
    s = k if rng.integers(0, 2) else -k
    flips = rng.choice(n, size=(n - s) // 2, replace=False)
    y = x.copy()
    y[flips] *= -1
    return x, y


def enumerate_Unk(n: int, k: int):
    """Every (x, y) with <x,y> = +-k, x in lexicographic order, exhaustive (n <= 12)."""
    _check_promise(n, k)
    if n > 12:
        raise ValueError("exhaustive U_{n,k} enumeration needs n <= 12")
    dists = {(n - k) // 2, (n + k) // 2}
    for x in itertools.product((1, -1), repeat=n):
        x = np.array(x, dtype=np.int64)
        for dist in sorted(dists):
            for flips in itertools.combinations(range(n), dist):
                y = x.copy()
                y[list(flips)] *= -1
                yield x, y


# ---------------------------------------------------------------------------
# success estimation
# ---------------------------------------------------------------------------

Protocol = Callable[[np.ndarray, np.ndarray, int, np.random.Generator], ProtocolOutcome]


def mod4_decider(x, y, k, rng=None) -> ProtocolOutcome:
    return mod4_protocol(x, y, k)[1]


def constant_decider(x, y, k, rng=None) -> ProtocolOutcome:
    return ProtocolOutcome(1)


def _sampling_run(x, y, k, rng, m=None, abort_threshold=None, beta=0.2) -> ProtocolOutcome:
    return randomized_gh(x, y, k, m=m, abort_threshold=abort_threshold, seed=rng, beta=beta)


def sampling_decider(m: int | None = None, abort_threshold: int | None = None,
                     beta: float = 0.2) -> Protocol:
    # a partial of a module-level function survives pickling for worker processes
    return partial(_sampling_run, m=m, abort_threshold=abort_threshold, beta=beta)


PROTOCOLS: dict[str, Callable[..., Protocol]] = {
    "mod4": lambda **_: mod4_decider,
    "constant": lambda **_: constant_decider,
    "randomized": sampling_decider,
}


@dataclass
class SuccessEstimate:
    trials: int
    successes: int
    aborts: int
    ci: tuple[float, float] = field(default=(0.0, 0.0))

    @property
    def rate(self) -> float:
        return self.successes / self.trials

    @property
    def ci_halfwidth(self) -> float:
        return (self.ci[1] - self.ci[0]) / 2


def _count(protocol: Protocol, n: int, k: int, seed: int, lo: int, hi: int) -> tuple[int, int]:
    wins = aborts = 0
    for i in range(lo, hi):
        rng = np.random.default_rng(seed ^ i)
        x, y = sample_Unk(n, k, rng)
        out = protocol(x, y, k, rng)
        if out.aborted:
            aborts += 1
        elif out.output == egh_eval(x, y, k):
            wins += 1
    return wins, aborts


def _chunks(total: int, parts: int) -> list[tuple[int, int]]:
    step = math.ceil(total / parts)
    return [(lo, min(lo + step, total)) for lo in range(0, total, step)]


def estimate_success(protocol: Protocol, n: int, k: int, trials: int = 1000, seed: int = 0,
                     exhaustive: bool = False, jobs: int = 1) -> SuccessEstimate:
    """Success rate on U_{n,k}; aborts count as failures.  CI is Wilson 95%.

    ``exhaustive`` averages over every promise pair instead of sampling (the
    protocol still gets a generator seeded by ``seed``).
    """
    _check_promise(n, k)
    if exhaustive:
        check_exhaustive(n)
        rng = np.random.default_rng(seed)
        wins = aborts = total = 0
        for x, y in enumerate_Unk(n, k):
            out = protocol(x, y, k, rng)
            total += 1
            if out.aborted:
                aborts += 1
            elif out.output == egh_eval(x, y, k):
                wins += 1
        trials = total
    else:
        if trials < 100:
            raise ValueError("trials must be >= 100")
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                parts = list(pool.map(
                    _count, *zip(*[(protocol, n, k, seed, lo, hi) for lo, hi in _chunks(trials, jobs)])
                ))
        else:
            parts = [_count(protocol, n, k, seed, 0, trials)]
        wins = sum(p[0] for p in parts)
        aborts = sum(p[1] for p in parts)
    ci = binomtest(wins, trials).proportion_ci(confidence_level=0.95, method="wilson")
    return SuccessEstimate(trials, wins, aborts, (float(ci.low), float(ci.high)))


def protocol_csv(name: str, n: int, k: int, m: int | str, est: SuccessEstimate) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PROTOCOL_HEADER)
    w.writerow([name, n, k, m, est.trials, est.successes, est.aborts,
                repr(est.rate), repr(est.ci_halfwidth)])
    return buf.getvalue()


__all__ = [
    "ABORT", "STAR", "PROTOCOL_HEADER", "egh_eval", "ProtocolOutcome", "mod4_protocol",
    "default_rounds", "default_abort_threshold", "randomized_gh", "lift_instance",
    "sample_Unk", "enumerate_Unk", "mod4_decider", "constant_decider", "sampling_decider",
    "PROTOCOLS", "SuccessEstimate", "estimate_success", "protocol_csv",
]
