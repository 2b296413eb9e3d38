"""Structured subsets of the sign cube {+1,-1}^n and integer two-cubes.

Vectors of the cube are bit-packed into Python/numpy integers: coordinate j
(0-based) lives in bit ``n - 1 - j`` and a set bit means the entry is -1.
With this layout the integer order of the codes is the lexicographic order of
the sign strings (with '+' < '-'), and

    <x, y> = n - 2 * popcount(code(x) ^ code(y)).

The cube is identified with F_2^n by sending -1 to 1 and +1 to 0, so the XOR of
two codes is the field sum and the coordinatewise product of the sign vectors.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from math import comb
from pathlib import Path

import numpy as np

MAX_EXHAUSTIVE_N = 24
_CHUNK_BITS = 20


class InfeasibleError(Exception):
    """An exhaustive operation was asked for a size it refuses to enumerate."""


class SpecError(ValueError):
    """Malformed set-spec text; ``offset`` is the byte offset of the first error."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.message = message
        self.offset = offset


def check_exhaustive(n: int) -> None:
    if n > MAX_EXHAUSTIVE_N:
        raise InfeasibleError(
            f"exhaustive cap n={MAX_EXHAUSTIVE_N}: refusing to enumerate dimension {n}"
        )


# ---------------------------------------------------------------------------
# bit-packing helpers
# ---------------------------------------------------------------------------

def encode(vec) -> int:
    """Code of a +-1 vector (bit set where the entry is -1)."""
    code = 0
    for v in vec:
        v = int(v)
        if v not in (1, -1):
            raise ValueError(f"sign vector entries must be +1 or -1, got {v}")
        code = (code << 1) | (v == -1)
    return code


def decode(code: int, n: int) -> np.ndarray:
    """Inverse of :func:`encode`; returns an int8 array of +-1."""
    bits = np.array([(int(code) >> (n - 1 - j)) & 1 for j in range(n)], dtype=np.int8)
    return (1 - 2 * bits).astype(np.int8)


def sign_matrix(codes: np.ndarray, n: int) -> np.ndarray:
    """Rows of +-1 entries for an array of codes."""
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    bits = (np.asarray(codes, dtype=np.int64)[:, None] >> shifts) & 1
    return (1 - 2 * bits).astype(np.int8)


def popcount(a: np.ndarray) -> np.ndarray:
    # bitwise_count yields uint8; widen so that n - 2 * popcount cannot wrap
    return np.bitwise_count(np.asarray(a, dtype=np.int64)).astype(np.int64)


def parse_sign_string(text: str) -> int:
    text = text.strip()
    if not text or set(text) - {"+", "-"}:
        raise ValueError(f"expected a string of '+'/'-', got {text!r}")
    return int(text.replace("+", "0").replace("-", "1"), 2)


def format_sign_string(code: int, n: int) -> str:
    return "".join("-" if (code >> (n - 1 - j)) & 1 else "+" for j in range(n))


def _filter_cube(n: int, keep) -> np.ndarray:
    """All codes c in [0, 2^n) with keep(c) true, in increasing order."""
    check_exhaustive(n)
    step = 1 << _CHUNK_BITS
    parts = []
    for start in range(0, 1 << n, step):
        chunk = np.arange(start, min(start + step, 1 << n), dtype=np.int64)
        parts.append(chunk[keep(chunk)])
    return np.concatenate(parts)


# ---------------------------------------------------------------------------
# GF(2) row reduction
# ---------------------------------------------------------------------------

def gf2_echelon(rows, n: int) -> tuple[int, ...]:
    """Reduced row-echelon basis of the span of ``rows`` (codes of width n)."""
    basis: list[int] = []
    for row in rows:
        row = int(row)
        for b in basis:
            row = min(row, row ^ b)
        if row:
            # keep the basis fully reduced on the new pivot
            basis = [min(b, b ^ row) for b in basis]
            basis.append(row)
    return tuple(sorted(basis, reverse=True))


def gf2_rank(rows, n: int) -> int:
    return len(gf2_echelon(rows, n))


def _span(basis) -> np.ndarray:
    members = np.zeros(1, dtype=np.int64)
    for b in basis:
        members = np.concatenate([members, members ^ np.int64(b)])
    return np.sort(members)


# ---------------------------------------------------------------------------
# vertex sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VertexSet:
    """Base class; subclasses give a predicate, a size and a uniform sampler."""

    n: int

    @property
    def size(self) -> int:
        raise NotImplementedError

    def members(self) -> np.ndarray:
        """Sorted int64 codes of all members (n <= 24)."""
        raise NotImplementedError

    def contains(self, codes) -> np.ndarray:
        raise NotImplementedError

    def sample_code(self, rng: np.random.Generator) -> int:
        raise NotImplementedError

    def sample(self, seed=0) -> np.ndarray:
        """Uniform member as a +-1 int8 vector; ``seed`` may be an int or a Generator."""
        return sample(self, seed)

    @property
    def beta(self) -> float:
        """log2 |B| / n."""
        return float(np.log2(float(self.size))) / self.n


@dataclass(frozen=True)
class Cube(VertexSet):
    @property
    def size(self) -> int:
        return 1 << self.n

    def members(self) -> np.ndarray:
        check_exhaustive(self.n)
        return np.arange(1 << self.n, dtype=np.int64)

    def contains(self, codes) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        return (codes >= 0) & (codes < (1 << self.n))

    def sample_code(self, rng) -> int:
        return _bits_to_int(rng.integers(0, 2, self.n))


@dataclass(frozen=True)
class Slice(VertexSet):
    """Vectors with coordinate sum ``total`` (a Hamming sphere around 1^n)."""

    total: int = 0

    def __post_init__(self):
        if abs(self.total) > self.n or (self.n - self.total) % 2:
            raise ValueError(
                f"empty slice: sum={self.total} impossible for n={self.n}"
            )

    @property
    def minus_count(self) -> int:
        return (self.n - self.total) // 2

    @property
    def size(self) -> int:
        return comb(self.n, self.minus_count)

    def members(self) -> np.ndarray:
        m = self.minus_count
        return _filter_cube(self.n, lambda c: popcount(c) == m)

    def contains(self, codes) -> np.ndarray:
        return popcount(codes) == self.minus_count

    def sample_code(self, rng) -> int:
        bits = np.zeros(self.n, dtype=np.int64)
        bits[rng.choice(self.n, self.minus_count, replace=False)] = 1
        return _bits_to_int(bits)


@dataclass(frozen=True)
class BiasedSlice(Slice):
    """Slice with sum (1 - 2 eps) n; the number of -1 entries is round(eps n)."""

    eps: Decimal = Decimal("0.25")
    total: int = field(init=False)

    def __post_init__(self):
        eps = Decimal(self.eps)
        if not (0 <= eps <= 1):
            raise ValueError(f"eps must lie in [0, 1], got {eps}")
        m = int((eps * self.n).to_integral_value())
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "total", self.n - 2 * m)
        super().__post_init__()


@dataclass(frozen=True)
class Mod4Class(VertexSet):
    """Vectors with (n - sum y) / 2 = r (mod 2), i.e. the parity of the -1 count."""

    r: int = 0

    def __post_init__(self):
        if self.r not in (0, 1):
            raise ValueError(f"residue r must be 0 or 1, got {self.r}")

    @property
    def size(self) -> int:
        return 1 << (self.n - 1)

    def members(self) -> np.ndarray:
        return _filter_cube(self.n, lambda c: (popcount(c) & 1) == self.r)

    def contains(self, codes) -> np.ndarray:
        return (popcount(codes) & 1) == self.r

    def sample_code(self, rng) -> int:
        bits = rng.integers(0, 2, self.n)
        bits[-1] = (int(bits[:-1].sum()) + self.r) & 1
        return _bits_to_int(bits)


@dataclass(frozen=True)
class Subspace(VertexSet):
    """Image of a linear subspace of F_2^n; ``basis`` is kept in reduced echelon form."""

    basis: tuple[int, ...] = ()

    def __post_init__(self):
        for b in self.basis:
            if not 0 <= int(b) < (1 << self.n):
                raise ValueError(f"basis row {b} does not fit in {self.n} bits")
        object.__setattr__(self, "basis", gf2_echelon(self.basis, self.n))

    @classmethod
    def from_strings(cls, n: int, rows) -> "Subspace":
        """Basis rows written over F_2 with coordinate 1 first, e.g. '110'."""
        return cls(n, tuple(int(r, 2) for r in rows))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def size(self) -> int:
        return 1 << self.dim

    def members(self) -> np.ndarray:
        check_exhaustive(self.n)
        return _span(self.basis)

    def _reduce(self, code: int) -> int:
        for b in self.basis:
            code = min(code, code ^ b)
        return code

    def contains(self, codes) -> np.ndarray:
        return np.array([self._reduce(int(c)) == 0 for c in np.atleast_1d(codes)])

    def sample_code(self, rng) -> int:
        code = 0
        for b, take in zip(self.basis, rng.integers(0, 2, self.dim)):
            if take:
                code ^= b
        return code


@dataclass(frozen=True)
class Explicit(VertexSet):
    """An explicit list of members, stored as sorted distinct codes."""

    codes: tuple[int, ...] = ()

    def __post_init__(self):
        codes = tuple(sorted({int(c) for c in self.codes}))
        if not codes:
            raise ValueError("explicit vertex set is empty")
        if codes[0] < 0 or codes[-1] >= (1 << self.n):
            raise ValueError(f"member code out of range for n={self.n}")
        object.__setattr__(self, "codes", codes)

    @classmethod
    def from_vectors(cls, vectors) -> "Explicit":
        vectors = [list(v) for v in vectors]
        return cls(len(vectors[0]), tuple(encode(v) for v in vectors))

    @property
    def size(self) -> int:
        return len(self.codes)

    def members(self) -> np.ndarray:
        check_exhaustive(self.n)
        return np.array(self.codes, dtype=np.int64)

    def contains(self, codes) -> np.ndarray:
        return np.isin(np.asarray(codes, dtype=np.int64), np.array(self.codes, dtype=np.int64))

    def sample_code(self, rng) -> int:
        return self.codes[int(rng.integers(len(self.codes)))]


@dataclass(frozen=True)
class TwoCube:
    """A = A_1 x ... x A_n with A_j = {u_j, v_j}, u_j != v_j."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple((int(u), int(v)) for u, v in self.pairs)
        if not pairs:
            raise ValueError("two-cube needs at least one coordinate")
        for j, (u, v) in enumerate(pairs):
            if u == v:
                raise ValueError(f"coordinate {j}: u_j == v_j == {u}")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def from_differences(cls, d) -> "TwoCube":
        """Near-symmetric pairs (d - floor(d/2), -floor(d/2)) realising differences d."""
        return cls(tuple((int(x) - int(x) // 2, -(int(x) // 2)) for x in d))

    @property
    def n(self) -> int:
        return len(self.pairs)

    @property
    def size(self) -> int:
        return 1 << self.n

    @property
    def differences(self) -> tuple[int, ...]:
        return tuple(u - v for u, v in self.pairs)

    @property
    def radius(self) -> int:
        """L = sum_j max(|u_j|, |v_j|), a bound on |<x, y>| for x in A, y in the cube."""
        return sum(max(abs(u), abs(v)) for u, v in self.pairs)

    def point(self, code: int) -> np.ndarray:
        """Member selected by ``code``: bit set in coordinate j picks v_j, else u_j."""
        u = np.array([p[0] for p in self.pairs], dtype=np.int64)
        v = np.array([p[1] for p in self.pairs], dtype=np.int64)
        bits = (int(code) >> np.arange(self.n - 1, -1, -1)) & 1
        return np.where(bits == 1, v, u)

    def members(self) -> np.ndarray:
        """All 2^n points as rows, in the code order of :meth:`point`."""
        if self.n > 20:
            raise InfeasibleError(f"refusing to list 2^{self.n} two-cube points")
        u = np.array([p[0] for p in self.pairs], dtype=np.int64)
        v = np.array([p[1] for p in self.pairs], dtype=np.int64)
        bits = sign_matrix(np.arange(1 << self.n), self.n) == -1
        return np.where(bits, v, u)

    def sample(self, seed=0) -> np.ndarray:
        rng = np.random.default_rng(seed)
        return self.point(_bits_to_int(rng.integers(0, 2, self.n)))


def _bits_to_int(bits) -> int:
    code = 0
    for b in bits:
        code = (code << 1) | int(b)
    return code


# ---------------------------------------------------------------------------
# random constructions
# ---------------------------------------------------------------------------

def random_subspace(n: int, dim: int, seed=0) -> Subspace:
    """Span of ``dim`` random rows, redrawn from the same stream until full rank."""
    if not 0 <= dim <= n:
        raise ValueError(f"need 0 <= dim <= n, got dim={dim}, n={n}")
    rng = np.random.default_rng(seed)
    while True:
        rows = [_bits_to_int(rng.integers(0, 2, n)) for _ in range(dim)]
        basis = gf2_echelon(rows, n)
        if len(basis) == dim:
            return Subspace(n, basis)


def random_subset(n: int, size: int, seed=0) -> Explicit:
    """Uniformly random ``size``-element subset of the cube (n <= 24)."""
    check_exhaustive(n)
    if not 1 <= size <= (1 << n):
        raise ValueError(f"subset size {size} impossible for n={n}")
    rng = np.random.default_rng(seed)
    return Explicit(n, tuple(int(c) for c in rng.choice(1 << n, size, replace=False)))


def sample(vs: VertexSet, seed=0) -> np.ndarray:
    return decode(vs.sample_code(np.random.default_rng(seed)), vs.n)


def signing_orbit(x, b) -> np.ndarray:
    """Coordinatewise product x o b."""
    x = np.asarray(x)
    b = np.asarray(b)
    if x.shape != b.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {b.shape}")
    return x * b


# ---------------------------------------------------------------------------
# set-spec mini-language
# ---------------------------------------------------------------------------

_PARAMS = {
    "cube": ("n",),
    "slice": ("n", "sum"),
    "subspace": ("n", "dim", "seed"),
    "mod4": ("n", "r"),
    "biased": ("n", "eps"),
}
_FILE_KINDS = ("explicit", "twocube")
_INT_RE = re.compile(r"[+-]?\d+\Z")
_DEC_RE = re.compile(r"\d+(\.\d+)?\Z|\.\d+\Z")


@dataclass(frozen=True)
class SetSpec:
    kind: str
    n: int | None = None
    sum: int | None = None
    dim: int | None = None
    seed: int | None = None
    r: int | None = None
    eps: Decimal | None = None
    path: str | None = None

    def render(self) -> str:
        if self.kind in _FILE_KINDS:
            return f"{self.kind}:@{self.path}"
        parts = []
        for name in _PARAMS[self.kind]:
            parts.append(f"{name}={getattr(self, name)}")
        return f"{self.kind}:" + ",".join(parts)

    def __str__(self) -> str:
        return self.render()


def render_set_spec(spec: SetSpec) -> str:
    return spec.render()


def parse_set_spec(text: str) -> SetSpec:
    if not text:
        raise SpecError("empty set spec", 0)
    colon = text.find(":")
    kind = text if colon < 0 else text[:colon]
    if kind not in _PARAMS and kind not in _FILE_KINDS:
        raise SpecError(f"unknown variant {kind!r}", 0)
    if colon < 0:
        raise SpecError("expected ':' after variant", len(text))
    body_at = colon + 1
    body = text[body_at:]
    if kind in _FILE_KINDS:
        if not body.startswith("@") or len(body) == 1:
            raise SpecError("expected '@<path>'", body_at)
        return SetSpec(kind, path=body[1:])

    values: dict[str, int | Decimal] = {}
    pos = body_at
    for item in body.split(","):
        key, eq, raw = item.partition("=")
        if not eq:
            raise SpecError(f"expected key=value, got {item!r}", pos)
        if key not in _PARAMS[kind]:
            raise SpecError(f"unknown parameter {key!r} for {kind}", pos)
        if key in values:
            raise SpecError(f"duplicate parameter {key!r}", pos)
        val_at = pos + len(key) + 1
        if key == "eps":
            if not _DEC_RE.match(raw):
                raise SpecError(f"expected a decimal for eps, got {raw!r}", val_at)
            try:
                values[key] = Decimal(raw)
            except InvalidOperation:
                raise SpecError(f"bad decimal {raw!r}", val_at) from None
        else:
            if not _INT_RE.match(raw):
                raise SpecError(f"expected an integer for {key}, got {raw!r}", val_at)
            values[key] = int(raw)
        pos += len(item) + 1
    for name in _PARAMS[kind]:
        if name not in values:
            raise SpecError(f"missing parameter {name!r}", len(text))

    n = values["n"]
    n_at = text.find("n=", body_at) + 2
    if n < 1:
        raise SpecError(f"n must be >= 1, got {n}", n_at)
    if kind == "subspace":
        # members are materialized as a span, so this variant is exhaustive
        if n > MAX_EXHAUSTIVE_N:
            raise SpecError(f"n={n} outside [1, {MAX_EXHAUSTIVE_N}] for subspace", n_at)
        if not 0 <= values["dim"] <= n:
            raise SpecError(f"dim must lie in [0, n], got {values['dim']}", text.find("dim=") + 4)
    if kind == "mod4" and values["r"] not in (0, 1):
        raise SpecError(f"r must be 0 or 1, got {values['r']}", text.find("r=", body_at) + 2)
    if kind == "biased" and not values["eps"] <= 1:
        raise SpecError("eps must be <= 1", text.find("eps=") + 4)
    return SetSpec(kind, **values)


def read_explicit_file(path) -> Explicit:
    """One vector per line written with '+'/'-'; blank lines and '#' comments ignored."""
    lines = [ln.strip() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError(f"{path}: no vectors")
    n = len(lines[0])
    for i, ln in enumerate(lines):
        if len(ln) != n:
            raise ValueError(f"{path}:{i + 1}: expected {n} signs, got {len(ln)}")
    return Explicit(n, tuple(parse_sign_string(ln) for ln in lines))


def read_twocube_file(path) -> TwoCube:
    """One coordinate per line, 'u v' as decimal integers."""
    pairs = []
    for i, ln in enumerate(Path(path).read_text().splitlines()):
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        fields = ln.split()
        if len(fields) != 2:
            raise ValueError(f"{path}:{i + 1}: expected 'u v', got {ln!r}")
        pairs.append((int(fields[0]), int(fields[1])))
    return TwoCube(tuple(pairs))


def write_explicit_file(path, vs: VertexSet) -> None:
    Path(path).write_text(
        "".join(format_sign_string(int(c), vs.n) + "\n" for c in vs.members())
    )


def materialize(spec: SetSpec | str, seed: int = 0) -> VertexSet | TwoCube:
    """Build the set described by ``spec``.

    ``seed`` only matters for randomized variants that do not carry their own
    seed; ``subspace`` specs always use the seed written in the spec.
    """
    if isinstance(spec, str):
        spec = parse_set_spec(spec)
    if spec.kind == "cube":
        return Cube(spec.n)
    if spec.kind == "slice":
        return Slice(spec.n, spec.sum)
    if spec.kind == "biased":
        return BiasedSlice(spec.n, spec.eps)
    if spec.kind == "mod4":
        return Mod4Class(spec.n, spec.r)
    if spec.kind == "subspace":
        return random_subspace(spec.n, spec.dim, spec.seed)
    if spec.kind == "explicit":
        return read_explicit_file(spec.path)
    if spec.kind == "twocube":
        return read_twocube_file(spec.path)
    raise SpecError(f"unknown variant {spec.kind!r}", 0)


__all__ = [
    "MAX_EXHAUSTIVE_N", "InfeasibleError", "SpecError", "encode", "decode",
    "sign_matrix", "popcount", "gf2_echelon", "gf2_rank", "VertexSet", "Cube",
    "Slice", "BiasedSlice", "Mod4Class", "Subspace", "Explicit", "TwoCube",
    "random_subspace", "random_subset", "sample", "signing_orbit", "SetSpec",
    "parse_set_spec", "render_set_spec", "materialize", "read_explicit_file",
    "read_twocube_file", "write_explicit_file", "parse_sign_string",
    "format_sign_string",
]
