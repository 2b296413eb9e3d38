from collections import Counter
from decimal import Decimal

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import chisquare

import oracles
from anticonc.exact_dist import direction_distribution
from anticonc.vertex_sets import (
    BiasedSlice,
    Cube,
    Explicit,
    InfeasibleError,
    Mod4Class,
    SetSpec,
    Slice,
    SpecError,
    Subspace,
    TwoCube,
    decode,
    encode,
    format_sign_string,
    gf2_rank,
    materialize,
    parse_set_spec,
    popcount,
    random_subset,
    random_subspace,
    read_explicit_file,
    read_twocube_file,
    sample,
    signing_orbit,
    write_explicit_file,
)


def vec(code, n):
    return tuple(int(v) for v in decode(code, n))


# --- encoding --------------------------------------------------------------

@given(st.lists(st.sampled_from([1, -1]), min_size=1, max_size=24))
def test_encode_roundtrip(v):
    assert list(decode(encode(v), len(v))) == v


@given(st.integers(1, 16), st.data())
def test_inner_product_via_popcount(n, data):
    x = data.draw(st.integers(0, (1 << n) - 1))
    y = data.draw(st.integers(0, (1 << n) - 1))
    assert n - 2 * int(popcount(np.array([x ^ y]))[0]) == oracles.ip(vec(x, n), vec(y, n))


def test_code_order_is_lexicographic():
    n = 4
    strings = [format_sign_string(c, n) for c in range(1 << n)]
    assert strings == sorted(strings, key=lambda s: s.replace("+", "0").replace("-", "1"))


# --- variants -------------------------------------------------------------

ALL_SMALL = [
    Cube(3), Cube(6), Slice(4, 0), Slice(7, 3), BiasedSlice(8, Decimal("0.25")),
    Mod4Class(4, 0), Mod4Class(5, 1), Subspace.from_strings(3, ["110", "011"]),
    random_subspace(10, 4, seed=3), random_subset(9, 40, seed=1),
]


@pytest.mark.parametrize("vs", ALL_SMALL, ids=repr)
def test_enumeration_matches_size_and_predicate(vs):
    m = vs.members()
    assert len(m) == vs.size
    assert np.all(np.diff(m) > 0)
    assert np.all(vs.contains(m))


@pytest.mark.parametrize("n", [1, 4, 7, 12])
def test_exhaustive_predicates(n):
    codes = np.arange(1 << n)
    for r in (0, 1):
        members = Mod4Class(n, r).members()
        assert set(members) == {c for c in codes if (bin(c).count("1") % 2) == r}
        for y in members[:50]:
            assert ((n - sum(vec(int(y), n))) // 2) % 2 == r
    for s in range(-n, n + 1, 2):
        sl = Slice(n, s).members()
        assert all(sum(vec(int(c), n)) == s for c in sl)
        assert len(sl) == sum(1 for c in codes if sum(vec(int(c), n)) == s)


def test_cube_n3_has_eight_members():
    assert Cube(3).size == 8 and len(Cube(3).members()) == 8


def test_slice_n4_sum0_has_six_members():
    assert Slice(4, 0).size == 6


def test_subspace_example():
    got = [vec(int(c), 3) for c in Subspace.from_strings(3, ["110", "011"]).members()]
    assert sorted(got) == oracles.span_f2(["110", "011"], 3)
    assert set(got) == {(1, 1, 1), (-1, -1, 1), (1, -1, -1), (-1, 1, -1)}


def test_empty_slice_rejected():
    with pytest.raises(ValueError):
        Slice(4, 1)
    with pytest.raises(ValueError):
        Slice(4, 6)


def test_biased_slice_total():
    assert BiasedSlice(8, Decimal("0.25")).total == 4
    assert BiasedSlice(12, Decimal("0.25")).minus_count == 3


@given(st.integers(0, 2**31 - 1))
def test_subspace_closure(seed):
    S = random_subspace(8, 3, seed)
    m = set(int(c) for c in S.members())
    assert all((a ^ b) in m for a in m for b in m)
    assert S.dim == 3 and gf2_rank(S.basis, 8) == 3


def test_random_subspace_deterministic():
    assert random_subspace(14, 9, 5) == random_subspace(14, 9, 5)


def test_exhaustive_cap():
    with pytest.raises(InfeasibleError, match="exhaustive cap n=24"):
        Cube(25).members()


# --- sampling ---------------------------------------------------------------

def test_sample_cube_member():
    x = sample(Cube(2), seed=11)
    assert x.shape == (2,) and set(x) <= {1, -1}


@given(st.integers(0, 2**32 - 1))
def test_sample_mod4_even_minus_count(seed):
    y = sample(Mod4Class(4, 0), seed)
    assert np.count_nonzero(y == -1) % 2 == 0


def test_sample_slice_uniform_chisquare():
    rng = np.random.default_rng(0)
    S = Slice(4, 0)
    counts = Counter(S.sample_code(rng) for _ in range(10_000))
    assert len(counts) == 6
    assert chisquare(list(counts.values())).pvalue > 0.001


@pytest.mark.parametrize("vs", ALL_SMALL, ids=repr)
def test_samples_are_members(vs):
    rng = np.random.default_rng(1)
    codes = [vs.sample_code(rng) for _ in range(50)]
    assert np.all(vs.contains(codes))


def test_sampling_has_no_dimension_cap():
    assert len(Cube(40).sample(3)) == 40
    assert np.count_nonzero(Slice(60, 0).sample(3) == -1) == 30


# --- signing orbit ------------------------------------------------------------

def test_signing_orbit_examples():
    x = np.array([1, -1])
    assert list(signing_orbit(x, np.array([1, 1]))) == [1, -1]
    assert list(signing_orbit(x, np.array([-1, -1]))) == [-1, 1]
    with pytest.raises(ValueError):
        signing_orbit(x, np.array([1, 1, 1]))


@pytest.mark.parametrize("n,dim,seed", [(3, 2, 0), (6, 3, 1), (10, 5, 2)])
def test_signing_orbit_invariance_for_subspaces(n, dim, seed):
    S = random_subspace(n, dim, seed) if n > 3 else Subspace.from_strings(3, ["110", "011"])
    xs = range(1 << n) if n <= 6 else np.random.default_rng(seed).integers(0, 1 << n, 40)
    for xc in xs:
        x = decode(int(xc), n).astype(int)
        base = direction_distribution(x, S)
        for b in S.members()[:8]:
            xb = signing_orbit(x, decode(int(b), n))
            assert direction_distribution(xb, S) == base


# --- spec language -------------------------------------------------------------

def test_parse_examples():
    assert parse_set_spec("cube:n=4") == SetSpec("cube", n=4)
    assert parse_set_spec("slice:n=4,sum=0") == SetSpec("slice", n=4, sum=0)
    with pytest.raises(SpecError, match="unknown variant") as e:
        parse_set_spec("orbit:n=4")
    assert e.value.offset == 0


@pytest.mark.parametrize("text", [
    "cube:n=4", "slice:n=6,sum=-2", "subspace:n=10,dim=4,seed=7", "mod4:n=5,r=1",
    "biased:n=12,eps=0.25", "explicit:@sets/a.txt", "twocube:@d.txt",
])
def test_render_roundtrip(text):
    spec = parse_set_spec(text)
    assert spec.render() == text
    assert parse_set_spec(spec.render()) == spec


@pytest.mark.parametrize("text,offset", [
    ("", 0),
    ("cube", 4),
    ("cube:n=4,n=5", 9),
    ("slice:n=4", 9),
    ("slice:n=4,total=0", 10),
    ("cube:n=x", 7),
    ("subspace:n=30,dim=3,seed=0", 11),
    ("mod4:n=4,r=2", 11),
    ("cube:n=0", 7),
])
def test_parse_errors_carry_offsets(text, offset):
    with pytest.raises(SpecError) as e:
        parse_set_spec(text)
    assert e.value.offset == offset


@given(st.sampled_from(["cube", "slice", "mod4", "subspace"]), st.integers(1, 24), st.data())
def test_roundtrip_property(kind, n, data):
    if kind == "cube":
        spec = SetSpec("cube", n=n)
    elif kind == "slice":
        spec = SetSpec("slice", n=n, sum=data.draw(st.integers(-n, n)))
    elif kind == "mod4":
        spec = SetSpec("mod4", n=n, r=data.draw(st.integers(0, 1)))
    else:
        spec = SetSpec("subspace", n=n, dim=data.draw(st.integers(0, n)), seed=data.draw(st.integers(0, 10**9)))
    assert parse_set_spec(spec.render()) == spec


def test_materialize_variants(tmp_path):
    assert materialize("cube:n=3") == Cube(3)
    assert materialize("mod4:n=4,r=0").size == 8
    assert materialize("subspace:n=10,dim=4,seed=7", seed=99) == random_subspace(10, 4, 7)
    p = tmp_path / "b.txt"
    write_explicit_file(p, Slice(4, 2))
    assert read_explicit_file(p) == Explicit(4, tuple(Slice(4, 2).members()))
    assert materialize(f"explicit:@{p}").size == 4
    q = tmp_path / "a.txt"
    q.write_text("# pairs\n3 1\n0 -5\n")
    assert read_twocube_file(q) == TwoCube(((3, 1), (0, -5)))
    assert materialize(f"twocube:@{q}").differences == (2, 5)


def test_explicit_file_errors(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("++-\n+-\n")
    with pytest.raises(ValueError):
        read_explicit_file(p)


def test_twocube_points():
    A = TwoCube.from_differences((1, 2, 4))
    assert A.differences == (1, 2, 4)
    pts = A.members()
    assert pts.shape == (8, 3)
    assert len({tuple(p) for p in pts}) == 8
    assert list(A.point(0)) == [u for u, _ in A.pairs]
    with pytest.raises(ValueError):
        TwoCube(((1, 1),))
