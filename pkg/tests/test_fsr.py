import itertools
import random

import pytest
import sympy

from fsrpc.errors import SpecError
from fsrpc.fsr import (Family, FsrSpec, canonical_specs, candidates, find_maximal, metrics,
                       nonzero_period, ring_from_poly, spec_poly, transition_matrix)
from fsrpc.gf2 import Gf2Poly, char_poly, is_primitive, parse_poly

FAMILIES = ["fibonacci", "galois", "ring", "mfsr", "ca"]


def random_spec(rng, family, n):
    if family == "fibonacci":
        return FsrSpec(family, n, taps=[t for t in range(n) if rng.random() < 0.4])
    if family == "galois":
        return FsrSpec(family, n, taps=[t for t in range(n - 1) if rng.random() < 0.4])
    if family == "ca":
        return FsrSpec(family, n, rules=[rng.choice((90, 150)) for _ in range(n)])
    conns, srcs, dsts = [], set(), set()
    for _ in range(rng.randint(0, n)):
        s, d = rng.randrange(n), rng.randrange(n)
        if s in srcs or d in dsts or s == (d + 1) % n:
            continue
        conns.append((s, d))
        srcs.add(s)
        dsts.add(d)
    return FsrSpec(family, n, conns=conns)


def test_family_parse():
    assert Family.parse("MFSR") is Family.MFSR
    assert Family.parse("fib") is Family.FIBONACCI
    assert Family.parse(Family.CA) is Family.CA
    with pytest.raises(SpecError):
        Family.parse("lfsr9000")


def test_fibonacci_from_poly_period():
    spec = FsrSpec.from_poly("fibonacci", parse_poly("x^4+x+1"))
    assert spec.taps == (0, 1)
    assert nonzero_period(spec.build()) == 15
    assert spec_poly(spec) == parse_poly("x^4+x+1")


def test_fibonacci_matrix_is_companion():
    m = transition_matrix(FsrSpec("fibonacci", 4, taps=[0, 1]))
    # shift rows plus the feedback row
    assert m.rows == (0b0010, 0b0100, 0b1000, 0b0011)
    assert char_poly(m) == parse_poly("x^4+x+1")


def test_single_cell_ca():
    c = FsrSpec("ca", 1, rules=[150]).build()
    assert 2 % nonzero_period(c) == 0


def test_galois_from_primitive_octic():
    p = parse_poly("x^8+x^4+x^3+x^2+1")
    spec = FsrSpec.from_poly("galois", p)
    assert spec_poly(spec) == p
    assert nonzero_period(spec.build()) == 255


def test_pure_shift_is_nilpotent():
    m = transition_matrix(FsrSpec("fibonacci", 3, taps=[]))
    assert (m ** 3).rows == (0, 0, 0)
    assert (m ** 2).rows != (0, 0, 0)
    assert char_poly(m) == parse_poly("x^3")


@pytest.mark.parametrize("family", FAMILIES)
def test_matrix_matches_step_exhaustive(family):
    rng = random.Random(FAMILIES.index(family))
    for n in (1, 2, 3, 5, 8, 12, 16):
        if family == "galois" and n == 1:
            continue
        for _ in range(3 if n > 12 else 6):
            spec = random_spec(rng, family, n)
            c, m = spec.build(), transition_matrix(spec)
            for v in range(1 << n):
                assert m.apply(v) == c.next_value(v), (spec, v)


@pytest.mark.parametrize("family", FAMILIES)
def test_matrix_matches_step_random_wide(family):
    rng = random.Random(99)
    for n in (17, 33, 64):
        spec = random_spec(rng, family, n)
        c, m = spec.build(), transition_matrix(spec)
        for _ in range(10000 // 3):
            v = rng.getrandbits(n)
            assert m.apply(v) == c.next_value(v)


def test_table_one_rows():
    rows = {f.value: metrics(s).table_row() for f, s in canonical_specs().items()}
    assert rows == {
        "fibonacci": (1, 4, 2),
        "galois": (3, 2, 4),
        "ring": (3, 2, 2),
        "mfsr": (2, 2, 2),
        "ca": (8, 3, 3),
    }


def test_canonical_specs_are_first_hits():
    for family, spec in canonical_specs().items():
        assert spec.width == 8
        assert find_maximal(family, 8, count=1) == [spec]
        assert nonzero_period(spec.build()) == 255


@pytest.mark.parametrize("n", [3, 5, 9, 16])
def test_ca_metrics(n):
    spec = FsrSpec.ca(range(n), n)
    assert metrics(spec).table_row() == (n, 3, 3)


def test_shift_ring_metrics():
    m = metrics(FsrSpec("ring", 6))
    assert m.xor_gate_count == 0
    assert m.max_gate_depth == 1
    assert (m.max_fan_in, m.max_fan_out) == (1, 1)


def test_metrics_depth_and_raw_count():
    fib = metrics(canonical_specs()["fibonacci"])
    assert fib.raw_xor2_count == 3
    assert fib.max_gate_depth == 2
    for fam in ("ring", "mfsr"):
        m = metrics(canonical_specs()[fam])
        assert m.max_gate_depth == 1
        assert m.raw_xor2_count == m.xor_gate_count


@pytest.mark.parametrize("bad", [
    dict(family="fibonacci", width=4, taps=[4]),
    dict(family="galois", width=4, taps=[3]),
    dict(family="mfsr", width=4, conns=[(0, 1), (2, 1)]),      # fan-in 3 at register 1
    dict(family="mfsr", width=4, conns=[(0, 1), (0, 2)]),      # fan-out 3 at register 0
    dict(family="mfsr", width=4, conns=[(2, 1)]),              # cancels the shift into 1
    dict(family="ring", width=4, conns=[(5, 0)]),
    dict(family="ca", width=3, rules=[90, 90]),
    dict(family="ca", width=3, rules=[90, 30, 90]),
    dict(family="fibonacci", width=0),
    dict(family="fibonacci", width=65),
    dict(family="fibonacci", width=4, conns=[(0, 0)]),
])
def test_invalid_specs(bad):
    with pytest.raises(SpecError):
        FsrSpec(**bad)


def test_text_form():
    spec = canonical_specs()["mfsr"]
    assert spec.to_text() == "family=mfsr width=8 conns=[(0,0),(1,5)]"
    assert str(canonical_specs()["ca"]).endswith("rules=[90,150,150,90,90,90,90,90]")


def test_find_maximal_quadratic():
    got = find_maximal("fibonacci", 2, count=10)
    assert len(got) == 1
    assert spec_poly(got[0]) == parse_poly("x^2+x+1")


@pytest.mark.parametrize("family", ["fibonacci", "galois"])
def test_find_maximal_count_octics(family):
    got = find_maximal(family, 8)
    assert len(got) == sympy.totient(255) // 8 == 16
    assert len({spec_poly(s) for s in got}) == 16


@pytest.mark.parametrize("family", FAMILIES)
def test_find_maximal_results_verified_and_ordered(family):
    got = find_maximal(family, 6, count=5)
    assert got
    for s in got:
        assert is_primitive(spec_poly(s))
        assert nonzero_period(s.build()) == 63
    keys = [(len(s.feedback_key()), s.feedback_key()) for s in got]
    assert keys == sorted(keys)
    assert find_maximal(family, 6, count=5) == got


@pytest.mark.parametrize("family", FAMILIES)
def test_find_maximal_64(family):
    got = find_maximal(family, 64, count=1)
    assert len(got) == 1
    assert is_primitive(spec_poly(got[0]))


def test_find_maximal_width_range():
    with pytest.raises(SpecError):
        find_maximal("mfsr", 1)
    with pytest.raises(SpecError):
        find_maximal("mfsr", 65)


def test_find_maximal_empty_budget():
    assert find_maximal("mfsr", 10, budget=0) == []


def test_candidate_order_starts_small():
    first = [make() for make, _ in list(candidates("mfsr", 5))[:3]]
    assert first[0].conns == ()
    assert all(len(s.conns) <= 1 for s in first)


def test_ring_from_poly():
    for p in find_maximal("galois", 10, count=8):
        poly = spec_poly(p)
        try:
            ring = ring_from_poly(poly)
        except SpecError:
            continue
        assert spec_poly(ring) == poly
        assert metrics(ring).max_fan_in <= 2 and metrics(ring).max_fan_out <= 2
    with pytest.raises(SpecError):
        ring_from_poly(Gf2Poly(0b110))


def test_ring_from_poly_no_layout():
    p = parse_poly("x^8+x^7+x^6+x+1")
    assert is_primitive(p)
    # oracle: every ring with one connection per middle term
    pool = [(s, d) for s in range(8) for d in range(8) if s != (d + 1) % 8]
    hits = 0
    for conns in itertools.combinations(pool, 3):
        if len({s for s, _ in conns}) == 3 and len({d for _, d in conns}) == 3:
            hits += spec_poly(FsrSpec("ring", 8, conns=conns)) == p
    assert hits == 0
    with pytest.raises(SpecError):
        ring_from_poly(p)


def test_from_poly_ca_unsupported():
    with pytest.raises(SpecError):
        FsrSpec.from_poly("ca", parse_poly("x^4+x+1"))
