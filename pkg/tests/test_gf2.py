import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st
from sympy import GF, Matrix, Poly, symbols
from sympy.polys.galoistools import gf_irreducible_p

from fsrpc.gf2 import (Factorization, Gf2Matrix, Gf2Poly, berlekamp_massey, char_poly,
                       char_poly_by_elimination, factorize, is_irreducible, is_prime,
                       is_primitive, multiplicative_order, parse_poly, poly_gcd,
                       poly_mul_mod, poly_pow_mod)

X = symbols("x")
polys = st.integers(min_value=0, max_value=(1 << 20) - 1).map(Gf2Poly)


def to_sympy(p):
    return Poly(list(reversed([p.bits >> i & 1 for i in range(max(p.degree, 0) + 1)])), X,
                domain=GF(2))


def coeffs(p):
    """Coefficient list highest first, as sympy's galoistools wants."""
    return [p.bits >> i & 1 for i in range(p.degree, -1, -1)]


def test_degree_and_text():
    assert Gf2Poly(0).degree == -1
    assert Gf2Poly(1).degree == 0
    assert str(Gf2Poly(0b111)) == "x^2+x+1"
    assert str(Gf2Poly(0)) == "0"
    assert parse_poly("x^8 + x^6+x^5+x^4+1").bits == 0x171
    assert parse_poly("0x171") == Gf2Poly(0x171)
    assert parse_poly("x+x") == Gf2Poly(0)


@pytest.mark.parametrize("bad", ["", "x^", "y+1", "x^2+2", "0xzz"])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        parse_poly(bad)


def test_degree_limit():
    Gf2Poly(1 << 64)
    with pytest.raises(ValueError):
        Gf2Poly(1 << 65)


@given(polys, polys, polys.filter(lambda m: m.degree >= 1))
def test_mul_mod_matches_sympy(a, b, m):
    got = poly_mul_mod(a, b, m)
    want = (to_sympy(a) * to_sympy(b)).rem(to_sympy(m))
    assert to_sympy(got) == want


def test_mul_mod_needs_real_modulus():
    with pytest.raises(ZeroDivisionError):
        poly_mul_mod(Gf2Poly(3), Gf2Poly(3), Gf2Poly(1))
    with pytest.raises(ZeroDivisionError):
        poly_mul_mod(Gf2Poly(3), Gf2Poly(3), Gf2Poly(0))


def test_small_products():
    assert poly_mul_mod(Gf2Poly(0b11), Gf2Poly(0b11), Gf2Poly(0b1011)) == Gf2Poly(0b101)
    # x * x^7 = x^8 = x^4+x^3+x+1 mod the AES polynomial
    assert poly_mul_mod(Gf2Poly(2), Gf2Poly(1 << 7), Gf2Poly(0x11B)) == Gf2Poly(0x1B)


@given(polys, st.integers(0, 500), polys.filter(lambda m: m.degree >= 1))
def test_pow_mod_is_repeated_mul(a, e, m):
    want = Gf2Poly(1) % m
    for _ in range(e % 40):
        want = poly_mul_mod(want, a, m)
    assert poly_pow_mod(a, e % 40, m) == want


@given(polys, polys)
def test_gcd_matches_sympy(a, b):
    g = poly_gcd(a, b)
    if not a and not b:
        assert not g
        return
    assert to_sympy(g) == sympy.gcd(to_sympy(a), to_sympy(b))


def test_irreducible_exhaustive_against_sympy():
    for bits in range(2, 1 << 12):
        p = Gf2Poly(bits)
        assert is_irreducible(p) == bool(gf_irreducible_p(coeffs(p), 2, sympy.ZZ)), p


def test_irreducible_known():
    assert is_irreducible(parse_poly("x^4+x+1"))
    assert not is_irreducible(parse_poly("x^4+1"))
    assert is_irreducible(parse_poly("x^64+x^4+x^3+x+1"))
    assert not is_irreducible(Gf2Poly(1))
    assert not is_irreducible(Gf2Poly(0))


def test_primitive_matches_brute_force_order():
    for bits in range(4, 1 << 11):
        p = Gf2Poly(bits)
        want = is_irreducible(p) and multiplicative_order(p) == (1 << p.degree) - 1
        assert is_primitive(p) == want, p


def test_primitive_counts_follow_totient():
    for d in range(2, 13):
        count = sum(is_primitive(Gf2Poly(b)) for b in range(1 << d, 1 << (d + 1)))
        assert count == sympy.totient((1 << d) - 1) // d


def test_primitive_known():
    assert is_primitive(parse_poly("x^4+x+1"))
    assert not is_primitive(parse_poly("x^4+x^3+x^2+x+1"))  # irreducible, order 5
    assert is_irreducible(parse_poly("x^4+x^3+x^2+x+1"))
    assert is_primitive(parse_poly("x^64+x^4+x^3+x+1"))
    assert is_primitive(parse_poly("x^32+x^22+x^2+x+1"))


def test_factorize_known():
    f = factorize((1 << 32) - 1)
    assert f.as_dict() == {3: 1, 5: 1, 17: 1, 257: 1, 65537: 1}
    assert factorize(1).prime_factors == ()
    assert factorize((1 << 64) - 1).primes() == [3, 5, 17, 257, 641, 65537, 6700417]
    assert factorize(2 ** 61 - 1).as_dict() == {2 ** 61 - 1: 1}


def test_factorize_mersenne_against_sympy():
    for d in range(1, 65):
        v = (1 << d) - 1
        assert factorize(v).as_dict() == sympy.factorint(v)


def test_factorize_random_64bit_against_sympy():
    rng = random.Random(2024)
    for _ in range(300):
        v = rng.getrandbits(64) or 1
        assert factorize(v).as_dict() == sympy.factorint(v)


def test_factorize_semiprimes():
    rng = random.Random(7)
    for _ in range(20):
        p = sympy.randprime(1 << 30, 1 << 32)
        q = sympy.randprime(1 << 30, 1 << 32)
        assert factorize(p * q).as_dict() == sympy.factorint(p * q)


def test_factorization_checks_product():
    with pytest.raises(ValueError):
        Factorization(10, ((2, 1), (3, 1)))
    with pytest.raises(ValueError):
        factorize(0)


@given(st.integers(0, 1 << 64))
@settings(max_examples=300)
def test_is_prime_matches_sympy(n):
    assert is_prime(n) == sympy.isprime(n)


def _random_matrix(rng, n):
    return Gf2Matrix(tuple(rng.getrandbits(n) for _ in range(n)))


def test_char_poly_three_ways():
    rng = random.Random(11)
    for _ in range(150):
        n = rng.randint(1, 12)
        m = _random_matrix(rng, n)
        want = Matrix(m.to_lists()).charpoly(X).as_expr()
        want = Poly(want, X, modulus=2)
        got = char_poly(m)
        assert got == char_poly_by_elimination(m)
        assert Poly(to_sympy(got).as_expr(), X, modulus=2) == want


def test_char_poly_of_companion():
    # companion of x^4+x+1: x^i -> x^(i+1), x^3 -> x^4 = x+1
    rows = [0] * 4
    for j in range(3):
        rows[j + 1] |= 1 << j
    rows[0] |= 1 << 3
    rows[1] |= 1 << 3
    assert char_poly(Gf2Matrix(tuple(rows))) == parse_poly("x^4+x+1")
    assert char_poly(Gf2Matrix.identity(3)) == parse_poly("x^3+x^2+x+1")


def test_matrix_ops():
    rng = random.Random(3)
    a = _random_matrix(rng, 6)
    b = _random_matrix(rng, 6)
    assert (a @ b).to_lists() == (Matrix(a.to_lists()) * Matrix(b.to_lists())).applyfunc(
        lambda v: v % 2).tolist()
    assert a ** 0 == Gf2Matrix.identity(6)
    assert a ** 5 == a @ a @ a @ a @ a
    assert a.transpose().transpose() == a
    v = 0b101101
    want = [sum(r[j] * (v >> j & 1) for j in range(6)) % 2 for r in a.to_lists()]
    assert a.apply(v) == sum(bit << i for i, bit in enumerate(want))
    with pytest.raises(ValueError):
        Gf2Matrix((0b100, 0b1))


def test_berlekamp_massey_recovers_lfsr():
    p = parse_poly("x^5+x^2+1")
    # s[n+5] = s[n+2] + s[n]
    seq = [1, 0, 0, 1, 1]
    while len(seq) < 40:
        seq.append(seq[-3] ^ seq[-5])
    assert berlekamp_massey(seq) == p
    assert berlekamp_massey([0] * 10) == Gf2Poly(1)


def test_factorize_product_round_trip():
    rng = random.Random(10_000)
    for _ in range(10_000):
        v = rng.getrandbits(64) or 1
        f = factorize(v)
        prod = 1
        for p, e in f.as_dict().items():
            assert is_prime(p)
            prod *= p ** e
        assert prod == v
