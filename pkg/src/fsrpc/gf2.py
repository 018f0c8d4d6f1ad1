"""Polynomials and square matrices over GF(2).

Polynomials are stored as nonnegative integers: bit ``i`` holds the
coefficient of ``x^i``.  Matrices are stored as a tuple of row bit masks,
bit ``j`` of row ``i`` being entry ``(i, j)``.  Both are limited to
degree/dimension 64, which matches the largest counter width.

The module also carries the integer factorization needed to test the
multiplicative order of ``x`` modulo a candidate polynomial.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache

MAX_DEGREE = 64

__all__ = [
    "Gf2Poly", "Gf2Matrix", "Factorization",
    "poly_mul_mod", "poly_pow_mod", "poly_gcd", "poly_divmod",
    "char_poly", "char_poly_by_elimination",
    "is_irreducible", "is_primitive", "multiplicative_order",
    "factorize", "is_prime", "parse_poly", "berlekamp_massey",
]


# --- raw integer helpers ---------------------------------------------------

def _deg(a):
    return a.bit_length() - 1


def _mul(a, b):
    if a < b:
        a, b = b, a
    c = 0
    while b:
        if b & 1:
            c ^= a
        a <<= 1
        b >>= 1
    return c


def _divmod(a, b):
    if b == 0:
        raise ZeroDivisionError("division by zero polynomial")
    db = _deg(b)
    q = 0
    while a and _deg(a) >= db:
        shift = _deg(a) - db
        q ^= 1 << shift
        a ^= b << shift
    return q, a


def _mod(a, b):
    if b == 0:
        raise ZeroDivisionError("division by zero polynomial")
    db = _deg(b)
    while a and _deg(a) >= db:
        a ^= b << (_deg(a) - db)
    return a


def _mulmod(a, b, m):
    return _mod(_mul(a, b), m)


def _powmod(a, e, m):
    result = _mod(1, m)
    a = _mod(a, m)
    while e:
        if e & 1:
            result = _mulmod(result, a, m)
        e >>= 1
        if e:
            a = _mulmod(a, a, m)
    return result


def _gcd(a, b):
    while b:
        a, b = b, _mod(a, b)
    return a


def _x_pow_2k(k, m):
    """x^(2^k) mod m by k successive squarings."""
    r = _mod(2, m)
    for _ in range(k):
        r = _mulmod(r, r, m)
    return r


# --- polynomials -----------------------------------------------------------

@dataclass(frozen=True, order=True)
class Gf2Poly:
    """A polynomial over GF(2) of degree at most 64.

    The zero polynomial has degree -1, distinct from the constant 1.
    """

    bits: int

    def __post_init__(self):
        if self.bits < 0:
            raise ValueError("coefficient vector must be nonnegative")
        if self.bits.bit_length() > MAX_DEGREE + 1:
            raise ValueError(f"degree {_deg(self.bits)} exceeds {MAX_DEGREE}")

    @classmethod
    def from_exponents(cls, exponents):
        bits = 0
        for e in exponents:
            bits ^= 1 << e
        return cls(bits)

    @classmethod
    def parse(cls, text):
        return parse_poly(text)

    @property
    def degree(self):
        return _deg(self.bits)

    def exponents(self):
        """Exponents with nonzero coefficient, highest first."""
        return [i for i in range(self.degree, -1, -1) if self.bits >> i & 1]

    def weight(self):
        return self.bits.bit_count()

    def __bool__(self):
        return self.bits != 0

    def __add__(self, other):
        return Gf2Poly(self.bits ^ other.bits)

    __sub__ = __add__

    def __mul__(self, other):
        return Gf2Poly(_mul(self.bits, other.bits))

    def __mod__(self, other):
        return Gf2Poly(_mod(self.bits, other.bits))

    def __call__(self, x):
        """Evaluate at x in GF(2)."""
        return (self.bits & 1) if x % 2 == 0 else self.weight() & 1

    def __str__(self):
        if not self.bits:
            return "0"
        terms = []
        for e in self.exponents():
            terms.append("1" if e == 0 else "x" if e == 1 else f"x^{e}")
        return "+".join(terms)

    def hex(self):
        return hex(self.bits)


_TERM = re.compile(r"^(?:(1)|x(?:\^(\d+))?)$")


def parse_poly(text):
    """Parse ``"x^8+x^6+x^5+x^4+1"`` or ``"0x171"`` into a :class:`Gf2Poly`."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty polynomial text")
    if s.lower().startswith("0x"):
        try:
            return Gf2Poly(int(s, 16))
        except ValueError:
            raise ValueError(f"bad hex polynomial {text!r}") from None
    if s == "0":
        return Gf2Poly(0)
    bits = 0
    for term in s.split("+"):
        m = _TERM.match(term)
        if not m:
            raise ValueError(f"bad polynomial term {term!r} in {text!r}")
        e = 0 if m.group(1) else int(m.group(2) or 1)
        bits ^= 1 << e
    return Gf2Poly(bits)


def poly_divmod(a, b):
    q, r = _divmod(a.bits, b.bits)
    return Gf2Poly(q), Gf2Poly(r)


def poly_gcd(a, b):
    return Gf2Poly(_gcd(a.bits, b.bits))


def poly_mul_mod(a, b, m):
    """Return ``a*b mod m``; ``m`` must have degree at least 1."""
    if m.degree < 1:
        raise ZeroDivisionError(f"modulus must have degree >= 1, got {m}")
    return Gf2Poly(_mulmod(a.bits, b.bits, m.bits))


def poly_pow_mod(a, e, m):
    if m.degree < 1:
        raise ZeroDivisionError(f"modulus must have degree >= 1, got {m}")
    if e < 0:
        raise ValueError("negative exponent")
    return Gf2Poly(_powmod(a.bits, e, m.bits))


def is_irreducible(p):
    """Rabin's test: x^(2^d) = x mod p and gcd(x^(2^(d/q)) - x, p) = 1 for primes q | d."""
    d = p.degree
    if d < 1:
        return False
    if d == 1:
        return True
    if not p.bits & 1 or p.weight() % 2 == 0:
        return False  # divisible by x or by x+1
    if _x_pow_2k(d, p.bits) != 2:
        return False
    for q, _ in factorize(d).prime_factors:
        if _gcd(_x_pow_2k(d // q, p.bits) ^ 2, p.bits) != 1:
            return False
    return True


def is_primitive(p):
    """True iff p is irreducible and x has order 2^d - 1 modulo p."""
    d = p.degree
    if d < 1 or d > MAX_DEGREE or not is_irreducible(p):
        return False
    order = (1 << d) - 1
    m = p.bits
    if _powmod(2, order, m) != 1:
        return False
    return all(_powmod(2, order // q, m) != 1
               for q, _ in _group_order_factors(d))


@lru_cache(maxsize=None)
def _group_order_factors(d):
    return factorize((1 << d) - 1).prime_factors


def multiplicative_order(p):
    """Order of x modulo p by direct iteration (small degrees only).

    Returns None if x is not invertible modulo p.
    """
    if p.degree < 1:
        raise ValueError("degree must be >= 1")
    if not p.bits & 1:
        return None
    one = _mod(1, p.bits)
    r, k = _mod(2, p.bits), 1
    while r != one:
        r = _mulmod(r, 2, p.bits)
        k += 1
    return k


def berlekamp_massey(seq):
    """Shortest LFSR generating the bit sequence ``seq``.

    Returns the minimal polynomial x^L C(1/x), where C is the connection
    polynomial found by the Berlekamp-Massey algorithm.
    """
    c, b = 1, 1
    L, m = 0, 1
    for n, bit in enumerate(seq):
        d = bit
        for i in range(1, L + 1):
            d ^= (c >> i & 1) & seq[n - i]
        if d == 0:
            m += 1
        elif 2 * L <= n:
            t = c
            c ^= b << m
            L = n + 1 - L
            b = t
            m = 1
        else:
            c ^= b << m
            m += 1
    rev = 0
    for i in range(L + 1):
        if c >> i & 1:
            rev |= 1 << (L - i)
    return Gf2Poly(rev)


# --- matrices --------------------------------------------------------------

@dataclass(frozen=True)
class Gf2Matrix:
    """Square bit matrix over GF(2)."""

    rows: tuple

    def __post_init__(self):
        n = len(self.rows)
        if not 1 <= n <= MAX_DEGREE:
            raise ValueError(f"matrix dimension must be in [1, {MAX_DEGREE}], got {n}")
        limit = 1 << n
        for i, r in enumerate(self.rows):
            if not 0 <= r < limit:
                raise ValueError(f"row {i} has bits outside {n} columns")

    @classmethod
    def identity(cls, n):
        return cls(tuple(1 << i for i in range(n)))

    @classmethod
    def from_lists(cls, entries):
        return cls(tuple(sum((v & 1) << j for j, v in enumerate(row)) for row in entries))

    @property
    def n(self):
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i] >> j & 1

    def to_lists(self):
        return [[r >> j & 1 for j in range(self.n)] for r in self.rows]

    def apply(self, v):
        """Matrix-vector product with v given as a bit mask."""
        out = 0
        for i, r in enumerate(self.rows):
            out |= ((r & v).bit_count() & 1) << i
        return out

    def __matmul__(self, other):
        if other.n != self.n:
            raise ValueError(f"dimension mismatch {self.n} vs {other.n}")
        orows = other.rows
        rows = []
        for r in self.rows:
            acc, j = 0, 0
            while r:
                if r & 1:
                    acc ^= orows[j]
                r >>= 1
                j += 1
            rows.append(acc)
        return Gf2Matrix(tuple(rows))

    def __pow__(self, e):
        if e < 0:
            raise ValueError("negative power")
        result, base = Gf2Matrix.identity(self.n), self
        while e:
            if e & 1:
                result = result @ base
            e >>= 1
            if e:
                base = base @ base
        return result

    def transpose(self):
        n = self.n
        return Gf2Matrix(tuple(
            sum((self.rows[i] >> j & 1) << i for i in range(n)) for j in range(n)))


def _hessenberg(rows):
    """Reduce to upper Hessenberg form by GF(2) similarity transforms (in place)."""
    n = len(rows)
    for m in range(1, n - 1):
        col = m - 1
        piv = next((i for i in range(m, n) if rows[i] >> col & 1), None)
        if piv is None:
            continue
        if piv != m:
            rows[piv], rows[m] = rows[m], rows[piv]
            for k in range(n):
                r = rows[k]
                if (r >> piv ^ r >> m) & 1:
                    rows[k] = r ^ (1 << piv) ^ (1 << m)
        for i in range(m + 1, n):
            if rows[i] >> col & 1:
                # row_i += row_m, then col_m += col_i keeps the similarity
                rows[i] ^= rows[m]
                for k in range(n):
                    if rows[k] >> i & 1:
                        rows[k] ^= 1 << m
    return rows


def char_poly(m):
    """Characteristic polynomial |M + xI| via Hessenberg reduction."""
    h = _hessenberg(list(m.rows))
    n = len(h)
    p = [1]  # p[k] = char poly of leading k x k block
    for k in range(n):
        nxt = _mul(2 ^ (h[k] >> k & 1), p[k])
        prod = 1
        for i in range(k - 1, -1, -1):
            prod &= h[i + 1] >> i & 1
            if not prod:
                break
            if h[i] >> k & 1:
                nxt ^= p[i]
        p.append(nxt)
    return Gf2Poly(p[n])


def char_poly_by_elimination(m):
    """Characteristic polynomial as det(M + xI) by fraction-free elimination.

    Works on polynomial entries directly, independently of the Hessenberg
    route; intended as a cross-check for small matrices.
    """
    n = m.n
    a = [[(m.rows[i] >> j & 1) ^ (2 if i == j else 0) for j in range(n)]
         for i in range(n)]
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return Gf2Poly(0)
            a[k], a[swap] = a[swap], a[k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = _mul(a[i][j], a[k][k]) ^ _mul(a[i][k], a[k][j])
                q, r = _divmod(num, prev)
                assert r == 0, "Bareiss division must be exact"
                a[i][j] = q
            a[i][k] = 0
        prev = a[k][k]
    return Gf2Poly(a[n - 1][n - 1])


# --- integer factorization --------------------------------------------------

@dataclass(frozen=True)
class Factorization:
    value: int
    prime_factors: tuple  # ((prime, multiplicity), ...) ascending

    def __post_init__(self):
        prod = 1
        for p, e in self.prime_factors:
            prod *= p ** e
        if prod != self.value:
            raise ValueError(f"factors multiply to {prod}, not {self.value}")

    def as_dict(self):
        return dict(self.prime_factors)

    def primes(self):
        return [p for p, _ in self.prime_factors]


TRIAL_LIMIT = 10 ** 6
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)  # exact below 3.3e24


def _sieve(limit):
    flags = bytearray([1]) * limit
    flags[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(limit - 1) + 1):
        if flags[i]:
            flags[i * i::i] = bytearray(len(range(i * i, limit, i)))
    return [i for i, f in enumerate(flags) if f]


@lru_cache(maxsize=1)
def _small_primes():
    return _sieve(4096)


@lru_cache(maxsize=1)
def _prime_blocks():
    primes = _sieve(TRIAL_LIMIT)
    blocks = []
    for k in range(0, len(primes), 512):
        chunk = primes[k:k + 512]
        blocks.append((math.prod(chunk), chunk))
    return math.prod(b for b, _ in blocks), blocks


def is_prime(n):
    """Deterministic Miller-Rabin, exact for every n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _rho(n):
    """Pollard's rho with Brent's cycle finding; n odd composite."""
    for c in range(1, n):
        y, r, q, g = 2, 1, 1, 1
        m = 128
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"rho failed on {n}")


def _split(n, out):
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _rho(n)
    _split(d, out)
    _split(n // d, out)


@lru_cache(maxsize=4096)
def factorize(v):
    """Complete prime factorization of 1 <= v < 2^64 (larger values also work)."""
    if v < 1:
        raise ValueError("factorize requires v >= 1")
    out = {}
    n = v
    small = _small_primes()
    for p in small:
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    if n < small[-1] ** 2 or is_prime(n):
        _split(n, out)
        return Factorization(v, tuple(sorted(out.items())))
    everything, blocks = _prime_blocks()
    # one gcd against the product of all small primes finds the smooth part
    smooth = math.gcd(everything % n, n)
    if smooth > 1:
        for block, chunk in blocks:
            if smooth == 1:
                break
            if math.gcd(block % smooth, smooth) == 1:
                continue
            for p in chunk:
                if smooth % p == 0:
                    smooth //= p
                    while n % p == 0:
                        out[p] = out.get(p, 0) + 1
                        n //= p
    _split(n, out)
    return Factorization(v, tuple(sorted(out.items())))
