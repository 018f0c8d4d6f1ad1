"""Finite counters: a state set of W-bit vectors closed under a step function.

A counter here is anything with a ``width`` and a deterministic
``next_value`` on W-bit integers.  The module-level functions work for every
counter kind: modulo-n counters, the feedback shift registers in
:mod:`fsrpc.fsr` and the concatenated counters in :mod:`fsrpc.hybrid`.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NotOnCycleError, WidthMismatchError

MAX_WIDTH = 64

__all__ = [
    "CounterState", "Counter", "ModNCounter", "ModNSpec", "Radix2Spec", "CycleInfo",
    "step", "step_n", "offset_add", "find_cycle", "cycle_length",
    "is_n_cyclic", "iso_index", "trace",
]


@dataclass(frozen=True)
class CounterState:
    """One counter value: a fixed-width bit vector."""

    width: int
    value: int

    def __post_init__(self):
        if not 1 <= self.width <= MAX_WIDTH:
            raise ValueError(f"width must be in [1, {MAX_WIDTH}], got {self.width}")
        if not 0 <= self.value < 1 << self.width:
            raise ValueError(f"value {self.value:#x} does not fit in {self.width} bits")

    def bits(self):
        """Bits b_{W-1} ... b_0 as a string."""
        return format(self.value, f"0{self.width}b")

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value

    def __repr__(self):
        return f"CounterState({self.width}, {self.value:#x})"


class Counter:
    """Base class.  Subclasses set ``width`` and implement ``next_value``."""

    width: int

    def next_value(self, v):
        raise NotImplementedError

    def advance(self, v, k):
        """sigma^k on a raw value; subclasses override with faster routes."""
        nxt = self.next_value
        for _ in range(k):
            v = nxt(v)
        return v

    def known_cycle_length(self, v):
        """Cycle length through ``v`` if it can be had without iterating, else None."""
        return None

    def state(self, value):
        return CounterState(self.width, value)

    def _check(self, s):
        if s.width != self.width:
            raise WidthMismatchError(self.width, s.width)
        return s.value


@dataclass(frozen=True)
class ModNSpec:
    """The counter C_n: integers mod n with f(x) = x + 1 mod n."""

    n: int

    def build(self):
        return ModNCounter(self.n)


@dataclass(frozen=True)
class Radix2Spec:
    """Conventional W-bit binary counter, i.e. C_(2^W)."""

    width: int

    def build(self):
        return ModNCounter(1 << self.width, width=self.width)


class ModNCounter(Counter):
    """C_n on ceil(log2 n)-bit states.

    States >= n (possible when n is not a power of two) also step to
    (x + 1) mod n, so the full W-bit space stays closed.
    """

    def __init__(self, n, width=None):
        if not 1 <= n <= 1 << MAX_WIDTH:
            raise ValueError(f"n must be in [1, 2^{MAX_WIDTH}], got {n}")
        self.n = n
        self.width = width if width is not None else max(1, (n - 1).bit_length())
        if (n - 1).bit_length() > self.width or self.width > MAX_WIDTH:
            raise ValueError(f"n={n} does not fit in {self.width} bits")

    def next_value(self, v):
        return (v + 1) % self.n

    def advance(self, v, k):
        if k == 0:
            return v
        return (v + k) % self.n

    def known_cycle_length(self, v):
        return self.n if v < self.n else None

    def __repr__(self):
        return f"ModNCounter(n={self.n}, width={self.width})"

    def __eq__(self, other):
        return isinstance(other, ModNCounter) and (self.n, self.width) == (other.n, other.width)

    def __hash__(self):
        return hash((ModNCounter, self.n, self.width))


@dataclass(frozen=True)
class CycleInfo:
    tail_length: int
    cycle_length: int
    cycle_entry: CounterState


def step(c, s):
    """sigma(s)."""
    return CounterState(c.width, c.next_value(c._check(s)))


def step_n(c, s, k):
    """sigma^k(s) by plain iteration; the reference every shortcut is tested against."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    v = c._check(s)
    nxt = c.next_value
    for _ in range(k):
        v = nxt(v)
    return CounterState(c.width, v)


def offset_add(c, s, b):
    """s + b, defined as sigma^b(s); uses the counter's fast route when it has one."""
    if b < 0:
        raise ValueError("offset must be nonnegative")
    return CounterState(c.width, c.advance(c._check(s), b))


def trace(c, s, k):
    """The k states s, sigma(s), ..., sigma^(k-1)(s)."""
    v = c._check(s)
    out = []
    for _ in range(k):
        out.append(CounterState(c.width, v))
        v = c.next_value(v)
    return out


def _brent(f, x0):
    power = lam = 1
    tortoise, hare = x0, f(x0)
    while tortoise != hare:
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = f(hare)
        lam += 1
    tortoise = hare = x0
    for _ in range(lam):
        hare = f(hare)
    mu = 0
    while tortoise != hare:
        tortoise = f(tortoise)
        hare = f(hare)
        mu += 1
    return mu, lam, tortoise


def find_cycle(c, start):
    """Tail and cycle length of the orbit of ``start`` (Brent's algorithm)."""
    v = c._check(start)
    mu, lam, entry = _brent(c.next_value, v)
    return CycleInfo(mu, lam, CounterState(c.width, entry))


def cycle_length(c, s):
    """Length of the cycle through ``s``; raises NotOnCycleError if s is in a tail."""
    v = c._check(s)
    known = c.known_cycle_length(v)
    if known is not None:
        return known
    info = find_cycle(c, s)
    if info.tail_length:
        raise NotOnCycleError(f"{s!r} is {info.tail_length} steps before its cycle")
    return info.cycle_length


def is_n_cyclic(c, states):
    """Whether ``states`` is closed under sigma and forms one cycle.

    Returns ``(True, n)`` with n = len(states), or ``(False, None)``.
    """
    states = set(states)
    if not states:
        raise ValueError("state set must be nonempty")
    for s in states:
        c._check(s)
    start = next(iter(states))
    cur, seen = start, 0
    while True:
        cur = step(c, cur)
        seen += 1
        if cur not in states:
            return False, None
        if cur == start:
            break
        if seen > len(states):
            return False, None
    if seen == len(states):
        return True, seen
    return False, None


def iso_index(c, s0, t, n):
    """The unique i in [0, n) with sigma^i(s0) = t, found by forward iteration."""
    v, target = c._check(s0), c._check(t)
    for i in range(n):
        if v == target:
            return i
        v = c.next_value(v)
    raise NotOnCycleError(f"not on cycle: {t!r} is not reachable from {s0!r} in {n} steps")
