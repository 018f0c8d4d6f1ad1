"""Concatenated counters: radix-2 low bits stepping inside a cache line,
FSR high bits stepping between lines.

Segments are listed low to high and packed into one state word with the
first segment in the least-significant bits.  The lowest segment steps on
every clock; segment k+1 steps when every segment below it sits on its
carry state, which is the left-fold reading of the two-segment operator.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .counter import MAX_WIDTH, Counter, ModNCounter, ModNSpec, Radix2Spec, cycle_length, iso_index
from .errors import NotOnCycleError, SpecError
from .fsr import FsrCounter, FsrSpec, find_maximal

__all__ = ["Segment", "HybridSpec", "HybridCounter", "hybrid_step", "hybrid_period",
           "skipped_lines", "as_hybrid", "default_pc"]


@dataclass(frozen=True)
class Segment:
    """One counter slice with its start (seed) and carry state s_0.

    ``seed``/``carry`` of None pick the defaults: radix-2 and mod-n
    segments start at 0 and carry from n-1 (all ones for radix-2); FSR
    segments start at 1 and carry from the state just before the seed.
    """

    spec: object
    seed: int | None = None
    carry: int | None = None

    @cached_property
    def counter(self):
        return self.spec.build()

    @property
    def width(self):
        return self.counter.width

    @cached_property
    def seed_value(self):
        if self.seed is not None:
            return self.seed
        if isinstance(self.counter, HybridCounter):
            return self.counter.hybrid.reset_value
        return 0 if isinstance(self.counter, ModNCounter) else 1

    @cached_property
    def carry_value(self):
        if self.carry is not None:
            return self.carry
        c = self.counter
        if isinstance(c, ModNCounter):
            return c.n - 1
        if isinstance(c, HybridCounter):
            return c.hybrid.carry_value
        n = cycle_length(c, c.state(self.seed_value))
        return c.advance(self.seed_value, n - 1)

    def to_text(self):
        spec = self.spec
        if isinstance(spec, Radix2Spec):
            body = f"segment=radix2 width={spec.width}"
        elif isinstance(spec, ModNSpec):
            body = f"segment=modn n={spec.n}"
        elif isinstance(spec, FsrSpec):
            body = "segment=" + spec.to_text().replace("family=", "", 1)
        else:
            raise SpecError(f"cannot serialise segment spec {spec!r}")
        if self.seed is not None:
            body += f" seed={self.seed:#x}"
        if self.carry is not None:
            body += f" carry={self.carry:#x}"
        return body


@dataclass(frozen=True)
class HybridSpec:
    segments: tuple

    def __post_init__(self):
        segs = tuple(s if isinstance(s, Segment) else Segment(s) for s in self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise SpecError("hybrid needs at least one segment")
        if self.width > MAX_WIDTH:
            raise SpecError(f"total width {self.width} exceeds {MAX_WIDTH}")
        for i, seg in enumerate(segs):
            limit = 1 << seg.width
            for what, v in (("seed", seg.seed_value), ("carry", seg.carry_value)):
                if not 0 <= v < limit:
                    raise SpecError(f"segment {i}: {what} {v:#x} does not fit in {seg.width} bits")

    @property
    def width(self):
        return sum(s.width for s in self.segments)

    @property
    def offsets(self):
        out, acc = [], 0
        for s in self.segments:
            out.append(acc)
            acc += s.width
        return out

    def pack(self, values):
        v = 0
        for off, seg, x in zip(self.offsets, self.segments, values):
            v |= x << off
        return v

    def unpack(self, v):
        return [(v >> off) & ((1 << seg.width) - 1)
                for off, seg in zip(self.offsets, self.segments)]

    @property
    def reset_value(self):
        return self.pack([s.seed_value for s in self.segments])

    @property
    def carry_value(self):
        """Composite carry: every segment at its own carry state."""
        return self.pack([s.carry_value for s in self.segments])

    def low_width(self):
        """Width of everything below the top segment."""
        return self.width - self.segments[-1].width

    def build(self):
        return HybridCounter(self)

    def to_text(self):
        return "\n".join("[pc] " + s.to_text() for s in self.segments)


class HybridCounter(Counter):
    def __init__(self, hybrid):
        self.hybrid = hybrid
        self.width = hybrid.width
        self._parts = [(off, (1 << seg.width) - 1, seg.counter.next_value, seg.carry_value)
                       for off, seg in zip(hybrid.offsets, hybrid.segments)]

    def next_value(self, v):
        out = 0
        enable = True
        for off, mask, nxt, carry in self._parts:
            x = (v >> off) & mask
            if enable:
                out |= nxt(x) << off
                enable = x == carry
            else:
                out |= x << off
        return out

    def known_cycle_length(self, v):
        try:
            return hybrid_period(self.hybrid, v, verify_limit=0)
        except SpecError:
            return None

    def __repr__(self):
        return f"HybridCounter({self.hybrid.to_text()!r})"


def as_hybrid(spec, seed=None, carry=None):
    """Wrap a single counter spec as a one-segment hybrid."""
    if isinstance(spec, HybridSpec):
        return spec
    return HybridSpec((Segment(spec, seed, carry),))


def hybrid_step(h, s):
    from .counter import step
    return step(h.build(), s)


VERIFY_LIMIT = 1 << 20


def hybrid_period(h, start=None, verify_limit=VERIFY_LIMIT):
    """Product of the segment cycle lengths.

    Every segment's slice of ``start`` (default: the seeds) must lie on a
    cycle that also contains the segment's carry state.  Products up to
    ``verify_limit`` are confirmed by stepping the whole hybrid.
    """
    values = h.unpack(h.reset_value if start is None else start)
    period = 1
    for i, (seg, v) in enumerate(zip(h.segments, values)):
        c = seg.counter
        try:
            n = cycle_length(c, c.state(v))
            iso_index(c, c.state(v), c.state(seg.carry_value), n)
        except NotOnCycleError as e:
            raise SpecError(f"segment {i} ({seg.to_text()}) is not cyclic from "
                            f"{v:#x}: {e}") from None
        period *= n
    if period <= verify_limit:
        c = h.build()
        v0 = h.pack(values)
        v, k = c.next_value(v0), 1
        while v != v0 and k <= period:
            v = c.next_value(v)
            k += 1
        if k != period:
            raise AssertionError(f"hybrid stepped {k} states, segment product is {period}")
    return period


def skipped_lines(h):
    """Address ranges the count cycle never reaches because the top FSR
    segment cannot leave (or enter) its all-zero state.

    Empty unless the top segment is a linear FSR.
    """
    h = as_hybrid(h)
    top = h.segments[-1]
    if not isinstance(top.counter, FsrCounter):
        return []
    low = h.low_width()
    return [range(0, 1 << low)]


def default_pc(width, low_bits=3):
    """Radix-2 counter on the low bits (one cache line) under an MFSR."""
    if width <= low_bits + 1:
        raise SpecError(f"width {width} leaves no room for an FSR above {low_bits} radix-2 bits")
    found = find_maximal("mfsr", width - low_bits, count=1)
    if not found:
        raise SpecError(f"no maximal {width - low_bits}-bit MFSR found")
    return HybridSpec((Segment(Radix2Spec(low_bits)), Segment(found[0])))

