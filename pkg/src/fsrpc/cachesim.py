"""Instruction-cache model for straight-line PC traversals.

Cold start, one fetch per step, whole lines filled on a miss.  Sets are
indexed by (line address mod number of sets); within a set the least
recently used line is evicted.
"""

from __future__ import annotations

import csv
import io
from collections import OrderedDict
from dataclasses import dataclass

from .counter import Counter

__all__ = ["CacheConfig", "SimReport", "Cache", "simulate", "simulate_trace",
           "compare", "reports_csv", "read_trace"]


def _pow2(x):
    return x >= 1 and x & (x - 1) == 0


@dataclass(frozen=True)
class CacheConfig:
    line_size_words: int = 8
    num_lines: int = 16
    associativity: int = 1

    def __post_init__(self):
        if not _pow2(self.line_size_words):
            raise ValueError(f"line size must be a power of two, got {self.line_size_words}")
        if not _pow2(self.num_lines):
            raise ValueError(f"number of lines must be a power of two, got {self.num_lines}")
        if not 1 <= self.associativity <= self.num_lines or self.num_lines % self.associativity:
            raise ValueError(f"associativity {self.associativity} does not divide {self.num_lines} lines")

    @property
    def capacity_words(self):
        return self.line_size_words * self.num_lines

    @property
    def num_sets(self):
        return self.num_lines // self.associativity


@dataclass(frozen=True)
class SimReport:
    pc_kind: str
    accesses: int
    misses: int

    @property
    def hits(self):
        return self.accesses - self.misses

    @property
    def line_fetches(self):
        return self.misses

    @property
    def miss_rate(self):
        return self.misses / self.accesses if self.accesses else 0.0


class Cache:
    def __init__(self, cfg):
        self.cfg = cfg
        self._shift = cfg.line_size_words.bit_length() - 1
        self._sets = [OrderedDict() for _ in range(cfg.num_sets)]
        self.accesses = 0
        self.misses = 0

    def access(self, address):
        """Returns True on a hit."""
        self.accesses += 1
        line = address >> self._shift
        ways = self._sets[line % self.cfg.num_sets]
        if line in ways:
            ways.move_to_end(line)
            return True
        self.misses += 1
        if len(ways) >= self.cfg.associativity:
            ways.popitem(last=False)
        ways[line] = True
        return False


def _counter_and_start(pc, reset):
    if isinstance(pc, Counter):
        c = pc
    else:
        c = pc.build()
    if reset is None:
        reset = getattr(pc, "reset_value", None)
        if reset is None:
            reset = 1 if getattr(c, "maximal", None) is not None else 0
    return c, int(reset)


def _kind(pc):
    text = getattr(pc, "to_text", None)
    return text().replace("\n", " ").replace("[pc] ", "") if text else repr(pc)


def simulate(pc, reset, cfg, steps, kind=None):
    """Run ``steps`` sequential fetches starting at ``reset``.

    ``pc`` is a counter, or any spec with ``build()`` (radix-2, FSR,
    hybrid).  ``reset`` of None picks the PC's own reset value.
    """
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    c, a = _counter_and_start(pc, reset)
    cache = Cache(cfg)
    nxt = c.next_value
    for _ in range(steps):
        cache.access(a)
        a = nxt(a)
    return SimReport(kind or _kind(pc), cache.accesses, cache.misses)


def simulate_trace(addresses, cfg, kind="trace"):
    cache = Cache(cfg)
    for a in addresses:
        cache.access(a)
    return SimReport(kind, cache.accesses, cache.misses)


def read_trace(text):
    """One hex address per line; blank lines and ``#`` comments ignored."""
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(int(line, 16))
    return out


def compare(pcs, cfg, steps):
    """One report per PC; ``pcs`` holds (kind, pc) pairs or bare PCs."""
    rows = []
    widths = set()
    for item in pcs:
        kind, pc = item if isinstance(item, tuple) else (None, item)
        c, _ = _counter_and_start(pc, None)
        widths.add(c.width)
        rows.append(simulate(pc, None, cfg, steps, kind=kind))
    if len(widths) > 1:
        raise ValueError(f"PCs have different address widths: {sorted(widths)}")
    return rows


def reports_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["pc_kind", "accesses", "misses", "miss_rate"])
    for r in rows:
        w.writerow([r.pc_kind, r.accesses, r.misses, f"{r.miss_rate:.6f}"])
    return buf.getvalue()
