"""
Hybrid program counters and the instruction cache
=================================================

A 10-bit PC built from a 3-bit binary counter under a 7-bit MFSR keeps
each group of eight fetches inside one cache line, so it misses exactly as
often as a plain binary counter.  A pure 10-bit FSR jumps around and misses
on almost every fetch.
"""

from fsrpc import CacheConfig, Radix2Spec, compare, default_pc, find_maximal, hybrid_period, reports_csv

hybrid = default_pc(10)
period = hybrid_period(hybrid)
print(hybrid.to_text())
print("period", period, "of", 1 << 10, "addresses")

c, v = hybrid.build(), hybrid.reset_value
first = []
for _ in range(12):
    first.append(f"{v:03x}")
    v = c.next_value(v)
print("first fetches:", " ".join(first))

cfg = CacheConfig(line_size_words=8, num_lines=16)
rows = compare([("radix2-10", Radix2Spec(10)),
                ("hybrid-3+7", hybrid),
                ("mfsr-10", find_maximal("mfsr", 10, count=1)[0])], cfg, period)
print()
print(reports_csv(rows), end="")
