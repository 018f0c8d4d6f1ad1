"""
Maximal-cycle counters of every family
======================================

Search each family for an 8-bit register that walks all 255 nonzero
states, then print its gate metrics and the first few states.
"""

from fsrpc import canonical_specs, find_maximal, metrics, nonzero_period, spec_poly

print(f"{'family':<10} {'xor':>3} {'fan-in':>6} {'fan-out':>7}  period  char poly")
for family, spec in canonical_specs().items():
    m = metrics(spec)
    period = nonzero_period(spec.build())
    print(f"{family.value:<10} {m.xor_gate_count:>3} {m.max_fan_in:>6} {m.max_fan_out:>7}"
          f"  {period:>6}  {spec_poly(spec)}")

# the search is deterministic: same family and width, same answers
print()
for spec in find_maximal("mfsr", 12, count=3):
    print(spec.to_text(), " period", nonzero_period(spec.build()))

c = canonical_specs()["mfsr"].build()
v, states = 1, []
for _ in range(10):
    states.append(f"{v:08b}")
    v = c.next_value(v)
print()
print("mfsr-8 from 1:", " ".join(states))
