"""
Latency estimates and Verilog output
====================================

Fitted latency of a binary counter grows with width while an FSR stays
flat.  The second half writes a hybrid PC, its testbench and the golden
trace to a scratch directory.
"""

import tempfile

from fsrpc import LatencyModel, crossover_table, default_pc
from fsrpc.hdl import emit, write_files

model = LatencyModel()
print(model.provenance)
print(f"{'N':>3} {'radix2 ns':>10} {'fsr ns':>7} {'ratio':>6}")
for n, r, f, ratio in crossover_table([8, 16, 24, 32, 48, 64], model):
    print(f"{n:>3} {r:>10.3f} {f:>7.3f} {ratio:>6.2f}")

pc = default_pc(10)
text = emit(pc, name="tta")
print()
print("\n".join(text.splitlines()[:24]))
print("...")

with tempfile.TemporaryDirectory() as out:
    for path in write_files(pc, out, name="tta"):
        with open(path) as fh:
            print(path.rsplit("/", 1)[1], len(fh.read().splitlines()), "lines")
