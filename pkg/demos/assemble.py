"""
Placing a program along an FSR fetch order
==========================================

The assembler keeps the program in its written order and stores word k at
the k-th state the PC visits.  Jump operands are rewritten to the address
where their label's word landed.
"""

import pathlib

from fsrpc import emit_image, fetch_trace, load_description, map_program, parse_program

here = pathlib.Path(__file__).parent
d = load_description(here / "tta16.desc")
prog = parse_program((here / "loop.asm").read_text())

img = map_program(d, prog)
print(f"{d.name}: {d.pc.width}-bit PC, reset {d.reset:#05x}, cycle {d.cycle_length}")
print("labels:", prog.labels)
print()
print(emit_image(img, "hex").decode(), end="")

print()
for k, word in enumerate(fetch_trace(d, img, len(prog))):
    print(f"fetch {k}: {word:04x}")

jump = fetch_trace(d, img, len(prog))[3]
target = jump & 0x3FF
print(f"jump word {jump:04x} lands at {target:#05x}, which holds {img[target]:04x}")
