"""Verilog-2001 for PC circuits with the black-box port set
CLOCK, RESET, ENABLE, LOAD, IN[W-1:0], OUT[W-1:0].

All control actions happen on the rising clock edge with priority
RESET > LOAD > ENABLE.  FSR next-state logic is written one continuous
assignment per register bit so the XOR structure stays visible; hybrids
become one submodule per segment chained through carry-enable wires.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass

from .counter import ModNSpec, Radix2Spec, cycle_length
from .errors import NotOnCycleError, SpecError
from .fsr import FsrSpec, _register_sources
from .hybrid import HybridSpec, hybrid_period

__all__ = ["HdlModuleDesc", "describe_module", "emit", "emit_testbench",
           "golden_trace", "write_files", "file_names"]

PORTS = ("CLOCK", "RESET", "ENABLE", "LOAD", "IN", "OUT")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_$]*")


@dataclass(frozen=True)
class HdlModuleDesc:
    """Leaf counter module: one W-bit register and its next-state nets."""

    name: str
    width: int
    reset_value: int
    kind: str                 # "xor", "increment" or "modn"
    sources: tuple = ()       # per register bit, the state bits XORed into it
    modulus: int = 0

    @property
    def ports(self):
        return PORTS

    def xor_inputs(self):
        return [len(s) for s in self.sources]


def _check_name(name):
    if not _IDENT.fullmatch(name):
        raise ValueError(f"{name!r} is not a Verilog identifier")
    return name


def _default_reset(spec):
    if isinstance(spec, HybridSpec):
        return spec.reset_value
    if isinstance(spec, FsrSpec):
        return 1
    return 0


def _check_reset(spec, reset):
    if isinstance(spec, HybridSpec):
        hybrid_period(spec, reset, verify_limit=0)
        return
    c = spec.build()
    if not 0 <= reset < 1 << c.width:
        raise SpecError(f"reset {reset:#x} does not fit in {c.width} bits")
    try:
        cycle_length(c, c.state(reset))
    except NotOnCycleError as e:
        raise SpecError(f"reset state is not on a cycle: {e}") from None


def describe_module(spec, reset, name):
    if isinstance(spec, Radix2Spec):
        return HdlModuleDesc(name, spec.width, reset, "increment")
    if isinstance(spec, ModNSpec):
        c = spec.build()
        if c.n == 1 << c.width:
            return HdlModuleDesc(name, c.width, reset, "increment")
        return HdlModuleDesc(name, c.width, reset, "modn", modulus=c.n)
    if isinstance(spec, FsrSpec):
        srcs = tuple(tuple(s) for s in _register_sources(spec))
        return HdlModuleDesc(name, spec.width, reset, "xor", sources=srcs)
    raise SpecError(f"no HDL leaf for {spec!r}")


def _hex(width, v):
    return f"{width}'h{v:x}"


def _header(name, width):
    return [
        f"module {name} (",
        "    input  wire CLOCK,",
        "    input  wire RESET,",
        "    input  wire ENABLE,",
        "    input  wire LOAD,",
        f"    input  wire [{width - 1}:0] IN,",
        f"    output wire [{width - 1}:0] OUT",
        ");",
    ]


def _render_leaf(desc):
    w = desc.width
    lines = _header(desc.name, w)
    lines.append(f"    reg  [{w - 1}:0] state;")
    lines.append(f"    wire [{w - 1}:0] next_state;")
    lines.append("")
    if desc.kind == "increment":
        lines.append(f"    assign next_state = state + {_hex(w, 1)};")
    elif desc.kind == "modn":
        lines.append(f"    assign next_state = (state >= {_hex(w, desc.modulus - 1)}) ? "
                     f"{_hex(w, 0)} : state + {_hex(w, 1)};")
    else:
        for bit in range(w - 1, -1, -1):
            src = desc.sources[bit]
            expr = " ^ ".join(f"state[{j}]" for j in src) if src else "1'b0"
            lines.append(f"    assign next_state[{bit}] = {expr};")
    lines += [
        "",
        "    always @(posedge CLOCK) begin",
        "        if (RESET)",
        f"            state <= {_hex(w, desc.reset_value)};",
        "        else if (LOAD)",
        "            state <= IN;",
        "        else if (ENABLE)",
        "            state <= next_state;",
        "    end",
        "",
        "    assign OUT = state;",
        "endmodule",
    ]
    return lines


def _render_hybrid(h, reset, name):
    values = h.unpack(reset)
    subs = []
    for k, (seg, v) in enumerate(zip(h.segments, values)):
        if isinstance(seg.spec, HybridSpec):
            raise SpecError("nested hybrid segments are not supported by the HDL emitter")
        subs.append(describe_module(seg.spec, v, f"{name}_seg{k}"))
    lines = []
    for d in subs:
        lines += _render_leaf(d)
        lines.append("")
    lines += _header(name, h.width)
    lines.append("")
    for k, (off, seg, d) in enumerate(zip(h.offsets, h.segments, subs)):
        hi = off + d.width - 1
        lines.append(f"    wire [{d.width - 1}:0] seg{k}_out;")
        lines.append(f"    wire enable{k};")
        lines.append(f"    wire carry{k} = (seg{k}_out == {_hex(d.width, seg.carry_value)});")
        if k == 0:
            lines.append("    assign enable0 = ENABLE;")
        else:
            lines.append(f"    assign enable{k} = enable{k - 1} & carry{k - 1};")
        lines.append(f"    {d.name} u_seg{k} (")
        lines.append(f"        .CLOCK(CLOCK), .RESET(RESET), .ENABLE(enable{k}), .LOAD(LOAD),")
        lines.append(f"        .IN(IN[{hi}:{off}]), .OUT(seg{k}_out)")
        lines.append("    );")
        lines.append("")
    outs = ", ".join(f"seg{k}_out" for k in range(len(subs) - 1, -1, -1))
    lines.append(f"    assign OUT = {{{outs}}};")
    lines.append("endmodule")
    return lines


def emit(spec, reset=None, name="pc"):
    """Verilog source for a counter or hybrid PC; the top module is ``<name>_pc``."""
    top = _check_name(f"{name}_pc")
    reset = _default_reset(spec) if reset is None else int(reset)
    _check_reset(spec, reset)
    if isinstance(spec, HybridSpec):
        if len(spec.segments) == 1 and not isinstance(spec.segments[0].spec, HybridSpec):
            lines = _render_leaf(describe_module(spec.segments[0].spec, reset, top))
        else:
            lines = _render_hybrid(spec, reset, top)
    else:
        lines = _render_leaf(describe_module(spec, reset, top))
    return "\n".join(["// generated by fsrpc", "`default_nettype none", ""] + lines) + "\n"


def golden_trace(spec, cycles, reset=None):
    """Reset value followed by ``cycles`` successor states."""
    if cycles < 0:
        raise ValueError("cycles must be nonnegative")
    reset = _default_reset(spec) if reset is None else int(reset)
    c = spec.build()
    out, v = [], reset
    for _ in range(cycles + 1):
        out.append(v)
        v = c.next_value(v)
    return out


def _trace_hex(values, width):
    digits = (width + 3) // 4
    return "".join(format(v, f"0{digits}x") + "\n" for v in values)


def emit_testbench(spec, cycles, reset=None, name="pc"):
    """Testbench text and its $readmemh golden trace, as (tb, trace_hex).

    The bench resets the design, then compares OUT against the trace after
    every enabled clock edge and prints PASS or FAIL with the error count.
    """
    _check_name(f"{name}_tb")
    trace = golden_trace(spec, cycles, reset)
    w = spec.build().width
    files = file_names(name)
    tb = [
        "// generated by fsrpc",
        "`timescale 1ns/1ps",
        "`default_nettype none",
        "",
        f"module {name}_tb;",
        "    reg CLOCK = 1'b0;",
        "    reg RESET = 1'b1;",
        "    reg ENABLE = 1'b0;",
        "    reg LOAD = 1'b0;",
        f"    reg  [{w - 1}:0] IN = {_hex(w, 0)};",
        f"    wire [{w - 1}:0] OUT;",
        f"    reg  [{w - 1}:0] golden [0:{cycles}];",
        "    integer i;",
        "    integer errors;",
        "",
        f"    {name}_pc dut (",
        "        .CLOCK(CLOCK), .RESET(RESET), .ENABLE(ENABLE), .LOAD(LOAD),",
        "        .IN(IN), .OUT(OUT)",
        "    );",
        "",
        "    always #5 CLOCK = ~CLOCK;",
        "",
        "    initial begin",
        f"        $readmemh(\"{os.path.basename(files[2])}\", golden);",
        "        errors = 0;",
        "        @(posedge CLOCK);",
        "        #1 RESET = 1'b0;",
        "        ENABLE = 1'b1;",
        f"        for (i = 0; i <= {cycles}; i = i + 1) begin",
        "            if (OUT !== golden[i]) begin",
        "                $display(\"mismatch at cycle %0d: got %h, expected %h\", i, OUT, golden[i]);",
        "                errors = errors + 1;",
        "            end",
        "            @(posedge CLOCK);",
        "            #1;",
        "        end",
        "        if (errors == 0)",
        f"            $display(\"PASS {cycles + 1} states\");",
        "        else",
        "            $display(\"FAIL %0d mismatches\", errors);",
        "        $finish;",
        "    end",
        "endmodule",
    ]
    return "\n".join(tb) + "\n", _trace_hex(trace, w)


def file_names(name, out_dir=""):
    return tuple(os.path.join(out_dir, f"{name}{suffix}")
                 for suffix in ("_pc.v", "_tb.v", "_trace.hex"))


def write_files(spec, out_dir, name="pc", cycles=None, reset=None):
    """Write <name>_pc.v, <name>_tb.v and <name>_trace.hex; returns the paths.

    ``cycles`` defaults to one full period from the reset state.
    """
    reset = _default_reset(spec) if reset is None else int(reset)
    if cycles is None:
        if isinstance(spec, HybridSpec):
            cycles = hybrid_period(spec, reset, verify_limit=0)
        else:
            c = spec.build()
            cycles = cycle_length(c, c.state(reset))
    pc_text = emit(spec, reset, name)
    tb_text, trace = emit_testbench(spec, cycles, reset, name)
    paths = file_names(name, out_dir)
    os.makedirs(out_dir or ".", exist_ok=True)
    for path, text in zip(paths, (pc_text, tb_text, trace)):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return paths
