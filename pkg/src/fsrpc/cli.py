"""fsrpc command line.

Exit status: 0 success, 1 domain failure (nothing found, validation),
2 usage error.  Errors go to stderr as one JSON object per line.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import cachesim, hdl, mapper, perf
from .counter import Radix2Spec
from .errors import FsrpcError
from .fsr import FsrCounter, find_maximal
from .hybrid import as_hybrid, default_pc, hybrid_period

PC_FAMILIES = ("radix2", "fibonacci", "galois", "ring", "mfsr", "ca")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _report(kind, message, **extra):
    sys.stderr.write(json.dumps({"error": kind, "message": message, **extra}) + "\n")


def _warn(message):
    sys.stderr.write(json.dumps({"warning": message}) + "\n")


def _int(text):
    try:
        return int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def _widths(text):
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def _check_out_path(path, is_dir=False):
    """Fail before doing any work if the output cannot be created."""
    if is_dir and os.path.isdir(path):
        return
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        raise UsageError(f"output directory {parent!r} does not exist")


def _family_pc(family, width):
    if width is None:
        raise UsageError("--width is required with --family")
    if family == "radix2":
        return as_hybrid(Radix2Spec(width))
    if not 2 <= width <= 64:
        raise UsageError(f"width must be in [2, 64], got {width}")
    found = find_maximal(family, width, count=1)
    if not found:
        raise FsrpcError(f"no maximal {family} register of width {width} found")
    return as_hybrid(found[0])


def _load_pc(source, family=None, width=None):
    """(name, PC as a HybridSpec, reset value) from a file, inline text or flags."""
    if source is None:
        if family is None:
            raise UsageError("give a PC description, spec text or --family/--width")
        pc = _family_pc(family, width)
        return "pc", pc, pc.reset_value
    if os.path.isfile(source):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
        first = next((ln.split("#", 1)[0].strip() for ln in text.splitlines()
                      if ln.split("#", 1)[0].strip()), "")
        if first == mapper.HEADER:
            d = mapper.parse_description(text)
            return d.name, d.pc, d.reset
        pc = mapper.parse_pc_text(text)
        return os.path.splitext(os.path.basename(source))[0], pc, pc.reset_value
    pc = mapper.parse_pc_text(source)
    return "pc", pc, pc.reset_value


# -- subcommands -------------------------------------------------------------

def cmd_find(args, out):
    family = args.family or args.family_pos
    width = args.width if args.width is not None else args.width_pos
    count = args.count if args.count is not None else args.count_pos
    if family is None or width is None:
        raise UsageError("find needs a family and a width")
    if family == "radix2":
        raise UsageError("find searches FSR families only")
    if not 2 <= width <= 64:
        raise UsageError(f"width must be in [2, 64], got {width}")
    if count is not None and count < 1:
        raise UsageError("count must be at least 1")
    found = find_maximal(family, width, count=count if count is not None else 1)
    for spec in found:
        out.write(spec.to_text() + "\n")
    if not found:
        _report("NotFound", f"no maximal {family} register of width {width} within the search budget")
        return 1
    return 0


def cmd_seq(args, out):
    _, pc, reset = _load_pc(args.spec, args.family, args.width)
    if args.seed is not None:
        reset = args.seed
    if not 0 <= reset < 1 << pc.width:
        raise UsageError(f"seed {reset:#x} does not fit in {pc.width} bits")
    for seg, v in zip(pc.segments, pc.unpack(reset)):
        if isinstance(seg.counter, FsrCounter) and v == 0:
            _warn("zero fixed point: an FSR segment starts in the all-zero state and never leaves it")
            break
    c = pc.build()
    digits = (pc.width + 3) // 4
    v = reset
    for _ in range(args.steps):
        out.write(format(v, f"0{digits}x") + "\n")
        v = c.next_value(v)
    return 0


def cmd_asm(args, out):
    if args.out:
        _check_out_path(args.out)
    d = mapper.load_description(args.description)
    with open(args.program, encoding="utf-8") as fh:
        prog = mapper.parse_program(fh.read())
    img = mapper.map_program(d, prog)
    data = mapper.emit_image(img, args.format)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    elif args.format == "binary":
        sys.stdout.buffer.write(data)
    else:
        out.write(data.decode())
    return 0


def cmd_cachesim(args, out):
    if args.out:
        _check_out_path(args.out)
    cfg = cachesim.CacheConfig(args.line_size, args.lines, args.assoc)
    if args.trace:
        with open(args.trace, encoding="utf-8") as fh:
            rows = [cachesim.simulate_trace(cachesim.read_trace(fh.read()), cfg,
                                            kind=os.path.basename(args.trace))]
    elif args.description:
        name, pc, reset = _load_pc(args.description)
        steps = args.steps if args.steps is not None else hybrid_period(pc, reset, verify_limit=0)
        rows = [cachesim.simulate(pc, reset, cfg, steps, kind=name),
                cachesim.simulate(Radix2Spec(pc.width), 0, cfg, steps, kind=f"radix2-{pc.width}")]
    else:
        if args.width is None:
            raise UsageError("cachesim needs a description, --trace or --width")
        w = args.width
        fam = args.family or "mfsr"
        if fam == "radix2":
            raise UsageError("--family selects the pure FSR row and cannot be radix2")
        fsr = _family_pc(fam, w)
        hyb = default_pc(w)
        steps = args.steps if args.steps is not None else hybrid_period(hyb, verify_limit=0)
        rows = cachesim.compare([(f"radix2-{w}", Radix2Spec(w)),
                                 (f"hybrid-3+{w - 3}", hyb),
                                 (f"{fam}-{w}", fsr)], cfg, steps)
    text = cachesim.reports_csv(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return 0


def cmd_latency(args, out):
    if args.out:
        _check_out_path(args.out)
    model = perf.model_from_env(args.coeffs)
    widths = args.widths if args.widths else list(range(2, 65))
    delim = "\t" if args.format == "tsv" else ","
    if args.crossover:
        text = perf.crossover_to_text(perf.crossover_table(widths, model), model, delim)
    else:
        text = perf.rows_to_text(perf.latency_rows(widths, model), delim)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return 0


def cmd_emit_hdl(args, out):
    out_dir = args.out or "."
    _check_out_path(out_dir, is_dir=True)
    name, pc, reset = _load_pc(args.description, args.family, args.width)
    if args.seed is not None:
        reset = args.seed
    if args.name:
        name = args.name
    spec = pc if len(pc.segments) > 1 else pc.segments[0].spec
    paths = hdl.write_files(spec, out_dir, name=name, cycles=args.steps, reset=reset)
    for p in paths:
        out.write(p + "\n")
    return 0


# -- parser ------------------------------------------------------------------

def build_parser():
    p = _Parser(prog="fsrpc", description="Feedback-shift-register program counter tools.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    f = sub.add_parser("find", help="list maximal-cycle FSR specs")
    f.add_argument("family_pos", nargs="?", metavar="FAMILY", choices=PC_FAMILIES[1:])
    f.add_argument("width_pos", nargs="?", type=int, metavar="WIDTH")
    f.add_argument("count_pos", nargs="?", type=int, metavar="COUNT")
    f.add_argument("--family", choices=PC_FAMILIES[1:])
    f.add_argument("--width", type=int)
    f.add_argument("--count", type=int)
    f.set_defaults(func=cmd_find)

    s = sub.add_parser("seq", help="print the count sequence of a PC")
    s.add_argument("spec", nargs="?", help="description file, spec file or inline spec text")
    s.add_argument("--family", choices=PC_FAMILIES)
    s.add_argument("--width", type=int)
    s.add_argument("--seed", type=_int, help="start state (default: the PC reset value)")
    s.add_argument("--steps", type=int, default=16)
    s.set_defaults(func=cmd_seq)

    a = sub.add_parser("asm", help="map a linear program onto the PC sequence")
    a.add_argument("description")
    a.add_argument("program")
    a.add_argument("--format", choices=("hex", "binary"), default="hex")
    a.add_argument("--out")
    a.set_defaults(func=cmd_asm)

    c = sub.add_parser("cachesim", help="count instruction-cache misses")
    c.add_argument("description", nargs="?")
    c.add_argument("--trace", help="file of hex fetch addresses, one per line")
    c.add_argument("--family", choices=PC_FAMILIES)
    c.add_argument("--width", type=int)
    c.add_argument("--line-size", type=int, default=8)
    c.add_argument("--lines", type=int, default=16)
    c.add_argument("--assoc", type=int, default=1)
    c.add_argument("--steps", type=int)
    c.add_argument("--format", choices=("csv",), default="csv")
    c.add_argument("--out")
    c.set_defaults(func=cmd_cachesim)

    lat = sub.add_parser("latency", help="fitted latency estimates")
    lat.add_argument("widths", nargs="?", type=_widths, help="e.g. 8,16,32 or 7-64")
    lat.add_argument("--coeffs", help=f"coefficient file (default: ${perf.COEFFS_ENV})")
    lat.add_argument("--crossover", action="store_true", help="radix-2 vs FSR ratio table")
    lat.add_argument("--format", choices=("csv", "tsv"), default="csv")
    lat.add_argument("--out")
    lat.set_defaults(func=cmd_latency)

    e = sub.add_parser("emit-hdl", help="write Verilog, testbench and golden trace")
    e.add_argument("description", nargs="?")
    e.add_argument("--family", choices=PC_FAMILIES)
    e.add_argument("--width", type=int)
    e.add_argument("--seed", type=_int, help="reset state (default: the PC reset value)")
    e.add_argument("--steps", type=int, help="testbench cycles (default: one full period)")
    e.add_argument("--name")
    e.add_argument("--out", help="output directory")
    e.set_defaults(func=cmd_emit_hdl)
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            raise UsageError("missing subcommand")
        return args.func(args, out)
    except UsageError as e:
        _report("UsageError", str(e))
        return 2
    except (FsrpcError, ValueError, OSError) as e:
        _report(type(e).__name__, str(e))
        return 1


if __name__ == "__main__":
    sys.exit(main())
