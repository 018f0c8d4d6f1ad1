"""Place a linear program along the PC's count sequence.

Instruction i goes to address g(i) = sigma^i(reset), and absolute jump
operands are rewritten through the same map, so a processor whose PC is an
FSR (or a hybrid) fetches the program in its original order.

Processor description format (UTF-8, line oriented, ``#`` comments)::

    fsrpc-description 1
    name=tta16 word_width=16 memory_words=1024 jump_field=0:10
    [pc] segment=radix2 width=3
    [pc] segment=mfsr width=7 conns=[(0,0)] seed=0x01

Header keys: ``name``, ``word_width``, ``memory_words``,
``jump_field=<bit offset>:<bit width>`` and optional ``reset=<hex>`` (the
packed PC start state, default: the segment seeds).  Segment keys:
``segment`` (radix2, modn, fibonacci, galois, ring, mfsr, ca), ``width``,
``n`` (modn), ``taps``, ``poly``, ``conns``, ``rules``, ``seed``,
``carry`` and ``maximal`` (yes/no, default yes for FSR segments).

Program format, one entry per line::

    label loop
    word 1a2b
    jump 8000 loop
"""

from __future__ import annotations

import ast
import hashlib
import re
from dataclasses import dataclass, field
from functools import cached_property

from .counter import CounterState, ModNSpec, Radix2Spec
from .errors import DescriptionError, FetchError, MappingError, SpecError
from .fsr import Family, FsrCounter, FsrSpec
from .gf2 import Gf2Poly
from .hybrid import HybridSpec, Segment, hybrid_period

__all__ = [
    "ProcessorDescription", "LinearProgram", "Word", "Jump", "MemoryImage",
    "parse_description", "load_description", "parse_pc_text", "format_description",
    "parse_program", "map_program", "fetch_trace", "emit_image",
]

HEADER = "fsrpc-description 1"
HEADER_KEYS = {"name", "word_width", "memory_words", "jump_field", "reset"}
SEGMENT_KEYS = {"segment", "width", "n", "taps", "poly", "conns", "rules",
                "seed", "carry", "maximal"}
RELATIVE_BRANCHES = {"branch", "bra", "br", "rel", "jr", "rjmp", "bne", "beq", "brel"}


@dataclass(frozen=True)
class ProcessorDescription:
    name: str
    word_width: int
    memory_words: int
    jump_field: tuple
    pc: HybridSpec
    reset: int

    @property
    def pc_width(self):
        return self.pc.width

    @cached_property
    def counter(self):
        return self.pc.build()

    @property
    def reset_state(self):
        return CounterState(self.pc_width, self.reset)

    @cached_property
    def cycle_length(self):
        return hybrid_period(self.pc, self.reset, verify_limit=0)

    def pc_hash(self):
        text = self.pc.to_text() + f"\nreset={self.reset:#x}"
        return hashlib.sha256(text.encode()).hexdigest()[:16]


# -- description parsing -----------------------------------------------------

_TOKEN = re.compile(r"\S+")


def _tokens(line, lineno):
    """key=value tokens of one line as {key: (value, column)}."""
    out = {}
    for m in _TOKEN.finditer(line):
        tok, col = m.group(), m.start() + 1
        if "=" not in tok:
            raise DescriptionError(f"expected key=value, got {tok!r}", lineno, col)
        key, value = tok.split("=", 1)
        if key in out:
            raise DescriptionError(f"duplicate key {key!r}", lineno, col)
        out[key] = (value, col)
    return out


def _int(value, lineno, col, what):
    try:
        return int(value, 0)
    except ValueError:
        raise DescriptionError(f"{what}: expected an integer, got {value!r}", lineno, col) from None


def _literal(value, lineno, col, what, pairs=False):
    try:
        obj = ast.literal_eval(value)
    except (ValueError, SyntaxError):
        raise DescriptionError(f"{what}: cannot parse {value!r}", lineno, col) from None
    if isinstance(obj, tuple) and not pairs:
        obj = list(obj)
    if not isinstance(obj, (list, tuple)):
        obj = [obj]
    for x in obj:
        ok = (isinstance(x, tuple) and len(x) == 2 and all(isinstance(y, int) for y in x)) \
            if pairs else isinstance(x, int)
        if not ok:
            raise DescriptionError(f"{what}: bad element {x!r}", lineno, col)
    return list(obj)


def _bool(value, lineno, col):
    v = value.lower()
    if v in ("yes", "true", "1"):
        return True
    if v in ("no", "false", "0"):
        return False
    raise DescriptionError(f"maximal: expected yes/no, got {value!r}", lineno, col)


def _segment(toks, lineno):
    unknown = [k for k in toks if k not in SEGMENT_KEYS]
    if unknown:
        raise DescriptionError(f"unknown segment key {unknown[0]!r}", lineno, toks[unknown[0]][1])
    if "segment" not in toks:
        raise DescriptionError("segment line needs segment=<kind>", lineno, 1)
    kind, kcol = toks["segment"]

    def need(key):
        if key not in toks:
            raise DescriptionError(f"{kind} segment needs {key}=", lineno, kcol)
        return num(key)

    def num(key):
        value, col = toks[key]
        return _int(value, lineno, col, key)

    def lit(key, pairs=False):
        value, col = toks[key]
        return _literal(value, lineno, col, key, pairs)

    def allow(*keys):
        extra = [k for k in toks if k not in keys + ("segment", "seed", "carry")]
        if extra:
            raise DescriptionError(f"{kind} segment does not take {extra[0]}=", lineno, toks[extra[0]][1])

    try:
        if kind == "radix2":
            allow("width")
            spec = Radix2Spec(need("width"))
            if not 1 <= spec.width <= 64:
                raise DescriptionError("width must be in [1, 64]", lineno, toks["width"][1])
            maximal = None
        elif kind == "modn":
            allow("n")
            spec = ModNSpec(need("n"))
            if spec.n < 1:
                raise DescriptionError("n must be positive", lineno, toks["n"][1])
            maximal = None
        else:
            try:
                family = Family.parse(kind)
            except SpecError:
                raise DescriptionError(f"unknown segment kind {kind!r}", lineno, kcol) from None
            allow("width", "taps", "poly", "conns", "rules", "maximal")
            if "poly" in toks:
                value, col = toks["poly"]
                try:
                    spec = FsrSpec.from_poly(family, Gf2Poly.parse(value))
                except ValueError as e:
                    raise DescriptionError(f"poly: {e}", lineno, col) from None
                if "width" in toks and num("width") != spec.width:
                    raise DescriptionError("width disagrees with poly degree", lineno, toks["width"][1])
            else:
                width = need("width")
                kw = {}
                if "taps" in toks:
                    kw["taps"] = lit("taps")
                if "conns" in toks:
                    kw["conns"] = lit("conns", pairs=True)
                if "rules" in toks:
                    kw["rules"] = lit("rules")
                spec = FsrSpec(family, width, **kw)
            maximal = _bool(toks["maximal"][0], lineno, toks["maximal"][1]) if "maximal" in toks else True
    except SpecError as e:
        raise DescriptionError(str(e), lineno, kcol) from None

    seed = num("seed") if "seed" in toks else None
    carry = num("carry") if "carry" in toks else None
    if maximal and not spec.build().maximal:
        raise DescriptionError(
            f"{spec} is declared maximal but its characteristic polynomial "
            f"{spec.build().poly} is not primitive", lineno, kcol)
    if isinstance(spec, FsrSpec) and seed == 0:
        raise DescriptionError("FSR seed 0 is the zero fixed point", lineno, toks["seed"][1])
    try:
        return Segment(spec, seed, carry)
    except SpecError as e:
        raise DescriptionError(str(e), lineno, kcol) from None


def parse_description(text):
    header_seen = False
    head = {}
    segments = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if not header_seen:
            if line.strip() != HEADER:
                raise DescriptionError(f"expected header {HEADER!r}", lineno, 1)
            header_seen = True
            continue
        stripped = line.lstrip()
        indent = len(line) - len(stripped)
        if stripped.startswith("[pc]"):
            body = " " * (indent + 4) + stripped[4:]
            try:
                seg = _segment(_tokens(body, lineno), lineno)
            except SpecError as e:
                raise DescriptionError(str(e), lineno, indent + 1) from None
            segments.append((seg, lineno))
            continue
        if stripped.startswith("["):
            raise DescriptionError(f"unknown section {stripped.split()[0]!r}", lineno, indent + 1)
        for key, (value, col) in _tokens(line, lineno).items():
            if key not in HEADER_KEYS:
                raise DescriptionError(f"unknown key {key!r}", lineno, col)
            if key in head:
                raise DescriptionError(f"duplicate key {key!r}", lineno, col)
            head[key] = (value, col, lineno)
    if not header_seen:
        raise DescriptionError(f"missing header {HEADER!r}", 1, 1)
    for key in ("name", "word_width", "memory_words", "jump_field"):
        if key not in head:
            raise DescriptionError(f"missing required key {key!r}")
    if not segments:
        raise DescriptionError("no [pc] segment lines")

    def hint(key):
        value, col, ln = head[key]
        return _int(value, ln, col, key)

    name = head["name"][0]
    word_width = hint("word_width")
    memory_words = hint("memory_words")
    jf_value, jf_col, jf_line = head["jump_field"]
    m = re.fullmatch(r"(\d+):(\d+)", jf_value)
    if not m:
        raise DescriptionError("jump_field must be <offset>:<width>", jf_line, jf_col)
    jump_field = (int(m.group(1)), int(m.group(2)))

    if not 1 <= word_width <= 64:
        raise DescriptionError("word_width must be in [1, 64]", head["word_width"][2], head["word_width"][1])
    if memory_words < 1:
        raise DescriptionError("memory_words must be positive", head["memory_words"][2], head["memory_words"][1])
    try:
        pc = HybridSpec(tuple(s for s, _ in segments))
    except SpecError as e:
        raise DescriptionError(str(e), segments[0][1], 1) from None
    if jump_field[1] != pc.width:
        raise DescriptionError(f"jump_field width {jump_field[1]} does not match PC width {pc.width}",
                               jf_line, jf_col)
    if sum(jump_field) > word_width:
        raise DescriptionError(f"jump_field {jump_field[0]}:{jump_field[1]} does not fit in "
                               f"{word_width}-bit words", jf_line, jf_col)
    if memory_words > 1 << pc.width:
        raise DescriptionError(f"memory_words {memory_words} exceeds the {pc.width}-bit address space",
                               head["memory_words"][2], head["memory_words"][1])
    reset = hint("reset") if "reset" in head else pc.reset_value
    where = (head["reset"][2], head["reset"][1]) if "reset" in head else (segments[0][1], 1)
    if not 0 <= reset < 1 << pc.width:
        raise DescriptionError(f"reset {reset:#x} does not fit in {pc.width} bits", *where)
    for (seg, ln), v in zip(segments, pc.unpack(reset)):
        if isinstance(seg.counter, FsrCounter) and v == 0:
            raise DescriptionError("reset puts an FSR segment in its zero fixed point", ln, 1)
    d = ProcessorDescription(name, word_width, memory_words, jump_field, pc, reset)
    try:
        d.cycle_length
    except SpecError as e:
        raise DescriptionError(str(e), *where) from None
    return d


def parse_pc_text(text):
    """PC from bare segment lines, e.g. ``family=mfsr width=8 conns=[(0,0),(1,5)]``.

    Each non-blank line is one segment, low to high, in the ``[pc]`` line
    syntax; the ``[pc]`` prefix is optional and ``family=`` may stand in
    for ``segment=``.
    """
    segments = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.lstrip()
        if stripped.startswith("[pc]"):
            line = " " * (len(line) - len(stripped) + 4) + stripped[4:]
        toks = _tokens(line, lineno)
        if "family" in toks:
            if "segment" in toks:
                raise DescriptionError("give segment= or family=, not both", lineno, toks["family"][1])
            toks["segment"] = toks.pop("family")
        try:
            segments.append(_segment(toks, lineno))
        except SpecError as e:
            raise DescriptionError(str(e), lineno, 1) from None
    if not segments:
        raise DescriptionError("no PC segments given")
    try:
        return HybridSpec(tuple(segments))
    except SpecError as e:
        raise DescriptionError(str(e)) from None


def load_description(path):
    with open(path, encoding="utf-8") as fh:
        return parse_description(fh.read())


def format_description(d):
    lines = [HEADER,
             f"name={d.name} word_width={d.word_width} memory_words={d.memory_words} "
             f"jump_field={d.jump_field[0]}:{d.jump_field[1]} reset={d.reset:#x}"]
    lines += d.pc.to_text().splitlines()
    return "\n".join(lines) + "\n"


# -- programs ---------------------------------------------------------------

@dataclass(frozen=True)
class Word:
    word: int


@dataclass(frozen=True)
class Jump:
    template: int
    label: str


@dataclass
class LinearProgram:
    entries: list = field(default_factory=list)
    labels: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.entries)

    def add_label(self, name):
        if name in self.labels:
            raise MappingError(f"label {name!r} defined twice")
        self.labels[name] = len(self.entries)

    def words(self, d):
        """Words as the processor should see them in fetch order."""
        return [_resolve(d, e, self.labels) for e in self.entries]


def _hex(text, lineno, col):
    try:
        return int(text, 16)
    except ValueError:
        raise DescriptionError(f"expected a hex word, got {text!r}", lineno, col) from None


def parse_program(text):
    prog = LinearProgram()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].split(";", 1)[0]
        toks = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(line)]
        if not toks:
            continue
        op, col = toks[0]
        args = toks[1:]
        op_l = op.lower()
        if op_l == "word" and len(args) == 1:
            prog.entries.append(Word(_hex(*args[0], lineno)))
        elif op_l == "jump" and len(args) == 2:
            prog.entries.append(Jump(_hex(*args[0], lineno), args[1][0]))
        elif op_l == "label" and len(args) == 1:
            if args[0][0] in prog.labels:
                raise DescriptionError(f"label {args[0][0]!r} defined twice", lineno, args[0][1])
            prog.labels[args[0][0]] = len(prog.entries)
        elif op_l in RELATIVE_BRANCHES:
            raise DescriptionError(
                f"{op!r}: PC-relative branches are not supported with FSR program counters; "
                "use an absolute jump", lineno, col)
        elif op_l in ("word", "jump", "label"):
            raise DescriptionError(f"wrong number of operands for {op!r}", lineno, col)
        else:
            raise DescriptionError(f"unknown entry {op!r}", lineno, col)
    for e in prog.entries:
        if isinstance(e, Jump) and e.label not in prog.labels:
            raise DescriptionError(f"undefined label {e.label!r}")
    return prog


def _resolve(d, entry, labels):
    if isinstance(entry, Word):
        return entry.word
    if entry.label not in labels:
        raise MappingError(f"undefined label {entry.label!r}")
    target = d.counter.advance(d.reset, labels[entry.label])
    off, width = d.jump_field
    if target >> width:
        raise MappingError(f"jump target {target:#x} wider than the {width}-bit jump field")
    field_mask = ((1 << width) - 1) << off
    return (entry.template & ~field_mask) | (target << off)


# -- images -----------------------------------------------------------------

class MemoryImage:
    """Sparse address -> word map that refuses double writes."""

    def __init__(self, word_width, memory_words, name="", pc_hash=""):
        self.word_width = word_width
        self.memory_words = memory_words
        self.name = name
        self.pc_hash = pc_hash
        self.words = {}

    def write(self, address, word):
        if not 0 <= address < self.memory_words:
            raise MappingError(f"address {address:#x} outside memory of {self.memory_words} words")
        if address in self.words:
            raise MappingError(f"address {address:#x} written twice")
        if not 0 <= word < 1 << self.word_width:
            raise MappingError(f"word {word:#x} exceeds {self.word_width} bits")
        self.words[address] = word

    def __getitem__(self, address):
        return self.words[address]

    def __contains__(self, address):
        return address in self.words

    def __len__(self):
        return len(self.words)

    def addresses(self):
        return sorted(self.words)

    def runs(self):
        """Contiguous runs as (start address, [words])."""
        out = []
        for a in self.addresses():
            if out and out[-1][0] + len(out[-1][1]) == a:
                out[-1][1].append(self.words[a])
            else:
                out.append((a, [self.words[a]]))
        return out


def map_program(d, p):
    n = len(p.entries)
    if n > d.cycle_length:
        raise MappingError(f"program of {n} entries is longer than the PC cycle of {d.cycle_length}")
    words = p.words(d)
    img = MemoryImage(d.word_width, d.memory_words, d.name, d.pc_hash())
    nxt = d.counter.next_value
    a = d.reset
    for w in words:
        img.write(a, w)
        a = nxt(a)
    return img


def fetch_trace(d, img, steps):
    out = []
    nxt = d.counter.next_value
    a = d.reset
    for i in range(steps):
        if a not in img:
            raise FetchError(a, i)
        out.append(img[a])
        a = nxt(a)
    return out


def emit_image(img, fmt="hex"):
    """Serialise an image.

    ``hex``: one ``@<address>`` record per contiguous run followed by one
    zero-padded word per line.  ``binary``: little-endian words, unwritten
    addresses zero-filled, memory_words words in total.
    """
    for a, w in img.words.items():
        if w >> img.word_width:
            raise MappingError(f"word {w:#x} at {a:#x} exceeds {img.word_width} bits")
    if fmt == "hex":
        digits = (img.word_width + 3) // 4
        lines = []
        for start, words in img.runs():
            lines.append(f"@{start:x}")
            lines.extend(format(w, f"0{digits}x") for w in words)
        return ("\n".join(lines) + "\n").encode() if lines else b""
    if fmt == "binary":
        nbytes = (img.word_width + 7) // 8
        buf = bytearray(nbytes * img.memory_words)
        for a, w in img.words.items():
            buf[a * nbytes:(a + 1) * nbytes] = w.to_bytes(nbytes, "little")
        return bytes(buf)
    raise ValueError(f"unknown image format {fmt!r}")
