"""The five linear cyclic-sequence-generator structures.

Bit numbering is the same for every family: the register holds bits
b_{N-1} ... b_0 and the shift moves data toward b_0.

* Fibonacci: b_{N-1} <- XOR of the tapped bits, every other b_i <- b_{i+1}.
  ``taps`` are bit indices; the characteristic polynomial is
  x^N + sum(x^t for t in taps).
* Galois: b_0 is fed back to b_{N-1} and XORed into the input of each
  tapped register, b_t <- b_{t+1} ^ b_0.  Tap t contributes x^(N-1-t).
* Ring generator and MFSR: the register is closed into a ring
  (b_{N-1} <- b_0) and each connection ``(src, dst)`` XORs b_src into the
  input of register dst.  Fan-in and fan-out are limited to 2.
* Cellular automaton: b_i <- b_{i-1} ^ b_{i+1} (rule 90), plus b_i for
  rule 150, with null boundaries.
"""

from __future__ import annotations

import enum
import itertools
import json
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from importlib import resources

from .counter import MAX_WIDTH, Counter
from .errors import SpecError
from .gf2 import Gf2Matrix, Gf2Poly, berlekamp_massey, char_poly, is_primitive

__all__ = [
    "Family", "FsrSpec", "FsrCounter", "StructuralMetrics",
    "build_counter", "transition_matrix", "spec_poly", "metrics",
    "ring_from_poly", "find_maximal", "candidates", "nonzero_period",
    "canonical_specs", "DEFAULT_BUDGET",
]


class Family(str, enum.Enum):
    FIBONACCI = "fibonacci"
    GALOIS = "galois"
    RING = "ring"
    MFSR = "mfsr"
    CA = "ca"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower()
        aliases = {"fib": "fibonacci", "ringgenerator": "ring", "ring_generator": "ring",
                   "cellular": "ca", "cellularautomaton": "ca", "cellular_automaton": "ca"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise SpecError(f"unknown FSR family {name!r}") from None


@dataclass(frozen=True)
class FsrSpec:
    family: Family
    width: int
    taps: tuple = ()
    conns: tuple = ()
    rules: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        object.__setattr__(self, "taps", tuple(sorted(set(self.taps))))
        object.__setattr__(self, "conns", tuple(sorted((int(s), int(d)) for s, d in self.conns)))
        object.__setattr__(self, "rules", tuple(int(r) for r in self.rules))
        _validate(self)

    # -- constructors ----------------------------------------------------

    @classmethod
    def from_poly(cls, family, poly):
        """Spec in ``family`` whose characteristic polynomial is ``poly``.

        Supported for Fibonacci, Galois and ring generators.
        """
        family = Family.parse(family)
        if isinstance(poly, str):
            poly = Gf2Poly.parse(poly)
        n = poly.degree
        if n < 1:
            raise SpecError(f"polynomial {poly} has degree < 1")
        lower = [e for e in range(n) if poly.bits >> e & 1]
        if family is Family.FIBONACCI:
            return cls(family, n, taps=lower)
        if family in (Family.GALOIS, Family.RING):
            if not poly.bits & 1:
                raise SpecError(f"{family.value} needs a nonzero constant term: {poly}")
            galois = cls(Family.GALOIS, n, taps=[n - 1 - e for e in lower if e > 0])
            return galois if family is Family.GALOIS else ring_from_poly(poly)
        raise SpecError(f"cannot build a {family.value} spec from a polynomial")

    @classmethod
    def ca(cls, rule150_cells, width):
        return cls(Family.CA, width, rules=[150 if i in set(rule150_cells) else 90
                                             for i in range(width)])

    # -- text form -------------------------------------------------------

    def to_text(self):
        parts = [f"family={self.family.value}", f"width={self.width}"]
        if self.family in (Family.FIBONACCI, Family.GALOIS):
            parts.append("taps=[" + ",".join(map(str, self.taps)) + "]")
        elif self.family in (Family.RING, Family.MFSR):
            parts.append("conns=[" + ",".join(f"({s},{d})" for s, d in self.conns) + "]")
        else:
            parts.append("rules=[" + ",".join(map(str, self.rules)) + "]")
        return " ".join(parts)

    def __str__(self):
        return self.to_text()

    def feedback_key(self):
        """The tuple the maximal-cycle search orders candidates by."""
        if self.family in (Family.FIBONACCI, Family.GALOIS):
            return self.taps
        if self.family in (Family.RING, Family.MFSR):
            return self.conns
        return tuple(i for i, r in enumerate(self.rules) if r == 150)

    def build(self):
        return FsrCounter(self)


def _validate(spec):
    n = spec.width
    fam = spec.family
    if not isinstance(n, int) or not 1 <= n <= MAX_WIDTH:
        raise SpecError(f"width must be in [1, {MAX_WIDTH}], got {n!r}")
    if fam is Family.FIBONACCI:
        _no_extra(spec, conns=True, rules=True)
        bad = [t for t in spec.taps if not 0 <= t < n]
        if bad:
            raise SpecError(f"fibonacci taps {bad} outside [0, {n})")
    elif fam is Family.GALOIS:
        _no_extra(spec, conns=True, rules=True)
        bad = [t for t in spec.taps if not 0 <= t < n - 1]
        if bad:
            raise SpecError(f"galois taps {bad} outside [0, {n - 1})")
    elif fam in (Family.RING, Family.MFSR):
        _no_extra(spec, taps=True, rules=True)
        if len(set(spec.conns)) != len(spec.conns):
            raise SpecError("duplicate connection")
        for s, d in spec.conns:
            if not (0 <= s < n and 0 <= d < n):
                raise SpecError(f"connection ({s},{d}) outside [0, {n})")
            if s == (d + 1) % n:
                raise SpecError(f"connection ({s},{d}) cancels the shift path into register {d}")
        srcs = [s for s, _ in spec.conns]
        dsts = [d for _, d in spec.conns]
        if len(set(dsts)) != len(dsts):
            raise SpecError(f"{fam.value}: fan-in exceeds 2 at register "
                            f"{_first_dup(dsts)}")
        if len(set(srcs)) != len(srcs):
            raise SpecError(f"{fam.value}: fan-out exceeds 2 at register "
                            f"{_first_dup(srcs)}")
    elif fam is Family.CA:
        _no_extra(spec, taps=True, conns=True)
        if len(spec.rules) != n:
            raise SpecError(f"cellular automaton needs {n} cell rules, got {len(spec.rules)}")
        bad = [r for r in spec.rules if r not in (90, 150)]
        if bad:
            raise SpecError(f"cell rules must be 90 or 150, got {bad}")


def _no_extra(spec, taps=False, conns=False, rules=False):
    for name, flag in (("taps", taps), ("conns", conns), ("rules", rules)):
        if flag and getattr(spec, name):
            raise SpecError(f"{spec.family.value} spec does not take {name}")


def _first_dup(xs):
    seen = set()
    for x in xs:
        if x in seen:
            return x
        seen.add(x)


# -- structure ---------------------------------------------------------------

def _register_sources(spec):
    """For each register i, the registers whose outputs are XORed into its input."""
    n = spec.width
    fam = spec.family
    if fam is Family.FIBONACCI:
        srcs = [[i + 1] for i in range(n - 1)]
        srcs.append(list(spec.taps))
    elif fam is Family.GALOIS:
        srcs = [[i + 1] for i in range(n - 1)] + [[0]]
        for t in spec.taps:
            srcs[t].append(0)
    elif fam in (Family.RING, Family.MFSR):
        srcs = [[(i + 1) % n] for i in range(n)]
        for s, d in spec.conns:
            srcs[d].append(s)
    else:
        srcs = []
        for i, rule in enumerate(spec.rules):
            cell = [j for j in (i - 1, i + 1) if 0 <= j < n]
            if rule == 150:
                cell.insert(1 if i > 0 else 0, i)
            srcs.append(cell)
    return srcs


def transition_matrix(spec):
    """M with step(s) = M s over GF(2), row i listing the inputs of register i."""
    rows = []
    for src in _register_sources(spec):
        r = 0
        for j in src:
            r ^= 1 << j
        rows.append(r)
    return Gf2Matrix(tuple(rows))


def spec_poly(spec):
    return char_poly(transition_matrix(spec))


class FsrCounter(Counter):
    """Counter stepping an FSR spec with the family's bit-level update rule."""

    def __init__(self, spec):
        self.spec = spec
        self.width = n = spec.width
        self._mask = (1 << n) - 1
        fam = spec.family
        if fam is Family.FIBONACCI:
            tapmask = sum(1 << t for t in spec.taps)
            top = n - 1

            def nxt(v):
                return (v >> 1) | (((v & tapmask).bit_count() & 1) << top)
        elif fam is Family.GALOIS:
            fb = (1 << (n - 1)) | sum(1 << t for t in spec.taps)

            def nxt(v):
                return (v >> 1) ^ fb if v & 1 else v >> 1
        elif fam in (Family.RING, Family.MFSR):
            conns = spec.conns
            top = n - 1

            def nxt(v):
                out = (v >> 1) | ((v & 1) << top)
                for s, d in conns:
                    out ^= (v >> s & 1) << d
                return out
        else:
            mask = self._mask
            selfmask = sum(1 << i for i, r in enumerate(spec.rules) if r == 150)

            def nxt(v):
                return ((v << 1) & mask) ^ (v >> 1) ^ (v & selfmask)
        self.next_value = nxt

    @cached_property
    def matrix(self):
        return transition_matrix(self.spec)

    @cached_property
    def poly(self):
        return char_poly(self.matrix)

    @cached_property
    def maximal(self):
        return is_primitive(self.poly)

    @cached_property
    def _squares(self):
        return [self.matrix]

    def advance(self, v, k):
        """sigma^k via repeated squaring of the transition matrix."""
        if v and self.maximal:
            k %= (1 << self.width) - 1
        sq = self._squares
        i = 0
        while k:
            if i == len(sq):
                sq.append(sq[-1] @ sq[-1])
            if k & 1:
                v = sq[i].apply(v)
            k >>= 1
            i += 1
        return v

    def known_cycle_length(self, v):
        if v == 0:
            return 1
        if self.maximal:
            return (1 << self.width) - 1
        return None

    def __repr__(self):
        return f"FsrCounter({self.spec.to_text()})"

    def __eq__(self, other):
        return isinstance(other, FsrCounter) and other.spec == self.spec

    def __hash__(self):
        return hash((FsrCounter, self.spec))


def build_counter(spec):
    """Counter for any spec with a ``build`` method (FSR, radix-2, mod-n, hybrid)."""
    return spec.build()


def nonzero_period(counter, start=1, cap=None):
    """Period of the orbit of ``start`` by exhaustive stepping.

    Returns None if the orbit does not return to ``start`` within ``cap``
    steps (default 2^W).
    """
    nxt = counter.next_value
    cap = (1 << counter.width) if cap is None else cap
    v, k = nxt(start), 1
    while v != start:
        if k >= cap:
            return None
        v = nxt(v)
        k += 1
    return k


# -- metrics -----------------------------------------------------------------

@dataclass(frozen=True)
class StructuralMetrics:
    """Worst-case gate and wiring figures of the feedback network.

    ``xor_gate_count`` counts one XOR network per register input that mixes
    two or more signals (a wide Fibonacci XOR fits one LUT);
    ``raw_xor2_count`` counts 2-input XOR gates.  ``max_gate_depth`` is in
    2-input XOR levels, at least 1 for the register-to-register path.
    """

    xor_gate_count: int
    max_fan_in: int
    max_fan_out: int
    max_gate_depth: int
    raw_xor2_count: int = field(default=0)

    def table_row(self):
        return (self.xor_gate_count, self.max_fan_in, self.max_fan_out)


def metrics(spec):
    srcs = _register_sources(spec)
    fan_out = [0] * spec.width
    for src in srcs:
        for j in src:
            fan_out[j] += 1
    widest = max(len(s) for s in srcs)
    if spec.family is Family.CA:
        # every cell carries its own XOR; null-boundary inputs are tied low
        gates = spec.width
    else:
        gates = sum(1 for s in srcs if len(s) >= 2)
    return StructuralMetrics(
        xor_gate_count=gates,
        max_fan_in=widest,
        max_fan_out=max(fan_out),
        max_gate_depth=max(1, math.ceil(math.log2(widest))) if widest else 1,
        raw_xor2_count=sum(max(0, len(s) - 1) for s in srcs),
    )


# -- ring generators ---------------------------------------------------------

RING_SEARCH_BUDGET = 4000


@lru_cache(maxsize=4096)
def _ring_conns(poly_bits):
    poly = Gf2Poly(poly_bits)
    n = poly.degree
    middle = [e for e in range(n - 1, 0, -1) if poly.bits >> e & 1]
    # Galois layout (all sources at b_0) and Fibonacci layout (all
    # destinations at b_{N-1}) both realise the polynomial on the ring.
    for start in ([(0, n - 1 - e) for e in middle], [(e, n - 1) for e in middle]):
        found = _spread(n, poly_bits, start)
        if found is not None:
            return found
    return None


def _spread(n, poly_bits, start):
    """Rotate single connections until no two share a source or destination.

    Rotating one connection keeps its span.  Each partial layout must keep
    the polynomial; rotating every connection at once is a conjugation, so
    the first one stays put.
    """
    if len(start) <= 1:
        return tuple(start)
    budget = [RING_SEARCH_BUDGET]

    def place(layout, k):
        if k == len(layout):
            ok = (len({s for s, _ in layout}) == len(layout)
                  and len({d for _, d in layout}) == len(layout))
            return layout if ok else None
        s0, d0 = start[k]
        used_src = {s for s, _ in layout[:k]}
        used_dst = {d for _, d in layout[:k]}
        for t in range(n):
            cand = ((s0 + t) % n, (d0 + t) % n)
            if cand[0] in used_src or cand[1] in used_dst:
                continue
            if budget[0] <= 0:
                return None
            budget[0] -= 1
            trial = layout[:k] + [cand] + layout[k + 1:]
            if t and _conns_poly_unchecked(n, trial) != poly_bits:
                continue
            done = place(trial, k + 1)
            if done is not None:
                return done
        return None

    found = place(list(start), 1)
    return tuple(found) if found is not None else None


def _conns_poly_unchecked(n, conns):
    rows = [1 << ((i + 1) % n) for i in range(n)]
    for s, d in conns:
        rows[d] ^= 1 << s
    return char_poly(Gf2Matrix(tuple(rows))).bits


def ring_from_poly(poly):
    """Ring generator realising ``poly``: one 2-input XOR per middle term.

    Starts from the Galois layout and rotates connections so that no two
    share a source or destination.  Raises SpecError when no such layout
    is found.
    """
    if isinstance(poly, str):
        poly = Gf2Poly.parse(poly)
    n = poly.degree
    if n < 1 or not poly.bits & 1:
        raise SpecError(f"ring generator needs degree >= 1 and a constant term: {poly}")
    conns = _ring_conns(poly.bits)
    if conns is None:
        raise SpecError(f"no fan-in/fan-out 2 ring layout found for {poly}")
    return FsrSpec(Family.RING, n, conns=conns)


# -- maximal-cycle search ----------------------------------------------------

DEFAULT_BUDGET = 200_000


def _combos_by_size(items, sizes):
    for k in sizes:
        yield from itertools.combinations(items, k)


def _tap_combos(n):
    return _combos_by_size(range(0, n - 1), range(0, n))


def _galois_poly(n, taps):
    return Gf2Poly(1 << n | 1 | sum(1 << (n - 1 - t) for t in taps))


def candidates(family, n):
    """Candidate feedback descriptions in search order.

    Fewest feedback terms first, then lexicographic.  Yields
    ``(spec, poly)`` where ``poly`` is the polynomial implied by the taps,
    or ``(spec_factory, None)`` where the polynomial must come from the
    transition matrix.
    """
    family = Family.parse(family)
    if family is Family.FIBONACCI:
        # b_0 must be tapped or the state map is singular
        for rest in _combos_by_size(range(1, n), range(0, n)):
            taps = (0,) + rest
            yield (lambda taps=taps: FsrSpec(family, n, taps=taps)), \
                Gf2Poly(1 << n | sum(1 << t for t in taps))
    elif family is Family.GALOIS:
        for taps in _tap_combos(n):
            yield (lambda taps=taps: FsrSpec(family, n, taps=taps)), _galois_poly(n, taps)
    elif family is Family.RING:
        for taps in _tap_combos(n):
            poly = _galois_poly(n, taps)
            yield (lambda poly=poly: _ring_or_none(poly)), poly
    elif family is Family.MFSR:
        pool = [(s, d) for s in range(n) for d in range(n) if s != (d + 1) % n]
        for k in range(0, n + 1):
            for conns in itertools.combinations(pool, k):
                if (len({s for s, _ in conns}) == k and len({d for _, d in conns}) == k):
                    yield (lambda conns=conns: FsrSpec(family, n, conns=conns)), None
    else:
        for cells in _combos_by_size(range(n), range(0, n + 1)):
            yield (lambda cells=cells: FsrSpec.ca(cells, n)), None


def _ring_or_none(poly):
    conns = _ring_conns(poly.bits)
    return None if conns is None else FsrSpec(Family.RING, poly.degree, conns=conns)


def _maybe_primitive(counter):
    """Cheap necessary condition: the output bit sequence has a primitive minimal polynomial."""
    n = counter.width
    nxt = counter.next_value
    v, seq = 1, []
    for _ in range(2 * n):
        seq.append(v & 1)
        v = nxt(v)
    mp = berlekamp_massey(seq)
    return mp.degree == n and is_primitive(mp)


def find_maximal(family, width, count=None, budget=DEFAULT_BUDGET):
    """Maximal-cycle specs of ``family`` and ``width``, in search order.

    Examines at most ``budget`` candidates and stops after ``count``
    results.  Each result has a primitive characteristic polynomial of its
    transition matrix; for width <= 16 its period is also confirmed by
    exhaustive stepping.
    """
    if not 2 <= width <= MAX_WIDTH:
        raise SpecError(f"width must be in [2, {MAX_WIDTH}], got {width}")
    found = []
    for make, poly in itertools.islice(candidates(family, width), budget):
        if poly is not None:
            if not is_primitive(poly):
                continue
            spec = make()
            if spec is None:
                continue
        else:
            spec = make()
            if not _maybe_primitive(spec.build()):
                continue
        p = spec_poly(spec)
        if not is_primitive(p) or (poly is not None and p != poly):
            raise AssertionError(f"{spec}: transition matrix gives {p}, expected {poly}")
        if width <= 16:
            period = nonzero_period(spec.build())
            if period != (1 << width) - 1:
                raise AssertionError(f"{spec} has primitive polynomial but period {period}")
        found.append(spec)
        if count is not None and len(found) >= count:
            break
    return found


# -- pinned exemplars --------------------------------------------------------

def _spec_from_json(d):
    return FsrSpec(d["family"], d["width"], taps=d.get("taps", ()),
                   conns=[tuple(c) for c in d.get("conns", ())], rules=d.get("rules", ()))


@lru_cache(maxsize=1)
def canonical_specs():
    """The pinned 8-bit exemplar of each family (first hit of find_maximal)."""
    text = resources.files("fsrpc").joinpath("data/canonical8.json").read_text()
    return {Family(k): _spec_from_json(v) for k, v in json.loads(text).items()}
