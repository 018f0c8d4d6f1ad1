"""Fitted counter latency model.

Radix-2 counters: latency grows with the carry chain, intercept + slope*N.
FSR counters: a constant, since the next-state logic is one XOR level
whatever the width.  Hybrids sit a fixed offset above the FSR constant.

Every figure is an estimate from a published Spartan-3 / ISE 9.2 fit and is
labelled as such; nothing here is a measurement.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, replace

__all__ = ["LatencyModel", "Estimate", "estimate", "crossover_table",
           "load_coefficients", "model_from_env", "latency_rows", "rows_to_text", "crossover_to_text",
           "PROVENANCE", "FIT_MIN_WIDTH", "COEFFS_ENV"]

PROVENANCE = "estimate: Spartan-3, ISE 9.2 fit"
FIT_MIN_WIDTH = 7
COEFFS_ENV = "FSRPC_COEFFS"
KINDS = ("radix2", "fsr", "hybrid")


@dataclass(frozen=True)
class LatencyModel:
    intercept_ns: float = 2.9
    slope_ns_per_bit: float = 0.064
    fsr_constant_ns: float = 1.8
    hybrid_offset_ns: float = 0.0
    provenance: str = PROVENANCE

    def __post_init__(self):
        for name in ("intercept_ns", "slope_ns_per_bit", "fsr_constant_ns", "hybrid_offset_ns"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)):
                raise TypeError(f"{name} must be a number")
        if self.fsr_constant_ns <= 0 or self.fsr_constant_ns + self.hybrid_offset_ns <= 0:
            raise ValueError("FSR and hybrid latencies must be positive")
        if self.intercept_ns + 2 * self.slope_ns_per_bit <= 0 or \
                self.intercept_ns + 64 * self.slope_ns_per_bit <= 0:
            raise ValueError("radix-2 latency must be positive for widths 2..64")


@dataclass(frozen=True)
class Estimate:
    kind: str
    width: int
    latency_ns: float
    in_fit_range: bool
    provenance: str

    def __float__(self):
        return self.latency_ns


def estimate(model, kind, width):
    if kind not in KINDS:
        raise ValueError(f"unknown latency model kind {kind!r}; expected one of {KINDS}")
    if isinstance(width, bool) or not isinstance(width, int) or not 2 <= width <= 64:
        raise ValueError(f"width must be an integer in [2, 64], got {width!r}")
    if kind == "radix2":
        ns = model.intercept_ns + model.slope_ns_per_bit * width
        in_fit = width >= FIT_MIN_WIDTH
    elif kind == "fsr":
        ns, in_fit = model.fsr_constant_ns, True
    else:
        ns, in_fit = model.fsr_constant_ns + model.hybrid_offset_ns, True
    return Estimate(kind, width, ns, in_fit, model.provenance)


def crossover_table(widths, model=None):
    """Rows (N, radix2_ns, fsr_ns, ratio) in the given width order."""
    model = model or LatencyModel()
    rows = []
    for n in widths:
        r = estimate(model, "radix2", n).latency_ns
        f = estimate(model, "fsr", n).latency_ns
        rows.append((n, r, f, r / f))
    return rows


_KEYS = {
    "intercept": "intercept_ns", "intercept_ns": "intercept_ns",
    "slope": "slope_ns_per_bit", "slope_ns_per_bit": "slope_ns_per_bit",
    "fsr_constant": "fsr_constant_ns", "fsr_constant_ns": "fsr_constant_ns",
    "hybrid_offset": "hybrid_offset_ns", "hybrid_offset_ns": "hybrid_offset_ns",
    "provenance": "provenance",
}


def load_coefficients(text, base=None):
    """Override coefficients from ``key=value`` lines (``#`` comments allowed)."""
    base = base or LatencyModel()
    changes = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _KEYS:
            raise ValueError(f"line {lineno}: unknown coefficient {key!r}")
        field = _KEYS[key]
        if field == "provenance":
            changes[field] = value
        else:
            try:
                changes[field] = float(value)
            except ValueError:
                raise ValueError(f"line {lineno}: {key} is not a number: {value!r}") from None
    if changes and "provenance" not in changes:
        changes["provenance"] = "user coefficients"
    return replace(base, **changes)


def model_from_env(path=None):
    path = path or os.environ.get(COEFFS_ENV)
    if not path:
        return LatencyModel()
    with open(path, encoding="utf-8") as fh:
        return load_coefficients(fh.read())


def latency_rows(widths, model=None, kinds=KINDS):
    """Long-format rows (N, model, latency_ns, in_fit_range, provenance)."""
    model = model or LatencyModel()
    out = []
    for n in widths:
        for k in kinds:
            e = estimate(model, k, n)
            out.append((n, k, e.latency_ns, e.in_fit_range, e.provenance))
    return out


def rows_to_text(rows, delimiter=","):
    buf = io.StringIO()
    w = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    w.writerow(["N", "model", "latency_ns", "in_fit_range", "provenance"])
    for n, k, ns, fit, prov in rows:
        w.writerow([n, k, f"{ns:.6g}", "yes" if fit else "no", prov])
    return buf.getvalue()


def crossover_to_text(rows, model=None, delimiter=","):
    model = model or LatencyModel()
    buf = io.StringIO()
    w = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    w.writerow(["N", "radix2_ns", "fsr_ns", "ratio", "provenance"])
    for n, r, f, ratio in rows:
        w.writerow([n, f"{r:.6g}", f"{f:.6g}", f"{ratio:.6f}", model.provenance])
    return buf.getvalue()
