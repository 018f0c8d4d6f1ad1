"""Feedback shift register program counters.

Counter algebra, GF(2) maximal-cycle search, the five FSR families, hybrid
radix-2/FSR program counters, an FSR-aware program mapper, an instruction
cache model, a fitted latency model and Verilog emission.
"""

from .cachesim import CacheConfig, SimReport, compare, reports_csv, simulate, simulate_trace
from .counter import (CounterState, ModNSpec, Radix2Spec, cycle_length, find_cycle,
                      is_n_cyclic, iso_index, offset_add, step, step_n)
from .errors import (DescriptionError, FetchError, FsrpcError, MappingError,
                     NotOnCycleError, SpecError, WidthMismatchError)
from .fsr import (Family, FsrSpec, StructuralMetrics, build_counter, canonical_specs,
                  find_maximal, metrics, nonzero_period, spec_poly, transition_matrix)
from .gf2 import Gf2Matrix, Gf2Poly, char_poly, factorize, is_irreducible, is_primitive, parse_poly
from .hdl import emit, emit_testbench, write_files
from .hybrid import HybridSpec, Segment, default_pc, hybrid_period, hybrid_step, skipped_lines
from .mapper import (LinearProgram, MemoryImage, ProcessorDescription, emit_image, fetch_trace,
                     load_description, map_program, parse_description, parse_program)
from .perf import LatencyModel, crossover_table, estimate

__version__ = "0.1.0"

__all__ = [
    "CacheConfig", "SimReport", "compare", "reports_csv", "simulate", "simulate_trace",
    "CounterState", "ModNSpec", "Radix2Spec", "cycle_length", "find_cycle", "is_n_cyclic",
    "iso_index", "offset_add", "step", "step_n",
    "DescriptionError", "FetchError", "FsrpcError", "MappingError", "NotOnCycleError",
    "SpecError", "WidthMismatchError",
    "Family", "FsrSpec", "StructuralMetrics", "build_counter", "canonical_specs", "find_maximal",
    "metrics", "nonzero_period", "spec_poly", "transition_matrix",
    "Gf2Matrix", "Gf2Poly", "char_poly", "factorize", "is_irreducible", "is_primitive", "parse_poly",
    "emit", "emit_testbench", "write_files",
    "HybridSpec", "Segment", "default_pc", "hybrid_period", "hybrid_step", "skipped_lines",
    "LinearProgram", "MemoryImage", "ProcessorDescription", "emit_image", "fetch_trace",
    "load_description", "map_program", "parse_description", "parse_program",
    "LatencyModel", "crossover_table", "estimate",
]
