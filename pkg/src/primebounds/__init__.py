"""Explicit bounds for the n-th prime: sieve-backed range checks and interval grid certification."""
from .bound_catalog import BoundSpec, check_bound, eval_bound, make_point
from .formula_lib import CONSTANTS, FUNCTIONS, POLYS, Poly
from .grid_verifier import GridReport, GridSpec, run_grid, tail_scan
from .interval import DomainError, HPInterval, Interval, Jet, exp, log
from .prime_engine import (
    ArgumentError,
    CapacityError,
    PrimeEngine,
    PrimePoint,
    nth_prime,
    prime_count,
    sieve_range,
    stream_points,
)
from .range_verifier import VerificationReport, find_min_threshold, verify_range

__version__ = "0.1.0"

__all__ = [
    "ArgumentError", "BoundSpec", "CONSTANTS", "CapacityError", "DomainError", "FUNCTIONS", "GridReport",
    "GridSpec", "HPInterval", "Interval", "Jet", "POLYS", "Poly", "PrimeEngine", "PrimePoint",
    "VerificationReport", "check_bound", "eval_bound", "exp", "find_min_threshold", "log", "make_point",
    "nth_prime", "prime_count", "run_grid", "sieve_range", "stream_points", "tail_scan", "verify_range",
]
