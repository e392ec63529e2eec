"""Reference implementations kept deliberately naive and separate from the engine.

They share no code with :mod:`prime_engine` or the float interval path and are
used only to cross-check them.
"""
from __future__ import annotations

import math

import mpmath
import numpy as np

from . import formula_lib as fl
from .interval import HPInterval, Interval, hp_precision

ORACLE_BITS = 170  # a little over 50 decimal digits


def trial_division_primes(lo: int, hi: int) -> list[int]:
    """Primes in ``[lo, hi)`` by trial division."""
    out = []
    for m in range(max(lo, 2), hi):
        if all(m % d for d in range(2, math.isqrt(m) + 1)):
            out.append(m)
    return out


def bytearray_sieve(limit: int) -> bytearray:
    """Plain Eratosthenes flags for ``0 <= m < limit`` (1 = prime)."""
    flags = bytearray([1]) * limit
    flags[0:2] = b"\x00\x00"[: min(2, limit)]
    for d in range(2, math.isqrt(max(limit - 1, 0)) + 1):
        if flags[d]:
            flags[d * d :: d] = bytes(len(range(d * d, limit, d)))
    return flags


def primes_below(limit: int) -> np.ndarray:
    return np.flatnonzero(np.frombuffer(bytes(bytearray_sieve(limit)), dtype=np.uint8)).astype(np.int64)


def windowed_primes(lo: int, hi: int) -> list[int]:
    """Primes in ``[lo, hi)`` by sieving the window with base primes up to ``sqrt(hi)``."""
    base = primes_below(math.isqrt(hi) + 1)
    flags = bytearray([1]) * (hi - lo)
    for q in map(int, base):
        start = max(q * q, -(-lo // q) * q)
        flags[start - lo :: q] = bytes(len(range(start, hi, q)))
    return [lo + i for i, f in enumerate(flags) if f and lo + i >= 2]


def count_primes(limit: int, window: int = 10**7) -> int:
    """``pi(limit)`` by sieving ``[0, limit]`` in bytearray windows."""
    base = primes_below(math.isqrt(limit) + 1).tolist()
    total = 0
    for lo in range(0, limit + 1, window):
        hi = min(lo + window, limit + 1)
        flags = bytearray([1]) * (hi - lo)
        for q in base:
            if q * q >= hi:
                break
            start = max(q * q, -(-lo // q) * q)
            if start < hi:
                flags[start - lo :: q] = bytes(len(range(start, hi, q)))
        total += flags.count(1) - sum(1 for m in (0, 1) if lo <= m < hi)
    return total


def mp_theta(primes, dps: int = 50):
    """``sum log p`` at ``dps`` digits."""
    with mpmath.workdps(dps):
        return mpmath.fsum(mpmath.log(int(p)) for p in primes)


# ------------------------------------------------------ containment oracle
def sample_domain(fid: str, count: int, rng: np.random.Generator) -> np.ndarray:
    info = fl.FUNCTIONS[fid]
    lo, hi = info.domain
    if info.arity == "point":
        return rng.integers(max(lo, 3), 2**40, size=count)
    return rng.uniform(lo, hi, size=count)


def _hp_point_value(fid, n, p):
    return fl.FUNCTIONS[fid].fn(fl.HPPoint(int(n), int(p)))


def containment_failures(fid: str, count: int = 10_000, seed: int = 0) -> list:
    """Inputs whose high-precision value escapes the float enclosure.

    Each sample is evaluated once vectorized over :class:`Interval` and once
    pointwise over :class:`HPInterval` at :data:`ORACLE_BITS`; the oracle
    midpoint must lie inside the float enclosure.
    """
    info = fl.FUNCTIONS[fid]
    rng = np.random.default_rng(seed)
    xs = sample_domain(fid, count, rng)
    if info.arity == "point":
        # p only needs to be a plausible size for the formulas, not prime
        ps = (xs.astype(np.float64) * np.log(xs) * 1.1).astype(np.int64)
        from .prime_engine import PointBatch

        enc = info.fn(PointBatch(xs.astype(np.int64), ps))
        args = list(zip(xs.tolist(), ps.tolist()))
    elif info.arity == "bivariate":
        ts = np.minimum(xs + rng.uniform(0, 0.05, size=count), info.domain[1])
        enc = info.fn(Interval(xs), Interval(ts))
        args = list(zip(xs.tolist(), ts.tolist()))
    else:
        enc = info.fn(Interval(xs))
        args = [(x,) for x in xs.tolist()]
    lo, hi = np.asarray(enc.lo), np.asarray(enc.hi)
    bad = []
    with hp_precision(ORACLE_BITS):
        for k, a in enumerate(args):
            if info.arity == "point":
                v = _hp_point_value(fid, *a)
            else:
                v = info.fn(*(HPInterval(x) for x in a))
            mid = (v.lo + v.hi) / 2
            if not (lo[k] <= mid <= hi[k]):
                bad.append((a, float(lo[k]), float(mid), float(hi[k])))
    return bad
