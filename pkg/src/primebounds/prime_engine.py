"""Segmented prime sieve, running Chebyshev theta, and prime-point streams.

The sieve works on odd numbers only.  A segment with base ``b`` (even) and
``length`` bitmap bytes covers ``[b, b + 16*length)``; bit ``k`` stands for
``b + 2k + 1``.  Bits are held one per numpy ``bool`` for speed, so a
256 KiB logical bitmap occupies 2 MiB in memory.

Theta is accumulated exactly: every ``log p`` is enclosed by outward-rounded
floats, scaled by ``2**32`` and floored/ceiled to integers, and the integers
are summed with exact integer arithmetic.  The running interval therefore
does not depend on chunking, segment size, or worker count.
"""
from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterator

import numpy as np

from .interval import TRANSCENDENTAL_ULPS, Interval, _widen_down, _widen_up, log

__all__ = [
    "ArgumentError",
    "CapacityError",
    "PointBatch",
    "PrimeEngine",
    "PrimePoint",
    "SieveSegment",
    "ThetaAccumulator",
    "nth_prime",
    "prime_count",
    "read_checkpoints",
    "sieve_range",
    "simple_sieve",
    "stream_points",
]

DEFAULT_CEILING = 10**9
HARD_CAP = 2**63
DEFAULT_SEGMENT_BYTES = 256 * 1024
DEFAULT_CHECKPOINT_STRIDE = 10**6
THETA_SCALE_BITS = 32

_WHEEL_PRIMES = (3, 5, 7, 11, 13)
_WHEEL_PERIOD = 3 * 5 * 7 * 11 * 13


class CapacityError(ValueError):
    """A request needs primes beyond the configured ceiling."""


class ArgumentError(ValueError):
    """Malformed range or index."""


def simple_sieve(limit: int) -> np.ndarray:
    """All primes ``<= limit`` (plain sieve, used for base primes)."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


def _wheel_pattern() -> np.ndarray:
    k = np.arange(_WHEEL_PERIOD, dtype=np.int64)
    values = 2 * k + 1
    keep = np.ones(_WHEEL_PERIOD, dtype=bool)
    for p in _WHEEL_PRIMES:
        keep &= values % p != 0
    return keep


_WHEEL = _wheel_pattern()


@dataclass
class SieveSegment:
    base: int
    length: int
    bits: np.ndarray = field(repr=False)

    @property
    def end(self) -> int:
        return self.base + 2 * self.bits.size

    def primes(self) -> np.ndarray:
        out = np.flatnonzero(self.bits).astype(np.int64) * 2 + (self.base + 1)
        if self.base <= 2 < self.end:
            out = np.concatenate([np.array([2], dtype=np.int64), out])
        return out

    def count(self) -> int:
        return int(np.count_nonzero(self.bits)) + (1 if self.base <= 2 < self.end else 0)


def _sieve_segment(base: int, nbits: int, base_primes: np.ndarray) -> SieveSegment:
    """Sieve odd numbers ``base+1, base+3, ..., base+2*nbits-1``."""
    start = (base // 2) % _WHEEL_PERIOD
    if start + nbits <= _WHEEL_PERIOD:
        bits = _WHEEL[start : start + nbits].copy()
    else:
        bits = np.resize(np.roll(_WHEEL, -start), nbits)
    end = base + 2 * nbits
    if base == 0:
        bits[0] = False  # the number 1
    for p in _WHEEL_PRIMES:
        if base < p < end:
            bits[(p - base - 1) // 2] = True
    limit = math.isqrt(end - 1)
    ps = base_primes[(base_primes > _WHEEL_PRIMES[-1]) & (base_primes <= limit)]
    if ps.size:
        first = -(-(base + 1) // ps) * ps
        first += np.where(first % 2 == 0, ps, 0)
        first = np.maximum(first, ps * ps)
        offsets = (first - base - 1) // 2
        for p, off in zip(ps.tolist(), offsets.tolist()):
            if off < nbits:
                bits[off::p] = False
    return SieveSegment(base, -(-nbits // 8), bits)


def _log_enclosures(primes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    logs = np.log(primes.astype(np.float64))
    return _widen_down(logs, TRANSCENDENTAL_ULPS), _widen_up(logs, TRANSCENDENTAL_ULPS)


class ThetaAccumulator:
    """Exact running enclosure of ``sum(log p)``.

    ``lo_fixed``/``hi_fixed`` are integers in units of ``2**-32``; every
    increment is a floor/ceil of an outward-rounded ``log p``, so the
    integer sums bracket the true theta with no summation error at all.
    ``err_budget`` is the current half-width.
    """

    SCALE = float(2**THETA_SCALE_BITS)

    def __init__(self, lo_fixed: int = 0, hi_fixed: int = 0, count: int = 0):
        self.lo_fixed = int(lo_fixed)
        self.hi_fixed = int(hi_fixed)
        self.count = int(count)

    @classmethod
    def from_interval(cls, theta: Interval, count: int) -> ThetaAccumulator:
        lo = Fraction(float(theta.lo)) * 2**THETA_SCALE_BITS
        hi = Fraction(float(theta.hi)) * 2**THETA_SCALE_BITS
        return cls(math.floor(lo), math.ceil(hi), count)

    @property
    def sum(self) -> float:
        return (self.lo_fixed + self.hi_fixed) / 2 / self.SCALE

    @property
    def err_budget(self) -> float:
        return (self.hi_fixed - self.lo_fixed) / 2 / self.SCALE

    def add(self, primes: np.ndarray) -> Interval:
        """Add ``log p`` for each prime; return the running theta after each one."""
        primes = np.asarray(primes, dtype=np.int64)
        if primes.size == 0:
            return Interval(np.zeros(0))
        lo, hi = _log_enclosures(primes)
        lo_steps = np.floor(lo * self.SCALE).astype(np.int64)
        hi_steps = np.ceil(hi * self.SCALE).astype(np.int64)
        lo_run = np.cumsum(lo_steps)
        hi_run = np.cumsum(hi_steps)
        out = Interval(
            self._to_float(self.lo_fixed, lo_run, downward=True),
            self._to_float(self.hi_fixed, hi_run, downward=False),
        )
        self.lo_fixed += int(lo_run[-1])
        self.hi_fixed += int(hi_run[-1])
        self.count += primes.size
        return out

    def _to_float(self, carry: int, run: np.ndarray, downward: bool) -> np.ndarray:
        # three roundings, each at most half an ulp of the (nonnegative) total
        total = float(carry) + run.astype(np.float64)
        if downward:
            total = np.maximum(_widen_down(total, 2), 0.0)
        else:
            total = _widen_up(total, 2)
        return total / self.SCALE

    def interval(self) -> Interval:
        lo = self._to_float(self.lo_fixed, np.zeros(1, dtype=np.int64), True)[0]
        hi = self._to_float(self.hi_fixed, np.zeros(1, dtype=np.int64), False)[0]
        return Interval(lo, hi)


@dataclass(frozen=True)
class PrimePoint:
    """One sample: the ``n``-th prime with ``w = log log n``, ``y = log n``, ``z = log p``."""

    n: int
    p: int
    w: Interval
    y: Interval
    z: Interval
    theta: Interval | None = None


class PointBatch:
    """Vectorized run of consecutive prime points (same attributes as :class:`PrimePoint`)."""

    def __init__(self, n: np.ndarray, p: np.ndarray, theta: Interval | None = None):
        self.n = np.asarray(n, dtype=np.int64)
        self.p = np.asarray(p, dtype=np.int64)
        self.theta = theta
        self.y = log(Interval(self.n.astype(np.float64)))
        self.w = log(self.y)
        self.z = log(Interval(self.p.astype(np.float64)))

    def __len__(self):
        return self.n.size

    def select(self, mask) -> PointBatch:
        out = object.__new__(PointBatch)
        out.n, out.p = self.n[mask], self.p[mask]
        out.y, out.w, out.z = self.y[mask], self.w[mask], self.z[mask]
        out.theta = None if self.theta is None else self.theta[mask]
        return out

    def point(self, i: int) -> PrimePoint:
        return PrimePoint(
            int(self.n[i]), int(self.p[i]), self.w[i], self.y[i], self.z[i],
            None if self.theta is None else self.theta[i],
        )

    def points(self) -> Iterator[PrimePoint]:
        for i in range(len(self)):
            yield self.point(i)


def _segment_block_stats(args):
    """Worker: (count, theta_lo_fixed, theta_hi_fixed) for one value block."""
    lo, hi, segment_bytes = args
    engine = PrimeEngine(ceiling=max(hi, 2), segment_bytes=segment_bytes)
    count = 0
    acc = ThetaAccumulator()
    for seg in engine.iter_segments(lo, hi):
        primes = seg.primes()
        primes = primes[(primes >= lo) & (primes < hi)]
        count += primes.size
        if primes.size:
            acc.add(primes)
    return count, acc.lo_fixed, acc.hi_fixed


class PrimeEngine:
    """Prime generation bounded by a configurable ceiling on prime values."""

    def __init__(
        self,
        ceiling: int = DEFAULT_CEILING,
        segment_bytes: int = DEFAULT_SEGMENT_BYTES,
        workers: int = 1,
        checkpoint_stride: int = DEFAULT_CHECKPOINT_STRIDE,
    ):
        if not 2 <= ceiling <= HARD_CAP:
            raise CapacityError(f"ceiling {ceiling} outside [2, 2**63]")
        if segment_bytes < 1:
            raise ArgumentError("segment_bytes must be positive")
        if workers < 1:
            raise ArgumentError("workers must be >= 1")
        self.ceiling = int(ceiling)
        self.segment_bytes = int(segment_bytes)
        self.workers = int(workers)
        self.checkpoint_stride = int(checkpoint_stride)
        self._base_primes = simple_sieve(math.isqrt(self.ceiling) + 1)
        self._pi_ceiling: int | None = None

    # ------------------------------------------------------------ segments
    def iter_segments(self, lo: int, hi: int) -> Iterator[SieveSegment]:
        """Segments covering ``[lo, hi)``; bases aligned to even numbers."""
        nbits = 8 * self.segment_bytes
        base = lo - (lo % 2)
        while base < hi:
            span = min(nbits, (hi - base + 1) // 2)
            yield _sieve_segment(base, span, self._base_primes)
            base += 2 * span

    def _check_value(self, x: int):
        if x > self.ceiling + 1:
            raise CapacityError(f"{x} exceeds the sieve ceiling {self.ceiling}")

    # ------------------------------------------------------------ queries
    def sieve_range(self, lo: int, hi: int) -> np.ndarray:
        if lo < 0 or lo > hi:
            raise ArgumentError(f"invalid range [{lo}, {hi})")
        if hi > self.ceiling:
            raise CapacityError(f"range end {hi} exceeds the sieve ceiling {self.ceiling}")
        parts = []
        for seg in self.iter_segments(lo, hi):
            ps = seg.primes()
            parts.append(ps[(ps >= lo) & (ps < hi)])
        return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)

    def prime_count(self, x: int) -> int:
        if x < 0:
            raise ArgumentError("x must be non-negative")
        if x > self.ceiling:
            raise CapacityError(f"{x} exceeds the sieve ceiling {self.ceiling}")
        total = 0
        for seg in self.iter_segments(0, x + 1):
            if seg.end <= x + 1:
                total += seg.count()
            else:
                ps = seg.primes()
                total += int(np.count_nonzero(ps <= x))
        return total

    def pi_ceiling(self) -> int:
        if self._pi_ceiling is None:
            self._pi_ceiling = self.prime_count(self.ceiling)
        return self._pi_ceiling

    def nth_prime(self, n: int) -> int:
        if n < 1:
            raise ArgumentError("prime index must be >= 1")
        seen = 0
        for seg in self.iter_segments(0, self.ceiling + 1):
            c = seg.count()
            if seen + c >= n:
                ps = seg.primes()
                p = int(ps[n - seen - 1])
                if p > self.ceiling:
                    break
                return p
            seen += c
        raise CapacityError(f"p_{n} exceeds the sieve ceiling {self.ceiling}")

    # ------------------------------------------------------------ streams
    def _value_bound(self, n: int) -> int:
        """Upper bound for ``p_n`` (p_n < n(log n + log log n) for n >= 6)."""
        if n < 6:
            return 14
        ln = math.log(n)
        return min(self.ceiling + 1, int(n * (ln + math.log(ln))) + 2)

    def iter_batches(
        self,
        n_lo: int,
        n_hi: int,
        theta: bool = True,
        checkpoint_path: str | os.PathLike | None = None,
        resume: bool = False,
    ) -> Iterator[PointBatch]:
        """Consecutive :class:`PointBatch` objects covering indices ``[n_lo, n_hi]``.

        Theta is seeded from index 1 (or from the last checkpoint strictly below
        ``n_lo`` when resuming).
        """
        if n_lo < 1 or n_lo > n_hi:
            raise ArgumentError(f"invalid index range [{n_lo}, {n_hi}]")
        start_value, index, acc = 0, 0, ThetaAccumulator()
        if resume and checkpoint_path is not None and Path(checkpoint_path).exists():
            usable = [c for c in read_checkpoints(checkpoint_path) if c[0] < n_lo]
            if usable:
                n0, p0, th = usable[-1]
                start_value, index = p0 + 1, n0
                acc = ThetaAccumulator.from_interval(th, n0)
        writer = None
        if checkpoint_path is not None:
            writer = _CheckpointWriter(checkpoint_path, self.checkpoint_stride, append=resume)
        try:
            index = yield from self._iter_block(
                start_value, self._value_bound(n_hi), index, acc, n_lo, n_hi, theta, writer
            )
        finally:
            if writer is not None:
                writer.close()
        if index < n_hi:
            raise CapacityError(f"p_{n_hi} exceeds the sieve ceiling {self.ceiling}")

    def _iter_block(self, start_value, stop_value, index, acc, n_lo, n_hi, theta, writer=None):
        for seg in self.iter_segments(start_value, stop_value):
            if index >= n_hi:
                break
            ps = seg.primes()
            ps = ps[(ps >= start_value) & (ps < stop_value)]
            if ps.size == 0:
                continue
            ns = np.arange(index + 1, index + 1 + ps.size, dtype=np.int64)
            th = acc.add(ps) if theta else None
            index += ps.size
            if writer is not None and th is not None:
                writer.feed(ns, ps, th)
            a = int(np.searchsorted(ns, n_lo))
            b = int(np.searchsorted(ns, n_hi, side="right"))
            if a < b:
                yield PointBatch(ns[a:b], ps[a:b], None if th is None else th[a:b])
        return index

    def _block_edges(self, value_hi: int, k: int) -> list[int]:
        step = 16 * self.segment_bytes
        nseg = -(-value_hi // step)
        per = -(-nseg // k)
        return [min(j * per * step, value_hi) for j in range(k)] + [value_hi]

    def stream_points(self, n_lo: int, n_hi: int, theta: bool = True, **kw) -> Iterator[PrimePoint]:
        if n_lo < 2:
            raise ArgumentError("stream_points requires n_lo >= 2")
        for batch in self.iter_batches(n_lo, n_hi, theta=theta, **kw):
            yield from batch.points()

    def map_blocks(self, fn, n_lo: int, n_hi: int, theta: bool = True, **kw) -> list:
        """Apply ``fn(batch_iterator)`` per value block, in parallel when workers > 1.

        A first parallel pass counts primes and sums theta per block; the exact
        prefix (index, theta integers) is handed to each block for the second
        pass.  Results come back ordered by block.  Checkpoint keywords are
        forwarded to :meth:`iter_batches` in the serial case only.
        """
        if n_lo < 1 or n_lo > n_hi:
            raise ArgumentError(f"invalid index range [{n_lo}, {n_hi}]")
        if self.workers == 1:
            return [fn(self.iter_batches(n_lo, n_hi, theta=theta, **kw))]
        k = self.workers
        edges = self._block_edges(self._value_bound(n_hi), k)
        with ProcessPoolExecutor(max_workers=k) as pool:
            stats = list(pool.map(_segment_block_stats, [(edges[j], edges[j + 1], self.segment_bytes) for j in range(k)]))
            if sum(c for c, _, _ in stats) < n_hi:
                raise CapacityError(f"p_{n_hi} exceeds the sieve ceiling {self.ceiling}")
            jobs, index, lo_f, hi_f = [], 0, 0, 0
            for j in range(k):
                jobs.append((self.ceiling, self.segment_bytes, edges[j], edges[j + 1], index, lo_f, hi_f, n_lo, n_hi, theta, fn))
                c, a, b = stats[j]
                index, lo_f, hi_f = index + c, lo_f + a, hi_f + b
            return list(pool.map(_run_block, jobs))


def _run_block(args):
    ceiling, segment_bytes, v0, v1, index, lo_f, hi_f, n_lo, n_hi, theta, fn = args
    engine = PrimeEngine(ceiling=ceiling, segment_bytes=segment_bytes)
    acc = ThetaAccumulator(lo_f, hi_f, index)
    return fn(engine._iter_block(v0, v1, index, acc, n_lo, n_hi, theta))


# ---------------------------------------------------------------- checkpoints
class _CheckpointWriter:
    def __init__(self, path, stride: int, append: bool = False):
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        self._fh = open(path, "a" if append else "w", newline="")
        self._w = csv.writer(self._fh)
        self.stride = stride

    def feed(self, ns: np.ndarray, ps: np.ndarray, th: Interval):
        hit = np.flatnonzero(ns % self.stride == 0)
        for i in hit.tolist():
            self._w.writerow([int(ns[i]), int(ps[i]), float(th.lo[i]).hex(), float(th.hi[i]).hex()])

    def close(self):
        self._fh.close()


def read_checkpoints(path) -> list[tuple[int, int, Interval]]:
    """Parse ``n,p_n,theta_lo_hex,theta_hi_hex`` lines."""
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            n, p, lo, hi = row
            rows.append((int(n), int(p), Interval(float.fromhex(lo), float.fromhex(hi))))
    return rows


# ------------------------------------------------------- module-level API
_DEFAULT: PrimeEngine | None = None


def default_engine() -> PrimeEngine:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = PrimeEngine()
    return _DEFAULT


def sieve_range(lo: int, hi: int) -> np.ndarray:
    return default_engine().sieve_range(lo, hi)


def nth_prime(n: int) -> int:
    return default_engine().nth_prime(n)


def prime_count(x: int) -> int:
    return default_engine().prime_count(x)


def stream_points(n_lo: int, n_hi: int, **kw) -> Iterator[PrimePoint]:
    return default_engine().stream_points(n_lo, n_hi, **kw)
