"""Outward-rounded interval arithmetic.

Three carriers share one operator vocabulary so that every formula in
:mod:`primebounds.formula_lib` can be written once and evaluated with any of
them:

* :class:`Interval` -- binary64 endpoints held in numpy arrays (vectorized).
  Each basic operation is computed in round-to-nearest and then pushed one
  ulp outward with ``nextafter``, which encloses the exact result because the
  IEEE operations are correctly rounded.  ``exp``/``log`` come from numpy and
  are widened by two ulps on each side (their measured error is below one ulp).
* :class:`Jet` -- a first-order derivative jet over :class:`Interval`, used to
  enclose derivatives for monotonicity and mean-value tests.
* :class:`HPInterval` -- a scalar wrapper around ``mpmath.iv`` at a selectable
  precision, the escalation and oracle backend.

Constants enter formulas as :class:`fractions.Fraction` (or ``int``) and are
converted to enclosing intervals on demand.
"""
from __future__ import annotations

import contextlib
import functools
from fractions import Fraction
from numbers import Rational

import mpmath
import numpy as np

__all__ = [
    "DomainError",
    "HPInterval",
    "Interval",
    "Jet",
    "exp",
    "hp_precision",
    "log",
]

_INF = np.inf
_EXACT_INT = 2**53
TRANSCENDENTAL_ULPS = 2


class DomainError(ValueError):
    """Raised when an enclosure leaves the domain of a function."""


def _down(a):
    return np.nextafter(a, -_INF)


def _up(a):
    return np.nextafter(a, _INF)


def _widen_down(a, ulps):
    with np.errstate(invalid="ignore"):
        out = _down(a - ulps * np.spacing(np.abs(a)))
    return np.where(np.isfinite(a), out, a)


def _widen_up(a, ulps):
    with np.errstate(invalid="ignore"):
        out = _up(a + ulps * np.spacing(np.abs(a)))
    return np.where(np.isfinite(a), out, a)


@functools.lru_cache(maxsize=4096)
def _rational_bounds(value: Fraction) -> tuple[float, float]:
    f = float(value)  # correctly rounded
    exact = Fraction(f)
    if exact == value:
        return f, f
    if exact < value:
        return f, float(np.nextafter(f, _INF))
    return float(np.nextafter(f, -_INF)), f


def _as_interval(other) -> Interval:
    if isinstance(other, Interval):
        return other
    if isinstance(other, (bool, np.bool_)):
        raise TypeError("booleans are not numbers here")
    if isinstance(other, (int, np.integer)):
        if abs(int(other)) <= _EXACT_INT:
            return Interval(float(other))
        return Interval(*_rational_bounds(Fraction(int(other))))
    if isinstance(other, Rational):
        return Interval(*_rational_bounds(Fraction(other)))
    if isinstance(other, (float, np.floating)):
        return Interval(float(other))
    if isinstance(other, np.ndarray):
        if other.dtype.kind in "iu":
            if other.size and int(np.abs(other).max()) > _EXACT_INT:
                raise ValueError("integer array exceeds exactly representable range")
            return Interval(other.astype(np.float64))
        return Interval(other)
    return NotImplemented


class Interval:
    """A closed interval ``[lo, hi]`` (elementwise when the endpoints are arrays).

    A plain ``float`` or float array passed as ``lo`` is taken as an exact
    point; use :meth:`enclose` for decimal or rational constants.
    """

    __slots__ = ("lo", "hi")
    __array_priority__ = 1000  # keep numpy from broadcasting over us

    def __init__(self, lo, hi=None):
        self.lo = np.asarray(lo, dtype=np.float64)
        self.hi = self.lo if hi is None else np.asarray(hi, dtype=np.float64)

    @classmethod
    def enclose(cls, value) -> Interval:
        """Tightest binary64 interval containing an exact int/Fraction/decimal string."""
        if isinstance(value, str):
            value = Fraction(value)
        result = _as_interval(value)
        if result is NotImplemented:
            raise TypeError(f"cannot enclose {type(value).__name__}")
        return result

    # ----------------------------------------------------------- inspection
    @property
    def shape(self):
        return np.broadcast_shapes(self.lo.shape, self.hi.shape)

    def __len__(self):
        return self.shape[0]

    def __getitem__(self, idx) -> Interval:
        lo, hi = np.broadcast_arrays(self.lo, self.hi)
        return Interval(lo[idx], hi[idx])

    @property
    def mid(self):
        return 0.5 * self.lo + 0.5 * self.hi

    @property
    def width(self):
        return self.hi - self.lo

    def contains(self, value) -> np.ndarray:
        """Elementwise ``lo <= value <= hi`` for an exact value (Fraction, int, mpf)."""
        if isinstance(value, (Fraction, int)):
            v = Interval.enclose(value)
            return (self.lo <= v.lo) & (v.hi <= self.hi)
        return (self.lo <= value) & (value <= self.hi)

    def is_nonnegative(self) -> np.ndarray:
        return self.lo >= 0

    def is_positive(self) -> np.ndarray:
        return self.lo > 0

    def is_negative(self) -> np.ndarray:
        return self.hi < 0

    def hull(self, other) -> Interval:
        o = _as_interval(other)
        return Interval(np.minimum(self.lo, o.lo), np.maximum(self.hi, o.hi))

    def __repr__(self):
        if self.lo.ndim == 0 and self.hi.ndim == 0:
            return f"Interval({float(self.lo)!r}, {float(self.hi)!r})"
        return f"Interval(shape={self.shape})"

    # ----------------------------------------------------------- arithmetic
    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __pos__(self):
        return self

    def __add__(self, other):
        o = _as_interval(other)
        if o is NotImplemented:
            return NotImplemented
        return Interval(_down(self.lo + o.lo), _up(self.hi + o.hi))

    __radd__ = __add__

    def __sub__(self, other):
        o = _as_interval(other)
        if o is NotImplemented:
            return NotImplemented
        return Interval(_down(self.lo - o.hi), _up(self.hi - o.lo))

    def __rsub__(self, other):
        o = _as_interval(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = _as_interval(other)
        if o is NotImplemented:
            return NotImplemented
        if o.lo.ndim == 0 and o.lo == o.hi:
            # point factor: two products suffice
            c = o.lo
            a, b = self.lo * c, self.hi * c
            lo, hi = (a, b) if c >= 0 else (b, a)
            return Interval(_down(lo), _up(hi))
        with np.errstate(invalid="ignore"):
            p1, p2 = self.lo * o.lo, self.lo * o.hi
            p3, p4 = self.hi * o.lo, self.hi * o.hi
        lo = np.minimum(np.minimum(p1, p2), np.minimum(p3, p4))
        hi = np.maximum(np.maximum(p1, p2), np.maximum(p3, p4))
        return Interval(_down(lo), _up(hi))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _as_interval(other)
        if o is NotImplemented:
            return NotImplemented
        with np.errstate(divide="ignore", invalid="ignore"):
            q1, q2 = self.lo / o.lo, self.lo / o.hi
            q3, q4 = self.hi / o.lo, self.hi / o.hi
        lo = np.minimum(np.minimum(q1, q2), np.minimum(q3, q4))
        hi = np.maximum(np.maximum(q1, q2), np.maximum(q3, q4))
        spans_zero = (o.lo <= 0) & (o.hi >= 0)
        lo = np.where(spans_zero, -_INF, _down(lo))
        hi = np.where(spans_zero, _INF, _up(hi))
        return Interval(lo, hi)

    def __rtruediv__(self, other):
        o = _as_interval(other)
        if o is NotImplemented:
            return NotImplemented
        return o / self

    def sqr(self) -> Interval:
        a, b = self.lo * self.lo, self.hi * self.hi
        straddle = (self.lo < 0) & (self.hi > 0)
        lo = np.where(straddle, 0.0, _down(np.minimum(a, b)))
        hi = _up(np.maximum(a, b))
        return Interval(np.maximum(lo, 0.0), hi)

    def __pow__(self, k):
        if not isinstance(k, (int, np.integer)) or k < 0:
            raise TypeError("only non-negative integer powers are supported")
        k = int(k)
        if k == 0:
            return Interval(np.ones(self.shape))
        if k == 1:
            return self
        half = self ** (k // 2)
        sq = half.sqr()
        return sq * self if k % 2 else sq


# --------------------------------------------------------------------- jets
def _lift(other):
    if isinstance(other, Jet):
        return other
    iv = _as_interval(other)
    if iv is NotImplemented:
        return NotImplemented
    return Jet(iv, Interval(0.0))


class Jet:
    """Value and first derivative, both as :class:`Interval` enclosures."""

    __slots__ = ("v", "d")

    def __init__(self, v: Interval, d: Interval):
        self.v = v
        self.d = d

    @classmethod
    def variable(cls, x) -> Jet:
        x = _as_interval(x)
        return cls(x, Interval(np.ones(x.shape)))

    def __repr__(self):
        return f"Jet(v={self.v!r}, d={self.d!r})"

    def __neg__(self):
        return Jet(-self.v, -self.d)

    def __add__(self, other):
        o = _lift(other)
        if o is NotImplemented:
            return NotImplemented
        return Jet(self.v + o.v, self.d + o.d)

    __radd__ = __add__

    def __sub__(self, other):
        o = _lift(other)
        if o is NotImplemented:
            return NotImplemented
        return Jet(self.v - o.v, self.d - o.d)

    def __rsub__(self, other):
        o = _lift(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = _lift(other)
        if o is NotImplemented:
            return NotImplemented
        return Jet(self.v * o.v, self.d * o.v + self.v * o.d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _lift(other)
        if o is NotImplemented:
            return NotImplemented
        q = self.v / o.v
        return Jet(q, (self.d - q * o.d) / o.v)

    def __rtruediv__(self, other):
        o = _lift(other)
        if o is NotImplemented:
            return NotImplemented
        return o / self

    def __pow__(self, k):
        if not isinstance(k, (int, np.integer)) or k < 0:
            raise TypeError("only non-negative integer powers are supported")
        k = int(k)
        if k == 0:
            return Jet(Interval(np.ones(self.v.shape)), Interval(np.zeros(self.v.shape)))
        return Jet(self.v**k, k * (self.v ** (k - 1)) * self.d)


# ------------------------------------------------------- high precision
@contextlib.contextmanager
def hp_precision(bits: int):
    """Temporarily set the working precision of :class:`HPInterval` (in bits)."""
    old = mpmath.iv.prec
    mpmath.iv.prec = bits
    try:
        yield
    finally:
        mpmath.iv.prec = old


def _to_iv(other):
    iv = mpmath.iv
    if isinstance(other, HPInterval):
        return other.x
    if isinstance(other, Interval):
        return iv.mpf([float(other.lo), float(other.hi)])
    if isinstance(other, (int, np.integer)):
        return iv.mpf(int(other))
    if isinstance(other, Rational):
        other = Fraction(other)
        return iv.mpf(other.numerator) / iv.mpf(other.denominator)
    if isinstance(other, (float, np.floating)):
        return iv.mpf(float(other))
    return NotImplemented


class HPInterval:
    """Scalar interval in ``mpmath.iv`` at the precision set by :func:`hp_precision`."""

    __slots__ = ("x",)

    def __init__(self, value):
        x = _to_iv(value)
        if x is NotImplemented:
            x = mpmath.iv.mpf(value)
        self.x = x

    @property
    def lo(self):
        return self.x.a

    @property
    def hi(self):
        return self.x.b

    def __repr__(self):
        return f"HPInterval({self.x})"

    def _wrap(self, other, fn):
        o = _to_iv(other)
        if o is NotImplemented:
            return NotImplemented
        return HPInterval(fn(self.x, o))

    def __neg__(self):
        return HPInterval(-self.x)

    def __add__(self, other):
        return self._wrap(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._wrap(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._wrap(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._wrap(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._wrap(other, lambda a, b: b / a)

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise TypeError("only non-negative integer powers are supported")
        return HPInterval(self.x**k)


# ------------------------------------------------------------ functions
@functools.singledispatch
def exp(x):
    raise TypeError(f"exp not defined for {type(x).__name__}")


@exp.register
def _(x: Interval):
    with np.errstate(over="ignore"):
        lo = np.maximum(_widen_down(np.exp(x.lo), TRANSCENDENTAL_ULPS), 0.0)
        hi = _widen_up(np.exp(x.hi), TRANSCENDENTAL_ULPS)
    return Interval(lo, hi)


@exp.register
def _(x: Jet):
    e = exp(x.v)
    return Jet(e, e * x.d)


@exp.register
def _(x: HPInterval):
    return HPInterval(mpmath.iv.exp(x.x))


@functools.singledispatch
def log(x):
    raise TypeError(f"log not defined for {type(x).__name__}")


@log.register
def _(x: Interval):
    with np.errstate(divide="ignore", invalid="ignore"):
        lo = np.where(x.lo > 0, _widen_down(np.log(np.maximum(x.lo, 0.0)), TRANSCENDENTAL_ULPS), -_INF)
        hi = np.where(x.hi > 0, _widen_up(np.log(np.maximum(x.hi, 0.0)), TRANSCENDENTAL_ULPS), np.nan)
    return Interval(lo, hi)


@log.register
def _(x: Jet):
    return Jet(log(x.v), x.d / x.v)


@log.register
def _(x: HPInterval):
    if x.x.a <= 0:
        raise DomainError("log argument enclosure is not positive")
    return HPInterval(mpmath.iv.log(x.x))


def lower_bound(x):
    """Lower endpoint of any carrier, as float (Interval) or mpf (HPInterval)."""
    if isinstance(x, Jet):
        return x.v.lo
    return x.lo


def upper_bound(x):
    if isinstance(x, Jet):
        return x.v.hi
    return x.hi
