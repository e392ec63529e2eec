"""Registry of explicit inequalities for ``p_n`` and ``theta(p_n)``.

Each :class:`BoundSpec` carries an expression ``expr(pt)`` for the right-hand
side, written over the shared operator vocabulary so it evaluates on a single
:class:`PrimePoint`, a vectorized :class:`PointBatch`, or an escalated
:class:`HPPoint`.  Margins are signed so that a nonnegative (or positive, for
strict entries) margin means the inequality holds.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .formula_lib import HPPoint
from .interval import Interval, log

Q = Fraction

HOLDS, FAILS, INDETERMINATE = "holds", "fails", "indeterminate"


def as_carrier(v):
    """Integer fields of a point (``n``, ``p``) as something that mixes with its logs."""
    if isinstance(v, np.ndarray):
        return Interval(v.astype(np.float64))
    return int(v)


def classify(margin, strict: bool) -> np.ndarray:
    """Per-element verdict codes: 1 holds, 0 fails, -1 indeterminate.

    Strict inequalities hold iff ``lo > 0`` and fail iff ``hi <= 0``;
    non-strict ones hold iff ``lo >= 0`` and fail iff ``hi < 0``.  NaN
    endpoints land in the indeterminate bucket.
    """
    lo = np.asarray(margin.lo, dtype=np.float64) if not isinstance(margin.lo, np.ndarray) else margin.lo
    hi = np.asarray(margin.hi, dtype=np.float64) if not isinstance(margin.hi, np.ndarray) else margin.hi
    if strict:
        holds, fails = lo > 0, hi <= 0
    else:
        holds, fails = lo >= 0, hi < 0
    return np.where(holds, 1, np.where(fails, 0, -1)).astype(np.int8)


def classify_hp(margin, strict: bool) -> int:
    lo, hi = margin.lo, margin.hi
    if strict:
        return 1 if lo > 0 else 0 if hi <= 0 else -1
    return 1 if lo >= 0 else 0 if hi < 0 else -1


_CODE = {1: HOLDS, 0: FAILS, -1: INDETERMINATE}


@dataclass(frozen=True)
class BoundSpec:
    id: str
    target: str  # "p_n" | "theta_pn"
    side: str  # "lower" | "upper"
    strict: bool
    threshold: int | None  # None: conjectural / no unconditional threshold
    expr: Callable = field(repr=False, compare=False)
    provenance: str = ""
    conditional: bool = False
    min_n: int = 2
    z_form: bool = False
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def relation(self) -> str:
        if self.side == "lower":
            return ">" if self.strict else ">="
        return "<" if self.strict else "<="

    def margin(self, pt):
        """``value - expr`` for lower bounds, ``expr - value`` for upper bounds."""
        if self.target == "theta_pn":
            if pt.theta is None:
                raise ValueError(f"{self.id} needs theta on the point")
            value = pt.theta
        else:
            value = as_carrier(pt.p)
        rhs = self.expr(pt)
        return value - rhs if self.side == "lower" else rhs - value

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "target": self.target,
            "side": self.side,
            "relation": self.relation,
            "threshold": self.threshold,
            "provenance": self.provenance,
            "conditional": self.conditional,
            "z_form": self.z_form,
            "metadata": self.metadata,
        }


@dataclass
class CheckOutcome:
    verdict: str
    margin: object

    def __bool__(self):
        return self.verdict == HOLDS


# -------------------------------------------------------------- expressions
def _n(pt):
    return as_carrier(pt.n)


def _linear(c):
    """``n (y + w - c)``."""
    c = Q(c)
    return lambda pt: _n(pt) * (pt.y + pt.w - c)


def _second(c):
    """``n (y + w - 1 + (w - c)/y)``."""
    c = Q(c)
    return lambda pt: _n(pt) * (pt.y + pt.w - 1 + (pt.w - c) / pt.y)


def _third(c, *, six_w: bool = True):
    """``n (y + w - 1 + (w - 2)/y - (w^2 - 6w + c)/(2y^2))``; ``six_w=False`` drops the ``-6w``."""
    c = Q(c)

    def expr(pt):
        y, w = pt.y, pt.w
        quad = w**2 - 6 * w + c if six_w else w**2 + c
        return _n(pt) * (y + w - 1 + (w - 2) / y - quad / (2 * y**2))

    return expr


def _dusart_theta_upper(pt):
    y, w = pt.y, pt.w
    return _n(pt) * (y + w - 1 + (w - 2) / y - Q("0.782") / y**2)


def _z_form(coeffs):
    cs = [Q(c) for c in coeffs]

    def expr(pt):
        z = pt.z
        acc = z - 1
        for k, c in enumerate(cs, start=1):
            acc = acc - c / z**k
        return _n(pt) * acc

    return expr


def _rosser(pt):
    return _n(pt) * pt.y


_ENTRIES = [
    BoundSpec("rosser-lower", "p_n", "lower", True, 1, _rosser, "(1.3), Rosser's theorem", min_n=1),
    BoundSpec("eq-1.4-upper", "p_n", "upper", True, 6, _linear(0), "(1.4), implied by (1.7) for n >= 6"),
    BoundSpec("eq-1.5-lower", "p_n", "lower", True, 2, _linear(1), "(1.5), Dusart: every n >= 2"),
    BoundSpec("eq-1.6-upper", "p_n", "upper", True, 4, lambda pt: _n(pt) * (pt.y + 2 * pt.w), "(1.6), Rosser"),
    BoundSpec("rs-lower-1.5", "p_n", "lower", True, 2, _linear("1.5"), "Rosser-Schoenfeld lower bound, n >= 2"),
    BoundSpec("eq-1.7-upper", "p_n", "upper", True, 20, _linear("0.5"), "(1.7), Rosser-Schoenfeld"),
    BoundSpec("eq-1.8-lower", "p_n", "lower", False, 2, _linear("1.0072629"), "(1.8), Robin"),
    BoundSpec("massias-robin-lower", "p_n", "lower", False, 2, _linear("1.002872"), "Massias-Robin lower bound"),
    BoundSpec("eq-1.9-upper", "p_n", "upper", False, 27076, _second("1.8"), "(1.9), Dusart thesis"),
    BoundSpec("eq-1.10-upper", "p_n", "upper", False, 688383, _second(2), "(1.10), Dusart"),
    BoundSpec("eq-1.11-lower", "p_n", "lower", False, 3, _second("2.1"), "(1.11), Dusart"),
    BoundSpec("thm-1.1-upper", "p_n", "upper", True, 46254381, _third("10.667"), "Theorem 1.1, (1.12)"),
    BoundSpec("thm-1.2-lower", "p_n", "lower", True, 2, _third("11.508"), "Theorem 1.2, (1.13)"),
    BoundSpec(
        "corollary-unconditional-1.12", "p_n", "upper", True, 3468, _third(0),
        "Corollary after Theorem 1.1 (second display labelled (1.12))",
    ),
    BoundSpec(
        "corollary-thm-1.2-lower", "p_n", "lower", True, 2, _third(0, six_w=False),
        "Corollary after Theorem 1.2",
    ),
    BoundSpec(
        "remark-3.16-lower", "p_n", "lower", True, None, _third(11), "Remark, (3.16)", conditional=True,
        metadata={"r3_lower": "3.9e30", "r3_upper": "3.958e30", "assumption": "Riemann hypothesis"},
    ),
    BoundSpec("theta-lower-11.808", "theta_pn", "lower", True, 2, _third("11.808"), "Proposition 4.1, lower bound"),
    BoundSpec("theta-upper-10.367", "theta_pn", "upper", True, 2581, _third("10.367"), "Proposition 4.1, upper bound"),
    BoundSpec(
        "dusart-theta-lower-2.04", "theta_pn", "lower", False, 29844570422670, _second("2.04"),
        "Dusart theta lower bound, n >= pi(10^15) + 1",
    ),
    BoundSpec("dusart-theta-upper-0.782", "theta_pn", "upper", False, 781, _dusart_theta_upper, "Dusart theta upper bound"),
    BoundSpec(
        "eq-2.12-upper", "p_n", "upper", True, 841424976,
        _z_form(["1", "2.85", "13.15", "70.7", "458.7275", "3428.7225"]), "(2.12), z-form", z_form=True,
    ),
    BoundSpec(
        "eq-3.7-lower", "p_n", "lower", True, 3520,
        _z_form(["1", "3.15", "12.85", "71.3", "463.2275", "4585"]), "(3.7), z-form", z_form=True,
    ),
]

REGISTRY: dict[str, BoundSpec] = {b.id: b for b in _ENTRIES}


def registry() -> list[BoundSpec]:
    return list(REGISTRY.values())


def get(bound_id: str) -> BoundSpec:
    try:
        return REGISTRY[bound_id]
    except KeyError:
        raise KeyError(f"unknown bound id {bound_id!r}") from None


class _IndexPoint:
    """``n``-only point (no prime attached) for evaluating right-hand sides."""

    def __init__(self, n: int):
        self.n = n
        self.y = log(Interval(float(n)))
        self.w = log(self.y)


def eval_bound(bound_id: str, n: int):
    """Enclosure of the right-hand side at index ``n`` (z-form entries need a prime)."""
    spec = get(bound_id)
    if spec.z_form:
        raise ValueError(f"{bound_id} depends on log p_n; use check_bound with a point")
    if n < spec.min_n:
        raise ValueError(f"{bound_id} is defined for n >= {spec.min_n}")
    if n > 2**53:
        raise ValueError("n must be exactly representable in binary64")
    return spec.expr(_IndexPoint(n))


def check_bound(bound_id: str, pt) -> CheckOutcome:
    spec = get(bound_id)
    if pt.n < spec.min_n:
        raise ValueError(f"{bound_id} is defined for n >= {spec.min_n}")
    margin = spec.margin(pt)
    if isinstance(pt, HPPoint):
        code = classify_hp(margin, spec.strict)
    else:
        code = int(classify(margin, spec.strict))
    return CheckOutcome(_CODE[code], margin)


def make_point(n: int, p: int, theta=None):
    """A :class:`PrimePoint` built directly from ``(n, p)`` (``w`` is NaN-safe for n = 1)."""
    from .prime_engine import PrimePoint

    with np.errstate(divide="ignore", invalid="ignore"):
        y = log(Interval(float(n)))
        w = log(y)
    return PrimePoint(n, p, w, y, log(Interval(float(p))), theta)


def bounds_json() -> str:
    return json.dumps([b.to_json() for b in registry()], indent=2)

