"""Polynomials and auxiliary functions behind the p_n bounds, with their constants.

Every coefficient is an exact :class:`~fractions.Fraction`.  Functions are
written against the shared operator vocabulary of :mod:`primebounds.interval`
(``+ - * / **``, :func:`exp`, :func:`log`), so the same code evaluates on
:class:`Interval` batches, derivative :class:`Jet` objects, high-precision
:class:`HPInterval` scalars, and (for polynomials) exact rationals.

Point-indexed functions take any object with ``w``, ``y``, ``z`` attributes
(``log log n``, ``log n``, ``log p_n``): a :class:`PrimePoint`, a
:class:`PointBatch`, or an :class:`HPPoint`.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .interval import DomainError, HPInterval, Interval, Jet, exp, log

Q = Fraction


class Poly:
    """Polynomial with exact rational coefficients, highest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, *coeffs):
        cs = [Fraction(c) if not isinstance(c, str) else Fraction(c) for c in coeffs]
        while len(cs) > 1 and cs[0] == 0:
            cs.pop(0)
        self.coeffs = tuple(cs) or (Fraction(0),)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = self.coeffs[0]
        for c in self.coeffs[1:]:
            acc = acc * x + c
        if isinstance(acc, Fraction) and not isinstance(x, Fraction):
            return acc + 0 * x  # constant polynomial: lift to x's carrier
        return acc

    def _aligned(self, other):
        other = other if isinstance(other, Poly) else Poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = (Fraction(0),) * (n - len(self.coeffs)) + self.coeffs
        b = (Fraction(0),) * (n - len(other.coeffs)) + other.coeffs
        return a, b

    def __add__(self, other):
        a, b = self._aligned(other)
        return Poly(*(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._aligned(other)
        return Poly(*(x - y for x, y in zip(a, b)))

    def __rsub__(self, other):
        return Poly(other) - self

    def __neg__(self):
        return Poly(*(-c for c in self.coeffs))

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly(*(c * Fraction(other) for c in self.coeffs))
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(*out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Poly):
            other = Poly(other)
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly{tuple(str(c) for c in self.coeffs)}"


X = Poly(1, 0)
U = Poly(1, -1, 1)  # x^2 - x + 1, recurs throughout

POLYS: dict[str, Poly] = {
    "P1": Poly(3, -6, 5),
    "P2": Poly(5, -24, 39, -14),
    "P3": Poly(7, -48, 120, -124, 51),
    "P4": Poly(9, -80, 280, -480, 405, -124),
    "P5": Poly(11, -120, 540, -1280, 1680, -1146, 325),
    "P6": Poly(13, -168, 924, -2800, 5040, -5376, 3143, -762),
    "P7": Poly(4, -84, 630, -2492, 5915, -8764, 7966, -4064, 896),
    "P8": Poly(3, -6, "5.2"),
    "P9": Poly(1, -6, "11.4", "-4.2"),
    "P10": Poly(2, "-7.2", "8.4", "-4.41"),
    "P11": Poly(1, "-4.2", "4.41", 0),
    "P12": Poly("9.3", "-12.3", "11.5"),
    "Q1": Poly(12, -138, 676, -1819, 2914, -2782, 1468, -328),
    "Q2": Poly(90, -700, 2405, -4506, 4801, -2732, 648),
    "Q3": Poly(50, -275, 662, -833, 538, -140),
    "Q4": Poly(30, -114, 181, -136, 40),
    "Q5": Poly(18, -43, 38, -12),
    "Q6": Poly(7, -8, 2),
    # expanded forms of the P8..P12 combinations
    "Q7": Poly("123/10", "-143/4", "2239/20", "-15641/100", "2529/25"),
    "Q8": Poly("383/20", "-4989/50", "3459/20", "-135723/2000"),
    "Q9": Poly(2, "-419/10", "259/2", "-9993/50", "4104/25", "-341/5"),
    "T1": Poly(1, -2),
    "T2": Poly(1, -6, 11),
}
P = POLYS


def eval_poly(poly_id: str, x):
    return POLYS[poly_id](x)


@dataclass(frozen=True)
class ProofConstants:
    A0: Fraction = Q("0.87")
    A1: Fraction = Q("155.32")
    B: tuple = tuple(Q(b) for b in ("0.27", "4.23", "1.575", "0.058", "2.24", "0.105", "0.0026", "0.052", "0.1955", "0.08"))
    upper_coeffs: tuple = tuple(Q(c) for c in ("1", "2.85", "13.15", "70.7", "458.7275", "3428.7225"))
    lower_coeffs: tuple = tuple(Q(c) for c in ("1", "3.15", "12.85", "71.3", "463.2275", "4585"))

    @property
    def A2(self) -> Fraction:
        return (Q("458.7275") - self.A1) * self.A0**5

    @property
    def A3(self) -> Fraction:
        return Q("3428.7225") * self.A0**6

    @property
    def S1(self) -> Fraction:
        return Q("12.85") - sum(self.B[:5])

    @property
    def S2(self) -> Fraction:
        return Q("3.15") - sum(self.B[5:])


CONSTANTS = ProofConstants()
C = CONSTANTS


# ----------------------------------------------------------------- Phi
def _min_lower(x):
    if isinstance(x, Jet):
        x = x.v
    if isinstance(x, Interval):
        return x.lo.min() if x.lo.size else 1.0
    return x.lo


def phi(x):
    """``e^x + x + log(1 + (x-1)/e^x + (x-2.1)/e^(2x))``.

    Defined wherever the inner argument is positive (x above roughly 0.46).
    """
    ex = exp(x)
    arg = 1 + (x - 1) / ex + (x - Q("2.1")) / exp(2 * x)
    if not _min_lower(arg) > 0:
        raise DomainError("inner log argument of phi is not certainly positive")
    return ex + x + log(arg)


# ------------------------------------------------------------ univariate
_G0_3 = Poly(2, -21, "82.2", "-98.9")
_G0_4 = Poly(1, -14, "53.4", "-100.6", 17)
_G0_5 = Poly(2, -10, 35, -110, 150, -42)
_G0_6 = Poly(3, -44, 156, -96, 64)


def G0(x):
    return (
        _G0_3(x) / (6 * exp(3 * x))
        - _G0_4(x) / (4 * exp(4 * x))
        + _G0_5(x) / (10 * exp(5 * x))
        - _G0_6(x) / (24 * exp(6 * x))
    )


_G1_3 = Poly(2, -15, 42, -14)
_G1_CUBE = Poly(1, -6, 12, -7)


def G1(x):
    e1, e3, e4 = exp(x), exp(3 * x), exp(4 * x)
    u = U(x)
    p12 = P["P12"](x)
    s = (x - 1) / e1 + (x - 2) / exp(2 * x)
    return (
        _G1_3(x) / (6 * e3)
        + Q("3.15") * x / e3
        - Q("12.85") / e3
        - u / e3
        + u * x / e4
        - p12 / (2 * e4)
        + Q("12.85") * x / e4
        + p12 * x / (2 * exp(5 * x))
        + (x - 1) ** 2 / (2 * exp(2 * x))
        - _G1_CUBE(x) / (3 * e3)
        - s**2 / 2
        + s**3 / 3
        - s**4 / 4
        + (x - 2) ** 4 / (4 * exp(8 * x))
    )


_W1_POLY = Poly(2, -18, "64.2", "-98.9")


def W1(x):
    return Q("3.54") * exp(x) - 20 * _W1_POLY(x)


_L21_QUAD = Poly(1, "-3.85", "14.15")


def L21(x):
    """Left side of the auxiliary polynomial-exponential inequality used for F1 (x >= 2.11)."""
    q = _L21_QUAD(x)
    ex = exp(x)
    return (
        q * P["P1"](x) / 2
        - Q("2.85") * P["P2"](x) / 3
        + P["P3"](x) / 12
        - q * P["P2"](x) / (6 * ex)
        - P["P4"](x) / (20 * ex)
    )


def f1(x):
    return (
        4 * C.B[0] * x * exp(3 * x)
        - 2 * P["Q7"](x) * exp(x)
        + 2 * C.A0 * P["Q8"](x)
        + P["Q9"](x)
        + 2 * Q("12.85") * C.A0**2 * P["P9"](x)
    )


def f2(x):
    ph = phi(x)
    return C.B[1] * x * ph**3 + Q("12.85") * x * exp(x) * ph**2 - Q("71.3") * exp(3 * x)


def f3(x):
    return Q("3.15") * x * phi(x) - Q("35.15") * x**2 + Q("44.6") * x - Q("42.08")


def f4(x):
    return Q("0.116") * x * exp(x) * phi(x) + Q("3.15") * x**3 - Q("57.45") * x**2 + Q("113.01") * x - Q("80.05")


def f5(x):
    return Q("4.48") * x * exp(x) - 2 * x**4 + 5 * x**3 - Q("37.7") * x**2 + Q("41.1") * x - Q("31.9")


def f6(x):
    return r(x, x)


def f7(x):
    return Q("0.0052") * x * exp(x) * phi(x) ** 2 - Q("38.55") * x**2 + Q("77.1") * x - Q("66.82")


def f8(x):
    return Q("0.052") * x * phi(x) ** 2 - Q("12.85") * U(x)


def f9(x):
    return Q("0.1955") * x * phi(x) ** 4 - Q("463.2275") * exp(2 * x)


def f10(x):
    return Q("0.08") * x * phi(x) ** 5 - 4585 * exp(2 * x)


# ------------------------------------------------------------- bivariate
def g1(x, t):
    return (
        Q("3.54") * exp(4 * x)
        + 20 * (18 * x**2 + Q("98.9")) * exp(3 * x)
        - 20 * (2 * t**3 + Q("64.2") * t) * exp(3 * t)
        + 30 * (x**4 + Q("63.16") * x**2 + Q("258.29")) * exp(2 * x)
        - 30 * (12 * t**3 + Q("203.17") * t) * exp(2 * t)
        + 12 * (10 * x**4 + 70 * x**2 + Q("1554.24")) * exp(x)
        - 12 * (2 * t**5 + 30 * t**3 + 90 * t) * exp(t)
        + 5 * (Q("2137.44") * x**2 + Q("37836.25"))
        - 5 * (8 * t**3 + Q("2185.45") * t)
    )


def h1(x, t):
    return (
        Q("1.98") * exp(4 * x)
        + 20 * (21 * x**2 + Q("130.823")) * exp(3 * x)
        - 20 * (2 * t**3 + Q("82.2") * t) * exp(3 * t)
        + 30 * (x**4 + Q("77.16") * x**2 + Q("279.57")) * exp(2 * x)
        - 30 * (14 * t**3 + Q("236.45") * t) * exp(2 * t)
        + 12 * (10 * x**4 + 110 * x**2 + Q("1660.65")) * exp(x)
        - 12 * (2 * t**5 + 35 * t**3 + Q("203.205") * t) * exp(t)
        + 5 * (3 * x**4 + Q("2309.28") * x**2 + Q("38175.947"))
        - 5 * (44 * t**3 + Q("2568.52") * t)
    )


def _b1_tail(x, t):
    """Terms shared by the three lower-bound step functions (e^{3x} and below)."""
    return (
        3 * (12 * x**3 + 112 * x) * exp(3 * x)
        - 3 * (t**4 + Q("46.6") * t**2 + 40) * exp(3 * t)
        + 6 * (Q("21.3") * x**3 + Q("41.5") * x) * exp(2 * x)
        - 6 * (2 * t**4 + Q("40.3") * t**2 + 12) * exp(2 * t)
        + 2 * (56 * x**3 + 132 * x) * exp(x)
        - 2 * (9 * t**4 + 129 * t**2 + 52) * exp(t)
        + 6 * (14 * x**3 + 40 * x)
        - 6 * (2 * t**4 + 36 * t**2 + 16)
    )


def alpha(x, t):
    return (
        Q("0.534") * exp(5 * x)
        + 2 * (2 * x**3 + Q("63.071778") * x) * exp(4 * x)
        - 2 * (18 * t**2 + Q("97.1")) * exp(4 * t)
        + _b1_tail(x, t)
    )


def beta(x, t):
    return (
        Q("1.272") * exp(5 * x)
        + 2 * (2 * x**3 + Q("81.071778") * x) * exp(4 * x)
        - 2 * (21 * t**2 + Q("131.867")) * exp(4 * t)
        + _b1_tail(x, t)
    )


def gamma(x, t):
    return (
        Q("1.248") * exp(5 * x)
        + 2 * (2 * x**3 + Q("81.071778") * x) * exp(4 * x)
        - 2 * (21 * t**2 + Q("131.636")) * exp(4 * t)
        + _b1_tail(x, t)
    )


def r(x, t):
    return (C.B[5] * exp(x) + C.S1) * x * phi(x) + Q("3.15") * x * exp(x) - Q("3.15") * (t**2 + 1) * exp(t)


# ------------------------------------------------------- point-indexed
def F0(pt, A0=C.A0):
    return pt.y - A0 * pt.z


def F1(pt, A1=C.A1):
    w, y, z = pt.w, pt.y, pt.z
    u = U(w)
    p1 = P["P1"](w)
    return (
        A1 / z**5
        + _L21_QUAD(w) * u / (y**4 * z)
        + Q("2.85") * p1 / (2 * y**3 * z**2)
        + Q("2.85") * p1 / (2 * y**4 * z)
        + (Q("13.15") * u - Q("70.7") * w) / (y**2 * z**2) * (1 / y + 1 / z)
        - P["P2"](w) / (6 * y**4 * z)
    )


def H1(pt, B=C.B[0]):
    w, y, z = pt.w, pt.y, pt.z
    return (
        B * w / (y**3 * z)
        - P["Q7"](w) / (2 * y**5 * z)
        + P["Q8"](w) / (2 * y**5 * z**2)
        + P["Q9"](w) / (4 * y**6 * z)
        + Q("12.85") * P["P9"](w) / (2 * y**4 * z**3)
    )


def H2(pt, B=C.B[1]):
    w, y, z = pt.w, pt.y, pt.z
    return B * w / (y**3 * z) + Q("12.85") * w / (y**2 * z**2) - Q("71.3") / z**4


def H3(pt, B=C.B[2]):
    w, y, z = pt.w, pt.y, pt.z
    return B * w / (y**3 * z) - Q("3.15") * P["P8"](w) / (2 * y**3 * z**2) - Q("12.85") * U(w) / (y**3 * z**2)


def H4(pt, B=C.B[3]):
    w, y, z = pt.w, pt.y, pt.z
    return B * w / (y**3 * z) + (Q("3.15") * P["P9"](w) - Q("12.85") * P["P8"](w)) / (2 * y**4 * z**2)


def H5(pt, B=C.B[4]):
    w, y, z = pt.w, pt.y, pt.z
    u = U(w)
    return (
        B * w / (y**3 * z)
        + (P["P9"](w) - Q("3.15") * P["P8"](w)) / (2 * y**4 * z)
        - Q("12.85") * u / (y**4 * z)
        - u**2 / (y**4 * z)
    )


def H6(pt, B=C.B[5], S1=C.S1):
    w, y, z = pt.w, pt.y, pt.z
    return B * w / (y**2 * z) + S1 * w / (y**3 * z) - Q("3.15") * U(w) / (y**2 * z**2)


def H7(pt, B=C.B[6]):
    w, y, z = pt.w, pt.y, pt.z
    return B * w / (y**2 * z) - Q("12.85") * P["P8"](w) / (2 * y**3 * z**3)


def H8(pt, B=C.B[7]):
    w, y, z = pt.w, pt.y, pt.z
    return B * w / (y**2 * z) - Q("12.85") * U(w) / (y**2 * z**3)


def H9(pt, B=C.B[8]):
    w, y, z = pt.w, pt.y, pt.z
    return B * w / (y**2 * z) - Q("463.2275") / z**5


def H10(pt, B=C.B[9]):
    w, y, z = pt.w, pt.y, pt.z
    return B * w / (y**2 * z) - 4585 / z**6


# Step choices for the a0/a1 parameter of b0/b1: callables of (w, y).
A0_CHOICES: dict[str, Callable] = {
    "upper-step1": lambda w, y: -(w**2) + 6 * w,
    "upper-step2": lambda w, y: Q("10.641") + 0 * w,
}
A1_CHOICES: dict[str, Callable] = {
    "lower-step1": lambda w, y: Q("0.2") * y - w**2 + 6 * w,
    "lower-step2": lambda w, y: Q("11.589") + 0 * w,
    "lower-step3": lambda w, y: Q("11.512") + 0 * w,
}


def _choice(a, table):
    if isinstance(a, str):
        return table[a]
    if callable(a):
        return a
    return lambda w, y, _a=Q(a): _a + 0 * w


def b0(pt, a0="upper-step1", A0=C.A0, A1=C.A1):
    """Coefficient function of the upper-bound construction for a given ``a0``.

    The quadratic in ``w`` multiplying ``A0/y^2`` uses ``5.7*A0`` (the value
    that reproduces the step polynomials of the proof).
    """
    w, y = pt.w, pt.y
    a = _choice(a0, A0_CHOICES)(w, y)
    A2 = (Q("458.7275") - A1) * A0**5
    A3 = Q("3428.7225") * A0**6
    u = U(w)
    return (
        Q("10.7")
        + 2 * A2 / y**3
        + 2 * A3 / y**4
        + a / y * (1 - (w - 1) / y - (w - 2) / y**2 + (2 * w**2 - 12 * w + a) / (4 * y**3))
        - 2 * G0(w) * y**2
        + A0 * ((Q("5.7") * A0 + Q("8.7")) * w**2 - (32 * A0 + 38) * w + Q("147.1") * A0 + Q("10.7")) / y**2
        + 2 * Q("70.7") * A0**3 * u / y**4
        + 2 * Q("70.7") * A0**4 * u / y**4
    )


def b1(pt, a1="lower-step1", A0=C.A0, S2=C.S2):
    w, y = pt.w, pt.y
    a = _choice(a1, A1_CHOICES)(w, y)
    return Q("11.3") - 2 * G1(w) * y**2 + a / y - 2 * A0 * S2 * w / y


def cipolla_estimate(n: int, order: int = 0):
    """Truncated asymptotic expansion of ``p_n`` (no error term) as an Interval."""
    if n < 3:
        raise ValueError("cipolla_estimate needs n >= 3")
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    y = log(Interval(float(n)))
    w = log(y)
    s = y + w - 1
    for k in range(1, order + 1):
        s = s + (-1) ** (k + 1) * P[f"T{k}"](w) / (k * y**k)
    return n * s


# -------------------------------------------------------------- registry
@dataclass(frozen=True)
class FnInfo:
    id: str
    arity: str  # "univariate" | "bivariate" | "point"
    fn: Callable = field(repr=False)
    domain: tuple = (None, None)
    paper_ref: str = ""


FUNCTIONS: dict[str, FnInfo] = {}


def _reg(fid, arity, fn, domain, ref):
    FUNCTIONS[fid] = FnInfo(fid, arity, fn, domain, ref)


_reg("Phi", "univariate", phi, (0.7, 30), "Appendix definition of Phi")
_reg("G0", "univariate", G0, (0, 30), "display before (2.11)")
_reg("G1", "univariate", G1, (0, 30), "display before (3.6)")
_reg("W1", "univariate", W1, (7, 30), "Theorem 1.1 proof, Step 1")
_reg("L21", "univariate", L21, (2.11, 30), "Lemma 2.1, (2.3)")
for _i, _f in enumerate((f1, f2, f3, f4, f5, f6, f7, f8, f9, f10), start=1):
    _reg(f"f{_i}", "univariate", _f, (0.7 if _i == 6 else 1.0, 30), f"helper of Proposition 5.{[1, 5, 6, 7, 8, 9, 10, 11, 12, 13][_i - 1]}")
_reg("g1", "bivariate", g1, (0, 30), "Theorem 1.1 proof, Step 1")
_reg("h1", "bivariate", h1, (0, 30), "Theorem 1.1 proof, Step 2")
_reg("alpha", "bivariate", alpha, (0, 30), "Theorem 1.2 proof, Step 1")
_reg("beta", "bivariate", beta, (0, 30), "Theorem 1.2 proof, Step 2")
_reg("gamma", "bivariate", gamma, (0, 30), "Theorem 1.2 proof, Step 3")
_reg("r", "bivariate", r, (0.7, 30), "Proposition 5.9")
_reg("F0", "point", F0, (2, None), "(2.1)")
_reg("F1", "point", F1, (2, None), "(2.2)")
for _i, _h in enumerate((H1, H2, H3, H4, H5, H6, H7, H8, H9, H10), start=1):
    _reg(f"H{_i}", "point", _h, (2, None), "H_i list, Section 4")
_reg("b0", "point", b0, (3, None), "(2.11)")
_reg("b1", "point", b1, (2, None), "(3.6)")


def eval_univariate(fid: str, x):
    info = FUNCTIONS[fid]
    if info.arity != "univariate":
        raise KeyError(f"{fid} is not univariate")
    return info.fn(x)


def eval_bivariate(fid: str, x, t):
    info = FUNCTIONS[fid]
    if info.arity != "bivariate":
        raise KeyError(f"{fid} is not bivariate")
    return info.fn(x, t)


def eval_at_point(fid: str, pt, **params):
    info = FUNCTIONS[fid]
    if info.arity != "point":
        raise KeyError(f"{fid} is not point-indexed")
    return info.fn(pt, **params)


def registry_json() -> str:
    rows = [
        {"id": i.id, "arity": i.arity, "domain": list(i.domain), "paper_ref": i.paper_ref}
        for i in FUNCTIONS.values()
    ]
    return json.dumps(rows, indent=2)


# ----------------------------------------------------- high-precision points
class HPPoint:
    """``w``, ``y``, ``z`` (and theta) as :class:`HPInterval` for escalation."""

    def __init__(self, n: int, p: int, theta=None):
        self.n, self.p = n, p
        self.y = log(HPInterval(n))
        self.w = log(self.y)
        self.z = log(HPInterval(p))
        self.theta = None if theta is None else HPInterval(theta)
