"""Exhaustive index-range checks of catalog bounds and point predicates.

Every subject reduces to a signed margin over a point (nonnegative, or
positive for strict subjects, means the claim holds).  Scans run block by
block over the prime stream; elements whose double-precision margin straddles
zero are re-evaluated on :class:`HPPoint` at 106 and then 333 bits before a
verdict is recorded.  Anything still unresolved makes the run inconclusive.
"""
from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import bound_catalog, formula_lib as fl
from .bound_catalog import as_carrier, classify, classify_hp
from .formula_lib import HPPoint, P, U
from .interval import DomainError, HPInterval, Interval, hp_precision, log
from .prime_engine import CapacityError, PrimeEngine

Q = Fraction

VIOLATION_CAP = 100_000
ESCALATION_BITS = (106, 333)

EXIT_CLEAN, EXIT_VIOLATIONS, EXIT_INCONCLUSIVE, EXIT_CONFIG = 0, 1, 2, 3


# ------------------------------------------------------------- predicates
def _recip_base(pt):
    y, w, z = pt.y, pt.w, pt.z
    return 1 / y - w / y**2 + U(w) / (y**2 * z)


def m_prop_2_4(pt):
    y, w, z = pt.y, pt.w, pt.z
    s = 0
    for k in range(1, 5):
        s = s + (-1) ** (k + 1) * P[f"P{k}"](w) / (k * (k + 1) * y ** (k + 2))
    return 1 / z - (_recip_base(pt) + s / z)


def m_kor_2_5(pt):
    y, w, z = pt.y, pt.w, pt.z
    return 1 / z - (_recip_base(pt) + P["P1"](w) / (2 * y**3 * z) - P["P2"](w) / (6 * y**4 * z))


def m_kor_2_6(pt):
    return 1 / pt.z - _recip_base(pt)


def m_ineq_2_6(pt):
    y, w = pt.y, pt.w
    return P["P1"](w) / (2 * y) - P["P2"](w) / (6 * y**2)


def _prop_3_3_family(last_k):
    def margin(pt):
        y, w, z = pt.y, pt.w, pt.z
        rhs = _recip_base(pt) + P["P8"](w) / (2 * y**3 * z)
        for k in range(4, last_k + 1):
            rhs = rhs - P[f"P{k + 5}"](w) / (2 * y**k * z)
        return rhs - 1 / z

    return margin


m_prop_3_3 = _prop_3_3_family(6)
m_kor_3_4 = _prop_3_3_family(5)
m_kor_3_5 = _prop_3_3_family(4)


def m_lemma_2_2(pt):
    return fl.F0(pt, A0=Q("0.87"))


def m_lemma_2_3(pt):
    return fl.F1(pt, A1=Q("155.32"))


def m_lemma_3_1(pt):
    y, w, z = pt.y, pt.w, pt.z
    return (Q("12.85") * P["P9"](w) + Q("3.15") * P["P10"](w) + P["P11"](w)) / (2 * y**6 * z)


def m_lemma_3_2(pt):
    y, w, z = pt.y, pt.w, pt.z
    return (
        P["P9"](w) * P["P12"](w) / (4 * y**7 * z)
        + Q("12.85") * P["P10"](w) / (2 * y**7 * z)
        + Q("3.15") * P["P11"](w) / (2 * y**7 * z)
        + Q("3.15") * P["P11"](w) / (2 * y**6 * z**2)
        - (w - 2) ** 4 / (4 * y**8)
    )


def m_lemma_5_4(pt):
    """``log p_n - Phi(log log n)`` with ``e^w = y`` substituted.

    Where the inner log argument is certainly nonpositive, Phi(log log n) is
    the log of a nonpositive number and the claim holds vacuously (margin +inf).
    """
    y, w, z = pt.y, pt.w, pt.z
    arg = 1 + (w - 1) / y + (w - Q("2.1")) / y**2
    if isinstance(arg, HPInterval):
        if arg.hi <= 0:
            return HPInterval(float("inf"))
        if arg.lo <= 0:
            raise DomainError("inner log argument straddles zero")
        return z - (y + w + log(arg))
    with np.errstate(invalid="ignore"):
        m = z - (y + w + log(arg))
        vac = arg.hi <= 0
        return Interval(np.where(vac, np.inf, m.lo), np.where(vac, np.inf, m.hi))


@dataclass(frozen=True)
class Predicate:
    id: str
    margin_fn: Callable = field(repr=False, compare=False)
    threshold: int | None
    strict: bool = False
    min_n: int = 2
    provenance: str = ""

    def margin(self, pt):
        return self.margin_fn(pt)


def _h_margin(i):
    fn = getattr(fl, f"H{i}")
    return lambda pt: fn(pt)


M_TABLE = {
    1: 1359056314, 2: 1471247583, 3: 1468111666, 4: 1383728153, 5: 1462324835,
    6: 5, 7: 1075859481, 8: 1445815789, 9: 1479240488, 10: 1447605594,
}

_PREDICATES = [
    Predicate("prop-2.4", m_prop_2_4, 688383, provenance="Proposition 2.4"),
    Predicate("kor-2.5", m_kor_2_5, 456914, provenance="Corollary 2.5"),
    Predicate("kor-2.6", m_kor_2_6, 71, provenance="Corollary 2.6"),
    Predicate("ineq-2.6", m_ineq_2_6, 3, min_n=3, provenance="(2.6)"),
    Predicate("prop-3.3", m_prop_3_3, 2, provenance="Proposition 3.3"),
    Predicate("kor-3.4", m_kor_3_4, 2, provenance="Corollary 3.4"),
    Predicate("kor-3.5", m_kor_3_5, 2, provenance="Corollary 3.5"),
    Predicate("lemma-2.2", m_lemma_2_2, 1338564587, provenance="Lemma 2.2, log n >= 0.87 log p_n"),
    Predicate("lemma-2.3", m_lemma_2_3, 100720878, provenance="Lemma 2.3, F_1(n) >= 0 with A_1 = 155.32"),
    Predicate("lemma-3.1", m_lemma_3_1, 6, provenance="Lemma 3.1"),
    Predicate("lemma-3.2", m_lemma_3_2, 17, provenance="Lemma 3.2"),
    Predicate("lemma-5.4", m_lemma_5_4, 3, min_n=3, provenance="Lemma 5.4, Phi(log log n) <= log p_n"),
] + [
    Predicate(f"H{i}", _h_margin(i), M_TABLE[i], provenance=f"H_{i}(n) >= 0, B_{i}/M_{i} table")
    for i in range(1, 11)
]

PREDICATES: dict[str, Predicate] = {p.id: p for p in _PREDICATES}


# --------------------------------------------------------------- subjects
@dataclass(frozen=True)
class Subject:
    """Uniform view over catalog bounds and predicates."""

    id: str
    kind: str  # "bound" | "predicate"
    strict: bool
    threshold: int | None
    min_n: int
    needs_theta: bool
    conditional: bool = False

    def margin(self, pt):
        if self.kind == "bound":
            return bound_catalog.get(self.id).margin(pt)
        return PREDICATES[self.id].margin(pt)


def subject(subject_id: str) -> Subject:
    if subject_id in bound_catalog.REGISTRY:
        b = bound_catalog.REGISTRY[subject_id]
        return Subject(b.id, "bound", b.strict, b.threshold, b.min_n, b.target == "theta_pn", b.conditional)
    if subject_id in PREDICATES:
        p = PREDICATES[subject_id]
        return Subject(p.id, "predicate", p.strict, p.threshold, p.min_n, False)
    raise KeyError(f"unknown subject {subject_id!r}")


def all_subject_ids() -> list[str]:
    return list(bound_catalog.REGISTRY) + list(PREDICATES)


# ------------------------------------------------------------- escalation
def escalate(subj: Subject, n: int, p: int, theta=None) -> tuple[int, int | None]:
    """Re-decide one point in high precision; returns ``(code, bits)``.

    ``code`` is 1 holds, 0 fails, -1 still indeterminate.  Theta, when used,
    enters as its double enclosure (its width is not reduced here).
    """
    for bits in ESCALATION_BITS:
        with hp_precision(bits):
            try:
                pt = HPPoint(n, p, None if theta is None else HPInterval(theta))
                code = classify_hp(subj.margin(pt), subj.strict)
            except (DomainError, ZeroDivisionError):
                code = -1
        if code != -1:
            return code, bits
    return -1, None


# ----------------------------------------------------------------- reports
@dataclass
class VerificationReport:
    subject: str
    n_lo: int
    n_hi: int
    count_checked: int = 0
    violations: list = field(default_factory=list)  # [n, lo, hi], ascending, capped
    violation_count: int = 0
    first_violation: int | None = None
    last_violation: int | None = None
    indeterminates: list = field(default_factory=list)  # [n, verdict, bits]
    unresolved: list = field(default_factory=list)
    min_margin: list | None = None  # [n, lo, hi]
    wall_time: float = 0.0
    throughput: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def clean(self) -> bool:
        return self.violation_count == 0 and not self.unresolved

    @property
    def exit_code(self) -> int:
        if self.unresolved:
            return EXIT_INCONCLUSIVE
        return EXIT_VIOLATIONS if self.violation_count else EXIT_CLEAN

    def to_dict(self) -> dict:
        d = asdict(self)
        d["exit_code"] = self.exit_code
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["subject", "kind", "n", "margin_lo", "margin_hi"])
        for n, lo, hi in self.violations:
            w.writerow([self.subject, "violation", n, repr(lo), repr(hi)])
        for n, verdict, bits in self.indeterminates:
            w.writerow([self.subject, f"escalated:{verdict}:{bits}", n, "", ""])
        for n in self.unresolved:
            w.writerow([self.subject, "unresolved", n, "", ""])
        return buf.getvalue()

    def summary(self) -> str:
        state = {0: "clean", 1: "VIOLATIONS", 2: "INCONCLUSIVE"}[self.exit_code]
        s = (
            f"{self.subject} on [{self.n_lo}, {self.n_hi}]: {state}; checked {self.count_checked}, "
            f"violations {self.violation_count}"
        )
        if self.last_violation is not None:
            s += f" (first {self.first_violation}, last {self.last_violation})"
        if self.indeterminates:
            s += f", escalated {len(self.indeterminates)}"
        return s + f", {self.wall_time:.1f}s"


class _Partial:
    """Per-block accumulation for one subject."""

    __slots__ = ("count", "viol", "vcount", "first", "last", "escalated", "unresolved", "min_margin", "env")

    def __init__(self):
        self.count = 0
        self.viol, self.vcount, self.first, self.last = [], 0, None, None
        self.escalated, self.unresolved = [], []
        self.min_margin = None
        self.env = None

    def add_violations(self, ns, lo, hi, cap):
        if not len(ns):
            return
        room = cap - len(self.viol)
        if room > 0:
            self.viol.extend([int(n), float(a), float(b)] for n, a, b in zip(ns[:room], lo[:room], hi[:room]))
        self.vcount += len(ns)
        if self.first is None:
            self.first = int(ns[0])
        self.last = int(ns[-1])


def _envelope(batch) -> dict:
    """Empirical statistics for ``|theta(p_n) - p_n| < 0.15 p_n / log^3 p_n`` (not a proof)."""
    p = batch.p.astype(np.float64)
    mid = 0.5 * (batch.theta.lo + batch.theta.hi)
    z = np.log(p)
    ratio = np.abs(mid - p) * z**3 / p
    i = int(np.argmax(ratio))
    return {"max_ratio": float(ratio[i]), "at_n": int(batch.n[i]), "exceed_0.15": int(np.count_nonzero(ratio >= 0.15))}


def _merge_env(a, b):
    if a is None:
        return b
    if b is None:
        return a
    out = dict(a if a["max_ratio"] >= b["max_ratio"] else b)
    out["exceed_0.15"] = a["exceed_0.15"] + b["exceed_0.15"]
    return out


@dataclass
class BlockScan:
    """Picklable per-block worker evaluating several subjects in one pass."""

    subject_ids: tuple
    cap: int = VIOLATION_CAP
    envelope: bool = False
    envelope_from: int = 2
    escalation: bool = True

    def __call__(self, batches):
        subs = [subject(s) for s in self.subject_ids]
        parts = [_Partial() for _ in subs]
        for batch in batches:
            for subj, part in zip(subs, parts):
                mask = batch.n >= subj.min_n
                b = batch if mask.all() else batch.select(mask)
                if len(b) == 0:
                    continue
                self._scan(subj, part, b)
            if self.envelope and batch.theta is not None:
                sel = batch.n >= max(self.envelope_from, 2)
                if sel.any():
                    parts[0].env = _merge_env(parts[0].env, _envelope(batch.select(sel)))
        return parts

    def _scan(self, subj, part, b):
        with np.errstate(all="ignore"):
            m = subj.margin(b)
        lo = np.broadcast_to(m.lo, b.n.shape)
        hi = np.broadcast_to(m.hi, b.n.shape)
        codes = classify(Interval(lo, hi), subj.strict)
        part.count += len(b)
        finite = np.where(np.isnan(lo), np.inf, lo)
        j = int(np.argmin(finite))
        if part.min_margin is None or finite[j] < part.min_margin[1]:
            part.min_margin = [int(b.n[j]), float(lo[j]), float(hi[j])]
        fails = codes == 0
        ind = np.flatnonzero(codes == -1)
        if ind.size:
            for i in ind.tolist():
                th = None if b.theta is None else b.theta[i]
                if self.escalation:
                    code, bits = escalate(subj, int(b.n[i]), int(b.p[i]), th)
                else:
                    code, bits = -1, None
                n = int(b.n[i])
                if code == -1:
                    part.unresolved.append(n)
                else:
                    part.escalated.append([n, "holds" if code == 1 else "fails", bits])
                    if code == 0:
                        fails[i] = True
        idx = np.flatnonzero(fails)
        part.add_violations(b.n[idx], lo[idx], hi[idx], self.cap)


def _merge(subject_id, n_lo, n_hi, parts, cap) -> VerificationReport:
    r = VerificationReport(subject_id, n_lo, n_hi)
    for part in parts:
        r.count_checked += part.count
        room = cap - len(r.violations)
        r.violations.extend(part.viol[:max(room, 0)])
        r.violation_count += part.vcount
        if part.first is not None and r.first_violation is None:
            r.first_violation = part.first
        if part.last is not None:
            r.last_violation = part.last
        r.indeterminates.extend(part.escalated)
        r.unresolved.extend(part.unresolved)
        if part.min_margin is not None and (r.min_margin is None or part.min_margin[1] < r.min_margin[1]):
            r.min_margin = part.min_margin
        if part.env is not None:
            r.extra["theta_envelope"] = _merge_env(r.extra.get("theta_envelope"), part.env)
    return r


def verify_many(
    subject_ids, n_lo: int, n_hi: int, engine: PrimeEngine | None = None, cap: int = VIOLATION_CAP,
    envelope: bool = False, escalation: bool = True, checkpoint_path=None, resume: bool = False,
) -> dict[str, VerificationReport]:
    """Single streaming pass over ``[n_lo, n_hi]`` checking every subject."""
    engine = engine or PrimeEngine()
    subject_ids = tuple(subject_ids)
    subs = [subject(s) for s in subject_ids]
    if n_lo < 1 or n_lo > n_hi:
        raise ValueError(f"invalid range [{n_lo}, {n_hi}]")
    theta = any(s.needs_theta for s in subs) or envelope
    t0 = time.perf_counter()
    kw = {}
    if checkpoint_path is not None:
        kw = {"checkpoint_path": checkpoint_path, "resume": resume}
    scan = BlockScan(subject_ids, cap, envelope, escalation=escalation)
    blocks = engine.map_blocks(scan, n_lo, n_hi, theta=theta, **kw)
    wall = time.perf_counter() - t0
    out = {}
    for k, sid in enumerate(subject_ids):
        lo = max(n_lo, subs[k].min_n)
        r = _merge(sid, lo, n_hi, [blk[k] for blk in blocks], cap)
        r.wall_time = wall
        r.throughput = r.count_checked / wall if wall > 0 else 0.0
        out[sid] = r
    return out


def verify_range(subject_id: str, n_lo: int, n_hi: int, engine: PrimeEngine | None = None, **kw) -> VerificationReport:
    return verify_many([subject_id], n_lo, n_hi, engine, **kw)[subject_id]


def verify_theta(subject_id: str, n_lo: int, n_hi: int, engine: PrimeEngine | None = None, **kw) -> VerificationReport:
    """Range check of a theta bound plus the empirical |theta - p| envelope statistics."""
    if not subject(subject_id).needs_theta:
        raise ValueError(f"{subject_id} is not a theta bound")
    return verify_many([subject_id], n_lo, n_hi, engine, envelope=True, **kw)[subject_id]


@dataclass
class ThresholdResult:
    subject: str
    horizon: int
    threshold: int
    paper_threshold: int | None
    last_violation: int | None
    unresolved: list
    report: VerificationReport = field(repr=False)

    @property
    def matches_paper(self) -> bool:
        return self.paper_threshold is not None and self.threshold == self.paper_threshold


def threshold_from_report(r: VerificationReport, paper_threshold=None) -> ThresholdResult:
    """Least N with no violation (or unresolved point) in ``[N, horizon]``."""
    worst = max([v for v in (r.last_violation, max(r.unresolved, default=None)) if v is not None], default=None)
    n = r.n_lo if worst is None else worst + 1
    return ThresholdResult(r.subject, r.n_hi, n, paper_threshold, r.last_violation, list(r.unresolved), r)


def find_min_threshold(subject_id: str, n_hi: int, engine: PrimeEngine | None = None, n_lo: int | None = None) -> ThresholdResult:
    """Exhaustive scan of ``[min_n, n_hi]``; violations need not be monotone in n."""
    s = subject(subject_id)
    r = verify_range(subject_id, n_lo or s.min_n, n_hi, engine)
    return threshold_from_report(r, s.threshold)


def find_min_thresholds(subject_ids, n_hi: int, engine: PrimeEngine | None = None) -> dict[str, ThresholdResult]:
    subject_ids = list(subject_ids)
    n_lo = min(subject(s).min_n for s in subject_ids)
    reports = verify_many(subject_ids, n_lo, n_hi, engine)
    return {s: threshold_from_report(reports[s], subject(s).threshold) for s in subject_ids}


__all__ = [
    "PREDICATES", "M_TABLE", "Predicate", "Subject", "VerificationReport", "ThresholdResult",
    "subject", "all_subject_ids", "escalate", "verify_range", "verify_many", "verify_theta",
    "find_min_threshold", "find_min_thresholds", "threshold_from_report", "CapacityError",
    "EXIT_CLEAN", "EXIT_VIOLATIONS", "EXIT_INCONCLUSIVE", "EXIT_CONFIG", "as_carrier",
]
