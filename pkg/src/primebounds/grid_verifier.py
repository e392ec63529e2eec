"""Grid certification of ``F(x, x) >= 0`` by monotone bracketing.

For ``F`` nondecreasing in its first and nonincreasing in its second argument,
``F(x, x) >= F(t0, t1)`` whenever ``t0 <= x <= t1``; so one outward-rounded
evaluation per cell ``[t0, t1]`` bounds the diagonal on that cell.  Cells whose
lower bound is negative are bisected up to a depth limit before being
reported as failures.

Univariate tail scans use a derivative (:class:`Jet`) enclosure per cell:
a monotone cell is bounded by its endpoint value, otherwise by the mean-value
form.  Tail scans cover a bounded interval only and are labelled accordingly.
"""
from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import formula_lib as fl
from .interval import Interval, Jet

MANIFEST_VERSION = 1
DEFAULT_DEPTH = 8
DEFAULT_CHUNK = 200_000
TAIL_LABEL = "bounded-tail numeric check (not a proof)"

BRACKET = "F(x,x) >= F(t0,t1) for t0 <= x <= t1"


@dataclass(frozen=True)
class GridSpec:
    id: str
    fn_id: str
    x_start: Fraction
    step: Fraction
    cells: int
    mode: str = "bracket"  # "bracket" (bivariate) | "univariate"
    bracket_property: str = BRACKET
    paper_ref: str = ""
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "x_start", Fraction(self.x_start))
        object.__setattr__(self, "step", Fraction(self.step))
        if self.cells < 1 or self.step <= 0:
            raise ValueError("grid needs cells >= 1 and a positive step")
        info = fl.FUNCTIONS.get(self.fn_id)
        if info is None:
            raise KeyError(f"unknown function {self.fn_id!r}")
        want = "bivariate" if self.mode == "bracket" else "univariate"
        if info.arity != want:
            raise ValueError(f"{self.fn_id} is {info.arity}, mode {self.mode} needs {want}")

    @property
    def x_end(self) -> Fraction:
        return self.x_start + self.cells * self.step

    def to_json(self) -> dict:
        return {
            "id": self.id, "fn_id": self.fn_id, "x_start": str(self.x_start), "step": str(self.step),
            "cells": self.cells, "mode": self.mode, "bracket_property": self.bracket_property,
            "paper_ref": self.paper_ref, "label": self.label,
        }

    @classmethod
    def from_json(cls, d: dict) -> GridSpec:
        return cls(
            d["id"], d["fn_id"], Fraction(d["x_start"]), Fraction(d["step"]), int(d["cells"]),
            d.get("mode", "bracket"), d.get("bracket_property", BRACKET), d.get("paper_ref", ""), d.get("label", ""),
        )


@dataclass
class GridReport:
    spec_id: str
    fn_id: str
    x_range: list
    cells_checked: int = 0
    failures: list = field(default_factory=list)  # [cell, lo, hi]
    min_lower_bound: list | None = None  # [cell, lo, hi]
    refined: int = 0
    max_depth: int = 0
    wall_time: float = 0.0
    label: str = ""

    @property
    def certified(self) -> bool:
        return not self.failures

    @property
    def exit_code(self) -> int:
        return 0 if self.certified else 2

    def to_dict(self) -> dict:
        d = asdict(self)
        d["certified"] = self.certified
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def summary(self) -> str:
        state = "certified" if self.certified else f"{len(self.failures)} FAILURES"
        lo = self.min_lower_bound[1] if self.min_lower_bound else float("nan")
        s = (
            f"{self.spec_id} ({self.fn_id}) on [{self.x_range[0]}, {self.x_range[1]}]: {state}; "
            f"{self.cells_checked} cells, refined {self.refined} (depth <= {self.max_depth}), "
            f"min lower bound {lo:.6g}, {self.wall_time:.1f}s"
        )
        return s + (f" [{self.label}]" if self.label else "")


# --------------------------------------------------------------- evaluation
def _cell_edges(spec: GridSpec, i0: int, i1: int) -> tuple[np.ndarray, np.ndarray]:
    """Float cell ends enclosing the exact rational cell ends, widened outward."""
    d = math.lcm(spec.x_start.denominator, spec.step.denominator)
    a = spec.x_start.numerator * (d // spec.x_start.denominator)
    b = spec.step.numerator * (d // spec.step.denominator)
    i = np.arange(i0, i1 + 1, dtype=np.int64)
    if abs(a) + b * i1 < 2**53 and d < 2**53:
        num = a + b * i
        t = num.astype(np.float64) / float(d)  # correctly rounded quotient
    else:
        t = np.array([float(Fraction(a + b * int(k), d)) for k in i])
    t_lo = np.nextafter(t, -np.inf)
    t_hi = np.nextafter(t, np.inf)
    return t_lo[:-1], t_hi[1:]


def _bracket_eval(fn):
    return lambda a, b: fn(Interval(a), Interval(b))


def _univariate_eval(fn):
    """Cell enclosure of a univariate ``fn`` on ``[a, b]`` using a derivative jet."""

    def ev(a, b):
        x = Interval(a, b)
        with np.errstate(all="ignore"):
            jet = fn(Jet.variable(x))
            v, d = jet.v, jet.d
            fa, fb = fn(Interval(a)), fn(Interval(b))
            m = 0.5 * (a + b)
            mv = fn(Interval(m)) + d * (x - Interval(m))
        lo = np.broadcast_to(v.lo, a.shape).copy()
        hi = np.broadcast_to(v.hi, a.shape).copy()
        inc = d.lo >= 0
        dec = d.hi <= 0
        lo = np.where(inc, np.fmax(lo, fa.lo), lo)
        hi = np.where(inc, np.fmin(hi, fb.hi), hi)
        lo = np.where(dec, np.fmax(lo, fb.lo), lo)
        hi = np.where(dec, np.fmin(hi, fa.hi), hi)
        lo = np.fmax(lo, mv.lo)
        hi = np.fmin(hi, mv.hi)
        return Interval(lo, hi)

    return ev


def _evaluator(spec: GridSpec):
    fn = fl.FUNCTIONS[spec.fn_id].fn
    return _bracket_eval(fn) if spec.mode == "bracket" else _univariate_eval(fn)


def certify_cells(ev, a: np.ndarray, b: np.ndarray, max_depth: int = DEFAULT_DEPTH):
    """Per-cell effective lower/upper bounds, failure mask, and subdivision depth."""
    with np.errstate(all="ignore"):
        v = ev(a, b)
    lo = np.broadcast_to(v.lo, a.shape).astype(np.float64)
    hi = np.broadcast_to(v.hi, a.shape).astype(np.float64)
    depth = np.zeros(a.shape, dtype=np.int8)
    failed = np.zeros(a.shape, dtype=bool)
    pending = np.flatnonzero(~(lo >= 0))
    refined = pending.size
    if pending.size:
        pc, pa, pb = pending, a[pending], b[pending]
        last_lo, last_hi = lo[pending].copy(), hi[pending].copy()
        lo[pending] = np.inf
        for d in range(1, max_depth + 1):
            m = 0.5 * (pa + pb)
            cc = np.concatenate([pc, pc])
            ca = np.concatenate([pa, m])
            cb = np.concatenate([m, pb])
            with np.errstate(all="ignore"):
                w = ev(ca, cb)
            wlo = np.broadcast_to(w.lo, ca.shape)
            whi = np.broadcast_to(w.hi, ca.shape)
            ok = wlo >= 0
            np.minimum.at(lo, cc[ok], wlo[ok])
            depth[cc] = d
            bad = ~ok
            pc, pa, pb = cc[bad], ca[bad], cb[bad]
            last_lo, last_hi = wlo[bad], whi[bad]
            if pc.size == 0:
                break
        if pc.size:
            u = np.unique(pc)
            failed[u] = True
            lo[u] = np.inf
            np.minimum.at(lo, pc, np.where(np.isnan(last_lo), -np.inf, last_lo))
            hi[u] = -np.inf
            np.maximum.at(hi, pc, last_hi)
    return lo, hi, failed, depth, refined


def _run_chunk(args):
    spec, i0, i1, max_depth = args
    a, b = _cell_edges(spec, i0, i1)
    lo, hi, failed, depth, refined = certify_cells(_evaluator(spec), a, b, max_depth)
    j = int(np.argmin(lo))
    fidx = np.flatnonzero(failed)
    return {
        "count": i1 - i0,
        "failures": [[int(i0 + k), float(lo[k]), float(hi[k])] for k in fidx.tolist()],
        "min": [int(i0 + j), float(lo[j]), float(hi[j])],
        "refined": int(refined),
        "max_depth": int(depth.max(initial=0)),
    }


def run_grid(spec: GridSpec, workers: int = 1, chunk: int = DEFAULT_CHUNK, max_depth: int = DEFAULT_DEPTH) -> GridReport:
    """Evaluate every cell ``[x_start + i*step, x_start + (i+1)*step]``."""
    t0 = time.perf_counter()
    jobs = [(spec, i, min(i + chunk, spec.cells), max_depth) for i in range(0, spec.cells, chunk)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, jobs))
    else:
        parts = [_run_chunk(j) for j in jobs]
    rep = GridReport(spec.id, spec.fn_id, [str(spec.x_start), str(spec.x_end)], label=spec.label)
    for p in parts:
        rep.cells_checked += p["count"]
        rep.failures.extend(p["failures"])
        rep.refined += p["refined"]
        rep.max_depth = max(rep.max_depth, p["max_depth"])
        if rep.min_lower_bound is None or p["min"][1] < rep.min_lower_bound[1]:
            rep.min_lower_bound = p["min"]
    rep.wall_time = time.perf_counter() - t0
    return rep


def tail_scan(fn_id: str, x_lo, x_hi, step="1/100", workers: int = 1, max_depth: int = DEFAULT_DEPTH) -> GridReport:
    """Nonnegativity of ``fn_id`` (or of a bivariate function's diagonal) on ``[x_lo, x_hi]``."""
    x_lo, x_hi, step = Fraction(x_lo), Fraction(x_hi), Fraction(step)
    if not x_lo < x_hi:
        raise ValueError("tail_scan needs x_lo < x_hi")
    cells = -(-(x_hi - x_lo) // step)
    arity = fl.FUNCTIONS[fn_id].arity
    mode = "bracket" if arity == "bivariate" else "univariate"
    spec = GridSpec(f"tail:{fn_id}", fn_id, x_lo, step, int(cells), mode, label=TAIL_LABEL)
    return run_grid(spec, workers=workers, max_depth=max_depth)


# ---------------------------------------------------------------- manifests
PAPER_GRIDS = [
    GridSpec("g1", "g1", 0, Fraction(1, 10**5), 700_000, paper_ref="Theorem 1.1 proof, Step 1 (0 <= i <= 699 999)"),
    GridSpec("h1", "h1", 0, Fraction(1, 10**6), 8_000_000, paper_ref="Theorem 1.1 proof, Step 2 (0 <= i <= 7 999 999)"),
    GridSpec("alpha", "alpha", Fraction("3.05"), Fraction(1, 10**5), 395_000, paper_ref="Theorem 1.2 proof, Step 1 (0 <= i <= 394 999)"),
    GridSpec("beta", "beta", Fraction("3.05"), Fraction(1, 10**5), 395_000, paper_ref="Theorem 1.2 proof, Step 2 (parameters of Step 1)"),
    GridSpec("gamma", "gamma", Fraction("3.05"), Fraction(1, 10**5), 395_000, paper_ref="Theorem 1.2 proof, Step 3 (parameters of Step 1)"),
    GridSpec("r", "r", Fraction("0.7"), Fraction(1, 10**3), 2_800, paper_ref="Proposition 5.9 (0 <= i <= 2 799)"),
]

PAPER_TAILS = [
    ("g1", 7, 30), ("h1", 8, 30), ("alpha", 7, 30), ("beta", 7, 30), ("gamma", 7, 30),
] + [(f"f{i}", Fraction("3.05"), 30) for i in range(1, 11)]


def paper_grid(grid_id: str) -> GridSpec:
    for g in PAPER_GRIDS:
        if g.id == grid_id:
            return g
    raise KeyError(f"unknown paper grid {grid_id!r}")


def manifest_dict(specs=PAPER_GRIDS) -> dict:
    return {
        "version": MANIFEST_VERSION,
        "grids": [s.to_json() for s in specs],
        "tails": [{"fn_id": f, "x_lo": str(Fraction(a)), "x_hi": str(Fraction(b)), "step": "1/100"} for f, a, b in PAPER_TAILS],
    }


def write_manifest(path, specs=PAPER_GRIDS):
    Path(path).write_text(json.dumps(manifest_dict(specs), indent=2))


def load_manifest(path) -> tuple[list[GridSpec], list[tuple]]:
    d = json.loads(Path(path).read_text())
    if d.get("version") != MANIFEST_VERSION:
        raise ValueError(f"unsupported manifest version {d.get('version')!r}")
    grids = [GridSpec.from_json(g) for g in d.get("grids", [])]
    tails = [(t["fn_id"], Fraction(t["x_lo"]), Fraction(t["x_hi"]), Fraction(t.get("step", "1/100"))) for t in d.get("tails", [])]
    return grids, tails


def bracket_spot_test(spec: GridSpec, samples: int = 1000, seed: int = 0, width=None) -> list:
    """Random ``t0 <= x <= t1`` triples with ``F(x,x)`` certainly below ``F(t0,t1)``.

    An empty list means the declared bracket property survived the sample.
    """
    fn = fl.FUNCTIONS[spec.fn_id].fn
    rng = np.random.default_rng(seed)
    lo, hi = float(spec.x_start), float(spec.x_end)
    w = float(width if width is not None else 50 * spec.step)
    t0 = rng.uniform(lo, hi - w, samples)
    t1 = t0 + rng.uniform(0, w, samples)
    x = t0 + rng.uniform(0, 1, samples) * (t1 - t0)
    with np.errstate(all="ignore"):
        diag = fn(Interval(x), Interval(x))
        br = fn(Interval(t0), Interval(t1))
    bad = np.flatnonzero(diag.hi < br.lo)
    return [(float(t0[k]), float(x[k]), float(t1[k])) for k in bad.tolist()]
