"""Command-line entry point: ``primebounds <subcommand>`` or ``python -m primebounds``.

Every flag can also be set through an environment variable with the
``PRIMEBOUNDS_`` prefix (``PRIMEBOUNDS_CEILING``, ``PRIMEBOUNDS_WORKERS``,
``PRIMEBOUNDS_CHUNK_SIZE``, ``PRIMEBOUNDS_PRECISION``, ``PRIMEBOUNDS_OUTPUT``,
``PRIMEBOUNDS_CHECKPOINT_DIR``); explicit flags win over the environment.

Exit codes: 0 clean, 1 violations found, 2 inconclusive, 3 capacity or
configuration error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import bound_catalog, formula_lib as fl, grid_verifier as gv, range_verifier as rv
from .prime_engine import HARD_CAP, ArgumentError, CapacityError, PrimeEngine

ENV_PREFIX = "PRIMEBOUNDS_"
EXIT_CLEAN, EXIT_VIOLATIONS, EXIT_INCONCLUSIVE, EXIT_CONFIG = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    ceiling: int = 10**9
    workers: int = 1
    chunk_size: int = gv.DEFAULT_CHUNK
    precision: str = "escalating"  # "standard" | "escalating"
    output: str = "human"  # "json" | "csv" | "human"
    checkpoint_dir: str | None = None
    resume: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if not 2 <= self.ceiling <= HARD_CAP:
            raise ConfigError(f"ceiling must lie in [2, 2**63], got {self.ceiling}")
        if self.chunk_size < 1000:
            raise ConfigError("chunk_size must be >= 1000")
        if self.precision not in ("standard", "escalating"):
            raise ConfigError(f"unknown precision mode {self.precision!r}")
        if self.output not in ("json", "csv", "human"):
            raise ConfigError(f"unknown output format {self.output!r}")

    @classmethod
    def from_sources(cls, args: argparse.Namespace, environ=os.environ) -> RunConfig:
        kw = {}
        casts = {"ceiling": _int, "workers": int, "chunk_size": _int, "precision": str, "output": str, "checkpoint_dir": str}
        for name, cast in casts.items():
            env = environ.get(ENV_PREFIX + name.upper())
            val = getattr(args, name, None)
            if val is not None:
                kw[name] = cast(val)
            elif env is not None:
                kw[name] = cast(env)
        kw["resume"] = bool(getattr(args, "resume", False)) or environ.get(ENV_PREFIX + "RESUME", "") in ("1", "true", "yes")
        return cls(**kw)

    def engine(self) -> PrimeEngine:
        return PrimeEngine(ceiling=self.ceiling, workers=self.workers)


def _int(s) -> int:
    """Integers with optional ``_`` separators or ``1e9`` style exponents."""
    s = str(s).replace("_", "")
    if "e" in s.lower():
        mant, exp = s.lower().split("e")
        return int(Fraction(mant) * 10 ** int(exp))
    return int(s)


def _range(s: str) -> tuple[int, int]:
    for sep in ("..", ":"):
        if sep in s:
            a, b = s.split(sep, 1)
            return _int(a), _int(b)
    raise ConfigError(f"range must look like LO:HI or LO..HI, got {s!r}")


def fmt_interval(x) -> str:
    lo, hi = float(np.asarray(x.lo)), float(np.asarray(x.hi))
    mid = 0.5 * (lo + hi)
    return f"{mid:.15g} (enclosure [{lo!r}, {hi!r}], width {hi - lo:.3g})"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--ceiling", help="largest prime value the sieve may enumerate (default 1e9)")
    common.add_argument("--workers", type=int, help="parallel worker processes (default 1)")
    common.add_argument("--chunk-size", dest="chunk_size", help="grid cells per work chunk")
    common.add_argument("--precision", choices=["standard", "escalating"])
    common.add_argument("--output", choices=["json", "csv", "human"])
    common.add_argument("--checkpoint-dir", dest="checkpoint_dir")
    common.add_argument("--resume", action="store_true")

    p = _Parser(prog="primebounds", description="Explicit p_n bound verification toolkit.", parents=[common])
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    s = sub.add_parser("nth", parents=[common], help="print the n-th prime")
    s.add_argument("n")
    s = sub.add_parser("pi", parents=[common], help="print pi(x)")
    s.add_argument("x")
    s = sub.add_parser("theta", parents=[common], help="enclosure of theta(p_n)")
    s.add_argument("n")

    b = sub.add_parser("bound", parents=[common], help="catalog bounds")
    bsub = b.add_subparsers(dest="bcmd", required=True, parser_class=_Parser)
    bsub.add_parser("list", parents=[common])
    s = bsub.add_parser("eval", parents=[common])
    s.add_argument("id")
    s.add_argument("n")
    s = bsub.add_parser("check", parents=[common])
    s.add_argument("id")
    s.add_argument("range")
    s = bsub.add_parser("threshold", parents=[common])
    s.add_argument("id")
    s.add_argument("horizon")

    pr = sub.add_parser("predicate", parents=[common], help="point predicates")
    psub = pr.add_subparsers(dest="pcmd", required=True, parser_class=_Parser)
    psub.add_parser("list", parents=[common])
    s = psub.add_parser("check", parents=[common])
    s.add_argument("id")
    s.add_argument("range")

    g = sub.add_parser("grid", parents=[common], help="grid certification")
    gsub = g.add_subparsers(dest="gcmd", required=True, parser_class=_Parser)
    s = gsub.add_parser("run", parents=[common])
    s.add_argument("target", help="manifest path, paper:<id>, or paper:all")
    s = gsub.add_parser("manifest", parents=[common], help="write the published grid manifest")
    s.add_argument("path")
    s = gsub.add_parser("tail", parents=[common], help="bounded-tail numeric scan")
    s.add_argument("fn_id")
    s.add_argument("x_lo")
    s.add_argument("x_hi")
    s.add_argument("--step", default="1/100")

    r = sub.add_parser("report", parents=[common], help="tables")
    rsub = r.add_subparsers(dest="rcmd", required=True, parser_class=_Parser)
    s = rsub.add_parser("mi-table", parents=[common])
    s.add_argument("--horizon", default=None, help="scan horizon (default min(pi(ceiling), 1e6))")
    s = rsub.add_parser("functions", parents=[common], help="function registry as JSON")

    sub.add_parser("selftest", parents=[common], help="identity and oracle checks")
    return p


# ---------------------------------------------------------------- commands
def _emit(cfg: RunConfig, human: str, payload: dict, csv_text: str | None = None):
    if cfg.output == "json":
        print(json.dumps(payload, indent=2, default=str))
    elif cfg.output == "csv" and csv_text is not None:
        print(csv_text, end="")
    else:
        print(human)


def _checkpoint(cfg: RunConfig, name: str):
    if cfg.checkpoint_dir is None:
        return None
    return str(Path(cfg.checkpoint_dir) / f"{name}.csv")


def cmd_nth(cfg, a):
    n = _int(a.n)
    p = cfg.engine().nth_prime(n)
    _emit(cfg, str(p), {"n": n, "p": p})
    return EXIT_CLEAN


def cmd_pi(cfg, a):
    x = _int(a.x)
    c = cfg.engine().prime_count(x)
    _emit(cfg, str(c), {"x": x, "pi": c})
    return EXIT_CLEAN


def cmd_theta(cfg, a):
    n = _int(a.n)
    eng = cfg.engine()
    batch = None
    for batch in eng.iter_batches(n, n, theta=True, checkpoint_path=_checkpoint(cfg, "theta"), resume=cfg.resume):
        pass
    th = batch.theta[0]
    p = int(batch.p[0])
    _emit(cfg, f"theta(p_{n} = {p}) = {fmt_interval(th)}", {"n": n, "p": p, "theta": [float(th.lo), float(th.hi)]})
    return EXIT_CLEAN


def cmd_bound(cfg, a):
    if a.bcmd == "list":
        rows = [b.to_json() for b in bound_catalog.registry()]
        human = "\n".join(
            f"{r['id']:32s} {r['target']:9s} {r['relation']:2s} threshold={r['threshold']}"
            + (" [conditional]" if r["conditional"] else "")
            for r in rows
        )
        _emit(cfg, human, {"bounds": rows})
        return EXIT_CLEAN
    if a.bcmd == "eval":
        n = _int(a.n)
        v = bound_catalog.eval_bound(a.id, n)
        _emit(cfg, fmt_interval(v), {"id": a.id, "n": n, "value": [float(v.lo), float(v.hi)]})
        return EXIT_CLEAN
    if a.bcmd == "check":
        return _check(cfg, a.id, *_range(a.range))
    if a.bcmd == "threshold":
        horizon = _int(a.horizon)
        res = rv.find_min_threshold(a.id, horizon, cfg.engine())
        payload = {
            "subject": a.id, "horizon": horizon, "threshold": res.threshold,
            "paper_threshold": res.paper_threshold, "last_violation": res.last_violation,
            "unresolved": res.unresolved,
        }
        _emit(cfg, str(res.threshold), payload)
        return EXIT_INCONCLUSIVE if res.unresolved else EXIT_CLEAN
    raise ConfigError(a.bcmd)


def _check(cfg, subject_id, n_lo, n_hi):
    rv.subject(subject_id)
    r = rv.verify_range(
        subject_id, n_lo, n_hi, cfg.engine(), escalation=cfg.precision == "escalating",
        checkpoint_path=_checkpoint(cfg, subject_id), resume=cfg.resume,
    )
    _emit(cfg, r.summary(), r.to_dict(), r.to_csv())
    return r.exit_code


def cmd_predicate(cfg, a):
    if a.pcmd == "list":
        rows = [
            {"id": p.id, "threshold": p.threshold, "min_n": p.min_n, "provenance": p.provenance}
            for p in rv.PREDICATES.values()
        ]
        _emit(cfg, "\n".join(f"{r['id']:12s} threshold={r['threshold']}  {r['provenance']}" for r in rows), {"predicates": rows})
        return EXIT_CLEAN
    return _check(cfg, a.id, *_range(a.range))


def cmd_grid(cfg, a):
    if a.gcmd == "manifest":
        gv.write_manifest(a.path)
        print(a.path)
        return EXIT_CLEAN
    if a.gcmd == "tail":
        rep = gv.tail_scan(a.fn_id, Fraction(a.x_lo), Fraction(a.x_hi), Fraction(a.step), workers=cfg.workers)
        _emit(cfg, rep.summary(), rep.to_dict())
        return rep.exit_code
    target = a.target
    tails = []
    if target == "paper:all":
        specs = list(gv.PAPER_GRIDS)
    elif target.startswith("paper:"):
        specs = [gv.paper_grid(target.split(":", 1)[1])]
    elif target in {g.id for g in gv.PAPER_GRIDS}:
        specs = [gv.paper_grid(target)]
    else:
        specs, tails = gv.load_manifest(target)
    reports = [gv.run_grid(s, workers=cfg.workers, chunk=cfg.chunk_size) for s in specs]
    reports += [gv.tail_scan(f, lo, hi, st, workers=cfg.workers) for f, lo, hi, st in tails]
    _emit(cfg, "\n".join(r.summary() for r in reports), {"reports": [r.to_dict() for r in reports]})
    return max((r.exit_code for r in reports), default=EXIT_CLEAN)


def cmd_report(cfg, a):
    if a.rcmd == "functions":
        print(fl.registry_json())
        return EXIT_CLEAN
    eng = cfg.engine()
    horizon = _int(a.horizon) if a.horizon else min(eng.pi_ceiling(), 10**6)
    ids = [f"H{i}" for i in range(1, 11)]
    res = rv.find_min_thresholds(ids, horizon, eng)
    rows, lines = [], [f"{'i':>3} {'B_i':>8} {'paper M_i':>15} {'found':>15}  status (horizon {horizon})"]
    code = EXIT_CLEAN
    for i, sid in enumerate(ids, start=1):
        r = res[sid]
        paper = rv.M_TABLE[i]
        if paper <= horizon:
            status = "reproduced" if r.threshold == paper else "MISMATCH"
            if r.threshold != paper:
                code = EXIT_VIOLATIONS
        else:
            status = f"not desk-verifiable (last violation in window: {r.last_violation})"
        if r.unresolved:
            status += f"; {len(r.unresolved)} unresolved"
            code = max(code, EXIT_INCONCLUSIVE)
        b = fl.C.B[i - 1]
        rows.append({"i": i, "B": str(b), "paper_M": paper, "found": r.threshold, "last_violation": r.last_violation, "status": status})
        found = f"{r.threshold:,}" if paper <= horizon else "-"
        lines.append(f"{i:>3} {float(b):>8g} {paper:>15,} {found:>15}  {status}")
    _emit(cfg, "\n".join(lines), {"horizon": horizon, "rows": rows})
    return code


def cmd_selftest(cfg, a):
    from . import selftest

    ok = selftest.run(verbose=cfg.output == "human")
    return EXIT_CLEAN if ok else EXIT_VIOLATIONS


COMMANDS = {
    "nth": cmd_nth, "pi": cmd_pi, "theta": cmd_theta, "bound": cmd_bound, "predicate": cmd_predicate,
    "grid": cmd_grid, "report": cmd_report, "selftest": cmd_selftest,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_CONFIG
    try:
        cfg = RunConfig.from_sources(args)
        return COMMANDS[args.cmd](cfg, args)
    except (CapacityError, ArgumentError, ConfigError, KeyError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
