"""Desk-scale verification campaign: every catalog bound and predicate on [2, pi(ceiling)].

Writes one JSON report per subject plus a summary table.

    python3 scripts/run_campaign.py --ceiling 1e9 --out results/campaign
"""
from __future__ import annotations

import argparse
import json
from pathlib import Path

from primebounds import range_verifier as rv
from primebounds.cli import _int
from primebounds.prime_engine import PrimeEngine


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ceiling", default="1e9")
    ap.add_argument("--horizon", default=None, help="largest index to scan (default pi(ceiling))")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results/campaign")
    ap.add_argument("--subjects", nargs="*", default=None)
    args = ap.parse_args()

    eng = PrimeEngine(ceiling=_int(args.ceiling), workers=args.workers)
    horizon = _int(args.horizon) if args.horizon else eng.pi_ceiling()
    ids = args.subjects or rv.all_subject_ids()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    lo = min(rv.subject(s).min_n for s in ids)
    reports = rv.verify_many(ids, lo, horizon, eng, envelope=True)
    rows = []
    for sid in ids:
        r = reports[sid]
        (out / f"{sid}.json").write_text(r.to_json())
        th = rv.threshold_from_report(r, rv.subject(sid).threshold)
        rows.append({
            "subject": sid, "paper_threshold": th.paper_threshold, "found_threshold": th.threshold,
            "violations": r.violation_count, "last_violation": r.last_violation, "unresolved": len(r.unresolved),
        })
        print(f"{sid:30s} paper={th.paper_threshold!s:>15} found={th.threshold:>12} "
              f"violations={r.violation_count:>9} unresolved={len(r.unresolved)}")
    (out / "summary.json").write_text(json.dumps({"horizon": horizon, "rows": rows}, indent=2))
    print(f"wall time {next(iter(reports.values())).wall_time:.1f}s, reports in {out}")


if __name__ == "__main__":
    main()
