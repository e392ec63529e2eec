"""Certify every paper grid and run the bounded-tail scans.

    python3 scripts/certify_grids.py --workers 1 --out results/grids.json
"""
from __future__ import annotations

import argparse
import json
from pathlib import Path

from primebounds import grid_verifier as gv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--max-depth", type=int, default=gv.DEFAULT_DEPTH)
    ap.add_argument("--skip-tails", action="store_true")
    ap.add_argument("--out", default="results/grids.json")
    args = ap.parse_args()

    reports = []
    for spec in gv.PAPER_GRIDS:
        rep = gv.run_grid(spec, workers=args.workers, max_depth=args.max_depth)
        print(rep.summary())
        reports.append(rep)
    if not args.skip_tails:
        for fid, lo, hi in gv.PAPER_TAILS:
            rep = gv.tail_scan(fid, lo, hi, workers=args.workers)
            print(rep.summary())
            reports.append(rep)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text(json.dumps([r.to_dict() for r in reports], indent=2))
    bad = [r.spec_id for r in reports if not r.certified]
    print("all certified" if not bad else f"NOT certified: {bad}")
    raise SystemExit(0 if not bad else 2)


if __name__ == "__main__":
    main()
