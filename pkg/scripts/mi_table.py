"""Re-derive the B_i / M_i table entries reachable under the sieve ceiling.

Entries whose M_i exceeds the horizon are reported as not desk-verifiable,
with the last violation seen in the scanned window.

    python3 scripts/mi_table.py --horizon 1e6
"""
from __future__ import annotations

import sys

from primebounds.cli import main

if __name__ == "__main__":
    sys.exit(main(["report", "mi-table", *sys.argv[1:]]))
