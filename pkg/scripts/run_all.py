"""Run every default suite of the command line tool and write one JSON report per suite.

    python scripts/run_all.py --out reports --jobs 4
"""

import argparse
import sys
from pathlib import Path

from qcert.cli import main as qcert

SUITES = [
    ["identity"],
    ["identity-param"],
    ["induction"],
    ["congruence", "--family", "refined"],
    ["congruence", "--family", "weak"],
    ["congruence", "--family", "param", "--n", "3..11"],
    ["lemmas"],
    ["classical"],
    ["corollary"],
    ["corollary", "--p", "3", "--r", "2"],
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="reports")
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    worst = 0
    for suite in SUITES:
        name = "-".join(s.lstrip("-") for s in suite).replace(".", "")
        code = qcert(suite + ["--jobs", str(args.jobs), "--json", str(out / f"{name}.json")])
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
