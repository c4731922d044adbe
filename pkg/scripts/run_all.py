"""Run every experiment through the CLI and print one line per experiment.

Usage: python scripts/run_all.py [--threads N] [--out results]
"""

import argparse
import json
import sys
import time
from pathlib import Path

from psido import cli

ROOT = Path(__file__).resolve().parent.parent
ORDER = ("axioms", "compose", "parametrix", "sobolev", "resolvent_sweep", "powers", "psistar_scan")


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default=str(ROOT / "results"))
    args = p.parse_args(argv)
    worst = 0
    for name in ORDER:
        t0 = time.perf_counter()
        outdir = Path(args.out) / name
        code = cli.main(["run", "--config", str(ROOT / "configs" / f"{name}.json"),
                         "--output-dir", str(outdir), "--threads", str(args.threads)])
        summary = json.loads((outdir / "summary.json").read_text(encoding="utf-8"))
        n_pass = sum(c["pass"] for c in summary["checks"])
        print(f"{name:16s} exit={code} {n_pass}/{len(summary['checks'])} checks passed "
              f"({time.perf_counter() - t0:.1f}s)")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
