#!/usr/bin/env python3
"""Run every registry entry and verify its recorded facts.

Usage: python scripts/run_suite.py [outdir]

Writes one subdirectory per entry (report.json plus trajectory/plot
artifacts where applicable) and a summary.json, then exits nonzero if any
recorded fact failed to re-derive.
"""

import sys

from interlace.pipelines import run_suite


def main():
    outdir = sys.argv[1] if len(sys.argv) > 1 else "out/suite"
    summary = run_suite(outdir)
    for row in summary["entries"]:
        state = "ok" if row["facts_ok"] else "FAIL"
        print(f"{row['name']:22s} [{row['kind']}] {state}")
    print("all facts verified" if summary["all_ok"] else "FAILURES", "->", outdir)
    return 0 if summary["all_ok"] else 1


if __name__ == "__main__":
    sys.exit(main())
