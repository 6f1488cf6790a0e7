"""Run the full verification suite and write a JSON report."""
import argparse
import sys

from grassqkz.config import SUITES, SuiteConfig
from grassqkz.suite import run_suite

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=5)
    ap.add_argument("--only", nargs="*", choices=SUITES)
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--output", default="suite_report.json")
    a = ap.parse_args()
    cfg = SuiteConfig(max_n=a.max_n, which=frozenset(a.only or SUITES), workers=a.workers, output=a.output)
    rep = run_suite(cfg)
    with open(a.output, "w") as fh:
        fh.write(rep.dumps() + "\n")
    print(rep.text())
    sys.exit(0 if rep.passed else 1)
