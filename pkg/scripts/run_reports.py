#!/usr/bin/env python3
"""Drive every CLI command once and collect the JSON reports in ./reports.

Usage: python3 scripts/run_reports.py [output_dir]
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from kforge.cli import main  # noqa: E402

RUNS = [
    ["axioms", "--omega", "1:1,2:-1"],
    ["axioms", "--omega", "1:1,2:-1,twist=3:1"],
    ["primes", "--p", "5", "--n", "0", "--M", "5", "--limit", "200"],
    ["kappa", "--p", "5", "--n", "0", "--M", "5", "--s", "11", "--seed", "42"],
    ["factorize", "--p", "5", "--n", "0", "--M", "5", "--q", "11,31", "--seed", "42"],
    ["decompose", "--p", "7", "--n", "0"],
]


def run_all(out_dir: pathlib.Path) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    worst = 0
    for i, args in enumerate(RUNS):
        target = out_dir / f"{i:02d}_{args[0]}.json"
        code = main(args + ["--out", str(target)])
        print(f"-> {target} (exit {code})", file=sys.stderr)
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    out = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else pathlib.Path("reports")
    raise SystemExit(run_all(out))
