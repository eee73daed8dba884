"""Compare the compiled and pure-Python validity kernels.

Each case is a valid inference over k atoms, so the kernel has to walk all
9**k assignments.  Run from the repository root:

    python3 benchmarks/bench_validity.py --ks 4 5 6 --repeat 3
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
import time

from belnap.syntax import Signature, parse_formula
from belnap.validity import KERNELS, check_validity


def case(k: int):
    atoms = [f"p{i}(a)" for i in range(k)]
    premise = parse_formula(" & ".join(atoms))
    conclusion = parse_formula(f"{atoms[0]} | {atoms[-1]}")
    return [premise], conclusion, Signature(("a",))


def time_kernel(kernel: str, k: int, repeat: int) -> dict:
    premises, conclusion, sig = case(k)
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        verdict = check_validity(premises, conclusion, sig, kernel=kernel)
        times.append(time.perf_counter() - start)
    assert verdict.valid and verdict.checked == 9**k
    best = min(times)
    return {"kernel": kernel, "k": k, "assignments": 9**k, "best_s": best,
            "median_s": statistics.median(times), "per_sec": 9**k / best}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--ks", type=int, nargs="+", default=[4, 5, 6])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--json", action="store_true", help="print rows as JSON lines")
    args = parser.parse_args(argv)

    if "compiled" not in KERNELS:
        print("compiled kernel not built; timing the Python kernel only", file=sys.stderr)
    rows = [time_kernel(kernel, k, args.repeat) for k in args.ks for kernel in KERNELS]
    if args.json:
        for row in rows:
            print(json.dumps(row))
        return 0
    print(f"{'k':>2}  {'assignments':>11}  {'kernel':<8}  {'best (s)':>9}  {'assign/s':>12}  speedup")
    by_k = {}
    for row in rows:
        by_k.setdefault(row["k"], {})[row["kernel"]] = row
    for k, kernels in by_k.items():
        base = kernels["python"]["best_s"]
        for name, row in kernels.items():
            print(f"{k:>2}  {row['assignments']:>11}  {name:<8}  {row['best_s']:>9.4f}  "
                  f"{row['per_sec']:>12.0f}  {base / row['best_s']:>6.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
