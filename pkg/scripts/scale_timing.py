"""Solve time per stage as the number of required edges grows.

    python scripts/scale_timing.py --sizes 100 200 400 600 --complete
"""

import argparse
import time

from linecover import SolverConfig, solve
from linecover.oracle import random_instance


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 100, 200, 400, 600])
    ap.add_argument("--profile", default="general", choices=["eulerian", "connected", "general"])
    ap.add_argument("--components", type=int, default=3)
    ap.add_argument("--complete", action="store_true", help="complete non-required graph")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print(f"{'required':>8} {'vertices':>8} {'edges':>8} {'seconds':>8} {'ratio':>7}  stages")
    for m in args.sizes:
        n = max(5 * m // 6, 2 * args.components + 2)
        inst = random_instance(args.seed, n, m, m // 2, profile=args.profile,
                               components=args.components, complete_nonrequired=args.complete)
        start = time.perf_counter()
        _, rep = solve(inst, SolverConfig())
        secs = time.perf_counter() - start
        stages = " ".join(f"{k}={v:.2f}" for k, v in rep.timings.items())
        print(f"{m:>8} {n:>8} {len(inst.edges):>8} {secs:>8.2f} {rep.ratio:>7.4f}  {stages}")


if __name__ == "__main__":
    main()
