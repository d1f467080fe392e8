"""Approximation ratio against the exact oracle on small random instances.

    python scripts/ratio_study.py --count 200 --required 6
"""

import argparse
import statistics

from linecover import SolverConfig, solve
from linecover.oracle import brute_force_optimal, random_instance

PROFILES = {"eulerian": 1, "connected": 1, "general": 2}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--required", type=int, default=6)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--raw", action="store_true", help="skip short-circuiting and 2-opt")
    args = ap.parse_args()
    cfg = SolverConfig(short_circuit=not args.raw, two_opt=not args.raw)
    print(f"{'profile':<10} {'n':>5} {'optimal':>8} {'mean':>8} {'p95':>8} {'worst':>8} {'lb/opt':>8}")
    for profile, comps in PROFILES.items():
        ratios, gaps = [], []
        for k in range(args.count):
            inst = random_instance(args.seed + k, args.required + 3, args.required, 4,
                                   profile=profile, components=comps)
            tour, rep = solve(inst, cfg)
            _, opt = brute_force_optimal(inst)
            ratios.append(tour.total_cost / opt)
            gaps.append(rep.lower_bound / opt)
        ratios.sort()
        exact = sum(r <= 1 + 1e-9 for r in ratios)
        p95 = ratios[int(0.95 * (len(ratios) - 1))]
        print(f"{profile:<10} {len(ratios):>5} {exact:>8} {statistics.fmean(ratios):>8.4f} {p95:>8.4f} "
              f"{ratios[-1]:>8.4f} {statistics.fmean(gaps):>8.4f}")


if __name__ == "__main__":
    main()
