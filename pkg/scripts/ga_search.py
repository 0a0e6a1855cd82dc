"""Search batch length and component count on the synthetic healthy signal.

    python3 scripts/ga_search.py --seed 0 --trace runs/ga_trace.csv

Prints the per-generation best and then checks the chosen (k, n) against the
fault fixture and the held-out healthy signal.
"""

import argparse
import time
from pathlib import Path

from batchmspc.mspc import calibrate_bundle, monitor
from batchmspc.optimize import GaConfig, ga_optimize, write_trace_csv
from batchmspc.synth import SynthParams, standard_fixture


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0, help="GA seed")
    ap.add_argument("--fixture-seed", type=int, default=0)
    ap.add_argument("--population", type=int, default=GaConfig.population)
    ap.add_argument("--generations", type=int, default=GaConfig.generations)
    ap.add_argument("--trace", type=Path, default=None)
    args = ap.parse_args()

    fx = standard_fixture(SynthParams(seed=args.fixture_seed))
    cfg = GaConfig(population=args.population, generations=args.generations, seed=args.seed)
    t0 = time.perf_counter()
    res = ga_optimize(fx.healthy, cfg)
    for gen, fit, k, n in res.trace:
        print(f"gen {gen:3d}  best {fit:.6f}  k={k} n={n}")
    print(f"k_opt={res.k_opt} n_opt={res.n_opt} after {len(res.evaluations)} evaluations, "
          f"{time.perf_counter() - t0:.1f}s")
    if args.trace:
        args.trace.parent.mkdir(parents=True, exist_ok=True)
        write_trace_csv(res, args.trace)

    bundle = calibrate_bundle(fx.healthy, res.k_opt, res.n_opt)
    fa = sum(p.alarmed for p in monitor(bundle, fx.holdout))
    hit = total = 0
    for s in fx.faults.values():
        pts = monitor(bundle, s)
        hit += sum(p.alarmed for p in pts)
        total += len(pts)
    print(f"held-out false alarms {fa}, fault batches alarmed {hit}/{total}")


if __name__ == "__main__":
    main()
