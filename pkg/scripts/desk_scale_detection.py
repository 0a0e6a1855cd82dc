"""Calibrate on the synthetic healthy signal and chart every fixture signal.

    python3 scripts/desk_scale_detection.py --out runs/desk

Writes one chart CSV and a pair of SVGs per signal, and prints a detection
table.  ``--seeds`` repeats the held-out false-alarm count over several
fixture seeds to show how often a mean+3 sigma limit is crossed by chance.
"""

import argparse
import time
from dataclasses import replace
from pathlib import Path

from batchmspc import model_store
from batchmspc.mspc import calibrate_bundle, monitor, write_chart_csv
from batchmspc.report import write_report
from batchmspc.synth import SynthParams, standard_fixture


def run(out: Path, k: int, n: int, seed: int) -> None:
    t0 = time.perf_counter()
    fx = standard_fixture(SynthParams(seed=seed))
    bundle = calibrate_bundle(fx.healthy, k, n)
    out.mkdir(parents=True, exist_ok=True)
    model_store.save(bundle, out / "model.json")
    print(f"columns {bundle.config.selected_columns}, n_pcs {bundle.pca.n_pcs}")
    signals = {"healthy": fx.healthy, "holdout": fx.holdout}
    signals.update({f"{kind}_{amp:g}": s for (kind, amp), s in fx.faults.items()})
    print(f"{'signal':12s} {'batches':>7s} {'alarmed':>7s}")
    for name, s in signals.items():
        pts = monitor(bundle, s)
        chart = out / f"{name}_chart.csv"
        write_chart_csv(pts, bundle, chart)
        write_report(chart, out / name)
        print(f"{name:12s} {len(pts):7d} {sum(p.alarmed for p in pts):7d}")
    print(f"done in {time.perf_counter() - t0:.2f}s")


def seed_sweep(k: int, n: int, seeds: int) -> None:
    clean = 0
    for seed in range(seeds):
        fx = standard_fixture(replace(SynthParams(), seed=seed), amplitudes=())
        bundle = calibrate_bundle(fx.healthy, k, n)
        fa = sum(p.alarmed for p in monitor(bundle, fx.holdout))
        clean += fa == 0
        print(f"seed {seed:3d}: held-out false alarms {fa}")
    print(f"{clean}/{seeds} seeds without a held-out false alarm")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("runs/desk"))
    ap.add_argument("--batch-len", type=int, default=5000)
    ap.add_argument("--components", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--seeds", type=int, default=0, help="also sweep this many fixture seeds")
    args = ap.parse_args()
    run(args.out, args.batch_len, args.components, args.seed)
    if args.seeds:
        seed_sweep(args.batch_len, args.components, args.seeds)


if __name__ == "__main__":
    main()
