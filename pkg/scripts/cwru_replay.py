"""Replay converted CWRU drive-end records through calibrate + monitor.

The records are not bundled.  Convert each .mat file's DE channel to a
one-column CSV and list them in ``manifest.csv`` next to them, e.g.::

    path,label,sampling_rate_hz,source_id
    normal_0.csv,normal,12000,97
    IR007_0.csv,fault:inner:0.007,12000,105

then run ``python3 scripts/cwru_replay.py DIR``.  The first healthy record
is split 70/30 into calibration and held-out data.
"""

import argparse
import sys

from batchmspc.optimize import DEFAULT_SPLIT
from batchmspc.replay import replay_directory


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("directory")
    ap.add_argument("--batch-len", type=int, default=5180)
    ap.add_argument("--components", type=int, default=4)
    ap.add_argument("--split", type=float, default=DEFAULT_SPLIT)
    args = ap.parse_args()

    res = replay_directory(args.directory, args.batch_len, args.components, args.split)
    b = res.bundle
    print(f"k={args.batch_len} n={args.components}: {len(b.config.selected_columns)} columns, "
          f"{b.pca.n_pcs} PCs")
    for r in res.records:
        print(f"{'ok ' if r.ok else 'BAD'} {r.path:28s} {r.label:20s} {r.n_alarmed}/{r.n_batches} alarmed")
    print("reference optima for comparison: k=5180, 4 FT components, 6 selected variables")
    return 0 if res.all_ok else 2


if __name__ == "__main__":
    sys.exit(main())
