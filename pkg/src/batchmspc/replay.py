"""Replay a directory of labelled recordings through calibrate + monitor.

The directory holds single-column signal CSVs and a ``manifest.csv``
describing them (see :mod:`batchmspc.ingest`).  The first healthy record
is split: its head calibrates the model and its tail is monitored as held
out healthy data, together with every other record.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from .errors import ManifestError
from .ingest import MANIFEST_NAME, load_signal, read_manifest
from .mspc import ModelBundle, calibrate_bundle, monitor
from .optimize import DEFAULT_SPLIT, split_signal


@dataclass
class RecordOutcome:
    path: str
    label: str
    n_batches: int
    n_alarmed: int

    @property
    def is_normal(self) -> bool:
        return self.label == "normal"

    @property
    def ok(self) -> bool:
        # healthy: no alarm at all; fault: flagged at least once
        return self.n_alarmed == 0 if self.is_normal else self.n_alarmed > 0


@dataclass
class ReplayResult:
    bundle: ModelBundle
    records: list[RecordOutcome]

    @property
    def all_ok(self) -> bool:
        return all(r.ok for r in self.records)


def replay_directory(
    directory: str | os.PathLike,
    batch_len: int,
    n_components: int,
    split_ratio: float = DEFAULT_SPLIT,
) -> ReplayResult:
    directory = Path(directory)
    manifest = read_manifest(directory / MANIFEST_NAME)
    normal = [e for e in manifest.entries if e.label.is_normal]
    if not normal:
        raise ManifestError(f"{directory / MANIFEST_NAME} lists no healthy record")
    base = normal[0]
    cal, held = split_signal(load_signal(directory / base.path, base), split_ratio)
    bundle = calibrate_bundle(cal, batch_len, n_components)

    outcomes = []
    signals = [(f"{base.path}[held-out]", held)]
    signals += [(e.path, load_signal(directory / e.path, e)) for e in manifest.entries if e is not base]
    for name, signal in signals:
        points = monitor(bundle, signal)
        outcomes.append(
            RecordOutcome(name, str(signal.label), len(points), sum(p.alarmed for p in points))
        )
    return ReplayResult(bundle, outcomes)
