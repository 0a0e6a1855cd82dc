"""Loading and writing single-channel vibration signals.

Signals live in plain CSV files holding one decimal value per line, with an
optional single header line.  Labels and sampling rates are kept in a sidecar
manifest (``path,label,sampling_rate_hz,source_id``).
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    EmptyFileError,
    InvalidSignalError,
    IoFailureError,
    ManifestError,
    MissingFileError,
    NonNumericSampleError,
)

FAULT_KINDS = ("ball", "inner", "outer")
MANIFEST_COLUMNS = ("path", "label", "sampling_rate_hz", "source_id")
MANIFEST_NAME = "manifest.csv"


@dataclass(frozen=True)
class Label:
    """Health label; ``kind is None`` means a normal (healthy) bearing."""

    kind: str | None = None
    diameter_in: float | None = None

    def __post_init__(self):
        if self.kind is None:
            if self.diameter_in is not None:
                raise ManifestError("a normal label carries no fault diameter")
        else:
            if self.kind not in FAULT_KINDS:
                raise ManifestError(f"unknown fault kind {self.kind!r}")
            if self.diameter_in is None or not self.diameter_in >= 0:
                raise ManifestError("fault labels need a non-negative diameter")

    @property
    def is_normal(self) -> bool:
        return self.kind is None

    @classmethod
    def normal(cls) -> "Label":
        return cls()

    @classmethod
    def fault(cls, kind: str, diameter_in: float) -> "Label":
        return cls(kind, float(diameter_in))

    @classmethod
    def parse(cls, text: str) -> "Label":
        """Parse ``normal`` or ``fault:<ball|inner|outer>:<diameter>``."""
        text = text.strip().lower()
        if text == "normal":
            return cls()
        parts = text.split(":")
        if len(parts) != 3 or parts[0] != "fault":
            raise ManifestError(f"cannot parse label {text!r}")
        try:
            diameter = float(parts[2])
        except ValueError:
            raise ManifestError(f"bad fault diameter in label {text!r}") from None
        return cls(parts[1], diameter)

    def __str__(self) -> str:
        if self.kind is None:
            return "normal"
        return f"fault:{self.kind}:{self.diameter_in:g}"


@dataclass(frozen=True)
class SignalSeries:
    samples: np.ndarray
    sampling_rate_hz: float
    label: Label = field(default_factory=Label)
    source_id: str = ""

    def __post_init__(self):
        samples = np.array(self.samples, dtype=float).ravel()
        if samples.size == 0:
            raise InvalidSignalError("signal has no samples")
        if not np.all(np.isfinite(samples)):
            raise InvalidSignalError("signal contains non-finite samples")
        if not (self.sampling_rate_hz > 0 and math.isfinite(self.sampling_rate_hz)):
            raise InvalidSignalError("sampling_rate_hz must be positive")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sampling_rate_hz", float(self.sampling_rate_hz))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sampling_rate_hz

    def slice(self, start: int, stop: int, source_suffix: str = "") -> "SignalSeries":
        return SignalSeries(
            self.samples[start:stop],
            self.sampling_rate_hz,
            self.label,
            self.source_id + source_suffix,
        )


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    label: Label
    sampling_rate_hz: float
    source_id: str

    def __post_init__(self):
        if not self.sampling_rate_hz > 0:
            raise ManifestError(f"{self.path}: sampling_rate_hz must be positive")


@dataclass
class DatasetManifest:
    entries: list[ManifestEntry] = field(default_factory=list)

    def __post_init__(self):
        paths = [e.path for e in self.entries]
        if len(set(paths)) != len(paths):
            raise ManifestError("manifest paths must be unique")

    def find(self, path: str | os.PathLike) -> ManifestEntry | None:
        name = Path(path).name
        for entry in self.entries:
            if entry.path == str(path) or Path(entry.path).name == name:
                return entry
        return None

    def upsert(self, entry: ManifestEntry) -> None:
        self.entries = [e for e in self.entries if e.path != entry.path]
        self.entries.append(entry)


def read_manifest(path: str | os.PathLike) -> DatasetManifest:
    path = Path(path)
    if not path.exists():
        raise MissingFileError(f"manifest not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or set(MANIFEST_COLUMNS) - set(reader.fieldnames):
            raise ManifestError(f"{path}: manifest needs columns {', '.join(MANIFEST_COLUMNS)}")
        entries = []
        for row in reader:
            try:
                rate = float(row["sampling_rate_hz"])
            except ValueError:
                raise ManifestError(f"{path}: bad sampling rate {row['sampling_rate_hz']!r}") from None
            entries.append(
                ManifestEntry(row["path"], Label.parse(row["label"]), rate, row["source_id"])
            )
    return DatasetManifest(entries)


def write_manifest(manifest: DatasetManifest, path: str | os.PathLike) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(MANIFEST_COLUMNS)
            for e in manifest.entries:
                writer.writerow([e.path, str(e.label), repr(e.sampling_rate_hz), e.source_id])
    except OSError as exc:
        raise IoFailureError(str(exc)) from exc


def _parse_sample(token: str) -> float | None:
    try:
        return float(token)
    except ValueError:
        return None


def load_signal(path: str | os.PathLike, entry: ManifestEntry) -> SignalSeries:
    """Read a one-value-per-line CSV into a :class:`SignalSeries`.

    A non-numeric first line is treated as a header.  NaN and infinity are
    rejected as non-numeric.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"signal file not found: {path}")
    try:
        lines = path.read_text(encoding="utf-8").split("\n")
    except OSError as exc:
        raise IoFailureError(str(exc)) from exc
    if lines and lines[-1] == "":
        lines.pop()

    values = []
    for lineno, raw in enumerate(lines, start=1):
        token = raw.strip().rstrip(",")
        value = _parse_sample(token)
        if value is None:
            if lineno == 1:
                continue
            raise NonNumericSampleError(lineno, token)
        if not math.isfinite(value):
            raise NonNumericSampleError(lineno, token)
        values.append(value)
    if not values:
        raise EmptyFileError(f"no samples in {path}")
    return SignalSeries(np.asarray(values), entry.sampling_rate_hz, entry.label, entry.source_id)


def write_signal(series: SignalSeries, path: str | os.PathLike, header: str | None = None) -> None:
    """Write samples with 17 significant digits so a reload is bit-identical."""
    body = "\n".join(f"{v:.17g}" for v in series.samples.tolist())
    text = (f"{header}\n" if header else "") + body + "\n"
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailureError(str(exc)) from exc


def resolve_entry(
    signal_path: str | os.PathLike,
    manifest_path: str | os.PathLike | None = None,
    sampling_rate_hz: float | None = None,
) -> ManifestEntry:
    """Find the manifest entry for ``signal_path``.

    Looks in ``manifest_path`` if given, else in a ``manifest.csv`` next to the
    signal.  Without any manifest the signal is taken as normal at
    ``sampling_rate_hz``.
    """
    signal_path = Path(signal_path)
    candidate = Path(manifest_path) if manifest_path else signal_path.parent / MANIFEST_NAME
    entry = None
    if candidate.exists():
        entry = read_manifest(candidate).find(signal_path)
    elif manifest_path:
        raise MissingFileError(f"manifest not found: {candidate}")
    if entry is None:
        if sampling_rate_hz is None:
            raise ManifestError(
                f"no manifest entry for {signal_path.name}; pass --sampling-rate"
            )
        return ManifestEntry(str(signal_path), Label.normal(), sampling_rate_hz, signal_path.stem)
    return entry
