"""Per-batch feature rows and their standardization.

Columns, in this fixed order, are for every component rank ``i``:
``FTi_mag`` (real amplitude), ``FTi_freq`` (Hz), ``FTi_var`` (population
standard deviation of the component waveform), then a final ``resid_var``
(population standard deviation of the residual).
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateColumnError,
    DimensionMismatchError,
    IoFailureError,
    TooFewBatchesError,
)
from .spectral import Batch, FtDecomposition, decompose

MIN_STD = 1e-12


def column_names(n: int) -> list[str]:
    names = []
    for i in range(1, n + 1):
        names += [f"FT{i}_mag", f"FT{i}_freq", f"FT{i}_var"]
    return names + ["resid_var"]


@dataclass(frozen=True)
class FeatureMatrix:
    values: np.ndarray
    column_names: list[str]
    batch_len: int
    n_components: int
    sampling_rate_hz: float

    def __post_init__(self):
        values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if values.shape[1] != len(self.column_names):
            raise DimensionMismatchError("column_names do not match matrix width")
        if len(set(self.column_names)) != len(self.column_names):
            raise DimensionMismatchError("column names must be unique")
        if not np.all(np.isfinite(values)):
            raise ValueError("feature matrix contains non-finite values")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "column_names", list(self.column_names))

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    def select(self, columns) -> "FeatureMatrix":
        missing = [c for c in columns if c not in self.column_names]
        if missing:
            raise DimensionMismatchError(f"unknown feature columns: {missing}")
        idx = [self.column_names.index(c) for c in columns]
        return FeatureMatrix(
            self.values[:, idx], list(columns), self.batch_len, self.n_components, self.sampling_rate_hz
        )

    def with_columns(self, names, values) -> "FeatureMatrix":
        """Append extra columns (used to build selection fixtures)."""
        values = np.asarray(values, dtype=float).reshape(self.n_rows, -1)
        return FeatureMatrix(
            np.hstack([self.values, values]),
            self.column_names + list(names),
            self.batch_len,
            self.n_components,
            self.sampling_rate_hz,
        )

    def to_csv(self, path: str | os.PathLike) -> None:
        try:
            with open(path, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(self.column_names)
                for row in self.values.tolist():
                    writer.writerow([f"{v:.17g}" for v in row])
        except OSError as exc:
            raise IoFailureError(str(exc)) from exc


@dataclass(frozen=True)
class ScalingParams:
    means: np.ndarray
    stds: np.ndarray

    def __post_init__(self):
        if np.any(np.asarray(self.stds) <= MIN_STD):
            raise ValueError("scaling stds must all exceed 1e-12")


def extract_row(d: FtDecomposition, fs: float | None = None) -> np.ndarray:
    # frequency_hz was fixed by decompose(); fs is accepted for symmetry only
    row = []
    for c in d.components:
        row += [c.amplitude, c.frequency_hz, float(np.std(c.waveform))]
    row.append(float(np.std(d.residual)))
    return np.asarray(row)


def feature_rows(batches: list[Batch], n: int, fs: float) -> FeatureMatrix:
    """Feature matrix for any number of batches (monitoring may see just one)."""
    rows = [extract_row(decompose(b, n, fs), fs) for b in batches]
    return FeatureMatrix(np.vstack(rows), column_names(n), len(batches[0]), n, fs)


def build_matrix(batches: list[Batch], n: int, fs: float) -> FeatureMatrix:
    if len(batches) < 2:
        raise TooFewBatchesError(f"need at least 2 batches, got {len(batches)}")
    return feature_rows(batches, n, fs)


def fit_scaler(X: FeatureMatrix) -> ScalingParams:
    means = X.values.mean(axis=0)
    stds = X.values.std(axis=0)
    for name, s in zip(X.column_names, stds):
        if s <= MIN_STD:
            raise DegenerateColumnError(name)
    return ScalingParams(means, stds)


def degenerate_columns(X: FeatureMatrix) -> list[str]:
    stds = X.values.std(axis=0)
    return [name for name, s in zip(X.column_names, stds) if s <= MIN_STD]


def apply_scaler(X: FeatureMatrix | np.ndarray, p: ScalingParams) -> np.ndarray:
    values = X.values if isinstance(X, FeatureMatrix) else np.asarray(X, dtype=float)
    if values.shape[-1] != p.means.size:
        raise DimensionMismatchError(
            f"matrix has {values.shape[-1]} columns, scaler expects {p.means.size}"
        )
    return (values - p.means) / p.stds


def invert_scaler(Z: np.ndarray, p: ScalingParams) -> np.ndarray:
    return np.asarray(Z) * p.stds + p.means
