"""Hotelling's T^2 and SPEx charts, contributions, limits and monitoring."""

from __future__ import annotations

import csv
import enum
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConfigMismatchError,
    DegenerateSpreadError,
    DimensionMismatchError,
    IoFailureError,
    LabelError,
    TooFewBatchesError,
)
from .features import (
    FeatureMatrix,
    ScalingParams,
    apply_scaler,
    build_matrix,
    degenerate_columns,
    feature_rows,
    fit_scaler,
)
from .ingest import SignalSeries
from .pca import PcaModel, correlation_eigenvalues, fit_pca, project, reconstruct, select_n_pcs
from .spectral import segment

WARNING_SIGMAS = 2.0
ALARM_SIGMAS = 3.0


class Status(enum.IntEnum):
    IN_CONTROL = 0
    WARNING = 1
    ALARM = 2

    @property
    def label(self) -> str:
        return {0: "InControl", 1: "Warning", 2: "Alarm"}[self.value]

    @classmethod
    def from_label(cls, text: str) -> "Status":
        return {"InControl": cls.IN_CONTROL, "Warning": cls.WARNING, "Alarm": cls.ALARM}[text]


@dataclass(frozen=True)
class ControlLimits:
    t2_warning: float
    t2_alarm: float
    spex_warning: float
    spex_alarm: float
    t2_basis: tuple[float, float]
    spex_basis: tuple[float, float]

    def t2_status(self, value: float) -> Status:
        return _status(value, self.t2_warning, self.t2_alarm)

    def spex_status(self, value: float) -> Status:
        return _status(value, self.spex_warning, self.spex_alarm)


def _status(value: float, warning: float, alarm: float) -> Status:
    if value > alarm:
        return Status.ALARM
    if value > warning:
        return Status.WARNING
    return Status.IN_CONTROL


@dataclass(frozen=True)
class ChartPoint:
    batch_index: int
    t2: float
    spex: float
    t2_status: Status
    spex_status: Status
    t2_contrib: np.ndarray
    spex_contrib: np.ndarray

    @property
    def alarmed(self) -> bool:
        return Status.ALARM in (self.t2_status, self.spex_status)


@dataclass(frozen=True)
class BundleConfig:
    batch_len: int
    n_components: int
    selected_columns: list[str]
    sampling_rate_hz: float


@dataclass(frozen=True)
class ModelBundle:
    scaler: ScalingParams
    pca: PcaModel
    limits: ControlLimits
    config: BundleConfig

    def __post_init__(self):
        q = len(self.config.selected_columns)
        if not (self.scaler.means.size == self.scaler.stds.size == self.pca.n_features == q):
            raise DimensionMismatchError("scaler, PCA and selected columns disagree in size")


# -- statistics -----------------------------------------------------------------


def _residual(m: PcaModel, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    t = project(m, z)
    return t, z - reconstruct(m, t)


def t2_score(m: PcaModel, z):
    t = project(m, np.asarray(z, dtype=float))
    return np.sum(t**2 / m.score_variances, axis=-1)


def spex_score(m: PcaModel, z):
    _, e = _residual(m, np.asarray(z, dtype=float))
    return np.sum(e**2, axis=-1)


def t2_contributions(m: PcaModel, z, conventional: bool = False) -> np.ndarray:
    """Per-feature T^2 contributions.

    Default: sum_j (t_j / lambda_j) p_ij (z_i - zhat_i), the residual-weighted
    form.  ``conventional=True`` uses z_i in place of the residual, for which
    the entries sum to T^2.
    """
    z = np.asarray(z, dtype=float)
    t, e = _residual(m, z)
    weight = (t / m.score_variances) @ m.loadings.T
    return weight * (z if conventional else e)


def spex_contributions(m: PcaModel, z) -> np.ndarray:
    _, e = _residual(m, np.asarray(z, dtype=float))
    return e**2


def calibrate_limits(t2_values, spex_values) -> ControlLimits:
    """Warning at mean + 2 sigma, alarm at mean + 3 sigma (population sigma)."""
    t2_values = np.asarray(t2_values, dtype=float)
    spex_values = np.asarray(spex_values, dtype=float)
    if t2_values.size < 2 or spex_values.size < 2:
        raise TooFewBatchesError("control limits need at least 2 calibration batches")
    bases = []
    for name, values in (("T2", t2_values), ("SPEx", spex_values)):
        mean, std = float(values.mean()), float(values.std())
        if not std > 1e-12 * max(1.0, abs(mean)):
            raise DegenerateSpreadError(f"{name} calibration values have zero spread")
        bases.append((mean, std))
    (tm, ts), (sm, ss) = bases
    return ControlLimits(
        t2_warning=tm + WARNING_SIGMAS * ts,
        t2_alarm=tm + ALARM_SIGMAS * ts,
        spex_warning=sm + WARNING_SIGMAS * ss,
        spex_alarm=sm + ALARM_SIGMAS * ss,
        t2_basis=(tm, ts),
        spex_basis=(sm, ss),
    )


# -- model building ---------------------------------------------------------------


def fit_bundle(
    X: FeatureMatrix,
    columns: list[str] | None = None,
    n_pcs: int | None = None,
) -> ModelBundle:
    """Scale, fit PCA and set limits on a healthy feature matrix.

    Without ``columns``, every non-constant column is used.  Without
    ``n_pcs``, the PC count comes from the Kaiser rule.
    """
    if columns is None:
        dropped = set(degenerate_columns(X))
        columns = [c for c in X.column_names if c not in dropped]
    Xs = X.select(columns)
    scaler = fit_scaler(Xs)
    Z = apply_scaler(Xs, scaler)
    if n_pcs is None:
        n_pcs = min(select_n_pcs(correlation_eigenvalues(Z)), Z.shape[0] - 1, Z.shape[1])
    model = fit_pca(Z, n_pcs)
    limits = calibrate_limits(t2_score(model, Z), spex_score(model, Z))
    config = BundleConfig(X.batch_len, X.n_components, list(columns), X.sampling_rate_hz)
    return ModelBundle(scaler, model, limits, config)


def signal_features(signal: SignalSeries, k: int, n: int) -> FeatureMatrix:
    return build_matrix(segment(signal, k), n, signal.sampling_rate_hz)


def calibrate_bundle(
    signal: SignalSeries,
    k: int,
    n: int,
    columns: list[str] | None = None,
    n_pcs: int | None = None,
) -> ModelBundle:
    """Offline modeling on healthy data only; fault-labeled input is refused."""
    if not signal.label.is_normal:
        raise LabelError(f"calibration needs healthy data, got label {signal.label}")
    return fit_bundle(signal_features(signal, k, n), columns, n_pcs)


# -- monitoring -----------------------------------------------------------------


def chart_points(
    bundle: ModelBundle, X: FeatureMatrix, conventional_t2: bool = False
) -> list[ChartPoint]:
    Z = apply_scaler(X.select(bundle.config.selected_columns), bundle.scaler)
    m, lim = bundle.pca, bundle.limits
    t2 = t2_score(m, Z)
    spex = spex_score(m, Z)
    t2c = t2_contributions(m, Z, conventional=conventional_t2)
    spc = spex_contributions(m, Z)
    return [
        ChartPoint(
            i, float(t2[i]), float(spex[i]),
            lim.t2_status(t2[i]), lim.spex_status(spex[i]),
            t2c[i], spc[i],
        )
        for i in range(Z.shape[0])
    ]


def monitor(bundle: ModelBundle, signal: SignalSeries, conventional_t2: bool = False) -> list[ChartPoint]:
    cfg = bundle.config
    if not math.isclose(signal.sampling_rate_hz, cfg.sampling_rate_hz, rel_tol=1e-12):
        raise ConfigMismatchError(
            f"signal sampled at {signal.sampling_rate_hz} Hz, model expects {cfg.sampling_rate_hz} Hz"
        )
    X = feature_rows(segment(signal, cfg.batch_len), cfg.n_components, cfg.sampling_rate_hz)
    return chart_points(bundle, X, conventional_t2)


# -- chart CSV --------------------------------------------------------------------


CHART_COLUMNS = [
    "batch_index", "t2", "t2_status", "spex", "spex_status",
    "t2_warning", "t2_alarm", "spex_warning", "spex_alarm",
]


@dataclass
class ChartTable:
    """Chart rows as read back from CSV (what the report step consumes)."""

    batch_index: np.ndarray
    t2: np.ndarray
    spex: np.ndarray
    t2_status: list[Status]
    spex_status: list[Status]
    limits: dict[str, float] = field(default_factory=dict)

    def __len__(self) -> int:
        return self.batch_index.size


def write_chart_csv(points: list[ChartPoint], bundle: ModelBundle, path: str | os.PathLike) -> None:
    names = bundle.config.selected_columns
    lim = bundle.limits
    header = CHART_COLUMNS + [f"t2c_{c}" for c in names] + [f"spexc_{c}" for c in names]
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for p in points:
                writer.writerow(
                    [p.batch_index, f"{p.t2:.17g}", p.t2_status.label, f"{p.spex:.17g}", p.spex_status.label]
                    + [f"{v:.17g}" for v in (lim.t2_warning, lim.t2_alarm, lim.spex_warning, lim.spex_alarm)]
                    + [f"{v:.17g}" for v in p.t2_contrib]
                    + [f"{v:.17g}" for v in p.spex_contrib]
                )
    except OSError as exc:
        raise IoFailureError(str(exc)) from exc


def read_chart_csv(path: str | os.PathLike) -> ChartTable:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        return ChartTable(np.array([], dtype=int), np.array([]), np.array([]), [], [])
    limits = {k: float(rows[0][k]) for k in ("t2_warning", "t2_alarm", "spex_warning", "spex_alarm")}
    return ChartTable(
        np.array([int(r["batch_index"]) for r in rows]),
        np.array([float(r["t2"]) for r in rows]),
        np.array([float(r["spex"]) for r in rows]),
        [Status.from_label(r["t2_status"]) for r in rows],
        [Status.from_label(r["spex_status"]) for r in rows],
        limits,
    )
