"""Bearing fault detection with batch-wise Fourier features and PCA control charts."""

from .errors import MspcError
from .ingest import DatasetManifest, Label, ManifestEntry, SignalSeries, load_signal, write_signal
from .features import FeatureMatrix, ScalingParams, apply_scaler, build_matrix, fit_scaler
from .mspc import (
    ChartPoint,
    ControlLimits,
    ModelBundle,
    Status,
    calibrate_bundle,
    calibrate_limits,
    monitor,
    spex_contributions,
    spex_score,
    t2_contributions,
    t2_score,
)
from .pca import PcaModel, fit_pca, project, reconstruct, select_n_pcs
from .spectral import decompose, dft, idft, segment
from .synth import FaultSpec, SynthParams, generate_fault, generate_normal

__version__ = "0.1.0"
