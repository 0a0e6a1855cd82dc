"""Save and load a calibrated :class:`~batchmspc.mspc.ModelBundle` as JSON.

Schema (``format_version`` 1)::

    {
      "format": "batchmspc-model",
      "format_version": 1,
      "config":  {"batch_len": int, "n_components": int,
                  "selected_columns": [str, ...], "sampling_rate_hz": float},
      "scaler":  {"means": ARRAY, "stds": ARRAY},
      "pca":     {"loadings": ARRAY, "score_variances": ARRAY, "n_pcs": int,
                  "explained_variance_ratio": ARRAY, "eigenvalues": ARRAY,
                  "calibration_rows": int},
      "limits":  {"t2_warning": float, "t2_alarm": float,
                  "spex_warning": float, "spex_alarm": float,
                  "t2_basis": [mean, std], "spex_basis": [mean, std]}
    }

where ``ARRAY`` is ``{"shape": [d0, ...], "data": [row-major floats]}``.
Floats are written in Python's shortest round-trip form, so a reload is
bit-identical.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .errors import CorruptModelError, IoFailureError, VersionMismatchError
from .features import ScalingParams
from .mspc import BundleConfig, ControlLimits, ModelBundle
from .pca import PcaModel

FORMAT_NAME = "batchmspc-model"
FORMAT_VERSION = 1


def _array(a: np.ndarray) -> dict:
    a = np.asarray(a, dtype=float)
    return {"shape": list(a.shape), "data": a.ravel().tolist()}


def _unarray(obj: dict, name: str) -> np.ndarray:
    try:
        shape = tuple(int(d) for d in obj["shape"])
        data = np.asarray(obj["data"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptModelError(f"bad array field {name!r}: {exc}") from None
    if data.size != int(np.prod(shape)):
        raise CorruptModelError(f"array {name!r}: {data.size} values for shape {shape}")
    return data.reshape(shape)


def to_dict(bundle: ModelBundle) -> dict:
    cfg, sc, m, lim = bundle.config, bundle.scaler, bundle.pca, bundle.limits
    return {
        "format": FORMAT_NAME,
        "format_version": FORMAT_VERSION,
        "config": {
            "batch_len": int(cfg.batch_len),
            "n_components": int(cfg.n_components),
            "selected_columns": list(cfg.selected_columns),
            "sampling_rate_hz": float(cfg.sampling_rate_hz),
        },
        "scaler": {"means": _array(sc.means), "stds": _array(sc.stds)},
        "pca": {
            "loadings": _array(m.loadings),
            "score_variances": _array(m.score_variances),
            "n_pcs": int(m.n_pcs),
            "explained_variance_ratio": _array(m.explained_variance_ratio),
            "eigenvalues": _array(m.eigenvalues),
            "calibration_rows": int(m.calibration_rows),
        },
        "limits": {
            "t2_warning": lim.t2_warning,
            "t2_alarm": lim.t2_alarm,
            "spex_warning": lim.spex_warning,
            "spex_alarm": lim.spex_alarm,
            "t2_basis": list(lim.t2_basis),
            "spex_basis": list(lim.spex_basis),
        },
    }


def from_dict(doc: dict) -> ModelBundle:
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_NAME:
        raise CorruptModelError("not a batchmspc model document")
    version = doc.get("format_version")
    if not isinstance(version, int):
        raise CorruptModelError("missing format_version")
    if version != FORMAT_VERSION:
        raise VersionMismatchError(
            f"model format_version {version} is not supported (expected {FORMAT_VERSION})"
        )
    try:
        c, s, p, l = doc["config"], doc["scaler"], doc["pca"], doc["limits"]
        config = BundleConfig(
            int(c["batch_len"]),
            int(c["n_components"]),
            [str(x) for x in c["selected_columns"]],
            float(c["sampling_rate_hz"]),
        )
        scaler = ScalingParams(_unarray(s["means"], "means"), _unarray(s["stds"], "stds"))
        pca = PcaModel(
            loadings=_unarray(p["loadings"], "loadings"),
            score_variances=_unarray(p["score_variances"], "score_variances"),
            n_pcs=int(p["n_pcs"]),
            explained_variance_ratio=_unarray(p["explained_variance_ratio"], "explained_variance_ratio"),
            eigenvalues=_unarray(p["eigenvalues"], "eigenvalues"),
            calibration_rows=int(p["calibration_rows"]),
        )
        limits = ControlLimits(
            float(l["t2_warning"]),
            float(l["t2_alarm"]),
            float(l["spex_warning"]),
            float(l["spex_alarm"]),
            tuple(float(v) for v in l["t2_basis"]),
            tuple(float(v) for v in l["spex_basis"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptModelError(f"malformed model document: {exc}") from None
    q = len(config.selected_columns)
    if pca.loadings.shape != (q, pca.n_pcs) or pca.score_variances.shape != (pca.n_pcs,):
        raise CorruptModelError("PCA dimensions disagree with the selected columns")
    try:
        return ModelBundle(scaler, pca, limits, config)
    except ValueError as exc:
        raise CorruptModelError(str(exc)) from None


def save(bundle: ModelBundle, path: str | os.PathLike) -> None:
    text = json.dumps(to_dict(bundle), indent=1)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    except OSError as exc:
        raise IoFailureError(str(exc)) from exc


def load(path: str | os.PathLike) -> ModelBundle:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise IoFailureError(str(exc)) from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptModelError(f"unreadable model file: {exc}") from None
    return from_dict(doc)
