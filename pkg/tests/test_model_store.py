import json

import numpy as np
import pytest

from batchmspc import model_store
from batchmspc.errors import CorruptModelError, IoFailureError, VersionMismatchError
from batchmspc.mspc import monitor


def test_roundtrip_bit_exact(tmp_path, fixture_bundle, fixture_signals):
    p = tmp_path / "m.json"
    model_store.save(fixture_bundle, p)
    back = model_store.load(p)
    assert np.array_equal(back.pca.loadings, fixture_bundle.pca.loadings)
    assert np.array_equal(back.scaler.stds, fixture_bundle.scaler.stds)
    assert back.limits == fixture_bundle.limits
    assert back.config == fixture_bundle.config
    a = monitor(fixture_bundle, fixture_signals.holdout)
    b = monitor(back, fixture_signals.holdout)
    assert [p.t2 for p in a] == [p.t2 for p in b]
    assert [p.spex for p in a] == [p.spex for p in b]


def test_version_mismatch(tmp_path, fixture_bundle):
    doc = model_store.to_dict(fixture_bundle)
    doc["format_version"] = 99
    p = tmp_path / "m.json"
    p.write_text(json.dumps(doc))
    with pytest.raises(VersionMismatchError):
        model_store.load(p)


def test_truncated_file(tmp_path, fixture_bundle):
    p = tmp_path / "m.json"
    model_store.save(fixture_bundle, p)
    p.write_text(p.read_text()[:200])
    with pytest.raises(CorruptModelError):
        model_store.load(p)


def test_dimension_disagreement(tmp_path, fixture_bundle):
    doc = model_store.to_dict(fixture_bundle)
    doc["config"]["selected_columns"] = doc["config"]["selected_columns"][:-1]
    with pytest.raises(CorruptModelError):
        model_store.from_dict(doc)


def test_not_a_model(tmp_path):
    with pytest.raises(CorruptModelError):
        model_store.from_dict({"hello": 1})
    with pytest.raises(IoFailureError):
        model_store.load(tmp_path / "missing.json")
