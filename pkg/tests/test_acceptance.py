"""Acceptance criteria, one test per criterion.

Each test records a ``PASS``/``FAIL`` line (shown in the pytest summary and
printed when run with ``-s``) and then asserts, so a failing criterion is
red in both places.  Tolerances are the ones the criteria state.
"""

import os
import time

import numpy as np
import pytest

from batchmspc import model_store
from batchmspc.errors import MspcError
from batchmspc.features import column_names
from batchmspc.mspc import (
    calibrate_bundle,
    monitor,
    signal_features,
    spex_contributions,
    spex_score,
    t2_score,
)
from batchmspc.optimize import (
    GaConfig,
    backward_select_matrices,
    criterion_holds,
    ga_optimize,
    selection_data,
    with_irrelevant_columns,
)
from batchmspc.pca import correlation_eigenvalues, fit_pca, project, select_n_pcs
from batchmspc.replay import replay_directory
from batchmspc.spectral import decompose, dft
from batchmspc.synth import SynthParams, generate_normal, standard_fixture

from .conftest import ACCEPTANCE_LINES, FIXTURE_K, FIXTURE_N
from .oracles import direct_dft, eig_pca


def verdict(cid, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {cid}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_c01_dft_oracle():
    sizes = [10, 31, 100, 257, 1024, 5180]
    rng = np.random.default_rng(1)
    worst, fast_time = 0.0, 0.0
    for i in range(50):
        x = rng.normal(size=sizes[i % len(sizes)])
        t0 = time.perf_counter()
        c = dft(x).coefficients
        fast_time += time.perf_counter() - t0
        worst = max(worst, float(np.max(np.abs(c - direct_dft(x)))))
    verdict(
        "C1 DFT oracle",
        worst < 1e-9 and fast_time < 5.0,
        f"50 vectors, max abs err {worst:.2e} (<1e-9), transform time {fast_time:.3f}s (<5s)",
    )


def test_c02_decomposition_identity():
    rng = np.random.default_rng(2)
    worst, monotone = 0.0, True
    for _ in range(100):
        k = int(rng.integers(16, 1025))
        x = rng.normal(size=k) + np.sin(2 * np.pi * rng.uniform(1, k / 2) * np.arange(k) / k)
        energies = []
        for n in range(1, 7):
            d = decompose(x, n, 1000.0)
            worst = max(worst, float(np.max(np.abs(d.reconstruct() - x))))
            energies.append(float(np.sum(d.residual**2)))
        monotone &= all(b <= a * (1 + 1e-12) + 1e-12 for a, b in zip(energies, energies[1:]))
    verdict(
        "C2 decomposition identity",
        worst < 1e-9 and monotone,
        f"100 batches, max reconstruction err {worst:.2e} (<1e-9), residual energy non-increasing={monotone}",
    )


def test_c03_feature_shape(fixture_signals):
    X = signal_features(fixture_signals.healthy, FIXTURE_K, 4)
    expected = []
    for i in range(1, 5):
        expected += [f"FT{i}_mag", f"FT{i}_freq", f"FT{i}_var"]
    expected.append("resid_var")
    ok = X.values.shape[1] == 13 and X.column_names == expected == column_names(4)
    verdict("C3 feature shape", ok, f"n=4 gives {X.values.shape[1]} columns in fixed order")


def test_c04_pca_dual_route():
    rng = np.random.default_rng(4)
    err_p = err_orth = err_t2 = 0.0
    for _ in range(20):
        A = rng.normal(size=(50, 13))
        Z = (A - A.mean(0)) / A.std(0)
        n_pcs = select_n_pcs(correlation_eigenvalues(Z))
        m = fit_pca(Z, n_pcs)
        P, lam = eig_pca(Z, n_pcs)
        err_p = max(err_p, float(np.max(np.abs(m.loadings - P))), float(np.max(np.abs(m.score_variances - lam))))
        err_orth = max(err_orth, float(np.max(np.abs(m.loadings.T @ m.loadings - np.eye(n_pcs)))))
        err_t2 = max(err_t2, abs(float(np.mean(t2_score(m, Z))) - n_pcs))
    ok = err_p < 1e-8 and err_orth < 1e-9 and err_t2 < 1e-9
    verdict(
        "C4 PCA dual route",
        ok,
        f"SVD vs eig {err_p:.2e} (<1e-8), |P'P-I| {err_orth:.2e} (<1e-9), |mean T2 - n_pcs| {err_t2:.2e} (<1e-9)",
    )


def test_c05_spex_identities():
    rng = np.random.default_rng(5)
    e_norm = e_contrib = e_full = 0.0
    for _ in range(20):
        A = rng.normal(size=(50, 13)) @ rng.normal(size=(13, 13))
        Z = (A - A.mean(0)) / A.std(0)
        m = fit_pca(Z, int(rng.integers(1, 13)))
        sp = spex_score(m, Z)
        t = project(m, Z)
        e_norm = max(e_norm, float(np.max(np.abs(sp - (np.sum(Z**2, 1) - np.sum(t**2, 1))))))
        e_contrib = max(e_contrib, float(np.max(np.abs(spex_contributions(m, Z).sum(1) - sp))))
        full = fit_pca(Z, 13)
        e_full = max(e_full, float(np.max(np.abs(spex_score(full, Z)))))
    ok = e_norm < 1e-9 and e_contrib < 1e-9 and e_full < 1e-9
    verdict(
        "C5 SPEx identities",
        ok,
        f"|SPEx-(|z|^2-|t|^2)| {e_norm:.2e}, |sum contrib - SPEx| {e_contrib:.2e}, full-rank SPEx {e_full:.2e} (all <1e-9)",
    )


def test_c06_limits_and_reload(tmp_path, fixture_signals, fixture_bundle):
    cal = monitor(fixture_bundle, fixture_signals.healthy)
    alarms = sum(p.alarmed for p in cal)
    path = tmp_path / "model.json"
    model_store.save(fixture_bundle, path)
    again = monitor(model_store.load(path), fixture_signals.healthy)
    diff = max(
        max(abs(a.t2 - b.t2), abs(a.spex - b.spex)) for a, b in zip(cal, again)
    )
    ok = len(cal) >= 20 and alarms == 0 and diff <= 1e-12
    verdict(
        "C6 limit behavior",
        ok,
        f"{len(cal)} calibration batches, {alarms} above alarm limits, reload max diff {diff:.1e} (<=1e-12)",
    )


def test_c07_end_to_end_detection():
    t0 = time.perf_counter()
    fx = standard_fixture()
    bundle = calibrate_bundle(fx.healthy, FIXTURE_K, FIXTURE_N)
    held = monitor(bundle, fx.holdout)
    false_alarms = sum(p.alarmed for p in held)
    detected = total = 0
    for signal in fx.faults.values():
        pts = monitor(bundle, signal)
        detected += sum(p.alarmed for p in pts)
        total += len(pts)
    elapsed = time.perf_counter() - t0
    ok = detected == total and false_alarms == 0 and elapsed < 30.0
    verdict(
        "C7 end-to-end detection",
        ok,
        f"fault batches alarmed {detected}/{total}, held-out false alarms {false_alarms}/{len(held)}, "
        f"runtime {elapsed:.2f}s (<30s)",
    )


def test_c08_calibration_speed():
    signal = generate_normal(SynthParams(duration_s=10.0, seed=8))
    assert len(signal) == 120_000
    t0 = time.perf_counter()
    calibrate_bundle(signal, FIXTURE_K, FIXTURE_N)
    elapsed = time.perf_counter() - t0
    verdict("C8 calibration speed", elapsed < 2.0, f"120000 samples calibrated in {elapsed:.3f}s (<2s)")


@pytest.fixture(scope="module")
def ga_runs(fixture_signals):
    cfg = GaConfig(seed=0)
    return cfg, ga_optimize(fixture_signals.healthy, cfg), ga_optimize(fixture_signals.healthy, cfg)


def test_c09_ga_contract(ga_runs):
    cfg, a, b = ga_runs
    same = (a.k_opt, a.n_opt) == (b.k_opt, b.n_opt)
    monotone = all(y <= x for x, y in zip(a.history, a.history[1:]))
    dominates = all(a.best_fitness <= a.evaluations[ind] for ind in a.final_population)
    (k_lo, k_hi), (n_lo, n_hi) = cfg.k_bounds, cfg.n_bounds
    in_bounds = all(k_lo <= k <= k_hi and n_lo <= n <= n_hi for k, n in a.evaluations)
    ok = same and monotone and dominates and in_bounds
    verdict(
        "C9 GA contract",
        ok,
        f"(k_opt, n_opt)=({a.k_opt}, {a.n_opt}) repeatable={same}, history non-increasing={monotone}, "
        f"best <= final population={dominates}, {len(a.evaluations)} evaluations in bounds={in_bounds}",
    )


def test_c10_backward_selection(fixture_signals):
    base = selection_data(
        fixture_signals.healthy, list(fixture_signals.faults.values()), FIXTURE_K, FIXTURE_N
    )
    r = backward_select_matrices(with_irrelevant_columns(base, 3, seed=0))
    junk_left = [c for c in r.selected_columns if c.startswith("junk")]
    rejected = [i for i, s in enumerate(r.removal_trace) if not s.accepted]
    terminal = rejected in ([], [len(r.removal_trace) - 1])
    holds = criterion_holds(r.bundle, with_irrelevant_columns(base, 3, seed=0))
    # sensitivity to the noise draw, reported only
    robust = 0
    for seed in range(10):
        try:
            rs = backward_select_matrices(with_irrelevant_columns(base, 3, seed=seed))
            robust += not any(c.startswith("junk") for c in rs.selected_columns)
        except MspcError:
            pass
    ok = not junk_left and terminal and holds
    verdict(
        "C10 backward selection",
        ok,
        f"kept {r.selected_columns}, irrelevant left {junk_left}, rejected step terminal={terminal}, "
        f"criterion holds={holds}; junk seeds 0-9 fully removed in {robust}/10 (info)",
    )


CWRU_DIR = os.environ.get("MSPC_CWRU_DIR")


@pytest.mark.skipif(not CWRU_DIR, reason="set MSPC_CWRU_DIR to a converted CWRU directory")
def test_c11_cwru_replay():
    k = int(os.environ.get("MSPC_CWRU_K", "5180"))
    n = int(os.environ.get("MSPC_CWRU_N", "4"))
    res = replay_directory(CWRU_DIR, k, n)
    bad = [r.path for r in res.records if not r.ok]
    verdict(
        "C11 CWRU replay",
        res.all_ok,
        f"k={k}, n={n}, {len(res.records)} records, failing {bad}; "
        f"reference optima k=5180, 4 FT components, 6 selected variables (not asserted)",
    )
