import math
from dataclasses import replace

import numpy as np
import pytest

from batchmspc.errors import BaseModelInadequateError, EmptyFaultSetError, InfeasibleBoundsError
from batchmspc.optimize import (
    GaConfig,
    _mutate,
    backward_select_matrices,
    combined_ranks,
    fitness,
    ga_optimize,
    rank_variables,
    selection_data,
    split_signal,
    with_irrelevant_columns,
    write_trace_csv,
)

from .conftest import FIXTURE_K, FIXTURE_N


def bowl(k, n):
    # smooth synthetic landscape with its minimum at (3000, 3)
    return ((k - 3000) / 1000.0) ** 2 + (n - 3) ** 2


CFG = GaConfig(k_bounds=(1000, 8000), n_bounds=(1, 8), population=12, generations=15, seed=3)


def test_ga_deterministic_and_monotone():
    a = ga_optimize(None, CFG, fitness_fn=bowl)
    b = ga_optimize(None, CFG, fitness_fn=bowl)
    assert (a.k_opt, a.n_opt) == (b.k_opt, b.n_opt)
    assert a.history == b.history
    assert all(y <= x for x, y in zip(a.history, a.history[1:]))
    assert len(a.history) == CFG.generations + 1


def test_ga_best_dominates_and_bounds():
    r = ga_optimize(None, CFG, fitness_fn=bowl)
    assert all(r.best_fitness <= bowl(*ind) for ind in r.final_population)
    for k, n in r.evaluations:
        assert 1000 <= k <= 8000 and 1 <= n <= 8
    assert r.best_fitness == min(r.evaluations.values())
    assert r.n_opt == 3 and abs(r.k_opt - 3000) < 500


def test_ga_degenerate_population():
    cfg = GaConfig(k_bounds=(2000, 2000), n_bounds=(2, 2), population=4, generations=3)
    r = ga_optimize(None, cfg, fitness_fn=bowl)
    assert (r.k_opt, r.n_opt) == (2000, 2)
    assert list(r.evaluations) == [(2000, 2)]


def test_ga_initial_population_checked():
    with pytest.raises(InfeasibleBoundsError):
        ga_optimize(None, CFG, initial_population=[(10, 1)] * 12, fitness_fn=bowl)


@pytest.mark.parametrize(
    "change",
    [dict(k_bounds=(5000, 1000)), dict(n_bounds=(0, 3)), dict(population=2), dict(mutation_rate=1.0)],
)
def test_bad_ga_config(change):
    with pytest.raises(InfeasibleBoundsError):
        ga_optimize(None, replace(CFG, **change), fitness_fn=bowl)


def test_mutate_stays_in_bounds(rng):
    for _ in range(500):
        g = _mutate(int(rng.integers(1, 9)), 1, 8, rng)
        assert 1 <= g <= 8
    assert _mutate(5, 5, 5, rng) == 5


def test_trace_csv(tmp_path):
    r = ga_optimize(None, CFG, fitness_fn=bowl)
    p = tmp_path / "trace.csv"
    write_trace_csv(r, p)
    lines = p.read_text().splitlines()
    assert lines[0] == "generation,best_fitness,k,n"
    assert len(lines) == CFG.generations + 2


def test_fitness_on_fixture(fixture_signals):
    f = fitness(FIXTURE_K, FIXTURE_N, fixture_signals.healthy)
    assert 0 <= f < 1
    # too few validation batches
    assert fitness(40_000, 2, fixture_signals.healthy) == math.inf


def test_split(fixture_signals):
    cal, val = split_signal(fixture_signals.healthy)
    assert len(cal) == 84_000 and len(val) == 36_000
    with pytest.raises(ValueError):
        split_signal(fixture_signals.healthy, 1.0)


def test_combined_ranks_example():
    t2 = np.array([[1.0, 3.0, 2.0], [1.0, 3.0, 2.0]])
    sp = np.array([[3.0, 1.0, 2.0], [3.0, 1.0, 2.0]])
    assert combined_ranks(t2, sp).tolist() == [4, 4, 4]
    assert rank_variables(t2, sp, ["a", "b", "c"]) == ["a", "b", "c"]
    sp2 = np.array([[1.0, 2.0, 3.0]])
    assert combined_ranks(t2[:1], sp2).tolist() == [2, 5, 5]
    assert rank_variables(t2[:1], sp2) == [0, 1, 2]


def test_combined_ranks_errors():
    with pytest.raises(EmptyFaultSetError):
        combined_ranks(np.zeros((0, 3)), np.zeros((0, 3)))


@pytest.fixture(scope="module")
def selection(fixture_signals):
    return selection_data(fixture_signals.healthy, list(fixture_signals.faults.values()), FIXTURE_K, FIXTURE_N)


def test_irrelevant_columns_decorrelated(selection):
    d = with_irrelevant_columns(selection, 3, seed=0)
    C = d.calibration.values
    real, junk = C[:, :-3] - C[:, :-3].mean(0), C[:, -3:]
    assert np.max(np.abs(real.T @ junk)) < 1e-9
    assert d.validation.column_names[-3:] == ["junk1", "junk2", "junk3"]


def test_backward_selection_contract(selection):
    d = with_irrelevant_columns(selection, 3, seed=0)
    r = backward_select_matrices(d)
    assert not any(c.startswith("junk") for c in r.selected_columns)
    rejected = [i for i, s in enumerate(r.removal_trace) if not s.accepted]
    assert rejected in ([], [len(r.removal_trace) - 1])
    assert r.bundle.config.selected_columns == r.selected_columns


def test_backward_selection_needs_faults(selection):
    with pytest.raises(EmptyFaultSetError):
        backward_select_matrices(replace(selection, faults=[]))


def test_backward_selection_rejects_blind_base(selection):
    # healthy "faults" are never all alarmed
    with pytest.raises(BaseModelInadequateError):
        backward_select_matrices(replace(selection, faults=[selection.validation]))
