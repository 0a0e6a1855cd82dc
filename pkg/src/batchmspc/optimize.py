"""Batch-length / component-count search and backward variable selection.

The search minimizes healthy-data false alarms: the healthy signal is split
into a calibration part and a validation part, a model is calibrated on the
first and the second is monitored.  Fitness is the number of validation
batches that cross either alarm limit plus a small headroom term in [0, 0.01)
that orders candidates with equal counts (lower means more headroom).

The search itself is a plain integer genetic algorithm with tournament
selection, uniform crossover, bounded integer mutation and elitism.
"""

from __future__ import annotations

import csv
import logging
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BaseModelInadequateError,
    EmptyFaultSetError,
    InfeasibleBoundsError,
    IoFailureError,
    MspcError,
)
from .features import FeatureMatrix
from .ingest import SignalSeries
from .mspc import ModelBundle, chart_points, fit_bundle, signal_features

log = logging.getLogger(__name__)

DEFAULT_SPLIT = 0.7
MARGIN_WEIGHT = 0.01


def split_signal(signal: SignalSeries, ratio: float = DEFAULT_SPLIT) -> tuple[SignalSeries, SignalSeries]:
    if not 0 < ratio < 1:
        raise ValueError("split ratio must lie in (0, 1)")
    cut = int(round(len(signal) * ratio))
    return signal.slice(0, cut, ":cal"), signal.slice(cut, len(signal), ":val")


# -- fitness ------------------------------------------------------------------------


def validation_fitness(bundle: ModelBundle, X_val: FeatureMatrix) -> float:
    """Alarm count on validation rows plus the headroom tie-break."""
    points = chart_points(bundle, X_val)
    lim = bundle.limits
    exceed = sum(p.alarmed for p in points)
    ratios = [min(p.t2 / lim.t2_alarm, 1.0) + min(p.spex / lim.spex_alarm, 1.0) for p in points]
    margin = MARGIN_WEIGHT * float(np.mean(ratios)) / 2.0
    # keeps the headroom term strictly below one alarm's worth
    return exceed + min(margin, MARGIN_WEIGHT * (1 - 1e-12))


def fitness(
    k: int,
    n: int,
    normal_signal: SignalSeries,
    split_ratio: float = DEFAULT_SPLIT,
) -> float:
    """Healthy-data false-alarm fitness of batch length ``k`` with ``n`` components.

    Infeasible candidates (too few batches on either side of the split, no
    usable feature columns, degenerate statistics) score ``inf``.
    """
    cal, val = split_signal(normal_signal, split_ratio)
    if len(cal) // k < 2 or len(val) // k < 2:
        return math.inf
    try:
        bundle = fit_bundle(signal_features(cal, k, n))
        X_val = signal_features(val, k, n)
        return validation_fitness(bundle, X_val)
    except (MspcError, np.linalg.LinAlgError) as exc:
        log.debug("candidate k=%d n=%d infeasible: %s", k, n, exc)
        return math.inf


# -- genetic algorithm ----------------------------------------------------------------


@dataclass(frozen=True)
class GaConfig:
    k_bounds: tuple[int, int] = (1000, 8000)
    n_bounds: tuple[int, int] = (1, 8)
    population: int = 20
    generations: int = 30
    tournament_size: int = 3
    mutation_rate: float = 0.2
    elitism_count: int = 1
    seed: int = 0
    split_ratio: float = DEFAULT_SPLIT

    def validate(self) -> None:
        k_min, k_max = self.k_bounds
        n_min, n_max = self.n_bounds
        if k_min < 64 or k_max < k_min:
            raise InfeasibleBoundsError(f"k bounds {self.k_bounds} invalid (need 64 <= k_min <= k_max)")
        if n_min < 1 or n_max < n_min or n_max > k_min // 2:
            raise InfeasibleBoundsError(f"n bounds {self.n_bounds} invalid for k_min={k_min}")
        if self.population < 4:
            raise InfeasibleBoundsError("population must be at least 4")
        if self.generations < 1 or self.tournament_size < 1:
            raise InfeasibleBoundsError("generations and tournament_size must be positive")
        if not 0 <= self.mutation_rate < 1:
            raise InfeasibleBoundsError("mutation_rate must lie in [0, 1)")
        if not 0 <= self.elitism_count < self.population:
            raise InfeasibleBoundsError("elitism_count must be below the population size")


@dataclass
class GaResult:
    k_opt: int
    n_opt: int
    best_fitness: float
    history: list[float]
    trace: list[tuple[int, float, int, int]] = field(default_factory=list)
    final_population: list[tuple[int, int]] = field(default_factory=list)
    evaluations: dict[tuple[int, int], float] = field(default_factory=dict)


def _mutate(gene: int, low: int, high: int, rng: np.random.Generator) -> int:
    """Gaussian step of a tenth of the range, clipped; never a no-op unless low == high."""
    if low == high:
        return low
    step = max(1, int(round(abs(rng.normal(0.0, 0.1 * (high - low))))))
    step *= 1 if rng.random() < 0.5 else -1
    out = gene + step
    if out < low or out > high:
        out = gene - step
    return int(min(high, max(low, out)))


def ga_optimize(
    normal_signal: SignalSeries,
    cfg: GaConfig = GaConfig(),
    initial_population: list[tuple[int, int]] | None = None,
    fitness_fn=None,
) -> GaResult:
    """Search (k, n) jointly; returns the best individual ever evaluated."""
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    (k_lo, k_hi), (n_lo, n_hi) = cfg.k_bounds, cfg.n_bounds
    cache: dict[tuple[int, int], float] = {}

    def evaluate(ind: tuple[int, int]) -> float:
        if ind not in cache:
            if fitness_fn is None:
                cache[ind] = fitness(ind[0], ind[1], normal_signal, cfg.split_ratio)
            else:
                cache[ind] = fitness_fn(*ind)
        return cache[ind]

    if initial_population is not None:
        pop = [(int(k), int(n)) for k, n in initial_population]
        if any(not (k_lo <= k <= k_hi and n_lo <= n <= n_hi) for k, n in pop):
            raise InfeasibleBoundsError("initial population violates the bounds")
    else:
        pop = [
            (int(rng.integers(k_lo, k_hi + 1)), int(rng.integers(n_lo, n_hi + 1)))
            for _ in range(cfg.population)
        ]

    best: tuple[int, int] | None = None
    best_fit = math.inf
    history: list[float] = []
    trace = []

    for gen in range(cfg.generations + 1):
        scores = [evaluate(ind) for ind in pop]
        for ind, s in zip(pop, scores):
            # strict < keeps the earliest of equally fit individuals
            if best is None or s < best_fit:
                best, best_fit = ind, s
        history.append(best_fit)
        trace.append((gen, best_fit, best[0], best[1]))
        log.info("generation %d: best fitness %.6g at k=%d n=%d", gen, best_fit, *best)
        if gen == cfg.generations:
            break

        order = np.argsort(scores, kind="stable")
        nxt = [pop[i] for i in order[: cfg.elitism_count]]
        while len(nxt) < len(pop):
            parents = []
            for _ in range(2):
                contenders = rng.integers(0, len(pop), size=cfg.tournament_size)
                parents.append(pop[min(contenders, key=lambda i: (scores[i], i))])
            mask = rng.random(2) < 0.5
            child = [parents[0][g] if mask[g] else parents[1][g] for g in range(2)]
            if rng.random() < cfg.mutation_rate:
                child[0] = _mutate(child[0], k_lo, k_hi, rng)
            if rng.random() < cfg.mutation_rate:
                child[1] = _mutate(child[1], n_lo, n_hi, rng)
            nxt.append((int(child[0]), int(child[1])))
        pop = nxt

    return GaResult(
        k_opt=best[0],
        n_opt=best[1],
        best_fitness=best_fit,
        history=history,
        trace=trace,
        final_population=list(pop),
        evaluations=dict(cache),
    )


def write_trace_csv(result: GaResult, path: str | os.PathLike) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["generation", "best_fitness", "k", "n"])
            for gen, fit, k, n in result.trace:
                writer.writerow([gen, f"{fit:.17g}", k, n])
    except OSError as exc:
        raise IoFailureError(str(exc)) from exc


# -- backward variable selection ----------------------------------------------------------


def combined_ranks(t2_contribs, spex_contribs) -> np.ndarray:
    """Per-column sum of the T^2 and SPEx ranks (rank 1 = smallest mean squared contribution)."""
    t2 = np.atleast_2d(np.asarray(t2_contribs, dtype=float))
    sp = np.atleast_2d(np.asarray(spex_contribs, dtype=float))
    if t2.size == 0 or sp.size == 0:
        raise EmptyFaultSetError("need contributions for at least one fault batch")
    if t2.shape != sp.shape:
        raise ValueError("T2 and SPEx contribution arrays differ in shape")
    q = t2.shape[1]
    combined = np.zeros(q, dtype=int)
    for contrib in (t2, sp):
        ranks = np.empty(q, dtype=int)
        ranks[np.argsort(np.mean(contrib**2, axis=0), kind="stable")] = np.arange(1, q + 1)
        combined += ranks
    return combined


def rank_variables(t2_contribs, spex_contribs, columns: list[str] | None = None) -> list:
    """Order columns from least to most useful for explaining the faults.

    Ties at either ranking stage go to the earlier column.  Returns column
    names if ``columns`` is given, else column indices.
    """
    order = np.argsort(combined_ranks(t2_contribs, spex_contribs), kind="stable")
    if columns is None:
        return [int(i) for i in order]
    return [columns[i] for i in order]


@dataclass
class SelectionStep:
    column: str
    combined_rank: int
    accepted: bool


@dataclass
class SelectionResult:
    selected_columns: list[str]
    removal_trace: list[SelectionStep]
    final_n_pcs: int
    bundle: ModelBundle


@dataclass
class SelectionData:
    """Feature matrices the selection works on (all share one column set)."""

    calibration: FeatureMatrix
    validation: FeatureMatrix
    faults: list[FeatureMatrix]


def with_irrelevant_columns(data: SelectionData, count: int = 3, seed: int = 0) -> SelectionData:
    """Append ``count`` pure-noise columns ``junk1..`` to every matrix.

    On the calibration rows the noise is projected off the span of the centered
    real features, so its sample correlation with them is exactly zero.  The
    validation and fault rows get fresh draws at the same per-column spread.
    Used to check that backward selection discards columns that carry no
    fault information.
    """
    rng = np.random.default_rng(seed)
    names = [f"junk{i}" for i in range(1, count + 1)]
    C = data.calibration.values - data.calibration.values.mean(axis=0)
    u, s, _ = np.linalg.svd(C, full_matrices=False)
    u = u[:, s > 1e-9 * s[0]] if s.size and s[0] > 0 else u[:, :0]
    J = rng.normal(size=(C.shape[0], count))
    J -= J.mean(axis=0)
    J -= u @ (u.T @ J)
    spread = J.std(axis=0)

    def fresh(X: FeatureMatrix) -> FeatureMatrix:
        return X.with_columns(names, rng.normal(size=(X.n_rows, count)) * spread)

    return SelectionData(
        data.calibration.with_columns(names, J),
        fresh(data.validation),
        [fresh(X) for X in data.faults],
    )


def criterion_holds(bundle: ModelBundle, data: SelectionData) -> bool:
    """Every fault batch alarmed in at least one chart and no validation alarm."""
    if any(p.alarmed for p in chart_points(bundle, data.validation)):
        return False
    return all(p.alarmed for X in data.faults for p in chart_points(bundle, X))


def _fault_contributions(bundle: ModelBundle, data: SelectionData) -> tuple[np.ndarray, np.ndarray]:
    points = [p for X in data.faults for p in chart_points(bundle, X)]
    return np.array([p.t2_contrib for p in points]), np.array([p.spex_contrib for p in points])


def _refit(data: SelectionData, columns: list[str]) -> ModelBundle | None:
    try:
        return fit_bundle(data.calibration, columns)
    except (MspcError, np.linalg.LinAlgError):
        return None


def backward_select_matrices(
    data: SelectionData, columns: list[str] | None = None
) -> SelectionResult:
    """Drop the least useful column while detection and zero false alarms survive."""
    if not data.faults:
        raise EmptyFaultSetError("backward selection needs fault data")
    bundle = _refit(data, columns)
    if bundle is None or not criterion_holds(bundle, data):
        raise BaseModelInadequateError(
            "base model must alarm on every fault batch with no validation false alarm"
        )
    current = list(bundle.config.selected_columns)
    trace: list[SelectionStep] = []
    while len(current) > 1:
        t2c, spc = _fault_contributions(bundle, data)
        ranks = combined_ranks(t2c, spc)
        worst = int(np.argsort(ranks, kind="stable")[0])
        name, combined = current[worst], int(ranks[worst])
        candidate = [c for c in current if c != name]
        trial = _refit(data, candidate)
        ok = trial is not None and criterion_holds(trial, data)
        trace.append(SelectionStep(name, combined, ok))
        log.info("removing %s (combined rank %d): %s", name, combined, "accepted" if ok else "reverted")
        if not ok:
            break
        current, bundle = candidate, trial
    return SelectionResult(current, trace, bundle.pca.n_pcs, bundle)


@dataclass(frozen=True)
class SelectionConfig:
    batch_len: int
    n_components: int
    columns: list[str] | None = None
    split_ratio: float = DEFAULT_SPLIT


def selection_data(
    normal_signal: SignalSeries,
    fault_signals: list[SignalSeries],
    k: int,
    n: int,
    split_ratio: float = DEFAULT_SPLIT,
) -> SelectionData:
    cal, val = split_signal(normal_signal, split_ratio)
    return SelectionData(
        signal_features(cal, k, n),
        signal_features(val, k, n),
        [signal_features(s, k, n) for s in fault_signals],
    )


def backward_select(
    normal_signal: SignalSeries,
    fault_signals: list[SignalSeries],
    base_config: SelectionConfig,
) -> SelectionResult:
    data = selection_data(
        normal_signal, fault_signals, base_config.batch_len, base_config.n_components,
        base_config.split_ratio,
    )
    return backward_select_matrices(data, base_config.columns)
