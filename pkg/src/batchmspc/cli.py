"""Command-line interface: ``batchmspc synth|calibrate|monitor|select-vars|report``.

Exit codes: 0 success (and, for ``monitor``, no alarm), 2 at least one alarm
during ``monitor``, 1 any error.  Set ``MSPC_LOG=DEBUG`` (or INFO, WARNING...)
for log output on stderr.
"""

from __future__ import annotations

import csv
import functools
import logging
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import model_store
from .errors import LabelError, MspcError
from .ingest import (
    MANIFEST_NAME,
    DatasetManifest,
    ManifestEntry,
    load_signal,
    read_manifest,
    resolve_entry,
    write_manifest,
    write_signal,
)
from .mspc import calibrate_bundle, monitor, read_chart_csv, write_chart_csv
from .optimize import (
    DEFAULT_SPLIT,
    GaConfig,
    SelectionConfig,
    backward_select,
    ga_optimize,
    write_trace_csv,
)
from .report import RunReport, summarize, write_report
from .synth import SynthParams, fault_preset, generate_fault, generate_normal

EXIT_ALARM = 2
EXIT_ERROR = 1

log = logging.getLogger("batchmspc")


def _configure_logging() -> None:
    level = os.environ.get("MSPC_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def _guard(fn):
    """Turn library errors into a one-line diagnostic and exit code 1."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except MspcError as exc:
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(EXIT_ERROR)

    return wrapper


def _load(path, manifest, sampling_rate):
    return load_signal(path, resolve_entry(path, manifest, sampling_rate))


manifest_opt = click.option(
    "--manifest", type=click.Path(dir_okay=False), default=None,
    help=f"Manifest CSV (default: {MANIFEST_NAME} next to the signal).",
)
rate_opt = click.option(
    "--sampling-rate", type=float, default=None,
    help="Sampling rate in Hz for signals without a manifest entry.",
)


@click.group()
def main():
    """Batch-wise Fourier features + PCA control charts for bearing fault detection."""
    _configure_logging()


@main.command()
@click.option("--kind", type=click.Choice(["normal", "ball", "inner", "outer"]), default="normal")
@click.option("--amplitude", type=float, default=1.0, show_default=True, help="Fault impulse amplitude.")
@click.option("--duration", type=float, default=10.0, show_default=True, help="Seconds.")
@click.option("--sampling-rate", type=float, default=12_000.0, show_default=True)
@click.option("--shaft-hz", type=float, default=SynthParams.shaft_hz, show_default=True)
@click.option("--noise", type=float, default=SynthParams.noise_sigma, show_default=True)
@click.option("--load-depth", type=float, default=SynthParams.load_depth, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Signal CSV to write.")
@_guard
def synth(kind, amplitude, duration, sampling_rate, shaft_hz, noise, load_depth, seed, out):
    """Write a synthetic signal and register it in the sidecar manifest."""
    p = SynthParams(
        sampling_rate_hz=sampling_rate, duration_s=duration, shaft_hz=shaft_hz,
        noise_sigma=noise, seed=seed, load_depth=load_depth,
    )
    if kind == "normal":
        series = generate_normal(p)
    else:
        series = generate_fault(p, fault_preset(kind, amplitude, shaft_hz))
    out = Path(out)
    write_signal(series, out)
    manifest_path = out.parent / MANIFEST_NAME
    manifest = read_manifest(manifest_path) if manifest_path.exists() else DatasetManifest()
    manifest.upsert(ManifestEntry(out.name, series.label, series.sampling_rate_hz, series.source_id))
    write_manifest(manifest, manifest_path)
    click.echo(f"wrote {len(series)} samples ({series.label}) to {out}")


@main.command()
@click.argument("normal_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--batch-len", type=int, default=5000, show_default=True)
@click.option("--components", type=int, default=4, show_default=True)
@click.option("--optimize", is_flag=True, help="Choose batch length and components by GA.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--split", type=float, default=DEFAULT_SPLIT, show_default=True)
@click.option("--k-min", type=int, default=GaConfig.k_bounds[0], show_default=True)
@click.option("--k-max", type=int, default=GaConfig.k_bounds[1], show_default=True)
@click.option("--n-max", type=int, default=GaConfig.n_bounds[1], show_default=True)
@click.option("--population", type=int, default=GaConfig.population, show_default=True)
@click.option("--generations", type=int, default=GaConfig.generations, show_default=True)
@click.option("--tournament-size", type=int, default=GaConfig.tournament_size, show_default=True)
@click.option("--mutation-rate", type=float, default=GaConfig.mutation_rate, show_default=True)
@click.option("--elitism", type=int, default=GaConfig.elitism_count, show_default=True)
@click.option("--trace", type=click.Path(dir_okay=False), default=None, help="GA trace CSV.")
@click.option("--model", "--out", "model_path", type=click.Path(dir_okay=False), required=True)
@manifest_opt
@rate_opt
@_guard
def calibrate(normal_csv, batch_len, components, optimize, seed, split, k_min, k_max, n_max,
              population, generations, tournament_size, mutation_rate, elitism, trace,
              model_path, manifest, sampling_rate):
    """Fit scaler, PCA and control limits on a healthy signal."""
    entry = resolve_entry(normal_csv, manifest, sampling_rate)
    if not entry.label.is_normal:
        raise LabelError(f"{normal_csv} is labelled {entry.label}; calibration uses healthy data only")
    signal = load_signal(normal_csv, entry)
    k, n = batch_len, components
    if optimize:
        cfg = GaConfig(
            k_bounds=(k_min, k_max), n_bounds=(1, n_max), population=population,
            generations=generations, tournament_size=tournament_size,
            mutation_rate=mutation_rate, elitism_count=elitism, seed=seed, split_ratio=split,
        )
        result = ga_optimize(signal, cfg)
        k, n = result.k_opt, result.n_opt
        click.echo(f"GA optimum: k_opt={k} n_opt={n} fitness={result.best_fitness:.6g}")
        if trace:
            write_trace_csv(result, trace)
    bundle = calibrate_bundle(signal, k, n)
    model_store.save(bundle, model_path)

    m = bundle.pca
    click.echo(f"batch length {k}, {n} FT components, {len(bundle.config.selected_columns)} features")
    dropped = len(bundle.config.selected_columns) != 3 * n + 1
    if dropped:
        click.echo("constant columns dropped; using: " + ", ".join(bundle.config.selected_columns))
    cum = np.cumsum(m.explained_variance_ratio)
    for j, (r, c) in enumerate(zip(m.explained_variance_ratio, cum), start=1):
        mark = "*" if j <= m.n_pcs else " "
        click.echo(f" {mark} PC{j:<3d} eigenvalue {m.eigenvalues[j - 1]:8.4f}  explained {r:6.2%}  cumulative {c:6.2%}")
    click.echo(f"n_pcs = {m.n_pcs} (eigenvalue >= 1), cumulative explained {cum[m.n_pcs - 1]:.2%}")
    click.echo(f"model written to {model_path}")


def _print_summary(summary):
    for stat in ("t2", "spex"):
        counts = summary[stat]
        click.echo(f"{stat:5s} " + "  ".join(f"{k}={v}" for k, v in counts.items()))


@main.command(name="monitor")
@click.argument("signal_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Chart CSV to write.")
@click.option("--conventional-t2", is_flag=True, help="Use z_i instead of the residual in T^2 contributions.")
@manifest_opt
@rate_opt
@_guard
def monitor_cmd(signal_csv, model_path, out, conventional_t2, manifest, sampling_rate):
    """Project a signal onto a calibrated model and write its control chart."""
    bundle = model_store.load(model_path)
    signal = _load(signal_csv, manifest, sampling_rate or bundle.config.sampling_rate_hz)
    points = monitor(bundle, signal, conventional_t2=conventional_t2)
    write_chart_csv(points, bundle, out)
    report = RunReport(Path(out), summarize(read_chart_csv(out)))
    _print_summary(report.summary)
    alarmed = sum(p.alarmed for p in points)
    click.echo(f"{alarmed}/{len(points)} batches alarmed; chart written to {out}")
    if report.any_alarm:
        sys.exit(EXIT_ALARM)


@main.command(name="select-vars")
@click.argument("normal_csv", type=click.Path(exists=True, dir_okay=False))
@click.argument("fault_csvs", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Updated model file.")
@click.option("--trace", type=click.Path(dir_okay=False), default=None, help="Removal trace CSV.")
@click.option("--split", type=float, default=DEFAULT_SPLIT, show_default=True)
@manifest_opt
@rate_opt
@_guard
def select_vars(normal_csv, fault_csvs, model_path, out, trace, split, manifest, sampling_rate):
    """Backward variable selection starting from a calibrated model's columns."""
    bundle = model_store.load(model_path)
    rate = sampling_rate or bundle.config.sampling_rate_hz
    entry = resolve_entry(normal_csv, manifest, rate)
    if not entry.label.is_normal:
        raise LabelError(f"{normal_csv} is labelled {entry.label}; expected healthy data")
    normal = load_signal(normal_csv, entry)
    faults = [_load(p, manifest, rate) for p in fault_csvs]
    cfg = SelectionConfig(
        bundle.config.batch_len, bundle.config.n_components,
        list(bundle.config.selected_columns), split,
    )
    result = backward_select(normal, faults, cfg)
    model_store.save(result.bundle, out)
    if trace:
        with open(trace, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["step", "column", "combined_rank", "accepted"])
            for i, s in enumerate(result.removal_trace, start=1):
                writer.writerow([i, s.column, s.combined_rank, str(s.accepted).lower()])
    for s in result.removal_trace:
        click.echo(f"  remove {s.column:10s} rank {s.combined_rank:3d}  {'accepted' if s.accepted else 'reverted'}")
    click.echo(
        f"selected {len(result.selected_columns)} columns with {result.final_n_pcs} PCs: "
        + ", ".join(result.selected_columns)
    )
    click.echo(f"model written to {out}")


@main.command()
@click.argument("chart_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
@_guard
def report(chart_csv, out_dir):
    """Render T^2 and SPEx charts (log axis, warning/alarm rules) as SVG."""
    rep = write_report(chart_csv, out_dir)
    _print_summary(rep.summary)
    for p in rep.svg_paths:
        click.echo(f"wrote {p}")


if __name__ == "__main__":
    main()
