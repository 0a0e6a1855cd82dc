"""Synthetic healthy and faulty bearing vibration signals.

Healthy signals are a sum of shaft-rate harmonics plus white Gaussian noise,
optionally scaled by a slow sinusoidal load fluctuation.  Faulty signals add
a periodic train of decaying resonance bursts, the usual shape of a localized
bearing defect striking at a characteristic rate.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidParamsError
from .ingest import FAULT_KINDS, Label, SignalSeries

# Envelope level below which an impulse response is truncated.
_TAIL_CUTOFF = 1e-12


@dataclass(frozen=True)
class SynthParams:
    sampling_rate_hz: float = 12_000.0
    duration_s: float = 10.0
    shaft_hz: float = 29.95
    harmonic_amps: tuple[tuple[int, float], ...] = ((1, 0.06), (2, 0.045), (3, 0.03), (4, 0.015))
    noise_sigma: float = 0.005
    seed: int = 0
    # relative depth and rate of the load fluctuation; depth 0 disables it
    load_depth: float = 0.1
    load_hz: float = 0.37

    @property
    def n_samples(self) -> int:
        return int(round(self.duration_s * self.sampling_rate_hz))

    def validate(self) -> None:
        if not self.sampling_rate_hz > 0:
            raise InvalidParamsError("sampling_rate_hz must be positive")
        if not self.duration_s > 0 or self.n_samples < 1:
            raise InvalidParamsError("duration_s must give at least one sample")
        if not self.shaft_hz > 0:
            raise InvalidParamsError("shaft_hz must be positive")
        if not self.noise_sigma >= 0:
            raise InvalidParamsError("noise_sigma must be non-negative")
        if not 0 <= self.load_depth < 1:
            raise InvalidParamsError("load_depth must lie in [0, 1)")
        if not self.load_hz > 0:
            raise InvalidParamsError("load_hz must be positive")
        if self.seed < 0:
            raise InvalidParamsError("seed must be unsigned")
        multiples = [m for m, _ in self.harmonic_amps]
        if len(set(multiples)) != len(multiples):
            raise InvalidParamsError("harmonic multiples must be distinct")
        if any(int(m) != m or m < 1 for m in multiples):
            raise InvalidParamsError("harmonic multiples must be positive integers")
        if any(a < 0 for _, a in self.harmonic_amps):
            raise InvalidParamsError("harmonic amplitudes must be non-negative")
        if not any(a > 0 for _, a in self.harmonic_amps):
            raise InvalidParamsError("need at least one harmonic with positive amplitude")


@dataclass(frozen=True)
class FaultSpec:
    impulse_rate_hz: float
    impulse_amp: float
    resonance_hz: float
    decay: float
    kind: str = "inner"
    diameter_in: float = 0.007

    def validate(self, sampling_rate_hz: float) -> None:
        if not self.impulse_rate_hz > 0:
            raise InvalidParamsError("impulse_rate_hz must be positive")
        if not self.impulse_rate_hz < sampling_rate_hz / 2:
            raise InvalidParamsError("impulse_rate_hz must be below the Nyquist rate")
        # zero amplitude is allowed: it degenerates to the healthy signal
        if not self.impulse_amp >= 0:
            raise InvalidParamsError("impulse_amp must be non-negative")
        if not self.resonance_hz > 0:
            raise InvalidParamsError("resonance_hz must be positive")
        if not self.decay > 0:
            raise InvalidParamsError("decay must be positive")
        if self.kind not in FAULT_KINDS:
            raise InvalidParamsError(f"fault kind must be one of {FAULT_KINDS}")


def generate_normal(p: SynthParams) -> SignalSeries:
    p.validate()
    n = p.n_samples
    t = np.arange(n) / p.sampling_rate_hz
    x = np.zeros(n)
    for multiple, amp in p.harmonic_amps:
        x += amp * np.sin(2 * np.pi * multiple * p.shaft_hz * t)
    if p.noise_sigma > 0:
        x += np.random.default_rng(p.seed).normal(0.0, p.noise_sigma, n)
    if p.load_depth > 0:
        phase = np.random.default_rng([p.seed, 1]).uniform(0.0, 2 * np.pi)
        x *= 1.0 + p.load_depth * np.sin(2 * np.pi * p.load_hz * t + phase)
    return SignalSeries(x, p.sampling_rate_hz, Label.normal(), f"synth-normal-seed{p.seed}")


def impulse_onsets(p: SynthParams, f: FaultSpec) -> np.ndarray:
    """Sample indices at which fault impulses start."""
    n = p.n_samples
    times = np.arange(0.0, p.duration_s, 1.0 / f.impulse_rate_hz)
    onsets = np.round(times * p.sampling_rate_hz).astype(int)
    return onsets[onsets < n]


def impulse_train(p: SynthParams, f: FaultSpec) -> np.ndarray:
    """The additive fault component: one decaying resonance per onset."""
    n = p.n_samples
    out = np.zeros(n)
    if f.impulse_amp == 0:
        return out
    tail = min(n, int(np.ceil(np.log(1.0 / _TAIL_CUTOFF) / f.decay * p.sampling_rate_hz)) + 1)
    tau = np.arange(tail) / p.sampling_rate_hz
    response = f.impulse_amp * np.exp(-f.decay * tau) * np.sin(2 * np.pi * f.resonance_hz * tau)
    for onset in impulse_onsets(p, f):
        stop = min(n, onset + tail)
        out[onset:stop] += response[: stop - onset]
    return out


def generate_fault(p: SynthParams, f: FaultSpec) -> SignalSeries:
    p.validate()
    f.validate(p.sampling_rate_hz)
    healthy = generate_normal(p)
    x = healthy.samples + impulse_train(p, f)
    return SignalSeries(
        x,
        p.sampling_rate_hz,
        Label.fault(f.kind, f.diameter_in),
        f"synth-{f.kind}-{f.impulse_amp:g}-seed{p.seed}",
    )


# Characteristic defect rates for a 6205 bearing at 1797 rpm (multiples of the
# shaft rate) and a resonance per location, used for the standard fixture.
FAULT_PRESETS = {
    "ball": dict(rate_per_rev=4.7135, resonance_hz=2600.0, decay=900.0, diameter_in=0.007),
    "inner": dict(rate_per_rev=5.4152, resonance_hz=3300.0, decay=800.0, diameter_in=0.007),
    "outer": dict(rate_per_rev=3.5848, resonance_hz=3700.0, decay=700.0, diameter_in=0.007),
}


def fault_preset(kind: str, amplitude: float, shaft_hz: float = SynthParams.shaft_hz) -> FaultSpec:
    if kind not in FAULT_PRESETS:
        raise InvalidParamsError(f"fault kind must be one of {FAULT_KINDS}")
    preset = FAULT_PRESETS[kind]
    return FaultSpec(
        impulse_rate_hz=preset["rate_per_rev"] * shaft_hz,
        impulse_amp=amplitude,
        resonance_hz=preset["resonance_hz"],
        decay=preset["decay"],
        kind=kind,
        diameter_in=preset["diameter_in"],
    )


@dataclass
class StandardFixture:
    """Healthy calibration signal, a held-out healthy signal and nine faults."""

    healthy: SignalSeries
    holdout: SignalSeries
    faults: dict[tuple[str, float], SignalSeries] = field(default_factory=dict)


FIXTURE_AMPLITUDES = (0.5, 1.0, 2.0)


def standard_fixture(
    params: SynthParams | None = None,
    amplitudes: tuple[float, ...] = FIXTURE_AMPLITUDES,
) -> StandardFixture:
    """12 kHz, 10 s healthy signal plus 10 s of each fault kind at each amplitude.

    Every signal uses its own seed so that noise is never shared between the
    calibration data and anything it is checked against.
    """
    p = params or SynthParams()
    healthy = generate_normal(p)
    holdout = generate_normal(replace(p, seed=p.seed + 1))
    faults = {}
    seed = p.seed + 2
    for kind in FAULT_KINDS:
        for amp in amplitudes:
            spec = fault_preset(kind, amp, p.shaft_hz)
            faults[(kind, amp)] = generate_fault(replace(p, seed=seed), spec)
            seed += 1
    return StandardFixture(healthy, holdout, faults)
