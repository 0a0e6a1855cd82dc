"""Batching of a signal and per-batch Fourier decomposition.

Each batch is split into a trend (its mean, i.e. the DC bin), the ``n`` most
dominant one-sided Fourier components expanded back to real sinusoids, and a
residual holding everything else, so that

    batch = trend + sum(component waveforms) + residual

holds to rounding error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AsymmetricSpectrumError,
    BatchLengthTooSmallError,
    NonFiniteInputError,
    SignalTooShortError,
    TooManyComponentsError,
)
from .ingest import SignalSeries

MIN_BATCH_LEN = 8
SYMMETRY_RTOL = 1e-9
# Magnitudes equal to this many decimals (relative to the peak) count as ties.
_TIE_DECIMALS = 9


@dataclass(frozen=True)
class Batch:
    samples: np.ndarray
    index_t: int
    start_sample: int

    def __len__(self) -> int:
        return self.samples.size


@dataclass(frozen=True)
class Spectrum:
    coefficients: np.ndarray

    @property
    def length_n(self) -> int:
        return self.coefficients.size


@dataclass(frozen=True)
class FtComponent:
    rank_i: int
    bin: int
    frequency_hz: float
    amplitude: float
    phase: float
    waveform: np.ndarray


@dataclass(frozen=True)
class FtDecomposition:
    trend: float
    components: list[FtComponent]
    residual: np.ndarray

    def reconstruct(self) -> np.ndarray:
        out = self.trend + self.residual
        for c in self.components:
            out = out + c.waveform
        return out


def segment(signal: SignalSeries, k: int) -> list[Batch]:
    """Cut ``signal`` into consecutive, non-overlapping batches of ``k`` samples.

    A trailing remainder shorter than ``k`` is dropped.
    """
    if k < MIN_BATCH_LEN:
        raise BatchLengthTooSmallError(f"batch length {k} < {MIN_BATCH_LEN}")
    x = signal.samples
    if x.size < k:
        raise SignalTooShortError(f"signal has {x.size} samples, batch length is {k}")
    n_batches = x.size // k
    return [Batch(x[i * k : (i + 1) * k], i, i * k) for i in range(n_batches)]


def dft(x) -> Spectrum:
    """Unnormalized forward DFT with the exp(-i 2 pi k n / N) kernel.

    Backed by numpy's pocketfft, which handles any length in O(N log N).
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 1:
        raise NonFiniteInputError("dft needs a non-empty 1-D vector")
    if not np.all(np.isfinite(x)):
        raise NonFiniteInputError("dft input contains NaN or infinity")
    return Spectrum(np.fft.fft(x))


def is_conjugate_symmetric(s: Spectrum, rtol: float = SYMMETRY_RTOL) -> bool:
    c = s.coefficients
    mirrored = np.conj(c[(-np.arange(c.size)) % c.size])
    scale = max(1.0, float(np.max(np.abs(c)))) if c.size else 1.0
    return bool(np.max(np.abs(c - mirrored), initial=0.0) <= rtol * scale)


def idft(s: Spectrum) -> np.ndarray:
    """Inverse DFT with 1/N normalization; real output for a symmetric spectrum."""
    if not is_conjugate_symmetric(s):
        raise AsymmetricSpectrumError("spectrum is not conjugate symmetric")
    return np.fft.ifft(s.coefficients).real


def _dominant_bins(magnitudes: np.ndarray, n: int) -> np.ndarray:
    """One-sided bins (1-based positions into ``magnitudes``) ordered by dominance.

    Ties (equal to ``_TIE_DECIMALS`` relative decimals) go to the lower bin.
    """
    peak = magnitudes.max()
    keyed = np.round(magnitudes / peak, _TIE_DECIMALS) if peak > 0 else magnitudes
    bins = np.arange(1, magnitudes.size + 1)
    order = np.lexsort((bins, -keyed))
    return bins[order[:n]]


def decompose(b: Batch | np.ndarray, n: int, fs: float) -> FtDecomposition:
    x = np.asarray(b.samples if isinstance(b, Batch) else b, dtype=float)
    k = x.size
    half = k // 2
    if not 1 <= n <= half:
        raise TooManyComponentsError(f"n={n} components requested, batch allows 1..{half}")
    coeffs = dft(x).coefficients
    trend = coeffs[0].real / k
    one_sided = np.abs(coeffs[1 : half + 1])
    chosen = _dominant_bins(one_sided, n)

    phase_base = 2 * np.pi * np.arange(k) / k
    components = []
    residual = x - trend
    for rank, bin_ in enumerate(chosen, start=1):
        c = coeffs[bin_]
        nyquist = k % 2 == 0 and bin_ == half
        amplitude = abs(c) / k if nyquist else 2 * abs(c) / k
        phase = float(np.angle(c))
        waveform = amplitude * np.cos(bin_ * phase_base + phase)
        residual = residual - waveform
        components.append(
            FtComponent(rank, int(bin_), bin_ * fs / k, float(amplitude), phase, waveform)
        )
    return FtDecomposition(float(trend), components, residual)
