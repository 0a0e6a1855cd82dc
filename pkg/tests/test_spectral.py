import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from batchmspc.errors import (
    AsymmetricSpectrumError,
    BatchLengthTooSmallError,
    NonFiniteInputError,
    SignalTooShortError,
    TooManyComponentsError,
)
from batchmspc.ingest import SignalSeries
from batchmspc.spectral import Spectrum, decompose, dft, idft, is_conjugate_symmetric, segment

from .oracles import direct_dft


@pytest.mark.parametrize("N", [1, 2, 10, 31, 100, 257])
def test_dft_matches_direct_sum(N, rng):
    x = rng.normal(size=N)
    assert np.max(np.abs(dft(x).coefficients - direct_dft(x))) < 1e-9


def test_dft_of_cosine_is_two_spikes():
    N, k0 = 64, 5
    x = np.cos(2 * np.pi * k0 * np.arange(N) / N)
    c = dft(x).coefficients
    expected = np.zeros(N, dtype=complex)
    expected[k0] = expected[N - k0] = N / 2
    assert np.allclose(c, expected, atol=1e-9)


def test_dft_rejects_non_finite():
    with pytest.raises(NonFiniteInputError):
        dft([1.0, np.nan])
    with pytest.raises(NonFiniteInputError):
        dft([])


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.integers(1, 200), elements=st.floats(-1e3, 1e3)))
def test_inverse_roundtrip(x):
    s = dft(x)
    assert is_conjugate_symmetric(s)
    assert np.allclose(idft(s), x, atol=1e-9 * max(1.0, np.abs(x).max()))


def test_idft_rejects_asymmetric():
    with pytest.raises(AsymmetricSpectrumError):
        idft(Spectrum(np.array([1.0, 1j, 0.0, 0.0])))


def test_segment_drops_remainder():
    s = SignalSeries(np.arange(25.0), 1.0)
    batches = segment(s, 8)
    assert [b.start_sample for b in batches] == [0, 8, 16]
    assert [b.index_t for b in batches] == [0, 1, 2]
    assert batches[2].samples.tolist() == list(range(16, 24))


def test_segment_errors():
    s = SignalSeries(np.zeros(20), 1.0)
    with pytest.raises(BatchLengthTooSmallError):
        segment(s, 7)
    with pytest.raises(SignalTooShortError):
        segment(s, 21)


def test_pure_tone_decomposition():
    fs, k = 1000.0, 1000
    t = np.arange(k) / fs
    x = 0.3 + 2.0 * np.cos(2 * np.pi * 50 * t + 0.4) + 0.5 * np.sin(2 * np.pi * 120 * t)
    d = decompose(x, 2, fs)
    assert d.trend == pytest.approx(0.3, abs=1e-12)
    c1, c2 = d.components
    assert (c1.frequency_hz, c2.frequency_hz) == (50.0, 120.0)
    assert c1.amplitude == pytest.approx(2.0, abs=1e-12)
    assert c1.phase == pytest.approx(0.4, abs=1e-12)
    assert c2.amplitude == pytest.approx(0.5, abs=1e-12)
    assert np.max(np.abs(d.residual)) < 1e-10


def test_nyquist_amplitude():
    k = 16
    x = 0.7 * np.cos(np.pi * np.arange(k))
    c = decompose(x, 1, 16.0).components[0]
    assert c.bin == 8 and c.amplitude == pytest.approx(0.7, abs=1e-12)


def test_ties_go_to_lower_bin():
    k = 64
    n = np.arange(k)
    x = np.cos(2 * np.pi * 9 * n / k) + np.cos(2 * np.pi * 3 * n / k)
    d = decompose(x, 2, 64.0)
    assert [c.bin for c in d.components] == [3, 9]


def test_too_many_components():
    with pytest.raises(TooManyComponentsError):
        decompose(np.ones(10), 6, 1.0)
    with pytest.raises(TooManyComponentsError):
        decompose(np.ones(10), 0, 1.0)


@settings(max_examples=40, deadline=None)
@given(
    arrays(np.float64, st.integers(8, 120), elements=st.floats(-100, 100)),
    st.integers(1, 4),
)
def test_reconstruction_identity_property(x, n):
    d = decompose(x, n, 1.0)
    assert np.max(np.abs(d.reconstruct() - x)) <= 1e-9 * max(1.0, np.abs(x).max())


def test_residual_energy_non_increasing(rng):
    x = rng.normal(size=256)
    energies = [np.sum(decompose(x, n, 1.0).residual ** 2) for n in range(1, 20)]
    assert all(b <= a + 1e-12 for a, b in zip(energies, energies[1:]))
