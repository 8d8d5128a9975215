import math

import numpy as np
import pytest

from pcgkit.filters import (
    butter_lowpass_sos,
    butterworth_lowpass,
    sos_frequency_response,
    sosfilt,
)


def analog_butterworth_gain(f, cutoff, order):
    """Textbook magnitude |H(f)| = 1 / sqrt(1 + (f/fc)^(2n))."""
    return 1.0 / math.sqrt(1.0 + (f / cutoff) ** (2 * order))


def warped_gain(f, cutoff, fs, order):
    """Expected magnitude of the bilinear-transform design at frequency f."""
    feq = math.tan(math.pi * f / fs)
    feq_c = math.tan(math.pi * cutoff / fs)
    return 1.0 / math.sqrt(1.0 + (feq / feq_c) ** (2 * order))


def measured_sine_gain(freq, fs, order=5, cutoff=500.0, seconds=2.0):
    """Sine-fit oracle: filter a sine, least-squares fit the steady state."""
    n = int(fs * seconds)
    t = np.arange(n) / fs
    x = np.sin(2 * np.pi * freq * t)
    y = butterworth_lowpass(x, fs, order=order, cutoff_hz=cutoff)
    tail = slice(n // 2, None)  # discard the transient
    basis = np.stack([np.sin(2 * np.pi * freq * t[tail]), np.cos(2 * np.pi * freq * t[tail])], axis=1)
    coef, *_ = np.linalg.lstsq(basis, y[tail], rcond=None)
    return float(np.hypot(*coef))


def test_dc_gain_is_unity():
    y = butterworth_lowpass(np.ones(8000), 4000)
    assert abs(y[-1] - 1.0) < 1e-3


def test_cutoff_gain_matches_minus_3db():
    gain = measured_sine_gain(500.0, 4000)
    assert gain == pytest.approx(1 / math.sqrt(2), abs=0.01)


def test_octave_above_cutoff_attenuation():
    # The causal bilinear design attenuates 1000 Hz at fs=4000 beyond the
    # analog formula's -30.1 dB because of frequency warping near Nyquist.
    gain = measured_sine_gain(1000.0, 4000)
    assert 20 * math.log10(gain) <= -30.0
    assert gain == pytest.approx(warped_gain(1000, 500, 4000, 5), rel=0.02)


@pytest.mark.parametrize("k", [1, 2, 4])
def test_attenuation_tracks_analytic_magnitude(k):
    # Measured at a high sample rate, where bilinear warping is negligible,
    # the response must match the analytic order-5 magnitude within 0.3 dB.
    fs, cutoff = 64000, 500.0
    measured = measured_sine_gain(k * cutoff, fs, seconds=1.0)
    expected = analog_butterworth_gain(k * cutoff, cutoff, 5)
    db_err = abs(20 * math.log10(measured) - 20 * math.log10(expected))
    assert db_err < 0.3


def test_output_length_equals_input_length():
    x = np.random.default_rng(0).standard_normal(1234)
    assert butterworth_lowpass(x, 4000).size == x.size


def test_linearity():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(4000)
    y = rng.standard_normal(4000)
    a, b = 2.5, -0.7
    lhs = butterworth_lowpass(a * x + b * y, 4000)
    rhs = a * butterworth_lowpass(x, 4000) + b * butterworth_lowpass(y, 4000)
    assert np.max(np.abs(lhs - rhs)) < 1e-9 * max(1.0, np.max(np.abs(rhs)))


def test_frequency_response_matches_filter_output():
    sos = butter_lowpass_sos(500, 4000, 5)
    h = np.abs(sos_frequency_response(sos, [250.0, 500.0, 750.0], 4000))
    for f, expected in zip([250.0, 500.0, 750.0], h):
        assert measured_sine_gain(f, 4000) == pytest.approx(expected, rel=1e-3)


def test_sos_layout_for_order_five():
    sos = butter_lowpass_sos(500, 4000, 5)
    assert sos.shape == (3, 6)
    assert np.all(sos[:, 3] == 1.0)
    first_order_rows = np.isclose(sos[:, 2], 0.0) & np.isclose(sos[:, 5], 0.0)
    assert first_order_rows.sum() == 1  # odd order: exactly one 1st-order section


def test_cutoff_at_or_above_nyquist_rejected():
    with pytest.raises(ValueError):
        butter_lowpass_sos(2000, 4000)
    with pytest.raises(ValueError):
        butter_lowpass_sos(2500, 4000)


def test_nonfinite_input_rejected():
    x = np.ones(10)
    x[3] = np.nan
    with pytest.raises(ValueError):
        butterworth_lowpass(x, 4000)


def test_even_order_design_still_unit_dc():
    sos = butter_lowpass_sos(500, 4000, 4)
    assert abs(sos_frequency_response(sos, [1e-9], 4000)[0]) == pytest.approx(1.0, abs=1e-9)


def test_filter_is_stable_on_long_noise():
    rng = np.random.default_rng(2)
    y = sosfilt(butter_lowpass_sos(500, 4000, 5), rng.standard_normal(40000))
    assert np.all(np.isfinite(y))
    assert np.max(np.abs(y[-1000:])) < 10.0
