import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinwire.core import (
    E_LOWER,
    E_UPPER,
    Regime,
    RegimeError,
    eigh2,
    hs_distance,
    momentum_transfer,
    planar_spinors,
    wave_vectors,
    zeeman_matrix,
)

from conftest import random_cmat2


def test_wave_vectors_two_channel():
    ch = wave_vectors(5.0)
    assert ch.regime is Regime.TWO_CHANNEL
    assert ch.k0 == pytest.approx(np.sqrt(6.0))
    assert ch.k1 == pytest.approx(2.0)


def test_wave_vectors_band_edge_belongs_to_lower_regime():
    ch = wave_vectors(1.0)
    assert ch.regime is Regime.SINGLE_CHANNEL
    assert ch.k0 == pytest.approx(np.sqrt(2.0))
    assert ch.k1 == 0.0


def test_wave_vectors_evanescent_branch():
    ch = wave_vectors(0.0)
    assert ch.regime is Regime.SINGLE_CHANNEL
    assert ch.k0 == pytest.approx(1.0)
    assert ch.k1 == pytest.approx(1j)


def test_wave_vectors_closed():
    assert wave_vectors(-1.0).regime is Regime.CLOSED
    assert wave_vectors(-4.0).regime is Regime.CLOSED


@given(st.floats(min_value=-5.0, max_value=50.0))
@settings(max_examples=60, deadline=None)
def test_dispersion_round_trip(energy):
    ch = wave_vectors(energy)
    assert ch.k0**2 + E_LOWER == pytest.approx(energy, abs=1e-12)
    assert ch.k1**2 + E_UPPER == pytest.approx(energy, abs=1e-12)
    assert ch.k0.imag >= 0.0 and ch.k1.imag >= 0.0


def test_evanescent_wave_decays_rightward():
    ch = wave_vectors(0.0)
    amplitudes = np.abs(np.exp(1j * ch.k1 * np.array([1.0, 5.0, 20.0])))
    assert np.all(np.diff(amplitudes) < 0)


def test_momentum_transfer_values():
    assert momentum_transfer(5.0) == pytest.approx(2.0 - np.sqrt(6.0))
    assert momentum_transfer(1.25) == pytest.approx(-1.0)


def test_momentum_transfer_asymptotic_form():
    exact = momentum_transfer(100.0)
    assert abs(exact - (-1.0 / np.sqrt(100.0))) <= 0.002 * abs(exact)


def test_momentum_transfer_needs_two_channels():
    with pytest.raises(RegimeError):
        momentum_transfer(0.5)


def test_hs_distance_examples():
    eye = np.eye(2)
    assert hs_distance(eye, eye) == 0.0
    assert hs_distance(eye, -eye) == pytest.approx(2.0 * np.sqrt(2.0))


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=40, deadline=None)
def test_hs_distance_triangle_inequality(seed):
    gen = np.random.default_rng(seed)
    a, b, c = (random_cmat2(gen) for _ in range(3))
    assert hs_distance(a, c) <= hs_distance(a, b) + hs_distance(b, c) + 1e-12


def test_planar_spinors_are_zeeman_eigenvectors():
    for theta in (0.0, 0.4, np.pi / 2, 2.2, np.pi):
        lo, up = planar_spinors(theta)
        h = zeeman_matrix(np.sin(theta), np.cos(theta))
        assert np.allclose(h @ lo, -lo, atol=1e-14)
        assert np.allclose(h @ up, +up, atol=1e-14)
        assert abs(np.vdot(lo, up)) < 1e-15


def test_eigh2_reconstructs_random_hermitian(rng):
    for _ in range(50):
        a = random_cmat2(rng, 3.0)
        q = 0.5 * (a + a.conj().T)
        w0, w1, p0, p1 = eigh2(q)
        assert w0 <= w1
        assert np.allclose(w0 * p0 + w1 * p1, q, atol=1e-12)
        assert np.allclose(p0 + p1, np.eye(2), atol=1e-13)
        assert np.allclose(p0 @ p1, 0.0, atol=1e-12)


def test_eigh2_degenerate():
    w0, w1, p0, p1 = eigh2(2.5 * np.eye(2))
    assert w0 == pytest.approx(2.5)
    assert w1 == pytest.approx(2.5)
    assert np.allclose(p0 + p1, np.eye(2))
