import math

import numpy as np
import pytest

import fhlab


def test_spectral_symbol_on_a_single_mode():
    g = fhlab.Grid(1, 128, 2 * math.pi)
    x = g.coords()[:, 0]
    u = np.cos(3 * x)
    lu = fhlab.frac_laplacian_spectral(g, u, 0.5)
    assert lu.shape == (128, 1)
    np.testing.assert_allclose(lu[:, 0], 3.0 * u, atol=1e-12)


def test_carre_du_champ_holds_in_kernel_form():
    g = fhlab.Grid(1, 128, 20.0)
    x = g.coords()[:, 0]
    u = np.exp(-x**2)
    assert fhlab.carre_du_champ_residual(g, u, 0.4) < 1e-10


def test_local_flow_and_cascade():
    g = fhlab.Grid(1, 128, 4.0)
    x = g.coords()[:, 0]
    phi = 0.8 * np.sin(0.5 * math.pi * x)
    u0 = 0.9 * np.stack([np.cos(phi), np.sin(phi)], axis=1)
    times, frames = fhlab.run_local(g, u0, T=0.5, sample_every=4)
    assert frames.shape[1:] == (128, 2)
    assert times[0] == 0.0 and times[-1] == pytest.approx(0.5)
    assert np.abs(frames).max() <= 0.9 + 1e-9
    rep = fhlab.oscillation_cascade(g, list(times), frames, levels=6)
    assert rep.max_level >= 2
    Ms = [lev.M_k for lev in rep.levels]
    assert all(b <= a + 1e-12 for a, b in zip(Ms, Ms[1:]))


def test_fit_alpha_recovers_geometric_decay():
    assert fhlab.fit_alpha([0.5**k for k in range(8)], 0.5) == pytest.approx(1.0)


def test_errors_are_typed():
    with pytest.raises(fhlab.ConfigError):
        fhlab.frac_laplacian_spectral(fhlab.Grid(1, 7, 1.0), np.zeros(7), 0.5)
    g = fhlab.Grid(1, 64, 4.0)
    with pytest.raises(fhlab.ConfigError):
        fhlab.frac_laplacian_spectral(g, np.zeros(64), 1.5)
