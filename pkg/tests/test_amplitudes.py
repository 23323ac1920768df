import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relamp.amplitudes import (
    ParticleSpec,
    density_rows,
    expectation_four_momentum,
    from_covariant,
    gaussian,
    load_grid,
    norm_squared,
    norm_squared_covariant,
    quadrature_box,
    sample_on_grid,
    save_grid,
    scalar_density,
    scalar_product,
    to_covariant,
)


def test_particle_validation():
    with pytest.raises(ValueError):
        ParticleSpec(0.0, 0)
    with pytest.raises(ValueError):
        ParticleSpec(1.0, 1, eta=2)
    assert ParticleSpec.with_spin(1.0, "3/2").ncomp == 4


@given(st.integers(0, 3), st.floats(0.3, 1.5), st.floats(-1, 1), st.floats(-2, 2))
@settings(max_examples=20, deadline=None)
def test_gaussian_is_normalized(two_s, sigma, p, x):
    psi = gaussian(ParticleSpec(1.0, two_s), [p, 0.5 * p, 0.0], sigma, [x, 0.0, -x], np.arange(1, two_s + 2))
    assert norm_squared(psi) == pytest.approx(1.0, abs=1e-12)


def test_gaussian_rejects_bad_weights():
    with pytest.raises(ValueError):
        gaussian(ParticleSpec(1.0, 1), [0, 0, 0], 0.5, spin_weights=[1.0])
    with pytest.raises(ValueError):
        gaussian(ParticleSpec(1.0, 0), [0, 0, 0], -0.5)


def test_gaussian_momentum_expectation():
    psi = gaussian(ParticleSpec(1.3, 0), [0.4, -0.2, 0.1], 0.6)
    P = expectation_four_momentum(psi)
    assert np.allclose(P[1:], [0.4, -0.2, 0.1], atol=1e-13)
    assert P[0] > np.sqrt(1.3**2 + 0.21)


def test_scalar_product_of_displaced_gaussians():
    # overlap of two equal-width packets displaced in x: exp(-sigma^2 d^2 / 2)
    par = ParticleSpec(1.0, 0)
    a = gaussian(par, [0, 0, 0], 0.7)
    b = gaussian(par, [0, 0, 0], 0.7, [1.2, 0, 0])
    assert abs(scalar_product(a, b)) == pytest.approx(np.exp(-0.49 * 1.44 / 2), rel=1e-12)


def test_grid_sampling_matches_analytic():
    par = ParticleSpec(1.0, 1)
    psi = gaussian(par, [0.2, 0, 0], 0.7, [0.4, 0, 0], [1, 1j])
    g = sample_on_grid(psi, n=48)
    q = np.array([[0.1, -0.3, 0.25], [0.5, 0.2, -0.1]])
    assert np.allclose(g.evaluate(q), psi.values(q), atol=1e-9)
    assert norm_squared(g) == pytest.approx(1.0, abs=1e-14)


def test_grid_box_too_small():
    with pytest.raises(ValueError, match="enlarge pmax"):
        sample_on_grid(gaussian(ParticleSpec(1.0, 0), [0, 0, 0], 1.0), n=16, pmax=2.0)


def test_covariant_round_trip():
    par = ParticleSpec(0.8, 2)
    psi = gaussian(par, [0.3, 0, 0], 0.6, spin_weights=[1, 0.5, 1j])
    phi = to_covariant(psi)
    p = np.random.default_rng(0).normal(size=(5, 3))
    assert np.allclose(from_covariant(phi).values(p), psi.values(p), atol=1e-15)
    # S(p) = omega rho(p), and the covariant norm carries the 1/omega measure
    assert np.allclose(scalar_density(psi, p), np.sum(np.abs(phi.values(p)) ** 2, axis=-1), rtol=1e-13)
    assert norm_squared_covariant(phi) == pytest.approx(1.0, abs=1e-12)


def test_save_load_round_trip(tmp_path):
    g = sample_on_grid(gaussian(ParticleSpec(1.0, 1, -1), [0, 0, 0], 0.8, spin_weights=[1, 1j]), n=16, pmax=7.0)
    path = tmp_path / "psi.bin"
    save_grid(g, path)
    back = load_grid(path)
    assert back.particle == g.particle and back.pmax == g.pmax
    assert np.allclose(back.data, g.data, atol=1e-7)
    path.write_bytes(path.read_bytes()[:100])
    with pytest.raises(ValueError, match="truncated"):
        load_grid(path)


def test_quadrature_box_limit():
    par = ParticleSpec(1.0, 0)
    with pytest.raises(ValueError, match="too far apart"):
        quadrature_box(gaussian(par, [0, 0, 0], 0.01, [0, 0, 0]), gaussian(par, [50, 0, 0], 1.0, [0, 0, 0]))


def test_density_rows_peak():
    rows = density_rows(gaussian(ParticleSpec(1.0, 0), [0.5, 0, 0], 0.5), axis=0, n=201, extent=3.0)
    s, rho = np.array(rows).T
    assert s[np.argmax(rho)] == pytest.approx(0.5, abs=0.02)
