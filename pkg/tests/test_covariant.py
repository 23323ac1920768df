import numpy as np
import pytest

from relamp import covariant as cov
from relamp import position as pos
from relamp.amplitudes import ParticleSpec, gaussian, sample_on_grid


def test_gamma_algebra():
    g = np.diag([1.0, -1.0, -1.0, -1.0])
    G = cov.GAMMA_WEYL
    for mu in range(4):
        for nu in range(4):
            assert np.allclose(G[mu] @ G[nu] + G[nu] @ G[mu], 2 * g[mu, nu] * np.eye(4))


def test_boost_matrices():
    p = np.array([0.4, -1.2, 2.0])
    Dm, Dp = cov.dirac_boost_matrix(p, 1.3, -1), cov.dirac_boost_matrix(p, 1.3, 1)
    assert np.isclose(np.linalg.det(Dm), 1.0) and np.isclose(np.linalg.det(Dp), 1.0)
    assert np.allclose(Dm @ Dp, np.eye(2), atol=1e-14)
    assert np.array_equal(cov.dirac_boost_matrix(np.zeros(3), 1.3, 1), np.eye(2))
    with pytest.raises(ValueError):
        cov.dirac_boost_matrix(p, 1.0, 0)


def test_rest_spinor():
    u = cov.dirac_spinor(np.zeros(3), 1.0, [1, 0])
    assert np.allclose(u * np.sqrt(2), [1, 0, 1, 0])


def test_momentum_space_equation(rng):
    p = rng.normal(size=(20, 3)) * 3
    xi = rng.normal(size=(20, 2)) + 1j * rng.normal(size=(20, 2))
    assert cov.momentum_residual(p, 0.7, xi) < 1e-12


def test_dirac_field_solves_equation():
    psi = gaussian(ParticleSpec(1.0, 1), [0.3, 0, 0.2], 0.6, spin_weights=[1, 1j])
    field = cov.dirac_build(psi, 0.5, n=32)
    assert field.data.shape == (32, 32, 32, 4)
    assert cov.dirac_residual(field) < 1e-12


def test_kg_scalar_field():
    psi = gaussian(ParticleSpec(1.0, 0), [0, 0, 0], 0.05)
    phi = cov.kg_scalar(psi, 0.3, n=48, pmax=0.6)
    assert cov.kg_field_residual(phi) < 1e-12
    # for a packet at rest phi ~ psi / sqrt(m0), up to O(sigma_p^2 / m0^2)
    x = pos.to_position(sample_on_grid(psi, n=48, pmax=0.6), 0.3)
    ref = x.data[..., 0]
    assert np.linalg.norm(phi.data - ref) / np.linalg.norm(ref) < 5e-3


def test_field_builders_check_spin():
    with pytest.raises(ValueError):
        cov.kg_scalar(gaussian(ParticleSpec(1.0, 1), [0, 0, 0], 0.5))
    with pytest.raises(ValueError):
        cov.dirac_build(gaussian(ParticleSpec(1.0, 0), [0, 0, 0], 0.5))
