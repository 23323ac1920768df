import numpy as np
import pytest

from relamp import poincare as pc
from relamp import position as pos
from relamp.amplitudes import ParticleSpec, gaussian, sample_on_grid, to_covariant

SCALAR = ParticleSpec(1.0, 0)


@pytest.fixture(scope="module")
def pair():
    a = gaussian(SCALAR, [0.3, -0.2, 0.1], 0.5, [0.5, 0.2, -0.4])
    b = gaussian(SCALAR, [0.1, 0.2, 0.0], 0.6, [0.1, -0.3, 0.2])
    return a, b


def test_x_expectation_is_xbar(pair):
    a, _ = pair
    assert np.allclose(pos.expectation_x(a), [0.5, 0.2, -0.4], atol=1e-12)


def test_canonical_commutator(pair):
    a, _ = pair
    assert np.allclose(pos.commutator_expectation(a), 1j * np.eye(3), atol=1e-12)


def test_operators_hermitian(pair):
    a, b = pair
    assert pos.hermiticity_residual(a, b) < 1e-12
    assert pos.hermiticity_residual(a, b, pos.boosted_position_operator([0.3, -0.4, 0.2], 1.0)) < 1e-12
    ca, cb = to_covariant(a), to_covariant(b)
    assert pos.hermiticity_residual(ca, cb, pos.nw_operator(1.0), measure_power=-1) < 1e-12


def test_nw_identity(pair):
    lhs, rhs = pos.nw_identity_check(*map(to_covariant, pair))
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_boosted_operator_reduces_to_x_without_boost(pair):
    a, _ = pair
    assert np.allclose(pos.expectation(a, pos.boosted_position_operator([0, 0, 0], 1.0)), pos.expectation_x(a), atol=1e-13)


def test_spin_restriction():
    psi = gaussian(ParticleSpec(1.0, 1), [0, 0, 0], 0.5)
    with pytest.raises(NotImplementedError):
        pos.boosted_position_operator_apply(psi, [0.1, 0, 0])


def test_to_position_parseval_and_round_trip():
    g = sample_on_grid(gaussian(ParticleSpec(1.0, 1), [0.1, 0, 0.2], 0.7, [0.3, 0, 0], [1, 1j]), n=48, pmax=9.0)
    x = pos.to_position(g, 1.3)
    assert x.norm_squared() == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(pos.to_momentum(x).data - g.data)) < 1e-13


def test_wraparound_warning():
    g = sample_on_grid(gaussian(SCALAR, [0, 0, 0], 0.4, [0, 0, 0]), n=32, pmax=4.0)
    with pytest.warns(RuntimeWarning, match="boundary"):
        pos.to_position(g, 40.0)


def test_evolution_group_and_derivative():
    x = pos.to_position(sample_on_grid(gaussian(SCALAR, [0.5, 0, 0], 0.6), n=32), 0.0)
    a = pos.evolve(pos.evolve(x, 0.4), 0.3)
    b = pos.evolve(x, 0.7)
    assert np.max(np.abs(a.data - b.data)) < 1e-14
    e1, e2 = pos.evolution_derivative_check(x, 1e-3), pos.evolution_derivative_check(x, 5e-4)
    assert e2 < e1 / 3  # second-order convergence of the centred difference


def test_heisenberg_drift():
    g = sample_on_grid(gaussian(SCALAR, [0.3, -0.2, 0.1], 0.5, [0.5, 0.2, -0.4]), n=48, pmax=5.0)
    measured, predicted = pos.heisenberg_drift(g, 3.0, n=48)
    assert np.allclose(measured, predicted, atol=1e-8)


def test_position_space_boost_contracts():
    g = sample_on_grid(gaussian(SCALAR, [0, 0, 0], 0.05), n=64, pmax=1.4)
    x = pos.to_position(g, 0.0)
    y = pos.boost_position_amplitude(x, [0.6, 0, 0])
    assert y.width([1, 0, 0]) / x.width([1, 0, 0]) == pytest.approx(0.8, rel=5e-3)
    assert y.width([0, 1, 0]) / x.width([0, 1, 0]) == pytest.approx(1.0, rel=2e-3)


def test_position_transforms_preserve_products():
    par = ParticleSpec(1.0, 1)
    a = gaussian(par, [0.1, 0, 0.2], 0.7, [0.3, 0, 0], [1, 1j])
    b = gaussian(par, [0, 0.2, 0], 0.8, [0, 0.2, 0], [1, -0.5])
    xa = pos.to_position(sample_on_grid(a, n=48, pmax=9.0))
    xb = pos.to_position(sample_on_grid(b, n=48, pmax=9.0))
    s0 = abs(pos.scalar_product_position(xa, xb)) ** 2
    for el in [pc.Rotation.about([1, 2, 3], 0.8), pc.Translation([0.5, 0.3, 0.1, -0.2]), pc.Parity(), pc.TimeReversal()]:
        ya, yb = pos.position_transforms(xa, el), pos.position_transforms(xb, el)
        assert abs(pos.scalar_product_position(ya, yb)) ** 2 == pytest.approx(s0, abs=1e-12)


def test_translation_shifts_position():
    x = pos.to_position(sample_on_grid(gaussian(SCALAR, [0, 0, 0], 0.7), n=48, pmax=7.0))
    y = pos.position_transforms(x, pc.Translation([0, 1.0, -0.5, 0.3]))
    assert np.allclose(y.expectation_x() - x.expectation_x(), [1.0, -0.5, 0.3], atol=1e-10)


def test_time_reversal_reverses_evolution():
    par = ParticleSpec(1.0, 1)
    x = pos.to_position(sample_on_grid(gaussian(par, [0.2, 0, 0], 0.7, spin_weights=[1, 1j]), n=32, pmax=8.0))
    T = pc.TimeReversal()
    lhs = pos.evolve(pos.position_transforms(x, T), 0.7)
    rhs = pos.position_transforms(pos.evolve(x, -0.7), T)
    assert np.max(np.abs(lhs.data - rhs.data)) < 1e-14


def test_velocity_law_on_analytic_packet(pair):
    a, _ = pair
    lhs, rhs, _ = pos.velocity_law_check(a, [0.3, -0.4, 0.2])
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_average_event_needs_scalar_gaussian():
    with pytest.raises(TypeError):
        pos.average_event(gaussian(ParticleSpec(1.0, 1), [5, 0, 0], 0.1), [0, 0.5, 0], 1.0)
    with pytest.raises(ValueError, match="too wide"):
        pos.average_event(gaussian(SCALAR, [1, 0, 0], 0.8), [0.9, 0, 0], 1.0)


def test_t_integral_identity():
    psi = gaussian(SCALAR, [5, 0, 0], 0.1, [1.0, -2.0, 0.5])
    lhs, rhs = pos.t_integral_check(psi, [0, 0.5, 0])
    assert np.allclose(lhs, rhs, atol=1e-10)
