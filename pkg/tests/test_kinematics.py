import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from relamp import kinematics as kin
from relamp.spin import su2_from_rotation

finite = st.floats(-1.0, 1.0, allow_nan=False)
vec3 = arrays(np.float64, 3, elements=finite)
momenta = arrays(np.float64, 3, elements=st.floats(-50.0, 50.0, allow_nan=False))


def velocity_of(v, speed):
    n = np.linalg.norm(v)
    return np.zeros(3) if n < 1e-9 else v / n * speed


@given(vec3, st.floats(0.0, 0.999))
def test_pure_boost_is_lorentz(v, speed):
    L = kin.pure_boost(velocity_of(v, speed))
    assert kin.is_lorentz(L, tol=1e-11)
    assert np.allclose(kin.inverse(L) @ L, np.eye(4), atol=1e-9 * L[0, 0] ** 2)


@given(vec3, st.floats(0.0, 0.95), momenta, st.floats(0.1, 5.0))
def test_transform_momentum_stays_on_shell(v, speed, p, m0):
    L = kin.pure_boost(velocity_of(v, speed))
    q = kin.transform_momentum(L, p, m0)
    full = kin.apply(L, kin.four_momentum(p, m0))
    assert np.allclose(q, full[1:], rtol=1e-12, atol=1e-10)
    assert np.isclose(kin.energy(q, m0), full[0], rtol=1e-12)


def test_boost_moves_rest_particle():
    beta = np.array([0.3, -0.2, 0.5])
    p = kin.transform_momentum(kin.pure_boost(beta), np.zeros(3), 2.0)
    assert np.allclose(kin.velocity(p, 2.0), beta, atol=1e-15)


def test_standard_boost_maps_rest_momentum():
    p = np.array([1.0, -3.0, 0.5])
    L = kin.standard_boost(p, 1.7)
    assert np.allclose(kin.apply(L, [1.7, 0, 0, 0]), kin.four_momentum(p, 1.7), atol=1e-13)


@given(vec3, st.floats(0.0, 0.99), vec3, st.floats(0.0, 0.99))
def test_velocity_compose_matches_matrices(a, sa, b, sb):
    beta = velocity_of(a, sa)
    beta0 = velocity_of(b, sb)
    p = kin.transform_momentum(kin.pure_boost(beta), np.zeros(3), 1.0)
    q = kin.transform_momentum(kin.pure_boost(beta0), p, 1.0)
    assert np.allclose(kin.velocity_compose(beta, beta0), kin.velocity(q, 1.0), atol=1e-10)


@given(vec3, st.floats(0.0, 0.99), vec3, st.floats(-np.pi, np.pi))
def test_decompose_round_trip(v, speed, axis, angle):
    beta = velocity_of(v, speed)
    R = kin.rotation_matrix(axis + np.array([0, 0, 1e-3]), angle)
    L = kin.pure_boost(beta) @ kin.rotation4(R)
    b2, R2 = kin.decompose(L)
    assert np.allclose(b2, beta, atol=1e-10)
    assert np.allclose(R2, R, atol=1e-8)


@given(vec3, st.floats(0.0, 0.999), momenta, st.floats(0.05, 3.0))
@settings(max_examples=60)
def test_wigner_rotation_is_rotation(v, speed, p, m0):
    R = kin.wigner_rotation(kin.pure_boost(velocity_of(v, speed)), p, m0)
    assert np.allclose(R.T @ R, np.eye(3), atol=1e-10)
    assert np.isclose(np.linalg.det(R), 1.0, atol=1e-10)


@given(vec3, st.floats(0.0, 0.99), momenta, st.floats(0.1, 3.0))
@settings(max_examples=60)
def test_closed_su2_form_matches_product_of_lifts(v, speed, p, m0):
    beta0 = velocity_of(v, speed)
    Lp = kin.transform_momentum(kin.pure_boost(beta0), p, m0)
    product = kin.sl2c_boost_inverse(Lp / m0) @ kin.sl2c_boost(kin.gamma(beta0) * beta0) @ kin.sl2c_boost(p / m0)
    U = kin.boost_wigner_su2(beta0, p, m0)
    assert np.allclose(U, product, atol=1e-9)
    assert np.allclose(U, su2_from_rotation(kin.wigner_rotation(kin.pure_boost(beta0), p, m0)), atol=1e-10)


def test_collinear_boost_has_no_wigner_rotation():
    n = np.array([1.0, 2.0, -2.0]) / 3
    R = kin.wigner_rotation(kin.pure_boost(0.9 * n), 40.0 * n, 1.0)
    assert np.max(np.abs(R - np.eye(3))) <= 1e-12


def test_thomas_angle_perpendicular_boosts():
    # cos(angle) = (1 + g + g1 + g2)^2 / ((1 + g)(1 + g1)(1 + g2)) - 1 with g = g1 g2
    b1, b2 = 0.6, 0.8
    g1, g2 = 1 / np.sqrt(1 - b1**2), 1 / np.sqrt(1 - b2**2)
    g = g1 * g2
    _, R = kin.decompose(kin.pure_boost([0, b2, 0]) @ kin.pure_boost([b1, 0, 0]))
    expected = (1 + g + g1 + g2) ** 2 / ((1 + g) * (1 + g1) * (1 + g2)) - 1
    assert (np.trace(R) - 1) / 2 == pytest.approx(expected, abs=1e-13)


def test_superluminal_boost_rejected():
    with pytest.raises(ValueError):
        kin.pure_boost([0.6, 0.8, 0.1])


def test_lorentz_from_sl2c_of_lift():
    L = kin.pure_boost([0.2, 0.4, -0.1]) @ kin.rotation4(kin.rotation_matrix([1, 1, 0], 0.7))
    assert np.allclose(kin.lorentz_from_sl2c(kin.lift(L)), L, atol=1e-13)
