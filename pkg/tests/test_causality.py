import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relamp import causality as caus


@given(st.floats(-12, 12))
@settings(max_examples=40)
def test_d_minus2_matches_mpmath(s):
    z = 1j * s / np.sqrt(2)
    ref = complex(mpmath.pcfd(-2, mpmath.mpc(0, s / np.sqrt(2))))
    assert abs(caus.parabolic_d_minus2(z) - ref) <= 1e-12 * max(1.0, abs(ref))


@given(st.floats(0, 12), st.floats(0, 12))
@settings(max_examples=30, deadline=None)
def test_closed_form_matches_quadrature(tau, rho):
    a = caus.spatial_wavefunction(tau, rho, "closed")
    b = caus.spatial_wavefunction(tau, rho, "quadrature")
    assert abs(a - b) < 1e-12


def test_small_rho_branch_is_continuous():
    for tau in (0.0, 2.0, 5.0):
        below = caus.wavefunction_closed(tau, caus.SMALL_RHO * (1 - 1e-9))
        above = caus.wavefunction_closed(tau, caus.SMALL_RHO * (1 + 1e-9))
        assert abs(below - above) < 1e-12
        assert abs(caus.wavefunction_closed(tau, 0.0) - caus.wavefunction_quadrature(tau, 0.0)) < 1e-13


def test_initial_wavefunction_is_gaussian():
    # at tau = 0 the packet is (2 pi)^(-3/4) exp(-rho^2 / 4) in scaled units
    rho = np.linspace(0.05, 6, 13)
    expected = (2 * np.pi) ** -0.75 * np.exp(-(rho**2) / 4)
    assert np.allclose(caus.wavefunction_closed(0.0, rho), expected, atol=1e-14)


@pytest.mark.parametrize("tau", [0.0, 2.0, 5.0, 12.0])
def test_probability_conserved(tau):
    assert caus.total_probability(tau) == pytest.approx(1.0, abs=1e-9)


def test_momentum_norm():
    assert caus.ScaledPacket().norm() == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        caus.ScaledPacket(-1.0)


def test_reference_value():
    assert caus.causality_ratio(5.0, 5.0) == pytest.approx(0.996958, abs=2e-4)


def test_curve_shape():
    curve = caus.causality_scan(5.0, caus.rho_grid())
    assert curve.min < 1
    assert len(curve.violations()) > 0
    assert abs(curve.ratio[-1] - 1) < 1e-3
    assert curve.ratio[0] > 1  # the cone around a small sphere catches far more than it started with


def test_massive_packet_uses_quadrature():
    c = caus.causality_ratio(5.0, 5.0, mass_ratio=0.1)
    assert 0.99 < c < 1
    with pytest.raises(ValueError):
        caus.spatial_wavefunction(1.0, 1.0, "closed", mass_ratio=0.1)


def test_argument_checks():
    with pytest.raises(ValueError):
        caus.causality_ratio(0.0, 1.0)
    with pytest.raises(ValueError):
        caus.spatial_wavefunction(-1.0, 1.0)
    with pytest.raises(ValueError):
        caus.causality_scan(5.0, [1.0, 0.5])
    assert 5.0 in caus.rho_grid().tolist()
    assert len(caus.rho_grid()) == 100
