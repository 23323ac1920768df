"""Locally transforming positive-energy fields built from probability amplitudes.

The Klein-Gordon scalar is phi(x) = (2 pi)^(-3/2) int d^3p/omega exp(-ip.x) sqrt(omega) Psi(p),
and the Dirac field stacks D^(-)[p] and D^(+)[p] acting on the two
spin-1/2 amplitudes (Weyl/chiral representation).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kinematics as kin
from .amplitudes import GridAmplitude, sample_on_grid
from .fourier import FourierEngine

I2 = np.eye(2, dtype=complex)
ZERO2 = np.zeros((2, 2), dtype=complex)

GAMMA_WEYL = np.array(
    [np.block([[ZERO2, I2], [I2, ZERO2]])]
    + [np.block([[ZERO2, s], [-s, ZERO2]]) for s in kin.PAULI]
)


@dataclass(frozen=True, eq=False)
class ScalarField:
    t: float
    n: int
    pmax: float
    m0: float
    data: np.ndarray  # (n, n, n)

    def norm_squared(self):
        hx = FourierEngine(self.n, self.pmax).hx
        return float(np.sum(np.abs(self.data) ** 2) * hx**3)


@dataclass(frozen=True, eq=False)
class DiracField:
    t: float
    n: int
    pmax: float
    m0: float
    data: np.ndarray  # (n, n, n, 4)
    representation: str = "weyl"


def dirac_boost_matrix(p, m0, r):
    """D^(r)[p] = (omega + m0 + r p.sigma) / sqrt(2 m0 (omega + m0)), r = +1 or -1."""
    if r not in (1, -1):
        raise ValueError("r must be +1 or -1")
    p = np.asarray(p, dtype=float)
    om = kin.energy(p, m0)
    ps = np.einsum("...i,ijk->...jk", p, kin.PAULI)
    return ((om + m0)[..., None, None] * I2 + r * ps) / np.sqrt(2 * m0 * (om + m0))[..., None, None]


def dirac_spinor(p, m0, xi):
    """Plane-wave coefficient (D^(-) xi, D^(+) xi) / sqrt(2) for two-component ``xi``."""
    xi = np.asarray(xi, dtype=complex)
    up = np.einsum("...ij,...j->...i", dirac_boost_matrix(p, m0, -1), xi)
    lo = np.einsum("...ij,...j->...i", dirac_boost_matrix(p, m0, +1), xi)
    return np.concatenate([up, lo], axis=-1) / np.sqrt(2)


def dirac_operator_momentum(p, m0):
    """gamma^mu p_mu - m0 for on-shell p (Weyl gammas), shape (..., 4, 4)."""
    pmu = kin.four_momentum(p, m0)
    slash = pmu[..., 0, None, None] * GAMMA_WEYL[0] - np.einsum("...i,ijk->...jk", pmu[..., 1:], GAMMA_WEYL[1:])
    return slash - m0 * np.eye(4)


def momentum_residual(p, m0, xi):
    """max |(gamma.p - m0) u(p)| over the given momenta."""
    u = dirac_spinor(p, m0, xi)
    return float(np.max(np.abs(np.einsum("...ij,...j->...i", dirac_operator_momentum(p, m0), u))))


def _grid(psi, n, pmax):
    return psi if isinstance(psi, GridAmplitude) else sample_on_grid(psi, n=n, pmax=pmax)


def kg_scalar(psi, t=0.0, n=64, pmax=None):
    """phi(t, x) on the position grid: the transform of Psi / sqrt(omega) with phase exp(-i omega t)."""
    if psi.particle.two_s != 0:
        raise ValueError("kg_scalar needs a spin-0 amplitude")
    g = _grid(psi, n, pmax)
    eng = FourierEngine(g.n, g.pmax)
    om = g.particle.energy(g.points)
    data = eng.to_position((g.data[..., 0] / np.sqrt(om) * np.exp(-1j * om * t))[..., None])[..., 0]
    return ScalarField(float(t), g.n, g.pmax, g.particle.m0, data)


def dirac_build(psi, t=0.0, n=64, pmax=None):
    """Four-component positive-energy Dirac field from a spin-1/2 amplitude, summed over m."""
    if psi.particle.two_s != 1:
        raise ValueError("dirac_build needs a spin-1/2 amplitude")
    g = _grid(psi, n, pmax)
    m0 = g.particle.m0
    eng = FourierEngine(g.n, g.pmax)
    om = g.particle.energy(g.points)
    coef = dirac_spinor(g.points, m0, g.data) / np.sqrt(om)[..., None]
    data = eng.to_position(coef * np.exp(-1j * om * t)[..., None])
    return DiracField(float(t), g.n, g.pmax, m0, data)


def dirac_residual(field):
    """Relative spectral residual of (i gamma^mu d_mu - m0) Psi, with i d_t = H on positive energies."""
    eng = FourierEngine(field.n, field.pmax)
    p = eng.p_points()
    om = kin.energy(p, field.m0)
    a = eng.to_momentum(field.data)
    # i d_t -> omega, i d_k -> -p_k  (exp(-i omega t + i p.x) modes)
    dt = eng.to_position(om[..., None] * a)
    grads = [eng.to_position(-p[..., k, None] * a) for k in range(3)]
    out = np.einsum("ij,...j->...i", GAMMA_WEYL[0], dt)
    for k in range(3):
        out = out + np.einsum("ij,...j->...i", GAMMA_WEYL[k + 1], grads[k])
    res = out - field.m0 * field.data
    return float(np.linalg.norm(res) / (field.m0 * np.linalg.norm(field.data)))


def kg_field_residual(field):
    from .position import kg_residual

    return kg_residual(field.data[..., None], field.n, field.pmax, field.m0)
