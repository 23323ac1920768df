"""Poincare and inversion transformations of momentum-space amplitudes.

Analytic carriers are transformed lazily: the result evaluates the pulled
back amplitude on demand, so repeated transformations stay exact.  Grid
carriers are resampled once per call through the spectral interpolant
(points that leave the box are clamped to zero and the lost probability is
recorded on the result).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import kinematics as kin
from .amplitudes import MASS_SCALE, Extent, GridAmplitude, MappedAmplitude, norm_squared
from .spin import su2_from_rotation, wigner_d

LOST_MASS_WARN = 1e-8


@dataclass(frozen=True)
class Translation:
    a: tuple  # four-vector (a0, ax, ay, az)

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in np.asarray(self.a, dtype=float).reshape(4)))


@dataclass(frozen=True, eq=False)
class Rotation:
    R: np.ndarray

    def __post_init__(self):
        R = np.asarray(self.R, dtype=float)
        if R.shape != (3, 3) or not np.allclose(R.T @ R, np.eye(3), atol=1e-12) or np.linalg.det(R) < 0:
            raise ValueError("rotation must be a proper orthogonal 3x3 matrix")
        object.__setattr__(self, "R", R)

    @classmethod
    def about(cls, axis, angle):
        return cls(kin.rotation_matrix(axis, angle))


@dataclass(frozen=True)
class Boost:
    beta: tuple

    def __post_init__(self):
        b = np.asarray(self.beta, dtype=float).reshape(3)
        if not np.linalg.norm(b) < 1:
            raise ValueError(f"boost velocity must satisfy |beta| < 1, got |beta| = {np.linalg.norm(b):.6g}")
        object.__setattr__(self, "beta", tuple(b))


@dataclass(frozen=True)
class Parity:
    pass


@dataclass(frozen=True)
class TimeReversal:
    pass


PoincareElement = Translation | Rotation | Boost | Parity | TimeReversal


# --- helpers ---------------------------------------------------------------------

def _mix(D, v):
    return np.einsum("...ij,...j->...i", D, v)


def _tr_phases(two_s):
    # (-1)^(s+m) with m = s - i  ->  (-1)^(2s - i)
    return np.array([(-1) ** (two_s - i) for i in range(two_s + 1)], dtype=float)


def _fib_sphere(n=64):
    k = np.arange(n) + 0.5
    phi = np.arccos(1 - 2 * k / n)
    theta = np.pi * (1 + 5**0.5) * k
    return np.column_stack([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)])


def _grid_lost(psi, data, label):
    before = norm_squared(psi)
    after = float(np.sum(np.abs(data) ** 2) * psi.weight)
    lost = max(0.0, before - after)
    if lost > LOST_MASS_WARN:
        warnings.warn(f"{label}: grid box lost {lost:.3e} of the probability", RuntimeWarning, stacklevel=3)
    return psi.with_data(data, lost_mass=psi.lost_mass + lost)


# --- transformations -------------------------------------------------------------

def translate(psi, a):
    """Psi'_m(p) = Psi_m(p) exp(+i p.a) with p.a = omega a0 - p.a_vec."""
    a = np.asarray(a, dtype=float).reshape(4)
    m0 = psi.particle.m0

    def phase(p):
        return np.exp(1j * (kin.energy(p, m0) * a[0] - p @ a[1:]))

    if isinstance(psi, GridAmplitude):
        return psi.with_data(psi.data * phase(psi.points)[..., None])

    def values(p):
        return psi.values(p) * phase(p)[..., None]

    def grad(p):
        dphase = 1j * (kin.velocity(p, m0) * a[0] - a[1:])
        return (psi.gradient(p) + dphase[..., :, None] * psi.values(p)[..., None, :]) * phase(p)[..., None, None]

    shift = float(np.linalg.norm(a[1:])) + abs(a[0])
    e = psi.extent()
    origin = None if e.origin is None else replace(e.origin, xradius=e.origin.xradius + shift)
    ext = replace(e, xradius=e.xradius + shift, origin=origin)
    return MappedAmplitude(psi.particle, values, ext, grad)


def rotate(psi, R):
    """Psi'_m(p) = sum_m' D_mm'(R) Psi_m'(R^-1 p)."""
    R = Rotation(R).R
    D = wigner_d(psi.particle.two_s, su2_from_rotation(R))
    if isinstance(psi, GridAmplitude):
        q = psi.points @ R  # R^-1 p = R^T p
        data = _mix(D, psi.evaluate(q))
        return _grid_lost(psi, data, "rotation")

    def values(p):
        return _mix(D, psi.values(p @ R))

    def grad(p):
        g = psi.gradient(p @ R)  # (..., 3, n) in the pulled-back variable
        g = np.einsum("ij,...jn->...in", R, g)
        return np.einsum("mk,...ik->...im", D, g)

    return MappedAmplitude(psi.particle, values, _carry(psi.extent(), kin.rotation4(R)), grad)


def boost_factors(particle, beta0, p):
    """Pullback momenta q = Lambda^-1 p, Jacobian factor sqrt(omega(q)/omega(p)) and the D-matrices."""
    m0 = particle.m0
    q = kin.transform_momentum(kin.pure_boost(-np.asarray(beta0, dtype=float)), p, m0)
    ratio = np.sqrt(kin.energy(q, m0) / kin.energy(p, m0))
    if particle.two_s == 0:
        D = np.ones(q.shape[:-1] + (1, 1))
    else:
        D = wigner_d(particle.two_s, kin.boost_wigner_su2(beta0, q, m0))
    return q, ratio, D


_REFLECT = np.diag([1.0, -1.0, -1.0, -1.0])


def _carry(e, L4):
    """Extent after a rotation or reflection ``L4`` of momentum space."""
    center = L4[1:, 1:] @ e.center
    if e.origin is None:
        return replace(e, center=center)
    return replace(e, center=center, lorentz=L4 @ e.lorentz)


def _boost_extent(e, beta0, m0):
    origin = e if e.origin is None else e.origin
    L = kin.pure_boost(beta0)
    if e.lorentz is not None:
        L = L @ e.lorentz
    dirs = _fib_sphere()
    shell = kin.transform_momentum(L, origin.center + origin.radius * dirs, m0)
    center = kin.transform_momentum(L, origin.center, m0)
    radius = 1.02 * float(np.max(np.linalg.norm(shell - center, axis=1)))
    # widths and x-reach are governed by the core of the packet, not its far tail
    core = kin.transform_momentum(L, np.concatenate([origin.center[None], origin.center + 0.3 * origin.radius * dirs]), m0)
    # q = c omega' + D p' for Lambda^-1 = [[a, b], [c, D]], so dq/dp' = D + c beta(p')^T
    Li = kin.inverse(L)
    Jinv = Li[1:, 1:] + Li[1:, 0][None, :, None] * kin.velocity(core, m0)[:, None, :]
    stretch = float(np.max(np.linalg.svd(Jinv, compute_uv=False)[:, 0]))
    scale = min(origin.scale / stretch, MASS_SCALE * m0)
    return Extent(center, radius, scale, origin.xradius * stretch, origin, L)


def boost(psi, beta0):
    """Psi'_m(p) = sqrt(omega(q)/omega(p)) sum_m' D_mm'(W(p <- q)) Psi_m'(q), q = Lambda^-1 p."""
    beta0 = np.asarray(Boost(beta0).beta)
    if not np.any(beta0):
        return psi
    particle = psi.particle
    if isinstance(psi, GridAmplitude):
        q, ratio, D = boost_factors(particle, beta0, psi.points)
        data = ratio[..., None] * _mix(D, psi.evaluate(q))
        return _grid_lost(psi, data, "boost")

    def values(p):
        q, ratio, D = boost_factors(particle, beta0, p)
        return ratio[..., None] * _mix(D, psi.values(q))

    return MappedAmplitude(particle, values, _boost_extent(psi.extent(), beta0, particle.m0))


def parity(psi):
    """Psi'_m(omega, p) = eta Psi_m(omega, -p)."""
    eta = psi.particle.eta
    if isinstance(psi, GridAmplitude):
        return psi.with_data(eta * _reflect_grid(psi.data))
    e = psi.extent()
    return MappedAmplitude(
        psi.particle,
        lambda p: eta * psi.values(-p),
        _carry(e, _REFLECT),
        lambda p: -eta * psi.gradient(-p),
    )


def time_reverse(psi):
    """Psi'_m(omega, p) = (-1)^(s+m) conj(Psi_-m(omega, -p)); antiunitary."""
    ph = _tr_phases(psi.particle.two_s)
    if isinstance(psi, GridAmplitude):
        return psi.with_data(ph * np.conj(_reflect_grid(psi.data))[..., ::-1])
    e = psi.extent()
    return MappedAmplitude(
        psi.particle,
        lambda p: ph * np.conj(psi.values(-p))[..., ::-1],
        _carry(e, _REFLECT),
        lambda p: -ph * np.conj(psi.gradient(-p))[..., ::-1],
    )


def _reflect_grid(data):
    # node j -> n - j (mod n): exact involution on the grid
    out = data[::-1, ::-1, ::-1]
    return np.roll(out, 1, axis=(0, 1, 2))


def apply(psi, element):
    if isinstance(element, Translation):
        return translate(psi, element.a)
    if isinstance(element, Rotation):
        return rotate(psi, element.R)
    if isinstance(element, Boost):
        return boost(psi, element.beta)
    if isinstance(element, Parity):
        return parity(psi)
    if isinstance(element, TimeReversal):
        return time_reverse(psi)
    raise TypeError(f"not a Poincare element: {element!r}")


def apply_sequence(psi, elements):
    for el in elements:
        psi = apply(psi, el)
    return psi


def four_vector_action(element, v):
    """How an element acts on the four-momentum expectation."""
    v = np.asarray(v, dtype=float)
    if isinstance(element, Translation):
        return v
    if isinstance(element, Rotation):
        return kin.apply(kin.rotation4(element.R), v)
    if isinstance(element, Boost):
        return kin.apply(kin.pure_boost(element.beta), v)
    if isinstance(element, (Parity, TimeReversal)):
        return v * np.array([1.0, -1.0, -1.0, -1.0])
    raise TypeError(f"not a Poincare element: {element!r}")


def boost_composition(beta1, beta2):
    """Write pure_boost(beta2) pure_boost(beta1) = pure_boost(beta12) rotation4(R)."""
    L = kin.pure_boost(beta2) @ kin.pure_boost(beta1)
    return kin.decompose(L)
