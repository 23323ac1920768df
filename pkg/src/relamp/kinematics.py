"""Special-relativistic kinematics in natural units with metric (+,-,-,-).

Four-vectors are ``(..., 4)`` arrays ordered ``(t, x, y, z)``; three-vectors
are ``(..., 3)``.  Every function broadcasts over leading axes so that the
transformation code can evaluate whole momentum grids at once.  All
transformations are active.
"""
from __future__ import annotations

import numpy as np

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

_EPS = np.finfo(float).eps
_SIGNS = np.outer(np.diag(METRIC), np.diag(METRIC))


def minkowski_dot(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a[..., 0] * b[..., 0] - np.sum(a[..., 1:] * b[..., 1:], axis=-1)


def energy(p, m0):
    """Positive mass-shell energy +sqrt(p^2 + m0^2)."""
    p = np.asarray(p, dtype=float)
    return np.sqrt(np.sum(p * p, axis=-1) + m0 * m0)


def four_momentum(p, m0):
    p = np.asarray(p, dtype=float)
    return np.concatenate([energy(p, m0)[..., None], p], axis=-1)


def velocity(p, m0):
    p = np.asarray(p, dtype=float)
    return p / energy(p, m0)[..., None]


def gamma(beta):
    beta = np.asarray(beta, dtype=float)
    b2 = np.sum(beta * beta, axis=-1)
    if np.any(b2 >= 1.0):
        raise ValueError(f"boost speed must satisfy |beta| < 1, got |beta|^2 = {np.max(b2)!r}")
    return 1.0 / np.sqrt(1.0 - b2)


def rapidity(beta0):
    """Rapidity magnitude artanh|beta0|, so cosh = gamma0 and sinh = gamma0 |beta0|."""
    speed = np.linalg.norm(np.asarray(beta0, dtype=float), axis=-1)
    if np.any(speed >= 1.0):
        raise ValueError("boost speed must satisfy |beta| < 1")
    return np.arctanh(speed)


def _boost_from_u(u):
    # closed rank-1 form in u = gamma*beta; no 1 - beta^2 cancellation
    u = np.asarray(u, dtype=float)
    g = np.sqrt(1.0 + np.sum(u * u, axis=-1))
    out = np.zeros(u.shape[:-1] + (4, 4))
    out[..., 0, 0] = g
    out[..., 0, 1:] = u
    out[..., 1:, 0] = u
    out[..., 1:, 1:] = np.eye(3) + u[..., :, None] * u[..., None, :] / (1.0 + g)[..., None, None]
    return out


def pure_boost(beta0):
    """Symmetric boost matrix taking a particle at rest to velocity ``beta0``."""
    beta0 = np.asarray(beta0, dtype=float)
    g = gamma(beta0)
    return _boost_from_u(g[..., None] * beta0)


def standard_boost(p, m0):
    """Lambda[p]: the pure boost carrying (m0, 0) to (omega, p)."""
    p = np.asarray(p, dtype=float)
    return _boost_from_u(p / m0)


def inverse(L):
    """Inverse of a Lorentz matrix via g L^T g (exact for metric-preserving L)."""
    L = np.asarray(L, dtype=float)
    return np.swapaxes(L, -1, -2) * _SIGNS


def apply(L, v):
    return np.einsum("...ij,...j->...i", L, v)


def transform_momentum(L, p, m0):
    """Three-momentum of L applied to the on-shell four-momentum of ``p``."""
    return apply(L, four_momentum(p, m0))[..., 1:]


def rotation_matrix(axis, angle):
    """Active right-handed rotation by ``angle`` about ``axis`` (Rodrigues)."""
    axis = np.asarray(axis, dtype=float)
    n = axis / np.linalg.norm(axis)
    K = np.array([[0, -n[2], n[1]], [n[2], 0, -n[0]], [-n[1], n[0], 0]])
    return np.eye(3) + np.sin(angle) * K + (1 - np.cos(angle)) * K @ K


def rotation4(R):
    R = np.asarray(R, dtype=float)
    out = np.zeros(R.shape[:-2] + (4, 4))
    out[..., 0, 0] = 1.0
    out[..., 1:, 1:] = R
    return out


def is_lorentz(L, tol=1e-12):
    """Metric preservation plus proper orthochronous conditions."""
    L = np.asarray(L, dtype=float)
    scale = max(1.0, float(np.max(np.abs(L))) ** 2)
    ok_metric = np.allclose(np.swapaxes(L, -1, -2) @ METRIC @ L, METRIC, rtol=0, atol=tol * scale)
    return bool(ok_metric and np.all(np.linalg.det(L) > 0) and np.all(L[..., 0, 0] >= 1.0 - tol))


def decompose(L):
    """Split L = pure_boost(beta) @ rotation4(R); returns (beta, R)."""
    L = np.asarray(L, dtype=float)
    u = L[..., 1:, 0]
    beta = u / L[..., 0, 0][..., None]
    R = (_boost_from_u(-u) @ L)[..., 1:, 1:]
    return beta, R


def velocity_compose(beta, beta0):
    """Velocity seen after boosting a particle of velocity ``beta`` by ``beta0``.

    Implements (beta_perp + gamma0 (beta_par + beta0)) / (gamma0 (1 + beta0.beta)).
    """
    beta = np.asarray(beta, dtype=float)
    beta0 = np.asarray(beta0, dtype=float)
    gamma(beta)
    g0 = gamma(beta0)
    b0sq = np.sum(beta0 * beta0, axis=-1)
    dot = np.sum(beta0 * beta, axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        par = np.where(b0sq > 0, dot / np.where(b0sq > 0, b0sq, 1.0), 0.0)[..., None] * beta0
    perp = beta - par
    g0e = np.asarray(g0)[..., None]
    return (perp + g0e * (par + beta0)) / (g0e * (1.0 + dot)[..., None])


# --- SL(2,C) double cover -------------------------------------------------

def sl2c_boost(u):
    """Hermitian SL(2,C) lift (1 + gamma + u.sigma)/sqrt(2(1 + gamma)) of the boost with u = gamma*beta."""
    u = np.asarray(u, dtype=float)
    g = np.sqrt(1.0 + np.sum(u * u, axis=-1))
    M = np.einsum("...i,ijk->...jk", u, PAULI) + (1.0 + g)[..., None, None] * np.eye(2)
    return M / np.sqrt(2.0 * (1.0 + g))[..., None, None]


def sl2c_boost_inverse(u):
    return sl2c_boost(-np.asarray(u, dtype=float))


def lorentz_from_sl2c(A):
    """Lorentz matrix of A acting by X -> A X A^dagger on X = x^0 + x.sigma."""
    A = np.asarray(A, dtype=complex)
    basis = np.concatenate([np.eye(2, dtype=complex)[None], PAULI], axis=0)
    Ad = np.conj(np.swapaxes(A, -1, -2))
    # L^mu_nu = 1/2 tr(sigma_mu A sigma_nu A^dag), sigma_0 = identity
    M = A[..., None, :, :] @ basis @ Ad[..., None, :, :]
    return 0.5 * np.einsum("mab,...nba->...mn", basis, M).real


def wigner_rotation(L, p, m0, tol=1e-10):
    """Wigner rotation W(Lp <- p) = Lambda^{-1}[Lp] L Lambda[p], returned as its 3x3 block.

    With L = pure_boost(beta) R, W(L, p) = W(pure_boost(beta), R p) R, and
    the pure-boost factor comes from the closed SU(2) form of
    :func:`boost_wigner_su2`, which is well conditioned at ultra-relativistic
    momenta and exactly the identity for collinear boosts.  The literal 4x4
    product is formed as a cross-check: its time row and column must be
    (1, 0, 0, 0) and its spatial block must agree.  The check tolerance is
    ``tol`` widened by the rounding floor of the 4x4 product, which grows
    like gamma(Lp) * gamma(L) * gamma(p).
    """
    L = np.asarray(L, dtype=float)
    p = np.asarray(p, dtype=float)
    beta, Rl = decompose(L)
    Rp = np.einsum("...ij,...j->...i", Rl, p)
    R = lorentz_from_sl2c(boost_wigner_su2(beta, Rp, m0))[..., 1:, 1:] @ Rl

    Lp = transform_momentum(L, p, m0)
    W4 = inverse(standard_boost(Lp, m0)) @ L @ standard_boost(p, m0)
    cond = energy(Lp, m0) / m0 * energy(p, m0) / m0 * np.max(np.abs(L), axis=(-1, -2))
    limit = np.maximum(tol, 64 * _EPS * cond)
    e0 = np.zeros(4)
    e0[0] = 1.0
    dev = np.maximum(
        np.max(np.abs(W4[..., 0, :] - e0), axis=-1), np.max(np.abs(W4[..., :, 0] - e0), axis=-1)
    )
    dev = np.maximum(dev, np.max(np.abs(W4[..., 1:, 1:] - R), axis=(-1, -2)))
    if np.any(dev > limit):
        raise AssertionError(
            f"composed Wigner transformation is not a pure rotation (deviation {np.max(dev):.3e})"
        )
    return R


def boost_wigner_su2(beta0, p, m0):
    """SU(2) form of W(Lp <- p) for the pure boost L = pure_boost(beta0).

    Multiplying out the Hermitian lifts of the three boosts gives, with
    u0 = gamma0 beta0 and u = p / m0,

        W = (s + i (u0 x u).sigma) / sqrt(s^2 + |u0 x u|^2),
        s = (1 + gamma0)(1 + gamma) + u0.u,

    which is unitary by construction and, since s > 0, the lift with
    rotation angle below pi.
    """
    beta0 = np.asarray(beta0, dtype=float)
    p = np.asarray(p, dtype=float)
    u0 = np.broadcast_to(gamma(beta0)[..., None] * beta0, p.shape)
    u = p / m0
    g0 = np.sqrt(1.0 + np.sum(u0 * u0, axis=-1))
    g = np.sqrt(1.0 + np.sum(u * u, axis=-1))
    s = (1.0 + g0) * (1.0 + g) + np.sum(u0 * u, axis=-1)
    w = np.cross(u0, u)
    nrm = np.sqrt(s * s + np.sum(w * w, axis=-1))
    a = (s + 1j * w[..., 2]) / nrm
    b = (1j * w[..., 0] + w[..., 1]) / nrm
    return np.stack([np.stack([a, b], -1), np.stack([-np.conj(b), np.conj(a)], -1)], -2)


def lift(L):
    """An SL(2,C) matrix covering the proper orthochronous Lorentz matrix L."""
    from .spin import su2_from_rotation

    _, R = decompose(L)
    u = np.asarray(L, dtype=float)[..., 1:, 0]
    return sl2c_boost(u) @ su2_from_rotation(R)
