"""SU(2) lifts of rotations and Wigner D-matrices for any spin.

Spin is passed as the integer ``two_s`` (twice the spin).  Matrix rows and
columns are ordered m = +s, s-1, ..., -s.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial, sqrt

import numpy as np

from .kinematics import PAULI


def two_s_of(spin):
    """Accept 0, 0.5, "1/2", Fraction(3, 2), ... and return twice the spin."""
    two_s = Fraction(spin) * 2
    if isinstance(spin, float):
        # tolerate float spellings of half-integers such as 1.5 but not 0.3
        rounded = Fraction(round(spin * 2))
        two_s = rounded if abs(float(two_s - rounded)) < 1e-12 else two_s
    if two_s.denominator != 1 or two_s < 0:
        raise ValueError(f"spin must be a non-negative multiple of 1/2, got {spin!r}")
    return int(two_s)


def projections(two_s):
    """Spin projections m = s, s-1, ..., -s as floats."""
    return (two_s - 2 * np.arange(two_s + 1)) / 2.0


def su2_from_axis_angle(axis, angle):
    """U = cos(angle/2) I - i sin(angle/2) n.sigma."""
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    return np.cos(angle / 2) * np.eye(2) - 1j * np.sin(angle / 2) * np.einsum("i,ijk->jk", n, PAULI)


def su2_from_rotation(R):
    """Lift R in SO(3) to SU(2) with rotation angle in [0, pi].

    The quaternion is extracted with Shepperd's branch selection and its
    scalar part is made non-negative.  For angle pi the sign is fixed so that
    the first nonzero axis component is positive.
    """
    R = np.asarray(R, dtype=float)
    shape = R.shape[:-2]
    R = R.reshape(-1, 3, 3)
    tr = np.trace(R, axis1=1, axis2=2)
    diag = np.diagonal(R, axis1=1, axis2=2)
    q = np.empty((R.shape[0], 4))

    branch = np.argmax(np.column_stack([tr, diag]), axis=1)
    for k in range(4):
        sel = branch == k
        if not np.any(sel):
            continue
        r = R[sel]
        if k == 0:
            s = np.sqrt(1.0 + tr[sel]) * 2
            q[sel] = np.column_stack(
                [s / 4, (r[:, 2, 1] - r[:, 1, 2]) / s, (r[:, 0, 2] - r[:, 2, 0]) / s, (r[:, 1, 0] - r[:, 0, 1]) / s]
            )
        else:
            i = k - 1
            j, l = (i + 1) % 3, (i + 2) % 3
            s = np.sqrt(1.0 + r[:, i, i] - r[:, j, j] - r[:, l, l]) * 2
            v = np.empty((r.shape[0], 3))
            v[:, i] = s / 4
            v[:, j] = (r[:, j, i] + r[:, i, j]) / s
            v[:, l] = (r[:, l, i] + r[:, i, l]) / s
            w = (r[:, l, j] - r[:, j, l]) / s
            q[sel] = np.column_stack([w, v])

    flip = q[:, 0] < 0
    half_turn = np.abs(q[:, 0]) < 1e-14
    if np.any(half_turn):
        vec = q[half_turn, 1:]
        first = vec[np.arange(len(vec)), np.argmax(np.abs(vec) > 1e-14, axis=1)]
        flip[half_turn] = first < 0
    q[flip] *= -1
    q /= np.linalg.norm(q, axis=1)[:, None]

    w, x, y, z = q.T
    U = np.empty((R.shape[0], 2, 2), dtype=complex)
    U[:, 0, 0] = w - 1j * z
    U[:, 0, 1] = -y - 1j * x
    U[:, 1, 0] = y - 1j * x
    U[:, 1, 1] = w + 1j * z
    return U.reshape(shape + (2, 2))


def rotation_from_su2(U):
    """Adjoint action R_ij = 1/2 tr(sigma_i U sigma_j U^dagger)."""
    U = np.asarray(U, dtype=complex)
    Ud = np.conj(np.swapaxes(U, -1, -2))
    return 0.5 * np.einsum("iab,...bc,jcd,...da->...ij", PAULI, U, PAULI, Ud).real


@lru_cache(maxsize=None)
def _monomials(two_s):
    """Terms of D_{m'm} as (row, col, coefficient, powers of a, b, c, d)."""
    j2 = two_s
    terms = []
    for row in range(j2 + 1):
        jp_mp = j2 - row  # j + m'
        jm_mp = row  # j - m'
        for col in range(j2 + 1):
            jp_m = j2 - col
            jm_m = col
            norm = sqrt(factorial(jp_mp) * factorial(jm_mp) * factorial(jp_m) * factorial(jm_m))
            # k counts factors of a; m + m' = j2 - row - col
            m_plus_mp = j2 - row - col
            for k in range(max(0, m_plus_mp), min(jp_m, jp_mp) + 1):
                nb = jp_mp - k
                nc = jp_m - k
                nd = k - m_plus_mp
                coef = norm / (factorial(k) * factorial(nb) * factorial(nc) * factorial(nd))
                terms.append((row, col, coef, k, nb, nc, nd))
    return tuple(terms)


def wigner_d(two_s, U):
    """Wigner D-matrix of spin two_s/2 for U in SU(2).

    Built as the action of U on the symmetric tensor power of C^2, so
    D(U1 U2) = D(U1) D(U2) holds exactly and D for spin 1/2 is U itself.
    Broadcasts over leading axes of ``U``.
    """
    U = np.asarray(U, dtype=complex)
    dim = two_s + 1
    out = np.zeros(U.shape[:-2] + (dim, dim), dtype=complex)
    if two_s == 0:
        out[..., 0, 0] = 1.0
        return out
    a, b, c, d = U[..., 0, 0], U[..., 0, 1], U[..., 1, 0], U[..., 1, 1]
    pw = [np.stack([x**n for n in range(two_s + 1)]) for x in (a, b, c, d)]
    for row, col, coef, na, nb, nc, nd in _monomials(two_s):
        out[..., row, col] += coef * pw[0][na] * pw[1][nb] * pw[2][nc] * pw[3][nd]
    return out


def wigner_d_rotation(two_s, R):
    """D-matrix of the rotation R through its canonical SU(2) lift."""
    return wigner_d(two_s, su2_from_rotation(R))
