"""Discrete Fourier machinery shared by the grid carriers and the position module.

Momentum nodes are ``p_j = (j - n/2) h_p`` and position nodes are
``x_k = (k - n/2) h_x`` with ``h_p h_x n = 2 pi``; with the symmetric
``(2 pi)^(-3/2)`` convention the discrete transforms are exactly unitary
with respect to the cell-volume weighted sums.
"""
from __future__ import annotations

from dataclasses import dataclass

import finufft
import numpy as np
import scipy.fft as sfft

_AXES = (0, 1, 2)

# process-wide worker count used when an engine does not set its own (None: library default)
DEFAULT_THREADS = None


def set_threads(n):
    global DEFAULT_THREADS
    DEFAULT_THREADS = None if n is None else int(n)


def _threads(n):
    return DEFAULT_THREADS if n is None else n


@dataclass(frozen=True)
class FourierEngine:
    n: int
    pmax: float
    nthreads: int | None = None

    @property
    def hp(self):
        return 2 * self.pmax / self.n

    @property
    def hx(self):
        return 2 * np.pi / (self.n * self.hp)

    @property
    def xmax(self):
        return self.n * self.hx / 2

    @property
    def p_axis(self):
        return (np.arange(self.n) - self.n // 2) * self.hp

    @property
    def x_axis(self):
        return (np.arange(self.n) - self.n // 2) * self.hx

    def p_points(self):
        ax = self.p_axis
        return np.stack(np.meshgrid(ax, ax, ax, indexing="ij"), axis=-1)

    def x_points(self):
        ax = self.x_axis
        return np.stack(np.meshgrid(ax, ax, ax, indexing="ij"), axis=-1)

    def to_position(self, data):
        """psi(x_k) = (2 pi)^(-3/2) h_p^3 sum_j Psi(p_j) exp(+i p_j . x_k) over the leading three axes."""
        f = sfft.ifftshift(data, axes=_AXES)
        f = sfft.ifftn(f, axes=_AXES, workers=_threads(self.nthreads))
        return sfft.fftshift(f, axes=_AXES) * (self.n * self.hp) ** 3 * (2 * np.pi) ** -1.5

    def to_momentum(self, data):
        """Inverse of :meth:`to_position`."""
        f = sfft.ifftshift(data, axes=_AXES)
        f = sfft.fftn(f, axes=_AXES, workers=_threads(self.nthreads))
        return sfft.fftshift(f, axes=_AXES) * self.hx**3 * (2 * np.pi) ** -1.5

    def x_multiply(self, data):
        """Momentum-space i d/dp of grid data, as ``(n, n, n, 3, ncomp)``: transform x psi back."""
        psi_x = self.to_position(data)
        x = self.x_points()
        return self.to_momentum(x[..., :, None] * psi_x[..., None, :])

    def gradient(self, data):
        """Spectral d/dp of grid data, ``(n, n, n, 3, ncomp)``."""
        return -1j * self.x_multiply(data)

    def p_multiply(self, data):
        """Position-space -i grad of grid data, ``(n, n, n, 3, ncomp)``."""
        psi_p = self.to_momentum(data)
        p = self.p_points()
        return self.to_position(p[..., :, None] * psi_p[..., None, :])

    def interpolate(self, data, q):
        """Evaluate the trigonometric interpolant of momentum samples at points ``q``.

        Points outside the box evaluate to zero.  Uses a type-2 NUFFT on the
        position-space coefficients, so band-limited data are reproduced to
        the transform tolerance.
        """
        q = np.asarray(q, dtype=float)
        shape = q.shape[:-1]
        flat = q.reshape(-1, 3)
        coeffs = self.to_position(data)
        ncomp = data.shape[-1]
        inside = np.all((flat >= -self.pmax) & (flat < self.pmax), axis=1)
        out = np.zeros((flat.shape[0], ncomp), dtype=complex)
        if np.any(inside):
            theta = flat[inside] * self.hx
            nt = _threads(self.nthreads)
            opts = {} if nt is None else {"nthreads": nt}
            tx, ty, tz = (np.ascontiguousarray(theta[:, k]) for k in range(3))
            for c in range(ncomp):
                vals = finufft.nufft3d2(
                    tx, ty, tz, np.ascontiguousarray(coeffs[..., c]), isign=-1, eps=1e-14, **opts
                )
                out[inside, c] = vals
        out *= self.hx**3 * (2 * np.pi) ** -1.5
        return out.reshape(shape + (ncomp,))


def engine_for(grid, nthreads=None):
    return FourierEngine(grid.n, grid.pmax, nthreads)


def interpolate(grid, q, nthreads=None):
    return engine_for(grid, nthreads).interpolate(grid.data, q)
