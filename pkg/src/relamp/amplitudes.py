"""Momentum/spin probability amplitudes Psi_m(p) and their covariant companions.

Two carriers are provided.  Analytic carriers (:class:`GaussianAmplitude` and
the lazily transformed :class:`MappedAmplitude`) are callables on momentum
arrays and are integrated with a trapezoid rule on a box sized from their
:class:`Extent`; for smooth, rapidly decaying integrands the rule is
spectrally accurate.  :class:`GridAmplitude` holds uniform samples on the
periodic-style box ``[-pmax, pmax)^3``.

Component index ``i`` corresponds to the spin projection ``m = s - i``.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, replace
from functools import cached_property
from pathlib import Path

import numpy as np

from . import kinematics as kin
from .spin import two_s_of


@dataclass(frozen=True)
class ParticleSpec:
    m0: float
    two_s: int = 0
    eta: int = 1

    def __post_init__(self):
        if not self.m0 > 0:
            raise ValueError(f"rest mass must be positive, got {self.m0!r}")
        if self.eta not in (1, -1):
            raise ValueError(f"intrinsic parity must be +1 or -1, got {self.eta!r}")
        if int(self.two_s) != self.two_s or self.two_s < 0:
            raise ValueError(f"two_s must be a non-negative integer, got {self.two_s!r}")

    @classmethod
    def with_spin(cls, m0, spin=0, eta=1):
        return cls(float(m0), two_s_of(spin), int(eta))

    @property
    def spin(self):
        return self.two_s / 2

    @property
    def ncomp(self):
        return self.two_s + 1

    def energy(self, p):
        return kin.energy(p, self.m0)


@dataclass(frozen=True)
class Extent:
    """Where an analytic amplitude lives, used to size quadrature boxes.

    ``center``/``radius`` bound the momentum support, ``scale`` is the
    smallest momentum-space feature length and ``xradius`` bounds the
    position-space support about the origin.  After boosts, ``origin`` is
    the extent of the unboosted source and ``lorentz`` the accumulated map
    from it, so that chained transformations are bounded in one step
    instead of compounding per-step estimates.
    """

    center: np.ndarray
    radius: float
    scale: float
    xradius: float
    origin: "Extent | None" = None
    lorentz: np.ndarray | None = None


class MomentumAmplitude:
    particle: ParticleSpec


class AnalyticAmplitude(MomentumAmplitude):
    """Callable carrier: ``psi(p)`` returns ``(..., ncomp)`` complex values."""

    def __call__(self, p):
        return self.values(p)

    def values(self, p):
        raise NotImplementedError

    def extent(self) -> Extent:
        raise NotImplementedError

    def gradient(self, p):
        """d Psi / d p as ``(..., 3, ncomp)``; fourth-order central differences by default."""
        p = np.asarray(p, dtype=float)
        h = 1e-3 * self.extent().scale
        out = []
        for axis in range(3):
            e = np.zeros(3)
            e[axis] = h
            d = (
                -self.values(p + 2 * e) + 8 * self.values(p + e) - 8 * self.values(p - e) + self.values(p - 2 * e)
            ) / (12 * h)
            out.append(d)
        return np.stack(out, axis=-2)


@dataclass(frozen=True, eq=False)
class GaussianAmplitude(AnalyticAmplitude):
    """(2 pi sigma^2)^(-3/4) exp(-|p - pbar|^2 / 4 sigma^2) exp(-i p.xbar) times spin weights."""

    particle: ParticleSpec
    pbar: np.ndarray
    sigma_p: float
    xbar: np.ndarray
    spin_weights: np.ndarray

    def values(self, p):
        p = np.asarray(p, dtype=float)
        d = p - self.pbar
        env = (2 * np.pi * self.sigma_p**2) ** -0.75 * np.exp(
            -np.sum(d * d, axis=-1) / (4 * self.sigma_p**2) - 1j * (p @ self.xbar)
        )
        return env[..., None] * self.spin_weights

    def gradient(self, p):
        p = np.asarray(p, dtype=float)
        factor = -(p - self.pbar) / (2 * self.sigma_p**2) - 1j * self.xbar
        return factor[..., :, None] * self.values(p)[..., None, :]

    def extent(self):
        sigma_x = 1 / (2 * self.sigma_p)
        return Extent(
            center=self.pbar,
            radius=9 * self.sigma_p,
            scale=self.sigma_p,
            xradius=float(np.linalg.norm(self.xbar)) + 8 * sigma_x,
        )


@dataclass(frozen=True, eq=False)
class MappedAmplitude(AnalyticAmplitude):
    """Analytic carrier defined by an evaluation function (lazy transformation)."""

    particle: ParticleSpec
    func: object
    ext: Extent
    grad: object = None

    def values(self, p):
        return self.func(np.asarray(p, dtype=float))

    def gradient(self, p):
        if self.grad is None:
            return super().gradient(p)
        return self.grad(np.asarray(p, dtype=float))

    def extent(self):
        return self.ext


def gaussian(particle, pbar, sigma_p, xbar=(0.0, 0.0, 0.0), spin_weights=None):
    if not sigma_p > 0:
        raise ValueError(f"sigma_p must be positive, got {sigma_p!r}")
    if spin_weights is None:
        spin_weights = np.zeros(particle.ncomp, dtype=complex)
        spin_weights[0] = 1.0
    w = np.asarray(spin_weights, dtype=complex).reshape(-1)
    if w.size != particle.ncomp:
        raise ValueError(f"expected {particle.ncomp} spin weights, got {w.size}")
    nw = np.linalg.norm(w)
    if nw == 0:
        raise ValueError("spin weights must not all vanish")
    return GaussianAmplitude(
        particle,
        np.asarray(pbar, dtype=float).reshape(3),
        float(sigma_p),
        np.asarray(xbar, dtype=float).reshape(3),
        w / nw,
    )


def scaled(psi, c):
    """The amplitude c * psi (not renormalized)."""
    if isinstance(psi, GridAmplitude):
        return replace(psi, data=psi.data * c)
    return MappedAmplitude(psi.particle, lambda p: c * psi.values(p), psi.extent(), lambda p: c * psi.gradient(p))


# --- quadrature boxes ----------------------------------------------------------

@dataclass(frozen=True)
class QuadratureBox:
    """Uniform trapezoid nodes ``center + (k - (n_i - 1)/2) h`` along each axis."""

    center: np.ndarray
    n: tuple
    h: float

    @cached_property
    def points(self):
        axes = [(np.arange(k) - (k - 1) / 2) * self.h + c for k, c in zip(self.n, self.center)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    @property
    def weight(self):
        return self.h**3

    def slabs(self, max_nodes=1_000_000):
        """Node blocks along the first axis, each with at most about ``max_nodes`` points."""
        axes = [(np.arange(k) - (k - 1) / 2) * self.h + c for k, c in zip(self.n, self.center)]
        step = max(1, max_nodes // (self.n[1] * self.n[2]))
        for i in range(0, self.n[0], step):
            yield np.stack(np.meshgrid(axes[0][i : i + step], axes[1], axes[2], indexing="ij"), axis=-1)


# boxes materialized whole (operators that need all nodes at once)
MAX_BOX_NODES = 6_000_000
# boxes only swept slab by slab (plain integrals)
MAX_SWEPT_NODES = 60_000_000
# omega(p) has branch points a distance ~m0 off the real axis, so integrands
# carrying omega (or boost factors) need spacing well inside that strip
MASS_SCALE = 0.35


def quadrature_box(*amps, resolution=1.0, omega=False, max_nodes=MAX_BOX_NODES):
    """Box covering every amplitude's support at a spacing fine enough for all of them.

    The spacing resolves the smallest momentum scale (``0.6 * scale``) and
    avoids aliasing of the position-space content of any product of two
    amplitudes (period ``2 pi / h`` larger than the summed x-radii).
    """
    exts = [a.extent() for a in amps]
    lo = np.min([e.center - e.radius for e in exts], axis=0)
    hi = np.max([e.center + e.radius for e in exts], axis=0)
    xr = sorted(e.xradius for e in exts)[-2:]
    xsum = xr[-1] * 2 if len(xr) == 1 else sum(xr)
    scale = min(e.scale for e in exts)
    if omega:
        scale = min(scale, MASS_SCALE * min(a.particle.m0 for a in amps))
    h = min(0.6 * scale, 2 * np.pi / (1.02 * xsum)) / resolution
    n = tuple(int(k) for k in np.ceil((hi - lo) / h) + 1)
    if np.prod(n) > max_nodes:
        raise ValueError(
            f"quadrature box would need {n} nodes; the amplitudes are too far apart or too extended"
        )
    return QuadratureBox((lo + hi) / 2, n, h)


# --- grid carrier ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GridAmplitude(MomentumAmplitude):
    """Samples of Psi_m on nodes p_j = (j - n/2) h, h = 2 pmax / n, per axis.

    ``data`` has shape ``(n, n, n, ncomp)``.  ``lost_mass`` accumulates the
    probability pushed outside the box by transformations.
    """

    particle: ParticleSpec
    pmax: float
    data: np.ndarray
    lost_mass: float = 0.0

    def __post_init__(self):
        n = self.data.shape[0]
        if self.data.shape != (n, n, n, self.particle.ncomp):
            raise ValueError(f"grid data shape {self.data.shape} does not match n^3 x {self.particle.ncomp}")
        if n % 2:
            raise ValueError("grid size must be even")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("grid samples contain non-finite values")

    @property
    def n(self):
        return self.data.shape[0]

    @property
    def h(self):
        return 2 * self.pmax / self.n

    @property
    def weight(self):
        return self.h**3

    @property
    def axis(self):
        return grid_axis(self.n, self.pmax)

    @property
    def points(self):
        return grid_points(self.n, self.pmax)

    def with_data(self, data, lost_mass=None):
        return replace(self, data=data, lost_mass=self.lost_mass if lost_mass is None else lost_mass)

    def evaluate(self, q, nthreads=None):
        """Trigonometric interpolant of the samples at arbitrary momenta; zero outside the box."""
        from .fourier import interpolate

        return interpolate(self, q, nthreads=nthreads)


def grid_axis(n, pmax):
    return (np.arange(n) - n // 2) * (2 * pmax / n)


def grid_points(n, pmax):
    ax = grid_axis(n, pmax)
    return np.stack(np.meshgrid(ax, ax, ax, indexing="ij"), axis=-1)


def default_pmax(pbar, sigma_p, pad=8.0):
    return float(np.max(np.abs(pbar))) + pad * sigma_p


def sample_on_grid(psi, n=64, pmax=None, tail_tol=1e-12, normalize=True):
    """Sample an analytic amplitude onto a grid, enforcing the tail-mass limit."""
    if pmax is None:
        ext = psi.extent()
        if isinstance(psi, GaussianAmplitude):
            pmax = default_pmax(psi.pbar, psi.sigma_p)
        else:
            pmax = float(np.max(np.abs(ext.center)) + ext.radius)
    data = psi.values(grid_points(n, pmax))
    grid = GridAmplitude(psi.particle, float(pmax), data)
    total = norm_squared(psi)
    tail = 1.0 - norm_squared(grid) / total
    if tail > tail_tol:
        raise ValueError(f"grid box loses {tail:.2e} of the probability (limit {tail_tol:.0e}); enlarge pmax")
    if normalize:
        grid = grid.with_data(data / np.sqrt(norm_squared(grid)))
    return grid


# --- integrals -------------------------------------------------------------------

def _samples(psi, box=None, omega=False):
    if isinstance(psi, GridAmplitude):
        return psi.data, psi.weight, psi.points
    if box is None:
        box = quadrature_box(psi, omega=omega)
    pts = box.points
    return psi.values(pts), box.weight, pts


def _check_finite(v):
    if not np.all(np.isfinite(v)):
        raise ValueError("amplitude samples contain non-finite values")


def _integrate(integrand, *amps, omega=False):
    """Sum ``integrand(points, *values) * weight`` over nodes shared by the amplitudes.

    Grid carriers fix the nodes; otherwise a quadrature box is swept in slabs
    so that memory stays bounded for large boxes.
    """
    if len({(a.particle.two_s, a.particle.m0) for a in amps}) > 1:
        raise ValueError("scalar products need amplitudes of the same particle species")
    grids = [a for a in amps if isinstance(a, GridAmplitude)]
    if grids:
        g = grids[0]
        if any(x.n != g.n or x.pmax != g.pmax for x in grids):
            raise ValueError("grid amplitudes live on different grids")
        vals = [a.data if isinstance(a, GridAmplitude) else a.values(g.points) for a in amps]
        for v in vals:
            _check_finite(v)
        return integrand(g.points, *vals) * g.weight
    box = quadrature_box(*amps, omega=omega, max_nodes=MAX_SWEPT_NODES)
    total = 0.0
    for pts in box.slabs():
        vals = [a.values(pts) for a in amps]
        for v in vals:
            _check_finite(v)
        total = total + integrand(pts, *vals)
    return total * box.weight


def norm_squared(psi):
    """Integral of sum_m |Psi_m(p)|^2 d^3p."""
    return float(_integrate(lambda p, v: np.sum(np.abs(v) ** 2), psi))


def norm_squared_covariant(phi):
    """Integral of sum_m |Phi_m(p)|^2 d^3p / omega."""
    om = phi.particle.energy
    return float(_integrate(lambda p, v: np.sum(np.abs(v) ** 2 / om(p)[..., None]), phi, omega=True))


def scalar_product(a, b):
    """<a|b> = integral of sum_m conj(Psi^a_m) Psi^b_m d^3p."""
    return complex(_integrate(lambda p, va, vb: np.sum(np.conj(va) * vb), a, b))


def expectation_four_momentum(psi):
    """<P^mu> = integral of p^mu rho(p) d^3p."""
    m0 = psi.particle.m0

    def f(p, v):
        rho = np.sum(np.abs(v) ** 2, axis=-1)
        return np.tensordot(rho, kin.four_momentum(p, m0), axes=rho.ndim)

    return _integrate(f, psi, omega=True)


def momentum_density(psi, p=None):
    """rho(p) = sum_m |Psi_m(p)|^2, at ``p`` or on the carrier's own nodes."""
    if p is None:
        v, _, _ = _samples(psi)
    else:
        v = psi.values(p)
    return np.sum(np.abs(v) ** 2, axis=-1)


def scalar_density(psi, p=None):
    """S(p) = sum_m |Phi_m(p)|^2 = omega rho(p)."""
    if p is None:
        _, _, p = _samples(psi)
        rho = momentum_density(psi)
    else:
        rho = momentum_density(psi, p)
    return psi.particle.energy(p) * rho


# --- covariant companion --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CovariantAmplitude(AnalyticAmplitude):
    """Phi_m(p) = sqrt(omega) Psi_m(p), evaluated from an underlying probability amplitude."""

    source: MomentumAmplitude

    @property
    def particle(self):
        return self.source.particle

    def values(self, p):
        p = np.asarray(p, dtype=float)
        return np.sqrt(self.particle.energy(p))[..., None] * self.source.values(p)

    def gradient(self, p):
        p = np.asarray(p, dtype=float)
        om = self.particle.energy(p)
        dsqrt = p / (2 * om[..., None] ** 1.5)
        return np.sqrt(om)[..., None, None] * self.source.gradient(p) + dsqrt[..., :, None] * self.source.values(p)[
            ..., None, :
        ]

    def extent(self):
        return self.source.extent()


def to_covariant(psi):
    if isinstance(psi, GridAmplitude):
        om = psi.particle.energy(psi.points)
        return psi.with_data(np.sqrt(om)[..., None] * psi.data)
    return CovariantAmplitude(psi)


def from_covariant(phi):
    """Inverse of :func:`to_covariant`, returning grid data for grids."""
    if isinstance(phi, CovariantAmplitude):
        return phi.source
    om = phi.particle.energy(phi.points)
    return phi.with_data(phi.data / np.sqrt(om)[..., None])


# --- serialization ----------------------------------------------------------------

_HEADER = struct.Struct("<8sIdIdi")
_MAGIC = b"RELAMPG1"


def save_grid(grid, path):
    """Binary layout: magic, n (u32), pmax (f64), two_s (u32), m0 (f64), eta (i32),
    then row-major complex64 samples of shape (n, n, n, 2s+1)."""
    p = grid.particle
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, grid.n, grid.pmax, p.two_s, p.m0, p.eta))
        fh.write(np.ascontiguousarray(grid.data, dtype="<c8").tobytes())


def load_grid(path):
    raw = Path(path).read_bytes()
    magic, n, pmax, two_s, m0, eta = _HEADER.unpack_from(raw)
    if magic != _MAGIC:
        raise ValueError(f"{path}: not a grid amplitude file")
    count = n**3 * (two_s + 1)
    if len(raw) - _HEADER.size < 8 * count:
        raise ValueError(f"{path}: truncated sample block")
    data = np.frombuffer(raw, dtype="<c8", offset=_HEADER.size, count=count)
    return GridAmplitude(ParticleSpec(m0, two_s, eta), pmax, data.astype(complex).reshape(n, n, n, two_s + 1))


def density_rows(psi, axis=0, n=101, extent=None):
    """Rows (coordinate, rho) sampling the momentum density along one axis through the origin."""
    if extent is None:
        if isinstance(psi, GridAmplitude):
            extent = psi.pmax
        else:
            e = psi.extent()
            extent = float(np.max(np.abs(e.center)) + e.radius)
    s = np.linspace(-extent, extent, n)
    pts = np.zeros((n, 3))
    pts[:, axis] = s
    vals = psi.evaluate(pts) if isinstance(psi, GridAmplitude) else psi.values(pts)
    return list(zip(s, np.sum(np.abs(vals) ** 2, axis=-1)))


__all__ = [
    "ParticleSpec",
    "Extent",
    "MomentumAmplitude",
    "AnalyticAmplitude",
    "GaussianAmplitude",
    "MappedAmplitude",
    "CovariantAmplitude",
    "GridAmplitude",
    "QuadratureBox",
    "gaussian",
    "scaled",
    "quadrature_box",
    "sample_on_grid",
    "grid_axis",
    "grid_points",
    "norm_squared",
    "norm_squared_covariant",
    "scalar_product",
    "expectation_four_momentum",
    "momentum_density",
    "scalar_density",
    "to_covariant",
    "from_covariant",
    "save_grid",
    "load_grid",
]
