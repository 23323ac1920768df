"""Newton-Wigner position amplitudes, position operators and the average event.

Position amplitudes live on the spatial grid conjugate to a momentum grid
(``fourier.FourierEngine``); time evolution is the exact multiplier
exp(-i omega t).  Position operators act on momentum amplitudes as
``i d/dp`` combined with multipliers, always in the symmetric form
``(g x + x g) / 2`` so that Hermiticity survives discretization.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import kinematics as kin
from . import poincare
from .amplitudes import (
    AnalyticAmplitude,
    GaussianAmplitude,
    GridAmplitude,
    quadrature_box,
    sample_on_grid,
)
from .fourier import FourierEngine

ALIAS_LIMIT = 1e-8
# multipliers such as 1/(1 + beta0.beta) need finer trapezoid nodes than the bare packet
OPERATOR_RESOLUTION = 2.0
PARSEVAL_TOL = 1e-10


# --- position-space carrier --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PositionAmplitude:
    """psi_m(t, x_k) on the spatial grid conjugate to the momentum grid (n, pmax)."""

    particle: object
    t: float
    pmax: float
    data: np.ndarray
    boundary_mass: float = 0.0

    @property
    def n(self):
        return self.data.shape[0]

    @property
    def engine(self):
        return FourierEngine(self.n, self.pmax)

    @property
    def hx(self):
        return self.engine.hx

    @property
    def weight(self):
        return self.hx**3

    def points(self):
        return self.engine.x_points()

    def norm_squared(self):
        return float(np.sum(np.abs(self.data) ** 2) * self.weight)

    def density(self):
        return np.sum(np.abs(self.data) ** 2, axis=-1)

    def expectation_x(self):
        rho = self.density()
        return np.tensordot(rho, self.points(), axes=3) * self.weight

    def width(self, direction):
        """Standard deviation of the position density along ``direction``."""
        n = np.asarray(direction, dtype=float)
        n = n / np.linalg.norm(n)
        rho = self.density() * self.weight
        s = self.points() @ n
        mean = np.sum(rho * s) / np.sum(rho)
        return float(np.sqrt(np.sum(rho * (s - mean) ** 2) / np.sum(rho)))

    def with_data(self, data, t=None):
        return replace(self, data=data, t=self.t if t is None else t)


def _boundary_mass(data, weight):
    rho = np.sum(np.abs(data) ** 2, axis=-1)
    inner = rho[1:-1, 1:-1, 1:-1]
    return float((np.sum(rho) - np.sum(inner)) * weight)


def _as_grid(psi, n=64, pmax=None):
    if isinstance(psi, GridAmplitude):
        return psi
    return sample_on_grid(psi, n=n, pmax=pmax)


def to_position(psi, t=0.0, n=64, pmax=None, nthreads=None):
    """psi_m(t, x) = (2 pi)^(-3/2) int d^3p Psi_m(p) exp(i(p.x - omega t)).

    Analytic carriers are sampled onto an ``n``-point grid first.  Parseval
    is checked on every call; a boundary layer holding more than
    ``ALIAS_LIMIT`` of the probability triggers a warning (wrap-around).
    """
    grid = _as_grid(psi, n, pmax)
    eng = FourierEngine(grid.n, grid.pmax, nthreads)
    om = grid.particle.energy(grid.points)
    data = eng.to_position(grid.data * np.exp(-1j * om * t)[..., None])
    out = PositionAmplitude(grid.particle, float(t), grid.pmax, data)
    before = float(np.sum(np.abs(grid.data) ** 2) * grid.weight)
    after = out.norm_squared()
    if abs(after - before) > PARSEVAL_TOL * max(1.0, before):
        raise ArithmeticError(f"Parseval violated: {before!r} vs {after!r}")
    bm = _boundary_mass(data, out.weight)
    if bm > ALIAS_LIMIT:
        warnings.warn(f"position grid boundary holds {bm:.2e} of the probability", RuntimeWarning, stacklevel=2)
    return replace(out, boundary_mass=bm)


def to_momentum(psix, nthreads=None):
    """Inverse of :func:`to_position`: the momentum amplitude Psi_m(p) (time-zero form)."""
    eng = FourierEngine(psix.n, psix.pmax, nthreads)
    a = eng.to_momentum(psix.data)
    om = psix.particle.energy(eng.p_points())
    return GridAmplitude(psix.particle, psix.pmax, a * np.exp(1j * om * psix.t)[..., None])


def _momentum_multiply(psix, mult):
    eng = psix.engine
    a = eng.to_momentum(psix.data)
    return eng.to_position(a * mult[..., None])


def evolve(psix, dt):
    """Exact evolution by dt: multiply by exp(-i omega dt) in momentum space."""
    om = psix.particle.energy(psix.engine.p_points())
    return psix.with_data(_momentum_multiply(psix, np.exp(-1j * om * dt)), t=psix.t + dt)


def hamiltonian_apply(psix):
    return psix.with_data(_momentum_multiply(psix, psix.particle.energy(psix.engine.p_points())))


def kg_residual(data, n, pmax, m0, t_derivative=None):
    """Relative spectral residual of (d_t^2 - laplacian + m0^2) for a positive-energy field.

    ``data`` is ``(n, n, n, ncomp)`` position samples.  The time derivative
    is i d_t = H (positive-energy evolution) unless supplied.
    """
    eng = FourierEngine(n, pmax)
    p = eng.p_points()
    om = kin.energy(p, m0)
    a = eng.to_momentum(data)
    if t_derivative is None:
        dtt = eng.to_position(-(om**2)[..., None] * a)
    else:
        dtt = t_derivative
    lap = eng.to_position(-np.sum(p * p, axis=-1)[..., None] * a)
    res = dtt - lap + m0**2 * data
    return float(np.linalg.norm(res) / (m0**2 * np.linalg.norm(data)))


def evolution_derivative_check(psix, h=1e-3):
    """Relative error of the central difference (psi(t+h) - psi(t-h)) / 2h against -i H psi."""
    fd = (evolve(psix, h).data - evolve(psix, -h).data) / (2 * h)
    exact = -1j * hamiltonian_apply(psix).data
    return float(np.linalg.norm(fd - exact) / np.linalg.norm(exact))


# --- node sets: values and gradients on quadrature points --------------------------

class _Nodes:
    """Values of an amplitude (and of things built from it) on a fixed node set."""

    def __init__(self, particle, pts, weight, values, gradient=None, engine=None):
        self.particle = particle
        self.pts = pts
        self.weight = weight
        self.values = values
        self.gradient = gradient
        self.engine = engine

    @classmethod
    def of(cls, psi, box=None):
        if isinstance(psi, GridAmplitude):
            return cls(psi.particle, psi.points, psi.weight, psi.data, engine=FourierEngine(psi.n, psi.pmax))
        if box is None:
            box = quadrature_box(psi, resolution=OPERATOR_RESOLUTION)
        pts = box.points
        return cls(psi.particle, pts, box.weight, psi.values(pts), psi.gradient(pts))

    def multiply(self, f, df=None):
        """Nodes of f(p) psi; ``df`` (gradient of f) is needed for analytic carriers."""
        v = f[..., None] * self.values
        g = None
        if self.engine is None:
            g = df[..., :, None] * self.values[..., None, :] + f[..., None, None] * self.gradient
        return _Nodes(self.particle, self.pts, self.weight, v, g, self.engine)

    def x_apply(self):
        """i d psi / dp as ``(..., 3, ncomp)``."""
        if self.engine is None:
            return 1j * self.gradient
        return self.engine.x_multiply(self.values)

    def braket(self, left, right, measure=None):
        w = self.weight if measure is None else self.weight * measure[..., None]
        return complex(np.sum(np.conj(left) * right * w))


@dataclass(frozen=True)
class PositionOperator:
    """Three components O_i = sum_k (g_ik x_k + x_k g_ik) / 2 + c_i(p).

    ``coeff(p)`` returns (g, dg, c): g is ``(..., 3, 3)``, dg its gradient
    ``(..., 3, 3, 3)`` with the derivative index last, and c ``(..., 3)``
    complex (or None).
    """

    coeff: object
    name: str = "x"

    def apply(self, nodes):
        g, dg, c = self.coeff(nodes.pts)
        xpsi = nodes.x_apply()  # (..., 3, ncomp)
        out = []
        for i in range(3):
            left = np.einsum("...k,...kn->...n", g[..., i, :], xpsi)
            if nodes.engine is None:
                # x_k (g psi) = i (d_k g) psi + g i d_k psi
                div = np.einsum("...kk->...", dg[..., i, :, :])
                right = left + 1j * div[..., None] * nodes.values
            else:
                right = 0
                for k in range(3):
                    right = right + nodes.engine.x_multiply(g[..., i, k][..., None] * nodes.values)[..., k, :]
            comp = 0.5 * (left + right)
            if c is not None:
                comp = comp + c[..., i][..., None] * nodes.values
            out.append(comp)
        return np.stack(out, axis=-2)


def _identity_coeff(p):
    shape = p.shape[:-1]
    g = np.broadcast_to(np.eye(3), shape + (3, 3))
    return g, np.zeros(shape + (3, 3, 3)), None


X_OPERATOR = PositionOperator(_identity_coeff, "x")


def _nw_coeff(m0):
    def coeff(p):
        g, dg, _ = _identity_coeff(p)
        om2 = np.sum(p * p, axis=-1) + m0 * m0
        return g, dg, -0.5j * p / om2[..., None]

    return coeff


def nw_operator(m0):
    """The Newton-Wigner form i d/dp - i p / 2 omega^2 acting on covariant amplitudes."""
    return PositionOperator(_nw_coeff(m0), "x_nw")


def _velocity_jacobian(p, m0):
    om = kin.energy(p, m0)
    beta = p / om[..., None]
    J = (np.eye(3) - beta[..., :, None] * beta[..., None, :]) / om[..., None, None]
    return beta, J  # J[..., l, j] = d beta_l / d p_j


def boosted_coeff(beta0, m0):
    beta0 = np.asarray(beta0, dtype=float)
    speed = np.linalg.norm(beta0)
    g0 = float(kin.gamma(beta0))
    nvec = beta0 / speed if speed > 0 else np.zeros(3)
    par = np.outer(nvec, nvec)
    perp = np.eye(3) - par

    def coeff(p):
        beta, J = _velocity_jacobian(p, m0)
        D = 1 + beta @ beta0
        dD = np.einsum("l,...lj->...j", beta0, J)
        bperp = beta @ perp
        dbperp = np.einsum("il,...lj->...ij", perp, J)
        u = bperp / D[..., None]  # beta_perp / (1 + beta0.beta)
        du = dbperp / D[..., None, None] - bperp[..., :, None] * dD[..., None, :] / D[..., None, None] ** 2
        h = 1 / (g0 * D)
        dh = -dD / (g0 * D[..., None] ** 2)
        g = perp - u[..., :, None] * beta0 + h[..., None, None] * par
        # dg[..., i, k, j] = d g_ik / d p_j
        dg = -du[..., :, None, :] * beta0[None, :, None] + par[..., None] * dh[..., None, None, :]
        return g, dg, None

    return coeff


def boosted_position_operator(beta0, m0):
    """x' = x_perp - {beta_perp/(1 + beta0.beta), beta0.x}/2 + {1/(gamma0 (1 + beta0.beta)), x_par}/2."""
    return PositionOperator(boosted_coeff(beta0, m0), "x_boosted")


def _require_spinless(psi):
    if psi.particle.two_s != 0:
        raise NotImplementedError("the boosted position operator is only available for spin 0")


# --- operator applications and expectation values -----------------------------------

def position_operator_apply(psi):
    """i dPsi/dp as three amplitudes (analytic: exact derivative; grid: spectral)."""
    if isinstance(psi, GridAmplitude):
        xs = FourierEngine(psi.n, psi.pmax).x_multiply(psi.data)
        return [psi.with_data(xs[..., i, :]) for i in range(3)]
    from .amplitudes import MappedAmplitude

    return [
        MappedAmplitude(psi.particle, (lambda p, i=i: 1j * psi.gradient(p)[..., i, :]), psi.extent())
        for i in range(3)
    ]


def boosted_position_operator_apply(psi, beta0, box=None):
    """x'_i Psi on the carrier's nodes, returned with the node set."""
    _require_spinless(psi)
    nodes = _Nodes.of(psi, box)
    return boosted_position_operator(beta0, psi.particle.m0).apply(nodes), nodes


def expectation(psi, op=X_OPERATOR, box=None):
    nodes = _Nodes.of(psi, box)
    out = op.apply(nodes)
    return np.array([nodes.braket(nodes.values, out[..., i, :]) for i in range(3)])


def expectation_x(psi, box=None):
    return expectation(psi, X_OPERATOR, box).real


def expectation_velocity(psi, box=None):
    nodes = _Nodes.of(psi, box)
    beta = kin.velocity(nodes.pts, psi.particle.m0)
    rho = np.sum(np.abs(nodes.values) ** 2, axis=-1)
    return np.tensordot(rho, beta, axes=rho.ndim) * nodes.weight


def hermiticity_residual(a, b, op=X_OPERATOR, measure_power=0):
    """max_i |<a|O_i b> - <O_i a|b>| with measure omega^measure_power d^3p."""
    box = None if isinstance(a, GridAmplitude) else quadrature_box(a, b, resolution=OPERATOR_RESOLUTION)
    na, nb = _Nodes.of(a, box), _Nodes.of(b, box)
    meas = None if measure_power == 0 else a.particle.energy(na.pts) ** measure_power
    oa, ob = op.apply(na), op.apply(nb)
    return max(abs(na.braket(na.values, ob[..., i, :], meas) - na.braket(oa[..., i, :], nb.values, meas)) for i in range(3))


def commutator_expectation(psi, box=None):
    """<psi|[x_i, P_j]|psi> as a 3x3 complex matrix."""
    nodes = _Nodes.of(psi, box)
    xpsi = X_OPERATOR.apply(nodes)
    out = np.zeros((3, 3), dtype=complex)
    for j in range(3):
        pj = nodes.pts[..., j]
        dp = np.zeros(pj.shape + (3,))
        dp[..., j] = 1
        xp = X_OPERATOR.apply(nodes.multiply(pj, dp))
        for i in range(3):
            out[i, j] = nodes.braket(nodes.values, xp[..., i, :] - pj[..., None] * xpsi[..., i, :])
    return out


def nw_identity_check(a, b):
    """Both sides of the Newton-Wigner identity for covariant amplitudes ``a``, ``b``.

    lhs = int d^3p/omega  Phi_a^* (i d/dp - i p/2 omega^2) Phi_b
    rhs = int d^3p        Psi_a^* i d/dp Psi_b
    """
    from .amplitudes import from_covariant

    pa, pb = from_covariant(a), from_covariant(b)
    box = None if isinstance(a, GridAmplitude) else quadrature_box(pa, pb, resolution=OPERATOR_RESOLUTION)
    na, nb = _Nodes.of(a, box), _Nodes.of(b, box)
    inv_om = 1 / a.particle.energy(na.pts)
    nw = nw_operator(a.particle.m0).apply(nb)
    lhs = np.array([na.braket(na.values, nw[..., i, :], inv_om) for i in range(3)])
    sa, sb = _Nodes.of(pa, box), _Nodes.of(pb, box)
    xs = X_OPERATOR.apply(sb)
    rhs = np.array([sa.braket(sa.values, xs[..., i, :]) for i in range(3)])
    return lhs, rhs


def heisenberg_drift(psi, t, n=64, pmax=None):
    """(<x(t)> from the evolved position density, <x> + <beta> t from momentum space)."""
    grid = _as_grid(psi, n, pmax)
    psix = to_position(grid, t)
    measured = psix.expectation_x()
    predicted = expectation_x(grid) + expectation_velocity(grid) * t
    return measured, predicted


# --- boosts in position space --------------------------------------------------------

def boost_position_amplitude(psix, beta0):
    """Nonlocal boost: transform to momentum space, boost, transform back (t = 0)."""
    if psix.t != 0:
        raise ValueError("boost_position_amplitude expects an amplitude at t = 0")
    psi = to_momentum(psix)
    return to_position(poincare.boost(psi, beta0), 0.0)


def position_transforms(psix, element):
    """Transform a position amplitude by a Poincare element or inversion."""
    if isinstance(element, poincare.TimeReversal):
        ph = poincare._tr_phases(psix.particle.two_s)
        return psix.with_data(ph * np.conj(psix.data)[..., ::-1], t=-psix.t)
    if isinstance(element, poincare.Parity):
        return psix.with_data(psix.particle.eta * poincare._reflect_grid(psix.data))
    if isinstance(element, poincare.Boost):
        return boost_position_amplitude(psix, element.beta)
    psi = poincare.apply(to_momentum(psix), element)
    return to_position(psi, psix.t)


def scalar_product_position(a, b):
    return complex(np.sum(np.conj(a.data) * b.data) * a.weight)


# --- velocity law, commutator invariance -------------------------------------------

def _boosted_energy(beta0, m0):
    beta0 = np.asarray(beta0, dtype=float)
    g0 = float(kin.gamma(beta0))

    def f(p):
        om = kin.energy(p, m0)
        return g0 * (om + p @ beta0), g0 * (p / om[..., None] + beta0)

    return f


def _boosted_momentum(beta0, m0, j):
    L = kin.pure_boost(beta0)

    def f(p):
        om = kin.energy(p, m0)
        val = L[j + 1, 0] * om + p @ L[j + 1, 1:]
        grad = L[j + 1, 0] * p / om[..., None] + L[j + 1, 1:]
        return val, grad

    return f


def velocity_law_check(psi, beta0, box=None):
    """(<i[H', x']>, <beta'>, velocity_compose(<beta>, beta0)) for a spinless amplitude."""
    _require_spinless(psi)
    m0 = psi.particle.m0
    nodes = _Nodes.of(psi, box)
    op = boosted_position_operator(beta0, m0)
    hval, hgrad = _boosted_energy(beta0, m0)(nodes.pts)
    x_psi = op.apply(nodes)
    x_hpsi = op.apply(nodes.multiply(hval, hgrad))
    comm = 1j * (hval[..., None, None] * x_psi - x_hpsi)
    lhs = np.array([nodes.braket(nodes.values, comm[..., i, :]) for i in range(3)])
    bprime = kin.velocity_compose(kin.velocity(nodes.pts, m0), beta0)
    rho = np.sum(np.abs(nodes.values) ** 2, axis=-1)
    rhs = np.tensordot(rho, bprime, axes=rho.ndim) * nodes.weight
    narrow = kin.velocity_compose(expectation_velocity(psi, box), beta0)
    return lhs, rhs, narrow


def commutator_invariance_residual(psi, beta0, box=None):
    """max over i, j of ||([x'_i, P'_j] - i delta_ij) psi|| / ||psi||."""
    _require_spinless(psi)
    m0 = psi.particle.m0
    nodes = _Nodes.of(psi, box)
    op = boosted_position_operator(beta0, m0)
    x_psi = op.apply(nodes)
    nrm = np.sqrt(np.sum(np.abs(nodes.values) ** 2) * nodes.weight)
    worst = 0.0
    for j in range(3):
        pval, pgrad = _boosted_momentum(beta0, m0, j)(nodes.pts)
        x_ppsi = op.apply(nodes.multiply(pval, pgrad))
        for i in range(3):
            r = x_ppsi[..., i, :] - pval[..., None] * x_psi[..., i, :] - 1j * (i == j) * nodes.values
            worst = max(worst, float(np.sqrt(np.sum(np.abs(r) ** 2) * nodes.weight) / nrm))
    return worst


# --- average events ------------------------------------------------------------------

@dataclass(frozen=True)
class AverageEvent:
    x: np.ndarray  # (t, <x(t)>)
    x_primed: np.ndarray  # (t', <x'(t')>)
    boosted: np.ndarray  # Lambda x
    epsilon_bound: float

    @property
    def deviation(self):
        return float(np.linalg.norm(self.x_primed - self.boosted))

    @property
    def relative_deviation(self):
        return self.deviation / float(np.linalg.norm(self.boosted))


def epsilon_bound(psi):
    pbar = np.asarray(psi.pbar, dtype=float)
    pn = float(np.linalg.norm(pbar))
    if pn == 0:
        return np.inf
    bbar2 = pn**2 / (pn**2 + psi.particle.m0**2)
    return bbar2 * (psi.sigma_p / pn) ** 2


def average_event(psi, beta0, t, max_bound=0.1, box=None):
    """Compare the boosted average event with Lambda applied to the original one.

    x = (t, <x(t)>), t' = gamma0 (t + beta0.<x(t)>), x' = (t', <x'> + <beta'> t').
    Heisenberg-picture expectations are computed in momentum space.
    """
    if not isinstance(psi, GaussianAmplitude) or psi.particle.two_s != 0:
        raise TypeError("average_event needs a spin-0 Gaussian amplitude")
    bound = epsilon_bound(psi)
    if not bound < max_bound:
        raise ValueError(
            f"packet too wide for the average-event approximation: beta^2 (sigma_p/|pbar|)^2 = {bound:.3g} "
            f">= {max_bound}"
        )
    beta0 = np.asarray(beta0, dtype=float)
    m0 = psi.particle.m0
    L = kin.pure_boost(beta0)
    nodes = _Nodes.of(psi, box)
    rho = np.sum(np.abs(nodes.values) ** 2, axis=-1)
    beta = kin.velocity(nodes.pts, m0)
    xs = X_OPERATOR.apply(nodes)
    x0 = np.array([nodes.braket(nodes.values, xs[..., i, :]) for i in range(3)]).real
    vbar = np.tensordot(rho, beta, axes=rho.ndim) * nodes.weight
    x = np.concatenate([[t], x0 + vbar * t])
    tp = float(L[0] @ x)
    xb = boosted_position_operator(beta0, m0).apply(nodes)
    x0p = np.array([nodes.braket(nodes.values, xb[..., i, :]) for i in range(3)]).real
    bprime = kin.velocity_compose(beta, beta0)
    vbarp = np.tensordot(rho, bprime, axes=rho.ndim) * nodes.weight
    xp = np.concatenate([[tp], x0p + vbarp * tp])
    return AverageEvent(x, xp, L @ x, bound)


def t_integral_check(psi, beta0, box=None):
    """(<{f, x_par}/2>, xbar_par int |Psi|^2 f) with f = 1/(gamma0 (1 + beta0.beta))."""
    beta0 = np.asarray(beta0, dtype=float)
    m0 = psi.particle.m0
    nvec = beta0 / np.linalg.norm(beta0)
    par = np.outer(nvec, nvec)
    g0 = float(kin.gamma(beta0))

    def coeff(p):
        beta, J = _velocity_jacobian(p, m0)
        D = 1 + beta @ beta0
        dD = np.einsum("l,...lj->...j", beta0, J)
        h = 1 / (g0 * D)
        dh = -dD / (g0 * D[..., None] ** 2)
        return h[..., None, None] * par, par[..., None] * dh[..., None, None, :], None

    nodes = _Nodes.of(psi, box)
    out = PositionOperator(coeff, "T").apply(nodes)
    lhs = np.array([nodes.braket(nodes.values, out[..., i, :]) for i in range(3)])
    f = 1 / (g0 * (1 + kin.velocity(nodes.pts, m0) @ beta0))
    rho = np.sum(np.abs(nodes.values) ** 2, axis=-1)
    rhs = (par @ psi.xbar) * float(np.sum(rho * f) * nodes.weight)
    return lhs, rhs
