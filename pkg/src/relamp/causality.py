"""Causality ratio of a strongly localized, ultra-relativistic Gaussian packet.

Scaled variables: kappa = p / sigma_p, rho = r / sigma_x, tau = t / sigma_x with
sigma_x = 1 / (2 sigma_p).  The momentum wavefunction is
Psi(kappa) = exp(-kappa^2/4) / (2 pi)^(3/4), and in these units the phase of a
mode is exp(i kappa (rho cos - tau) / 2), so the radial transform reads

    psi(tau, rho) = (2 pi)^(-3/4) pi^(-1/2) rho^(-1)
                    int_0^inf dkappa kappa sin(kappa rho / 2) exp(-kappa^2/4) exp(-i kappa tau / 2).

The closed form uses the parabolic cylinder function D_{-2} at imaginary
argument, evaluated through the Faddeeva function.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .faddeeva import erfcx, wofz

PREFACTOR = (2 * np.pi) ** -0.75
KAPPA_MAX = 16.0  # exp(-KAPPA_MAX^2 / 4) ~ 1.6e-28
MAX_EVALUATIONS = 1_000_000
SMALL_RHO = 1e-2
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


class QuadratureError(ArithmeticError):
    pass


class DivergentRatio(ArithmeticError):
    pass


@dataclass(frozen=True)
class ScaledPacket:
    """Gaussian packet of unit scaled width; ``mass_ratio`` = m0 / sigma_p (0: massless)."""

    mass_ratio: float = 0.0

    def __post_init__(self):
        if self.mass_ratio < 0:
            raise ValueError("mass_ratio must be non-negative")

    def momentum(self, kappa):
        return PREFACTOR * np.exp(-np.asarray(kappa, dtype=float) ** 2 / 4)

    def norm(self):
        val, _ = integrate.quad(lambda k: 4 * np.pi * k * k * self.momentum(k) ** 2, 0, np.inf, epsabs=0, epsrel=1e-13)
        return val


def parabolic_d_minus2(z):
    """D_{-2}(z) = D_0(z) - z D_{-1}(z), with D_{-1}(z) = sqrt(pi/2) exp(z^2/4) erfc(z/sqrt 2)."""
    z = np.asarray(z, dtype=complex)
    return np.exp(-z * z / 4) * (1 - z * np.sqrt(np.pi / 2) * erfcx(z / np.sqrt(2)))


def _scaled_d(s):
    # exp(-s^2/8) D_{-2}(i s / sqrt 2) = 1 - i (sqrt(pi)/2) s w(-s/2), free of overflow
    s = np.asarray(s, dtype=float)
    return 1 - 0.5j * np.sqrt(np.pi) * s * wofz(-s / 2)


def _scaled_d_prime(s):
    # d/ds of _scaled_d
    s = np.asarray(s, dtype=float)
    w = wofz(-s / 2)
    return -0.5j * np.sqrt(np.pi) * ((1 - s * s / 2) * w - 1j * s / np.sqrt(np.pi))


def wavefunction_closed(tau, rho):
    """psi(tau, rho) from the D_{-2} closed form (massless packet)."""
    tau = np.asarray(tau, dtype=float)
    rho = np.asarray(rho, dtype=float)
    tau, rho = np.broadcast_arrays(tau, rho)
    out = np.empty(tau.shape, dtype=complex)
    big = rho >= SMALL_RHO
    t, r = tau[big], rho[big]
    out[big] = -1j * PREFACTOR / (np.sqrt(np.pi) * r) * (_scaled_d(t - r) - _scaled_d(t + r))
    if np.any(~big):
        # the 1/rho pole cancels; integrate the derivative across [tau - rho, tau + rho]
        t, r = tau[~big], rho[~big]
        u = t[..., None] + r[..., None] * _GL_NODES
        diff = np.sum(_GL_WEIGHTS * _scaled_d_prime(u), axis=-1)  # (f(t+r) - f(t-r)) / r
        out[~big] = 1j * PREFACTOR / np.sqrt(np.pi) * diff
    return out if out.ndim else complex(out)


def wavefunction_quadrature(tau, rho, mass_ratio=0.0, epsrel=1e-12):
    """psi(tau, rho) by adaptive quadrature of the radial transform (scalar arguments)."""
    tau, rho = float(tau), float(rho)

    def kernel(k):
        # sin(k rho / 2) / rho, finite at rho = 0
        return 0.5 * k * np.sinc(k * rho / (2 * np.pi))

    def phase(k):
        return np.sqrt(k * k + mass_ratio**2) * tau / 2

    parts = []
    neval = 0
    for fn in (np.cos, np.sin):
        total = 0.0
        # split at multiples of the Gaussian decay scale
        for a, b in ((0, 4), (4, 8), (8, KAPPA_MAX)):
            val, err, info = integrate.quad(
                lambda k: k * kernel(k) * np.exp(-k * k / 4) * fn(phase(k)),
                a,
                b,
                epsabs=1e-15,
                epsrel=epsrel,
                limit=2000,
                full_output=1,
            )[:3]
            neval += info["neval"]
            if neval > MAX_EVALUATIONS or err > max(1e-13, 10 * epsrel * abs(val)):
                raise QuadratureError(f"radial quadrature did not converge: estimate {val!r} +- {err:.2e}")
            total += val
        parts.append(total)
    return PREFACTOR / np.sqrt(np.pi) * complex(parts[0], -parts[1])


def spatial_wavefunction(tau, rho, path="closed", mass_ratio=0.0):
    if tau < 0 or rho < 0:
        raise ValueError("tau and rho must be non-negative")
    if path == "closed":
        if mass_ratio != 0:
            raise ValueError("the closed form exists only for the massless packet")
        return wavefunction_closed(tau, rho)
    if path == "quadrature":
        return wavefunction_quadrature(tau, rho, mass_ratio)
    raise ValueError(f"unknown evaluation path {path!r}")


def _shell_probability(tau, a, b, rtol, mass_ratio=0.0, atol=0.0):
    if mass_ratio == 0:
        f = lambda r: 4 * np.pi * r * r * abs(wavefunction_closed(tau, r)) ** 2
    else:
        f = lambda r: 4 * np.pi * r * r * abs(wavefunction_quadrature(tau, r, mass_ratio)) ** 2
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(f, a, b, epsabs=atol, epsrel=rtol, limit=500)
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(f"probability integral on [{a}, {b}] failed: {exc}") from None
    return val


def enclosed_probability(tau, rho, rtol=1e-7, mass_ratio=0.0):
    """int_0^rho 4 pi r^2 |psi(tau, r)|^2 dr."""
    if rho <= 0:
        return 0.0
    return _shell_probability(tau, 0.0, rho, rtol, mass_ratio)


def total_probability(tau, rtol=1e-9, mass_ratio=0.0):
    """Probability over all space; the tail for tau > 0 decays only like rho^-6."""
    edge = tau + 12.0
    inner = _shell_probability(tau, 0.0, edge, rtol, mass_ratio)
    outer = _shell_probability(tau, edge, np.inf, rtol, mass_ratio, atol=1e-3 * rtol)
    return inner + outer


def causality_ratio(tau, rho, rtol=1e-7, mass_ratio=0.0):
    """C(tau, rho): probability inside rho + tau at time tau over that inside rho at time 0."""
    if not (tau > 0 and rho > 0):
        raise ValueError("causality_ratio needs tau > 0 and rho > 0")
    den = enclosed_probability(0.0, rho, rtol, mass_ratio)
    if den < 1e-300:
        raise DivergentRatio(f"initial enclosed probability {den!r} vanishes at rho = {rho}")
    return enclosed_probability(tau, rho + tau, rtol, mass_ratio) / den


@dataclass(frozen=True)
class CausalityCurve:
    tau: float
    rho: np.ndarray
    ratio: np.ndarray
    rtol: float
    mass_ratio: float = 0.0

    @property
    def min(self):
        return float(np.min(self.ratio))

    @property
    def argmin(self):
        return float(self.rho[int(np.argmin(self.ratio))])

    def violations(self):
        return self.rho[self.ratio < 1]

    def rows(self):
        return list(zip(self.rho.tolist(), self.ratio.tolist()))


def causality_scan(tau, rho_grid, rtol=1e-7, mass_ratio=0.0):
    rho = np.asarray(rho_grid, dtype=float)
    if rho.ndim != 1 or np.any(np.diff(rho) <= 0):
        raise ValueError("rho grid must be strictly increasing")
    # cumulative integration would be faster; independent integrals keep each value at rtol
    vals = np.array([causality_ratio(tau, r, rtol, mass_ratio) for r in rho])
    return CausalityCurve(float(tau), rho, vals, rtol, mass_ratio)


def rho_grid(rho_min=0.1, rho_max=10.0, step=0.1):
    """Uniform grid rounded to the step's decimals so that values like 5.0 appear exactly."""
    count = int(round((rho_max - rho_min) / step)) + 1
    decimals = max(0, -int(np.floor(np.log10(step))) + 1)
    return np.round(rho_min + step * np.arange(count), decimals)
