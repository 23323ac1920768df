"""Command-line entry point: JSON-configured experiments writing CSV tables and a run manifest.

Exit status: 0 when every check passes, 1 when a numerical check fails
(the failing checks are named on stderr), 2 for configuration errors.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from . import causality as caus
from . import covariant as cov
from . import fourier
from . import kinematics as kin
from . import poincare as pc
from . import position as pos
from .amplitudes import (
    ParticleSpec,
    default_pmax,
    expectation_four_momentum,
    gaussian,
    load_grid,
    norm_squared,
    sample_on_grid,
    scalar_product,
    to_covariant,
)
from .spin import two_s_of

C55_REFERENCE = 0.996958


class ConfigError(Exception):
    pass


# --- schemas -------------------------------------------------------------------------

_VEC3 = {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3}
_VEC4 = {"type": "array", "items": {"type": "number"}, "minItems": 4, "maxItems": 4}
_COMPLEX = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}
_PARTICLE = {
    "type": "object",
    "additionalProperties": False,
    "required": ["m0"],
    "properties": {
        "m0": {"type": "number", "exclusiveMinimum": 0},
        "spin": {"oneOf": [{"type": "number", "minimum": 0}, {"type": "string", "pattern": r"^\d+(/2)?$"}]},
        "eta": {"enum": [1, -1]},
    },
}
_GAUSSIAN = {
    "type": "object",
    "additionalProperties": False,
    "required": ["sigma_p"],
    "properties": {
        "pbar": _VEC3,
        "sigma_p": {"type": "number", "exclusiveMinimum": 0},
        "xbar": _VEC3,
        "spin_weights": {"type": "array", "items": _COMPLEX, "minItems": 1},
    },
}
_GRID = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "n": {"type": "integer", "minimum": 8, "multipleOf": 2},
        "pmax": {"type": "number", "exclusiveMinimum": 0},
    },
}
_TOLS = {"type": "object", "additionalProperties": {"type": "number", "exclusiveMinimum": 0}}
_TRANSFORM_FIELDS = {
    "translation": {"a": _VEC4},
    "rotation": {"axis": _VEC3, "angle": {"type": "number"}},
    "boost": {"beta": _VEC3},
    "parity": {},
    "time_reversal": {},
}
# dispatch on "type" with if/then so that errors point at the offending field
_TRANSFORM = {
    "type": "object",
    "required": ["type"],
    "properties": {"type": {"enum": list(_TRANSFORM_FIELDS)}},
    "allOf": [
        {
            "if": {"properties": {"type": {"const": kind}}},
            "then": {
                "additionalProperties": False,
                "required": list(fields),
                "properties": {"type": {"const": kind}, **fields},
            },
        }
        for kind, fields in _TRANSFORM_FIELDS.items()
    ],
}

SCHEMAS = {
    "transform": {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            "particle": _PARTICLE,
            "state": _GAUSSIAN,
            "grid_file": {"type": "string"},
            "carrier": {"enum": ["analytic", "grid"]},
            "grid": _GRID,
            "probe": _GAUSSIAN,
            "transformations": {"type": "array", "items": _TRANSFORM},
            "axes": {"type": "array", "items": {"enum": ["x", "y", "z"]}, "minItems": 1},
            "samples": {"type": "integer", "minimum": 3},
            "tolerances": _TOLS,
        },
    },
    "causality": {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            "tau": {"type": "number", "exclusiveMinimum": 0},
            "rho_min": {"type": "number", "exclusiveMinimum": 0},
            "rho_max": {"type": "number", "exclusiveMinimum": 0},
            "step": {"type": "number", "exclusiveMinimum": 0},
            "rtol": {"type": "number", "exclusiveMinimum": 0},
            "mass_ratio": {"type": "number", "minimum": 0},
            "both_paths": {"type": "boolean"},
            "tolerances": _TOLS,
        },
    },
    "nw-check": {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            "particle": _PARTICLE,
            "pairs": {"type": "integer", "minimum": 1},
            "seed": {"type": "integer"},
            "sigma_range": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 2, "maxItems": 2},
            "tolerances": _TOLS,
        },
    },
    "boost-position": {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            "particle": _PARTICLE,
            "state": _GAUSSIAN,
            "beta0": _VEC3,
            "t": {"type": "number"},
            "probe": _GAUSSIAN,
            "tolerances": _TOLS,
        },
    },
    "dirac": {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            "particle": _PARTICLE,
            "state": _GAUSSIAN,
            "grid": _GRID,
            "t": {"type": "number"},
            "momenta": {"type": "integer", "minimum": 1},
            "seed": {"type": "integer"},
            "tolerances": _TOLS,
        },
    },
}


# --- configs -------------------------------------------------------------------------

@dataclass
class TransformConfig:
    particle: dict = field(default_factory=lambda: {"m0": 1.0, "spin": 0.5, "eta": 1})
    state: dict = field(default_factory=lambda: {"pbar": [0.2, 0.0, 0.1], "sigma_p": 0.7, "xbar": [0.3, 0.0, -0.2]})
    grid_file: str | None = None
    carrier: str = "analytic"
    grid: dict = field(default_factory=lambda: {"n": 48})
    probe: dict = field(default_factory=lambda: {"pbar": [0.0, 0.2, 0.0], "sigma_p": 0.8, "xbar": [0.0, 0.2, 0.1]})
    transformations: list = field(default_factory=list)
    axes: list = field(default_factory=lambda: ["x", "y", "z"])
    samples: int = 41
    tolerances: dict = field(default_factory=dict)


@dataclass
class CausalityConfig:
    tau: float = 5.0
    rho_min: float = 0.1
    rho_max: float = 10.0
    step: float = 0.1
    rtol: float = 1e-7
    mass_ratio: float = 0.0
    both_paths: bool = False
    tolerances: dict = field(default_factory=dict)


@dataclass
class NWCheckConfig:
    particle: dict = field(default_factory=lambda: {"m0": 1.0, "spin": 0})
    pairs: int = 20
    seed: int = 12345
    sigma_range: list = field(default_factory=lambda: [0.4, 0.9])
    tolerances: dict = field(default_factory=dict)


@dataclass
class BoostPositionConfig:
    particle: dict = field(default_factory=lambda: {"m0": 1.0, "spin": 0})
    state: dict = field(default_factory=lambda: {"pbar": [5.0, 0.0, 0.0], "sigma_p": 0.1, "xbar": [1.0, -2.0, 0.5]})
    beta0: list = field(default_factory=lambda: [0.0, 0.5, 0.0])
    t: float = 2.0
    probe: dict = field(default_factory=lambda: {"pbar": [4.9, 0.1, 0.0], "sigma_p": 0.12, "xbar": [0.8, -1.5, 0.4]})
    tolerances: dict = field(default_factory=dict)


@dataclass
class DiracConfig:
    particle: dict = field(default_factory=lambda: {"m0": 1.0, "spin": 0.5})
    state: dict = field(default_factory=lambda: {"pbar": [0.3, 0.0, 0.2], "sigma_p": 0.6, "xbar": [0.0, 0.0, 0.0], "spin_weights": [1, [0, 1]]})
    grid: dict = field(default_factory=lambda: {"n": 48})
    t: float = 0.5
    momenta: int = 20
    seed: int = 7
    tolerances: dict = field(default_factory=dict)


CONFIGS = {
    "transform": TransformConfig,
    "causality": CausalityConfig,
    "nw-check": NWCheckConfig,
    "boost-position": BoostPositionConfig,
    "dirac": DiracConfig,
}

DEFAULT_TOLERANCES = {
    "transform": {"norm_analytic": 1e-10, "norm_grid": 1e-8, "scalar_product_analytic": 1e-8, "scalar_product_grid": 1e-6,
                  "four_momentum_analytic": 1e-8, "four_momentum_grid": 1e-6},
    "causality": {"c55": 2e-4, "far_field": 1e-3, "normalization": 1e-7, "paths": 1e-9},
    "nw-check": {"identity": 1e-8, "hermiticity": 1e-10},
    "boost-position": {"velocity_law": 1e-6, "commutator": 1e-6, "t_integral": 1e-8, "hermiticity": 1e-10},
    "dirac": {"momentum_residual": 1e-10, "position_residual": 1e-8, "kg_residual": 1e-8, "rest_identity": 0.0},
}


def _json_path(path):
    out = "$"
    for p in path:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def validate(command, doc):
    """Schema check plus the physical bounds the schema cannot express."""
    validator = jsonschema.Draft202012Validator(SCHEMAS[command])
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise ConfigError(f"{_json_path(e.absolute_path)}: {e.message}")

    def check_beta(path, beta):
        speed = float(np.linalg.norm(beta))
        if not speed < 1:
            raise ConfigError(f"{path}: boost velocity must satisfy |beta| < 1 (got |beta| = {speed:.6g})")

    for i, tr in enumerate(doc.get("transformations", [])):
        if tr["type"] == "boost":
            check_beta(f"$.transformations[{i}].beta", tr["beta"])
        if tr["type"] == "rotation" and not np.any(tr["axis"]):
            raise ConfigError(f"$.transformations[{i}].axis: rotation axis must be nonzero")
    if "beta0" in doc:
        check_beta("$.beta0", doc["beta0"])
    for key in ("state", "probe"):
        if key in doc and "spin_weights" in doc[key]:
            spin = doc.get("particle", {}).get("spin", 0)
            if len(doc[key]["spin_weights"]) != two_s_of(spin) + 1:
                raise ConfigError(f"$.{key}.spin_weights: expected {two_s_of(spin) + 1} entries for spin {spin}")
    if command == "causality" and doc.get("rho_min", 0.1) >= doc.get("rho_max", 10.0):
        raise ConfigError("$.rho_max: must exceed rho_min")


def load_config(command, path=None, overrides=None):
    doc = {}
    if path is not None:
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"{path}: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError("$: configuration must be a JSON object")
    doc.update({k: v for k, v in (overrides or {}).items() if v is not None})
    validate(command, doc)
    cfg = CONFIGS[command](**doc)
    return cfg, doc


# --- helpers -------------------------------------------------------------------------

def _particle(d):
    return ParticleSpec(float(d["m0"]), two_s_of(d.get("spin", 0)), int(d.get("eta", 1)))


def _weights(ws):
    if ws is None:
        return None
    return np.array([complex(*w) if isinstance(w, list) else complex(w) for w in ws])


def _gaussian(particle, d):
    return gaussian(
        particle,
        d.get("pbar", [0.0, 0.0, 0.0]),
        d["sigma_p"],
        d.get("xbar", [0.0, 0.0, 0.0]),
        _weights(d.get("spin_weights")),
    )


def _element(tr):
    kind = tr["type"]
    if kind == "translation":
        return pc.Translation(tr["a"])
    if kind == "rotation":
        return pc.Rotation.about(tr["axis"], tr["angle"])
    if kind == "boost":
        return pc.Boost(tr["beta"])
    if kind == "parity":
        return pc.Parity()
    return pc.TimeReversal()


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return v


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])


class Checks:
    def __init__(self, scale=1.0):
        self.scale = scale
        self.items = []

    def add(self, name, value, tol, kind="le"):
        """Record a check; ``kind`` 'le' means value <= tol (tolerances are scaled)."""
        value = float(value)
        tol_eff = float(tol) * self.scale
        passed = bool(np.isfinite(value) and value <= tol_eff) if kind == "le" else bool(value)
        self.items.append({"name": name, "passed": passed, "value": value, "tolerance": tol_eff})
        return passed

    @property
    def failed(self):
        return [c["name"] for c in self.items if not c["passed"]]


# --- commands ------------------------------------------------------------------------

def run_transform(cfg, out, checks, tols):
    particle = _particle(cfg.particle)
    if cfg.grid_file:
        psi = load_grid(cfg.grid_file)
        particle = psi.particle
        carrier = "grid"
    else:
        psi = _gaussian(particle, cfg.state)
        carrier = cfg.carrier
    probe = _gaussian(particle, cfg.probe)
    if carrier == "grid" and not cfg.grid_file:
        n = cfg.grid.get("n", 48)
        # one box for both packets, with room for what the sequence moves around
        pmax = cfg.grid.get("pmax") or max(default_pmax(a.pbar, a.sigma_p, pad=10.0) for a in (psi, probe))
        psi = sample_on_grid(psi, n=n, pmax=pmax)
        probe = sample_on_grid(probe, n=psi.n, pmax=psi.pmax)
    elif carrier == "grid":
        probe = sample_on_grid(probe, n=psi.n, pmax=psi.pmax, tail_tol=1e-8)
    elements = [_element(t) for t in cfg.transformations]
    out_psi = pc.apply_sequence(psi, elements)
    out_probe = pc.apply_sequence(probe, elements)

    n0, n1 = norm_squared(psi), norm_squared(out_psi)
    checks.add("norm_preserved", abs(n1 - n0), tols[f"norm_{carrier}"])
    s0 = abs(scalar_product(probe, psi)) ** 2
    s1 = abs(scalar_product(out_probe, out_psi)) ** 2
    checks.add("scalar_product_modulus", abs(s1 - s0), tols[f"scalar_product_{carrier}"])
    p0 = expectation_four_momentum(psi)
    expected = p0
    for el in elements:
        expected = pc.four_vector_action(el, expected)
    p1 = expectation_four_momentum(out_psi)
    checks.add("four_momentum_covariance", np.max(np.abs(p1 - expected)) / np.max(np.abs(expected)), tols[f"four_momentum_{carrier}"])

    rows = []
    for axis_name in cfg.axes:
        axis = "xyz".index(axis_name)
        if carrier == "grid":
            extent = psi.pmax
        else:
            e = psi.extent()
            extent = float(np.max(np.abs(e.center)) + e.radius)
        s = np.linspace(-extent, extent, cfg.samples)
        pts = np.zeros((cfg.samples, 3))
        pts[:, axis] = s
        v0 = psi.evaluate(pts) if carrier == "grid" else psi.values(pts)
        v1 = out_psi.evaluate(pts) if carrier == "grid" else out_psi.values(pts)
        for k in range(cfg.samples):
            for c in range(particle.ncomp):
                rows.append([axis_name, s[k], (particle.two_s - 2 * c) / 2, abs(v0[k, c]), abs(v1[k, c])])
    write_csv(out / "samples.csv", ["axis", "p", "m", "abs_psi_in", "abs_psi_out"], rows)
    write_csv(
        out / "invariants.csv",
        ["quantity", "before", "after", "expected"],
        [["norm", n0, n1, n0], ["scalar_product_modulus_sq", s0, s1, s0]]
        + [[f"P{mu}", p0[mu], p1[mu], expected[mu]] for mu in range(4)],
    )
    return ["samples.csv", "invariants.csv"], {"carrier": carrier}


def run_causality(cfg, out, checks, tols):
    grid = caus.rho_grid(cfg.rho_min, cfg.rho_max, cfg.step)
    curve = caus.causality_scan(cfg.tau, grid, cfg.rtol, cfg.mass_ratio)
    header = ["rho", "C"]
    rows = [list(r) for r in curve.rows()]
    if cfg.both_paths:
        header += ["psi_closed_re", "psi_closed_im", "psi_quad_re", "psi_quad_im"]
        worst = 0.0
        for r in rows:
            a = caus.spatial_wavefunction(cfg.tau, r[0]) if cfg.mass_ratio == 0 else np.nan
            b = caus.spatial_wavefunction(cfg.tau, r[0], "quadrature", cfg.mass_ratio)
            r += [np.real(a), np.imag(a), b.real, b.imag]
            if cfg.mass_ratio == 0:
                worst = max(worst, abs(a - b))
        if cfg.mass_ratio == 0:
            checks.add("path_agreement", worst, tols["paths"])
    write_csv(out / "causality.csv", header, rows)
    summary = {"tau": cfg.tau, "min_C": curve.min, "argmin_rho": curve.argmin, "C_at_rho_max": float(curve.ratio[-1])}
    if cfg.tau == 5.0 and 5.0 in grid.tolist() and cfg.mass_ratio == 0:
        c55 = float(curve.ratio[grid.tolist().index(5.0)])
        summary["C(5,5)"] = c55
        checks.add("C(5,5)_reference", abs(c55 - C55_REFERENCE), tols["c55"])
    if grid[-1] >= 10.0:
        # the approach to 1 is only asserted once the scan reaches far outside the packet
        checks.add("far_field_ratio", abs(curve.ratio[-1] - 1), tols["far_field"])
    checks.add("normalization", abs(caus.total_probability(cfg.tau, mass_ratio=cfg.mass_ratio) - 1), tols["normalization"])
    line = ", ".join(f"{k} = {v:.7g}" for k, v in summary.items())
    print(f"causality: {line}")
    return ["causality.csv"], summary


def run_nw_check(cfg, out, checks, tols):
    particle = _particle(cfg.particle)
    rng = np.random.default_rng(cfg.seed)
    lo, hi = cfg.sigma_range
    rows = []
    worst_id = worst_h = worst_hnw = 0.0
    for k in range(cfg.pairs):
        ws = [rng.normal(size=particle.ncomp) + 1j * rng.normal(size=particle.ncomp) for _ in range(2)]
        a = gaussian(particle, rng.normal(0, 0.5, 3), rng.uniform(lo, hi), rng.normal(0, 1, 3), ws[0])
        b = gaussian(particle, rng.normal(0, 0.5, 3), rng.uniform(lo, hi), rng.normal(0, 1, 3), ws[1])
        ca, cb = to_covariant(a), to_covariant(b)
        lhs, rhs = pos.nw_identity_check(ca, cb)
        h = pos.hermiticity_residual(a, b)
        hnw = pos.hermiticity_residual(ca, cb, pos.nw_operator(particle.m0), measure_power=-1)
        worst_id = max(worst_id, float(np.max(np.abs(lhs - rhs))))
        worst_h, worst_hnw = max(worst_h, h), max(worst_hnw, hnw)
        for i in range(3):
            rows.append([k, "xyz"[i], lhs[i].real, lhs[i].imag, rhs[i].real, rhs[i].imag, abs(lhs[i] - rhs[i]), h, hnw])
    write_csv(out / "nw_check.csv", ["pair", "axis", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_diff", "herm_x", "herm_nw"], rows)
    checks.add("nw_identity", worst_id, tols["identity"])
    checks.add("hermiticity_x", worst_h, tols["hermiticity"])
    checks.add("hermiticity_nw", worst_hnw, tols["hermiticity"])
    return ["nw_check.csv"], {"pairs": cfg.pairs}


def run_boost_position(cfg, out, checks, tols):
    particle = _particle(cfg.particle)
    if particle.two_s != 0:
        raise ConfigError("$.particle.spin: the boosted position operator is only defined for spin 0")
    psi = _gaussian(particle, cfg.state)
    probe = _gaussian(particle, cfg.probe)
    beta0 = np.array(cfg.beta0, dtype=float)
    rows = []
    lhs, rhs, narrow = pos.velocity_law_check(psi, beta0)
    checks.add("velocity_law", np.max(np.abs(lhs - rhs)), tols["velocity_law"])
    for i in range(3):
        rows.append([f"velocity_law_{'xyz'[i]}", lhs[i].real, rhs[i], narrow[i]])
    res = pos.commutator_invariance_residual(psi, beta0)
    checks.add("commutator_invariance", res, tols["commutator"])
    rows.append(["commutator_residual", res, 0.0, 0.0])
    herm = pos.hermiticity_residual(psi, probe, pos.boosted_position_operator(beta0, particle.m0))
    checks.add("hermiticity_boosted", herm, tols["hermiticity"])
    rows.append(["hermiticity_boosted", herm, 0.0, 0.0])
    if np.any(beta0):
        tl, tr = pos.t_integral_check(psi, beta0)
        checks.add("t_integral", np.max(np.abs(tl - tr)), tols["t_integral"])
        for i in range(3):
            rows.append([f"T_{'xyz'[i]}", tl[i].real, tr[i], 0.0])
    try:
        ev = pos.average_event(psi, beta0, cfg.t)
    except ValueError as exc:
        checks.add("average_event_applicable", False, 0, kind="bool")
        write_csv(out / "boost_position.csv", ["quantity", "value", "reference", "approximation"], rows)
        print(f"average event refused: {exc}", file=sys.stderr)
        return ["boost_position.csv"], {"refused": str(exc)}
    for mu in range(4):
        rows.append([f"event_{mu}", ev.x_primed[mu], ev.boosted[mu], ev.x[mu]])
    rows.append(["relative_deviation", ev.relative_deviation, ev.epsilon_bound, 0.0])
    checks.add("average_event_bound", ev.relative_deviation, ev.epsilon_bound)
    write_csv(out / "boost_position.csv", ["quantity", "value", "reference", "approximation"], rows)
    return ["boost_position.csv"], {"relative_deviation": ev.relative_deviation, "epsilon_bound": ev.epsilon_bound}


def run_dirac(cfg, out, checks, tols):
    particle = _particle(cfg.particle)
    if particle.two_s != 1:
        raise ConfigError("$.particle.spin: the dirac command needs spin 1/2")
    psi = _gaussian(particle, cfg.state)
    rng = np.random.default_rng(cfg.seed)
    p = rng.normal(size=(cfg.momenta, 3)) * 2
    xi = rng.normal(size=(cfg.momenta, 2)) + 1j * rng.normal(size=(cfg.momenta, 2))
    mres = cov.momentum_residual(p, particle.m0, xi)
    checks.add("momentum_residual", mres, tols["momentum_residual"])
    rest = max(float(np.max(np.abs(cov.dirac_boost_matrix(np.zeros(3), particle.m0, r) - np.eye(2)))) for r in (1, -1))
    checks.add("rest_identity", rest, tols["rest_identity"])
    field_ = cov.dirac_build(psi, cfg.t, n=cfg.grid.get("n", 48), pmax=cfg.grid.get("pmax"))
    pres = cov.dirac_residual(field_)
    checks.add("position_residual", pres, tols["position_residual"])
    scalar = _gaussian(ParticleSpec(particle.m0, 0, particle.eta), {k: v for k, v in cfg.state.items() if k != "spin_weights"})
    phi = cov.kg_scalar(scalar, cfg.t, n=field_.n)
    kres = cov.kg_field_residual(phi)
    checks.add("kg_residual", kres, tols["kg_residual"])
    write_csv(
        out / "dirac_residuals.csv",
        ["check", "value"],
        [["momentum_residual", mres], ["rest_identity", rest], ["position_residual", pres], ["kg_residual", kres]],
    )
    eng = fourier.FourierEngine(field_.n, field_.pmax)
    mid = field_.n // 2
    rows = []
    for k, x in enumerate(eng.x_axis):
        c = field_.data[k, mid, mid]
        rows.append([x] + [v for comp in c for v in (comp.real, comp.imag)])
    header = ["x"] + [f"{part}{i}" for i in range(4) for part in ("re", "im")]
    write_csv(out / "dirac_components.csv", header, rows)
    return ["dirac_residuals.csv", "dirac_components.csv"], {"grid_n": field_.n, "pmax": field_.pmax}


RUNNERS = {
    "transform": run_transform,
    "causality": run_causality,
    "nw-check": run_nw_check,
    "boost-position": run_boost_position,
    "dirac": run_dirac,
}


# --- entry point ---------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="relamp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"relamp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in RUNNERS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=Path, help="JSON experiment file")
        sp.add_argument("--out", type=Path, default=Path("relamp_out"), help="output directory")
        sp.add_argument("--threads", type=int, help="worker threads for FFT and NUFFT kernels")
        sp.add_argument("--serial", action="store_true", help="single-threaded, bit-stable run")
        sp.add_argument("--tol-scale", type=float, default=1.0, help="multiply every tolerance")
        if name == "causality":
            sp.add_argument("--tau", type=float)
            sp.add_argument("--rho-max", type=float)
            sp.add_argument("--step", type=float)
            sp.add_argument("--both-paths", action="store_true", default=None)
    return parser


def _write_manifest(out, manifest):
    out.mkdir(parents=True, exist_ok=True)
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, default=float) + "\n")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    overrides = {}
    if args.command == "causality":
        overrides = {"tau": args.tau, "rho_max": args.rho_max, "step": args.step, "both_paths": args.both_paths}
    threads = 1 if args.serial else args.threads
    manifest = {
        "command": args.command,
        "tool_version": __version__,
        "config_sha256": None,
        "config": None,
        "wall_clock_seconds": 0.0,
        "threads": threads,
        "serial": bool(args.serial),
        "tol_scale": args.tol_scale,
        "outputs": [],
        "summary": {},
        "checks": [],
        "passed": False,
    }
    try:
        if not args.tol_scale > 0:
            raise ConfigError("--tol-scale: must be positive")
        cfg, _ = load_config(args.command, args.config, overrides)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        _write_manifest(args.out, {**manifest, "error": str(exc)})
        return 2
    config = asdict(cfg)
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    manifest.update(config=config, config_sha256=hashlib.sha256(canonical.encode()).hexdigest())
    fourier.set_threads(threads)
    tols = dict(DEFAULT_TOLERANCES[args.command])
    tols.update(cfg.tolerances)
    args.out.mkdir(parents=True, exist_ok=True)
    checks = Checks(args.tol_scale)
    start = time.perf_counter()
    try:
        files, summary = RUNNERS[args.command](cfg, args.out, checks, tols)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        _write_manifest(args.out, {**manifest, "error": str(exc)})
        return 2
    except (ArithmeticError, ValueError) as exc:
        # a numerical routine refused (quadrature non-convergence, box too small, ...)
        checks.add(f"{args.command}_execution", False, 0, kind="bool")
        files, summary = [], {"error": f"{type(exc).__name__}: {exc}"}
    manifest.update(
        wall_clock_seconds=time.perf_counter() - start,
        outputs=files,
        summary=summary,
        checks=checks.items,
        passed=not checks.failed,
    )
    _write_manifest(args.out, manifest)
    if checks.failed:
        print("failed checks: " + ", ".join(checks.failed), file=sys.stderr)
        if "error" in summary:
            print(summary["error"], file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
