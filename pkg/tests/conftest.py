import numpy as np
import pytest

from relamp import poincare as pc
from relamp.amplitudes import ParticleSpec, gaussian

SPINS = (0, 1, 2, 3)  # twice the spin


def random_gaussian(rng, particle, sigma=(0.6, 1.2), pscale=0.3, xscale=0.5):
    k = particle.ncomp
    w = rng.normal(size=k) + 1j * rng.normal(size=k)
    return gaussian(particle, rng.normal(size=3) * pscale, rng.uniform(*sigma), rng.normal(size=3) * xscale, w)


def random_element(rng, kinds=("translation", "rotation", "boost", "parity", "time_reversal"), max_beta=0.4):
    kind = kinds[rng.integers(len(kinds))]
    if kind == "translation":
        return pc.Translation(rng.uniform(-0.5, 0.5, 4))
    if kind == "rotation":
        return pc.Rotation.about(rng.normal(size=3), rng.uniform(-np.pi, np.pi))
    if kind == "boost":
        d = rng.normal(size=3)
        return pc.Boost(d / np.linalg.norm(d) * rng.uniform(0.05, max_beta))
    return pc.Parity() if kind == "parity" else pc.TimeReversal()


def random_sequence(rng, max_len=5, **kw):
    return [random_element(rng, **kw) for _ in range(rng.integers(1, max_len + 1))]


def random_particle(rng, two_s=None):
    if two_s is None:
        two_s = SPINS[rng.integers(len(SPINS))]
    return ParticleSpec(float(rng.uniform(0.8, 1.5)), int(two_s), int(rng.choice([1, -1])))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, collected by tests/test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])
