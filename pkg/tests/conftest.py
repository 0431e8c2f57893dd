"""Shared fixtures: precision contexts, coupling parameters, seeded RNG."""

import random

import pytest

from mirror_spectra import ModularParam, make_context

RNG_SEED = 20260814


@pytest.fixture(scope="session")
def ctx192():
    """Production-grade context: 192 bits, tol 1e-40."""
    return make_context(192, 1e-40)


@pytest.fixture(scope="session")
def ctx64():
    """Fast smoke-test context."""
    return make_context(64, 1e-10)


@pytest.fixture(scope="session")
def mpar_pi4(ctx192):
    """Coupling theta = pi/4 (q = e^{-pi}), the main worked case."""
    return ModularParam.from_theta("pi/4", ctx192)


@pytest.fixture()
def rng():
    """Deterministic RNG so property sweeps are reproducible."""
    return random.Random(RNG_SEED)
