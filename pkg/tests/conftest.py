"""Shared fixtures.

The model smiles are expensive (the deep curve prices ~750 stable-law puts
and takes ~15s); they are cached at module level inside
:mod:`smilewings.acceptance`, so the session fixtures here are thin names
over those singletons and every test file pays the build cost at most once
per pytest run.
"""

from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from smilewings import acceptance
from smilewings.config import RunConfig

settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def cfg() -> RunConfig:
    return RunConfig()


@pytest.fixture(scope="session")
def flat02():
    return acceptance.flat_smile(0.2)


@pytest.fixture(scope="session")
def moderate_smile():
    return acceptance.moderate_fmls_smile()


@pytest.fixture(scope="session")
def deep_smile():
    return acceptance.deep_fmls_smile()


@pytest.fixture(scope="session")
def flat02_transform(flat02):
    return acceptance.transform_of(flat02)


@pytest.fixture(scope="session")
def moderate_transform(moderate_smile):
    return acceptance.transform_of(moderate_smile)


@pytest.fixture(scope="session")
def deep_transform(deep_smile):
    return acceptance.transform_of(deep_smile)
