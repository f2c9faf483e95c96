"""
Root test configuration.

Strips the environment overrides so a developer's shell cannot change the
precision or thread count seen by the tests.
"""

from __future__ import annotations

import pytest

from poincare_relations.const import ENV_PRECISION, ENV_THREADS


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    """Remove POINCARE_RELATIONS_* variables for every test."""
    monkeypatch.delenv(ENV_PRECISION, raising=False)
    monkeypatch.delenv(ENV_THREADS, raising=False)
