from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from tetrafold import build_mesh

settings.register_profile(
    "suite",
    max_examples=50,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

_mesh_cache = {}


@pytest.fixture(scope="session")
def mesh():
    """Memoized mesh builder shared across the whole session."""

    def get(a, b):
        if (a, b) not in _mesh_cache:
            _mesh_cache[(a, b)] = build_mesh(a, b)
        return _mesh_cache[(a, b)]

    return get
