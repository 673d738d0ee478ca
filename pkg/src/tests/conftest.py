"""Shared fixtures for src tests."""

from __future__ import annotations

import pytest

from src.config import SwitchSettings
from src.schemas.graph import NiceWeightParams, WeightedDigraph
from src.simulators.library import two_scalar_example
from src.simulators.lyapunov import LyapunovCertificate, graph_from_certificate
from src.simulators.switched import SwitchedSystem


@pytest.fixture
def settings() -> SwitchSettings:
    """Default settings for testing."""
    return SwitchSettings(log_level="DEBUG", trials_per_length=200, master_seed=7)


@pytest.fixture
def reference_params() -> NiceWeightParams:
    """Weight parameters of the reference experiment (A=2.5, B=5, alpha=0, beta=2.5)."""
    return NiceWeightParams(delta=2, alpha=0.0, beta=2.5, edge_bound=2.5, vertex_bound=5.0)


@pytest.fixture
def mixed_graph() -> WeightedDigraph:
    """P_S = {0, 1, 2}, P_U = {3}; stable triangle plus edges into and out of the unstable vertex."""
    return WeightedDigraph(
        stable=frozenset({0, 1, 2}),
        unstable=frozenset({3}),
        vertex_weights={0: -1.2, 1: -0.4, 2: -0.9, 3: 0.7},
        edge_weights={(0, 1): 0.5, (1, 2): 0.25, (2, 0): 1.0, (0, 3): 0.1, (3, 1): 0.3},
        dwell_min=1,
        dwell_max=3,
    )


@pytest.fixture
def two_scalar() -> tuple[SwitchedSystem, LyapunovCertificate, WeightedDigraph]:
    """Scalar maps a = (0.5, 0.6), V = x^2, lambda = a^2, mu = 1, dwell window [1, 2]."""
    system, cert = two_scalar_example()
    return system, cert, graph_from_certificate(cert, (1, 2))
