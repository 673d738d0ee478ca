"""Hand-built graphs shared by several test modules."""

from __future__ import annotations

from src.schemas.graph import WeightedDigraph


def complete_digraph(
    n_stable: int, *, dwell_window: tuple[int, int] = (2, 4), vertex_weight: float = -1.0, edge_weight: float = 0.5
) -> WeightedDigraph:
    """Complete digraph over ``n_stable`` stable vertices with uniform weights."""
    vertices = range(n_stable)
    return WeightedDigraph(
        stable=frozenset(vertices),
        vertex_weights=dict.fromkeys(vertices, vertex_weight),
        edge_weights={(i, j): edge_weight for i in vertices for j in vertices if i != j},
        dwell_min=dwell_window[0],
        dwell_max=dwell_window[1],
    )


def two_cycle_graph(
    vertex_weights: tuple[float, float] = (-1.0, -1.0), edge_weights: tuple[float, float] = (0.5, 0.5)
) -> WeightedDigraph:
    """Stable 2-cycle 0 <-> 1 with dwell window [2, 4]."""
    return WeightedDigraph(
        stable=frozenset({0, 1}),
        vertex_weights={0: vertex_weights[0], 1: vertex_weights[1]},
        edge_weights={(0, 1): edge_weights[0], (1, 0): edge_weights[1]},
        dwell_min=2,
        dwell_max=4,
    )
