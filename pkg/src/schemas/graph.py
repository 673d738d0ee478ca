"""Graph-side domain types: the underlying weighted digraph, cycles and nice-weight parameters.

Structural invariants are enforced at construction. Semantic violations raise the
domain errors from ``src.errors`` directly (they are not ``ValueError`` subclasses,
so pydantic lets them propagate); malformed field types raise pydantic's
``ValidationError`` as usual.
"""

from __future__ import annotations

import math
from functools import cached_property
from typing import Annotated

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.errors import GraphValidationError, InvalidCycleError, InvalidParamsError, UnknownVertexError

VertexId = Annotated[int, Field(ge=0)]
RngSeed = Annotated[int, Field(ge=0, lt=2**64)]

Edge = tuple[int, int]


class WeightedDigraph(BaseModel):
    """Underlying weighted digraph G(P, E(P)) of a switched system.

    Vertices are ``0..N-1`` split into stable and unstable index sets. Vertex
    weights are signed: negative for stable vertices, positive for unstable ones.
    Edge weights are ``ln mu_ij`` and therefore non-negative, unless
    ``allow_negative_edges`` is set for instances drawn from the statistical
    model (edge weights uniform on ``[-A, A]``).

    ``dwells`` optionally holds a per-vertex dwell assignment (set by the
    instance generator); every value lies in ``[dwell_min, dwell_max]``.
    The graph is immutable once built.
    """

    model_config = ConfigDict(frozen=True)

    stable: frozenset[VertexId]
    unstable: frozenset[VertexId] = frozenset()
    vertex_weights: dict[VertexId, float]
    edge_weights: dict[Edge, float]
    dwell_min: int = Field(default=1, ge=1)
    dwell_max: int = Field(default=1, ge=1)
    dwells: dict[VertexId, int] = Field(default_factory=dict)
    allow_negative_edges: bool = False

    @model_validator(mode="after")
    def _check_invariants(self) -> WeightedDigraph:
        if self.stable & self.unstable:
            raise GraphValidationError(f"Vertices both stable and unstable: {sorted(self.stable & self.unstable)}")
        n_vertices = len(self.stable) + len(self.unstable)
        if n_vertices < 1:
            raise GraphValidationError("Graph must have at least one vertex")
        if (self.stable | self.unstable) != set(range(n_vertices)):
            raise GraphValidationError(f"Vertex ids must be exactly 0..{n_vertices - 1}")
        if self.dwell_min > self.dwell_max:
            raise GraphValidationError(f"Empty dwell window [{self.dwell_min}, {self.dwell_max}]")

        if set(self.vertex_weights) != set(range(n_vertices)):
            missing = sorted(set(range(n_vertices)) - set(self.vertex_weights))
            extra = sorted(set(self.vertex_weights) - set(range(n_vertices)))
            raise GraphValidationError(f"Vertex weights mismatch (missing={missing}, unknown={extra})")
        for vertex, weight in self.vertex_weights.items():
            if not math.isfinite(weight):
                raise GraphValidationError(f"Vertex {vertex} has non-finite weight {weight}")
            if vertex in self.stable and not weight < 0:
                raise GraphValidationError(f"Stable vertex {vertex} must have negative weight, got {weight}")
            if vertex in self.unstable and not weight > 0:
                raise GraphValidationError(f"Unstable vertex {vertex} must have positive weight, got {weight}")

        for (source, target), weight in self.edge_weights.items():
            if source == target:
                raise GraphValidationError(f"Self-loop at vertex {source}")
            if not (self.has_vertex(source) and self.has_vertex(target)):
                raise GraphValidationError(f"Edge ({source}, {target}) references an unknown vertex")
            if not math.isfinite(weight):
                raise GraphValidationError(f"Edge ({source}, {target}) has non-finite weight {weight}")
            if weight < 0 and not self.allow_negative_edges:
                raise GraphValidationError(f"Edge ({source}, {target}) has negative weight {weight} (mu_ij >= 1)")

        for vertex, dwell in self.dwells.items():
            if not self.has_vertex(vertex):
                raise GraphValidationError(f"Dwell assigned to unknown vertex {vertex}")
            if not self.dwell_min <= dwell <= self.dwell_max:
                raise GraphValidationError(
                    f"Dwell {dwell} of vertex {vertex} outside [{self.dwell_min}, {self.dwell_max}]"
                )
        return self

    # -- structure -----------------------------------------------------------

    @property
    def n_vertices(self) -> int:
        """Order N = |P| of the graph."""
        return len(self.vertex_weights)

    @property
    def dwell_window(self) -> tuple[int, int]:
        """Admissible dwell window (Delta_m, Delta_M)."""
        return self.dwell_min, self.dwell_max

    @cached_property
    def vertices(self) -> tuple[int, ...]:
        """All vertex ids in ascending order."""
        return tuple(range(self.n_vertices))

    @cached_property
    def stable_sorted(self) -> tuple[int, ...]:
        """Stable vertex ids in ascending order."""
        return tuple(sorted(self.stable))

    @cached_property
    def edges(self) -> tuple[Edge, ...]:
        """All edges sorted by (source, target)."""
        return tuple(sorted(self.edge_weights))

    @cached_property
    def successor_map(self) -> dict[int, tuple[int, ...]]:
        """Outneighbors of every vertex, each tuple sorted by vertex id."""
        successors: dict[int, list[int]] = {v: [] for v in self.vertices}
        for source, target in self.edges:
            successors[source].append(target)
        return {v: tuple(targets) for v, targets in successors.items()}

    @cached_property
    def stable_successor_map(self) -> dict[int, tuple[int, ...]]:
        """Stable outneighbors of every vertex, each tuple sorted by vertex id."""
        return {v: tuple(u for u in targets if u in self.stable) for v, targets in self.successor_map.items()}

    def has_vertex(self, vertex: int) -> bool:
        """Check whether ``vertex`` belongs to the graph."""
        return 0 <= vertex < self.n_vertices

    def has_edge(self, source: int, target: int) -> bool:
        """Check whether the switch ``source -> target`` is admissible."""
        return (source, target) in self.edge_weights

    def is_stable(self, vertex: int) -> bool:
        """Check whether ``vertex`` is in P_S."""
        self.require_vertex(vertex)
        return vertex in self.stable

    def require_vertex(self, vertex: int) -> None:
        """Raise ``UnknownVertexError`` if ``vertex`` is not in the graph."""
        if not self.has_vertex(vertex):
            raise UnknownVertexError(vertex)

    def successors(self, vertex: int) -> tuple[int, ...]:
        """All outneighbors of ``vertex`` in ascending order."""
        self.require_vertex(vertex)
        return self.successor_map[vertex]

    def stable_successors(self, vertex: int) -> tuple[int, ...]:
        """Outneighbors of ``vertex`` inside P_S in ascending order."""
        self.require_vertex(vertex)
        return self.stable_successor_map[vertex]

    def edge_weight(self, source: int, target: int) -> float:
        """Weight ``ln mu_ij`` of an edge; raises ``InvalidCycleError`` for a non-edge."""
        try:
            return self.edge_weights[(source, target)]
        except KeyError:
            raise InvalidCycleError(f"No edge ({source}, {target}) in graph") from None


class Cycle(BaseModel):
    """A cycle v_0, ..., v_{n-1}, v_0 with optional per-vertex Delta-parameters.

    Graph membership (edges exist, Delta within the dwell window) is checked
    against a concrete graph by ``src.graph.core.validate_cycle``.
    """

    model_config = ConfigDict(frozen=True)

    vertices: tuple[VertexId, ...]
    delta_params: tuple[int, ...] | None = None

    @model_validator(mode="after")
    def _check_shape(self) -> Cycle:
        if len(self.vertices) < 2:
            raise InvalidCycleError(f"Cycle needs at least 2 vertices, got {list(self.vertices)}")
        if len(set(self.vertices)) != len(self.vertices):
            raise InvalidCycleError(f"Cycle vertices must be pairwise distinct: {list(self.vertices)}")
        if self.delta_params is not None:
            if len(self.delta_params) != len(self.vertices):
                raise InvalidCycleError(
                    f"{len(self.delta_params)} Delta-parameters for a cycle of length {len(self.vertices)}"
                )
            if any(delta < 1 for delta in self.delta_params):
                raise InvalidCycleError(f"Delta-parameters must be positive: {list(self.delta_params)}")
        return self

    @property
    def length(self) -> int:
        """Number of edges n (equal to the number of distinct vertices)."""
        return len(self.vertices)

    @property
    def has_deltas(self) -> bool:
        """Whether Delta-parameters are assigned."""
        return self.delta_params is not None

    @property
    def period(self) -> int:
        """Delta_W, the sum of the Delta-parameters."""
        if self.delta_params is None:
            raise InvalidCycleError("Cycle has no Delta-parameters assigned")
        return sum(self.delta_params)

    def cycle_edges(self) -> list[Edge]:
        """Edges (v_k, v_{k+1 mod n}) in ascending k."""
        n = len(self.vertices)
        return [(self.vertices[k], self.vertices[(k + 1) % n]) for k in range(n)]

    def with_deltas(self, delta_params: tuple[int, ...] | list[int]) -> Cycle:
        """Copy of this cycle with the given Delta-parameters."""
        return Cycle(vertices=self.vertices, delta_params=tuple(delta_params))

    def with_uniform_delta(self, delta: int) -> Cycle:
        """Copy of this cycle with every Delta-parameter equal to ``delta``."""
        return self.with_deltas((delta,) * len(self.vertices))


class NiceWeightParams(BaseModel):
    """Parameters of the nicely Delta-weighted property.

    ``edge_bound`` is A (edge weights in [-A, A]) and ``vertex_bound`` is B
    (dwell-scaled vertex weight magnitudes in (0, B]).
    """

    model_config = ConfigDict(frozen=True)

    delta: int = Field(ge=1)
    alpha: float
    beta: float
    edge_bound: float
    vertex_bound: float

    @model_validator(mode="after")
    def _check_ranges(self) -> NiceWeightParams:
        if not 0 < self.beta < self.vertex_bound:
            raise InvalidParamsError(f"Need 0 < beta < B, got beta={self.beta}, B={self.vertex_bound}")
        if not self.alpha < self.beta:
            raise InvalidParamsError(f"Need alpha < beta, got alpha={self.alpha}, beta={self.beta}")
        if not self.edge_bound > 0:
            raise InvalidParamsError(f"Need A > 0, got A={self.edge_bound}")
        return self
