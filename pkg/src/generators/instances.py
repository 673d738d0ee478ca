"""Random instance generation under the uniform statistical weight model.

Draw order for ``generate`` (all from one PCG64 stream seeded by ``cfg.seed``):

1. Outneighbor sets, vertex id ascending: floor(Phi(|P_S|)) stable targets drawn
   without replacement from P_S minus the vertex, then ``extra_edges`` further
   targets from the remaining vertices.
2. Dwell times Delta_j, one integer in [Delta_m, Delta_M] per vertex, ascending.
3. Dwell-scaled magnitudes s_j = |w(j)| * Delta_j, uniform on (0, B], ascending.
4. Edge weights uniform on [-A, A], edges sorted by (source, target).

Vertex weights are s_j / Delta_j, stored negative for stable vertices and
positive for unstable ones. Unstable vertices never enter detected cycles, so
their weight distribution has no effect on the experiment.
"""

from __future__ import annotations

import math

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.errors import ConfigError
from src.generators.rng import make_rng, uniform_open_closed
from src.graph.core import gamma_terms, validate_cycle, x_n_statistic
from src.schemas.graph import Cycle, NiceWeightParams, RngSeed, WeightedDigraph


class PhiSqrt(BaseModel):
    """Connectivity function r -> coeff * sqrt(r)."""

    model_config = ConfigDict(frozen=True)

    coeff: float = Field(gt=0)

    def __call__(self, r: int) -> float:
        return self.coeff * math.sqrt(r)

    def floor(self, r: int) -> int:
        """floor(Phi(r))."""
        return math.floor(self(r))


class GenConfig(BaseModel):
    """Instance generator configuration."""

    model_config = ConfigDict(frozen=True)

    n_stable: int = Field(ge=1)
    n_unstable: int = Field(default=0, ge=0)
    phi: PhiSqrt
    params: NiceWeightParams
    dwell_window: tuple[int, int]
    seed: RngSeed = 0
    strict: bool = False  # clamp edge weights to [0, A]
    extra_edges: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _check_realizable(self) -> GenConfig:
        dwell_min, dwell_max = self.dwell_window
        if not 1 <= dwell_min <= dwell_max:
            raise ConfigError(f"Invalid dwell window [{dwell_min}, {dwell_max}]")
        if not dwell_min <= self.params.delta <= dwell_max:
            raise ConfigError(f"Delta={self.params.delta} outside dwell window [{dwell_min}, {dwell_max}]")
        outdegree = self.phi.floor(self.n_stable)
        if outdegree > self.n_stable - 1:
            raise ConfigError(
                f"floor(Phi({self.n_stable}))={outdegree} stable outneighbors cannot be realized without self-loops"
            )
        if outdegree + self.extra_edges > self.n_vertices - 1:
            raise ConfigError(f"Outdegree {outdegree} + {self.extra_edges} extra exceeds {self.n_vertices - 1}")
        return self

    @property
    def n_vertices(self) -> int:
        """Total number of vertices |P_S| + |P_U|."""
        return self.n_stable + self.n_unstable

    @property
    def outdegree(self) -> int:
        """Stable outdegree floor(Phi(|P_S|)) given to every vertex."""
        return self.phi.floor(self.n_stable)


def generate(cfg: GenConfig) -> WeightedDigraph:
    """Draw a nicely connected, nicely Delta-weighted instance with per-vertex dwells."""
    rng = make_rng(cfg.seed)
    n_vertices = cfg.n_vertices
    stable_ids = np.arange(cfg.n_stable)
    all_ids = np.arange(n_vertices)
    outdegree = cfg.outdegree

    edges: list[tuple[int, int]] = []
    for vertex in range(n_vertices):
        candidates = stable_ids[stable_ids != vertex]
        targets = {int(u) for u in rng.choice(candidates, size=outdegree, replace=False)} if outdegree else set()
        if cfg.extra_edges:
            others = np.array([u for u in all_ids if u != vertex and int(u) not in targets])
            targets.update(int(u) for u in rng.choice(others, size=cfg.extra_edges, replace=False))
        edges.extend((vertex, target) for target in sorted(targets))

    dwell_min, dwell_max = cfg.dwell_window
    dwells = rng.integers(dwell_min, dwell_max + 1, size=n_vertices)
    products = uniform_open_closed(rng, cfg.params.vertex_bound, size=n_vertices)
    magnitudes = products / dwells
    edge_draws = sample_edge_weights(rng, cfg.params, len(edges), strict=cfg.strict)

    vertex_weights = {v: float(-magnitudes[v] if v < cfg.n_stable else magnitudes[v]) for v in range(n_vertices)}
    graph = WeightedDigraph(
        stable=frozenset(range(cfg.n_stable)),
        unstable=frozenset(range(cfg.n_stable, n_vertices)),
        vertex_weights=vertex_weights,
        edge_weights={edge: float(weight) for edge, weight in zip(edges, edge_draws, strict=True)},
        dwell_min=dwell_min,
        dwell_max=dwell_max,
        dwells={v: int(dwells[v]) for v in range(n_vertices)},
        allow_negative_edges=not cfg.strict,
    )
    logger.info(
        "Generated instance: |P_S|={} |P_U|={} outdegree={} |E|={} seed={}",
        cfg.n_stable,
        cfg.n_unstable,
        outdegree,
        len(edges),
        cfg.seed,
    )
    return graph


def sample_edge_weights(
    rng: np.random.Generator, params: NiceWeightParams, size: int, *, strict: bool = False
) -> np.ndarray:
    """Edge weights uniform on [-A, A]; ``strict`` clamps them to [0, A]."""
    weights = rng.uniform(-params.edge_bound, params.edge_bound, size=size)
    if strict:
        weights = np.clip(weights, 0.0, params.edge_bound)
    return weights


def sample_vertex_products(params: NiceWeightParams, size: int, seed: int) -> np.ndarray:
    """Dwell-scaled vertex magnitudes uniform on (0, B]; mean B / 2."""
    return np.asarray(uniform_open_closed(make_rng(seed), params.vertex_bound, size=size))


# --- Per-cycle resampling ---


class CycleDraw(BaseModel):
    """One i.i.d. redraw of a cycle's dwell times, vertex magnitudes and edge weights."""

    model_config = ConfigDict(frozen=True)

    vertices: tuple[int, ...]
    signs: tuple[float, ...]  # -1.0 for stable vertices, +1.0 for unstable
    dwells: tuple[int, ...]
    products: tuple[float, ...]  # |w(v_k)| * Delta_k
    edge_weights: tuple[float, ...]

    @property
    def vertex_weights(self) -> tuple[float, ...]:
        """Signed vertex weights w(v_k) = sign * s_k / Delta_k."""
        return tuple(
            sign * product / dwell for sign, product, dwell in zip(self.signs, self.products, self.dwells, strict=True)
        )

    def gamma(self) -> float:
        """Gamma of the cycle under this draw, with the graph's signed-weight convention."""
        return gamma_terms(self.vertex_weights, self.dwells, self.edge_weights)

    def x_n(self, *, closing_term: bool = True) -> float:
        """Magnitude-form statistic; ``closing_term`` adds the extra v_n = v_0 vertex term."""
        return x_n_statistic(
            self.products, self.edge_weights, closing_product=self.products[0] if closing_term else None
        )


def resample_cycle_weights(
    g: WeightedDigraph, c: Cycle, seed: int, params: NiceWeightParams, *, strict: bool = False
) -> CycleDraw:
    """Fresh draw of a cycle's weights and dwells under the generator's distributions.

    The graph is not modified. Draw order: dwells, products, edge weights, each
    for k ascending.
    """
    validate_cycle(g, c, require_deltas=False)
    rng = make_rng(seed)
    n = c.length
    dwells = rng.integers(g.dwell_min, g.dwell_max + 1, size=n)
    products = uniform_open_closed(rng, params.vertex_bound, size=n)
    edge_weights = sample_edge_weights(rng, params, n, strict=strict)
    return CycleDraw(
        vertices=c.vertices,
        signs=tuple(-1.0 if v in g.stable else 1.0 for v in c.vertices),
        dwells=tuple(int(d) for d in dwells),
        products=tuple(float(s) for s in products),
        edge_weights=tuple(float(w) for w in edge_weights),
    )
