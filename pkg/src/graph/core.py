"""Weight and structure evaluation on the underlying weighted digraph.

Gamma is the single source of truth for contractivity: it uses the signed vertex
weights stored in the graph. The nice-weight bound checks use magnitudes
``|w(j)| * Delta``, so for cycles inside P_S ``Gamma < 0`` is the same event as
"edge weights minus dwell-scaled magnitudes < 0".

All functions here are pure reads of an immutable graph.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence

from loguru import logger

from src.errors import InvalidCycleError
from src.schemas.graph import Cycle, NiceWeightParams, WeightedDigraph
from src.schemas.results import NiceWeightReport, WeightViolation

PhiFunction = Callable[[int], float]


def validate_cycle(g: WeightedDigraph, c: Cycle, *, require_deltas: bool = True) -> None:
    """Raise ``InvalidCycleError`` unless ``c`` is a cycle of ``g``.

    Checks vertex membership, every edge (v_k, v_{k+1 mod n}) and, when
    assigned, every Delta-parameter against the graph's dwell window.
    """
    for vertex in c.vertices:
        if not g.has_vertex(vertex):
            raise InvalidCycleError(f"Cycle vertex {vertex} is not in the graph")
    for source, target in c.cycle_edges():
        if not g.has_edge(source, target):
            raise InvalidCycleError(f"Cycle uses non-edge ({source}, {target})")
    if c.delta_params is None:
        if require_deltas:
            raise InvalidCycleError("Cycle has no Delta-parameters assigned")
        return
    for vertex, delta in zip(c.vertices, c.delta_params, strict=True):
        if not g.dwell_min <= delta <= g.dwell_max:
            raise InvalidCycleError(f"Delta {delta} of vertex {vertex} outside [{g.dwell_min}, {g.dwell_max}]")


def gamma_terms(vertex_weights: Sequence[float], deltas: Sequence[int], edge_weights: Sequence[float]) -> float:
    """Sum ``w(v_k) * Delta_k`` for ascending k, then the edge weights for ascending k.

    The summation order is fixed so results are bit-reproducible.
    """
    total = 0.0
    for weight, delta in zip(vertex_weights, deltas, strict=True):
        total += weight * delta
    for weight in edge_weights:
        total += weight
    return total


def gamma(g: WeightedDigraph, c: Cycle) -> float:
    """Contractivity value Gamma(W) of a cycle with assigned Delta-parameters."""
    validate_cycle(g, c)
    return gamma_terms(
        [g.vertex_weights[v] for v in c.vertices],
        c.delta_params or (),
        [g.edge_weights[edge] for edge in c.cycle_edges()],
    )


def is_delta_contractive(g: WeightedDigraph, c: Cycle) -> bool:
    """True iff Gamma(W) < 0 strictly."""
    return gamma(g, c) < 0


def best_delta_params(g: WeightedDigraph, vertices: Sequence[int]) -> Cycle:
    """Assign the Delta-parameters that minimize Gamma for the given vertex cycle.

    Gamma is separable in the Delta-parameters: negative-weight vertices take
    Delta_M, all others Delta_m.
    """
    cycle = Cycle(vertices=tuple(vertices))
    validate_cycle(g, cycle, require_deltas=False)
    deltas = tuple(g.dwell_max if g.vertex_weights[v] < 0 else g.dwell_min for v in cycle.vertices)
    return cycle.with_deltas(deltas)


def admits_delta_contractivity(g: WeightedDigraph, vertices: Sequence[int]) -> bool:
    """True iff some Delta-parameters in the dwell window make the cycle Delta-contractive."""
    return is_delta_contractive(g, best_delta_params(g, vertices))


def uniform_delta_cycle(vertices: Sequence[int], delta: int) -> Cycle:
    """Cycle over ``vertices`` with the same Delta on every vertex."""
    return Cycle(vertices=tuple(vertices)).with_uniform_delta(delta)


def contractive_uniform_deltas(g: WeightedDigraph, vertices: Sequence[int]) -> list[int]:
    """Uniform Delta values in [Delta_m, Delta_M] for which the cycle is Delta-contractive."""
    return [
        delta
        for delta in range(g.dwell_min, g.dwell_max + 1)
        if is_delta_contractive(g, uniform_delta_cycle(vertices, delta))
    ]


def stable_outneighbors(g: WeightedDigraph, v: int) -> frozenset[int]:
    """N+_{P_S}(v): outneighbors of ``v`` that are stable."""
    return frozenset(g.stable_successors(v))


def phi_floor(phi: PhiFunction, n_stable: int) -> int:
    """floor(Phi(|P_S|)), the guaranteed stable outdegree and minimum cycle length."""
    return math.floor(phi(n_stable))


def is_nicely_connected(g: WeightedDigraph, phi: PhiFunction) -> bool:
    """True iff every vertex (stable and unstable) has at least floor(Phi(|P_S|)) stable outneighbors."""
    n_stable = len(g.stable)
    _warn_if_not_monotone(phi, n_stable)
    threshold = phi_floor(phi, n_stable)
    for vertex in g.vertices:
        degree = len(g.stable_successors(vertex))
        if degree < threshold:
            logger.debug("Vertex {} has {} stable outneighbors, threshold {}", vertex, degree, threshold)
            return False
    return True


def _warn_if_not_monotone(phi: PhiFunction, n_stable: int) -> None:
    samples = sorted({1, 2, max(1, n_stable // 2), max(1, n_stable), n_stable + 1})
    values = [phi(r) for r in samples]
    if any(later < earlier for earlier, later in zip(values, values[1:], strict=False)):
        logger.warning("Phi is not monotone increasing on samples {}: {}", samples, values)


def check_nice_weight_bounds(g: WeightedDigraph, p: NiceWeightParams) -> NiceWeightReport:
    """Check the boundedness half of the nice Delta-weight property on one instance.

    Vertex products use ``|w(j)| * Delta_j`` with the graph's per-vertex dwell
    when one is assigned, else ``p.delta``; each must lie in (0, B]. Each edge
    weight must lie in [-A, A]. The conditional-mean conditions concern the
    distribution over graphs and are not checked here.
    """
    delta_in_window = g.dwell_min <= p.delta <= g.dwell_max
    vertex_violations: list[WeightViolation] = []
    for vertex in g.vertices:
        dwell = g.dwells.get(vertex, p.delta)
        product = abs(g.vertex_weights[vertex]) * dwell
        if not 0 < product <= p.vertex_bound:
            vertex_violations.append(
                WeightViolation(subject=f"vertex {vertex}", value=product, bound=f"(0, {p.vertex_bound}]")
            )

    edge_violations: list[WeightViolation] = []
    for source, target in g.edges:
        weight = g.edge_weights[(source, target)]
        if not -p.edge_bound <= weight <= p.edge_bound:
            edge_violations.append(
                WeightViolation(
                    subject=f"edge {source}->{target}", value=weight, bound=f"[{-p.edge_bound}, {p.edge_bound}]"
                )
            )

    ok = delta_in_window and not vertex_violations and not edge_violations
    if not ok:
        logger.warning(
            "Nice weight bounds violated: delta_in_window={} vertex_violations={} edge_violations={}",
            delta_in_window,
            len(vertex_violations),
            len(edge_violations),
        )
    return NiceWeightReport(
        ok=ok,
        delta_in_window=delta_in_window,
        checked_vertices=g.n_vertices,
        checked_edges=len(g.edges),
        vertex_violations=vertex_violations,
        edge_violations=edge_violations,
    )


def recovers_nice_weights(g: WeightedDigraph, p: NiceWeightParams) -> bool:
    """With Delta_m = 1 and Delta = 1 a nicely Delta-weighted graph is nicely weighted (Delta-free)."""
    if g.dwell_min != 1 or p.delta != 1:
        return False
    return check_nice_weight_bounds(g, p).ok


def x_n_statistic(
    vertex_products: Sequence[float], edge_weights: Sequence[float], *, closing_product: float | None = None
) -> float:
    """Edge weights minus dwell-scaled vertex magnitudes, the experiment statistic in magnitude form.

    ``closing_product`` adds the extra vertex term of the n+1-term variant
    (vertex sum over k = 0..n with v_n = v_0).
    """
    total = 0.0
    for weight in edge_weights:
        total += weight
    for product in vertex_products:
        total -= product
    if closing_product is not None:
        total -= closing_product
    return total
