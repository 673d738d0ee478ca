"""Randomized cycle detection over the stable vertices and its success-probability bound.

The walk starts at a uniformly random stable vertex and keeps stepping to a
uniformly random unvisited stable outneighbor. When none is left it closes
back to the visited stable outneighbor that lies furthest back in the walk.
Only the stable outneighbors of visited vertices are ever read, so the walk
never needs the full weight table.
"""

from __future__ import annotations

import math

from loguru import logger

from src.errors import DeadEndError, GraphValidationError, InvalidParamsError
from src.generators.rng import make_rng, uniform_choice
from src.graph.core import PhiFunction
from src.schemas.graph import Cycle, NiceWeightParams, WeightedDigraph
from src.schemas.results import DetectionResult


def detect_cycle(g: WeightedDigraph, seed: int, *, start: int | None = None) -> DetectionResult:
    """Run the randomized walk from a seeded (or forced) stable start vertex.

    Args:
        g: Graph to explore.
        seed: 64-bit seed; identical (graph, seed, start) gives an identical result.
        start: Optional forced start vertex in P_S. When omitted the start is
            drawn uniformly from P_S.

    Returns:
        The closed cycle (without Delta-parameters) and the full walk.

    Raises:
        DeadEndError: A visited vertex has no stable outneighbor at all.
        GraphValidationError: P_S is empty or ``start`` is not a stable vertex.
    """
    stable = g.stable_sorted
    if not stable:
        raise GraphValidationError("Cycle detection needs a nonempty stable set")
    rng = make_rng(seed)
    if start is None:
        current = uniform_choice(rng, stable)
    else:
        if not g.is_stable(start):
            raise GraphValidationError(f"Start vertex {start} is not stable")
        current = start

    walk = [current]
    position = {current: 0}
    while True:
        neighbors = g.stable_successors(current)
        if not neighbors:
            raise DeadEndError(current, walk)
        fresh = [u for u in neighbors if u not in position]
        if fresh:
            current = uniform_choice(rng, fresh)
            position[current] = len(walk)
            walk.append(current)
            continue
        # every stable outneighbor is visited: close to the earliest one
        closing_index = min(position[u] for u in neighbors)
        break

    cycle = Cycle(vertices=tuple(walk[closing_index:]))
    logger.debug("Detected cycle of length {} after walk of length {} (seed={})", cycle.length, len(walk), seed)
    return DetectionResult(cycle=cycle, walk_trace=tuple(walk), closing_index=closing_index)


def minimum_length_guarantee(g: WeightedDigraph, phi: PhiFunction) -> int:
    """floor(Phi(|P_S|)): lower bound on detected cycle length for nicely connected graphs."""
    return math.floor(phi(len(g.stable)))


def success_probability_bound(p: NiceWeightParams, phi_floor: int) -> float:
    """Lower bound on the probability that a detected cycle is Delta-contractive.

    ``1 - exp(-((alpha - beta) / (A + B))**2 * phi_floor / 2)``, evaluated with
    ``expm1`` for accuracy near zero.
    """
    if phi_floor < 0:
        raise InvalidParamsError(f"phi_floor must be non-negative, got {phi_floor}")
    if not (0 < p.beta < p.vertex_bound and p.alpha < p.beta and p.edge_bound > 0):
        raise InvalidParamsError(f"Invalid nice-weight parameters: {p}")
    ratio = (p.alpha - p.beta) / (p.edge_bound + p.vertex_bound)
    return -math.expm1(-0.5 * ratio * ratio * phi_floor)
