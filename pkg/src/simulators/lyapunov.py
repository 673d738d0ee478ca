"""Lyapunov certificates and sampling-based checks of their inequalities.

A certificate gives each subsystem i a function V_i with rate lambda_i and each
switch (i, j) a jump factor mu_ij. The checks sample states and inputs from
balls and test, pointwise:

- sandwich: alpha_lower(|x|) <= V_i(x) <= alpha_upper(|x|)
- decrease: V_i(f_i(x, v)) <= lambda_i V_i(x) + gamma_input(|v|) + gamma_output(|h_i(x)|)
- jump:     V_j(x) <= mu_ij V_i(x)

Nothing here is symbolic; sample counts, radius and seed are reported so any
counterexample can be reproduced.
"""

from __future__ import annotations

import math
from collections.abc import Callable

import numpy as np
from loguru import logger
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.errors import InvalidParamsError
from src.generators.rng import make_rng
from src.graph.core import gamma, validate_cycle
from src.schemas.graph import Cycle, Edge, WeightedDigraph
from src.schemas.results import CertificateReport, ContractionReport, InequalityCheck, KernelReport
from src.signals.synthesis import synthesize
from src.simulators.base import Subsystem
from src.simulators.switched import SwitchedSystem, simulate, zero_input


class PowerLaw(BaseModel):
    """Class-K descriptor r -> coeff * r**power (identically zero when coeff is 0)."""

    model_config = ConfigDict(frozen=True)

    coeff: float = Field(default=0.0, ge=0)
    power: float = Field(default=1.0, gt=0)

    def __call__(self, r: float) -> float:
        return self.coeff * r**self.power


class QuadraticForm:
    """V(x) = x^T P x for a symmetric positive semidefinite P."""

    def __init__(self, matrix: ArrayLike) -> None:
        p = np.atleast_2d(np.asarray(matrix, dtype=float))
        if p.shape[0] != p.shape[1] or not np.allclose(p, p.T):
            raise InvalidParamsError("Quadratic form needs a symmetric square matrix")
        if np.min(np.linalg.eigvalsh(p)) < -1e-12:
            raise InvalidParamsError("Quadratic form matrix is not positive semidefinite")
        self.matrix = p

    @classmethod
    def identity(cls, dim: int) -> QuadraticForm:
        return cls(np.eye(dim))

    @classmethod
    def diagonal(cls, weights: ArrayLike) -> QuadraticForm:
        return cls(np.diag(np.asarray(weights, dtype=float).reshape(-1)))

    def __call__(self, x: np.ndarray) -> float:
        return float(x @ self.matrix @ x)

    def __repr__(self) -> str:
        return f"QuadraticForm({self.matrix.tolist()})"


class LyapunovCertificate(BaseModel):
    """Per-subsystem functions and rates, per-switch jump factors, and class-K gains."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    functions: dict[int, Callable[[np.ndarray], float]]
    rates: dict[int, float]
    jumps: dict[Edge, float] = Field(default_factory=dict)
    stable: frozenset[int]
    gamma_input: PowerLaw = Field(default_factory=PowerLaw)
    gamma_output: PowerLaw = Field(default_factory=PowerLaw)
    alpha_lower: PowerLaw = Field(default_factory=PowerLaw)
    alpha_upper: PowerLaw | None = None

    @model_validator(mode="after")
    def _check_rates(self) -> LyapunovCertificate:
        if set(self.functions) != set(self.rates):
            raise InvalidParamsError("Certificate functions and rates must cover the same subsystems")
        if not self.stable <= set(self.rates):
            raise InvalidParamsError(f"Stable set {sorted(self.stable)} names unknown subsystems")
        for index, rate in self.rates.items():
            if index in self.stable and not 0 < rate < 1:
                raise InvalidParamsError(f"Stable subsystem {index} needs 0 < lambda < 1, got {rate}")
            if index not in self.stable and not rate > 1:
                raise InvalidParamsError(f"Unstable subsystem {index} needs lambda > 1, got {rate}")
        for (source, target), mu in self.jumps.items():
            if source not in self.rates or target not in self.rates:
                raise InvalidParamsError(f"Jump ({source}, {target}) names an unknown subsystem")
            if not mu >= 1:
                raise InvalidParamsError(f"Jump factor mu_{source}{target} must be >= 1, got {mu}")
        return self


def sample_ball(rng: np.random.Generator, n: int, dim: int, radius: float) -> np.ndarray:
    """``n`` points uniform in the closed Euclidean ball of ``radius`` in R^dim."""
    directions = rng.standard_normal((n, dim))
    norms = np.linalg.norm(directions, axis=1, keepdims=True)
    directions = np.divide(directions, norms, out=np.zeros_like(directions), where=norms > 0)
    radii = radius * rng.random(n) ** (1.0 / dim)
    return directions * radii[:, None]


class _Tally:
    """Running worst margin and first counterexample of one inequality."""

    def __init__(self, inequality: str, subject: str, rel_tol: float) -> None:
        self.inequality = inequality
        self.subject = subject
        self.rel_tol = rel_tol
        self.samples = 0
        self.violations = 0
        self.worst = math.inf
        self.counterexample: list[float] | None = None

    def add(self, margin: float, scale: float, point: np.ndarray) -> None:
        self.samples += 1
        self.worst = min(self.worst, margin)
        if margin < -self.rel_tol * max(1.0, scale):
            self.violations += 1
            if self.counterexample is None:
                self.counterexample = [float(value) for value in point]

    def result(self) -> InequalityCheck:
        return InequalityCheck(
            inequality=self.inequality,
            subject=self.subject,
            samples=self.samples,
            worst_margin=self.worst if self.samples else 0.0,
            violations=self.violations,
            counterexample=self.counterexample,
        )


def check_certificate(
    sys: SwitchedSystem,
    cert: LyapunovCertificate,
    g: WeightedDigraph,
    n_samples: int,
    seed: int,
    radius: float,
    *,
    input_radius: float | None = None,
    rel_tol: float = 1e-6,
) -> CertificateReport:
    """Sample the sandwich and decrease inequalities per subsystem and the jump inequality per edge.

    Draw order: for each subsystem ascending, states then inputs; then for
    each edge of ``g`` in sorted order, states. ``input_radius`` defaults to
    ``radius``; pass 0 to check the zero-input case only.

    Raises:
        InvalidParamsError: The certificate does not cover every subsystem and
            every edge, or the sample parameters are invalid.
    """
    if n_samples < 1 or radius <= 0:
        raise InvalidParamsError(f"Need n_samples >= 1 and radius > 0, got {n_samples}, {radius}")
    missing = set(sys.indices) - set(cert.functions)
    if missing:
        raise InvalidParamsError(f"Certificate misses subsystems {sorted(missing)}")
    missing_edges = [edge for edge in g.edges if edge not in cert.jumps]
    if missing_edges:
        raise InvalidParamsError(f"Certificate misses jump factors for edges {missing_edges}")
    input_radius = radius if input_radius is None else input_radius

    rng = make_rng(seed)
    checks: list[InequalityCheck] = []
    for index in sys.indices:
        sub = sys[index]
        value = cert.functions[index]
        states = sample_ball(rng, n_samples, sys.state_dim, radius)
        inputs = sample_ball(rng, n_samples, sys.input_dim, input_radius)
        sandwich = _Tally("sandwich", f"subsystem {index}", rel_tol)
        decrease = _Tally("decrease", f"subsystem {index}", rel_tol)
        for xi, eta in zip(states, inputs, strict=True):
            v_xi = value(xi)
            size = float(np.linalg.norm(xi))
            lower = cert.alpha_lower(size)
            margin, scale = v_xi - lower, max(abs(v_xi), abs(lower))
            if cert.alpha_upper is not None:
                upper = cert.alpha_upper(size)
                margin, scale = min(margin, upper - v_xi), max(scale, abs(upper))
            sandwich.add(margin, scale, xi)

            lhs = value(sub.update(xi, eta))
            rhs = (
                cert.rates[index] * v_xi
                + cert.gamma_input(float(np.linalg.norm(eta)))
                + cert.gamma_output(float(np.linalg.norm(sub.output(xi))))
            )
            decrease.add(rhs - lhs, max(abs(lhs), abs(rhs)), np.concatenate([xi, eta]))
        checks.extend([sandwich.result(), decrease.result()])

    for source, target in g.edges:
        jump = _Tally("jump", f"edge {source}->{target}", rel_tol)
        mu = cert.jumps[(source, target)]
        for xi in sample_ball(rng, n_samples, sys.state_dim, radius):
            lhs = cert.functions[target](xi)
            rhs = mu * cert.functions[source](xi)
            jump.add(rhs - lhs, max(abs(lhs), abs(rhs)), xi)
        checks.append(jump.result())

    report = CertificateReport(
        ok=all(check.violations == 0 for check in checks),
        n_samples=n_samples,
        radius=radius,
        seed=seed,
        checks=checks,
    )
    if not report.ok:
        logger.warning("Certificate check found {} violating samples (seed={})", report.violations, seed)
    return report


def check_kernel(sub: Subsystem, n_samples: int, seed: int, radius: float) -> KernelReport:
    """Check f(0, 0) = 0 and that no sampled nonzero state maps to zero under zero input."""
    zero_input_vector = np.zeros(sub.input_dim)
    origin_is_fixed = not np.any(sub.update(np.zeros(sub.state_dim), zero_input_vector))
    zero_found_at: list[float] | None = None
    for xi in sample_ball(make_rng(seed), n_samples, sub.state_dim, radius):
        if np.any(xi) and not np.any(sub.update(xi, zero_input_vector)):
            zero_found_at = [float(value) for value in xi]
            break
    return KernelReport(
        ok=origin_is_fixed and zero_found_at is None,
        origin_is_fixed=origin_is_fixed,
        samples=n_samples,
        zero_found_at=zero_found_at,
    )


def verify_period_contraction(
    sys: SwitchedSystem,
    cert: LyapunovCertificate,
    g: WeightedDigraph,
    c: Cycle,
    x0: ArrayLike,
    *,
    rel_tol: float = 1e-9,
) -> ContractionReport:
    """Simulate one period of the cycle's signal with zero input and compare V's ratio to exp(Gamma).

    The report is ``ok`` when the relative error is at most ``rel_tol``, or when
    ``x0`` is degenerate (zero state or zero Lyapunov value).
    """
    validate_cycle(g, c)
    gamma_value = gamma(g, c)
    expected = math.exp(gamma_value)
    x = np.asarray(x0, dtype=float).reshape(-1)
    value = cert.functions[c.vertices[0]]
    if not np.any(x) or value(x) == 0:
        return ContractionReport(
            ok=True, degenerate=True, period=c.period, gamma=gamma_value, expected_ratio=expected, rel_tol=rel_tol
        )

    signal = synthesize(c, dwell_window=g.dwell_window)
    traj = simulate(sys, signal, x, zero_input(sys.input_dim), c.period)
    ratio = value(traj.states[-1]) / value(x)
    relative_error = abs(ratio - expected) / expected
    logger.info("Period {} contraction ratio {:.6g} vs exp(Gamma) {:.6g}", c.period, ratio, expected)
    return ContractionReport(
        ok=relative_error <= rel_tol,
        degenerate=False,
        period=c.period,
        gamma=gamma_value,
        expected_ratio=expected,
        rel_tol=rel_tol,
        ratio=ratio,
        relative_error=relative_error,
    )


def exact_certificate(sys: SwitchedSystem, g: WeightedDigraph) -> LyapunovCertificate:
    """Zero-input certificate V_i = |x|^2, lambda_i = L_i^2, mu = 1 on every edge of ``g``.

    L_i is the subsystem's state gain. For scalar linear subsystems this is the
    exact rate a_i^2; for the other built-ins it is an upper bound. Inputs are
    not covered (gamma_input is zero), so check it with ``input_radius=0``.
    """
    return LyapunovCertificate(
        functions={i: QuadraticForm.identity(sys.state_dim) for i in sys.indices},
        rates={i: sys[i].state_gain() ** 2 for i in sys.indices},
        jumps=dict.fromkeys(g.edges, 1.0),
        stable=sys.stable_indices,
    )


def graph_from_certificate(
    cert: LyapunovCertificate, dwell_window: tuple[int, int], edges: list[Edge] | None = None
) -> WeightedDigraph:
    """Underlying weighted digraph: w(i) = ln lambda_i, w(i, j) = ln mu_ij.

    ``edges`` defaults to the certificate's jump pairs.
    """
    edges = sorted(cert.jumps) if edges is None else edges
    missing = [edge for edge in edges if edge not in cert.jumps]
    if missing:
        raise InvalidParamsError(f"No jump factor for edges {missing}")
    dwell_min, dwell_max = dwell_window
    return WeightedDigraph(
        stable=cert.stable,
        unstable=frozenset(cert.rates) - cert.stable,
        vertex_weights={i: math.log(rate) for i, rate in cert.rates.items()},
        edge_weights={edge: math.log(cert.jumps[edge]) for edge in edges},
        dwell_min=dwell_min,
        dwell_max=dwell_max,
    )
