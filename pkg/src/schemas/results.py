"""Report and result schemas.

Check-style operations never raise for a failed check: they return one of
these models with ``ok`` set and the violations listed.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field, computed_field

from src.schemas.graph import Cycle

# --- Graph weight checks ---


class WeightViolation(BaseModel):
    """A single vertex or edge that breaks a nice-weight bound."""

    subject: str  # "vertex 3" or "edge 0->1"
    value: float
    bound: str


class NiceWeightReport(BaseModel):
    """Outcome of the nice Delta-weight boundedness checks on one instance."""

    ok: bool
    delta_in_window: bool
    checked_vertices: int
    checked_edges: int
    vertex_violations: list[WeightViolation] = Field(default_factory=list)
    edge_violations: list[WeightViolation] = Field(default_factory=list)


# --- Cycle detection ---


class DetectionResult(BaseModel):
    """Cycle closed by the randomized walk plus the walk that led to it.

    ``walk_trace`` is the full walk v_0..v_k visited before closure; the cycle
    is its suffix starting at ``closing_index``.
    """

    cycle: Cycle
    walk_trace: tuple[int, ...]
    closing_index: int

    @property
    def discarded_prefix(self) -> tuple[int, ...]:
        """Walk vertices v_0..v_{i-1} that are not part of the cycle."""
        return self.walk_trace[: self.closing_index]


# --- Signals ---


class AdmissibilityReport(BaseModel):
    """Switches and dwells that break admissibility over a horizon."""

    ok: bool
    horizon: int
    switches_checked: int
    bad_switches: list[tuple[int, int, int]] = Field(default_factory=list)  # (tau, from, to)
    bad_dwells: list[tuple[int, int, int]] = Field(default_factory=list)  # (tau, vertex, dwell)


# --- Lyapunov checks ---


class InequalityCheck(BaseModel):
    """Sampled check of one Lyapunov inequality for one subsystem or edge.

    ``worst_margin`` is min(rhs - lhs) over the samples; a violation is a
    sample whose margin is below ``-tolerance * max(1, |rhs|)``.
    """

    inequality: Literal["sandwich", "decrease", "jump"]
    subject: str
    samples: int
    worst_margin: float
    violations: int = 0
    counterexample: list[float] | None = None


class CertificateReport(BaseModel):
    """Aggregate of all inequality checks for a certificate."""

    ok: bool
    n_samples: int
    radius: float
    seed: int
    checks: list[InequalityCheck] = Field(default_factory=list)

    @property
    def violations(self) -> int:
        """Total violating samples across all checks."""
        return sum(check.violations for check in self.checks)


class KernelReport(BaseModel):
    """Sampling check that the origin is the unique zero of f_i(., 0)."""

    ok: bool
    origin_is_fixed: bool
    samples: int
    zero_found_at: list[float] | None = None


class ContractionReport(BaseModel):
    """One-period Lyapunov ratio V(x(Delta_W)) / V(x(0)) against exp(Gamma)."""

    ok: bool
    degenerate: bool
    period: int
    gamma: float
    expected_ratio: float
    rel_tol: float
    ratio: float | None = None
    relative_error: float | None = None


class BoundedResponseReport(BaseModel):
    """Sup-norm of the state against constant input levels, with an affine fit.

    The fit ``sup_state ~ offset + gain * level`` is reported, not asserted.
    """

    levels: list[float]
    sup_states: list[float]
    offset: float
    gain: float
    horizon: int


# --- Experiment ---


class LengthRow(BaseModel):
    """One experiment row: a fixed cycle, its resampled trials and the probability bound."""

    requested: int
    status: Literal["exact", "nearest", "unreachable"]
    achieved: int | None = None
    cycle: tuple[int, ...] | None = None
    trials: int = 0
    contractive: int = 0
    theoretical_bound: float
    seconds: float = 0.0

    @computed_field  # type: ignore[prop-decorator]
    @property
    def empirical_prob(self) -> float:
        """Fraction of trials with a strictly negative statistic."""
        return self.contractive / self.trials if self.trials else 0.0


class ExperimentResult(BaseModel):
    """Rows of a Monte Carlo contractivity experiment."""

    phi_floor: int
    statistic: Literal["gamma", "xn"]
    master_seed: int
    detections: int
    dead_ends: int
    rows: list[LengthRow] = Field(default_factory=list)
