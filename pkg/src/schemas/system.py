"""System file schema (JSON): built-in subsystems plus an optional certificate.

Example::

    {
      "subsystems": [
        {"id": 0, "kind": "scalar", "a": 0.5, "b": 1.0},
        {"id": 1, "kind": "diagonal", "a": [0.5, 1.4], "stable": false},
        {"id": 2, "kind": "saturating", "a": [0.8, 0.3]}
      ],
      "certificate": {
        "rates": {"0": 0.25, "1": 1.96, "2": 0.64},
        "jumps": [{"from": 0, "to": 1, "mu": 1.0}],
        "gamma_input": {"coeff": 2.0, "power": 2.0}
      }
    }
"""

from __future__ import annotations

from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field

from src.schemas.graph import VertexId


class _SubsystemSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: VertexId
    stable: bool | None = None  # inferred from the map when omitted


class ScalarSpec(_SubsystemSpec):
    """x -> a x + b v, y = c x."""

    kind: Literal["scalar"]
    a: float
    b: float = 1.0
    c: float = 0.0


class DiagonalSpec(_SubsystemSpec):
    """x -> diag(a) x + b v, y = c x."""

    kind: Literal["diagonal"]
    a: list[float] = Field(min_length=1)
    b: float = 1.0
    c: float = 0.0


class LinearSpec(_SubsystemSpec):
    """x -> A x + B v, y = C x with explicit matrices."""

    kind: Literal["linear"]
    a: list[list[float]] = Field(min_length=1)
    b: list[list[float]] | None = None
    c: list[list[float]] | None = None


class SaturatingSpec(_SubsystemSpec):
    """x -> a * x / (1 + |x|) + b v componentwise, zero output."""

    kind: Literal["saturating"]
    a: list[float] = Field(min_length=1)
    b: float = 1.0


SubsystemSpec = Annotated[ScalarSpec | DiagonalSpec | LinearSpec | SaturatingSpec, Field(discriminator="kind")]


class PowerLawSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    coeff: float = Field(ge=0)
    power: float = Field(gt=0)


class JumpSpec(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    source: VertexId = Field(alias="from")
    target: VertexId = Field(alias="to")
    mu: float


class CertificateSpec(BaseModel):
    """Quadratic certificate; ``weights`` gives diag(P_i) per subsystem, identity when omitted."""

    model_config = ConfigDict(extra="forbid")

    rates: dict[int, float]
    weights: dict[int, list[float]] = Field(default_factory=dict)
    jumps: list[JumpSpec] = Field(default_factory=list)
    gamma_input: PowerLawSpec | None = None
    gamma_output: PowerLawSpec | None = None
    alpha_lower: PowerLawSpec | None = None
    alpha_upper: PowerLawSpec | None = None


class SystemFile(BaseModel):
    """Raw system file document."""

    model_config = ConfigDict(extra="forbid")

    subsystems: list[SubsystemSpec] = Field(min_length=1)
    certificate: CertificateSpec | None = None
