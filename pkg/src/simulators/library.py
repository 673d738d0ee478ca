"""Building systems from system files, plus the certified example systems."""

from __future__ import annotations

import json
from pathlib import Path

from loguru import logger
from pydantic import ValidationError

from src.errors import GraphFileError, SwitchStabError
from src.graph.io import locate_line
from src.schemas.system import (
    CertificateSpec,
    DiagonalSpec,
    LinearSpec,
    PowerLawSpec,
    ScalarSpec,
    SubsystemSpec,
    SystemFile,
)
from src.simulators.base import Subsystem
from src.simulators.lyapunov import LyapunovCertificate, PowerLaw, QuadraticForm
from src.simulators.subsystems import LinearSubsystem, SaturatingSubsystem
from src.simulators.switched import SwitchedSystem


def build_subsystem(spec: SubsystemSpec) -> Subsystem:
    """Instantiate the built-in subsystem a file entry describes."""
    match spec:
        case ScalarSpec():
            return LinearSubsystem.scalar(spec.a, spec.b, spec.c, stable=spec.stable)
        case DiagonalSpec():
            return LinearSubsystem.diagonal(spec.a, spec.b, spec.c, stable=spec.stable)
        case LinearSpec():
            return LinearSubsystem(spec.a, spec.b, spec.c, stable=spec.stable)
        case _:
            return SaturatingSubsystem(spec.a, spec.b, stable=spec.stable)


def build_certificate(spec: CertificateSpec, sys: SwitchedSystem) -> LyapunovCertificate:
    """Quadratic certificate over the system's subsystems; the stable set follows their tags."""

    def power_law(part: PowerLawSpec | None) -> PowerLaw:
        return PowerLaw() if part is None else PowerLaw(coeff=part.coeff, power=part.power)

    functions = {
        i: QuadraticForm.diagonal(spec.weights[i]) if i in spec.weights else QuadraticForm.identity(sys.state_dim)
        for i in spec.rates
    }
    return LyapunovCertificate(
        functions=functions,
        rates=spec.rates,
        jumps={(jump.source, jump.target): jump.mu for jump in spec.jumps},
        stable=sys.stable_indices & frozenset(spec.rates),
        gamma_input=power_law(spec.gamma_input),
        gamma_output=power_law(spec.gamma_output),
        alpha_lower=power_law(spec.alpha_lower),
        alpha_upper=None if spec.alpha_upper is None else power_law(spec.alpha_upper),
    )


def load_system(path: str | Path) -> tuple[SwitchedSystem, LyapunovCertificate | None]:
    """Load a system file; errors carry the 1-based line of the first problem."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFileError(f"Invalid JSON: {exc.msg}", path=str(path), line=exc.lineno) from exc
    try:
        document = SystemFile.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        loc = tuple(first["loc"])
        raise GraphFileError(
            f"{'.'.join(str(part) for part in loc) or 'document'}: {first['msg']}",
            path=str(path),
            line=locate_line(text, _json_loc(loc)),
        ) from exc

    ids = [spec.id for spec in document.subsystems]
    if len(set(ids)) != len(ids):
        raise GraphFileError(f"Duplicate subsystem ids {ids}", path=str(path), line=locate_line(text, ("subsystems",)))
    try:
        sys = SwitchedSystem({spec.id: build_subsystem(spec) for spec in document.subsystems})
        cert = None if document.certificate is None else build_certificate(document.certificate, sys)
    except SwitchStabError as exc:
        raise GraphFileError(str(exc), path=str(path), line=1) from exc
    logger.info("Loaded system {} ({} subsystems, certificate={})", path, len(sys), cert is not None)
    return sys, cert


def _json_loc(loc: tuple[object, ...]) -> tuple[object, ...]:
    # tagged-union errors insert the tag name after the list index
    return tuple(part for part in loc if part not in ("scalar", "diagonal", "linear", "saturating"))


# --- Certified examples ---


def young_example() -> tuple[SwitchedSystem, LyapunovCertificate]:
    """x -> 0.5 x + v with V = x^2, lambda = 0.5, gamma_input(r) = 2 r^2.

    (0.5x + v)^2 <= 0.5 x^2 + 2 v^2 because the difference is (0.5x - v)^2.
    """
    sys = SwitchedSystem({0: LinearSubsystem.scalar(0.5, 1.0)})
    cert = LyapunovCertificate(
        functions={0: QuadraticForm.identity(1)},
        rates={0: 0.5},
        stable=frozenset({0}),
        gamma_input=PowerLaw(coeff=2.0, power=2.0),
    )
    return sys, cert


def two_scalar_example(a0: float = 0.5, a1: float = 0.6) -> tuple[SwitchedSystem, LyapunovCertificate]:
    """Two stable scalar maps x -> a_i x with V = x^2, lambda_i = a_i^2 and mu = 1 both ways."""
    sys = SwitchedSystem({0: LinearSubsystem.scalar(a0, 1.0), 1: LinearSubsystem.scalar(a1, 1.0)})
    cert = LyapunovCertificate(
        functions={0: QuadraticForm.identity(1), 1: QuadraticForm.identity(1)},
        rates={0: a0 * a0, 1: a1 * a1},
        jumps={(0, 1): 1.0, (1, 0): 1.0},
        stable=frozenset({0, 1}),
    )
    return sys, cert
