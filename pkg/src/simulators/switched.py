"""Switched system x(t+1) = f_sigma(t)(x(t), v(t)), y(t) = h_sigma(t)(x(t)), and trajectory checks."""

from __future__ import annotations

import csv
from collections.abc import Callable, Mapping, Sequence
from pathlib import Path

import numpy as np
from loguru import logger
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict

from src.errors import GraphValidationError, InvalidParamsError, SimulationError
from src.schemas.graph import WeightedDigraph
from src.schemas.results import BoundedResponseReport
from src.signals.synthesis import BaseSignal
from src.simulators.base import Subsystem

InputFunction = Callable[[int], ArrayLike]
LyapunovFunction = Callable[[np.ndarray], float]


class SwitchedSystem:
    """Family of subsystems indexed by vertex id, sharing state, input and output dimensions."""

    def __init__(self, subsystems: Mapping[int, Subsystem]) -> None:
        if not subsystems:
            raise InvalidParamsError("A switched system needs at least one subsystem")
        self._subsystems = dict(sorted(subsystems.items()))
        first = next(iter(self._subsystems.values()))
        for index, sub in self._subsystems.items():
            dims = (sub.state_dim, sub.input_dim, sub.output_dim)
            if dims != (first.state_dim, first.input_dim, first.output_dim):
                raise InvalidParamsError(f"Subsystem {index} has dimensions {dims}, expected those of the first")
        self.state_dim = first.state_dim
        self.input_dim = first.input_dim
        self.output_dim = first.output_dim

    def __getitem__(self, index: int) -> Subsystem:
        try:
            return self._subsystems[index]
        except KeyError:
            raise SimulationError(f"No subsystem with index {index}") from None

    def __len__(self) -> int:
        return len(self._subsystems)

    @property
    def indices(self) -> tuple[int, ...]:
        """Subsystem ids in ascending order."""
        return tuple(self._subsystems)

    @property
    def stable_indices(self) -> frozenset[int]:
        """Ids of the subsystems tagged stable."""
        return frozenset(i for i, sub in self._subsystems.items() if sub.stable)

    @property
    def is_linear(self) -> bool:
        """Whether every subsystem is linear."""
        return all(sub.is_linear for sub in self._subsystems.values())

    def require_matches(self, g: WeightedDigraph) -> None:
        """Raise unless the subsystem ids and stability tags match the graph's vertices."""
        if set(self.indices) != set(g.vertices):
            raise GraphValidationError(f"System indices {list(self.indices)} do not match graph vertices")
        if self.stable_indices != g.stable:
            raise GraphValidationError("Subsystem stability tags do not match the graph's stable set")


class Trajectory(BaseModel):
    """Recorded run: states x(0..T), outputs y(0..T), active indices sigma(0..T), inputs v(0..T-1)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    states: np.ndarray
    outputs: np.ndarray
    active: np.ndarray
    inputs: np.ndarray

    @property
    def horizon(self) -> int:
        return len(self.inputs)


def zero_input(input_dim: int) -> InputFunction:
    """v(t) = 0."""
    zero = np.zeros(input_dim)
    return lambda t: zero


def constant_input(value: ArrayLike) -> InputFunction:
    """v(t) = value for every t."""
    constant = np.asarray(value, dtype=float).reshape(-1)
    return lambda t: constant


def recorded_input(inputs: Sequence[ArrayLike]) -> InputFunction:
    """Replay a recorded input sequence; t beyond it raises ``SimulationError``."""
    rows = [np.asarray(v, dtype=float).reshape(-1) for v in inputs]

    def lookup(t: int) -> np.ndarray:
        if t >= len(rows):
            raise SimulationError("Recorded input exhausted", t=t)
        return rows[t]

    return lookup


def simulate(
    sys: SwitchedSystem, sig: BaseSignal, x0: ArrayLike, input_fn: InputFunction, horizon: int
) -> Trajectory:
    """Iterate the switched system for t = 0..horizon-1.

    Raises:
        SimulationError: Bad horizon or dimensions, an index the system lacks,
            or the first non-finite state (with its time step).
    """
    if horizon < 1:
        raise SimulationError(f"Horizon must be at least 1, got {horizon}")
    x = np.asarray(x0, dtype=float).reshape(-1)
    if x.size != sys.state_dim:
        raise SimulationError(f"Initial state has dimension {x.size}, expected {sys.state_dim}")
    if not np.all(np.isfinite(x)):
        raise SimulationError("Initial state is not finite", t=0)

    states = np.empty((horizon + 1, sys.state_dim))
    outputs = np.empty((horizon + 1, sys.output_dim))
    inputs = np.empty((horizon, sys.input_dim))
    active = np.fromiter(sig.values(horizon), dtype=np.int64, count=horizon + 1)
    states[0] = x

    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(horizon):
            sub = sys[int(active[t])]
            v = np.asarray(input_fn(t), dtype=float).reshape(-1)
            if v.size != sys.input_dim:
                raise SimulationError(f"Input has dimension {v.size}, expected {sys.input_dim}", t=t)
            inputs[t] = v
            outputs[t] = sub.output(states[t])
            states[t + 1] = sub.update(states[t], v)
            if not np.all(np.isfinite(states[t + 1])):
                raise SimulationError("Non-finite state", t=t + 1)
        outputs[horizon] = sys[int(active[horizon])].output(states[horizon])

    logger.debug("Simulated {} steps of {}", horizon, sig.describe())
    return Trajectory(states=states, outputs=outputs, active=active, inputs=inputs)


def check_gas_decay(
    sys: SwitchedSystem,
    sig: BaseSignal,
    x0: ArrayLike,
    horizon: int,
    eps: float,
    *,
    lyapunov: LyapunovFunction | None = None,
    measure: str = "norm",
) -> bool:
    """Zero-input decay check for linear families.

    True iff the final size is at most ``eps`` times the initial one and the
    Lyapunov value sampled at every period start strictly decreases. The size
    is ``||x||`` when ``measure="norm"`` and the Lyapunov value itself when
    ``measure="lyapunov"``. The Lyapunov function defaults to ``||x||^2``.
    """
    if not sys.is_linear:
        raise SimulationError("Decay check needs linear subsystems")
    if measure not in ("norm", "lyapunov"):
        raise InvalidParamsError(f"Unknown decay measure {measure!r}")
    x = np.asarray(x0, dtype=float).reshape(-1)
    if not np.any(x):
        return True
    value = lyapunov if lyapunov is not None else (lambda state: float(state @ state))
    traj = simulate(sys, sig, x, zero_input(sys.input_dim), horizon)

    for k in range(horizon // sig.period):
        before = value(traj.states[k * sig.period])
        after = value(traj.states[(k + 1) * sig.period])
        if before == 0:
            break
        if after / before >= 1:
            logger.info("Period {} did not contract: ratio {}", k, after / before)
            return False

    if measure == "norm":
        return bool(np.linalg.norm(traj.states[-1]) <= eps * np.linalg.norm(x))
    return value(traj.states[-1]) <= eps * value(x)


def check_bounded_response(
    sys: SwitchedSystem, sig: BaseSignal, x0: ArrayLike, levels: Sequence[float], horizon: int
) -> BoundedResponseReport:
    """Sup-norm of the state under constant inputs with ||v|| equal to each level.

    The affine fit ``sup ~ offset + gain * level`` is least squares; with a
    single level the gain is zero and the offset is that level's sup.
    """
    if not levels:
        raise InvalidParamsError("Need at least one input level")
    direction = np.ones(sys.input_dim) / np.sqrt(sys.input_dim)
    sups: list[float] = []
    for level in levels:
        traj = simulate(sys, sig, x0, constant_input(level * direction), horizon)
        sups.append(float(np.max(np.linalg.norm(traj.states, axis=1))))

    if len(set(levels)) >= 2:
        gain, offset = np.polyfit(np.asarray(levels, dtype=float), np.asarray(sups), 1)
    else:
        gain, offset = 0.0, sups[0]
    logger.info("Bounded response: sup ~ {:.4g} + {:.4g} * level over {} levels", offset, gain, len(levels))
    return BoundedResponseReport(
        levels=[float(level) for level in levels],
        sup_states=sups,
        offset=float(offset),
        gain=float(gain),
        horizon=horizon,
    )


def write_trajectory_csv(traj: Trajectory, path: str | Path) -> None:
    """Write rows ``t,sigma,x_1..x_d,y_1..y_p`` for t in [0, T]."""
    path = Path(path)
    state_dim = traj.states.shape[1]
    output_dim = traj.outputs.shape[1]
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(
            ["t", "sigma", *(f"x_{k + 1}" for k in range(state_dim)), *(f"y_{k + 1}" for k in range(output_dim))]
        )
        for t, (sigma, state, out) in enumerate(zip(traj.active, traj.states, traj.outputs, strict=True)):
            writer.writerow([t, int(sigma), *(repr(float(value)) for value in (*state, *out))])
    logger.info("Wrote trajectory of {} steps to {}", traj.horizon, path)
