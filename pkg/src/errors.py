"""Domain errors.

Every error carries a numeric ``code``; ranges are grouped per concern:
1000-1099 graph structure, 1100 cycles, 1200 detection, 1300 parameters,
1400 configuration, 1500 signals, 1600 simulation, 1700 graph/system files.
"""

from __future__ import annotations


class SwitchStabError(Exception):
    """Base class for all switchstab errors."""

    code: int = 1000

    def __init__(self, message: str, *, code: int | None = None) -> None:
        super().__init__(message)
        if code is not None:
            self.code = code


class GraphValidationError(SwitchStabError):
    """A weighted digraph violates its structural or weight invariants."""

    code = 1001


class UnknownVertexError(GraphValidationError):
    """A vertex id is not part of the graph."""

    code = 1010

    def __init__(self, vertex: int) -> None:
        super().__init__(f"Unknown vertex {vertex}")
        self.vertex = vertex


class InvalidCycleError(SwitchStabError):
    """A cycle is not valid in the graph (missing edge, repeated vertex, Delta out of window)."""

    code = 1100


class DeadEndError(SwitchStabError):
    """The randomized walk reached a vertex without any stable outneighbor."""

    code = 1200

    def __init__(self, vertex: int, walk: list[int]) -> None:
        super().__init__(f"Vertex {vertex} has no stable outneighbor (walk length {len(walk)})")
        self.vertex = vertex
        self.walk = walk


class InvalidParamsError(SwitchStabError):
    """Weight, bound or seed parameters violate their invariants."""

    code = 1300


class ConfigError(SwitchStabError):
    """Generator or experiment configuration is invalid."""

    code = 1400


class SignalError(SwitchStabError):
    """A switching signal cannot be built from the given cycle or schedule."""

    code = 1500


class SimulationError(SwitchStabError):
    """Simulation failed; ``t`` is the first offending time step when known."""

    code = 1600

    def __init__(self, message: str, *, t: int | None = None) -> None:
        super().__init__(message if t is None else f"{message} (t={t})")
        self.t = t


class GraphFileError(SwitchStabError):
    """A graph or system file cannot be loaded; ``line`` is 1-based."""

    code = 1700

    def __init__(self, message: str, *, path: str, line: int) -> None:
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line
