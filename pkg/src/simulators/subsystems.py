"""Built-in subsystem library: linear maps and a rational saturation."""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike

from src.errors import InvalidParamsError
from src.simulators.base import Subsystem


class LinearSubsystem(Subsystem):
    """x(t+1) = A x + B v, y = C x.

    The stability tag defaults to spectral radius of A below one.
    """

    def __init__(
        self,
        a: ArrayLike,
        b: ArrayLike | None = None,
        c: ArrayLike | None = None,
        *,
        stable: bool | None = None,
    ) -> None:
        a_matrix = np.atleast_2d(np.asarray(a, dtype=float))
        if a_matrix.shape[0] != a_matrix.shape[1]:
            raise InvalidParamsError(f"State matrix must be square, got shape {a_matrix.shape}")
        d = a_matrix.shape[0]
        b_matrix = np.eye(d) if b is None else np.asarray(b, dtype=float).reshape(d, -1)
        c_matrix = np.zeros((1, d)) if c is None else np.asarray(c, dtype=float).reshape(-1, d)
        if stable is None:
            stable = bool(np.max(np.abs(np.linalg.eigvals(a_matrix))) < 1.0)
        super().__init__(d, b_matrix.shape[1], c_matrix.shape[0], stable=stable)
        self.a = a_matrix
        self.b = b_matrix
        self.c = c_matrix

    @classmethod
    def scalar(cls, a: float, b: float = 1.0, c: float = 0.0, *, stable: bool | None = None) -> LinearSubsystem:
        """Scalar map x -> a x + b v with output c x."""
        return cls([[a]], [[b]], [[c]], stable=stable)

    @classmethod
    def diagonal(
        cls, entries: ArrayLike, b: float = 1.0, c: float = 0.0, *, stable: bool | None = None
    ) -> LinearSubsystem:
        """Diagonal map with input matrix b*I and output matrix c*I."""
        diag = np.asarray(entries, dtype=float).reshape(-1)
        eye = np.eye(diag.size)
        return cls(np.diag(diag), b * eye, c * eye, stable=stable)

    @property
    def is_linear(self) -> bool:
        return True

    def update(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        return self.a @ x + self.b @ v

    def output(self, x: np.ndarray) -> np.ndarray:
        return self.c @ x

    def state_gain(self) -> float:
        return float(np.linalg.norm(self.a, 2))


class SaturatingSubsystem(Subsystem):
    """Componentwise rational saturation x -> a * x / (1 + |x|) + b v, zero output.

    Stable when every |a_k| < 1, since |a x / (1 + |x|)| <= |a| |x|.
    """

    def __init__(self, gains: ArrayLike, input_gain: float = 1.0, *, stable: bool | None = None) -> None:
        self.gains = np.asarray(gains, dtype=float).reshape(-1)
        self.input_gain = float(input_gain)
        if stable is None:
            stable = bool(np.all(np.abs(self.gains) < 1.0))
        super().__init__(self.gains.size, self.gains.size, 1, stable=stable)

    def update(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        return self.gains * x / (1.0 + np.abs(x)) + self.input_gain * v

    def output(self, x: np.ndarray) -> np.ndarray:
        return np.zeros(1)

    def state_gain(self) -> float:
        return float(np.max(np.abs(self.gains)))
