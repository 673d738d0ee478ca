"""Base subsystem ABC for the family of discrete-time systems."""

from __future__ import annotations

from abc import ABC, abstractmethod

import numpy as np


class Subsystem(ABC):
    """One member x(t+1) = f_i(x(t), v(t)), y(t) = h_i(x(t)) of the family.

    Concrete subsystems must satisfy f_i(0, 0) = 0.
    """

    def __init__(self, state_dim: int, input_dim: int, output_dim: int, *, stable: bool) -> None:
        self._state_dim = state_dim
        self._input_dim = input_dim
        self._output_dim = output_dim
        self._stable = stable

    @property
    def state_dim(self) -> int:
        """State dimension d."""
        return self._state_dim

    @property
    def input_dim(self) -> int:
        """Input dimension m."""
        return self._input_dim

    @property
    def output_dim(self) -> int:
        """Output dimension p."""
        return self._output_dim

    @property
    def stable(self) -> bool:
        """Stability tag (member of P_S)."""
        return self._stable

    @property
    def is_linear(self) -> bool:
        """Whether f_i(x, v) is linear in (x, v)."""
        return False

    @abstractmethod
    def update(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Next state f_i(x, v)."""
        ...

    @abstractmethod
    def output(self, x: np.ndarray) -> np.ndarray:
        """Output h_i(x)."""
        ...

    @abstractmethod
    def state_gain(self) -> float:
        """Bound L with ||f_i(x, 0)|| <= L ||x|| for all x."""
        ...
