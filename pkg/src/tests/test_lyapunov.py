"""Tests for Lyapunov certificates, sampled inequality checks and per-period contraction."""

from __future__ import annotations

import math

import numpy as np
import pytest

from src.errors import InvalidCycleError, InvalidParamsError
from src.generators.rng import make_rng
from src.schemas.graph import Cycle, WeightedDigraph
from src.simulators.base import Subsystem
from src.simulators.library import two_scalar_example, young_example
from src.simulators.lyapunov import (
    LyapunovCertificate,
    PowerLaw,
    QuadraticForm,
    check_certificate,
    check_kernel,
    exact_certificate,
    graph_from_certificate,
    sample_ball,
    verify_period_contraction,
)
from src.simulators.subsystems import LinearSubsystem, SaturatingSubsystem
from src.simulators.switched import SwitchedSystem

TwoScalar = tuple[SwitchedSystem, LyapunovCertificate, WeightedDigraph]


class DeadZone(Subsystem):
    """x -> sign(x) * max(|x| - 1, 0): every state in [-1, 1] maps to zero."""

    def __init__(self) -> None:
        super().__init__(1, 1, 1, stable=True)

    def update(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        return np.sign(x) * np.maximum(np.abs(x) - 1.0, 0.0) + v

    def output(self, x: np.ndarray) -> np.ndarray:
        return np.zeros(1)

    def state_gain(self) -> float:
        return 1.0


def young_graph() -> WeightedDigraph:
    _, cert = young_example()
    return graph_from_certificate(cert, (1, 1))


class TestPowerLawAndQuadraticForm:
    """Gain descriptors and quadratic Lyapunov functions."""

    def test_power_law(self) -> None:
        """Verify coeff * r^power and the zero default."""
        assert PowerLaw(coeff=2.0, power=2.0)(3.0) == 18.0
        assert PowerLaw()(5.0) == 0.0

    def test_quadratic_form(self) -> None:
        """Verify x^T P x for a diagonal P."""
        form = QuadraticForm.diagonal([1.0, 4.0])
        assert form(np.array([1.0, 0.5])) == 2.0

    @pytest.mark.parametrize("matrix", [[[1.0, 2.0], [0.0, 1.0]], [[1.0, 0.0], [0.0, -1.0]], [[1.0, 0.0]]])
    def test_invalid_matrix(self, matrix: list[list[float]]) -> None:
        """Verify asymmetric, indefinite and non-square matrices are rejected."""
        with pytest.raises(InvalidParamsError):
            QuadraticForm(matrix)


class TestCertificateInvariants:
    """Rates and jump factors."""

    @pytest.mark.parametrize(
        ("rates", "stable", "message"),
        [
            ({0: 1.0}, {0}, "0 < lambda < 1"),
            ({0: 0.0}, {0}, "0 < lambda < 1"),
            ({0: 0.9}, set(), "lambda > 1"),
        ],
    )
    def test_rates(self, rates: dict[int, float], stable: set[int], message: str) -> None:
        """Verify rates must match each subsystem's stability."""
        with pytest.raises(InvalidParamsError, match=message):
            LyapunovCertificate(functions={0: QuadraticForm.identity(1)}, rates=rates, stable=frozenset(stable))

    def test_jump_below_one(self) -> None:
        """Verify jump factors below 1 are rejected."""
        with pytest.raises(InvalidParamsError, match=">= 1"):
            LyapunovCertificate(
                functions={0: QuadraticForm.identity(1), 1: QuadraticForm.identity(1)},
                rates={0: 0.5, 1: 0.5},
                jumps={(0, 1): 0.9},
                stable=frozenset({0, 1}),
            )

    def test_functions_and_rates_must_match(self) -> None:
        """Verify functions and rates cover the same subsystems."""
        with pytest.raises(InvalidParamsError, match="same subsystems"):
            LyapunovCertificate(functions={0: QuadraticForm.identity(1)}, rates={0: 0.5, 1: 0.5}, stable=frozenset())


class TestSampleBall:
    """Uniform samples in a Euclidean ball."""

    def test_inside_radius(self) -> None:
        """Verify every sample lies inside the ball."""
        points = sample_ball(make_rng(3), 5000, 3, 2.0)
        assert points.shape == (5000, 3)
        assert np.all(np.linalg.norm(points, axis=1) <= 2.0 + 1e-12)

    def test_radius_distribution(self) -> None:
        """In R^2 the fraction inside half the radius is 1/4."""
        points = sample_ball(make_rng(4), 20_000, 2, 1.0)
        inner = np.mean(np.linalg.norm(points, axis=1) <= 0.5)
        assert 0.23 <= inner <= 0.27


class TestCheckCertificate:
    """Sampled sandwich, decrease and jump inequalities."""

    def test_young_example_holds(self) -> None:
        """(0.5x + v)^2 <= 0.5 x^2 + 2 v^2 for every sample."""
        sys, cert = young_example()
        report = check_certificate(sys, cert, young_graph(), 100_000, seed=1, radius=1e3)
        assert report.ok
        assert report.violations == 0
        assert [check.inequality for check in report.checks] == ["sandwich", "decrease"]

    def test_young_example_holds_at_large_radius(self) -> None:
        """Verify the quadratic bound still holds far from the origin."""
        sys, cert = young_example()
        assert check_certificate(sys, cert, young_graph(), 2000, seed=2, radius=1e6).ok

    def test_too_small_rate_is_caught(self) -> None:
        """lambda = 0.2 with no input gain fails at any x != 0 with v = 0."""
        sys, _ = young_example()
        cert = LyapunovCertificate(functions={0: QuadraticForm.identity(1)}, rates={0: 0.2}, stable=frozenset({0}))
        report = check_certificate(sys, cert, young_graph(), 100, seed=3, radius=10.0, input_radius=0.0)
        decrease = next(check for check in report.checks if check.inequality == "decrease")
        assert report.ok is False
        assert decrease.violations > 0
        assert decrease.worst_margin < 0
        assert decrease.counterexample is not None
        assert decrease.counterexample[1] == 0.0

    def test_identical_functions_jump_with_equality(self, two_scalar: TwoScalar) -> None:
        """Verify mu = 1 between identical functions passes with zero margin."""
        sys, cert, g = two_scalar
        report = check_certificate(sys, cert, g, 500, seed=4, radius=1e6, input_radius=0.0)
        jumps = [check for check in report.checks if check.inequality == "jump"]
        assert report.ok
        assert [check.subject for check in jumps] == ["edge 0->1", "edge 1->0"]
        assert all(check.worst_margin == 0.0 for check in jumps)

    def test_report_is_reproducible_from_seed(self) -> None:
        """Verify the same seed gives the same report."""
        sys, _ = young_example()
        cert = LyapunovCertificate(functions={0: QuadraticForm.identity(1)}, rates={0: 0.2}, stable=frozenset({0}))
        first = check_certificate(sys, cert, young_graph(), 200, seed=9, radius=5.0)
        assert first == check_certificate(sys, cert, young_graph(), 200, seed=9, radius=5.0)

    def test_missing_jump_factor(self, two_scalar: TwoScalar) -> None:
        """Verify a graph edge without a jump factor is rejected."""
        sys, cert, _ = two_scalar
        g = WeightedDigraph(
            stable=frozenset({0, 1, 2}),
            vertex_weights={0: -1.0, 1: -1.0, 2: -1.0},
            edge_weights={(0, 1): 0.0, (1, 2): 0.0},
        )
        with pytest.raises(InvalidParamsError):
            check_certificate(sys, cert, g, 10, seed=0, radius=1.0)

    def test_missing_subsystem(self, two_scalar: TwoScalar) -> None:
        """Verify a subsystem without a Lyapunov function is rejected."""
        _, cert, g = two_scalar
        sys = SwitchedSystem({i: LinearSubsystem.scalar(0.5) for i in range(3)})
        with pytest.raises(InvalidParamsError, match="misses subsystems"):
            check_certificate(sys, cert, g, 10, seed=0, radius=1.0)


class TestCheckKernel:
    """The origin is the only zero of f_i(., 0)."""

    @pytest.mark.parametrize(
        "sub",
        [LinearSubsystem.scalar(0.5), LinearSubsystem.diagonal([0.5, 1.5]), SaturatingSubsystem([0.8, -0.3])],
    )
    def test_builtin_subsystems(self, sub: Subsystem) -> None:
        """Verify built-in subsystems vanish only at the origin."""
        report = check_kernel(sub, 1000, seed=5, radius=10.0)
        assert report.ok
        assert report.zero_found_at is None

    def test_dead_zone_has_nonzero_zeros(self) -> None:
        """Verify a dead zone map is caught with a nonzero zero."""
        report = check_kernel(DeadZone(), 1000, seed=6, radius=10.0)
        assert report.origin_is_fixed is True
        assert report.ok is False
        assert report.zero_found_at is not None
        assert abs(report.zero_found_at[0]) <= 1.0


class TestVerifyPeriodContraction:
    """V ratio over one period against exp(Gamma)."""

    @pytest.mark.parametrize(("deltas", "expected"), [((1, 1), 0.09), ((2, 2), 0.0081), ((1, 2), 0.25 * 0.36**2)])
    def test_scalar_exact_certificate(self, two_scalar: TwoScalar, deltas: tuple[int, int], expected: float) -> None:
        """Verify the one-period ratio equals exp(Gamma) for scalar maps."""
        sys, cert, g = two_scalar
        report = verify_period_contraction(sys, cert, g, Cycle(vertices=(0, 1), delta_params=deltas), [1.0])
        assert report.degenerate is False
        assert report.period == sum(deltas)
        assert report.ratio == pytest.approx(expected, rel=1e-9)
        assert report.expected_ratio == pytest.approx(expected, rel=1e-9)
        assert report.relative_error is not None
        assert report.relative_error < 1e-9
        assert report.ok is True

    def test_gamma_is_sum_of_log_rates(self, two_scalar: TwoScalar) -> None:
        """Verify Gamma is ln 0.25 + ln 0.36 for unit dwells."""
        sys, cert, g = two_scalar
        report = verify_period_contraction(sys, cert, g, Cycle(vertices=(0, 1), delta_params=(1, 1)), [-3.0])
        assert report.gamma == pytest.approx(math.log(0.25) + math.log(0.36), rel=1e-12)

    def test_zero_state_is_degenerate(self, two_scalar: TwoScalar) -> None:
        """Verify a zero initial state is reported as degenerate."""
        sys, cert, g = two_scalar
        report = verify_period_contraction(sys, cert, g, Cycle(vertices=(0, 1), delta_params=(1, 1)), [0.0])
        assert report.degenerate is True
        assert report.ok is True
        assert report.ratio is None

    def test_loose_rates_miss_the_tolerance(self, two_scalar: TwoScalar) -> None:
        """Verify rates above a^2 give a ratio 0.09 against exp(Gamma) = 0.12."""
        sys, cert, _ = two_scalar
        loose = LyapunovCertificate(
            functions=cert.functions, rates={0: 0.3, 1: 0.4}, jumps=cert.jumps, stable=cert.stable
        )
        g = graph_from_certificate(loose, (1, 2))
        cycle = Cycle(vertices=(0, 1), delta_params=(1, 1))
        report = verify_period_contraction(sys, loose, g, cycle, [1.0])
        assert report.ok is False
        assert report.relative_error == pytest.approx(0.25, rel=1e-9)
        assert verify_period_contraction(sys, loose, g, cycle, [1.0], rel_tol=0.3).ok is True

    def test_delta_outside_window(self, two_scalar: TwoScalar) -> None:
        """Verify a Delta-parameter outside the window is rejected."""
        sys, cert, g = two_scalar
        with pytest.raises(InvalidCycleError):
            verify_period_contraction(sys, cert, g, Cycle(vertices=(0, 1), delta_params=(3, 1)), [1.0])


class TestExactCertificate:
    """V = |x|^2 with rates from the state gain."""

    def test_scalar_rates(self, two_scalar: TwoScalar) -> None:
        """Verify scalar rates are a^2 with unit jumps."""
        sys, _, g = two_scalar
        cert = exact_certificate(sys, g)
        assert cert.rates == pytest.approx({0: 0.25, 1: 0.36})
        assert cert.jumps == {(0, 1): 1.0, (1, 0): 1.0}

    def test_mixed_family_passes_zero_input_check(self) -> None:
        """Verify the state-gain certificate holds for a mixed family under zero input."""
        sys = SwitchedSystem(
            {
                0: LinearSubsystem(np.diag([0.5, -0.7])),
                1: SaturatingSubsystem([0.8, 0.4]),
                2: LinearSubsystem(np.diag([1.5, 0.2])),
            }
        )
        g = WeightedDigraph(
            stable=frozenset({0, 1}),
            unstable=frozenset({2}),
            vertex_weights={0: -1.0, 1: -1.0, 2: 1.0},
            edge_weights={(0, 1): 0.0, (1, 2): 0.0, (2, 0): 0.0},
        )
        cert = exact_certificate(sys, g)
        assert cert.stable == frozenset({0, 1})
        assert check_certificate(sys, cert, g, 2000, seed=8, radius=100.0, input_radius=0.0).ok


class TestGraphFromCertificate:
    """w(i) = ln lambda_i, w(i, j) = ln mu_ij."""

    def test_two_scalar(self, two_scalar: TwoScalar) -> None:
        """Verify log rates become vertex weights and log jumps become edge weights."""
        _, cert, g = two_scalar
        assert g.vertex_weights == pytest.approx({0: math.log(0.25), 1: math.log(0.36)})
        assert g.edge_weights == {(0, 1): 0.0, (1, 0): 0.0}
        assert g.dwell_window == (1, 2)
        assert g.stable == cert.stable

    def test_unstable_subsystem_gets_positive_weight(self) -> None:
        """Verify a rate above 1 yields an unstable vertex."""
        cert = LyapunovCertificate(
            functions={0: QuadraticForm.identity(1), 1: QuadraticForm.identity(1)},
            rates={0: 0.5, 1: 2.0},
            jumps={(0, 1): 1.5, (1, 0): 1.0},
            stable=frozenset({0}),
        )
        g = graph_from_certificate(cert, (1, 3))
        assert g.unstable == frozenset({1})
        assert g.vertex_weights[1] == math.log(2.0)
        assert g.edge_weight(0, 1) == math.log(1.5)

    def test_edges_need_jump_factors(self) -> None:
        """Verify requested edges need jump factors."""
        _, cert = two_scalar_example()
        with pytest.raises(InvalidParamsError, match="No jump factor"):
            graph_from_certificate(cert, (1, 2), edges=[(0, 1), (1, 2)])
