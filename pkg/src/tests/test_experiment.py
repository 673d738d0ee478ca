"""Tests for the Monte Carlo contractivity harness and its CSV export."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest

from src.config import SwitchSettings
from src.errors import ConfigError
from src.experiment import ExperimentConfig, csv_text, export_csv, run_experiment
from src.experiment.export import CSV_HEADER, format_fixed
from src.generators.instances import GenConfig, PhiSqrt, generate, resample_cycle_weights
from src.generators.rng import derive_seed
from src.schemas.graph import Cycle, NiceWeightParams
from src.schemas.results import ExperimentResult, LengthRow


@pytest.fixture
def small_config(settings: SwitchSettings, reference_params: NiceWeightParams) -> ExperimentConfig:
    """100 stable vertices with outdegree 3, 200 trials per length."""
    gen = GenConfig(n_stable=100, phi=PhiSqrt(coeff=0.3), params=reference_params, dwell_window=(2, 4), seed=31)
    return ExperimentConfig(
        gen=gen,
        trials_per_length=settings.trials_per_length,
        master_seed=settings.master_seed,
        sweep_detections=20,
    )


def three_sigma(p: float, trials: int) -> float:
    return 3 * math.sqrt(p * (1 - p) / trials)


class TestExperimentConfig:
    """Length list validation."""

    def test_empty_lengths(self, small_config: ExperimentConfig) -> None:
        """Verify an empty length list is rejected."""
        with pytest.raises(ConfigError, match="empty"):
            ExperimentConfig(gen=small_config.gen, lengths=[])

    def test_short_lengths(self, small_config: ExperimentConfig) -> None:
        """Verify lengths below 2 are rejected."""
        with pytest.raises(ConfigError, match="at least 2"):
            ExperimentConfig(gen=small_config.gen, lengths=[1, 3])


class TestRunExperiment:
    """Sweep, targeted search and resampled trials."""

    def test_sweep_lengths(self, small_config: ExperimentConfig) -> None:
        """Verify sweep lengths come back sorted, exact and fully tried."""
        result = run_experiment(small_config)
        assert result.phi_floor == 3
        assert result.detections == 20
        assert result.dead_ends == 0
        lengths = [row.requested for row in result.rows]
        assert lengths == sorted(set(lengths))
        for row in result.rows:
            assert row.status == "exact"
            assert row.achieved == row.requested
            assert row.cycle is not None
            assert len(row.cycle) == row.achieved
            assert row.trials == 200
            assert 0 <= row.contractive <= row.trials

    def test_reproducible(self, small_config: ExperimentConfig) -> None:
        """Verify two runs agree apart from timing."""
        first = run_experiment(small_config)
        second = run_experiment(small_config)
        assert csv_text(first) == csv_text(second)
        assert first.model_dump(exclude={"rows": {"__all__": {"seconds"}}}) == second.model_dump(
            exclude={"rows": {"__all__": {"seconds"}}}
        )

    def test_trials_recompute_independently(self, small_config: ExperimentConfig) -> None:
        """Each trial seed is derived from (master_seed, length, trial) alone."""
        result = run_experiment(small_config)
        graph = generate(small_config.gen)
        row = result.rows[0]
        assert row.cycle is not None
        cycle = Cycle(vertices=row.cycle)
        recount = sum(
            resample_cycle_weights(
                graph, cycle, derive_seed(small_config.master_seed, row.requested, trial), small_config.gen.params
            ).gamma()
            < 0
            for trial in reversed(range(row.trials))
        )
        assert recount == row.contractive

    def test_nearest_length(self, small_config: ExperimentConfig) -> None:
        """Verify an unreachable length falls back to the nearest found length."""
        cfg = small_config.model_copy(update={"lengths": [99], "retry_factor": 1})
        (row,) = run_experiment(cfg).rows
        assert row.status == "nearest"
        assert row.achieved is not None
        assert row.achieved < 99
        assert row.requested == 99

    def test_requested_length_found_by_search(self, small_config: ExperimentConfig) -> None:
        """Verify the targeted search finds a length the sweep missed."""
        sweep = run_experiment(small_config)
        target = sweep.rows[-1].requested
        cfg = small_config.model_copy(update={"lengths": [target], "sweep_detections": 1})
        (row,) = run_experiment(cfg).rows
        assert row.status == "exact"
        assert row.achieved == target

    def test_xn_statistic(self, small_config: ExperimentConfig) -> None:
        """The closing term only lowers the statistic, so X_n counts at least as many draws as Gamma."""
        gamma_rows = run_experiment(small_config).rows
        xn_rows = run_experiment(small_config.model_copy(update={"statistic": "xn"})).rows
        for gamma_row, xn_row in zip(gamma_rows, xn_rows, strict=True):
            assert xn_row.contractive >= gamma_row.contractive

    def test_consistent_with_bound(self, small_config: ExperimentConfig) -> None:
        """Verify empirical probabilities stay above the bound within three sigma."""
        result = run_experiment(small_config)
        for row in result.rows:
            p = row.theoretical_bound
            assert row.empirical_prob >= p - three_sigma(p, row.trials)

    def test_edge_weights_alone_decide_when_b_vanishes(self, settings: SwitchSettings) -> None:
        """With B = 1e-6 a draw is contractive about as often as a sum of n uniform edge weights is negative."""
        params = NiceWeightParams(delta=2, alpha=0.0, beta=5e-7, edge_bound=2.5, vertex_bound=1e-6)
        gen = GenConfig(n_stable=100, phi=PhiSqrt(coeff=0.3), params=params, dwell_window=(2, 4), seed=5)
        cfg = ExperimentConfig(gen=gen, lengths=[4], trials_per_length=2000, master_seed=settings.master_seed)
        (row,) = run_experiment(cfg).rows
        assert row.achieved is not None

        rng = np.random.default_rng(12345)
        oracle = float(np.mean(rng.uniform(-2.5, 2.5, size=(100_000, row.achieved)).sum(axis=1) < 0))
        assert abs(oracle - 0.5) < 0.01
        assert abs(row.empirical_prob - oracle) < three_sigma(0.5, row.trials) + 0.01


@pytest.mark.slow
class TestReferenceExperiment:
    """1000 stable vertices, Phi(r) = sqrt(r) / 10, Delta in [2, 4], A = 2.5, B = 5, 1000 trials."""

    def test_overwhelming_empirical_probability(self, reference_params: NiceWeightParams) -> None:
        """Verify the full-size run is well above the bound for every length."""
        gen = GenConfig(n_stable=1000, phi=PhiSqrt(coeff=0.1), params=reference_params, dwell_window=(2, 4), seed=1)
        result = run_experiment(ExperimentConfig(gen=gen, trials_per_length=1000, master_seed=2024))
        assert result.phi_floor == 3
        assert result.rows
        for row in result.rows:
            assert row.theoretical_bound == pytest.approx(1 - math.exp(-1 / 6), abs=1e-12)
            assert row.empirical_prob >= row.theoretical_bound - three_sigma(row.theoretical_bound, row.trials)
            if row.achieved is not None and row.achieved >= 3:
                assert row.empirical_prob >= 0.95
        probs = [row.empirical_prob for row in result.rows]
        for shorter, longer in zip(probs, probs[1:], strict=False):
            assert longer >= shorter - three_sigma(shorter, 1000) - three_sigma(longer, 1000)


class TestFormatFixed:
    """Six places, round-half-even."""

    @pytest.mark.parametrize(
        ("value", "expected"),
        [
            (0.153518275, "0.153518"),
            (0.0000005, "0.000000"),
            (0.0000015, "0.000002"),
            (0.0000025, "0.000002"),
            (1.0, "1.000000"),
            (0.0, "0.000000"),
        ],
    )
    def test_values(self, value: float, expected: str) -> None:
        """Verify six-place half-even formatting."""
        assert format_fixed(value) == expected


def sample_result() -> ExperimentResult:
    return ExperimentResult(
        phi_floor=3,
        statistic="gamma",
        master_seed=0,
        detections=5,
        dead_ends=0,
        rows=[
            LengthRow(
                requested=3,
                status="exact",
                achieved=3,
                cycle=(0, 4, 2),
                trials=8,
                contractive=7,
                theoretical_bound=0.15,
                seconds=0.25,
            ),
            LengthRow(requested=40, status="unreachable", theoretical_bound=0.15),
            LengthRow(
                requested=9,
                status="nearest",
                achieved=7,
                cycle=(1, 2, 3, 4, 5, 6, 7),
                trials=8,
                contractive=8,
                theoretical_bound=0.15,
                seconds=0.5,
            ),
        ],
    )


class TestCsvExport:
    """Deterministic CSV output."""

    def test_rows(self) -> None:
        """Verify header and rows, with unreachable lengths skipped."""
        assert csv_text(sample_result()).splitlines() == [
            ",".join(CSV_HEADER),
            "3,8,7,0.875000,0.150000,",
            "7,8,8,1.000000,0.150000,",
        ]

    def test_timing_column(self) -> None:
        """Verify the seconds column is filled when timing is on."""
        lines = csv_text(sample_result(), include_timing=True).splitlines()
        assert lines[1].endswith(",0.250000")
        assert lines[2].endswith(",0.500000")

    def test_one_row_per_achieved_length(self) -> None:
        """Verify a nearest fallback onto an exact length writes that length once, from the exact row."""
        exact = LengthRow(
            requested=7,
            status="exact",
            achieved=7,
            cycle=(1, 2, 3, 4, 5, 6, 7),
            trials=8,
            contractive=5,
            theoretical_bound=0.15,
        )
        rows = [*sample_result().rows, exact]
        lines = csv_text(sample_result().model_copy(update={"rows": rows})).splitlines()
        assert [line.split(",")[0] for line in lines[1:]] == ["3", "7"]
        assert lines[2] == "7,8,5,0.625000,0.150000,"

    def test_single_row_is_two_lines(self) -> None:
        """Verify one row gives a two-line file."""
        result = sample_result().model_copy(update={"rows": sample_result().rows[:1]})
        assert len(csv_text(result).splitlines()) == 2

    def test_reexport_is_byte_identical(self, tmp_path: Path) -> None:
        """Verify re-export is byte-identical with LF endings."""
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        export_csv(sample_result(), first)
        export_csv(sample_result(), second)
        assert first.read_bytes() == second.read_bytes()
        assert first.read_bytes().count(b"\r") == 0
