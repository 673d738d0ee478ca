"""Monte Carlo contractivity experiment and its CSV export."""

from __future__ import annotations

from src.experiment.export import csv_text, export_csv
from src.experiment.harness import ExperimentConfig, run_experiment

__all__ = [
    "ExperimentConfig",
    "run_experiment",
    "csv_text",
    "export_csv",
]
