"""CSV export of experiment results."""

from __future__ import annotations

import csv
import io
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path

from loguru import logger

from src.schemas.results import ExperimentResult, LengthRow

CSV_HEADER = ("n", "trials", "contractive", "empirical_prob", "theoretical_bound", "seconds")
_SIX_PLACES = Decimal("0.000001")


def format_fixed(value: float) -> str:
    """Six decimal places, round-half-even on the shortest decimal form of ``value``."""
    return str(Decimal(repr(float(value))).quantize(_SIX_PLACES, rounding=ROUND_HALF_EVEN))


def csv_text(result: ExperimentResult, *, include_timing: bool = False) -> str:
    """CSV document, one row per reachable length with ``n`` the achieved length.

    When several requested lengths resolve to the same achieved length, only
    one row is written: the exact match if there is one, else the first.
    ``seconds`` is left blank unless ``include_timing`` is set, so that the
    same result always serializes to the same bytes.
    """
    by_length: dict[int, LengthRow] = {}
    for row in result.rows:
        if row.achieved is None:
            continue
        kept = by_length.get(row.achieved)
        if kept is None or (kept.status != "exact" and row.status == "exact"):
            by_length[row.achieved] = row

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in by_length.values():
        writer.writerow(
            [
                row.achieved,
                row.trials,
                row.contractive,
                format_fixed(row.empirical_prob),
                format_fixed(row.theoretical_bound),
                format_fixed(row.seconds) if include_timing else "",
            ]
        )
    return buffer.getvalue()


def export_csv(result: ExperimentResult, path: str | Path, *, include_timing: bool = False) -> None:
    """Write ``csv_text(result)`` to ``path``."""
    path = Path(path)
    path.write_text(csv_text(result, include_timing=include_timing), encoding="utf-8", newline="")
    logger.info("Wrote {} result rows to {}", len(result.rows), path)
