"""Quantitative evaluation of heatmaps by point dropping."""

from pcexplain.evaluation.point_drop import (
    DEFAULT_STEPS,
    DROP_MODES,
    HIGH_DROP,
    LOW_DROP,
    PDCCurve,
    auc,
    drop_outcomes,
    drop_schedule,
    point_drop_curve,
)
from pcexplain.evaluation.report import ComparisonTable, compare_methods, write_report

__all__ = [
    "ComparisonTable",
    "DEFAULT_STEPS",
    "DROP_MODES",
    "HIGH_DROP",
    "LOW_DROP",
    "PDCCurve",
    "auc",
    "compare_methods",
    "drop_outcomes",
    "drop_schedule",
    "point_drop_curve",
    "write_report",
]
