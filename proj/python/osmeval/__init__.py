"""Python bindings for the osmeval open-semantic-mapping evaluation harness.

The heavy lifting lives in the C++ core; this package re-exports the bound
operations: segmentation metrics, point association, PLY IO, label
normalization, question quotas, exact judging, and condition configs.
"""

from ._core import (
    ConfusionMatrix,
    LabeledPointCloud,
    OsmevalError,
    aggregate,
    associate_points,
    build_confusion,
    category_names,
    default_quota_ratios,
    degradation_percent,
    emit_condition_config,
    fmiou,
    format_metric,
    iou_per_class,
    judge_exact,
    load_point_cloud,
    macc,
    match_label_exact,
    normalize_label,
    quota_counts,
    save_point_cloud,
)

__all__ = [
    "ConfusionMatrix",
    "LabeledPointCloud",
    "OsmevalError",
    "aggregate",
    "associate_points",
    "build_confusion",
    "category_names",
    "default_quota_ratios",
    "degradation_percent",
    "emit_condition_config",
    "fmiou",
    "format_metric",
    "iou_per_class",
    "judge_exact",
    "load_point_cloud",
    "macc",
    "match_label_exact",
    "normalize_label",
    "quota_counts",
    "save_point_cloud",
]
