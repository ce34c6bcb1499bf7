"""Geodiversity indicators over embedding datasets."""

from ._core import (
    ConfigError,
    DataError,
    EmbeddingDataset,
    GeodivError,
    IoError,
    ManifoldModel,
    PreconditionError,
    build_manifold,
    build_prompts,
    clipscore,
    coverage,
    full_report_json,
    load_dataset,
    lower_tail_mean,
    percentile_linear,
    precision,
    write_dataset,
)

__all__ = [
    "ConfigError",
    "DataError",
    "EmbeddingDataset",
    "GeodivError",
    "IoError",
    "ManifoldModel",
    "PreconditionError",
    "build_manifold",
    "build_prompts",
    "clipscore",
    "coverage",
    "full_report_json",
    "load_dataset",
    "lower_tail_mean",
    "percentile_linear",
    "precision",
    "write_dataset",
]
