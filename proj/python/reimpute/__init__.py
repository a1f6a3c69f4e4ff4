"""Randomization tests with missing outcomes by imputation and re-imputation."""

from ._core import (
    DataError,
    RefusalError,
    confidence_interval,
    generate,
    holm_bonferroni,
    hoeffding_bound,
    required_runs,
    run_one_shot,
    run_test,
)

__all__ = [
    "DataError",
    "RefusalError",
    "confidence_interval",
    "generate",
    "holm_bonferroni",
    "hoeffding_bound",
    "required_runs",
    "run_one_shot",
    "run_test",
]
