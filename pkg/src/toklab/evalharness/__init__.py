"""Robustness evaluation harness."""

from .evaluate import (
    EvalReport,
    GroupResult,
    SEPARATOR,
    accuracy,
    choice_scores,
    evaluate,
    relative_drop,
    select_choice,
)
from .items import BenchmarkItem, load_items, save_items, validate_items
from .scorers import AntiOracleScorer, CharFrequencyScorer, OracleScorer, SubprocessScorer
from .stats import BootstrapResult, WilcoxonResult, bootstrap, wilcoxon_signed_rank

__all__ = [
    "AntiOracleScorer",
    "BenchmarkItem",
    "BootstrapResult",
    "CharFrequencyScorer",
    "EvalReport",
    "GroupResult",
    "OracleScorer",
    "SEPARATOR",
    "SubprocessScorer",
    "WilcoxonResult",
    "accuracy",
    "bootstrap",
    "choice_scores",
    "evaluate",
    "load_items",
    "relative_drop",
    "save_items",
    "select_choice",
    "validate_items",
    "wilcoxon_signed_rank",
]
