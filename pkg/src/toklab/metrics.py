"""Intrinsic tokenization efficiency metrics and byte-budget accounting.

Fertility, proportion of continued words, and cross-lingual parity over
(parallel) corpora, plus the bytes a pipeline consumes to fill a fixed
token budget.  Aggregation is sum-based so parallel and serial runs agree.
"""

from __future__ import annotations

import statistics
import unicodedata
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Iterable, List, Optional, Sequence

from .errors import AlignmentError, UndefinedMetricError, ValidationError
from .textnorm import UNICODE_VERSION


class SplitMode(str, Enum):
    WHITESPACE_PUNCT = "whitespace_punct"
    CHAR = "char"  # scripts without spaces
    CUSTOM = "custom"


@dataclass
class WordSplitter:
    """Deterministic corpus-to-words splitter used by fertility/PCW."""

    mode: SplitMode = SplitMode.WHITESPACE_PUNCT
    custom: Optional[Callable[[str], List[str]]] = None

    def __post_init__(self):
        self.mode = SplitMode(self.mode)
        if self.mode is SplitMode.CUSTOM and self.custom is None:
            raise ValidationError("CUSTOM splitter requires a callable")

    def words(self, text: str) -> List[str]:
        if self.mode is SplitMode.CUSTOM:
            out = self.custom(text)
        elif self.mode is SplitMode.CHAR:
            out = [ch for ch in text if not ch.isspace()]
        else:
            out = _alnum_runs(text)
        return [w for w in out if w]


def _alnum_runs(text: str) -> List[str]:
    words: List[str] = []
    buf: List[str] = []
    for ch in text:
        cat = unicodedata.category(ch)
        if cat[0] in ("L", "M", "N"):
            buf.append(ch)
        elif buf:
            words.append("".join(buf))
            buf = []
    if buf:
        words.append("".join(buf))
    return words


@dataclass
class MetricsReport:
    fertility: float
    pcw: float
    parity: Optional[float]
    parity_median: Optional[float]
    n_words: int
    n_tokens: int
    leading_space: bool
    splitter_mode: str
    unicode_version: str = UNICODE_VERSION

    def to_dict(self) -> dict:
        return {
            "fertility": self.fertility,
            "pcw": self.pcw,
            "parity": self.parity,
            "parity_median": self.parity_median,
            "n_words": self.n_words,
            "n_tokens": self.n_tokens,
            "leading_space": self.leading_space,
            "splitter_mode": self.splitter_mode,
            "unicode_version": self.unicode_version,
        }


def _word_token_counts(pipeline, corpus: Iterable[str], splitter: WordSplitter) -> List[int]:
    """Token count per word, encoding each word in isolation.

    Words get a leading space when the pipeline's scheme attaches spaces to
    words, matching how the word appears mid-sentence.
    """
    lead = " " if pipeline.encodes_with_leading_space else ""
    cache: Dict[str, int] = {}
    counts: List[int] = []
    for line in corpus:
        for word in splitter.words(line):
            if word not in cache:
                cache[word] = len(pipeline.encode(lead + word))
            counts.append(cache[word])
    return counts


def fertility(pipeline, corpus: Iterable[str], splitter: Optional[WordSplitter] = None) -> float:
    """Mean tokens per word; 1 is the theoretical minimum."""
    splitter = splitter or WordSplitter()
    counts = _word_token_counts(pipeline, corpus, splitter)
    if not counts:
        raise UndefinedMetricError("fertility is undefined on a corpus with zero words")
    return sum(counts) / len(counts)


def pcw(pipeline, corpus: Iterable[str], splitter: Optional[WordSplitter] = None) -> float:
    """Proportion of words needing two or more tokens."""
    splitter = splitter or WordSplitter()
    counts = _word_token_counts(pipeline, corpus, splitter)
    if not counts:
        raise UndefinedMetricError("pcw is undefined on a corpus with zero words")
    return sum(1 for c in counts if c >= 2) / len(counts)


def _pair_ratios(pipeline, corpus_a: Sequence[str], corpus_b: Sequence[str]) -> List[float]:
    corpus_a, corpus_b = list(corpus_a), list(corpus_b)
    if len(corpus_a) != len(corpus_b):
        raise AlignmentError(
            f"parallel corpora must align line-by-line ({len(corpus_a)} vs {len(corpus_b)} lines)"
        )
    ratios: List[float] = []
    for lineno, (a, b) in enumerate(zip(corpus_a, corpus_b), start=1):
        nb = pipeline.token_count(b)
        if nb == 0:
            raise UndefinedMetricError(f"line {lineno}: reference sentence tokenizes to nothing")
        ratios.append(pipeline.token_count(a) / nb)
    return ratios


def parity(pipeline, corpus_a: Sequence[str], corpus_b: Sequence[str]) -> float:
    """Mean of per-pair token-length ratios |T(a)| / |T(b)|."""
    ratios = _pair_ratios(pipeline, corpus_a, corpus_b)
    if not ratios:
        raise UndefinedMetricError("parity is undefined on empty corpora")
    return sum(ratios) / len(ratios)


def parity_median(pipeline, corpus_a: Sequence[str], corpus_b: Sequence[str]) -> float:
    ratios = _pair_ratios(pipeline, corpus_a, corpus_b)
    if not ratios:
        raise UndefinedMetricError("parity is undefined on empty corpora")
    return statistics.median(ratios)


def metrics_report(
    pipeline,
    corpus: Sequence[str],
    splitter: Optional[WordSplitter] = None,
    parallel_reference: Optional[Sequence[str]] = None,
) -> MetricsReport:
    """Fertility/PCW over ``corpus`` plus parity against an optional
    line-aligned reference corpus."""
    splitter = splitter or WordSplitter()
    counts = _word_token_counts(pipeline, corpus, splitter)
    if not counts:
        raise UndefinedMetricError("metrics are undefined on a corpus with zero words")
    par = par_med = None
    if parallel_reference is not None:
        ratios = _pair_ratios(pipeline, list(corpus), list(parallel_reference))
        par = sum(ratios) / len(ratios)
        par_med = statistics.median(ratios)
    return MetricsReport(
        fertility=sum(counts) / len(counts),
        pcw=sum(1 for c in counts if c >= 2) / len(counts),
        parity=par,
        parity_median=par_med,
        n_words=len(counts),
        n_tokens=sum(counts),
        leading_space=pipeline.encodes_with_leading_space,
        splitter_mode=splitter.mode.value,
    )


@dataclass
class BudgetResult:
    bytes_consumed: float
    tokens_consumed: int
    exhausted: bool


def bytes_for_token_budget(pipeline, corpus_stream: Iterable[str], token_budget: int) -> BudgetResult:
    """UTF-8 bytes consumed before cumulative tokens reach the budget.

    The final document is counted proportionally by tokens, so a byte-level
    pipeline consumes exactly ``token_budget`` bytes.
    """
    if token_budget <= 0:
        raise ValidationError("token_budget must be positive")
    bytes_seen = 0
    tokens_seen = 0
    for doc in corpus_stream:
        doc_tokens = pipeline.token_count(doc)
        doc_bytes = len(doc.encode("utf-8"))
        if tokens_seen + doc_tokens >= token_budget:
            need = token_budget - tokens_seen
            # Multiply before dividing: keeps the 1-token-per-byte case exact.
            partial = doc_bytes * need / doc_tokens if doc_tokens else 0.0
            return BudgetResult(
                bytes_consumed=bytes_seen + partial,
                tokens_consumed=token_budget,
                exhausted=False,
            )
        bytes_seen += doc_bytes
        tokens_seen += doc_tokens
    return BudgetResult(bytes_consumed=float(bytes_seen), tokens_consumed=tokens_seen, exhausted=True)
