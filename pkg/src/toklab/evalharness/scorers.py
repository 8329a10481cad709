"""Scorer contract plus the shipped stub scorers.

A scorer is anything with ``score(context, continuation) -> float`` that is
deterministic per instance.  The harness normalizes raw scores by the
continuation's UTF-8 byte length; scorers never normalize themselves.

The subprocess scorer speaks a line protocol: one JSON object
``{"context": ..., "continuation": ...}`` per request line, one float per
reply line, so external model processes plug in without linking.
"""

from __future__ import annotations

import json
import math
import subprocess
from collections import Counter
from typing import Iterable, Sequence

from ..errors import ValidationError
from .items import BenchmarkItem


class OracleScorer:
    """Awards the known-correct choice of every item it was built from."""

    name = "oracle"

    def __init__(self, items: Sequence[BenchmarkItem], separator: str = " "):
        self._correct = {(i.context, separator + i.correct_choice) for i in items}

    def score(self, context: str, continuation: str) -> float:
        # Sign decides the argmax; magnitude scales with the continuation so
        # byte normalization cannot flip it.
        nbytes = max(len(continuation.encode("utf-8")), 1)
        return float(nbytes) if (context, continuation) in self._correct else -float(nbytes)


class AntiOracleScorer:
    """Always prefers some incorrect choice."""

    name = "anti-oracle"

    def __init__(self, items: Sequence[BenchmarkItem], separator: str = " "):
        self._correct = {(i.context, separator + i.correct_choice) for i in items}

    def score(self, context: str, continuation: str) -> float:
        nbytes = max(len(continuation.encode("utf-8")), 1)
        return -float(nbytes) if (context, continuation) in self._correct else float(nbytes)


class CharFrequencyScorer:
    """Character-unigram log-likelihood fitted on a corpus.

    Deterministic and context-free: the continuation's characters are
    scored under add-one-smoothed unigram frequencies.
    """

    name = "char-frequency"

    def __init__(self, corpus: Iterable[str]):
        counts: Counter = Counter()
        for text in corpus:
            counts.update(text)
        self._total = sum(counts.values())
        self._counts = counts
        self._vocab_size = max(len(counts), 1)
        if self._total == 0:
            raise ValidationError("CharFrequencyScorer needs a non-empty corpus")

    def _logp(self, ch: str) -> float:
        return math.log(
            (self._counts.get(ch, 0) + 1.0) / (self._total + self._vocab_size + 1.0)
        )

    def score(self, context: str, continuation: str) -> float:
        return sum(self._logp(ch) for ch in continuation)


class SubprocessScorer:
    """Bridges to an external scorer process over stdin/stdout lines."""

    def __init__(self, cmd: Sequence[str]):
        self.name = f"cmd:{' '.join(cmd)}"
        self._proc = subprocess.Popen(
            list(cmd),
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
        )

    def score(self, context: str, continuation: str) -> float:
        request = json.dumps(
            {"context": context, "continuation": continuation}, ensure_ascii=False
        )
        self._proc.stdin.write(request + "\n")
        self._proc.stdin.flush()
        reply = self._proc.stdout.readline()
        if reply == "":
            raise ValidationError("scorer process closed its output stream")
        try:
            return float(reply.strip())
        except ValueError as exc:
            raise ValidationError(f"scorer replied with a non-number: {reply!r}") from exc

    def close(self) -> None:
        if self._proc.stdin:
            self._proc.stdin.close()
        self._proc.wait(timeout=10)

    def __enter__(self) -> "SubprocessScorer":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
