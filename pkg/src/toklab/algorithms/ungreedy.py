"""Lookahead encoder that revises greedy longest-match choices.

At each position every matching vocabulary token is scored by the minimal
number of tokens needed within a lookahead budget of ``window`` tokens
(a byte fallback spends one budget unit per emitted byte token): paths
that reach the segment end score their exact remaining count, paths that
merely survive the horizon score ``window``, and paths that are guaranteed
to get stuck score infinity.  The minimum wins, ties prefer the longer
first token, so the encoder never does worse than pure greedy.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Dict, List, Tuple, TYPE_CHECKING

from ..errors import UncoverableError, ValidationError
from .bytelevel import char_to_byte_tokens, is_byte_token

if TYPE_CHECKING:  # pragma: no cover
    from ..vocab import Vocabulary


def _index_by_first_char(tokens) -> Dict[str, List[str]]:
    """Match index over literal token strings (byte tokens are not literal)."""
    index: Dict[str, List[str]] = {}
    for tok in tokens:
        if tok and not is_byte_token(tok):
            index.setdefault(tok[0], []).append(tok)
    # Longest first so the greedy choice is always entry 0.
    for lst in index.values():
        lst.sort(key=lambda t: (-len(t), t))
    return index


def _matches_at(index: Dict[str, List[str]], segment: str, pos: int) -> List[str]:
    out = []
    for tok in index.get(segment[pos], ()):
        if segment.startswith(tok, pos):
            out.append(tok)
    return out


def encode_ungreedy(vocab: "Vocabulary", segment: str, window: int = 2) -> List[str]:
    """Cover ``segment`` with vocabulary tokens, minimizing token count
    within a ``window``-deep lookahead at each step."""
    if window < 1:
        raise ValidationError("window must be >= 1")
    if segment == "":
        return []

    index = _index_by_first_char(vocab.strings())
    has_bytes = vocab.has_byte_tokens()
    n = len(segment)

    @lru_cache(maxsize=None)
    def lookahead(pos: int, budget: int) -> float:
        """Min tokens to finish, capped at the remaining token budget.

        The cap makes every non-completing survivor score the full budget,
        so completions, survivors, and dead ends stay comparable; dead ends
        keep their infinity instead of being capped.
        """
        if pos == n or budget <= 0:
            return 0.0
        best = math.inf
        for tok in _matches_at(index, segment, pos):
            best = min(best, 1.0 + lookahead(pos + len(tok), budget - 1))
        if has_bytes:
            cost = len(segment[pos].encode("utf-8"))
            best = min(best, cost + lookahead(pos + 1, budget - cost))
        return best if math.isinf(best) else min(best, float(budget))

    out: List[str] = []
    pos = 0
    while pos < n:
        # (score, -len(first token), emitted tokens, chars consumed)
        candidates: List[Tuple[float, int, List[str], int]] = []
        for tok in _matches_at(index, segment, pos):
            score = 1.0 + lookahead(pos + len(tok), window - 1)
            if not math.isinf(score):
                score = min(score, float(window))
            candidates.append((score, -len(tok), [tok], len(tok)))
        if has_bytes:
            fallback = char_to_byte_tokens(segment[pos])
            score = len(fallback) + lookahead(pos + 1, window - len(fallback))
            if not math.isinf(score):
                score = min(score, float(window))
            candidates.append((score, -1, fallback, 1))
        if not candidates:
            raise UncoverableError(
                f"no vocabulary token matches segment {segment!r} at position {pos}"
            )
        candidates.sort(key=lambda c: (c[0], c[1]))
        score, _, chosen, consumed = candidates[0]
        if math.isinf(score):
            # Every in-window continuation dies; fall back to an exact
            # search so coverable segments are still covered.
            return out + _exact_min_tokens(index, has_bytes, segment, pos)
        out.extend(chosen)
        pos += consumed
    return out


def _exact_min_tokens(
    index: Dict[str, List[str]], has_bytes: bool, segment: str, start: int
) -> List[str]:
    """Unbounded-depth minimal-token cover of segment[start:]."""
    n = len(segment)
    best: List[Tuple[float, List[str]]] = [(math.inf, [])] * (n + 1)
    best[n] = (0.0, [])
    for pos in range(n - 1, start - 1, -1):
        for tok in _matches_at(index, segment, pos):
            nxt = best[pos + len(tok)]
            if 1.0 + nxt[0] < best[pos][0]:
                best[pos] = (1.0 + nxt[0], [tok] + nxt[1])
        if has_bytes:
            nxt = best[pos + 1]
            fb = char_to_byte_tokens(segment[pos])
            if len(fb) + nxt[0] < best[pos][0]:
                best[pos] = (len(fb) + nxt[0], fb + nxt[1])
    if math.isinf(best[start][0]):
        raise UncoverableError(f"segment {segment!r} cannot be covered from position {start}")
    return best[start][1]


def encode_greedy(vocab: "Vocabulary", segment: str) -> List[str]:
    """Pure longest-match baseline the lookahead encoder is compared against."""
    index = _index_by_first_char(vocab.strings())
    has_bytes = vocab.has_byte_tokens()
    out: List[str] = []
    pos = 0
    while pos < len(segment):
        matches = _matches_at(index, segment, pos)
        if matches:
            out.append(matches[0])
            pos += len(matches[0])
        elif has_bytes:
            out.extend(char_to_byte_tokens(segment[pos]))
            pos += 1
        else:
            raise UncoverableError(
                f"no vocabulary token matches segment {segment!r} at position {pos}"
            )
    return out
