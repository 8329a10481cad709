"""Unigram piece model: Viterbi encoding and prune-based training.

Encoding maximizes the summed piece log-probabilities over all
segmentations of a segment.  Training seeds candidates from segment
substrings, fits probabilities with hard EM, and repeatedly drops the
pieces whose removal least increases corpus loss until the target size.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from ..errors import UncoverableError, ValidationError
from ..pretok import PretokenPolicy, pretokenize


@dataclass
class UnigramModel:
    """Piece inventory with natural-log probabilities (all finite, <= 0)."""

    pieces: Dict[str, float]
    unk_penalty: Optional[float] = None
    truncated: bool = False

    def __post_init__(self):
        for piece, lp in self.pieces.items():
            if not math.isfinite(lp) or lp > 0:
                raise ValidationError(f"log-probability of {piece!r} must be finite and <= 0")

    def to_dict(self) -> dict:
        return {
            "algorithm": "unigram",
            "log_base": "e",
            "pieces": dict(sorted(self.pieces.items())),
            "unk_penalty": self.unk_penalty,
            "truncated": self.truncated,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "UnigramModel":
        return cls(
            pieces=dict(d["pieces"]),
            unk_penalty=d.get("unk_penalty"),
            truncated=bool(d.get("truncated", False)),
        )


def _viterbi(
    segment: str, pieces: Dict[str, float], max_len: int, unk_penalty: Optional[float]
) -> Optional[Tuple[List[str], float]]:
    """Best segmentation of ``segment`` or None if uncoverable.

    Ties break toward fewer tokens, then the lexicographically smallest
    token at each decision point, scanning from the end so the comparison
    applies to the first token of the remaining suffix.
    """
    n = len(segment)
    # best[i] = (score, count, tokens) for segment[i:]
    best: List[Optional[Tuple[float, int, List[str]]]] = [None] * (n + 1)
    best[n] = (0.0, 0, [])
    for i in range(n - 1, -1, -1):
        cand_best = None
        limit = min(n, i + max_len)
        for j in range(i + 1, limit + 1):
            piece = segment[i:j]
            lp = pieces.get(piece)
            if lp is None:
                if j == i + 1 and unk_penalty is not None:
                    lp = unk_penalty
                else:
                    continue
            suffix = best[j]
            if suffix is None:
                continue
            cand = (lp + suffix[0], 1 + suffix[1], piece)
            if cand_best is None or _beats(cand, cand_best):
                cand_best = cand
        if cand_best is not None:
            score, count, piece = cand_best
            best[i] = (score, count, [piece] + best[i + len(piece)][2])
    if best[0] is None:
        return None
    score, _, tokens = best[0]
    return tokens, score


def _beats(a: Tuple[float, int, str], b: Tuple[float, int, str]) -> bool:
    if a[0] != b[0]:
        return a[0] > b[0]
    if a[1] != b[1]:
        return a[1] < b[1]
    return a[2].encode("utf-8") < b[2].encode("utf-8")


def encode_unigram(model: UnigramModel, segment: str) -> List[str]:
    """Maximum-log-probability segmentation of one segment."""
    if segment == "":
        return []
    max_len = max((len(p) for p in model.pieces), default=1)
    result = _viterbi(segment, model.pieces, max_len, model.unk_penalty)
    if result is None:
        raise UncoverableError(
            f"segment {segment!r} cannot be segmented and no fallback penalty is set"
        )
    return result[0]


def train_unigram(
    corpus: Sequence[str],
    policy: PretokenPolicy,
    target_size: int,
    prune_fraction: float = 0.25,
    max_piece_length: int = 8,
    em_rounds: int = 2,
    seed_multiplier: int = 10,
) -> UnigramModel:
    """Fit a unigram model of ``target_size`` pieces.

    Candidates are all substrings of pre-tokenization segments up to
    ``max_piece_length``; each prune step removes the ``prune_fraction`` of
    prunable pieces with the smallest corpus-loss increase.  Single code
    points are never pruned, so training text stays segmentable.
    """
    corpus = list(corpus)
    if not corpus:
        raise ValidationError("train_unigram requires a non-empty corpus")
    if not (0.0 < prune_fraction < 1.0):
        raise ValidationError("prune_fraction must be in (0, 1)")

    seg_counts: Counter = Counter()
    for text in corpus:
        for seg in pretokenize(text, policy):
            seg_counts[seg.text] += 1

    singles = {ch for seg in seg_counts for ch in seg}
    if target_size < len(singles):
        raise ValidationError(
            f"target_size {target_size} is below the alphabet size {len(singles)}"
        )

    # Seed: substring counts, trimmed to a generous multiple of the target.
    cand_counts: Counter = Counter()
    for seg, freq in seg_counts.items():
        for i in range(len(seg)):
            for j in range(i + 1, min(len(seg), i + max_piece_length) + 1):
                cand_counts[seg[i:j]] += freq
    multi = [p for p in cand_counts if len(p) > 1]
    multi.sort(key=lambda p: (-cand_counts[p], p.encode("utf-8")))
    keep = max(target_size * seed_multiplier, target_size) - len(singles)
    pieces = {p: float(cand_counts[p]) for p in multi[: max(keep, 0)]}
    for ch in singles:
        pieces[ch] = float(cand_counts[ch])

    probs = _normalize(pieces)
    while True:
        for _ in range(em_rounds):
            probs = _em_step(seg_counts, probs, max_piece_length, singles)
        if len(probs) <= target_size:
            break
        pruned = _prune(seg_counts, probs, max_piece_length, singles, prune_fraction, target_size)
        if len(pruned) == len(probs):  # nothing prunable; stop short
            probs = pruned
            break
        probs = pruned

    truncated = len(probs) != target_size
    return UnigramModel(
        pieces=probs,
        unk_penalty=min(probs.values()) - 10.0,
        truncated=truncated,
    )


def _normalize(counts: Dict[str, float]) -> Dict[str, float]:
    total = sum(counts.values())
    return {p: math.log(c / total) for p, c in counts.items() if c > 0}


def _em_step(
    seg_counts: Counter, probs: Dict[str, float], max_len: int, singles: set
) -> Dict[str, float]:
    """Hard EM: re-count pieces along Viterbi paths, keep singles alive."""
    used: Counter = Counter()
    for seg, freq in seg_counts.items():
        result = _viterbi(seg, probs, max_len, None)
        if result is None:  # pragma: no cover - singles guarantee coverage
            raise UncoverableError(f"training segment {seg!r} became unsegmentable")
        for piece in result[0]:
            used[piece] += freq
    counts = {p: float(used[p]) for p in probs if used[p] > 0 or p in singles}
    for ch in singles:
        counts[ch] = max(counts.get(ch, 0.0), 0.01)
    return _normalize(counts)


def _prune(
    seg_counts: Counter,
    probs: Dict[str, float],
    max_len: int,
    singles: set,
    prune_fraction: float,
    target_size: int,
) -> Dict[str, float]:
    base_paths: Dict[str, List[str]] = {}
    base_scores: Dict[str, float] = {}
    for seg in seg_counts:
        tokens, score = _viterbi(seg, probs, max_len, None)
        base_paths[seg] = tokens
        base_scores[seg] = score

    users: Dict[str, List[str]] = {}
    for seg, tokens in base_paths.items():
        for piece in set(tokens):
            users.setdefault(piece, []).append(seg)

    losses: List[Tuple[float, bytes, str]] = []
    for piece in probs:
        if piece in singles and len(piece) == 1:
            continue
        increase = 0.0
        without = dict(probs)
        del without[piece]
        for seg in users.get(piece, ()):
            alt = _viterbi(seg, without, max_len, None)
            if alt is None:
                increase = math.inf
                break
            increase += seg_counts[seg] * (base_scores[seg] - alt[1])
        if increase != math.inf:
            losses.append((increase, piece.encode("utf-8"), piece))

    losses.sort(key=lambda x: (x[0], x[1]))
    prunable = len(losses)
    if prunable == 0:
        return probs
    n_drop = max(1, int(prune_fraction * prunable))
    n_drop = min(n_drop, len(probs) - target_size, prunable)
    dropped = {piece for _, _, piece in losses[:n_drop]}
    if not dropped:
        return probs
    return _normalize({p: math.exp(lp) for p, lp in probs.items() if p not in dropped})


def encode_unigram_text(model: UnigramModel, text: str, policy: PretokenPolicy) -> List[str]:
    """Encode running text segment-by-segment."""
    tokens: List[str] = []
    for seg in pretokenize(text, policy):
        tokens.extend(encode_unigram(model, seg.text))
    return tokens
