"""BPE training and encoding.

Training greedily merges the most frequent adjacent unit pair within
pre-tokenization segments until the vocabulary budget is reached.  Among
equal-frequency pairs the one whose concatenation is lexicographically
smallest by UTF-8 bytes wins, which makes training deterministic for a
fixed corpus order.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, Tuple

from ..errors import UnknownTokenError, ValidationError
from ..pretok import PretokenPolicy, pretokenize
from .bytelevel import BYTE_TOKENS, char_to_byte_tokens

Merge = Tuple[str, str]


@dataclass
class BpeModel:
    """A trained BPE tokenizer: ordered base alphabet plus ordered merges."""

    base_alphabet: List[str]
    merges: List[Merge]
    byte_fallback: bool = False
    specials: List[str] = field(default_factory=list)
    truncated: bool = False  # target size was unreachable

    @property
    def vocab_tokens(self) -> List[str]:
        """All token strings: specials, then alphabet, then merge products."""
        return list(self.specials) + list(self.base_alphabet) + [l + r for l, r in self.merges]

    def to_dict(self) -> dict:
        return {
            "algorithm": "bpe",
            "base_alphabet": list(self.base_alphabet),
            "merges": [list(m) for m in self.merges],
            "byte_fallback": self.byte_fallback,
            "specials": list(self.specials),
            "truncated": self.truncated,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BpeModel":
        return cls(
            base_alphabet=list(d["base_alphabet"]),
            merges=[tuple(m) for m in d["merges"]],
            byte_fallback=bool(d.get("byte_fallback", False)),
            specials=list(d.get("specials", [])),
            truncated=bool(d.get("truncated", False)),
        )


def _segment_counts(corpus: Iterable[str], policy: PretokenPolicy) -> Counter:
    counts: Counter = Counter()
    for text in corpus:
        for seg in pretokenize(text, policy):
            counts[seg.text] += 1
    return counts


def train_bpe(
    corpus: Sequence[str],
    policy: PretokenPolicy,
    target_size: int,
    byte_fallback: bool = False,
    specials: Sequence[str] = (),
) -> BpeModel:
    """Learn merges until ``|alphabet| + |merges| + |specials| == target_size``.

    Merges never cross pre-tokenization boundaries.  If the corpus runs out
    of repeated pairs first, the model is returned short with
    ``truncated=True``.
    """
    corpus = list(corpus)
    if not corpus:
        raise ValidationError("train_bpe requires a non-empty corpus")

    seg_counts = _segment_counts(corpus, policy)
    alphabet = sorted({ch for seg in seg_counts for ch in seg}, key=lambda s: s.encode("utf-8"))
    if byte_fallback:
        alphabet = [t for t in BYTE_TOKENS] + [ch for ch in alphabet if ch not in BYTE_TOKENS]

    floor = len(alphabet) + len(specials)
    if target_size <= floor:
        if target_size == floor:
            return BpeModel(alphabet, [], byte_fallback, list(specials))
        raise ValidationError(
            f"target_size {target_size} does not exceed base alphabet plus specials ({floor})"
        )

    splits: Dict[str, List[str]] = {seg: list(seg) for seg in seg_counts}
    merges: List[Merge] = []
    budget = target_size - floor

    while len(merges) < budget:
        pair_counts: Counter = Counter()
        for seg, freq in seg_counts.items():
            parts = splits[seg]
            for a, b in zip(parts, parts[1:]):
                pair_counts[(a, b)] += freq
        if not pair_counts:
            return BpeModel(alphabet, merges, byte_fallback, list(specials), truncated=True)
        best, best_count = min(
            pair_counts.items(),
            key=lambda kv: (-kv[1], (kv[0][0] + kv[0][1]).encode("utf-8"), kv[0][0].encode("utf-8")),
        )
        if best_count < 2:
            return BpeModel(alphabet, merges, byte_fallback, list(specials), truncated=True)
        merges.append(best)
        for seg in splits:
            splits[seg] = _apply_merge(splits[seg], best)

    return BpeModel(alphabet, merges, byte_fallback, list(specials))


def _apply_merge(parts: List[str], merge: Merge) -> List[str]:
    """Replace adjacent (left, right) occurrences left-to-right."""
    left, right = merge
    out: List[str] = []
    i = 0
    while i < len(parts):
        if i + 1 < len(parts) and parts[i] == left and parts[i + 1] == right:
            out.append(left + right)
            i += 2
        else:
            out.append(parts[i])
            i += 1
    return out


def encode_bpe(model: BpeModel, text: str, policy: PretokenPolicy) -> List[str]:
    """Encode ``text``: within each segment, replay merges in model order."""
    base = set(model.base_alphabet)
    tokens: List[str] = []
    for seg in pretokenize(text, policy):
        tokens.extend(_encode_segment(model, base, seg.text))
    return tokens


def _encode_segment(model: BpeModel, base: set, segment: str) -> List[str]:
    parts: List[str] = []
    for ch in segment:
        if ch in base:
            parts.append(ch)
        elif model.byte_fallback:
            parts.extend(char_to_byte_tokens(ch))
        else:
            raise UnknownTokenError(
                f"code point {ch!r} is not in the base alphabet and byte fallback is disabled"
            )
    for merge in model.merges:
        if len(parts) < 2:
            break
        parts = _apply_merge(parts, merge)
    return parts
