"""WordPiece encoding: greedy longest-prefix match with "##" continuations.

Only inference lives here; WordPiece-style vocabularies are supplied
externally or trained with another learner.  A segment with any
unmatchable position is absorbed into the unknown token, mirroring the
usual [UNK] behavior.
"""

from __future__ import annotations

from typing import List, TYPE_CHECKING

from ..errors import ValidationError

if TYPE_CHECKING:  # pragma: no cover
    from ..vocab import Vocabulary

CONTINUATION = "##"
DEFAULT_UNK = "[UNK]"


def encode_wordpiece(vocab: "Vocabulary", segment: str, unk_token: str = DEFAULT_UNK) -> List[str]:
    """Greedy longest-prefix segmentation of one pre-tokenization segment.

    Non-initial pieces carry the ``##`` marker.  If any position has no
    matching piece the whole segment collapses to ``unk_token``; callers
    can detect absorption by its presence in the output.
    """
    from ..vocab import Convention

    if vocab.convention is not Convention.WORDPIECE_HASH:
        raise ValidationError("encode_wordpiece requires a vocabulary with the '##' convention")
    if segment == "":
        return []

    tokens: List[str] = []
    start = 0
    while start < len(segment):
        prefix = CONTINUATION if start > 0 else ""
        end = len(segment)
        piece = None
        while end > start:
            candidate = prefix + segment[start:end]
            if candidate in vocab:
                piece = candidate
                break
            end -= 1
        if piece is None:
            return [unk_token]
        tokens.append(piece)
        start = end
    return tokens
