"""Byte-level encoding and the byte-fallback token convention.

Raw bytes are represented by the 256 token strings ``<0x00>`` ... ``<0xFF>``.
Encoders that enable fallback carry these in their base alphabet, so any
code point outside the learned alphabet still round-trips exactly.
"""

from __future__ import annotations

import re
from typing import List, Sequence, TYPE_CHECKING

from ..errors import ValidationError

if TYPE_CHECKING:  # pragma: no cover
    from ..vocab import Vocabulary

_BYTE_TOKEN = re.compile(r"^<0x([0-9A-F]{2})>$")

BYTE_TOKENS = tuple(f"<0x{b:02X}>" for b in range(256))


def byte_token(b: int) -> str:
    return BYTE_TOKENS[b]


def is_byte_token(token: str) -> bool:
    return _BYTE_TOKEN.match(token) is not None


def byte_token_value(token: str) -> int:
    m = _BYTE_TOKEN.match(token)
    if m is None:
        raise ValidationError(f"not a byte token: {token!r}")
    return int(m.group(1), 16)


def char_to_byte_tokens(ch: str) -> List[str]:
    """UTF-8 byte tokens for one code point, in byte order."""
    return [BYTE_TOKENS[b] for b in ch.encode("utf-8")]


def byte_fallback(vocab: "Vocabulary", ch: str) -> List[str]:
    """Byte tokens for ``ch``, verifying the vocabulary can host them."""
    if not vocab.has_byte_tokens():
        raise ValidationError(
            "byte fallback requires all 256 single-byte tokens in the vocabulary"
        )
    return char_to_byte_tokens(ch)


def encode_bytes(text: str, n_special: int = 3) -> List[int]:
    """Map each UTF-8 byte b of ``text`` to the ID ``n_special + b``.

    With 3 specials this is the 259-entry byte vocabulary layout.
    """
    if n_special < 0:
        raise ValidationError("n_special must be >= 0")
    return [n_special + b for b in text.encode("utf-8")]


def decode_bytes(ids: Sequence[int], n_special: int = 3) -> str:
    """Exact inverse of :func:`encode_bytes`."""
    raw = bytes(i - n_special for i in ids)
    return raw.decode("utf-8")


def decode_token_strings(tokens: Sequence[str]) -> str:
    """Concatenate token strings back into text, resolving byte tokens.

    Adjacent byte tokens are combined into one UTF-8 byte sequence before
    decoding, so multi-byte fallbacks reassemble correctly.
    """
    parts: List[str] = []
    pending: List[int] = []
    for tok in tokens:
        if is_byte_token(tok):
            pending.append(byte_token_value(tok))
        else:
            if pending:
                parts.append(bytes(pending).decode("utf-8"))
                pending = []
            parts.append(tok)
    if pending:
        parts.append(bytes(pending).decode("utf-8"))
    return "".join(parts)
