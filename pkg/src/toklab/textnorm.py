"""Unicode normalization forms and zero-width character policies.

Everything here runs before pre-tokenization.  All functions are pure and
safe for concurrent use.  Normalization output depends on the Python
build's Unicode database; ``UNICODE_VERSION`` is stamped into reports so
drift across interpreter versions is visible.
"""

from __future__ import annotations

import unicodedata
from enum import Enum
from typing import FrozenSet, Iterable, Union

UNICODE_VERSION = unicodedata.unidata_version

#: Zero-width code points removed by default: ZERO WIDTH SPACE, ZERO WIDTH
#: NON-JOINER, ZERO WIDTH JOINER, ZERO WIDTH NO-BREAK SPACE (BOM).
DEFAULT_ZERO_WIDTH: FrozenSet[str] = frozenset({"​", "‌", "‍", "﻿"})


class NormForm(str, Enum):
    """Unicode normalization form applied ahead of pre-tokenization."""

    NONE = "none"
    NFC = "nfc"
    NFD = "nfd"
    NFKC = "nfkc"

    @classmethod
    def coerce(cls, value: Union["NormForm", str]) -> "NormForm":
        if isinstance(value, NormForm):
            return value
        return cls(str(value).lower())


def normalize(text: Union[str, bytes], form: Union[NormForm, str]) -> str:
    """Return ``text`` in the requested normalization form.

    ``NormForm.NONE`` is the identity.  Bytes input is decoded as UTF-8
    first, so invalid byte sequences surface as ``UnicodeDecodeError``.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    form = NormForm.coerce(form)
    if form is NormForm.NONE:
        return text
    return unicodedata.normalize(form.name, text)


def strip_zero_width(text: str, chars: Iterable[str] = DEFAULT_ZERO_WIDTH) -> str:
    """Remove every code point in ``chars``, preserving all others in order.

    The set is configurable because emitters disagree on which invisible
    characters to drop; the default covers the usual four.
    """
    drop = frozenset(chars)
    return "".join(ch for ch in text if ch not in drop)
