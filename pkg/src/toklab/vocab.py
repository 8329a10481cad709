"""Vocabulary model, marker canonicalization, union super-vocabulary, and
shared embedding initialization.

Canonical forms are UTF-8 byte strings: a token that means the same text in
two vocabularies canonicalizes to the same bytes regardless of each
tokenizer's marker convention, so the union vocabulary assigns it a single
shared ID.  Word-internal WordPiece pieces get a 0x01 sentinel prefix so
"##x" and "x" never collapse.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union

import numpy as np

from .errors import CollisionError, ConventionError, ValidationError

#: Shared canonical form for every beginning-of-sequence marker.
BOS_CANONICAL = b"\x02<bos>"

#: Sentinel prefix marking a word-internal piece in canonical bytes.
INTERNAL_SENTINEL = b"\x01"

SP_UNDERSCORE_CHAR = "▁"


class Convention(str, Enum):
    PLAIN = "plain"
    WORDPIECE_HASH = "wordpiece_hash"
    SP_UNDERSCORE = "sp_underscore"
    BYTE_LEVEL = "byte_level"


@dataclass
class Vocabulary:
    """Bijective token-string <-> dense-ID table with provenance metadata."""

    entries: List[str]
    convention: Convention = Convention.PLAIN
    bos_string: Optional[str] = None
    specials: Set[str] = field(default_factory=set)
    meta: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.convention = Convention(self.convention)
        self.entries = list(self.entries)
        self._index = {tok: i for i, tok in enumerate(self.entries)}
        if len(self._index) != len(self.entries):
            dupes = [t for t in self._index if self.entries.count(t) > 1]
            raise ValidationError(f"duplicate token strings in vocabulary: {dupes[:5]}")
        if self.bos_string is not None and self.bos_string not in self._index:
            raise ValidationError(f"bos_string {self.bos_string!r} is not a vocabulary entry")
        self.specials = set(self.specials)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def id_of(self, token: str) -> int:
        return self._index[token]

    def token_of(self, idx: int) -> str:
        return self.entries[idx]

    def strings(self) -> List[str]:
        return list(self.entries)

    @property
    def name(self) -> str:
        return self.meta.get("name", "unnamed")

    def has_byte_tokens(self) -> bool:
        return all(f"<0x{b:02X}>" in self._index for b in range(256))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "convention": self.convention.value,
            "bos": self.bos_string,
            "specials": sorted(self.specials),
            "meta": dict(self.meta),
            "entries": list(self.entries),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Vocabulary":
        meta = dict(d.get("meta", {}))
        if "name" in d:
            meta.setdefault("name", d["name"])
        return cls(
            entries=list(d["entries"]),
            convention=Convention(d.get("convention", "plain")),
            bos_string=d.get("bos"),
            specials=set(d.get("specials", [])),
            meta=meta,
        )

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True, indent=2) + "\n",
            encoding="utf-8",
        )

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Vocabulary":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def canonical_form(
    token: str,
    convention: Union[Convention, str],
    bos_string: Optional[str] = None,
) -> bytes:
    """Marker-free UTF-8 byte form of one token.

    BOS strings collapse to one shared marker so differently-spelled
    sequence starts unify.
    """
    convention = Convention(convention)
    if bos_string is not None and token == bos_string:
        return BOS_CANONICAL
    if convention is Convention.WORDPIECE_HASH:
        if token.startswith("##"):
            body = token[2:]
            if body == "":
                raise ConventionError("'##' alone is not a valid WordPiece token")
            return INTERNAL_SENTINEL + body.encode("utf-8")
        return token.encode("utf-8")
    if convention is Convention.SP_UNDERSCORE:
        return token.replace(SP_UNDERSCORE_CHAR, " ").encode("utf-8")
    # PLAIN and BYTE_LEVEL: the token string's bytes are already canonical.
    return token.encode("utf-8")


@dataclass
class SuperVocab:
    """Union vocabulary over canonical byte forms with per-tokenizer maps."""

    canon_entries: List[bytes]
    forward: Dict[str, List[int]]  # tokenizer name -> dense id -> sv_id

    def __post_init__(self):
        self._canon_index = {c: i for i, c in enumerate(self.canon_entries)}
        self._backward: Dict[str, Dict[int, int]] = {
            name: {sv: i for i, sv in enumerate(m)} for name, m in self.forward.items()
        }

    def __len__(self) -> int:
        return len(self.canon_entries)

    @property
    def tokenizers(self) -> List[str]:
        return sorted(self.forward)

    def sv_id_of(self, canon: bytes) -> int:
        return self._canon_index[canon]

    def map_to_super(self, tokenizer: str, idx: int) -> int:
        if tokenizer not in self.forward:
            raise ValidationError(f"tokenizer {tokenizer!r} is not registered")
        return self.forward[tokenizer][idx]

    def map_from_super(self, tokenizer: str, sv_id: int) -> Optional[int]:
        if tokenizer not in self.forward:
            raise ValidationError(f"tokenizer {tokenizer!r} is not registered")
        return self._backward[tokenizer].get(sv_id)

    def to_dict(self) -> dict:
        return {
            "canon_entries": [base64.b64encode(c).decode("ascii") for c in self.canon_entries],
            "maps": {name: list(m) for name, m in sorted(self.forward.items())},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SuperVocab":
        return cls(
            canon_entries=[base64.b64decode(s) for s in d["canon_entries"]],
            forward={name: list(m) for name, m in d["maps"].items()},
        )

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )

    @classmethod
    def load(cls, path: Union[str, Path]) -> "SuperVocab":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _canonicalize_vocab(vocab: Vocabulary) -> List[bytes]:
    forms: List[bytes] = []
    seen: Dict[bytes, str] = {}
    collisions: List[Tuple[str, str]] = []
    for token in vocab.entries:
        canon = canonical_form(token, vocab.convention, vocab.bos_string)
        if canon in seen:
            collisions.append((seen[canon], token))
        else:
            seen[canon] = token
        forms.append(canon)
    if collisions:
        raise CollisionError(
            f"canonicalization collapsed {len(collisions)} token pair(s) in "
            f"vocabulary {vocab.name!r}",
            collisions,
        )
    return forms


def build_super_vocab(vocabs: Sequence[Vocabulary]) -> SuperVocab:
    """Union of canonical forms; sv_ids assigned by sorted canonical bytes."""
    if not vocabs:
        raise ValidationError("build_super_vocab requires at least one vocabulary")
    names = [v.name for v in vocabs]
    if len(set(names)) != len(names):
        raise ValidationError(f"vocabulary names must be unique, got {names}")

    per_vocab_forms = [_canonicalize_vocab(v) for v in vocabs]
    canon_entries = sorted(set().union(*[set(f) for f in per_vocab_forms]))
    index = {c: i for i, c in enumerate(canon_entries)}
    forward = {
        vocab.name: [index[c] for c in forms]
        for vocab, forms in zip(vocabs, per_vocab_forms)
    }
    return SuperVocab(canon_entries=canon_entries, forward=forward)


def shared_token_count(sv: SuperVocab, name_a: str, name_b: str) -> int:
    """How many sv_ids have preimages in both tokenizers."""
    return len(set(sv.forward[name_a]) & set(sv.forward[name_b]))


class SharedInit:
    """Deterministic shared embedding rows keyed by (seed, sv_id).

    Each row comes from a counter-based generator, so row values do not
    depend on the order rows are materialized in; per-tokenizer matrices
    select rows through the super-vocabulary map, which makes shared tokens
    start from identical vectors in every model.
    """

    def __init__(self, sv: SuperVocab, dim: int, seed: int = 0, scale: float = 0.02):
        if dim <= 0:
            raise ValidationError("embedding dim must be positive")
        self.sv = sv
        self.dim = dim
        self.seed = int(seed)
        self.scale = float(scale)

    def row(self, sv_id: int) -> np.ndarray:
        if not (0 <= sv_id < len(self.sv)):
            raise ValidationError(f"sv_id {sv_id} out of range")
        key = (np.uint64(self.seed) << np.uint64(32)) ^ np.uint64(sv_id)
        rng = np.random.Generator(np.random.Philox(key=int(key)))
        return rng.normal(0.0, self.scale, self.dim)

    def full_matrix(self) -> np.ndarray:
        return np.vstack([self.row(i) for i in range(len(self.sv))])

    def matrix_for(self, tokenizer: str) -> np.ndarray:
        ids = self.sv.forward.get(tokenizer)
        if ids is None:
            raise ValidationError(f"tokenizer {tokenizer!r} is not registered")
        return np.vstack([self.row(sv_id) for sv_id in ids])


def init_embeddings(sv: SuperVocab, dim: int, seed: int = 0, scale: float = 0.02) -> SharedInit:
    """Shared-row initialization over the super vocabulary."""
    return SharedInit(sv, dim, seed, scale)
