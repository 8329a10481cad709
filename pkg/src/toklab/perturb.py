"""Seeded, deterministic text perturbations.

Per-position edits draw from a counter-based generator keyed by
(seed, position), so a perturbation at one position is stable under
unrelated changes elsewhere.  Whole-string styles (Unicode styling, case,
spacing, hyphenation) ignore the rate.  Semantic rewrites (translations,
dialects, register) are never generated here; they arrive as benchmark
data.
"""

from __future__ import annotations

import hashlib
import json
import unicodedata
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from .errors import ResourceError, ValidationError


class Category(str, Enum):
    HOMOGLYPH = "homoglyph"
    ZERO_WIDTH_INSERT = "zero_width_insert"
    KEYBOARD_TYPO = "keyboard_typo"
    OCR = "ocr"
    CHAR_DELETE = "char_delete"
    SPACE_REMOVE = "space_remove"
    CHAR_SWAP = "char_swap"
    UNICODE_STYLE = "unicode_style"
    CASE_LOWER = "case_lower"
    CASE_CAPITALIZED = "case_capitalized"
    SPACED = "spaced"
    HYPHENATED = "hyphenated"
    DIACRITICIZED = "diacriticized"


class Style(str, Enum):
    FULLWIDTH = "fullwidth"
    SCRIPT = "script"
    DOUBLE_STRUCK = "double_struck"
    ENCLOSED = "enclosed"
    SUPERSCRIPT = "superscript"
    SUBSCRIPT = "subscript"
    UPSIDE_DOWN = "upside_down"
    DECORATIVE = "decorative"


#: Styles whose tables are built by inverting NFKC compatibility mappings,
#: so NFKC normalization recovers the original ASCII exactly.
NFKC_INVERTIBLE_STYLES = frozenset(
    {Style.FULLWIDTH, Style.SCRIPT, Style.DOUBLE_STRUCK, Style.ENCLOSED,
     Style.SUPERSCRIPT, Style.SUBSCRIPT}
)

WHOLE_STRING_CATEGORIES = frozenset(
    {Category.UNICODE_STYLE, Category.CASE_LOWER, Category.CASE_CAPITALIZED,
     Category.SPACED, Category.HYPHENATED}
)

_DEFAULT_TABLES = {
    Category.HOMOGLYPH: "homoglyphs_latin",
    Category.KEYBOARD_TYPO: "qwerty_en",
    Category.OCR: "ocr_confusions",
    Category.DIACRITICIZED: "diacritics_latin",
}


@dataclass(frozen=True)
class MappingTable:
    """Character mapping resource.

    ``choice`` tables map a character to a string of alternatives and the
    engine picks one; plain tables map to a replacement string.
    """

    name: str
    entries: Dict[str, str]
    bidirectional: bool = False
    choice: bool = False

    def __post_init__(self):
        for src, repl in self.entries.items():
            if repl == src:
                raise ValidationError(f"table {self.name!r} maps {src!r} to itself")
        if self.bidirectional:
            values = list(self.entries.values())
            if len(set(values)) != len(values):
                raise ValidationError(f"bidirectional table {self.name!r} is not injective")

    @classmethod
    def from_dict(cls, d: dict) -> "MappingTable":
        return cls(
            name=d["name"],
            entries={chr(int(cp, 16)): repl for cp, repl in d["entries"].items()},
            bidirectional=bool(d.get("bidirectional", False)),
            choice=bool(d.get("choice", False)),
        )


def load_table(name_or_path: str) -> MappingTable:
    """Load a shipped table by name or a user table from a JSON path."""
    path = Path(name_or_path)
    if path.suffix == ".json" and path.exists():
        return MappingTable.from_dict(json.loads(path.read_text(encoding="utf-8")))
    ref = resources.files("toklab.data.perturb").joinpath(f"{name_or_path}.json")
    try:
        raw = ref.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise ResourceError(f"no mapping table named {name_or_path!r}") from exc
    return MappingTable.from_dict(json.loads(raw))


@dataclass(frozen=True)
class PerturbationSpec:
    category: Category
    style: Optional[Style] = None
    rate: float = 1.0
    seed: int = 0
    table: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "category", Category(self.category))
        if self.style is not None:
            object.__setattr__(self, "style", Style(self.style))
        if self.category is Category.UNICODE_STYLE and self.style is None:
            raise ValidationError("UNICODE_STYLE requires a style")
        if self.category is not Category.UNICODE_STYLE and self.style is not None:
            raise ValidationError("style is only meaningful for UNICODE_STYLE")
        if not (0.0 < self.rate <= 1.0):
            raise ValidationError("rate must be in (0, 1]")


@dataclass(frozen=True)
class PerturbResult:
    text: str
    changed: bool
    eligible: int

    @property
    def noop(self) -> bool:
        return self.eligible == 0


def _position_draw(seed: int, position: int, salt: str = "") -> float:
    """Uniform [0, 1) draw keyed by (seed, position, salt)."""
    payload = f"{seed}:{position}:{salt}".encode("utf-8")
    digest = hashlib.blake2b(payload, digest_size=8).digest()
    return int.from_bytes(digest, "big") / 2**64


def _position_choice(seed: int, position: int, n: int, salt: str = "alt") -> int:
    payload = f"{seed}:{position}:{salt}".encode("utf-8")
    digest = hashlib.blake2b(payload, digest_size=8).digest()
    return int.from_bytes(digest, "big") % n


_STYLE_CACHE: Dict[Style, MappingTable] = {}

# Unicode name markers identifying each NFKC-invertible style family.
_STYLE_MARKERS = {
    Style.FULLWIDTH: ("FULLWIDTH",),
    Style.SCRIPT: ("SCRIPT CAPITAL", "SCRIPT SMALL", "MATHEMATICAL SCRIPT"),
    Style.DOUBLE_STRUCK: ("DOUBLE-STRUCK",),
    Style.ENCLOSED: ("CIRCLED",),
    Style.SUPERSCRIPT: ("SUPERSCRIPT", "MODIFIER LETTER SMALL", "MODIFIER LETTER CAPITAL"),
    Style.SUBSCRIPT: ("SUBSCRIPT",),
}
_STYLE_EXCLUDE = ("BOLD", "ITALIC", "SANS-SERIF", "NEGATIVE", "DOUBLE CIRCLED")

_ASCII_ALNUM = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789")


def build_style_table(style: Union[Style, str]) -> MappingTable:
    """Mapping table for one styling family.

    For NFKC-invertible styles the table is derived from the Unicode
    database: a styled character is included only if NFKC maps it back to
    exactly the ASCII letter or digit it stands for.  Curated styles load
    shipped resources.
    """
    style = Style(style)
    if style in _STYLE_CACHE:
        return _STYLE_CACHE[style]
    if style not in NFKC_INVERTIBLE_STYLES:
        table = load_table(style.value)
        _STYLE_CACHE[style] = table
        return table

    markers = _STYLE_MARKERS[style]
    best: Dict[str, str] = {}
    for cp in range(0x80, 0x20000):
        ch = chr(cp)
        name = unicodedata.name(ch, "")
        if not name or not any(m in name for m in markers):
            continue
        if any(x in name for x in _STYLE_EXCLUDE):
            continue
        plain = unicodedata.normalize("NFKC", ch)
        if len(plain) != 1 or plain not in _ASCII_ALNUM:
            continue
        if plain not in best or ord(ch) < ord(best[plain]):
            best[plain] = ch
    table = MappingTable(name=f"style_{style.value}", entries=best)
    _STYLE_CACHE[style] = table
    return table


def _resolve_table(spec: PerturbationSpec) -> Optional[MappingTable]:
    if spec.category is Category.UNICODE_STYLE:
        return build_style_table(spec.style)
    if spec.table is not None:
        return load_table(spec.table)
    default = _DEFAULT_TABLES.get(spec.category)
    return load_table(default) if default else None


def perturb(text: str, spec: PerturbationSpec) -> PerturbResult:
    """Apply one perturbation; pure in (text, spec) including the seed.

    When the text has no eligible position the input comes back with the
    no-op flag set (``eligible == 0``) rather than silently unchanged.
    """
    table = _resolve_table(spec)
    cat = spec.category

    if cat in WHOLE_STRING_CATEGORIES:
        out, eligible = _whole_string(text, cat, table)
    elif cat is Category.ZERO_WIDTH_INSERT:
        out, eligible = _insert_zero_width(text, spec)
    elif cat is Category.CHAR_SWAP:
        out, eligible = _swap_adjacent(text, spec)
    elif cat is Category.CHAR_DELETE:
        out, eligible = _delete(text, spec, lambda ch: not ch.isspace())
    elif cat is Category.SPACE_REMOVE:
        out, eligible = _delete(text, spec, lambda ch: ch.isspace())
    else:  # table-driven per-position substitution
        if table is None:
            raise ResourceError(f"category {cat.value} requires a mapping table")
        out, eligible = _substitute(text, spec, table)

    return PerturbResult(text=out, changed=out != text, eligible=eligible)


def _whole_string(text: str, cat: Category, table: Optional[MappingTable]) -> Tuple[str, int]:
    if cat is Category.CASE_LOWER:
        eligible = sum(1 for ch in text if ch != ch.lower())
        return text.lower(), eligible
    if cat is Category.CASE_CAPITALIZED:
        words = text.split(" ")
        out = " ".join(w[:1].upper() + w[1:] if w else w for w in words)
        eligible = sum(1 for w in words if w and w[0] != w[0].upper())
        return out, eligible
    if cat is Category.SPACED:
        if len(text) < 2:
            return text, 0
        return " ".join(text), len(text) - 1
    if cat is Category.HYPHENATED:
        out_words = []
        eligible = 0
        for w in text.split(" "):
            if len(w) >= 2:
                eligible += len(w) - 1
                out_words.append("-".join(w))
            else:
                out_words.append(w)
        return " ".join(out_words), eligible
    # UNICODE_STYLE
    mapped = [table.entries.get(ch, ch) for ch in text]
    eligible = sum(1 for ch in text if ch in table.entries)
    return "".join(mapped), eligible


def _substitute(text: str, spec: PerturbationSpec, table: MappingTable) -> Tuple[str, int]:
    out: List[str] = []
    eligible = 0
    for i, ch in enumerate(text):
        repl = table.entries.get(ch)
        if repl is None:
            out.append(ch)
            continue
        eligible += 1
        if _position_draw(spec.seed, i) >= spec.rate:
            out.append(ch)
            continue
        if table.choice:
            repl = repl[_position_choice(spec.seed, i, len(repl))]
        out.append(repl)
    return "".join(out), eligible


ZERO_WIDTH_SPACE = "​"


def _insert_zero_width(text: str, spec: PerturbationSpec) -> Tuple[str, int]:
    out: List[str] = []
    eligible = 0
    for i, ch in enumerate(text):
        out.append(ch)
        if i + 1 >= len(text):
            break
        eligible += 1
        if _position_draw(spec.seed, i + 1) < spec.rate:
            out.append(ZERO_WIDTH_SPACE)
    return "".join(out), eligible


def _swap_adjacent(text: str, spec: PerturbationSpec) -> Tuple[str, int]:
    chars = list(text)
    eligible = 0
    i = 0
    while i < len(chars) - 1:
        if chars[i].isspace() or chars[i + 1].isspace() or chars[i] == chars[i + 1]:
            i += 1
            continue
        eligible += 1
        if _position_draw(spec.seed, i) < spec.rate:
            chars[i], chars[i + 1] = chars[i + 1], chars[i]
            i += 2  # swapped pairs do not overlap
        else:
            i += 1
    return "".join(chars), eligible


def _delete(text: str, spec: PerturbationSpec, predicate) -> Tuple[str, int]:
    out: List[str] = []
    eligible = 0
    for i, ch in enumerate(text):
        if predicate(ch):
            eligible += 1
            if _position_draw(spec.seed, i) < spec.rate:
                continue
        out.append(ch)
    return "".join(out), eligible
