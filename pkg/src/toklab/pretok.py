"""Compositional pre-tokenization.

Splits text into segments that bound all subsequent merges: no learner or
encoder in this package ever joins material across a segment boundary.
Scheme split rules live in versioned JSON files under ``data/pretok`` (an
ordered character-class transition list plus an explicit contraction list),
so fidelity fixes are data edits, not code changes.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from typing import Dict, List, Optional, Sequence, Union

from .errors import ResourceError, ValidationError

_WS_RUN = re.compile(r"\s+")

# Apostrophe variants that participate in contraction handling.
_APOSTROPHES = ("'", "’")


class Scheme(str, Enum):
    NONE = "none"
    GPT2 = "gpt2"
    GPT4 = "gpt4"
    GPT4O = "gpt4o"
    BERT = "bert"
    BLOOM = "bloom"
    SENTENCEPIECE = "sentencepiece"


class NumberMode(str, Enum):
    SPLIT = "split"
    GROUP = "group"
    GROUP3 = "group3"
    LEARNED = "learned"


class ContractionMode(str, Enum):
    GPT2LIST = "gpt2list"
    LEARNED = "learned"
    COMPOSED = "composed"


class WhitespaceMode(str, Enum):
    NORMALIZED = "normalized"
    LEARNED = "learned"
    MANUAL = "manual"
    INDIVIDUAL = "individual"


class SegmentKind(str, Enum):
    WORD = "word"
    NUMBER = "number"
    PUNCT = "punct"
    SPACE = "space"
    OTHER = "other"


@dataclass(frozen=True)
class Segment:
    """One pre-tokenization unit.  Segments are merge boundaries, so
    ``mergeable_with_next`` is always False."""

    text: str
    kind: SegmentKind
    mergeable_with_next: bool = False


@dataclass(frozen=True)
class SchemeRules:
    """Split rules loaded from a versioned scheme rule file."""

    name: str
    version: int
    transitions: frozenset
    punct_segments: str  # "run" | "char"
    attach_leading_space: bool
    apostrophe_when_learned: str  # "internal" | "punct" | "attach_listed"
    contractions: tuple
    match_case: bool
    defaults: Dict[str, str]


_RULES_CACHE: Dict[str, SchemeRules] = {}


def load_scheme_rules(scheme: Union[Scheme, str]) -> SchemeRules:
    """Load (and cache) the rule file for a scheme."""
    name = Scheme(scheme).value
    if name not in _RULES_CACHE:
        ref = resources.files("toklab.data.pretok").joinpath(f"{name}.json")
        try:
            raw = json.loads(ref.read_text(encoding="utf-8"))
        except FileNotFoundError as exc:  # pragma: no cover - packaging bug
            raise ResourceError(f"missing scheme rule file for {name!r}") from exc
        # Contractions longest-first so "'ll" wins over a hypothetical "'l".
        contractions = tuple(sorted(raw["contractions"], key=len, reverse=True))
        _RULES_CACHE[name] = SchemeRules(
            name=raw["name"],
            version=raw["version"],
            transitions=frozenset(raw["transitions"]),
            punct_segments=raw["punct_segments"],
            attach_leading_space=raw["attach_leading_space"],
            apostrophe_when_learned=raw["apostrophe_when_learned"],
            contractions=contractions,
            match_case=raw["match_case"],
            defaults=dict(raw["defaults"]),
        )
    return _RULES_CACHE[name]


@dataclass(frozen=True)
class PretokenPolicy:
    """Fully resolved pre-tokenization policy (every field set)."""

    scheme: Scheme
    number_mode: NumberMode
    contraction_mode: ContractionMode
    whitespace_mode: WhitespaceMode

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        object.__setattr__(self, "number_mode", NumberMode(self.number_mode))
        object.__setattr__(self, "contraction_mode", ContractionMode(self.contraction_mode))
        object.__setattr__(self, "whitespace_mode", WhitespaceMode(self.whitespace_mode))
        if self.scheme is Scheme.NONE:
            forced = (NumberMode.LEARNED, ContractionMode.LEARNED, WhitespaceMode.LEARNED)
            if (self.number_mode, self.contraction_mode, self.whitespace_mode) != forced:
                raise ValidationError(
                    "scheme 'none' is a raw stream: number/contraction/whitespace "
                    "modes must all be 'learned'"
                )

    @classmethod
    def for_scheme(
        cls,
        scheme: Union[Scheme, str],
        number_mode: Optional[Union[NumberMode, str]] = None,
        contraction_mode: Optional[Union[ContractionMode, str]] = None,
        whitespace_mode: Optional[Union[WhitespaceMode, str]] = None,
    ) -> "PretokenPolicy":
        """Build a policy from a scheme's rule-file defaults plus overrides."""
        rules = load_scheme_rules(scheme)
        d = rules.defaults
        return cls(
            scheme=Scheme(scheme),
            number_mode=NumberMode(number_mode or d["number_mode"]),
            contraction_mode=ContractionMode(contraction_mode or d["contraction_mode"]),
            whitespace_mode=WhitespaceMode(whitespace_mode or d["whitespace_mode"]),
        )

    @property
    def rules(self) -> SchemeRules:
        return load_scheme_rules(self.scheme)

    @property
    def attach_leading_space(self) -> bool:
        return self.rules.attach_leading_space

    def to_dict(self) -> Dict[str, str]:
        return {
            "scheme": self.scheme.value,
            "number_mode": self.number_mode.value,
            "contraction_mode": self.contraction_mode.value,
            "whitespace_mode": self.whitespace_mode.value,
        }

    @classmethod
    def from_dict(cls, d: Dict[str, str]) -> "PretokenPolicy":
        return cls(d["scheme"], d["number_mode"], d["contraction_mode"], d["whitespace_mode"])


def split_numbers(digits: str, mode: Union[NumberMode, str]) -> List[str]:
    """Subdivide a run of decimal digits according to ``mode``.

    GROUP3 chunks left-to-right with the remainder last ("1337" -> "133", "7").
    """
    mode = NumberMode(mode)
    if digits == "":
        return []
    if any(unicodedata.category(ch) != "Nd" for ch in digits):
        raise ValidationError(f"split_numbers requires decimal digits, got {digits!r}")
    if mode is NumberMode.SPLIT:
        return list(digits)
    if mode is NumberMode.GROUP3:
        return [digits[i : i + 3] for i in range(0, len(digits), 3)]
    # GROUP and LEARNED both leave the run whole; LEARNED marks it for the
    # learner by simply not splitting it from here on.
    return [digits]


#: Scheme rule-file names for the class transitions that can split; space
#: transitions always split and are absent here on purpose.
_TRANSITION_NAMES = {
    frozenset((SegmentKind.WORD, SegmentKind.NUMBER)): "letter-digit",
    frozenset((SegmentKind.WORD, SegmentKind.PUNCT)): "letter-punct",
    frozenset((SegmentKind.NUMBER, SegmentKind.PUNCT)): "digit-punct",
}


def _char_class(ch: str) -> SegmentKind:
    if ch.isspace():
        return SegmentKind.SPACE
    cat = unicodedata.category(ch)
    if cat == "Nd":
        return SegmentKind.NUMBER
    if cat[0] in ("L", "M") or cat in ("Nl", "No"):
        return SegmentKind.WORD
    return SegmentKind.PUNCT


def _split_contraction_atom(text: str, rules: SchemeRules, mode: ContractionMode) -> List[Segment]:
    """Break a word atom that may contain apostrophes into segments."""
    if mode is ContractionMode.LEARNED and rules.apostrophe_when_learned == "internal":
        return [Segment(text, SegmentKind.WORD)]

    out: List[Segment] = []
    buf: List[str] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch not in _APOSTROPHES:
            buf.append(ch)
            i += 1
            continue
        if mode is ContractionMode.COMPOSED:
            if buf:
                out.append(Segment("".join(buf), SegmentKind.WORD))
                buf = []
            out.append(Segment(ch, SegmentKind.PUNCT))
            i += 1
            continue
        # GPT2LIST, or LEARNED with "attach_listed"/"punct" policy.
        matched = None
        if mode is ContractionMode.GPT2LIST or (
            mode is ContractionMode.LEARNED and rules.apostrophe_when_learned == "attach_listed"
        ):
            rest = text[i:]
            probe = rest if rules.match_case else rest.lower()
            for c in rules.contractions:
                if probe.startswith(c):
                    matched = rest[: len(c)]
                    break
        if matched is None:
            if buf:
                out.append(Segment("".join(buf), SegmentKind.WORD))
                buf = []
            out.append(Segment(ch, SegmentKind.PUNCT))
            i += 1
        elif mode is ContractionMode.GPT2LIST:
            if buf:
                out.append(Segment("".join(buf), SegmentKind.WORD))
                buf = []
            out.append(Segment(matched, SegmentKind.WORD))
            i += len(matched)
        else:  # attach_listed keeps the contraction glued to the base word
            buf.append(matched)
            i += len(matched)
    if buf:
        out.append(Segment("".join(buf), SegmentKind.WORD))
    return out


def _scan_atoms(text: str, policy: PretokenPolicy) -> List[Segment]:
    """First pass: class runs with apostrophes glued into word runs."""
    rules = policy.rules
    atoms: List[Segment] = []
    buf: List[str] = []
    kind: Optional[SegmentKind] = None

    def flush():
        nonlocal buf, kind
        if buf:
            atoms.append(Segment("".join(buf), kind))
            buf, kind = [], None

    n = len(text)
    for i, ch in enumerate(text):
        cls = _char_class(ch)
        # Apostrophes between letters ride along with the word run; the
        # contraction pass below decides whether they split back out.
        if (
            ch in _APOSTROPHES
            and kind is SegmentKind.WORD
            and i + 1 < n
            and _char_class(text[i + 1]) is SegmentKind.WORD
            and policy.contraction_mode is not ContractionMode.COMPOSED
        ):
            cls = SegmentKind.WORD
        # Under learned number handling, letters and digits stay joined.
        if policy.number_mode is NumberMode.LEARNED:
            if cls is SegmentKind.NUMBER and kind is SegmentKind.WORD:
                cls = SegmentKind.WORD
            elif cls is SegmentKind.WORD and kind is SegmentKind.NUMBER:
                kind = SegmentKind.WORD

        if kind is None:
            kind = cls
            buf.append(ch)
            continue
        if cls is kind:
            boundary = (
                cls is SegmentKind.PUNCT and rules.punct_segments == "char"
            ) or (
                cls is SegmentKind.SPACE
                and policy.whitespace_mode is WhitespaceMode.INDIVIDUAL
            )
            if boundary:
                flush()
                kind = cls
            buf.append(ch)
            continue
        # Class changed: boundary unless the scheme omits this transition.
        transition = _TRANSITION_NAMES.get(frozenset((kind, cls)))
        if transition is not None and transition not in rules.transitions:
            # Merged classes degrade to WORD (e.g. letters+digits learned jointly).
            kind = SegmentKind.WORD
            buf.append(ch)
        else:
            flush()
            kind = cls
            buf.append(ch)
    flush()
    return atoms


def pretokenize(text: str, policy: PretokenPolicy) -> List[Segment]:
    """Segment ``text`` per the policy.

    Concatenating segment texts reproduces the input exactly, except under
    NORMALIZED whitespace where runs collapse to a single space first.
    """
    if not text:
        return []
    if policy.scheme is Scheme.NONE:
        # Raw stream: learners see the whole text as one segment.
        return [Segment(text, SegmentKind.OTHER)]

    if policy.whitespace_mode is WhitespaceMode.NORMALIZED:
        text = _WS_RUN.sub(" ", text)
        if not text:
            return []

    atoms = _scan_atoms(text, policy)

    out: List[Segment] = []
    for atom in atoms:
        if atom.kind is SegmentKind.SPACE or atom.kind is SegmentKind.PUNCT:
            out.append(atom)
        elif atom.kind is SegmentKind.NUMBER:
            for part in split_numbers(atom.text, policy.number_mode):
                out.append(Segment(part, SegmentKind.NUMBER))
        else:
            if any(a in atom.text for a in _APOSTROPHES):
                out.extend(_split_contraction_atom(atom.text, policy.rules, policy.contraction_mode))
            else:
                out.append(atom)

    if policy.rules.attach_leading_space:
        out = _attach_leading_spaces(out)
    return out


def _attach_leading_spaces(segments: Sequence[Segment]) -> List[Segment]:
    """Move a single trailing space of a whitespace segment onto the next
    non-space segment (GPT-2 family convention)."""
    out: List[Segment] = []
    i = 0
    while i < len(segments):
        seg = segments[i]
        nxt = segments[i + 1] if i + 1 < len(segments) else None
        if (
            seg.kind is SegmentKind.SPACE
            and seg.text.endswith(" ")
            and nxt is not None
            and nxt.kind is not SegmentKind.SPACE
        ):
            remainder = seg.text[:-1]
            if remainder:
                out.append(Segment(remainder, SegmentKind.SPACE))
            out.append(Segment(" " + nxt.text, nxt.kind))
            i += 2
        else:
            out.append(seg)
            i += 1
    return out
