"""Benchmark items: one multiple-choice completion per JSONL line."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Union

from ..errors import ValidationError

_FIELDS = (
    "id",
    "language",
    "category",
    "subcategory",
    "context",
    "choices",
    "correct_index",
    "canonical_id",
    "perturbation_label",
)


@dataclass(frozen=True)
class BenchmarkItem:
    id: str
    language: str
    category: str
    subcategory: str
    context: str
    choices: tuple
    correct_index: int
    canonical_id: str
    perturbation_label: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "choices", tuple(self.choices))
        if len(self.choices) < 2:
            raise ValidationError(f"item {self.id!r}: needs at least two choices")
        if not (0 <= self.correct_index < len(self.choices)):
            raise ValidationError(f"item {self.id!r}: correct_index out of range")
        if self.is_canonical and self.perturbation_label is not None:
            raise ValidationError(f"item {self.id!r}: canonical items carry no perturbation label")
        if not self.is_canonical and not self.perturbation_label:
            raise ValidationError(f"item {self.id!r}: perturbed items need a perturbation label")

    @property
    def is_canonical(self) -> bool:
        return self.canonical_id == self.id

    @property
    def correct_choice(self) -> str:
        return self.choices[self.correct_index]

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "language": self.language,
            "category": self.category,
            "subcategory": self.subcategory,
            "context": self.context,
            "choices": list(self.choices),
            "correct_index": self.correct_index,
            "canonical_id": self.canonical_id,
            "perturbation_label": self.perturbation_label,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BenchmarkItem":
        missing = [k for k in _FIELDS if k not in d and k != "perturbation_label"]
        if missing:
            raise ValidationError(f"benchmark record is missing fields: {missing}")
        return cls(
            id=str(d["id"]),
            language=d["language"],
            category=d["category"],
            subcategory=d["subcategory"],
            context=d["context"],
            choices=tuple(d["choices"]),
            correct_index=int(d["correct_index"]),
            canonical_id=str(d["canonical_id"]),
            perturbation_label=d.get("perturbation_label"),
        )


def validate_items(items: Sequence[BenchmarkItem]) -> None:
    """Reject duplicate ids and perturbed items with dangling canonical ids."""
    seen: Dict[str, BenchmarkItem] = {}
    for item in items:
        if item.id in seen:
            raise ValidationError(f"duplicate item id {item.id!r}")
        seen[item.id] = item
    dangling = sorted(
        item.id for item in items
        if not item.is_canonical and item.canonical_id not in seen
    )
    if dangling:
        raise ValidationError(
            f"{len(dangling)} perturbed item(s) reference missing canonical ids: {dangling[:10]}"
        )
    for item in items:
        if not item.is_canonical and not seen[item.canonical_id].is_canonical:
            raise ValidationError(
                f"item {item.id!r}: canonical_id {item.canonical_id!r} is not a canonical item"
            )


def load_items(path: Union[str, Path], validate: bool = True) -> List[BenchmarkItem]:
    items: List[BenchmarkItem] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                items.append(BenchmarkItem.from_dict(json.loads(line)))
            except (json.JSONDecodeError, ValidationError) as exc:
                raise ValidationError(f"{path}:{lineno}: {exc}") from exc
    if validate:
        validate_items(items)
    return items


def save_items(items: Iterable[BenchmarkItem], path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for item in items:
            fh.write(json.dumps(item.to_dict(), ensure_ascii=False, sort_keys=True) + "\n")
