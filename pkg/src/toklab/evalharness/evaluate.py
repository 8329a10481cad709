"""Grouped robustness evaluation: accuracies, relative drops, statistics.

Choices are scored as byte-length normalized log-likelihoods: the raw
scorer output for (context, separator + choice) divided by the choice's
UTF-8 byte length.  The separator is a fixed single space and its bytes
are excluded from the normalization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from ..errors import InsufficientDataError, UndefinedMetricError, ValidationError
from .items import BenchmarkItem, validate_items
from .stats import DEFAULT_TRIALS, BootstrapResult, bootstrap, wilcoxon_signed_rank

SEPARATOR = " "

GROUPING_KEYS = ("language", "category", "subcategory", "perturbation_label")


def choice_scores(item: BenchmarkItem, scorer) -> List[float]:
    """Byte-normalized score per choice, in choice order."""
    scores = []
    for choice in item.choices:
        nbytes = len(choice.encode("utf-8"))
        if nbytes == 0:
            raise ValidationError(f"item {item.id!r}: zero-byte choice")
        raw = scorer.score(item.context, SEPARATOR + choice)
        scores.append(raw / nbytes)
    return scores


def select_choice(item: BenchmarkItem, scorer) -> int:
    """Argmax choice index; ties go to the lowest index."""
    scores = choice_scores(item, scorer)
    best = max(scores)
    return scores.index(best)


def accuracy(items: Sequence[BenchmarkItem], scorer) -> float:
    if not items:
        raise UndefinedMetricError("accuracy is undefined for an empty group")
    hits = sum(1 for item in items if select_choice(item, scorer) == item.correct_index)
    return hits / len(items)


def relative_drop(acc_can: float, acc_pert: float) -> float:
    """(Acc_can - Acc_pert) / Acc_can; negative when perturbation helps."""
    if acc_can <= 0:
        raise UndefinedMetricError("relative drop is undefined when canonical accuracy is 0")
    return (acc_can - acc_pert) / acc_can


@dataclass
class GroupResult:
    key: Tuple[str, ...]
    n_items: int
    acc_canonical: float
    acc_perturbed: float
    drop: Optional[float]
    bootstrap: Optional[BootstrapResult]

    def to_dict(self) -> dict:
        return {
            "key": list(self.key),
            "n_items": self.n_items,
            "acc_canonical": self.acc_canonical,
            "acc_perturbed": self.acc_perturbed,
            "drop": self.drop,
            "bootstrap": self.bootstrap.to_dict() if self.bootstrap else None,
        }


@dataclass
class EvalReport:
    grouping: Tuple[str, ...]
    groups: Dict[str, "GroupResult"]
    wilcoxon: Dict[str, dict] = field(default_factory=dict)
    metadata: Dict[str, object] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "grouping": list(self.grouping),
            "groups": {k: g.to_dict() for k, g in sorted(self.groups.items())},
            "wilcoxon": dict(sorted(self.wilcoxon.items())),
            "metadata": dict(sorted(self.metadata.items())),
        }

    def to_tsv(self) -> str:
        cols = [
            "group", "n_items", "acc_canonical", "acc_perturbed", "drop",
            "boot_mean", "boot_std", "boot_p2_5", "boot_p97_5",
        ]
        lines = ["\t".join(cols)]
        for key, g in sorted(self.groups.items()):
            b = g.bootstrap
            row = [
                key,
                str(g.n_items),
                f"{g.acc_canonical:.6f}",
                f"{g.acc_perturbed:.6f}",
                "" if g.drop is None else f"{g.drop:.6f}",
                "" if b is None else f"{b.mean:.6f}",
                "" if b is None else f"{b.std:.6f}",
                "" if b is None else f"{b.p2_5:.6f}",
                "" if b is None else f"{b.p97_5:.6f}",
            ]
            lines.append("\t".join(row))
        return "\n".join(lines) + "\n"


def _group_key(item: BenchmarkItem, keys: Sequence[str]) -> Tuple[str, ...]:
    return tuple(str(getattr(item, k) or "") for k in keys)


def evaluate(
    items: Sequence[BenchmarkItem],
    scorer,
    grouping: Sequence[str] = ("category",),
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    compare_scorers: Optional[Mapping[str, object]] = None,
) -> EvalReport:
    """Per-group canonical vs perturbed accuracy and relative drop.

    Perturbed items are grouped by ``grouping``; each one is paired with
    its canonical counterpart, so the canonical accuracy of a group is the
    accuracy over those paired canonical items.  Bootstrap statistics are
    over per-item drop indicators (canonical-correct minus
    perturbed-correct).  ``compare_scorers`` adds pairwise Wilcoxon tests
    between the main scorer and each named alternative over those same
    indicators.
    """
    for key in grouping:
        if key not in GROUPING_KEYS:
            raise ValidationError(f"unknown grouping key {key!r}")
    items = list(items)
    validate_items(items)
    by_id = {item.id: item for item in items}
    perturbed = [item for item in items if not item.is_canonical]
    if not perturbed:
        raise UndefinedMetricError("no perturbed items to evaluate")

    groups: Dict[Tuple[str, ...], List[BenchmarkItem]] = {}
    for item in sorted(perturbed, key=lambda it: it.id):
        groups.setdefault(_group_key(item, grouping), []).append(item)

    def indicators(scorer_obj) -> Dict[str, Tuple[int, int]]:
        out: Dict[str, Tuple[int, int]] = {}
        for item in perturbed:
            canonical = by_id[item.canonical_id]
            can_ok = int(select_choice(canonical, scorer_obj) == canonical.correct_index)
            pert_ok = int(select_choice(item, scorer_obj) == item.correct_index)
            out[item.id] = (can_ok, pert_ok)
        return out

    main = indicators(scorer)

    results: Dict[str, GroupResult] = {}
    for key in sorted(groups):
        members = groups[key]
        can_hits = [main[m.id][0] for m in members]
        pert_hits = [main[m.id][1] for m in members]
        acc_can = sum(can_hits) / len(members)
        acc_pert = sum(pert_hits) / len(members)
        drop = relative_drop(acc_can, acc_pert) if acc_can > 0 else None
        drops = [c - p for c, p in zip(can_hits, pert_hits)]
        boot = bootstrap(drops, trials=trials, seed=seed) if drops else None
        results["/".join(key)] = GroupResult(
            key=key,
            n_items=len(members),
            acc_canonical=acc_can,
            acc_perturbed=acc_pert,
            drop=drop,
            bootstrap=boot,
        )

    wilcoxon_block: Dict[str, dict] = {}
    if compare_scorers:
        ordered_ids = sorted(main)
        main_drops = [float(main[i][0] - main[i][1]) for i in ordered_ids]
        for name, other in sorted(compare_scorers.items()):
            other_ind = indicators(other)
            other_drops = [float(other_ind[i][0] - other_ind[i][1]) for i in ordered_ids]
            try:
                res = wilcoxon_signed_rank(main_drops, other_drops)
                wilcoxon_block[name] = res.to_dict()
            except InsufficientDataError as exc:
                wilcoxon_block[name] = {"error": str(exc)}

    scorer_id = getattr(scorer, "name", type(scorer).__name__)
    return EvalReport(
        grouping=tuple(grouping),
        groups=results,
        wilcoxon=wilcoxon_block,
        metadata={
            "seed": seed,
            "trials": trials,
            "scorer": scorer_id,
            "n_items": len(items),
            "n_perturbed": len(perturbed),
            "separator": SEPARATOR,
        },
    )
