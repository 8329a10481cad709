"""Command-line front-end wiring the modules into reproducible runs.

Exit codes: 0 ok, 1 usage error, 2 validation error, 3 IO/resource error.
Report payloads never contain timestamps or absolute paths, so a rerun
with the same inputs and seed produces byte-identical files; volatile run
metadata goes to an optional sidecar.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
import time
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from . import __version__
from .errors import ResourceError, ToklabError, ValidationError
from .evalharness import (
    AntiOracleScorer,
    CharFrequencyScorer,
    OracleScorer,
    SubprocessScorer,
    evaluate,
    load_items,
    save_items,
)
from .evalharness.items import BenchmarkItem
from .metrics import SplitMode, WordSplitter, bytes_for_token_budget, metrics_report
from .perturb import Category, PerturbationSpec, Style, perturb
from .pipeline import TokenizerPipeline
from .textnorm import UNICODE_VERSION
from .vocab import Vocabulary, build_super_vocab, shared_token_count

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_IO = 3


def _dump_json(payload: dict, out: Optional[str]) -> None:
    text = json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _write_sidecar(out: Optional[str], args: argparse.Namespace) -> None:
    if not (out and getattr(args, "sidecar", False)):
        return
    meta = {
        "written_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "argv": sys.argv[1:],
        "cwd": str(Path.cwd()),
        "toklab_version": __version__,
        "unicode_version": UNICODE_VERSION,
    }
    Path(out + ".meta.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _read_lines(path: str) -> List[str]:
    return Path(path).read_text(encoding="utf-8").splitlines()


# -- commands ---------------------------------------------------------------------


def cmd_train(args: argparse.Namespace) -> int:
    corpus = _read_lines(args.corpus)
    pipe = TokenizerPipeline(
        algorithm=args.algo,
        norm_form=args.norm_form,
        strip_zero_width=args.strip_zero_width,
        scheme=args.scheme,
        number_mode=args.number_mode,
        contraction_mode=args.contraction_mode,
        whitespace_mode=args.whitespace_mode,
        vocab_size=args.size,
        byte_fallback=args.byte_fallback,
        specials=tuple(args.special),
        name=args.name,
    )
    pipe.fit(corpus)
    pipe.save(args.out)
    _write_sidecar(args.out, args)
    model = pipe.model_
    extra = ""
    if model is not None and getattr(model, "truncated", False):
        extra = " (warning: target size unreachable, model is short)"
    print(f"trained {args.algo}: vocab={len(pipe.vocab_)}{extra}")
    return EXIT_OK


def cmd_encode(args: argparse.Namespace) -> int:
    pipe = TokenizerPipeline.load(args.model)
    text = args.text if args.text is not None else sys.stdin.read()
    tokens = pipe.encode(text.rstrip("\n"))
    if args.format == "json":
        _dump_json({"tokens": tokens}, args.out)
    else:
        body = "\n".join(tokens) + ("\n" if tokens else "")
        if args.out:
            Path(args.out).write_text(body, encoding="utf-8")
        else:
            sys.stdout.write(body)
    return EXIT_OK


def _load_vocab_file(path: str) -> Vocabulary:
    blob = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(blob, dict) and blob.get("format") == "toklab-pipeline":
        pipe = TokenizerPipeline.from_dict(blob)
        vocab = pipe.vocab_
        if vocab.name == "unnamed":
            vocab.meta["name"] = Path(path).stem
        return vocab
    vocab = Vocabulary.from_dict(blob)
    if vocab.name == "unnamed":
        vocab.meta["name"] = Path(path).stem
    return vocab


def cmd_unify(args: argparse.Namespace) -> int:
    vocabs = [_load_vocab_file(p) for p in args.vocabs]
    sv = build_super_vocab(vocabs)
    sv.save(args.out)
    _write_sidecar(args.out, args)
    names = [v.name for v in vocabs]
    print(f"super vocabulary: {len(sv)} entries from {len(vocabs)} vocabularies")
    if len(names) == 2:
        print(f"shared={shared_token_count(sv, names[0], names[1])}")
    else:
        for i in range(len(names)):
            for j in range(i + 1, len(names)):
                n = shared_token_count(sv, names[i], names[j])
                print(f"shared[{names[i]},{names[j]}]={n}")
    return EXIT_OK


def cmd_metrics(args: argparse.Namespace) -> int:
    corpus = _read_lines(args.corpus)
    reference = _read_lines(args.parallel_ref) if args.parallel_ref else None
    splitter = WordSplitter(SplitMode(args.splitter))

    per_model: Dict[str, dict] = {}
    for path in args.model:
        pipe = TokenizerPipeline.load(path)
        name = pipe.vocab_.name
        if name in per_model or name == "unnamed":
            name = f"{name}:{Path(path).stem}"
        payload = metrics_report(pipe, corpus, splitter, reference).to_dict()
        if args.token_budget:
            budget = bytes_for_token_budget(pipe, corpus, args.token_budget)
            payload["bytes_for_budget"] = budget.bytes_consumed
            payload["budget_exhausted"] = budget.exhausted
        per_model[name] = payload

    config = {
        "command": "metrics",
        "splitter": args.splitter,
        "token_budget": args.token_budget,
        "has_parallel_ref": reference is not None,
        "seed": args.seed,
    }
    if args.format == "tsv":
        # comparison-table layout: one row per metric, one column per tokenizer
        names = sorted(per_model)
        rows = sorted({k for p in per_model.values() for k in p if not isinstance(p[k], dict)})
        lines = ["\t".join(["metric"] + names)]
        for row in rows:
            lines.append("\t".join([row] + [str(per_model[n].get(row, "")) for n in names]))
        body = "\n".join(lines) + "\n"
        if args.out:
            Path(args.out).write_text(body, encoding="utf-8")
        else:
            sys.stdout.write(body)
    else:
        _dump_json({"config": config, "models": per_model}, args.out)
    _write_sidecar(args.out, args)
    return EXIT_OK


def cmd_perturb(args: argparse.Namespace) -> int:
    items = load_items(args.input)
    spec = PerturbationSpec(
        category=Category(args.category),
        style=Style(args.style) if args.style else None,
        rate=args.rate,
        seed=args.seed,
        table=args.table,
    )
    label = args.label or (
        f"{spec.category.value}:{spec.style.value}" if spec.style else spec.category.value
    )
    out_items: List[BenchmarkItem] = list(items) if args.include_canonical else []
    skipped = 0
    for item in items:
        if not item.is_canonical:
            continue
        result = perturb(item.context, spec)
        if result.noop:
            skipped += 1
            continue
        out_items.append(
            BenchmarkItem(
                id=f"{item.id}__{label}",
                language=item.language,
                category=item.category,
                subcategory=item.subcategory,
                context=result.text,
                choices=item.choices,
                correct_index=item.correct_index,
                canonical_id=item.id,
                perturbation_label=label,
            )
        )
    save_items(out_items, args.out)
    _write_sidecar(args.out, args)
    print(f"wrote {len(out_items)} items ({skipped} canonical item(s) had no eligible position)")
    return EXIT_OK


def _build_scorer(name: str, items, scorer_corpus: Optional[str]):
    if name == "oracle":
        return OracleScorer(items)
    if name == "anti":
        return AntiOracleScorer(items)
    if name == "freq":
        if scorer_corpus:
            corpus = _read_lines(scorer_corpus)
        else:
            corpus = [it.context for it in items if it.is_canonical]
            corpus += [c for it in items if it.is_canonical for c in it.choices]
        return CharFrequencyScorer(corpus)
    if name.startswith("cmd:"):
        return SubprocessScorer(shlex.split(name[4:]))
    raise ValidationError(f"unknown scorer {name!r} (use oracle, anti, freq, or cmd:<command>)")


def cmd_eval(args: argparse.Namespace) -> int:
    items = load_items(args.input)
    scorer = _build_scorer(args.scorer, items, args.scorer_corpus)
    compare = {
        name: _build_scorer(name, items, args.scorer_corpus)
        for name in args.compare_scorer
    }
    try:
        report = evaluate(
            items,
            scorer,
            grouping=tuple(args.grouping.split(",")),
            trials=args.trials,
            seed=args.seed,
            compare_scorers=compare or None,
        )
    finally:
        for s in [scorer, *compare.values()]:
            if hasattr(s, "close"):
                s.close()
    if args.format == "tsv":
        body = report.to_tsv()
        if args.out:
            Path(args.out).write_text(body, encoding="utf-8")
        else:
            sys.stdout.write(body)
    else:
        _dump_json(report.to_dict(), args.out)
    _write_sidecar(args.out, args)
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    blob = json.loads(Path(args.input).read_text(encoding="utf-8"))
    if "groups" in blob:
        cols = ["group", "n_items", "acc_canonical", "acc_perturbed", "drop"]
        lines = ["\t".join(cols)]
        for key, g in sorted(blob["groups"].items()):
            drop = g.get("drop")
            lines.append(
                "\t".join(
                    [
                        key,
                        str(g["n_items"]),
                        f"{g['acc_canonical']:.6f}",
                        f"{g['acc_perturbed']:.6f}",
                        "" if drop is None else f"{drop:.6f}",
                    ]
                )
            )
        body = "\n".join(lines) + "\n"
    else:
        cols = sorted(k for k, v in blob.items() if not isinstance(v, (dict, list)))
        body = "\t".join(cols) + "\n" + "\t".join(str(blob[c]) for c in cols) + "\n"
    if args.out:
        Path(args.out).write_text(body, encoding="utf-8")
    else:
        sys.stdout.write(body)
    return EXIT_OK


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toklab",
        description="Tokenizer laboratory: train, encode, unify, measure, perturb, evaluate.",
    )
    parser.add_argument("--version", action="version", version=f"toklab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0, help="seed for all randomness")
        p.add_argument("--format", choices=("json", "tsv"), default="json")
        p.add_argument("--threads", type=int, default=1,
                       help="worker cap (aggregation is order-independent)")
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.add_argument("--sidecar", action="store_true",
                       help="also write <out>.meta.json with volatile run metadata")

    p = sub.add_parser("train", help="train a tokenizer pipeline")
    common(p)
    p.add_argument("corpus", help="text corpus, one document per line")
    p.add_argument("--algo", choices=("bpe", "unigram", "bytes"), default="bpe")
    p.add_argument("--size", type=int, default=1000, help="target vocabulary size")
    p.add_argument("--scheme", default="gpt2")
    p.add_argument("--number-mode", default=None)
    p.add_argument("--contraction-mode", default=None)
    p.add_argument("--whitespace-mode", default=None)
    p.add_argument("--norm-form", default="none")
    p.add_argument("--strip-zero-width", action="store_true")
    p.add_argument("--byte-fallback", action="store_true")
    p.add_argument("--special", action="append", default=[], help="special token (repeatable)")
    p.add_argument("--name", default=None, help="vocabulary name stamp")
    p.set_defaults(out="model.json", func=cmd_train)

    p = sub.add_parser("encode", help="encode text with a trained pipeline")
    common(p)
    p.add_argument("--model", required=True)
    p.add_argument("text", nargs="?", default=None, help="text (default: stdin)")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("unify", help="build a super vocabulary from vocab/model files")
    common(p)
    p.add_argument("vocabs", nargs="+", help="neutral vocab JSON or pipeline files")
    p.set_defaults(out="supervocab.json", func=cmd_unify)

    p = sub.add_parser("metrics", help="intrinsic efficiency metrics over a corpus")
    common(p)
    p.add_argument("--model", required=True, action="append",
                   help="pipeline file (repeatable: one report column per tokenizer)")
    p.add_argument("corpus")
    p.add_argument("--parallel-ref", default=None, help="line-aligned reference corpus")
    p.add_argument("--splitter", choices=[m.value for m in SplitMode if m is not SplitMode.CUSTOM],
                   default="whitespace_punct")
    p.add_argument("--token-budget", type=int, default=None,
                   help="also report bytes consumed for this token budget")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("perturb", help="apply a seeded perturbation to benchmark items")
    common(p)
    p.add_argument("input", help="benchmark JSONL")
    p.add_argument("--category", required=True, choices=[c.value for c in Category])
    p.add_argument("--style", default=None, choices=[s.value for s in Style])
    p.add_argument("--rate", type=float, default=1.0)
    p.add_argument("--table", default=None, help="mapping table name or JSON path")
    p.add_argument("--label", default=None, help="perturbation label (default: category)")
    p.add_argument("--include-canonical", action="store_true", default=True)
    p.add_argument("--no-include-canonical", dest="include_canonical", action="store_false")
    p.set_defaults(out="perturbed.jsonl", func=cmd_perturb)

    p = sub.add_parser("eval", help="robustness evaluation over benchmark items")
    common(p)
    p.add_argument("input", help="benchmark JSONL (canonical + perturbed)")
    p.add_argument("--scorer", default="freq", help="oracle | anti | freq | cmd:<command>")
    p.add_argument("--scorer-corpus", default=None, help="fit corpus for the freq scorer")
    p.add_argument("--compare-scorer", action="append", default=[],
                   help="additional scorer for a paired Wilcoxon test (repeatable)")
    p.add_argument("--grouping", default="category",
                   help="comma-separated keys from language,category,subcategory,perturbation_label")
    p.add_argument("--trials", type=int, default=10_000, help="bootstrap trials")
    p.set_defaults(out="evalreport.json", func=cmd_eval)

    p = sub.add_parser("report", help="render a JSON report as TSV")
    common(p)
    p.add_argument("input", help="report JSON file")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage problems; remap per our contract.
        raise SystemExit(EXIT_USAGE if exc.code not in (0, None) else 0)
    try:
        return args.func(args)
    except (ValidationError, ToklabError) as exc:
        if isinstance(exc, ResourceError):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
