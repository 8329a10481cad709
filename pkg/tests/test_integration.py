"""Library-level end-to-end flows across modules."""

from importlib import resources

import pytest

from toklab import TokenizerPipeline, build_super_vocab, init_embeddings
from toklab.evalharness import CharFrequencyScorer, evaluate, load_items, save_items
from toklab.evalharness.items import BenchmarkItem
from toklab.metrics import fertility, metrics_report, pcw
from toklab.perturb import Category, PerturbationSpec, Style, perturb
from toklab.textnorm import strip_zero_width
from toklab.vocab import shared_token_count


@pytest.fixture(scope="module")
def toy_corpus():
    data = resources.files("toklab.data.toy").joinpath("toy_corpus.txt")
    return data.read_text(encoding="utf-8").splitlines()[:300]


@pytest.fixture(scope="module")
def fitted(toy_corpus):
    bpe = TokenizerPipeline(algorithm="bpe", scheme="gpt4", vocab_size=320,
                            name="bpe-320").fit(toy_corpus)
    uni = TokenizerPipeline(algorithm="unigram", scheme="sentencepiece",
                            vocab_size=200, name="uni-200").fit(toy_corpus)
    return bpe, uni


def test_train_unify_embed_flow(fitted):
    bpe, uni = fitted
    sv = build_super_vocab([bpe.vocab_, uni.vocab_])
    shared = shared_token_count(sv, "bpe-320", "uni-200")
    assert 0 < shared < min(len(bpe.vocab_), len(uni.vocab_))
    assert len(sv) == len(bpe.vocab_) + len(uni.vocab_) - shared

    emb = init_embeddings(sv, dim=16, seed=1)
    m_bpe = emb.matrix_for("bpe-320")
    m_uni = emb.matrix_for("uni-200")
    assert m_bpe.shape == (len(bpe.vocab_), 16)
    # a token string present in both starts from the same vector
    common = next(t for t in bpe.vocab_.entries if t in uni.vocab_)
    assert (m_bpe[bpe.vocab_.id_of(common)] == m_uni[uni.vocab_.id_of(common)]).all()


def test_metrics_over_trained_pipelines(fitted, toy_corpus):
    bpe, uni = fitted
    sample = toy_corpus[:50]
    rep = metrics_report(bpe, sample, parallel_reference=sample)
    assert rep.parity == 1.0
    assert rep.fertility >= 1.0
    assert 0.0 <= rep.pcw <= 1.0
    assert fertility(uni, sample) >= 1.0
    assert pcw(uni, sample) >= 0.0


def test_perturb_then_evaluate_flow(tmp_path, toy_corpus):
    data = resources.files("toklab.data.toy").joinpath("toy_benchmark.jsonl")
    bench_path = tmp_path / "bench.jsonl"
    bench_path.write_text(data.read_text(encoding="utf-8"), encoding="utf-8")
    items = load_items(bench_path)

    spec = PerturbationSpec(Category.KEYBOARD_TYPO, rate=0.4, seed=5)
    perturbed = []
    for item in items:
        result = perturb(item.context, spec)
        if result.noop:
            continue
        perturbed.append(BenchmarkItem(
            id=f"{item.id}__kb", language=item.language, category=item.category,
            subcategory=item.subcategory, context=result.text, choices=item.choices,
            correct_index=item.correct_index, canonical_id=item.id,
            perturbation_label="keyboard_typo",
        ))
    assert perturbed
    full = items + perturbed
    out_path = tmp_path / "full.jsonl"
    save_items(full, out_path)

    scorer = CharFrequencyScorer(toy_corpus)
    report = evaluate(load_items(out_path), scorer, grouping=("category",),
                      trials=500, seed=5)
    assert report.groups
    for group in report.groups.values():
        assert 0.0 <= group.acc_canonical <= 1.0
        assert 0.0 <= group.acc_perturbed <= 1.0
        assert group.bootstrap is not None


def test_zero_width_stripping_neutralizes_insertion():
    # the defense mechanism: a normalizing pipeline erases the perturbation
    spec = PerturbationSpec(Category.ZERO_WIDTH_INSERT, rate=1.0, seed=2)
    for text in ("plain words here", "café 42", "a"):
        noisy = perturb(text, spec).text
        assert strip_zero_width(noisy) == text

    clean = TokenizerPipeline(algorithm="bytes", strip_zero_width=True).fit([])
    raw = TokenizerPipeline(algorithm="bytes").fit([])
    noisy = perturb("tokens survive stripping", spec).text
    assert clean.encode(noisy) == clean.encode("tokens survive stripping")
    assert len(raw.encode(noisy)) > len(raw.encode("tokens survive stripping"))


def test_style_perturbation_defeated_only_by_nfkc():
    spec = PerturbationSpec(Category.UNICODE_STYLE, style=Style.FULLWIDTH)
    styled = perturb("Hello42", spec).text
    nfkc = TokenizerPipeline(algorithm="bytes", norm_form="nfkc").fit([])
    none = TokenizerPipeline(algorithm="bytes").fit([])
    assert nfkc.encode(styled) == nfkc.encode("Hello42")
    assert none.encode(styled) != none.encode("Hello42")
