import random

import pytest

from toklab.errors import ValidationError
from toklab.pretok import (
    ContractionMode,
    NumberMode,
    PretokenPolicy,
    Scheme,
    SegmentKind,
    WhitespaceMode,
    load_scheme_rules,
    pretokenize,
    split_numbers,
)


def texts(segments):
    return [s.text for s in segments]


class TestPaperVectors:
    def test_gpt2_contraction_split(self):
        policy = PretokenPolicy.for_scheme("gpt2", contraction_mode="gpt2list")
        assert texts(pretokenize("we'll", policy)) == ["we", "'ll"]

    def test_group3_digits(self):
        policy = PretokenPolicy.for_scheme("gpt4")
        assert texts(pretokenize("1337", policy)) == ["133", "7"]

    def test_group3_after_word(self):
        policy = PretokenPolicy.for_scheme("gpt4")
        assert texts(pretokenize("username12345", policy)) == ["username", "123", "45"]

    def test_composed_contraction(self):
        policy = PretokenPolicy.for_scheme("bert")
        assert texts(pretokenize("he'll", policy)) == ["he", "'", "ll"]

    def test_normalized_whitespace_collapse(self):
        policy = PretokenPolicy.for_scheme("bert")
        assert texts(pretokenize("a  b", policy)) == ["a", " ", "b"]

    def test_gpt4o_keeps_listed_contraction_attached(self):
        policy = PretokenPolicy.for_scheme("gpt4o")
        for suffix in ("'s", "'d", "'m", "'ll", "'ve", "'re"):
            segs = texts(pretokenize("word" + suffix, policy))
            assert segs == ["word" + suffix]
        # 't attaches too (don't -> don't stays whole under gpt4o)
        assert texts(pretokenize("don't", policy)) == ["don't"]

    def test_gpt4o_unlisted_apostrophe_splits(self):
        policy = PretokenPolicy.for_scheme("gpt4o")
        assert texts(pretokenize("O'Brien", policy)) == ["O", "'", "Brien"]


class TestSplitNumbers:
    def test_split_mode(self):
        assert split_numbers("12345", NumberMode.SPLIT) == ["1", "2", "3", "4", "5"]

    def test_group3_short(self):
        assert split_numbers("7", NumberMode.GROUP3) == ["7"]

    def test_group3_chunking_oracle(self):
        # Oracle: fixed-width chunking over the string, remainder last.
        def chunk3(s):
            return [s[i : i + 3] for i in range(0, len(s), 3)]

        assert split_numbers("123456", NumberMode.GROUP3) == chunk3("123456") == ["123", "456"]
        rng = random.Random(11)
        for _ in range(100):
            digits = "".join(rng.choice("0123456789") for _ in range(rng.randint(1, 20)))
            assert split_numbers(digits, NumberMode.GROUP3) == chunk3(digits)

    def test_group_and_learned_keep_run_whole(self):
        assert split_numbers("90210", NumberMode.GROUP) == ["90210"]
        assert split_numbers("90210", NumberMode.LEARNED) == ["90210"]

    def test_non_digit_rejected(self):
        with pytest.raises(ValidationError):
            split_numbers("12a", NumberMode.SPLIT)

    def test_group3_max_width_and_split_singletons(self):
        rng = random.Random(5)
        for _ in range(50):
            digits = "".join(rng.choice("0123456789") for _ in range(rng.randint(1, 30)))
            assert all(len(p) <= 3 for p in split_numbers(digits, NumberMode.GROUP3))
            assert all(len(p) == 1 for p in split_numbers(digits, NumberMode.SPLIT))


class TestPolicy:
    def test_every_field_resolved_from_scheme_defaults(self):
        policy = PretokenPolicy.for_scheme("gpt2")
        assert policy.number_mode is NumberMode.GROUP
        assert policy.contraction_mode is ContractionMode.GPT2LIST
        assert policy.whitespace_mode is WhitespaceMode.INDIVIDUAL

    def test_scheme_none_forces_learned(self):
        policy = PretokenPolicy.for_scheme("none")
        assert policy.number_mode is NumberMode.LEARNED
        with pytest.raises(ValidationError):
            PretokenPolicy(Scheme.NONE, NumberMode.SPLIT, ContractionMode.LEARNED, WhitespaceMode.LEARNED)

    def test_rule_files_carry_versions(self):
        for scheme in Scheme:
            rules = load_scheme_rules(scheme)
            assert rules.version >= 1
            assert rules.punct_segments in ("run", "char")

    def test_roundtrip_dict(self):
        policy = PretokenPolicy.for_scheme("gpt4", whitespace_mode="individual")
        assert PretokenPolicy.from_dict(policy.to_dict()) == policy

    def test_number_mode_orthogonal_to_scheme(self):
        # gpt4 splitting rules with per-digit numbers (Qwen-style combination)
        policy = PretokenPolicy.for_scheme("gpt4", number_mode="split")
        assert texts(pretokenize("ab1234", policy)) == ["ab", "1", "2", "3", "4"]


def random_text(rng):
    pool = "abc XY12,.'!é中\t\n"
    return "".join(rng.choice(pool) for _ in range(rng.randint(0, 30)))


class TestSegmentLaws:
    @pytest.mark.parametrize("scheme", ["gpt2", "gpt4", "gpt4o", "bert", "bloom", "sentencepiece"])
    def test_lossless_reconstruction(self, scheme):
        rng = random.Random(hash(scheme) % 1000)
        for _ in range(150):
            policy = PretokenPolicy.for_scheme(
                scheme,
                whitespace_mode=rng.choice(["learned", "manual", "individual"]),
            )
            text = random_text(rng)
            segs = pretokenize(text, policy)
            assert "".join(s.text for s in segs) == text

    def test_raw_stream_is_single_segment(self):
        policy = PretokenPolicy.for_scheme("none")
        assert texts(pretokenize("any thing at all", policy)) == ["any thing at all"]
        assert pretokenize("", policy) == []

    def test_normalized_reconstructs_collapsed_input(self):
        import re

        rng = random.Random(99)
        policy = PretokenPolicy.for_scheme("bert")
        for _ in range(100):
            text = random_text(rng)
            segs = pretokenize(text, policy)
            assert "".join(s.text for s in segs) == re.sub(r"\s+", " ", text)

    def test_segments_never_mergeable(self):
        policy = PretokenPolicy.for_scheme("gpt2")
        assert all(not s.mergeable_with_next for s in pretokenize("a b c,d 12", policy))

    def test_individual_whitespace_one_char_segments(self):
        policy = PretokenPolicy.for_scheme("gpt2", whitespace_mode="individual")
        segs = pretokenize("a \t\n b", policy)
        spaces = [s for s in segs if s.kind is SegmentKind.SPACE]
        assert all(len(s.text) == 1 for s in spaces)

    def test_group3_segments_never_exceed_three_digits(self):
        rng = random.Random(1)
        policy = PretokenPolicy.for_scheme("gpt4")
        for _ in range(100):
            text = random_text(rng)
            for seg in pretokenize(text, policy):
                if seg.kind is SegmentKind.NUMBER:
                    assert len(seg.text.lstrip(" ")) <= 3
