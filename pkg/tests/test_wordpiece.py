import random

import pytest

from toklab.algorithms import encode_wordpiece
from toklab.errors import ValidationError
from toklab.vocab import Convention, Vocabulary


def wp_vocab(tokens):
    return Vocabulary(list(tokens), convention=Convention.WORDPIECE_HASH)


def oracle_greedy(vocab_set, segment, unk="[UNK]"):
    """Reference greedy longest-prefix matcher over a plain set."""
    out, start = [], 0
    while start < len(segment):
        prefix = "##" if start else ""
        for end in range(len(segment), start, -1):
            cand = prefix + segment[start:end]
            if cand in vocab_set:
                out.append(cand)
                start = end
                break
        else:
            return [unk]
    return out


class TestWordpiece:
    def test_typo_case_study_vector(self):
        vocab = wp_vocab(["doc", "##tro", "doctor"])
        assert encode_wordpiece(vocab, "doctro") == ["doc", "##tro"]

    def test_single_token(self):
        assert encode_wordpiece(wp_vocab(["x"]), "x") == ["x"]

    def test_greedy_match_vector(self):
        vocab = wp_vocab(["a", "##b", "##c"])
        assert encode_wordpiece(vocab, "abc") == ["a", "##b", "##c"]

    def test_unk_absorbs_whole_segment(self):
        vocab = wp_vocab(["in", "##e"])
        assert encode_wordpiece(vocab, "inez") == ["[UNK]"]

    def test_empty_segment(self):
        assert encode_wordpiece(wp_vocab(["a"]), "") == []

    def test_requires_hash_convention(self):
        plain = Vocabulary(["a"], convention=Convention.PLAIN)
        with pytest.raises(ValidationError):
            encode_wordpiece(plain, "a")

    def test_matches_greedy_oracle_randomized(self):
        rng = random.Random(314)
        for _ in range(300):
            alphabet = "abcd"
            pieces = set()
            for _ in range(rng.randint(2, 12)):
                body = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 3)))
                pieces.add(body if rng.random() < 0.5 else "##" + body)
            pieces |= set(alphabet) if rng.random() < 0.5 else set()
            vocab = wp_vocab(sorted(pieces))
            segment = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 10)))
            assert encode_wordpiece(vocab, segment) == oracle_greedy(pieces, segment)

    def test_coverage_when_no_unk(self):
        rng = random.Random(15)
        pieces = {"a", "b", "c", "##a", "##b", "##c", "ab", "##bc"}
        vocab = wp_vocab(sorted(pieces))
        for _ in range(200):
            segment = "".join(rng.choice("abc") for _ in range(rng.randint(1, 8)))
            tokens = encode_wordpiece(vocab, segment)
            assert "[UNK]" not in tokens
            rebuilt = "".join(t[2:] if t.startswith("##") else t for t in tokens)
            assert rebuilt == segment
