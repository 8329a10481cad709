import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from toklab.errors import ValidationError
from toklab.pipeline import TokenizerPipeline
from toklab.vocab import Convention, Vocabulary

CORPUS = [
    "the cat sat on the mat",
    "the dog sat on the log",
    "a cat and a dog met at noon",
]


class TestEstimatorSurface:
    def test_get_set_params_and_clone(self):
        pipe = TokenizerPipeline(algorithm="bpe", vocab_size=64, scheme="gpt4")
        params = pipe.get_params()
        assert params["vocab_size"] == 64
        assert params["scheme"] == "gpt4"
        twin = clone(pipe)
        assert twin.get_params() == params
        pipe.set_params(vocab_size=32)
        assert pipe.vocab_size == 32

    def test_transform_before_fit_raises(self):
        with pytest.raises(NotFittedError):
            TokenizerPipeline().transform(["x"])

    def test_fit_returns_self_and_transform_shapes(self):
        pipe = TokenizerPipeline(algorithm="bpe", vocab_size=40).fit(CORPUS)
        out = pipe.transform(CORPUS)
        assert len(out) == len(CORPUS)
        assert all(isinstance(tok, str) for row in out for tok in row)

    def test_single_string_input_rejected(self):
        pipe = TokenizerPipeline(algorithm="bpe", vocab_size=40)
        with pytest.raises(ValidationError):
            pipe.fit("just one string")

    def test_unknown_algorithm_rejected(self):
        with pytest.raises(ValidationError):
            TokenizerPipeline(algorithm="magic").fit(CORPUS)


class TestAlgorithms:
    def test_bpe_round_trip(self):
        pipe = TokenizerPipeline(algorithm="bpe", vocab_size=60).fit(CORPUS)
        for text in CORPUS:
            assert pipe.decode(pipe.encode(text)) == text

    def test_unigram_round_trip(self):
        pipe = TokenizerPipeline(algorithm="unigram", vocab_size=30).fit(CORPUS)
        for text in CORPUS:
            assert pipe.decode(pipe.encode(text)) == text

    def test_bytes_one_token_per_byte(self):
        pipe = TokenizerPipeline(algorithm="bytes").fit([])
        text = "café €"
        tokens = pipe.encode(text)
        assert len(tokens) == len(text.encode("utf-8"))
        assert pipe.decode(tokens) == text
        assert len(pipe.vocab_) == 259

    def test_wordpiece_requires_vocab(self):
        with pytest.raises(ValidationError):
            TokenizerPipeline(algorithm="wordpiece").fit(CORPUS)

    def test_wordpiece_with_vocab(self):
        vocab = Vocabulary(
            ["the", "cat", "do", "##g", "sat", "on", "mat", "a", "and", "met", "at",
             "noon", "log"],
            convention=Convention.WORDPIECE_HASH,
        )
        pipe = TokenizerPipeline(algorithm="wordpiece", scheme="bert", vocab=vocab).fit([])
        assert pipe.encode("dog") == ["do", "##g"]

    def test_ungreedy_with_vocab(self):
        vocab = Vocabulary(["ab", "abc", "cd"])
        pipe = TokenizerPipeline(algorithm="ungreedy", scheme="none", vocab=vocab, window=2).fit([])
        assert pipe.encode("abcd") == ["ab", "cd"]

    def test_norm_form_applied(self):
        pipe = TokenizerPipeline(algorithm="bytes", norm_form="nfkc").fit([])
        assert pipe.decode(pipe.encode("x²")) == "x2"

    def test_strip_zero_width_applied(self):
        pipe = TokenizerPipeline(algorithm="bytes", strip_zero_width=True).fit([])
        assert pipe.decode(pipe.encode("a​b")) == "ab"

    def test_boundary_law_tokens_within_segments(self):
        from toklab.pretok import pretokenize

        pipe = TokenizerPipeline(algorithm="bpe", vocab_size=60, scheme="gpt2").fit(CORPUS)
        policy = pipe.policy()
        for text in CORPUS:
            tokens = pipe.encode(text)
            i = 0
            for seg in pretokenize(text, policy):
                consumed = ""
                while i < len(tokens) and len(consumed) < len(seg.text):
                    consumed += tokens[i]
                    i += 1
                assert consumed == seg.text


class TestSerialization:
    @pytest.mark.parametrize("algorithm,size", [("bpe", 50), ("unigram", 25)])
    def test_save_load_identical_encoding(self, tmp_path, algorithm, size):
        pipe = TokenizerPipeline(algorithm=algorithm, vocab_size=size, name="demo").fit(CORPUS)
        path = tmp_path / "model.json"
        pipe.save(path)
        loaded = TokenizerPipeline.load(path)
        for text in CORPUS + ["no cat sat on a log"]:
            assert loaded.encode(text) == pipe.encode(text)
        assert loaded.vocab_.entries == pipe.vocab_.entries

    def test_bytes_pipeline_save_load(self, tmp_path):
        pipe = TokenizerPipeline(algorithm="bytes").fit([])
        path = tmp_path / "bytes.json"
        pipe.save(path)
        loaded = TokenizerPipeline.load(path)
        assert loaded.encode("hi") == pipe.encode("hi")

    def test_not_a_pipeline_file(self, tmp_path):
        path = tmp_path / "junk.json"
        path.write_text('{"something": "else"}')
        with pytest.raises(ValidationError):
            TokenizerPipeline.load(path)
