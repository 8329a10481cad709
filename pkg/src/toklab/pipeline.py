"""End-to-end tokenizer pipelines with a scikit-learn estimator surface.

A :class:`TokenizerPipeline` bundles a normalization form, a
pre-tokenization policy, a segmentation algorithm, and a fallback strategy;
``fit`` trains the learnable algorithms on a text corpus and ``transform``
maps texts to token-string sequences, so pipelines compose with sklearn
tooling (``get_params``/``set_params``/``clone``).
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from . import textnorm
from .algorithms import (
    BYTE_TOKENS,
    BpeModel,
    UnigramModel,
    decode_token_strings,
    encode_bpe,
    encode_ungreedy,
    encode_unigram,
    encode_wordpiece,
    train_bpe,
    train_unigram,
)
from .errors import ValidationError
from .pretok import PretokenPolicy, Scheme, pretokenize
from .vocab import Convention, Vocabulary

ALGORITHMS = ("bpe", "unigram", "wordpiece", "bytes", "ungreedy")

#: Default special strings for the byte-level algorithm (pad, eos, unk).
BYTE_SPECIALS = ("<pad>", "</s>", "<unk>")


def size_bucket(n: int) -> str:
    """XS under 1K, S to 50K, M to 150K, L beyond."""
    if n < 1_000:
        return "XS"
    if n <= 50_000:
        return "S"
    if n <= 150_000:
        return "M"
    return "L"


def _check_texts(X) -> List[str]:
    """Validate a text collection the way sklearn validators do for arrays."""
    if isinstance(X, str):
        raise ValidationError("expected an iterable of texts, got a single string")
    texts = list(X)
    for t in texts:
        if not isinstance(t, str):
            raise ValidationError(f"corpus entries must be str, got {type(t).__name__}")
    return texts


class TokenizerPipeline(BaseEstimator, TransformerMixin):
    """One fully-described tokenizer.

    Parameters
    ----------
    algorithm:
        "bpe" | "unigram" | "wordpiece" | "bytes" | "ungreedy".
    norm_form:
        Unicode normalization applied first ("none", "nfc", "nfd", "nfkc").
    strip_zero_width:
        Remove the default zero-width set before pre-tokenization.
    scheme, number_mode, contraction_mode, whitespace_mode:
        Pre-tokenization policy; ``None`` modes take the scheme defaults.
    vocab_size:
        Training budget for bpe/unigram.
    byte_fallback:
        Represent out-of-alphabet code points as raw UTF-8 byte tokens.
    vocab:
        Externally supplied :class:`Vocabulary` (required for wordpiece and
        ungreedy, which have no learner here).
    """

    def __init__(
        self,
        algorithm: str = "bpe",
        norm_form: str = "none",
        strip_zero_width: bool = False,
        scheme: str = "gpt2",
        number_mode: Optional[str] = None,
        contraction_mode: Optional[str] = None,
        whitespace_mode: Optional[str] = None,
        vocab_size: int = 1000,
        byte_fallback: bool = False,
        specials: Sequence[str] = (),
        unk_token: str = "[UNK]",
        window: int = 2,
        prune_fraction: float = 0.25,
        max_piece_length: int = 8,
        em_rounds: int = 2,
        n_special_bytes: int = 3,
        vocab: Optional[Vocabulary] = None,
        name: Optional[str] = None,
    ):
        self.algorithm = algorithm
        self.norm_form = norm_form
        self.strip_zero_width = strip_zero_width
        self.scheme = scheme
        self.number_mode = number_mode
        self.contraction_mode = contraction_mode
        self.whitespace_mode = whitespace_mode
        self.vocab_size = vocab_size
        self.byte_fallback = byte_fallback
        self.specials = specials
        self.unk_token = unk_token
        self.window = window
        self.prune_fraction = prune_fraction
        self.max_piece_length = max_piece_length
        self.em_rounds = em_rounds
        self.n_special_bytes = n_special_bytes
        self.vocab = vocab
        self.name = name

    # -- policy and preprocessing -------------------------------------------------

    def policy(self) -> PretokenPolicy:
        if self.algorithm == "bytes":
            # Byte level is a raw stream; pre-tokenization modes do not apply.
            return PretokenPolicy.for_scheme(Scheme.NONE)
        return PretokenPolicy.for_scheme(
            self.scheme, self.number_mode, self.contraction_mode, self.whitespace_mode
        )

    def preprocess(self, text: str) -> str:
        text = textnorm.normalize(text, self.norm_form)
        if self.strip_zero_width:
            text = textnorm.strip_zero_width(text)
        return text

    @property
    def encodes_with_leading_space(self) -> bool:
        """Whether mid-sentence words carry their preceding space."""
        return self.algorithm != "bytes" and self.policy().attach_leading_space

    # -- estimator surface --------------------------------------------------------

    def fit(self, X: Iterable[str], y=None) -> "TokenizerPipeline":
        if self.algorithm not in ALGORITHMS:
            raise ValidationError(f"unknown algorithm {self.algorithm!r}")
        policy = self.policy()  # validates the mode combination early

        if self.algorithm in ("wordpiece", "ungreedy"):
            if self.vocab is None:
                raise ValidationError(f"{self.algorithm} needs a supplied vocabulary")
            if self.algorithm == "wordpiece" and self.vocab.convention is not Convention.WORDPIECE_HASH:
                raise ValidationError("wordpiece requires a '##'-convention vocabulary")
            self.model_ = None
            self.vocab_ = self.vocab
            return self

        if self.algorithm == "bytes":
            if not (0 <= self.n_special_bytes <= len(BYTE_SPECIALS)):
                raise ValidationError(
                    f"n_special_bytes must be in [0, {len(BYTE_SPECIALS)}]"
                )
            self.model_ = None
            entries = list(BYTE_SPECIALS[: self.n_special_bytes]) + list(BYTE_TOKENS)
            self.vocab_ = Vocabulary(
                entries=entries,
                convention=Convention.BYTE_LEVEL,
                specials=set(BYTE_SPECIALS[: self.n_special_bytes]),
                meta={"name": self.name or "bytes", "algorithm": "bytes",
                      "size_bucket": size_bucket(len(entries))},
            )
            return self

        corpus = [self.preprocess(t) for t in _check_texts(X)]
        if self.algorithm == "bpe":
            self.model_ = train_bpe(
                corpus,
                policy,
                self.vocab_size,
                byte_fallback=self.byte_fallback,
                specials=list(self.specials),
            )
            entries = self.model_.vocab_tokens
            specials = set(self.model_.specials)
        else:  # unigram
            self.model_ = train_unigram(
                corpus,
                policy,
                self.vocab_size,
                prune_fraction=self.prune_fraction,
                max_piece_length=self.max_piece_length,
                em_rounds=self.em_rounds,
            )
            entries = list(self.specials) + sorted(self.model_.pieces)
            specials = set(self.specials)
        self.vocab_ = Vocabulary(
            entries=entries,
            convention=Convention.PLAIN,
            specials=specials,
            meta={
                "name": self.name or self.algorithm,
                "algorithm": self.algorithm,
                "norm_form": str(self.norm_form),
                "size_bucket": size_bucket(len(entries)),
            },
        )
        return self

    def _require_fitted(self):
        if not hasattr(self, "vocab_"):
            raise NotFittedError("this TokenizerPipeline is not fitted yet; call fit first")

    def encode(self, text: str) -> List[str]:
        """Token strings for one text."""
        self._require_fitted()
        text = self.preprocess(text)
        if self.algorithm == "bytes":
            return [BYTE_TOKENS[b] for b in text.encode("utf-8")]
        if self.algorithm == "bpe":
            return encode_bpe(self.model_, text, self.policy())
        tokens: List[str] = []
        for seg in pretokenize(text, self.policy()):
            if self.algorithm == "unigram":
                tokens.extend(encode_unigram(self.model_, seg.text))
            elif self.algorithm == "wordpiece":
                tokens.extend(encode_wordpiece(self.vocab_, seg.text, self.unk_token))
            else:  # ungreedy
                tokens.extend(encode_ungreedy(self.vocab_, seg.text, self.window))
        return tokens

    def encode_ids(self, text: str) -> List[int]:
        vocab = self.vocab_
        out = []
        for tok in self.encode(text):
            if tok in vocab:
                out.append(vocab.id_of(tok))
            else:  # unigram fallback emits raw characters outside the table
                out.append(-1)
        return out

    def decode(self, tokens: Sequence[str]) -> str:
        """Best-effort inverse of :meth:`encode` (UNK absorption is lossy)."""
        if self.algorithm == "wordpiece":
            return "".join(t[2:] if t.startswith("##") else t for t in tokens)
        return decode_token_strings(tokens)

    def transform(self, X: Iterable[str]) -> List[List[str]]:
        self._require_fitted()
        return [self.encode(t) for t in _check_texts(X)]

    def token_count(self, text: str) -> int:
        return len(self.encode(text))

    # -- serialization ------------------------------------------------------------

    def to_dict(self) -> dict:
        self._require_fitted()
        params = self.get_params()
        params.pop("vocab")
        blob = {
            "format": "toklab-pipeline",
            "version": 1,
            "params": params,
            "policy": self.policy().to_dict(),
            "vocab": self.vocab_.to_dict(),
            "model": self.model_.to_dict() if self.model_ is not None else None,
        }
        return blob

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True, indent=2) + "\n",
            encoding="utf-8",
        )

    @classmethod
    def from_dict(cls, blob: dict) -> "TokenizerPipeline":
        if blob.get("format") != "toklab-pipeline":
            raise ValidationError("not a pipeline file")
        pipe = cls(**blob["params"])
        pipe.vocab_ = Vocabulary.from_dict(blob["vocab"])
        model = blob.get("model")
        if model is None:
            pipe.model_ = None
        elif model["algorithm"] == "bpe":
            pipe.model_ = BpeModel.from_dict(model)
        elif model["algorithm"] == "unigram":
            pipe.model_ = UnigramModel.from_dict(model)
        else:
            raise ValidationError(f"unknown model algorithm {model['algorithm']!r}")
        if pipe.algorithm in ("wordpiece", "ungreedy"):
            pipe.vocab = pipe.vocab_
        return pipe

    @classmethod
    def load(cls, path: Union[str, Path]) -> "TokenizerPipeline":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
