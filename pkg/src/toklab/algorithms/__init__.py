"""Tokenizer learners and encoders."""

from .bpe import BpeModel, encode_bpe, train_bpe
from .bytelevel import (
    BYTE_TOKENS,
    byte_fallback,
    byte_token,
    char_to_byte_tokens,
    decode_bytes,
    decode_token_strings,
    encode_bytes,
    is_byte_token,
)
from .ungreedy import encode_greedy, encode_ungreedy
from .unigram import UnigramModel, encode_unigram, encode_unigram_text, train_unigram
from .wordpiece import encode_wordpiece

__all__ = [
    "BpeModel",
    "UnigramModel",
    "BYTE_TOKENS",
    "byte_fallback",
    "byte_token",
    "char_to_byte_tokens",
    "decode_bytes",
    "decode_token_strings",
    "encode_bytes",
    "encode_bpe",
    "encode_greedy",
    "encode_ungreedy",
    "encode_unigram",
    "encode_unigram_text",
    "encode_wordpiece",
    "is_byte_token",
    "train_bpe",
    "train_unigram",
]
