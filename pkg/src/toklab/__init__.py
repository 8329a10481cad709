"""toklab: a tokenizer laboratory.

Normalization, pre-tokenization policies, subword learners and encoders,
cross-tokenizer vocabulary unification, intrinsic efficiency metrics, a
seeded perturbation engine, and a robustness evaluation harness.
"""

from .pipeline import TokenizerPipeline
from .pretok import PretokenPolicy, Segment, pretokenize, split_numbers
from .textnorm import NormForm, normalize, strip_zero_width
from .vocab import SuperVocab, Vocabulary, build_super_vocab, canonical_form, init_embeddings

__version__ = "0.1.0"

__all__ = [
    "NormForm",
    "PretokenPolicy",
    "Segment",
    "SuperVocab",
    "TokenizerPipeline",
    "Vocabulary",
    "build_super_vocab",
    "canonical_form",
    "init_embeddings",
    "normalize",
    "pretokenize",
    "split_numbers",
    "strip_zero_width",
    "__version__",
]
