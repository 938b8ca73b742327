"""Gujarati morphological analysis toolkit.

Character-level morpheme boundary detection and monolithic grammatical
feature tagging with a from-scratch embedding/Bi-LSTM/dense network, plus
rule-based root normalization, an unsupervised MDL segmentation baseline,
and a synthetic paradigm generator for desk-scale gold corpora.
"""

from .corpus import (
    Record,
    decode_segmentation,
    derive_boundary,
    parse_unimorph,
    split_train_test,
)
from .nn import Hyper
from .script import build_vocab, encode_ids, to_units
from .segmenter import analyze_word, normalize_root, predict_splits, train_boundary
from .tagger import ambiguity_audit, predict_bundle, train_tagger
from .tagset import FeatureBundle, canonicalize, make_bundle, register_all

__version__ = "0.1.0"

__all__ = [
    "Record", "Hyper", "FeatureBundle",
    "to_units", "build_vocab", "encode_ids",
    "parse_unimorph", "derive_boundary", "decode_segmentation", "split_train_test",
    "canonicalize", "make_bundle", "register_all",
    "train_boundary", "predict_splits", "normalize_root", "analyze_word",
    "train_tagger", "predict_bundle", "ambiguity_audit",
    "__version__",
]
