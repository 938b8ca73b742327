"""Morpheme boundary model: training, split prediction, root normalization.

The boundary detector tags each character unit with the probability that a
morph ends there; cuts are taken where the probability clears the decision
threshold (never at the final unit).  The first morph of a split word is a
stem, not necessarily a valid citation form; a small data-driven rule table
attaches the POS/gender-appropriate suffix to turn stems into roots.

Rules live in a UTF-8 file of "pos<TAB>gender<TAB>suffix" lines ("-" matches
any gender) so users can repair or extend them without code changes.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Sequence

import numpy as np

from . import nn
from .corpus import Record, decode_segmentation
from .errors import DataError, EmptyTrainingSet
from .modelio import load_model, save_model  # re-exported for convenience
from .script import build_vocab, encode_ids, nfc

_logger = logging.getLogger(__name__)

__all__ = [
    "RootRule", "load_rules", "default_rules", "normalize_root",
    "train_boundary", "predict_splits", "analyze_word", "Analysis",
    "load_model", "save_model",
]


@dataclass(frozen=True)
class RootRule:
    """Suffix to attach to a stem of the given POS (and gender, if set)."""

    pos: str
    gender: str | None
    suffix: str

    def matches(self, pos: str, gender: str | None) -> bool:
        return self.pos == pos and (self.gender is None or self.gender == gender)


def load_rules(lines: Iterable[str]) -> list[RootRule]:
    """Parse rule lines; first matching rule wins at query time."""
    rules = []
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise DataError(f"rule line {line_no}: expected 3 columns, got {len(parts)}")
        pos, gender, suffix = (p.strip() for p in parts)
        rules.append(
            RootRule(pos=pos, gender=None if gender in ("-", "") else gender, suffix=nfc(suffix))
        )
    return rules


def load_rules_file(path) -> list[RootRule]:
    with open(path, encoding="utf-8") as handle:
        return load_rules(handle)


def default_rules() -> list[RootRule]:
    """Rules shipped with the package (masculine/feminine noun and adjective
    suffixes plus the verb infinitive)."""
    text = resources.files("gujmorph").joinpath("data/root_rules.tsv").read_text("utf-8")
    return load_rules(text.splitlines())


def normalize_root(
    stem: str, pos: str, gender: str | None, rules: Sequence[RootRule]
) -> tuple[str, bool]:
    """Attach the first matching rule's suffix to the stem.

    Returns (root, True) when a rule fired, (stem, False) when none matched
    so callers can flag the word as unnormalized.
    """
    if not stem:
        raise ValueError("stem must be nonempty")
    for rule in rules:
        if rule.matches(pos, gender):
            return stem + rule.suffix, True
    return stem, False


def train_boundary(
    records: Sequence[Record], hyper: nn.Hyper | None = None
) -> tuple[nn.ModelParams, list[float]]:
    """Train the per-unit split tagger; returns the frozen model and the
    per-epoch loss history."""
    if not records:
        raise EmptyTrainingSet("no boundary training records")
    missing = [r.surface for r in records if r.boundary is None]
    if missing:
        raise DataError(
            f"{len(missing)} records lack boundary labels; run attach_boundaries first"
        )
    hyper = hyper or nn.Hyper()
    hyper.validate()
    vocab = build_vocab(r.surface for r in records)
    rng = np.random.default_rng(hyper.seed)
    params = nn.init_params("boundary", vocab, hyper, rng=rng)
    id_seqs = [encode_ids(vocab, r.surface) for r in records]
    targets = [list(r.boundary) for r in records]
    history = nn.fit(params, id_seqs, targets, rng)
    return params, history


def predict_splits(
    model: nn.ModelParams, word: str, threshold: float | None = None
) -> tuple[int, ...]:
    """Boundary labels for one word: 1 where P(split) exceeds the threshold.

    The final unit is never marked.  Unknown units encode as UNK.
    """
    word = nfc(word)
    if not word:
        raise ValueError("word must be nonempty")
    if threshold is None:
        threshold = model.hyper.threshold
    ids = encode_ids(model.vocab, word)
    states = nn.bilstm_forward(model, ids)
    probs = nn.boundary_head(model, states)
    labels = [0] * len(word)
    for i in range(len(word) - 1):
        if probs[i] > threshold:
            labels[i] = 1
    return tuple(labels)


@dataclass(frozen=True)
class Analysis:
    """Segmentation plus normalized root for one word."""

    word: str
    morphs: tuple[str, ...]
    root: str
    root_normalized: bool


def analyze_word(
    model: nn.ModelParams,
    rules: Sequence[RootRule],
    word: str,
    pos: str | None = None,
    gender: str | None = None,
    threshold: float | None = None,
) -> Analysis:
    """Segment a word and normalize its first morph into a root.

    Without a split the word itself is the root.  Without a POS (or with no
    matching rule) the stem is returned unnormalized and flagged.
    """
    word = nfc(word)
    labels = predict_splits(model, word, threshold=threshold)
    morphs = decode_segmentation(word, labels)
    if len(morphs) == 1:
        return Analysis(word=word, morphs=tuple(morphs), root=word, root_normalized=False)
    if pos is None:
        return Analysis(word=word, morphs=tuple(morphs), root=morphs[0], root_normalized=False)
    root, applied = normalize_root(morphs[0], pos, gender, rules)
    return Analysis(word=word, morphs=tuple(morphs), root=root, root_normalized=applied)
