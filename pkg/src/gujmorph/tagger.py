"""Monolithic grammatical-feature classifier, one model per POS category.

The POS of the input word is supplied by the caller (it selects the model);
the classifier predicts one class id covering the whole feature combination.
Because the model sees a word in isolation, surfaces that take the same
form under different feature combinations are irreducibly ambiguous; the
audit below quantifies the resulting accuracy ceiling before training.
"""

from __future__ import annotations

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import nn, tagset
from .corpus import Record
from .errors import BundleNotRegistered, DataError, EmptyTrainingSet, UnknownBundle
from .script import build_vocab, encode_ids, nfc
from .tagset import ClassRegistry, FeatureBundle

_logger = logging.getLogger(__name__)


def train_tagger(
    records: Sequence[Record],
    pos: str,
    registry: ClassRegistry,
    hyper: nn.Hyper | None = None,
) -> tuple[nn.ModelParams, list[float]]:
    """Train the per-POS classifier; returns the frozen model and loss history.

    All records must share the given POS and carry bundles the registry
    already knows.
    """
    if not records:
        raise EmptyTrainingSet(f"no training records for POS {pos}")
    wrong = [r.pos for r in records if r.pos != pos]
    if wrong:
        raise DataError(
            f"expected only POS {pos}, found {len(wrong)} records of other POS"
        )
    try:
        targets = [registry.class_of(r.bundle) for r in records]
    except UnknownBundle as exc:
        raise BundleNotRegistered(str(exc)) from None
    hyper = hyper or nn.Hyper()
    hyper.validate()
    vocab = build_vocab(r.surface for r in records)
    rng = np.random.default_rng(hyper.seed)
    params = nn.init_params(
        "class", vocab, hyper, classes=registry.classes(pos), rng=rng
    )
    id_seqs = [encode_ids(vocab, r.surface) for r in records]
    history = nn.fit(params, id_seqs, targets, rng)
    return params, history


def model_registry(model: nn.ModelParams) -> ClassRegistry:
    """Rebuild the class registry frozen into a tagger model."""
    if not model.classes:
        raise DataError("model carries no class list (not a tagger model?)")
    pos = model.classes[0].split(";", 1)[0]
    return tagset.registry_from_classes(pos, model.classes)


def predict_bundle(
    model: nn.ModelParams, word: str
) -> tuple[FeatureBundle, np.ndarray]:
    """Argmax feature bundle for a word plus the full class distribution.

    Ties break toward the lowest class id, so prediction is a pure function
    of (model, word).
    """
    word = nfc(word)
    if not word:
        raise ValueError("word must be nonempty")
    ids = encode_ids(model.vocab, word)
    states = nn.bilstm_forward(model, ids)
    dist = nn.class_head(model, states)
    class_id = int(np.argmax(dist))
    bundle = tagset.parse_canonical(model.classes[class_id])
    return bundle, dist


@dataclass(frozen=True)
class AmbiguityReport:
    """Ceiling on word-level tagging accuracy imposed by duplicate surfaces.

    A surface occurring with k distinct bundles can contribute at most its
    most frequent bundle's count to any word-level classifier's correct
    total; ceiling = resolvable / total.
    """

    n_total: int
    n_resolvable: int
    conflicted_surfaces: tuple[str, ...]

    @property
    def ceiling(self) -> float:
        return self.n_resolvable / self.n_total if self.n_total else 1.0


def ambiguity_audit(records: Sequence[Record]) -> AmbiguityReport:
    """Group records by surface and count bundles no single mapping can get."""
    groups: dict[str, Counter] = defaultdict(Counter)
    for record in records:
        groups[record.surface][tagset.canonicalize(record.bundle)] += 1
    resolvable = 0
    conflicted = []
    for surface, counts in groups.items():
        resolvable += max(counts.values())
        if len(counts) > 1:
            conflicted.append(surface)
    return AmbiguityReport(
        n_total=len(records),
        n_resolvable=resolvable,
        conflicted_surfaces=tuple(sorted(conflicted)),
    )
