"""Unsupervised segmentation baseline: two-part minimum description length.

The model trades the cost of encoding the corpus as a stream of morph tokens
against the cost of spelling out the morph lexicon:

    corpus cost  = -sum over tokens of log2(count(m) / N)
    lexicon cost = sum over types of (len(m) + 1) * log2(A + 1)

with N the total token count and A the alphabet size.  Training greedily
re-splits each word (whole vs. every binary cut, recursing into adopted
halves) in seeded random order, accepting only changes that lower the total
cost, and stops when a full pass improves it by less than a threshold.

This is the simple Morfessor-Baseline-style formulation, chosen because it
is exactly checkable against brute-force enumeration at toy scale.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .script import nfc

_logger = logging.getLogger(__name__)

_IMPROVE_EPS = 1e-9  # strict-improvement guard against float churn


@dataclass
class MdlModel:
    """Morph lexicon with counts and incrementally maintained total cost."""

    counts: dict[str, int] = field(default_factory=dict)
    alphabet_size: int = 0
    n_tokens: int = 0
    analyses: dict[str, list[str]] = field(default_factory=dict)
    word_counts: dict[str, int] = field(default_factory=dict)
    # Running sums: _count_log = sum over types of c*log2(c);
    # _type_len = sum over types of (len + 1).
    _count_log: float = 0.0
    _type_len: int = 0

    def _add(self, morph: str, k: int) -> None:
        old = self.counts.get(morph, 0)
        new = old + k
        if old:
            self._count_log -= old * math.log2(old)
        else:
            self._type_len += len(morph) + 1
        self._count_log += new * math.log2(new) if new > 1 else 0.0
        self.counts[morph] = new
        self.n_tokens += k

    def _remove(self, morph: str, k: int) -> None:
        old = self.counts[morph]
        new = old - k
        if new < 0:
            raise ValueError(f"morph count underflow for {morph!r}")
        self._count_log -= old * math.log2(old) if old > 1 else 0.0
        if new:
            self._count_log += new * math.log2(new) if new > 1 else 0.0
            self.counts[morph] = new
        else:
            self._type_len -= len(morph) + 1
            del self.counts[morph]
        self.n_tokens -= k

    def cost(self) -> float:
        """Total description length in bits (corpus + lexicon)."""
        if self.n_tokens == 0:
            return 0.0
        corpus = self.n_tokens * math.log2(self.n_tokens) - self._count_log
        lexicon = self._type_len * math.log2(self.alphabet_size + 1)
        return corpus + lexicon

    def recompute_cost(self) -> float:
        """Cost from first principles, for verifying the cached sums."""
        n = sum(self.counts.values())
        if n == 0:
            return 0.0
        corpus = -sum(c * math.log2(c / n) for c in self.counts.values())
        lexicon = sum(
            (len(m) + 1) * math.log2(self.alphabet_size + 1) for m in self.counts
        )
        return corpus + lexicon


def total_cost(model: MdlModel) -> float:
    return model.cost()


def _split_seq(model: MdlModel, seq: str, k: int) -> list[str]:
    """Optimize one sequence not currently counted; leaves end up counted.

    Evaluates keeping the sequence whole against every binary cut and adopts
    the cheapest, recursing into adopted halves (each half re-optimized while
    the other stays in the model, so costs reflect the live context).
    """
    model._add(seq, k)
    best_cost = model.cost()
    model._remove(seq, k)
    best_split = None
    for i in range(1, len(seq)):
        left, right = seq[:i], seq[i:]
        model._add(left, k)
        model._add(right, k)
        cost = model.cost()
        model._remove(left, k)
        model._remove(right, k)
        if cost < best_cost - _IMPROVE_EPS:
            best_cost = cost
            best_split = (left, right)
    if best_split is None:
        model._add(seq, k)
        return [seq]
    left, right = best_split
    model._add(left, k)
    model._add(right, k)
    model._remove(left, k)
    morphs = _split_seq(model, left, k)
    model._remove(right, k)
    return morphs + _split_seq(model, right, k)


def train_mdl(
    words: Iterable[str],
    seed: int = 0,
    max_passes: int = 20,
    min_improvement: float = 0.01,
    frequencies: Mapping[str, int] | None = None,
) -> MdlModel:
    """Fit the lexicon by greedy recursive splitting over shuffled passes.

    Training is word-type based (each unique word counted once) unless
    explicit frequencies are given.  Total cost never increases: a word's
    re-analysis is reverted if it would (the greedy recursion is almost
    always an improvement, but the guard makes monotonicity unconditional).
    """
    unique: list[str] = []
    seen: set[str] = set()
    for word in words:
        word = nfc(word)
        if word and word not in seen:
            seen.add(word)
            unique.append(word)
    if not unique:
        raise ValueError("cannot train on an empty word list")

    model = MdlModel()
    model.alphabet_size = len({u for w in unique for u in w})
    for word in unique:
        k = frequencies.get(word, 1) if frequencies else 1
        model.word_counts[word] = k
        model.analyses[word] = [word]
        model._add(word, k)

    rng = random.Random(seed)
    previous = model.cost()
    for pass_no in range(1, max_passes + 1):
        order = list(unique)
        rng.shuffle(order)
        for word in order:
            k = model.word_counts[word]
            before = model.cost()
            old = model.analyses[word]
            for morph in old:
                model._remove(morph, k)
            new = _split_seq(model, word, k)
            if model.cost() > before + _IMPROVE_EPS:
                for morph in new:
                    model._remove(morph, k)
                for morph in old:
                    model._add(morph, k)
            else:
                model.analyses[word] = new
        current = model.cost()
        _logger.info("mdl pass %d cost %.3f bits", pass_no, current)
        if previous - current < min_improvement:
            break
        previous = current
    return model


def segment_mdl(model: MdlModel, word: str) -> list[str]:
    """Minimum-cost segmentation of a word into lexicon morphs.

    Dynamic programming over cut points; a known morph costs
    -log2(count/N), an unknown single unit falls back to the smoothed
    -log2(1/(N+A)), and unknown multi-unit chunks are not allowed.  The
    morphs always concatenate back to the input.
    """
    word = nfc(word)
    if not word:
        return []
    if model.n_tokens == 0:
        return [word]
    n = len(word)
    fallback = math.log2(model.n_tokens + model.alphabet_size)
    inf = math.inf
    best = [inf] * (n + 1)
    back = [0] * (n + 1)
    best[0] = 0.0
    for j in range(1, n + 1):
        for i in range(j):
            piece = word[i:j]
            count = model.counts.get(piece)
            if count:
                cost = -math.log2(count / model.n_tokens)
            elif j - i == 1:
                cost = fallback
            else:
                continue
            total = best[i] + cost
            if total < best[j]:
                best[j] = total
                back[j] = i
    morphs = []
    j = n
    while j > 0:
        i = back[j]
        morphs.append(word[i:j])
        j = i
    morphs.reverse()
    return morphs


def dump_lexicon(model: MdlModel, path) -> None:
    """Write "morph<TAB>count" lines, most frequent first."""
    entries = sorted(model.counts.items(), key=lambda kv: (-kv[1], kv[0]))
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for morph, count in entries:
            handle.write(f"{morph}\t{count}\n")
