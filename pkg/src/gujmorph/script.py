"""Character-unit decomposition and integer vocabulary for Indic-script words.

A "unit" is one Unicode scalar value of the NFC-normalized word.  Gujarati
dependent vowel signs (matras) are separate code points, so a morph boundary
may fall between a consonant and its vowel sign -- inside what a grapheme
segmenter would treat as one cluster.  All boundary indices in this package
are therefore defined over units, never over grapheme clusters.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from typing import Iterable

PAD_ID = 0
UNK_ID = 1

# Pseudo-units occupying the reserved ids; multi-character on purpose so they
# can never collide with a real one-codepoint unit.
PAD_UNIT = "<pad>"
UNK_UNIT = "<unk>"


def nfc(text: str) -> str:
    """NFC-normalize text."""
    return unicodedata.normalize("NFC", text)


def to_units(text: str) -> list[str]:
    """Decompose text into character units (code points of its NFC form).

    Joining the result re-yields the NFC form.  Empty input gives [].
    """
    return list(nfc(text))


@dataclass(frozen=True)
class Vocab:
    """Frozen unit <-> id bijection with reserved PAD=0 and UNK=1.

    Immutable after construction; safe for concurrent reads.
    """

    unit_to_id: dict[str, int]
    id_to_unit: tuple[str, ...]

    @property
    def size(self) -> int:
        return len(self.id_to_unit)

    def id_of(self, unit: str) -> int:
        return self.unit_to_id.get(unit, UNK_ID)


def build_vocab(words: Iterable[Iterable[str]]) -> Vocab:
    """Assign ids >= 2 to every distinct unit, in first-occurrence order."""
    unit_to_id: dict[str, int] = {}
    id_to_unit: list[str] = [PAD_UNIT, UNK_UNIT]
    for word in words:
        for unit in word:
            if unit not in unit_to_id:
                unit_to_id[unit] = len(id_to_unit)
                id_to_unit.append(unit)
    return Vocab(unit_to_id=unit_to_id, id_to_unit=tuple(id_to_unit))


def encode_ids(vocab: Vocab, units: Iterable[str]) -> list[int]:
    """Map units to ids; unknown units become UNK (1).  Length-preserving."""
    return [vocab.unit_to_id.get(u, UNK_ID) for u in units]
