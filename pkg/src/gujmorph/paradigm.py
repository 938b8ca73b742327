"""Synthetic Unimorph-format corpora from declarative paradigm tables.

Provides desk-scale gold data with known boundaries and bundles: noun roots
crossed with case suffixes (optionally a plural marker), four-way inflected
adjectives, and a small configurable verb grid that deliberately includes
ambiguous surface forms (two bundles sharing one inflected form).

Suffixes that begin with a dependent vowel sign attach directly to the final
consonant of the stem, which is how a case marker spelled with an independent
vowel letter in grammar tables surfaces on real words.  Stem alternations and
loanword phonology are out of scope.

Tables can be loaded from UTF-8 files of "suffix<TAB>bundle-fragment" lines
(fragment tags ";"-separated, validated against the POS schema), so the
default grids are repairable without code changes.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from . import tagset
from .corpus import Record, write_tsv
from .errors import DataError
from .script import nfc
from .tagset import FeatureBundle, from_values


@dataclass(frozen=True)
class ParadigmTable:
    """Declarative suffix table: one (suffix, bundle fragment) row per form.

    stem_transform, identity when None, rewrites the root before suffixes
    attach (the lemma stays the untransformed root).  Rows must be distinct
    as (suffix, fragment) pairs; the verb grid repeats a suffix with
    different fragments on purpose, generating ambiguous surfaces.
    """

    pos: str
    rows: tuple[tuple[str, Mapping[str, str]], ...]
    stem_transform: Callable[[str], str] | None = None

    def __post_init__(self) -> None:
        seen = set()
        for suffix, fragment in self.rows:
            key = (suffix, tuple(sorted(fragment.items())))
            if key in seen:
                raise ValueError(f"duplicate paradigm row {key!r}")
            seen.add(key)
            from_values(self.pos, fragment)  # schema-validates the fragment

    def stem(self, root: str) -> str:
        return self.stem_transform(root) if self.stem_transform else root


# Case rows per the standard Gujarati six-case inventory.  The genitive in
# running text agrees with the possessed noun; the masculine singular form is
# used as the single default row, with the full four-way set available below.
NOUN_TABLE = ParadigmTable(
    pos="N",
    rows=(
        ("", {"case": "NOM"}),
        ("નો", {"case": "GEN"}),
        ("ે", {"case": "ERG"}),
        ("ને", {"case": "DAT"}),
        ("થી", {"case": "ABL"}),
        ("માં", {"case": "LOC"}),
    ),
)

GENITIVE_VARIANTS = ("નો", "ની", "નું", "ના")

PLURAL_SUFFIX = "ો"

# Inflected adjectives take the four-way paradigm; non-inflected ones have a
# single invariant form.
ADJ_TABLE = ParadigmTable(
    pos="ADJ",
    rows=(
        ("ો", {"type": "INFL", "gender": "M", "number": "SG"}),
        ("ી", {"type": "INFL", "gender": "F"}),
        ("ું", {"type": "INFL", "gender": "N"}),
        ("ા", {"type": "INFL", "number": "PL"}),
    ),
)

# Default verb grid: present habitual, gendered past progressives, and the
# infinitive citation form.  The repeated suffixes with different bundles are
# intentional: they reproduce the person and number ambiguities a word-level
# classifier cannot resolve.
VERB_TABLE = ParadigmTable(
    pos="V",
    rows=(
        ("ે", {"number": "SG", "person": "3", "tense": "PRS", "aspect": "HAB"}),
        ("તો", {"gender": "M", "number": "SG", "person": "1", "tense": "PST", "aspect": "PROG"}),
        ("તો", {"gender": "M", "number": "SG", "person": "3", "tense": "PST", "aspect": "PROG"}),
        ("તી", {"gender": "F", "number": "SG", "person": "3", "tense": "PST", "aspect": "PROG"}),
        ("તી", {"gender": "F", "number": "PL", "person": "3", "tense": "PST", "aspect": "PROG"}),
        ("તું", {"gender": "N", "number": "SG", "person": "3", "tense": "PST", "aspect": "PROG"}),
        ("તા", {"gender": "M", "number": "PL", "person": "3", "tense": "PST", "aspect": "PROG"}),
        ("વું", {"tense": "NFIN"}),
    ),
)

INFINITIVE_SUFFIX = "વું"


def load_table(lines: Iterable[str], pos: str) -> ParadigmTable:
    """Parse "suffix<TAB>bundle-fragment" lines into a validated table.

    The fragment column holds ";"-separated feature tags; an empty suffix
    column gives the bare (zero-marked) form.
    """
    rows = []
    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise DataError(f"table line {line_no}: expected 2 columns, got {len(parts)}")
        suffix, fragment_text = parts
        tags = [t for t in fragment_text.strip().split(";") if t]
        bundle = tagset.make_bundle(pos, tags)
        fragment = {
            dim: value
            for dim, value in zip(tagset.dimensions(pos), bundle.values)
            if value != tagset.NONE_VALUE
        }
        rows.append((nfc(suffix.strip()), fragment))
    if not rows:
        raise DataError("paradigm table is empty")
    return ParadigmTable(pos=pos, rows=tuple(rows))


def load_table_file(path, pos: str) -> ParadigmTable:
    with open(path, encoding="utf-8") as handle:
        return load_table(handle, pos)


def _make_record(stem: str, suffix: str, bundle: FeatureBundle, lemma: str) -> Record:
    surface = stem + suffix
    labels = [0] * len(surface)
    if suffix:
        labels[len(stem) - 1] = 1
    return Record(
        surface=surface,
        lemma=lemma,
        pos=bundle.pos,
        bundle=bundle,
        boundary=tuple(labels),
    )


def gen_nouns(
    roots: Sequence[str],
    genders: Mapping[str, str],
    plural: bool = False,
    table: ParadigmTable = NOUN_TABLE,
) -> list[Record]:
    """Cross roots with the case rows; with plural=True also with number.

    Plural forms insert the plural marker between root and case suffix.  Each
    record's lemma is the bare root and its gold boundary sits at the
    root/suffix seam (no split for the bare nominative).
    """
    if not roots:
        raise ValueError("roots must be nonempty")
    records = []
    numbers = ("SG", "PL") if plural else ("SG",)
    for root in roots:
        root = nfc(root)
        gender = genders[root]
        stem = table.stem(root)
        for number in numbers:
            marker = PLURAL_SUFFIX if number == "PL" else ""
            for suffix, fragment in table.rows:
                bundle = from_values(
                    "N", {"gender": gender, "number": number, **fragment}
                )
                records.append(_make_record(stem, marker + suffix, bundle, lemma=root))
    return records


def gen_adjectives(
    inflected: Sequence[str],
    noninflected: Sequence[str] = (),
    table: ParadigmTable = ADJ_TABLE,
) -> list[Record]:
    """Four forms per inflected stem, one invariant record per non-inflected."""
    if not inflected and not noninflected:
        raise ValueError("need at least one adjective stem")
    records = []
    for stem in inflected:
        stem = nfc(stem)
        for suffix, fragment in table.rows:
            bundle = from_values("ADJ", fragment)
            records.append(_make_record(table.stem(stem), suffix, bundle, lemma=stem))
    for stem in noninflected:
        stem = nfc(stem)
        bundle = from_values("ADJ", {"type": "NONINFL"})
        records.append(_make_record(stem, "", bundle, lemma=stem))
    return records


def gen_verbs(
    roots: Sequence[str],
    table: ParadigmTable = VERB_TABLE,
) -> list[Record]:
    """Cross roots with the verb grid; lemma is the infinitive root + વું.

    Every form, the infinitive included, carries its gold boundary at the
    root edge, so the citation form itself trains as root + infinitive
    suffix even though surface and lemma coincide there.
    """
    if not roots:
        raise ValueError("roots must be nonempty")
    records = []
    for root in roots:
        root = nfc(root)
        lemma = root + INFINITIVE_SUFFIX
        stem = table.stem(root)
        for suffix, fragment in table.rows:
            bundle = from_values("V", fragment)
            records.append(_make_record(stem, suffix, bundle, lemma=lemma))
    return records


def emit_tsv(records: Iterable[Record], path) -> None:
    """Write records in the corpus module's Unimorph TSV format."""
    write_tsv(records, path)


# Inventory for synthesizing pronounceable root shapes: consonants plus a few
# medial vowel signs; base roots always end in a consonant so matra-initial
# suffixes join legally.
_CONSONANTS = list("કખગઘચછજઝટઠડઢણતથદધનપફબભમયરલવશષસહ")
_MATRAS = list("ાિીુૂેો")

# Endings for decoy roots: strings identical to case markers but belonging to
# the root itself.  Real Gujarati has many such nouns, and telling them apart
# from genuinely suffixed forms is a known hard case for frequency-driven
# segmenters.
DECOY_ENDINGS = ("નો", "ે", "ને", "થી", "માં")


def random_roots(
    n: int,
    seed: int = 0,
    min_units: int = 2,
    max_units: int = 4,
    decoy_rate: float = 0.0,
) -> list[str]:
    """Deterministic list of n distinct synthetic roots.

    With decoy_rate > 0, that fraction of roots ends in a case-marker-shaped
    string that is part of the root.  No returned root extends another by a
    case suffix or plural marker, so generated noun corpora stay free of
    conflicting gold labelings.
    """
    rng = random.Random(seed)
    roots: list[str] = []
    seen: set[str] = set()
    blocked = {s for s, _ in NOUN_TABLE.rows if s}
    blocked |= set(GENITIVE_VARIANTS) | {PLURAL_SUFFIX} | set(DECOY_ENDINGS)
    while len(roots) < n:
        length = rng.randint(min_units, max_units)
        units: list[str] = []
        while len(units) < length:
            remaining = length - len(units)
            vowel_ok = units and units[-1] not in _MATRAS and remaining >= 2
            if vowel_ok and rng.random() < 0.4:
                units.append(rng.choice(_MATRAS))
            else:
                units.append(rng.choice(_CONSONANTS))
        root = "".join(units)
        if rng.random() < decoy_rate:
            root += rng.choice(DECOY_ENDINGS)
        if root in seen:
            continue
        # One root being another plus an ending would let two records share a
        # surface with different gold cuts.
        conflict = any(
            root == other + end or other == root + end
            for other in roots
            for end in blocked
        )
        if not conflict:
            seen.add(root)
            roots.append(root)
    return roots


def assign_genders(roots: Sequence[str]) -> dict[str, str]:
    """Round-robin M/F/N assignment, deterministic in root order."""
    cycle = ("M", "F", "N")
    return {nfc(root): cycle[i % 3] for i, root in enumerate(roots)}
