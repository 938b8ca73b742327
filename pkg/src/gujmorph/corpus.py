"""Unimorph TSV ingestion, gold boundary derivation, and train/test split.

Input format: UTF-8, LF line endings, three TAB-separated columns
(lemma, inflected form, ";"-separated feature tags, POS tag first).
Lines that fail to parse are collected as issues with their line numbers;
parsing continues past them.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import IO, Iterable

from . import tagset
from .script import nfc
from .tagset import FeatureBundle

# Boundary label vectors: labels[i] == 1 means unit i is the last unit of a
# morph.  The final unit never carries a 1 (a cut after the last unit is
# meaningless).
BoundaryLabels = tuple[int, ...]


@dataclass
class Record:
    """One dataset row.  surface/lemma are NFC strings (one unit per char)."""

    surface: str
    lemma: str
    pos: str
    bundle: FeatureBundle
    boundary: BoundaryLabels | None = None
    line_no: int | None = None

    def key(self) -> tuple[str, str, str]:
        """Identity used by round-trip checks (boundary is derived state)."""
        return (self.surface, self.lemma, tagset.canonicalize(self.bundle))


@dataclass(frozen=True)
class ParseIssue:
    line_no: int
    reason: str


def parse_unimorph(stream: IO[str] | Iterable[str]) -> tuple[list[Record], list[ParseIssue]]:
    """Parse a Unimorph-format stream into records plus collected issues.

    Blank lines are skipped silently.  Issue reasons: "malformed-line" for a
    wrong column count or empty lemma/form, "unknown-pos" for an unrecognized
    leading feature tag, "bad-features: ..." for tags that violate the POS
    schema.
    """
    records: list[Record] = []
    issues: list[ParseIssue] = []
    for line_no, raw in enumerate(stream, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip():
            continue
        columns = line.split("\t")
        if len(columns) != 3:
            issues.append(ParseIssue(line_no, "malformed-line"))
            continue
        lemma, surface, features = columns
        lemma = nfc(lemma.strip())
        surface = nfc(surface.strip())
        if not lemma or not surface:
            issues.append(ParseIssue(line_no, "malformed-line"))
            continue
        tags = [tag for tag in features.strip().split(";") if tag]
        if not tags or tags[0] not in tagset.SCHEMAS:
            issues.append(ParseIssue(line_no, "unknown-pos"))
            continue
        pos = tags[0]
        try:
            bundle = tagset.make_bundle(pos, tags[1:])
        except tagset.SchemaViolation as exc:
            issues.append(ParseIssue(line_no, f"bad-features: {exc}"))
            continue
        records.append(
            Record(surface=surface, lemma=lemma, pos=pos, bundle=bundle, line_no=line_no)
        )
    return records, issues


def derive_boundary(surface: str, lemma: str) -> BoundaryLabels:
    """Gold boundary from the longest common prefix of surface and lemma.

    With k = LCP length in units: 1 <= k < len(surface) puts the single split
    after unit k (labels[k-1] = 1); otherwise (identical forms, surface a
    prefix of the lemma, or no shared prefix at all) every label is 0.
    """
    if not surface or not lemma:
        raise ValueError("surface and lemma must be nonempty")
    k = 0
    for a, b in zip(surface, lemma):
        if a != b:
            break
        k += 1
    labels = [0] * len(surface)
    if 1 <= k < len(surface):
        labels[k - 1] = 1
    return tuple(labels)


def attach_boundaries(records: Iterable[Record]) -> list[ParseIssue]:
    """Derive and set gold boundaries in place for records lacking them.

    Suppletive pairs (no common prefix) keep the all-zero labeling and are
    flagged rather than dropped, so corpus counts stay intact.
    """
    flagged: list[ParseIssue] = []
    for record in records:
        if record.boundary is None:
            record.boundary = derive_boundary(record.surface, record.lemma)
        if record.surface[0] != record.lemma[0]:
            flagged.append(ParseIssue(record.line_no or 0, "no-common-prefix"))
    return flagged


def decode_segmentation(surface: str, labels: Iterable[int]) -> list[str]:
    """Cut the word after every index labeled 1; morphs concatenate back.

    Handles any number of 1s (multi-suffix words); a stray 1 on the final
    unit is ignored.
    """
    labels = tuple(labels)
    if len(labels) != len(surface):
        raise ValueError(
            f"labels length {len(labels)} != surface length {len(surface)}"
        )
    cuts = [i + 1 for i in range(len(surface) - 1) if labels[i]]
    morphs = []
    start = 0
    for cut in cuts + [len(surface)]:
        morphs.append(surface[start:cut])
        start = cut
    return morphs


def cut_set(labels: Iterable[int]) -> frozenset[int]:
    """Cut positions (indices after which the word splits) of a labeling."""
    labels = tuple(labels)
    return frozenset(i + 1 for i in range(len(labels) - 1) if labels[i])


def cuts_of_morphs(morphs: Iterable[str]) -> frozenset[int]:
    """Cut positions implied by a morph sequence."""
    cuts = set()
    offset = 0
    morphs = list(morphs)
    for morph in morphs[:-1]:
        offset += len(morph)
        cuts.add(offset)
    return frozenset(cuts)


def split_train_test(
    records: list[Record], ratio: float, seed: int
) -> tuple[list[Record], list[Record]]:
    """Deterministic shuffle under seed, first ceil(ratio*n) records to train."""
    if not 0 < ratio < 1:
        raise ValueError(f"ratio must be in (0, 1), got {ratio}")
    shuffled = list(records)
    random.Random(seed).shuffle(shuffled)
    n_train = math.ceil(ratio * len(shuffled))
    return shuffled[:n_train], shuffled[n_train:]


def format_record(record: Record) -> str:
    """One TSV line: lemma, form, features (NONE-valued dimensions omitted)."""
    tags = [record.pos] + [v for v in record.bundle.values if v != tagset.NONE_VALUE]
    return f"{record.lemma}\t{record.surface}\t{';'.join(tags)}"


def write_tsv(records: Iterable[Record], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for record in records:
            handle.write(format_record(record) + "\n")


def quality_report(issues: Iterable[ParseIssue]) -> str:
    """Plain-text report: one "line_no<TAB>reason" line per issue."""
    return "".join(f"{issue.line_no}\t{issue.reason}\n" for issue in issues)
