"""Grammatical feature bundles and their monolithic class ids.

Every unique combination of feature values within a POS is one class, so the
classifier has a single softmax over combinations rather than one head per
dimension.  Dimension value sets are seeded from standard Gujarati grammar
(three genders, two numbers, six cases, three persons); the registry itself
is built from data, so any schema-valid combination seen in a corpus gets an
id.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import SchemaViolation, UnknownBundle, UnknownClass

POS_TAGS = ("N", "V", "ADJ")
NONE_VALUE = "NONE"

# Per-POS dimension order and admissible values.  Within a POS the value sets
# are mutually disjoint, which is what makes order-insensitive parsing of a
# feature tag list well-defined.
SCHEMAS: dict[str, tuple[tuple[str, frozenset[str]], ...]] = {
    "N": (
        ("gender", frozenset({"M", "F", "N"})),
        ("number", frozenset({"SG", "PL"})),
        ("case", frozenset({"NOM", "GEN", "ERG", "DAT", "ABL", "LOC"})),
    ),
    "V": (
        ("gender", frozenset({"M", "F", "N"})),
        ("number", frozenset({"SG", "PL"})),
        ("person", frozenset({"1", "2", "3"})),
        ("tense", frozenset({"PRS", "PST", "FUT", "NFIN"})),
        ("aspect", frozenset({"HAB", "PROG", "PRF", "IPFV"})),
    ),
    "ADJ": (
        ("type", frozenset({"INFL", "NONINFL"})),
        ("gender", frozenset({"M", "F", "N"})),
        ("number", frozenset({"SG", "PL"})),
    ),
}

for _pos, _dims in SCHEMAS.items():
    _seen: set[str] = set()
    for _name, _values in _dims:
        assert not (_seen & _values), f"{_pos}: overlapping value sets"
        _seen |= _values
del _pos, _dims, _seen, _name, _values


@dataclass(frozen=True)
class FeatureBundle:
    """One full feature combination; values aligned to the POS schema order.

    A dimension the data leaves unspecified holds the explicit NONE value.
    """

    pos: str
    values: tuple[str, ...]


def dimensions(pos: str) -> tuple[str, ...]:
    if pos not in SCHEMAS:
        raise SchemaViolation(f"unknown POS tag {pos!r}")
    return tuple(name for name, _ in SCHEMAS[pos])


def make_bundle(pos: str, tags: Iterable[str]) -> FeatureBundle:
    """Build a bundle from feature tags in any order.

    Each tag is assigned to the dimension whose value set contains it; NONE
    tags are ignored (unspecified dimensions default to NONE).  Unknown tags
    and duplicate assignments raise SchemaViolation.
    """
    if pos not in SCHEMAS:
        raise SchemaViolation(f"unknown POS tag {pos!r}")
    dims = SCHEMAS[pos]
    values = [NONE_VALUE] * len(dims)
    for tag in tags:
        if tag == NONE_VALUE:
            continue
        for i, (name, admissible) in enumerate(dims):
            if tag in admissible:
                if values[i] != NONE_VALUE:
                    raise SchemaViolation(
                        f"{pos}: duplicate value for dimension {name!r}: "
                        f"{values[i]!r} and {tag!r}"
                    )
                values[i] = tag
                break
        else:
            raise SchemaViolation(f"{pos}: unknown feature tag {tag!r}")
    return FeatureBundle(pos=pos, values=tuple(values))


def from_values(pos: str, assignment: Mapping[str, str]) -> FeatureBundle:
    """Build a bundle from a dimension-name -> value mapping."""
    if pos not in SCHEMAS:
        raise SchemaViolation(f"unknown POS tag {pos!r}")
    dims = SCHEMAS[pos]
    known = {name for name, _ in dims}
    for name in assignment:
        if name not in known:
            raise SchemaViolation(f"{pos}: unknown dimension {name!r}")
    values = []
    for name, admissible in dims:
        value = assignment.get(name, NONE_VALUE)
        if value != NONE_VALUE and value not in admissible:
            raise SchemaViolation(f"{pos}: bad value {value!r} for {name!r}")
        values.append(value)
    return FeatureBundle(pos=pos, values=tuple(values))


def canonicalize(bundle: FeatureBundle) -> str:
    """Deterministic string form: POS tag then values in schema order.

    Equal bundles give equal strings, so the string is usable as a map key.
    """
    if bundle.pos not in SCHEMAS:
        raise SchemaViolation(f"unknown POS tag {bundle.pos!r}")
    dims = SCHEMAS[bundle.pos]
    if len(bundle.values) != len(dims):
        raise SchemaViolation(
            f"{bundle.pos}: expected {len(dims)} dimensions, "
            f"got {len(bundle.values)}"
        )
    for value, (name, admissible) in zip(bundle.values, dims):
        if value != NONE_VALUE and value not in admissible:
            raise SchemaViolation(
                f"{bundle.pos}: bad value {value!r} for dimension {name!r}"
            )
    return ";".join((bundle.pos,) + bundle.values)


def parse_canonical(text: str) -> FeatureBundle:
    """Inverse of canonicalize (positional; explicit NONE kept)."""
    parts = text.split(";")
    pos = parts[0]
    if pos not in SCHEMAS:
        raise SchemaViolation(f"unknown POS tag {pos!r}")
    if len(parts) - 1 != len(SCHEMAS[pos]):
        raise SchemaViolation(f"bad canonical bundle string {text!r}")
    bundle = FeatureBundle(pos=pos, values=tuple(parts[1:]))
    canonicalize(bundle)  # validates values
    return bundle


class ClassRegistry:
    """Per-POS bijection between canonical bundle strings and dense ids."""

    def __init__(self) -> None:
        self._ids: dict[str, dict[str, int]] = {pos: {} for pos in SCHEMAS}
        self._canonical: dict[str, list[str]] = {pos: [] for pos in SCHEMAS}

    def register(self, bundle: FeatureBundle) -> int:
        """Return the bundle's class id, assigning the next free one if new."""
        key = canonicalize(bundle)
        ids = self._ids[bundle.pos]
        if key not in ids:
            ids[key] = len(self._canonical[bundle.pos])
            self._canonical[bundle.pos].append(key)
        return ids[key]

    def class_of(self, bundle: FeatureBundle) -> int:
        key = canonicalize(bundle)
        try:
            return self._ids[bundle.pos][key]
        except KeyError:
            raise UnknownBundle(f"bundle not registered: {key}") from None

    def bundle_of(self, pos: str, class_id: int) -> FeatureBundle:
        if pos not in SCHEMAS:
            raise SchemaViolation(f"unknown POS tag {pos!r}")
        canon = self._canonical[pos]
        if not 0 <= class_id < len(canon):
            raise UnknownClass(f"no class {class_id} for POS {pos}")
        return parse_canonical(canon[class_id])

    def n_classes(self, pos: str) -> int:
        return len(self._canonical[pos])

    def classes(self, pos: str) -> list[str]:
        """Canonical strings in class-id order."""
        return list(self._canonical[pos])


def register_all(records) -> ClassRegistry:
    """One class per distinct canonical bundle per POS, over all records."""
    registry = ClassRegistry()
    for record in records:
        registry.register(record.bundle)
    return registry


def registry_from_classes(pos: str, canonical_strings: Iterable[str]) -> ClassRegistry:
    """Rebuild a (single-POS) registry from canonical strings in id order."""
    registry = ClassRegistry()
    for text in canonical_strings:
        bundle = parse_canonical(text)
        if bundle.pos != pos:
            raise SchemaViolation(f"class list for {pos} contains {text!r}")
        registry.register(bundle)
    return registry


def save_registry(registry: ClassRegistry, path) -> None:
    """Write "class_id<TAB>canonical_string" lines, grouped by POS."""
    with open(path, "w", encoding="utf-8") as handle:
        for pos in POS_TAGS:
            for class_id, canon in enumerate(registry.classes(pos)):
                handle.write(f"{class_id}\t{canon}\n")


def load_registry(path) -> ClassRegistry:
    registry = ClassRegistry()
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                id_text, canon = line.split("\t")
                expected = int(id_text)
            except ValueError:
                raise SchemaViolation(
                    f"{path}:{line_no}: bad registry line {line!r}"
                ) from None
            bundle = parse_canonical(canon)
            got = registry.register(bundle)
            if got != expected:
                raise SchemaViolation(
                    f"{path}:{line_no}: non-contiguous class id {expected}"
                )
    return registry
