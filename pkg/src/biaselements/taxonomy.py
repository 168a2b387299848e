"""Load, validate, and query the machine-readable bias taxonomy.

The taxonomy is data, not code: 8 functional groups and 38 sentence-level
bias types with definitions, real-world example sentences, and the
frequency-tier scale used by the prevalence report and the table layout.
The bundled copy lives in ``data/taxonomy.json``; everything here treats a
loaded :class:`Taxonomy` as immutable.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from importlib import resources
from typing import IO, Union

from .errors import DomainError, NotFound, ParseError, ValidationError

Source = Union[bytes, str, IO[bytes]]


class FrequencyTier(enum.IntEnum):
    """Prevalence band; the numeric value orders tiers low-to-high."""

    VERY_LOW = 1
    LOW = 2
    MEDIUM = 3
    HIGH = 4
    VERY_HIGH = 5

    @property
    def slug(self) -> str:
        return self.name.lower()

    @property
    def label(self) -> str:
        return self.name.replace("_", " ").capitalize()

    @classmethod
    def from_slug(cls, slug: str) -> "FrequencyTier":
        try:
            return cls[slug.upper()]
        except KeyError:
            raise ParseError(f"unknown tier name {slug!r}") from None


@dataclass(frozen=True)
class TierBand:
    """One tier of the scale.

    ``min_percent`` is the inclusive lower bound actually used for
    assignment; ``stated_min``/``stated_max`` keep the integer bounds the
    scale was published with, which the boundary flagging needs.
    """

    tier: FrequencyTier
    min_percent: float
    stated_min: int
    stated_max: int | None  # None = unbounded above


@dataclass(frozen=True)
class TierThresholds:
    """The five-band scale, ordered highest tier first.

    Assignment intervals are half-open: [25, inf), [15, 25), [8, 15),
    [5, 8) and (0, 5). The bottom band starts above zero because a zero
    percentage means "not observed" and gets no tier at all.
    """

    bands: tuple[TierBand, ...]

    def tier_for(self, percentage: float) -> FrequencyTier:
        if percentage <= 0:
            raise DomainError(f"percentage must be > 0, got {percentage}")
        for band in self.bands:
            if percentage >= band.min_percent:
                return band.tier
        # unreachable while the lowest band's min_percent is 0
        return self.bands[-1].tier

    def boundary_flagged(self, percentage: float) -> bool:
        """True when the value sits outside the published integer scale.

        Fractional values between two interior bands bin downward with
        their integer part (14.84 belongs to the 8-14 band), so only the
        scale's outer seams count as outside it: the strip between the
        second band's printed cap and the top band's hard threshold
        (24 < p < 25), and anything below the bottom band's printed floor
        (0 < p < 1).
        """
        if percentage <= 0:
            raise DomainError(f"percentage must be > 0, got {percentage}")
        top, second = self.bands[0], self.bands[1]
        bottom = self.bands[-1]
        if second.stated_max is not None and second.stated_max < percentage < top.min_percent:
            return True
        return percentage < bottom.stated_min


@dataclass(frozen=True)
class ExampleSentence:
    text: str
    language: str = "original"  # "original" or "translated"
    source_note: str | None = None


@dataclass(frozen=True)
class BiasGroup:
    id: str
    name: str
    description: str
    color: str | None = None  # table rendering palette, keyed here so data owns it


@dataclass(frozen=True)
class BiasType:
    id: str
    name: str
    group_id: str
    definition: str
    examples: tuple[ExampleSentence, ...]
    notes: str = ""  # drivers/effects prose; never computed on


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class Taxonomy:
    version: str
    groups: tuple[BiasGroup, ...]
    types: tuple[BiasType, ...]
    tiers: TierThresholds
    _types_by_id: dict = field(default_factory=dict, repr=False, compare=False)
    _groups_by_id: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self._types_by_id.update({t.id: t for t in self.types})
        self._groups_by_id.update({g.id: g for g in self.groups})

    def type_ids(self) -> tuple[str, ...]:
        return tuple(t.id for t in self.types)

    def group_ids(self) -> tuple[str, ...]:
        return tuple(g.id for g in self.groups)

    def get_type(self, type_id: str) -> BiasType:
        try:
            return self._types_by_id[type_id]
        except KeyError:
            raise NotFound(f"unknown bias type {type_id!r}") from None

    def get_group(self, group_id: str) -> BiasGroup:
        try:
            return self._groups_by_id[group_id]
        except KeyError:
            raise NotFound(f"unknown bias group {group_id!r}") from None

    def list_group(self, group_id: str) -> tuple[BiasType, ...]:
        """Types of one group, in declaration order (the tie-break order)."""
        self.get_group(group_id)
        return tuple(t for t in self.types if t.group_id == group_id)

    def declaration_index(self, type_id: str) -> int:
        for i, t in enumerate(self.types):
            if t.id == type_id:
                return i
        raise NotFound(f"unknown bias type {type_id!r}")


def tier_for(percentage: float, thresholds: TierThresholds) -> FrequencyTier:
    return thresholds.tier_for(percentage)


# ---------------------------------------------------------------------------
# Admission criteria for taxonomy entries. These are editorial judgments a
# human makes before adding a type; they cannot be machine-checked, so they
# are carried as documentation next to the structural rules.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AdmissionCriterion:
    rule: str
    description: str
    machine_checked: bool = False


TYPE_ADMISSION_CRITERIA: tuple[AdmissionCriterion, ...] = (
    AdmissionCriterion(
        "narrative-support",
        "A type must describe a way of steering coverage toward a pre-existing "
        "narrative rather than an unprejudiced account of the issue.",
    ),
    AdmissionCriterion(
        "sentence-local",
        "A type must be identifiable from a single sentence or continuous "
        "passage alone, without surrounding-article or external context.",
    ),
    AdmissionCriterion(
        "elementary",
        "A type must be able to introduce bias on its own, even though in "
        "practice one sentence often exhibits several types at once.",
    ),
)


# ---------------------------------------------------------------------------
# Structural validation (machine-checked)
# ---------------------------------------------------------------------------

def validate(
    taxonomy: Taxonomy,
    expected_type_count: int | None = None,
    expected_group_count: int | None = None,
) -> ValidationReport:
    """Check every structural rule; violations are data, not exceptions."""
    out: list[Violation] = []

    seen_groups: set[str] = set()
    for g in taxonomy.groups:
        if g.id in seen_groups:
            out.append(Violation("group-id-unique", f"duplicate id {g.id!r}"))
        seen_groups.add(g.id)
        if not g.name:
            out.append(Violation("group-name-nonempty", f"group {g.id!r} has an empty name"))

    seen_types: set[str] = set()
    for t in taxonomy.types:
        if t.id in seen_types:
            out.append(Violation("type-id-unique", f"duplicate id {t.id!r}"))
        seen_types.add(t.id)
        if not t.name:
            out.append(Violation("type-name-nonempty", f"type {t.id!r} has an empty name"))
        if t.group_id not in seen_groups:
            out.append(
                Violation("group-ref", f"type {t.id!r} references unknown group {t.group_id!r}")
            )
        if not t.definition.strip():
            out.append(Violation("definition-nonempty", f"type {t.id!r} has an empty definition"))
        if not t.examples:
            out.append(Violation("examples-nonempty", f"type {t.id!r} has no example sentence"))
        for ex in t.examples:
            if not ex.text.strip():
                out.append(Violation("example-text-nonempty", f"type {t.id!r} has a blank example"))

    bands = taxonomy.tiers.bands
    if len(bands) != len(FrequencyTier):
        out.append(Violation("tier-count", f"expected {len(FrequencyTier)} tiers, found {len(bands)}"))
    bounds = [b.min_percent for b in bands]
    if any(nxt >= prev for prev, nxt in zip(bounds, bounds[1:])):
        out.append(Violation("tier-bounds-decreasing", f"tier lower bounds not strictly decreasing: {bounds}"))
    if bands and bands[0].min_percent != 25.0:
        out.append(Violation("tier-top-bound", f"top tier lower bound must be 25.0, found {bands[0].min_percent}"))
    ranks = [b.tier for b in bands]
    if ranks != sorted(ranks, reverse=True):
        out.append(Violation("tier-order", "tiers must be declared highest first"))

    if expected_type_count is not None and len(taxonomy.types) != expected_type_count:
        out.append(
            Violation(
                "type-count",
                f"type count mismatch: expected {expected_type_count}, found {len(taxonomy.types)}",
            )
        )
    if expected_group_count is not None and len(taxonomy.groups) != expected_group_count:
        out.append(
            Violation(
                "group-count",
                f"group count mismatch: expected {expected_group_count}, found {len(taxonomy.groups)}",
            )
        )
    return ValidationReport(tuple(out))


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _read_source(source: Source) -> bytes:
    if isinstance(source, bytes):
        return source
    if isinstance(source, str):
        return source.encode("utf-8")
    return source.read()


def load_taxonomy(source: Source) -> Taxonomy:
    """Parse and fully validate a taxonomy; a returned value is always valid."""
    raw = _read_source(source)
    if not raw.strip():
        raise ParseError("empty taxonomy stream")
    try:
        data = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"taxonomy is not well-formed JSON: {exc}") from exc
    try:
        taxonomy = taxonomy_from_dict(data)
    except (KeyError, TypeError, AttributeError) as exc:
        raise ParseError(f"taxonomy JSON misses a required field: {exc}") from exc
    report = validate(taxonomy)
    if not report.ok:
        first = report.violations[0]
        raise ValidationError(first.rule, first.message)
    return taxonomy


def taxonomy_from_dict(data: dict) -> Taxonomy:
    groups = tuple(
        BiasGroup(g["id"], g["name"], g.get("description", ""), g.get("color"))
        for g in data["groups"]
    )
    types = tuple(
        BiasType(
            t["id"],
            t["name"],
            t["group"],
            t["definition"],
            tuple(
                ExampleSentence(e["text"], e.get("language", "original"), e.get("source_note"))
                for e in t["examples"]
            ),
            t.get("notes", ""),
        )
        for t in data["types"]
    )
    bands = tuple(
        TierBand(
            FrequencyTier.from_slug(b["name"]),
            float(b["min_percent"]),
            int(b["stated_min"]),
            None if b["stated_max"] is None else int(b["stated_max"]),
        )
        for b in data["tiers"]
    )
    return Taxonomy(data["version"], groups, types, TierThresholds(bands))


def taxonomy_to_dict(taxonomy: Taxonomy) -> dict:
    return {
        "version": taxonomy.version,
        "groups": [
            {"id": g.id, "name": g.name, "description": g.description, "color": g.color}
            for g in taxonomy.groups
        ],
        "types": [
            {
                "id": t.id,
                "name": t.name,
                "group": t.group_id,
                "definition": t.definition,
                "examples": [
                    {"text": e.text, "language": e.language, "source_note": e.source_note}
                    for e in t.examples
                ],
                "notes": t.notes,
            }
            for t in taxonomy.types
        ],
        "tiers": [
            {
                "name": b.tier.slug,
                "label": b.tier.label,
                "min_percent": b.min_percent,
                "stated_min": b.stated_min,
                "stated_max": b.stated_max,
            }
            for b in taxonomy.tiers.bands
        ],
    }


def serialize_taxonomy(taxonomy: Taxonomy) -> bytes:
    return (json.dumps(taxonomy_to_dict(taxonomy), indent=2, ensure_ascii=False) + "\n").encode(
        "utf-8"
    )


_BUNDLED: Taxonomy | None = None


def bundled_taxonomy() -> Taxonomy:
    """The taxonomy shipped with the package (cached; immutable)."""
    global _BUNDLED
    if _BUNDLED is None:
        raw = resources.files("biaselements").joinpath("data/taxonomy.json").read_bytes()
        _BUNDLED = load_taxonomy(raw)
    return _BUNDLED
