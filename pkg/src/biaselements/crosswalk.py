"""Mapping between this taxonomy and three earlier bias/propaganda taxonomies.

Each row maps one of our type ids (or the ``non-sentence-level`` sentinel
for phenomena outside sentence scope) to zero or more labels in each
external scheme. Labels are stored verbatim as published, including any
typos; matching is exact string comparison, never fuzzy.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import IO, Union

from .errors import NotFound, ParseError, ValidationError
from .taxonomy import Taxonomy

Source = Union[bytes, str, IO[bytes]]

NON_SENTENCE_LEVEL = "non-sentence-level"

# canonical external name -> JSON field name
EXTERNAL_TAXONOMIES: dict[str, str] = {
    "dasanmartino": "dasanmartino",
    "spinde": "spinde",
    "rodrigo-gines": "rodrigo_gines",
}


def _canonical_external(name: str) -> str:
    key = name.strip().lower().replace("_", "-")
    if key not in EXTERNAL_TAXONOMIES:
        raise NotFound(
            f"unknown external taxonomy {name!r}; known: {', '.join(EXTERNAL_TAXONOMIES)}"
        )
    return key


@dataclass(frozen=True)
class CrosswalkEntry:
    ours: str  # type id or NON_SENTENCE_LEVEL
    labels: tuple[tuple[str, tuple[str, ...]], ...]  # (external name, cell labels)

    def cell(self, external: str) -> tuple[str, ...]:
        for name, cell in self.labels:
            if name == external:
                return cell
        raise NotFound(f"entry {self.ours!r} carries no cell for {external!r}")


@dataclass(frozen=True)
class CrosswalkTable:
    taxonomy_version: str
    externals: tuple[str, ...]
    entries: tuple[CrosswalkEntry, ...]

    def entry_for(self, ours: str) -> CrosswalkEntry:
        for entry in self.entries:
            if entry.ours == ours:
                return entry
        raise NotFound(f"no crosswalk row for {ours!r}")


def map_to_external(table: CrosswalkTable, type_id: str, external_name: str) -> list[str]:
    """The labels our type maps onto; empty list where the row shows no mapping."""
    external = _canonical_external(external_name)
    return list(table.entry_for(type_id).cell(external))


def map_from_external(table: CrosswalkTable, external_name: str, label: str) -> list[str]:
    """All of our ids whose cell contains the label, sentinel included, in row order."""
    external = _canonical_external(external_name)
    return [entry.ours for entry in table.entries if label in entry.cell(external)]


def coverage_report(table: CrosswalkTable) -> dict[str, dict[str, int]]:
    """Per external scheme: how many type rows map to >= 1 label vs only to nothing.

    The sentinel row is excluded; coverage is about our sentence-level types.
    """
    type_rows = [e for e in table.entries if e.ours != NON_SENTENCE_LEVEL]
    out: dict[str, dict[str, int]] = {}
    for external in table.externals:
        mapped = sum(1 for e in type_rows if e.cell(external))
        out[external] = {
            "rows_inspected": len(type_rows),
            "mapped": mapped,
            "unmapped": len(type_rows) - mapped,
        }
    return out


def _read_source(source: Source) -> bytes:
    if isinstance(source, bytes):
        return source
    if isinstance(source, str):
        return source.encode("utf-8")
    return source.read()


def load_crosswalk(source: Source, taxonomy: Taxonomy) -> CrosswalkTable:
    """Parse the row array and validate it against the taxonomy.

    Requires exactly one row per taxonomy type plus exactly one sentinel
    row, no duplicate keys, and non-empty label strings.
    """
    raw = _read_source(source)
    if not raw.strip():
        raise ParseError("empty crosswalk stream")
    try:
        rows = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"crosswalk is not well-formed JSON: {exc}") from exc
    if not isinstance(rows, list):
        raise ParseError("crosswalk must be a JSON array of rows")

    externals = tuple(EXTERNAL_TAXONOMIES)
    entries = []
    for row in rows:
        try:
            ours = row["ours"]
            labels = tuple(
                (name, tuple(row[field])) for name, field in EXTERNAL_TAXONOMIES.items()
            )
        except (KeyError, TypeError) as exc:
            raise ParseError(f"crosswalk row misses a required field: {exc}") from exc
        entries.append(CrosswalkEntry(ours, labels))

    table = CrosswalkTable(taxonomy.version, externals, tuple(entries))
    _validate(table, taxonomy)
    return table


def _validate(table: CrosswalkTable, taxonomy: Taxonomy) -> None:
    seen: set[str] = set()
    type_ids = set(taxonomy.type_ids())
    for entry in table.entries:
        if entry.ours in seen:
            raise ValidationError("crosswalk-ours-unique", f"duplicate row for {entry.ours!r}")
        seen.add(entry.ours)
        if entry.ours != NON_SENTENCE_LEVEL and entry.ours not in type_ids:
            raise ValidationError(
                "crosswalk-ours-known", f"row references unknown type {entry.ours!r}"
            )
        for name, cell in entry.labels:
            for label in cell:
                if not isinstance(label, str) or not label.strip():
                    raise ValidationError(
                        "crosswalk-label-nonempty",
                        f"row {entry.ours!r} has a blank label in {name!r}",
                    )
    missing = type_ids - seen
    if missing:
        raise ValidationError(
            "crosswalk-complete", f"missing rows for {sorted(missing)}"
        )
    if NON_SENTENCE_LEVEL not in seen:
        raise ValidationError("crosswalk-sentinel", "missing the non-sentence-level row")


def serialize_crosswalk(table: CrosswalkTable) -> bytes:
    rows = []
    for entry in table.entries:
        row: dict = {"ours": entry.ours}
        for name, cell in entry.labels:
            row[EXTERNAL_TAXONOMIES[name]] = list(cell)
        rows.append(row)
    return (json.dumps(rows, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


_BUNDLED: CrosswalkTable | None = None


def bundled_crosswalk(taxonomy: Taxonomy) -> CrosswalkTable:
    global _BUNDLED
    if _BUNDLED is None or _BUNDLED.taxonomy_version != taxonomy.version:
        raw = resources.files("biaselements").joinpath("data/crosswalk.json").read_bytes()
        _BUNDLED = load_crosswalk(raw, taxonomy)
    return _BUNDLED
