"""Append-only store for multi-label judgments on sentence units.

A record's empty label set is a first-class "judged unbiased" verdict,
distinct from the unit never having been looked at; prevalence
denominators depend on that distinction. Later records for the same
(unit, annotator) pair supersede earlier ones, but the log keeps history.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import IO, Iterable

from .corpus import Corpus
from .errors import (
    NoOverlap,
    NoRecords,
    ParseError,
    StaleTaxonomyVersion,
    UnknownType,
    UnknownUnit,
)
from .taxonomy import Taxonomy


@dataclass(frozen=True)
class AnnotationRecord:
    unit_id: str
    annotator_id: str
    type_ids: frozenset[str]
    timestamp: str = ""  # ISO 8601; stamped by the store when empty
    note: str | None = None
    origin: str = "human"  # "human" or "classifier:<backend name>"
    taxonomy_version: str | None = None  # stamped by the store when None


@dataclass(frozen=True)
class AgreementReport:
    """Per-type binary Cohen's kappa between two annotators.

    ``per_type`` maps type id to kappa, or None where kappa is undefined
    (both marginals degenerate and observed agreement 1, i.e. 0/0).
    The global observed/expected agreement pools the binary decisions
    over all (unit, type) pairs.
    """

    annotator_a: str
    annotator_b: str
    units_compared: int
    per_type: dict[str, float | None]
    observed_agreement: float
    expected_agreement: float


class AnnotationStore:
    """Single-writer log of annotation records for one corpus."""

    def __init__(self, corpus: Corpus, taxonomy: Taxonomy):
        if corpus.taxonomy_version != taxonomy.version:
            raise StaleTaxonomyVersion(
                f"corpus {corpus.id!r} was built against taxonomy "
                f"{corpus.taxonomy_version!r}, not {taxonomy.version!r}"
            )
        self.corpus = corpus
        self.taxonomy = taxonomy
        self.log: list[AnnotationRecord] = []
        self._latest: dict[tuple[str, str], AnnotationRecord] = {}

    def record(self, rec: AnnotationRecord) -> AnnotationRecord:
        if rec.unit_id not in self.corpus.unit_ids():
            raise UnknownUnit(f"unit {rec.unit_id!r} is not in corpus {self.corpus.id!r}")
        known = set(self.taxonomy.type_ids())
        bad = sorted(set(rec.type_ids) - known)
        if bad:
            raise UnknownType(f"unknown bias type ids: {bad}")
        if rec.taxonomy_version is not None and rec.taxonomy_version != self.taxonomy.version:
            raise StaleTaxonomyVersion(
                f"record carries taxonomy {rec.taxonomy_version!r}, "
                f"store uses {self.taxonomy.version!r}"
            )
        stamped = replace(
            rec,
            timestamp=rec.timestamp or datetime.now(timezone.utc).isoformat(),
            taxonomy_version=self.taxonomy.version,
        )
        self.log.append(stamped)
        self._latest[(stamped.unit_id, stamped.annotator_id)] = stamped
        return stamped

    def latest(self, unit_id: str) -> dict[str, AnnotationRecord]:
        """Current record per annotator for a unit (supersession applied)."""
        return {
            annotator: rec
            for (uid, annotator), rec in self._latest.items()
            if uid == unit_id
        }

    def latest_for(self, unit_id: str, annotator_id: str) -> AnnotationRecord | None:
        return self._latest.get((unit_id, annotator_id))

    def annotators(self) -> set[str]:
        return {annotator for (_, annotator) in self._latest}

    def labeled_units(self, annotator_id: str | None = None) -> set[str]:
        if annotator_id is None:
            return {uid for (uid, _) in self._latest}
        return {uid for (uid, annotator) in self._latest if annotator == annotator_id}

    def retarget(self, old_unit_ids: Iterable[str], new_unit_id: str) -> None:
        """Move each annotator's current record from merged-away units to the new unit."""
        old = set(old_unit_ids)
        moved: dict[str, AnnotationRecord] = {}
        for (uid, annotator), rec in list(self._latest.items()):
            if uid in old:
                moved.setdefault(annotator, rec)
                del self._latest[(uid, annotator)]
        for annotator, rec in moved.items():
            self.record(replace(rec, unit_id=new_unit_id, timestamp=""))

    # -- consensus ---------------------------------------------------------

    def consensus(self, unit_id: str, policy: str = "union", k: int = 2) -> frozenset[str]:
        records = self.latest(unit_id)
        if not records:
            raise NoRecords(f"no annotation records for unit {unit_id!r}")
        if policy == "union":
            out: set[str] = set()
            for rec in records.values():
                out |= rec.type_ids
            return frozenset(out)
        if policy == "majority":
            votes: dict[str, int] = {}
            for rec in records.values():
                for t in rec.type_ids:
                    votes[t] = votes.get(t, 0) + 1
            return frozenset(t for t, n in votes.items() if n >= k)
        raise ValueError(f"unknown consensus policy {policy!r}")

    def consensus_labels(self, policy: str = "union", k: int = 2) -> dict[str, frozenset[str]]:
        """Consensus label set for every unit that has at least one record."""
        return {
            uid: self.consensus(uid, policy, k)
            for uid in sorted(self.labeled_units())
        }

    # -- agreement ---------------------------------------------------------

    def cohen_kappa_per_type(self, annotator_a: str, annotator_b: str) -> AgreementReport:
        common = sorted(self.labeled_units(annotator_a) & self.labeled_units(annotator_b))
        if not common:
            raise NoOverlap(
                f"annotators {annotator_a!r} and {annotator_b!r} share no labeled units"
            )
        a_sets = [self._latest[(uid, annotator_a)].type_ids for uid in common]
        b_sets = [self._latest[(uid, annotator_b)].type_ids for uid in common]

        per_type: dict[str, float | None] = {}
        pooled_agree = 0
        pooled_a_pos = 0
        pooled_b_pos = 0
        n_units = len(common)
        n_types = len(self.taxonomy.types)
        for t in self.taxonomy.type_ids():
            a_vec = [t in s for s in a_sets]
            b_vec = [t in s for s in b_sets]
            per_type[t] = _binary_kappa(a_vec, b_vec)
            pooled_agree += sum(1 for x, y in zip(a_vec, b_vec) if x == y)
            pooled_a_pos += sum(a_vec)
            pooled_b_pos += sum(b_vec)

        total = n_units * n_types
        p_a = pooled_a_pos / total
        p_b = pooled_b_pos / total
        observed = pooled_agree / total
        expected = p_a * p_b + (1 - p_a) * (1 - p_b)
        return AgreementReport(
            annotator_a=annotator_a,
            annotator_b=annotator_b,
            units_compared=n_units,
            per_type=per_type,
            observed_agreement=observed,
            expected_agreement=expected,
        )


def _binary_kappa(a: list[bool], b: list[bool]) -> float | None:
    n = len(a)
    agree = sum(1 for x, y in zip(a, b) if x == y)
    p_o = agree / n
    p_a = sum(a) / n
    p_b = sum(b) / n
    p_e = p_a * p_b + (1 - p_a) * (1 - p_b)
    if p_e == 1.0:
        return None  # both marginals degenerate and aligned: 0/0
    return (p_o - p_e) / (1 - p_e)


# ---------------------------------------------------------------------------
# JSONL export/import: the full append-only log, one record per line.
# ---------------------------------------------------------------------------

def export_annotations(store: AnnotationStore, fp: IO[str]) -> int:
    for rec in store.log:
        fp.write(json.dumps({
            "unit_id": rec.unit_id,
            "annotator_id": rec.annotator_id,
            "type_ids": sorted(rec.type_ids),
            "timestamp": rec.timestamp,
            "note": rec.note,
            "origin": rec.origin,
            "taxonomy_version": rec.taxonomy_version,
        }, ensure_ascii=False) + "\n")
    return len(store.log)


def import_annotations(source: str | Path | bytes | IO[str], store: AnnotationStore) -> int:
    """Replay exported records through the store, preserving supersession order."""
    if isinstance(source, bytes):
        lines = source.decode("utf-8").splitlines()
    elif isinstance(source, (str, Path)):
        lines = Path(source).read_text(encoding="utf-8").splitlines()
    else:
        lines = source.read().splitlines()
    count = 0
    for n, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
            rec = AnnotationRecord(
                unit_id=raw["unit_id"],
                annotator_id=raw["annotator_id"],
                type_ids=frozenset(raw["type_ids"]),
                timestamp=raw.get("timestamp", ""),
                note=raw.get("note"),
                origin=raw.get("origin", "human"),
                taxonomy_version=raw.get("taxonomy_version"),
            )
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ParseError(f"annotation line {n} is malformed: {exc}") from exc
        store.record(rec)
        count += 1
    return count
