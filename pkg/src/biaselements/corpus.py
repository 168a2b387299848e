"""Turn raw document text into ordered, offset-stable sentence units.

Splitting is deliberately rule-based: a terminal punctuation run followed
by whitespace and an uppercase letter or opening quote ends a unit, unless
the preceding token is a known abbreviation or a bare initial. Determinism
and auditability beat recall here; annotators merge units to repair
over-splits, and the rule-set version is stamped on the corpus so results
stay comparable across runs.

All offsets are Unicode scalar-value indices into the document text, with
``end`` exclusive, so ``document.text[start:end] == unit.text`` always.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .errors import (
    ConflictingLabels,
    CrossDocument,
    DomainError,
    NonContiguous,
    NotFound,
    ParseError,
)

# Tokens (lowercase, no trailing period) after which a "." never ends a unit.
DEFAULT_ABBREVIATIONS = frozenset({
    "dr", "mr", "mrs", "ms", "prof", "rev", "gen", "sen", "rep", "gov", "pres",
    "st", "jr", "sr", "hon",
    "vs", "etc", "e.g", "i.e", "cf", "al", "ca", "approx", "dept", "est", "min", "max",
    "fig", "no", "vol", "pp", "ed", "eds",
    "inc", "ltd", "co", "corp",
    "u.s", "u.k", "e.u", "u.n", "d.c",
    "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct", "nov", "dec",
    "mon", "tue", "wed", "thu", "fri", "sat", "sun",
})

_TERMINAL = re.compile(r"[.!?]+[\"'”’)\]»]*")
_OPENERS = "\"'“‘([{«„"


@dataclass(frozen=True)
class SegmentationRules:
    version: str
    abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS


DEFAULT_RULES = SegmentationRules("punct-abbrev-1")


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    title: str | None = None
    language: str = "en"
    source_note: str | None = None


@dataclass(frozen=True)
class SentenceUnit:
    id: str
    document_id: str
    start: int
    end: int  # exclusive
    text: str
    merged_from: tuple[str, ...] | None = None


def _token_before(text: str, index: int) -> str:
    """The maximal non-space run ending just before ``index`` (punctuation stripped of its final char)."""
    i = index
    while i > 0 and not text[i - 1].isspace():
        i -= 1
    return text[i:index]


def _is_boundary(text: str, match: re.Match, abbreviations: frozenset[str]) -> bool:
    end = match.end()
    # must be followed by whitespace, then an uppercase letter or opening quote
    j = end
    while j < len(text) and text[j].isspace():
        j += 1
    if j == end:  # no whitespace after the punctuation run
        return j == len(text)
    if j == len(text):
        return True
    nxt = text[j]
    if not (nxt.isupper() or nxt in _OPENERS):
        return False
    # abbreviation guard only applies to a plain "." terminator
    run = match.group(0)
    if run.rstrip("\"'”’)]»") == ".":
        token = _token_before(text, match.start())
        word = token.rstrip(".").lstrip("\"'“‘([{«„")
        if word.lower() in abbreviations:
            return False
        if len(word) == 1 and word.isalpha() and word.isupper():  # bare initial, "J. Smith"
            return False
    return True


def segment(document: Document, rules: SegmentationRules = DEFAULT_RULES) -> list[SentenceUnit]:
    """Split a document into ordered sentence units covering all non-whitespace text."""
    text = document.text
    if not text or not text.strip():
        raise DomainError(f"document {document.id!r} has no text to segment")

    ends: list[int] = []
    for match in _TERMINAL.finditer(text):
        if _is_boundary(text, match, rules.abbreviations):
            ends.append(match.end())

    units: list[SentenceUnit] = []
    cursor = 0
    for boundary in ends:
        start = cursor
        while start < boundary and text[start].isspace():
            start += 1
        if start >= boundary:
            cursor = boundary
            continue
        units.append(_make_unit(document, len(units), start, boundary))
        cursor = boundary

    # trailing text without terminal punctuation forms a final unit
    tail = text[cursor:]
    if tail.strip():
        start = cursor + (len(tail) - len(tail.lstrip()))
        end = cursor + len(tail.rstrip())
        units.append(_make_unit(document, len(units), start, end))
    return units


def _make_unit(document: Document, index: int, start: int, end: int) -> SentenceUnit:
    return SentenceUnit(
        id=f"{document.id}:s{index}",
        document_id=document.id,
        start=start,
        end=end,
        text=document.text[start:end],
    )


@dataclass
class Corpus:
    """Documents plus their ordered units, stamped with the taxonomy and rule versions."""

    id: str
    taxonomy_version: str
    rules: SegmentationRules = DEFAULT_RULES
    documents: dict[str, Document] = field(default_factory=dict)
    units: list[SentenceUnit] = field(default_factory=list)
    merge_seq: int = 0

    def add_document(self, document: Document) -> list[SentenceUnit]:
        if document.id in self.documents:
            raise DomainError(f"document id {document.id!r} already present in corpus {self.id!r}")
        new_units = segment(document, self.rules)
        self.documents[document.id] = document
        self.units.extend(new_units)
        return new_units

    def document(self, document_id: str) -> Document:
        try:
            return self.documents[document_id]
        except KeyError:
            raise NotFound(f"unknown document {document_id!r}") from None

    def unit(self, unit_id: str) -> SentenceUnit:
        for u in self.units:
            if u.id == unit_id:
                return u
        raise NotFound(f"unknown unit {unit_id!r}")

    def units_for(self, document_id: str) -> list[SentenceUnit]:
        self.document(document_id)
        return [u for u in self.units if u.document_id == document_id]

    def unit_ids(self) -> set[str]:
        return {u.id for u in self.units}


def merge_units(corpus: Corpus, unit_ids: Iterable[str], store=None) -> SentenceUnit:
    """Replace a contiguous run of units with one spanning unit.

    ``store`` is the corpus's annotation store, if any; when given, each
    annotator's labels on the merged units must agree, and their records
    are re-targeted onto the replacement unit.
    """
    ids = list(unit_ids)
    if len(ids) < 2:
        raise DomainError("merging needs at least two unit ids")
    selected = [corpus.unit(uid) for uid in ids]

    doc_ids = {u.document_id for u in selected}
    if len(doc_ids) > 1:
        raise CrossDocument(f"units span documents {sorted(doc_ids)}")
    doc_id = selected[0].document_id

    doc_units = corpus.units_for(doc_id)
    positions = sorted(doc_units.index(u) for u in selected)
    if positions != list(range(positions[0], positions[-1] + 1)):
        raise NonContiguous(f"units {ids} are not an adjacent run")
    run = doc_units[positions[0]: positions[-1] + 1]

    if store is not None:
        _check_mergeable_labels(run, store)

    corpus.merge_seq += 1
    document = corpus.document(doc_id)
    start = min(u.start for u in run)
    end = max(u.end for u in run)
    constituents: list[str] = []
    for u in run:
        constituents.extend(u.merged_from or (u.id,))
    merged = SentenceUnit(
        id=f"{doc_id}:m{corpus.merge_seq}",
        document_id=doc_id,
        start=start,
        end=end,
        text=document.text[start:end],
        merged_from=tuple(constituents),
    )

    first_pos = corpus.units.index(run[0])
    for u in run:
        corpus.units.remove(u)
    corpus.units.insert(first_pos, merged)

    if store is not None:
        store.retarget([u.id for u in run], merged.id)
    return merged


def _check_mergeable_labels(run, store) -> None:
    per_annotator: dict[str, set[frozenset[str]]] = {}
    for u in run:
        for annotator, record in store.latest(u.id).items():
            per_annotator.setdefault(annotator, set()).add(record.type_ids)
    for annotator, label_sets in per_annotator.items():
        if len(label_sets) > 1:
            raise ConflictingLabels(
                f"annotator {annotator!r} labeled the units differently; merge refused"
            )


# ---------------------------------------------------------------------------
# JSONL persistence: one record per line, kind-discriminated.
# ---------------------------------------------------------------------------

def save_corpus(corpus: Corpus, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(_dump_line({
            "kind": "corpus",
            "id": corpus.id,
            "taxonomy_version": corpus.taxonomy_version,
            "rules_version": corpus.rules.version,
            "merge_seq": corpus.merge_seq,
        }))
        for doc in corpus.documents.values():
            f.write(_dump_line({
                "kind": "document",
                "id": doc.id,
                "title": doc.title,
                "language": doc.language,
                "text": doc.text,
                "source_note": doc.source_note,
            }))
        for unit in corpus.units:
            f.write(_dump_line({
                "kind": "unit",
                "id": unit.id,
                "document_id": unit.document_id,
                "start": unit.start,
                "end": unit.end,
                "text": unit.text,
                "merged_from": list(unit.merged_from) if unit.merged_from else None,
            }))


def load_corpus(source: str | Path | bytes) -> Corpus:
    if isinstance(source, bytes):
        lines = source.decode("utf-8").splitlines()
    else:
        lines = Path(source).read_text(encoding="utf-8").splitlines()
    corpus: Corpus | None = None
    for n, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"corpus line {n} is not valid JSON: {exc}") from exc
        kind = rec.get("kind")
        if kind == "corpus":
            corpus = Corpus(
                id=rec["id"],
                taxonomy_version=rec["taxonomy_version"],
                rules=SegmentationRules(rec.get("rules_version", DEFAULT_RULES.version)),
                merge_seq=rec.get("merge_seq", 0),
            )
        elif kind == "document":
            if corpus is None:
                raise ParseError(f"corpus line {n}: document before corpus header")
            corpus.documents[rec["id"]] = Document(
                id=rec["id"],
                text=rec["text"],
                title=rec.get("title"),
                language=rec.get("language", "en"),
                source_note=rec.get("source_note"),
            )
        elif kind == "unit":
            if corpus is None:
                raise ParseError(f"corpus line {n}: unit before corpus header")
            merged = rec.get("merged_from")
            unit = SentenceUnit(
                id=rec["id"],
                document_id=rec["document_id"],
                start=rec["start"],
                end=rec["end"],
                text=rec["text"],
                merged_from=tuple(merged) if merged else None,
            )
            doc = corpus.documents.get(unit.document_id)
            if doc is None:
                raise ParseError(f"corpus line {n}: unit for unknown document {unit.document_id!r}")
            if doc.text[unit.start:unit.end] != unit.text:
                raise ParseError(f"corpus line {n}: unit {unit.id!r} offsets do not match its text")
            corpus.units.append(unit)
        else:
            raise ParseError(f"corpus line {n}: unknown record kind {kind!r}")
    if corpus is None:
        raise ParseError("corpus stream has no corpus header line")
    return corpus


def _dump_line(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False) + "\n"


def reconstruct_text(corpus: Corpus, document_id: str) -> str:
    """Rebuild the document text from its units plus the skipped whitespace."""
    doc = corpus.document(document_id)
    out: list[str] = []
    cursor = 0
    for unit in corpus.units_for(document_id):
        out.append(doc.text[cursor:unit.start])
        out.append(unit.text)
        cursor = unit.end
    out.append(doc.text[cursor:])
    return "".join(out)
