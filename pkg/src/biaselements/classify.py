"""Pluggable per-sentence multi-label classifiers and document bias reports.

Two backends share one verdict contract. The rule baseline is a transparent
lexicon scorer seeded from the taxonomy's own example sentences: it exists
so the plumbing can be exercised offline and deterministically, and it
claims no detection quality whatsoever. The remote backend speaks a single
generic chat-completion-style HTTP contract and knows nothing about any
particular vendor.
"""

from __future__ import annotations

import json
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import httpx

from .annotations import AnnotationRecord, AnnotationStore
from .corpus import Corpus
from .errors import (
    BackendUnavailable,
    ConfidenceOutOfRange,
    DomainError,
    MalformedResponse,
    UnknownDocument,
    UnknownType,
)
from .taxonomy import Taxonomy

PROMPT_TEMPLATE_VERSION = "1"
RULE_BACKEND_NAME = "rule-baseline"
RULE_BACKEND_VERSION = "1"
REPORT_SCHEMA_VERSION = "1"


@dataclass(frozen=True)
class VerdictLabel:
    type_id: str
    confidence: float
    rationale: str


@dataclass(frozen=True)
class ClassifierVerdict:
    unit_id: str
    labels: tuple[VerdictLabel, ...]
    backend: str
    backend_version: str


@dataclass(frozen=True)
class UnitFailure:
    unit_id: str
    error: str
    detail: str


@dataclass(frozen=True)
class ClassifierConfig:
    backend: str = "rule"  # "rule" | "remote"
    endpoint: str | None = None
    model: str | None = None
    credentials_env: str = "BIAS_REMOTE_TOKEN"
    prompt_template_version: str = PROMPT_TEMPLATE_VERSION
    timeout: float = 10.0
    max_retries: int = 2
    max_concurrency: int = 4
    store_verdicts: bool = False

    def __post_init__(self):
        if self.backend not in ("rule", "remote"):
            raise DomainError(f"unknown backend {self.backend!r}")
        if self.backend == "remote" and not self.endpoint:
            raise DomainError("remote backend requires an endpoint")
        if self.timeout <= 0:
            raise DomainError(f"timeout must be > 0, got {self.timeout}")


@dataclass(frozen=True)
class BiasReport:
    schema_version: str
    document_id: str
    backend: str
    taxonomy_version: str
    verdicts: tuple[ClassifierVerdict, ...]
    failures: tuple[UnitFailure, ...]
    aggregate: dict = field(compare=False)


# ---------------------------------------------------------------------------
# Prompt
# ---------------------------------------------------------------------------

def _one_line(text: str) -> str:
    return " ".join(text.split())


def build_prompt(
    taxonomy: Taxonomy,
    sentence_text: str,
    template_version: str = PROMPT_TEMPLATE_VERSION,
) -> str:
    """Deterministic classification prompt embedding the full type inventory."""
    if template_version != PROMPT_TEMPLATE_VERSION:
        raise DomainError(f"unknown prompt template version {template_version!r}")
    blocks = []
    for t in taxonomy.types:
        example = t.examples[0].text
        blocks.append(
            f"### {t.id}\n"
            f"name: {t.name}\n"
            f"definition: {_one_line(t.definition)}\n"
            f"example: {_one_line(example)}"
        )
    inventory = "\n".join(blocks)
    return (
        f"prompt-template: {template_version}\n"
        f"taxonomy-version: {taxonomy.version}\n\n"
        "You label one sentence with zero or more bias types from the inventory "
        "below. A sentence can exhibit several types at once; a neutral sentence "
        "gets no labels.\n\n"
        f"{inventory}\n\n"
        "Respond with JSON only, exactly this shape, no prose around it:\n"
        '{"labels": [{"type": "<type id from the inventory>", '
        '"confidence": <number between 0 and 1>, '
        '"rationale": "<one sentence>"}]}\n'
        "Use an empty list when no type applies.\n\n"
        f"Sentence: {sentence_text}\n"
    )


# ---------------------------------------------------------------------------
# Verdict parsing (strict: reject the whole response on any bad label)
# ---------------------------------------------------------------------------

def parse_verdict(
    raw: str | bytes,
    taxonomy: Taxonomy,
    unit_id: str = "",
    backend: str = "",
    backend_version: str = "",
) -> ClassifierVerdict:
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedResponse(f"response is not UTF-8: {exc}") from exc
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise MalformedResponse(f"response is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or not isinstance(data.get("labels"), list):
        raise MalformedResponse('response must be an object with a "labels" array')

    known = set(taxonomy.type_ids())
    labels: list[VerdictLabel] = []
    for i, item in enumerate(data["labels"]):
        if not isinstance(item, dict):
            raise MalformedResponse(f"labels[{i}] is not an object")
        type_id = item.get("type")
        confidence = item.get("confidence")
        rationale = item.get("rationale", "")
        if not isinstance(type_id, str):
            raise MalformedResponse(f"labels[{i}] misses a string 'type'")
        if type_id not in known:
            raise UnknownType(f"labels[{i}] references unknown type {type_id!r}")
        if not isinstance(confidence, (int, float)) or isinstance(confidence, bool):
            raise MalformedResponse(f"labels[{i}] misses a numeric 'confidence'")
        if not 0.0 <= float(confidence) <= 1.0:
            raise ConfidenceOutOfRange(
                f"labels[{i}] confidence {confidence} outside [0, 1]"
            )
        if not isinstance(rationale, str):
            raise MalformedResponse(f"labels[{i}] rationale must be a string")
        labels.append(VerdictLabel(type_id, float(confidence), rationale))
    return ClassifierVerdict(unit_id, tuple(labels), backend, backend_version)


# ---------------------------------------------------------------------------
# Rule baseline: lexicon overlap against the taxonomy's example sentences.
# ---------------------------------------------------------------------------

_STOPWORDS = frozenset(
    "a an and are as at be but by for from has have he her his i in is it its "
    "me my not of on or our she so that the their them they this to was we werent "
    "were what when where which who will with you your".split()
)
_WORD = re.compile(r"[a-zA-Z]{3,}")


def _content_words(text: str) -> frozenset[str]:
    return frozenset(
        w for w in (m.group(0).lower() for m in _WORD.finditer(text)) if w not in _STOPWORDS
    )


class RuleBaseline:
    """Offline smoke-test scorer; fires a type when enough of its example
    vocabulary appears in the sentence."""

    name = RULE_BACKEND_NAME
    version = RULE_BACKEND_VERSION

    def __init__(self, taxonomy: Taxonomy, threshold: float = 0.5):
        self.taxonomy = taxonomy
        self.threshold = threshold
        self.lexicons = {
            t.id: frozenset().union(*(_content_words(e.text) for e in t.examples))
            for t in taxonomy.types
        }

    def classify_text(self, unit_id: str, text: str) -> ClassifierVerdict:
        words = _content_words(text)
        labels = []
        for t in self.taxonomy.types:
            lexicon = self.lexicons[t.id]
            if not lexicon:
                continue
            hits = sorted(words & lexicon)
            score = len(hits) / len(lexicon)
            if score >= self.threshold:
                labels.append(
                    VerdictLabel(
                        t.id,
                        round(min(1.0, score), 4),
                        f"matches example vocabulary: {', '.join(hits[:6])}",
                    )
                )
        return ClassifierVerdict(unit_id, tuple(labels), self.name, self.version)


# ---------------------------------------------------------------------------
# Remote backend: generic chat-completion-style HTTP contract.
# Request: POST endpoint, JSON {"model": ..., "prompt": ...}; response JSON
# must carry the verdict JSON string under "content".
# ---------------------------------------------------------------------------

class RemoteBackend:
    name = "remote"

    def __init__(self, config: ClassifierConfig, transport: httpx.BaseTransport | None = None):
        if config.backend != "remote":
            raise DomainError("RemoteBackend requires a remote config")
        self.config = config
        headers = {}
        token = os.environ.get(config.credentials_env, "")
        if token:
            headers["Authorization"] = f"Bearer {token}"
        self._client = httpx.Client(
            timeout=config.timeout, headers=headers, transport=transport
        )
        self.version = config.model or "unversioned"

    def classify_text(self, unit_id: str, text: str, taxonomy: Taxonomy) -> ClassifierVerdict:
        prompt = build_prompt(taxonomy, text, self.config.prompt_template_version)
        payload = {"model": self.config.model, "prompt": prompt}
        last_error: Exception | None = None
        for _ in range(self.config.max_retries + 1):
            try:
                resp = self._client.post(self.config.endpoint, json=payload)
                resp.raise_for_status()
                content = resp.json().get("content")
            except (httpx.HTTPError, json.JSONDecodeError) as exc:
                last_error = exc
                continue
            if not isinstance(content, str):
                raise MalformedResponse('backend response misses a string "content"')
            return parse_verdict(content, taxonomy, unit_id, self.name, self.version)
        raise BackendUnavailable(
            f"remote backend failed after {self.config.max_retries + 1} attempts: {last_error}"
        )

    def close(self):
        self._client.close()


# ---------------------------------------------------------------------------
# Document-level harness
# ---------------------------------------------------------------------------

def compute_aggregate(
    verdicts: tuple[ClassifierVerdict, ...],
    failures: tuple[UnitFailure, ...],
    taxonomy: Taxonomy,
) -> dict:
    flagged = sum(1 for v in verdicts if v.labels)
    total = len(verdicts) + len(failures)
    histogram = {g: 0 for g in taxonomy.group_ids()}
    for v in verdicts:
        for group in {taxonomy.get_type(l.type_id).group_id for l in v.labels}:
            histogram[group] += 1
    return {
        "units_total": total,
        "units_classified": len(verdicts),
        "units_failed": len(failures),
        "units_flagged": flagged,
        "flagged_fraction": round(flagged / total, 4) if total else 0.0,
        "group_histogram": histogram,
    }


def classify_document(
    config: ClassifierConfig,
    corpus: Corpus,
    document_id: str,
    taxonomy: Taxonomy,
    store: AnnotationStore | None = None,
    transport: httpx.BaseTransport | None = None,
) -> BiasReport:
    """One verdict (or failure marker) per unit of the document.

    The rule baseline cannot fail; the remote backend retries, then the
    unit is recorded as failed and the report is still returned.
    """
    if document_id not in corpus.documents:
        raise UnknownDocument(f"document {document_id!r} is not in corpus {corpus.id!r}")
    units = corpus.units_for(document_id)

    verdicts: list[ClassifierVerdict] = []
    failures: list[UnitFailure] = []
    if config.backend == "rule":
        baseline = RuleBaseline(taxonomy)
        verdicts = [baseline.classify_text(u.id, u.text) for u in units]
        backend_name = baseline.name
    else:
        backend = RemoteBackend(config, transport=transport)
        backend_name = backend.name

        def run(unit):
            try:
                return backend.classify_text(unit.id, unit.text, taxonomy)
            except (BackendUnavailable, MalformedResponse, UnknownType, ConfidenceOutOfRange) as exc:
                return UnitFailure(unit.id, type(exc).__name__, str(exc))

        try:
            with ThreadPoolExecutor(max_workers=config.max_concurrency) as pool:
                results = list(pool.map(run, units))
        finally:
            backend.close()
        for res in results:
            (failures if isinstance(res, UnitFailure) else verdicts).append(res)

    report = BiasReport(
        schema_version=REPORT_SCHEMA_VERSION,
        document_id=document_id,
        backend=backend_name,
        taxonomy_version=taxonomy.version,
        verdicts=tuple(verdicts),
        failures=tuple(failures),
        aggregate=compute_aggregate(tuple(verdicts), tuple(failures), taxonomy),
    )
    if store is not None and config.store_verdicts:
        for v in report.verdicts:
            store.record(
                AnnotationRecord(
                    unit_id=v.unit_id,
                    annotator_id=f"classifier:{v.backend}",
                    type_ids=frozenset(l.type_id for l in v.labels),
                    origin=f"classifier:{v.backend}",
                )
            )
    return report


def report_to_dict(report: BiasReport) -> dict:
    return {
        "schema_version": report.schema_version,
        "document_id": report.document_id,
        "backend": report.backend,
        "taxonomy_version": report.taxonomy_version,
        "verdicts": [
            {
                "unit_id": v.unit_id,
                "backend": v.backend,
                "backend_version": v.backend_version,
                "labels": [
                    {"type": l.type_id, "confidence": l.confidence, "rationale": l.rationale}
                    for l in v.labels
                ],
            }
            for v in report.verdicts
        ],
        "failures": [
            {"unit_id": f.unit_id, "error": f.error, "detail": f.detail}
            for f in report.failures
        ],
        "aggregate": report.aggregate,
    }
