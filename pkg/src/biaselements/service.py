"""HTTP+JSON service exposing the toolkit for programmatic and UI access.

Single-process, desk-scale deployment: persistence is the JSONL stores
under one data directory, mutations funnel through one write lock, reads
serve snapshots. Every module error maps 1:1 onto an HTTP status with the
exception class name as the error code; validated input never produces an
anonymous 500. Every response body carries ``taxonomy_version`` so clients
can detect version skew.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import classify as classify_mod
from .annotations import AnnotationRecord, AnnotationStore, export_annotations, import_annotations
from .corpus import Corpus, Document, load_corpus, merge_units, save_corpus
from .crosswalk import EXTERNAL_TAXONOMIES, bundled_crosswalk, serialize_crosswalk
from .errors import (
    BackendUnavailable,
    ConflictingLabels,
    NotFound,
    ToolkitError,
    UnknownDocument,
    UnknownUnit,
)
from .layout import GridSpec, build_layout, render_svg
from .prevalence import compute_prevalence, report_to_dict
from .taxonomy import Taxonomy, bundled_taxonomy, taxonomy_to_dict, validate

class ReadOnly(ToolkitError):
    """Mutation attempted against a read-only service."""


_STATUS_BY_ERROR = {
    NotFound: 404,
    UnknownDocument: 404,
    UnknownUnit: 404,
    ConflictingLabels: 409,
    BackendUnavailable: 503,
    ReadOnly: 403,
}


def _status_for(exc: ToolkitError) -> int:
    for cls, status in _STATUS_BY_ERROR.items():
        if isinstance(exc, cls):
            return status
    return 400


@dataclass
class ServiceConfig:
    data_dir: str | Path = "bias-data"
    host: str = "127.0.0.1"
    port: int = 8037
    cors_origins: tuple[str, ...] = ()
    read_only: bool = False

    def __post_init__(self):
        self.data_dir = Path(self.data_dir)


class Workspace:
    """Corpora and their annotation stores, backed by JSONL files."""

    def __init__(self, config: ServiceConfig, taxonomy: Taxonomy | None = None):
        self.config = config
        self.taxonomy = taxonomy or bundled_taxonomy()
        self.lock = threading.Lock()
        self.corpora: dict[str, Corpus] = {}
        self.stores: dict[str, AnnotationStore] = {}
        if not config.read_only:
            config.data_dir.mkdir(parents=True, exist_ok=True)
        if config.data_dir.is_dir():
            for path in sorted(config.data_dir.glob("*.corpus.jsonl")):
                corpus = load_corpus(path)
                self.corpora[corpus.id] = corpus
                store = AnnotationStore(corpus, self.taxonomy)
                ann_path = config.data_dir / f"{corpus.id}.annotations.jsonl"
                if ann_path.exists():
                    import_annotations(ann_path, store)
                self.stores[corpus.id] = store

    def corpus(self, corpus_id: str) -> Corpus:
        try:
            return self.corpora[corpus_id]
        except KeyError:
            raise NotFound(f"unknown corpus {corpus_id!r}") from None

    def store(self, corpus_id: str) -> AnnotationStore:
        self.corpus(corpus_id)
        return self.stores[corpus_id]

    def ensure_corpus(self, corpus_id: str) -> Corpus:
        if corpus_id not in self.corpora:
            corpus = Corpus(id=corpus_id, taxonomy_version=self.taxonomy.version)
            self.corpora[corpus_id] = corpus
            self.stores[corpus_id] = AnnotationStore(corpus, self.taxonomy)
        return self.corpora[corpus_id]

    def persist(self, corpus_id: str) -> None:
        if self.config.read_only:
            return
        corpus = self.corpus(corpus_id)
        save_corpus(corpus, self.config.data_dir / f"{corpus_id}.corpus.jsonl")
        with open(
            self.config.data_dir / f"{corpus_id}.annotations.jsonl", "w", encoding="utf-8"
        ) as f:
            export_annotations(self.stores[corpus_id], f)


# -- request bodies ----------------------------------------------------------

class DocumentIn(BaseModel):
    id: str
    text: str
    title: str | None = None
    language: str = "en"
    source_note: str | None = None


class IngestRequest(BaseModel):
    corpus_id: str
    documents: list[DocumentIn]


class AnnotationIn(BaseModel):
    corpus_id: str
    unit_id: str
    annotator_id: str
    type_ids: list[str]
    note: str | None = None
    taxonomy_version: str | None = None


class MergeRequest(BaseModel):
    corpus_id: str
    unit_ids: list[str]


class ClassifyRequest(BaseModel):
    corpus_id: str
    document_id: str
    backend: str = "rule"
    endpoint: str | None = None
    model: str | None = None
    timeout: float = 10.0
    max_retries: int = 2
    store_verdicts: bool = False


def create_app(config: ServiceConfig | None = None, taxonomy: Taxonomy | None = None) -> FastAPI:
    config = config or ServiceConfig()
    ws = Workspace(config, taxonomy)
    app = FastAPI(title="bias annotation service")
    app.state.workspace = ws

    if config.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(config.cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )

    def versioned(payload: dict) -> dict:
        return {"taxonomy_version": ws.taxonomy.version, **payload}

    @app.exception_handler(ToolkitError)
    async def toolkit_error(request: Request, exc: ToolkitError):
        return JSONResponse(
            status_code=_status_for(exc),
            content=versioned({"error": type(exc).__name__, "detail": str(exc)}),
        )

    @app.exception_handler(RequestValidationError)
    async def body_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content=versioned({"error": "ValidationError", "detail": str(exc.errors())}),
        )

    def guard_writes():
        if config.read_only:
            raise ReadOnly("service is read-only")

    # -- read endpoints ------------------------------------------------------

    @app.get("/taxonomy")
    def get_taxonomy():
        report = validate(ws.taxonomy)
        return versioned({"taxonomy": taxonomy_to_dict(ws.taxonomy), "valid": report.ok})

    @app.get("/crosswalk")
    def get_crosswalk():
        table = bundled_crosswalk(ws.taxonomy)
        return versioned({
            "externals": list(EXTERNAL_TAXONOMIES),
            "entries": json.loads(serialize_crosswalk(table).decode("utf-8")),
        })

    @app.get("/layout.svg")
    def get_layout(corpus: str, consensus: str = "union", k: int = 2):
        store = ws.store(corpus)
        report = compute_prevalence(
            store.consensus_labels(consensus, k), ws.taxonomy, max(1, len(store.corpus.units))
        )
        grid = build_layout(report, ws.taxonomy, GridSpec())
        return Response(
            content=render_svg(grid, ws.taxonomy, report),
            media_type="image/svg+xml",
        )

    @app.get("/corpora/{corpus_id}/units")
    def get_units(
        corpus_id: str,
        filter: str | None = None,
        annotator: str | None = None,
        type: str | None = None,
    ):
        corpus = ws.corpus(corpus_id)
        store = ws.stores[corpus_id]
        units = list(corpus.units)
        if filter == "unlabeled":
            labeled = store.labeled_units(annotator)
            units = [u for u in units if u.id not in labeled]
        if type is not None:
            ws.taxonomy.get_type(type)
            keep = set()
            for u in corpus.units:
                recs = store.latest(u.id)
                union = set().union(*(r.type_ids for r in recs.values())) if recs else set()
                if type in union:
                    keep.add(u.id)
            units = [u for u in units if u.id in keep]
        out = []
        for u in units:
            rec = store.latest_for(u.id, annotator) if annotator else None
            out.append({
                "id": u.id,
                "document_id": u.document_id,
                "start": u.start,
                "end": u.end,
                "text": u.text,
                "merged_from": list(u.merged_from) if u.merged_from else None,
                "record": None if rec is None else {
                    "type_ids": sorted(rec.type_ids),
                    "timestamp": rec.timestamp,
                    "note": rec.note,
                },
            })
        return versioned({"corpus_id": corpus_id, "units": out})

    @app.get("/stats/{corpus_id}")
    def get_stats(corpus_id: str, consensus: str = "union", k: int = 2):
        store = ws.store(corpus_id)
        report = compute_prevalence(
            store.consensus_labels(consensus, k), ws.taxonomy, max(1, len(store.corpus.units))
        )
        return versioned(report_to_dict(report, ws.taxonomy))

    @app.get("/agreement/{corpus_id}")
    def get_agreement(corpus_id: str, a: str, b: str):
        store = ws.store(corpus_id)
        rep = store.cohen_kappa_per_type(a, b)
        return versioned({
            "annotator_a": rep.annotator_a,
            "annotator_b": rep.annotator_b,
            "units_compared": rep.units_compared,
            "per_type": rep.per_type,
            "observed_agreement": rep.observed_agreement,
            "expected_agreement": rep.expected_agreement,
        })

    # -- write endpoints -----------------------------------------------------

    @app.post("/corpora")
    def post_corpora(body: IngestRequest):
        guard_writes()
        with ws.lock:
            corpus = ws.ensure_corpus(body.corpus_id)
            added = []
            for doc in body.documents:
                units = corpus.add_document(
                    Document(doc.id, doc.text, doc.title, doc.language, doc.source_note)
                )
                added.append({"document_id": doc.id, "units": len(units)})
            ws.persist(body.corpus_id)
        return versioned({
            "corpus_id": corpus.id,
            "documents": added,
            "total_units": len(corpus.units),
        })

    @app.post("/annotations")
    def post_annotations(body: AnnotationIn):
        guard_writes()
        with ws.lock:
            store = ws.store(body.corpus_id)
            rec = store.record(
                AnnotationRecord(
                    unit_id=body.unit_id,
                    annotator_id=body.annotator_id,
                    type_ids=frozenset(body.type_ids),
                    note=body.note,
                    taxonomy_version=body.taxonomy_version,
                )
            )
            ws.persist(body.corpus_id)
        return versioned({
            "unit_id": rec.unit_id,
            "annotator_id": rec.annotator_id,
            "type_ids": sorted(rec.type_ids),
            "timestamp": rec.timestamp,
        })

    @app.post("/units/merge")
    def post_merge(body: MergeRequest):
        guard_writes()
        with ws.lock:
            corpus = ws.corpus(body.corpus_id)
            store = ws.stores[body.corpus_id]
            merged = merge_units(corpus, body.unit_ids, store)
            ws.persist(body.corpus_id)
        return versioned({
            "unit": {
                "id": merged.id,
                "document_id": merged.document_id,
                "start": merged.start,
                "end": merged.end,
                "text": merged.text,
                "merged_from": list(merged.merged_from or ()),
            }
        })

    @app.post("/classify")
    def post_classify(body: ClassifyRequest):
        if body.store_verdicts:
            guard_writes()
        corpus = ws.corpus(body.corpus_id)
        store = ws.stores[body.corpus_id]
        cfg = classify_mod.ClassifierConfig(
            backend=body.backend,
            endpoint=body.endpoint,
            model=body.model,
            timeout=body.timeout,
            max_retries=body.max_retries,
            store_verdicts=body.store_verdicts,
        )
        with ws.lock:
            report = classify_mod.classify_document(
                cfg, corpus, body.document_id, ws.taxonomy, store=store
            )
            if body.store_verdicts:
                ws.persist(body.corpus_id)
        return versioned(classify_mod.report_to_dict(report))

    return app


def serve(config: ServiceConfig) -> None:
    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port, log_level="info")
