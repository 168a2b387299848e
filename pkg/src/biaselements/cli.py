"""``bias`` command line: validate | ingest | annot | stats | layout | crosswalk | classify | serve.

Exit codes: 0 success, 1 validation failure (any toolkit error), 2 I/O or
backend failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import classify as classify_mod
from .annotations import AnnotationRecord, AnnotationStore, export_annotations, import_annotations
from .corpus import Corpus, Document, load_corpus, save_corpus
from .crosswalk import bundled_crosswalk, coverage_report, map_to_external
from .errors import BackendUnavailable, ToolkitError
from .layout import GridSpec, build_layout, render_svg
from .prevalence import compute_prevalence, render_table
from .service import ServiceConfig, serve as run_service
from .taxonomy import bundled_taxonomy, load_taxonomy, validate as validate_taxonomy


class Env:
    def __init__(self, data_dir: Path):
        self.data_dir = data_dir
        self.taxonomy = bundled_taxonomy()

    def corpus_path(self, corpus_id: str) -> Path:
        return self.data_dir / f"{corpus_id}.corpus.jsonl"

    def annotations_path(self, corpus_id: str) -> Path:
        return self.data_dir / f"{corpus_id}.annotations.jsonl"

    def load(self, corpus_id: str) -> tuple[Corpus, AnnotationStore]:
        path = self.corpus_path(corpus_id)
        if not path.exists():
            raise click.ClickException(f"no corpus {corpus_id!r} under {self.data_dir}")
        corpus = load_corpus(path)
        store = AnnotationStore(corpus, self.taxonomy)
        ann = self.annotations_path(corpus_id)
        if ann.exists():
            import_annotations(ann, store)
        return corpus, store

    def save(self, corpus: Corpus, store: AnnotationStore | None = None) -> None:
        self.data_dir.mkdir(parents=True, exist_ok=True)
        save_corpus(corpus, self.corpus_path(corpus.id))
        if store is not None:
            with open(self.annotations_path(corpus.id), "w", encoding="utf-8") as f:
                export_annotations(store, f)


def _fail(exc: Exception) -> "click.exceptions.Exit":
    click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
    if isinstance(exc, (OSError, BackendUnavailable)):
        return sys.exit(2)
    return sys.exit(1)


@click.group()
@click.option(
    "--data-dir",
    type=click.Path(path_type=Path),
    default=Path("bias-data"),
    show_default=True,
    help="Directory holding corpus and annotation JSONL stores.",
)
@click.pass_context
def main(ctx: click.Context, data_dir: Path):
    ctx.obj = Env(data_dir)


@main.command()
@click.option("--taxonomy", "taxonomy_path", type=click.Path(path_type=Path), default=None,
              help="Validate this file instead of the bundled taxonomy.")
@click.option("--expect-types", type=int, default=38, show_default=True)
@click.option("--expect-groups", type=int, default=8, show_default=True)
@click.pass_obj
def validate(env: Env, taxonomy_path: Path | None, expect_types: int, expect_groups: int):
    """Check the taxonomy's structural rules."""
    try:
        if taxonomy_path is not None:
            tax = load_taxonomy(taxonomy_path.read_bytes())
        else:
            tax = env.taxonomy
        report = validate_taxonomy(tax, expect_types, expect_groups)
    except (ToolkitError, OSError) as exc:
        raise _fail(exc)
    if report.ok:
        click.echo(f"taxonomy {tax.version}: {len(tax.types)} types, {len(tax.groups)} groups, all rules pass")
        return
    for v in report.violations:
        click.echo(f"violation {v.rule}: {v.message}", err=True)
    sys.exit(1)


@main.command()
@click.option("--in", "input_path", required=True, type=click.Path(path_type=Path))
@click.option("--corpus", "corpus_id", required=True)
@click.option("--doc-id", default=None, help="Defaults to the input file stem.")
@click.option("--title", default=None)
@click.option("--language", default="en", show_default=True)
@click.pass_obj
def ingest(env: Env, input_path: Path, corpus_id: str, doc_id: str | None, title: str | None, language: str):
    """Segment a plain-text file into sentence units inside a corpus."""
    try:
        text = input_path.read_text(encoding="utf-8")
    except OSError as exc:
        raise _fail(exc)
    try:
        if env.corpus_path(corpus_id).exists():
            corpus, store = env.load(corpus_id)
        else:
            corpus = Corpus(id=corpus_id, taxonomy_version=env.taxonomy.version)
            store = AnnotationStore(corpus, env.taxonomy)
        units = corpus.add_document(
            Document(id=doc_id or input_path.stem, text=text, title=title, language=language)
        )
        env.save(corpus, store)
    except (ToolkitError, OSError) as exc:
        raise _fail(exc)
    click.echo(f"corpus {corpus_id}: +1 document, +{len(units)} units ({len(corpus.units)} total)")


@main.group()
def annot():
    """Record, export, or import annotations."""


@annot.command("record")
@click.option("--corpus", "corpus_id", required=True)
@click.option("--unit", "unit_id", required=True)
@click.option("--annotator", required=True)
@click.option("--types", default="", help="Comma-separated type ids; empty = judged unbiased.")
@click.option("--note", default=None)
@click.pass_obj
def annot_record(env: Env, corpus_id: str, unit_id: str, annotator: str, types: str, note: str | None):
    try:
        corpus, store = env.load(corpus_id)
        type_ids = frozenset(t.strip() for t in types.split(",") if t.strip())
        rec = store.record(
            AnnotationRecord(unit_id=unit_id, annotator_id=annotator, type_ids=type_ids, note=note)
        )
        env.save(corpus, store)
    except (ToolkitError, OSError) as exc:
        raise _fail(exc)
    click.echo(f"recorded {sorted(rec.type_ids) or 'unbiased'} on {unit_id} by {annotator}")


@annot.command("export")
@click.option("--corpus", "corpus_id", required=True)
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
@click.pass_obj
def annot_export(env: Env, corpus_id: str, out_path: Path):
    try:
        _, store = env.load(corpus_id)
        with open(out_path, "w", encoding="utf-8") as f:
            n = export_annotations(store, f)
    except (ToolkitError, OSError) as exc:
        raise _fail(exc)
    click.echo(f"exported {n} records to {out_path}")


@annot.command("import")
@click.option("--corpus", "corpus_id", required=True)
@click.option("--in", "input_path", required=True, type=click.Path(path_type=Path))
@click.pass_obj
def annot_import(env: Env, corpus_id: str, input_path: Path):
    try:
        corpus, store = env.load(corpus_id)
        n = import_annotations(input_path, store)
        env.save(corpus, store)
    except (ToolkitError, OSError) as exc:
        raise _fail(exc)
    click.echo(f"imported {n} records into {corpus_id}")


@main.command()
@click.option("--corpus", "corpus_id", required=True)
@click.option("--consensus", default="union", show_default=True,
              type=click.Choice(["union", "majority"]))
@click.option("-k", "--min-votes", default=2, show_default=True, help="Votes needed under majority.")
@click.option("--format", "fmt", default="table", show_default=True, type=click.Choice(["table", "csv"]))
@click.pass_obj
def stats(env: Env, corpus_id: str, consensus: str, min_votes: int, fmt: str):
    """Prevalence percentages, tiers, and group statistics."""
    try:
        corpus, store = env.load(corpus_id)
        labels = store.consensus_labels(consensus, min_votes)
        report = compute_prevalence(labels, env.taxonomy, max(1, len(corpus.units)))
    except (ToolkitError, OSError) as exc:
        raise _fail(exc)
    click.echo(render_table(report, env.taxonomy, fmt), nl=False)


@main.command()
@click.option("--corpus", "corpus_id", required=True)
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
@click.option("--grid", default="8x5", show_default=True, help="COLSxROWS of the table.")
@click.option("--consensus", default="union", show_default=True,
              type=click.Choice(["union", "majority"]))
@click.pass_obj
def layout(env: Env, corpus_id: str, out_path: Path, grid: str, consensus: str):
    """Render the table of bias elements for a corpus as SVG."""
    try:
        cols, rows = (int(x) for x in grid.lower().split("x"))
        corpus, store = env.load(corpus_id)
        report = compute_prevalence(
            store.consensus_labels(consensus), env.taxonomy, max(1, len(corpus.units))
        )
        spec = GridSpec(rows=rows, cols=cols)
        table = build_layout(report, env.taxonomy, spec)
        out_path.write_bytes(render_svg(table, env.taxonomy, report))
    except ValueError as exc:
        raise _fail(ToolkitError(f"bad --grid value {grid!r}: {exc}"))
    except (ToolkitError, OSError) as exc:
        raise _fail(exc)
    click.echo(f"wrote {out_path}")


@main.command()
@click.option("--type", "type_id", default=None, help="Show one type's external mappings.")
@click.option("--external", default=None, help="Restrict to one external taxonomy.")
@click.option("--coverage", is_flag=True, help="Print per-external coverage counts.")
@click.pass_obj
def crosswalk(env: Env, type_id: str | None, external: str | None, coverage: bool):
    """Query the mapping to the three external taxonomies."""
    try:
        table = bundled_crosswalk(env.taxonomy)
        if coverage:
            for name, row in coverage_report(table).items():
                click.echo(f"{name}: {row['mapped']}/{row['rows_inspected']} mapped, {row['unmapped']} without counterpart")
            return
        if type_id is None:
            raise ToolkitError("pass --type ID or --coverage")
        externals = [external] if external else list(table.externals)
        for name in externals:
            labels = map_to_external(table, type_id, name)
            click.echo(f"{type_id} -> {name}: {'; '.join(labels) if labels else '--'}")
    except (ToolkitError, OSError) as exc:
        raise _fail(exc)


@main.command()
@click.option("--corpus", "corpus_id", required=True)
@click.option("--doc", "document_id", required=True)
@click.option("--backend", default="rule", show_default=True, type=click.Choice(["rule", "remote"]))
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
@click.option("--endpoint", default=None, help="Remote backend URL.")
@click.option("--model", default=None)
@click.option("--timeout", default=10.0, show_default=True)
@click.option("--max-retries", default=2, show_default=True)
@click.option("--store-verdicts", is_flag=True, help="Also write verdicts into the annotation store.")
@click.pass_obj
def classify(env: Env, corpus_id: str, document_id: str, backend: str, out_path: Path,
             endpoint: str | None, model: str | None, timeout: float, max_retries: int,
             store_verdicts: bool):
    """Run a classifier over one document and write the report JSON."""
    try:
        corpus, store = env.load(corpus_id)
        cfg = classify_mod.ClassifierConfig(
            backend=backend, endpoint=endpoint, model=model, timeout=timeout,
            max_retries=max_retries, store_verdicts=store_verdicts,
        )
        report = classify_mod.classify_document(cfg, corpus, document_id, env.taxonomy, store=store)
        out_path.write_text(
            json.dumps(classify_mod.report_to_dict(report), indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
        if store_verdicts:
            env.save(corpus, store)
    except (ToolkitError, OSError) as exc:
        raise _fail(exc)
    agg = report.aggregate
    click.echo(
        f"classified {agg['units_classified']}/{agg['units_total']} units "
        f"({agg['units_failed']} failed); report at {out_path}"
    )
    if agg["units_failed"]:
        sys.exit(2)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8037, show_default=True)
@click.option("--cors", multiple=True, help="Allowed CORS origin (repeatable).")
@click.option("--read-only", is_flag=True)
@click.pass_obj
def serve(env: Env, host: str, port: int, cors: tuple[str, ...], read_only: bool):
    """Run the HTTP service over the data directory."""
    try:
        run_service(ServiceConfig(
            data_dir=env.data_dir, host=host, port=port,
            cors_origins=cors, read_only=read_only,
        ))
    except OSError as exc:
        raise _fail(exc)


if __name__ == "__main__":
    main()
