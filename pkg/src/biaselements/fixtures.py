"""Deterministic synthetic corpus reproducing the published prevalence sample.

The reference sample is 155 biased sentences with known per-type and
per-group prevalence percentages. From the percentages we derive integer
counts (k = round(pct * 155 / 100), half-up) and build a label assignment
that hits every per-type count exactly while also hitting every group's
distinct-unit count exactly, which is feasible because each group's target
lies between its largest type count and the (capped) sum of its type
counts.

Construction: each group claims a cyclic interval of unit slots with the
group's target length; inside that interval, each type's occurrences fill
a cyclic run. Consecutive group intervals wrap around the 155 slots, so
every unit ends up with at least one label.
"""

from __future__ import annotations

from decimal import ROUND_HALF_UP, Decimal
from importlib import resources
from pathlib import Path

from .annotations import AnnotationRecord, AnnotationStore, export_annotations, import_annotations
from .corpus import Corpus, Document, load_corpus, save_corpus
from .taxonomy import Taxonomy, bundled_taxonomy

SAMPLE_TOTAL = 155
SAMPLE_CORPUS_ID = "sample155"
SAMPLE_DOC_ID = "sample155-doc"
SAMPLE_ANNOTATOR = "sample-annotator"
_FIXED_TIMESTAMP = "2025-06-01T00:00:00+00:00"

# Published prevalence of the 155-sentence reference sample, percent of units.
REFERENCE_TYPE_PERCENTS: dict[str, float] = {
    "word-choice": 58.06,
    "emotional-sensationalism": 15.48,
    "magnitude": 8.39,
    "rhetorical": 7.10,
    "empty-symbol": 5.81,
    "false-dichotomy": 4.52,
    "flawed-comparison": 3.87,
    "straw-man": 3.87,
    "normalwashing": 3.87,
    "false-balance": 1.94,
    "vagueness": 24.52,
    "unsubstantiated-claims": 19.35,
    "speculation": 10.32,
    "projection": 9.03,
    "suggestive-questioning": 5.16,
    "opinionated": 36.77,
    "ideological": 9.03,
    "commercial": 1.29,
    "ad-hominem": 7.74,
    "mud-and-honey": 7.10,
    "association": 7.10,
    "horse-race": 5.16,
    "generalization": 14.84,
    "causal-misunderstanding": 9.68,
    "circular-reasoning": 1.29,
    "burden-of-proof": 0.65,
    "claim-and-blame": 7.10,
    "side-note": 5.16,
    "no-discussion": 3.87,
    "shifting-goalpost": 1.94,
    "whataboutism": 1.94,
    "us-vs-them": 10.32,
    "discriminatory": 5.16,
    "gatekeeping": 4.52,
    "cherry-picking": 5.81,
    "social-compliance": 5.81,
    "source-selection": 4.52,
    "anecdotal-evidence": 3.87,
}

REFERENCE_GROUP_PERCENTS: dict[str, float] = {
    "framing": 68.39,
    "asserting": 54.19,
    "preferring": 38.71,
    "personalizing": 23.87,
    "misreasoning": 21.29,
    "deflecting": 18.71,
    "dividing": 16.13,
    "confirming": 16.13,
}


def count_from_percent(pct: float, total: int = SAMPLE_TOTAL) -> int:
    """k = round(pct * total / 100), half-up on exact decimal arithmetic."""
    k = (Decimal(str(pct)) * total / 100).quantize(Decimal("1"), rounding=ROUND_HALF_UP)
    return int(k)


def reference_type_counts() -> dict[str, int]:
    return {t: count_from_percent(p) for t, p in REFERENCE_TYPE_PERCENTS.items()}


def reference_group_counts() -> dict[str, int]:
    return {g: count_from_percent(p) for g, p in REFERENCE_GROUP_PERCENTS.items()}


def feasibility(taxonomy: Taxonomy | None = None) -> dict[str, dict]:
    """Per group: the union constraint max(k) <= g <= min(N, sum(k)) with verdict."""
    taxonomy = taxonomy or bundled_taxonomy()
    type_counts = reference_type_counts()
    group_counts = reference_group_counts()
    out: dict[str, dict] = {}
    for gid in taxonomy.group_ids():
        ks = [type_counts[t.id] for t in taxonomy.list_group(gid)]
        g = group_counts[gid]
        out[gid] = {
            "target": g,
            "max_type_count": max(ks),
            "type_count_sum": sum(ks),
            "feasible": max(ks) <= g <= min(SAMPLE_TOTAL, sum(ks)),
        }
    return out


def build_reference_labels(taxonomy: Taxonomy | None = None) -> dict[int, set[str]]:
    """Unit slot index (0..154) -> label set, hitting all reference counts."""
    taxonomy = taxonomy or bundled_taxonomy()
    type_counts = reference_type_counts()
    group_counts = reference_group_counts()
    labels: dict[int, set[str]] = {i: set() for i in range(SAMPLE_TOTAL)}

    offset = 0
    for gid in taxonomy.group_ids():
        g = group_counts[gid]
        slots = [(offset + j) % SAMPLE_TOTAL for j in range(g)]
        pointer = 0
        for btype in taxonomy.list_group(gid):
            k = type_counts[btype.id]
            for j in range(k):
                labels[slots[(pointer + j) % g]].add(btype.id)
            pointer += k
        offset += g
    return labels


def _sample_sentences() -> list[str]:
    return [
        f"Sample unit {i + 1:03d} keeps the count steady." for i in range(SAMPLE_TOTAL)
    ]


def build_reference_corpus(taxonomy: Taxonomy | None = None) -> tuple[Corpus, AnnotationStore]:
    """The 155-unit corpus plus a single-annotator store carrying the labels."""
    taxonomy = taxonomy or bundled_taxonomy()
    corpus = Corpus(id=SAMPLE_CORPUS_ID, taxonomy_version=taxonomy.version)
    corpus.add_document(
        Document(
            id=SAMPLE_DOC_ID,
            text=" ".join(_sample_sentences()),
            title="Synthetic prevalence sample",
            language="en",
            source_note="Generated fixture; label counts follow the published 155-sentence sample.",
        )
    )
    units = corpus.units_for(SAMPLE_DOC_ID)
    if len(units) != SAMPLE_TOTAL:
        raise AssertionError(f"fixture text segmented into {len(units)} units, wanted {SAMPLE_TOTAL}")

    store = AnnotationStore(corpus, taxonomy)
    labels = build_reference_labels(taxonomy)
    for i, unit in enumerate(units):
        store.record(
            AnnotationRecord(
                unit_id=unit.id,
                annotator_id=SAMPLE_ANNOTATOR,
                type_ids=frozenset(labels[i]),
                timestamp=_FIXED_TIMESTAMP,
            )
        )
    return corpus, store


def write_bundled_fixture(directory: str | Path) -> tuple[Path, Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    corpus, store = build_reference_corpus()
    corpus_path = directory / f"{SAMPLE_CORPUS_ID}.corpus.jsonl"
    ann_path = directory / f"{SAMPLE_CORPUS_ID}.annotations.jsonl"
    save_corpus(corpus, corpus_path)
    with open(ann_path, "w", encoding="utf-8") as f:
        export_annotations(store, f)
    return corpus_path, ann_path


def load_bundled_fixture(taxonomy: Taxonomy | None = None) -> tuple[Corpus, AnnotationStore]:
    taxonomy = taxonomy or bundled_taxonomy()
    data = resources.files("biaselements").joinpath("data/fixtures")
    corpus = load_corpus(data.joinpath(f"{SAMPLE_CORPUS_ID}.corpus.jsonl").read_bytes())
    store = AnnotationStore(corpus, taxonomy)
    import_annotations(data.joinpath(f"{SAMPLE_CORPUS_ID}.annotations.jsonl").read_bytes(), store)
    return corpus, store
