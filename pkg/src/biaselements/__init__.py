"""Sentence-level media-bias annotation toolkit.

Encodes a 38-type / 8-group bias taxonomy as data, segments documents into
sentence units, records multi-label annotations, computes prevalence and
agreement statistics, renders the table-of-bias-elements layout, maps to
prior taxonomies, and runs pluggable per-sentence classifiers behind a CLI
and an HTTP service.
"""

from .annotations import AgreementReport, AnnotationRecord, AnnotationStore
from .corpus import Corpus, Document, SentenceUnit, merge_units, segment
from .crosswalk import CrosswalkTable, bundled_crosswalk, load_crosswalk
from .errors import ToolkitError
from .layout import GridSpec, LayoutGrid, build_layout, place, render_svg
from .prevalence import PrevalenceReport, compute_prevalence, render_table
from .taxonomy import (
    BiasGroup,
    BiasType,
    FrequencyTier,
    Taxonomy,
    bundled_taxonomy,
    load_taxonomy,
    tier_for,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "AgreementReport",
    "AnnotationRecord",
    "AnnotationStore",
    "BiasGroup",
    "BiasType",
    "Corpus",
    "CrosswalkTable",
    "Document",
    "FrequencyTier",
    "GridSpec",
    "LayoutGrid",
    "PrevalenceReport",
    "SentenceUnit",
    "Taxonomy",
    "ToolkitError",
    "build_layout",
    "bundled_crosswalk",
    "bundled_taxonomy",
    "compute_prevalence",
    "load_crosswalk",
    "load_taxonomy",
    "merge_units",
    "place",
    "render_svg",
    "render_table",
    "segment",
    "tier_for",
    "validate",
]
