import pytest

from biaselements.annotations import AnnotationRecord, AnnotationStore
from biaselements.corpus import Corpus, Document
from biaselements.taxonomy import bundled_taxonomy


@pytest.fixture(scope="session")
def taxonomy():
    return bundled_taxonomy()


@pytest.fixture()
def small_corpus(taxonomy):
    corpus = Corpus(id="c1", taxonomy_version=taxonomy.version)
    corpus.add_document(Document("d1", "It rained. We stayed home. Then we read."))
    corpus.add_document(Document("d2", "A second document. With two units."))
    return corpus


@pytest.fixture()
def small_store(small_corpus, taxonomy):
    return AnnotationStore(small_corpus, taxonomy)


def make_store(n_units, taxonomy):
    """Corpus of n single-sentence units plus an empty store."""
    text = " ".join(f"Unit number {i} sits here." for i in range(n_units))
    corpus = Corpus(id=f"c{n_units}", taxonomy_version=taxonomy.version)
    corpus.add_document(Document("doc", text))
    assert len(corpus.units) == n_units
    return corpus, AnnotationStore(corpus, taxonomy)


def record(store, unit_id, annotator, type_ids, **kw):
    return store.record(
        AnnotationRecord(
            unit_id=unit_id, annotator_id=annotator, type_ids=frozenset(type_ids), **kw
        )
    )
