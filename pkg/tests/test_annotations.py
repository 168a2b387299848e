import itertools

import pytest
from hypothesis import given, settings, strategies as st

from biaselements.annotations import AnnotationStore, export_annotations, import_annotations
from biaselements.errors import (
    NoOverlap,
    NoRecords,
    StaleTaxonomyVersion,
    UnknownType,
    UnknownUnit,
)
from tests.conftest import make_store, record


class TestRecord:
    def test_multi_label_record(self, small_store):
        rec = record(small_store, "d1:s0", "ann1", {"word-choice", "emotional-sensationalism"})
        assert rec.type_ids == frozenset({"word-choice", "emotional-sensationalism"})
        assert rec.taxonomy_version == small_store.taxonomy.version
        assert rec.timestamp

    def test_empty_set_is_judged_unbiased(self, small_store):
        record(small_store, "d1:s0", "ann1", set())
        rec = small_store.latest_for("d1:s0", "ann1")
        assert rec is not None and rec.type_ids == frozenset()

    def test_unknown_type(self, small_store):
        with pytest.raises(UnknownType):
            record(small_store, "d1:s0", "ann1", {"loaded-langauge"})

    def test_unknown_unit(self, small_store):
        with pytest.raises(UnknownUnit):
            record(small_store, "d1:s99", "ann1", {"word-choice"})

    def test_stale_taxonomy_version(self, small_store):
        with pytest.raises(StaleTaxonomyVersion):
            record(small_store, "d1:s0", "ann1", {"word-choice"}, taxonomy_version="0.0.9")

    def test_supersession_keeps_log(self, small_store):
        for labels in ({"word-choice"}, {"vagueness"}, set()):
            record(small_store, "d1:s0", "ann1", labels)
        assert small_store.latest_for("d1:s0", "ann1").type_ids == frozenset()
        assert len(small_store.log) == 3

    @given(st.lists(st.sampled_from(["word-choice", "vagueness", "magnitude"]), min_size=1, max_size=8))
    @settings(max_examples=50)
    def test_supersession_returns_last(self, sequence):
        from biaselements.taxonomy import bundled_taxonomy

        taxonomy = bundled_taxonomy()
        _, store = make_store(1, taxonomy)
        unit = store.corpus.units[0].id
        for label in sequence:
            record(store, unit, "ann1", {label})
        assert store.latest_for(unit, "ann1").type_ids == frozenset({sequence[-1]})


class TestConsensus:
    def test_union(self, small_store):
        record(small_store, "d1:s0", "A", {"word-choice"})
        record(small_store, "d1:s0", "B", {"word-choice", "vagueness"})
        assert small_store.consensus("d1:s0", "union") == {"word-choice", "vagueness"}

    def test_majority(self, small_store):
        record(small_store, "d1:s0", "A", {"word-choice"})
        record(small_store, "d1:s0", "B", {"word-choice", "vagueness"})
        assert small_store.consensus("d1:s0", "majority", 2) == {"word-choice"}

    def test_majority_threshold_unmet(self, small_store):
        record(small_store, "d1:s0", "A", {"word-choice"})
        assert small_store.consensus("d1:s0", "majority", 2) == frozenset()

    def test_no_records(self, small_store):
        with pytest.raises(NoRecords):
            small_store.consensus("d1:s0")

    @given(
        st.lists(
            st.frozensets(st.sampled_from(["word-choice", "vagueness", "magnitude"]), max_size=3),
            min_size=1,
            max_size=5,
        )
    )
    @settings(max_examples=50)
    def test_union_monotone_in_annotators(self, label_sets):
        from biaselements.taxonomy import bundled_taxonomy

        taxonomy = bundled_taxonomy()
        _, store = make_store(1, taxonomy)
        unit = store.corpus.units[0].id
        previous = frozenset()
        for i, labels in enumerate(label_sets):
            record(store, unit, f"ann{i}", labels)
            current = store.consensus(unit, "union")
            assert previous <= current
            previous = current


def oracle_kappa(a_vec, b_vec):
    """Independent contingency-table computation of binary Cohen's kappa."""
    n = len(a_vec)
    table = {(x, y): 0 for x in (0, 1) for y in (0, 1)}
    for x, y in zip(a_vec, b_vec):
        table[(x, y)] += 1
    p_o = (table[(1, 1)] + table[(0, 0)]) / n
    a_marginals = ((table[(1, 1)] + table[(1, 0)]) / n, (table[(0, 1)] + table[(0, 0)]) / n)
    b_marginals = ((table[(1, 1)] + table[(0, 1)]) / n, (table[(1, 0)] + table[(0, 0)]) / n)
    p_e = a_marginals[0] * b_marginals[0] + a_marginals[1] * b_marginals[1]
    if p_e == 1.0:
        return None
    return (p_o - p_e) / (1 - p_e)


def kappa_store(taxonomy, a_bits, b_bits):
    _, store = make_store(len(a_bits), taxonomy)
    units = [u.id for u in store.corpus.units]
    for uid, bit in zip(units, a_bits):
        record(store, uid, "A", {"word-choice"} if bit else set())
    for uid, bit in zip(units, b_bits):
        record(store, uid, "B", {"word-choice"} if bit else set())
    return store


class TestKappa:
    def test_identical_sets_give_one(self, taxonomy):
        store = kappa_store(taxonomy, [1, 0, 1], [1, 0, 1])
        report = store.cohen_kappa_per_type("A", "B")
        assert report.per_type["word-choice"] == 1.0
        assert report.units_compared == 3

    def test_hand_oracle_half_agreement(self, taxonomy):
        # A = [1,1,0,0], B = [1,0,1,0]: p_o = 0.5, p_e = 0.5, kappa = 0
        store = kappa_store(taxonomy, [1, 1, 0, 0], [1, 0, 1, 0])
        assert store.cohen_kappa_per_type("A", "B").per_type["word-choice"] == pytest.approx(0.0, abs=1e-15)

    def test_hand_oracle_opposed_degenerates(self, taxonomy):
        # A all-positive, B all-negative: p_o = 0, p_e = 0, kappa = 0
        store = kappa_store(taxonomy, [1, 1, 1], [0, 0, 0])
        assert store.cohen_kappa_per_type("A", "B").per_type["word-choice"] == pytest.approx(0.0, abs=1e-15)

    def test_undefined_when_both_all_negative(self, taxonomy):
        store = kappa_store(taxonomy, [0, 0], [0, 0])
        assert store.cohen_kappa_per_type("A", "B").per_type["word-choice"] is None

    def test_no_overlap(self, taxonomy):
        _, store = make_store(2, taxonomy)
        units = [u.id for u in store.corpus.units]
        record(store, units[0], "A", {"word-choice"})
        record(store, units[1], "B", {"word-choice"})
        with pytest.raises(NoOverlap):
            store.cohen_kappa_per_type("A", "B")

    def test_exhaustive_small_instances_match_oracle(self, taxonomy):
        # all 2-annotator binary labelings over up to 4 units here;
        # the acceptance suite extends this to 6
        for n in range(1, 5):
            corpus, _ = make_store(n, taxonomy)
            for a_bits in itertools.product((0, 1), repeat=n):
                for b_bits in itertools.product((0, 1), repeat=n):
                    store = kappa_store(taxonomy, a_bits, b_bits)
                    got = store.cohen_kappa_per_type("A", "B").per_type["word-choice"]
                    want = oracle_kappa(a_bits, b_bits)
                    if want is None:
                        assert got is None
                    else:
                        assert got == pytest.approx(want, abs=1e-12)

    def test_global_agreement_fields(self, taxonomy):
        store = kappa_store(taxonomy, [1, 0], [1, 1])
        report = store.cohen_kappa_per_type("A", "B")
        assert 0.0 <= report.observed_agreement <= 1.0
        assert 0.0 <= report.expected_agreement <= 1.0


class TestExportImport:
    def test_roundtrip_preserves_log_and_supersession(self, small_store, taxonomy, tmp_path):
        record(small_store, "d1:s0", "ann1", {"word-choice"})
        record(small_store, "d1:s0", "ann1", {"vagueness"})
        record(small_store, "d1:s1", "ann2", set(), note="clean")
        path = tmp_path / "labels.jsonl"
        with open(path, "w", encoding="utf-8") as f:
            assert export_annotations(small_store, f) == 3

        fresh = AnnotationStore(small_store.corpus, taxonomy)
        assert import_annotations(path, fresh) == 3
        assert fresh.latest_for("d1:s0", "ann1").type_ids == frozenset({"vagueness"})
        assert fresh.latest_for("d1:s1", "ann2").note == "clean"
        assert len(fresh.log) == 3
