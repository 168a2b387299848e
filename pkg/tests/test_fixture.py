from importlib import resources

from biaselements.fixtures import (
    REFERENCE_GROUP_PERCENTS,
    REFERENCE_TYPE_PERCENTS,
    SAMPLE_TOTAL,
    build_reference_corpus,
    build_reference_labels,
    count_from_percent,
    feasibility,
    load_bundled_fixture,
    reference_group_counts,
    reference_type_counts,
    write_bundled_fixture,
)
from biaselements.prevalence import percent_of


class TestCountOracle:
    def test_counts_round_back_to_published_percents(self):
        # k = round(pct * 155 / 100) must satisfy round(100*k/155, 2) == pct
        for type_id, pct in REFERENCE_TYPE_PERCENTS.items():
            k = count_from_percent(pct)
            assert percent_of(k, SAMPLE_TOTAL) == pct, type_id
        for group_id, pct in REFERENCE_GROUP_PERCENTS.items():
            g = count_from_percent(pct)
            assert percent_of(g, SAMPLE_TOTAL) == pct, group_id

    def test_known_counts(self):
        counts = reference_type_counts()
        assert counts["word-choice"] == 90
        assert counts["burden-of-proof"] == 1
        assert counts["vagueness"] == 38
        groups = reference_group_counts()
        assert groups["framing"] == 106
        assert groups["dividing"] == groups["confirming"] == 25


class TestFeasibility:
    def test_every_group_satisfies_union_bounds(self, taxonomy):
        report = feasibility(taxonomy)
        assert set(report) == set(taxonomy.group_ids())
        for gid, row in report.items():
            assert row["feasible"], (gid, row)
            assert row["max_type_count"] <= row["target"] <= min(SAMPLE_TOTAL, row["type_count_sum"])


class TestAssignment:
    def test_exact_type_and_group_counts(self, taxonomy):
        labels = build_reference_labels(taxonomy)
        type_counts = reference_type_counts()
        group_counts = reference_group_counts()
        for t, k in type_counts.items():
            assert sum(1 for s in labels.values() if t in s) == k, t
        members = {g: {t.id for t in taxonomy.list_group(g)} for g in taxonomy.group_ids()}
        for g, target in group_counts.items():
            distinct = sum(1 for s in labels.values() if s & members[g])
            assert distinct == target, g

    def test_every_unit_carries_a_label(self, taxonomy):
        labels = build_reference_labels(taxonomy)
        assert len(labels) == SAMPLE_TOTAL
        assert all(labels[i] for i in range(SAMPLE_TOTAL))


class TestBundledFiles:
    def test_regeneration_is_byte_identical(self, taxonomy, tmp_path):
        corpus_path, ann_path = write_bundled_fixture(tmp_path)
        bundled = resources.files("biaselements").joinpath("data/fixtures")
        assert corpus_path.read_bytes() == bundled.joinpath("sample155.corpus.jsonl").read_bytes()
        assert ann_path.read_bytes() == bundled.joinpath("sample155.annotations.jsonl").read_bytes()

    def test_bundled_loads_and_matches_generator(self, taxonomy):
        corpus, store = load_bundled_fixture(taxonomy)
        built_corpus, built_store = build_reference_corpus(taxonomy)
        assert corpus.units == built_corpus.units
        assert store.consensus_labels() == built_store.consensus_labels()
        assert len(corpus.units) == SAMPLE_TOTAL
        assert store.annotators() == {"sample-annotator"}
