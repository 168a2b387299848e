import json

from click.testing import CliRunner

from biaselements.cli import main


def run(args, **kw):
    return CliRunner().invoke(main, args, catch_exceptions=False, **kw)


def seed_corpus(tmp_path, text="It rained. We stayed home."):
    article = tmp_path / "article.txt"
    article.write_text(text, encoding="utf-8")
    data_dir = tmp_path / "store"
    result = run(["--data-dir", str(data_dir), "ingest", "--in", str(article), "--corpus", "c1"])
    assert result.exit_code == 0, result.output
    return data_dir


class TestValidate:
    def test_bundled_passes(self):
        result = run(["validate"])
        assert result.exit_code == 0
        assert "38 types, 8 groups" in result.output

    def test_count_mismatch_exits_one(self, tmp_path):
        from biaselements.taxonomy import bundled_taxonomy, taxonomy_to_dict

        data = taxonomy_to_dict(bundled_taxonomy())
        del data["types"][0]
        bad = tmp_path / "t.json"
        bad.write_text(json.dumps(data), encoding="utf-8")
        result = run(["validate", "--taxonomy", str(bad)])
        assert result.exit_code == 1
        assert "type count mismatch" in result.output

    def test_unreadable_file_exits_two(self, tmp_path):
        result = run(["validate", "--taxonomy", str(tmp_path / "absent.json")])
        assert result.exit_code == 2


class TestIngestAnnotStats:
    def test_pipeline(self, tmp_path):
        data_dir = seed_corpus(tmp_path)
        assert (data_dir / "c1.corpus.jsonl").exists()

        result = run(["--data-dir", str(data_dir), "annot", "record",
                      "--corpus", "c1", "--unit", "article:s0",
                      "--annotator", "ann1", "--types", "word-choice,magnitude"])
        assert result.exit_code == 0, result.output

        result = run(["--data-dir", str(data_dir), "stats", "--corpus", "c1", "--format", "csv"])
        assert result.exit_code == 0
        assert result.output.splitlines()[0] == "group,group_pct,type,type_pct,tier,count"
        assert "framing,50.00,word-choice,50.00" in result.output

    def test_unknown_type_exits_one(self, tmp_path):
        data_dir = seed_corpus(tmp_path)
        result = run(["--data-dir", str(data_dir), "annot", "record",
                      "--corpus", "c1", "--unit", "article:s0",
                      "--annotator", "ann1", "--types", "loaded-langauge"])
        assert result.exit_code == 1
        assert "UnknownType" in result.output

    def test_export_import(self, tmp_path):
        data_dir = seed_corpus(tmp_path)
        run(["--data-dir", str(data_dir), "annot", "record", "--corpus", "c1",
             "--unit", "article:s0", "--annotator", "ann1", "--types", "word-choice"])
        out = tmp_path / "labels.jsonl"
        result = run(["--data-dir", str(data_dir), "annot", "export",
                      "--corpus", "c1", "--out", str(out)])
        assert result.exit_code == 0
        assert out.read_text().count('"word-choice"') == 1


class TestLayoutCommand:
    def test_writes_svg(self, tmp_path):
        data_dir = seed_corpus(tmp_path)
        out = tmp_path / "table.svg"
        result = run(["--data-dir", str(data_dir), "layout", "--corpus", "c1", "--out", str(out)])
        assert result.exit_code == 0
        assert out.read_bytes().count(b'class="cell"') == 38

    def test_bad_grid_exits_one(self, tmp_path):
        data_dir = seed_corpus(tmp_path)
        result = run(["--data-dir", str(data_dir), "layout", "--corpus", "c1",
                      "--out", str(tmp_path / "t.svg"), "--grid", "wat"])
        assert result.exit_code == 1


class TestCrosswalkCommand:
    def test_type_query(self):
        result = run(["crosswalk", "--type", "straw-man", "--external", "dasanmartino"])
        assert result.exit_code == 0
        assert "Straw man" in result.output

    def test_coverage(self):
        result = run(["crosswalk", "--coverage"])
        assert result.exit_code == 0
        assert "dasanmartino: 20/38 mapped" in result.output

    def test_unknown_type_exits_one(self):
        result = run(["crosswalk", "--type", "telepathy"])
        assert result.exit_code == 1


class TestClassifyCommand:
    def test_rule_backend(self, tmp_path):
        data_dir = seed_corpus(
            tmp_path, "Hordes of punks swarmed the island in the summer and caused chaos."
        )
        out = tmp_path / "report.json"
        result = run(["--data-dir", str(data_dir), "classify", "--corpus", "c1",
                      "--doc", "article", "--backend", "rule", "--out", str(out)])
        assert result.exit_code == 0, result.output
        report = json.loads(out.read_text())
        assert report["aggregate"]["units_flagged"] == 1

    def test_remote_down_exits_two(self, tmp_path):
        data_dir = seed_corpus(tmp_path)
        out = tmp_path / "report.json"
        result = run(["--data-dir", str(data_dir), "classify", "--corpus", "c1",
                      "--doc", "article", "--backend", "remote",
                      "--endpoint", "http://127.0.0.1:1", "--timeout", "0.2",
                      "--max-retries", "0", "--out", str(out)])
        assert result.exit_code == 2
        report = json.loads(out.read_text())  # report still written, with markers
        assert report["aggregate"]["units_failed"] == 2
