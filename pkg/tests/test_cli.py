import json

import pytest

from motifkit.cli import main

from conftest import FIXTURES

CORPUS = FIXTURES / "corpus6"
RULES = CORPUS / "rules.jsonl"
TABLE1 = FIXTURES / "table1" / "annotations.jsonl"


def run_cli(*argv) -> int:
    return main([str(a) for a in argv])


class TestStageCommands:
    def test_match_then_features_then_train_predict_evaluate(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert run_cli("match", "--corpus", CORPUS, "--rules", RULES, "--out", out) == 0
        assert (out / "candidates.jsonl").exists()
        assert (out / "ann" / "news-irish-01.ann").exists()

        assert run_cli("features", "--corpus", CORPUS, "--rules", RULES, "--out", out) == 0
        assert (out / "features.jsonl").exists()

        assert run_cli("train", "--out", out, "--seed", 7) == 0
        assert (out / "model.json").exists()

        assert run_cli("predict", "--out", out) == 0
        assert (out / "predictions.jsonl").exists()

        assert run_cli("evaluate", "--out", out, "--seed", 7) == 0
        report = json.loads((out / "report.json").read_text(encoding="utf-8"))
        assert report["n"] == 13
        assert "Macro F1" in capsys.readouterr().out

    def test_run_command_with_config(self, tmp_path):
        config_path = tmp_path / "config.json"
        config_path.write_text(
            json.dumps(
                {
                    "corpus": str(CORPUS),
                    "rules": str(RULES),
                    "out": str(tmp_path / "out"),
                    "seed": 7,
                }
            ),
            encoding="utf-8",
        )
        assert run_cli("run", "--config", config_path) == 0
        assert (tmp_path / "out" / "report.json").exists()

    def test_missing_upstream_artifact_is_data_error(self, tmp_path):
        assert run_cli("predict", "--out", tmp_path / "nothing") == 2

    def test_usage_error_exit_code(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run_cli("match")  # missing required paths
        assert exc.value.code == 1
        with pytest.raises(SystemExit) as exc:
            run_cli("no-such-command")
        assert exc.value.code == 1


class TestValidateCommand:
    def test_clean_corpus(self, capsys):
        assert run_cli("validate", "--corpus", CORPUS) == 0
        out = capsys.readouterr().out
        assert "0 errors" in out

    def test_broken_layer_is_exit_2(self, tmp_path, capsys):
        doc_dir = tmp_path / "bad-doc"
        doc_dir.mkdir()
        (doc_dir / "text.txt").write_text("Finn ran", encoding="utf-8")
        (doc_dir / "tokens.jsonl").write_text(
            '{"i":0,"begin":0,"end":4,"text":"Finn","pos":"X","lemma":"finn"}\n'
            '{"i":1,"begin":2,"end":8,"text":"nn ran","pos":"X","lemma":"x"}\n',
            encoding="utf-8",
        )
        assert run_cli("validate", "--corpus", tmp_path) == 2
        assert "error" in capsys.readouterr().out


class TestStatsAndAgreement:
    def test_stats_reproduces_batch_counts(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert run_cli("stats", "--annotations", TABLE1, "--out", out) == 0
        data = json.loads((out / "stats.json").read_text(encoding="utf-8"))
        assert data["totals"]["batch_size"] == 5006
        irish1 = next(b for b in data["batches"] if b["batch_id"] == "irish-1")
        assert irish1["counts"]["Motific"] == 11
        table = capsys.readouterr().out
        assert "5,006" in table

    def test_stats_with_explicit_gold_file(self, tmp_path):
        ann = tmp_path / "ann.jsonl"
        ann.write_text(
            '{"candidate_id":"b#1","annotator_id":"a1","label":"Motific","batch_id":"b"}\n'
            '{"candidate_id":"b#1","annotator_id":"a2","label":"Eponymic","batch_id":"b"}\n'
            '{"candidate_id":"b#2","annotator_id":"a1","label":"Referential","batch_id":"b"}\n'
            '{"candidate_id":"b#2","annotator_id":"a2","label":"Motific","batch_id":"b"}\n',
            encoding="utf-8",
        )
        gold = tmp_path / "gold.jsonl"
        gold.write_text(
            '{"candidate_id":"b#1","label":"Motific"}\n'
            '{"candidate_id":"b#2","label":"Referential"}\n',
            encoding="utf-8",
        )
        out = tmp_path / "out"
        assert run_cli("stats", "--annotations", ann, "--gold", gold, "--out", out) == 0
        data = json.loads((out / "stats.json").read_text(encoding="utf-8"))
        assert data["batches"][0]["counts"]["Motific"] == 1
        assert data["batches"][0]["kappa"] is not None

    def test_agreement_command(self, tmp_path):
        ann = tmp_path / "ann.jsonl"
        rows = []
        for i in range(1, 5):
            for rater, label in (("a1", "Motific"), ("a2", "Motific" if i < 4 else "Eponymic")):
                rows.append(
                    json.dumps(
                        {
                            "candidate_id": f"b#{i}",
                            "annotator_id": rater,
                            "label": label,
                            "batch_id": "b1",
                        }
                    )
                )
        ann.write_text("\n".join(rows) + "\n", encoding="utf-8")
        out = tmp_path / "out"
        assert run_cli("agreement", "--annotations", ann, "--out", out) == 0
        data = json.loads((out / "agreement.json").read_text(encoding="utf-8"))
        assert data["batches"][0]["batch_id"] == "b1"
        assert data["batches"][0]["n_raters"] == 2

    def test_degenerate_agreement_is_data_error(self, tmp_path):
        ann = tmp_path / "ann.jsonl"
        rows = [
            json.dumps(
                {"candidate_id": f"b#{i}", "annotator_id": a, "label": "Motific", "batch_id": "b1"}
            )
            for i in (1, 2)
            for a in ("a1", "a2")
        ]
        ann.write_text("\n".join(rows) + "\n", encoding="utf-8")
        assert run_cli("agreement", "--annotations", ann) == 2


class TestSampleCommand:
    def _manifest(self, tmp_path):
        rows = []
        for d in range(30):
            for i in range(1, 41):
                rows.append(
                    json.dumps(
                        {
                            "candidate_id": f"doc{d:02d}#{i}",
                            "doc_id": f"doc{d:02d}",
                            "begin": 0,
                            "end": 1,
                            "motif_id": "finn-mccool",
                            "surface": "x",
                        },
                        separators=(",", ":"),
                    )
                )
        path = tmp_path / "candidates.jsonl"
        path.write_text("\n".join(rows) + "\n", encoding="utf-8")
        return path

    def test_sample_batch_json(self, tmp_path):
        path = self._manifest(tmp_path)
        out = tmp_path / "out"
        assert run_cli("sample", "--candidates", path, "--seed", 1, "--out", out) == 0
        data = json.loads((out / "batch.json").read_text(encoding="utf-8"))
        assert data["seed"] == 1
        assert data["candidate_count"] >= 500
        assert not data["exhausted"]

    def test_same_seed_same_manifest(self, tmp_path, capsys):
        path = self._manifest(tmp_path)
        assert run_cli("sample", "--candidates", path, "--seed", 3) == 0
        first = capsys.readouterr().out
        assert run_cli("sample", "--candidates", path, "--seed", 3) == 0
        assert capsys.readouterr().out == first

    def test_culture_filter_requires_rules(self, tmp_path):
        path = self._manifest(tmp_path)
        with pytest.raises(SystemExit) as exc:
            run_cli("sample", "--candidates", path, "--culture", "irish")
        assert exc.value.code == 1
