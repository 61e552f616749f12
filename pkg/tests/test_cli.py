import io
import json
import os
from contextlib import redirect_stdout

import pytest

from jointspace import corpus
from jointspace.cli import entrypoint

SYNTH_SETS = [
    "--set", "synth.num_concepts=2",
    "--set", "synth.docs_per_concept=30",
    "--set", "synth.feature_dim=8",
]


def run(argv):
    out = io.StringIO()
    with redirect_stdout(out):
        code = entrypoint(argv)
    return code, out.getvalue()


@pytest.fixture(scope="module")
def chain(tmp_path_factory):
    """Full CLI workflow in one working directory; returns step outputs."""
    workdir = tmp_path_factory.mktemp("chain")
    previous = os.getcwd()
    os.chdir(workdir)
    outputs = {}
    try:
        steps = {
            "synth": ["synth", *SYNTH_SETS],
            "train-text": ["train-text", "--set", 'text.cfg={"dim":16,"epochs":6,"seed":0}'],
            "train-visual": ["train-visual", "--set", 'regressor.cfg={"max_iters":300,"seed":0}'],
            "build-index": ["build-index"],
            "query": ["query", "--text", "concept0", "-k", "5"],
            "eval": ["eval", "--protocol", "class"],
            "analyze": [
                "analyze",
                "--set", "analysis.tsne_iterations=60",
                "--set", "analysis.n_pairs=500",
                "--set", "analysis.perplexity=10",
            ],
        }
        for name, argv in steps.items():
            code, text = run(argv)
            assert code == 0, f"{name} failed:\n{text}"
            outputs[name] = text
    finally:
        os.chdir(previous)
    return workdir, outputs


class TestWorkflow:
    def test_synth_writes_loadable_dataset(self, chain):
        workdir, outputs = chain
        assert "wrote 60 records" in outputs["synth"]
        ds = corpus.load_pairs(workdir / "dataset.jsonl", workdir / "features.feat")
        assert len(ds) == 60

    def test_train_text_reports_and_saves(self, chain):
        workdir, outputs = chain
        assert "word2vec" in outputs["train-text"]
        assert (workdir / "text_model.jtie").exists()

    def test_train_visual_saves_model_and_curve(self, chain):
        workdir, outputs = chain
        assert (workdir / "regressor.jtie").exists()
        curve = (workdir / "loss_curve.tsv").read_text().splitlines()
        assert len(curve) == 300
        first_iter, first_loss = curve[0].split("\t")
        assert first_iter == "0"
        float(first_loss)

    def test_build_index_reports_count(self, chain):
        workdir, outputs = chain
        assert "indexed 60 items" in outputs["build-index"]
        assert (workdir / "index.jidx").exists()

    def test_query_returns_ranked_concept_items(self, chain):
        workdir, outputs = chain
        lines = outputs["query"].strip().splitlines()
        assert len(lines) == 5
        scores = [float(line.split("\t")[1]) for line in lines]
        assert scores == sorted(scores, reverse=True)
        ds = corpus.load_pairs(workdir / "dataset.jsonl", workdir / "features.feat")
        by_id = {d.id: d for d in ds.documents}
        for line in lines:
            item_id = line.split("\t")[0]
            assert "concept0" in by_id[item_id].tags

    def test_eval_writes_report_files(self, chain):
        workdir, outputs = chain
        assert "MAP\t" in outputs["eval"]
        report = json.loads((workdir / "eval_report.json").read_text())
        assert report["protocol"] == "class"
        assert 0.0 <= report["aggregate"] <= 1.0
        table = (workdir / "eval_report.tsv").read_text().splitlines()
        assert table[-1].startswith("MAP\t")

    def test_analyze_writes_artifacts(self, chain):
        workdir, outputs = chain
        assert "r_squared\t" in outputs["analyze"]
        assert "tsne_points\t60" in outputs["analyze"]
        scatter = (workdir / "scatter.tsv").read_text().splitlines()
        assert scatter[0] == "text_distance\timage_distance\tshared_tags"
        assert len(scatter) == 502  # header + 500 pairs + summary comment
        tsne_rows = (workdir / "tsne.tsv").read_text().splitlines()
        assert len(tsne_rows) == 60
        placements = (workdir / "placements.tsv").read_text().splitlines()
        assert placements[0] == "id\tkind\tx\ty\tkept"
        assert len(placements) == 61


class TestExitCodes:
    def test_usage_errors_exit_two(self):
        assert run(["bogus-command"])[0] == 2
        assert run([])[0] == 2
        assert run(["train-text", "--method", "bert"])[0] == 2

    def test_missing_files_exit_one(self, tmp_path, monkeypatch, capsys):
        monkeypatch.chdir(tmp_path)
        code = entrypoint(["query", "--text", "hello"])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_query_without_text_exits_one(self, capsys):
        assert entrypoint(["query"]) == 1
        assert "at least one --text" in capsys.readouterr().err

    def test_weight_count_mismatch_exits_one(self, capsys):
        code = entrypoint(["query", "--text", "a", "--text", "b", "--weight", "1.0"])
        assert code == 1
        assert "--weight count" in capsys.readouterr().err

    def test_bad_override_exits_one(self, capsys):
        assert entrypoint(["synth", "--set", "eval.k"]) == 1
        assert "error:" in capsys.readouterr().err

    def test_invalid_config_file_exits_one(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{oops")
        assert entrypoint(["synth", "--config", str(bad)]) == 1
        assert "invalid JSON" in capsys.readouterr().err


class TestConfigSources:
    def test_env_var_config_picked_up(self, tmp_path, monkeypatch):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"synth": {"num_concepts": 2, "docs_per_concept": 10, "feature_dim": 4}}))
        monkeypatch.chdir(tmp_path)
        monkeypatch.setenv("JOINTSPACE_CONFIG", str(cfg))
        code, text = run(["synth"])
        assert code == 0
        assert "wrote 20 records" in text

    def test_cli_set_beats_config_file(self, tmp_path, monkeypatch):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"synth": {"num_concepts": 2, "docs_per_concept": 10, "feature_dim": 4}}))
        monkeypatch.chdir(tmp_path)
        code, text = run(["synth", "--config", str(cfg), "--set", "synth.docs_per_concept=5"])
        assert code == 0
        assert "wrote 10 records" in text
