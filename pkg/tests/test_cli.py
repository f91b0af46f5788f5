import json
from pathlib import Path

import pytest

from gwca.cli import main


def read_bytes_tree(root: Path) -> dict:
    return {p.name: p.read_bytes() for p in sorted(root.iterdir()) if p.is_file()}


def run_synth(out, pairs=12, d1=4, d2=3, noise="0.0", seed=7, extra=()):
    return main(
        [
            "synth", "--pairs", str(pairs), "--nodes", "6..12", "--d1", str(d1),
            "--d2", str(d2), "--noise", noise, "--seed", str(seed), "--out", str(out),
            *extra,
        ]
    )


class TestSynthCommand:
    def test_writes_expected_file_count(self, tmp_path):
        assert run_synth(tmp_path / "data", pairs=10) == 0
        files = list((tmp_path / "data").iterdir())
        graphs = [f for f in files if f.name.endswith(".json")]
        assert len(graphs) == 20
        assert (tmp_path / "data" / "pairs.jsonl").exists()

    def test_rerun_produces_identical_bytes(self, tmp_path):
        run_synth(tmp_path / "a")
        run_synth(tmp_path / "b")
        assert read_bytes_tree(tmp_path / "a") == read_bytes_tree(tmp_path / "b")

    def test_negative_noise_exits_2(self, tmp_path, capsys):
        assert run_synth(tmp_path / "data", noise="-1") == 2
        assert "noise" in capsys.readouterr().err

    def test_zero_pairs_writes_only_manifest(self, tmp_path):
        assert run_synth(tmp_path / "data", pairs=0) == 0
        files = [p.name for p in (tmp_path / "data").iterdir()]
        assert files == ["pairs.jsonl"]
        assert (tmp_path / "data" / "pairs.jsonl").read_text() == ""

    def test_split_manifests(self, tmp_path):
        assert run_synth(tmp_path / "data", pairs=10, extra=("--split-test", "4")) == 0
        train = (tmp_path / "data" / "train.jsonl").read_text().splitlines()
        test = (tmp_path / "data" / "test.jsonl").read_text().splitlines()
        assert len(train) == 6 and len(test) == 4

    def test_oversized_split_exits_2(self, tmp_path):
        assert run_synth(tmp_path / "data", pairs=3, extra=("--split-test", "9")) == 2


@pytest.fixture
def dataset(tmp_path):
    out = tmp_path / "data"
    run_synth(out, pairs=30, seed=11, extra=("--split-test", "10"))
    return out


class TestTrainCommand:
    def test_trains_and_reports_rho(self, dataset, tmp_path, capsys):
        model_path = tmp_path / "model.json"
        code = main(["train", "--pairs", str(dataset / "train.jsonl"), "--out", str(model_path)])
        assert code == 0
        out = capsys.readouterr().out
        assert "rho spectrum" in out
        payload = json.loads(model_path.read_text())
        assert payload["order"] == 2 and payload["fusion"] is True

    def test_empty_manifest_exits_2(self, tmp_path):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        assert main(["train", "--pairs", str(empty), "--out", str(tmp_path / "m.json")]) == 2

    def test_missing_manifest_exits_2(self, tmp_path):
        assert main(["train", "--pairs", str(tmp_path / "nope.jsonl"),
                     "--out", str(tmp_path / "m.json")]) == 2

    def test_bad_order_exits_2(self, dataset, tmp_path):
        assert main(["train", "--pairs", str(dataset / "train.jsonl"),
                     "--out", str(tmp_path / "m.json"), "--order", "0"]) == 2

    def test_no_fusion_flag(self, dataset, tmp_path):
        model_path = tmp_path / "m.json"
        code = main(["train", "--pairs", str(dataset / "train.jsonl"),
                     "--out", str(model_path), "--order", "1", "--no-fusion"])
        assert code == 0
        assert json.loads(model_path.read_text())["fusion"] is False

    def test_singular_solve_exits_3_naming_the_view(self, tmp_path, capsys):
        # one tiny pair with wide features is rank deficient; reg 0 must fail
        out = tmp_path / "tiny"
        run_synth(out, pairs=1, d1=8, d2=2, extra=("--nodes", "2..2"))
        code = main(["train", "--pairs", str(out / "pairs.jsonl"),
                     "--out", str(tmp_path / "m.json"), "--reg", "0.0"])
        assert code == 3
        assert "view 1" in capsys.readouterr().err
        assert not (tmp_path / "m.json").exists()


class TestRetrieveCommand:
    def test_clean_split_reaches_full_recall(self, dataset, tmp_path, capsys):
        model_path = tmp_path / "model.json"
        main(["train", "--pairs", str(dataset / "train.jsonl"), "--out", str(model_path)])
        results = tmp_path / "results.jsonl"
        code = main([
            "retrieve", "--model", str(model_path),
            "--queries", str(dataset / "test.jsonl"),
            "--corpus", str(dataset / "test.jsonl"),
            "--out", str(results), "--topk", "1,5,10",
        ])
        assert code == 0
        out = capsys.readouterr().out
        assert "R@1    1.0000" in out
        rows = [json.loads(line) for line in results.read_text().splitlines()]
        assert len(rows) == 10
        assert all(row["ranked"][0][0] == row["truth"] for row in rows)

    def test_recall_monotone_in_k(self, dataset, tmp_path, capsys):
        model_path = tmp_path / "model.json"
        main(["train", "--pairs", str(dataset / "train.jsonl"), "--out", str(model_path)])
        main([
            "retrieve", "--model", str(model_path),
            "--queries", str(dataset / "test.jsonl"),
            "--corpus", str(dataset / "test.jsonl"),
            "--out", str(tmp_path / "r.jsonl"), "--topk", "1,3,5",
        ])
        lines = [l for l in capsys.readouterr().out.splitlines() if l.startswith("R@")]
        values = [float(l.split()[-1]) for l in lines]
        assert values == sorted(values)

    def test_dimension_mismatch_exits_3(self, dataset, tmp_path):
        model_path = tmp_path / "model.json"
        main(["train", "--pairs", str(dataset / "train.jsonl"), "--out", str(model_path)])
        other = tmp_path / "other"
        run_synth(other, pairs=4, d1=2, d2=2, seed=1)
        code = main([
            "retrieve", "--model", str(model_path),
            "--queries", str(other / "pairs.jsonl"),
            "--corpus", str(other / "pairs.jsonl"),
            "--out", str(tmp_path / "r.jsonl"),
        ])
        assert code == 3

    def test_bad_topk_exits_2(self, dataset, tmp_path):
        model_path = tmp_path / "model.json"
        main(["train", "--pairs", str(dataset / "train.jsonl"), "--out", str(model_path)])
        assert main([
            "retrieve", "--model", str(model_path),
            "--queries", str(dataset / "test.jsonl"),
            "--corpus", str(dataset / "test.jsonl"),
            "--out", str(tmp_path / "r.jsonl"), "--topk", "0",
        ]) == 2


class TestCheckCommand:
    def test_default_suite_passes(self, capsys):
        assert main(["check", "--trials", "40"]) == 0
        out = capsys.readouterr().out
        assert "filter-equivalence" in out and "PASS" in out
        assert "all 6 properties passed" in out

    def test_injected_fault_fails_kernel_identities(self, tmp_path, capsys):
        failure = tmp_path / "failure.json"
        code = main(["check", "--trials", "40", "--inject-fault", "kernel-sign",
                     "--failure-out", str(failure)])
        assert code == 3
        out = capsys.readouterr().out
        assert any("kernel-identities" in line and "FAIL" in line for line in out.splitlines())
        payload = json.loads(failure.read_text())
        assert payload["property"] == "kernel-identities"
        assert payload["case"] is not None

    def test_trials_scale_same_verdict(self, capsys):
        assert main(["check", "--trials", "120"]) == 0


class TestAblateCommand:
    def test_report_structure(self, dataset, tmp_path):
        report_path = tmp_path / "report.json"
        code = main([
            "ablate", "--train", str(dataset / "train.jsonl"),
            "--test", str(dataset / "test.jsonl"),
            "--orders", "1,2", "--channels-grid", "2,4",
            "--topk", "1,5", "--out", str(report_path),
        ])
        assert code == 0
        report = json.loads(report_path.read_text())
        assert [row["order"] for row in report["order_sweep"]] == [1, 2]
        assert [row["channels"] for row in report["channel_sweep"]] == [2, 4]
        for row in report["order_sweep"] + report["channel_sweep"]:
            for value in row["recall"].values():
                assert 0.0 <= value <= 1.0

    def test_plot_file_written(self, dataset, tmp_path):
        png = tmp_path / "sweep.png"
        code = main([
            "ablate", "--train", str(dataset / "train.jsonl"),
            "--test", str(dataset / "test.jsonl"),
            "--orders", "1,2", "--channels-grid", "2",
            "--plot", str(png),
        ])
        assert code == 0
        assert png.stat().st_size > 0


class TestEmbedGraphCommand:
    def test_csv_input(self, tmp_path):
        emb = tmp_path / "emb.csv"
        emb.write_text("1.0,0.0\n0.9,0.1\n0.0,1.0\n")
        out = tmp_path / "graph.json"
        assert main(["embed-graph", "--embeddings", str(emb),
                     "--threshold", "0.5", "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        assert payload["n"] == 3

    def test_json_input_top_m(self, tmp_path):
        emb = tmp_path / "emb.json"
        emb.write_text(json.dumps({"embeddings": [[1.0, 0.0], [0.8, 0.6], [0.0, 1.0]]}))
        out = tmp_path / "graph.json"
        assert main(["embed-graph", "--embeddings", str(emb),
                     "--top-m", "1", "--out", str(out)]) == 0

    def test_zero_row_exits_2(self, tmp_path, capsys):
        emb = tmp_path / "emb.csv"
        emb.write_text("1.0,0.0\n0.0,0.0\n")
        assert main(["embed-graph", "--embeddings", str(emb),
                     "--threshold", "0.1", "--out", str(tmp_path / "g.json")]) == 2
        assert "row 1" in capsys.readouterr().err


class TestTopLevel:
    def test_no_subcommand_exits_2(self, capsys):
        assert main([]) == 2

    def test_unknown_flag_exits_2(self, capsys):
        assert main(["synth", "--bogus"]) == 2

    def test_help_documents_default_tuning(self, capsys):
        assert main(["--help"]) == 0
        assert "MovieGraphs" in capsys.readouterr().out
