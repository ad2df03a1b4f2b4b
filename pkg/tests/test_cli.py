import json

import pytest

from clonedet.cli import main
from clonedet.synth import synth_corpus, write_corpus


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    write_corpus(synth_corpus(24, seed=13, clone_fraction=0.3), root)
    return root


@pytest.fixture(scope="module")
def extracted(corpus_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    assert main(["extract", "--corpus", str(corpus_dir), "--out", str(out)]) == 0
    return out


def test_extract_outputs(extracted):
    for name in ("methods.jsonl", "bags.jsonl", "repr-identifier.jsonl", "repr-ast.jsonl", "manifest.json"):
        assert (extracted / name).exists(), name
    manifest = json.loads((extracted / "manifest.json").read_text())
    assert manifest["stages"]["extract"]["min_lines"] == 10
    assert manifest["stages"]["extract"]["methods"] > 0


def test_extract_deterministic(corpus_dir, tmp_path):
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    assert main(["extract", "--corpus", str(corpus_dir), "--out", str(out1)]) == 0
    assert main(["extract", "--corpus", str(corpus_dir), "--out", str(out2)]) == 0
    for name in ("methods.jsonl", "bags.jsonl", "repr-identifier.jsonl", "repr-ast.jsonl"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name


def test_detect_and_filter(extracted):
    assert main(["detect", "--in", str(extracted), "--out", str(extracted), "--theta", "0.9"]) == 0
    assert main(["filter", "--in", str(extracted), "--out", str(extracted), "--theta", "0.7"]) == 0
    pairs = [json.loads(ln) for ln in (extracted / "pairs-overlap.jsonl").read_text().splitlines()]
    candidates = [json.loads(ln) for ln in (extracted / "candidates.jsonl").read_text().splitlines()]
    assert all(p["theta"] == 0.9 for p in pairs)
    assert len(candidates) >= len(pairs)  # the 70% pass is a superset
    summary = json.loads((extracted / "summary-overlap.json").read_text())
    assert summary["pairs"] == len(pairs)


def test_detect_missing_input_names_expected_file(tmp_path, capsys):
    assert main(["detect", "--in", str(tmp_path), "--out", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert "bags.jsonl" in err


def test_embed_pipeline_and_combination(extracted):
    rc = main(
        [
            "embed",
            "--in", str(extracted),
            "--out", str(extracted),
            "--repr", "both",
            "--dim", "8",
            "--embed-epochs", "1",
            "--rae-epochs", "1",
            "--min-count", "1",
            "--seed", "3",
        ]
    )
    assert rc == 0
    for name in (
        "embeddings-identifier.jsonl",
        "embeddings-ast.jsonl",
        "pairs-identifier.jsonl",
        "pairs-ast.jsonl",
        "pairs-combination.jsonl",
        "training-log-identifier.jsonl".replace(".jsonl", ".json"),
    ):
        assert (extracted / name).exists(), name
    ident = {(r["a"], r["b"]) for r in map(json.loads, (extracted / "pairs-identifier.jsonl").read_text().splitlines())}
    ast = {(r["a"], r["b"]) for r in map(json.loads, (extracted / "pairs-ast.jsonl").read_text().splitlines())}
    union = {(r["a"], r["b"]) for r in map(json.loads, (extracted / "pairs-combination.jsonl").read_text().splitlines())}
    assert union == ident | ast
    log = json.loads((extracted / "training-log-identifier.json").read_text())
    assert len(log["word_embedding_losses"]) == 1
    assert len(log["rae_losses"]) == 2  # initial snapshot + one epoch


def test_evaluate_and_report(extracted, tmp_path):
    pairs = [json.loads(ln) for ln in (extracted / "pairs-overlap.jsonl").read_text().splitlines()]
    assert pairs, "need at least one detected pair for this test"
    truth_rows = []
    for i, p in enumerate(pairs):
        truth_rows.append(
            {
                "pair_id": f"{p['a']}|{p['b']}",
                "consensus_label": "Type1" if i % 2 == 0 else "NotClone",
                "supporting_raters": 2,
            }
        )
    truth_path = tmp_path / "truth.jsonl"
    truth_path.write_text("\n".join(json.dumps(r) for r in truth_rows) + "\n")
    out = tmp_path / "eval"
    rc = main(
        [
            "evaluate",
            "--truth", str(truth_path),
            "--pairs", str(extracted / "pairs-overlap.jsonl"),
            "--out", str(out),
        ]
    )
    assert rc == 0
    metrics = json.loads((out / "metrics.json").read_text())
    entry = metrics["Overlap"]
    positives = sum(1 for r in truth_rows if r["consensus_label"] == "Type1")
    assert entry["confusion"]["tp"] == positives
    assert entry["confusion"]["fp"] == len(truth_rows) - positives
    assert (out / "confusion-overlap.json").exists()
    assert (out / "type-distribution.json").exists()

    assert main(["report", "--in", str(out)]) == 0
    report = (out / "report.md").read_text()
    assert "Confusion matrices" in report and "| Overlap |" in report


def test_evaluate_missing_truth(tmp_path, capsys):
    rc = main(
        ["evaluate", "--truth", str(tmp_path / "truth.jsonl"), "--pairs", "x.jsonl", "--out", str(tmp_path)]
    )
    assert rc == 1
    assert "truth.jsonl" in capsys.readouterr().err


def test_bench_smoke(tmp_path):
    out = tmp_path / "bench"
    rc = main(
        [
            "bench",
            "--out", str(out),
            "--sizes", "30,60",
            "--embed-sizes", "",
            "--seed", "1",
        ]
    )
    assert rc == 0
    lines = (out / "timing.csv").read_text().strip().splitlines()
    assert lines[0] == "corpus,loc,method_count,detector,seconds"
    assert len(lines) == 3
    locs = [int(ln.split(",")[1]) for ln in lines[1:]]
    assert locs == sorted(locs)


def test_bench_over_corpus_directory(tmp_path):
    corpora = tmp_path / "corpora"
    for i, n in enumerate((20, 40, 30)):
        write_corpus(synth_corpus(n, seed=i), corpora / f"proj{i}")
    out = tmp_path / "bench"
    assert main(["bench", "--corpora", str(corpora), "--out", str(out)]) == 0
    lines = (out / "timing.csv").read_text().strip().splitlines()
    assert len(lines) == 4  # header + one row per corpus
    names = {ln.split(",")[0] for ln in lines[1:]}
    assert names == {"proj0", "proj1", "proj2"}
    locs = [int(ln.split(",")[1]) for ln in lines[1:]]
    assert locs == sorted(locs)


def test_bench_missing_corpora_dir(tmp_path, capsys):
    assert main(["bench", "--corpora", str(tmp_path / "nope"), "--out", str(tmp_path)]) == 1
    assert "corpora" in capsys.readouterr().err


def test_embed_deterministic(extracted, tmp_path):
    outs = []
    for name in ("e1", "e2"):
        out = tmp_path / name
        rc = main(
            [
                "embed",
                "--in", str(extracted),
                "--out", str(out),
                "--repr", "identifier",
                "--dim", "6",
                "--embed-epochs", "1",
                "--rae-epochs", "1",
                "--min-count", "1",
                "--seed", "11",
            ]
        )
        assert rc == 0
        outs.append(out)
    for name in ("embeddings-identifier.jsonl", "pairs-identifier.jsonl"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes(), name


def test_embed_per_project_restricts_pairs(extracted, tmp_path):
    base_out = tmp_path / "all"
    grouped_out = tmp_path / "grouped"
    common = [
        "--in", str(extracted),
        "--repr", "identifier",
        "--dim", "6",
        "--embed-epochs", "1",
        "--rae-epochs", "1",
        "--min-count", "1",
        "--seed", "11",
    ]
    assert main(["embed", *common, "--out", str(base_out)]) == 0
    assert main(["embed", *common, "--out", str(grouped_out), "--per-project"]) == 0
    all_pairs = {
        (r["a"], r["b"])
        for r in map(json.loads, (base_out / "pairs-identifier.jsonl").read_text().splitlines())
    }
    grouped = {
        (r["a"], r["b"])
        for r in map(json.loads, (grouped_out / "pairs-identifier.jsonl").read_text().splitlines())
    }
    assert grouped <= all_pairs
    # grouped pairs stay within one top-level directory
    methods = {r["id"]: r["file"] for r in map(json.loads, (extracted / "methods.jsonl").read_text().splitlines())}
    for a, b in grouped:
        assert methods[a].split("/")[0] == methods[b].split("/")[0]


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
