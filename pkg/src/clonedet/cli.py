"""Pipeline driver: extract -> detect/embed -> filter -> serve -> evaluate
-> report -> bench.

Every flag can also be supplied through the environment as CLONEDET_<FLAG>
(uppercase, dashes to underscores). Each stage records its parameters in
<out>/manifest.json for reproducibility.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from . import artifacts as art
from .detector import DetectorConfig, detect_with_stats
from .embedder import (
    RaeConfig,
    RnnConfig,
    build_vocab,
    calibrate_delta,
    combine,
    detect_by_distance,
    encode_corpus,
    init_rae,
    train_rae,
    train_word_embeddings,
)
from .evaluator import (
    TimingRun,
    confusion,
    filter_candidates,
    precision_recall,
    timing_report,
    type_distribution,
    unlabeled_predictions,
)
from .extractor import (
    CorpusError,
    TokenizerConfig,
    extract_corpus,
    extract_methods,
    extract_representation,
    ingest_corpus,
    tokenize,
)


def _env(name: str, default):
    return os.environ.get(f"CLONEDET_{name.upper().replace('-', '_')}", default)


def _fail(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return 1


def _require(path: Path, hint: str) -> Path:
    if not path.exists():
        raise FileNotFoundError(f"expected {hint} at {path}; run the producing stage first")
    return path


def _update_manifest(out: Path, stage: str, params: dict) -> None:
    out.mkdir(parents=True, exist_ok=True)
    manifest_path = out / "manifest.json"
    manifest = {}
    if manifest_path.exists():
        manifest = json.loads(manifest_path.read_text())
    manifest.setdefault("tool", "clonedet")
    manifest["version"] = __version__
    manifest.setdefault("stages", {})[stage] = params
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


# ---- extract ----------------------------------------------------------------


def cmd_extract(args) -> int:
    out = Path(args.out)
    try:
        files = ingest_corpus(args.corpus, tuple(args.extensions.split(",")))
    except CorpusError as exc:
        return _fail(str(exc))
    methods = extract_corpus(files, args.min_lines)
    tok_config = TokenizerConfig(include_punct=args.include_punct)
    bags = [tokenize(m, tok_config) for m in methods]

    art.write_jsonl(out / "methods.jsonl", (art.method_row(m) for m in methods))
    art.write_jsonl(out / "bags.jsonl", (art.bag_row(b) for b in bags))
    for kind in ("identifier", "ast"):
        rows = []
        failures = 0
        for m in methods:
            try:
                rows.append(art.sequence_row(extract_representation(m, kind)))
            except Exception:
                failures += 1
        art.write_jsonl(out / f"repr-{kind}.jsonl", rows)
        if failures:
            print(f"warning: {failures} methods had no {kind} representation", file=sys.stderr)
    _update_manifest(
        out,
        "extract",
        {
            "corpus": str(args.corpus),
            "extensions": args.extensions,
            "min_lines": args.min_lines,
            "include_punct": args.include_punct,
            "files": len(files),
            "methods": len(methods),
            "loc": sum(f.loc for f in files),
        },
    )
    print(f"extracted {len(methods)} methods from {len(files)} files -> {out}")
    return 0


# ---- detect / filter ---------------------------------------------------------


def _load_bags(indir: Path):
    path = _require(indir / "bags.jsonl", "token bags (bags.jsonl)")
    return [art.row_bag(row) for row in art.read_jsonl(path)]


def cmd_detect(args) -> int:
    indir, out = Path(args.indir), Path(args.out)
    try:
        bags = _load_bags(indir)
    except FileNotFoundError as exc:
        return _fail(str(exc))
    config = DetectorConfig(theta=args.theta)
    t0 = time.perf_counter()
    pairs, stats = detect_with_stats(bags, config)
    elapsed = time.perf_counter() - t0
    art.write_jsonl(
        out / "pairs-overlap.jsonl",
        (art.pair_row(p, theta=float(config.theta)) for p in pairs),
    )
    summary = {
        "theta": float(config.theta),
        "bags": stats.bags,
        "pairs": stats.pairs,
        "candidates": stats.candidates,
        "verified": stats.verified,
        "brute_force_comparisons": stats.brute_force_comparisons,
        "seconds": elapsed,
    }
    (out / "summary-overlap.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    _update_manifest(out, "detect", {"theta": str(args.theta), "in": str(indir)})
    print(f"{stats.pairs} clone pairs at theta={args.theta} in {elapsed:.2f}s -> {out}")
    return 0


def cmd_filter(args) -> int:
    indir, out = Path(args.indir), Path(args.out)
    try:
        bags = _load_bags(indir)
    except FileNotFoundError as exc:
        return _fail(str(exc))
    t0 = time.perf_counter()
    candidates = filter_candidates(bags, args.theta)
    elapsed = time.perf_counter() - t0
    art.write_jsonl(out / "candidates.jsonl", (art.candidate_row(c) for c in candidates))
    _update_manifest(out, "filter", {"theta": str(args.theta), "in": str(indir)})
    print(f"{len(candidates)} candidate pairs at theta={args.theta} in {elapsed:.2f}s -> {out}")
    return 0


# ---- embed -------------------------------------------------------------------


def _method_projects(indir: Path) -> dict[str, str]:
    """method id -> top-level directory of its file (the project)."""
    path = _require(indir / "methods.jsonl", "extracted methods (methods.jsonl)")
    out = {}
    for row in art.read_jsonl(path):
        out[row["id"]] = row["file"].split("/", 1)[0] if "/" in row["file"] else ""
    return out


def _embed_kind(indir: Path, out: Path, kind: str, args) -> list:
    path = _require(indir / f"repr-{kind}.jsonl", f"{kind} sequences (repr-{kind}.jsonl)")
    sequences = [art.row_sequence(row) for row in art.read_jsonl(path)]
    sequences = [s for s in sequences if s.tokens]
    if not sequences:
        raise FileNotFoundError(f"no non-empty {kind} sequences in {path}")
    vocab = build_vocab(sequences, min_count=args.min_count)
    table, lm_losses = train_word_embeddings(
        sequences,
        vocab,
        RnnConfig(dim=args.dim, epochs=args.embed_epochs, seed=args.seed, max_len=args.max_len),
    )
    model = init_rae(args.dim, seed=args.seed + 1)
    vector_seqs = [table.vectors[[vocab.id_of(t) for t in s.tokens[: args.max_len]]] for s in sequences]
    model, rae_losses = train_rae(
        vector_seqs, model, RaeConfig(epochs=args.rae_epochs, seed=args.seed + 1, max_len=args.max_len)
    )
    embeddings, errors = encode_corpus(sequences, table, vocab, model, max_len=args.max_len)
    if args.delta is not None:
        delta = float(args.delta)
    else:
        delta = calibrate_delta(embeddings, closest_fraction=args.delta_fraction, seed=args.seed)
    if args.per_project:
        # distances within each project only; the threshold stays corpus-wide
        projects = _method_projects(indir)
        groups: dict[str, list] = {}
        for e in embeddings:
            groups.setdefault(projects.get(e.method_id, ""), []).append(e)
        pairs = []
        for group in groups.values():
            pairs.extend(detect_by_distance(group, delta))
        pairs.sort(key=lambda p: p.key())
    else:
        pairs = detect_by_distance(embeddings, delta)
    art.write_jsonl(out / f"embeddings-{kind}.jsonl", (art.embedding_row(e) for e in embeddings))
    art.write_jsonl(out / f"pairs-{kind}.jsonl", (art.pair_row(p, delta=delta) for p in pairs))
    log = {
        "kind": kind,
        "vocab_size": vocab.size,
        "sequences": len(sequences),
        "skipped": errors,
        "delta": delta,
        "word_embedding_losses": lm_losses,
        "rae_losses": rae_losses,
    }
    (out / f"training-log-{kind}.json").write_text(json.dumps(log, indent=2, sort_keys=True) + "\n")
    print(f"{kind}: {len(pairs)} pairs at delta={delta:.4f}")
    return pairs


def cmd_embed(args) -> int:
    indir, out = Path(args.indir), Path(args.out)
    kinds = ("identifier", "ast") if args.repr == "both" else (args.repr,)
    out.mkdir(parents=True, exist_ok=True)
    results = {}
    try:
        for kind in kinds:
            results[kind] = _embed_kind(indir, out, kind, args)
    except FileNotFoundError as exc:
        return _fail(str(exc))
    if len(results) == 2:
        union = combine(results["identifier"], results["ast"])
        art.write_jsonl(out / "pairs-combination.jsonl", (art.pair_row(p) for p in union))
        print(f"combination: {len(union)} pairs")
    _update_manifest(
        out,
        "embed",
        {
            "repr": args.repr,
            "dim": args.dim,
            "embed_epochs": args.embed_epochs,
            "rae_epochs": args.rae_epochs,
            "min_count": args.min_count,
            "seed": args.seed,
            "delta": args.delta,
            "delta_fraction": args.delta_fraction,
            "per_project": args.per_project,
            "in": str(indir),
        },
    )
    return 0


# ---- serve -------------------------------------------------------------------


def cmd_serve(args) -> int:
    import uvicorn

    from .labelsvc import LabelSession, LabelStore, create_app

    indir = Path(args.indir)
    try:
        cand_path = _require(indir / "candidates.jsonl", "candidate pairs (candidates.jsonl)")
        methods_path = _require(indir / "methods.jsonl", "extracted methods (methods.jsonl)")
    except FileNotFoundError as exc:
        return _fail(str(exc))
    candidates = [art.row_candidate(row) for row in art.read_jsonl(cand_path)]
    methods = {row["id"]: art.row_method(row) for row in art.read_jsonl(methods_path)}
    missing = [c.id for c in candidates if c.a not in methods or c.b not in methods]
    if missing:
        return _fail(f"{len(missing)} candidate pairs reference unknown methods (first: {missing[0]})")
    store = LabelStore(args.labels)
    session = LabelSession(
        candidates,
        methods,
        store,
        prioritize_second_rater=not args.no_priority,
        seed=args.seed,
    )
    ui_dir = args.ui_dir
    if ui_dir is None:
        bundled = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        ui_dir = bundled if bundled.is_dir() else None
    app = create_app(session, ui_dir=ui_dir)
    print(f"serving {len(candidates)} candidate pairs on http://{args.host}:{args.port}")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


# ---- evaluate / report ---------------------------------------------------------


def cmd_evaluate(args) -> int:
    out = Path(args.out)
    try:
        truth_path = _require(Path(args.truth), "ground truth (truth.jsonl)")
    except FileNotFoundError as exc:
        return _fail(str(exc))
    truth = [art.row_truth(row) for row in art.read_jsonl(truth_path)]
    if not truth:
        return _fail(f"no ground-truth rows in {truth_path}")
    out.mkdir(parents=True, exist_ok=True)
    metrics = {}
    for pairs_file in args.pairs:
        try:
            path = _require(Path(pairs_file), f"predicted pairs ({pairs_file})")
        except FileNotFoundError as exc:
            return _fail(str(exc))
        pairs = [art.row_pair(row) for row in art.read_jsonl(path)]
        detector = pairs[0].detector if pairs else Path(pairs_file).stem.replace("pairs-", "")
        matrix = confusion(pairs, truth)
        m = precision_recall(matrix)
        entry = {
            "confusion": {"tp": matrix.tp, "fp": matrix.fp, "fn": matrix.fn, "tn": matrix.tn},
            "precision": m.precision,
            "recall": m.recall,
            "unlabeled_predictions": unlabeled_predictions(pairs, truth),
        }
        metrics[detector] = entry
        (out / f"confusion-{detector.lower()}.json").write_text(
            json.dumps(entry["confusion"], indent=2, sort_keys=True) + "\n"
        )
    (out / "metrics.json").write_text(json.dumps(metrics, indent=2, sort_keys=True) + "\n")
    dist = type_distribution(truth)
    (out / "type-distribution.json").write_text(
        json.dumps(
            {"counts": dist.counts, "percentages": dist.percentages, "total": dist.total},
            indent=2,
            sort_keys=True,
        )
        + "\n"
    )
    _update_manifest(out, "evaluate", {"truth": str(args.truth), "pairs": list(args.pairs)})
    for detector, entry in sorted(metrics.items()):
        p = entry["precision"]
        r = entry["recall"]
        print(
            f"{detector}: precision={'n/a' if p is None else f'{100 * p:.1f}%'} "
            f"recall={'n/a' if r is None else f'{100 * r:.1f}%'}"
        )
    return 0


def cmd_report(args) -> int:
    indir = Path(args.indir)
    try:
        metrics_path = _require(indir / "metrics.json", "metrics (metrics.json)")
        dist_path = _require(indir / "type-distribution.json", "type distribution")
    except FileNotFoundError as exc:
        return _fail(str(exc))
    metrics = json.loads(metrics_path.read_text())
    dist = json.loads(dist_path.read_text())
    lines = ["# Clone detection evaluation", ""]
    lines += ["## Confusion matrices", "", "| Detector | TP | FP | FN | TN |", "|---|---|---|---|---|"]
    for det, entry in sorted(metrics.items()):
        c = entry["confusion"]
        lines.append(f"| {det} | {c['tp']} | {c['fp']} | {c['fn']} | {c['tn']} |")
    lines += ["", "## Precision and recall", "", "| Detector | Precision | Recall |", "|---|---|---|"]
    for det, entry in sorted(metrics.items()):
        p, r = entry["precision"], entry["recall"]
        lines.append(
            f"| {det} | {'n/a' if p is None else f'{100 * p:.1f}%'} | "
            f"{'n/a' if r is None else f'{100 * r:.1f}%'} |"
        )
    lines += ["", "## Clone type distribution", "", "| Label | Count | % |", "|---|---|---|"]
    for label in ("Type1", "Type2", "Type3", "Type4", "NotClone"):
        lines.append(f"| {label} | {dist['counts'][label]} | {dist['percentages'][label]} |")
    lines.append("")
    timing = indir / "timing.csv"
    if timing.exists():
        lines += ["## Timing", "", "```", timing.read_text().strip(), "```", ""]
    report = "\n".join(lines)
    (indir / "report.md").write_text(report)
    print(report)
    return 0


# ---- bench ---------------------------------------------------------------------


def cmd_bench(args) -> int:
    import tempfile

    from .synth import synth_corpus, write_corpus

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    runs: list[TimingRun] = []
    summary = {}

    if args.corpora:
        corpora_root = Path(args.corpora)
        if not corpora_root.is_dir():
            return _fail(f"expected a directory of corpora at {corpora_root}")
        subdirs = sorted(p for p in corpora_root.iterdir() if p.is_dir())
        if not subdirs:
            return _fail(f"no corpus subdirectories under {corpora_root}")
        for sub in subdirs:
            files = ingest_corpus(sub)
            methods = extract_corpus(files, min_lines=args.min_lines)
            loc = sum(f.loc for f in files)
            bags = [tokenize(m) for m in methods]
            t0 = time.perf_counter()
            _, stats = detect_with_stats(bags, DetectorConfig(theta=args.theta))
            secs = time.perf_counter() - t0
            runs.append(TimingRun(sub.name, loc, len(methods), "Overlap", secs))
            summary[sub.name] = {
                "loc": loc,
                "methods": len(methods),
                "overlap_seconds": secs,
                "pairs": stats.pairs,
            }
            print(f"{sub.name}: loc={loc} methods={len(methods)} overlap={secs:.2f}s")
        (out / "timing.csv").write_text(timing_report(runs))
        (out / "bench-summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
        _update_manifest(
            out,
            "bench",
            {"corpora": str(corpora_root), "theta": str(args.theta), "min_lines": args.min_lines},
        )
        print(f"timing.csv written to {out}")
        return 0

    sizes = [int(s) for s in str(args.sizes).split(",") if s]
    embed_sizes = {int(s) for s in str(args.embed_sizes).split(",") if s}
    for size in sizes:
        with tempfile.TemporaryDirectory(prefix=f"bench{size}_") as tmp:
            write_corpus(synth_corpus(size, seed=args.seed), tmp)
            files = ingest_corpus(tmp)
            methods = extract_corpus(files, min_lines=args.min_lines)
            loc = sum(f.loc for f in files)
        bags = [tokenize(m) for m in methods]
        config = DetectorConfig(theta=args.theta)
        t0 = time.perf_counter()
        _, stats = detect_with_stats(bags, config)
        overlap_secs = time.perf_counter() - t0
        corpus_name = f"synth-{size}"
        runs.append(TimingRun(corpus_name, loc, len(methods), "Overlap", overlap_secs))
        summary[corpus_name] = {
            "loc": loc,
            "methods": len(methods),
            "overlap_seconds": overlap_secs,
            "pairs": stats.pairs,
        }
        print(f"{corpus_name}: loc={loc} methods={len(methods)} overlap={overlap_secs:.2f}s")
        if size in embed_sizes:
            sequences = [extract_representation(m, "identifier") for m in methods]
            sequences = [s for s in sequences if s.tokens]
            t0 = time.perf_counter()
            vocab = build_vocab(sequences, min_count=2)
            table, _ = train_word_embeddings(
                sequences,
                vocab,
                RnnConfig(dim=args.embed_dim, epochs=args.embed_epochs, seed=args.seed),
            )
            model = init_rae(args.embed_dim, seed=args.seed + 1)
            vec_seqs = [table.vectors[[vocab.id_of(t) for t in s.tokens[:400]]] for s in sequences]
            model, _ = train_rae(vec_seqs, model, RaeConfig(epochs=args.rae_epochs, seed=args.seed + 1))
            embeddings, _ = encode_corpus(sequences, table, vocab, model)
            delta = calibrate_delta(embeddings, seed=args.seed)
            detect_by_distance(embeddings, delta)
            embed_secs = time.perf_counter() - t0
            runs.append(TimingRun(corpus_name, loc, len(methods), "Embedding", embed_secs))
            summary[corpus_name]["embedding_seconds"] = embed_secs
            print(f"{corpus_name}: embedding pipeline={embed_secs:.2f}s")
    (out / "timing.csv").write_text(timing_report(runs))
    (out / "bench-summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    _update_manifest(
        out,
        "bench",
        {
            "sizes": sizes,
            "embed_sizes": sorted(embed_sizes),
            "theta": str(args.theta),
            "seed": args.seed,
            "embed_dim": args.embed_dim,
            "embed_epochs": args.embed_epochs,
            "rae_epochs": args.rae_epochs,
        },
    )
    print(f"timing.csv written to {out}")
    return 0


# ---- argument parsing -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clonedet", description=__doc__)
    parser.add_argument("--version", action="version", version=f"clonedet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="walk a corpus and extract methods, bags, sequences")
    corpus_default = _env("corpus", None)
    p.add_argument("--corpus", required=corpus_default is None, default=corpus_default)
    p.add_argument("--out", default=_env("out", "out"))
    p.add_argument("--min-lines", type=int, default=int(_env("min-lines", 10)))
    p.add_argument("--extensions", default=_env("extensions", ".scala"))
    p.add_argument("--include-punct", action="store_true")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("detect", help="overlap detector over extracted bags")
    p.add_argument("--in", dest="indir", default=_env("out", "out"))
    p.add_argument("--out", default=_env("out", "out"))
    p.add_argument("--theta", default=_env("theta", "0.9"))
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("filter", help="looser detection pass producing labeling candidates")
    p.add_argument("--in", dest="indir", default=_env("out", "out"))
    p.add_argument("--out", default=_env("out", "out"))
    p.add_argument("--theta", default=_env("theta", "0.7"))
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("embed", help="embedding detector over identifier/AST sequences")
    p.add_argument("--in", dest="indir", default=_env("out", "out"))
    p.add_argument("--out", default=_env("out", "out"))
    p.add_argument("--repr", choices=("identifier", "ast", "both"), default=_env("repr", "both"))
    p.add_argument("--dim", type=int, default=int(_env("dim", 50)))
    p.add_argument("--embed-epochs", type=int, default=int(_env("embed-epochs", 20)))
    p.add_argument("--rae-epochs", type=int, default=int(_env("rae-epochs", 20)))
    p.add_argument("--min-count", type=int, default=int(_env("min-count", 2)))
    p.add_argument("--max-len", type=int, default=int(_env("max-len", 400)))
    p.add_argument("--seed", type=int, default=int(_env("seed", 0)))
    p.add_argument("--delta", default=_env("delta", None))
    p.add_argument("--delta-fraction", type=float, default=float(_env("delta-fraction", 0.01)))
    p.add_argument(
        "--per-project",
        action="store_true",
        help="report distance pairs within each top-level directory only",
    )
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("serve", help="labeling service over filter candidates")
    p.add_argument("--in", dest="indir", default=_env("out", "out"))
    p.add_argument("--labels", default=_env("labels", "labels.jsonl"))
    p.add_argument("--host", default=_env("host", "127.0.0.1"))
    p.add_argument("--port", type=int, default=int(_env("port", 8410)))
    p.add_argument("--ui-dir", default=_env("ui-dir", None))
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--no-priority", action="store_true", help="serve uniformly instead of second-rater-first")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("evaluate", help="confusion matrices and metrics against ground truth")
    p.add_argument("--truth", required=True)
    p.add_argument("--pairs", nargs="+", required=True)
    p.add_argument("--out", default=_env("out", "out"))
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="markdown report from evaluate outputs")
    p.add_argument("--in", dest="indir", default=_env("out", "out"))
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("bench", help="timing sweep over a directory of corpora or synthetic ones")
    p.add_argument("--out", default=_env("out", "bench"))
    p.add_argument("--corpora", default=_env("corpora", None), help="directory with one corpus per subdirectory")
    p.add_argument("--sizes", default=_env("sizes", "1000,2000,5000,10000"))
    p.add_argument("--embed-sizes", default=_env("embed-sizes", "1000"))
    p.add_argument("--theta", default=_env("theta", "0.9"))
    p.add_argument("--min-lines", type=int, default=int(_env("min-lines", 10)))
    p.add_argument("--seed", type=int, default=int(_env("seed", 0)))
    # the embedding leg is trimmed relative to the real pipeline defaults
    # (dim 50, 20 epochs); it exists to compare timing shapes, not quality
    p.add_argument("--embed-dim", type=int, default=int(_env("embed-dim", 24)))
    p.add_argument("--embed-epochs", type=int, default=int(_env("embed-epochs", 5)))
    p.add_argument("--rae-epochs", type=int, default=int(_env("rae-epochs", 5)))
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
