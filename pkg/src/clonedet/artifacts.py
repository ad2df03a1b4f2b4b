"""JSONL artifact schemas shared by the pipeline stages.

Rows are written with sorted keys and compact separators so identical
inputs always produce byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable, Iterator

import numpy as np

from .detector import ClonePair
from .embedder.distance import SentenceEmbedding
from .evaluator import CandidatePair, GroundTruth, LabelRecord
from .extractor import Method, RepresentationSequence, TokenBag


def write_jsonl(path: str | Path, rows: Iterable[dict[str, Any]]) -> None:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with p.open("w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True, separators=(",", ":")) + "\n")


def read_jsonl(path: str | Path) -> Iterator[dict[str, Any]]:
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)


def method_row(m: Method) -> dict[str, Any]:
    return {
        "id": m.id,
        "file": m.file,
        "name": m.name,
        "start_line": m.start_line,
        "end_line": m.end_line,
        "effective_lines": m.effective_lines,
        "normalized_body": m.normalized_body,
        "raw_body": m.raw_body,
    }


def row_method(row: dict[str, Any]) -> Method:
    return Method(
        id=row["id"],
        file=row["file"],
        name=row["name"],
        start_line=row["start_line"],
        end_line=row["end_line"],
        raw_body=row.get("raw_body", ""),
        normalized_body=row["normalized_body"],
        effective_lines=row["effective_lines"],
    )


def bag_row(b: TokenBag) -> dict[str, Any]:
    return {"method_id": b.method_id, "size": b.size, "entries": b.entries}


def row_bag(row: dict[str, Any]) -> TokenBag:
    entries = {str(k): int(v) for k, v in row["entries"].items()}
    return TokenBag(method_id=row["method_id"], entries=entries, size=int(row["size"]))


def sequence_row(s: RepresentationSequence) -> dict[str, Any]:
    return {"method_id": s.method_id, "kind": s.kind, "tokens": list(s.tokens)}


def row_sequence(row: dict[str, Any]) -> RepresentationSequence:
    return RepresentationSequence(
        method_id=row["method_id"], kind=row["kind"], tokens=tuple(row["tokens"])
    )


def pair_row(p: ClonePair, **extra: Any) -> dict[str, Any]:
    row: dict[str, Any] = {"a": p.a, "b": p.b, "score": p.score, "detector": p.detector}
    row.update(extra)
    return row


def row_pair(row: dict[str, Any]) -> ClonePair:
    return ClonePair(a=row["a"], b=row["b"], score=float(row["score"]), detector=row["detector"])


def candidate_row(c: CandidatePair) -> dict[str, Any]:
    return {"a": c.a, "b": c.b, "filter_score": c.filter_score}


def row_candidate(row: dict[str, Any]) -> CandidatePair:
    return CandidatePair(a=row["a"], b=row["b"], filter_score=float(row["filter_score"]))


def truth_row(t: GroundTruth) -> dict[str, Any]:
    return {
        "pair_id": t.pair_id,
        "consensus_label": t.consensus_label,
        "supporting_raters": t.supporting_raters,
    }


def row_truth(row: dict[str, Any]) -> GroundTruth:
    return GroundTruth(
        pair_id=row["pair_id"],
        consensus_label=row["consensus_label"],
        supporting_raters=int(row["supporting_raters"]),
    )


def label_row(r: LabelRecord) -> dict[str, Any]:
    return {
        "pair_id": r.pair_id,
        "rater": r.rater,
        "label": r.label,
        "timestamp": r.timestamp,
    }


def row_label(row: dict[str, Any]) -> LabelRecord:
    return LabelRecord(
        pair_id=row["pair_id"],
        rater=row["rater"],
        label=row["label"],
        timestamp=float(row.get("timestamp", 0.0)),
    )


def embedding_row(e: SentenceEmbedding) -> dict[str, Any]:
    return {
        "method_id": e.method_id,
        "kind": e.kind,
        "vector": [float(x) for x in e.vector],
    }


def row_embedding(row: dict[str, Any]) -> SentenceEmbedding:
    return SentenceEmbedding(
        method_id=row["method_id"], kind=row["kind"], vector=np.asarray(row["vector"], dtype=float)
    )
