"""HTTP backend for the human labeling workflow.

Raters fetch a randomly chosen candidate pair they have not handled yet,
read both methods side by side, and submit one of the five labels (or
skip). Labels land in an append-only JSONL journal that is compacted on
startup; consensus ground truth is exported straight from the journal.
"""

from __future__ import annotations

import json
import os
import random
import threading
import time
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, Response
from fastapi.responses import HTMLResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .evaluator import LABELS, CandidatePair, LabelRecord, consensus
from .extractor import Method

CLONE_TYPE_DEFINITIONS = [
    {
        "label": "Type1",
        "title": "Exact copy",
        "text": "The two methods are the same code apart from whitespace, indentation, comments, and other layout details.",
    },
    {
        "label": "Type2",
        "title": "Renamed copy",
        "text": "Identical structure, but identifier names and/or literal values differ (in addition to Type-1 differences).",
    },
    {
        "label": "Type3",
        "title": "Modified copy",
        "text": "Clearly similar overall, but statements have been added, removed, or edited (in addition to Type-2 differences).",
    },
    {
        "label": "Type4",
        "title": "Semantic twin",
        "text": "The code looks different but computes essentially the same thing.",
    },
    {
        "label": "NotClone",
        "title": "Not a clone",
        "text": "Any resemblance is superficial; the methods do different work.",
    },
]


@dataclass
class _Event:
    kind: str  # "label" | "skip"
    pair_id: str
    rater: str
    label: str | None
    timestamp: float


class LabelStore:
    """Append-only journal with startup compaction.

    One live record per (pair, rater): resubmitting overwrites. Writes are
    flushed and fsynced before the caller gets an acknowledgment.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._labels: dict[tuple[str, str], _Event] = {}
        self._skips: set[tuple[str, str]] = set()
        self._load_and_compact()

    def _load_and_compact(self) -> None:
        if self.path.exists():
            raw = 0
            with self.path.open("r", encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    raw += 1
                    row = json.loads(line)
                    ev = _Event(
                        kind=row.get("kind", "label"),
                        pair_id=row["pair_id"],
                        rater=row["rater"],
                        label=row.get("label"),
                        timestamp=float(row.get("timestamp", 0.0)),
                    )
                    if ev.kind == "skip":
                        self._skips.add((ev.pair_id, ev.rater))
                    else:
                        self._labels[(ev.pair_id, ev.rater)] = ev
            if raw > len(self._labels) + len(self._skips):
                self._rewrite()
        self.path.parent.mkdir(parents=True, exist_ok=True)

    def _rewrite(self) -> None:
        tmp = self.path.with_suffix(".tmp")
        with tmp.open("w", encoding="utf-8") as fh:
            for ev in self._iter_events():
                fh.write(json.dumps(self._row(ev), sort_keys=True) + "\n")
            fh.flush()
        tmp.replace(self.path)

    def _iter_events(self):
        for ev in self._labels.values():
            yield ev
        for pair_id, rater in self._skips:
            yield _Event(kind="skip", pair_id=pair_id, rater=rater, label=None, timestamp=0.0)

    @staticmethod
    def _row(ev: _Event) -> dict:
        row = {"kind": ev.kind, "pair_id": ev.pair_id, "rater": ev.rater, "timestamp": ev.timestamp}
        if ev.label is not None:
            row["label"] = ev.label
        return row

    def _append(self, ev: _Event) -> None:
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(self._row(ev), sort_keys=True) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def record_label(self, pair_id: str, rater: str, label: str) -> None:
        ev = _Event(kind="label", pair_id=pair_id, rater=rater, label=label, timestamp=time.time())
        with self._lock:
            self._labels[(pair_id, rater)] = ev
            self._append(ev)

    def record_skip(self, pair_id: str, rater: str) -> None:
        ev = _Event(kind="skip", pair_id=pair_id, rater=rater, label=None, timestamp=time.time())
        with self._lock:
            self._skips.add((pair_id, rater))
            self._append(ev)

    def records(self) -> list[LabelRecord]:
        with self._lock:
            return [
                LabelRecord(pair_id=ev.pair_id, rater=ev.rater, label=ev.label, timestamp=ev.timestamp)
                for ev in self._labels.values()
            ]

    def handled_by(self, rater: str) -> set[str]:
        """Pairs this rater labeled or skipped (never re-served)."""
        with self._lock:
            out = {pid for (pid, r) in self._labels if r == rater}
            out.update(pid for (pid, r) in self._skips if r == rater)
            return out

    def label_counts(self) -> dict[str, int]:
        with self._lock:
            counts: dict[str, int] = {}
            for pid, _ in self._labels:
                counts[pid] = counts.get(pid, 0) + 1
            return counts


class LabelSession:
    """Candidate pairs plus the methods they reference."""

    def __init__(
        self,
        candidates: list[CandidatePair],
        methods: dict[str, Method],
        store: LabelStore,
        *,
        prioritize_second_rater: bool = True,
        seed: int | None = None,
    ):
        self.candidates = {c.id: c for c in candidates}
        self.methods = methods
        self.store = store
        self.prioritize_second_rater = prioritize_second_rater
        self.rng = random.Random(seed)

    def next_pair(self, rater: str) -> CandidatePair | None:
        handled = self.store.handled_by(rater)
        open_ids = [pid for pid in self.candidates if pid not in handled]
        if not open_ids:
            return None
        if self.prioritize_second_rater:
            counts = self.store.label_counts()
            one_label = [pid for pid in open_ids if counts.get(pid, 0) == 1]
            if one_label:
                open_ids = one_label
        return self.candidates[self.rng.choice(sorted(open_ids))]

    def payload(self, cand: CandidatePair) -> dict:
        def side(mid: str) -> dict:
            m = self.methods[mid]
            return {
                "id": m.id,
                "name": m.name,
                "file": m.file,
                "start_line": m.start_line,
                "end_line": m.end_line,
                "body": m.raw_body,
            }

        return {
            "pair_id": cand.id,
            "filter_score": cand.filter_score,
            "a": side(cand.a),
            "b": side(cand.b),
            "definitions": CLONE_TYPE_DEFINITIONS,
        }

    def progress(self) -> dict:
        counts = self.store.label_counts()
        labeled = len(counts)
        return {
            "total": len(self.candidates),
            "labeled": labeled,
            "consensus": len(consensus(self.store.records())),
            "remaining": len(self.candidates) - labeled,
        }


class LabelSubmission(BaseModel):
    rater: str
    pair_id: str
    label: str


class SkipSubmission(BaseModel):
    rater: str
    pair_id: str


def create_app(session: LabelSession, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="clone labeling service")

    @app.get("/api/pair")
    def get_pair(rater: str = Query(min_length=1)):
        cand = session.next_pair(rater)
        if cand is None:
            return Response(status_code=204)
        return session.payload(cand)

    @app.post("/api/label")
    def post_label(sub: LabelSubmission):
        if sub.label not in LABELS:
            raise HTTPException(status_code=422, detail=f"label must be one of {list(LABELS)}")
        if sub.pair_id not in session.candidates:
            raise HTTPException(status_code=404, detail=f"unknown pair {sub.pair_id}")
        session.store.record_label(sub.pair_id, sub.rater, sub.label)
        return {"ok": True, "progress": session.progress()}

    @app.post("/api/skip")
    def post_skip(sub: SkipSubmission):
        if sub.pair_id not in session.candidates:
            raise HTTPException(status_code=404, detail=f"unknown pair {sub.pair_id}")
        session.store.record_skip(sub.pair_id, sub.rater)
        return {"ok": True, "progress": session.progress()}

    @app.get("/api/progress")
    def get_progress():
        return session.progress()

    @app.get("/api/export")
    def get_export():
        lines = [
            json.dumps(
                {
                    "pair_id": t.pair_id,
                    "consensus_label": t.consensus_label,
                    "supporting_raters": t.supporting_raters,
                },
                sort_keys=True,
            )
            for t in consensus(session.store.records())
        ]
        body = "\n".join(lines) + ("\n" if lines else "")
        return PlainTextResponse(body, media_type="application/x-ndjson")

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    else:

        @app.get("/", response_class=HTMLResponse)
        def index():
            return "<html><body><p>labeling API is up; no UI bundle configured</p></body></html>"

    return app
