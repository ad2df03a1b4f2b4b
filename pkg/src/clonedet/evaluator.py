"""Evaluation harness: candidate filtering, consensus ground truth,
confusion matrices, precision/recall, clone-type distributions, timing."""

from __future__ import annotations

import csv
import io
import logging
import random
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from .detector import ClonePair, DetectorConfig, detect
from .extractor import Method, TokenBag
from .lexer import TokenKind, scan

log = logging.getLogger(__name__)

LABELS = ("Type1", "Type2", "Type3", "Type4", "NotClone")
CLONE_LABELS = frozenset(LABELS[:4])


def pair_id(a: str, b: str) -> str:
    if a == b:
        raise ValueError("a pair joins two distinct methods")
    return f"{a}|{b}" if a < b else f"{b}|{a}"


@dataclass(frozen=True)
class CandidatePair:
    a: str
    b: str
    filter_score: float

    @property
    def id(self) -> str:
        return pair_id(self.a, self.b)


@dataclass(frozen=True)
class LabelRecord:
    pair_id: str
    rater: str
    label: str
    timestamp: float = 0.0

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValueError(f"label must be one of {LABELS}, got {self.label!r}")


@dataclass(frozen=True)
class GroundTruth:
    pair_id: str
    consensus_label: str
    supporting_raters: int


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class Metrics:
    precision: float | None  # None when tp + fp == 0
    recall: float | None  # None when tp + fn == 0


def filter_candidates(bags: list[TokenBag], theta_filter: float | str = "0.7") -> list[CandidatePair]:
    """The looser detection pass whose output goes to human labeling."""
    pairs = detect(bags, DetectorConfig(theta=theta_filter))
    return [CandidatePair(a=p.a, b=p.b, filter_score=p.score) for p in pairs]


def sample_pairs(pairs: list[CandidatePair], n: int, seed: int) -> list[CandidatePair]:
    """Uniform sample without replacement, deterministic per seed."""
    if n < 0:
        raise ValueError("sample size must be >= 0")
    ordered = sorted(pairs, key=lambda p: p.id)
    if n >= len(ordered):
        if n > len(ordered):
            log.warning("asked for %d samples but only %d pairs exist; returning all", n, len(ordered))
        return ordered
    return random.Random(seed).sample(ordered, n)


def consensus(records: list[LabelRecord], min_support: int = 2) -> list[GroundTruth]:
    """Pairs where one label has >= min_support raters and strictly more
    support than any other label. Ties are excluded (unresolved)."""
    latest: dict[tuple[str, str], LabelRecord] = {}
    for rec in records:  # resubmission overwrites: last record per rater wins
        latest[(rec.pair_id, rec.rater)] = rec
    votes: dict[str, dict[str, int]] = {}
    for rec in latest.values():
        counts = votes.setdefault(rec.pair_id, {})
        counts[rec.label] = counts.get(rec.label, 0) + 1
    truth: list[GroundTruth] = []
    for pid in sorted(votes):
        counts = sorted(votes[pid].items(), key=lambda kv: (-kv[1], kv[0]))
        top_label, top_n = counts[0]
        if top_n < min_support:
            continue
        if len(counts) > 1 and counts[1][1] == top_n:
            continue  # unresolved tie
        truth.append(GroundTruth(pair_id=pid, consensus_label=top_label, supporting_raters=top_n))
    return truth


def unresolved_ties(records: list[LabelRecord], min_support: int = 2) -> int:
    latest: dict[tuple[str, str], LabelRecord] = {}
    for rec in records:
        latest[(rec.pair_id, rec.rater)] = rec
    votes: dict[str, dict[str, int]] = {}
    for rec in latest.values():
        votes.setdefault(rec.pair_id, {}).setdefault(rec.label, 0)
        votes[rec.pair_id][rec.label] += 1
    ties = 0
    for counts in votes.values():
        ranked = sorted(counts.values(), reverse=True)
        if ranked[0] >= min_support and len(ranked) > 1 and ranked[1] == ranked[0]:
            ties += 1
    return ties


_LITERAL_KINDS = frozenset((TokenKind.NUMBER, TokenKind.STRING, TokenKind.CHAR))


def _abstract_tokens(body: str, consistent: bool) -> tuple:
    """Token stream with identifiers and literals erased (or, with
    consistent=True, numbered by first occurrence so renaming must be
    bijective)."""
    out = []
    ident_map: dict[str, int] = {}
    lit_map: dict[str, int] = {}
    for tok in scan(body):
        if tok.kind == TokenKind.IDENT:
            if consistent:
                out.append(("I", ident_map.setdefault(tok.text, len(ident_map))))
            else:
                out.append("I")
        elif tok.kind in _LITERAL_KINDS:
            if consistent:
                out.append(("L", lit_map.setdefault(tok.text, len(lit_map))))
            else:
                out.append("L")
        else:
            out.append(tok.text)
    return tuple(out)


def classify_auto(a: Method, b: Method, consistent_renaming: bool = False) -> str:
    """Type1 for byte-equal normalized bodies, Type2 when only identifier
    names and literal values differ, Unknown otherwise (human territory)."""
    if a.normalized_body == b.normalized_body:
        return "Type1"
    if _abstract_tokens(a.normalized_body, consistent_renaming) == _abstract_tokens(
        b.normalized_body, consistent_renaming
    ):
        return "Type2"
    return "Unknown"


def confusion(predicted: list[ClonePair], truth: list[GroundTruth]) -> ConfusionMatrix:
    """Scored over ground-truth pairs only; predictions without a label are
    ignored (see unlabeled_predictions)."""
    if not truth:
        raise ValueError("confusion requires non-empty ground truth")
    predicted_ids = {pair_id(p.a, p.b) for p in predicted}
    tp = fp = fn = tn = 0
    for gt in truth:
        positive = gt.consensus_label in CLONE_LABELS
        hit = gt.pair_id in predicted_ids
        if positive and hit:
            tp += 1
        elif positive:
            fn += 1
        elif hit:
            fp += 1
        else:
            tn += 1
    return ConfusionMatrix(tp=tp, fp=fp, fn=fn, tn=tn)


def unlabeled_predictions(predicted: list[ClonePair], truth: list[GroundTruth]) -> int:
    labeled = {gt.pair_id for gt in truth}
    return sum(1 for p in predicted if pair_id(p.a, p.b) not in labeled)


def precision_recall(m: ConfusionMatrix) -> Metrics:
    precision = m.tp / (m.tp + m.fp) if (m.tp + m.fp) > 0 else None
    recall = m.tp / (m.tp + m.fn) if (m.tp + m.fn) > 0 else None
    return Metrics(precision=precision, recall=recall)


def round_percent(value: float) -> float:
    """One decimal place, half-up, like the published tables."""
    return float(Decimal(repr(value)).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class TypeDistribution:
    counts: dict[str, int]
    percentages: dict[str, float]
    total: int


def type_distribution(truth: list[GroundTruth]) -> TypeDistribution:
    if not truth:
        raise ValueError("type_distribution requires non-empty ground truth")
    counts = {label: 0 for label in LABELS}
    for gt in truth:
        counts[gt.consensus_label] += 1
    total = len(truth)
    percentages = {label: round_percent(100.0 * counts[label] / total) for label in LABELS}
    return TypeDistribution(counts=counts, percentages=percentages, total=total)


@dataclass(frozen=True)
class TimingRun:
    corpus: str
    loc: int
    method_count: int
    detector: str
    seconds: float


def timing_report(runs: list[TimingRun]) -> str:
    """CSV (loc-sorted) for execution-time-vs-size plots."""
    if not runs:
        raise ValueError("timing_report requires at least one run")
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["corpus", "loc", "method_count", "detector", "seconds"])
    for run in sorted(runs, key=lambda r: (r.loc, r.detector, r.corpus)):
        writer.writerow([run.corpus, run.loc, run.method_count, run.detector, f"{run.seconds:.6f}"])
    return buf.getvalue()


__all__ = [
    "LABELS",
    "CLONE_LABELS",
    "pair_id",
    "CandidatePair",
    "LabelRecord",
    "GroundTruth",
    "ConfusionMatrix",
    "Metrics",
    "filter_candidates",
    "sample_pairs",
    "consensus",
    "unresolved_ties",
    "classify_auto",
    "confusion",
    "unlabeled_predictions",
    "precision_recall",
    "round_percent",
    "TypeDistribution",
    "type_distribution",
    "TimingRun",
    "timing_report",
]
