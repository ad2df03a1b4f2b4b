"""Sentence embeddings, euclidean-distance clone pairs, and set union."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass

import numpy as np

from ..detector import ClonePair, make_pair
from ..extractor import RepresentationSequence
from .rae import RaeModel, encode_sequence
from .rnnlm import EmbeddingTable
from .vocab import Vocab, encode_tokens

log = logging.getLogger(__name__)

_KIND_TAGS = {"identifier": "Identifier", "ast": "AST"}


@dataclass(frozen=True)
class SentenceEmbedding:
    method_id: str
    kind: str
    vector: np.ndarray


def encode_method(
    seq: RepresentationSequence, table: EmbeddingTable, vocab: Vocab, model: RaeModel
) -> SentenceEmbedding:
    if not seq.tokens:
        raise ValueError(f"method {seq.method_id} has an empty {seq.kind} sequence")
    ids = encode_tokens(vocab, seq.tokens)
    vectors = table.vectors[ids]
    return SentenceEmbedding(
        method_id=seq.method_id, kind=seq.kind, vector=encode_sequence(vectors, model)
    )


def encode_corpus(
    sequences: list[RepresentationSequence],
    table: EmbeddingTable,
    vocab: Vocab,
    model: RaeModel,
    max_len: int = 400,
) -> tuple[list[SentenceEmbedding], list[str]]:
    """Embed every sequence; empty ones are reported, not fatal."""
    out: list[SentenceEmbedding] = []
    errors: list[str] = []
    for seq in sequences:
        if not seq.tokens:
            errors.append(seq.method_id)
            log.warning("method %s skipped: empty %s sequence", seq.method_id, seq.kind)
            continue
        tokens = seq.tokens[:max_len]
        if len(seq.tokens) > max_len:
            log.warning("method %s %s sequence truncated to %d", seq.method_id, seq.kind, max_len)
        ids = encode_tokens(vocab, tokens)
        vectors = table.vectors[ids]
        out.append(
            SentenceEmbedding(method_id=seq.method_id, kind=seq.kind, vector=encode_sequence(vectors, model))
        )
    return out, errors


def detect_by_distance(embeddings: list[SentenceEmbedding], delta: float) -> list[ClonePair]:
    """All pairs at euclidean distance <= delta, canonicalized."""
    if delta < 0:
        raise ValueError("delta must be >= 0")
    kinds = {e.kind for e in embeddings}
    if len(kinds) > 1:
        raise ValueError(f"embeddings mix representation kinds: {sorted(kinds)}")
    if not embeddings:
        return []
    tag = _KIND_TAGS.get(next(iter(kinds)), next(iter(kinds)))
    matrix = np.stack([e.vector for e in embeddings])
    ids = [e.method_id for e in embeddings]
    pairs: list[ClonePair] = []
    for i in range(len(ids) - 1):
        # direct subtraction keeps d(x, x) exactly zero
        d = np.sqrt(((matrix[i + 1 :] - matrix[i]) ** 2).sum(axis=1))
        for off in np.nonzero(d <= delta)[0]:
            j = i + 1 + int(off)
            pairs.append(make_pair(ids[i], ids[j], float(d[off]), tag))
    pairs.sort(key=ClonePair.key)
    return pairs


def combine(pairs_identifier: list[ClonePair], pairs_ast: list[ClonePair]) -> list[ClonePair]:
    """Set union of the two pair sets, tagged Combination.

    A pair found by both keeps its smaller distance.
    """
    merged: dict[tuple[str, str], ClonePair] = {}
    for p in list(pairs_identifier) + list(pairs_ast):
        key = p.key()
        prev = merged.get(key)
        if prev is None or p.score < prev.score:
            merged[key] = ClonePair(a=p.a, b=p.b, score=p.score, detector="Combination")
    return sorted(merged.values(), key=ClonePair.key)


def calibrate_delta(
    embeddings: list[SentenceEmbedding],
    closest_fraction: float = 0.01,
    max_sample_pairs: int = 200_000,
    seed: int = 0,
) -> float:
    """Distance that marks the closest ``closest_fraction`` of sampled pairs."""
    n = len(embeddings)
    if n < 2:
        raise ValueError("need at least two embeddings to calibrate a threshold")
    if not (0 < closest_fraction <= 1):
        raise ValueError("closest_fraction must be in (0, 1]")
    total = n * (n - 1) // 2
    rng = random.Random(seed)
    if total <= max_sample_pairs:
        idx_pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    else:
        seen = set()
        while len(seen) < max_sample_pairs:
            i = rng.randrange(n)
            j = rng.randrange(n)
            if i != j:
                seen.add((min(i, j), max(i, j)))
        idx_pairs = sorted(seen)
    matrix = np.stack([e.vector for e in embeddings])
    ii = np.fromiter((p[0] for p in idx_pairs), dtype=int)
    jj = np.fromiter((p[1] for p in idx_pairs), dtype=int)
    dists = np.sqrt(((matrix[ii] - matrix[jj]) ** 2).sum(axis=1))
    dists.sort()
    k = max(1, int(round(closest_fraction * len(dists)))) - 1
    return float(dists[k])
