"""Word embeddings from a next-token recurrent predictor.

A deliberately small Elman network trained with plain SGD: enough to give
each vocabulary token a distributed representation shaped by its contexts.
The input embedding matrix is the deliverable; the rest of the network is
discarded after training.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..extractor import RepresentationSequence
from .vocab import Vocab, encode_tokens

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RnnConfig:
    dim: int = 50
    epochs: int = 20
    lr: float = 0.01
    lr_decay: float = 0.1  # lr_e = lr / (1 + lr_decay * epoch)
    clip: float = 5.0
    max_len: int = 400
    seed: int = 0

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("embedding dim must be >= 2")


@dataclass(frozen=True)
class EmbeddingTable:
    dim: int
    vectors: np.ndarray  # (vocab size, dim)

    def vector(self, token_id: int) -> np.ndarray:
        return self.vectors[token_id]


def _init_params(vocab_size: int, dim: int, seed: int) -> dict[str, np.ndarray]:
    rng = np.random.default_rng(seed)
    scale = 0.1
    return {
        "E": rng.uniform(-scale, scale, (vocab_size, dim)),
        "Wxh": rng.uniform(-scale, scale, (dim, dim)),
        "Whh": rng.uniform(-scale, scale, (dim, dim)),
        "bh": np.zeros(dim),
        "Who": rng.uniform(-scale, scale, (dim, vocab_size)),
        "bo": np.zeros(vocab_size),
    }


def _sequence_loss_and_grads(ids: list[int], p: dict[str, np.ndarray]):
    """Mean next-token cross-entropy and parameter gradients (full BPTT)."""
    xs = np.asarray(ids[:-1])
    ys = np.asarray(ids[1:])
    steps = len(xs)
    dim = p["E"].shape[1]

    ex = p["E"][xs]  # (T, dim)
    hs = np.empty((steps, dim))
    h = np.zeros(dim)
    for t in range(steps):
        h = np.tanh(ex[t] @ p["Wxh"] + h @ p["Whh"] + p["bh"])
        hs[t] = h

    logits = hs @ p["Who"] + p["bo"]
    logits -= logits.max(axis=1, keepdims=True)
    expz = np.exp(logits)
    probs = expz / expz.sum(axis=1, keepdims=True)
    loss = -np.log(np.maximum(probs[np.arange(steps), ys], 1e-300)).mean()

    dz = probs
    dz[np.arange(steps), ys] -= 1.0
    dz /= steps
    grads = {
        "Who": hs.T @ dz,
        "bo": dz.sum(axis=0),
        "E": np.zeros_like(p["E"]),
        "Wxh": np.zeros_like(p["Wxh"]),
        "Whh": np.zeros_like(p["Whh"]),
        "bh": np.zeros_like(p["bh"]),
    }
    dh_chain = np.zeros(dim)
    dhs = dz @ p["Who"].T
    for t in range(steps - 1, -1, -1):
        dh = dhs[t] + dh_chain
        da = dh * (1.0 - hs[t] * hs[t])
        grads["Wxh"] += np.outer(ex[t], da)
        h_prev = hs[t - 1] if t > 0 else np.zeros(dim)
        grads["Whh"] += np.outer(h_prev, da)
        grads["bh"] += da
        grads["E"][xs[t]] += da @ p["Wxh"].T
        dh_chain = da @ p["Whh"].T
    return loss, grads


def _clip(grads: dict[str, np.ndarray], limit: float) -> None:
    total = np.sqrt(sum(float((g * g).sum()) for g in grads.values()))
    if total > limit:
        factor = limit / total
        for g in grads.values():
            g *= factor


def train_word_embeddings(
    sequences: list[RepresentationSequence],
    vocab: Vocab,
    config: RnnConfig = RnnConfig(),
) -> tuple[EmbeddingTable, list[float]]:
    """Train the predictor; returns the embedding table and per-epoch losses.

    Deterministic for a given seed. epochs=0 returns the seeded random
    initialization untouched.
    """
    params = _init_params(vocab.size, config.dim, config.seed)
    encoded = []
    for seq in sequences:
        ids = encode_tokens(vocab, seq.tokens)
        if len(ids) > config.max_len:
            log.warning(
                "sequence for %s truncated from %d to %d tokens",
                seq.method_id, len(ids), config.max_len,
            )
            ids = ids[: config.max_len]
        if len(ids) >= 2:
            encoded.append(ids)

    epoch_losses: list[float] = []
    for epoch in range(config.epochs):
        lr = config.lr / (1.0 + config.lr_decay * epoch)
        losses = []
        for ids in encoded:
            loss, grads = _sequence_loss_and_grads(ids, params)
            if not np.isfinite(loss):
                raise ArithmeticError(f"non-finite training loss at epoch {epoch}")
            _clip(grads, config.clip)
            for name, g in grads.items():
                params[name] -= lr * g
            losses.append(loss)
        epoch_losses.append(float(np.mean(losses)) if losses else 0.0)
    return EmbeddingTable(dim=config.dim, vectors=params["E"]), epoch_losses
