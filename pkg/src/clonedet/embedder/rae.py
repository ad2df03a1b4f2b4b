"""Greedy recursive autoencoder over word-vector sequences.

Adjacent vector pairs are repeatedly merged; each merge encodes the pair
into one parent vector through a tanh layer and scores itself by how well
a linear decoder reconstructs the two children. The pair with the lowest
reconstruction error is merged first, and the surviving root vector is the
method's sentence embedding.

Training minimizes the summed reconstruction error of all merges by SGD.
Gradients are exact for a fixed merge structure (the structure is
re-derived greedily before each step), which is what the finite-difference
tests check.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RaeConfig:
    epochs: int = 20
    lr: float = 0.01
    lr_decay: float = 0.1
    seed: int = 0
    max_len: int = 400


@dataclass
class RaeModel:
    dim: int
    We: np.ndarray  # (dim, 2*dim)
    be: np.ndarray  # (dim,)
    Wd: np.ndarray  # (2*dim, dim)
    bd: np.ndarray  # (2*dim,)

    def params(self) -> dict[str, np.ndarray]:
        return {"We": self.We, "be": self.be, "Wd": self.Wd, "bd": self.bd}


def init_rae(dim: int, seed: int = 0) -> RaeModel:
    rng = np.random.default_rng(seed)
    scale = 1.0 / np.sqrt(2 * dim)
    return RaeModel(
        dim=dim,
        We=rng.uniform(-scale, scale, (dim, 2 * dim)),
        be=np.zeros(dim),
        Wd=rng.uniform(-scale, scale, (2 * dim, dim)),
        bd=np.zeros(2 * dim),
    )


def _pair_errors(work: np.ndarray, model: RaeModel):
    """Reconstruction error of every adjacent pair in the working sequence."""
    c = np.concatenate([work[:-1], work[1:]], axis=1)  # (m-1, 2d)
    p = np.tanh(c @ model.We.T + model.be)
    r = p @ model.Wd.T + model.bd
    err = ((r - c) ** 2).sum(axis=1)
    return c, p, r, err


def greedy_steps(vectors: np.ndarray, model: RaeModel) -> list[int]:
    """Merge positions chosen greedily (ties -> leftmost), lowest error first."""
    work = np.array(vectors, dtype=float)
    steps: list[int] = []
    while len(work) > 1:
        _, p, _, err = _pair_errors(work, model)
        k = int(np.argmin(err))
        steps.append(k)
        work = np.concatenate([work[:k], p[k : k + 1], work[k + 2 :]], axis=0)
    return steps


def _replay(vectors: np.ndarray, model: RaeModel, steps: list[int]):
    """Run the fixed merge structure, recording per-merge state for backprop."""
    nodes_v: list[np.ndarray] = [np.asarray(v, dtype=float) for v in vectors]
    work = list(range(len(nodes_v)))
    merges = []  # (node id, left child id, right child id, c, p, r)
    loss = 0.0
    for k in steps:
        li, ri = work[k], work[k + 1]
        c = np.concatenate([nodes_v[li], nodes_v[ri]])
        p = np.tanh(model.We @ c + model.be)
        r = model.Wd @ p + model.bd
        loss += float(((r - c) ** 2).sum())
        node = len(nodes_v)
        nodes_v.append(p)
        merges.append((node, li, ri, c, p, r))
        work[k : k + 2] = [node]
    return loss, nodes_v, merges, work[0]


def reconstruction_loss(vectors: np.ndarray, model: RaeModel, steps: list[int]) -> float:
    loss, _, _, _ = _replay(vectors, model, steps)
    return loss


def loss_and_grads(
    vectors: np.ndarray, model: RaeModel, steps: list[int]
) -> tuple[float, dict[str, np.ndarray]]:
    """Summed reconstruction error and exact parameter gradients for a fixed
    merge structure."""
    dim = model.dim
    loss, nodes_v, merges, _root = _replay(vectors, model, steps)
    grads = {
        "We": np.zeros_like(model.We),
        "be": np.zeros_like(model.be),
        "Wd": np.zeros_like(model.Wd),
        "bd": np.zeros_like(model.bd),
    }
    gvec: dict[int, np.ndarray] = {}
    # children are always created before their parent, so reverse creation
    # order is a valid reverse-topological order
    for node, li, ri, c, p, r in reversed(merges):
        dp = gvec.pop(node, np.zeros(dim)).copy()
        dr = 2.0 * (r - c)
        grads["Wd"] += np.outer(dr, p)
        grads["bd"] += dr
        dp += model.Wd.T @ dr
        da = dp * (1.0 - p * p)
        grads["We"] += np.outer(da, c)
        grads["be"] += da
        dc = model.We.T @ da - dr  # chain through the encoder plus -2(r-c)
        for child, grad_part in ((li, dc[:dim]), (ri, dc[dim:])):
            if child in gvec:
                gvec[child] += grad_part
            else:
                gvec[child] = grad_part.copy()
    return loss, grads


def encode_sequence(vectors: np.ndarray, model: RaeModel) -> np.ndarray:
    """Root vector of the greedy merge tree; a length-1 sequence is its own
    embedding."""
    vectors = np.asarray(vectors, dtype=float)
    if len(vectors) == 0:
        raise ValueError("cannot encode an empty sequence")
    if len(vectors) == 1:
        return vectors[0].copy()
    steps = greedy_steps(vectors, model)
    _, nodes_v, _, root = _replay(vectors, model, steps)
    return nodes_v[root]


def train_rae(
    sequences: list[np.ndarray],
    model: RaeModel,
    config: RaeConfig = RaeConfig(),
) -> tuple[RaeModel, list[float]]:
    """SGD over per-sequence summed reconstruction error.

    Returns the trained model and the mean loss per epoch, including a
    leading entry for the untrained model so progress is visible.
    """
    usable = []
    for seq in sequences:
        seq = np.asarray(seq, dtype=float)
        if len(seq) == 0:
            log.warning("skipping empty sequence during autoencoder training")
            continue
        if len(seq) > config.max_len:
            log.warning("sequence truncated from %d to %d vectors", len(seq), config.max_len)
            seq = seq[: config.max_len]
        if len(seq) >= 2:
            usable.append(seq)

    def mean_loss() -> float:
        if not usable:
            return 0.0
        totals = [
            reconstruction_loss(seq, model, greedy_steps(seq, model)) for seq in usable
        ]
        return float(np.mean(totals))

    epoch_losses = [mean_loss()]
    for epoch in range(config.epochs):
        lr = config.lr / (1.0 + config.lr_decay * epoch)
        losses = []
        for seq in usable:
            steps = greedy_steps(seq, model)
            loss, grads = loss_and_grads(seq, model, steps)
            if not np.isfinite(loss):
                raise ArithmeticError(f"non-finite autoencoder loss at epoch {epoch}")
            model.We -= lr * grads["We"]
            model.be -= lr * grads["be"]
            model.Wd -= lr * grads["Wd"]
            model.bd -= lr * grads["bd"]
            losses.append(loss)
        epoch_losses.append(float(np.mean(losses)) if losses else 0.0)
    return model, epoch_losses
