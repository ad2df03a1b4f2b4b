"""Token vocabulary over representation sequences."""

from __future__ import annotations

from dataclasses import dataclass

from ..extractor import RepresentationSequence


class VocabError(Exception):
    pass


@dataclass(frozen=True)
class Vocab:
    tokens: dict[str, int]  # token -> dense id in [0, unk_id)
    counts: dict[str, int]  # corpus frequency, including dropped tokens
    unk_id: int

    @property
    def size(self) -> int:
        return self.unk_id + 1

    def id_of(self, token: str) -> int:
        return self.tokens.get(token, self.unk_id)


def build_vocab(sequences: list[RepresentationSequence], min_count: int = 2) -> Vocab:
    """Ids for tokens with corpus frequency >= min_count; the rest map to unk.

    Ids are assigned by descending frequency (ties lexicographic) so the
    mapping is deterministic for a given corpus.
    """
    if not sequences:
        raise VocabError("no sequences to build a vocabulary from")
    counts: dict[str, int] = {}
    for seq in sequences:
        for tok in seq.tokens:
            counts[tok] = counts.get(tok, 0) + 1
    kept = sorted((t for t, c in counts.items() if c >= min_count), key=lambda t: (-counts[t], t))
    if not kept:
        raise VocabError(f"no token reaches min_count={min_count}; vocabulary is degenerate")
    tokens = {t: i for i, t in enumerate(kept)}
    return Vocab(tokens=tokens, counts=counts, unk_id=len(kept))


def encode_tokens(vocab: Vocab, tokens: tuple[str, ...] | list[str]) -> list[int]:
    return [vocab.id_of(t) for t in tokens]
