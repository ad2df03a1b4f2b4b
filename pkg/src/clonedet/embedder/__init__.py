from .vocab import Vocab, VocabError, build_vocab, encode_tokens
from .rnnlm import EmbeddingTable, RnnConfig, train_word_embeddings
from .rae import RaeConfig, RaeModel, encode_sequence, init_rae, train_rae
from .distance import (
    SentenceEmbedding,
    calibrate_delta,
    combine,
    detect_by_distance,
    encode_corpus,
    encode_method,
)

__all__ = [
    "Vocab",
    "VocabError",
    "build_vocab",
    "encode_tokens",
    "EmbeddingTable",
    "RnnConfig",
    "train_word_embeddings",
    "RaeConfig",
    "RaeModel",
    "encode_sequence",
    "init_rae",
    "train_rae",
    "SentenceEmbedding",
    "calibrate_delta",
    "combine",
    "detect_by_distance",
    "encode_corpus",
    "encode_method",
]
