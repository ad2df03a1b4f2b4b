"""Method-level clone detection for Scala codebases.

Two detectors over extracted methods: bag-of-tokens overlap with a pruned
partial index, and euclidean-distance matching of recursive-autoencoder
sentence embeddings over identifier/AST sequences. Plus the evaluation
harness (filtering, human labeling with consensus, confusion matrices,
precision/recall, type distributions, timing) used to compare them.
"""

__version__ = "0.1.0"
