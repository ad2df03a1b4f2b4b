"""Token-bag overlap clone detection with bound-based index pruning.

Similarity between two bags is multiset-intersection size divided by the
larger bag size; a pair is a clone when similarity >= theta. The fast path
builds a partial inverted index over each bag's prefix (in a global
rarest-first token order) and prunes candidates with size and positional
bounds before verifying survivors exactly. ``brute_force_detect`` is the
independent O(n^2) oracle.

Thresholds are exact rationals throughout: 0.9 * 10 must require exactly
9 shared tokens, which float arithmetic does not guarantee.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction

from .extractor import TokenBag

# occurrence index packed into the low bits of an element id
_OCC_BITS = 20
_OCC_LIMIT = 1 << _OCC_BITS


@dataclass(frozen=True)
class ClonePair:
    a: str
    b: str
    score: float
    detector: str

    def key(self) -> tuple[str, str]:
        return (self.a, self.b)


def make_pair(x: str, y: str, score: float, detector: str) -> ClonePair:
    if x == y:
        raise ValueError("a clone pair must join two distinct methods")
    a, b = (x, y) if x < y else (y, x)
    return ClonePair(a=a, b=b, score=score, detector=detector)


def as_fraction(theta: float | str | Fraction) -> Fraction:
    # str(float) round-trips the decimal literal the caller wrote
    return theta if isinstance(theta, Fraction) else Fraction(str(theta))


@dataclass(frozen=True)
class DetectorConfig:
    theta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "theta", as_fraction(self.theta))
        if not (0 < self.theta <= 1):
            raise ValueError(f"theta must be in (0, 1], got {self.theta}")


@dataclass
class DetectStats:
    bags: int = 0
    brute_force_comparisons: int = 0
    candidates: int = 0
    verified: int = 0
    pairs: int = 0


def overlap(a: TokenBag, b: TokenBag) -> int:
    """Multiset intersection size: sum of min frequencies."""
    if not a.entries or not b.entries:
        raise ValueError("overlap requires non-empty bags")
    small, large = (a.entries, b.entries) if len(a.entries) <= len(b.entries) else (b.entries, a.entries)
    total = 0
    for tok, freq in small.items():
        other = large.get(tok)
        if other is not None:
            total += freq if freq < other else other
    return total


def similarity(a: TokenBag, b: TokenBag) -> float:
    """overlap / max(|a|, |b|), symmetric in its arguments."""
    if a.size == 0 or b.size == 0:
        raise ValueError("similarity is undefined for empty bags")
    return overlap(a, b) / max(a.size, b.size)


def _ceil_frac(f: Fraction) -> int:
    return -((-f.numerator) // f.denominator)


def required_overlap(size_a: int, size_b: int, theta: float | str | Fraction) -> int:
    """Minimum intersection size for a clone verdict: ceil(theta * max)."""
    if size_a < 1 or size_b < 1:
        raise ValueError("bag sizes must be >= 1")
    t = as_fraction(theta)
    return _ceil_frac(t * max(size_a, size_b))


def prefix_length(size: int, theta: float | str | Fraction) -> int:
    """Tokens of a bag that must be indexed so no qualifying pair is missed."""
    if size < 1:
        raise ValueError("bag size must be >= 1")
    t = as_fraction(theta)
    return size - _ceil_frac(t * size) + 1


def token_order(bags: list[TokenBag]) -> dict[str, int]:
    """Global rank per token: ascending corpus frequency, ties lexicographic."""
    freq: dict[str, int] = {}
    for bag in bags:
        for tok, n in bag.entries.items():
            freq[tok] = freq.get(tok, 0) + n
    ordered = sorted(freq, key=lambda t: (freq[t], t))
    return {tok: rank for rank, tok in enumerate(ordered)}


@dataclass
class _PreparedBag:
    method_id: str
    size: int
    seq: list[int]  # (rank << _OCC_BITS) | occurrence, sorted ascending


def _prepare(bags: list[TokenBag], order: dict[str, int]) -> list[_PreparedBag]:
    prepared = []
    for bag in bags:
        seq: list[int] = []
        for tok in sorted(bag.entries, key=order.__getitem__):
            base = order[tok] << _OCC_BITS
            n = bag.entries[tok]
            if n >= _OCC_LIMIT:
                raise ValueError(f"token frequency {n} exceeds the supported limit")
            seq.extend(base | occ for occ in range(n))
        prepared.append(_PreparedBag(method_id=bag.method_id, size=len(seq), seq=seq))
    prepared.sort(key=lambda p: (p.size, p.method_id))
    return prepared


@dataclass
class PartialIndex:
    """Posting lists over bag prefixes: element -> [(bag index, size, position)].

    Bags are indexed in (size, method_id) order, so every posting list is
    sorted by bag size and by bag index simultaneously.
    """

    theta: Fraction
    bags: list[_PreparedBag]
    postings: dict[int, list[tuple[int, int, int]]] = field(default_factory=dict)

    @property
    def entry_count(self) -> int:
        return sum(len(v) for v in self.postings.values())


def build_index(bags: list[TokenBag], config: DetectorConfig) -> PartialIndex:
    order = token_order(bags)
    prepared = _prepare(bags, order)
    index = PartialIndex(theta=config.theta, bags=prepared)
    postings = index.postings
    for bi, bag in enumerate(prepared):
        if bag.size == 0:
            continue
        for pos in range(prefix_length(bag.size, config.theta)):
            elem = bag.seq[pos]
            postings.setdefault(elem, []).append((bi, bag.size, pos))
    return index


def _merge_overlap(a: list[int], b: list[int], required: int) -> int:
    """Exact overlap of two sorted element sequences, abandoning early
    once the remaining tokens cannot reach ``required``. Returns -1 on
    abandonment."""
    i = j = ov = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        rest = la - i if la - i < lb - j else lb - j
        if ov + rest < required:
            return -1
        x, y = a[i], b[j]
        if x == y:
            ov += 1
            i += 1
            j += 1
        elif x < y:
            i += 1
        else:
            j += 1
    return ov


def detect(bags: list[TokenBag], config: DetectorConfig) -> list[ClonePair]:
    pairs, _ = detect_with_stats(bags, config)
    return pairs


def detect_with_stats(bags: list[TokenBag], config: DetectorConfig) -> tuple[list[ClonePair], DetectStats]:
    """All pairs with similarity >= theta via the partial index.

    Queries run over bags in ascending size order; each query only probes
    postings of smaller (earlier) bags, so every unordered pair is
    considered exactly once.
    """
    stats = DetectStats(bags=len(bags))
    stats.brute_force_comparisons = len(bags) * (len(bags) - 1) // 2
    index = build_index(bags, config)
    prepared = index.bags
    theta = config.theta
    results: list[ClonePair] = []
    postings = index.postings

    for qi, q in enumerate(prepared):
        if q.size == 0:
            continue
        required = _ceil_frac(theta * q.size)  # q is the larger bag of any pair here
        seq = q.seq
        plen = prefix_length(q.size, theta)
        # candidate -> [match count, last query pos, last candidate pos]
        cand: dict[int, list[int]] = {}
        for i in range(plen):
            plist = postings.get(seq[i])
            if not plist:
                continue
            start = bisect_left(plist, required, key=lambda e: e[1])
            for ci, csize, cpos in plist[start:]:
                if ci >= qi:
                    break
                rec = cand.get(ci)
                if rec is None:
                    cand[ci] = [1, i, cpos]
                else:
                    rec[0] += 1
                    rec[1] = i
                    rec[2] = cpos
        stats.candidates += len(cand)
        for ci, (count, qpos, cpos) in cand.items():
            c = prepared[ci]
            # positional upper bound over the unseen suffixes
            bound = count + min(q.size - qpos - 1, c.size - cpos - 1)
            if bound < required:
                continue
            stats.verified += 1
            ov = _merge_overlap(seq, c.seq, required)
            if ov >= required:
                results.append(
                    make_pair(q.method_id, c.method_id, ov / q.size, "Overlap")
                )
    stats.pairs = len(results)
    results.sort(key=ClonePair.key)
    return results, stats


def brute_force_detect(bags: list[TokenBag], config: DetectorConfig) -> list[ClonePair]:
    """Direct pairwise computation; the correctness oracle for ``detect``."""
    theta = config.theta
    num, den = theta.numerator, theta.denominator
    results: list[ClonePair] = []
    n = len(bags)
    for i in range(n):
        a = bags[i]
        if a.size == 0:
            continue
        for j in range(i + 1, n):
            b = bags[j]
            if b.size == 0:
                continue
            ov = overlap(a, b)
            larger = max(a.size, b.size)
            if ov * den >= num * larger:  # ov / larger >= theta, exactly
                results.append(make_pair(a.method_id, b.method_id, ov / larger, "Overlap"))
    results.sort(key=ClonePair.key)
    return results
