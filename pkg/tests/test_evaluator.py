import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clonedet.detector import DetectorConfig, brute_force_detect, detect, make_pair
from clonedet.evaluator import (
    LABELS,
    ConfusionMatrix,
    GroundTruth,
    LabelRecord,
    TimingRun,
    classify_auto,
    confusion,
    consensus,
    filter_candidates,
    pair_id,
    precision_recall,
    round_percent,
    sample_pairs,
    timing_report,
    type_distribution,
    unlabeled_predictions,
    unresolved_ties,
)
from clonedet.extractor import SourceFile, extract_methods, tokenize
from clonedet.lexer import count_effective_lines
from clonedet.synth import random_bags


def rec(pid, rater, label):
    return LabelRecord(pair_id=pid, rater=rater, label=label)


def truth_of(pid, label, n=2):
    return GroundTruth(pair_id=pid, consensus_label=label, supporting_raters=n)


class TestFilterCandidates:
    def test_nothing_above_threshold(self):
        bags = random_bags(20, seed=1, clone_fraction=0.0, min_size=30, max_size=60)
        # fully disjoint vocabularies would be better, but a high bar works:
        candidates = filter_candidates(bags, "0.999")
        for c in candidates:
            assert c.filter_score >= 0.999

    def test_identical_corpus_all_pairs(self):
        from clonedet.extractor import TokenBag

        bags = [TokenBag(f"m{i}", {"x": 3, "y": 2}, 5) for i in range(5)]
        candidates = filter_candidates(bags, "0.7")
        assert len(candidates) == 10

    def test_equals_brute_force_at_070(self):
        bags = random_bags(300, seed=9)
        got = {(c.a, c.b) for c in filter_candidates(bags, "0.7")}
        expected = {p.key() for p in brute_force_detect(bags, DetectorConfig(theta="0.7"))}
        assert got == expected

    def test_scores_carried(self):
        bags = random_bags(100, seed=2)
        for c in filter_candidates(bags, "0.7"):
            assert 0.7 <= c.filter_score <= 1.0


class TestSamplePairs:
    def _pairs(self, n):
        return filter_candidates(random_bags(n, seed=4), "0.7")

    def test_full_set_when_n_equals_size(self):
        pairs = self._pairs(60)
        assert sample_pairs(pairs, len(pairs), seed=1) == sorted(pairs, key=lambda p: p.id)

    def test_zero(self):
        assert sample_pairs(self._pairs(60), 0, seed=1) == []

    def test_deterministic(self):
        pairs = self._pairs(80)
        n = min(5, len(pairs))
        assert sample_pairs(pairs, n, seed=7) == sample_pairs(pairs, n, seed=7)

    def test_oversample_returns_all(self):
        pairs = self._pairs(60)
        assert len(sample_pairs(pairs, len(pairs) + 50, seed=1)) == len(pairs)


class TestConsensus:
    def test_two_agreeing(self):
        got = consensus([rec("p", "r1", "Type3"), rec("p", "r2", "Type3")])
        assert got == [GroundTruth("p", "Type3", 2)]

    def test_single_disagreement_no_consensus(self):
        assert consensus([rec("p", "r1", "Type3"), rec("p", "r2", "NotClone")]) == []

    def test_tie_at_two_excluded(self):
        records = [
            rec("p", "r1", "Type3"),
            rec("p", "r2", "Type3"),
            rec("p", "r3", "NotClone"),
            rec("p", "r4", "NotClone"),
        ]
        assert consensus(records) == []
        assert unresolved_ties(records) == 1

    def test_plurality_with_two_supporters_wins(self):
        records = [
            rec("p", "r1", "Type2"),
            rec("p", "r2", "Type2"),
            rec("p", "r3", "NotClone"),
        ]
        assert consensus(records) == [GroundTruth("p", "Type2", 2)]

    def test_resubmission_overwrites(self):
        records = [
            rec("p", "r1", "Type1"),
            rec("p", "r2", "Type3"),
            rec("p", "r1", "Type3"),
        ]
        assert consensus(records) == [GroundTruth("p", "Type3", 2)]

    def test_single_rater_never_enough(self):
        assert consensus([rec("p", "r1", "Type1")]) == []

    def test_invalid_label_rejected(self):
        with pytest.raises(ValueError):
            rec("p", "r1", "Type5")

    @settings(max_examples=120, deadline=None)
    @given(
        votes=st.lists(
            st.tuples(
                st.integers(0, 8),  # pair
                st.integers(0, 6),  # rater
                st.sampled_from(LABELS),
            ),
            max_size=60,
        )
    )
    def test_strict_plurality_property(self, votes):
        records = [rec(f"p{p}", f"r{r}", label) for p, r, label in votes]
        got = {t.pair_id: t for t in consensus(records)}
        # independent recount: last vote per (pair, rater) wins
        final: dict[tuple[str, str], str] = {}
        for p, r, label in votes:
            final[(f"p{p}", f"r{r}")] = label
        by_pair: dict[str, dict[str, int]] = {}
        for (pid, _), label in final.items():
            by_pair.setdefault(pid, {})
            by_pair[pid][label] = by_pair[pid].get(label, 0) + 1
        for pid, counts in by_pair.items():
            ranked = sorted(counts.values(), reverse=True)
            strict_winner = ranked[0] >= 2 and (len(ranked) == 1 or ranked[1] < ranked[0])
            assert (pid in got) == strict_winner
            if strict_winner:
                winner = max(counts, key=lambda k: counts[k])
                assert got[pid].consensus_label == winner
                assert got[pid].supporting_raters == counts[winner] >= 2


class TestClassifyAuto:
    def _method(self, content, path):
        sf = SourceFile(path=path, content=content, loc=count_effective_lines(content))
        return extract_methods(sf, min_lines=1)[0]

    BASE = "def f(a: Int): Int = {\n  val b = a * 2\n  b + 1\n}"

    def test_comment_copy_is_type1(self):
        copy = "def f(a: Int): Int = { // doc\n  val b = a * 2\n  /* x */ b + 1\n}"
        a = self._method(self.BASE, "A.scala")
        b = self._method(copy, "B.scala")
        assert classify_auto(a, b) == "Type1"

    def test_renamed_copy_is_type2(self):
        renamed = "def g(z: Int): Int = {\n  val w = z * 9\n  w + 7\n}"
        assert classify_auto(self._method(self.BASE, "A.scala"), self._method(renamed, "B.scala")) == "Type2"

    def test_statement_deletion_is_unknown(self):
        shorter = "def f(a: Int): Int = {\n  a + 1\n}"
        assert classify_auto(self._method(self.BASE, "A.scala"), self._method(shorter, "B.scala")) == "Unknown"

    def test_type1_implies_similarity_one(self):
        copy = "def f(a: Int): Int = {\n  // pad\n  val b = a * 2\n  b + 1\n}"
        a = self._method(self.BASE, "A.scala")
        b = self._method(copy, "B.scala")
        assert classify_auto(a, b) == "Type1"
        from clonedet.detector import similarity

        assert similarity(tokenize(a), tokenize(b)) == 1.0

    def test_consistent_renaming_strict_mode(self):
        # 'a' maps to both 'z' and 'w': blind renaming accepts, bijective rejects
        swapped = "def f(a: Int): Int = {\n  val a = a * 2\n  a + 1\n}"
        a = self._method(self.BASE, "A.scala")
        b = self._method(swapped, "B.scala")
        assert classify_auto(a, b) == "Type2"
        assert classify_auto(a, b, consistent_renaming=True) == "Unknown"


class TestConfusion:
    def _truth_set(self, positives, negatives):
        out = [truth_of(f"pos{i}", "Type3") for i in range(positives)]
        out += [truth_of(f"neg{i}", "NotClone") for i in range(negatives)]
        return out

    def test_published_open_source_row(self):
        """247 true positives, 1 false positive, 616 misses, 136 rejections."""
        truth = self._truth_set(863, 137)
        predicted = [make_pair(f"pos{i}", f"pos{i}_peer", 1.0, "Overlap") for i in range(247)]
        predicted += [make_pair("neg0", "neg0_peer", 1.0, "Overlap")]
        # pair ids in truth refer to the canonical pair key
        truth = [
            truth_of(pair_id(f"pos{i}", f"pos{i}_peer"), "Type3") for i in range(863)
        ] + [truth_of(pair_id(f"neg{i}", f"neg{i}_peer"), "NotClone") for i in range(137)]
        m = confusion(predicted, truth)
        assert (m.tp, m.fp, m.fn, m.tn) == (247, 1, 616, 136)

    def test_empty_predictions(self):
        truth = self._truth_set(5, 3)
        m = confusion([], truth)
        assert (m.tp, m.fp, m.fn, m.tn) == (0, 0, 5, 3)

    def test_exact_positive_predictions(self):
        truth = [truth_of(pair_id(f"a{i}", f"b{i}"), "Type1") for i in range(4)]
        truth += [truth_of(pair_id(f"c{i}", f"d{i}"), "NotClone") for i in range(3)]
        predicted = [make_pair(f"a{i}", f"b{i}", 1.0, "Overlap") for i in range(4)]
        m = confusion(predicted, truth)
        assert m.fp == 0 and m.fn == 0 and m.tp == 4 and m.tn == 3

    def test_unlabeled_predictions_ignored_but_counted(self):
        truth = [truth_of(pair_id("a", "b"), "Type1")]
        predicted = [make_pair("a", "b", 1.0, "Overlap"), make_pair("x", "y", 1.0, "Overlap")]
        m = confusion(predicted, truth)
        assert m.total == 1
        assert unlabeled_predictions(predicted, truth) == 1

    def test_conservation(self):
        truth = self._truth_set(11, 7)
        m = confusion([], truth)
        assert m.total == 18

    def test_empty_truth_rejected(self):
        with pytest.raises(ValueError):
            confusion([], [])


PUBLISHED_METRICS = [
    # (tp, fp, fn, tn, precision %, recall %)
    (247, 1, 616, 136, 99.6, 28.6),  # overlap detector, open source
    (57, 1, 806, 136, 98.3, 6.6),  # identifier embeddings, open source
    (117, 6, 746, 131, 95.1, 13.6),  # ast embeddings, open source
    (139, 7, 724, 130, 95.2, 16.1),  # combination, open source
    (35, 10, 28, 128, 77.8, 55.6),  # overlap detector, industrial
    (13, 2, 50, 136, 86.7, 20.6),  # identifier embeddings, industrial
    (29, 16, 34, 122, 64.4, 46.0),  # ast embeddings, industrial
    (30, 16, 33, 122, 65.2, 47.6),  # combination, industrial
]


class TestPrecisionRecall:
    @pytest.mark.parametrize("tp,fp,fn,tn,precision,recall", PUBLISHED_METRICS)
    def test_published_values(self, tp, fp, fn, tn, precision, recall):
        m = precision_recall(ConfusionMatrix(tp=tp, fp=fp, fn=fn, tn=tn))
        assert abs(100 * m.precision - precision) <= 0.05
        assert abs(100 * m.recall - recall) <= 0.05

    def test_undefined_precision(self):
        m = precision_recall(ConfusionMatrix(tp=0, fp=0, fn=3, tn=2))
        assert m.precision is None and m.recall == 0.0

    def test_undefined_recall(self):
        m = precision_recall(ConfusionMatrix(tp=0, fp=2, fn=0, tn=2))
        assert m.recall is None and m.precision == 0.0

    @given(
        tp=st.integers(0, 500), fp=st.integers(0, 500),
        fn=st.integers(0, 500), tn=st.integers(0, 500),
    )
    def test_bounds(self, tp, fp, fn, tn):
        m = precision_recall(ConfusionMatrix(tp=tp, fp=fp, fn=fn, tn=tn))
        if m.precision is not None:
            assert 0.0 <= m.precision <= 1.0
        if m.recall is not None:
            assert 0.0 <= m.recall <= 1.0


class TestTypeDistribution:
    def _truth(self, counts):
        out = []
        for label, count in zip(LABELS, counts):
            out.extend(truth_of(f"{label}_{i}", label) for i in range(count))
        return out

    def test_published_open_source_distribution(self):
        dist = type_distribution(self._truth([53, 118, 641, 51, 137]))
        assert dist.total == 1000
        expected = {"Type1": 5.3, "Type2": 11.8, "Type3": 64.1, "Type4": 5.1, "NotClone": 13.7}
        for label, pct in expected.items():
            assert abs(dist.percentages[label] - pct) <= 0.05

    def test_published_industrial_distribution(self):
        dist = type_distribution(self._truth([11, 15, 28, 9, 138]))
        assert dist.total == 201
        expected = {"Type1": 5.5, "Type2": 7.5, "Type3": 13.9, "Type4": 4.5, "NotClone": 68.7}
        for label, pct in expected.items():
            assert abs(dist.percentages[label] - pct) <= 0.05

    def test_single_label(self):
        dist = type_distribution(self._truth([1, 0, 0, 0, 0]))
        assert dist.percentages == {"Type1": 100.0, "Type2": 0.0, "Type3": 0.0, "Type4": 0.0, "NotClone": 0.0}

    @given(counts=st.lists(st.integers(0, 300), min_size=5, max_size=5).filter(lambda c: sum(c) > 0))
    def test_percentages_sum_to_hundred(self, counts):
        from decimal import Decimal

        dist = type_distribution(self._truth(counts))
        total = sum(Decimal(repr(p)) for p in dist.percentages.values())
        assert abs(total - 100) <= Decimal("0.2")

    def test_rounding_is_half_up(self):
        assert round_percent(13.25) == 13.3
        assert round_percent(5.45) == 5.5


class TestThresholdMonotonicity:
    def test_raising_theta_never_hurts_fp_or_helps_fn(self):
        bags = random_bags(120, seed=44)
        pairs_by_theta = {
            theta: detect(bags, DetectorConfig(theta=theta))
            for theta in ("0.7", "0.8", "0.9", "1.0")
        }
        base_pairs = pairs_by_theta["0.7"]
        # fixed truth: half the 0.7-pairs are clones, half are not
        truth = []
        for i, p in enumerate(base_pairs):
            label = "Type3" if i % 2 == 0 else "NotClone"
            truth.append(truth_of(pair_id(p.a, p.b), label))
        if not truth:
            pytest.skip("corpus produced no candidate pairs")
        prev_fp, prev_fn = None, None
        for theta in ("0.7", "0.8", "0.9", "1.0"):
            m = confusion(pairs_by_theta[theta], truth)
            if prev_fp is not None:
                assert m.fp <= prev_fp
                assert m.fn >= prev_fn
            prev_fp, prev_fn = m.fp, m.fn


class TestTimingReport:
    def test_single_run(self):
        csv_text = timing_report([TimingRun("c", 100, 10, "Overlap", 1.5)])
        lines = csv_text.strip().splitlines()
        assert lines[0] == "corpus,loc,method_count,detector,seconds"
        assert len(lines) == 2

    def test_rows_sorted_by_loc(self):
        runs = [
            TimingRun("big", 300, 30, "Overlap", 3.0),
            TimingRun("small", 100, 10, "Overlap", 1.0),
            TimingRun("mid", 200, 20, "Overlap", 2.0),
        ]
        lines = timing_report(runs).strip().splitlines()[1:]
        locs = [int(line.split(",")[1]) for line in lines]
        assert locs == sorted(locs)

    def test_twenty_corpus_sweep_row_count(self):
        runs = [TimingRun(f"c{i}", 100 * (i + 1), 10, "Overlap", float(i)) for i in range(20)]
        assert len(timing_report(runs).strip().splitlines()) == 21

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            timing_report([])
