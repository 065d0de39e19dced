import numpy as np
import pytest

import oracles
from lexclass import (EmptyDataError, LatentClassModel, NounPairSample, NounSample,
                      Vocabulary, label_intransitive, label_many, label_transitive,
                      make_entry)

# Hand-derived one-step fixture: two classes, nouns x/y with frozen
# per-class probabilities 0.9/0.1 and 0.2/0.8, sample f(x)=3, f(y)=1.
# One step from uniform weights gives (0.725, 0.275); the oracle agrees
# (tests/oracles.py label_step -> 0.7250000000000001, 0.275).
HAND_STEP = (0.725, 0.275)


@pytest.fixture
def slot_model():
    # The fixture wants p(x|c0)=0.9, p(x|c1)=0.1, p(y|c0)=0.2, p(y|c1)=0.8.
    # Those rows don't normalize, so scale both by 1/1.1 and pad class 1 with
    # a never-sampled noun z: a common per-noun scale cancels in every
    # posterior, leaving the labeling arithmetic exactly as written.
    vocab = Vocabulary(["u.as:s", "w.as:s"], ["x", "y", "z"])
    return LatentClassModel(vocab, [0.5, 0.5],
                            [[0.5, 0.5], [0.5, 0.5]],
                            [[0.9 / 1.1, 0.2 / 1.1, 0.0],
                             [0.1 / 1.1, 0.8 / 1.1, 0.2 / 1.1]])


@pytest.fixture
def slot_sample():
    return NounSample("wobble", {"x": 3.0, "y": 1.0})


class TestLabelIntransitive:
    def test_single_class(self):
        vocab = Vocabulary(["u.as:s"], ["x", "y"])
        model = LatentClassModel(vocab, [1.0], [[1.0]], [[0.5, 0.5]])
        labeling = label_intransitive(model, NounSample("v", {"x": 2.0}), iterations=7)
        assert labeling.weights.tolist() == [1.0]

    def test_zero_support_class_dies_in_one_step(self):
        vocab = Vocabulary(["u.as:s"], ["x", "y"])
        model = LatentClassModel(vocab, [0.5, 0.5], [[1.0], [1.0]],
                                 [[0.5, 0.5], [1.0, 0.0]])
        labeling = label_intransitive(model, NounSample("v", {"y": 4.0}),
                                      iterations=1)
        assert labeling.weights.tolist() == [1.0, 0.0]

    def test_hand_derived_one_step(self, slot_model, slot_sample):
        labeling = label_intransitive(slot_model, slot_sample, iterations=1)
        np.testing.assert_allclose(labeling.weights, HAND_STEP, atol=1e-12)

    def test_matches_oracle_many_steps(self, slot_model, slot_sample):
        weights = [0.5, 0.5]
        probs = [[0.9, 0.2], [0.1, 0.8]]
        sample = {0: 3.0, 1: 1.0}
        for _ in range(5):
            weights = oracles.label_step(weights, probs, sample)
        labeling = label_intransitive(slot_model, slot_sample, iterations=5)
        np.testing.assert_allclose(labeling.weights, weights, atol=1e-12)

    def test_trace_monotone_and_normalized(self, slot_model, slot_sample):
        labeling = label_intransitive(slot_model, slot_sample, iterations=40)
        lls = labeling.trace
        assert len(lls) == 41
        for prev, cur in zip(lls, lls[1:]):
            assert cur >= prev - 1e-9 * abs(prev)
        assert labeling.weights.sum() == pytest.approx(1.0, abs=1e-10)

    def test_unknown_nouns_dropped_with_mass(self, slot_model):
        sample = NounSample("v", {"x": 2.0, "nonesuch": 5.0})
        labeling = label_intransitive(slot_model, sample, iterations=2)
        assert labeling.dropped == ("nonesuch",)
        assert labeling.dropped_mass == 5.0

    def test_all_unknown_raises(self, slot_model):
        with pytest.raises(EmptyDataError):
            label_intransitive(slot_model, NounSample("v", {"nope": 1.0}))

    def test_verb_not_in_model_vocabulary(self, slot_model):
        # labeling consults only noun parameters, so unseen verbs work
        labeling = label_intransitive(slot_model, NounSample("unseen_verb",
                                                             {"x": 1.0, "y": 1.0}))
        assert labeling.verb == "unseen_verb"
        assert labeling.weights.sum() == pytest.approx(1.0, abs=1e-10)

    def test_model_frozen(self, slot_model, slot_sample):
        before = slot_model.to_text()
        label_intransitive(slot_model, slot_sample, iterations=10)
        assert slot_model.to_text() == before

    def test_random_init_deterministic_with_seed(self, slot_model, slot_sample):
        a = label_intransitive(slot_model, slot_sample, iterations=3, seed=5,
                               init="random")
        b = label_intransitive(slot_model, slot_sample, iterations=3, seed=5,
                               init="random")
        assert a.weights.tolist() == b.weights.tolist()


class TestLabelTransitive:
    def test_single_class(self):
        vocab = Vocabulary(["u.aso:s"], ["x", "y"])
        model = LatentClassModel(vocab, [1.0], [[1.0]], [[0.5, 0.5]])
        sample = NounPairSample("v", {("x", "y"): 2.0})
        labeling = label_transitive(model, sample, iterations=3)
        assert labeling.weights.tolist() == [[1.0]]

    def test_outer_product_stays_outer_product(self, slot_model):
        # factorized sample f(n1,n2) = g(n1) h(n2); uniform init is an outer
        # product, so one step must equal the outer product of the two
        # corresponding intransitive one-step updates
        g = {"x": 3.0, "y": 1.0}
        h = {"x": 1.0, "y": 1.0}
        pair_sample = NounPairSample("v", {(a, b): g[a] * h[b]
                                           for a in g for b in h})
        labeling = label_transitive(slot_model, pair_sample, iterations=1)
        left = label_intransitive(slot_model, NounSample("v", g), iterations=1)
        right = label_intransitive(slot_model, NounSample("v", h), iterations=1)
        np.testing.assert_allclose(labeling.weights,
                                   np.outer(left.weights, right.weights), atol=1e-12)

    def test_matches_pair_oracle(self, slot_model):
        sample = NounPairSample("v", {("x", "y"): 2.0, ("y", "y"): 1.0,
                                      ("x", "x"): 1.0})
        labeling = label_transitive(slot_model, sample, iterations=3)
        weights = [[0.25, 0.25], [0.25, 0.25]]
        probs = [[0.9, 0.2], [0.1, 0.8]]
        pairs = {(0, 1): 2.0, (1, 1): 1.0, (0, 0): 1.0}
        for _ in range(3):
            weights = oracles.pair_label_step(weights, probs, pairs)
        np.testing.assert_allclose(labeling.weights, weights, atol=1e-12)

    def test_normalized_matrix(self, slot_model):
        sample = NounPairSample("v", {("x", "y"): 2.0, ("y", "x"): 3.0})
        labeling = label_transitive(slot_model, sample, iterations=20)
        assert labeling.weights.shape == (2, 2)
        assert labeling.weights.sum() == pytest.approx(1.0, abs=1e-10)


class TestMakeEntry:
    def test_single_class_scores_are_raw_frequencies(self):
        vocab = Vocabulary(["u.as:s"], ["x", "y", "z"])
        model = LatentClassModel(vocab, [1.0], [[1.0]], [[0.5, 0.3, 0.2]])
        sample = NounSample("v", {"x": 1.0, "y": 5.0, "z": 3.0})
        labeling = label_intransitive(model, sample, iterations=2)
        entry = make_entry(model, labeling, sample, top_k=3)
        assert entry.best_label == 0
        assert entry.best_label_prob == 1.0
        assert entry.top_fillers == (("y", 5.0), ("z", 3.0), ("x", 1.0))

    def test_hand_fixture_fillers(self, slot_model, slot_sample):
        labeling = label_intransitive(slot_model, slot_sample, iterations=1)
        entry = make_entry(slot_model, labeling, slot_sample, top_k=2)
        assert entry.best_label == 0
        assert entry.best_label_prob == pytest.approx(0.725, abs=1e-12)
        # posterior of class 0 under final weights (0.725, 0.275)
        w = labeling.weights
        post_x = w[0] * 0.9 / (w[0] * 0.9 + w[1] * 0.1)
        post_y = w[0] * 0.2 / (w[0] * 0.2 + w[1] * 0.8)
        assert entry.top_fillers[0] == ("x", pytest.approx(3 * post_x, rel=1e-12))
        assert entry.top_fillers[1] == ("y", pytest.approx(1 * post_y, rel=1e-12))

    def test_ranking_invariant_under_rescaling(self, slot_model, slot_sample):
        labeling = label_intransitive(slot_model, slot_sample, iterations=5)
        entry = make_entry(slot_model, labeling, slot_sample, top_k=2)
        scaled = NounSample(slot_sample.verb,
                            {k: 10.0 * f for k, f in slot_sample.counts.items()})
        scaled_labeling = label_intransitive(slot_model, scaled, iterations=5)
        scaled_entry = make_entry(slot_model, scaled_labeling, scaled, top_k=2)
        assert scaled_entry.best_label == entry.best_label
        assert [f for f, _ in scaled_entry.top_fillers] == [f for f, _ in entry.top_fillers]
        for (_, a), (_, b) in zip(scaled_entry.top_fillers, entry.top_fillers):
            assert a == pytest.approx(10.0 * b, rel=1e-12)

    def test_top_k_zero(self, slot_model, slot_sample):
        labeling = label_intransitive(slot_model, slot_sample, iterations=1)
        entry = make_entry(slot_model, labeling, slot_sample, top_k=0)
        assert entry.top_fillers == ()

    def test_transitive_entry(self, slot_model):
        sample = NounPairSample("v", {("x", "y"): 4.0, ("y", "x"): 1.0})
        labeling = label_transitive(slot_model, sample, iterations=30)
        entry = make_entry(slot_model, labeling, sample, top_k=2)
        assert entry.best_label == (0, 1)
        assert entry.slot_signature == "aso:s,o"
        assert entry.top_fillers[0][0] == ("x", "y")

    def test_verb_mismatch_rejected(self, slot_model, slot_sample):
        labeling = label_intransitive(slot_model, slot_sample, iterations=1)
        with pytest.raises(ValueError):
            make_entry(slot_model, labeling, NounSample("other", {"x": 1.0}))


class TestLabelMany:
    def test_singleton_matches_individual(self, slot_model, slot_sample):
        results, failures = label_many(slot_model, [slot_sample], iterations=4)
        assert failures == []
        assert len(results) == 1
        verb, labeling, entry = results[0]
        direct = label_intransitive(slot_model, slot_sample, iterations=4)
        assert verb == slot_sample.verb
        assert labeling.weights.tolist() == direct.weights.tolist()

    def test_sorted_by_label_probability(self, slot_model):
        confident = NounSample("sure", {"x": 50.0})
        vague = NounSample("vague", {"x": 1.0, "y": 1.0})
        results, _ = label_many(slot_model, [vague, confident], iterations=30)
        probs = [entry.best_label_prob for _, _, entry in results]
        assert probs == sorted(probs, reverse=True)
        assert results[0][0] == "sure"

    def test_failures_recorded_not_fatal(self, slot_model):
        good = NounSample("good", {"x": 2.0})
        bad = NounSample("bad", {"unknown": 1.0})
        results, failures = label_many(slot_model, [good, bad], iterations=2)
        assert [verb for verb, _, _ in results] == ["good"]
        assert len(failures) == 1 and failures[0][0] == "bad"

    def test_mixed_kinds(self, slot_model):
        samples = [NounSample("solo", {"x": 2.0}),
                   NounPairSample("duo", {("x", "y"): 2.0})]
        results, failures = label_many(slot_model, samples, iterations=3)
        assert failures == []
        kinds = {verb: labeling.kind for verb, labeling, _ in results}
        assert kinds == {"solo": "intransitive", "duo": "transitive"}
