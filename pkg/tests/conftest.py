import numpy as np
import pytest

from lexclass import LatentClassModel, PairCounts, Vocabulary

# Two well-separated classes over a 3x3 vocabulary; the standard small
# instance used across the suite and by the enumeration oracles.
FIXTURE_PRIOR = [0.5, 0.5]
FIXTURE_VGC = [[0.6, 0.3, 0.1], [0.1, 0.3, 0.6]]
FIXTURE_NGC = [[0.7, 0.2, 0.1], [0.1, 0.2, 0.7]]
FIXTURE_PAIRS = {(0, 0): 3.0, (1, 1): 2.0, (2, 2): 3.0}


@pytest.fixture
def vocab():
    return Vocabulary(["a.as:s", "b.as:s", "c.as:s"], ["x", "y", "z"])


@pytest.fixture
def fixture_model(vocab):
    return LatentClassModel(vocab, FIXTURE_PRIOR, FIXTURE_VGC, FIXTURE_NGC)


@pytest.fixture
def fixture_data(vocab):
    return PairCounts.from_mapping(vocab, FIXTURE_PAIRS)


def random_instance(rng, max_verbs=20, max_nouns=20, max_types=40, max_count=25):
    """A random small corpus: vocabulary plus positive integer pair counts."""
    num_verbs = int(rng.integers(2, max_verbs + 1))
    num_nouns = int(rng.integers(2, max_nouns + 1))
    vocab = Vocabulary([f"w{i}.as:s" for i in range(num_verbs)],
                       [f"m{j}" for j in range(num_nouns)])
    num_types = int(rng.integers(1, min(max_types, num_verbs * num_nouns) + 1))
    cells = rng.choice(num_verbs * num_nouns, size=num_types, replace=False)
    mapping = {}
    for cell in cells.tolist():
        mapping[(cell // num_nouns, cell % num_nouns)] = float(rng.integers(1, max_count))
    return vocab, PairCounts.from_mapping(vocab, mapping)


def relative_frequency_model(data):
    """Closed-form single-class maximum-likelihood model for a corpus."""
    verb_probs = data.verb_token_totals() / data.total_tokens
    noun_probs = data.noun_token_totals() / data.total_tokens
    return LatentClassModel(data.vocab, np.array([1.0]), verb_probs[None, :],
                            noun_probs[None, :])
