"""Pseudo-disambiguation corpora, the accuracy decision rule, and smoothing power.

Pseudo-disambiguation asks whether the model prefers the attested verb ``v``
over a random distractor ``v'`` for a noun ``n``, where ``(v, n)`` was cut
out of the corpus and ``(v', n)`` is a combination seen nowhere. Smoothing
power estimates the fraction of the full verb x noun space that receives
positive probability.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .corpus import write_pairs
from .errors import CorpusError, EmptyDataError
from .model import LatentClassModel, PairCounts, Vocabulary
from .util import atomic_write, fmt17

DISTRACTOR_ATTEMPTS = 1000


class EvalTriple(NamedTuple):
    """One decision: attested ``(verb, noun)`` against an unseen ``(distractor, noun)``."""

    verb: int
    noun: int
    distractor: int


@dataclass(frozen=True)
class EvalSplit:
    """A train/test partition of a pair corpus plus its evaluation triples.

    ``test_pairs`` are the cut pair types as ``(verb, noun, count)``; the cut
    removed all their tokens from ``train_counts``. The two dropped counters
    record candidate triples lost to distractor exhaustion and to the
    frequency filter.
    """

    train_counts: PairCounts
    test_pairs: tuple[tuple[int, int, float], ...]
    triples: tuple[EvalTriple, ...]
    dropped_no_distractor: int
    dropped_by_frequency: int

    @property
    def test_tokens(self) -> float:
        return float(sum(c for _, _, c in self.test_pairs))


def build_pseudo_corpus(data: PairCounts, test_pair_count: int, freq_min: float,
                        freq_max: float, seed: int) -> EvalSplit:
    """Cut a test set of pair types and build (verb, noun, distractor) triples.

    Procedure (all randomness from ``numpy.random.default_rng(seed)``, in
    this order, so an independent implementation can reproduce it):

    1. Cut ``test_pair_count`` pair types. Keep a list ``live`` of entry
       positions in corpus order. Repeatedly draw ``k = rng.integers(len(live))``;
       reject the draw (the entry stays) if removing that pair would leave
       its verb or its noun with no remaining training pair; otherwise
       swap-remove it (``live[k] = live[-1]; live.pop()``) and add it to the
       test set. Gives up after ``1000 * test_pair_count`` draws.
    2. Training counts are the surviving entries in corpus order.
    3. For each cut pair ``(v, n)`` in cut order, sample a distractor verb
       proportional to training token frequency: up to 1000 attempts of
       ``u = rng.random()`` mapped through the cumulative verb-token sums
       (``searchsorted(cum, u * total, side="right")``), rejecting verbs
       whose pair with ``n`` occurs in the training or test set. Exhaustion
       drops the candidate triple and is counted.
    4. Keep only triples whose verb, distractor and noun all have original-
       corpus token frequency within ``[freq_min, freq_max]``.

    Raises :class:`EmptyDataError` when no triples survive.
    """
    if test_pair_count < 1:
        raise ValueError("test_pair_count must be >= 1")
    if freq_min > freq_max:
        raise ValueError("freq_min must be <= freq_max")
    if data.type_count < test_pair_count:
        raise ValueError(f"corpus has {data.type_count} pair types, "
                         f"cannot cut {test_pair_count}")
    rng = np.random.default_rng(seed)
    verb_idx = data.verb_idx
    noun_idx = data.noun_idx

    # 1. cut test pair types, never orphaning a symbol
    verb_types = np.bincount(verb_idx, minlength=data.vocab.num_verbs)
    noun_types = np.bincount(noun_idx, minlength=data.vocab.num_nouns)
    live = list(range(data.type_count))
    selected: list[int] = []
    draws = 0
    max_draws = 1000 * test_pair_count
    while len(selected) < test_pair_count:
        if draws >= max_draws:
            raise EmptyDataError(
                f"could not cut {test_pair_count} pairs without orphaning a symbol "
                f"({len(selected)} cut after {draws} draws)")
        k = int(rng.integers(len(live)))
        draws += 1
        pos = live[k]
        v, n = int(verb_idx[pos]), int(noun_idx[pos])
        if verb_types[v] < 2 or noun_types[n] < 2:
            continue
        live[k] = live[-1]
        live.pop()
        verb_types[v] -= 1
        noun_types[n] -= 1
        selected.append(pos)

    # 2. training counts = everything not selected, in corpus order
    keep = np.ones(data.type_count, dtype=bool)
    keep[selected] = False
    train_counts = PairCounts(data.vocab, verb_idx[keep], noun_idx[keep],
                              data.counts[keep])
    test_pairs = tuple((int(verb_idx[p]), int(noun_idx[p]), float(data.counts[p]))
                       for p in selected)

    # 3. distractors proportional to training token frequency
    train_verb_tokens = train_counts.verb_token_totals()
    cum = np.cumsum(train_verb_tokens)
    total = cum[-1]
    train_set = train_counts.pair_set
    test_set = {(v, n) for v, n, _ in test_pairs}
    raw_triples: list[EvalTriple] = []
    dropped_no_distractor = 0
    for v, n, _ in test_pairs:
        for _attempt in range(DISTRACTOR_ATTEMPTS):
            u = rng.random()
            vp = int(np.searchsorted(cum, u * total, side="right"))
            if (vp, n) in train_set or (vp, n) in test_set:
                continue
            raw_triples.append(EvalTriple(v, n, vp))
            break
        else:
            dropped_no_distractor += 1

    # 4. frequency filter against the original corpus
    verb_freq = data.verb_token_totals()
    noun_freq = data.noun_token_totals()

    def admissible(t: EvalTriple) -> bool:
        return (freq_min <= verb_freq[t.verb] <= freq_max
                and freq_min <= verb_freq[t.distractor] <= freq_max
                and freq_min <= noun_freq[t.noun] <= freq_max)

    triples = tuple(t for t in raw_triples if admissible(t))
    dropped_by_frequency = len(raw_triples) - len(triples)
    if not triples:
        raise EmptyDataError("no evaluation triples survived construction")
    return EvalSplit(train_counts, test_pairs, triples,
                     dropped_no_distractor, dropped_by_frequency)


def pseudo_accuracy(model: LatentClassModel, triples) -> float:
    """Fraction of triples with ``p(n|v) >= p(n|v')``; ties count as correct."""
    triples = list(triples)
    if not triples:
        raise EmptyDataError("cannot score an empty triple list")
    correct = sum(
        model.noun_given_verb(t.verb, t.noun) >= model.noun_given_verb(t.distractor, t.noun)
        for t in triples)
    return correct / len(triples)


def smoothing_power(model: LatentClassModel, sample_size: int, seed: int,
                    positivity_threshold: float = 0.0) -> float:
    """Fraction of uniformly sampled verb x noun pairs with joint probability
    above ``positivity_threshold``.

    Draw contract: ``rng = default_rng(seed)``, then one
    ``rng.integers(0, num_verbs, size=sample_size)`` call for the verbs and
    one for the nouns.
    """
    if sample_size < 1:
        raise ValueError("sample_size must be >= 1")
    if positivity_threshold < 0:
        raise ValueError("positivity_threshold must be >= 0")
    vocab = model.vocabulary
    rng = np.random.default_rng(seed)
    vs = rng.integers(0, vocab.num_verbs, size=sample_size)
    ns = rng.integers(0, vocab.num_nouns, size=sample_size)
    pv = model.verb_given_class[:, vs]
    pn = model.noun_given_class[:, ns]
    joints = np.einsum("c,ck,ck->k", model.class_prior, pv, pn)
    return float(np.mean(joints > positivity_threshold))


def type_coverage_baseline(data: PairCounts) -> float:
    """Observed pair types as a fraction of the full verb x noun space."""
    vocab = data.vocab
    if vocab.num_verbs == 0 or vocab.num_nouns == 0:
        raise EmptyDataError("vocabulary is empty")
    return data.type_count / (vocab.num_verbs * vocab.num_nouns)


# -- persistence ---------------------------------------------------------------

TRAIN_FILE = "train_pairs.tsv"
TEST_FILE = "test_pairs.tsv"
TRIPLES_FILE = "triples.tsv"


def save_split(split: EvalSplit, directory) -> None:
    """Write train pairs, test pairs, and triples as three TSV files."""
    vocab = split.train_counts.vocab
    os.makedirs(directory, exist_ok=True)
    atomic_write(os.path.join(directory, TRAIN_FILE), write_pairs(split.train_counts))
    test_lines = [f"{vocab.verbs[v]}\t{vocab.nouns[n]}\t"
                  f"{str(int(c)) if c == int(c) else fmt17(c)}"
                  for v, n, c in split.test_pairs]
    atomic_write(os.path.join(directory, TEST_FILE),
                 "\n".join(test_lines) + "\n" if test_lines else "")
    triple_lines = [f"{vocab.verbs[t.verb]}\t{vocab.nouns[t.noun]}\t{vocab.verbs[t.distractor]}"
                    for t in split.triples]
    atomic_write(os.path.join(directory, TRIPLES_FILE),
                 "\n".join(triple_lines) + "\n" if triple_lines else "")


def load_triples(stream, vocab: Vocabulary) -> tuple[EvalTriple, ...]:
    """Read a triples TSV (verb, noun, distractor symbols) against a vocabulary."""
    triples = []
    for line_no, raw in enumerate(stream, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise CorpusError(f"line {line_no}: expected 3 tab-separated fields")
        try:
            triples.append(EvalTriple(vocab.verb_index(fields[0]),
                                      vocab.noun_index(fields[1]),
                                      vocab.verb_index(fields[2])))
        except KeyError as exc:
            raise CorpusError(f"line {line_no}: unknown symbol {exc.args[0]!r}") from None
    return tuple(triples)
