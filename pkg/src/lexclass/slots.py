"""Second-stage EM: label subcategorization slots of single verbs with classes.

Given a frozen latent-class model, the filler sample of one verb slot is
modeled as a mixture over classes whose noun distributions come from the
model; only the mixture weights are re-estimated. For an intransitive verb
the weights are a class vector, for a transitive verb a class-pair matrix
(the pair distribution is not factored, so subject/object dependencies are
representable). The fitted weights work for verbs the clustering model never
saw: only noun parameters are consulted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import NounPairSample, NounSample
from .errors import EmptyDataError, Error
from .model import LatentClassModel
from .training import MONOTONICITY_TOL

INTRANSITIVE = "intransitive"
TRANSITIVE = "transitive"

# Slot signatures used in lexicon output.
SIGNATURES = {INTRANSITIVE: "as:s", TRANSITIVE: "aso:s,o"}


@dataclass(frozen=True)
class SlotLabeling:
    """Fitted class weights for one verb slot (or slot pair).

    ``weights`` has shape ``(C,)`` for intransitive and ``(C, C)`` for
    transitive labelings and sums to 1. ``trace`` holds the sample
    log-likelihood after initialization and after every step.
    ``dropped_mass`` is the token mass of sample fillers that could not be
    used (unknown to the model vocabulary, or zero probability under every
    class); ``dropped`` lists them.
    """

    verb: str
    kind: str
    weights: np.ndarray
    trace: tuple[float, ...]
    dropped_mass: float = 0.0
    dropped: tuple = ()

    def __post_init__(self):
        self.weights.setflags(write=False)


@dataclass(frozen=True)
class LexiconEntry:
    """Human-facing summary of a labeling: best class plus top fillers.

    ``top_fillers`` are ``(noun, estimated_frequency)`` pairs (noun pairs for
    transitive entries) ranked by the estimated frequency
    ``f(filler) * posterior(best_label | filler)``, descending, ties broken
    by vocabulary index.
    """

    verb: str
    slot_signature: str
    best_label: int | tuple[int, int]
    best_label_prob: float
    top_fillers: tuple


def _resolve_nouns(model: LatentClassModel, sample: NounSample):
    vocab = model.vocabulary
    idxs, freqs, dropped, dropped_mass = [], [], [], 0.0
    for sym, f in sample.counts.items():
        if f <= 0:
            raise ValueError(f"non-positive sample frequency for {sym!r}")
        if not vocab.has_noun(sym):
            dropped.append(sym)
            dropped_mass += f
            continue
        n = vocab.noun_index(sym)
        if model.noun_given_class[:, n].sum() <= 0.0:
            dropped.append(sym)
            dropped_mass += f
            continue
        idxs.append(n)
        freqs.append(f)
    if not idxs:
        raise EmptyDataError(
            f"no sample noun of {sample.verb!r} is usable under the model")
    return np.array(idxs), np.array(freqs), tuple(dropped), dropped_mass


def _resolve_pairs(model: LatentClassModel, sample: NounPairSample):
    vocab = model.vocabulary

    def usable(sym):
        return vocab.has_noun(sym) and model.noun_given_class[:, vocab.noun_index(sym)].sum() > 0.0

    subj, obj, freqs, dropped, dropped_mass = [], [], [], [], 0.0
    for (s, o), f in sample.counts.items():
        if f <= 0:
            raise ValueError(f"non-positive sample frequency for {(s, o)!r}")
        if not (usable(s) and usable(o)):
            dropped.append((s, o))
            dropped_mass += f
            continue
        subj.append(vocab.noun_index(s))
        obj.append(vocab.noun_index(o))
        freqs.append(f)
    if not subj:
        raise EmptyDataError(
            f"no filler pair of {sample.verb!r} is usable under the model")
    return np.array(subj), np.array(obj), np.array(freqs), tuple(dropped), dropped_mass


def _init_weights(shape, init: str, seed) -> np.ndarray:
    if init == "uniform":
        return np.full(shape, 1.0 / np.prod(shape))
    if init == "random":
        rng = np.random.default_rng(seed)
        raw = rng.uniform(0.1, 1.0, size=shape)
        return raw / raw.sum()
    raise ValueError(f"unknown init scheme {init!r}")


def _check_monotone(trace: list, ll: float, verb: str) -> None:
    previous = trace[-1]
    if ll < previous - MONOTONICITY_TOL * abs(previous):
        raise Error(f"labeling of {verb!r}: log-likelihood decreased "
                    f"from {previous} to {ll}")


def label_intransitive(model: LatentClassModel, sample: NounSample,
                       iterations: int = 50, seed: int | None = None,
                       init: str = "uniform") -> SlotLabeling:
    """Estimate the class distribution of an intransitive verb's subject slot.

    Runs ``iterations`` EM steps over the mixture weights with the model's
    noun distributions frozen. Initialization is uniform (deterministic); the
    seed only matters for ``init="random"``.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    idxs, freqs, dropped, dropped_mass = _resolve_nouns(model, sample)
    pnc = model.noun_given_class[:, idxs]            # (C, K)
    weights = _init_weights(model.num_classes, init, seed)
    total = freqs.sum()
    probs = weights @ pnc
    trace = [float(freqs @ np.log(probs))]
    for _step in range(iterations):
        posterior = weights[:, None] * pnc / probs   # (C, K)
        weights = (posterior * freqs).sum(axis=1) / total
        probs = weights @ pnc
        ll = float(freqs @ np.log(probs))
        _check_monotone(trace, ll, sample.verb)
        trace.append(ll)
    return SlotLabeling(sample.verb, INTRANSITIVE, weights, tuple(trace),
                        dropped_mass, dropped)


def label_transitive(model: LatentClassModel, sample: NounPairSample,
                     iterations: int = 50, seed: int | None = None,
                     init: str = "uniform") -> SlotLabeling:
    """Estimate the class-pair distribution of a transitive verb's slots.

    The filler likelihood factors per slot given the class pair:
    ``p(n1, n2) = sum_{c1,c2} weights[c1, c2] * p(n1|c1) * p(n2|c2)``.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    subj, obj, freqs, dropped, dropped_mass = _resolve_pairs(model, sample)
    a = model.noun_given_class[:, subj]              # (C, K)
    b = model.noun_given_class[:, obj]               # (C, K)
    c = model.num_classes
    weights = _init_weights((c, c), init, seed)
    total = freqs.sum()

    def pair_probs(w):
        return np.einsum("ab,ak,bk->k", w, a, b)

    probs = pair_probs(weights)
    trace = [float(freqs @ np.log(probs))]
    for _step in range(iterations):
        weights = weights * np.einsum("ak,bk,k->ab", a, b, freqs / probs) / total
        probs = pair_probs(weights)
        ll = float(freqs @ np.log(probs))
        _check_monotone(trace, ll, sample.verb)
        trace.append(ll)
    return SlotLabeling(sample.verb, TRANSITIVE, weights, tuple(trace),
                        dropped_mass, dropped)


def make_entry(model: LatentClassModel, labeling: SlotLabeling, sample,
               top_k: int = 10) -> LexiconEntry:
    """Pick the most probable class label and rank fillers by estimated frequency.

    The filler score is ``f(filler) * posterior(best_label | filler)`` under
    the final weights. Exact weight ties resolve to the lowest class index
    (row-major for pairs); filler score ties resolve to the lowest vocabulary
    index.
    """
    if labeling.verb != sample.verb:
        raise ValueError(f"labeling is for {labeling.verb!r}, sample for {sample.verb!r}")
    if top_k < 0:
        raise ValueError("top_k must be >= 0")
    weights = labeling.weights
    if labeling.kind == INTRANSITIVE:
        idxs, freqs, _, _ = _resolve_nouns(model, sample)
        pnc = model.noun_given_class[:, idxs]
        best = int(np.argmax(weights))
        posterior = weights[:, None] * pnc / (weights @ pnc)
        scores = freqs * posterior[best]
        symbols = [model.vocabulary.nouns[i] for i in idxs.tolist()]
        order = sorted(range(len(symbols)), key=lambda k: (-scores[k], idxs[k]))
        fillers = tuple((symbols[k], float(scores[k])) for k in order[:top_k])
        label: int | tuple[int, int] = best
        best_prob = float(weights[best])
    elif labeling.kind == TRANSITIVE:
        subj, obj, freqs, _, _ = _resolve_pairs(model, sample)
        a = model.noun_given_class[:, subj]
        b = model.noun_given_class[:, obj]
        flat = int(np.argmax(weights))
        c1, c2 = np.unravel_index(flat, weights.shape)
        probs = np.einsum("ab,ak,bk->k", weights, a, b)
        scores = freqs * weights[c1, c2] * a[c1] * b[c2] / probs
        nouns = model.vocabulary.nouns
        order = sorted(range(len(freqs)), key=lambda k: (-scores[k], subj[k], obj[k]))
        fillers = tuple(((nouns[subj[k]], nouns[obj[k]]), float(scores[k]))
                        for k in order[:top_k])
        label = (int(c1), int(c2))
        best_prob = float(weights[c1, c2])
    else:
        raise ValueError(f"unknown labeling kind {labeling.kind!r}")
    return LexiconEntry(sample.verb, SIGNATURES[labeling.kind], label, best_prob, fillers)


def label_many(model: LatentClassModel, samples, iterations: int = 50,
               top_k: int = 10, init: str = "uniform", seed: int | None = None):
    """Label a collection of samples and rank entries by label probability.

    Samples may mix :class:`NounSample` and :class:`NounPairSample`. Returns
    ``(results, failures)``: ``results`` is a list of
    ``(verb, SlotLabeling, LexiconEntry)`` sorted by descending
    ``best_label_prob`` (input order on ties); ``failures`` records
    ``(verb, message)`` for samples that could not be labeled.
    """
    results = []
    failures = []
    for sample in samples:
        try:
            if isinstance(sample, NounPairSample):
                labeling = label_transitive(model, sample, iterations, seed, init)
            else:
                labeling = label_intransitive(model, sample, iterations, seed, init)
            entry = make_entry(model, labeling, sample, top_k)
            results.append((sample.verb, labeling, entry))
        except (Error, ValueError) as exc:
            failures.append((sample.verb, str(exc)))
    results.sort(key=lambda item: -item[2].best_label_prob)
    return results, failures
