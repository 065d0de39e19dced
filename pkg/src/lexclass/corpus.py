"""Corpus ingestion and synthetic corpus generation.

Input files are UTF-8 TSV with LF line endings; ``#``-prefixed lines are
comments and blank lines are skipped. Counts are decimal reals (token
semantics) and default to 1 when the column is omitted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CorpusError
from .model import LatentClassModel, PairCounts, VerbFunctor, Vocabulary
from .util import fmt17


def _lines(stream):
    for line_no, raw in enumerate(stream, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line or line.startswith("#"):
            continue
        yield line_no, line.split("\t")


def _parse_count(field: str, line_no: int) -> float:
    try:
        count = float(field)
    except ValueError:
        raise CorpusError(f"line {line_no}: bad count {field!r}") from None
    if not np.isfinite(count) or count <= 0:
        raise CorpusError(f"line {line_no}: count must be a positive real, got {field!r}")
    return count


def read_pairs(stream) -> tuple[Vocabulary, PairCounts]:
    """Read a verb-noun pair corpus: ``verb_functor<TAB>noun[<TAB>count]``.

    The verb field must be a valid rendered :class:`VerbFunctor`. Duplicate
    pairs are aggregated by summing counts; vocabulary indices follow first
    appearance.
    """
    verb_ids: dict[str, int] = {}
    noun_ids: dict[str, int] = {}
    aggregated: dict[tuple[int, int], float] = {}
    for line_no, fields in _lines(stream):
        if len(fields) not in (2, 3):
            raise CorpusError(f"line {line_no}: expected 2 or 3 tab-separated fields, "
                              f"got {len(fields)}")
        verb, noun = fields[0], fields[1]
        try:
            VerbFunctor.parse(verb)
        except ValueError as exc:
            raise CorpusError(f"line {line_no}: {exc}") from None
        if not noun:
            raise CorpusError(f"line {line_no}: empty noun")
        count = _parse_count(fields[2], line_no) if len(fields) == 3 else 1.0
        v = verb_ids.setdefault(verb, len(verb_ids))
        n = noun_ids.setdefault(noun, len(noun_ids))
        aggregated[(v, n)] = aggregated.get((v, n), 0.0) + count
    vocab = Vocabulary(verb_ids, noun_ids)
    return vocab, PairCounts.from_mapping(vocab, aggregated)


def write_pairs(counts: PairCounts) -> str:
    """Render pair counts back to the TSV format accepted by ``read_pairs``."""
    vocab = counts.vocab
    lines = []
    for v, n, c in zip(counts.verb_idx.tolist(), counts.noun_idx.tolist(),
                       counts.counts.tolist()):
        rendered = str(int(c)) if c == int(c) else fmt17(c)
        lines.append(f"{vocab.verbs[v]}\t{vocab.nouns[n]}\t{rendered}")
    return "\n".join(lines) + "\n" if lines else ""


@dataclass
class NounSample:
    """Observed slot fillers of one verb: ``{noun_symbol: frequency}``.

    Symbols are resolved against a model vocabulary at labeling time;
    unresolvable nouns are reported there as dropped mass.
    """

    verb: str
    counts: dict[str, float]


@dataclass
class NounPairSample:
    """Observed (subject, object) filler pairs of one transitive verb."""

    verb: str
    counts: dict[tuple[str, str], float]


def read_noun_samples(stream) -> list[NounSample]:
    """Read ``verb<TAB>noun[<TAB>count]`` lines grouped into per-verb samples."""
    samples: dict[str, NounSample] = {}
    for line_no, fields in _lines(stream):
        if len(fields) not in (2, 3):
            raise CorpusError(f"line {line_no}: expected 2 or 3 tab-separated fields, "
                              f"got {len(fields)}")
        verb, noun = fields[0], fields[1]
        if not verb or not noun:
            raise CorpusError(f"line {line_no}: empty field")
        count = _parse_count(fields[2], line_no) if len(fields) == 3 else 1.0
        sample = samples.setdefault(verb, NounSample(verb, {}))
        sample.counts[noun] = sample.counts.get(noun, 0.0) + count
    return list(samples.values())


def read_pair_samples(stream) -> list[NounPairSample]:
    """Read ``verb<TAB>subject<TAB>object[<TAB>count]`` lines grouped by verb."""
    samples: dict[str, NounPairSample] = {}
    for line_no, fields in _lines(stream):
        if len(fields) not in (3, 4):
            raise CorpusError(f"line {line_no}: expected 3 or 4 tab-separated fields, "
                              f"got {len(fields)}")
        verb, subj, obj = fields[0], fields[1], fields[2]
        if not verb or not subj or not obj:
            raise CorpusError(f"line {line_no}: empty field")
        count = _parse_count(fields[3], line_no) if len(fields) == 4 else 1.0
        sample = samples.setdefault(verb, NounPairSample(verb, {}))
        key = (subj, obj)
        sample.counts[key] = sample.counts.get(key, 0.0) + count
    return list(samples.values())


class PlantedSpec:
    """Ground-truth latent-class model plus sampling settings for synthetic corpora."""

    def __init__(self, verb_symbols, noun_symbols, class_weights, verb_given_class,
                 noun_given_class, token_count: int, seed: int = 0):
        if token_count < 1:
            raise ValueError("token_count must be >= 1")
        self.truth = LatentClassModel(Vocabulary(verb_symbols, noun_symbols),
                                      class_weights, verb_given_class, noun_given_class)
        self.token_count = int(token_count)
        self.seed = int(seed)

    @classmethod
    def block_model(cls, num_classes: int = 5, verbs_per_class: int = 20,
                    nouns_per_class: int = 30, tail_nouns_per_class: int = 0,
                    tail_mass: float = 0.1, leak: float = 0.0,
                    token_count: int = 50000, seed: int = 0) -> "PlantedSpec":
        """Near-disjoint class supports arranged in verb/noun blocks.

        Class ``k`` puts ``1 - leak`` of its verb mass uniformly on its own
        block of verbs and spreads ``leak`` uniformly over all other verbs.
        Noun mass is split within the block between ``nouns_per_class``
        frequent head nouns and an optional tail of rarely-sampled nouns
        carrying ``tail_mass``; the tail thins out type coverage without
        affecting class separation.
        """
        if not 0 <= leak < 1:
            raise ValueError("leak must be in [0, 1)")
        if tail_nouns_per_class and not 0 < tail_mass < 1:
            raise ValueError("tail_mass must be in (0, 1) when a tail is present")
        verbs = [f"v{k}x{j}.as:s" for k in range(num_classes) for j in range(verbs_per_class)]
        heads = [[f"n{k}x{j}" for j in range(nouns_per_class)] for k in range(num_classes)]
        tails = [[f"t{k}x{j}" for j in range(tail_nouns_per_class)] for k in range(num_classes)]
        nouns = [sym for k in range(num_classes) for sym in heads[k] + tails[k]]
        num_verbs = len(verbs)
        num_nouns = len(nouns)
        nouns_block = nouns_per_class + tail_nouns_per_class
        vgc = np.full((num_classes, num_verbs), 0.0)
        ngc = np.full((num_classes, num_nouns), 0.0)
        for k in range(num_classes):
            out_verbs = num_verbs - verbs_per_class
            vgc[k, :] = leak / out_verbs if out_verbs else 0.0
            block = slice(k * verbs_per_class, (k + 1) * verbs_per_class)
            vgc[k, block] = (1.0 - leak) / verbs_per_class
            out_nouns = num_nouns - nouns_block
            ngc[k, :] = leak / out_nouns if out_nouns else 0.0
            start = k * nouns_block
            head_share = (1.0 - leak) * (1.0 - tail_mass if tail_nouns_per_class else 1.0)
            ngc[k, start:start + nouns_per_class] = head_share / nouns_per_class
            if tail_nouns_per_class:
                tail_share = (1.0 - leak) * tail_mass
                ngc[k, start + nouns_per_class:start + nouns_block] = (
                    tail_share / tail_nouns_per_class)
        weights = np.full(num_classes, 1.0 / num_classes)
        return cls(verbs, nouns, weights, vgc, ngc, token_count, seed)


def generate_planted(spec: PlantedSpec) -> tuple[Vocabulary, PairCounts, LatentClassModel]:
    """Sample ``token_count`` i.i.d. (class, verb, noun) triples and aggregate pairs.

    The hidden class of each token is discarded; the generating model is
    returned for oracle comparisons. Equal seeds give bit-identical corpora.
    """
    truth = spec.truth
    vocab = truth.vocabulary
    rng = np.random.default_rng(spec.seed)
    classes = rng.choice(truth.num_classes, size=spec.token_count, p=truth.class_prior)
    verbs = np.empty(spec.token_count, dtype=np.int64)
    nouns = np.empty(spec.token_count, dtype=np.int64)
    for c in range(truth.num_classes):
        mask = classes == c
        k = int(mask.sum())
        if k:
            verbs[mask] = rng.choice(vocab.num_verbs, size=k, p=truth.verb_given_class[c])
            nouns[mask] = rng.choice(vocab.num_nouns, size=k, p=truth.noun_given_class[c])
    aggregated: dict[tuple[int, int], float] = {}
    for v, n in zip(verbs.tolist(), nouns.tolist()):
        key = (v, n)
        aggregated[key] = aggregated.get(key, 0.0) + 1.0
    return vocab, PairCounts.from_mapping(vocab, aggregated), truth
