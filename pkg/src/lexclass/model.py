"""Latent-class model over verb-noun pairs: domain types, probability queries,
and the line-oriented model file format.

The model assumes a pair ``(v, n)`` is generated by first drawing an
unobserved class ``c`` and then drawing the verb functor and the noun
independently given ``c``::

    joint(v, n) = sum_c class_prior[c] * verb_given_class[c, v] * noun_given_class[c, n]

All dependence between the two sides is mediated by the classes, which is
what lets the model assign positive probability to unseen combinations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import ModelFormatError, ZeroProbabilityError
from .util import atomic_write, fmt17

FRAMES = ("as", "aso")
SLOTS = ("s", "o")

# Tolerance on |sum - 1| for every stored probability distribution.
PROB_TOL = 1e-10


@dataclass(frozen=True)
class VerbFunctor:
    """A verb lemma tied to one slot of a subcategorization frame.

    ``as`` is the active intransitive frame (subject slot only); ``aso`` is
    the active transitive frame with subject (``s``) and object (``o``)
    slots. The rendered form is ``lemma.frame:slot``, e.g. ``increase.aso:o``
    for the object slot of transitive *increase*. Parsing the rendered form
    reproduces the functor exactly.
    """

    lemma: str
    frame: str
    slot: str

    def __post_init__(self):
        if not self.lemma or any(ch.isspace() for ch in self.lemma):
            raise ValueError(f"bad verb lemma {self.lemma!r}")
        if self.frame not in FRAMES:
            raise ValueError(f"unknown frame {self.frame!r} (expected one of {FRAMES})")
        if self.slot not in SLOTS:
            raise ValueError(f"unknown slot {self.slot!r} (expected one of {SLOTS})")
        if self.frame == "as" and self.slot != "s":
            raise ValueError("frame 'as' has only a subject slot")

    def render(self) -> str:
        return f"{self.lemma}.{self.frame}:{self.slot}"

    @classmethod
    def parse(cls, text: str) -> "VerbFunctor":
        lemma, dot, rest = text.rpartition(".")
        frame, colon, slot = rest.partition(":")
        if not dot or not colon:
            raise ValueError(f"not a verb functor: {text!r} (expected lemma.frame:slot)")
        return cls(lemma, frame, slot)

    def __str__(self) -> str:
        return self.render()


def _index_map(symbols: tuple, kind: str) -> dict:
    index = {}
    for i, sym in enumerate(symbols):
        if not sym:
            raise ValueError(f"empty {kind} symbol at index {i}")
        if sym in index:
            raise ValueError(f"duplicate {kind} symbol {sym!r}")
        index[sym] = i
    return index


class Vocabulary:
    """Bidirectional symbol/index maps for verb functors and nouns.

    Symbols within each list are unique and non-empty; indices are assigned
    by list position, so the mapping is a bijection in each direction.
    """

    __slots__ = ("verbs", "nouns", "_verb_index", "_noun_index")

    def __init__(self, verbs: Iterable[str], nouns: Iterable[str]):
        self.verbs = tuple(verbs)
        self.nouns = tuple(nouns)
        self._verb_index = _index_map(self.verbs, "verb")
        self._noun_index = _index_map(self.nouns, "noun")

    @property
    def num_verbs(self) -> int:
        return len(self.verbs)

    @property
    def num_nouns(self) -> int:
        return len(self.nouns)

    def verb_index(self, symbol: str) -> int:
        return self._verb_index[symbol]

    def noun_index(self, symbol: str) -> int:
        return self._noun_index[symbol]

    def has_noun(self, symbol: str) -> bool:
        return symbol in self._noun_index

    def __eq__(self, other) -> bool:
        if not isinstance(other, Vocabulary):
            return NotImplemented
        return self.verbs == other.verbs and self.nouns == other.nouns

    def __hash__(self):
        return hash((self.verbs, self.nouns))

    def __repr__(self) -> str:
        return f"Vocabulary({self.num_verbs} verbs, {self.num_nouns} nouns)"


def _check_index(i: int, size: int, kind: str) -> int:
    i = int(i)
    if not 0 <= i < size:
        raise IndexError(f"{kind} index {i} out of range [0, {size})")
    return i


class PairCounts:
    """Sparse verb-noun co-occurrence counts tied to a :class:`Vocabulary`.

    One entry per distinct ``(verb_index, noun_index)`` pair with a strictly
    positive real count (token semantics), kept in construction order.
    """

    __slots__ = ("vocab", "verb_idx", "noun_idx", "counts", "_pair_set",
                 "_verb_tokens", "_noun_tokens")

    def __init__(self, vocab: Vocabulary, verb_idx, noun_idx, counts):
        self.vocab = vocab
        self.verb_idx = np.ascontiguousarray(verb_idx, dtype=np.int64)
        self.noun_idx = np.ascontiguousarray(noun_idx, dtype=np.int64)
        self.counts = np.ascontiguousarray(counts, dtype=np.float64)
        if not (self.verb_idx.shape == self.noun_idx.shape == self.counts.shape):
            raise ValueError("verb_idx, noun_idx and counts must have equal length")
        if self.verb_idx.ndim != 1:
            raise ValueError("pair count arrays must be one-dimensional")
        if self.counts.size:
            if self.verb_idx.min() < 0 or self.verb_idx.max() >= vocab.num_verbs:
                raise ValueError("verb index out of range for vocabulary")
            if self.noun_idx.min() < 0 or self.noun_idx.max() >= vocab.num_nouns:
                raise ValueError("noun index out of range for vocabulary")
            if not np.all(self.counts > 0):
                raise ValueError("all pair counts must be > 0")
            if not np.all(np.isfinite(self.counts)):
                raise ValueError("all pair counts must be finite")
        pairs = set(zip(self.verb_idx.tolist(), self.noun_idx.tolist()))
        if len(pairs) != self.counts.size:
            raise ValueError("duplicate (verb, noun) entries")
        self._pair_set = frozenset(pairs)
        self._verb_tokens = None
        self._noun_tokens = None
        for arr in (self.verb_idx, self.noun_idx, self.counts):
            arr.setflags(write=False)

    @classmethod
    def from_mapping(cls, vocab: Vocabulary, mapping: Mapping) -> "PairCounts":
        """Build from a ``{(verb_index, noun_index): count}`` mapping (insertion order kept)."""
        vs = [k[0] for k in mapping]
        ns = [k[1] for k in mapping]
        return cls(vocab, vs, ns, list(mapping.values()))

    @property
    def type_count(self) -> int:
        return int(self.counts.size)

    @property
    def total_tokens(self) -> float:
        return float(self.counts.sum())

    @property
    def pair_set(self) -> frozenset:
        """The set of observed ``(verb_index, noun_index)`` pairs."""
        return self._pair_set

    def verb_token_totals(self) -> np.ndarray:
        """Token count of every verb functor, summed over nouns."""
        if self._verb_tokens is None:
            totals = np.bincount(self.verb_idx, weights=self.counts,
                                 minlength=self.vocab.num_verbs)
            totals.setflags(write=False)
            self._verb_tokens = totals
        return self._verb_tokens

    def noun_token_totals(self) -> np.ndarray:
        """Token count of every noun, summed over verb functors."""
        if self._noun_tokens is None:
            totals = np.bincount(self.noun_idx, weights=self.counts,
                                 minlength=self.vocab.num_nouns)
            totals.setflags(write=False)
            self._noun_tokens = totals
        return self._noun_tokens

    def __len__(self) -> int:
        return self.type_count

    def __repr__(self) -> str:
        return (f"PairCounts({self.type_count} types, "
                f"{self.total_tokens:g} tokens, {self.vocab!r})")


def as_pair_counts(X, vocabulary: Vocabulary | None = None) -> PairCounts:
    """Coerce estimator input into :class:`PairCounts`.

    Accepts a ready ``PairCounts``, a dense 2D array of counts
    (verbs x nouns), or any scipy-sparse-like matrix exposing ``tocoo()``.
    Matrix input gets a synthetic vocabulary (``v0, v1, ...`` / ``n0, ...``)
    unless ``vocabulary`` is supplied.
    """
    if isinstance(X, PairCounts):
        if vocabulary is not None and X.vocab != vocabulary:
            raise ValueError("pair counts are tied to a different vocabulary")
        return X
    if hasattr(X, "tocoo"):
        coo = X.tocoo()
        rows = np.asarray(coo.row, dtype=np.int64)
        cols = np.asarray(coo.col, dtype=np.int64)
        data = np.asarray(coo.data, dtype=np.float64)
        keep = data != 0
        rows, cols, data = rows[keep], cols[keep], data[keep]
        num_verbs, num_nouns = coo.shape
    else:
        dense = np.asarray(X, dtype=np.float64)
        if dense.ndim != 2:
            raise ValueError("expected a 2D count matrix (verbs x nouns)")
        rows, cols = np.nonzero(dense)
        data = dense[rows, cols]
        num_verbs, num_nouns = dense.shape
    if vocabulary is None:
        vocabulary = Vocabulary([f"v{i}" for i in range(num_verbs)],
                                [f"n{j}" for j in range(num_nouns)])
    elif (vocabulary.num_verbs, vocabulary.num_nouns) != (num_verbs, num_nouns):
        raise ValueError("matrix shape does not match the vocabulary")
    return PairCounts(vocabulary, rows, cols, data)


def _as_distribution(arr, shape, name: str) -> np.ndarray:
    out = np.ascontiguousarray(arr, dtype=np.float64)
    if out.shape != shape:
        raise ValueError(f"{name} must have shape {shape}, got {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{name} contains non-finite values")
    if np.any(out < 0):
        raise ValueError(f"{name} contains negative values")
    sums = out.sum(axis=-1)
    if np.any(np.abs(sums - 1.0) > PROB_TOL):
        raise ValueError(f"{name} rows must sum to 1 within {PROB_TOL}")
    out.setflags(write=False)
    return out


class LatentClassModel:
    """Parameter vector of the latent-class model plus its probability queries.

    Parameters
    ----------
    vocabulary : Vocabulary
        Symbol tables the parameter columns refer to.
    class_prior : array, shape (num_classes,)
        Distribution over classes.
    verb_given_class : array, shape (num_classes, num_verbs)
        One distribution over verb functors per class.
    noun_given_class : array, shape (num_classes, num_nouns)
        One distribution over nouns per class.

    Instances are immutable after construction (the arrays are marked
    read-only), so concurrent reads are safe.
    """

    __slots__ = ("vocabulary", "class_prior", "verb_given_class", "noun_given_class")

    def __init__(self, vocabulary: Vocabulary, class_prior, verb_given_class,
                 noun_given_class):
        prior = np.ascontiguousarray(class_prior, dtype=np.float64)
        if prior.ndim != 1 or prior.size < 1:
            raise ValueError("class_prior must be a non-empty vector")
        num_classes = prior.size
        self.vocabulary = vocabulary
        self.class_prior = _as_distribution(prior, (num_classes,), "class_prior")
        self.verb_given_class = _as_distribution(
            verb_given_class, (num_classes, vocabulary.num_verbs), "verb_given_class")
        self.noun_given_class = _as_distribution(
            noun_given_class, (num_classes, vocabulary.num_nouns), "noun_given_class")

    @property
    def num_classes(self) -> int:
        return int(self.class_prior.size)

    # -- probability queries -------------------------------------------------

    def joint_terms(self, v: int, n: int) -> np.ndarray:
        """Per-class joint terms ``class_prior[c] * p(v|c) * p(n|c)``."""
        v = _check_index(v, self.vocabulary.num_verbs, "verb")
        n = _check_index(n, self.vocabulary.num_nouns, "noun")
        return self.class_prior * self.verb_given_class[:, v] * self.noun_given_class[:, n]

    def joint_prob(self, v: int, n: int) -> float:
        """Joint probability of the pair, summed over classes in index order."""
        return float(self.joint_terms(v, n).sum())

    def class_posterior(self, v: int, n: int) -> np.ndarray:
        """Distribution over classes given an observed pair."""
        terms = self.joint_terms(v, n)
        total = terms.sum()
        if total <= 0.0:
            raise ZeroProbabilityError(
                f"posterior undefined: pair ({self.vocabulary.verbs[v]!r}, "
                f"{self.vocabulary.nouns[n]!r}) has zero joint probability")
        return terms / total

    def verb_marginal(self, v: int) -> float:
        """Model marginal of a verb functor, ``sum_c class_prior[c] * p(v|c)``."""
        v = _check_index(v, self.vocabulary.num_verbs, "verb")
        return float(np.dot(self.class_prior, self.verb_given_class[:, v]))

    def noun_given_verb(self, v: int, n: int) -> float:
        """Conditional ``p(n | v)`` entering the pseudo-disambiguation decision.

        Computed as ``sum_c p(c | v) * p(n | c)`` with
        ``p(c | v) = class_prior[c] * p(v|c) / sum_c' class_prior[c'] * p(v|c')``.
        This normalized form makes single-class models return exactly the
        class's noun probability, independent of the verb.
        """
        v = _check_index(v, self.vocabulary.num_verbs, "verb")
        n = _check_index(n, self.vocabulary.num_nouns, "noun")
        weights = self.class_prior * self.verb_given_class[:, v]
        total = weights.sum()
        if total <= 0.0:
            raise ZeroProbabilityError(
                f"conditional undefined: verb {self.vocabulary.verbs[v]!r} "
                f"has zero marginal probability")
        return float(np.dot(weights / total, self.noun_given_class[:, n]))

    def pair_joints(self, data: PairCounts) -> np.ndarray:
        """Joint probability of every entry in ``data`` (vectorized)."""
        if data.vocab != self.vocabulary:
            raise ValueError("pair counts are tied to a different vocabulary")
        pv = self.verb_given_class[:, data.verb_idx]
        pn = self.noun_given_class[:, data.noun_idx]
        return np.einsum("c,ck,ck->k", self.class_prior, pv, pn)

    def log_likelihood(self, data: PairCounts) -> float:
        """Token-weighted log-likelihood ``sum_y f(y) * ln joint(y)``."""
        if data.type_count == 0:
            return 0.0
        joints = self.pair_joints(data)
        bad = np.flatnonzero(joints <= 0.0)
        if bad.size:
            k = int(bad[0])
            raise ZeroProbabilityError(
                "log-likelihood is minus infinity: observed pair "
                f"({data.vocab.verbs[data.verb_idx[k]]!r}, "
                f"{data.vocab.nouns[data.noun_idx[k]]!r}) has zero probability")
        return float(np.dot(data.counts, np.log(joints)))

    # -- serialization --------------------------------------------------------

    def to_text(self) -> str:
        """Render the versioned line-oriented model format (see ``from_text``)."""
        vocab = self.vocabulary
        lines = [f"LCMODEL 1 {self.num_classes} {vocab.num_verbs} {vocab.num_nouns}"]
        lines.extend(f"V {i} {sym}" for i, sym in enumerate(vocab.verbs))
        lines.extend(f"N {i} {sym}" for i, sym in enumerate(vocab.nouns))
        lines.extend(f"C {c} {fmt17(p)}" for c, p in enumerate(self.class_prior))
        for c in range(self.num_classes):
            row = self.verb_given_class[c]
            lines.extend(f"VP {c} {v} {fmt17(row[v])}"
                         for v in np.flatnonzero(row > 0.0))
        for c in range(self.num_classes):
            row = self.noun_given_class[c]
            lines.extend(f"NP {c} {n} {fmt17(row[n])}"
                         for n in np.flatnonzero(row > 0.0))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "LatentClassModel":
        """Parse the model file format.

        Format (UTF-8, LF): header ``LCMODEL 1 <classes> <verbs> <nouns>``;
        one ``V <index> <symbol>`` line per verb functor and ``N <index>
        <symbol>`` per noun, in index order; ``C <class> <prob>`` per class;
        then ``VP <class> <verb> <prob>`` / ``NP <class> <noun> <prob>`` rows
        for every strictly positive parameter (omitted rows are exactly 0).
        Probabilities carry 17 significant digits so round-trips are exact.
        """
        lines = text.splitlines()
        if not lines:
            raise ModelFormatError("line 1: empty model file")

        def fail(line_no, message):
            raise ModelFormatError(f"line {line_no}: {message}")

        header = lines[0].split()
        if len(header) != 5 or header[0] != "LCMODEL":
            fail(1, "expected header 'LCMODEL <version> <classes> <verbs> <nouns>'")
        if header[1] != "1":
            fail(1, f"unknown model format version {header[1]!r}")
        try:
            num_classes, num_verbs, num_nouns = (int(x) for x in header[2:])
        except ValueError:
            fail(1, "header counts must be integers")
        if num_classes < 1 or num_verbs < 0 or num_nouns < 0:
            fail(1, "header counts out of range")

        pos = 1
        symbols = {"V": [], "N": []}
        for tag, expected in (("V", num_verbs), ("N", num_nouns)):
            for i in range(expected):
                line_no = pos + 1
                if pos >= len(lines):
                    fail(line_no, f"missing {tag} line for index {i}")
                parts = lines[pos].split(None, 2)
                if len(parts) != 3 or parts[0] != tag:
                    fail(line_no, f"expected '{tag} {i} <symbol>'")
                if parts[1] != str(i):
                    fail(line_no, f"{tag} lines must appear in index order (expected {i})")
                symbols[tag].append(parts[2])
                pos += 1
        try:
            vocab = Vocabulary(symbols["V"], symbols["N"])
        except ValueError as exc:
            fail(pos, str(exc))

        prior = np.zeros(num_classes)
        prior_seen = np.zeros(num_classes, dtype=bool)
        vgc = np.zeros((num_classes, num_verbs))
        ngc = np.zeros((num_classes, num_nouns))
        for offset, raw in enumerate(lines[pos:], start=pos + 1):
            parts = raw.split()
            if parts and parts[0] == "C" and len(parts) == 3:
                tag, fields = "C", parts[1:]
            elif parts and parts[0] in ("VP", "NP") and len(parts) == 4:
                tag, fields = parts[0], parts[1:]
            else:
                fail(offset, f"unrecognized line {raw!r}")
            try:
                idx = [int(f) for f in fields[:-1]]
                prob = float(fields[-1])
            except ValueError:
                fail(offset, f"malformed numeric fields in {raw!r}")
            if not np.isfinite(prob) or prob < 0:
                fail(offset, f"probability out of range in {raw!r}")
            if not 0 <= idx[0] < num_classes:
                fail(offset, f"class index out of range in {raw!r}")
            if tag == "C":
                if prior_seen[idx[0]]:
                    fail(offset, f"duplicate class prior for class {idx[0]}")
                prior_seen[idx[0]] = True
                prior[idx[0]] = prob
            elif tag == "VP":
                if not 0 <= idx[1] < num_verbs:
                    fail(offset, f"verb index out of range in {raw!r}")
                vgc[idx[0], idx[1]] = prob
            else:
                if not 0 <= idx[1] < num_nouns:
                    fail(offset, f"noun index out of range in {raw!r}")
                ngc[idx[0], idx[1]] = prob
        if not prior_seen.all():
            missing = int(np.flatnonzero(~prior_seen)[0])
            raise ModelFormatError(f"line {len(lines)}: missing class prior for class {missing}")
        try:
            return cls(vocab, prior, vgc, ngc)
        except ValueError as exc:
            raise ModelFormatError(f"line {len(lines)}: {exc}") from exc

    def save(self, path) -> None:
        atomic_write(path, self.to_text())

    @classmethod
    def load(cls, path) -> "LatentClassModel":
        with open(path, encoding="utf-8") as handle:
            return cls.from_text(handle.read())

    def __repr__(self) -> str:
        return (f"LatentClassModel({self.num_classes} classes, "
                f"{self.vocabulary.num_verbs} verbs, {self.vocabulary.num_nouns} nouns)")
