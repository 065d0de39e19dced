"""EM estimation of the latent-class model.

One EM iteration maps the current parameters to::

    verb_given_class'[c, v] = sum_{y in {v} x N} f(y) p(c|y) / sum_y f(y) p(c|y)
    noun_given_class'[c, n] = sum_{y in V x {n}} f(y) p(c|y) / sum_y f(y) p(c|y)
    class_prior'[c]         = sum_y f(y) p(c|y) / sum_y f(y)

where ``p(c|y)`` is the class posterior of the observed pair ``y`` under the
current parameters. Each step never decreases the token-weighted
log-likelihood. The E-step accumulation and the M-step normalization are
fused into one pass over observation types, so memory scales with the
parameter arrays, not with ``types x classes`` tables.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .errors import DegenerateClassWarning, EmptyDataError, Error, ZeroProbabilityError
from .model import LatentClassModel, PairCounts, Vocabulary, as_pair_counts
from .util import fmt17

INIT_SCHEMES = ("uniform_random",)

# A step may lower the trace by at most this relative amount (float noise).
MONOTONICITY_TOL = 1e-9


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters of one training run.

    ``likelihood_tolerance`` is an early-stop threshold on the relative
    likelihood gain per iteration; the default 0 runs all iterations.
    """

    num_classes: int
    iterations: int
    seed: int = 0
    init_scheme: str = "uniform_random"
    likelihood_tolerance: float = 0.0

    def __post_init__(self):
        if self.num_classes < 1:
            raise ValueError("num_classes must be >= 1")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.init_scheme not in INIT_SCHEMES:
            raise ValueError(f"unknown init scheme {self.init_scheme!r}")
        if self.likelihood_tolerance < 0:
            raise ValueError("likelihood_tolerance must be >= 0")


@dataclass(frozen=True)
class TrainTrace:
    """Log-likelihood after initialization and after every EM step."""

    log_likelihoods: tuple[float, ...]

    @property
    def iterations_run(self) -> int:
        return len(self.log_likelihoods) - 1

    def to_tsv(self) -> str:
        lines = ["iteration\tlog_likelihood"]
        lines.extend(f"{t}\t{fmt17(ll)}" for t, ll in enumerate(self.log_likelihoods))
        return "\n".join(lines) + "\n"


def _normalized_uniform(rng: np.random.Generator, shape) -> np.ndarray:
    raw = rng.uniform(0.1, 1.0, size=shape)
    return raw / raw.sum(axis=-1, keepdims=True)


def init_model(config: TrainConfig, vocab: Vocabulary) -> LatentClassModel:
    """Draw strictly positive starting parameters from the seeded generator.

    Draw order is fixed (class prior, then verb rows, then noun rows), so
    equal ``(config, vocab)`` give identical models.
    """
    if vocab.num_verbs == 0 or vocab.num_nouns == 0:
        raise EmptyDataError("cannot initialize a model on an empty vocabulary")
    rng = np.random.default_rng(config.seed)
    c = config.num_classes
    prior = _normalized_uniform(rng, c)
    vgc = _normalized_uniform(rng, (c, vocab.num_verbs))
    ngc = _normalized_uniform(rng, (c, vocab.num_nouns))
    return LatentClassModel(vocab, prior, vgc, ngc)


def expected_counts(model: LatentClassModel, data: PairCounts):
    """E-step accumulators: posterior-weighted token counts.

    Returns ``(class_totals, verb_counts, noun_counts)`` with shapes ``(C,)``,
    ``(C, V)`` and ``(C, N)``. For every class, ``verb_counts`` and
    ``noun_counts`` both sum to ``class_totals`` (expected-count
    conservation), and ``class_totals`` sums to the token total.
    """
    if data.type_count == 0:
        raise EmptyDataError("cannot run an EM step on empty pair counts")
    pv = model.verb_given_class[:, data.verb_idx]
    pn = model.noun_given_class[:, data.noun_idx]
    terms = model.class_prior[:, None] * pv * pn
    joints = terms.sum(axis=0)
    bad = np.flatnonzero(joints <= 0.0)
    if bad.size:
        k = int(bad[0])
        raise ZeroProbabilityError(
            "EM step degenerate: observed pair "
            f"({data.vocab.verbs[data.verb_idx[k]]!r}, "
            f"{data.vocab.nouns[data.noun_idx[k]]!r}) has zero probability")
    weighted = terms * (data.counts / joints)
    class_totals = weighted.sum(axis=1)
    num_verbs = data.vocab.num_verbs
    num_nouns = data.vocab.num_nouns
    verb_counts = np.empty((model.num_classes, num_verbs))
    noun_counts = np.empty((model.num_classes, num_nouns))
    for c in range(model.num_classes):
        verb_counts[c] = np.bincount(data.verb_idx, weights=weighted[c], minlength=num_verbs)
        noun_counts[c] = np.bincount(data.noun_idx, weights=weighted[c], minlength=num_nouns)
    return class_totals, verb_counts, noun_counts


def em_step(model: LatentClassModel, data: PairCounts) -> LatentClassModel:
    """One EM re-estimation step; returns a new model, never mutates the input.

    A class that receives zero posterior mass keeps its previous conditional
    distributions (its prior drops to 0) and a :class:`DegenerateClassWarning`
    is emitted. This cannot happen with strictly positive parameters.
    """
    class_totals, verb_counts, noun_counts = expected_counts(model, data)
    new_prior = class_totals / data.total_tokens
    alive = class_totals > 0.0
    if not alive.all():
        dead = np.flatnonzero(~alive).tolist()
        warnings.warn(f"classes {dead} received zero posterior mass; "
                      "keeping their conditional distributions",
                      DegenerateClassWarning, stacklevel=2)
    denom = np.where(alive, class_totals, 1.0)[:, None]
    new_vgc = np.where(alive[:, None], verb_counts / denom, model.verb_given_class)
    new_ngc = np.where(alive[:, None], noun_counts / denom, model.noun_given_class)
    return LatentClassModel(data.vocab, new_prior, new_vgc, new_ngc)


def train(config: TrainConfig, data: PairCounts) -> tuple[LatentClassModel, TrainTrace]:
    """Initialize from ``config.seed`` and run up to ``config.iterations`` EM steps.

    The trace records the log-likelihood after initialization and after every
    step and is checked to be non-decreasing within ``MONOTONICITY_TOL``
    relative. With a positive ``likelihood_tolerance`` the loop stops early
    once the relative gain falls below it.
    """
    if data.type_count == 0:
        raise EmptyDataError("cannot train on empty pair counts")
    model = init_model(config, data.vocab)
    trace = [model.log_likelihood(data)]
    for step in range(config.iterations):
        try:
            model = em_step(model, data)
        except Error as exc:
            raise type(exc)(f"iteration {step + 1}: {exc}") from exc
        ll = model.log_likelihood(data)
        previous = trace[-1]
        if ll < previous - MONOTONICITY_TOL * abs(previous):
            raise Error(f"iteration {step + 1}: log-likelihood decreased "
                        f"from {previous} to {ll}")
        trace.append(ll)
        if config.likelihood_tolerance > 0:
            gain = (ll - previous) / abs(previous) if previous != 0 else np.inf
            if gain < config.likelihood_tolerance:
                break
    return model, TrainTrace(tuple(trace))


@dataclass(frozen=True)
class GridResult:
    """One cell of a training grid; ``error`` is set when the cell failed."""

    config: TrainConfig
    model: LatentClassModel | None
    trace: TrainTrace | None
    error: str | None = None


def grid_train(data: PairCounts, seeds, class_counts, iteration_counts,
               init_scheme: str = "uniform_random",
               likelihood_tolerance: float = 0.0) -> list[GridResult]:
    """Train the full seeds x class_counts x iteration_counts grid.

    Cells are visited seed-major (then classes, then iterations) and trained
    independently; a failing cell is recorded with its error message and does
    not abort the rest of the grid.
    """
    seeds = list(seeds)
    class_counts = list(class_counts)
    iteration_counts = list(iteration_counts)
    if not seeds or not class_counts or not iteration_counts:
        raise EmptyDataError("grid axes must all be non-empty")
    results = []
    for seed in seeds:
        for num_classes in class_counts:
            for iterations in iteration_counts:
                config = TrainConfig(num_classes=num_classes, iterations=iterations,
                                     seed=seed, init_scheme=init_scheme,
                                     likelihood_tolerance=likelihood_tolerance)
                try:
                    model, trace = train(config, data)
                    results.append(GridResult(config, model, trace))
                except Error as exc:
                    results.append(GridResult(config, None, None, error=str(exc)))
    return results


class LatentClassEM(BaseEstimator):
    """scikit-learn style front end for the EM trainer.

    Parameters
    ----------
    n_classes : int
        Number of latent classes.
    n_iter : int
        Number of EM iterations.
    seed : int
        Seed for the deterministic initializer; equal seeds give
        bit-identical fits.
    init : str
        Initialization scheme (currently only ``"uniform_random"``).
    tol : float
        Early-stop threshold on the relative likelihood gain; 0 disables
        early stopping.

    ``fit`` accepts :class:`PairCounts`, a dense 2D count matrix
    (verbs x nouns) or a scipy-sparse-like matrix with ``tocoo()``. After
    fitting, ``model_`` holds the :class:`LatentClassModel` and ``trace_``
    the likelihood trace.
    """

    def __init__(self, n_classes: int = 1, n_iter: int = 50, seed: int = 0,
                 init: str = "uniform_random", tol: float = 0.0):
        self.n_classes = n_classes
        self.n_iter = n_iter
        self.seed = seed
        self.init = init
        self.tol = tol

    def _config(self) -> TrainConfig:
        return TrainConfig(num_classes=self.n_classes, iterations=self.n_iter,
                           seed=self.seed, init_scheme=self.init,
                           likelihood_tolerance=self.tol)

    def fit(self, X, y=None):
        data = as_pair_counts(X)
        self.model_, self.trace_ = train(self._config(), data)
        self.n_iter_ = self.trace_.iterations_run
        return self

    def score(self, X, y=None) -> float:
        """Log-likelihood of ``X`` under the fitted model."""
        if not hasattr(self, "model_"):
            raise NotFittedError("this LatentClassEM instance is not fitted yet")
        return self.model_.log_likelihood(as_pair_counts(X, self.model_.vocabulary))
