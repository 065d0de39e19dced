"""Independent brute-force oracles used to derive expected test values.

Everything here is pure Python (dicts, loops, math.log) on purpose: these
implementations share no code with the package so they can serve as an
independent check of the vectorized versions.
"""

import math


def joint(prior, vgc, ngc, v, n):
    """Naive sum over classes of prior[c] * p(v|c) * p(n|c)."""
    return sum(prior[c] * vgc[c][v] * ngc[c][n] for c in range(len(prior)))


def posterior(prior, vgc, ngc, v, n):
    terms = [prior[c] * vgc[c][v] * ngc[c][n] for c in range(len(prior))]
    total = sum(terms)
    return [t / total for t in terms]


def noun_given_verb(prior, vgc, ngc, v, n, num_nouns):
    """Conditional via full enumeration of the noun marginal."""
    marginal = sum(joint(prior, vgc, ngc, v, m) for m in range(num_nouns))
    return joint(prior, vgc, ngc, v, n) / marginal


def log_likelihood(prior, vgc, ngc, pairs):
    """Term-by-term sum of f * ln joint over a {(v, n): f} mapping."""
    return sum(f * math.log(joint(prior, vgc, ngc, v, n))
               for (v, n), f in pairs.items())


def em_step(prior, vgc, ngc, pairs, num_verbs, num_nouns):
    """Exhaustive enumeration of one re-estimation step.

    Walks every (class, observed pair) combination explicitly, accumulating
    the three numerators, then normalizes. Returns (prior', vgc', ngc') as
    nested lists.
    """
    num_classes = len(prior)
    class_mass = [0.0] * num_classes
    verb_mass = [[0.0] * num_verbs for _ in range(num_classes)]
    noun_mass = [[0.0] * num_nouns for _ in range(num_classes)]
    for (v, n), f in pairs.items():
        post = posterior(prior, vgc, ngc, v, n)
        for c in range(num_classes):
            w = f * post[c]
            class_mass[c] += w
            verb_mass[c][v] += w
            noun_mass[c][n] += w
    total = sum(pairs.values())
    new_prior = [m / total for m in class_mass]
    new_vgc = [[verb_mass[c][v] / class_mass[c] for v in range(num_verbs)]
               for c in range(num_classes)]
    new_ngc = [[noun_mass[c][n] / class_mass[c] for n in range(num_nouns)]
               for c in range(num_classes)]
    return new_prior, new_vgc, new_ngc


def label_step(weights, noun_probs, sample):
    """One mixture-weight update for slot labeling.

    ``noun_probs[c][n]`` are the frozen per-class noun probabilities,
    ``sample`` maps noun index -> frequency.
    """
    num_classes = len(weights)
    total = sum(sample.values())
    new = [0.0] * num_classes
    for n, f in sample.items():
        prob = sum(weights[c] * noun_probs[c][n] for c in range(num_classes))
        for c in range(num_classes):
            new[c] += f * weights[c] * noun_probs[c][n] / prob
    return [m / total for m in new]


def pair_label_step(weights, noun_probs, sample):
    """One class-pair weight update; ``sample`` maps (subj, obj) index pairs to f."""
    num_classes = len(weights)
    total = sum(sample.values())
    new = [[0.0] * num_classes for _ in range(num_classes)]
    for (n1, n2), f in sample.items():
        prob = sum(weights[c1][c2] * noun_probs[c1][n1] * noun_probs[c2][n2]
                   for c1 in range(num_classes) for c2 in range(num_classes))
        for c1 in range(num_classes):
            for c2 in range(num_classes):
                new[c1][c2] += (f * weights[c1][c2] * noun_probs[c1][n1]
                                * noun_probs[c2][n2] / prob)
    return [[m / total for m in row] for row in new]
