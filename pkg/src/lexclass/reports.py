"""Report rendering: class matrices, metric curves, and lexicon listings.

All renderers are pure functions of their inputs, so identical inputs give
byte-identical text. Human-readable reports print probabilities with 4
decimals; TSV outputs carry 17 significant digits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import EmptyDataError
from .model import LatentClassModel, PairCounts
from .util import fmt4, fmt17


@dataclass(frozen=True)
class ClassReport:
    """Top-ranked members of one class plus the observed-pair grid.

    ``seen`` marks which (top verb, top noun) combinations occur in the
    training data. Lists are sorted by probability, descending, with ties
    broken by vocabulary index.
    """

    class_index: int
    class_prob: float
    top_verbs: tuple[tuple[str, float], ...]
    top_nouns: tuple[tuple[str, float], ...]
    seen: np.ndarray

    def __post_init__(self):
        self.seen.setflags(write=False)


def _top(symbols, probs, k: int):
    order = np.argsort(-probs, kind="stable")[:k]
    return order, tuple((symbols[i], float(probs[i])) for i in order.tolist())


def class_report(model: LatentClassModel, data: PairCounts, class_index: int,
                 top_verbs: int = 20, top_nouns: int = 20) -> ClassReport:
    """Rank a class's most probable verbs and nouns and mark seen pairs.

    ``top_verbs`` / ``top_nouns`` larger than the vocabulary are clamped.
    """
    if not 0 <= class_index < model.num_classes:
        raise IndexError(f"class index {class_index} out of range "
                         f"[0, {model.num_classes})")
    if top_verbs < 0 or top_nouns < 0:
        raise ValueError("top_verbs and top_nouns must be >= 0")
    vocab = model.vocabulary
    v_order, verbs = _top(vocab.verbs, model.verb_given_class[class_index], top_verbs)
    n_order, nouns = _top(vocab.nouns, model.noun_given_class[class_index], top_nouns)
    pair_set = data.pair_set
    seen = np.array([[(int(v), int(n)) in pair_set for n in n_order] for v in v_order],
                    dtype=bool)
    seen = seen.reshape(len(verbs), len(nouns))
    return ClassReport(class_index, float(model.class_prior[class_index]),
                       verbs, nouns, seen)


def render_class_report(report: ClassReport) -> str:
    """Fixed-width text rendering: noun legend, then a verb x noun dot grid."""
    lines = [f"CLASS {report.class_index}",
             f"PROB {fmt4(report.class_prob)}",
             ""]
    lines.append("TOP NOUNS (grid columns):")
    for j, (sym, p) in enumerate(report.top_nouns, start=1):
        lines.append(f"  [{j:>3}] {fmt4(p)} {sym}")
    lines.append("")
    width = max((len(sym) for sym, _ in report.top_verbs), default=0)
    header_cells = " ".join(f"{j:>2}" for j in range(1, len(report.top_nouns) + 1))
    lines.append("TOP VERBS ('.' marks a pair seen in the training data):")
    lines.append(f"{'P(V|C)':>8} {'VERB':<{width}} {header_cells}")
    for i, (sym, p) in enumerate(report.top_verbs):
        cells = " ".join(f"{'.' if report.seen[i, j] else ' ':>2}"
                         for j in range(len(report.top_nouns)))
        lines.append(f"{fmt4(p):>8} {sym:<{width}} {cells}")
    return "\n".join(lines) + "\n"


class MetricRow(NamedTuple):
    """One evaluation measurement of one trained grid cell."""

    num_classes: int
    iterations: int
    seed: int
    metric: str
    value: float


def emit_curves(rows) -> str:
    """Render metric rows as TSV plus seed-aggregated mean/min/max rows.

    Raw rows keep input order; aggregated rows (one per
    ``(num_classes, iterations, metric)``) are sorted and carry ``mean`` in
    the seed column plus extra min/max columns.
    """
    rows = list(rows)
    if not rows:
        raise EmptyDataError("no metric rows to emit")
    lines = ["#num_classes\titerations\tseed\tmetric\tvalue"]
    lines.extend(f"{r.num_classes}\t{r.iterations}\t{r.seed}\t{r.metric}\t{fmt17(r.value)}"
                 for r in rows)
    groups: dict[tuple[int, int, str], list[float]] = {}
    for r in rows:
        groups.setdefault((r.num_classes, r.iterations, r.metric), []).append(r.value)
    lines.append("#num_classes\titerations\tseed\tmetric\tmean\tmin\tmax")
    for (classes, iters, metric) in sorted(groups):
        values = groups[(classes, iters, metric)]
        lines.append(f"{classes}\t{iters}\tmean\t{metric}\t"
                     f"{fmt17(sum(values) / len(values))}\t"
                     f"{fmt17(min(values))}\t{fmt17(max(values))}")
    return "\n".join(lines) + "\n"


def _render_label(label) -> str:
    if isinstance(label, tuple):
        return f"{label[0]},{label[1]}"
    return str(label)


def _render_filler(filler) -> str:
    if isinstance(filler, tuple):
        return f"{filler[0]},{filler[1]}"
    return str(filler)


def render_lexicon_tsv(entries) -> str:
    """One row per entry: verb, slot signature, label, probability, fillers.

    Fillers are ``filler:score`` joined by ``;``; transitive fillers render
    as ``subject,object``.
    """
    lines = ["#verb\tslot\tlabel\tprob\tfillers"]
    for e in entries:
        fillers = ";".join(f"{_render_filler(f)}:{fmt17(s)}" for f, s in e.top_fillers)
        lines.append(f"{e.verb}\t{e.slot_signature}\t{_render_label(e.best_label)}\t"
                     f"{fmt17(e.best_label_prob)}\t{fillers}")
    return "\n".join(lines) + "\n"


def render_lexicon_report(entries) -> str:
    """Human-readable lexicon: one block per verb with ranked fillers."""
    blocks = []
    for e in entries:
        lines = [f"{e.verb}  {e.slot_signature}  class {_render_label(e.best_label)}  "
                 f"p={fmt4(e.best_label_prob)}"]
        width = max((len(_render_filler(f)) for f, _ in e.top_fillers), default=0)
        lines.extend(f"    {_render_filler(f):<{width}}  {fmt4(s)}"
                     for f, s in e.top_fillers)
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n" if blocks else ""
