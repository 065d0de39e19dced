"""Latent-class models of verb-noun co-occurrence.

Train a class-mediated joint model of verb functors and nouns with EM,
evaluate it by pseudo-disambiguation and smoothing power, and run a second
EM stage that labels subcategorization-frame slots of individual verbs,
producing lexicon entries and class reports.
"""

from .corpus import (NounPairSample, NounSample, PlantedSpec, generate_planted,
                     read_noun_samples, read_pair_samples, read_pairs, write_pairs)
from .errors import (CorpusError, DegenerateClassWarning, EmptyDataError, Error,
                     ModelFormatError, ZeroProbabilityError)
from .evaluation import (EvalSplit, EvalTriple, build_pseudo_corpus, load_triples,
                         pseudo_accuracy, save_split, smoothing_power,
                         type_coverage_baseline)
from .model import (LatentClassModel, PairCounts, VerbFunctor, Vocabulary,
                    as_pair_counts)
from .reports import (ClassReport, MetricRow, class_report, emit_curves,
                      render_class_report, render_lexicon_report, render_lexicon_tsv)
from .slots import (LexiconEntry, SlotLabeling, label_intransitive, label_many,
                    label_transitive, make_entry)
from .training import (GridResult, LatentClassEM, TrainConfig, TrainTrace, em_step,
                       expected_counts, grid_train, init_model, train)

__version__ = "0.1.0"

__all__ = [
    "CorpusError", "DegenerateClassWarning", "EmptyDataError", "Error",
    "ModelFormatError", "ZeroProbabilityError",
    "VerbFunctor", "Vocabulary", "PairCounts", "LatentClassModel", "as_pair_counts",
    "TrainConfig", "TrainTrace", "GridResult", "LatentClassEM",
    "init_model", "expected_counts", "em_step", "train", "grid_train",
    "EvalTriple", "EvalSplit", "build_pseudo_corpus", "pseudo_accuracy",
    "smoothing_power", "type_coverage_baseline", "save_split", "load_triples",
    "NounSample", "NounPairSample", "PlantedSpec", "generate_planted",
    "read_pairs", "write_pairs", "read_noun_samples", "read_pair_samples",
    "SlotLabeling", "LexiconEntry", "label_intransitive", "label_transitive",
    "make_entry", "label_many",
    "ClassReport", "MetricRow", "class_report", "render_class_report",
    "emit_curves", "render_lexicon_tsv", "render_lexicon_report",
    "__version__",
]
