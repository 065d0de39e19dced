"""Command-line front door.

Exit status: 0 on success, 1 on usage errors, 2 on data or validation
errors. All file output is written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import os
import sys

from . import corpus, evaluation, reports, slots, training
from .errors import Error
from .model import LatentClassModel, PairCounts
from .util import atomic_write, fmt17

PAIRS_FORMAT = "pairs TSV: verb_functor<TAB>noun[<TAB>count], '#' comments"
SAMPLES_FORMAT = "samples TSV: verb<TAB>noun[<TAB>count]"
PAIR_SAMPLES_FORMAT = "samples TSV: verb<TAB>subject<TAB>object[<TAB>count]"
TRIPLES_FORMAT = "triples TSV: verb<TAB>noun<TAB>distractor (symbols)"
MODEL_FORMAT = ("model file: 'LCMODEL 1 <classes> <verbs> <nouns>' header, "
                "V/N symbol lines, C class priors, sparse VP/NP parameter rows")


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; the CLI contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _read_pairs_file(path):
    with open(path, encoding="utf-8") as handle:
        return corpus.read_pairs(handle)


def _load_model(path) -> LatentClassModel:
    return LatentClassModel.load(path)


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _cmd_train(args) -> int:
    _, data = _read_pairs_file(args.pairs)
    config = training.TrainConfig(num_classes=args.classes, iterations=args.iterations,
                                  seed=args.seed, likelihood_tolerance=args.tol)
    model, trace = training.train(config, data)
    model.save(args.out)
    if args.trace:
        atomic_write(args.trace, trace.to_tsv())
    print(f"model\t{args.out}")
    print(f"log_likelihood\t{fmt17(trace.log_likelihoods[-1])}")
    print(f"iterations_run\t{trace.iterations_run}")
    return 0


def _cmd_grid(args) -> int:
    _, data = _read_pairs_file(args.pairs)
    results = training.grid_train(data, args.seeds, args.classes, args.iterations,
                                  likelihood_tolerance=args.tol)
    os.makedirs(args.out_dir, exist_ok=True)
    triples = None
    if args.triples:
        with open(args.triples, encoding="utf-8") as handle:
            triples = evaluation.load_triples(handle, data.vocab)
    rows = []
    failed = 0
    for result in results:
        cfg = result.config
        tag = f"s{cfg.seed}_c{cfg.num_classes}_i{cfg.iterations}"
        if result.error is not None:
            failed += 1
            print(f"cell {tag} failed: {result.error}", file=sys.stderr)
            continue
        result.model.save(os.path.join(args.out_dir, f"model_{tag}.lc"))
        rows.append(reports.MetricRow(cfg.num_classes, cfg.iterations, cfg.seed,
                                      "log_likelihood",
                                      result.trace.log_likelihoods[-1]))
        if triples is not None:
            rows.append(reports.MetricRow(cfg.num_classes, cfg.iterations, cfg.seed,
                                          "pseudo_accuracy",
                                          evaluation.pseudo_accuracy(result.model, triples)))
        if args.smooth_sample:
            rows.append(reports.MetricRow(
                cfg.num_classes, cfg.iterations, cfg.seed, "smoothing_power",
                evaluation.smoothing_power(result.model, args.smooth_sample,
                                           args.smooth_seed, args.smooth_threshold)))
    curves_path = os.path.join(args.out_dir, "curves.tsv")
    atomic_write(curves_path, reports.emit_curves(rows))
    print(f"cells\t{len(results)}")
    print(f"failed\t{failed}")
    print(f"curves\t{curves_path}")
    return 0


def _cmd_eval_pseudo(args) -> int:
    model = _load_model(args.model) if args.model else None
    if args.triples:
        # symbols in the triples file are resolved against the scoring model
        if model is None:
            raise Error("--triples without --model: nothing to do")
        with open(args.triples, encoding="utf-8") as handle:
            triples = evaluation.load_triples(handle, model.vocabulary)
    else:
        if not args.pairs:
            raise Error("--pairs is required unless --triples is given")
        vocab, data = _read_pairs_file(args.pairs)
        split = evaluation.build_pseudo_corpus(data, args.test_pairs, args.freq_min,
                                               args.freq_max, args.seed)
        print(f"triples\t{len(split.triples)}")
        print(f"dropped_no_distractor\t{split.dropped_no_distractor}")
        print(f"dropped_by_frequency\t{split.dropped_by_frequency}")
        if args.out_dir:
            evaluation.save_split(split, args.out_dir)
            print(f"split\t{args.out_dir}")
        if model is not None:
            # re-index through symbols: the model may order its vocabulary
            # differently from the corpus file
            try:
                triples = tuple(
                    evaluation.EvalTriple(model.vocabulary.verb_index(vocab.verbs[t.verb]),
                                          model.vocabulary.noun_index(vocab.nouns[t.noun]),
                                          model.vocabulary.verb_index(vocab.verbs[t.distractor]))
                    for t in split.triples)
            except KeyError as exc:
                raise Error(f"triple symbol unknown to the model: {exc.args[0]!r}") from None
    if model is not None:
        accuracy = evaluation.pseudo_accuracy(model, triples)
        print(f"accuracy\t{fmt17(accuracy)}")
    return 0


def _cmd_eval_smooth(args) -> int:
    model = _load_model(args.model)
    power = evaluation.smoothing_power(model, args.sample, args.seed, args.threshold)
    print(f"smoothing_power\t{fmt17(power)}")
    if args.pairs:
        _, data = _read_pairs_file(args.pairs)
        print(f"type_coverage\t{fmt17(evaluation.type_coverage_baseline(data))}")
    return 0


def _label_command(args, reader) -> int:
    model = _load_model(args.model)
    with open(args.samples, encoding="utf-8") as handle:
        samples = reader(handle)
    results, failures = slots.label_many(model, samples, iterations=args.iterations,
                                         top_k=args.top_k)
    for verb, message in failures:
        print(f"skipped {verb}: {message}", file=sys.stderr)
    entries = [entry for _, _, entry in results]
    atomic_write(args.out, reports.render_lexicon_tsv(entries))
    if args.report:
        atomic_write(args.report, reports.render_lexicon_report(entries))
    print(f"labeled\t{len(results)}")
    print(f"failed\t{len(failures)}")
    print(f"lexicon\t{args.out}")
    return 0


def _cmd_label_intrans(args) -> int:
    return _label_command(args, corpus.read_noun_samples)


def _cmd_label_trans(args) -> int:
    return _label_command(args, corpus.read_pair_samples)


def _cmd_report_class(args) -> int:
    model = _load_model(args.model)
    _, data = _read_pairs_file(args.pairs)
    remapped = _remap_counts(data, model)
    report = reports.class_report(model, remapped, args.class_index,
                                  args.top_verbs, args.top_nouns)
    text = reports.render_class_report(report)
    if args.out:
        atomic_write(args.out, text)
        print(f"report\t{args.out}")
    else:
        print(text, end="")
    return 0


def _remap_counts(data: PairCounts, model: LatentClassModel) -> PairCounts:
    """Re-index pair counts onto the model vocabulary, dropping unknown symbols."""
    if data.vocab == model.vocabulary:
        return data
    vocab = model.vocabulary
    mapping = {}
    for v, n, c in zip(data.verb_idx.tolist(), data.noun_idx.tolist(),
                       data.counts.tolist()):
        verb = data.vocab.verbs[v]
        noun = data.vocab.nouns[n]
        try:
            key = (vocab.verb_index(verb), vocab.noun_index(noun))
        except KeyError:
            continue
        mapping[key] = mapping.get(key, 0.0) + c
    return PairCounts.from_mapping(vocab, mapping)


def _cmd_gen_synth(args) -> int:
    spec = corpus.PlantedSpec.block_model(
        num_classes=args.classes, verbs_per_class=args.verbs_per_class,
        nouns_per_class=args.nouns_per_class,
        tail_nouns_per_class=args.tail_nouns, tail_mass=args.tail_mass,
        leak=args.leak, token_count=args.tokens, seed=args.seed)
    _, counts, truth = corpus.generate_planted(spec)
    atomic_write(args.out, corpus.write_pairs(counts))
    if args.truth:
        truth.save(args.truth)
    print(f"pairs\t{args.out}")
    print(f"types\t{counts.type_count}")
    print(f"tokens\t{fmt17(counts.total_tokens)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="lexclass",
        description="Latent-class models of verb-noun co-occurrence: train with EM, "
                    "evaluate by pseudo-disambiguation and smoothing power, and label "
                    "subcategorization slots of individual verbs.",
        epilog=f"File formats: {PAIRS_FORMAT}; {MODEL_FORMAT}.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("train", help="train one model with EM",
                       description=f"Train a latent-class model. Input {PAIRS_FORMAT}. "
                                   f"Output {MODEL_FORMAT}.")
    p.add_argument("--pairs", required=True, help="training pair corpus (TSV)")
    p.add_argument("--classes", type=int, required=True, help="number of latent classes")
    p.add_argument("--iterations", type=int, required=True, help="EM iterations")
    p.add_argument("--seed", type=int, default=0, help="initializer seed (default 0)")
    p.add_argument("--tol", type=float, default=0.0,
                   help="early-stop threshold on relative likelihood gain (default 0: off)")
    p.add_argument("--out", required=True, help="model output path")
    p.add_argument("--trace", help="optional per-iteration log-likelihood TSV")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("grid", help="train a seeds x classes x iterations grid",
                       description="Train every grid cell, save models, and emit a "
                                   "metric curves TSV (num_classes, iterations, seed, "
                                   "metric, value) plus seed-averaged rows.")
    p.add_argument("--pairs", required=True, help="training pair corpus (TSV)")
    p.add_argument("--seeds", type=_int_list, required=True,
                   help="comma-separated seeds, e.g. 1,2,3")
    p.add_argument("--classes", type=_int_list, required=True,
                   help="comma-separated class counts")
    p.add_argument("--iterations", type=_int_list, required=True,
                   help="comma-separated iteration counts")
    p.add_argument("--tol", type=float, default=0.0, help="early-stop threshold")
    p.add_argument("--out-dir", required=True, help="directory for models and curves.tsv")
    p.add_argument("--triples", help=f"score pseudo-disambiguation against {TRIPLES_FORMAT}")
    p.add_argument("--smooth-sample", type=int, default=0,
                   help="also measure smoothing power with this sample size")
    p.add_argument("--smooth-seed", type=int, default=0, help="smoothing sample seed")
    p.add_argument("--smooth-threshold", type=float, default=0.0,
                   help="positivity threshold for smoothing power")
    p.set_defaults(func=_cmd_grid)

    p = sub.add_parser("eval-pseudo", help="build a pseudo-disambiguation corpus and/or "
                                           "score a model",
                       description="Cut a test set out of the pair corpus, build "
                                   "(verb, noun, distractor) triples, optionally persist "
                                   f"the split, and score a model. {TRIPLES_FORMAT}.")
    p.add_argument("--pairs", help="original pair corpus (TSV); required unless "
                                   "--triples is given")
    p.add_argument("--test-pairs", type=int, default=3000,
                   help="number of pair types to cut (default 3000)")
    p.add_argument("--freq-min", type=float, default=30.0,
                   help="minimum original-corpus token frequency (default 30)")
    p.add_argument("--freq-max", type=float, default=3000.0,
                   help="maximum original-corpus token frequency (default 3000)")
    p.add_argument("--seed", type=int, default=0, help="sampling seed")
    p.add_argument("--out-dir", help="write train/test/triples TSV files here")
    p.add_argument("--triples", help="reuse an existing triples file instead of building")
    p.add_argument("--model", help="score this model on the triples")
    p.set_defaults(func=_cmd_eval_pseudo)

    p = sub.add_parser("eval-smooth", help="measure smoothing power of a model",
                       description="Sample verb-noun combinations uniformly and report "
                                   "the fraction with joint probability above the "
                                   "threshold; with --pairs also report the no-clustering "
                                   "type-coverage baseline.")
    p.add_argument("--model", required=True, help="model file")
    p.add_argument("--sample", type=int, default=1000, help="sample size (default 1000)")
    p.add_argument("--seed", type=int, default=0, help="sampling seed")
    p.add_argument("--threshold", type=float, default=0.0,
                   help="positivity threshold (default 0)")
    p.add_argument("--pairs", help="training corpus for the type-coverage baseline")
    p.set_defaults(func=_cmd_eval_smooth)

    for name, fmt, func in (("label-intrans", SAMPLES_FORMAT, _cmd_label_intrans),
                            ("label-trans", PAIR_SAMPLES_FORMAT, _cmd_label_trans)):
        p = sub.add_parser(name, help=f"label verb slots with classes ({name.split('-')[1]})",
                           description=f"Run the slot-labeling EM per verb. Input {fmt}. "
                                       "Output: lexicon TSV verb<TAB>slot<TAB>label<TAB>"
                                       "prob<TAB>filler:score;... sorted by label "
                                       "probability.")
        p.add_argument("--model", required=True, help="frozen clustering model")
        p.add_argument("--samples", required=True, help="filler sample file (TSV)")
        p.add_argument("--iterations", type=int, default=50,
                       help="labeling EM iterations (default 50)")
        p.add_argument("--top-k", type=int, default=10,
                       help="fillers to keep per entry (default 10)")
        p.add_argument("--out", required=True, help="lexicon TSV output path")
        p.add_argument("--report", help="optional human-readable report path")
        p.set_defaults(func=func)

    p = sub.add_parser("report-class", help="render one class's matrix report",
                       description="Rank the class's most probable verbs and nouns and "
                                   "mark the pairs observed in the training data.")
    p.add_argument("--model", required=True, help="model file")
    p.add_argument("--pairs", required=True, help="training corpus (for seen-pair dots)")
    p.add_argument("--class", dest="class_index", type=int, required=True,
                   help="class index to report")
    p.add_argument("--top-verbs", type=int, default=20, help="verbs to list (default 20)")
    p.add_argument("--top-nouns", type=int, default=20, help="nouns to list (default 20)")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.set_defaults(func=_cmd_report_class)

    p = sub.add_parser("gen-synth", help="generate a synthetic planted-class corpus",
                       description="Sample a corpus from a block-structured ground-truth "
                                   "model (near-disjoint class supports) for recovery "
                                   "experiments.")
    p.add_argument("--classes", type=int, default=5, help="number of planted classes")
    p.add_argument("--verbs-per-class", type=int, default=20)
    p.add_argument("--nouns-per-class", type=int, default=30,
                   help="frequent head nouns per class")
    p.add_argument("--tail-nouns", type=int, default=0,
                   help="rarely-sampled extra nouns per class (default 0)")
    p.add_argument("--tail-mass", type=float, default=0.1,
                   help="noun mass diverted to the tail (default 0.1)")
    p.add_argument("--leak", type=float, default=0.01,
                   help="class mass leaked outside its block (default 0.01)")
    p.add_argument("--tokens", type=int, default=50000, help="tokens to sample")
    p.add_argument("--seed", type=int, default=0, help="sampling seed")
    p.add_argument("--out", required=True, help="pairs TSV output path")
    p.add_argument("--truth", help="optionally save the generating model here")
    p.set_defaults(func=_cmd_gen_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except Error as exc:
        print(f"lexclass: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"lexclass: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
