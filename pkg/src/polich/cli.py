"""Command-line entry points for the full pipeline.

One subcommand per batch task: validity checking, constrained decoding,
equivalence, enumeration, tree inference (all strategies), augmentation,
evaluation (trees / questions / PCD), corpus statistics, plots, and the
stdio session protocol for foreign-language callers. Every randomized
command takes --seed and is bit-reproducible given it.

Exit codes: 0 success, 1 validation or evaluation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

from . import augment as augment_mod
from . import corpus as corpus_mod
from . import decoder, expr, inference, logic, metrics, patterns, session
from .errors import EmptyCandidatesError, NoTreesForCountError, PolichError


def _tree_out(tree: expr.Tree, style: str) -> str:
    return expr.tree_text(tree, style)


def _policy_text(record: corpus_mod.PolicyRecord) -> patterns.PolicyText:
    return patterns.PolicyText(record.policy, record.bullets)


def _similarity_provider(args) -> metrics.SimilarityProvider:
    if args.similarity == "jaccard":
        return metrics.JaccardSimilarity()
    if not args.similarity_file:
        raise PolichError("--similarity external requires --similarity-file")
    return FileSimilarity(args.similarity_file)


class FileSimilarity:
    """External similarity scores from a TSV of (text a, text b, score)."""

    name = "external"

    def __init__(self, path: str):
        self.scores: dict[tuple[str, str], float] = {}
        for line in Path(path).read_text("utf-8").splitlines():
            if not line or line.startswith("#"):
                continue
            a, b, score = line.split("\t")
            self.scores[(a, b)] = float(score)
            self.scores[(b, a)] = float(score)

    def similarity(self, a: str, b: str) -> float:
        if a == b:
            return 1.0
        if (a, b) not in self.scores:
            raise PolichError(f"no external similarity for ({a!r}, {b!r})")
        return self.scores[(a, b)]


# --- subcommand implementations ----------------------------------------------

def cmd_validate(args) -> int:
    if args.expr is not None:
        if expr.is_valid(args.expr):
            print("valid")
            return 0
        print("invalid")
        return 1
    failures = 0
    for record in corpus_mod.load_corpus(args.input):
        verdict = record.tree is not None and expr.is_valid(record.tree)
        print(f"{record.id}\t{'valid' if verdict else 'invalid'}")
        failures += 0 if verdict else 1
    return 1 if failures else 0


def cmd_equiv(args) -> int:
    a = expr.parse_text(args.a)
    b = expr.parse_text(args.b)
    if logic.identical(a, b):
        print("identical")
    elif logic.equivalent(a, b):
        print("equivalent")
    else:
        print("not equivalent")
    return 0


def cmd_enumerate(args) -> int:
    for tree in logic.enumerate_trees(args.n, args.dedup):
        print(_tree_out(tree, args.format))
    return 0


def _decode_config(args) -> decoder.DecodeConfig:
    return decoder.STRICT if args.strict_replay else decoder.DecodeConfig()


def cmd_decode(args) -> int:
    config = _decode_config(args)
    if args.input:
        # corpus replay: the decoder must reproduce every gold tree exactly
        if not args.replay:
            raise PolichError("--input requires --replay for corpus decoding")
        mismatches = 0
        for record in corpus_mod.load_corpus(args.input):
            if record.tree is None:
                continue
            target = expr.tokenize(record.tree)
            n = len(record.questions)
            out = decoder.decode(decoder.make_replay_scorer(target), n, decoder.STRICT)
            ok = out == target
            print(f"{record.id}\t{'ok' if ok else 'MISMATCH: ' + expr.to_text(out)}")
            mismatches += 0 if ok else 1
        return 1 if mismatches else 0
    if args.target is not None:
        scorer: decoder.TokenScorer = decoder.make_replay_scorer(expr.tokenize(args.target))
    elif args.scorer == "random":
        if args.seed is None:
            raise PolichError("--scorer random requires --seed")
        scorer = decoder.RandomScorer(args.seed)
    else:
        scorer = decoder.UniformScorer()
    trace: list[str] | None = [] if args.trace else None
    out = decoder.decode(scorer, args.questions, config, trace)
    if trace is not None:
        for line in trace:
            print(line, file=sys.stderr)
    print(expr.to_text(out, args.format))
    return 0


def _derived_seed(seed: int, record_id: str) -> int:
    return random.Random(f"{seed}:{record_id}").randrange(2 ** 31)


def cmd_infer(args) -> int:
    records = corpus_mod.load_corpus(args.input)
    train = corpus_mod.load_corpus(args.train) if args.train else None
    outputs: list[corpus_mod.PolicyRecord] = []

    stats = None
    scores = None
    if args.strategy == "most-common":
        if train is None:
            raise PolichError("--strategy most-common requires --train")
        stats = inference.build_training_stats(train)
    if args.strategy == "scoring":
        if train is None:
            raise PolichError("--strategy scoring requires --train")
        if args.scores:
            scores = inference.PrecomputedScores(corpus_mod.load_scores(args.scores))
    if args.strategy == "random" and args.seed is None:
        raise PolichError("--strategy random requires --seed")

    for record in records:
        n = len(record.questions)
        try:
            if args.strategy == "constrained":
                if args.replay:
                    if record.tree is None:
                        raise EmptyCandidatesError(record.id)
                    scorer: decoder.TokenScorer = decoder.make_replay_scorer(
                        expr.tokenize(record.tree))
                    out = decoder.decode(scorer, n, decoder.STRICT)
                elif args.scorer == "random":
                    if args.seed is None:
                        raise PolichError("--scorer random requires --seed")
                    out = decoder.decode(
                        decoder.RandomScorer(_derived_seed(args.seed, record.id)),
                        n, _decode_config(args))
                else:
                    out = decoder.decode(decoder.UniformScorer(), n, _decode_config(args))
                predicted = expr.parse(out)
            elif args.strategy == "scoring":
                candidates = inference.candidate_set(train, n)
                scorer2 = (scores.scorer_for(record.id) if scores
                           else inference.LexicalTreeScorer())
                predicted = inference.rank_candidates(record, candidates, scorer2)
            elif args.strategy == "pattern":
                predicted = patterns.infer_tree_patterns(_policy_text(record), n)
            elif args.strategy == "random":
                predicted = inference.random_tree(n, _derived_seed(args.seed, record.id))
            else:  # most-common
                predicted = inference.most_common_tree(stats, n)
        except (EmptyCandidatesError, NoTreesForCountError):
            print(f"notice: skipping {record.id}: no candidate tree with "
                  f"{n} questions", file=sys.stderr)
            continue
        import dataclasses
        outputs.append(dataclasses.replace(record, tree=_tree_out(predicted, "plain")))
    corpus_mod.save_corpus(outputs, args.output)
    print(f"inferred {len(outputs)}/{len(records)} trees "
          f"({args.strategy})", file=sys.stderr)
    return 0


def cmd_augment(args) -> int:
    records = corpus_mod.load_corpus(args.input)
    strategies = tuple(args.strategies.split(",")) if args.strategies else augment_mod.STRATEGIES
    for strategy in strategies:
        if strategy not in augment_mod.STRATEGIES:
            raise PolichError(f"unknown strategy {strategy!r}")
    config = augment_mod.AugmentConfig(
        strategies=strategies,
        caps={s: args.cap for s in strategies},
        rng_seed=args.seed)
    augmented = augment_mod.augment_corpus(records, config)
    corpus_mod.save_corpus(augmented, args.output)
    print(f"augmented {len(records)} records into {len(augmented)} new ones",
          file=sys.stderr)
    return 0


def _paired_trees(pred_records, gold_records):
    gold_by_id = {r.id: r for r in gold_records}
    pairs = []
    for pred in pred_records:
        gold = gold_by_id.get(pred.id)
        if gold is None or pred.tree is None or gold.tree is None:
            continue
        pairs.append((expr.parse_text(pred.tree), expr.parse_text(gold.tree)))
    return pairs


def cmd_eval_trees(args) -> int:
    pairs = _paired_trees(corpus_mod.load_corpus(args.pred),
                          corpus_mod.load_corpus(args.gold))
    result = metrics.tree_metrics(pairs)
    sys.stdout.write(metrics.render_report("tree-inference", result.to_dict()))
    return 0


def cmd_eval_questions(args) -> int:
    provider = _similarity_provider(args)
    gold_by_id = {r.id: r for r in corpus_mod.load_corpus(args.gold)}
    bleu1s, bleu4s, rouges, sims = [], [], [], []
    for pred in corpus_mod.load_corpus(args.pred):
        gold = gold_by_id.get(pred.id)
        if gold is None or not gold.questions:
            continue
        for question in pred.questions:
            bleu1s.append(metrics.bleu(question, gold.questions, 1))
            bleu4s.append(metrics.bleu(question, gold.questions, 4))
            rouges.append(max(metrics.rouge_l(question, g) for g in gold.questions))
            sims.append(metrics.max_similarity(question, gold.questions, provider))
    def mean(xs): return sum(xs) / len(xs) if xs else 0.0
    payload = {"bleu1": mean(bleu1s), "bleu4": mean(bleu4s),
               "rouge_l": mean(rouges), "similarity": mean(sims),
               "similarity_provider": provider.name, "questions": len(sims)}
    sys.stdout.write(metrics.render_report("question-generation", payload))
    return 0


def cmd_eval_pcd(args) -> int:
    provider = _similarity_provider(args)
    records = corpus_mod.load_corpus(args.input)
    pred_by_id = ({r.id: r for r in corpus_mod.load_corpus(args.trees)}
                  if args.trees else None)
    rows = []
    for record in records:
        source = record
        if pred_by_id is not None:
            source = pred_by_id.get(record.id)
            if source is None or source.tree is None:
                continue
        elif record.tree is None:
            continue
        tree = expr.parse_text(source.tree)
        if source.questions == record.questions:
            remap = {i: i for i in range(len(record.questions))}
        else:
            remap = metrics.align_questions(source.questions, record.questions, provider)
        for scenario in record.scenarios:
            answers = {i: scenario.answers.get(remap[i]) if i in remap else None
                       for i in expr.question_set(tree)}
            rows.append((tree, answers, scenario.gold_label))
    report = metrics.pcd_evaluate(rows)
    payload = report.to_dict()
    payload["similarity_provider"] = provider.name
    payload["note"] = ("unknown predictions use strong-Kleene propagation; "
                       "see unknown_count")
    sys.stdout.write(metrics.render_report("pcd", payload))
    return 0


def cmd_stats(args) -> int:
    stats = metrics.corpus_stats(corpus_mod.load_corpus(args.input))
    sys.stdout.write(metrics.render_report("corpus-stats", stats.to_dict()))
    return 0


def cmd_plot(args) -> int:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    stats = metrics.corpus_stats(corpus_mod.load_corpus(args.input))
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    panels = [
        ("complexity_by_questions.png", stats.question_count_dist,
         "questions per tree"),
        ("complexity_by_operators.png", stats.unique_operator_count_dist,
         "unique operators per tree (incl. parentheses)"),
    ]
    for filename, dist, label in panels:
        fig, ax = plt.subplots(figsize=(5, 3.2))
        keys = sorted(dist)
        ax.bar(keys, [dist[k] for k in keys], color="#4878d0")
        ax.set_xlabel(label)
        ax.set_ylabel("trees")
        ax.set_xticks(keys)
        fig.tight_layout()
        fig.savefig(out_dir / filename, dpi=150)
        plt.close(fig)
        print(out_dir / filename)
    return 0


def cmd_session(args) -> int:
    session.serve(sys.stdin, sys.stdout)
    return 0


# --- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polich")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check expression validity")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--expr")
    group.add_argument("--input")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("equiv", help="compare two expressions")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("enumerate", help="enumerate canonical trees")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dedup", choices=["syntactic", "equivalence_class"],
                   default="syntactic")
    p.add_argument("--format", choices=["plain", "bracket"], default="plain")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("decode", help="constrained decoding")
    p.add_argument("--questions", type=int, default=None)
    p.add_argument("--scorer", choices=["uniform", "random"], default="uniform")
    p.add_argument("--target", help="replay this expression")
    p.add_argument("--input", help="corpus for --replay")
    p.add_argument("--replay", action="store_true",
                   help="replay every gold tree in --input")
    p.add_argument("--seed", type=int)
    p.add_argument("--strict-replay", action="store_true")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--format", choices=["plain", "bracket"], default="plain")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("infer", help="batch tree inference")
    p.add_argument("--strategy", required=True,
                   choices=["constrained", "scoring", "pattern", "random", "most-common"])
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--train")
    p.add_argument("--scores")
    p.add_argument("--scorer", choices=["uniform", "random"], default="uniform")
    p.add_argument("--replay", action="store_true")
    p.add_argument("--seed", type=int)
    p.add_argument("--strict-replay", action="store_true")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("augment", help="corpus augmentation")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--strategies", help="comma-separated subset")
    p.add_argument("--cap", type=int, default=1)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("eval-trees", help="identical/equivalent rates")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.set_defaults(func=cmd_eval_trees)

    p = sub.add_parser("eval-questions", help="BLEU / ROUGE-L / similarity")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--similarity", choices=["jaccard", "external"], default="jaccard")
    p.add_argument("--similarity-file")
    p.set_defaults(func=cmd_eval_questions)

    p = sub.add_parser("eval-pcd", help="end-to-end compliance accuracy")
    p.add_argument("--input", required=True, help="gold corpus with scenarios")
    p.add_argument("--trees", help="predicted-tree corpus (defaults to gold trees)")
    p.add_argument("--similarity", choices=["jaccard", "external"], default="jaccard")
    p.add_argument("--similarity-file")
    p.set_defaults(func=cmd_eval_pcd)

    p = sub.add_parser("stats", help="corpus statistics")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("plot", help="tree complexity histograms")
    p.add_argument("--input", required=True)
    p.add_argument("--output-dir", required=True)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("session", help="stdio JSON-lines session protocol")
    p.set_defaults(func=cmd_session)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PolichError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
