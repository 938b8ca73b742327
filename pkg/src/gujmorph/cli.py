"""Command-line pipeline: generate, train, predict, evaluate, compare, gradcheck.

Every command is deterministic given its flags, files and seed.  Exit codes
are a stable scripting contract: 0 success, 1 I/O failure, 2 configuration
error, 3 data/alignment error.  A flat key=value config file can supply
defaults; explicit command-line flags win.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time

import numpy as np

from . import baseline, corpus, metrics, nn, paradigm, segmenter, tagger, tagset
from .errors import ConfigError, DataError
from .modelio import load_model, save_model
from .script import nfc

_logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2
EXIT_DATA = 3

_HYPER_KEYS = {
    "embed_dim": int, "hidden_dim": int, "lr": float, "epochs": int,
    "batch": int, "threshold": float, "seed": int,
}


def _read_config(path: str) -> dict[str, str]:
    values = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{line_no}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
    return values


def _apply_config(args: argparse.Namespace) -> None:
    """Fill in flag values from --config for flags left at their None default."""
    if not getattr(args, "config", None):
        return
    values = _read_config(args.config)
    for key, raw in values.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise ConfigError(f"unknown config key {key!r}")
        if getattr(args, attr) is None:
            caster = _HYPER_KEYS.get(attr, str)
            try:
                setattr(args, attr, caster(raw))
            except ValueError:
                raise ConfigError(f"config key {key!r}: bad value {raw!r}") from None


def _hyper_from_args(args: argparse.Namespace) -> nn.Hyper:
    hyper = nn.Hyper(
        embed_dim=args.embed_dim if args.embed_dim is not None else 32,
        hidden_dim=args.hidden_dim if args.hidden_dim is not None else 64,
        lr=args.lr if args.lr is not None else 1e-3,
        epochs=args.epochs if args.epochs is not None else 30,
        batch_size=args.batch if args.batch is not None else 32,
        seed=args.seed if args.seed is not None else 0,
        threshold=args.threshold if args.threshold is not None else 0.5,
    )
    hyper.validate()
    return hyper


def _load_records(path: str, need_boundary: bool = False) -> list[corpus.Record]:
    with open(path, encoding="utf-8") as handle:
        records, issues = corpus.parse_unimorph(handle)
    if need_boundary:
        issues.extend(corpus.attach_boundaries(records))
    if issues:
        sys.stderr.write(corpus.quality_report(issues))
    if not records:
        raise DataError(f"{path}: no parseable records")
    return records


def _open_out(path: str | None):
    if path in (None, "-"):
        return sys.stdout
    return open(path, "w", encoding="utf-8", newline="\n")


def _cmd_generate(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else 0
    records: list[corpus.Record] = []
    kinds = ("N", "V", "ADJ") if args.pos == "all" else (args.pos,)
    if args.roots:
        with open(args.roots, encoding="utf-8") as handle:
            root_lines = [line.strip() for line in handle if line.strip()]
    else:
        root_lines = None

    for pos in kinds:
        if root_lines is not None:
            names = [line.split("\t")[0] for line in root_lines]
        else:
            names = paradigm.random_roots(args.n_roots, seed=seed + hash(pos) % 1000)
        if pos == "N":
            if root_lines is not None and all("\t" in line for line in root_lines):
                genders = {
                    line.split("\t")[0]: line.split("\t")[1] for line in root_lines
                }
            else:
                genders = paradigm.assign_genders(names)
            records.extend(paradigm.gen_nouns(names, genders, plural=args.plural))
        elif pos == "V":
            records.extend(paradigm.gen_verbs(names))
        else:
            records.extend(paradigm.gen_adjectives(names))

    if args.split is not None:
        if not args.out_test:
            raise ConfigError("--split requires --out-test")
        train, test = corpus.split_train_test(records, args.split, seed)
        corpus.write_tsv(train, args.out)
        corpus.write_tsv(test, args.out_test)
        print(f"wrote {len(train)} train records to {args.out}, "
              f"{len(test)} test records to {args.out_test}")
    else:
        corpus.write_tsv(records, args.out)
        print(f"wrote {len(records)} records to {args.out}")
    return EXIT_OK


def _cmd_train(args: argparse.Namespace) -> int:
    hyper = _hyper_from_args(args)
    records = _load_records(args.train, need_boundary=True)
    started = time.perf_counter()
    if args.task == "segment":
        model, history = segmenter.train_boundary(records, hyper)
    elif args.task == "tag":
        if not args.pos:
            raise ConfigError("--task tag requires --pos")
        subset = [r for r in records if r.pos == args.pos]
        if not subset:
            raise DataError(f"{args.train}: no records with POS {args.pos}")
        registry = tagset.register_all(subset)
        model, history = tagger.train_tagger(subset, args.pos, registry, hyper)
        if args.registry:
            tagset.save_registry(registry, args.registry)
    else:
        raise ConfigError(f"unknown task {args.task!r}")
    elapsed = time.perf_counter() - started
    save_model(model, args.model)
    print(f"final train loss {history[-1]:.6f} after {len(history)} epochs "
          f"({elapsed:.1f}s); model written to {args.model}")
    return EXIT_OK


def _iter_word_lines(path: str):
    with open(path, encoding="utf-8") as handle:
        for raw in handle:
            line = raw.rstrip("\n")
            if line.strip():
                yield line


def _cmd_predict(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    threshold = args.threshold
    out = _open_out(args.out)
    try:
        if args.task == "segment":
            if args.rules:
                rules = segmenter.load_rules_file(args.rules)
            else:
                rules = segmenter.default_rules()
            for line in _iter_word_lines(args.words):
                parts = line.split("\t")
                word = nfc(parts[0])
                pos = parts[1] if len(parts) > 1 and parts[1] else None
                gender = parts[2] if len(parts) > 2 and parts[2] else None
                analysis = segmenter.analyze_word(
                    model, rules, word, pos=pos, gender=gender, threshold=threshold
                )
                out.write(f"{word}\t{'+'.join(analysis.morphs)}\t{analysis.root}\n")
        elif args.task == "tag":
            for line in _iter_word_lines(args.words):
                word = nfc(line.split("\t")[0])
                bundle, dist = tagger.predict_bundle(model, word)
                out.write(
                    f"{word}\t{tagset.canonicalize(bundle)}\t{float(dist.max()):.6f}\n"
                )
        else:
            raise ConfigError(f"unknown task {args.task!r}")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _cmd_evaluate(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    records = _load_records(args.test, need_boundary=True)
    out = _open_out(args.out)
    try:
        if args.task == "segment":
            predicted = [
                segmenter.predict_splits(model, r.surface, threshold=args.threshold)
                for r in records
            ]
            result = metrics.seg_accuracy(records, predicted)
            out.write(
                f"segmentation exact-match accuracy {metrics.pct(result.accuracy)}% "
                f"({result.n_correct}/{result.n_total})\n"
            )
        elif args.task == "tag":
            registry = tagger.model_registry(model)
            pos = model.classes[0].split(";", 1)[0]
            subset = [r for r in records if r.pos == pos]
            if not subset:
                raise DataError(f"{args.test}: no records with POS {pos}")
            for record in subset:
                registry.register(record.bundle)
            gold = [r.bundle for r in subset]
            predicted = [tagger.predict_bundle(model, r.surface)[0] for r in subset]
            result = metrics.tag_metrics(gold, predicted, registry)
            result.ambiguity_ceiling = tagger.ambiguity_audit(subset).ceiling
            out.write(metrics.render_tag_report(pos, result))
        else:
            raise ConfigError(f"unknown task {args.task!r}")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _cmd_compare(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    train_records = _load_records(args.train, need_boundary=True)
    test_records = _load_records(args.test, need_boundary=True)
    mdl = baseline.train_mdl(
        (r.surface for r in train_records),
        seed=args.seed if args.seed is not None else 0,
        max_passes=args.mdl_passes,
    )
    if args.dump_lexicon:
        baseline.dump_lexicon(mdl, args.dump_lexicon)

    by_pos: dict[str, list[corpus.Record]] = {}
    for record in test_records:
        by_pos.setdefault(record.pos, []).append(record)

    neural_scores = {}
    baseline_scores = {}
    for pos, group in sorted(by_pos.items()):
        gold_cuts = metrics.gold_cut_sets(group)
        neural_cuts = [
            corpus.cut_set(
                segmenter.predict_splits(model, r.surface, threshold=args.threshold)
            )
            for r in group
        ]
        mdl_cuts = [
            corpus.cuts_of_morphs(baseline.segment_mdl(mdl, r.surface)) for r in group
        ]
        neural_scores[pos] = metrics.seg_accuracy_cuts(gold_cuts, neural_cuts)
        baseline_scores[pos] = metrics.seg_accuracy_cuts(gold_cuts, mdl_cuts)

    report = metrics.compare_report(neural_scores, baseline_scores)
    out = _open_out(args.out)
    try:
        out.write(report.render())
        if args.tsv:
            out.write(report.to_tsv())
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _cmd_gradcheck(args: argparse.Namespace) -> int:
    seeds = [int(s) for s in args.seeds.split(",") if s.strip()]
    embed_dim = args.embed_dim if args.embed_dim is not None else 4
    hidden_dim = args.hidden_dim if args.hidden_dim is not None else 6
    worst = 0.0
    worst_desc = ""
    for seed in seeds:
        for kind in ("boundary", "class"):
            result = run_gradcheck(kind, seed, embed_dim, hidden_dim)
            print(f"seed {seed} {kind:>8}: max rel err {result.max_rel_error:.3e} "
                  f"at {result.worst_param}")
            if result.max_rel_error > worst:
                worst = result.max_rel_error
                worst_desc = f"{kind} seed {seed} {result.worst_param}"
    print(f"overall max relative error {worst:.3e} ({worst_desc})")
    if worst < 1e-4:
        print("gradcheck PASS")
        return EXIT_OK
    print("gradcheck FAIL")
    return EXIT_DATA


def run_gradcheck(
    kind: str, seed: int, embed_dim: int = 4, hidden_dim: int = 6,
    corrupt: str | None = None,
) -> nn.GradCheckResult:
    """Finite-difference check of one head on a seeded toy model.

    corrupt names a tensor whose analytic gradient gets perturbed before the
    comparison -- a test hook proving the checker can fail.
    """
    from .script import build_vocab, encode_ids

    rng = np.random.default_rng(seed)
    words = ["સવારે", "રમતો", "ઘરમાં", "કરે"]
    vocab = build_vocab(words)
    hyper = nn.Hyper(embed_dim=embed_dim, hidden_dim=hidden_dim, seed=seed)
    id_seqs = [encode_ids(vocab, w) for w in words]
    if kind == "boundary":
        params = nn.init_params("boundary", vocab, hyper, rng=rng)
        labels = [
            [1 if rng.random() < 0.3 and i < len(seq) - 1 else 0
             for i in range(len(seq))]
            for seq in id_seqs
        ]
        batch = nn.pack_batch(id_seqs, labels=labels)
    elif kind == "class":
        classes = ["N;M;SG;NOM", "N;F;SG;LOC", "N;N;PL;GEN"]
        params = nn.init_params("class", vocab, hyper, classes=classes, rng=rng)
        targets = [int(rng.integers(len(classes))) for _ in id_seqs]
        batch = nn.pack_batch(id_seqs, classes=targets)
    else:
        raise ConfigError(f"unknown head kind {kind!r}")

    if corrupt:
        grads = nn.backward(params, batch)
        grads[corrupt] = grads[corrupt] + 1.0  # deliberate damage
        return nn.grad_check(params, batch, analytic=grads)
    return nn.grad_check(params, batch)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gujmorph",
        description="Gujarati morphological analysis toolkit",
    )
    parser.add_argument("--verbose", action="store_true", help="log progress at INFO")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_hyper_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="key=value defaults file (flags win)")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--epochs", type=int, default=None)
        p.add_argument("--lr", type=float, default=None)
        p.add_argument("--embed-dim", type=int, default=None, dest="embed_dim")
        p.add_argument("--hidden-dim", type=int, default=None, dest="hidden_dim")
        p.add_argument("--batch", type=int, default=None)
        p.add_argument("--threshold", type=float, default=None)

    gen = sub.add_parser("generate", help="emit a synthetic Unimorph TSV corpus")
    gen.add_argument("--pos", choices=["N", "V", "ADJ", "all"], default="N")
    gen.add_argument("--roots", help="root file (root[<TAB>gender] per line)")
    gen.add_argument("--n-roots", type=int, default=20, dest="n_roots",
                     help="number of synthetic roots when --roots is absent")
    gen.add_argument("--plural", action="store_true",
                     help="cross nouns with number as well as case")
    gen.add_argument("--split", type=float, default=None,
                     help="also split train/test at this ratio")
    gen.add_argument("--out", required=True)
    gen.add_argument("--out-test", dest="out_test",
                     help="test-set path when --split is given")
    gen.add_argument("--config", help="key=value defaults file (flags win)")
    gen.add_argument("--seed", type=int, default=None)
    gen.set_defaults(func=_cmd_generate)

    train = sub.add_parser("train", help="train a boundary or tagging model")
    train.add_argument("--task", choices=["segment", "tag"], required=True)
    train.add_argument("--train", required=True, help="training TSV path")
    train.add_argument("--model", required=True, help="output model path")
    train.add_argument("--pos", choices=["N", "V", "ADJ"],
                       help="POS category (tag task)")
    train.add_argument("--registry", help="also write the class registry here")
    add_hyper_flags(train)
    train.set_defaults(func=_cmd_train)

    predict = sub.add_parser("predict", help="run a trained model over words")
    predict.add_argument("--task", choices=["segment", "tag"], required=True)
    predict.add_argument("--model", required=True)
    predict.add_argument("--words", required=True,
                         help="input words, one per line (segment: optional "
                              "TAB pos TAB gender columns)")
    predict.add_argument("--rules", help="root-normalization rule file")
    predict.add_argument("--threshold", type=float, default=None)
    predict.add_argument("--out", default="-")
    predict.add_argument("--config", help="key=value defaults file (flags win)")
    predict.set_defaults(func=_cmd_predict)

    evaluate = sub.add_parser("evaluate", help="score a model against gold TSV")
    evaluate.add_argument("--task", choices=["segment", "tag"], required=True)
    evaluate.add_argument("--model", required=True)
    evaluate.add_argument("--test", required=True, help="gold TSV path")
    evaluate.add_argument("--threshold", type=float, default=None)
    evaluate.add_argument("--out", default="-")
    evaluate.add_argument("--config", help="key=value defaults file (flags win)")
    evaluate.set_defaults(func=_cmd_evaluate)

    compare = sub.add_parser(
        "compare", help="neural vs unsupervised MDL segmentation on one test set"
    )
    compare.add_argument("--model", required=True, help="trained boundary model")
    compare.add_argument("--train", required=True,
                         help="training TSV (fits the MDL baseline)")
    compare.add_argument("--test", required=True, help="gold TSV path")
    compare.add_argument("--mdl-passes", type=int, default=20, dest="mdl_passes")
    compare.add_argument("--dump-lexicon", dest="dump_lexicon",
                         help="write the MDL lexicon (morph TAB count) here")
    compare.add_argument("--threshold", type=float, default=None)
    compare.add_argument("--tsv", action="store_true",
                         help="append machine-readable TSV rows")
    compare.add_argument("--out", default="-")
    compare.add_argument("--config", help="key=value defaults file (flags win)")
    compare.add_argument("--seed", type=int, default=None)
    compare.set_defaults(func=_cmd_compare)

    gradcheck = sub.add_parser(
        "gradcheck", help="finite-difference gradient verification"
    )
    gradcheck.add_argument("--seeds", default="0,1,2")
    gradcheck.add_argument("--embed-dim", type=int, default=None, dest="embed_dim")
    gradcheck.add_argument("--hidden-dim", type=int, default=None, dest="hidden_dim")
    gradcheck.add_argument("--config", help="key=value defaults file (flags win)")
    gradcheck.set_defaults(func=_cmd_gradcheck)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        _apply_config(args)
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
