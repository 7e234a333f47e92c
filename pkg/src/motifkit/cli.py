"""Command-line entry points for every pipeline stage.

Exit codes: 0 success, 1 usage error, 2 data/validation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from . import classifier, features, matcher, metrics, pipeline
from .corpus import UsageLabel, load_corpus_document, read_layers, validate_layers
from .errors import MotifkitError


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; the contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="pipeline config JSON")
    parser.add_argument("--seed", type=int, default=None, help="random seed")
    parser.add_argument("--out", type=Path, default=None, help="output directory")


def _load_config(args) -> Optional[pipeline.PipelineConfig]:
    if args.config is None:
        return None
    content = Path(args.config).read_text(encoding="utf-8")
    return pipeline.PipelineConfig.from_json(content, base=Path(args.config).parent)


def _pick(parser, flag_value, config_value, name: str):
    value = flag_value if flag_value is not None else config_value
    if value is None:
        parser.error(f"{name} is required (flag or --config)")
    return value


def build_parser() -> _Parser:
    parser = _Parser(prog="motifkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("match", parents=[], help="scan a corpus for motif candidates")
    _common_flags(p)
    p.add_argument("--corpus", type=Path)
    p.add_argument("--rules", type=Path)

    p = sub.add_parser("features", help="extract feature vectors for candidates")
    _common_flags(p)
    p.add_argument("--corpus", type=Path)
    p.add_argument("--rules", type=Path)
    p.add_argument("--candidates", type=Path, help="candidate manifest (default <out>/candidates.jsonl)")
    p.add_argument("--feature-config", type=Path)

    p = sub.add_parser("train", help="train the usage classifier")
    _common_flags(p)
    p.add_argument("--features", type=Path, help="features.jsonl (default <out>/features.jsonl)")
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--l2-lambda", type=float, default=0.01)
    p.add_argument(
        "--class-weighting",
        choices=[w.value for w in classifier.ClassWeighting],
        default=classifier.ClassWeighting.INVERSE_FREQUENCY.value,
    )

    p = sub.add_parser("predict", help="label candidates with a trained model")
    _common_flags(p)
    p.add_argument("--features", type=Path)
    p.add_argument("--model", type=Path, help="model file (default <out>/model.json)")

    p = sub.add_parser("evaluate", help="score predictions against gold labels")
    _common_flags(p)
    p.add_argument("--predictions", type=Path)
    p.add_argument("--features", type=Path)

    p = sub.add_parser("run", help="run configured pipeline stages in order")
    _common_flags(p)

    p = sub.add_parser("agreement", help="Fleiss' kappa per annotation batch")
    _common_flags(p)
    p.add_argument("--annotations", type=Path, required=True)

    p = sub.add_parser("sample", help="sample an annotation batch of documents")
    _common_flags(p)
    p.add_argument("--candidates", type=Path, required=True)
    p.add_argument("--min", type=int, default=500, dest="min_candidates")
    p.add_argument("--max", type=int, default=1000, dest="max_candidates")
    p.add_argument("--batch-id")
    p.add_argument("--culture", action="append", help="restrict to motifs of a culture")
    p.add_argument("--rules", type=Path, help="rule file (needed for --culture)")

    p = sub.add_parser("stats", help="per-batch label counts and totals")
    _common_flags(p)
    p.add_argument("--annotations", type=Path, required=True)
    p.add_argument("--gold", type=Path, help="adjudicated labels jsonl (candidate_id, label)")

    p = sub.add_parser("validate", help="validate layer directories")
    _common_flags(p)
    p.add_argument("--corpus", type=Path, required=True)
    p.add_argument("doc_ids", nargs="*", help="restrict to these documents")

    return parser


def _cmd_match(parser, args) -> int:
    config = _load_config(args)
    corpus = _pick(parser, args.corpus, config.corpus_dir if config else None, "--corpus")
    rules = _pick(parser, args.rules, config.rules_path if config else None, "--rules")
    out = _pick(parser, args.out, config.output_dir if config else None, "--out")
    artifacts = pipeline.run_match(Path(corpus), Path(rules), Path(out))
    print(f"wrote {artifacts['candidates']}")
    return 0


def _cmd_features(parser, args) -> int:
    config = _load_config(args)
    corpus = _pick(parser, args.corpus, config.corpus_dir if config else None, "--corpus")
    rules = _pick(parser, args.rules, config.rules_path if config else None, "--rules")
    out = _pick(parser, args.out, config.output_dir if config else None, "--out")
    candidates = args.candidates or Path(out) / "candidates.jsonl"
    feature_config = args.feature_config or (config.feature_config_path if config else None)
    artifacts = pipeline.run_features(
        Path(corpus), Path(rules), Path(candidates), Path(out), feature_config
    )
    print(f"wrote {artifacts['features']}")
    return 0


def _cmd_train(parser, args) -> int:
    config = _load_config(args)
    out = _pick(parser, args.out, config.output_dir if config else None, "--out")
    features_path = args.features or Path(out) / "features.jsonl"
    seed = args.seed if args.seed is not None else (config.seed if config else 0)
    train_config = classifier.TrainConfig(
        seed=seed,
        epochs=args.epochs,
        l2_lambda=args.l2_lambda,
        class_weighting=classifier.ClassWeighting(args.class_weighting),
    )
    feature_config = None
    if config and config.feature_config_path:
        feature_config = features.FeatureConfig.from_json(
            config.feature_config_path.read_text(encoding="utf-8")
        )
    artifacts = pipeline.run_train(Path(features_path), Path(out), train_config, feature_config)
    print(f"wrote {artifacts['model']}")
    return 0


def _cmd_predict(parser, args) -> int:
    config = _load_config(args)
    out = _pick(parser, args.out, config.output_dir if config else None, "--out")
    features_path = args.features or Path(out) / "features.jsonl"
    model = args.model or (config.model_path if config else None) or Path(out) / "model.json"
    artifacts = pipeline.run_predict(Path(features_path), Path(model), Path(out))
    print(f"wrote {artifacts['predictions']}")
    return 0


def _cmd_evaluate(parser, args) -> int:
    config = _load_config(args)
    out = _pick(parser, args.out, config.output_dir if config else None, "--out")
    predictions = args.predictions or Path(out) / "predictions.jsonl"
    features_path = args.features or Path(out) / "features.jsonl"
    seed = args.seed if args.seed is not None else (config.seed if config else None)
    artifacts = pipeline.run_evaluate(Path(predictions), Path(features_path), Path(out), seed)
    print((Path(out) / "report.txt").read_text(encoding="utf-8"), end="")
    print(f"wrote {artifacts['report']}")
    return 0


def _cmd_run(parser, args) -> int:
    if args.config is None:
        parser.error("run requires --config")
    config = _load_config(args)
    assert config is not None
    if args.seed is not None or args.out is not None:
        config = pipeline.PipelineConfig(
            corpus_dir=config.corpus_dir,
            rules_path=config.rules_path,
            output_dir=Path(args.out) if args.out is not None else config.output_dir,
            feature_config_path=config.feature_config_path,
            model_path=config.model_path,
            seed=args.seed if args.seed is not None else config.seed,
            stages=config.stages,
        )
    artifacts = pipeline.run_pipeline(config)
    for name in sorted(artifacts):
        print(f"{name}: {artifacts[name]}")
    return 0


def _cmd_agreement(parser, args) -> int:
    records = pipeline.annotations_from_jsonl(
        Path(args.annotations).read_text(encoding="utf-8")
    )
    by_batch: dict[str, list] = {}
    for record in records:
        by_batch.setdefault(record.batch_id, []).append(record)
    batches = []
    for batch_id in sorted(by_batch):
        table = metrics.agreement_table_from_records(by_batch[batch_id])
        kappa = metrics.fleiss_kappa(table)
        counts = [sum(row[j] for row in table.rows) for j in range(len(table.rows[0]))]
        batches.append(
            {
                "batch_id": batch_id,
                "kappa": kappa,
                "n_items": len(table.rows),
                "n_raters": table.n_raters,
                "rating_counts": {
                    label.value: counts[i] for i, label in enumerate(UsageLabel)
                },
            }
        )
        print(f"{batch_id}: kappa={kappa:.3f} items={len(table.rows)}")
    payload = json.dumps({"batches": batches}, indent=2) + "\n"
    if args.out is not None:
        out_path = Path(args.out) / "agreement.json"
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(payload, encoding="utf-8", newline="")
        print(f"wrote {out_path}")
    return 0


def _cmd_sample(parser, args) -> int:
    config = _load_config(args)
    seed = args.seed if args.seed is not None else (config.seed if config else 0)
    candidates = pipeline.candidates_from_jsonl(
        Path(args.candidates).read_text(encoding="utf-8")
    )
    registry = None
    if args.culture:
        rules = args.rules or (config.rules_path if config else None)
        if rules is None:
            parser.error("--culture requires --rules")
        registry = matcher.compile_rules(Path(rules).read_text(encoding="utf-8")).registry
    manifest = pipeline.sample_batch(
        candidates,
        seed=seed,
        min_candidates=args.min_candidates,
        max_candidates=args.max_candidates,
        batch_id=args.batch_id,
        cultures=set(args.culture) if args.culture else None,
        registry=registry,
    )
    payload = manifest.to_json() + "\n"
    if args.out is not None:
        out_path = Path(args.out) / "batch.json"
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(payload, encoding="utf-8", newline="")
        print(f"wrote {out_path}")
    else:
        print(payload, end="")
    return 0


def _cmd_stats(parser, args) -> int:
    records = pipeline.annotations_from_jsonl(
        Path(args.annotations).read_text(encoding="utf-8")
    )
    if args.gold is not None:
        adjudicated = {}
        for line in Path(args.gold).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            adjudicated[rec["candidate_id"]] = UsageLabel(rec["label"])
    else:
        adjudicated = pipeline.adjudicated_from_records(records)
    stats, totals = metrics.batch_stats(records, adjudicated)
    print(metrics.render_batch_table(stats, totals), end="")
    if args.out is not None:
        payload = json.dumps(
            {
                "batches": [
                    {
                        "batch_id": s.batch_id,
                        "counts": {l.value: s.counts[l] for l in UsageLabel},
                        "batch_size": s.batch_size,
                        "kappa": s.kappa,
                    }
                    for s in stats
                ],
                "totals": {
                    "counts": {l.value: totals.counts[l] for l in UsageLabel},
                    "batch_size": totals.batch_size,
                },
            },
            indent=2,
        ) + "\n"
        out_path = Path(args.out) / "stats.json"
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(payload, encoding="utf-8", newline="")
        print(f"wrote {out_path}")
    return 0


def _cmd_validate(parser, args) -> int:
    corpus = Path(args.corpus)
    doc_ids = args.doc_ids or sorted(
        p.name for p in corpus.iterdir() if p.is_dir() and (p / "text.txt").exists()
    )
    n_errors = 0
    n_warnings = 0
    for doc_id in doc_ids:
        doc = load_corpus_document(corpus / doc_id)
        try:
            bundle = read_layers(corpus / doc_id, doc, check=False)
        except MotifkitError as exc:
            print(f"{doc_id}: error: {exc}")
            n_errors += 1
            continue
        report = validate_layers(bundle, doc)
        for finding in report.findings:
            print(f"{doc_id}: {finding.severity}: {finding.layer}: {finding.message}")
        n_errors += len(report.errors)
        n_warnings += len(report.warnings)
    print(f"validated {len(doc_ids)} documents: {n_errors} errors, {n_warnings} warnings")
    return 2 if n_errors else 0


_COMMANDS = {
    "match": _cmd_match,
    "features": _cmd_features,
    "train": _cmd_train,
    "predict": _cmd_predict,
    "evaluate": _cmd_evaluate,
    "run": _cmd_run,
    "agreement": _cmd_agreement,
    "sample": _cmd_sample,
    "stats": _cmd_stats,
    "validate": _cmd_validate,
}


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](parser, args)
    except MotifkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
