"""End-to-end pipeline orchestration and batch sampling.

Every stage reads and writes plain files (the same standoff artifacts a
human annotator would see), so re-running a downstream stage from cached
upstream files reproduces it exactly.  All randomness flows through one
explicit seed; rerunning with identical inputs and seed yields
byte-identical artifacts.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import classifier, features, matcher, metrics
from .corpus import (
    AnnotationRecord,
    Candidate,
    Document,
    Span,
    UsageLabel,
    load_corpus_document,
    read_brat,
    read_layers,
    write_brat,
)
from .errors import MotifkitError, PipelineError

STAGE_ORDER = ("match", "features", "train", "predict", "evaluate")


@dataclass(frozen=True)
class PipelineConfig:
    corpus_dir: Path
    rules_path: Path
    output_dir: Path
    feature_config_path: Optional[Path] = None
    model_path: Optional[Path] = None
    seed: int = 0
    stages: tuple[str, ...] = STAGE_ORDER

    def __post_init__(self):
        unknown = [s for s in self.stages if s not in STAGE_ORDER]
        if unknown:
            raise PipelineError(f"unknown stages: {unknown}")
        if not self.stages:
            raise PipelineError("no stages requested")
        positions = [STAGE_ORDER.index(s) for s in self.stages]
        if positions != sorted(positions) or len(set(positions)) != len(positions):
            raise PipelineError(
                f"stages must follow the order {list(STAGE_ORDER)}, got {list(self.stages)}"
            )

    @classmethod
    def from_json(cls, content: str, base: Optional[Path] = None) -> "PipelineConfig":
        data = json.loads(content)
        base = base or Path(".")

        def resolve(key: str) -> Optional[Path]:
            value = data.get(key)
            return None if value is None else (base / value)

        corpus_dir = resolve("corpus")
        rules_path = resolve("rules")
        output_dir = resolve("out")
        if corpus_dir is None or rules_path is None or output_dir is None:
            raise PipelineError("config must name corpus, rules, and out")
        return cls(
            corpus_dir=corpus_dir,
            rules_path=rules_path,
            output_dir=output_dir,
            feature_config_path=resolve("feature_config"),
            model_path=resolve("model"),
            seed=int(data.get("seed", 0)),
            stages=tuple(data.get("stages", STAGE_ORDER)),
        )


def _corpus_doc_ids(corpus_dir: Path) -> list[str]:
    if not corpus_dir.is_dir():
        raise PipelineError(f"corpus directory not found: {corpus_dir}")
    return sorted(
        p.name for p in corpus_dir.iterdir() if p.is_dir() and (p / "text.txt").exists()
    )


def _write_text(path: Path, content: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(content, encoding="utf-8", newline="")


# ---------------------------------------------------------------------------
# Candidate manifest


def candidates_to_jsonl(candidates: Sequence[Candidate]) -> str:
    lines = []
    for c in candidates:
        lines.append(
            json.dumps(
                {
                    "candidate_id": c.candidate_id,
                    "doc_id": c.doc_id,
                    "begin": c.span.begin,
                    "end": c.span.end,
                    "motif_id": c.motif_id,
                    "surface": c.surface,
                },
                separators=(",", ":"),
            )
        )
    return "".join(line + "\n" for line in lines)


def candidates_from_jsonl(content: str) -> list[Candidate]:
    out = []
    for line in content.splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        out.append(
            Candidate(
                candidate_id=rec["candidate_id"],
                doc_id=rec["doc_id"],
                span=Span(rec["begin"], rec["end"]),
                motif_id=rec["motif_id"],
                surface=rec["surface"],
            )
        )
    return out


# ---------------------------------------------------------------------------
# Annotation records (agreement / stats input)


def annotations_from_jsonl(content: str) -> list[AnnotationRecord]:
    """Parse annotation records; span/motif fields are optional plumbing.

    (candidate_id, annotator_id) must be unique within a batch.
    """
    records = []
    seen: set[tuple[str, str, str]] = set()
    for lineno, line in enumerate(content.splitlines(), start=1):
        if not line.strip():
            continue
        rec = json.loads(line)
        try:
            cid = rec["candidate_id"]
            doc_id = rec.get("doc_id") or cid.split("#", 1)[0]
            surface = rec.get("surface", "")
            begin = rec.get("begin", 0)
            end = rec.get("end", max(begin + 1, begin + len(surface)))
            candidate = Candidate(
                candidate_id=cid,
                doc_id=doc_id,
                span=Span(begin, end),
                motif_id=rec.get("motif_id", "unknown"),
                surface=surface,
            )
            key = (cid, rec["annotator_id"], rec["batch_id"])
            if key in seen:
                raise PipelineError(
                    f"annotations line {lineno}: duplicate rating of {cid!r} "
                    f"by {rec['annotator_id']!r} in batch {rec['batch_id']!r}"
                )
            seen.add(key)
            records.append(
                AnnotationRecord(
                    candidate=candidate,
                    annotator_id=rec["annotator_id"],
                    label=UsageLabel(rec["label"]),
                    batch_id=rec["batch_id"],
                )
            )
        except (KeyError, ValueError) as exc:
            raise PipelineError(f"annotations line {lineno}: {exc}") from None
    return records


def adjudicated_from_records(
    records: Sequence[AnnotationRecord],
) -> dict[str, UsageLabel]:
    """Treat single-annotator records as already adjudicated labels."""
    labels: dict[str, UsageLabel] = {}
    for record in records:
        cid = record.candidate.candidate_id
        if cid in labels and labels[cid] != record.label:
            raise PipelineError(
                f"conflicting labels for {cid!r}; supply an adjudicated gold file"
            )
        labels[cid] = record.label
    return labels


# ---------------------------------------------------------------------------
# Stages


def run_match(corpus_dir: Path, rules_path: Path, out_dir: Path) -> dict[str, Path]:
    if not rules_path.exists():
        raise PipelineError(f"match: rules file not found: {rules_path}")
    ruleset = matcher.compile_rules(rules_path.read_text(encoding="utf-8"))
    all_candidates: list[Candidate] = []
    ann_dir = out_dir / "ann"
    for doc_id in _corpus_doc_ids(corpus_dir):
        doc = load_corpus_document(corpus_dir / doc_id)
        tokens = None
        if (corpus_dir / doc_id / "tokens.jsonl").exists():
            tokens = read_layers(corpus_dir / doc_id, doc).tokens
        candidates = matcher.match_document(doc, ruleset, tokens)
        _write_text(ann_dir / f"{doc_id}.ann", write_brat([(c, None) for c in candidates], doc))
        all_candidates.extend(candidates)
    path = out_dir / "candidates.jsonl"
    _write_text(path, candidates_to_jsonl(all_candidates))
    return {"candidates": path, "ann_dir": ann_dir}


def _gold_labels_for_doc(corpus_dir: Path, doc: Document) -> dict[tuple[int, int, str], UsageLabel]:
    ann_path = corpus_dir / doc.doc_id / f"{doc.doc_id}.ann"
    if not ann_path.exists():
        return {}
    labels = {}
    for cand, label in read_brat(ann_path.read_text(encoding="utf-8"), doc):
        if label is not None:
            labels[(cand.span.begin, cand.span.end, cand.motif_id)] = label
    return labels


def run_features(
    corpus_dir: Path,
    rules_path: Path,
    candidates_path: Path,
    out_dir: Path,
    feature_config_path: Optional[Path] = None,
) -> dict[str, Path]:
    if not candidates_path.exists():
        raise PipelineError(f"features: candidate manifest not found: {candidates_path}")
    if not rules_path.exists():
        raise PipelineError(f"features: rules file not found: {rules_path}")
    config = features.FeatureConfig()
    if feature_config_path is not None:
        config = features.FeatureConfig.from_json(
            feature_config_path.read_text(encoding="utf-8")
        )
    ruleset = matcher.compile_rules(rules_path.read_text(encoding="utf-8"))
    candidates = candidates_from_jsonl(candidates_path.read_text(encoding="utf-8"))

    bundles = {}
    labels: dict[str, UsageLabel] = {}
    for doc_id in sorted({c.doc_id for c in candidates}):
        doc = load_corpus_document(corpus_dir / doc_id)
        bundles[doc_id] = read_layers(corpus_dir / doc_id, doc)
        gold = _gold_labels_for_doc(corpus_dir, doc)
        for c in candidates:
            if c.doc_id != doc_id:
                continue
            label = gold.get((c.span.begin, c.span.end, c.motif_id))
            if label is not None:
                labels[c.candidate_id] = label

    dataset = features.vectorize_batch(
        candidates, bundles, ruleset.registry, config, labels
    )
    path = out_dir / "features.jsonl"
    _write_text(path, features.dataset_to_jsonl(dataset))
    return {"features": path}


def run_train(
    features_path: Path,
    out_dir: Path,
    train_config: classifier.TrainConfig,
    feature_config: Optional[features.FeatureConfig] = None,
) -> dict[str, Path]:
    if not features_path.exists():
        raise PipelineError(f"train: features file not found: {features_path}")
    dataset = features.dataset_from_jsonl(
        features_path.read_text(encoding="utf-8"), feature_config
    )
    labeled = features.Dataset(
        schema_id=dataset.schema_id,
        schema=dataset.schema,
        rows=tuple(row for row in dataset.rows if row[1] is not None),
    )
    model = classifier.train(labeled, train_config)
    path = out_dir / "model.json"
    _write_text(path, classifier.serialize_model(model) + "\n")
    return {"model": path}


def run_predict(
    features_path: Path, model_path: Path, out_dir: Path
) -> dict[str, Path]:
    if not features_path.exists():
        raise PipelineError(f"predict: features file not found: {features_path}")
    if not model_path.exists():
        raise PipelineError(f"predict: model file not found: {model_path}")
    model = classifier.deserialize_model(model_path.read_text(encoding="utf-8"))
    dataset = features.dataset_from_jsonl(features_path.read_text(encoding="utf-8"))
    lines = []
    for fv, _ in dataset.rows:
        label, scores = classifier.predict(model, fv)
        lines.append(
            json.dumps(
                {
                    "candidate_id": fv.candidate_id,
                    "label": label.value,
                    "scores": {k.value: v for k, v in scores.items()},
                },
                separators=(",", ":"),
            )
        )
    path = out_dir / "predictions.jsonl"
    _write_text(path, "".join(line + "\n" for line in lines))
    return {"predictions": path}


def run_evaluate(
    predictions_path: Path,
    features_path: Path,
    out_dir: Path,
    seed: Optional[int] = None,
) -> dict[str, Path]:
    if not predictions_path.exists():
        raise PipelineError(f"evaluate: predictions file not found: {predictions_path}")
    if not features_path.exists():
        raise PipelineError(f"evaluate: features file not found: {features_path}")
    predictions: dict[str, UsageLabel] = {}
    for line in predictions_path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        predictions[rec["candidate_id"]] = UsageLabel(rec["label"])
    dataset = features.dataset_from_jsonl(features_path.read_text(encoding="utf-8"))
    gold = [(fv.candidate_id, label) for fv, label in dataset.rows if label is not None]
    if not gold:
        raise PipelineError("evaluate: no scored candidates")
    pred = []
    for cid, _ in gold:
        if cid not in predictions:
            raise PipelineError(f"evaluate: no prediction for {cid!r}")
        pred.append((cid, predictions[cid]))
    report = metrics.prf_report(metrics.confusion(pred, gold))
    json_path = out_dir / "report.json"
    _write_text(json_path, metrics.report_to_json(report, seed=seed) + "\n")
    text_path = out_dir / "report.txt"
    _write_text(text_path, metrics.render_eval_table(report))
    return {"report": json_path, "report_txt": text_path}


def run_pipeline(config: PipelineConfig) -> dict[str, Path]:
    """Execute the requested stages in order; returns artifact paths.

    Each stage consumes the previous stage's files, so a suffix of the
    pipeline can be re-run against cached upstream artifacts.
    """
    out = config.output_dir
    artifacts: dict[str, Path] = {}
    try:
        for stage in config.stages:
            if stage == "match":
                artifacts.update(run_match(config.corpus_dir, config.rules_path, out))
            elif stage == "features":
                artifacts.update(
                    run_features(
                        config.corpus_dir,
                        config.rules_path,
                        out / "candidates.jsonl",
                        out,
                        config.feature_config_path,
                    )
                )
            elif stage == "train":
                feature_config = None
                if config.feature_config_path is not None:
                    feature_config = features.FeatureConfig.from_json(
                        config.feature_config_path.read_text(encoding="utf-8")
                    )
                artifacts.update(
                    run_train(
                        out / "features.jsonl",
                        out,
                        classifier.TrainConfig(seed=config.seed),
                        feature_config,
                    )
                )
            elif stage == "predict":
                model_path = config.model_path or (out / "model.json")
                artifacts.update(run_predict(out / "features.jsonl", model_path, out))
            elif stage == "evaluate":
                artifacts.update(
                    run_evaluate(
                        out / "predictions.jsonl",
                        out / "features.jsonl",
                        out,
                        seed=config.seed,
                    )
                )
    except MotifkitError as exc:
        raise PipelineError(f"stage {stage!r} failed: {exc}") from exc

    def relative(path: Path) -> str:
        try:
            return str(path.relative_to(out))
        except ValueError:
            return str(path)

    manifest = {
        "seed": config.seed,
        "stages": list(config.stages),
        "artifacts": {k: relative(v) for k, v in sorted(artifacts.items())},
    }
    _write_text(out / "run.json", json.dumps(manifest, indent=2) + "\n")
    artifacts["run"] = out / "run.json"
    return artifacts


# ---------------------------------------------------------------------------
# Annotation batch sampling


@dataclass(frozen=True)
class BatchManifest:
    batch_id: str
    doc_ids: tuple[str, ...]
    candidate_count: int
    seed: int
    exhausted: bool = False
    overshoot: bool = False

    def to_json(self) -> str:
        return json.dumps(
            {
                "batch_id": self.batch_id,
                "doc_ids": list(self.doc_ids),
                "candidate_count": self.candidate_count,
                "seed": self.seed,
                "exhausted": self.exhausted,
                "overshoot": self.overshoot,
            },
            indent=2,
        )


def sample_batch(
    candidates: Sequence[Candidate],
    seed: int,
    min_candidates: int = 500,
    max_candidates: int = 1000,
    batch_id: Optional[str] = None,
    cultures: Optional[set[str]] = None,
    registry=None,
) -> BatchManifest:
    """Draw documents in seed-driven random order until the batch holds at
    least min_candidates candidates (or the corpus is exhausted).

    The count never exceeds max_candidates except by the final
    document's overshoot, which is allowed and flagged.  An optional
    culture filter restricts counting to motifs of those cultures
    (requires the registry).
    """
    if min_candidates > max_candidates:
        raise PipelineError(
            f"min_candidates {min_candidates} exceeds max_candidates {max_candidates}"
        )
    if cultures is not None:
        if registry is None:
            raise PipelineError("culture filter requires the motif registry")
        wanted = {c.lower() for c in cultures}
        candidates = [
            c
            for c in candidates
            if c.motif_id in registry
            and registry[c.motif_id].culture.value.lower() in wanted
        ]

    per_doc: dict[str, int] = {}
    for c in candidates:
        per_doc[c.doc_id] = per_doc.get(c.doc_id, 0) + 1

    doc_order = sorted(per_doc)
    rng = random.Random(seed)
    rng.shuffle(doc_order)

    chosen: list[str] = []
    count = 0
    for doc_id in doc_order:
        if count >= min_candidates:
            break
        chosen.append(doc_id)
        count += per_doc[doc_id]

    return BatchManifest(
        batch_id=batch_id or f"batch-{seed}",
        doc_ids=tuple(chosen),
        candidate_count=count,
        seed=seed,
        exhausted=count < min_candidates,
        overshoot=count > max_candidates,
    )
