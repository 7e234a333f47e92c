"""Fixed-schema feature extraction over candidates and their layer bundles.

Six feature groups target the three motif classes: token/parse position
relative to events, semantic relation to animate entities (coreference,
SRL, possession), figurative-language flags, nearby NER tags, grammar of
the candidate head, and an expected-vs-predicted motif type check.

Every feature value is finite and lies in [0, 1]; absence of a layer is
encoded as the neutral extreme (distance 1.0, booleans 0, NONE/OTHER
one-hots) so partially preprocessed corpora remain usable.
"""

from __future__ import annotations

import hashlib
import json
import logging
from collections import deque
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .corpus import (
    Candidate,
    CandFlags,
    Dep,
    LayerBundle,
    MotifEntry,
    MotifType,
    Span,
    UsageLabel,
)
from .errors import FeatureError

log = logging.getLogger(__name__)

FEATURE_GROUPS = ("position", "semantic", "figurative", "ner", "grammar", "type_check")

SRL_ROLES = ("ARG0", "ARG1", "ARG2", "ARGM", "PRED", "NONE")
NER_LABELS = ("PERSON", "ORG", "LOC", "MISC")
HEAD_POS = ("NOUN", "PROPN", "VERB", "ADJ", "OTHER")
DEP_RELS = ("nsubj", "obj", "obl", "poss", "appos", "OTHER")
MOTIF_TYPES = ("Character", "Prop", "Event")


@dataclass(frozen=True)
class FeatureConfig:
    enabled_groups: frozenset[str] = frozenset(FEATURE_GROUPS)
    window_size: int = 5
    parse_distance_cap: int = 10

    def __post_init__(self):
        unknown = self.enabled_groups - set(FEATURE_GROUPS)
        if unknown:
            raise FeatureError(f"unknown feature groups: {sorted(unknown)}")
        if not self.enabled_groups:
            raise FeatureError("at least one feature group must be enabled")
        if self.window_size < 1:
            raise FeatureError("window_size must be >= 1")
        if self.parse_distance_cap < 1:
            raise FeatureError("parse_distance_cap must be >= 1")

    @classmethod
    def from_json(cls, content: str) -> "FeatureConfig":
        data = json.loads(content)
        return cls(
            enabled_groups=frozenset(data.get("groups", FEATURE_GROUPS)),
            window_size=int(data.get("window", 5)),
            parse_distance_cap=int(data.get("parse_cap", 10)),
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "groups": [g for g in FEATURE_GROUPS if g in self.enabled_groups],
                "window": self.window_size,
                "parse_cap": self.parse_distance_cap,
            }
        )


def schema_names(config: FeatureConfig) -> tuple[str, ...]:
    """Ordered feature names; depends only on the config, never on data."""
    names: list[str] = []
    if "position" in config.enabled_groups:
        names += ["tok_dist_event", "in_event", "event_same_sentence"]
    if "semantic" in config.enabled_groups:
        names += ["in_animate_chain", "in_character_chain", "parse_dist_animate"]
        names += [f"srl_role_{r}" for r in SRL_ROLES]
        names += ["srl_with_animate", "possession"]
    if "figurative" in config.enabled_groups:
        names += ["metaphor_sent", "simile_sent"]
    if "ner" in config.enabled_groups:
        names += [f"ner_{l}" for l in NER_LABELS] + ["ner_NONE"]
        names += [f"ner_win_{l}" for l in NER_LABELS]
    if "grammar" in config.enabled_groups:
        names += [f"head_pos_{p}" for p in HEAD_POS]
        names += [f"dep_rel_{r}" for r in DEP_RELS]
    if "type_check" in config.enabled_groups:
        names += [f"expected_{t}" for t in MOTIF_TYPES]
        names += [f"predicted_{t}" for t in MOTIF_TYPES]
        names += ["type_match"]
    return tuple(names)


def schema_id(config: FeatureConfig) -> str:
    joined = "\n".join(schema_names(config))
    return hashlib.sha256(joined.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class FeatureVector:
    candidate_id: str
    values: Mapping[str, float]
    schema_id: str


@dataclass(frozen=True)
class Dataset:
    schema_id: str
    schema: tuple[str, ...]
    rows: tuple[tuple[FeatureVector, Optional[UsageLabel]], ...] = ()

    def __post_init__(self):
        for fv, _ in self.rows:
            if fv.schema_id != self.schema_id:
                raise FeatureError(
                    f"row {fv.candidate_id} has schema {fv.schema_id}, "
                    f"dataset has {self.schema_id}"
                )


# ---------------------------------------------------------------------------
# Graph and span helpers


def parse_distance(a: int, b: int, deps: Sequence[Dep], n_tokens: int) -> Optional[int]:
    """Shortest undirected path length between tokens a and b, in hops.

    Returns None when the tokens lie in disconnected parse components
    (different sentences).  Root links (head -1) add no edge.
    """
    if not 0 <= a < n_tokens or not 0 <= b < n_tokens:
        raise FeatureError(f"token index out of range: {a}, {b} (n={n_tokens})")
    if a == b:
        return 0
    adjacency: dict[int, list[int]] = {}
    for dep in deps:
        if dep.head_index == -1:
            continue
        adjacency.setdefault(dep.token_index, []).append(dep.head_index)
        adjacency.setdefault(dep.head_index, []).append(dep.token_index)
    seen = {a}
    queue = deque([(a, 0)])
    while queue:
        node, dist = queue.popleft()
        for nxt in adjacency.get(node, ()):
            if nxt == b:
                return dist + 1
            if nxt not in seen:
                seen.add(nxt)
                queue.append((nxt, dist + 1))
    return None


def _overlapping_token_indices(span: Span, bundle: LayerBundle) -> list[int]:
    return [t.index for t in bundle.tokens if t.span.overlaps(span)]


def _head_token_index(span: Span, bundle: LayerBundle) -> Optional[int]:
    """Head of a multi-token span: first token whose dependency head lies
    outside the span, else the last span token."""
    indices = _overlapping_token_indices(span, bundle)
    if not indices:
        return None
    if bundle.deps:
        inside = set(indices)
        heads = {d.token_index: d.head_index for d in bundle.deps}
        for i in indices:
            if i in heads and heads[i] not in inside:
                return i
    return indices[-1]


def _sentence_of(span: Span, bundle: LayerBundle) -> Optional[Span]:
    for sent in bundle.sentences:
        if sent.contains_offset(span.begin):
            return sent
    return None


def _token_range_distance(a: Sequence[int], b: Sequence[int]) -> int:
    """Minimum |i - j| between two non-empty token index lists (0 if they
    share a token)."""
    return min(abs(i - j) for i in a for j in b)


def predict_motif_type(candidate: Candidate, bundle: LayerBundle) -> MotifType:
    """Heuristic type decision, checked in fixed order: animate/character
    coreference mention -> Character, event span -> Event, else Prop."""
    for chain in bundle.coref:
        if chain.animate or chain.character:
            for mention in chain.mentions:
                if mention.overlaps(candidate.span):
                    return MotifType.CHARACTER
    for event in bundle.events:
        if event.overlaps(candidate.span):
            return MotifType.EVENT
    return MotifType.PROP


# ---------------------------------------------------------------------------
# Label normalization

_NER_ALIASES = {
    "PERSON": "PERSON",
    "PER": "PERSON",
    "ORG": "ORG",
    "ORGANIZATION": "ORG",
    "LOC": "LOC",
    "LOCATION": "LOC",
    "GPE": "LOC",
    "MISC": "MISC",
}


def _coarse_ner(label: str) -> str:
    return _NER_ALIASES.get(label.upper(), "MISC")


def _coarse_srl_role(role: str) -> Optional[str]:
    r = role.upper()
    if r in ("ARG0", "A0"):
        return "ARG0"
    if r in ("ARG1", "A1"):
        return "ARG1"
    if r in ("ARG2", "A2"):
        return "ARG2"
    if r.startswith("ARGM") or r.startswith("AM-") or r.startswith("AM_"):
        return "ARGM"
    return None


def _coarse_pos(pos: str) -> str:
    p = pos.upper()
    if p in ("NOUN", "NN", "NNS"):
        return "NOUN"
    if p in ("PROPN", "NNP", "NNPS"):
        return "PROPN"
    if p == "VERB" or p.startswith("VB"):
        return "VERB"
    if p == "ADJ" or p.startswith("JJ"):
        return "ADJ"
    return "OTHER"


def _coarse_dep_rel(rel: str) -> str:
    r = rel.lower()
    if r.startswith("nsubj"):
        return "nsubj"
    if r in ("obj", "dobj"):
        return "obj"
    if r.startswith("obl"):
        return "obl"
    if r == "poss" or r == "nmod:poss":
        return "poss"
    if r == "appos":
        return "appos"
    return "OTHER"


# ---------------------------------------------------------------------------
# Extraction


def _animate_mention_spans(bundle: LayerBundle) -> list[Span]:
    return [m for c in bundle.coref if c.animate for m in c.mentions]


def extract_features(
    candidate: Candidate,
    bundle: LayerBundle,
    registry: Mapping[str, MotifEntry],
    config: FeatureConfig,
) -> FeatureVector:
    """Compute the feature vector for one candidate.

    Raises FeatureError when the motif is not in the registry or the
    bundle has no tokens.  Missing candidate flags default to all-false
    with a logged warning.
    """
    if candidate.motif_id not in registry:
        raise FeatureError(f"unknown motif_id {candidate.motif_id!r}")
    if not bundle.tokens:
        raise FeatureError(f"bundle for {candidate.doc_id!r} has no tokens")

    n = len(bundle.tokens)
    cand_tokens = _overlapping_token_indices(candidate.span, bundle)
    values: dict[str, float] = {}

    if "position" in config.enabled_groups:
        event_token_lists = [
            idx
            for event in bundle.events
            if (idx := _overlapping_token_indices(event, bundle))
        ]
        if cand_tokens and event_token_lists:
            dist = min(
                _token_range_distance(cand_tokens, ev) for ev in event_token_lists
            )
            values["tok_dist_event"] = dist / n
        else:
            values["tok_dist_event"] = 1.0
        values["in_event"] = float(
            any(event.overlaps(candidate.span) for event in bundle.events)
        )
        sentence = _sentence_of(candidate.span, bundle)
        values["event_same_sentence"] = float(
            sentence is not None
            and any(event.overlaps(sentence) for event in bundle.events)
        )

    flags = bundle.cand_flags.get(candidate.candidate_id)
    if flags is None:
        if "figurative" in config.enabled_groups or "semantic" in config.enabled_groups:
            log.warning(
                "no candidate flags for %s; defaulting to all-false",
                candidate.candidate_id,
            )
        flags = CandFlags()

    if "semantic" in config.enabled_groups:
        values["in_animate_chain"] = float(
            any(
                m.overlaps(candidate.span)
                for c in bundle.coref
                if c.animate
                for m in c.mentions
            )
        )
        values["in_character_chain"] = float(
            any(
                m.overlaps(candidate.span)
                for c in bundle.coref
                if c.character
                for m in c.mentions
            )
        )

        cap = config.parse_distance_cap
        head = _head_token_index(candidate.span, bundle)
        animate_heads = [
            h
            for m in _animate_mention_spans(bundle)
            if (h := _head_token_index(m, bundle)) is not None
        ]
        best: Optional[int] = None
        if head is not None:
            for target in animate_heads:
                d = parse_distance(head, target, bundle.deps, n)
                if d is not None and (best is None or d < best):
                    best = d
        values["parse_dist_animate"] = 1.0 if best is None else min(best, cap) / cap

        role = "NONE"
        pred_hit = any(f.predicate.overlaps(candidate.span) for f in bundle.srl)
        found: set[str] = set()
        for frame in bundle.srl:
            for arg in frame.args:
                if arg.span.overlaps(candidate.span):
                    coarse = _coarse_srl_role(arg.role)
                    if coarse:
                        found.add(coarse)
        for r in ("ARG0", "ARG1", "ARG2", "ARGM"):
            if r in found:
                role = r
                break
        else:
            if pred_hit:
                role = "PRED"
        for r in SRL_ROLES:
            values[f"srl_role_{r}"] = float(r == role)

        animate_spans = _animate_mention_spans(bundle)

        def overlaps_animate(span: Span) -> bool:
            return any(span.overlaps(m) for m in animate_spans)

        with_animate = False
        for frame in bundle.srl:
            participants = [frame.predicate] + [a.span for a in frame.args]
            if not any(p.overlaps(candidate.span) for p in participants):
                continue
            others = [p for p in participants if not p.overlaps(candidate.span)]
            if any(overlaps_animate(p) for p in others):
                with_animate = True
                break
        values["srl_with_animate"] = float(with_animate)
        values["possession"] = float(flags.possession)

    if "figurative" in config.enabled_groups:
        values["metaphor_sent"] = float(flags.metaphor)
        values["simile_sent"] = float(flags.simile)

    if "ner" in config.enabled_groups:
        overlapping = {
            _coarse_ner(ns.label) for ns in bundle.ner if ns.span.overlaps(candidate.span)
        }
        hot = "NONE"
        for label in NER_LABELS:
            if label in overlapping:
                hot = label
                break
        for label in NER_LABELS:
            values[f"ner_{label}"] = float(label == hot)
        values["ner_NONE"] = float(hot == "NONE")

        w = config.window_size
        counts = dict.fromkeys(NER_LABELS, 0)
        if cand_tokens:
            first, last = cand_tokens[0], cand_tokens[-1]
            window = [
                i
                for i in range(max(0, first - w), min(n, last + w + 1))
                if i < first or i > last
            ]
            for i in window:
                tok_span = bundle.tokens[i].span
                here = {
                    _coarse_ner(ns.label)
                    for ns in bundle.ner
                    if ns.span.overlaps(tok_span)
                }
                for label in NER_LABELS:
                    if label in here:
                        counts[label] += 1
                        break
        denom = 2 * w + 1
        for label in NER_LABELS:
            values[f"ner_win_{label}"] = counts[label] / denom

    if "grammar" in config.enabled_groups:
        head = _head_token_index(candidate.span, bundle)
        head_pos = "OTHER"
        head_rel = "OTHER"
        if head is not None:
            head_pos = _coarse_pos(bundle.tokens[head].pos)
            for dep in bundle.deps:
                if dep.token_index == head:
                    head_rel = _coarse_dep_rel(dep.relation)
                    break
        for p in HEAD_POS:
            values[f"head_pos_{p}"] = float(p == head_pos)
        for r in DEP_RELS:
            values[f"dep_rel_{r}"] = float(r == head_rel)

    if "type_check" in config.enabled_groups:
        expected = registry[candidate.motif_id].motif_type
        predicted = predict_motif_type(candidate, bundle)
        for t in MOTIF_TYPES:
            values[f"expected_{t}"] = float(expected.value == t)
        for t in MOTIF_TYPES:
            values[f"predicted_{t}"] = float(predicted.value == t)
        values["type_match"] = float(expected == predicted)

    ordered = {name: values[name] for name in schema_names(config)}
    return FeatureVector(
        candidate_id=candidate.candidate_id,
        values=ordered,
        schema_id=schema_id(config),
    )


def vectorize_batch(
    candidates: Sequence[Candidate],
    bundles: Mapping[str, LayerBundle],
    registry: Mapping[str, MotifEntry],
    config: FeatureConfig,
    labels: Optional[Mapping[str, UsageLabel]] = None,
) -> Dataset:
    """Extract one row per candidate in stable input order.

    bundles maps doc_id to its LayerBundle; a candidate whose document
    has no bundle is an error.
    """
    labels = labels or {}
    rows = []
    for candidate in candidates:
        bundle = bundles.get(candidate.doc_id)
        if bundle is None:
            raise FeatureError(f"no layer bundle for document {candidate.doc_id!r}")
        fv = extract_features(candidate, bundle, registry, config)
        rows.append((fv, labels.get(candidate.candidate_id)))
    return Dataset(schema_id=schema_id(config), schema=schema_names(config), rows=tuple(rows))


# ---------------------------------------------------------------------------
# Dataset serialization (features.jsonl)


def dataset_to_jsonl(dataset: Dataset) -> str:
    lines = []
    for fv, label in dataset.rows:
        record: dict = {
            "candidate_id": fv.candidate_id,
            "schema_id": fv.schema_id,
            "features": dict(fv.values),
        }
        if label is not None:
            record["label"] = label.value
        lines.append(json.dumps(record, separators=(",", ":")))
    return "".join(line + "\n" for line in lines)


def dataset_from_jsonl(content: str, config: Optional[FeatureConfig] = None) -> Dataset:
    """Rebuild a Dataset from features.jsonl content.

    When config is given the stored schema_id must match it; otherwise
    the schema order is recovered from the first row's feature keys.
    """
    rows = []
    sid: Optional[str] = None
    schema: tuple[str, ...] = ()
    for lineno, line in enumerate(content.splitlines(), start=1):
        if not line.strip():
            continue
        record = json.loads(line)
        if sid is None:
            sid = record["schema_id"]
            schema = tuple(record["features"].keys())
        elif record["schema_id"] != sid:
            raise FeatureError(f"features line {lineno}: mixed schema ids")
        fv = FeatureVector(
            candidate_id=record["candidate_id"],
            values={k: float(v) for k, v in record["features"].items()},
            schema_id=record["schema_id"],
        )
        label = UsageLabel(record["label"]) if "label" in record else None
        rows.append((fv, label))
    if config is not None:
        expected = schema_id(config)
        if sid is not None and sid != expected:
            raise FeatureError(f"features schema {sid} does not match config {expected}")
        sid = expected
        schema = schema_names(config)
    if sid is None:
        raise FeatureError("empty features content and no config given")
    return Dataset(schema_id=sid, schema=schema, rows=tuple(rows))
