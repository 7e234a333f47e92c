"""Per-candidate metaphor/simile/possession flags.

Real figurative-language detectors are out of scope here; metaphor and
simile come from a transparent cue lexicon (flag true iff a cue occurs
in the candidate's sentence) so the downstream feature path stays
testable and the detector swappable.  Possession is read off the
dependency layer: true iff the candidate's head token touches a "poss"
relation.
"""

from __future__ import annotations

import json
from pathlib import Path

from .layers import _jsonl, _write_atomic


def load_lexicon(path: Path) -> dict[str, set[str]]:
    """cue -> set of flags ("metaphor"/"simile"), cues case-folded."""
    lexicon: dict[str, set[str]] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        record = json.loads(line)
        flag = record["flag"]
        if flag not in ("metaphor", "simile"):
            raise ValueError(f"lexicon line {lineno}: unknown flag {flag!r}")
        lexicon.setdefault(record["cue"].casefold(), set()).add(flag)
    return lexicon


def _load_jsonl(path: Path) -> list[dict]:
    if not path.exists():
        return []
    return [
        json.loads(line)
        for line in path.read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]


class _DocLayers:
    def __init__(self, doc_dir: Path):
        self.tokens = _load_jsonl(doc_dir / "tokens.jsonl")
        self.sentences = _load_jsonl(doc_dir / "sentences.jsonl")
        self.deps = _load_jsonl(doc_dir / "deps.jsonl")

    def sentence_token_texts(self, offset: int) -> list[str]:
        for sent in self.sentences:
            if sent["begin"] <= offset < sent["end"]:
                return [
                    t["text"].casefold()
                    for t in self.tokens
                    if sent["begin"] <= t["begin"] < sent["end"]
                ]
        return [t["text"].casefold() for t in self.tokens]

    def head_token(self, begin: int, end: int) -> int | None:
        inside = [t["i"] for t in self.tokens if t["begin"] < end and begin < t["end"]]
        if not inside:
            return None
        if self.deps:
            heads = {d["i"]: d["head"] for d in self.deps}
            inside_set = set(inside)
            for i in inside:
                if i in heads and heads[i] not in inside_set:
                    return i
        return inside[-1]

    def has_possessive(self, token: int) -> bool:
        return any(
            d["rel"] == "poss" and token in (d["i"], d["head"]) for d in self.deps
        )


def stub_candflags(
    candidates_path: Path, lexicon: dict[str, set[str]], corpus_out: Path
) -> dict[str, int]:
    """Write candflags.jsonl next to each document's other layers.

    candidates_path is the matcher's candidates.jsonl manifest; every
    candidate's document must already have layers under corpus_out.
    Returns per-document record counts.
    """
    by_doc: dict[str, list[dict]] = {}
    for record in _load_jsonl(candidates_path):
        by_doc.setdefault(record["doc_id"], []).append(record)

    counts = {}
    for doc_id in sorted(by_doc):
        doc_dir = corpus_out / doc_id
        if not (doc_dir / "tokens.jsonl").exists():
            raise FileNotFoundError(f"no annotated document for candidate doc {doc_id!r}")
        layers = _DocLayers(doc_dir)
        records = []
        for cand in by_doc[doc_id]:
            sentence = layers.sentence_token_texts(cand["begin"])
            flags = set()
            for word in sentence:
                flags |= lexicon.get(word, set())
            head = layers.head_token(cand["begin"], cand["end"])
            possession = head is not None and layers.has_possessive(head)
            records.append(
                {
                    "candidate_id": cand["candidate_id"],
                    "metaphor": "metaphor" in flags,
                    "simile": "simile" in flags,
                    "possession": possession,
                }
            )
        _write_atomic(doc_dir / "candflags.jsonl", _jsonl(records))
        counts[doc_id] = len(records)
    return counts
