"""Corpus annotation: drive the annotators and emit interchange files.

Output is one directory per document containing text.txt plus the layer
files consumed by the main toolkit.  All offsets are Unicode code-point
indices; files are written atomically (temp file + rename) so a crashed
run never leaves a half-written layer.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from . import annotators

log = logging.getLogger(__name__)

COMPONENTS = ("tokens", "sentences", "deps", "ner", "coref", "events", "srl")


@dataclass(frozen=True)
class AdapterConfig:
    corpus_dir: Path
    output_dir: Path
    components: frozenset[str] = frozenset(COMPONENTS)
    figurative_lexicon_path: Optional[Path] = None

    def __post_init__(self):
        unknown = self.components - set(COMPONENTS) - {"candflags"}
        if unknown:
            raise ValueError(f"unknown components: {sorted(unknown)}")
        if "tokens" not in self.components:
            raise ValueError("the tokens component is always required")


def _write_atomic(path: Path, content: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(content, encoding="utf-8", newline="")
    os.replace(tmp, path)


def _jsonl(records: Iterable[dict]) -> str:
    return "".join(json.dumps(r, separators=(",", ":")) + "\n" for r in records)


def iter_documents(corpus_dir: Path) -> list[tuple[str, Path]]:
    """(doc_id, text path) pairs; accepts <id>/text.txt dirs and <id>.txt files."""
    docs = {}
    for entry in sorted(corpus_dir.iterdir()):
        if entry.is_dir() and (entry / "text.txt").exists():
            docs[entry.name] = entry / "text.txt"
        elif entry.is_file() and entry.suffix == ".txt":
            docs.setdefault(entry.stem, entry)
    return sorted(docs.items())


def annotate_document(doc_id: str, text: str, out_dir: Path, components: frozenset[str]) -> None:
    raw = annotators.tokenize(text)
    sent_ranges = annotators.split_sentences(raw)
    toks = annotators.tag_tokens(raw, sent_ranges)
    deps = annotators.assign_deps(toks, sent_ranges)

    out_dir.mkdir(parents=True, exist_ok=True)
    _write_atomic(out_dir / "text.txt", text)
    _write_atomic(
        out_dir / "tokens.jsonl",
        _jsonl(
            {
                "i": t.index,
                "begin": t.begin,
                "end": t.end,
                "text": t.text,
                "pos": t.pos,
                "lemma": t.lemma,
            }
            for t in toks
        ),
    )
    if "sentences" in components:
        _write_atomic(
            out_dir / "sentences.jsonl",
            _jsonl(
                {"begin": toks[lo].begin, "end": toks[hi - 1].end}
                for lo, hi in sent_ranges
            ),
        )
    if "deps" in components:
        _write_atomic(
            out_dir / "deps.jsonl",
            _jsonl({"i": t, "head": h, "rel": rel} for t, h, rel in deps),
        )
    if "ner" in components:
        _write_atomic(
            out_dir / "ner.jsonl",
            _jsonl(
                {"begin": b, "end": e, "label": label}
                for b, e, label in annotators.build_ner(toks, sent_ranges)
            ),
        )
    if "coref" in components:
        _write_atomic(
            out_dir / "coref.jsonl",
            _jsonl(
                {
                    "chain": c["chain"],
                    "mentions": [{"begin": b, "end": e} for b, e in c["mentions"]],
                    "animate": c["animate"],
                    "character": c["character"],
                }
                for c in annotators.build_coref(toks, sent_ranges, deps)
            ),
        )
    if "events" in components:
        _write_atomic(
            out_dir / "events.jsonl",
            _jsonl({"begin": b, "end": e} for b, e in annotators.build_events(toks)),
        )
    if "srl" in components:
        _write_atomic(out_dir / "srl.jsonl", _jsonl(annotators.build_srl(toks, deps)))


def annotate_corpus(config: AdapterConfig) -> list[str]:
    """Annotate every document; failures skip the document and are logged.

    Returns the doc_ids written.  A per-run errors.jsonl records skipped
    documents (absent when nothing failed).
    """
    written = []
    failures = []
    for doc_id, text_path in iter_documents(config.corpus_dir):
        try:
            text = text_path.read_bytes().decode("utf-8")
            if text.startswith("﻿"):
                text = text[1:]
            annotate_document(doc_id, text, config.output_dir / doc_id, config.components)
            written.append(doc_id)
        except Exception as exc:  # noqa: BLE001 - corpus jobs must keep going
            log.error("skipping %s: %s", doc_id, exc)
            failures.append({"doc_id": doc_id, "error": str(exc)})
    if failures:
        config.output_dir.mkdir(parents=True, exist_ok=True)
        _write_atomic(config.output_dir / "errors.jsonl", _jsonl(failures))
    return written
