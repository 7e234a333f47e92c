"""Core document/candidate data model and standoff I/O.

All text offsets anywhere in the toolkit are Unicode code-point indices
into the owning document's text (the brat convention).  Layer caches are
directories of line-delimited JSON records, one file per layer; brat
files carry the motif id as the entity label and the usage category as
an attribute line.

Everything here is immutable after construction and safe to share
across workers.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .errors import BratFormatError, CorpusError, LayerFormatError, LayerValidationError


class Culture(Enum):
    IRISH = "Irish"
    JEWISH = "Jewish"
    PUERTO_RICAN = "PuertoRican"
    OTHER = "Other"


class MotifType(Enum):
    CHARACTER = "Character"
    PROP = "Prop"
    EVENT = "Event"


class UsageLabel(Enum):
    """Four-way usage category of a motif candidate.

    The definition order is canonical: it fixes tie-breaking in the
    classifier and row/column order in every report.
    """

    MOTIFIC = "Motific"
    REFERENTIAL = "Referential"
    EPONYMIC = "Eponymic"
    UNRELATED = "Unrelated"


USAGE_ORDER: tuple[UsageLabel, ...] = tuple(UsageLabel)

_CULTURE_ALIASES = {
    "irish": Culture.IRISH,
    "jewish": Culture.JEWISH,
    "puertorican": Culture.PUERTO_RICAN,
    "puerto-rican": Culture.PUERTO_RICAN,
    "puerto rican": Culture.PUERTO_RICAN,
    "other": Culture.OTHER,
}


def parse_culture(value: str) -> Culture:
    try:
        return _CULTURE_ALIASES[value.strip().lower()]
    except KeyError:
        raise CorpusError(f"unknown culture: {value!r}") from None


def parse_motif_type(value: str) -> MotifType:
    try:
        return MotifType(value.strip().lower().capitalize())
    except ValueError:
        raise CorpusError(f"unknown motif type: {value!r}") from None


def parse_usage_label(value: str) -> UsageLabel:
    try:
        return UsageLabel(value)
    except ValueError:
        raise CorpusError(f"unknown usage label: {value!r}") from None


@dataclass(frozen=True)
class Span:
    """Half-open code-point interval [begin, end) into a document."""

    begin: int
    end: int

    def __post_init__(self):
        if not (0 <= self.begin < self.end):
            raise CorpusError(f"invalid span [{self.begin}, {self.end})")

    def overlaps(self, other: "Span") -> bool:
        return self.begin < other.end and other.begin < self.end

    def contains_offset(self, offset: int) -> bool:
        return self.begin <= offset < self.end


@dataclass(frozen=True)
class Document:
    doc_id: str
    text: str
    meta: Optional[Mapping[str, str]] = None

    def __post_init__(self):
        if not self.doc_id:
            raise CorpusError("doc_id must be non-empty")
        if "/" in self.doc_id or "\\" in self.doc_id:
            raise CorpusError(f"doc_id must be filesystem-safe: {self.doc_id!r}")

    def slice(self, span: Span) -> str:
        if span.end > len(self.text):
            raise CorpusError(
                f"span [{span.begin}, {span.end}) out of bounds for "
                f"document {self.doc_id!r} of length {len(self.text)}"
            )
        return self.text[span.begin : span.end]


@dataclass(frozen=True)
class MotifEntry:
    motif_id: str
    culture: Culture
    motif_type: MotifType
    display_name: str
    index_codes: tuple[str, ...] = ()


@dataclass(frozen=True)
class Candidate:
    """A matched text span for a motif, prior to usage classification.

    candidate_id is ``doc_id + "#" + ordinal`` with a 1-based ordinal
    (matching brat T-line numbering when written out).
    """

    candidate_id: str
    doc_id: str
    span: Span
    motif_id: str
    surface: str

    def check_against(self, doc: Document) -> None:
        """Raise unless the surface equals the document slice."""
        if doc.doc_id != self.doc_id:
            raise CorpusError(
                f"candidate {self.candidate_id} belongs to {self.doc_id!r}, "
                f"not {doc.doc_id!r}"
            )
        covered = doc.slice(self.span)
        if covered != self.surface:
            raise CorpusError(
                f"candidate {self.candidate_id}: surface {self.surface!r} "
                f"differs from document text {covered!r}"
            )


@dataclass(frozen=True)
class AnnotationRecord:
    candidate: Candidate
    annotator_id: str
    label: UsageLabel
    batch_id: str


# ---------------------------------------------------------------------------
# Layer bundle


@dataclass(frozen=True)
class Token:
    index: int
    span: Span
    text: str
    pos: str = ""
    lemma: str = ""


@dataclass(frozen=True)
class Dep:
    token_index: int
    head_index: int  # -1 for root
    relation: str


@dataclass(frozen=True)
class NerSpan:
    span: Span
    label: str


@dataclass(frozen=True)
class CorefChain:
    chain_id: int
    mentions: tuple[Span, ...]
    animate: bool
    character: bool


@dataclass(frozen=True)
class SrlArg:
    role: str
    span: Span


@dataclass(frozen=True)
class SrlFrame:
    predicate: Span
    args: tuple[SrlArg, ...]


@dataclass(frozen=True)
class CandFlags:
    metaphor: bool = False
    simile: bool = False
    possession: bool = False


@dataclass(frozen=True)
class LayerBundle:
    """Per-document cache of NLP annotation layers.

    Only the token layer is mandatory; missing layers are empty.  Use
    validate_layers() to check structural invariants.
    """

    tokens: tuple[Token, ...]
    sentences: tuple[Span, ...] = ()
    deps: tuple[Dep, ...] = ()
    ner: tuple[NerSpan, ...] = ()
    coref: tuple[CorefChain, ...] = ()
    events: tuple[Span, ...] = ()
    srl: tuple[SrlFrame, ...] = ()
    cand_flags: Mapping[str, CandFlags] = field(default_factory=dict)


@dataclass(frozen=True)
class Finding:
    severity: str  # "error" | "warning"
    layer: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...]

    @property
    def errors(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity == "error")

    @property
    def warnings(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity == "warning")

    @property
    def ok(self) -> bool:
        return not self.findings


# ---------------------------------------------------------------------------
# Document loading


def load_document(path: str | Path, meta: Optional[Mapping[str, str]] = None) -> Document:
    """Read a UTF-8 text file; doc_id is the file name without extension.

    A single leading byte-order mark is stripped; everything else is
    preserved exactly.  Invalid UTF-8 raises UnicodeDecodeError.
    """
    path = Path(path)
    raw = path.read_bytes()
    text = raw.decode("utf-8")
    if text.startswith("﻿"):
        text = text[1:]
    return Document(doc_id=path.stem, text=text, meta=meta)


def load_corpus_document(doc_dir: str | Path) -> Document:
    """Read ``<doc_dir>/text.txt``; doc_id is the directory name."""
    doc_dir = Path(doc_dir)
    raw = (doc_dir / "text.txt").read_bytes()
    text = raw.decode("utf-8")
    if text.startswith("﻿"):
        text = text[1:]
    return Document(doc_id=doc_dir.name, text=text)


# ---------------------------------------------------------------------------
# brat standoff files

_T_LINE = re.compile(r"^T(\d+)\t(\S+) (\d+) (\d+)\t(.*)$")
_A_LINE = re.compile(r"^A(\d+)\t(\S+) T(\d+)(?: (\S+))?$")


# every character str.splitlines() treats as a line break
_LINE_BREAKS = "\r\n\v\f\x1c\x1d\x1e\x85  "


def _brat_field(text: str) -> str:
    # brat stores the covered text with line breaks flattened to spaces
    for ch in _LINE_BREAKS:
        if ch in text:
            text = text.replace(ch, " ")
    return text


def read_brat(
    ann_text: str, doc: Document
) -> list[tuple[Candidate, Optional[UsageLabel]]]:
    """Parse a .ann file into candidates with optional usage labels.

    T-lines become candidates (entity label = motif id, candidate_id =
    ``doc_id#<T index>``); ``A<n>  Usage T<k> <Category>`` lines attach
    labels.  Candidates are returned in T-index order.
    """
    by_index: dict[int, Candidate] = {}
    labels: dict[int, UsageLabel] = {}
    for lineno, line in enumerate(ann_text.splitlines(), start=1):
        if not line.strip():
            continue
        if line.startswith("T"):
            m = _T_LINE.match(line)
            if not m:
                raise BratFormatError(f"line {lineno}: malformed T-line: {line!r}")
            t_index = int(m.group(1))
            if t_index in by_index:
                raise BratFormatError(f"line {lineno}: duplicate annotation id T{t_index}")
            motif_id = m.group(2)
            begin, end = int(m.group(3)), int(m.group(4))
            if not (0 <= begin < end <= len(doc.text)):
                raise BratFormatError(
                    f"line {lineno}: span [{begin}, {end}) out of bounds for "
                    f"document {doc.doc_id!r} of length {len(doc.text)}"
                )
            covered = doc.text[begin:end]
            if m.group(5) != _brat_field(covered):
                raise BratFormatError(
                    f"line {lineno}: covered text {m.group(5)!r} does not match "
                    f"document text {covered!r}"
                )
            by_index[t_index] = Candidate(
                candidate_id=f"{doc.doc_id}#{t_index}",
                doc_id=doc.doc_id,
                span=Span(begin, end),
                motif_id=motif_id,
                surface=covered,
            )
        elif line.startswith("A"):
            m = _A_LINE.match(line)
            if not m:
                raise BratFormatError(f"line {lineno}: malformed A-line: {line!r}")
            if m.group(2) != "Usage":
                raise BratFormatError(
                    f"line {lineno}: unsupported attribute {m.group(2)!r}"
                )
            t_index = int(m.group(3))
            if t_index not in by_index:
                raise BratFormatError(f"line {lineno}: A-line references unknown T{t_index}")
            if t_index in labels:
                raise BratFormatError(f"line {lineno}: duplicate Usage for T{t_index}")
            value = m.group(4)
            if value is None:
                raise BratFormatError(f"line {lineno}: Usage attribute missing a value")
            try:
                labels[t_index] = UsageLabel(value)
            except ValueError:
                raise BratFormatError(
                    f"line {lineno}: unknown Usage value {value!r}"
                ) from None
        else:
            raise BratFormatError(f"line {lineno}: unsupported line: {line!r}")
    return [(by_index[i], labels.get(i)) for i in sorted(by_index)]


def write_brat(
    pairs: Sequence[tuple[Candidate, Optional[UsageLabel]]], doc: Document
) -> str:
    """Serialize candidates to brat standoff text.

    T-lines are numbered from 1 in input order, then A-lines from 1 for
    the labeled candidates.  read_brat(write_brat(x, d), d) == x for
    candidate lists following the ordinal id convention.
    """
    t_lines = []
    a_lines = []
    for i, (cand, label) in enumerate(pairs, start=1):
        cand.check_against(doc)
        t_lines.append(
            f"T{i}\t{cand.motif_id} {cand.span.begin} {cand.span.end}"
            f"\t{_brat_field(cand.surface)}"
        )
        if label is not None:
            a_lines.append(f"A{len(a_lines) + 1}\tUsage T{i} {label.value}")
    lines = t_lines + a_lines
    return "".join(line + "\n" for line in lines)


# ---------------------------------------------------------------------------
# Layer interchange files

LAYER_FILES = (
    "tokens.jsonl",
    "sentences.jsonl",
    "deps.jsonl",
    "ner.jsonl",
    "coref.jsonl",
    "events.jsonl",
    "srl.jsonl",
    "candflags.jsonl",
)


def _iter_records(path: Path) -> Iterable[tuple[int, dict]]:
    with path.open("r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise LayerFormatError(f"invalid JSON: {exc}", str(path), lineno) from None
            if not isinstance(record, dict):
                raise LayerFormatError("record is not an object", str(path), lineno)
            yield lineno, record


def _record_span(record: dict, path: Path, lineno: int) -> Span:
    try:
        begin = record["begin"]
        end = record["end"]
    except KeyError:
        raise LayerFormatError("missing begin/end", str(path), lineno) from None
    if not isinstance(begin, int) or not isinstance(end, int) or isinstance(begin, bool) or isinstance(end, bool):
        raise LayerFormatError("begin/end must be integers", str(path), lineno)
    if not 0 <= begin < end:
        raise LayerFormatError(f"invalid span [{begin}, {end})", str(path), lineno)
    return Span(begin, end)


def _require(record: dict, key: str, kind, path: Path, lineno: int):
    if key not in record:
        raise LayerFormatError(f"missing field {key!r}", str(path), lineno)
    value = record[key]
    if kind is int and isinstance(value, bool):
        raise LayerFormatError(f"field {key!r} must be {kind.__name__}", str(path), lineno)
    if not isinstance(value, kind):
        raise LayerFormatError(f"field {key!r} must be {kind.__name__}", str(path), lineno)
    return value


def read_layers(dir_path: str | Path, doc: Document, check: bool = True) -> LayerBundle:
    """Load the per-document layer cache from a directory.

    tokens.jsonl must exist; all other layers default to empty.  With
    check=True (the default) the bundle is validated and any
    error-severity finding raises LayerValidationError.
    """
    dir_path = Path(dir_path)
    tokens_path = dir_path / "tokens.jsonl"
    if not tokens_path.exists():
        raise LayerFormatError("tokens layer is required", str(tokens_path))

    tokens = []
    for lineno, rec in _iter_records(tokens_path):
        tokens.append(
            Token(
                index=_require(rec, "i", int, tokens_path, lineno),
                span=_record_span(rec, tokens_path, lineno),
                text=_require(rec, "text", str, tokens_path, lineno),
                pos=_require(rec, "pos", str, tokens_path, lineno),
                lemma=_require(rec, "lemma", str, tokens_path, lineno),
            )
        )

    sentences = []
    path = dir_path / "sentences.jsonl"
    if path.exists():
        for lineno, rec in _iter_records(path):
            sentences.append(_record_span(rec, path, lineno))

    deps = []
    path = dir_path / "deps.jsonl"
    if path.exists():
        for lineno, rec in _iter_records(path):
            deps.append(
                Dep(
                    token_index=_require(rec, "i", int, path, lineno),
                    head_index=_require(rec, "head", int, path, lineno),
                    relation=_require(rec, "rel", str, path, lineno),
                )
            )

    ner = []
    path = dir_path / "ner.jsonl"
    if path.exists():
        for lineno, rec in _iter_records(path):
            ner.append(
                NerSpan(
                    span=_record_span(rec, path, lineno),
                    label=_require(rec, "label", str, path, lineno),
                )
            )

    coref = []
    path = dir_path / "coref.jsonl"
    if path.exists():
        for lineno, rec in _iter_records(path):
            mentions_raw = _require(rec, "mentions", list, path, lineno)
            mentions = []
            for mention in mentions_raw:
                if not isinstance(mention, dict):
                    raise LayerFormatError("mention is not an object", str(path), lineno)
                mentions.append(_record_span(mention, path, lineno))
            coref.append(
                CorefChain(
                    chain_id=_require(rec, "chain", int, path, lineno),
                    mentions=tuple(mentions),
                    animate=_require(rec, "animate", bool, path, lineno),
                    character=_require(rec, "character", bool, path, lineno),
                )
            )

    events = []
    path = dir_path / "events.jsonl"
    if path.exists():
        for lineno, rec in _iter_records(path):
            events.append(_record_span(rec, path, lineno))

    srl = []
    path = dir_path / "srl.jsonl"
    if path.exists():
        for lineno, rec in _iter_records(path):
            if "pred" not in rec or not isinstance(rec["pred"], dict):
                raise LayerFormatError("missing pred span", str(path), lineno)
            predicate = _record_span(rec["pred"], path, lineno)
            args = []
            for arg in _require(rec, "args", list, path, lineno):
                if not isinstance(arg, dict):
                    raise LayerFormatError("arg is not an object", str(path), lineno)
                args.append(
                    SrlArg(
                        role=_require(arg, "role", str, path, lineno),
                        span=_record_span(arg, path, lineno),
                    )
                )
            srl.append(SrlFrame(predicate=predicate, args=tuple(args)))

    cand_flags: dict[str, CandFlags] = {}
    path = dir_path / "candflags.jsonl"
    if path.exists():
        for lineno, rec in _iter_records(path):
            cid = _require(rec, "candidate_id", str, path, lineno)
            if cid in cand_flags:
                raise LayerFormatError(f"duplicate candidate_id {cid!r}", str(path), lineno)
            cand_flags[cid] = CandFlags(
                metaphor=_require(rec, "metaphor", bool, path, lineno),
                simile=_require(rec, "simile", bool, path, lineno),
                possession=_require(rec, "possession", bool, path, lineno),
            )

    bundle = LayerBundle(
        tokens=tuple(tokens),
        sentences=tuple(sentences),
        deps=tuple(deps),
        ner=tuple(ner),
        coref=tuple(coref),
        events=tuple(events),
        srl=tuple(srl),
        cand_flags=cand_flags,
    )
    if check:
        report = validate_layers(bundle, doc)
        if report.errors:
            messages = "; ".join(f"{f.layer}: {f.message}" for f in report.errors)
            raise LayerValidationError(f"{dir_path}: {messages}")
    return bundle


def _span_in_bounds(span: Span, doc: Document) -> bool:
    return span.end <= len(doc.text)


def _splits_token(span: Span, tokens: Sequence[Token]) -> bool:
    # A span splits a token when either endpoint falls strictly inside it.
    for tok in tokens:
        if tok.span.begin < span.begin < tok.span.end:
            return True
        if tok.span.begin < span.end < tok.span.end:
            return True
    return False


def validate_layers(bundle: LayerBundle, doc: Document) -> ValidationReport:
    """Check all LayerBundle invariants; findings are data, not failures.

    Token-layer violations and structural problems (out-of-bounds spans,
    bad indices, empty chains) are errors; spans in other layers that cut
    through a token are warnings.
    """
    findings: list[Finding] = []

    def error(layer: str, message: str):
        findings.append(Finding("error", layer, message))

    def warning(layer: str, message: str):
        findings.append(Finding("warning", layer, message))

    n = len(bundle.tokens)
    prev_end = -1
    for pos, tok in enumerate(bundle.tokens):
        if tok.index != pos:
            error("tokens", f"token at position {pos} has index {tok.index}")
        if not _span_in_bounds(tok.span, doc):
            error("tokens", f"token {pos} span [{tok.span.begin}, {tok.span.end}) out of bounds")
            continue
        if tok.span.begin < prev_end:
            error("tokens", f"token {pos} overlaps or precedes its predecessor")
        prev_end = max(prev_end, tok.span.end)
        covered = doc.text[tok.span.begin : tok.span.end]
        if covered != tok.text:
            error("tokens", f"token {pos} text {tok.text!r} != document text {covered!r}")

    for i, span in enumerate(bundle.sentences):
        if not _span_in_bounds(span, doc):
            error("sentences", f"sentence {i} out of bounds")
        elif _splits_token(span, bundle.tokens):
            warning("sentences", f"sentence {i} is not token-aligned")

    seen_dep = set()
    for i, dep in enumerate(bundle.deps):
        if not 0 <= dep.token_index < n:
            error("deps", f"entry {i} token index {dep.token_index} out of range")
            continue
        if dep.head_index != -1 and not 0 <= dep.head_index < n:
            error("deps", f"entry {i} head index {dep.head_index} out of range")
        if dep.head_index == dep.token_index:
            error("deps", f"entry {i} token {dep.token_index} is its own head")
        if dep.token_index in seen_dep:
            error("deps", f"entry {i} duplicates token index {dep.token_index}")
        seen_dep.add(dep.token_index)

    for i, span_label in enumerate(bundle.ner):
        if not _span_in_bounds(span_label.span, doc):
            error("ner", f"span {i} out of bounds")
        elif _splits_token(span_label.span, bundle.tokens):
            warning("ner", f"span {i} ({span_label.label}) splits a token")

    for chain in bundle.coref:
        if not chain.mentions:
            error("coref", f"chain {chain.chain_id} has no mentions")
        for j, mention in enumerate(chain.mentions):
            if not _span_in_bounds(mention, doc):
                error("coref", f"chain {chain.chain_id} mention {j} out of bounds")
            elif _splits_token(mention, bundle.tokens):
                warning("coref", f"chain {chain.chain_id} mention {j} splits a token")

    for i, span in enumerate(bundle.events):
        if not _span_in_bounds(span, doc):
            error("events", f"event {i} out of bounds")
        elif _splits_token(span, bundle.tokens):
            warning("events", f"event {i} splits a token")

    for i, frame in enumerate(bundle.srl):
        if not _span_in_bounds(frame.predicate, doc):
            error("srl", f"frame {i} predicate out of bounds")
        elif _splits_token(frame.predicate, bundle.tokens):
            warning("srl", f"frame {i} predicate splits a token")
        for arg in frame.args:
            if not _span_in_bounds(arg.span, doc):
                error("srl", f"frame {i} arg {arg.role} out of bounds")
            elif _splits_token(arg.span, bundle.tokens):
                warning("srl", f"frame {i} arg {arg.role} splits a token")

    return ValidationReport(tuple(findings))


# ---------------------------------------------------------------------------
# Layer writing (used by fixtures and downstream tooling)


def write_layers(bundle: LayerBundle, dir_path: str | Path) -> None:
    """Write a bundle to the interchange files, one JSON record per line."""
    dir_path = Path(dir_path)
    dir_path.mkdir(parents=True, exist_ok=True)

    def dump(name: str, records: list[dict]):
        path = dir_path / name
        if not records and name != "tokens.jsonl":
            if path.exists():
                path.unlink()
            return
        with path.open("w", encoding="utf-8") as handle:
            for rec in records:
                handle.write(json.dumps(rec, separators=(",", ":")) + "\n")

    dump(
        "tokens.jsonl",
        [
            {
                "i": t.index,
                "begin": t.span.begin,
                "end": t.span.end,
                "text": t.text,
                "pos": t.pos,
                "lemma": t.lemma,
            }
            for t in bundle.tokens
        ],
    )
    dump(
        "sentences.jsonl",
        [{"begin": s.begin, "end": s.end} for s in bundle.sentences],
    )
    dump(
        "deps.jsonl",
        [{"i": d.token_index, "head": d.head_index, "rel": d.relation} for d in bundle.deps],
    )
    dump(
        "ner.jsonl",
        [{"begin": s.span.begin, "end": s.span.end, "label": s.label} for s in bundle.ner],
    )
    dump(
        "coref.jsonl",
        [
            {
                "chain": c.chain_id,
                "mentions": [{"begin": m.begin, "end": m.end} for m in c.mentions],
                "animate": c.animate,
                "character": c.character,
            }
            for c in bundle.coref
        ],
    )
    dump(
        "events.jsonl",
        [{"begin": s.begin, "end": s.end} for s in bundle.events],
    )
    dump(
        "srl.jsonl",
        [
            {
                "pred": {"begin": f.predicate.begin, "end": f.predicate.end},
                "args": [
                    {"role": a.role, "begin": a.span.begin, "end": a.span.end}
                    for a in f.args
                ],
            }
            for f in bundle.srl
        ],
    )
    dump(
        "candflags.jsonl",
        [
            {
                "candidate_id": cid,
                "metaphor": flags.metaphor,
                "simile": flags.simile,
                "possession": flags.possession,
            }
            for cid, flags in bundle.cand_flags.items()
        ],
    )
