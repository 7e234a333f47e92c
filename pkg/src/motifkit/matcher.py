"""Rule compilation and high-recall lexical matching of motif surface forms.

Matching works on token sequences, not character substrings, so "babel"
never fires inside "babelfish".  Per motif the scan is leftmost-longest
and non-overlapping; distinct motifs may overlap freely.
"""

from __future__ import annotations

import hashlib
import json
import unicodedata
from array import array
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from . import _kernels
from .corpus import (
    Candidate,
    Document,
    MotifEntry,
    Span,
    Token,
    parse_culture,
    parse_motif_type,
)
from .errors import CorpusError, RuleError

# Straight and curly possessive clitics, compared case-folded.
POSSESSIVE_CLITICS = ("'s", "’s")


@dataclass(frozen=True)
class MatchRule:
    """Surface-form patterns for one motif.

    Each pattern is a token sequence; each position holds one or more
    acceptable token strings (stored case-folded unless case_sensitive).
    """

    motif_id: str
    patterns: tuple[tuple[frozenset[str], ...], ...]
    allow_possessive: bool = False
    case_sensitive: bool = False

    def __post_init__(self):
        if not self.patterns:
            raise RuleError(f"rule {self.motif_id!r} has no patterns")
        for pattern in self.patterns:
            if not pattern:
                raise RuleError(f"rule {self.motif_id!r} has an empty pattern")
            for alternatives in pattern:
                if not alternatives or any(not alt for alt in alternatives):
                    raise RuleError(
                        f"rule {self.motif_id!r} has an empty token alternative"
                    )


@dataclass(frozen=True)
class RuleSet:
    registry: dict[str, MotifEntry]
    rules: tuple[MatchRule, ...]
    version: str

    def __post_init__(self):
        for rule in self.rules:
            if rule.motif_id not in self.registry:
                raise RuleError(f"rule {rule.motif_id!r} missing from registry")


def compile_rules(rule_file_content: str) -> RuleSet:
    """Parse the line-delimited JSON rule file into a RuleSet.

    One record per line: motif_id, culture, type, display_name,
    patterns (list of token-string lists; "a|b" in a token position
    means alternatives), optional allow_possessive / case_sensitive /
    index_codes.
    """
    registry: dict[str, MotifEntry] = {}
    rules: list[MatchRule] = []
    for lineno, line in enumerate(rule_file_content.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise RuleError(f"rule file line {lineno}: invalid JSON: {exc}") from None
        try:
            motif_id = record["motif_id"]
            culture = parse_culture(record["culture"])
            motif_type = parse_motif_type(record["type"])
            display_name = record["display_name"]
            raw_patterns = record["patterns"]
        except KeyError as exc:
            raise RuleError(f"rule file line {lineno}: missing field {exc}") from None
        except CorpusError as exc:
            raise RuleError(f"rule file line {lineno}: {exc}") from None
        if motif_id in registry:
            raise RuleError(f"rule file line {lineno}: duplicate motif_id {motif_id!r}")
        case_sensitive = bool(record.get("case_sensitive", False))
        patterns = []
        for raw_pattern in raw_patterns:
            positions = []
            for token_spec in raw_pattern:
                if not isinstance(token_spec, str):
                    raise RuleError(
                        f"rule file line {lineno}: pattern tokens must be strings"
                    )
                alternatives = token_spec.split("|")
                if not case_sensitive:
                    alternatives = [alt.casefold() for alt in alternatives]
                positions.append(frozenset(alternatives))
            patterns.append(tuple(positions))
        try:
            rule = MatchRule(
                motif_id=motif_id,
                patterns=tuple(patterns),
                allow_possessive=bool(record.get("allow_possessive", False)),
                case_sensitive=case_sensitive,
            )
        except RuleError as exc:
            raise RuleError(f"rule file line {lineno}: {exc}") from None
        registry[motif_id] = MotifEntry(
            motif_id=motif_id,
            culture=culture,
            motif_type=motif_type,
            display_name=display_name,
            index_codes=tuple(record.get("index_codes", ())),
        )
        rules.append(rule)
    version = hashlib.sha256(rule_file_content.encode("utf-8")).hexdigest()[:16]
    return RuleSet(registry=registry, rules=tuple(rules), version=version)


class Tok(NamedTuple):
    text: str
    begin: int
    end: int


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(text: str) -> list[Tok]:
    """Fallback segmentation when no tokens layer exists.

    Whitespace-delimited chunks; leading/trailing punctuation characters
    peel off as single-character tokens; a final possessive clitic
    (straight or curly) becomes its own token.  Deterministic.
    """
    toks: list[Tok] = []
    i = 0
    n = len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        j = i
        while j < n and not text[j].isspace():
            j += 1
        # chunk is text[i:j]
        left, right = i, j
        while left < right and _is_punct(text[left]):
            toks.append(Tok(text[left], left, left + 1))
            left += 1
        trailing: list[Tok] = []
        while right > left and _is_punct(text[right - 1]):
            trailing.append(Tok(text[right - 1], right - 1, right))
            right -= 1
        if left < right:
            core = text[left:right]
            if len(core) > 2 and core[-2:].casefold() in POSSESSIVE_CLITICS:
                toks.append(Tok(core[:-2], left, right - 2))
                toks.append(Tok(core[-2:], right - 2, right))
            else:
                toks.append(Tok(core, left, right))
        toks.extend(reversed(trailing))
        i = j
    return toks


def _token_triples(
    doc: Document, tokens_layer: Optional[Sequence[Token]]
) -> list[tuple[str, int, int]]:
    if tokens_layer is not None:
        return [(t.text, t.span.begin, t.span.end) for t in tokens_layer]
    return [(t.text, t.begin, t.end) for t in tokenize(doc.text)]


def _encode_patterns(
    rule: MatchRule, vocab: dict[str, int]
) -> tuple[array, array, array]:
    """Flatten one rule's patterns into the kernel's offset tables."""
    pat_offsets = array("i", [0])
    pos_offsets = array("i", [0])
    alt_ids = array("i")
    for pattern in rule.patterns:
        for alternatives in pattern:
            for alt in sorted(alternatives):
                alt_ids.append(vocab[alt])
            pos_offsets.append(len(alt_ids))
        pat_offsets.append(len(pos_offsets) - 1)
    return pat_offsets, pos_offsets, alt_ids


def match_document(
    doc: Document,
    ruleset: RuleSet,
    tokens_layer: Optional[Sequence[Token]] = None,
) -> list[Candidate]:
    """Scan one document and emit every motif candidate.

    Per motif the result is the leftmost-longest non-overlapping cover;
    when allow_possessive is set and the following token is a possessive
    clitic the candidate span extends over it.  Candidates come back
    ordered by (begin, motif_id) with 1-based ordinal ids.
    """
    triples = _token_triples(doc, tokens_layer)
    texts = [t[0] for t in triples]
    folded = [t.casefold() for t in texts]
    clitic = array("B", [1 if f in POSSESSIVE_CLITICS else 0 for f in folded])

    # Separate vocabularies for the case-folded and raw comparison spaces.
    fold_vocab: dict[str, int] = {}
    raw_vocab: dict[str, int] = {}
    for rule in ruleset.rules:
        vocab = raw_vocab if rule.case_sensitive else fold_vocab
        for pattern in rule.patterns:
            for alternatives in pattern:
                for alt in alternatives:
                    vocab.setdefault(alt, len(vocab))

    fold_ids = array("i", [fold_vocab.get(f, -1) for f in folded])
    raw_ids = array("i", [raw_vocab.get(t, -1) for t in texts])

    matches: list[tuple[int, str, int]] = []  # (begin, motif_id, end)
    for rule in ruleset.rules:
        vocab = raw_vocab if rule.case_sensitive else fold_vocab
        token_ids = raw_ids if rule.case_sensitive else fold_ids
        pat_offsets, pos_offsets, alt_ids = _encode_patterns(rule, vocab)
        for start, length, ext in _kernels.scan(
            token_ids, pat_offsets, pos_offsets, alt_ids, clitic, rule.allow_possessive
        ):
            begin = triples[start][1]
            end = triples[start + length - 1 + ext][2]
            matches.append((begin, rule.motif_id, end))

    matches.sort(key=lambda m: (m[0], m[1]))
    candidates = []
    for ordinal, (begin, motif_id, end) in enumerate(matches, start=1):
        candidates.append(
            Candidate(
                candidate_id=f"{doc.doc_id}#{ordinal}",
                doc_id=doc.doc_id,
                span=Span(begin, end),
                motif_id=motif_id,
                surface=doc.text[begin:end],
            )
        )
    return candidates
