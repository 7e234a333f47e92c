"""Deterministic heuristic annotators.

These stand in for the heavyweight preprocessing stack: a rule
tokenizer, sentence splitter, lexicon/suffix POS tagger, head-assignment
dependency rules, capitalization+gazetteer NER, string-match coreference
with pronoun attachment, verb events, and dependency-projected SRL
frames.  Linguistic quality is deliberately modest; the contract is
structural conformance (code-point offsets, token-aligned spans, valid
indices) and bit-stable output.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass

CLITICS = ("'s", "’s")

DET = {"the", "a", "an", "its", "his", "her", "their", "this", "that", "these", "those"}
ADP = {
    "of", "in", "on", "with", "over", "under", "by", "for", "from", "near",
    "before", "after", "as", "like", "at", "outside", "into", "through", "against",
}
PRON = {"he", "she", "it", "they", "we", "i", "you", "who"}
AUX = {"is", "was", "were", "are", "be", "been", "being", "has", "had", "have", "will", "would", "can", "could", "did", "do", "does"}
SCONJ = {"when", "while", "because", "if", "how", "although", "since"}
CCONJ = {"and", "or", "but"}

VERBS = {
    "ran", "run", "runs", "said", "say", "says", "made", "make", "makes",
    "took", "take", "takes", "saw", "see", "sees", "went", "go", "goes",
    "fell", "fall", "falls", "rose", "rise", "rises", "told", "tell", "tells",
    "sang", "sing", "sings", "spoke", "speak", "speaks", "left", "leave",
    "leaves", "stood", "stands", "stand", "came", "come", "comes", "bought",
    "buy", "buys", "met", "meet", "meets", "held", "hold", "holds", "broke",
    "break", "breaks", "wrote", "write", "writes", "grew", "grow", "grows",
    "drew", "draw", "draws", "won", "win", "wins", "lost", "lose", "loses",
    "chose", "chosen",
}

ORG_SUFFIXES = {"systems", "inc", "corp", "ltd", "company", "group", "bank", "club"}
LOC_GAZETTEER = {
    "dublin", "belfast", "kilkenny", "ireland", "jerusalem", "egypt",
    "juan", "rico", "miami", "york", "london",
}
ANIMATE_PRONOUNS = {"he", "she", "they"}


@dataclass(frozen=True)
class Tok:
    index: int
    begin: int
    end: int
    text: str
    pos: str
    lemma: str


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(text: str) -> list[tuple[str, int, int]]:
    """Whitespace split with punctuation peeling and clitic separation."""
    out: list[tuple[str, int, int]] = []
    i, n = 0, len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        j = i
        while j < n and not text[j].isspace():
            j += 1
        left, right = i, j
        while left < right and _is_punct(text[left]):
            out.append((text[left], left, left + 1))
            left += 1
        trailing = []
        while right > left and _is_punct(text[right - 1]):
            trailing.append((text[right - 1], right - 1, right))
            right -= 1
        if left < right:
            core = text[left:right]
            if len(core) > 2 and core[-2:].casefold() in CLITICS:
                out.append((core[:-2], left, right - 2))
                out.append((core[-2:], right - 2, right))
            else:
                out.append((core, left, right))
        out.extend(reversed(trailing))
        i = j
    return out


def split_sentences(tokens: list[tuple[str, int, int]]) -> list[tuple[int, int]]:
    """Sentence boundaries as token-index ranges [lo, hi)."""
    if not tokens:
        return []
    ranges = []
    lo = 0
    for k, (text, _, _) in enumerate(tokens):
        if text in (".", "!", "?"):
            nxt = tokens[k + 1][0] if k + 1 < len(tokens) else None
            if nxt is None or nxt[:1].isupper() or nxt in ('"', "“", "'"):
                ranges.append((lo, k + 1))
                lo = k + 1
    if lo < len(tokens):
        ranges.append((lo, len(tokens)))
    return ranges


def tag_tokens(raw: list[tuple[str, int, int]], sent_ranges: list[tuple[int, int]]) -> list[Tok]:
    sentence_initial = {lo for lo, _ in sent_ranges}
    capitalized_elsewhere = {
        t[0].casefold()
        for k, t in enumerate(raw)
        if k not in sentence_initial and t[0][:1].isupper()
    }

    toks = []
    for k, (text, begin, end) in enumerate(raw):
        folded = text.casefold()
        pos = "NOUN"
        if all(_is_punct(ch) for ch in text):
            pos = "PUNCT"
        elif folded in CLITICS:
            pos = "PART"
        elif text.replace(",", "").replace(".", "").isdigit():
            pos = "NUM"
        elif folded in DET:
            pos = "DET"
        elif folded in ADP:
            pos = "ADP"
        elif folded in PRON:
            pos = "PRON"
        elif folded in AUX:
            pos = "AUX"
        elif folded in SCONJ:
            pos = "SCONJ"
        elif folded in CCONJ:
            pos = "CCONJ"
        elif folded in VERBS:
            pos = "VERB"
        elif len(folded) > 3 and folded.endswith("ed"):
            pos = "VERB"
        elif len(folded) > 4 and folded.endswith("ing"):
            pos = "VERB"
        elif len(folded) > 3 and folded.endswith("ly"):
            pos = "ADV"
        elif text[:1].isupper():
            if k not in sentence_initial:
                pos = "PROPN"
            elif any(ch.isupper() for ch in text[1:]) or folded in capitalized_elsewhere:
                pos = "PROPN"

        lemma = folded
        if pos == "VERB" and len(lemma) > 4 and lemma.endswith("ed"):
            lemma = lemma[:-2]
        elif pos == "NOUN" and len(lemma) > 3 and lemma.endswith("s") and not lemma.endswith("ss"):
            lemma = lemma[:-1]
        toks.append(Tok(k, begin, end, text, pos, lemma))
    return toks


def assign_deps(toks: list[Tok], sent_ranges: list[tuple[int, int]]) -> list[tuple[int, int, str]]:
    """(token, head, relation) triples; exactly one root per sentence."""
    deps = []
    for lo, hi in sent_ranges:
        idxs = list(range(lo, hi))
        pos = {k: toks[k].pos for k in idxs}
        root = next((k for k in idxs if pos[k] == "VERB"), idxs[0])
        nouny = ("NOUN", "PROPN", "PRON", "NUM")
        nouns_after_root = [k for k in idxs if k > root and pos[k] in nouny]
        for k in idxs:
            if k == root:
                deps.append((k, -1, "root"))
                continue
            rel, head = "dep", root
            text = toks[k].text.casefold()
            if pos[k] == "PUNCT":
                rel = "punct"
            elif text in CLITICS:
                rel, head = "case", k - 1
            elif pos[k] == "DET":
                nxt = next((j for j in idxs if j > k and pos[j] in ("NOUN", "PROPN")), root)
                rel, head = "det", nxt
            elif pos[k] in ("ADJ", "NUM"):
                nxt = next((j for j in idxs if j > k and pos[j] in ("NOUN", "PROPN")), root)
                rel, head = "amod", nxt
            elif pos[k] in ("ADP", "SCONJ"):
                rel = "mark"
            elif pos[k] in ("AUX",):
                rel = "aux"
            elif pos[k] == "ADV":
                rel = "advmod"
            elif pos[k] == "VERB":
                rel = "advcl"
            elif pos[k] in nouny:
                if k + 1 < hi and toks[k + 1].text.casefold() in CLITICS:
                    owner = next(
                        (j for j in idxs if j > k + 1 and pos[j] in ("NOUN", "PROPN")),
                        root,
                    )
                    rel, head = "poss", owner
                elif k - 1 >= lo and pos[k - 1] == "PROPN" and pos[k] == "PROPN":
                    run = k - 1
                    while run - 1 >= lo and pos[run - 1] == "PROPN":
                        run -= 1
                    rel, head = "flat", run
                elif k < root:
                    rel = "nsubj"
                elif nouns_after_root and k == nouns_after_root[0]:
                    rel = "obj"
                else:
                    rel = "obl"
            if head == k:
                head = root
                if head == k:
                    head = -1
            deps.append((k, head, rel))
    return deps


def propn_runs(toks: list[Tok], sent_ranges: list[tuple[int, int]]) -> list[tuple[int, int]]:
    runs = []
    for lo, hi in sent_ranges:
        k = lo
        while k < hi:
            if toks[k].pos == "PROPN":
                start = k
                while k + 1 < hi and toks[k + 1].pos == "PROPN":
                    k += 1
                runs.append((start, k + 1))
            k += 1
    return runs


def ner_label(toks: list[Tok], run: tuple[int, int]) -> str:
    words = [toks[k].text.casefold() for k in range(run[0], run[1])]
    if any(w in LOC_GAZETTEER for w in words):
        return "LOC"
    if any(w in ORG_SUFFIXES for w in words):
        return "ORG"
    return "PERSON"


def build_ner(toks: list[Tok], sent_ranges) -> list[tuple[int, int, str]]:
    """(begin_char, end_char, label) for each proper-noun run."""
    spans = []
    for run in propn_runs(toks, sent_ranges):
        label = ner_label(toks, run)
        spans.append((toks[run[0]].begin, toks[run[1] - 1].end, label))
    return spans


def build_coref(toks, sent_ranges, deps):
    """Chains of repeated proper-noun strings plus attached pronouns.

    Returns (chain_id, mentions, animate, character) tuples; mentions
    are (begin, end) char spans.
    """
    nsubj_tokens = {t for t, _, rel in deps if rel == "nsubj"}
    runs = propn_runs(toks, sent_ranges)
    by_surface: dict[str, list[tuple[int, int]]] = {}
    labels: dict[str, str] = {}
    order: list[str] = []
    for run in runs:
        surface = " ".join(toks[k].text.casefold() for k in range(run[0], run[1]))
        if surface not in by_surface:
            by_surface[surface] = []
            labels[surface] = ner_label(toks, run)
            order.append(surface)
        by_surface[surface].append(run)

    chains = []
    last_person_chain: dict[int, int] = {}  # token index -> chain id, filled below
    chain_index: dict[str, int] = {}
    for surface in order:
        cid = len(chains)
        chain_index[surface] = cid
        runs_here = by_surface[surface]
        animate = labels[surface] == "PERSON"
        character = animate and any(
            any(k in nsubj_tokens for k in range(r[0], r[1])) for r in runs_here
        )
        mentions = [(toks[r[0]].begin, toks[r[1] - 1].end) for r in runs_here]
        chains.append({"chain": cid, "mentions": mentions, "animate": animate, "character": character})

    # attach animate pronouns to the closest preceding PERSON mention
    person_positions = [
        (r[0], chain_index[" ".join(toks[k].text.casefold() for k in range(r[0], r[1]))])
        for r in runs
        if ner_label(toks, r) == "PERSON"
    ]
    for tok in toks:
        if tok.text.casefold() in ANIMATE_PRONOUNS:
            preceding = [c for p, c in person_positions if p < tok.index]
            if preceding:
                chains[preceding[-1]]["mentions"].append((tok.begin, tok.end))

    for chain in chains:
        chain["mentions"].sort()
    return chains


def build_events(toks) -> list[tuple[int, int]]:
    return [(t.begin, t.end) for t in toks if t.pos == "VERB"]


def build_srl(toks, deps) -> list[dict]:
    children: dict[int, list[tuple[int, str]]] = {}
    for token, head, rel in deps:
        if head >= 0:
            children.setdefault(head, []).append((token, rel))
    frames = []
    for tok in toks:
        if tok.pos != "VERB":
            continue
        args = []
        for child, rel in sorted(children.get(tok.index, ())):
            role = {"nsubj": "ARG0", "obj": "ARG1", "obl": "ARGM"}.get(rel)
            if role:
                args.append({"role": role, "begin": toks[child].begin, "end": toks[child].end})
        if args:
            frames.append(
                {"pred": {"begin": tok.begin, "end": tok.end}, "args": args}
            )
    return frames
