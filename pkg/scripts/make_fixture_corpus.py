#!/usr/bin/env python3
"""Generate the bundled six-document fixture corpus.

Each document directory gets text.txt, the full set of layer files, and
a gold .ann with adjudicated usage labels.  Dependency trees are
synthesized by a tiny deterministic head-assignment rule set: they are
structurally valid (one root per sentence, indices in range), which is
what the pipeline fixtures need.  Rerunning the script reproduces
identical bytes.
"""

import json
import shutil
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from motifkit.corpus import (
    CandFlags,
    CorefChain,
    Dep,
    Document,
    LayerBundle,
    NerSpan,
    Span,
    SrlArg,
    SrlFrame,
    Token,
    UsageLabel,
    validate_layers,
    write_brat,
    write_layers,
)
from motifkit.matcher import compile_rules, match_document, tokenize

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "corpus6"

RULES = [
    {
        "motif_id": "finn-mccool",
        "culture": "Irish",
        "type": "character",
        "display_name": "Finn McCool",
        "patterns": [["finn", "mccool"], ["finn", "mac", "cool"]],
    },
    {
        "motif_id": "banshee",
        "culture": "Irish",
        "type": "character",
        "display_name": "Banshee",
        "patterns": [["banshee"]],
        "allow_possessive": True,
    },
    {
        "motif_id": "tower-of-babel",
        "culture": "Jewish",
        "type": "prop",
        "display_name": "Tower of Babel",
        "patterns": [["tower", "of", "babel"], ["babel"]],
        "index_codes": ["C1230"],
    },
    {
        "motif_id": "amalek",
        "culture": "Jewish",
        "type": "character",
        "display_name": "Amalek",
        "patterns": [["amalek"]],
    },
    {
        "motif_id": "coqui",
        "culture": "puerto-rican",
        "type": "character",
        "display_name": "Coqui",
        "patterns": [["coqui"], ["coquí"]],
        "allow_possessive": True,
    },
    {
        "motif_id": "red-sea-parting",
        "culture": "Jewish",
        "type": "event",
        "display_name": "Parting of the Red Sea",
        "patterns": [["parting", "of", "the", "red", "sea"], ["red", "sea"]],
    },
]

POS_LEXICON = {
    "a": "DET", "an": "DET", "the": "DET", "its": "DET", "his": "DET", "their": "DET",
    "this": "DET", "twenty": "NUM",
    "lifted": "VERB", "cheered": "VERB", "crossed": "VERB", "echoed": "VERB",
    "called": "VERB", "crumbled": "VERB", "left": "VERB", "say": "VERB",
    "stands": "VERB", "hired": "VERB", "said": "VERB", "was": "VERB",
    "recalling": "VERB", "ambushed": "VERB", "filled": "VERB", "bought": "VERB",
    "described": "VERB", "alarmed": "VERB", "chirped": "VERB", "wailed": "VERB",
    "chosen": "VERB",
    "young": "ADJ", "final": "ADJ", "old": "ADJ", "failed": "ADJ", "weary": "ADJ",
    "exotic": "ADJ",
    "with": "ADP", "of": "ADP", "over": "ADP", "before": "ADP", "for": "ADP",
    "like": "ADP", "as": "ADP", "by": "ADP", "outside": "ADP", "at": "ADP",
    "when": "SCONJ", "how": "SCONJ",
    "and": "CCONJ",
    "he": "PRON", "she": "PRON", "it": "PRON", "they": "PRON",
    "finn": "PROPN", "mccool": "PROPN", "babel": "PROPN", "tower": "PROPN",
    "amalek": "PROPN", "systems": "PROPN", "red": "PROPN", "sea": "PROPN",
    "dublin": "PROPN",
}

PUNCT = {".", ",", ";", ":", "!", "?", "'", '"', "(", ")", "’"}


def pos_of(word: str) -> str:
    if word in ("'s", "’s"):
        return "PART"
    if all(ch in PUNCT for ch in word):
        return "PUNCT"
    return POS_LEXICON.get(word.casefold(), "NOUN")


def lemma_of(word: str) -> str:
    return word.casefold()


def assign_deps(tokens, sent_ranges):
    """Deterministic head assignment; one root per sentence."""
    deps = []
    for lo, hi in sent_ranges:
        idxs = list(range(lo, hi))
        pos = {i: tokens[i].pos for i in idxs}
        root = next((i for i in idxs if pos[i] == "VERB"), idxs[0])
        nouns_after_root = [
            i for i in idxs if i > root and pos[i] in ("NOUN", "PROPN", "PRON")
        ]
        for i in idxs:
            if i == root:
                deps.append(Dep(i, -1, "root"))
                continue
            rel, head = "dep", root
            if pos[i] == "PUNCT":
                rel = "punct"
            elif tokens[i].text in ("'s", "’s"):
                rel, head = "case", i - 1
            elif pos[i] == "DET":
                nxt = next((j for j in idxs if j > i and pos[j] in ("NOUN", "PROPN")), root)
                rel, head = "det", nxt
            elif pos[i] == "ADJ":
                nxt = next((j for j in idxs if j > i and pos[j] in ("NOUN", "PROPN")), root)
                rel, head = "amod", nxt
            elif pos[i] in ("ADP", "SCONJ"):
                rel = "mark"
            elif pos[i] == "VERB":
                rel = "advcl"
            elif pos[i] in ("NOUN", "PROPN", "PRON"):
                if i + 1 < hi and tokens[i + 1].text in ("'s", "’s"):
                    owner = next(
                        (j for j in idxs if j > i + 1 and pos[j] in ("NOUN", "PROPN")),
                        root,
                    )
                    rel, head = "poss", owner
                elif i - 1 >= lo and pos[i - 1] == "PROPN" and pos[i] == "PROPN":
                    run = i - 1
                    while run - 1 >= lo and pos[run - 1] == "PROPN":
                        run -= 1
                    rel, head = "flat", run
                elif i < root:
                    rel = "nsubj"
                elif nouns_after_root and i == nouns_after_root[0]:
                    rel = "obj"
                else:
                    rel = "obl"
            if head == i:
                head = root if i != root else -1
            deps.append(Dep(i, head, rel))
    return tuple(deps)


def find_span(text: str, phrase: str, occurrence: int = 1) -> Span:
    """Word-boundary-aligned occurrence of phrase (1-based occurrence)."""
    start = -1
    found = 0
    while found < occurrence:
        start = text.index(phrase, start + 1)
        end = start + len(phrase)
        left_ok = start == 0 or not (text[start - 1].isalnum() and text[start].isalnum())
        right_ok = end >= len(text) or not (text[end - 1].isalnum() and text[end].isalnum())
        if left_ok and right_ok:
            found += 1
    return Span(start, start + len(phrase))


DOCS = [
    {
        "doc_id": "news-irish-01",
        "sentences": [
            "A young Finn McCool with limbs of iron lifted the final stone.",
            "Fans cheered as he crossed the line.",
        ],
        "ner": [("Finn McCool", "PERSON")],
        "coref": [
            {"mentions": ["Finn McCool", "he"], "animate": True, "character": True},
            {"mentions": ["Fans"], "animate": True, "character": False},
        ],
        "events": ["lifted", "cheered", "crossed"],
        "srl": [
            {"pred": "lifted", "args": [("ARG0", "Finn McCool"), ("ARG1", "the final stone")]},
            {"pred": "crossed", "args": [("ARG0", "he"), ("ARG1", "the line")]},
        ],
        "labels": ["Motific"],
        "flags": {1: {"metaphor": True}},
    },
    {
        "doc_id": "news-irish-02",
        "sentences": [
            "The banshee's cry echoed over the stadium before the final.",
            "Critics called the defeat a banshee wail for the old guard.",
        ],
        "ner": [],
        "coref": [{"mentions": ["Critics"], "animate": True, "character": False}],
        "events": ["echoed", "called"],
        "srl": [
            {"pred": "called", "args": [("ARG0", "Critics"), ("ARG1", "the defeat")]},
        ],
        "labels": ["Motific", "Referential"],
        "flags": {1: {"metaphor": True, "possession": True}, 2: {}},
    },
    {
        "doc_id": "news-jewish-01",
        "sentences": [
            "The committee crumbled like the Tower of Babel when the translators left.",
            "Scholars say Babel stands for failed unity.",
        ],
        "ner": [],
        "coref": [
            {"mentions": ["The committee"], "animate": True, "character": False},
            {"mentions": ["Scholars"], "animate": True, "character": False},
        ],
        "events": ["crumbled", "left"],
        "srl": [
            {"pred": "crumbled", "args": [("ARG0", "The committee")]},
            {"pred": "say", "args": [("ARG0", "Scholars"), ("ARG1", "Babel stands for failed unity")]},
        ],
        "labels": ["Motific", "Referential"],
        "flags": {1: {"metaphor": True, "simile": True}, 2: {}},
    },
    {
        "doc_id": "news-jewish-02",
        "sentences": [
            "The startup Amalek Systems hired twenty engineers.",
            "Its founder said Amalek was chosen for shock value, recalling how Amalek ambushed the weary.",
        ],
        "ner": [("Amalek Systems", "ORG")],
        "coref": [
            {"mentions": ["The startup", "Its founder"], "animate": False, "character": False},
        ],
        "events": ["hired", "said", "ambushed"],
        "srl": [
            {"pred": "hired", "args": [("ARG0", "The startup Amalek Systems"), ("ARG1", "twenty engineers")]},
        ],
        "labels": ["Eponymic", "Eponymic", "Referential"],
        "flags": {},
    },
    {
        "doc_id": "news-pr-01",
        "sentences": [
            "The coqui's clamor filled the night market.",
            "Tourists bought coqui keychains by the dozen.",
        ],
        "ner": [],
        "coref": [{"mentions": ["Tourists"], "animate": True, "character": False}],
        "events": ["filled", "bought"],
        "srl": [
            {"pred": "bought", "args": [("ARG0", "Tourists"), ("ARG1", "coqui keychains")]},
        ],
        "labels": ["Motific", "Unrelated"],
        "flags": {1: {"metaphor": True, "possession": True}, 2: {}},
    },
    {
        "doc_id": "news-pr-02",
        "sentences": [
            "Analysts described the budget shortfall as a parting of the Red Sea moment.",
            "The red sea of deficit charts alarmed the board.",
            "A coqui chirped outside the ministry window.",
        ],
        "ner": [("Red Sea", "LOC")],
        "coref": [
            {"mentions": ["Analysts"], "animate": True, "character": False},
            {"mentions": ["the board"], "animate": True, "character": False},
        ],
        "events": ["described", "alarmed", "chirped"],
        "srl": [
            {"pred": "described", "args": [("ARG0", "Analysts"), ("ARG1", "the budget shortfall")]},
            {"pred": "alarmed", "args": [("ARG0", "The red sea of deficit charts"), ("ARG1", "the board")]},
        ],
        "labels": ["Motific", "Unrelated", "Referential"],
        "flags": {1: {"metaphor": True, "simile": True}, 2: {}, 3: {}},
    },
]


def build_doc(spec, ruleset):
    doc_id = spec["doc_id"]
    text = " ".join(spec["sentences"])
    doc = Document(doc_id, text)

    sent_spans = []
    offset = 0
    for sentence in spec["sentences"]:
        begin = text.index(sentence, offset)
        sent_spans.append(Span(begin, begin + len(sentence)))
        offset = begin + len(sentence)

    raw_tokens = tokenize(text)
    tokens = tuple(
        Token(i, Span(t.begin, t.end), t.text, pos_of(t.text), lemma_of(t.text))
        for i, t in enumerate(raw_tokens)
    )
    sent_ranges = []
    for span in sent_spans:
        idxs = [t.index for t in tokens if span.contains_offset(t.span.begin)]
        sent_ranges.append((idxs[0], idxs[-1] + 1))

    candidates = match_document(doc, ruleset, tokens)
    if len(candidates) != len(spec["labels"]):
        raise SystemExit(
            f"{doc_id}: expected {len(spec['labels'])} candidates, "
            f"matcher found {len(candidates)}: {[c.surface for c in candidates]}"
        )

    flags = {}
    for ordinal, flag_spec in spec["flags"].items():
        flags[f"{doc_id}#{ordinal}"] = CandFlags(
            metaphor=flag_spec.get("metaphor", False),
            simile=flag_spec.get("simile", False),
            possession=flag_spec.get("possession", False),
        )

    bundle = LayerBundle(
        tokens=tokens,
        sentences=tuple(sent_spans),
        deps=assign_deps(tokens, sent_ranges),
        ner=tuple(NerSpan(find_span(text, phrase), label) for phrase, label in spec["ner"]),
        coref=tuple(
            CorefChain(
                chain_id=i,
                mentions=tuple(find_span(text, m) for m in chain["mentions"]),
                animate=chain["animate"],
                character=chain["character"],
            )
            for i, chain in enumerate(spec["coref"])
        ),
        events=tuple(find_span(text, w) for w in spec["events"]),
        srl=tuple(
            SrlFrame(
                predicate=find_span(text, frame["pred"]),
                args=tuple(SrlArg(role, find_span(text, phrase)) for role, phrase in frame["args"]),
            )
            for frame in spec["srl"]
        ),
        cand_flags=flags,
    )

    report = validate_layers(bundle, doc)
    if report.errors:
        raise SystemExit(f"{doc_id}: fixture layers invalid: {report.errors}")

    doc_dir = OUT / doc_id
    doc_dir.mkdir(parents=True, exist_ok=True)
    (doc_dir / "text.txt").write_text(text, encoding="utf-8", newline="")
    write_layers(bundle, doc_dir)
    pairs = [(c, UsageLabel(label)) for c, label in zip(candidates, spec["labels"])]
    (doc_dir / f"{doc_id}.ann").write_text(write_brat(pairs, doc), encoding="utf-8", newline="")
    return len(candidates)


def main():
    if OUT.exists():
        shutil.rmtree(OUT)
    OUT.mkdir(parents=True)
    rules_content = "".join(json.dumps(r, separators=(",", ":")) + "\n" for r in RULES)
    (OUT / "rules.jsonl").write_text(rules_content, encoding="utf-8", newline="")
    ruleset = compile_rules(rules_content)
    total = 0
    for spec in DOCS:
        total += build_doc(spec, ruleset)
    print(f"wrote {len(DOCS)} documents, {total} candidates -> {OUT}")


if __name__ == "__main__":
    main()
