"""nlp-adapter command line: annotate a raw-text corpus into layer files."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .candflags import load_lexicon, stub_candflags
from .layers import COMPONENTS, AdapterConfig, annotate_corpus


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="nlp-adapter",
        description="Produce standoff NLP layer directories for a raw-text corpus.",
    )
    parser.add_argument("--corpus", type=Path, required=True, help="input corpus directory")
    parser.add_argument("--out", type=Path, required=True, help="output corpus directory")
    parser.add_argument(
        "--components",
        default=",".join(COMPONENTS),
        help="comma-separated subset of tokens,sentences,deps,ner,coref,events,srl,candflags",
    )
    parser.add_argument("--lexicon", type=Path, help="figurative cue lexicon (for candflags)")
    parser.add_argument(
        "--candidates", type=Path, help="candidates.jsonl manifest (required for candflags)"
    )
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")

    components = frozenset(c.strip() for c in args.components.split(",") if c.strip())
    components |= {"tokens"}
    config = AdapterConfig(
        corpus_dir=args.corpus,
        output_dir=args.out,
        components=components,
        figurative_lexicon_path=args.lexicon,
    )

    layer_components = components - {"candflags"}
    written = annotate_corpus(
        AdapterConfig(
            corpus_dir=config.corpus_dir,
            output_dir=config.output_dir,
            components=frozenset(layer_components),
            figurative_lexicon_path=config.figurative_lexicon_path,
        )
    )
    print(f"annotated {len(written)} documents -> {config.output_dir}")

    if "candflags" in components:
        if args.candidates is None:
            parser.error("--candidates is required when candflags is requested")
        lexicon = load_lexicon(args.lexicon) if args.lexicon else {}
        counts = stub_candflags(args.candidates, lexicon, config.output_dir)
        print(f"wrote candflags for {sum(counts.values())} candidates in {len(counts)} documents")
    return 0


if __name__ == "__main__":
    sys.exit(main())
