import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from motifkit.corpus import (
    Candidate,
    CandFlags,
    CorefChain,
    Dep,
    Document,
    LayerBundle,
    NerSpan,
    Span,
    Token,
    UsageLabel,
    load_document,
    read_brat,
    read_layers,
    validate_layers,
    write_brat,
    write_layers,
)
from motifkit.errors import BratFormatError, CorpusError, LayerFormatError, LayerValidationError


class TestLoadDocument:
    def test_plain_read(self, tmp_path):
        path = tmp_path / "a1.txt"
        path.write_text("Finn McCool ran.", encoding="utf-8")
        doc = load_document(path)
        assert doc.doc_id == "a1"
        assert len(doc.text) == 16
        assert doc.text == "Finn McCool ran."

    def test_bom_stripped(self, tmp_path):
        path = tmp_path / "bom.txt"
        path.write_bytes(b"\xef\xbb\xbfx")
        doc = load_document(path)
        assert doc.text == "x"
        assert len(doc.text) == 1

    def test_code_point_length(self, tmp_path):
        # len() must count code points, not bytes
        path = tmp_path / "pr.txt"
        path.write_bytes("coquí".encode("utf-8"))
        assert len(path.read_bytes()) == 6
        doc = load_document(path)
        assert len(doc.text) == 5

    def test_invalid_utf8(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_bytes(b"\xff\xfe\x00bad")
        with pytest.raises(UnicodeDecodeError):
            load_document(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.txt"
        path.write_bytes(b"")
        assert load_document(path).text == ""


class TestReadBrat:
    DOC = Document("a1", "a young Finn McCool with limbs")

    def test_single_t_line(self):
        pairs = read_brat("T1\tfinn-mccool 8 19\tFinn McCool\n", self.DOC)
        assert len(pairs) == 1
        cand, label = pairs[0]
        assert cand.candidate_id == "a1#1"
        assert cand.motif_id == "finn-mccool"
        assert cand.surface == "Finn McCool"
        assert cand.span == Span(8, 19)
        assert label is None

    def test_usage_attribute(self):
        text = "T1\tfinn-mccool 8 19\tFinn McCool\nA1\tUsage T1 Motific\n"
        pairs = read_brat(text, self.DOC)
        assert pairs[0][1] == UsageLabel.MOTIFIC

    def test_covered_text_mismatch_names_line(self):
        doc = Document("b", "Behold")
        with pytest.raises(BratFormatError, match="line 1"):
            read_brat("T1\tamalek 0 6\tAmalek\n", doc)

    def test_span_out_of_bounds(self):
        with pytest.raises(BratFormatError, match="out of bounds"):
            read_brat("T1\tamalek 0 99\tAmalek\n", self.DOC)

    def test_unknown_t_target(self):
        with pytest.raises(BratFormatError, match="unknown T2"):
            read_brat(
                "T1\tfinn-mccool 8 19\tFinn McCool\nA1\tUsage T2 Motific\n", self.DOC
            )

    def test_unknown_usage_value(self):
        with pytest.raises(BratFormatError, match="unknown Usage value"):
            read_brat(
                "T1\tfinn-mccool 8 19\tFinn McCool\nA1\tUsage T1 Banana\n", self.DOC
            )

    def test_t_index_order(self):
        text = (
            "T2\tfinn-mccool 8 19\tFinn McCool\n"
            "T1\tfinn-mccool 2 7\tyoung\n"
        )
        pairs = read_brat(text, self.DOC)
        assert [c.candidate_id for c, _ in pairs] == ["a1#1", "a1#2"]
        assert pairs[0][0].surface == "young"


class TestWriteBrat:
    DOC = Document("a1", "a young Finn McCool with limbs")

    def _cand(self, ordinal, begin, end, motif="finn-mccool"):
        return Candidate(
            candidate_id=f"a1#{ordinal}",
            doc_id="a1",
            span=Span(begin, end),
            motif_id=motif,
            surface=self.DOC.text[begin:end],
        )

    def test_single_labeled_candidate(self):
        out = write_brat([(self._cand(1, 8, 19), UsageLabel.MOTIFIC)], self.DOC)
        assert out == "T1\tfinn-mccool 8 19\tFinn McCool\nA1\tUsage T1 Motific\n"

    def test_empty_list(self):
        assert write_brat([], self.DOC) == ""

    def test_a_line_targets_middle_candidate(self):
        pairs = [
            (self._cand(1, 0, 1), None),
            (self._cand(2, 2, 7), UsageLabel.EPONYMIC),
            (self._cand(3, 8, 19), None),
        ]
        out = write_brat(pairs, self.DOC)
        lines = out.splitlines()
        assert len(lines) == 4
        assert lines[3] == "A1\tUsage T2 Eponymic"

    def test_invalid_span_rejected(self):
        bad = Candidate("a1#1", "a1", Span(8, 19), "finn-mccool", "wrong")
        with pytest.raises(CorpusError):
            write_brat([(bad, None)], self.DOC)

    def test_newline_in_surface_roundtrips(self):
        doc = Document("n1", "Finn\nMcCool spoke")
        cand = Candidate("n1#1", "n1", Span(0, 11), "finn-mccool", doc.text[0:11])
        out = write_brat([(cand, None)], doc)
        assert "Finn McCool" in out
        assert read_brat(out, doc) == [(cand, None)]


# Alphabet includes whitespace, accents, and line breaks (ASCII and
# Unicode LINE SEPARATOR) on purpose.
_TEXT = st.text(
    alphabet=st.sampled_from(list("ab coquí\nFinn.'- ")), min_size=1, max_size=60
)


@st.composite
def _doc_and_pairs(draw):
    text = draw(_TEXT)
    doc = Document("d", text)
    n = draw(st.integers(min_value=0, max_value=5))
    pairs = []
    for ordinal in range(1, n + 1):
        begin = draw(st.integers(min_value=0, max_value=len(text) - 1))
        end = draw(st.integers(min_value=begin + 1, max_value=len(text)))
        motif = draw(st.sampled_from(["finn-mccool", "coqui", "amalek"]))
        label = draw(st.none() | st.sampled_from(list(UsageLabel)))
        cand = Candidate(f"d#{ordinal}", "d", Span(begin, end), motif, text[begin:end])
        pairs.append((cand, label))
    return doc, pairs


class TestBratRoundTrip:
    @settings(max_examples=200, deadline=None)
    @given(_doc_and_pairs())
    def test_read_write_round_trip(self, case):
        doc, pairs = case
        assert read_brat(write_brat(pairs, doc), doc) == pairs


def _write_jsonl(path, records):
    path.write_text(
        "".join(json.dumps(r, separators=(",", ":")) + "\n" for r in records),
        encoding="utf-8",
    )


def _token_records(doc_text):
    # whitespace tokens, adequate for layer fixtures
    records = []
    offset = 0
    for i, word in enumerate(doc_text.split()):
        begin = doc_text.index(word, offset)
        records.append(
            {
                "i": i,
                "begin": begin,
                "end": begin + len(word),
                "text": word,
                "pos": "NOUN",
                "lemma": word.lower(),
            }
        )
        offset = begin + len(word)
    return records


class TestReadLayers:
    def test_tokens_only(self, tmp_path):
        doc = Document("d1", "Finn ran home")
        _write_jsonl(tmp_path / "tokens.jsonl", _token_records(doc.text))
        bundle = read_layers(tmp_path, doc)
        assert len(bundle.tokens) == 3
        assert bundle.ner == ()
        assert bundle.coref == ()
        assert bundle.events == ()
        assert bundle.srl == ()

    def test_coref_chains(self, tmp_path):
        doc = Document("d1", "Finn ran and Finn fell")
        _write_jsonl(tmp_path / "tokens.jsonl", _token_records(doc.text))
        _write_jsonl(
            tmp_path / "coref.jsonl",
            [
                {
                    "chain": 0,
                    "mentions": [{"begin": 0, "end": 4}, {"begin": 13, "end": 17}],
                    "animate": True,
                    "character": True,
                },
                {
                    "chain": 1,
                    "mentions": [{"begin": 5, "end": 8}],
                    "animate": False,
                    "character": False,
                },
            ],
        )
        bundle = read_layers(tmp_path, doc)
        assert len(bundle.coref) == 2
        assert sum(1 for c in bundle.coref if c.animate) == 1

    def test_dep_head_out_of_range(self, tmp_path):
        doc = Document("d1", "Finn ran home")
        _write_jsonl(tmp_path / "tokens.jsonl", _token_records(doc.text))
        _write_jsonl(tmp_path / "deps.jsonl", [{"i": 0, "head": 99, "rel": "nsubj"}])
        with pytest.raises(LayerValidationError, match="head index 99"):
            read_layers(tmp_path, doc)

    def test_missing_tokens_file(self, tmp_path):
        doc = Document("d1", "Finn ran")
        with pytest.raises(LayerFormatError, match="tokens layer is required"):
            read_layers(tmp_path, doc)

    def test_malformed_record_names_file_and_line(self, tmp_path):
        doc = Document("d1", "Finn ran")
        (tmp_path / "tokens.jsonl").write_text(
            '{"i":0,"begin":0,"end":4,"text":"Finn","pos":"N","lemma":"finn"}\nnot json\n',
            encoding="utf-8",
        )
        with pytest.raises(LayerFormatError, match=r"tokens\.jsonl:2"):
            read_layers(tmp_path, doc)

    def test_token_overlap_rejected(self, tmp_path):
        doc = Document("d1", "Finn ran")
        _write_jsonl(
            tmp_path / "tokens.jsonl",
            [
                {"i": 0, "begin": 0, "end": 4, "text": "Finn", "pos": "N", "lemma": "f"},
                {"i": 1, "begin": 2, "end": 8, "text": "nn ran", "pos": "N", "lemma": "n"},
            ],
        )
        with pytest.raises(LayerValidationError, match="overlaps"):
            read_layers(tmp_path, doc)

    def test_openie_file_is_ignored(self, tmp_path):
        # extra layer files (OpenIE triplets and the like) are tolerated
        doc = Document("d1", "Finn ran home")
        _write_jsonl(tmp_path / "tokens.jsonl", _token_records(doc.text))
        (tmp_path / "openie.jsonl").write_text("not even json\n", encoding="utf-8")
        bundle = read_layers(tmp_path, doc)
        assert len(bundle.tokens) == 3

    def test_deterministic_reload(self, tmp_path):
        doc = Document("d1", "Finn ran and Finn fell")
        _write_jsonl(tmp_path / "tokens.jsonl", _token_records(doc.text))
        _write_jsonl(tmp_path / "events.jsonl", [{"begin": 5, "end": 8}])
        _write_jsonl(
            tmp_path / "candflags.jsonl",
            [{"candidate_id": "d1#1", "metaphor": True, "simile": False, "possession": False}],
        )
        assert read_layers(tmp_path, doc) == read_layers(tmp_path, doc)

    def test_write_read_round_trip(self, tmp_path):
        doc = Document("d1", "Finn ran and Finn fell")
        tokens = tuple(
            Token(r["i"], Span(r["begin"], r["end"]), r["text"], r["pos"], r["lemma"])
            for r in _token_records(doc.text)
        )
        bundle = LayerBundle(
            tokens=tokens,
            sentences=(Span(0, 22),),
            deps=(Dep(0, 1, "nsubj"), Dep(1, -1, "root")),
            ner=(NerSpan(Span(0, 4), "PERSON"),),
            coref=(CorefChain(0, (Span(0, 4),), True, True),),
            events=(Span(5, 8),),
            cand_flags={"d1#1": CandFlags(metaphor=True)},
        )
        write_layers(bundle, tmp_path)
        assert read_layers(tmp_path, doc) == bundle


class TestValidateLayers:
    def _bundle(self, doc):
        tokens = tuple(
            Token(r["i"], Span(r["begin"], r["end"]), r["text"], r["pos"], r["lemma"])
            for r in _token_records(doc.text)
        )
        return LayerBundle(tokens=tokens)

    def test_consistent_fixture(self):
        doc = Document("d1", "Finn ran home")
        report = validate_layers(self._bundle(doc), doc)
        assert report.ok
        assert report.findings == ()

    def test_ner_splitting_token_is_warning(self):
        doc = Document("d1", "Finn ran home")
        bundle = self._bundle(doc)
        bundle = LayerBundle(tokens=bundle.tokens, ner=(NerSpan(Span(0, 2), "PERSON"),))
        report = validate_layers(bundle, doc)
        assert len(report.warnings) == 1
        assert not report.errors
        assert "splits a token" in report.warnings[0].message

    def test_unsorted_tokens_is_error(self):
        doc = Document("d1", "Finn ran home")
        good = self._bundle(doc).tokens
        swapped = (good[1], good[0], good[2])
        report = validate_layers(LayerBundle(tokens=swapped), doc)
        assert len(report.errors) >= 1

    def test_empty_coref_chain_is_error(self):
        doc = Document("d1", "Finn ran home")
        bundle = LayerBundle(
            tokens=self._bundle(doc).tokens,
            coref=(CorefChain(0, (), False, False),),
        )
        report = validate_layers(bundle, doc)
        assert any("no mentions" in f.message for f in report.errors)


class TestCandidateIntegrity:
    def test_surface_must_match_slice(self):
        doc = Document("d1", "Finn ran")
        good = Candidate("d1#1", "d1", Span(0, 4), "finn-mccool", "Finn")
        good.check_against(doc)
        bad = Candidate("d1#1", "d1", Span(0, 4), "finn-mccool", "Fin")
        with pytest.raises(CorpusError):
            bad.check_against(doc)

    def test_span_bounds(self):
        with pytest.raises(CorpusError):
            Span(3, 3)
        with pytest.raises(CorpusError):
            Span(-1, 2)
