import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from motifkit.corpus import (
    Candidate,
    CandFlags,
    CorefChain,
    Culture,
    Dep,
    Document,
    LayerBundle,
    MotifEntry,
    MotifType,
    NerSpan,
    Span,
    SrlArg,
    SrlFrame,
    Token,
    UsageLabel,
)
from motifkit.errors import FeatureError
from motifkit.features import (
    FeatureConfig,
    dataset_from_jsonl,
    dataset_to_jsonl,
    extract_features,
    parse_distance,
    predict_motif_type,
    schema_id,
    schema_names,
    vectorize_batch,
)

from conftest import FIXTURES


def make_tokens(words, pos=None):
    toks = []
    offset = 0
    for i, word in enumerate(words):
        toks.append(
            Token(
                index=i,
                span=Span(offset, offset + len(word)),
                text=word,
                pos=(pos or {}).get(i, "NOUN"),
                lemma=word.lower(),
            )
        )
        offset += len(word) + 1
    return tuple(toks)


def make_doc(words):
    return Document("d", " ".join(words))


REGISTRY = {
    "finn-mccool": MotifEntry("finn-mccool", Culture.IRISH, MotifType.CHARACTER, "Finn McCool"),
    "magic-stone": MotifEntry("magic-stone", Culture.OTHER, MotifType.PROP, "Magic Stone"),
    "great-flood": MotifEntry("great-flood", Culture.OTHER, MotifType.EVENT, "Great Flood"),
}


def make_candidate(words, first, last, motif="finn-mccool"):
    toks = make_tokens(words)
    begin, end = toks[first].span.begin, toks[last].span.end
    doc = make_doc(words)
    return Candidate("d#1", "d", Span(begin, end), motif, doc.text[begin:end])


class TestParseDistance:
    DEPS = (Dep(0, 1, "det"), Dep(1, 2, "nsubj"), Dep(2, -1, "root"))

    def test_identity(self):
        assert parse_distance(1, 1, self.DEPS, 3) == 0

    def test_chain(self):
        # 0 -> 1 -> 2 head links, verified by hand BFS
        assert parse_distance(0, 2, self.DEPS, 3) == 2

    def test_disconnected(self):
        deps = (Dep(0, 1, "a"), Dep(1, -1, "root"), Dep(2, 3, "b"), Dep(3, -1, "root"))
        assert parse_distance(0, 3, deps, 4) is None

    def test_invalid_index(self):
        with pytest.raises(FeatureError):
            parse_distance(0, 9, self.DEPS, 3)

    def test_undirected(self):
        assert parse_distance(2, 0, self.DEPS, 3) == 2


class TestPredictMotifType:
    WORDS = ["Finn", "ran", "home"]

    def test_animate_chain_wins(self):
        bundle = LayerBundle(
            tokens=make_tokens(self.WORDS),
            coref=(CorefChain(0, (Span(0, 4),), True, False),),
            events=(Span(0, 4),),
        )
        cand = make_candidate(self.WORDS, 0, 0)
        assert predict_motif_type(cand, bundle) is MotifType.CHARACTER

    def test_event_second(self):
        bundle = LayerBundle(tokens=make_tokens(self.WORDS), events=(Span(0, 4),))
        cand = make_candidate(self.WORDS, 0, 0)
        assert predict_motif_type(cand, bundle) is MotifType.EVENT

    def test_prop_default(self):
        bundle = LayerBundle(tokens=make_tokens(self.WORDS))
        cand = make_candidate(self.WORDS, 0, 0)
        assert predict_motif_type(cand, bundle) is MotifType.PROP

    def test_character_chain_counts(self):
        bundle = LayerBundle(
            tokens=make_tokens(self.WORDS),
            coref=(CorefChain(0, (Span(0, 4),), False, True),),
        )
        cand = make_candidate(self.WORDS, 0, 0)
        assert predict_motif_type(cand, bundle) is MotifType.CHARACTER


class TestExtractFeatures:
    def test_figurative_only(self):
        words = ["Finn", "ran"]
        bundle = LayerBundle(
            tokens=make_tokens(words),
            cand_flags={"d#1": CandFlags(metaphor=True, simile=False)},
        )
        config = FeatureConfig(enabled_groups=frozenset({"figurative"}))
        fv = extract_features(make_candidate(words, 0, 0), bundle, REGISTRY, config)
        assert dict(fv.values) == {"metaphor_sent": 1.0, "simile_sent": 0.0}

    def test_absence_defaults(self):
        words = ["Finn", "ran", "far"]
        bundle = LayerBundle(tokens=make_tokens(words))
        config = FeatureConfig()
        fv = extract_features(make_candidate(words, 0, 0), bundle, REGISTRY, config)
        v = fv.values
        assert v["tok_dist_event"] == 1.0
        assert v["parse_dist_animate"] == 1.0
        assert v["in_event"] == 0.0
        assert v["in_animate_chain"] == 0.0
        assert v["srl_role_NONE"] == 1.0
        assert v["ner_NONE"] == 1.0
        assert v["metaphor_sent"] == 0.0
        assert all(v[f"ner_win_{l}"] == 0.0 for l in ("PERSON", "ORG", "LOC", "MISC"))

    def test_hand_computed_oracle_fixture(self):
        data = json.loads((FIXTURES / "feature_oracle.json").read_text(encoding="utf-8"))
        doc = Document(data["doc_id"], data["text"])
        bundle = LayerBundle(
            tokens=tuple(
                Token(t["i"], Span(t["begin"], t["end"]), t["text"], t["pos"], t["lemma"])
                for t in data["tokens"]
            ),
            sentences=tuple(Span(s["begin"], s["end"]) for s in data["sentences"]),
            deps=tuple(Dep(d["i"], d["head"], d["rel"]) for d in data["deps"]),
            ner=tuple(NerSpan(Span(n["begin"], n["end"]), n["label"]) for n in data["ner"]),
            coref=tuple(
                CorefChain(
                    c["chain"],
                    tuple(Span(m["begin"], m["end"]) for m in c["mentions"]),
                    c["animate"],
                    c["character"],
                )
                for c in data["coref"]
            ),
            events=tuple(Span(e["begin"], e["end"]) for e in data["events"]),
            srl=tuple(
                SrlFrame(
                    Span(f["pred"]["begin"], f["pred"]["end"]),
                    tuple(SrlArg(a["role"], Span(a["begin"], a["end"])) for a in f["args"]),
                )
                for f in data["srl"]
            ),
            cand_flags={
                r["candidate_id"]: CandFlags(r["metaphor"], r["simile"], r["possession"])
                for r in data["candflags"]
            },
        )
        c = data["candidate"]
        candidate = Candidate(
            c["candidate_id"], c["doc_id"], Span(c["begin"], c["end"]), c["motif_id"], c["surface"]
        )
        candidate.check_against(doc)
        config = FeatureConfig(
            enabled_groups=frozenset(data["config"]["groups"]),
            window_size=data["config"]["window"],
            parse_distance_cap=data["config"]["parse_cap"],
        )
        fv = extract_features(candidate, bundle, REGISTRY, config)
        assert dict(fv.values) == data["expected"]

    def test_unknown_motif(self):
        words = ["Finn"]
        bundle = LayerBundle(tokens=make_tokens(words))
        cand = make_candidate(words, 0, 0, motif="unknown-motif")
        with pytest.raises(FeatureError, match="unknown motif_id"):
            extract_features(cand, bundle, REGISTRY, FeatureConfig())

    def test_missing_tokens(self):
        cand = make_candidate(["Finn"], 0, 0)
        with pytest.raises(FeatureError, match="no tokens"):
            extract_features(cand, LayerBundle(tokens=()), REGISTRY, FeatureConfig())

    def test_head_token_selection(self):
        # "Tower of Babel": only "Tower" has its head outside the span
        words = ["the", "Tower", "of", "Babel", "fell"]
        pos = {1: "PROPN", 2: "ADP", 3: "PROPN", 4: "VERB"}
        deps = (
            Dep(0, 1, "det"),
            Dep(1, 4, "nsubj"),
            Dep(2, 3, "case"),
            Dep(3, 1, "nmod"),
            Dep(4, -1, "root"),
        )
        toks = make_tokens(words, pos)
        bundle = LayerBundle(tokens=toks, deps=deps)
        begin, end = toks[1].span.begin, toks[3].span.end
        doc = make_doc(words)
        cand = Candidate("d#1", "d", Span(begin, end), "magic-stone", doc.text[begin:end])
        fv = extract_features(cand, bundle, REGISTRY, FeatureConfig(enabled_groups=frozenset({"grammar"})))
        assert fv.values["head_pos_PROPN"] == 1.0
        assert fv.values["dep_rel_nsubj"] == 1.0

    def test_head_falls_back_to_last_token(self):
        words = ["Finn", "McCool", "ran"]
        toks = make_tokens(words, {0: "PROPN", 1: "PROPN", 2: "VERB"})
        bundle = LayerBundle(tokens=toks)  # no deps layer
        cand = make_candidate(words, 0, 1)
        fv = extract_features(cand, bundle, REGISTRY, FeatureConfig(enabled_groups=frozenset({"grammar"})))
        # last span token is McCool (PROPN); without deps the relation is OTHER
        assert fv.values["head_pos_PROPN"] == 1.0
        assert fv.values["dep_rel_OTHER"] == 1.0

    def test_type_check_mismatch(self):
        words = ["Finn", "ran"]
        bundle = LayerBundle(tokens=make_tokens(words))  # no layers: predicts Prop
        cand = make_candidate(words, 0, 0)
        fv = extract_features(cand, bundle, REGISTRY, FeatureConfig(enabled_groups=frozenset({"type_check"})))
        assert fv.values["expected_Character"] == 1.0
        assert fv.values["predicted_Prop"] == 1.0
        assert fv.values["type_match"] == 0.0

    def test_monotone_event_distance(self):
        words = [f"w{i}" for i in range(12)]
        toks = make_tokens(words)
        cand = make_candidate(words, 0, 0)
        config = FeatureConfig(enabled_groups=frozenset({"position"}))
        values = []
        for j in range(1, 12):
            bundle = LayerBundle(tokens=toks, events=(toks[j].span,))
            fv = extract_features(cand, bundle, REGISTRY, config)
            values.append(fv.values["tok_dist_event"])
        assert values == sorted(values)


class TestSchema:
    def test_order_is_fixed(self):
        config = FeatureConfig()
        names = schema_names(config)
        assert names[0] == "tok_dist_event"
        assert names[-1] == "type_match"
        assert len(names) == len(set(names)) == 43

    def test_schema_depends_only_on_config(self):
        a = FeatureConfig(enabled_groups=frozenset({"ner", "figurative"}))
        b = FeatureConfig(enabled_groups=frozenset({"figurative", "ner"}))
        assert schema_names(a) == schema_names(b)
        assert schema_id(a) == schema_id(b)
        assert schema_id(a) != schema_id(FeatureConfig())

    def test_group_subset_orders_by_canonical_group(self):
        config = FeatureConfig(enabled_groups=frozenset({"grammar", "figurative"}))
        names = schema_names(config)
        assert names[0] == "metaphor_sent"
        assert names[2] == "head_pos_NOUN"

    def test_config_validation(self):
        with pytest.raises(FeatureError):
            FeatureConfig(enabled_groups=frozenset())
        with pytest.raises(FeatureError):
            FeatureConfig(window_size=0)
        with pytest.raises(FeatureError):
            FeatureConfig(enabled_groups=frozenset({"bogus"}))

    def test_config_json_round_trip(self):
        config = FeatureConfig(enabled_groups=frozenset({"ner"}), window_size=3)
        assert FeatureConfig.from_json(config.to_json()) == config


@st.composite
def _random_case(draw):
    n = draw(st.integers(min_value=2, max_value=10))
    words = [f"w{i}" for i in range(n)]
    toks = make_tokens(words)
    first = draw(st.integers(min_value=0, max_value=n - 1))
    last = draw(st.integers(min_value=first, max_value=n - 1))
    layers = {}
    if draw(st.booleans()):
        j = draw(st.integers(min_value=0, max_value=n - 1))
        layers["events"] = (toks[j].span,)
    if draw(st.booleans()):
        j = draw(st.integers(min_value=0, max_value=n - 1))
        layers["ner"] = (NerSpan(toks[j].span, draw(st.sampled_from(["PERSON", "ORG", "LOC", "X"]))),)
    if draw(st.booleans()):
        j = draw(st.integers(min_value=0, max_value=n - 1))
        layers["coref"] = (CorefChain(0, (toks[j].span,), draw(st.booleans()), draw(st.booleans())),)
    if draw(st.booleans()):
        deps = [Dep(i, i + 1 if i + 1 < n else -1, "dep") for i in range(n)]
        layers["deps"] = tuple(deps)
    bundle = LayerBundle(tokens=toks, **layers)
    return words, first, last, bundle


class TestBoundedness:
    @settings(max_examples=150, deadline=None)
    @given(_random_case())
    def test_all_values_in_unit_interval(self, case):
        words, first, last, bundle = case
        cand = make_candidate(words, first, last)
        fv = extract_features(cand, bundle, REGISTRY, FeatureConfig(window_size=2))
        for name, value in fv.values.items():
            assert 0.0 <= value <= 1.0, (name, value)
            assert value == value  # no NaN


class TestVectorizeBatch:
    WORDS = ["Finn", "McCool", "ran", "home"]

    def _bundle(self):
        return LayerBundle(tokens=make_tokens(self.WORDS))

    def _candidates(self, k):
        doc = make_doc(self.WORDS)
        toks = make_tokens(self.WORDS)
        out = []
        for i in range(k):
            begin, end = toks[i].span.begin, toks[i].span.end
            out.append(Candidate(f"d#{i + 1}", "d", Span(begin, end), "finn-mccool", doc.text[begin:end]))
        return out

    def test_empty_batch(self):
        ds = vectorize_batch([], {}, REGISTRY, FeatureConfig())
        assert ds.rows == ()
        assert ds.schema_id == schema_id(FeatureConfig())

    def test_labels_attached_where_given(self):
        cands = self._candidates(3)
        labels = {"d#1": UsageLabel.MOTIFIC, "d#3": UsageLabel.UNRELATED}
        ds = vectorize_batch(cands, {"d": self._bundle()}, REGISTRY, FeatureConfig(), labels)
        assert [row[1] for row in ds.rows] == [
            UsageLabel.MOTIFIC,
            None,
            UsageLabel.UNRELATED,
        ]

    def test_missing_bundle_names_doc(self):
        with pytest.raises(FeatureError, match="'d'"):
            vectorize_batch(self._candidates(1), {}, REGISTRY, FeatureConfig())

    def test_serialization_is_deterministic(self):
        cands = self._candidates(2)
        ds1 = vectorize_batch(cands, {"d": self._bundle()}, REGISTRY, FeatureConfig())
        ds2 = vectorize_batch(cands, {"d": self._bundle()}, REGISTRY, FeatureConfig())
        assert dataset_to_jsonl(ds1) == dataset_to_jsonl(ds2)

    def test_jsonl_round_trip(self):
        cands = self._candidates(2)
        labels = {"d#1": UsageLabel.REFERENTIAL}
        ds = vectorize_batch(cands, {"d": self._bundle()}, REGISTRY, FeatureConfig(), labels)
        back = dataset_from_jsonl(dataset_to_jsonl(ds), FeatureConfig())
        assert back == ds
