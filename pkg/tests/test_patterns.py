import math

import pytest

from serifu import patterns
from serifu.corpus import DocumentSet, parse_corpus
from serifu.errors import CorpusError, ModelError
from serifu.patterns import (PatternReport, WordList, build_word_list, idf,
                             segment_corpus, tf, tfidf_table, top_k_patterns,
                             word_list_from_tokens)
from serifu.subword import SubwordModel

LN2 = math.log(2.0)


def make_model(probs, speaker="s"):
    return SubwordModel(speaker, {s: math.log(p) for s, p in probs.items()})


class TestHanFilter:
    def test_first_person_singular_kept(self):
        for pronoun in ("僕", "私", "俺"):
            assert patterns.passes_han_filter(pronoun)

    def test_other_single_kanji_dropped(self):
        assert not patterns.passes_han_filter("城")
        assert not patterns.passes_han_filter("犬")

    def test_kana_kept(self):
        assert patterns.passes_han_filter("な")
        assert patterns.passes_han_filter("ニ")

    def test_multi_kanji_kept(self):
        assert patterns.passes_han_filter("学校")


class TestBuildWordList:
    def test_han_rule(self):
        model = make_model({"僕": 0.4, "城": 0.3, "だぜ": 0.3})
        surfaces = build_word_list([model], log_prob_filter=False).surfaces()
        assert surfaces == ["だぜ", "僕"]

    def test_bottom_fifth_removed(self):
        probs = {f"p{i}": 2 ** -(i + 1) for i in range(10)}
        probs["p9"] = 1.0 - sum(list(probs.values())[:-1])
        model = make_model(probs)
        word_list = build_word_list([model])
        assert len(word_list.entries) == 8
        kept = {s for s, _, _ in word_list.entries}
        # p8 and p9 carry the smallest probabilities
        assert "p8" not in kept and "p9" not in kept

    def test_tie_removes_lexicographically_larger(self):
        model = make_model({"aa": 0.2, "bb": 0.2, "cc": 0.2, "dd": 0.2, "ee": 0.2})
        word_list = build_word_list([model])
        assert {s for s, _, _ in word_list.entries} == {"aa", "bb", "cc", "dd"}

    def test_filter_order_han_then_log_prob(self):
        # 5 pieces post-Han -> exactly 1 removed; with the kanji counted it
        # would have been 6 -> still 1, but the removed one must be the lowest
        # log-prob survivor of the Han filter
        probs = {"城": 0.5, "ぜひ": 0.2, "かな": 0.15, "なあ": 0.1,
                 "わね": 0.04, "だぜ": 0.01}
        word_list = build_word_list([make_model(probs)])
        kept = {s for s, _, _ in word_list.entries}
        assert kept == {"ぜひ", "かな", "なあ", "わね"}

    def test_sources_tracked_across_models(self):
        a = make_model({"xx": 0.5, "yy": 0.5}, "a")
        b = make_model({"xx": 1.0}, "b")
        word_list = build_word_list([a, b], log_prob_filter=False)
        assert [(s, src) for s, src, _ in word_list.entries] == [
            ("xx", "a"), ("yy", "a"), ("xx", "b")]
        assert word_list.surfaces() == ["xx", "yy"]

    def test_no_models(self):
        with pytest.raises(ModelError):
            build_word_list([])


class TestWordListFromTokens:
    def test_distinct_tokens_han_filtered(self):
        tokens = {"a": [["僕", "城", "だぜ"], ["だぜ"]]}
        surfaces = word_list_from_tokens(tokens).surfaces()
        assert surfaces == ["だぜ", "僕"]


class TestSegmentCorpus:
    def test_segments_with_own_model(self):
        text = ("S\ta\tA\tw\tmale\tchild\nS\tb\tB\tw\tfemale\tadult\n"
                "L\ta\txy\nL\tb\txy\n")
        corpus = parse_corpus(text)
        models = {"a": make_model({"x": 0.3, "y": 0.3, "xy": 0.4}, "a"),
                  "b": make_model({"x": 0.5, "y": 0.5}, "b")}
        segmented = segment_corpus(corpus, models)
        assert segmented["a"] == [["xy"]]
        assert segmented["b"] == [["x", "y"]]

    def test_missing_model(self):
        corpus = parse_corpus("S\ta\tA\tw\tmale\tchild\nL\ta\txy\n")
        with pytest.raises(ModelError, match="missing models"):
            segment_corpus(corpus, {})


class TestTf:
    def test_basic_count(self):
        assert tf("x", [["x", "y", "y"], ["y", "x"]]) == pytest.approx(2 / 5)

    def test_single_token(self):
        assert tf("x", [["x"]]) == 1.0

    def test_absent_term(self):
        assert tf("q", [["x", "y"]]) == 0.0

    def test_empty_document(self):
        assert tf("x", []) == 0.0

    def test_sums_to_one(self):
        doc = [["x", "y", "z"], ["x", "x"]]
        terms = {tok for seq in doc for tok in seq}
        assert math.fsum(tf(t, doc) for t in terms) == pytest.approx(1.0,
                                                                     abs=1e-12)


class TestIdf:
    def _docs(self, mapping):
        return DocumentSet("gender", mapping)

    def test_half_the_docs(self):
        docs = self._docs({"a": [["x"]], "b": [["y"]]})
        assert idf("x", docs) == pytest.approx(LN2, abs=1e-12)

    def test_every_doc(self):
        docs = self._docs({"a": [["x"]], "b": [["x"]]})
        assert idf("x", docs) == 0.0

    def test_one_of_three(self):
        docs = DocumentSet("age", {"a": [["x"]], "b": [["y"]], "c": [["y"]]})
        assert idf("x", docs) == pytest.approx(math.log(3), abs=1e-12)

    def test_absent_term(self):
        docs = self._docs({"a": [["x"]], "b": [["y"]]})
        with pytest.raises(CorpusError, match="no document"):
            idf("q", docs)


def hand_fixture():
    docs = DocumentSet("gender", {
        "male": [["x", "y"], ["x", "x"], ["z"]],
        "female": [["y", "y"], ["z", "y"], ["w"]],
    })
    word_list = WordList([(s, "spk", 0.0) for s in ("x", "y", "z", "w")])
    return docs, word_list


class TestTfIdfTable:
    def test_hand_computed_cells(self):
        docs, word_list = hand_fixture()
        table = tfidf_table(docs, word_list)
        assert table.values[("male", "x")] == pytest.approx(3 / 5 * LN2,
                                                            abs=1e-12)
        assert table.values[("female", "w")] == pytest.approx(1 / 5 * LN2,
                                                              abs=1e-12)
        assert table.values[("male", "y")] == 0.0
        assert table.values[("male", "z")] == 0.0
        assert table.values[("female", "y")] == 0.0
        assert table.values[("male", "w")] == 0.0

    def test_doc_freq(self):
        docs, word_list = hand_fixture()
        table = tfidf_table(docs, word_list)
        assert table.doc_freq == {"x": 1, "y": 2, "z": 2, "w": 1}

    def test_terms_outside_word_list_count_in_denominator(self):
        docs = DocumentSet("gender", {"male": [["x", "q", "q", "q"]],
                                      "female": [["y"]]})
        word_list = WordList([("x", "s", 0.0), ("y", "s", 0.0)])
        table = tfidf_table(docs, word_list)
        assert table.values[("male", "x")] == pytest.approx(1 / 4 * LN2,
                                                            abs=1e-12)

    def test_empty_doc_counts_toward_n(self):
        docs = DocumentSet("age", {"child": [["x"]], "adult": [], "senior": []})
        table = tfidf_table(docs, WordList([("x", "s", 0.0)]))
        assert table.values[("child", "x")] == pytest.approx(math.log(3),
                                                             abs=1e-12)
        assert table.values[("adult", "x")] == 0.0


class TestTopK:
    def test_truncation(self):
        docs, word_list = hand_fixture()
        report = top_k_patterns(tfidf_table(docs, word_list), k=10)
        assert len(report.top["male"]) == 4  # only 4 surfaces exist

    def test_scores_non_increasing(self):
        docs, word_list = hand_fixture()
        report = top_k_patterns(tfidf_table(docs, word_list), k=10)
        for entries in report.top.values():
            scores = [v for _, v in entries]
            assert scores == sorted(scores, reverse=True)

    def test_all_docs_identical_rank_stable(self):
        docs = DocumentSet("gender", {"male": [["b", "b", "a"]],
                                      "female": [["b", "b", "a"]]})
        word_list = WordList([("a", "s", 0.0), ("b", "s", 0.0)])
        report = top_k_patterns(tfidf_table(docs, word_list), k=10)
        # every score 0; ties break by higher raw frequency, then surface
        assert report.top["male"] == [("b", 0.0), ("a", 0.0)]

    def test_bad_k(self):
        docs, word_list = hand_fixture()
        with pytest.raises(CorpusError):
            top_k_patterns(tfidf_table(docs, word_list), k=0)


class TestExports:
    def test_report_tsv_shape(self):
        report = PatternReport("gender", {"male": [("だぜ", 0.5)],
                                          "female": [("かしら", 0.25)]})
        lines = patterns.report_tsv(report).splitlines()
        assert lines[0].split("\t") == ["gender", "male", "1", "だぜ", "0.5"]
        assert lines[1].split("\t") == ["gender", "female", "1", "かしら", "0.25"]

    def test_table_tsv_sorted(self):
        docs, word_list = hand_fixture()
        tsv = patterns.table_tsv(tfidf_table(docs, word_list))
        rows = [line.split("\t") for line in tsv.splitlines()]
        assert rows == sorted(rows)
        assert all(len(r) == 3 for r in rows)
