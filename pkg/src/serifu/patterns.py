"""Group-characterizing speech patterns.

Builds the filtered word list from trained models, segments the corpus with
each speaker's own model, weights pieces by TF/IDF per grouping scheme, and
reports the top-k pieces per document.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass

import regex

from .corpus import Corpus, DocumentSet
from .errors import CorpusError, ModelError
from .subword import SubwordModel, viterbi_segment

log = logging.getLogger(__name__)

# first-person singular pronouns exempt from the single-kanji filter
FIRST_PERSON_SINGULAR = ("僕", "私", "俺")

_HAN_CHAR = regex.compile(r"^\p{Han}$")


def is_single_han(surface: str) -> bool:
    return len(surface) == 1 and _HAN_CHAR.match(surface) is not None


def passes_han_filter(surface: str) -> bool:
    """Single kanji are dropped (they rarely characterize speech) except the
    first-person pronouns."""
    return not is_single_han(surface) or surface in FIRST_PERSON_SINGULAR


@dataclass
class WordList:
    # (surface, source speaker id, emission log prob); surfaces may repeat
    # across speakers, the feature universe deduplicates them
    entries: list[tuple[str, str, float]]

    def surfaces(self) -> list[str]:
        return sorted({surface for surface, _, _ in self.entries})


def build_word_list(models: list[SubwordModel],
                    log_prob_filter: bool = True) -> WordList:
    """Per model: drop single-kanji pieces (except 僕/私/俺), then drop the
    bottom fifth of the remainder by emission log-probability (ties remove the
    lexicographically larger surface first). log_prob_filter=False keeps the
    second step off, for comparison against externally segmented corpora."""
    if not models:
        raise ModelError("no models given")
    entries: list[tuple[str, str, float]] = []
    for model in models:
        items = [(s, lp) for s, lp in sorted(model.pieces.items())
                 if passes_han_filter(s)]
        if log_prob_filter:
            drop = len(items) // 5
            if drop:
                by_loss = sorted(items, key=lambda kv: kv[0], reverse=True)
                by_loss.sort(key=lambda kv: kv[1])
                dropped = {s for s, _ in by_loss[:drop]}
                items = [(s, lp) for s, lp in items if s not in dropped]
        entries.extend((s, model.speaker_id, lp) for s, lp in items)
    return WordList(entries)


def word_list_from_tokens(tokens_by_speaker: dict[str, list[list[str]]]) -> WordList:
    """Word list for pre-segmented corpora: every distinct token, Han-filtered.
    No emission probabilities exist, so the bottom-fifth filter cannot apply."""
    entries: list[tuple[str, str, float]] = []
    for sid in sorted(tokens_by_speaker):
        seen = sorted({tok for seq in tokens_by_speaker[sid] for tok in seq})
        entries.extend((tok, sid, 0.0) for tok in seen if passes_han_filter(tok))
    return WordList(entries)


def segment_corpus(corpus: Corpus,
                   models: dict[str, SubwordModel]) -> dict[str, list[list[str]]]:
    """Segment each speaker's lines with that speaker's own model."""
    missing = sorted(set(corpus.speakers) - set(models))
    if missing:
        raise ModelError(f"missing models for speakers: {', '.join(missing)}")
    texts = corpus.texts_by_speaker()
    return {sid: [viterbi_segment(models[sid], text) for text in lines]
            for sid, lines in texts.items()}


def tf(term: str, doc: list[list[str]]) -> float:
    """Occurrences of `term` over the total token count of the document."""
    total = sum(len(seq) for seq in doc)
    if total == 0:
        log.warning("tf over an empty document")
        return 0.0
    count = sum(seq.count(term) for seq in doc)
    return count / total


def idf(term: str, docs: DocumentSet) -> float:
    n_docs = len(docs.docs)
    df = sum(1 for seqs in docs.docs.values()
             if any(term in seq for seq in seqs))
    if df == 0:
        raise CorpusError(f"term {term!r} occurs in no document")
    return math.log(n_docs / df)


@dataclass
class TfIdfTable:
    scheme: str
    doc_ids: list[str]
    # (doc_id, surface) -> tf * idf, for every word-list surface with df >= 1
    values: dict[tuple[str, str], float]
    doc_freq: dict[str, int]
    # raw per-document term counts, used for ranking tie-breaks
    term_counts: dict[str, Counter]
    doc_totals: dict[str, int]


def tfidf_table(docs: DocumentSet, word_list: WordList) -> TfIdfTable:
    doc_ids = list(docs.docs)
    counts = {d: Counter(tok for seq in seqs for tok in seq)
              for d, seqs in docs.docs.items()}
    totals = {d: sum(c.values()) for d, c in counts.items()}
    n_docs = len(doc_ids)
    doc_freq: dict[str, int] = {}
    for surface in word_list.surfaces():
        df = sum(1 for d in doc_ids if counts[d][surface] > 0)
        if df > 0:
            doc_freq[surface] = df
    values: dict[tuple[str, str], float] = {}
    for surface, df in doc_freq.items():
        weight = math.log(n_docs / df)
        for d in doc_ids:
            term_tf = counts[d][surface] / totals[d] if totals[d] else 0.0
            values[(d, surface)] = term_tf * weight
    return TfIdfTable(docs.scheme, doc_ids, values, doc_freq, counts, totals)


@dataclass
class PatternReport:
    scheme: str
    # doc_id -> [(surface, tfidf)] sorted by descending score, length <= k
    top: dict[str, list[tuple[str, float]]]


def top_k_patterns(table: TfIdfTable, k: int = 10) -> PatternReport:
    """Per document, the k highest-TF/IDF surfaces; ties break toward higher
    raw frequency in the document, then lexicographically."""
    if k < 1:
        raise CorpusError("k must be >= 1")
    top: dict[str, list[tuple[str, float]]] = {}
    for d in table.doc_ids:
        scored = [(surface, table.values[(d, surface)])
                  for surface in table.doc_freq]
        scored.sort(key=lambda sv: (-sv[1], -table.term_counts[d][sv[0]], sv[0]))
        top[d] = scored[:k]
    return PatternReport(table.scheme, top)


def report_tsv(report: PatternReport) -> str:
    rows = []
    for doc_id, entries in report.top.items():
        for rank, (surface, score) in enumerate(entries, start=1):
            rows.append(f"{report.scheme}\t{doc_id}\t{rank}\t{surface}\t{score:.17g}")
    return "\n".join(rows) + "\n"


def table_tsv(table: TfIdfTable) -> str:
    rows = [f"{d}\t{surface}\t{value:.17g}"
            for (d, surface), value in sorted(table.values.items())]
    return "\n".join(rows) + "\n"
