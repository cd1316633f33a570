"""Speaker-attributed dialog corpora.

Corpus files are UTF-8, line-delimited, two record kinds:

    S<TAB>speaker_id<TAB>display_name<TAB>work_id<TAB>gender<TAB>age
    L<TAB>speaker_id<TAB>utterance text

Speaker records must precede their lines. Utterances are normalized on load
(NFKC plus whitespace removal; Japanese carries no word delimiters, so
internal whitespace is noise).
"""

from __future__ import annotations

import logging
import unicodedata
from dataclasses import dataclass, field

from .errors import CorpusError

log = logging.getLogger(__name__)

GENDERS = ("male", "female")
AGES = ("child", "adult", "senior")
SCHEMES = ("gender", "age", "character")

_GROUP5 = {
    ("male", "child"): "boys",
    ("female", "child"): "girls",
    ("male", "adult"): "men",
    ("female", "adult"): "women",
}


def derive_group5(gender: str, age: str) -> str:
    """Five-way group label; seniors collapse both genders."""
    if age == "senior":
        return "seniors"
    return _GROUP5[(gender, age)]


@dataclass(frozen=True)
class Speaker:
    speaker_id: str
    display_name: str
    work_id: str
    gender_group: str
    age_group: str

    @property
    def group5(self) -> str:
        return derive_group5(self.gender_group, self.age_group)


@dataclass(frozen=True)
class Line:
    speaker_id: str
    work_id: str
    text: str


@dataclass
class Corpus:
    speakers: dict[str, Speaker]
    lines: list[Line]
    # lines that normalized to empty and were dropped on load
    dropped_lines: int = field(default=0, compare=False)

    def lines_of(self, speaker_id: str) -> list[str]:
        return [ln.text for ln in self.lines if ln.speaker_id == speaker_id]

    def texts_by_speaker(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {sid: [] for sid in self.speakers}
        for ln in self.lines:
            out[ln.speaker_id].append(ln.text)
        return out

    def char_counts(self) -> dict[str, int]:
        counts = {sid: 0 for sid in self.speakers}
        for ln in self.lines:
            counts[ln.speaker_id] += len(ln.text)
        return counts


@dataclass
class DocumentSet:
    scheme: str
    # doc_id -> one token sequence per corpus line, in corpus order
    docs: dict[str, list[list[str]]]

    def empty_doc_ids(self) -> list[str]:
        return [d for d, seqs in self.docs.items() if not seqs]


def normalize_line(text: str) -> str:
    """NFKC-normalize and strip all whitespace. Total and idempotent.

    Runs to a fixpoint: removing whitespace can expose new compositions
    (e.g. U+00A8 expands to space + combining diaeresis, and the combining
    mark then attaches to the previous character), so a single pass is not
    idempotent.
    """
    while True:
        normalized = unicodedata.normalize("NFKC", text)
        normalized = "".join(ch for ch in normalized if not ch.isspace())
        if normalized == text:
            return normalized
        text = normalized


def _validate_id(value: str, lineno: int, what: str) -> str:
    if not value or any(ch.isspace() for ch in value):
        raise CorpusError(f"line {lineno}: bad {what} {value!r}")
    return value


def parse_corpus(text: str) -> Corpus:
    speakers: dict[str, Speaker] = {}
    lines: list[Line] = []
    dropped = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        fields = raw.split("\t")
        kind = fields[0]
        if kind == "S":
            if len(fields) != 6:
                raise CorpusError(f"line {lineno}: speaker record needs 6 fields")
            _, sid, name, work, gender, age = fields
            _validate_id(sid, lineno, "speaker_id")
            if sid in speakers:
                raise CorpusError(f"line {lineno}: duplicate speaker {sid!r}")
            if gender not in GENDERS:
                raise CorpusError(f"line {lineno}: unknown gender {gender!r}")
            if age not in AGES:
                raise CorpusError(f"line {lineno}: unknown age {age!r}")
            speakers[sid] = Speaker(sid, name, work, gender, age)
        elif kind == "L":
            if len(fields) != 3:
                raise CorpusError(f"line {lineno}: line record needs 3 fields")
            _, sid, utterance = fields
            if sid not in speakers:
                raise CorpusError(f"line {lineno}: unknown speaker {sid!r}")
            norm = normalize_line(utterance)
            if not norm:
                dropped += 1
                continue
            lines.append(Line(sid, speakers[sid].work_id, norm))
        else:
            raise CorpusError(f"line {lineno}: unknown record kind {kind!r}")
    if not speakers or not lines:
        raise CorpusError("empty corpus")
    with_lines = {ln.speaker_id for ln in lines}
    silent = sorted(set(speakers) - with_lines)
    if silent:
        raise CorpusError(f"speakers without lines: {', '.join(silent)}")
    if dropped:
        log.warning("dropped %d lines that normalized to empty", dropped)
    return Corpus(speakers, lines, dropped_lines=dropped)


def load_corpus(path) -> Corpus:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CorpusError(f"cannot read corpus: {exc}") from exc
    return parse_corpus(text)


def format_corpus(corpus: Corpus) -> str:
    out = []
    for sp in corpus.speakers.values():
        out.append("\t".join(["S", sp.speaker_id, sp.display_name, sp.work_id,
                              sp.gender_group, sp.age_group]))
    for ln in corpus.lines:
        out.append("\t".join(["L", ln.speaker_id, ln.text]))
    return "\n".join(out) + "\n"


def save_corpus(corpus: Corpus, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_corpus(corpus))


def _doc_label(speaker: Speaker, scheme: str) -> str:
    if scheme == "gender":
        return speaker.gender_group
    if scheme == "age":
        return speaker.age_group
    return speaker.speaker_id


def group_documents(corpus: Corpus, scheme: str,
                    segmented: dict[str, list[list[str]]]) -> DocumentSet:
    """Partition per-line token sequences into documents by the scheme's label.

    `segmented` maps speaker_id to one token sequence per line, in corpus
    order. gender -> 2 docs, age -> 3 docs, character -> one per speaker;
    empty docs are allowed (warned) so partial corpora still work.
    """
    if scheme not in SCHEMES:
        raise CorpusError(f"unknown scheme {scheme!r}")
    missing = sorted(set(corpus.speakers) - set(segmented))
    if missing:
        raise CorpusError(f"missing segmentation for speakers: {', '.join(missing)}")
    per_speaker = corpus.texts_by_speaker()
    for sid, seqs in segmented.items():
        if sid in per_speaker and len(seqs) != len(per_speaker[sid]):
            raise CorpusError(
                f"speaker {sid!r}: {len(seqs)} token sequences for "
                f"{len(per_speaker[sid])} lines")

    if scheme == "gender":
        doc_ids = list(GENDERS)
    elif scheme == "age":
        doc_ids = list(AGES)
    else:
        doc_ids = sorted(corpus.speakers)
    docs: dict[str, list[list[str]]] = {d: [] for d in doc_ids}
    cursor = {sid: 0 for sid in corpus.speakers}
    for ln in corpus.lines:
        idx = cursor[ln.speaker_id]
        cursor[ln.speaker_id] = idx + 1
        label = _doc_label(corpus.speakers[ln.speaker_id], scheme)
        docs[label].append(segmented[ln.speaker_id][idx])
    ds = DocumentSet(scheme, docs)
    for doc_id in ds.empty_doc_ids():
        log.warning("scheme %s: document %r is empty", scheme, doc_id)
    return ds
