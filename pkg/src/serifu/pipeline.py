"""End-to-end orchestration used by both the HTTP service and the CLI.

Everything here is pure computation over in-memory corpora and models;
filesystem handling stays in the CLI.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import classify, patterns, subword
from .config import PipelineConfig
from .corpus import Corpus, SCHEMES, group_documents, parse_corpus
from .errors import CorpusError, InputError
from .subword import SubwordModel

MANIFEST_MAGIC = "serifu-manifest"


@dataclass
class ManifestRow:
    speaker_id: str
    chars: int
    target_size: int
    piece_count: int


@dataclass
class TrainResult:
    manifest: list[ManifestRow]
    models: dict[str, SubwordModel]
    seed: int

    def manifest_tsv(self) -> str:
        rows = [f"{MANIFEST_MAGIC}\tv1\tseed\t{self.seed}",
                "speaker_id\tchars\ttarget_size\tpiece_count"]
        rows.extend(f"{r.speaker_id}\t{r.chars}\t{r.target_size}\t{r.piece_count}"
                    for r in self.manifest)
        return "\n".join(rows) + "\n"


@dataclass
class ExtractResult:
    scheme: str
    word_list: patterns.WordList
    table: patterns.TfIdfTable
    report: patterns.PatternReport
    warnings: list[str]

    def report_tsv(self) -> str:
        return patterns.report_tsv(self.report)

    def table_tsv(self) -> str:
        return patterns.table_tsv(self.table)


def run_train(corpus: Corpus, cfg: PipelineConfig) -> TrainResult:
    """Train one model per speaker; target sizes scale with each speaker's
    share of the whole corpus's characters."""
    counts = corpus.char_counts()
    total = sum(counts.values())
    texts = corpus.texts_by_speaker()
    trainer_cfg = cfg.trainer_config()
    manifest = []
    models: dict[str, SubwordModel] = {}
    for sid in sorted(corpus.speakers):
        lines = texts[sid]
        distinct = len({ch for line in lines for ch in line})
        target = subword.target_vocab_size(counts[sid], total, cfg.basic_vs,
                                           floor=distinct)
        model = subword.train_model(lines, target, trainer_cfg, speaker_id=sid)
        models[sid] = model
        manifest.append(ManifestRow(sid, counts[sid], target, len(model.pieces)))
    return TrainResult(manifest, models, cfg.seed)


def _check_models(corpus: Corpus, models: dict[str, SubwordModel]) -> None:
    missing = sorted(set(corpus.speakers) - set(models))
    if missing:
        raise InputError(f"missing models for speakers: {', '.join(missing)}")


def run_extract(corpus: Corpus, models: dict[str, SubwordModel], scheme: str,
                cfg: PipelineConfig) -> ExtractResult:
    if scheme not in SCHEMES:
        raise InputError(f"unknown scheme {scheme!r}")
    _check_models(corpus, models)
    ordered = [models[sid] for sid in sorted(corpus.speakers)]
    word_list = patterns.build_word_list(ordered,
                                         log_prob_filter=cfg.log_prob_filter)
    segmented = patterns.segment_corpus(corpus, models)
    docs = group_documents(corpus, scheme, segmented)
    table = patterns.tfidf_table(docs, word_list)
    report = patterns.top_k_patterns(table, cfg.top_k)
    warnings = [f"empty document: {d}" for d in docs.empty_doc_ids()]
    return ExtractResult(scheme, word_list, table, report, warnings)


def parse_segmented_corpus(text: str) -> tuple[Corpus, dict[str, list[list[str]]]]:
    """Pre-tokenized corpus: S records as in the plain corpus format, plus
    `L<TAB>speaker_id<TAB>tok1<TAB>tok2...` line records."""
    speaker_lines = []
    token_rows: list[tuple[int, str, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        if raw.startswith("S\t"):
            speaker_lines.append(raw)
        elif raw.startswith("L\t"):
            fields = raw.split("\t")
            if len(fields) < 3:
                raise CorpusError(f"line {lineno}: token record needs tokens")
            tokens = fields[2:]
            for tok in tokens:
                if not tok or any(ch.isspace() for ch in tok):
                    raise CorpusError(f"line {lineno}: malformed token {tok!r}")
            token_rows.append((lineno, fields[1], tokens))
        else:
            raise CorpusError(f"line {lineno}: unknown record kind")
    plain = speaker_lines + [f"L\t{sid}\t{''.join(tokens)}"
                             for _, sid, tokens in token_rows]
    corpus = parse_corpus("\n".join(plain) + "\n")
    segmented: dict[str, list[list[str]]] = {sid: [] for sid in corpus.speakers}
    for lineno, sid, tokens in token_rows:
        if sid not in corpus.speakers:
            raise CorpusError(f"line {lineno}: unknown speaker {sid!r}")
        segmented[sid].append(tokens)
    return corpus, segmented


def run_extract_external(segmented_text: str, scheme: str,
                         cfg: PipelineConfig) -> ExtractResult:
    """Same downstream path as run_extract for externally segmented corpora
    (e.g. a morphological analyzer's output). The word list is every distinct
    token, Han-filtered; the bottom-fifth log-probability filter cannot apply
    because external tokens carry no emission probabilities."""
    if scheme not in SCHEMES:
        raise InputError(f"unknown scheme {scheme!r}")
    corpus, segmented = parse_segmented_corpus(segmented_text)
    word_list = patterns.word_list_from_tokens(segmented)
    docs = group_documents(corpus, scheme, segmented)
    table = patterns.tfidf_table(docs, word_list)
    report = patterns.top_k_patterns(table, cfg.top_k)
    warnings = [f"empty document: {d}" for d in docs.empty_doc_ids()]
    return ExtractResult(scheme, word_list, table, report, warnings)


def run_classify(corpus: Corpus, models: dict[str, SubwordModel],
                 cfg: PipelineConfig) -> classify.CvResult:
    _check_models(corpus, models)
    extract = run_extract(corpus, models, "character", cfg)
    features = classify.build_features(extract.table, extract.word_list)
    labels = [corpus.speakers[sid].group5 for sid in features.row_ids]
    return classify.cross_validate(features, labels, folds=cfg.folds,
                                   seed=cfg.seed, config=cfg.svm_config())
