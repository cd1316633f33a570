"""FastAPI service wrapping the stylometry pipeline.

The endpoints are pure compute: corpora and models travel in request and
response bodies, so the service holds no state and responses are
deterministic for a given payload.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import classify, pipeline, subword, synth
from ..corpus import format_corpus, parse_corpus
from ..errors import InputError, SerifuError
from . import schemas

app = FastAPI(title="serifu", version="0.1.0")


def _fail(exc: Exception):
    if isinstance(exc, InputError):
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    raise HTTPException(status_code=500, detail=str(exc)) from exc


def _load_models(payload: dict[str, str]) -> dict[str, subword.SubwordModel]:
    models = {}
    for sid, text in payload.items():
        model = subword.load_model(text)
        if model.speaker_id != sid:
            raise InputError(f"model for {sid!r} declares speaker "
                             f"{model.speaker_id!r}")
        models[sid] = model
    return models


@app.get("/healthz")
def healthz():
    return {"status": "ok"}


@app.post("/synth", response_model=schemas.SynthResponse)
def synth_endpoint(req: schemas.SynthRequest):
    try:
        spec = synth.parse_synth_spec(req.spec_text)
        corpus = synth.generate_corpus(spec)
    except SerifuError as exc:
        _fail(exc)
    return schemas.SynthResponse(corpus_text=format_corpus(corpus),
                                 speakers=len(corpus.speakers),
                                 lines=len(corpus.lines))


@app.post("/train", response_model=schemas.TrainResponse)
def train_endpoint(req: schemas.TrainRequest):
    try:
        cfg = req.settings.to_config()
        corpus = parse_corpus(req.corpus_text)
        result = pipeline.run_train(corpus, cfg)
    except SerifuError as exc:
        _fail(exc)
    return schemas.TrainResponse(
        manifest=[schemas.ManifestEntry(speaker_id=r.speaker_id, chars=r.chars,
                                        target_size=r.target_size,
                                        piece_count=r.piece_count)
                  for r in result.manifest],
        manifest_tsv=result.manifest_tsv(),
        models={sid: subword.save_model(m).decode("utf-8")
                for sid, m in result.models.items()},
    )


def _extract_response(result: pipeline.ExtractResult) -> schemas.ExtractResponse:
    report = {doc: [schemas.PatternEntry(surface=s, tfidf=v) for s, v in entries]
              for doc, entries in result.report.top.items()}
    return schemas.ExtractResponse(
        scheme=result.scheme,
        report=report,
        report_tsv=result.report_tsv(),
        table_tsv=result.table_tsv(),
        word_list_size=len(result.word_list.entries),
        warnings=result.warnings,
    )


@app.post("/extract", response_model=schemas.ExtractResponse)
def extract_endpoint(req: schemas.ExtractRequest):
    try:
        cfg = req.settings.to_config()
        corpus = parse_corpus(req.corpus_text)
        models = _load_models(req.models)
        result = pipeline.run_extract(corpus, models, req.scheme, cfg)
    except SerifuError as exc:
        _fail(exc)
    return _extract_response(result)


@app.post("/extract-external", response_model=schemas.ExtractResponse)
def extract_external_endpoint(req: schemas.ExtractExternalRequest):
    try:
        cfg = req.settings.to_config()
        result = pipeline.run_extract_external(req.segmented_text, req.scheme, cfg)
    except SerifuError as exc:
        _fail(exc)
    return _extract_response(result)


@app.post("/classify", response_model=schemas.ClassifyResponse)
def classify_endpoint(req: schemas.ClassifyRequest):
    try:
        cfg = req.settings.to_config()
        corpus = parse_corpus(req.corpus_text)
        models = _load_models(req.models)
        result = pipeline.run_classify(corpus, models, cfg)
    except SerifuError as exc:
        _fail(exc)
    return schemas.ClassifyResponse(
        fold_accuracies=result.fold_accuracies,
        mean_accuracy=result.mean_accuracy,
        confusion=[schemas.ConfusionCell(true_label=t, predicted_label=p, count=c)
                   for (t, p), c in sorted(result.confusion.items())],
        result_tsv=classify.cv_tsv(result),
    )
