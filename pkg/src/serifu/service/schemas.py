"""Request/response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field

from ..config import PipelineConfig


class Settings(BaseModel):
    basic_vs: int = 3000
    eta_keep: float = 0.75
    em_subiters: int = 2
    max_piece_len: int = 8
    seed_multiplier: int = 4
    top_k: int = 10
    svm_lambda: float = 1e-3
    svm_epochs: int = 200
    folds: int = 5
    seed: int = 42
    log_prob_filter: bool = True

    def to_config(self) -> PipelineConfig:
        return PipelineConfig(**self.model_dump()).validate()

    @classmethod
    def from_config(cls, cfg: PipelineConfig) -> "Settings":
        return cls(**{name: getattr(cfg, name) for name in cls.model_fields})


class ManifestEntry(BaseModel):
    speaker_id: str
    chars: int
    target_size: int
    piece_count: int


class TrainRequest(BaseModel):
    corpus_text: str
    settings: Settings = Field(default_factory=Settings)


class TrainResponse(BaseModel):
    manifest: list[ManifestEntry]
    manifest_tsv: str
    models: dict[str, str]  # speaker_id -> model file text


class ExtractRequest(BaseModel):
    corpus_text: str
    models: dict[str, str]
    scheme: str
    settings: Settings = Field(default_factory=Settings)


class PatternEntry(BaseModel):
    surface: str
    tfidf: float


class ExtractResponse(BaseModel):
    scheme: str
    report: dict[str, list[PatternEntry]]
    report_tsv: str
    table_tsv: str
    word_list_size: int
    warnings: list[str]


class ExtractExternalRequest(BaseModel):
    segmented_text: str
    scheme: str
    settings: Settings = Field(default_factory=Settings)


class ClassifyRequest(BaseModel):
    corpus_text: str
    models: dict[str, str]
    settings: Settings = Field(default_factory=Settings)


class ConfusionCell(BaseModel):
    true_label: str
    predicted_label: str
    count: int


class ClassifyResponse(BaseModel):
    fold_accuracies: list[float]
    mean_accuracy: float
    confusion: list[ConfusionCell]
    result_tsv: str


class SynthRequest(BaseModel):
    spec_text: str


class SynthResponse(BaseModel):
    corpus_text: str
    speakers: int
    lines: int
