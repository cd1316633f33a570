"""Pipeline configuration.

Defaults reproduce the published constants: basic vocabulary size 3000,
top-10 patterns, five cross-validation folds. Config files are flat
key-value text with a mandatory version key; CLI flags override file keys.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

from .classify import SvmConfig
from .errors import ConfigError
from .subword import TrainerConfig


@dataclass(frozen=True)
class PipelineConfig:
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

    def trainer_config(self) -> TrainerConfig:
        return TrainerConfig(eta_keep=self.eta_keep,
                             em_subiters=self.em_subiters,
                             max_piece_len=self.max_piece_len,
                             seed_multiplier=self.seed_multiplier)

    def svm_config(self) -> SvmConfig:
        return SvmConfig(lam=self.svm_lambda, epochs=self.svm_epochs,
                         seed=self.seed)

    def validate(self) -> "PipelineConfig":
        if self.basic_vs < 1:
            raise ConfigError("basic_vs must be positive")
        if not 0.0 < self.eta_keep < 1.0:
            raise ConfigError("eta_keep must be in (0, 1)")
        if self.em_subiters < 1 or self.max_piece_len < 1 or self.top_k < 1:
            raise ConfigError("em_subiters, max_piece_len and top_k must be >= 1")
        if self.seed_multiplier < 1:
            raise ConfigError("seed_multiplier must be >= 1")
        if self.svm_lambda <= 0 or self.svm_epochs < 1:
            raise ConfigError("bad classifier hyperparameters")
        if self.folds < 2:
            raise ConfigError("folds must be >= 2")
        return self


_BOOL = {"true": True, "false": False, "1": True, "0": False}


def parse_config(text: str) -> PipelineConfig:
    keys: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"config line {lineno}: expected key = value")
        key, _, value = stripped.partition("=")
        keys[key.strip()] = value.strip()
    if keys.pop("version", None) != "1":
        raise ConfigError("config must declare version = 1")
    cfg = PipelineConfig()
    valid = {f.name: f.type for f in fields(PipelineConfig)}
    updates = {}
    for key, value in keys.items():
        if key not in valid:
            raise ConfigError(f"unknown config key {key!r}")
        current = getattr(cfg, key)
        try:
            if isinstance(current, bool):
                updates[key] = _BOOL[value.lower()]
            elif isinstance(current, int):
                updates[key] = int(value)
            else:
                updates[key] = float(value)
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"bad value for {key!r}: {value!r}") from exc
    return replace(cfg, **updates).validate()


def load_config(path) -> PipelineConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
