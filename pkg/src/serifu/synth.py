"""Deterministic synthetic dialog corpora with planted speech patterns.

Lines are seeded concatenations of filler snippets, suffixed with a
group-specific (and optionally speaker-specific) pattern with a configured
probability. The generator uses Python's Mersenne Twister (random.Random)
seeded from the spec, so corpora are reproducible across platforms.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .corpus import Corpus, GENDERS, Line, Speaker
from .errors import ConfigError

GROUP5_PROFILE = {
    "boys": ("male", "child"),
    "girls": ("female", "child"),
    "men": ("male", "adult"),
    "women": ("female", "adult"),
    # seniors collapse both genders; generated speakers alternate
    "seniors": (None, "senior"),
}

# closed filler set mixing hiragana, katakana and kanji so the single-kanji
# filter and script checks downstream see realistic input
DEFAULT_FILLERS = (
    "そうだ", "今日は", "明日", "行く", "見た", "すごい", "本当に", "何を",
    "どこへ", "帰ろう", "食べた", "やめて", "待って", "一緒に", "学校", "先生",
    "友達と", "雨が", "降る", "すこし", "たくさん", "元気", "大丈夫", "頑張る",
)


@dataclass(frozen=True)
class GroupSpec:
    label: str
    speaker_count: int
    suffixes: tuple[str, ...]
    usage_prob: float


@dataclass(frozen=True)
class SynthSpec:
    groups: tuple[GroupSpec, ...]
    lines_min: int = 100
    lines_max: int = 150
    base_vocabulary: tuple[str, ...] = DEFAULT_FILLERS
    seed: int = 42
    speaker_suffixes: dict[str, str] = field(default_factory=dict)


def validate_spec(spec: SynthSpec) -> None:
    if not spec.groups:
        raise ConfigError("no groups in synth spec")
    if not spec.base_vocabulary:
        raise ConfigError("empty base vocabulary")
    if not 1 <= spec.lines_min <= spec.lines_max:
        raise ConfigError("bad lines range")
    for group in spec.groups:
        if group.label not in GROUP5_PROFILE:
            raise ConfigError(f"unknown group label {group.label!r}")
        if group.speaker_count < 1:
            raise ConfigError(f"group {group.label}: speaker_count must be >= 1")
        if not 0.0 <= group.usage_prob <= 1.0:
            raise ConfigError(f"group {group.label}: usage_prob out of [0, 1]")


def generate_corpus(spec: SynthSpec) -> Corpus:
    validate_spec(spec)
    rng = random.Random(spec.seed)
    speakers: dict[str, Speaker] = {}
    lines: list[Line] = []
    for group in spec.groups:
        gender, age = GROUP5_PROFILE[group.label]
        for i in range(group.speaker_count):
            sid = f"{group.label}{i:02d}"
            sp_gender = gender if gender else GENDERS[i % 2]
            speakers[sid] = Speaker(sid, sid, "synth", sp_gender, age)
            extra = spec.speaker_suffixes.get(sid)
            for _ in range(rng.randint(spec.lines_min, spec.lines_max)):
                fillers = [rng.choice(spec.base_vocabulary)
                           for _ in range(rng.randint(2, 4))]
                text = "".join(fillers)
                if group.suffixes and rng.random() < group.usage_prob:
                    text += rng.choice(group.suffixes)
                    if extra:
                        text += extra
                lines.append(Line(sid, "synth", text))
    return Corpus(speakers, lines)


def parse_synth_spec(text: str) -> SynthSpec:
    """Flat key-value spec; repeated `group` keys, one per group:

        version = 1
        seed = 42
        lines_min = 200
        lines_max = 300
        base_vocabulary = そうだ,今日は,...       (optional)
        group = boys:4:だぜ|だぞ:0.8
        speaker_suffix = boys00:にゃん           (optional, repeatable)
    """
    pairs: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"synth spec line {lineno}: expected key = value")
        key, _, value = stripped.partition("=")
        pairs.append((key.strip(), value.strip()))
    keys = dict(pairs)
    if keys.get("version") != "1":
        raise ConfigError("synth spec must declare version = 1")
    groups = []
    speaker_suffixes: dict[str, str] = {}
    for key, value in pairs:
        if key == "group":
            parts = value.split(":")
            if len(parts) != 4:
                raise ConfigError(f"bad group spec {value!r} "
                                  "(label:count:suffix|suffix:usage_prob)")
            label, count, suffixes, prob = parts
            try:
                groups.append(GroupSpec(label, int(count),
                                        tuple(s for s in suffixes.split("|") if s),
                                        float(prob)))
            except ValueError as exc:
                raise ConfigError(f"bad group spec {value!r}: {exc}") from exc
        elif key == "speaker_suffix":
            sid, _, suffix = value.partition(":")
            if not sid or not suffix:
                raise ConfigError(f"bad speaker_suffix {value!r}")
            speaker_suffixes[sid] = suffix
    def _int(name, default):
        try:
            return int(keys.get(name, default))
        except ValueError as exc:
            raise ConfigError(f"bad integer for {name}") from exc
    vocab = DEFAULT_FILLERS
    if "base_vocabulary" in keys:
        vocab = tuple(v for v in keys["base_vocabulary"].split(",") if v)
    spec = SynthSpec(
        groups=tuple(groups),
        lines_min=_int("lines_min", 100),
        lines_max=_int("lines_max", 150),
        base_vocabulary=vocab,
        seed=_int("seed", 42),
        speaker_suffixes=speaker_suffixes,
    )
    validate_spec(spec)
    return spec
