"""Per-speaker unigram subword models.

A model is a vocabulary of pieces with emission log-probabilities. Training:
seed a large candidate vocabulary from frequent substrings, then alternate
EM re-estimation with likelihood-loss pruning until the vocabulary reaches
its target size. Segmentation picks the max-probability piece sequence with
a Viterbi pass over the substring lattice.

Single-character pieces are never pruned, so every training-time string
stays segmentable; characters unseen at training time are emitted as
singleton pieces with a floor log-probability.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace

from .errors import ModelError

# unknown characters score this far below the least likely known piece
UNKNOWN_LOG_PROB_PENALTY = 10.0

MODEL_MAGIC = "serifu-model"
MODEL_VERSION = "v1"

_NEG_INF = float("-inf")


@dataclass(frozen=True)
class TrainerConfig:
    eta_keep: float = 0.75
    em_subiters: int = 2
    max_piece_len: int = 8
    seed_multiplier: int = 4


@dataclass(frozen=True)
class SubwordModel:
    speaker_id: str
    # surface -> natural-log emission probability; exp-sum is 1
    pieces: dict[str, float]
    target_size: int = field(compare=False, default=0)
    trained_log_likelihood: float = field(compare=False, default=0.0)

    def max_piece_len(self) -> int:
        return max((len(s) for s in self.pieces), default=1)

    def single_chars(self) -> set[str]:
        return {s for s in self.pieces if len(s) == 1}


def target_vocab_size(l: int, total: int, basic_vs: int, floor: int = 1) -> int:
    """Per-speaker vocabulary budget: basic_vs scaled by the fifth root of the
    speaker's share of the corpus characters, floored at `floor` (callers pass
    the speaker's distinct character count so coverage always fits)."""
    if l <= 0 or l > total:
        raise ModelError(f"character count {l} out of range (total {total})")
    if basic_vs < 1:
        raise ModelError("basic_vs must be positive")
    size = int(basic_vs * (l / total) ** 0.2 + 0.5)
    return max(size, floor, 1)


def _normalize_counts(counts: dict[str, float]) -> dict[str, float]:
    total = sum(counts.values())
    if total <= 0:
        raise ModelError("cannot normalize empty vocabulary")
    return {s: math.log(c / total) for s, c in sorted(counts.items())}


def seed_vocabulary(lines: list[str], max_piece_len: int = 8,
                    seed_size: int | None = None) -> dict[str, float]:
    """Candidate vocabulary: every character of the corpus plus the
    highest-scoring multi-character substrings (frequency >= 2, scored by
    frequency * length), truncated to seed_size. Returns surface -> log prob
    initialized from normalized scores."""
    if not lines or not any(lines):
        raise ModelError("cannot seed a vocabulary from empty lines")
    if max_piece_len < 1:
        raise ModelError("max_piece_len must be >= 1")
    char_freq: Counter[str] = Counter()
    sub_freq: Counter[str] = Counter()
    for line in lines:
        n = len(line)
        for i, ch in enumerate(line):
            if ch.isspace():
                continue
            char_freq[ch] += 1
            for j in range(i + 2, min(i + max_piece_len, n) + 1):
                sub = line[i:j]
                if any(c.isspace() for c in sub):
                    break
                sub_freq[sub] += 1
    candidates = [(s, f) for s, f in sub_freq.items() if f >= 2]
    if seed_size is None:
        seed_size = len(char_freq) + len(candidates)
    if seed_size < len(char_freq):
        raise ModelError(f"seed_size {seed_size} below distinct character "
                         f"count {len(char_freq)}")
    candidates.sort(key=lambda item: (-item[1] * len(item[0]), item[0]))
    kept = candidates[: seed_size - len(char_freq)]
    scores: dict[str, float] = dict(char_freq)
    for s, f in kept:
        scores[s] = float(f * len(s))
    return _normalize_counts(scores)


def _edges_by_end(text: str, pieces: dict[str, float], max_len: int):
    """Lattice edges grouped by end node: edges[j] = [(i, surface, lp, prob)]."""
    n = len(text)
    edges: list[list[tuple[int, str, float, float]]] = [[] for _ in range(n + 1)]
    for i in range(n):
        top = min(i + max_len, n)
        for j in range(i + 1, top + 1):
            sub = text[i:j]
            lp = pieces.get(sub)
            if lp is not None:
                edges[j].append((i, sub, lp, math.exp(lp)))
    return edges


def _logsumexp(values: list[float]) -> float:
    if not values:
        return _NEG_INF
    m = max(values)
    if m == _NEG_INF:
        return _NEG_INF
    return m + math.log(sum(math.exp(v - m) for v in values))


def _forward_log(edges, n: int) -> list[float]:
    alpha = [_NEG_INF] * (n + 1)
    alpha[0] = 0.0
    for j in range(1, n + 1):
        alpha[j] = _logsumexp([alpha[i] + lp for i, _, lp, _ in edges[j]
                               if alpha[i] != _NEG_INF])
    return alpha


def _backward_log(edges, n: int) -> list[float]:
    # rebuild edges grouped by start node for the backward sweep
    by_start: list[list[tuple[int, float]]] = [[] for _ in range(n + 1)]
    for j in range(1, n + 1):
        for i, _, lp, _ in edges[j]:
            by_start[i].append((j, lp))
    beta = [_NEG_INF] * (n + 1)
    beta[n] = 0.0
    for i in range(n - 1, -1, -1):
        beta[i] = _logsumexp([lp + beta[j] for j, lp in by_start[i]
                              if beta[j] != _NEG_INF])
    return beta


def _forward_prob_log_z(edges, n: int, skip: str | None = None) -> float:
    """Marginal log-likelihood of one line via a scaled probability-space
    forward pass, optionally skipping every edge labeled `skip`."""
    alpha = [0.0] * (n + 1)
    alpha[0] = 1.0
    log_scale = 0.0
    for j in range(1, n + 1):
        total = 0.0
        for i, surf, _, p in edges[j]:
            if surf != skip:
                total += alpha[i] * p
        alpha[j] = total
        if 0.0 < total < 1e-100:
            boost = 1e100
            for k in range(j + 1):
                alpha[k] *= boost
            log_scale -= math.log(boost)
    if alpha[n] <= 0.0:
        return _NEG_INF
    return math.log(alpha[n]) + log_scale


def _check_coverage(pieces: dict[str, float], lines: list[str]) -> None:
    missing = sorted({ch for line in lines for ch in line} - set(pieces))
    if missing:
        raise ModelError(f"vocabulary does not cover characters: "
                         f"{''.join(missing)!r}")


def corpus_log_likelihood(model: SubwordModel, lines: list[str]) -> float:
    _check_coverage(model.pieces, lines)
    max_len = model.max_piece_len()
    total = 0.0
    for line, weight in Counter(lines).items():
        edges = _edges_by_end(line, model.pieces, max_len)
        total += weight * _forward_prob_log_z(edges, len(line))
    return total


def em_step(model: SubwordModel, lines: list[str]) -> tuple[SubwordModel, float]:
    """One EM round. The E-step accumulates posterior-expected piece counts
    with forward-backward over each line's lattice; the M-step renormalizes.
    Returns the new model and the corpus log-likelihood under the OLD model.
    """
    _check_coverage(model.pieces, lines)
    max_len = model.max_piece_len()
    expected: defaultdict[str, float] = defaultdict(float)
    total_ll = 0.0
    for line, weight in Counter(lines).items():
        n = len(line)
        edges = _edges_by_end(line, model.pieces, max_len)
        alpha = _forward_log(edges, n)
        z = alpha[n]
        if z == _NEG_INF:
            raise ModelError(f"line not coverable: {line!r}")
        beta = _backward_log(edges, n)
        total_ll += weight * z
        for j in range(1, n + 1):
            for i, surf, lp, _ in edges[j]:
                if alpha[i] == _NEG_INF or beta[j] == _NEG_INF:
                    continue
                expected[surf] += weight * math.exp(alpha[i] + lp + beta[j] - z)
    # keep coverage even if a single char picked up no mass (cannot normally
    # happen for corpus-derived vocabularies, but guards against dropping it)
    for surf in model.pieces:
        if len(surf) == 1 and expected[surf] <= 0.0:
            expected[surf] = 1e-12
    counts = {s: c for s, c in expected.items() if c > 0.0}
    return replace(model, pieces=_normalize_counts(counts)), total_ll


def viterbi_segment(model: SubwordModel, text: str) -> list[str]:
    """Max-probability segmentation; concatenating the result reproduces
    `text`. Ties break toward fewer pieces, then the lexicographically
    smallest piece sequence. Unknown characters become singleton pieces with
    a floor log-probability."""
    if not text:
        return []
    pieces = model.pieces
    unknown = {ch for ch in text if ch not in pieces}
    if unknown:
        floor = min(pieces.values(), default=0.0) - UNKNOWN_LOG_PROB_PENALTY
        pieces = dict(pieces)
        for ch in unknown:
            pieces[ch] = floor
    max_len = max(len(s) for s in pieces)
    n = len(text)
    # best[i] = (score, piece_count, piece_sequence) for the suffix text[i:]
    best: list[tuple[float, int, tuple[str, ...]] | None] = [None] * (n + 1)
    best[n] = (0.0, 0, ())
    for i in range(n - 1, -1, -1):
        chosen = None
        for j in range(i + 1, min(i + max_len, n) + 1):
            lp = pieces.get(text[i:j])
            if lp is None:
                continue
            tail = best[j]
            if tail is None:
                continue
            cand = (lp + tail[0], tail[1] + 1, (text[i:j],) + tail[2])
            if chosen is None:
                chosen = cand
            elif cand[0] > chosen[0]:
                chosen = cand
            elif cand[0] == chosen[0] and (cand[1], cand[2]) < (chosen[1], chosen[2]):
                chosen = cand
        best[i] = chosen
    assert best[0] is not None  # single-char fallback keeps the lattice connected
    return list(best[0][2])


def piece_losses(model: SubwordModel, lines: list[str]) -> dict[str, float]:
    """For each multi-character piece, the drop in corpus marginal
    log-likelihood when that piece (alone) is removed from the vocabulary."""
    _check_coverage(model.pieces, lines)
    max_len = model.max_piece_len()
    losses = {s: 0.0 for s in model.pieces if len(s) > 1}
    for line, weight in Counter(lines).items():
        n = len(line)
        edges = _edges_by_end(line, model.pieces, max_len)
        base = _forward_prob_log_z(edges, n)
        present = {surf for js in edges for _, surf, _, _ in js if len(surf) > 1}
        for surf in present:
            without = _forward_prob_log_z(edges, n, skip=surf)
            losses[surf] += weight * (base - without)
    return losses


def prune_vocabulary(model: SubwordModel, lines: list[str], eta_keep: float,
                     min_multi: int = 0, max_multi: int | None = None) -> SubwordModel:
    """Keep the top eta_keep fraction (rounded up, so a piece whose removal
    strictly drops likelihood survives any positive eta) of multi-character
    pieces by likelihood loss, clamped to [min_multi, max_multi], plus every
    single-character piece, then renormalize. Loss ties break toward higher
    log-probability, then lexicographically smaller surface."""
    if not 0.0 < eta_keep < 1.0:
        raise ModelError("eta_keep must be in (0, 1)")
    multi = sorted(s for s in model.pieces if len(s) > 1)
    if not multi:
        return model
    losses = piece_losses(model, lines)
    keep = int(math.ceil(eta_keep * len(multi)))
    if max_multi is not None:
        keep = min(keep, max_multi)
    keep = min(max(keep, min_multi), len(multi))
    ranked = sorted(multi, key=lambda s: (-losses[s], -model.pieces[s], s))
    surviving = set(ranked[:keep]) | model.single_chars()
    counts = {s: math.exp(lp) for s, lp in model.pieces.items() if s in surviving}
    return replace(model, pieces=_normalize_counts(counts))


def train_model(lines: list[str], target_size: int,
                config: TrainerConfig = TrainerConfig(),
                speaker_id: str = "") -> SubwordModel:
    """Seed, then alternate EM with pruning until the multi-character piece
    count fits the target (single characters always stay), then one final EM
    pass. Fully deterministic for a given config."""
    if not lines or not any(lines):
        raise ModelError("cannot train on empty lines")
    if target_size < 1:
        raise ModelError("target_size must be positive")
    n_chars = len({ch for line in lines for ch in line if not ch.isspace()})
    seed_size = max(target_size * config.seed_multiplier, n_chars)
    pieces = seed_vocabulary(lines, config.max_piece_len, seed_size)
    model = SubwordModel(speaker_id, pieces, target_size=target_size)
    target_multi = max(target_size - n_chars, 0)
    while True:
        for _ in range(config.em_subiters):
            model, _ = em_step(model, lines)
        n_multi = len(model.pieces) - n_chars
        if n_multi <= target_multi:
            break
        # cap at n_multi - 1 so every round makes progress toward the target
        model = prune_vocabulary(model, lines, config.eta_keep,
                                 min_multi=target_multi,
                                 max_multi=max(target_multi, n_multi - 1))
    model, _ = em_step(model, lines)
    final_ll = corpus_log_likelihood(model, lines)
    return replace(model, trained_log_likelihood=final_ll)


def save_model(model: SubwordModel) -> bytes:
    header = "\t".join([MODEL_MAGIC, MODEL_VERSION, model.speaker_id,
                        str(len(model.pieces))])
    rows = [f"{surface}\t{lp:.17g}" for surface, lp in sorted(model.pieces.items())]
    return ("\n".join([header] + rows) + "\n").encode("utf-8")


def load_model(data: bytes | str) -> SubwordModel:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ModelError(f"malformed model: {exc}") from exc
    lines = data.splitlines()
    if not lines:
        raise ModelError("malformed model: empty file")
    header = lines[0].split("\t")
    if len(header) != 4 or header[0] != MODEL_MAGIC:
        raise ModelError("malformed model: bad header")
    if header[1] != MODEL_VERSION:
        raise ModelError(f"unsupported model version {header[1]!r}")
    speaker_id = header[2]
    try:
        count = int(header[3])
    except ValueError as exc:
        raise ModelError("malformed model: bad piece count") from exc
    body = [ln for ln in lines[1:] if ln]
    if len(body) != count:
        raise ModelError(f"malformed model: expected {count} pieces, "
                         f"found {len(body)}")
    pieces: dict[str, float] = {}
    for row in body:
        fields = row.split("\t")
        if len(fields) != 2 or not fields[0]:
            raise ModelError(f"malformed model record: {row!r}")
        surface, lp_text = fields
        if surface in pieces:
            raise ModelError(f"duplicate piece {surface!r}")
        try:
            lp = float(lp_text)
        except ValueError as exc:
            raise ModelError(f"malformed log_prob in {row!r}") from exc
        if lp > 0.0:
            raise ModelError(f"log_prob above zero for piece {surface!r}")
        pieces[surface] = lp
    return SubwordModel(speaker_id, pieces, target_size=len(pieces))
