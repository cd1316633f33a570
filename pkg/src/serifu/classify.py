"""Speaker-group classification on per-speaker TF/IDF features.

A linear one-vs-rest max-margin classifier trained with regularized
hinge-loss subgradient descent, evaluated with stratified k-fold
cross-validation. Deliberately dependency-light: the feature matrices are
small (about a hundred speakers) and a linear separator is the right tool
for thousands of sparse TF/IDF dimensions.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .patterns import TfIdfTable, WordList


@dataclass
class FeatureMatrix:
    row_ids: list[str]
    col_ids: list[str]
    values: np.ndarray  # shape (rows, cols), non-negative

    def subset(self, indices: list[int]) -> "FeatureMatrix":
        return FeatureMatrix([self.row_ids[i] for i in indices], self.col_ids,
                             self.values[indices])


@dataclass(frozen=True)
class SvmConfig:
    lam: float = 1e-3
    epochs: int = 200
    seed: int = 42
    full_batch: bool = False


@dataclass
class SvmModel:
    classes: list[str]
    col_ids: list[str]
    weights: np.ndarray  # shape (classes, cols)
    biases: np.ndarray  # shape (classes,)
    config: SvmConfig
    objective_history: list[list[float]] = field(default_factory=list, repr=False)


@dataclass
class CvResult:
    fold_accuracies: list[float]
    mean_accuracy: float
    confusion: Counter  # (true, predicted) -> count
    folds: list[list[str]]  # row ids per test fold


def build_features(table: TfIdfTable, word_list: WordList) -> FeatureMatrix:
    """Rows are the table's documents (speakers, for scheme=character), columns
    the deduplicated word-list surfaces in lexicographic order."""
    if table.scheme != "character":
        raise InputError(f"features need a character-scheme table, "
                         f"got {table.scheme!r}")
    rows = sorted(table.doc_ids)
    cols = word_list.surfaces()
    values = np.zeros((len(rows), len(cols)))
    row_index = {r: i for i, r in enumerate(rows)}
    col_index = {c: i for i, c in enumerate(cols)}
    for (doc, surface), value in table.values.items():
        values[row_index[doc], col_index[surface]] = value
    return FeatureMatrix(rows, cols, values)


def hinge_objective(w: np.ndarray, b: float, x: np.ndarray, y: np.ndarray,
                    lam: float) -> float:
    margins = y * (x @ w + b)
    return 0.5 * lam * float(w @ w) + float(np.mean(np.maximum(0.0, 1.0 - margins)))


def _train_binary_sgd(x, y, config: SvmConfig, seed: int):
    rng = np.random.default_rng(seed)
    n, dim = x.shape
    w = np.zeros(dim)
    b = 0.0
    t = 0
    for _ in range(config.epochs):
        for idx in rng.permutation(n):
            t += 1
            eta = 1.0 / (config.lam * t)
            margin = y[idx] * (x[idx] @ w + b)
            w *= 1.0 - eta * config.lam
            if margin < 1.0:
                w += eta * y[idx] * x[idx]
                b += eta * y[idx]
    return w, b, []


def _train_binary_full_batch(x, y, config: SvmConfig):
    # monotone by construction: a step is only accepted when the objective
    # does not increase, otherwise the step size halves
    n, dim = x.shape
    w = np.zeros(dim)
    b = 0.0
    step = 1.0
    obj = hinge_objective(w, b, x, y, config.lam)
    history = [obj]
    for _ in range(config.epochs):
        margins = y * (x @ w + b)
        violating = margins < 1.0
        grad_w = config.lam * w - (y[violating, None] * x[violating]).sum(axis=0) / n
        grad_b = -float(y[violating].sum()) / n
        while step > 1e-15:
            w2 = w - step * grad_w
            b2 = b - step * grad_b
            obj2 = hinge_objective(w2, b2, x, y, config.lam)
            if obj2 <= obj:
                w, b, obj = w2, b2, obj2
                break
            step *= 0.5
        history.append(obj)
    return w, b, history


def train_svm(features: FeatureMatrix, labels: list[str],
              config: SvmConfig = SvmConfig()) -> SvmModel:
    x = features.values
    if len(labels) != x.shape[0]:
        raise InputError("label count does not match feature rows")
    if np.isnan(x).any():
        raise InputError("NaN features")
    classes = sorted(set(labels))
    if len(classes) < 2:
        raise InputError("single-class input")
    weights = np.zeros((len(classes), x.shape[1]))
    biases = np.zeros(len(classes))
    history = []
    for ci, cls in enumerate(classes):
        y = np.where(np.asarray(labels) == cls, 1.0, -1.0)
        if config.full_batch:
            w, b, h = _train_binary_full_batch(x, y, config)
        else:
            w, b, h = _train_binary_sgd(x, y, config, seed=config.seed + ci)
        weights[ci] = w
        biases[ci] = b
        history.append(h)
    return SvmModel(classes, features.col_ids, weights, biases, config, history)


def predict(model: SvmModel, features: FeatureMatrix) -> list[str]:
    if features.col_ids != model.col_ids:
        raise InputError("feature columns do not match the model")
    scores = features.values @ model.weights.T + model.biases
    # np.argmax takes the first maximum, which matches class-order tie-breaking
    return [model.classes[i] for i in np.argmax(scores, axis=1)]


def make_folds(labels: list[str], folds: int, seed: int) -> list[list[int]]:
    """Stratified fold assignment: per class, seeded shuffle then round-robin.
    Classes smaller than the fold count simply miss some folds."""
    if folds < 2:
        raise InputError("folds must be >= 2")
    if folds > len(labels):
        raise InputError(f"{folds} folds for {len(labels)} rows")
    rng = np.random.default_rng(seed)
    assignment: list[list[int]] = [[] for _ in range(folds)]
    by_class: dict[str, list[int]] = {}
    for i, label in enumerate(labels):
        by_class.setdefault(label, []).append(i)
    offset = 0  # carried across classes so fold sizes stay balanced
    for cls in sorted(by_class):
        members = list(by_class[cls])
        rng.shuffle(members)
        for pos, idx in enumerate(members):
            assignment[(offset + pos) % folds].append(idx)
        offset = (offset + len(members)) % folds
    return [sorted(fold) for fold in assignment]


def cross_validate(features: FeatureMatrix, labels: list[str], folds: int = 5,
                   seed: int = 42, config: SvmConfig = SvmConfig()) -> CvResult:
    fold_indices = make_folds(labels, folds, seed)
    accuracies = []
    confusion: Counter = Counter()
    fold_rows = []
    for test_idx in fold_indices:
        test_set = set(test_idx)
        train_idx = [i for i in range(len(labels)) if i not in test_set]
        model = train_svm(features.subset(train_idx),
                          [labels[i] for i in train_idx], config)
        predicted = predict(model, features.subset(test_idx))
        hits = 0
        for i, pred in zip(test_idx, predicted):
            confusion[(labels[i], pred)] += 1
            hits += labels[i] == pred
        accuracies.append(hits / len(test_idx) if test_idx else 0.0)
        fold_rows.append([features.row_ids[i] for i in test_idx])
    mean = math.fsum(accuracies) / len(accuracies)
    return CvResult(accuracies, mean, confusion, fold_rows)


def cv_tsv(result: CvResult) -> str:
    rows = ["fold\taccuracy"]
    rows.extend(f"{i}\t{acc:.17g}" for i, acc in enumerate(result.fold_accuracies, 1))
    rows.append(f"mean\t{result.mean_accuracy:.17g}")
    rows.append("true\tpredicted\tcount")
    rows.extend(f"{t}\t{p}\t{c}" for (t, p), c in sorted(result.confusion.items()))
    return "\n".join(rows) + "\n"
