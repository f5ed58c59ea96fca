"""Two-stage stacking over repeated cross-validation runs.

Stage one trains the base model once per repetition under that
repetition's fold assignment and records, for every document, the
prediction of the one model that did not see it (the out-of-fold
prediction). Stacked per-document vectors (one column per repetition)
feed a stage-two logistic regression, evaluated by its own fresh 10-fold
cross-validation.

The logistic regression is fitted by full-batch gradient descent with
Armijo backtracking line search on the ridge-stabilized logistic loss
(lambda = 1e-6, which keeps the optimum finite on separable data without
visibly moving it); convexity makes the fit seed-independent.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .neural.train import NeuralError, rng_for, stratified_kfold

RIDGE = 1e-6


class EnsembleError(ValueError):
    pass


@dataclass
class StageOneMatrix:
    """Per trait: (n_docs, repetitions) out-of-fold probabilities."""

    doc_ids: list[str]
    repetitions: int
    probabilities: dict[str, np.ndarray] = field(default_factory=dict)
    labels: dict[str, np.ndarray] = field(default_factory=dict)
    # fold_of[trait][rep][doc] = fold index that held the doc out, for audits
    fold_of: dict[str, np.ndarray] = field(default_factory=dict)

    def validate(self) -> None:
        n = len(self.doc_ids)
        for trait, mat in self.probabilities.items():
            if mat.shape != (n, self.repetitions):
                raise EnsembleError(f"{trait}: stage-one matrix shape {mat.shape}")
            if np.any(np.isnan(mat)):
                missing = int(np.isnan(mat).sum())
                raise EnsembleError(
                    f"{trait}: {missing} document/repetition cells lack an "
                    "out-of-fold prediction"
                )
            if np.any((mat <= 0.0) | (mat >= 1.0)):
                raise EnsembleError(f"{trait}: probabilities must lie strictly in (0, 1)")


def collect_stage_one(doc_ids: list[str], labels: dict[str, np.ndarray],
                      train_fn, predict_fn, k: int = 10, repetitions: int = 10,
                      seed: int = 0) -> StageOneMatrix:
    """Out-of-fold prediction matrix from ``repetitions`` fold assignments.

    ``train_fn(train_idx, trait, rng) -> model_state`` and
    ``predict_fn(model_state, val_idx) -> probabilities`` keep this module
    independent of the base model; the CLI passes the neural trainer.
    """
    n = len(doc_ids)
    out = StageOneMatrix(doc_ids=list(doc_ids), repetitions=repetitions)
    for t_i, (trait, y) in enumerate(labels.items()):
        y = np.asarray(y)
        mat = np.full((n, repetitions), np.nan)
        fold_of = np.full((n, repetitions), -1, dtype=int)
        for rep in range(repetitions):
            folds = stratified_kfold(y, k, rng_for(seed, rep, t_i))
            for fold_i, (tr, va) in enumerate(folds):
                state = train_fn(tr, trait, rng_for(seed, rep, fold_i, t_i))
                probs = np.asarray(predict_fn(state, va), dtype=np.float64)
                mat[va, rep] = np.clip(probs, 1e-9, 1.0 - 1e-9)
                fold_of[va, rep] = fold_i
        out.probabilities[trait] = mat
        out.labels[trait] = y
        out.fold_of[trait] = fold_of
    out.validate()
    return out


def audit_out_of_fold(matrix: StageOneMatrix) -> int:
    """Number of leakage violations (cells without a held-out fold).

    Only freshly collected matrices carry fold assignments; matrices read
    back from CSV cannot be audited.
    """
    violations = 0
    for trait in matrix.probabilities:
        if trait not in matrix.fold_of:
            raise EnsembleError(f"{trait}: fold assignments were not recorded")
        violations += int(np.sum(matrix.fold_of[trait] < 0))
    return violations


# ---------------------------------------------------------------------------
# stage two: logistic regression meta-model
# ---------------------------------------------------------------------------

@dataclass
class MetaModel:
    weights: np.ndarray  # (n_features,)
    bias: float

    def predict_proba(self, rows: np.ndarray) -> np.ndarray:
        z = np.atleast_2d(rows) @ self.weights + self.bias
        return 1.0 / (1.0 + np.exp(-z))

    def predict(self, rows: np.ndarray) -> np.ndarray:
        return (self.predict_proba(rows) >= 0.5).astype(int)


def _logistic_loss_grad(w: np.ndarray, b: float, x: np.ndarray, y: np.ndarray):
    z = x @ w + b
    # stable log(1 + e^z) - y z
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z)) + 0.5 * RIDGE * float(w @ w)
    p = 1.0 / (1.0 + np.exp(-z))
    resid = p - y
    grad_w = x.T @ resid / len(y) + RIDGE * w
    grad_b = float(np.mean(resid))
    return loss, grad_w, grad_b


def train_meta(x: np.ndarray, y: np.ndarray, tol: float = 1e-6,
               max_iter: int = 5000) -> MetaModel:
    """Full-batch gradient descent with backtracking to gradient norm < tol."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 2:
        raise EnsembleError("stage-two input must be 2-D")
    if np.unique(y).size < 2:
        raise EnsembleError("meta-model needs both classes present")
    w = np.zeros(x.shape[1])
    b = 0.0
    step = 1.0
    loss, gw, gb = _logistic_loss_grad(w, b, x, y)
    for _ in range(max_iter):
        gnorm = float(np.sqrt(gw @ gw + gb * gb))
        if gnorm < tol:
            break
        # Armijo backtracking from the last accepted step size
        step = min(step * 2.0, 64.0)
        while step > 1e-12:
            w_new = w - step * gw
            b_new = b - step * gb
            new_loss, gw_new, gb_new = _logistic_loss_grad(w_new, b_new, x, y)
            if new_loss <= loss - 1e-4 * step * gnorm * gnorm:
                w, b, loss, gw, gb = w_new, b_new, new_loss, gw_new, gb_new
                break
            step *= 0.5
        else:
            break
    return MetaModel(weights=w, bias=float(b))


def predict_meta(model: MetaModel, row: np.ndarray) -> float:
    return float(model.predict_proba(np.atleast_2d(row))[0])


def evaluate_meta(x: np.ndarray, y: np.ndarray, k: int = 10, seed: int = 0) -> float:
    """Stage-two k-fold CV accuracy with fresh seeded folds."""
    y = np.asarray(y)
    accs = []
    for tr, va in stratified_kfold(y, k, rng_for(seed, 424242)):
        model = train_meta(x[tr], y[tr])
        accs.append(float(np.mean(model.predict(x[va]) == y[va])))
    return float(np.mean(accs))


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------

def write_stage_one(matrix: StageOneMatrix, path: str) -> None:
    """CSV rows (doc_id, trait, rep_0..rep_{r-1}, label)."""
    reps = matrix.repetitions
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["doc_id", "trait"] + [f"rep_{j}" for j in range(reps)] + ["label"])
        for trait in matrix.probabilities:
            probs = matrix.probabilities[trait]
            labels = matrix.labels[trait]
            for i, doc_id in enumerate(matrix.doc_ids):
                writer.writerow([doc_id, trait]
                                + [f"{p:.10g}" for p in probs[i]]
                                + [int(labels[i])])


def read_stage_one(path: str) -> StageOneMatrix:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        reps = len(header) - 3
        rows_by_trait: dict[str, list[tuple[str, list[float], int]]] = {}
        for row in reader:
            doc_id, trait = row[0], row[1]
            probs = [float(v) for v in row[2: 2 + reps]]
            rows_by_trait.setdefault(trait, []).append((doc_id, probs, int(row[-1])))
    doc_ids = [r[0] for r in next(iter(rows_by_trait.values()))]
    out = StageOneMatrix(doc_ids=doc_ids, repetitions=reps)
    for trait, rows in rows_by_trait.items():
        out.probabilities[trait] = np.asarray([r[1] for r in rows])
        out.labels[trait] = np.asarray([r[2] for r in rows])
    out.validate()
    return out
