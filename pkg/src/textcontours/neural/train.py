"""Cross-validated training of per-trait contour classifiers.

Evaluation is stratified k-fold cross-validation, repeated with
re-shuffled folds; every RNG stream is derived from
(seed, repetition, fold, trait) so runs are bit-reproducible. Inside each
fold the feature standardizer is fitted on the training documents only.
One independent binary model is trained per trait.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from ..contours import ContourMatrix, Standardizer, fit_standardizer
from ..errors import NumericError
from .layers import Model, ModelConfig, NeuralError, loss_bce
from .optim import AdamW


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 8e-4
    weight_decay: float = 1e-4
    epochs: int = 30
    batch_size: int = 32
    folds: int = 10
    repetitions: int = 10
    seed: int = 0
    adapter_lr: float = 2e-5  # embedding-adapter rate in FT-style hybrids

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise NeuralError("learning rate must be positive")
        if self.folds < 2:
            raise NeuralError("cross-validation needs k >= 2")


@dataclass
class TrainCorpus:
    """Raw (unstandardized) contours with labels and optional embeddings."""

    doc_ids: list[str]
    matrices: list[ContourMatrix]
    labels: dict[str, np.ndarray]  # trait -> (n_docs,) of {0,1}
    embeddings: np.ndarray | None = None  # (n_docs, e), frozen inputs

    def __post_init__(self):
        n = len(self.doc_ids)
        if len(self.matrices) != n:
            raise NeuralError("doc_ids and matrices disagree in length")
        for trait, y in self.labels.items():
            if len(y) != n:
                raise NeuralError(f"labels for {trait!r} do not cover the corpus")

    @property
    def traits(self) -> list[str]:
        return list(self.labels)


@dataclass
class FoldReport:
    traits: list[str]
    folds: int
    repetitions: int
    seed: int
    accuracy: dict[str, list[list[float]]] = field(default_factory=dict)
    # accuracy[trait][repetition][fold]

    def trait_mean(self, trait: str) -> float:
        return float(np.mean(self.accuracy[trait]))

    def overall_mean(self) -> float:
        return float(np.mean([self.trait_mean(t) for t in self.traits]))

    def to_json(self) -> str:
        payload = {
            "traits": self.traits,
            "folds": self.folds,
            "repetitions": self.repetitions,
            "seed": self.seed,
            "accuracy": self.accuracy,
            "trait_means": {t: self.trait_mean(t) for t in self.traits},
            "overall_mean": self.overall_mean(),
        }
        return json.dumps(payload, sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "FoldReport":
        raw = json.loads(text)
        return cls(traits=raw["traits"], folds=raw["folds"],
                   repetitions=raw["repetitions"], seed=raw["seed"],
                   accuracy=raw["accuracy"])


def rng_for(seed: int, *stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((seed, *stream)))


def stratified_kfold(y: np.ndarray, k: int, rng: np.random.Generator):
    """Index pairs (train, val) with class proportions kept per fold."""
    y = np.asarray(y)
    classes = np.unique(y)
    if classes.size < 2:
        raise NeuralError("stratified folds need both classes present")
    for cls in classes:
        if np.sum(y == cls) < k:
            raise NeuralError(
                f"class {cls} has fewer than k={k} members; stratification impossible"
            )
    folds: list[list[int]] = [[] for _ in range(k)]
    for cls in classes:
        idx = np.flatnonzero(y == cls)
        rng.shuffle(idx)
        for i, doc in enumerate(idx):
            folds[i % k].append(int(doc))
    out = []
    all_idx = set(range(len(y)))
    for f in folds:
        val = sorted(f)
        train = sorted(all_idx - set(val))
        out.append((np.asarray(train), np.asarray(val)))
    return out


def _truncate(m: ContourMatrix, max_sentences: int) -> np.ndarray:
    v = m.values
    return v[:max_sentences] if v.shape[0] > max_sentences else v


def prepare_fold(corpus: TrainCorpus, train_idx: np.ndarray, val_idx: np.ndarray,
                 max_sentences: int):
    """Standardize on the training documents, transform both splits."""
    std = fit_standardizer([corpus.matrices[i] for i in train_idx])
    def grab(idx):
        return [
            _truncate(std.transform(corpus.matrices[i]), max_sentences) for i in idx
        ]
    return grab(train_idx), grab(val_idx), std


def fit_single(sequences: list[np.ndarray], y: np.ndarray, config: ModelConfig,
               tcfg: TrainConfig, rng: np.random.Generator,
               embeddings: np.ndarray | None = None,
               stop_at_train_acc: float | None = None) -> Model:
    """Train one model on one split; returns the trained model."""
    model = Model.build(config, rng)
    overrides = {"adapter.": tcfg.adapter_lr} if config.embed_adapter else None
    opt = AdamW(model.parameters(), lr=tcfg.learning_rate,
                weight_decay=tcfg.weight_decay, lr_overrides=overrides)
    n = len(sequences)
    y = np.asarray(y, dtype=np.float64)
    for _ in range(tcfg.epochs):
        order = rng.permutation(n)
        for lo in range(0, n, tcfg.batch_size):
            idx = order[lo: lo + tcfg.batch_size]
            batch = [sequences[i] for i in idx]
            emb = embeddings[idx] if embeddings is not None else None
            probs = model.forward(batch, embeddings=emb, train=True, rng=rng)
            loss = loss_bce(probs, y[idx][:, None])
            if not np.isfinite(loss.data):
                raise NumericError("non-finite training loss")
            model.zero_grad()
            loss.backward()
            opt.step()
        if stop_at_train_acc is not None:
            acc = accuracy(model, sequences, y, embeddings)
            if acc >= stop_at_train_acc:
                break
    return model


def predict_labels(model: Model, sequences, embeddings=None) -> np.ndarray:
    probs = model.predict_proba(sequences, embeddings)
    return (probs[:, 0] >= 0.5).astype(int)  # exact 0.5 maps to label 1


def accuracy(model: Model, sequences, y, embeddings=None) -> float:
    return float(np.mean(predict_labels(model, sequences, embeddings) == np.asarray(y)))


def cross_validate(corpus: TrainCorpus, config: ModelConfig, tcfg: TrainConfig,
                   progress=None) -> FoldReport:
    """The full CV protocol; deterministic given (config, tcfg, corpus)."""
    report = FoldReport(traits=corpus.traits, folds=tcfg.folds,
                        repetitions=tcfg.repetitions, seed=tcfg.seed)
    for t_i, trait in enumerate(corpus.traits):
        y = corpus.labels[trait]
        if np.unique(y).size < 2:
            raise NeuralError(f"trait {trait!r} has a single class; cannot stratify")
        per_rep = []
        for rep in range(tcfg.repetitions):
            fold_rng = rng_for(tcfg.seed, rep, t_i)
            accs = []
            for fold_i, (tr, va) in enumerate(stratified_kfold(y, tcfg.folds, fold_rng)):
                xs_tr, xs_va, _ = prepare_fold(corpus, tr, va, config.max_sentences)
                emb_tr = corpus.embeddings[tr] if corpus.embeddings is not None else None
                emb_va = corpus.embeddings[va] if corpus.embeddings is not None else None
                model = fit_single(xs_tr, y[tr], config, tcfg,
                                   rng_for(tcfg.seed, rep, t_i, fold_i), emb_tr)
                accs.append(accuracy(model, xs_va, y[va], emb_va))
                if progress:
                    progress(trait, rep, fold_i, accs[-1])
            per_rep.append(accs)
        report.accuracy[trait] = per_rep
    return report


def train_final(corpus: TrainCorpus, config: ModelConfig, tcfg: TrainConfig):
    """One model per trait trained on the full corpus, plus the shared
    standardizer fitted on all documents."""
    std = fit_standardizer(corpus.matrices)
    sequences = [
        _truncate(std.transform(m), config.max_sentences) for m in corpus.matrices
    ]
    models = {}
    for t_i, trait in enumerate(corpus.traits):
        models[trait] = fit_single(sequences, corpus.labels[trait], config, tcfg,
                                   rng_for(tcfg.seed, 9999, t_i), corpus.embeddings)
    return models, std


# ---------------------------------------------------------------------------
# checkpoints
# ---------------------------------------------------------------------------

CHECKPOINT_VERSION = 1


def config_hash(config: ModelConfig, tcfg: TrainConfig) -> str:
    payload = json.dumps({"model": config.to_json(), "train": tcfg.__dict__},
                         sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()


def save_checkpoint(path: str, models: dict[str, Model], std: Standardizer,
                    registry_hash: str, tcfg: TrainConfig) -> None:
    any_model = next(iter(models.values()))
    payload = {
        "version": CHECKPOINT_VERSION,
        "registry_hash": registry_hash,
        "config": any_model.config.to_json(),
        "train_config": dict(tcfg.__dict__),
        "standardizer": std.to_json(),
        "traits": {
            trait: {
                "params": {k: v.data.tolist() for k, v in m.params.items()},
                "buffers": {k: v.tolist() for k, v in m.buffers.items()},
            }
            for trait, m in models.items()
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True)


def load_checkpoint(path: str, registry_hash: str | None = None):
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("version") != CHECKPOINT_VERSION:
        raise NeuralError(f"unsupported checkpoint version {payload.get('version')}")
    if registry_hash is not None and payload["registry_hash"] != registry_hash:
        raise NeuralError(
            "checkpoint was built against a different feature registry "
            f"({payload['registry_hash'][:12]}... != {registry_hash[:12]}...)"
        )
    config = ModelConfig.from_json(payload["config"])
    models = {}
    for trait, blob in payload["traits"].items():
        model = Model.build(config)
        for k, v in blob["params"].items():
            model.params[k].data = np.asarray(v, dtype=np.float64)
        model.buffers = {k: np.asarray(v, dtype=np.float64) for k, v in blob["buffers"].items()}
        models[trait] = model
    std = Standardizer.from_json(payload["standardizer"])
    tcfg = TrainConfig(**payload["train_config"])
    return models, std, tcfg, payload["registry_hash"]
