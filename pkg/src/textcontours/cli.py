"""Command-line pipeline: analyze -> train -> eval -> stack -> explain.

Every artifact embeds the seed plus the registry and config hashes, and
``eval``/``explain`` refuse checkpoints whose registry hash does not match
the contours they are pointed at. Exit codes: 0 success, 1 usage error,
2 data error, 3 numeric failure (any NaN aborts the run).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import contours as contours_mod
from . import ensemble as ensemble_mod
from . import explain as explain_mod
from .contours import ContourExtractor, ContourMatrix, read_contours, write_contours
from .embeddings import EmbeddingError, load_embeddings
from .errors import NumericError
from .ingest import (
    BIG_FIVE_TRAITS,
    MBTI_TRAITS,
    IngestError,
    apply_conllu,
    load_conllu,
    load_dataset,
    segment,
)
from .neural import (
    ModelConfig,
    NeuralError,
    TrainConfig,
    TrainCorpus,
    accuracy,
    cross_validate,
    fit_single,
    load_checkpoint,
    save_checkpoint,
    train_final,
)
from .neural.train import config_hash, prepare_fold, _truncate
from .registry import FeatureRegistry, RegistryError, load_registry_config
from .resources import ResourceError, load_store

DATA_ERRORS = (IngestError, ResourceError, RegistryError, contours_mod.ContourError,
               EmbeddingError, ensemble_mod.EnsembleError, explain_mod.ExplainError,
               NeuralError, FileNotFoundError, json.JSONDecodeError)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        sys.exit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="textcontours",
                     description="Text contours of psycholinguistic features: "
                                 "feature extraction, classifiers, stacking, "
                                 "and feature-group explanations.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--jobs", type=int, default=None,
                       help="parallel workers (default: cores for analyze, 1 otherwise)")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--config", help="JSON config file; its values override flags")

    p = sub.add_parser("analyze", help="extract contour matrices from a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--format", choices=["essays-csv", "mbti-csv"], required=True)
    p.add_argument("--schema", choices=["BigFive", "MBTI"], required=True)
    p.add_argument("--manifest", required=True, help="resource manifest file")
    p.add_argument("--registry-config", help="INI registry configuration")
    p.add_argument("--conllu", help="CoNLL-U annotations keyed by newdoc id")
    common(p)

    def model_flags(p):
        p.add_argument("--encoder", choices=["ATTN", "BLSTM"], default="ATTN")
        p.add_argument("--layers", type=int, default=3)
        p.add_argument("--hidden", type=int, default=256)
        p.add_argument("--dropout", type=float, default=0.1)
        p.add_argument("--classifier-layers", type=int, default=3)
        p.add_argument("--classifier-hidden", type=int, default=512)
        p.add_argument("--max-sentences", type=int, default=64)
        p.add_argument("--embeddings", help="embedding file for hybrid late fusion")
        p.add_argument("--ft", action="store_true",
                       help="train an embedding adapter with its own learning rate")
        p.add_argument("--lr", type=float, default=8e-4)
        p.add_argument("--l2", type=float, default=1e-4)
        p.add_argument("--epochs", type=int, default=30)
        p.add_argument("--batch-size", type=int, default=32)
        p.add_argument("--folds", type=int, default=10)
        p.add_argument("--repetitions", type=int, default=10)

    p = sub.add_parser("train", help="cross-validate and train final models")
    p.add_argument("--contours", required=True, help="directory written by analyze")
    model_flags(p)
    common(p)

    p = sub.add_parser("eval", help="evaluate a checkpoint on a contour set")
    p.add_argument("--contours", required=True)
    p.add_argument("--checkpoint", required=True)
    common(p)

    p = sub.add_parser("stack", help="two-stage stacking over repetitions")
    p.add_argument("--contours", required=True)
    model_flags(p)
    common(p)

    p = sub.add_parser("explain", help="feature-group importance (and diffs)")
    p.add_argument("--contours", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--diffs", action="store_true",
                   help="also write per-feature class-difference scores")
    p.add_argument("--top-k", type=int, default=20)
    common(p)
    return parser


def apply_config_file(args: argparse.Namespace) -> None:
    if not getattr(args, "config", None):
        return
    with open(args.config, encoding="utf-8") as fh:
        overrides = json.load(fh)
    for key, value in overrides.items():
        dest = key.replace("-", "_")
        if not hasattr(args, dest):
            raise IngestError(f"config file sets unknown option {key!r}")
        setattr(args, dest, value)


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------

_WORKER: dict = {}


def _init_worker(manifest, registry_config):
    store = load_store(manifest)
    cfg = load_registry_config(registry_config)
    _WORKER["extractor"] = ContourExtractor(store, cfg)


def _extract_one(job):
    doc_id, text, sentences = job
    extractor = _WORKER["extractor"]
    if sentences is None:
        from .ingest import Document

        sentences = segment(Document(id=doc_id, text=text, labels={}))
    matrix = extractor.document_matrix(doc_id, sentences)
    return doc_id, matrix.values


def cmd_analyze(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    docs = load_dataset(args.dataset, args.schema, args.format)
    store = load_store(args.manifest)
    cfg = load_registry_config(args.registry_config)
    extractor = ContourExtractor(store, cfg)
    registry = extractor.registry

    annotated = {}
    if args.conllu:
        annotated = apply_conllu(docs, load_conllu(args.conllu))

    jobs = args.jobs if args.jobs else (os.cpu_count() or 1)
    payload = [(d.id, d.text, annotated.get(d.id)) for d in docs]
    matrices: list[ContourMatrix] = []
    if jobs > 1 and len(docs) > 1:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker,
                                 initargs=(args.manifest, args.registry_config)) as pool:
            for doc_id, values in pool.map(_extract_one, payload, chunksize=16):
                matrices.append(ContourMatrix(doc_id, values, registry))
    else:
        _init_worker(args.manifest, args.registry_config)
        for job in payload:
            doc_id, values = _extract_one(job)
            matrices.append(ContourMatrix(doc_id, values, registry))

    write_contours(matrices, os.path.join(args.out, "contours.jsonl"))
    registry.write_sidecar(os.path.join(args.out, "registry.json"))

    traits = list(BIG_FIVE_TRAITS if args.schema == "BigFive" else MBTI_TRAITS)
    labels_payload = {
        "schema": args.schema,
        "traits": traits,
        "seed": args.seed,
        "registry_hash": registry.content_hash(),
        "labels": {d.id: d.labels for d in docs},
    }
    with open(os.path.join(args.out, "labels.json"), "w", encoding="utf-8") as fh:
        json.dump(labels_payload, fh, indent=2, sort_keys=True)

    word_counts = []
    for d in docs:
        word_counts.append(sum(1 for tok in d.text.split() if any(c.isalnum() for c in tok)))
    summary = {
        "documents": len(docs),
        "mean_words_per_text": float(np.mean(word_counts)),
        "mean_sentences_per_text": float(np.mean([m.n_sentences for m in matrices])),
        "feature_dimension": registry.dimension,
        "groups": registry.group_report(),
        "seed": args.seed,
        "registry_hash": registry.content_hash(),
    }
    with open(os.path.join(args.out, "summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
    print(f"documents: {summary['documents']}")
    print(f"mean words per text: {summary['mean_words_per_text']:.1f}")
    print(f"mean sentences per text: {summary['mean_sentences_per_text']:.1f}")
    print(f"feature dimension: {registry.dimension}")
    return 0


# ---------------------------------------------------------------------------
# shared loading for train/eval/stack/explain
# ---------------------------------------------------------------------------

def registry_from_sidecar(path: str) -> FeatureRegistry:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    feats = tuple((f["name"], f["group"]) for f in payload["features"])
    return FeatureRegistry(features=feats, config=None)


def load_corpus(contours_dir: str, embeddings_path: str | None = None) -> tuple[TrainCorpus, FeatureRegistry, dict]:
    registry = registry_from_sidecar(os.path.join(contours_dir, "registry.json"))
    matrices = read_contours(os.path.join(contours_dir, "contours.jsonl"), registry)
    with open(os.path.join(contours_dir, "labels.json"), encoding="utf-8") as fh:
        labels_payload = json.load(fh)
    doc_ids = [m.doc_id for m in matrices]
    traits = labels_payload["traits"]
    by_doc = labels_payload["labels"]
    labels = {
        t: np.asarray([by_doc[d][t] for d in doc_ids], dtype=int) for t in traits
    }
    emb = None
    if embeddings_path:
        emb_file = load_embeddings(embeddings_path)
        emb = emb_file.matrix(doc_ids)
    corpus = TrainCorpus(doc_ids=doc_ids, matrices=matrices, labels=labels,
                         embeddings=emb)
    return corpus, registry, labels_payload


def model_config_from_args(args, registry: FeatureRegistry, embed_dim: int) -> ModelConfig:
    fusion = "concat-embedding" if embed_dim else "none"
    return ModelConfig(
        encoder_kind=args.encoder, layers=args.layers, hidden=args.hidden,
        dropout=args.dropout, classifier_layers=args.classifier_layers,
        classifier_hidden=args.classifier_hidden, fusion=fusion,
        max_sentences=args.max_sentences, seed=args.seed,
        feature_dim=registry.dimension, embed_dim=embed_dim,
        embed_adapter=bool(embed_dim and args.ft),
    )


def train_config_from_args(args) -> TrainConfig:
    return TrainConfig(learning_rate=args.lr, weight_decay=args.l2,
                       epochs=args.epochs, batch_size=args.batch_size,
                       folds=args.folds, repetitions=args.repetitions,
                       seed=args.seed)


def format_table(traits: list[str], means: dict[str, float]) -> str:
    header = "  ".join(f"{t:>6s}" for t in traits) + "  " + f"{'Avg':>6s}"
    avg = float(np.mean([means[t] for t in traits]))
    row = "  ".join(f"{100 * means[t]:6.2f}" for t in traits) + "  " + f"{100 * avg:6.2f}"
    return header + "\n" + row


def cmd_train(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    corpus, registry, _ = load_corpus(args.contours, args.embeddings)
    embed_dim = corpus.embeddings.shape[1] if corpus.embeddings is not None else 0
    mcfg = model_config_from_args(args, registry, embed_dim)
    tcfg = train_config_from_args(args)

    report = cross_validate(corpus, mcfg, tcfg)
    report_json = report.to_json()
    with open(os.path.join(args.out, "report.json"), "w", encoding="utf-8") as fh:
        fh.write(report_json)
    models, std = train_final(corpus, mcfg, tcfg)
    save_checkpoint(os.path.join(args.out, "checkpoint.json"), models, std,
                    registry.content_hash(), tcfg)
    meta = {
        "seed": args.seed,
        "registry_hash": registry.content_hash(),
        "config_hash": config_hash(mcfg, tcfg),
    }
    with open(os.path.join(args.out, "run.json"), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
    print(format_table(report.traits, {t: report.trait_mean(t) for t in report.traits}))
    return 0


def cmd_eval(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    corpus, registry, _ = load_corpus(args.contours)
    models, std, tcfg, _ = load_checkpoint(args.checkpoint, registry.content_hash())
    any_model = next(iter(models.values()))
    sequences = [
        _truncate(std.transform(m), any_model.config.max_sentences)
        for m in corpus.matrices
    ]
    means = {}
    for trait, model in models.items():
        means[trait] = accuracy(model, sequences, corpus.labels[trait])
    traits = [t for t in corpus.traits if t in means]
    payload = {
        "accuracy": {t: means[t] for t in traits},
        "mean": float(np.mean([means[t] for t in traits])),
        "seed": args.seed,
        "registry_hash": registry.content_hash(),
        "config_hash": config_hash(any_model.config, tcfg),
    }
    with open(os.path.join(args.out, "eval.json"), "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
    print(format_table(traits, means))
    return 0


def cmd_stack(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    corpus, registry, _ = load_corpus(args.contours, args.embeddings)
    embed_dim = corpus.embeddings.shape[1] if corpus.embeddings is not None else 0
    mcfg = model_config_from_args(args, registry, embed_dim)
    tcfg = train_config_from_args(args)

    def train_fn(train_idx, trait, rng):
        xs_tr, _, std = prepare_fold(corpus, train_idx,
                                     np.asarray([], dtype=int), mcfg.max_sentences)
        emb = corpus.embeddings[train_idx] if corpus.embeddings is not None else None
        model = fit_single(xs_tr, corpus.labels[trait][train_idx], mcfg, tcfg, rng, emb)
        return model, std

    def predict_fn(state, val_idx):
        model, std = state
        xs = [
            _truncate(std.transform(corpus.matrices[i]), mcfg.max_sentences)
            for i in val_idx
        ]
        emb = corpus.embeddings[val_idx] if corpus.embeddings is not None else None
        return model.predict_proba(xs, emb)[:, 0]

    stage_one = ensemble_mod.collect_stage_one(
        corpus.doc_ids, corpus.labels, train_fn, predict_fn,
        k=tcfg.folds, repetitions=tcfg.repetitions, seed=tcfg.seed)
    leaks = ensemble_mod.audit_out_of_fold(stage_one)
    if leaks:
        raise ensemble_mod.EnsembleError(f"{leaks} out-of-fold violations")
    ensemble_mod.write_stage_one(stage_one, os.path.join(args.out, "stage_one.csv"))

    means = {}
    for trait in corpus.traits:
        means[trait] = ensemble_mod.evaluate_meta(
            stage_one.probabilities[trait], stage_one.labels[trait],
            k=tcfg.folds, seed=tcfg.seed)
    payload = {
        "stacked_accuracy": means,
        "mean": float(np.mean(list(means.values()))),
        "repetitions": tcfg.repetitions,
        "seed": args.seed,
        "registry_hash": registry.content_hash(),
        "config_hash": config_hash(mcfg, tcfg),
    }
    with open(os.path.join(args.out, "stack_report.json"), "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
    print(format_table(corpus.traits, means))
    return 0


def cmd_explain(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    corpus, registry, _ = load_corpus(args.contours)
    models, std, ckpt_tcfg, _ = load_checkpoint(args.checkpoint, registry.content_hash())
    any_model = next(iter(models.values()))
    max_n = any_model.config.max_sentences
    standardized = [std.transform(m) for m in corpus.matrices]

    def make_predict(model):
        def predict(matrix: ContourMatrix) -> float:
            return float(model.predict_proba([_truncate(matrix, max_n)])[0, 0])
        return predict

    predict_fns = {trait: make_predict(m) for trait, m in models.items()}
    report = explain_mod.global_importance(predict_fns, standardized, registry)
    report.write_csv(os.path.join(args.out, "importance.csv"))
    report.write_plot_json(os.path.join(args.out, "importance.json"))
    with open(os.path.join(args.out, "run.json"), "w", encoding="utf-8") as fh:
        json.dump({
            "seed": args.seed,
            "registry_hash": registry.content_hash(),
            "config_hash": config_hash(any_model.config, ckpt_tcfg),
        }, fh, indent=2, sort_keys=True)
    for trait in report.scores:
        ranked = ", ".join(
            f"{g}={report.scores[trait][g]:.3f}" for g in report.ranking(trait)
        )
        print(f"{trait}: {ranked}")

    if args.diffs:
        diffs = {}
        for trait in corpus.traits:
            diffs[trait] = explain_mod.trait_feature_diffs(
                standardized, corpus.labels[trait], registry, top_k=args.top_k)
        with open(os.path.join(args.out, "diffs.json"), "w", encoding="utf-8") as fh:
            json.dump(diffs, fh, indent=2, sort_keys=True)
    return 0


COMMANDS = {
    "analyze": cmd_analyze,
    "train": cmd_train,
    "eval": cmd_eval,
    "stack": cmd_stack,
    "explain": cmd_explain,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        apply_config_file(args)
        return COMMANDS[args.command](args)
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
