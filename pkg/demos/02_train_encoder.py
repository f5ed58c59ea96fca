"""Train the attention encoder on a corpus with a planted trait signal.

Positive documents get extra positive-affect vocabulary, so the trait is
recoverable from the sentiment features. Runs a small cross-validation
and prints the per-fold accuracy table plus the attention profile of one
document.
"""

import tempfile

import numpy as np

from textcontours import build_registry, build_contours, load_store, segment
from textcontours.neural import (
    ModelConfig,
    TrainConfig,
    TrainCorpus,
    cross_validate,
    train_final,
)
from textcontours.synthetic import synthetic_document, write_store_files

rng = np.random.default_rng(0)

with tempfile.TemporaryDirectory() as tmp:
    store = load_store(write_store_files(tmp))
    registry = build_registry(store)

    docs, mats, ys = [], [], []
    happy = ["happy", "joyful", "cheerful", "delighted", "hopeful", "proud"]
    for i in range(60):
        label = int(rng.integers(0, 2))
        doc = synthetic_document(f"doc-{i}", rng, n_words=70,
                                 labels={"E": label})
        if label:
            extra = " ".join(rng.choice(happy, size=12)) + "."
            doc = type(doc)(id=doc.id, text=doc.text + " " + extra.capitalize(),
                            labels=doc.labels)
        docs.append(doc)
        mats.append(build_contours(doc, segment(doc), store, registry))
        ys.append(label)

    corpus = TrainCorpus(doc_ids=[d.id for d in docs], matrices=mats,
                         labels={"E": np.asarray(ys)})
    mcfg = ModelConfig(encoder_kind="ATTN", layers=1, hidden=8, dropout=0.1,
                       classifier_layers=1, classifier_hidden=16,
                       max_sentences=16, feature_dim=registry.dimension)
    tcfg = TrainConfig(learning_rate=2e-3, epochs=15, batch_size=16,
                       folds=3, repetitions=1, seed=0)

    print("cross-validating the planted extraversion signal...")
    rep = cross_validate(corpus, mcfg, tcfg)
    for trait in rep.traits:
        accs = ", ".join(f"{100 * a:.0f}%" for a in rep.accuracy[trait][0])
        print(f"  trait {trait}: folds [{accs}]  mean {100 * rep.trait_mean(trait):.1f}%")

    models, std = train_final(corpus, mcfg, tcfg)
    z = std.transform(mats[0]).values[: mcfg.max_sentences]
    alpha = models["E"].attention_weights(z)
    per_sentence = alpha.mean(axis=1)
    print("\nmean attention weight per sentence of the first document:")
    print("  " + " ".join(f"{w:.3f}" for w in per_sentence))
    print("(columns of the attention matrix sum to 1: each feature dimension "
          "distributes its weight over sentences)")
