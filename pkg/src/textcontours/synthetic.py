"""Synthetic corpora and miniature resources for tests and demos.

None of the real lexicons can ship with the package, so everything that
exercises the pipeline end to end runs on the miniature resource set
written by :func:`write_store_files`: three scored lexicons (with
wildcards), two norm tables, three word lists, and four n-gram frequency
tables. The shapes mirror the real resources; only the contents are toy.
"""

from __future__ import annotations

import os

import numpy as np

from .ingest import Document

_POSITIVE = ("happy", "joyful", "cheerful", "delighted", "glad", "content",
             "excited", "hopeful", "proud", "calm")
_NEGATIVE = ("sad", "angry", "afraid", "anxious", "gloomy", "miserable",
             "upset", "worried", "lonely", "tired")
_NEUTRAL = ("table", "window", "morning", "coffee", "letter", "garden",
            "street", "music", "paper", "river", "house", "friend", "school",
            "teacher", "student", "family", "weather", "journey", "story",
            "market", "silence", "evening", "road", "city", "village")
_VERBS = ("walked", "wrote", "opened", "closed", "watched", "remembered",
          "imagined", "finished", "started", "enjoyed", "visited", "carried")
_FUNCTION = ("the", "a", "my", "his", "her", "this", "that", "and", "but",
             "because", "while", "when", "of", "in", "on", "with", "to",
             "very", "quite", "really", "never", "always", "i", "we", "she",
             "he", "they", "it", "was", "is", "were", "had", "have")

VOCABULARY = _POSITIVE + _NEGATIVE + _NEUTRAL + _VERBS + _FUNCTION


def write_store_files(directory: str) -> str:
    """Write the miniature resource set; returns the manifest path."""
    os.makedirs(directory, exist_ok=True)

    def path(name):
        return os.path.join(directory, name)

    with open(path("mood.tsv"), "w", encoding="utf-8") as fh:
        fh.write("# toy valence/arousal lexicon\n")
        for i, w in enumerate(_POSITIVE):
            fh.write(f"{w}\tvalence\t{0.6 + 0.04 * i:.2f}\n")
            fh.write(f"{w}\tarousal\t{0.3 + 0.05 * i:.2f}\n")
        for i, w in enumerate(_NEGATIVE):
            fh.write(f"{w}\tvalence\t{-0.5 - 0.04 * i:.2f}\n")
            fh.write(f"{w}\tarousal\t{0.4 + 0.04 * i:.2f}\n")

    with open(path("feelings.tsv"), "w", encoding="utf-8") as fh:
        fh.write("joy*\tjoy\t1.0\n")
        fh.write("delight*\tjoy\t0.9\n")
        fh.write("cheer*\tjoy\t0.8\n")
        fh.write("glad\tjoy\t0.7\n")
        fh.write("sad\tsadness\t1.0\n")
        fh.write("gloomy\tsadness\t0.8\n")
        fh.write("miserable\tsadness\t0.9\n")
        fh.write("lonely\tsadness\t0.6\n")
        fh.write("angry\tanger\t1.0\n")
        fh.write("upset\tanger\t0.5\n")
        fh.write("afraid\tfear\t0.9\n")
        fh.write("anxious\tfear\t0.8\n")
        fh.write("worried\tfear\t0.6\n")

    with open(path("polarity.tsv"), "w", encoding="utf-8") as fh:
        for w in _POSITIVE:
            fh.write(f"{w}\tpositive\t1.0\n")
        for w in _NEGATIVE:
            fh.write(f"{w}\tnegative\t1.0\n")

    with open(path("aoa.tsv"), "w", encoding="utf-8") as fh:
        rng = np.random.default_rng(11)
        for w in sorted(set(VOCABULARY)):
            fh.write(f"{w}\t{rng.uniform(2.0, 12.0):.2f}\n")

    with open(path("prevalence.tsv"), "w", encoding="utf-8") as fh:
        rng = np.random.default_rng(12)
        for w in sorted(set(VOCABULARY)):
            fh.write(f"{w}\t{rng.uniform(0.5, 1.0):.3f}\n")

    with open(path("common.txt"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(sorted(set(_FUNCTION + _NEUTRAL[:10]))) + "\n")

    easy = sorted(set(_FUNCTION + _NEUTRAL + ("happy", "sad", "glad")))
    with open(path("dale_chall.txt"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(easy) + "\n")
    with open(path("spache.txt"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(easy[: len(easy) // 2]) + "\n")

    rng = np.random.default_rng(13)
    vocab = sorted(set(VOCABULARY))
    for register in ("spoken", "fiction"):
        for n in (1, 2):
            fname = f"toy_{register}.{n}.tsv"
            grams = set()
            while len(grams) < 60:
                grams.add(" ".join(rng.choice(vocab, size=n)))
            with open(path(fname), "w", encoding="utf-8") as fh:
                for rank, gram in enumerate(sorted(grams), start=1):
                    fh.write(f"{gram}\t{rank}\t{rng.uniform(1.0, 6.0):.3f}\n")

    manifest = path("manifest.tsv")
    with open(manifest, "w", encoding="utf-8") as fh:
        fh.write("lexicon\tmood\tmood.tsv\n")
        fh.write("lexicon\tfeelings\tfeelings.tsv\n")
        fh.write("lexicon\tpolarity\tpolarity.tsv\n")
        fh.write("norm\taoa\taoa.tsv\n")
        fh.write("norm\tprevalence\tprevalence.tsv\n")
        fh.write("wordlist\tcommon\tcommon.txt\n")
        fh.write("wordlist\tdale_chall\tdale_chall.txt\n")
        fh.write("wordlist\tspache\tspache.txt\n")
        fh.write("freq\tspoken1\ttoy_spoken.1.tsv\n")
        fh.write("freq\tspoken2\ttoy_spoken.2.tsv\n")
        fh.write("freq\tfiction1\ttoy_fiction.1.tsv\n")
        fh.write("freq\tfiction2\ttoy_fiction.2.tsv\n")
    return manifest


def synthetic_document(doc_id: str, rng: np.random.Generator,
                       n_words: int = 120, labels: dict | None = None) -> Document:
    """A document of plausible sentences drawn from the toy vocabulary."""
    words_left = n_words
    sentences = []
    while words_left > 0:
        n = int(rng.integers(5, 16))
        n = min(n, max(words_left, 3))
        ws = list(rng.choice(VOCABULARY, size=n))
        ws[0] = ws[0].capitalize()
        sentences.append(" ".join(ws) + rng.choice([".", ".", ".", "!", "?"]))
        words_left -= n
    return Document(id=doc_id, text=" ".join(sentences), labels=labels or {})


def synthetic_corpus(n_docs: int, seed: int = 0, n_words: int = 120,
                     traits: tuple[str, ...] = ("O",)) -> list[Document]:
    rng = np.random.default_rng(seed)
    docs = []
    for i in range(n_docs):
        labels = {t: int(rng.integers(0, 2)) for t in traits}
        docs.append(synthetic_document(f"doc-{i:05d}", rng, n_words, labels))
    return docs


def write_essays_csv(path: str, docs: list[Document]) -> None:
    """Documents with Big Five labels in the essays CSV schema."""
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["#AUTHID", "TEXT", "cEXT", "cNEU", "cAGR", "cCON", "cOPN"])
        for d in docs:
            writer.writerow([
                d.id, d.text,
                "y" if d.labels.get("E") else "n",
                "y" if d.labels.get("N") else "n",
                "y" if d.labels.get("A") else "n",
                "y" if d.labels.get("C") else "n",
                "y" if d.labels.get("O") else "n",
            ])
