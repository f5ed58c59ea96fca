"""Precomputed document embeddings and late fusion with contour encodings.

The embedding file is JSON-lines: a header object
``{"dimension": d, "source": ..., "layer": l, "pooling": ...}`` followed
by one ``{"doc_id": ..., "vector": [...]}`` object per document. The same
format is what the offline exporter writes, so the two sides share a
bit-exact contract. Vectors are frozen inputs: in feature-based mode no
gradient ever reaches them, and fine-tuning-style training only learns an
affine adapter on top of them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


class EmbeddingError(ValueError):
    pass


@dataclass(frozen=True)
class EmbeddingFile:
    dimension: int
    source: str
    layer: int
    pooling: str
    entries: dict[str, np.ndarray] = field(default_factory=dict)

    def vector(self, doc_id: str) -> np.ndarray:
        try:
            return self.entries[doc_id]
        except KeyError:
            raise EmbeddingError(f"no embedding for document {doc_id!r}") from None

    def matrix(self, doc_ids: list[str]) -> np.ndarray:
        """(n_docs, dimension) array in the given order; all ids required."""
        return np.stack([self.vector(d) for d in doc_ids], axis=0)


def load_embeddings(path: str) -> EmbeddingFile:
    with open(path, encoding="utf-8") as fh:
        header_line = fh.readline()
        if not header_line.strip():
            raise EmbeddingError(f"{path}: missing header line")
        header = json.loads(header_line)
        for key in ("dimension", "source", "layer", "pooling"):
            if key not in header:
                raise EmbeddingError(f"{path}: header lacks {key!r}")
        dim = int(header["dimension"])
        entries: dict[str, np.ndarray] = {}
        for line_num, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            row = json.loads(line)
            doc_id = row["doc_id"]
            vec = np.asarray(row["vector"], dtype=np.float64)
            if vec.shape != (dim,):
                raise EmbeddingError(
                    f"{path}:{line_num}: document {doc_id!r} has {vec.shape[0] if vec.ndim == 1 else 'malformed'}"
                    f" values, expected {dim}"
                )
            if not np.all(np.isfinite(vec)):
                raise EmbeddingError(f"{path}:{line_num}: non-finite vector for {doc_id!r}")
            if doc_id in entries:
                raise EmbeddingError(f"{path}:{line_num}: duplicate doc_id {doc_id!r}")
            entries[doc_id] = vec
    return EmbeddingFile(dimension=dim, source=str(header["source"]),
                         layer=int(header["layer"]), pooling=str(header["pooling"]),
                         entries=entries)


def write_embeddings(path: str, dimension: int, source: str, layer: int,
                     pooling: str, vectors: dict[str, np.ndarray]) -> None:
    """Inverse of :func:`load_embeddings`; used by tests and converters."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"dimension": dimension, "source": source,
                             "layer": layer, "pooling": pooling}) + "\n")
        for doc_id, vec in vectors.items():
            fh.write(json.dumps({"doc_id": doc_id,
                                 "vector": [float(x) for x in vec]}) + "\n")


def fuse(p_psyling: np.ndarray, doc_id: str, emb: EmbeddingFile) -> np.ndarray:
    """[contour encoding | embedding], contour block first."""
    vec = emb.vector(doc_id)
    return np.concatenate([np.asarray(p_psyling, dtype=np.float64), vec])
