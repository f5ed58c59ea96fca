"""Run a pretrained transformer over documents and export pooled vectors.

Output is the JSON-lines embedding format the contour pipeline loads: a
header ``{"dimension", "source", "layer", "pooling"}`` followed by one
``{"doc_id", "vector"}`` object per document. Layers are numbered 1-based
over transformer blocks (layer 12 is the final block of a 12-layer
model). Mean pooling averages the hidden states of the real word pieces
only, excluding the leading [CLS] and trailing [SEP]; first-token pooling
takes the [CLS] state.

Inputs longer than the token budget are truncated, never rejected; a
document that tokenizes to nothing is an error.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from dataclasses import dataclass

import numpy as np
import torch
from transformers import AutoModel, AutoTokenizer

POOLING_MODES = ("mean-over-real-tokens", "first-token")


class ExportError(ValueError):
    pass


@dataclass(frozen=True)
class ExportConfig:
    model: str = "bert-base-uncased"
    layer: int = 11
    pooling: str = "mean-over-real-tokens"
    max_tokens: int = 512
    batch_size: int = 8
    dataset: str = ""
    dataset_format: str = "essays-csv"  # essays-csv | mbti-csv
    output: str = ""

    def __post_init__(self):
        if self.pooling not in POOLING_MODES:
            raise ExportError(f"unknown pooling mode {self.pooling!r}")
        if self.layer < 1:
            raise ExportError("layer numbering starts at 1")
        if self.max_tokens < 3:
            raise ExportError("max_tokens must cover [CLS], one token, [SEP]")


def load_documents(path: str, fmt: str) -> list[tuple[str, str]]:
    """(doc_id, text) pairs following the pipeline's CSV conventions."""
    docs: list[tuple[str, str]] = []
    with open(path, newline="", encoding="utf-8", errors="replace") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ExportError(f"{path}: empty file")
        for row_num, row in enumerate(reader, start=2):
            if fmt == "essays-csv":
                doc_id = (row.get("#AUTHID") or row.get("AUTHID") or "").strip()
                if not doc_id:
                    raise ExportError(f"{path} row {row_num}: empty #AUTHID")
                text = row["TEXT"]
            elif fmt == "mbti-csv":
                doc_id = f"mbti-{row_num - 1}"
                text = row["posts"].replace("|||", "\n")
            else:
                raise ExportError(f"unknown dataset format {fmt!r}")
            docs.append((doc_id, text))
    if not docs:
        raise ExportError(f"{path}: no data rows")
    return docs


def _pool(hidden: torch.Tensor, n_tokens: int, pooling: str, doc_id: str) -> np.ndarray:
    """Pool one document's (seq_len, dim) hidden states.

    ``n_tokens`` counts the non-padding positions including the two
    special tokens.
    """
    if pooling == "first-token":
        return hidden[0].numpy()
    real = n_tokens - 2  # drop [CLS] and [SEP]
    if real < 1:
        raise ExportError(f"document {doc_id!r} is empty after tokenization")
    return (hidden[1: 1 + real].sum(dim=0) / real).numpy()


def export(cfg: ExportConfig) -> str:
    """Write the embedding file; returns the output path."""
    docs = load_documents(cfg.dataset, cfg.dataset_format)
    tokenizer = AutoTokenizer.from_pretrained(cfg.model)
    model = AutoModel.from_pretrained(cfg.model, output_hidden_states=True)
    model.eval()

    n_layers = model.config.num_hidden_layers
    if cfg.layer > n_layers:
        raise ExportError(f"layer {cfg.layer} exceeds model depth {n_layers}")
    dimension = model.config.hidden_size

    vectors: dict[str, np.ndarray] = {}
    with torch.no_grad():
        for lo in range(0, len(docs), cfg.batch_size):
            batch = docs[lo: lo + cfg.batch_size]
            encoded = tokenizer(
                [text for _, text in batch],
                truncation=True,
                max_length=cfg.max_tokens,
                padding=True,
                return_tensors="pt",
            )
            out = model(**encoded)
            # hidden_states[0] is the embedding layer; block l is index l
            layer_states = out.hidden_states[cfg.layer]
            lengths = encoded["attention_mask"].sum(dim=1)
            for j, (doc_id, _) in enumerate(batch):
                if doc_id in vectors:
                    raise ExportError(f"duplicate doc_id {doc_id!r}")
                vectors[doc_id] = _pool(
                    layer_states[j], int(lengths[j]), cfg.pooling, doc_id
                )

    out_dir = os.path.dirname(os.path.abspath(cfg.output)) or "."
    os.makedirs(out_dir, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=out_dir, suffix=".jsonl.tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(json.dumps({
                "dimension": dimension,
                "source": cfg.model,
                "layer": cfg.layer,
                "pooling": cfg.pooling,
            }) + "\n")
            for doc_id, vec in vectors.items():
                fh.write(json.dumps({
                    "doc_id": doc_id,
                    "vector": [float(x) for x in vec],
                }) + "\n")
        os.replace(tmp_path, cfg.output)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise
    return cfg.output
