"""Per-sentence feature vectors and per-document contour matrices.

A contour matrix holds one row per sentence; row i is computed from
sentence i plus the cumulative window of all preceding sentences of the
same document (diversity state, readability counts, and compression
streams all accumulate). Raw matrices are z-standardized by a
:class:`Standardizer` fitted on a declared document set, normally the
training folds only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import lexical, morphsyn, readability, sentiemo
from .errors import NumericError
from .ingest import Document, Sentence, has_parse
from .registry import (
    FeatureRegistry,
    RegistryConfig,
    build_registry,
    lexicon_names,
    norm_names,
    sophistication_lists,
)
from .resources import ResourceStore


class ContourError(ValueError):
    pass


@dataclass(frozen=True)
class ContourMatrix:
    doc_id: str
    values: np.ndarray  # (n_sentences, D) float64
    registry: FeatureRegistry

    def __post_init__(self):
        v = self.values
        if v.ndim != 2 or v.shape[0] < 1:
            raise ContourError(f"{self.doc_id}: contour matrix must be 2-D with >= 1 row")
        if v.shape[1] != self.registry.dimension:
            raise ContourError(
                f"{self.doc_id}: {v.shape[1]} columns != registry dimension {self.registry.dimension}"
            )
        if not np.all(np.isfinite(v)):
            raise NumericError(f"{self.doc_id}: non-finite feature values")

    @property
    def n_sentences(self) -> int:
        return int(self.values.shape[0])


class ContourExtractor:
    """Stateless across documents; per-document window state is internal."""

    def __init__(self, store: ResourceStore, config: RegistryConfig | None = None,
                 registry: FeatureRegistry | None = None):
        self.store = store
        self.config = config or (registry.config if registry else RegistryConfig())
        self.registry = registry or build_registry(store, self.config)
        cfg = self.config
        self._soph_lists, self._norm_tables = lexical.lexical_tables(
            store, sophistication_lists(store, cfg), norm_names(store, cfg)
        )
        wanted = set(lexicon_names(store, cfg))
        self._lexicons = [lx for lx in store.lexicons if lx.name in wanted]
        self._freq_tables = list(store.freq_tables)
        self._groups_on = set(cfg.enabled_groups)
        self._familiar_dc = (
            store.wordlists.get(cfg.dale_chall_list) if cfg.dale_chall_list else None
        )
        self._familiar_spache = (
            store.wordlists.get(cfg.spache_list) if cfg.spache_list else None
        )

    # -- per-document state ------------------------------------------------

    def _new_state(self, parsed: bool) -> dict:
        return {
            "parsed": parsed,
            "window": readability.WindowStats(
                familiar_dc=self._familiar_dc, familiar_spache=self._familiar_spache
            ),
            "chars": morphsyn.StreamWindow(),
            "pos": morphsyn.StreamWindow(),
            "morph": morphsyn.StreamWindow(),
            "diversity": lexical.DiversityState(self.config.mattr_window),
        }

    def _advance(self, state: dict, sent: Sentence) -> list[str]:
        """Fold a sentence into the window state; returns lowered words."""
        words_lower = [w.lower() for w in lexical.word_tokens(sent)]
        state["window"].add_sentence([t.surface for t in sent.tokens])
        state["chars"].append(" ".join(t.surface for t in sent.tokens))
        state["pos"].append(" ".join(t.pos for t in sent.tokens))
        state["morph"].append(" ".join(t.morph for t in sent.tokens if t.morph))
        for w in words_lower:
            state["diversity"].push(w)
        return words_lower

    def _row(self, state: dict, sent: Sentence) -> list[float]:
        words_lower = self._advance(state, sent)
        row: list[float] = []
        if "morphsyn" in self._groups_on:
            counts = morphsyn.unit_counts(sent, state["parsed"])
            ratios = (state["chars"].ratio(), state["pos"].ratio(), state["morph"].ratio())
            row += morphsyn.morphsyn_vector(counts, ratios)
        if "lexical" in self._groups_on:
            row += lexical.static_lexical_vector(sent, state["diversity"])
            row += lexical.sophistication_vector(words_lower, self._soph_lists)
            row += lexical.norm_vector(words_lower, self._norm_tables)
            row += lexical.ngram_vector(words_lower, self._freq_tables)
        if "readability" in self._groups_on:
            row += readability.all_scores(state["window"])
        if "sentiemo" in self._groups_on:
            row += sentiemo.sentiemo_vector(words_lower, self._lexicons)
        return row

    # -- public API ----------------------------------------------------------

    def sentence_features(self, sent: Sentence, context: list[Sentence]) -> np.ndarray:
        """Feature vector of ``sent`` given its preceding sentences."""
        state = self._new_state(parsed=has_parse(list(context) + [sent]))
        for prev in context:
            self._advance(state, prev)
        return np.asarray(self._row(state, sent), dtype=np.float64)

    def document_matrix(self, doc_id: str, sentences: list[Sentence]) -> ContourMatrix:
        if not sentences:
            raise ContourError(f"{doc_id}: no sentences")
        state = self._new_state(parsed=has_parse(sentences))
        rows = [self._row(state, s) for s in sentences]
        return ContourMatrix(
            doc_id=doc_id, values=np.asarray(rows, dtype=np.float64), registry=self.registry
        )


def sentence_features(
    sent: Sentence,
    context: list[Sentence],
    store: ResourceStore,
    registry: FeatureRegistry,
) -> np.ndarray:
    return ContourExtractor(store, registry=registry).sentence_features(sent, context)


def build_contours(
    doc: Document,
    sentences: list[Sentence],
    store: ResourceStore,
    registry: FeatureRegistry,
) -> ContourMatrix:
    return ContourExtractor(store, registry=registry).document_matrix(doc.id, sentences)


# ---------------------------------------------------------------------------
# standardization
# ---------------------------------------------------------------------------

class Standardizer:
    """Per-feature z-standardization fitted on pooled sentences.

    Population statistics (ddof=0); features constant over the fit set map
    to 0 everywhere.
    """

    def __init__(self):
        self.mean: np.ndarray | None = None
        self.std: np.ndarray | None = None

    @property
    def fitted(self) -> bool:
        return self.mean is not None

    @property
    def constant_mask(self) -> np.ndarray:
        self._require_fitted()
        return self.std == 0.0

    def _require_fitted(self):
        if not self.fitted:
            raise ContourError("standardizer has not been fitted")

    def fit(self, matrices: list[ContourMatrix]) -> "Standardizer":
        if not matrices:
            raise ContourError("cannot fit a standardizer on an empty set")
        pooled = np.concatenate([m.values for m in matrices], axis=0)
        self.mean = pooled.mean(axis=0)
        self.std = pooled.std(axis=0)
        return self

    def transform(self, matrix: ContourMatrix) -> ContourMatrix:
        self._require_fitted()
        safe = np.where(self.std > 0.0, self.std, 1.0)
        z = (matrix.values - self.mean) / safe
        z[:, self.std == 0.0] = 0.0
        return ContourMatrix(doc_id=matrix.doc_id, values=z, registry=matrix.registry)

    def to_json(self) -> dict:
        self._require_fitted()
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_json(cls, payload: dict) -> "Standardizer":
        out = cls()
        out.mean = np.asarray(payload["mean"], dtype=np.float64)
        out.std = np.asarray(payload["std"], dtype=np.float64)
        return out


def fit_standardizer(matrices: list[ContourMatrix]) -> Standardizer:
    return Standardizer().fit(matrices)


def apply_standardizer(matrix: ContourMatrix, std: Standardizer) -> ContourMatrix:
    return std.transform(matrix)


# ---------------------------------------------------------------------------
# JSON-lines persistence
# ---------------------------------------------------------------------------

def write_contours(matrices: list[ContourMatrix], path: str) -> None:
    """One JSON object per document: doc_id, n_sentences, row-major values."""
    with open(path, "w", encoding="utf-8") as fh:
        for m in matrices:
            fh.write(json.dumps({
                "doc_id": m.doc_id,
                "n_sentences": m.n_sentences,
                "features": [float(x) for x in m.values.reshape(-1)],
            }))
            fh.write("\n")


def read_contours(path: str, registry: FeatureRegistry) -> list[ContourMatrix]:
    out = []
    d = registry.dimension
    with open(path, encoding="utf-8") as fh:
        for line_num, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            row = json.loads(line)
            flat = np.asarray(row["features"], dtype=np.float64)
            n = int(row["n_sentences"])
            if flat.size != n * d:
                raise ContourError(
                    f"{path}:{line_num}: {flat.size} values do not fill {n}x{d}"
                )
            out.append(ContourMatrix(row["doc_id"], flat.reshape(n, d), registry))
    return out
