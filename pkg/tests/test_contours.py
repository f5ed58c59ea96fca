import json

import numpy as np
import pytest

from textcontours.contours import (
    ContourError,
    ContourExtractor,
    ContourMatrix,
    Standardizer,
    apply_standardizer,
    build_contours,
    fit_standardizer,
    read_contours,
    sentence_features,
    write_contours,
)
from textcontours.errors import NumericError
from textcontours.ingest import Document, segment
from textcontours.registry import GROUPS, RegistryConfig, build_registry
from textcontours.synthetic import synthetic_corpus, synthetic_document


class TestRegistry:
    def test_group_layout_and_targets(self, registry):
        report = registry.group_report()
        assert set(report) == set(GROUPS)
        assert report["morphsyn"]["count"] == 19
        assert report["readability"]["count"] == 14
        assert report["morphsyn"]["target"] == 19
        assert report["lexical"]["target"] == 77
        assert report["sentiemo"]["target"] == 326
        assert registry.dimension == sum(r["count"] for r in report.values())

    def test_layout_stable_across_builds(self, store):
        a = build_registry(store, RegistryConfig())
        b = build_registry(store, RegistryConfig())
        assert a.names == b.names
        assert a.content_hash() == b.content_hash()

    def test_group_toggle(self, store):
        cfg = RegistryConfig(enabled_groups=("readability",))
        reg = build_registry(store, cfg)
        assert reg.dimension == 14
        assert all(g == "readability" for _, g in reg.features)


class TestBuildContours:
    def test_row_per_sentence(self, store, registry):
        doc = synthetic_document("d1", np.random.default_rng(0), n_words=400)
        sents = segment(doc)
        matrix = build_contours(doc, sents, store, registry)
        assert matrix.values.shape == (len(sents), registry.dimension)

    def test_single_sentence_document(self, store, registry):
        doc = Document(id="one", text="A single happy sentence today.")
        matrix = build_contours(doc, segment(doc), store, registry)
        assert matrix.values.shape == (1, registry.dimension)

    def test_per_document_purity(self, store, registry):
        docs = synthetic_corpus(4, seed=5, n_words=60)
        def matrices(order):
            out = {}
            for d in order:
                out[d.id] = build_contours(d, segment(d), store, registry).values
            return out
        forward = matrices(docs)
        backward = matrices(list(reversed(docs)))
        for doc_id in forward:
            np.testing.assert_array_equal(forward[doc_id], backward[doc_id])

    def test_functional_form_matches_incremental(self, store, registry):
        doc = synthetic_document("d", np.random.default_rng(2), n_words=80)
        sents = segment(doc)
        matrix = build_contours(doc, sents, store, registry)
        for i in (0, len(sents) // 2, len(sents) - 1):
            row = sentence_features(sents[i], sents[:i], store, registry)
            np.testing.assert_allclose(row, matrix.values[i], rtol=0, atol=0)

    def test_all_finite_on_fuzzed_tokens(self, store, registry):
        rng = np.random.default_rng(9)
        pieces = ["!!!", "a", "''", "12.5", "word", "---", "???", "x" * 40,
                  "don't", "very-long-hyphen-chain", "..."]
        extractor = ContourExtractor(store, registry=registry)
        for i in range(20):
            words = [pieces[j] for j in rng.integers(0, len(pieces), size=12)]
            text = " ".join(words) + "."
            doc = Document(id=f"f{i}", text=text)
            m = extractor.document_matrix(doc.id, segment(doc))
            assert np.all(np.isfinite(m.values))

    def test_non_finite_values_rejected(self, registry):
        values = np.zeros((2, registry.dimension))
        values[1, 3] = np.nan
        with pytest.raises(NumericError):
            ContourMatrix(doc_id="bad", values=values, registry=registry)


class TestStandardizer:
    def make(self, registry, rows):
        values = np.zeros((len(rows), registry.dimension))
        values[:, 0] = rows
        return ContourMatrix(doc_id="m", values=values, registry=registry)

    def test_fit_on_self_centers(self, store, registry):
        docs = synthetic_corpus(5, seed=1, n_words=60)
        mats = [build_contours(d, segment(d), store, registry) for d in docs]
        std = fit_standardizer(mats)
        pooled = np.concatenate([apply_standardizer(m, std).values for m in mats])
        nonconst = ~std.constant_mask
        assert np.all(np.abs(pooled.mean(axis=0)[nonconst]) < 1e-6)
        assert np.all(np.abs(pooled.std(axis=0)[nonconst] - 1.0) < 1e-6)

    def test_constant_feature_maps_to_zero(self, registry):
        m = self.make(registry, [2.0, 2.0, 2.0])
        std = fit_standardizer([m])
        out = apply_standardizer(m, std)
        np.testing.assert_array_equal(out.values[:, 0], 0.0)

    def test_two_value_population_z(self, registry):
        m = self.make(registry, [1.0, 3.0])
        std = fit_standardizer([m])
        out = apply_standardizer(m, std)
        np.testing.assert_allclose(out.values[:, 0], [-1.0, 1.0], atol=1e-12)

    def test_unfitted_apply_is_error(self, registry):
        m = self.make(registry, [1.0])
        with pytest.raises(ContourError, match="not been fitted"):
            Standardizer().transform(m)

    def test_empty_fit_set_is_error(self):
        with pytest.raises(ContourError):
            fit_standardizer([])


class TestPersistence:
    def test_jsonl_round_trip(self, tmp_path, store, registry):
        docs = synthetic_corpus(3, seed=2, n_words=50)
        mats = [build_contours(d, segment(d), store, registry) for d in docs]
        path = str(tmp_path / "contours.jsonl")
        write_contours(mats, path)
        loaded = read_contours(path, registry)
        assert [m.doc_id for m in loaded] == [m.doc_id for m in mats]
        for a, b in zip(mats, loaded):
            np.testing.assert_array_equal(a.values, b.values)

    def test_sidecar_contents(self, tmp_path, registry):
        path = str(tmp_path / "registry.json")
        registry.write_sidecar(path)
        payload = json.loads(open(path).read())
        assert payload["hash"] == registry.content_hash()
        assert len(payload["features"]) == registry.dimension

    def test_size_mismatch_rejected(self, tmp_path, registry):
        path = str(tmp_path / "bad.jsonl")
        with open(path, "w") as fh:
            fh.write(json.dumps({"doc_id": "x", "n_sentences": 2,
                                 "features": [0.0] * (registry.dimension + 1)}) + "\n")
        with pytest.raises(ContourError, match="do not fill"):
            read_contours(path, registry)
