import math

import numpy as np
import pytest

from textcontours.contours import ContourMatrix
from textcontours.explain import (
    ExplainError,
    enumerate_masks,
    explain_instance,
    global_importance,
    kernel_weight,
    perturb,
    trait_feature_diffs,
)
from textcontours.registry import GROUPS, FeatureRegistry


@pytest.fixture(scope="module")
def grouped_registry():
    feats = []
    for g, count in zip(GROUPS, (3, 4, 2, 5)):
        feats += [(f"{g}_{i}", g) for i in range(count)]
    return FeatureRegistry(features=tuple(feats))


def matrix_for(registry, rng, n=3):
    return ContourMatrix(doc_id="m", values=rng.normal(size=(n, registry.dimension)),
                         registry=registry)


class TestKernel:
    def test_distance_zero_is_one(self):
        assert kernel_weight(np.ones(4)) == 1.0

    def test_hand_value_d4_h1(self):
        w = kernel_weight(np.array([1, 1, 1, 0]))
        assert abs(w - math.exp(-1.0 / 2.25)) < 1e-15
        assert abs(w - 0.6412) < 1e-4

    def test_strictly_decreasing_in_distance(self):
        weights = [kernel_weight(np.array([1] * (4 - h) + [0] * h)) for h in range(5)]
        assert all(a > b for a, b in zip(weights, weights[1:]))


class TestPerturb:
    def test_all_ones_is_identity(self, grouped_registry):
        m = matrix_for(grouped_registry, np.random.default_rng(0))
        out = perturb(m, np.ones(4), grouped_registry)
        np.testing.assert_array_equal(out.values, m.values)

    def test_all_zeros_blanks_matrix(self, grouped_registry):
        m = matrix_for(grouped_registry, np.random.default_rng(1))
        out = perturb(m, np.zeros(4), grouped_registry)
        np.testing.assert_array_equal(out.values, 0.0)

    def test_zeroed_column_count_matches_registry(self, grouped_registry):
        m = matrix_for(grouped_registry, np.random.default_rng(2))
        mask = np.array([1, 0, 1, 1])  # lexical off
        out = perturb(m, mask, grouped_registry)
        zeroed = np.flatnonzero(np.all(out.values == 0.0, axis=0))
        lexical_cols = grouped_registry.group_columns("lexical")
        assert sorted(zeroed.tolist()) == lexical_cols
        kept = [c for c in range(grouped_registry.dimension) if c not in lexical_cols]
        np.testing.assert_array_equal(out.values[:, kept], m.values[:, kept])

    def test_idempotent(self, grouped_registry):
        m = matrix_for(grouped_registry, np.random.default_rng(3))
        mask = np.array([0, 1, 0, 1])
        once = perturb(m, mask, grouped_registry)
        twice = perturb(once, mask, grouped_registry)
        np.testing.assert_array_equal(once.values, twice.values)


def planted_predictor(registry, weights):
    cols = {g: registry.group_columns(g) for g in GROUPS}

    def predict(matrix):
        z = 0.0
        for g, w in weights.items():
            z += w * matrix.values[:, cols[g]].mean()
        return 1.0 / (1.0 + math.exp(-z))

    return predict


class TestExplainInstance:
    def test_constant_model_gives_zero_coefficients(self, grouped_registry):
        m = matrix_for(grouped_registry, np.random.default_rng(4))
        coefs = explain_instance(lambda _: 0.7, m, grouped_registry)
        assert np.all(np.abs(coefs) < 1e-8)

    def test_planted_single_group_dominates(self, grouped_registry):
        rng = np.random.default_rng(5)
        m = matrix_for(grouped_registry, rng)
        predict = planted_predictor(grouped_registry,
                                    {"morphsyn": 4.0, "lexical": 0.0,
                                     "readability": 0.0, "sentiemo": 0.0})
        coefs = explain_instance(predict, m, grouped_registry)
        assert abs(coefs[0]) > 5 * max(abs(c) for c in coefs[1:])

    def test_deterministic_to_1e10(self, grouped_registry):
        rng = np.random.default_rng(6)
        m = matrix_for(grouped_registry, rng)
        predict = planted_predictor(grouped_registry,
                                    {g: w for g, w in zip(GROUPS, (1, 2, 3, 4))})
        a = explain_instance(predict, m, grouped_registry)
        b = explain_instance(predict, m, grouped_registry)
        np.testing.assert_allclose(a, b, atol=1e-10, rtol=0)

    def test_duplicate_masks_do_not_change_fit(self, grouped_registry):
        # weighted least squares absorbs multiplicity: fitting on the 16
        # unique masks equals fitting on a sample with duplicates
        rng = np.random.default_rng(7)
        m = matrix_for(grouped_registry, rng)
        predict = planted_predictor(grouped_registry,
                                    {g: w for g, w in zip(GROUPS, (2, -1, 0.5, 1))})
        base = explain_instance(predict, m, grouped_registry)

        masks = enumerate_masks(4)
        doubled = np.vstack([masks, masks])
        targets = np.array([predict(perturb(m, z, grouped_registry)) for z in doubled])
        weights = np.array([kernel_weight(z) for z in doubled])
        design = np.hstack([np.ones((len(doubled), 1)), doubled])
        wsqrt = np.sqrt(weights)[:, None]
        lhs = design * wsqrt
        beta = np.linalg.solve(lhs.T @ lhs, lhs.T @ (targets * wsqrt[:, 0]))
        np.testing.assert_allclose(base, beta[1:], atol=1e-10)


class TestGlobalImportance:
    def test_single_document_hand_value(self, grouped_registry):
        # coefficients (4, 1, 0, 0) -> I = (2, 1, 0, 0)
        m = matrix_for(grouped_registry, np.random.default_rng(8))

        calls = {"n": 0}

        def fake_instance(predict_fn, matrix, registry, groups=GROUPS):
            return np.array([4.0, 1.0, 0.0, 0.0])

        import textcontours.explain as ex
        original = ex.explain_instance
        ex.explain_instance = fake_instance
        try:
            report = global_importance({"T": lambda m_: 0.5}, [m], grouped_registry)
        finally:
            ex.explain_instance = original
        scores = report.scores["T"]
        assert scores[GROUPS[0]] == pytest.approx(2.0)
        assert scores[GROUPS[1]] == pytest.approx(1.0)
        assert scores[GROUPS[2]] == 0.0
        assert report.ranking("T")[:2] == [GROUPS[0], GROUPS[1]]

    def test_document_order_invariance(self, grouped_registry):
        rng = np.random.default_rng(9)
        mats = [matrix_for(grouped_registry, rng) for _ in range(5)]
        predict = planted_predictor(grouped_registry,
                                    {g: w for g, w in zip(GROUPS, (3, 2, 1, 0.5))})
        a = global_importance({"T": predict}, mats, grouped_registry)
        b = global_importance({"T": predict}, list(reversed(mats)), grouped_registry)
        for g in GROUPS:
            assert a.scores["T"][g] == pytest.approx(b.scores["T"][g], abs=1e-12)

    def test_planted_ordering_recovered(self, grouped_registry):
        weights = {"sentiemo": 4.0, "lexical": 2.0, "morphsyn": 1.0,
                   "readability": 0.5}
        predict = planted_predictor(grouped_registry, weights)
        hits = 0
        for seed in range(10):
            rng = np.random.default_rng(seed)
            mats = [matrix_for(grouped_registry, rng) for _ in range(12)]
            report = global_importance({"T": predict}, mats, grouped_registry)
            if report.ranking("T") == ["sentiemo", "lexical", "morphsyn", "readability"]:
                hits += 1
        assert hits >= 9


class TestTraitDiffs:
    def test_identical_feature_diff_zero(self, grouped_registry):
        rng = np.random.default_rng(10)
        shared = rng.normal(size=(2, grouped_registry.dimension))
        mats = [ContourMatrix(doc_id=f"d{i}", values=shared.copy(),
                              registry=grouped_registry) for i in range(4)]
        diffs = trait_feature_diffs(mats, np.array([0, 0, 1, 1]), grouped_registry)
        for group_entries in diffs.values():
            for entry in group_entries:
                assert entry["difference"] == pytest.approx(0.0, abs=1e-12)

    def test_planted_shift_recovered(self, grouped_registry):
        # one sentence per document so the per-document score has unit
        # variance; the 2/sqrt(n) band is one sigma, hence the fixed seed
        rng = np.random.default_rng(5)
        n = 400
        labels = np.array([0, 1] * (n // 2))
        mats = []
        for i in range(n):
            v = rng.normal(size=(1, grouped_registry.dimension))
            if labels[i] == 1:
                v[:, 0] += 1.0
            mats.append(ContourMatrix(doc_id=f"d{i}", values=v,
                                      registry=grouped_registry))
        diffs = trait_feature_diffs(mats, labels, grouped_registry)
        first_group = diffs[grouped_registry.features[0][1]]
        top = first_group[0]
        assert top["feature"] == grouped_registry.names[0]
        assert abs(top["difference"] - 1.0) < 2.0 / math.sqrt(n)

    def test_sorted_descending_and_top_k(self, grouped_registry):
        rng = np.random.default_rng(12)
        mats = [ContourMatrix(doc_id=f"d{i}",
                              values=rng.normal(size=(2, grouped_registry.dimension)),
                              registry=grouped_registry) for i in range(10)]
        diffs = trait_feature_diffs(mats, np.array([0, 1] * 5), grouped_registry,
                                    top_k=2)
        for group, entries in diffs.items():
            assert len(entries) <= 2
            mags = [abs(e["difference"]) for e in entries]
            assert mags == sorted(mags, reverse=True)

    def test_single_class_rejected(self, grouped_registry):
        m = matrix_for(grouped_registry, np.random.default_rng(13))
        with pytest.raises(ExplainError):
            trait_feature_diffs([m], np.array([1]), grouped_registry)
