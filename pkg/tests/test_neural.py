import json
import math

import numpy as np
import pytest

from textcontours.errors import NumericError
from textcontours.neural import (
    AdamW,
    Model,
    ModelConfig,
    NeuralError,
    Parameter,
    TrainConfig,
    TrainCorpus,
    accuracy,
    cross_validate,
    fit_single,
    load_checkpoint,
    loss_bce,
    rng_for,
    save_checkpoint,
    stratified_kfold,
)
from textcontours.contours import ContourMatrix
from textcontours.registry import FeatureRegistry


def tiny_config(**overrides):
    base = dict(encoder_kind="ATTN", layers=1, hidden=6, dropout=0.0,
                classifier_layers=1, classifier_hidden=8, feature_dim=4,
                max_sentences=10, seed=0)
    base.update(overrides)
    return ModelConfig(**base)


class TestBlstmEncoder:
    def test_single_step_sequence(self):
        model = Model.build(tiny_config(encoder_kind="BLSTM"))
        p = model.encode(np.ones((1, 4)))
        assert p.data.shape == (1, 12)
        assert np.all(np.isfinite(p.data))

    def test_zero_input_zero_params_gives_zero(self):
        model = Model.build(tiny_config(encoder_kind="BLSTM"))
        for name, p in model.params.items():
            if name.startswith("lstm."):
                p.data[:] = 0.0
        p = model.encode(np.zeros((5, 4)))
        np.testing.assert_array_equal(p.data, 0.0)

    def test_direction_symmetry_under_param_swap(self):
        model = Model.build(tiny_config(encoder_kind="BLSTM"), np.random.default_rng(1))
        x = np.random.default_rng(2).normal(size=(7, 4))
        p = model.encode(x).data[0]
        h = model.config.hidden
        for suffix in ("W_ih", "W_hh", "b"):
            a, b = f"lstm.l0.fwd.{suffix}", f"lstm.l0.bwd.{suffix}"
            model.params[a].data, model.params[b].data = (
                model.params[b].data, model.params[a].data)
        p_rev = model.encode(x[::-1]).data[0]
        np.testing.assert_allclose(p_rev[:h], p[h:], atol=1e-12)
        np.testing.assert_allclose(p_rev[h:], p[:h], atol=1e-12)

    def test_empty_sequence_rejected(self):
        model = Model.build(tiny_config(encoder_kind="BLSTM"))
        with pytest.raises(NeuralError):
            model.encode(np.zeros((0, 4)))

    def test_padding_never_changes_output(self):
        model = Model.build(tiny_config(encoder_kind="BLSTM"), np.random.default_rng(3))
        x = np.random.default_rng(4).normal(size=(5, 4))
        plain = model.encode(x).data
        padded = np.vstack([x, np.zeros((3, 4))])
        masked = model.encode(padded, length=5).data
        np.testing.assert_array_equal(plain, masked)


class TestAttentionEncoder:
    def test_single_sentence_v_equals_input(self):
        model = Model.build(tiny_config(), np.random.default_rng(5))
        x = np.random.default_rng(6).normal(size=(1, 4))
        alpha = model.attention_weights(x)
        np.testing.assert_allclose(alpha, 1.0, atol=1e-12)
        # with alpha all ones, V = x_1, so P = tanh(W_pool x_1 + b_pool)
        w = model.params["attn.W_pool"].data
        b = model.params["attn.b_pool"].data
        expected = np.tanh(x @ w + b)
        np.testing.assert_allclose(model.encode(x).data, expected, atol=1e-12)

    def test_uniform_scores_give_uniform_weights(self):
        model = Model.build(tiny_config(), np.random.default_rng(7))
        # zero attention parameters make every score equal
        model.params["attn.W_att"].data[:] = 0.0
        model.params["attn.b_att"].data[:] = 0.0
        alpha = model.attention_weights(np.random.default_rng(8).normal(size=(5, 4)))
        np.testing.assert_allclose(alpha, 1.0 / 5.0, atol=1e-12)

    def test_weighted_sum_matches_scalar_loop(self):
        model = Model.build(tiny_config(feature_dim=4), np.random.default_rng(9))
        x = np.random.default_rng(10).normal(size=(3, 4))
        alpha = model.attention_weights(x)
        v = np.zeros(4)
        for j in range(4):
            for i in range(3):
                v[j] += alpha[i, j] * x[i, j]
        w = model.params["attn.W_pool"].data
        b = model.params["attn.b_pool"].data
        np.testing.assert_allclose(model.encode(x).data[0], np.tanh(v @ w + b),
                                   atol=1e-12)

    def test_columns_sum_to_one_and_padding_masked(self):
        model = Model.build(tiny_config(), np.random.default_rng(11))
        x = np.random.default_rng(12).normal(size=(6, 4))
        padded = np.vstack([x, np.zeros((2, 4))])
        alpha = model.attention_weights(padded, length=6)
        np.testing.assert_allclose(alpha.sum(axis=0), 1.0, atol=1e-9)
        assert np.all(alpha[6:] == 0.0)
        np.testing.assert_array_equal(model.encode(x).data,
                                      model.encode(padded, length=6).data)


class TestClassifier:
    def test_zero_logits_give_half(self):
        model = Model.build(tiny_config())
        model.params["clf.out.W"].data[:] = 0.0
        model.params["clf.out.b"].data[:] = 0.0
        probs = model.classify(np.random.default_rng(0).normal(size=(3, 4)))
        np.testing.assert_allclose(probs.data, 0.5, atol=1e-15)

    def test_eval_output_independent_of_batch(self):
        model = Model.build(tiny_config(), np.random.default_rng(13))
        rng = np.random.default_rng(14)
        seqs = [rng.normal(size=(4, 4)) for _ in range(5)]
        batched = model.predict_proba(seqs)
        singles = np.vstack([model.predict_proba([s]) for s in seqs])
        np.testing.assert_allclose(batched, singles, atol=1e-12)

    def test_train_mode_batchnorm_uses_batch_stats(self):
        model = Model.build(tiny_config(), np.random.default_rng(15))
        rng = np.random.default_rng(16)
        x = rng.normal(size=(8, 4))
        p_train = model.classify(x, train=True, rng=rng)
        p_eval = model.classify(x, train=False)
        assert not np.allclose(p_train.data, p_eval.data)


class TestLoss:
    def test_half_probability_is_ln2(self):
        from textcontours.neural.tensor import Tensor
        loss = loss_bce(Tensor(np.array([[0.5]])), np.array([[1.0]]))
        assert abs(loss.data.item() - math.log(2)) < 1e-12

    def test_perfect_prediction_near_zero(self):
        from textcontours.neural.tensor import Tensor
        loss = loss_bce(Tensor(np.array([[1.0 - 1e-13], [1e-13]])),
                        np.array([[1.0], [0.0]]))
        assert loss.data.item() < 1e-10


class TestAdamW:
    def test_zero_gradient_no_decay_leaves_params(self):
        p = Parameter(np.array([1.0, -2.0]), "p")
        opt = AdamW([p], lr=0.1)
        p.grad = np.zeros(2)
        opt.step()
        np.testing.assert_array_equal(p.data, [1.0, -2.0])

    def test_first_step_moves_by_lr(self):
        p = Parameter(np.array([1.0]), "p")
        opt = AdamW([p], lr=0.1)
        p.grad = np.array([1.0])
        opt.step()
        assert abs(p.data[0] - 0.9) < 1e-6

    def test_decoupled_decay_multiplies(self):
        p = Parameter(np.array([2.0]), "p")
        opt = AdamW([p], lr=0.1, weight_decay=0.5)
        p.grad = np.array([0.0])
        opt.step()
        assert abs(p.data[0] - 2.0 * (1 - 0.1 * 0.5)) < 1e-12

    def test_lr_override_by_prefix(self):
        a = Parameter(np.array([1.0]), "adapter.W")
        b = Parameter(np.array([1.0]), "clf.out.W")
        opt = AdamW([a, b], lr=0.1, lr_overrides={"adapter.": 0.01})
        a.grad = np.array([1.0])
        b.grad = np.array([1.0])
        opt.step()
        assert abs(a.data[0] - 0.99) < 1e-6
        assert abs(b.data[0] - 0.9) < 1e-6


class TestDropout:
    def test_eval_equals_mean_of_train_passes(self):
        # compare on the encoder (dropout between stacked LSTM layers);
        # classifier batch norm would confound the expectation on batch=1
        cfg2 = tiny_config(dropout=0.4, layers=2)
        model2 = Model.build(cfg2, np.random.default_rng(19))
        seq = np.random.default_rng(20).normal(size=(6, 4))
        eval_out = model2.encode(seq).data
        rng = np.random.default_rng(21)
        samples = [model2.encode(seq, train=True, rng=rng).data for _ in range(3000)]
        mc = np.mean(samples, axis=0)
        err = np.abs(mc - eval_out)
        scale = np.std(samples, axis=0) / math.sqrt(len(samples))
        assert np.all(err < 6 * scale + 5e-3)


class TestFolds:
    def test_coverage_and_disjointness(self):
        y = np.array([0, 1] * 15)
        folds = stratified_kfold(y, 5, np.random.default_rng(0))
        seen = []
        for tr, va in folds:
            assert set(tr) & set(va) == set()
            seen.extend(va.tolist())
        assert sorted(seen) == list(range(30))

    def test_stratification_balance(self):
        y = np.array([0] * 20 + [1] * 10)
        for tr, va in stratified_kfold(y, 5, np.random.default_rng(1)):
            assert np.sum(y[va] == 1) == 2
            assert np.sum(y[va] == 0) == 4

    def test_single_class_rejected(self):
        with pytest.raises(NeuralError):
            stratified_kfold(np.ones(10), 5, np.random.default_rng(0))

    def test_class_smaller_than_k_rejected(self):
        y = np.array([0] * 20 + [1] * 3)
        with pytest.raises(NeuralError, match="fewer than k"):
            stratified_kfold(y, 5, np.random.default_rng(0))


def make_corpus(registry, n_docs=24, seed=0, trait="T"):
    rng = np.random.default_rng(seed)
    d = registry.dimension
    mats, ids, ys = [], [], []
    for i in range(n_docs):
        values = rng.normal(size=(4, d))
        ids.append(f"doc{i}")
        ys.append(1 if values[:, 0].mean() > 0 else 0)
        mats.append(ContourMatrix(doc_id=ids[-1], values=values,
                                  registry=registry))
    return TrainCorpus(doc_ids=ids, matrices=mats,
                       labels={trait: np.asarray(ys)})


@pytest.fixture(scope="module")
def small_registry():
    feats = tuple((f"f{i}", "lexical") for i in range(5))
    return FeatureRegistry(features=feats)


class TestTraining:
    def test_deterministic_cross_validation(self, small_registry):
        corpus = make_corpus(small_registry, n_docs=30, seed=3)
        cfg = tiny_config(feature_dim=5, dropout=0.1)
        tcfg = TrainConfig(epochs=2, batch_size=8, folds=3, repetitions=1, seed=11)
        a = cross_validate(corpus, cfg, tcfg).to_json()
        b = cross_validate(corpus, cfg, tcfg).to_json()
        assert a == b

    def test_single_class_trait_named(self, small_registry):
        corpus = make_corpus(small_registry, n_docs=12, seed=3, trait="Z")
        corpus.labels["Z"][:] = 1
        cfg = tiny_config(feature_dim=5)
        tcfg = TrainConfig(epochs=1, folds=3, repetitions=1)
        with pytest.raises(NeuralError, match="'Z'"):
            cross_validate(corpus, cfg, tcfg)

    def test_non_finite_input_aborts(self, small_registry):
        cfg = tiny_config(feature_dim=5)
        tcfg = TrainConfig(epochs=1, folds=2, repetitions=1)
        bad = [np.full((3, 5), np.nan)]
        with pytest.raises(NumericError):
            fit_single(bad, np.array([1.0]), cfg, tcfg, rng_for(0, 0))

    def test_checkpoint_round_trip(self, small_registry, tmp_path):
        corpus = make_corpus(small_registry, n_docs=20, seed=5)
        cfg = tiny_config(feature_dim=5)
        tcfg = TrainConfig(epochs=1, folds=2, repetitions=1)
        from textcontours.neural import train_final
        models, std = train_final(corpus, cfg, tcfg)
        path = str(tmp_path / "ckpt.json")
        save_checkpoint(path, models, std, "hash123", tcfg)
        loaded, std2, tcfg2, rh = load_checkpoint(path, "hash123")
        assert rh == "hash123"
        for trait in models:
            for k in models[trait].params:
                np.testing.assert_array_equal(models[trait].params[k].data,
                                              loaded[trait].params[k].data)

    def test_checkpoint_hash_mismatch_rejected(self, small_registry, tmp_path):
        corpus = make_corpus(small_registry, n_docs=20, seed=5)
        cfg = tiny_config(feature_dim=5)
        tcfg = TrainConfig(epochs=1, folds=2, repetitions=1)
        from textcontours.neural import train_final
        models, std = train_final(corpus, cfg, tcfg)
        path = str(tmp_path / "ckpt.json")
        save_checkpoint(path, models, std, "hash123", tcfg)
        with pytest.raises(NeuralError, match="different feature registry"):
            load_checkpoint(path, "otherhash")

    def test_fit_single_learns_planted_signal(self, small_registry):
        rng = np.random.default_rng(6)
        seqs = [rng.normal(size=(4, 5)) for _ in range(60)]
        y = np.array([1.0 if s[:, 0].mean() > 0 else 0.0 for s in seqs])
        cfg = tiny_config(feature_dim=5, dropout=0.0)
        tcfg = TrainConfig(epochs=120, batch_size=16, folds=2, repetitions=1,
                           learning_rate=3e-3, weight_decay=0.0)
        model = fit_single(seqs, y, cfg, tcfg, rng_for(1, 0),
                           stop_at_train_acc=0.97)
        assert accuracy(model, seqs, y) >= 0.9
