"""Sequence encoders and classifier built on the autodiff micro-kernel.

Two contour encoders: a stacked bidirectional LSTM whose output is the
concatenation of the two final hidden states of the last layer, and an
attention variant that scores every feature dimension of every sentence
(softmax over sentences, per dimension) and pools the weighted input sum
through a tanh projection. The classifier is a feed-forward stack of
linear layers with batch normalization and PReLU between them, ending in
one sigmoid unit per trait head.

All parameters are initialized uniform(-1/sqrt(fan_in), +1/sqrt(fan_in));
LSTM forget-gate biases start at 1.0.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np

from ..errors import NumericError
from . import tensor as T
from .tensor import Parameter, Tensor

MASK_BIAS = -1e30
BN_EPS = 1e-5
BN_MOMENTUM = 0.1
PRELU_INIT = 0.25


class NeuralError(ValueError):
    pass


@dataclass(frozen=True)
class ModelConfig:
    encoder_kind: str = "ATTN"  # ATTN | BLSTM
    layers: int = 3
    hidden: int = 256
    dropout: float = 0.1
    classifier_layers: int = 3
    classifier_hidden: int = 512
    fusion: str = "none"  # none | concat-embedding
    max_sentences: int = 64
    seed: int = 0
    feature_dim: int = 0
    embed_dim: int = 0
    embed_adapter: bool = False  # trainable affine over frozen embeddings
    output_dim: int = 1

    def __post_init__(self):
        if self.encoder_kind not in ("ATTN", "BLSTM"):
            raise NeuralError(f"unknown encoder kind {self.encoder_kind!r}")
        if self.layers < 1 or self.hidden < 1:
            raise NeuralError("layers and hidden size must be >= 1")
        if not 0.0 <= self.dropout < 1.0:
            raise NeuralError("dropout must be in [0, 1)")
        if self.fusion not in ("none", "concat-embedding"):
            raise NeuralError(f"unknown fusion mode {self.fusion!r}")
        if self.fusion == "concat-embedding" and self.embed_dim <= 0:
            raise NeuralError("concat-embedding fusion requires embed_dim > 0")

    @property
    def encoder_out_dim(self) -> int:
        return 2 * self.hidden if self.encoder_kind == "BLSTM" else self.feature_dim

    @property
    def classifier_in_dim(self) -> int:
        extra = self.embed_dim if self.fusion == "concat-embedding" else 0
        return self.encoder_out_dim + extra

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, payload: dict) -> "ModelConfig":
        return cls(**payload)


def _uniform(rng: np.random.Generator, shape, fan_in: int) -> np.ndarray:
    bound = 1.0 / np.sqrt(max(fan_in, 1))
    return rng.uniform(-bound, bound, size=shape)


def init_params(config: ModelConfig, rng: np.random.Generator) -> dict[str, Parameter]:
    """All learnable tensors for the configured model, keyed by name."""
    if config.feature_dim < 1:
        raise NeuralError("feature_dim must be set before building parameters")
    params: dict[str, Parameter] = {}

    def par(name: str, data: np.ndarray) -> None:
        params[name] = Parameter(data, name)

    h = config.hidden
    in_dim = config.feature_dim
    for layer in range(config.layers):
        for direction in ("fwd", "bwd"):
            prefix = f"lstm.l{layer}.{direction}"
            par(f"{prefix}.W_ih", _uniform(rng, (in_dim, 4 * h), in_dim))
            par(f"{prefix}.W_hh", _uniform(rng, (h, 4 * h), h))
            bias = _uniform(rng, (4 * h,), h)
            bias[h: 2 * h] = 1.0  # forget gate opens at init
            par(f"{prefix}.b", bias)
        in_dim = 2 * h

    d_o = 2 * h
    d = config.feature_dim
    if config.encoder_kind == "ATTN":
        par("attn.W_att", _uniform(rng, (d_o, d), d_o))
        par("attn.b_att", _uniform(rng, (d,), d_o))
        par("attn.W_pool", _uniform(rng, (d, d), d))
        par("attn.b_pool", _uniform(rng, (d,), d))

    if config.embed_adapter and config.embed_dim > 0:
        e = config.embed_dim
        # identity start: FT mode begins exactly where FB mode would
        par("adapter.W", np.eye(e))
        par("adapter.b", np.zeros(e))

    c_in = config.classifier_in_dim
    for layer in range(config.classifier_layers):
        prefix = f"clf.l{layer}"
        # no linear bias: batch norm's shift makes it redundant
        par(f"{prefix}.W", _uniform(rng, (c_in, config.classifier_hidden), c_in))
        par(f"{prefix}.bn.gamma", np.ones(config.classifier_hidden))
        par(f"{prefix}.bn.beta", np.zeros(config.classifier_hidden))
        par(f"{prefix}.prelu", np.full(1, PRELU_INIT))
        c_in = config.classifier_hidden
    par("clf.out.W", _uniform(rng, (c_in, config.output_dim), c_in))
    par("clf.out.b", _uniform(rng, (config.output_dim,), c_in))
    return params


def init_buffers(config: ModelConfig) -> dict[str, np.ndarray]:
    buffers = {}
    for layer in range(config.classifier_layers):
        buffers[f"clf.l{layer}.bn.running_mean"] = np.zeros(config.classifier_hidden)
        buffers[f"clf.l{layer}.bn.running_var"] = np.ones(config.classifier_hidden)
    return buffers


@dataclass
class Model:
    """Parameter container plus forward passes (no training logic here)."""

    config: ModelConfig
    params: dict[str, Parameter]
    buffers: dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def build(cls, config: ModelConfig, rng: np.random.Generator | None = None) -> "Model":
        rng = rng or np.random.default_rng(config.seed)
        return cls(config=config, params=init_params(config, rng),
                   buffers=init_buffers(config))

    def parameters(self) -> list[Parameter]:
        return list(self.params.values())

    def zero_grad(self) -> None:
        for p in self.params.values():
            p.zero_grad()

    # -- LSTM ---------------------------------------------------------------

    def _lstm_direction(self, xs: list[Tensor], layer: int, direction: str,
                        masks: list[np.ndarray] | None) -> list[Tensor]:
        """Run one direction over a timestep list; returns hidden per step.

        ``masks`` (one (B, 1) array per step, 1 = real) freeze the state on
        padded steps, so padding can never alter the final hidden state.
        """
        w_ih = self.params[f"lstm.l{layer}.{direction}.W_ih"]
        w_hh = self.params[f"lstm.l{layer}.{direction}.W_hh"]
        b = self.params[f"lstm.l{layer}.{direction}.b"]
        h_size = self.config.hidden
        steps = range(len(xs)) if direction == "fwd" else range(len(xs) - 1, -1, -1)
        batch = xs[0].shape[0]
        h = Tensor(np.zeros((batch, h_size)))
        c = Tensor(np.zeros((batch, h_size)))
        out: list[Tensor | None] = [None] * len(xs)
        for t in steps:
            gates = T.add(T.add(T.matmul(xs[t], w_ih), T.matmul(h, w_hh)), b)
            i = T.sigmoid(gates[:, 0 * h_size: 1 * h_size])
            f = T.sigmoid(gates[:, 1 * h_size: 2 * h_size])
            g = T.tanh(gates[:, 2 * h_size: 3 * h_size])
            o = T.sigmoid(gates[:, 3 * h_size: 4 * h_size])
            c_new = T.add(T.mul(f, c), T.mul(i, g))
            h_new = T.mul(o, T.tanh(c_new))
            if masks is not None:
                m = masks[t]
                c = T.add(T.mul(c_new, m), T.mul(c, 1.0 - m))
                h = T.add(T.mul(h_new, m), T.mul(h, 1.0 - m))
            else:
                c, h = c_new, h_new
            out[t] = h
        return out  # type: ignore[return-value]

    def _blstm(self, xs: list[Tensor], train: bool, rng,
               masks: list[np.ndarray] | None) -> tuple[list[Tensor], Tensor]:
        """All stacked layers; returns per-step concat states of the last
        layer and the [fwd last | bwd first] summary vector."""
        current = xs
        fwd = bwd = None
        for layer in range(self.config.layers):
            fwd = self._lstm_direction(current, layer, "fwd", masks)
            bwd = self._lstm_direction(current, layer, "bwd", masks)
            current = [T.concat([f, b], axis=1) for f, b in zip(fwd, bwd)]
            if train and self.config.dropout > 0 and layer < self.config.layers - 1:
                current = [self._dropout(x, rng) for x in current]
        summary = T.concat([fwd[-1], bwd[0]], axis=1)
        return current, summary

    def _dropout(self, x: Tensor, rng) -> Tensor:
        p = self.config.dropout
        mask = (rng.random(x.shape) >= p) / (1.0 - p)
        return T.mul(x, mask)

    # -- encoders -------------------------------------------------------------

    def encode_batch(self, sequences: list[np.ndarray], train: bool = False,
                     rng: np.random.Generator | None = None,
                     lengths: list[int] | None = None) -> Tensor:
        """Encode equal-length sequences as one batch.

        ``lengths`` marks the true length of each row when the batch is
        padded; shorter rows are masked.
        """
        if not sequences:
            raise NeuralError("cannot encode an empty batch")
        n = sequences[0].shape[0]
        if any(s.shape[0] != n for s in sequences):
            raise NeuralError("encode_batch requires equal-length sequences")
        if n == 0:
            raise NeuralError("cannot encode an empty sequence")
        batch = np.stack(sequences, axis=0)  # (B, n, D)
        if not np.all(np.isfinite(batch)):
            raise NumericError("non-finite values in encoder input")
        xs = [Tensor(batch[:, t, :]) for t in range(n)]
        masks = None
        mask_bias = None
        if lengths is not None:
            m = np.stack([
                (np.arange(n) < ln).astype(np.float64) for ln in lengths
            ], axis=0)  # (B, n)
            masks = [m[:, t][:, None] for t in range(n)]
            mask_bias = np.where(m.T[:, :, None] > 0, 0.0, MASK_BIAS)  # (n, B, 1)

        states, summary = self._blstm(xs, train, rng, masks)
        if self.config.encoder_kind == "BLSTM":
            return summary
        w_att = self.params["attn.W_att"]
        b_att = self.params["attn.b_att"]
        m_steps = [T.tanh(T.add(T.matmul(h, w_att), b_att)) for h in states]
        m = T.stack(m_steps, axis=0)  # (n, B, D)
        alpha = T.softmax_axis0(m, mask_bias)
        x3 = Tensor(np.transpose(batch, (1, 0, 2)))  # (n, B, D)
        v = T.tsum(T.mul(alpha, x3), axis=0)  # (B, D)
        return T.tanh(T.add(T.matmul(v, self.params["attn.W_pool"]),
                            self.params["attn.b_pool"]))

    def encode(self, x: np.ndarray, train: bool = False,
               rng: np.random.Generator | None = None,
               length: int | None = None) -> Tensor:
        """Encode a single (n, D) contour sequence to a (1, d_enc) vector."""
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2:
            raise NeuralError("expected a 2-D (sentences x features) input")
        lengths = [length] if length is not None else None
        return self.encode_batch([x], train=train, rng=rng, lengths=lengths)

    def attention_weights(self, x: np.ndarray, length: int | None = None) -> np.ndarray:
        """The (n, D) attention matrix for one sequence (eval mode)."""
        if self.config.encoder_kind != "ATTN":
            raise NeuralError("attention weights exist only for ATTN encoders")
        x = np.asarray(x, dtype=np.float64)
        n = x.shape[0]
        xs = [Tensor(x[None, t, :]) for t in range(n)]
        masks = None
        mask_bias = None
        if length is not None:
            m = (np.arange(n) < length).astype(np.float64)
            masks = [np.full((1, 1), m[t]) for t in range(n)]
            mask_bias = np.where(m[:, None, None] > 0, 0.0, MASK_BIAS)
        states, _ = self._blstm(xs, train=False, rng=None, masks=masks)
        w_att, b_att = self.params["attn.W_att"], self.params["attn.b_att"]
        m_steps = [T.tanh(T.add(T.matmul(h, w_att), b_att)) for h in states]
        alpha = T.softmax_axis0(T.stack(m_steps, axis=0), mask_bias)
        return alpha.data[:, 0, :]

    # -- classifier -----------------------------------------------------------

    def classify(self, p: Tensor | np.ndarray, train: bool = False,
                 rng: np.random.Generator | None = None) -> Tensor:
        """Feed-forward head: probabilities in (0, 1), shape (B, output_dim)."""
        x = p if isinstance(p, Tensor) else Tensor(np.atleast_2d(p))
        for layer in range(self.config.classifier_layers):
            prefix = f"clf.l{layer}"
            x = T.matmul(x, self.params[f"{prefix}.W"])
            x = self._batch_norm(x, prefix, train)
            slope = self.params[f"{prefix}.prelu"]
            x = T.where_positive(x, x, T.mul(x, slope))
            if train and self.config.dropout > 0:
                x = self._dropout(x, rng)
        logits = T.add(T.matmul(x, self.params["clf.out.W"]), self.params["clf.out.b"])
        return T.sigmoid(logits)

    def _batch_norm(self, x: Tensor, prefix: str, train: bool) -> Tensor:
        gamma = self.params[f"{prefix}.bn.gamma"]
        beta = self.params[f"{prefix}.bn.beta"]
        if train:
            mu = T.tmean(x, axis=0, keepdims=True)
            centered = T.sub(x, mu)
            var = T.tmean(T.mul(centered, centered), axis=0, keepdims=True)
            x_hat = T.div(centered, T.sqrt(T.add(var, BN_EPS)))
            rm, rv = f"{prefix}.bn.running_mean", f"{prefix}.bn.running_var"
            self.buffers[rm] = (1 - BN_MOMENTUM) * self.buffers[rm] + BN_MOMENTUM * mu.data[0]
            self.buffers[rv] = (1 - BN_MOMENTUM) * self.buffers[rv] + BN_MOMENTUM * var.data[0]
        else:
            mu = self.buffers[f"{prefix}.bn.running_mean"]
            var = self.buffers[f"{prefix}.bn.running_var"]
            x_hat = T.mul(T.sub(x, mu), 1.0 / np.sqrt(var + BN_EPS))
        return T.add(T.mul(x_hat, gamma), beta)

    # -- full forward -----------------------------------------------------------

    def forward(self, sequences: list[np.ndarray], embeddings: np.ndarray | None = None,
                train: bool = False, rng: np.random.Generator | None = None) -> Tensor:
        """Probabilities for a batch of (possibly ragged) sequences.

        Ragged batches are bucketed by length; output order matches input
        order. ``embeddings`` ((B, e) array) are fused by concatenation
        after the encoder when the config says so.
        """
        if train and self.config.dropout > 0 and rng is None:
            raise NeuralError("training forward with dropout needs an rng")
        by_len: dict[int, list[int]] = {}
        for i, s in enumerate(sequences):
            by_len.setdefault(s.shape[0], []).append(i)
        parts = []
        order: list[int] = []
        for ln in sorted(by_len):
            idx = by_len[ln]
            parts.append(self.encode_batch([sequences[i] for i in idx], train=train, rng=rng))
            order.extend(idx)
        p_enc = parts[0] if len(parts) == 1 else T.concat(parts, axis=0)
        if len(parts) > 1:
            inverse = np.empty(len(order), dtype=np.intp)
            inverse[np.asarray(order)] = np.arange(len(order))
            p_enc = p_enc[inverse]
        if self.config.fusion == "concat-embedding":
            if embeddings is None:
                raise NeuralError("fusion model called without embeddings")
            emb = Tensor(np.asarray(embeddings, dtype=np.float64))
            if "adapter.W" in self.params:
                emb = T.add(T.matmul(emb, self.params["adapter.W"]), self.params["adapter.b"])
            p_enc = T.concat([p_enc, emb], axis=1)
        return self.classify(p_enc, train=train, rng=rng)

    def predict_proba(self, sequences: list[np.ndarray],
                      embeddings: np.ndarray | None = None) -> np.ndarray:
        return self.forward(sequences, embeddings, train=False).data


def loss_bce(probs: Tensor, targets: np.ndarray) -> Tensor:
    """Mean binary cross entropy; probabilities clamped away from {0, 1}."""
    y = np.asarray(targets, dtype=np.float64).reshape(probs.shape)
    p = T.clamp(probs, 1e-12, 1.0 - 1e-12)
    loss_pos = T.mul(T.log(p), y)
    loss_neg = T.mul(T.log(T.sub(1.0, p)), 1.0 - y)
    return T.mul(T.tmean(T.add(loss_pos, loss_neg)), -1.0)
