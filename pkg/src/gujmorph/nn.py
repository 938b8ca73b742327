"""Minimal neural network core: embedding -> Bi-LSTM -> dense head.

Everything is float64 numpy with hand-written backpropagation through time,
so analytic gradients can be checked sharply against central finite
differences.  Two head kinds share the encoder:

* "boundary" -- one sigmoid per position (per-unit split probability),
  trained with masked mean binary cross entropy;
* "class"    -- softmax over monolithic feature classes on the concatenation
  of the final forward and final backward states, trained with categorical
  cross entropy.

Batches are padded with PAD=0 and masked, with state freezing past each
sequence end, so the "final" forward state of a padded row is the state at
its true last unit.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyTrainingSet, NonFiniteError, ShapeMismatch
from .script import Vocab

_logger = logging.getLogger(__name__)

# Fused gate layout along the 4H axis: input, forget, candidate, output.
GATES = ("i", "f", "g", "o")

TENSOR_ORDER = (
    "embedding",
    "fwd.W", "fwd.U", "fwd.b",
    "bwd.W", "bwd.U", "bwd.b",
    "head.W", "head.b",
)

LOG_EPS = 1e-12  # probability clamp inside the cross-entropy losses


@dataclass(frozen=True)
class Hyper:
    """Training hyperparameters.  The defaults are desk-scale CPU choices."""

    embed_dim: int = 32
    hidden_dim: int = 64
    lr: float = 1e-3
    epochs: int = 30
    batch_size: int = 32
    seed: int = 0
    threshold: float = 0.5
    clip_norm: float = 5.0

    def validate(self) -> None:
        from .errors import ConfigError

        if min(self.embed_dim, self.hidden_dim, self.epochs, self.batch_size) < 1:
            raise ConfigError("embed_dim, hidden_dim, epochs, batch_size must be >= 1")
        if self.lr <= 0 or self.clip_norm <= 0:
            raise ConfigError("lr and clip_norm must be positive")
        if not 0 < self.threshold < 1:
            raise ConfigError(f"threshold must be in (0, 1), got {self.threshold}")


@dataclass
class ModelParams:
    """All learnable tensors of one network plus its frozen configuration.

    kind is "boundary" or "class"; classes holds the canonical bundle string
    per class id for class models (None for boundary models).
    """

    kind: str
    hyper: Hyper
    vocab: Vocab
    classes: list[str] | None
    tensors: dict[str, np.ndarray]

    @property
    def out_dim(self) -> int:
        return self.tensors["head.b"].shape[0]

    def check_consistent(self) -> None:
        e, h = self.hyper.embed_dim, self.hyper.hidden_dim
        expected = {
            "embedding": (self.vocab.size, e),
            "fwd.W": (e, 4 * h), "fwd.U": (h, 4 * h), "fwd.b": (4 * h,),
            "bwd.W": (e, 4 * h), "bwd.U": (h, 4 * h), "bwd.b": (4 * h,),
            "head.W": (2 * h, self.out_dim), "head.b": (self.out_dim,),
        }
        for name, shape in expected.items():
            if self.tensors[name].shape != shape:
                raise ShapeMismatch(
                    f"{name}: expected {shape}, got {self.tensors[name].shape}"
                )


def _xavier(rng: np.random.Generator, fan_in: int, fan_out: int, shape) -> np.ndarray:
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=shape)


def init_params(
    kind: str,
    vocab: Vocab,
    hyper: Hyper,
    classes: list[str] | None = None,
    rng: np.random.Generator | None = None,
) -> ModelParams:
    """Glorot-uniform weights, zero biases, forget-gate bias +1."""
    if kind not in ("boundary", "class"):
        raise ValueError(f"unknown head kind {kind!r}")
    if kind == "class" and not classes:
        raise ValueError("class models need a non-empty class list")
    if rng is None:
        rng = np.random.default_rng(hyper.seed)
    e, h = hyper.embed_dim, hyper.hidden_dim
    out_dim = 1 if kind == "boundary" else len(classes)

    def lstm_dir() -> dict[str, np.ndarray]:
        w = np.hstack([_xavier(rng, e, h, (e, h)) for _ in GATES])
        u = np.hstack([_xavier(rng, h, h, (h, h)) for _ in GATES])
        b = np.zeros(4 * h)
        b[h:2 * h] = 1.0  # forget gate: start remembering
        return {"W": w, "U": u, "b": b}

    fwd, bwd = lstm_dir(), lstm_dir()
    tensors = {
        "embedding": _xavier(rng, vocab.size, e, (vocab.size, e)),
        "fwd.W": fwd["W"], "fwd.U": fwd["U"], "fwd.b": fwd["b"],
        "bwd.W": bwd["W"], "bwd.U": bwd["U"], "bwd.b": bwd["b"],
        "head.W": _xavier(rng, 2 * h, out_dim, (2 * h, out_dim)),
        "head.b": np.zeros(out_dim),
    }
    params = ModelParams(
        kind=kind,
        hyper=hyper,
        vocab=vocab,
        classes=list(classes) if classes else None,
        tensors=tensors,
    )
    params.check_consistent()
    return params


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def check_finite(name: str, value) -> None:
    if not np.all(np.isfinite(value)):
        raise NonFiniteError(f"non-finite values in {name}")


def lstm_cell_step(
    w: np.ndarray,
    u: np.ndarray,
    b: np.ndarray,
    x_t: np.ndarray,
    h_prev: np.ndarray,
    c_prev: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """One LSTM step with fused [i|f|g|o] gate tensors.

    i, f, o = sigmoid(Wx + Uh + b); g = tanh(Wx + Uh + b)
    c_t = f * c_prev + i * g;  h_t = o * tanh(c_t)

    Works on single vectors or on a leading batch axis.
    """
    h_dim = u.shape[0]
    if w.shape[1] != 4 * h_dim or b.shape[-1] != 4 * h_dim:
        raise ShapeMismatch(f"gate tensors disagree: W{w.shape} U{u.shape} b{b.shape}")
    if x_t.shape[-1] != w.shape[0]:
        raise ShapeMismatch(f"input dim {x_t.shape[-1]} != W rows {w.shape[0]}")
    if h_prev.shape[-1] != h_dim or c_prev.shape[-1] != h_dim:
        raise ShapeMismatch("state dims do not match U")
    pre = x_t @ w + h_prev @ u + b
    i = _sigmoid(pre[..., :h_dim])
    f = _sigmoid(pre[..., h_dim:2 * h_dim])
    g = np.tanh(pre[..., 2 * h_dim:3 * h_dim])
    o = _sigmoid(pre[..., 3 * h_dim:])
    c_t = f * c_prev + i * g
    h_t = o * np.tanh(c_t)
    return h_t, c_t


class _DirCache:
    """Per-direction activations recorded during the forward scan."""

    __slots__ = ("i", "f", "g", "o", "c_raw", "tc", "h_prev", "c_prev", "order")

    def __init__(self, t: int, b: int, h: int, order: list[int]):
        shape = (t, b, h)
        self.i = np.zeros(shape)
        self.f = np.zeros(shape)
        self.g = np.zeros(shape)
        self.o = np.zeros(shape)
        self.c_raw = np.zeros(shape)
        self.tc = np.zeros(shape)
        self.h_prev = np.zeros(shape)
        self.c_prev = np.zeros(shape)
        self.order = order


def _scan(
    tensors: dict[str, np.ndarray],
    prefix: str,
    x: np.ndarray,
    mask: np.ndarray,
    reverse: bool,
) -> tuple[np.ndarray, _DirCache, np.ndarray]:
    """Run one direction over (B, T, E) inputs with state freezing at pads.

    Returns per-position states (T, B, H), the cache, and the final state.
    """
    w, u, b = tensors[prefix + ".W"], tensors[prefix + ".U"], tensors[prefix + ".b"]
    n_batch, n_time, _ = x.shape
    h_dim = u.shape[0]
    order = list(range(n_time - 1, -1, -1)) if reverse else list(range(n_time))
    cache = _DirCache(n_time, n_batch, h_dim, order)
    states = np.zeros((n_time, n_batch, h_dim))
    h = np.zeros((n_batch, h_dim))
    c = np.zeros((n_batch, h_dim))
    for t in order:
        m = mask[:, t:t + 1]
        pre = x[:, t] @ w + h @ u + b
        i = _sigmoid(pre[:, :h_dim])
        f = _sigmoid(pre[:, h_dim:2 * h_dim])
        g = np.tanh(pre[:, 2 * h_dim:3 * h_dim])
        o = _sigmoid(pre[:, 3 * h_dim:])
        c_raw = f * c + i * g
        tc = np.tanh(c_raw)
        cache.i[t], cache.f[t], cache.g[t], cache.o[t] = i, f, g, o
        cache.c_raw[t], cache.tc[t] = c_raw, tc
        cache.h_prev[t], cache.c_prev[t] = h, c
        h = m * (o * tc) + (1.0 - m) * h
        c = m * c_raw + (1.0 - m) * c
        states[t] = h
    return states, cache, h


def _scan_backward(
    tensors: dict[str, np.ndarray],
    prefix: str,
    x: np.ndarray,
    mask: np.ndarray,
    cache: _DirCache,
    d_states: np.ndarray | None,
    d_final: np.ndarray | None,
) -> tuple[dict[str, np.ndarray], np.ndarray]:
    """BPTT through one direction; returns gate gradients and d(input x)."""
    w, u = tensors[prefix + ".W"], tensors[prefix + ".U"]
    n_batch, _, _ = x.shape
    h_dim = u.shape[0]
    d_w = np.zeros_like(w)
    d_u = np.zeros_like(u)
    d_b = np.zeros_like(tensors[prefix + ".b"])
    d_x = np.zeros_like(x)
    dh = d_final.copy() if d_final is not None else np.zeros((n_batch, h_dim))
    dc = np.zeros((n_batch, h_dim))
    for t in reversed(cache.order):
        if d_states is not None:
            dh = dh + d_states[t]
        m = mask[:, t:t + 1]
        i, f, g, o = cache.i[t], cache.f[t], cache.g[t], cache.o[t]
        tc, c_prev, h_prev = cache.tc[t], cache.c_prev[t], cache.h_prev[t]
        # h_t = m*(o*tanh(c_raw)) + (1-m)*h_prev ; c_t = m*c_raw + (1-m)*c_prev
        dh_raw = m * dh
        dh_skip = (1.0 - m) * dh
        dc_raw = m * dc + dh_raw * o * (1.0 - tc * tc)
        dc_skip = (1.0 - m) * dc
        d_o = dh_raw * tc
        d_f = dc_raw * c_prev
        d_i = dc_raw * g
        d_g = dc_raw * i
        d_pre = np.concatenate(
            [
                d_i * i * (1.0 - i),
                d_f * f * (1.0 - f),
                d_g * (1.0 - g * g),
                d_o * o * (1.0 - o),
            ],
            axis=1,
        )
        d_w += x[:, t].T @ d_pre
        d_u += h_prev.T @ d_pre
        d_b += d_pre.sum(axis=0)
        d_x[:, t] = d_pre @ w.T
        dh = d_pre @ u.T + dh_skip
        dc = dc_raw * f + dc_skip
    grads = {prefix + ".W": d_w, prefix + ".U": d_u, prefix + ".b": d_b}
    return grads, d_x


@dataclass
class Batch:
    """Padded training batch.  labels for boundary models, classes for class."""

    ids: np.ndarray                 # (B, T) int64, PAD=0 past each length
    mask: np.ndarray                # (B, T) float64, 1.0 at real units
    labels: np.ndarray | None = None    # (B, T) float64
    classes: np.ndarray | None = None   # (B,) int64


def pack_batch(
    id_seqs: Sequence[Sequence[int]],
    labels: Sequence[Sequence[int]] | None = None,
    classes: Sequence[int] | None = None,
) -> Batch:
    if not id_seqs:
        raise EmptyTrainingSet("cannot pack an empty batch")
    n_batch = len(id_seqs)
    n_time = max(len(seq) for seq in id_seqs)
    if n_time == 0:
        raise ShapeMismatch("batch contains only empty sequences")
    ids = np.zeros((n_batch, n_time), dtype=np.int64)
    mask = np.zeros((n_batch, n_time))
    for row, seq in enumerate(id_seqs):
        ids[row, :len(seq)] = seq
        mask[row, :len(seq)] = 1.0
    batch = Batch(ids=ids, mask=mask)
    if labels is not None:
        batch.labels = np.zeros((n_batch, n_time))
        for row, lab in enumerate(labels):
            batch.labels[row, :len(lab)] = lab
    if classes is not None:
        batch.classes = np.asarray(classes, dtype=np.int64)
    return batch


def _encoder_forward(params: ModelParams, batch: Batch):
    emb = params.tensors["embedding"]
    x = emb[batch.ids]  # (B, T, E)
    h_fwd, cache_f, final_f = _scan(params.tensors, "fwd", x, batch.mask, reverse=False)
    h_bwd, cache_b, final_b = _scan(params.tensors, "bwd", x, batch.mask, reverse=True)
    return x, (h_fwd, cache_f, final_f), (h_bwd, cache_b, final_b)


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    ez = np.exp(shifted)
    return ez / ez.sum(axis=-1, keepdims=True)


def bce_loss(p: np.ndarray, y: np.ndarray) -> float:
    """Mean binary cross entropy; probabilities clamped away from 0/1."""
    p = np.clip(np.asarray(p, dtype=float), LOG_EPS, 1.0 - LOG_EPS)
    y = np.asarray(y, dtype=float)
    return float(np.mean(-(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))))


def cce_loss(p: np.ndarray, class_id: int) -> float:
    """Negative log likelihood of one class under a distribution."""
    p = np.clip(np.asarray(p, dtype=float), LOG_EPS, 1.0)
    return float(-np.log(p[class_id]))


def compute_loss(params: ModelParams, batch: Batch) -> float:
    """Batch loss only (used by the finite-difference checker)."""
    _, (h_fwd, _, final_f), (h_bwd, _, final_b) = _encoder_forward(params, batch)
    w_head, b_head = params.tensors["head.W"], params.tensors["head.b"]
    if params.kind == "boundary":
        states = np.concatenate([h_fwd, h_bwd], axis=2)  # (T, B, 2H)
        logits = np.tensordot(states, w_head[:, 0], axes=([2], [0])) + b_head[0]
        p = np.clip(_sigmoid(logits), LOG_EPS, 1.0 - LOG_EPS)  # (T, B)
        y = batch.labels.T
        m = batch.mask.T
        losses = -(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))
        return float((losses * m).sum() / m.sum())
    pooled = np.concatenate([final_f, final_b], axis=1)  # (B, 2H)
    p = _softmax(pooled @ w_head + b_head)
    picked = np.clip(p[np.arange(len(batch.classes)), batch.classes], LOG_EPS, 1.0)
    return float(-np.log(picked).mean())


def forward_backward(
    params: ModelParams, batch: Batch
) -> tuple[float, dict[str, np.ndarray]]:
    """Batch loss and exact analytic gradients for every parameter tensor."""
    x, (h_fwd, cache_f, final_f), (h_bwd, cache_b, final_b) = _encoder_forward(
        params, batch
    )
    w_head, b_head = params.tensors["head.W"], params.tensors["head.b"]
    h_dim = params.hyper.hidden_dim
    n_batch = batch.ids.shape[0]

    if params.kind == "boundary":
        states = np.concatenate([h_fwd, h_bwd], axis=2)  # (T, B, 2H)
        logits = np.tensordot(states, w_head[:, 0], axes=([2], [0])) + b_head[0]
        p = _sigmoid(logits)  # (T, B)
        y = batch.labels.T
        m = batch.mask.T
        denom = m.sum()
        p_safe = np.clip(p, LOG_EPS, 1.0 - LOG_EPS)
        loss = float((-(y * np.log(p_safe) + (1.0 - y) * np.log(1.0 - p_safe)) * m).sum() / denom)
        d_logits = (p - y) * m / denom  # (T, B)
        flat_states = states.reshape(-1, 2 * h_dim)
        d_w_head = (flat_states.T @ d_logits.reshape(-1, 1))
        d_b_head = np.array([d_logits.sum()])
        d_states = d_logits[:, :, None] * w_head[:, 0][None, None, :]  # (T, B, 2H)
        d_h_fwd = d_states[:, :, :h_dim]
        d_h_bwd = d_states[:, :, h_dim:]
        d_final_f = None
        d_final_b = None
    else:
        pooled = np.concatenate([final_f, final_b], axis=1)  # (B, 2H)
        logits = pooled @ w_head + b_head
        p = _softmax(logits)
        rows = np.arange(n_batch)
        loss = float(-np.log(np.clip(p[rows, batch.classes], LOG_EPS, 1.0)).mean())
        d_logits = p.copy()
        d_logits[rows, batch.classes] -= 1.0
        d_logits /= n_batch
        d_w_head = pooled.T @ d_logits
        d_b_head = d_logits.sum(axis=0)
        d_pooled = d_logits @ w_head.T
        d_h_fwd = None
        d_h_bwd = None
        d_final_f = d_pooled[:, :h_dim]
        d_final_b = d_pooled[:, h_dim:]

    grads_f, d_x_f = _scan_backward(
        params.tensors, "fwd", x, batch.mask, cache_f, d_h_fwd, d_final_f
    )
    grads_b, d_x_b = _scan_backward(
        params.tensors, "bwd", x, batch.mask, cache_b, d_h_bwd, d_final_b
    )
    d_x = d_x_f + d_x_b
    d_emb = np.zeros_like(params.tensors["embedding"])
    np.add.at(d_emb, batch.ids.ravel(), d_x.reshape(-1, d_x.shape[-1]))

    grads = {"embedding": d_emb, **grads_f, **grads_b,
             "head.W": d_w_head, "head.b": d_b_head}
    return loss, grads


def backward(params: ModelParams, batch: Batch) -> dict[str, np.ndarray]:
    """Analytic gradients of the batch loss w.r.t. every parameter."""
    return forward_backward(params, batch)[1]


def bilstm_forward(params: ModelParams, ids: Sequence[int]) -> np.ndarray:
    """Per-position encoder states for one sequence (T, 2*hidden_dim).

    Position t concatenates the forward state after ids[0..t] with the
    backward state after ids[T-1..t].
    """
    if len(ids) == 0:
        raise ShapeMismatch("bilstm_forward needs a nonempty sequence")
    batch = pack_batch([list(ids)])
    _, (h_fwd, _, _), (h_bwd, _, _) = _encoder_forward(params, batch)
    return np.concatenate([h_fwd[:, 0, :], h_bwd[:, 0, :]], axis=1)


def boundary_head(params: ModelParams, states: np.ndarray) -> np.ndarray:
    """Per-position split probability in (0, 1) from (T, 2H) states."""
    w_head, b_head = params.tensors["head.W"], params.tensors["head.b"]
    if states.shape[1] != w_head.shape[0]:
        raise ShapeMismatch(f"states dim {states.shape[1]} != head {w_head.shape[0]}")
    return _sigmoid(states @ w_head[:, 0] + b_head[0])


def class_head(params: ModelParams, states: np.ndarray) -> np.ndarray:
    """Class distribution from pooled final forward and backward states.

    The forward state at the last position and the backward state at the
    first position are concatenated before the dense + softmax.
    """
    if states.shape[0] == 0:
        raise ShapeMismatch("class_head needs a nonempty state sequence")
    w_head, b_head = params.tensors["head.W"], params.tensors["head.b"]
    h_dim = params.hyper.hidden_dim
    pooled = np.concatenate([states[-1, :h_dim], states[0, h_dim:]])
    if pooled.shape[0] != w_head.shape[0]:
        raise ShapeMismatch(f"pooled dim {pooled.shape[0]} != head {w_head.shape[0]}")
    return _softmax(pooled @ w_head + b_head)


@dataclass
class AdamState:
    """First/second moment per parameter tensor plus the step counter."""

    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_params(cls, tensors: dict[str, np.ndarray]) -> "AdamState":
        return cls(
            m={k: np.zeros_like(t) for k, t in tensors.items()},
            v={k: np.zeros_like(t) for k, t in tensors.items()},
        )


def adam_step(
    tensors: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    state: AdamState,
    lr: float = 1e-3,
) -> AdamState:
    """Standard Adam update with bias correction, applied in place."""
    state.step += 1
    bc1 = 1.0 - state.beta1 ** state.step
    bc2 = 1.0 - state.beta2 ** state.step
    for name, grad in grads.items():
        m = state.m[name]
        v = state.v[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * grad
        v *= state.beta2
        v += (1.0 - state.beta2) * (grad * grad)
        tensors[name] -= lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
    return state


def clip_gradients(grads: dict[str, np.ndarray], max_norm: float) -> float:
    """Scale all gradients so their global L2 norm is at most max_norm."""
    total = np.sqrt(sum(float((g * g).sum()) for g in grads.values()))
    if total > max_norm and total > 0:
        scale = max_norm / total
        for g in grads.values():
            g *= scale
    return total


def fit(
    params: ModelParams,
    id_seqs: list[list[int]],
    targets: list,
    rng: np.random.Generator,
    debug_checks: bool = True,
    log_every: int = 1,
) -> list[float]:
    """Train in place with shuffled padded mini-batches; returns epoch losses."""
    if not id_seqs:
        raise EmptyTrainingSet("no training sequences")
    hyper = params.hyper
    state = AdamState.for_params(params.tensors)
    boundary = params.kind == "boundary"
    history: list[float] = []
    n = len(id_seqs)
    for epoch in range(hyper.epochs):
        order = rng.permutation(n)
        loss_sum = 0.0
        weight_sum = 0.0
        for start in range(0, n, hyper.batch_size):
            take = order[start:start + hyper.batch_size]
            seqs = [id_seqs[i] for i in take]
            if boundary:
                batch = pack_batch(seqs, labels=[targets[i] for i in take])
                weight = batch.mask.sum()
            else:
                batch = pack_batch(seqs, classes=[targets[i] for i in take])
                weight = float(len(take))
            loss, grads = forward_backward(params, batch)
            if debug_checks:
                check_finite("loss", loss)
                for name, grad in grads.items():
                    check_finite(f"grad[{name}]", grad)
            clip_gradients(grads, hyper.clip_norm)
            adam_step(params.tensors, grads, state, hyper.lr)
            if debug_checks:
                for name, tensor in params.tensors.items():
                    check_finite(f"param[{name}]", tensor)
            loss_sum += loss * weight
            weight_sum += weight
        history.append(loss_sum / weight_sum)
        if log_every and (epoch + 1) % log_every == 0:
            _logger.info("epoch %d/%d loss %.6f", epoch + 1, hyper.epochs, history[-1])
    return history


@dataclass
class GradCheckResult:
    max_rel_error: float
    worst_param: str


def grad_check(
    params: ModelParams,
    batch: Batch,
    eps: float = 1e-5,
    analytic: dict[str, np.ndarray] | None = None,
) -> GradCheckResult:
    """Central finite differences against analytic gradients, per component.

    Relative error per component is |a - n| / max(|a|, |n|, 1e-8); the
    maximum over all components is returned.  Intended for tiny models only.
    When analytic is given it is checked instead of freshly computed
    gradients (test hook for proving the checker catches wrong gradients).
    """
    if analytic is None:
        _, analytic = forward_backward(params, batch)
    worst = 0.0
    worst_name = ""
    for name in TENSOR_ORDER:
        tensor = params.tensors[name]
        grad = analytic[name]
        flat = tensor.reshape(-1)
        grad_flat = grad.reshape(-1)
        for idx in range(flat.size):
            saved = flat[idx]
            flat[idx] = saved + eps
            loss_plus = compute_loss(params, batch)
            flat[idx] = saved - eps
            loss_minus = compute_loss(params, batch)
            flat[idx] = saved
            numeric = (loss_plus - loss_minus) / (2.0 * eps)
            a = grad_flat[idx]
            rel = abs(a - numeric) / max(abs(a), abs(numeric), 1e-8)
            if rel > worst:
                worst = rel
                worst_name = f"{name}[{idx}]"
    return GradCheckResult(max_rel_error=worst, worst_param=worst_name)
