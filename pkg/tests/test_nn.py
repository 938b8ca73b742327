"""Neural core tests.

The scalar oracle below re-implements the LSTM recurrence and both heads
with plain Python floats and math functions, sharing no code with the
vectorized path it checks.
"""

import math

import numpy as np
import pytest

from gujmorph import nn
from gujmorph.errors import NonFiniteError, ShapeMismatch
from gujmorph.script import build_vocab, encode_ids

# ---------------------------------------------------------------- oracle


def _sig(z):
    return 1.0 / (1.0 + math.exp(-z))


def scalar_lstm_step(w, u, b, x, h_prev, c_prev):
    """Gate-by-gate scalar LSTM step (lists in, lists out)."""
    h_dim = len(h_prev)
    e_dim = len(x)

    def pre(gate):
        out = []
        for j in range(h_dim):
            col = gate * h_dim + j
            total = b[col]
            for k in range(e_dim):
                total += x[k] * w[k][col]
            for k in range(h_dim):
                total += h_prev[k] * u[k][col]
            out.append(total)
        return out

    i = [_sig(v) for v in pre(0)]
    f = [_sig(v) for v in pre(1)]
    g = [math.tanh(v) for v in pre(2)]
    o = [_sig(v) for v in pre(3)]
    c = [f[j] * c_prev[j] + i[j] * g[j] for j in range(h_dim)]
    h = [o[j] * math.tanh(c[j]) for j in range(h_dim)]
    return h, c


def scalar_bilstm(params, ids):
    """Independent full forward pass: list of per-position 2H state lists."""
    t_len = len(ids)
    e = params.hyper.embed_dim
    h_dim = params.hyper.hidden_dim
    emb = params.tensors["embedding"].tolist()
    xs = [emb[i] for i in ids]

    def run(prefix, order):
        w = params.tensors[prefix + ".W"].tolist()
        u = params.tensors[prefix + ".U"].tolist()
        b = params.tensors[prefix + ".b"].tolist()
        h = [0.0] * h_dim
        c = [0.0] * h_dim
        states = [None] * t_len
        for t in order:
            h, c = scalar_lstm_step(w, u, b, xs[t], h, c)
            states[t] = h
        return states

    fwd = run("fwd", range(t_len))
    bwd = run("bwd", range(t_len - 1, -1, -1))
    return [fwd[t] + bwd[t] for t in range(t_len)]


def _toy_params(kind, seed=0, n_classes=3, e=3, h=4):
    vocab = build_vocab(["abcde"])
    hyper = nn.Hyper(embed_dim=e, hidden_dim=h, seed=seed)
    rng = np.random.default_rng(seed)
    classes = [f"N;M;SG;{c}" for c in ("NOM", "GEN", "LOC")][:n_classes]
    if kind == "class":
        return nn.init_params("class", vocab, hyper, classes=classes, rng=rng)
    return nn.init_params("boundary", vocab, hyper, rng=rng)


# ------------------------------------------------------------- cell step


def test_cell_step_all_zero_weights_gives_zero_state():
    e, h = 3, 4
    zeros = lambda *shape: np.zeros(shape)
    h_t, c_t = nn.lstm_cell_step(
        zeros(e, 4 * h), zeros(h, 4 * h), zeros(4 * h),
        np.ones(e), zeros(h), zeros(h),
    )
    assert np.allclose(c_t, 0.0)
    assert np.allclose(h_t, 0.0)


def test_cell_step_saturated_forget_gate_carries_cell():
    rng = np.random.default_rng(0)
    e, h = 3, 4
    w = rng.normal(size=(e, 4 * h)) * 0.1
    u = rng.normal(size=(h, 4 * h)) * 0.1
    b = np.zeros(4 * h)
    b[h:2 * h] = 30.0  # forget gate pinned at ~1
    x = rng.normal(size=e)
    h_prev = rng.normal(size=h) * 0.1
    c_prev = rng.normal(size=h)
    h_t, c_t = nn.lstm_cell_step(w, u, b, x, h_prev, c_prev)

    # with f ~= 1: c_t ~= c_prev + i*g
    pre = x @ w + h_prev @ u + b
    i = 1 / (1 + np.exp(-pre[:h]))
    g = np.tanh(pre[2 * h:3 * h])
    assert np.allclose(c_t, c_prev + i * g, atol=1e-10)


def test_cell_step_matches_scalar_oracle():
    rng = np.random.default_rng(42)
    e, h = 3, 5
    w = rng.normal(size=(e, 4 * h)) * 0.5
    u = rng.normal(size=(h, 4 * h)) * 0.5
    b = rng.normal(size=4 * h) * 0.5
    x = rng.normal(size=e)
    h_prev = rng.normal(size=h) * 0.3
    c_prev = rng.normal(size=h) * 0.3
    h_t, c_t = nn.lstm_cell_step(w, u, b, x, h_prev, c_prev)
    h_ref, c_ref = scalar_lstm_step(
        w.tolist(), u.tolist(), b.tolist(), x.tolist(), h_prev.tolist(), c_prev.tolist()
    )
    assert np.allclose(h_t, h_ref, atol=1e-12)
    assert np.allclose(c_t, c_ref, atol=1e-12)
    assert np.all(np.abs(h_t) < 1.0)


def test_cell_step_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        nn.lstm_cell_step(
            np.zeros((3, 16)), np.zeros((4, 16)), np.zeros(16),
            np.zeros(2), np.zeros(4), np.zeros(4),
        )


# --------------------------------------------------------------- encoder


def test_bilstm_forward_t1_dimension():
    params = _toy_params("boundary")
    states = nn.bilstm_forward(params, [2])
    assert states.shape == (1, 2 * params.hyper.hidden_dim)


def test_bilstm_forward_rejects_empty():
    params = _toy_params("boundary")
    with pytest.raises(ShapeMismatch):
        nn.bilstm_forward(params, [])


def test_bilstm_matches_scalar_oracle():
    params = _toy_params("boundary", seed=3)
    ids = encode_ids(params.vocab, "dcabe")
    states = nn.bilstm_forward(params, ids)
    ref = scalar_bilstm(params, ids)
    assert np.allclose(states, np.array(ref), atol=1e-12)


def test_bilstm_palindrome_symmetry_with_tied_weights():
    params = _toy_params("boundary", seed=5)
    for name in ("W", "U", "b"):
        params.tensors[f"bwd.{name}"] = params.tensors[f"fwd.{name}"].copy()
    h = params.hyper.hidden_dim
    ids = encode_ids(params.vocab, "abcba")
    states = nn.bilstm_forward(params, ids)
    swapped = np.concatenate([states[:, h:], states[:, :h]], axis=1)
    assert np.allclose(states, swapped[::-1], atol=1e-12)


def test_bilstm_equals_two_independent_passes():
    params = _toy_params("boundary", seed=7)
    ids = encode_ids(params.vocab, "ecbad")
    states = nn.bilstm_forward(params, ids)
    h_dim = params.hyper.hidden_dim
    emb = params.tensors["embedding"]

    def run_dir(prefix, order):
        w = params.tensors[prefix + ".W"]
        u = params.tensors[prefix + ".U"]
        b = params.tensors[prefix + ".b"]
        h = np.zeros(h_dim)
        c = np.zeros(h_dim)
        out = {}
        for t in order:
            h, c = nn.lstm_cell_step(w, u, b, emb[ids[t]], h, c)
            out[t] = h
        return out

    fwd = run_dir("fwd", range(len(ids)))
    bwd = run_dir("bwd", range(len(ids) - 1, -1, -1))
    for t in range(len(ids)):
        assert np.allclose(states[t], np.concatenate([fwd[t], bwd[t]]), atol=1e-12)


# ------------------------------------------------------------------ heads


def test_boundary_head_zero_weights_gives_half():
    params = _toy_params("boundary")
    params.tensors["head.W"][:] = 0.0
    params.tensors["head.b"][:] = 0.0
    states = nn.bilstm_forward(params, encode_ids(params.vocab, "abc"))
    assert np.allclose(nn.boundary_head(params, states), 0.5)


def test_boundary_head_monotone_in_bias():
    params = _toy_params("boundary")
    states = nn.bilstm_forward(params, encode_ids(params.vocab, "abc"))
    low = nn.boundary_head(params, states).copy()
    params.tensors["head.b"][:] += 2.0
    high = nn.boundary_head(params, states)
    assert np.all(high > low)


def test_boundary_head_matches_scalar_oracle():
    params = _toy_params("boundary", seed=11)
    ids = encode_ids(params.vocab, "badc")
    states = nn.bilstm_forward(params, ids)
    probs = nn.boundary_head(params, states)
    w = params.tensors["head.W"][:, 0].tolist()
    b = float(params.tensors["head.b"][0])
    ref = scalar_bilstm(params, ids)
    for t in range(len(ids)):
        logit = b + sum(ref[t][k] * w[k] for k in range(len(w)))
        assert probs[t] == pytest.approx(_sig(logit), abs=1e-12)
        assert 0.0 < probs[t] < 1.0


def test_class_head_zero_weights_uniform():
    params = _toy_params("class")
    params.tensors["head.W"][:] = 0.0
    params.tensors["head.b"][:] = 0.0
    states = nn.bilstm_forward(params, encode_ids(params.vocab, "abc"))
    dist = nn.class_head(params, states)
    assert np.allclose(dist, 1.0 / 3.0)


def test_class_head_shift_invariant():
    params = _toy_params("class", seed=13)
    states = nn.bilstm_forward(params, encode_ids(params.vocab, "dab"))
    before = nn.class_head(params, states).copy()
    params.tensors["head.b"][:] += 7.5
    after = nn.class_head(params, states)
    assert np.allclose(before, after, atol=1e-12)


def test_class_head_matches_scalar_oracle_and_sums_to_one():
    params = _toy_params("class", seed=17)
    ids = encode_ids(params.vocab, "ceba")
    states = nn.bilstm_forward(params, ids)
    dist = nn.class_head(params, states)
    assert abs(dist.sum() - 1.0) < 1e-9

    h_dim = params.hyper.hidden_dim
    ref = scalar_bilstm(params, ids)
    pooled = ref[-1][:h_dim] + ref[0][h_dim:]
    w = params.tensors["head.W"].tolist()
    b = params.tensors["head.b"].tolist()
    logits = [
        b[c] + sum(pooled[k] * w[k][c] for k in range(2 * h_dim))
        for c in range(len(b))
    ]
    mx = max(logits)
    exps = [math.exp(v - mx) for v in logits]
    total = sum(exps)
    for c, e in enumerate(exps):
        assert dist[c] == pytest.approx(e / total, abs=1e-12)


# ----------------------------------------------------------------- losses


def test_bce_perfect_prediction_near_zero():
    assert nn.bce_loss(np.array([1.0, 0.0]), np.array([1.0, 0.0])) < 1e-10


def test_bce_half_everywhere_is_ln2():
    loss = nn.bce_loss(np.full(6, 0.5), np.array([0, 1, 0, 1, 1, 0], dtype=float))
    assert loss == pytest.approx(math.log(2), abs=1e-12)


def test_bce_matches_high_precision_oracle():
    rng = np.random.default_rng(23)
    p = rng.uniform(0.01, 0.99, size=10)
    y = rng.integers(0, 2, size=10).astype(float)
    expected = -sum(
        yi * math.log(pi) + (1 - yi) * math.log(1 - pi) for pi, yi in zip(p, y)
    ) / 10
    assert nn.bce_loss(p, y) == pytest.approx(expected, abs=1e-14)


def test_cce_perfect_and_random():
    assert nn.cce_loss(np.array([0.0, 1.0, 0.0]), 1) < 1e-10
    p = np.array([0.2, 0.5, 0.3])
    assert nn.cce_loss(p, 2) == pytest.approx(-math.log(0.3), abs=1e-14)
    assert nn.cce_loss(p, 2) >= 0.0


# ------------------------------------------------------------- grad check


def _toy_batch(params, seed=0):
    rng = np.random.default_rng(seed)
    words = ["abc", "edcba", "da", "cabde"]
    id_seqs = [encode_ids(params.vocab, w) for w in words]
    if params.kind == "boundary":
        labels = [
            [int(rng.random() < 0.4) if i < len(s) - 1 else 0 for i in range(len(s))]
            for s in id_seqs
        ]
        return nn.pack_batch(id_seqs, labels=labels)
    targets = [int(rng.integers(params.out_dim)) for _ in id_seqs]
    return nn.pack_batch(id_seqs, classes=targets)


@pytest.mark.parametrize("kind", ["boundary", "class"])
@pytest.mark.parametrize("seed", [0, 1])
def test_grad_check_both_heads(kind, seed):
    params = _toy_params(kind, seed=seed, e=4, h=6)
    batch = _toy_batch(params, seed=seed)
    result = nn.grad_check(params, batch)
    assert result.max_rel_error < 1e-4, result.worst_param


def test_grad_check_unused_embedding_row_is_zero_both_ways():
    params = _toy_params("boundary", seed=2)
    batch = _toy_batch(params, seed=2)
    grads = nn.backward(params, batch)
    used = set(batch.ids.ravel().tolist())
    unused = [i for i in range(params.vocab.size) if i not in used]
    assert unused, "toy vocab should have at least one unused id"
    for row in unused:
        assert np.allclose(grads["embedding"][row], 0.0)
    # numeric side: perturbing an unused row cannot change the loss
    base = nn.compute_loss(params, batch)
    params.tensors["embedding"][unused[0], 0] += 1e-3
    assert nn.compute_loss(params, batch) == pytest.approx(base, abs=1e-15)


def test_grad_check_catches_corrupted_gradient():
    params = _toy_params("boundary", seed=0)
    batch = _toy_batch(params, seed=0)
    grads = nn.backward(params, batch)
    grads["head.b"] = grads["head.b"] + 0.5
    result = nn.grad_check(params, batch, analytic=grads)
    assert result.max_rel_error > 1e-2


def test_backward_padding_isolated():
    # gradients of a padded batch match the sum of per-sequence gradients
    params = _toy_params("boundary", seed=9)
    words = ["ab", "edcba"]
    id_seqs = [encode_ids(params.vocab, w) for w in words]
    labels = [[1, 0], [0, 0, 1, 0, 0]]
    batch = nn.pack_batch(id_seqs, labels=labels)
    _, grads = nn.forward_backward(params, batch)

    total_mask = sum(len(w) for w in words)
    merged = None
    for seq, lab in zip(id_seqs, labels):
        single = nn.pack_batch([seq], labels=[lab])
        _, g = nn.forward_backward(params, single)
        scale = len(seq) / total_mask  # reweight per-sequence mean to batch mean
        if merged is None:
            merged = {k: v * scale for k, v in g.items()}
        else:
            for k, v in g.items():
                merged[k] += v * scale
    for name in grads:
        assert np.allclose(grads[name], merged[name], atol=1e-12), name


# ------------------------------------------------------------------- adam


def test_adam_zero_gradient_leaves_params():
    tensors = {"w": np.array([1.0, -2.0, 3.0])}
    state = nn.AdamState.for_params(tensors)
    nn.adam_step(tensors, {"w": np.zeros(3)}, state, lr=0.1)
    assert np.allclose(tensors["w"], [1.0, -2.0, 3.0])


def test_adam_first_step_closed_form():
    g = np.array([0.3, -1.7, 0.002])
    tensors = {"w": np.zeros(3)}
    state = nn.AdamState.for_params(tensors)
    nn.adam_step(tensors, {"w": g.copy()}, state, lr=1e-3)
    expected = -1e-3 * g / (np.sqrt(g * g) + 1e-8)
    assert np.allclose(tensors["w"], expected, atol=1e-12)


def test_adam_converges_on_quadratic():
    # minimize (w - 3)^2 with a plain scalar loop as the oracle trajectory
    tensors = {"w": np.array([0.0])}
    state = nn.AdamState.for_params(tensors)
    for _ in range(100):
        grad = 2.0 * (tensors["w"] - 3.0)
        nn.adam_step(tensors, {"w": grad}, state, lr=0.1)
    assert abs(float(tensors["w"][0]) - 3.0) < abs(0.0 - 3.0) * 0.2


def test_clip_gradients_scales_to_norm():
    grads = {"a": np.array([3.0, 4.0]), "b": np.array([0.0])}
    norm = nn.clip_gradients(grads, 1.0)
    assert norm == pytest.approx(5.0)
    total = np.sqrt(sum(float((g * g).sum()) for g in grads.values()))
    assert total == pytest.approx(1.0)


# --------------------------------------------------------------- training


def test_fit_loss_mostly_non_increasing_first_20_steps():
    params = _toy_params("boundary", seed=0, e=4, h=6)
    batch = _toy_batch(params, seed=0)
    state = nn.AdamState.for_params(params.tensors)
    losses = []
    for _ in range(21):
        loss, grads = nn.forward_backward(params, batch)
        losses.append(loss)
        nn.clip_gradients(grads, 5.0)
        nn.adam_step(params.tensors, grads, state, lr=1e-3)
    increases = sum(1 for a, b in zip(losses, losses[1:]) if b > a + 1e-12)
    assert increases <= 2
    assert losses[-1] < losses[0]


def test_fit_deterministic_under_seed():
    def train_once():
        params = _toy_params("boundary", seed=4)
        seqs = [encode_ids(params.vocab, w) for w in ("abc", "de", "bcd")]
        labels = [[1, 0, 0], [0, 0], [0, 1, 0]]
        rng = np.random.default_rng(4)
        nn.fit(params, seqs, labels, rng)
        return params

    a, b = train_once(), train_once()
    for name in nn.TENSOR_ORDER:
        assert np.array_equal(a.tensors[name], b.tensors[name]), name


def test_non_finite_is_hard_error():
    with pytest.raises(NonFiniteError):
        nn.check_finite("x", np.array([1.0, np.nan]))
    with pytest.raises(NonFiniteError):
        nn.check_finite("x", float("inf"))
