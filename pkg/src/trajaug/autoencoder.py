"""LSTM sequence autoencoder trained by backprop-through-time.

Single-layer LSTM encoder and decoder, written directly in numpy so the
whole toolkit stays dependency-light and bit-deterministic. The encoder's
final hidden state is the embedding; the decoder starts from a linear map
of that state and consumes zero inputs (no teacher forcing). Training is
plain SGD with momentum over mean-squared reconstruction error.

Checkpoint layout (JSON): format_version, hidden_dim, feature_dim, one
entry per tensor in TENSOR_FIELDS order, and the normalization stats.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError, ShapeMismatchError, TrainingDivergedError
from .features import N_FEATURES, FeatureWindow, NormStats

CHECKPOINT_VERSION = 1

# serialization and init-draw order; gates stack as (input, forget, cell, output)
TENSOR_FIELDS = (
    "enc_wx",
    "enc_wh",
    "enc_b",
    "dec_wx",
    "dec_wh",
    "dec_b",
    "init_w",
    "init_b",
    "out_w",
    "out_b",
)

INIT_SCALE = 0.1


@dataclass(frozen=True)
class AeParams:
    """All autoencoder weights. Gate blocks stacked along the first axis."""

    hidden_dim: int
    enc_wx: np.ndarray  # (4H, F)
    enc_wh: np.ndarray  # (4H, H)
    enc_b: np.ndarray  # (4H,)
    dec_wx: np.ndarray  # (4H, F) — decoder inputs are zero; kept for shape symmetry
    dec_wh: np.ndarray  # (4H, H)
    dec_b: np.ndarray  # (4H,)
    init_w: np.ndarray  # (2H, H) latent -> [h0; c0]
    init_b: np.ndarray  # (2H,)
    out_w: np.ndarray  # (F, H)
    out_b: np.ndarray  # (F,)

    def __post_init__(self):
        h = self.hidden_dim
        f = self.feature_dim
        expected = {
            "enc_wx": (4 * h, f),
            "enc_wh": (4 * h, h),
            "enc_b": (4 * h,),
            "dec_wx": (4 * h, f),
            "dec_wh": (4 * h, h),
            "dec_b": (4 * h,),
            "init_w": (2 * h, h),
            "init_b": (2 * h,),
            "out_w": (f, h),
            "out_b": (f,),
        }
        for name, shape in expected.items():
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != shape:
                raise ShapeMismatchError(f"{name}: expected {shape}, got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ShapeMismatchError(f"{name}: non-finite entries")
            object.__setattr__(self, name, arr)

    @property
    def feature_dim(self):
        return np.asarray(self.enc_wx).shape[1]

    def tensors(self):
        return {name: getattr(self, name) for name in TENSOR_FIELDS}

    def n_params(self):
        return sum(t.size for t in self.tensors().values())

    def with_tensors(self, tensors):
        return AeParams(hidden_dim=self.hidden_dim, **tensors)


@dataclass(frozen=True)
class Embedding:
    """Latent vector for one feature window, with its provenance."""

    traj_id: str
    start_index: int
    z: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        if not np.all(np.isfinite(z)):
            raise DegenerateInputError("embedding contains non-finite values")
        object.__setattr__(self, "z", z)

    @property
    def key(self):
        return (self.traj_id, self.start_index)


@dataclass(frozen=True)
class TrainConfig:
    hidden_dim: int = 32
    epochs: int = 200
    batch_size: int = 8
    learning_rate: float = 1e-2
    momentum: float = 0.9
    seed: int = 0

    def __post_init__(self):
        if min(self.hidden_dim, self.epochs, self.batch_size) < 1:
            raise DegenerateInputError("hidden_dim, epochs, batch_size must be >= 1")
        if self.learning_rate <= 0 or not 0 <= self.momentum < 1:
            raise DegenerateInputError("need learning_rate > 0 and momentum in [0, 1)")


def init_params(hidden_dim, feature_dim=N_FEATURES, seed=0):
    """Seeded uniform initialization in [-0.1, 0.1], drawn in TENSOR_FIELDS order."""
    h, f = hidden_dim, feature_dim
    shapes = {
        "enc_wx": (4 * h, f),
        "enc_wh": (4 * h, h),
        "enc_b": (4 * h,),
        "dec_wx": (4 * h, f),
        "dec_wh": (4 * h, h),
        "dec_b": (4 * h,),
        "init_w": (2 * h, h),
        "init_b": (2 * h,),
        "out_w": (f, h),
        "out_b": (f,),
    }
    rng = np.random.default_rng(seed)
    tensors = {
        name: rng.uniform(-INIT_SCALE, INIT_SCALE, size=shapes[name])
        for name in TENSOR_FIELDS
    }
    return AeParams(hidden_dim=hidden_dim, **tensors)


def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _lstm_forward(wx, wh, b, inputs, h0, c0):
    """Run an LSTM over `inputs` (list of (B, F) steps or None for zeros).

    Returns the final (h, c) and the per-step cache needed for backprop.
    """
    hidden = wh.shape[1]
    h, c = h0, c0
    cache = []
    for x in inputs:
        pre = h @ wh.T + b
        if x is not None:
            pre = pre + x @ wx.T
        i = _sigmoid(pre[:, :hidden])
        f = _sigmoid(pre[:, hidden : 2 * hidden])
        g = np.tanh(pre[:, 2 * hidden : 3 * hidden])
        o = _sigmoid(pre[:, 3 * hidden :])
        c_new = f * c + i * g
        tc = np.tanh(c_new)
        h_new = o * tc
        cache.append((x, h, c, i, f, g, o, c_new, tc))
        h, c = h_new, c_new
    return h, c, cache


def _lstm_backward(wx, wh, cache, d_h_steps, d_h_final, d_c_final):
    """BPTT through one LSTM. `d_h_steps[t]` is the loss gradient arriving at
    the step-t hidden output (None if unused); `d_h_final`/`d_c_final` arrive
    at the last state. Returns parameter grads and the gradient at (h0, c0).
    """
    hidden = wh.shape[1]
    d_wx = np.zeros_like(wx)
    d_wh = np.zeros_like(wh)
    d_b = np.zeros(wh.shape[0])
    dh = d_h_final
    dc = d_c_final
    for t in range(len(cache) - 1, -1, -1):
        x, h_prev, c_prev, i, f, g, o, c_new, tc = cache[t]
        if d_h_steps is not None and d_h_steps[t] is not None:
            dh = dh + d_h_steps[t]
        do = dh * tc
        dc = dc + dh * o * (1.0 - tc * tc)
        di = dc * g
        dg = dc * i
        df = dc * c_prev
        dpre = np.concatenate(
            [
                di * i * (1.0 - i),
                df * f * (1.0 - f),
                dg * (1.0 - g * g),
                do * o * (1.0 - o),
            ],
            axis=1,
        )
        if x is not None:
            d_wx += dpre.T @ x
        d_wh += dpre.T @ h_prev
        d_b += dpre.sum(axis=0)
        dh = dpre @ wh
        dc = dc * f
    return d_wx, d_wh, d_b, dh, dc


def _encode_batch(params: AeParams, data):
    """Encoder forward over a (B, F, T) batch; returns z (B, H) and cache."""
    b = data.shape[0]
    h0 = np.zeros((b, params.hidden_dim))
    inputs = [data[:, :, t] for t in range(data.shape[2])]
    z, c, cache = _lstm_forward(params.enc_wx, params.enc_wh, params.enc_b, inputs, h0, h0)
    return z, cache


def _step_outputs(cache):
    """Per-step hidden outputs h_t = o_t * tanh(c_t) from a forward cache."""
    return [step[6] * step[8] for step in cache]


def _decode_batch(params: AeParams, z, n_steps):
    """Decoder forward from latent z (B, H); returns recon (B, F, T) and caches."""
    hc = z @ params.init_w.T + params.init_b
    h0, c0 = hc[:, : params.hidden_dim], hc[:, params.hidden_dim :]
    _, _, cache = _lstm_forward(
        params.dec_wx, params.dec_wh, params.dec_b, [None] * n_steps, h0, c0
    )
    hs = _step_outputs(cache)
    recon = np.stack([h @ params.out_w.T + params.out_b for h in hs], axis=2)
    return recon, hs, cache


def encode(params: AeParams, window: FeatureWindow) -> Embedding:
    """Embed one window: the encoder's final hidden state."""
    _check_feature_dim(params, window.data.shape[0])
    z, _ = _encode_batch(params, window.data[None, :, :])
    return Embedding(traj_id=window.traj_id, start_index=window.start_index, z=z[0])


def decode(params: AeParams, z, n_steps: int):
    """Reconstruct an F x T matrix from a latent vector."""
    z = np.asarray(z, dtype=float)
    if z.shape != (params.hidden_dim,):
        raise ShapeMismatchError(f"latent must be ({params.hidden_dim},), got {z.shape}")
    recon, _, _ = _decode_batch(params, z[None, :], n_steps)
    return recon[0]


def reconstruction_loss(window_data, recon):
    """Mean squared error over all F*T entries."""
    a = np.asarray(window_data, dtype=float)
    b = np.asarray(recon, dtype=float)
    if a.shape != b.shape:
        raise ShapeMismatchError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.mean((a - b) ** 2))


def _loss_and_grads(params: AeParams, data):
    """Mean reconstruction loss over a (B, F, T) batch and its gradients."""
    b, f, t = data.shape
    z, enc_cache = _encode_batch(params, data)
    recon, _, dec_cache = _decode_batch(params, z, t)
    resid = recon - data
    loss = float(np.mean(resid * resid))

    d_recon = 2.0 * resid / resid.size  # (B, F, T)
    d_h_steps = [d_recon[:, :, s] @ params.out_w for s in range(t)]
    hs = _step_outputs(dec_cache)
    d_out_w = sum(d_recon[:, :, s].T @ hs[s] for s in range(t))
    d_out_b = d_recon.sum(axis=(0, 2))

    zero_h = np.zeros((b, params.hidden_dim))
    d_dec_wx, d_dec_wh, d_dec_b, dh0, dc0 = _lstm_backward(
        params.dec_wx, params.dec_wh, dec_cache, d_h_steps, zero_h, zero_h
    )
    d_hc = np.concatenate([dh0, dc0], axis=1)
    d_init_w = d_hc.T @ z
    d_init_b = d_hc.sum(axis=0)
    dz = d_hc @ params.init_w

    d_enc_wx, d_enc_wh, d_enc_b, _, _ = _lstm_backward(
        params.enc_wx, params.enc_wh, enc_cache, None, dz, zero_h
    )
    grads = {
        "enc_wx": d_enc_wx,
        "enc_wh": d_enc_wh,
        "enc_b": d_enc_b,
        "dec_wx": d_dec_wx,
        "dec_wh": d_dec_wh,
        "dec_b": d_dec_b,
        "init_w": d_init_w,
        "init_b": d_init_b,
        "out_w": d_out_w,
        "out_b": d_out_b,
    }
    return loss, grads


def grad(params: AeParams, window: FeatureWindow):
    """Gradient of the reconstruction loss w.r.t. every parameter tensor."""
    _check_feature_dim(params, window.data.shape[0])
    _, grads = _loss_and_grads(params, window.data[None, :, :])
    return grads


def _check_feature_dim(params, f):
    if f != params.feature_dim:
        raise ShapeMismatchError(
            f"window has {f} features, model expects {params.feature_dim}"
        )


def dataset_loss(params: AeParams, windows):
    """Mean reconstruction loss over a list of windows."""
    data = np.stack([w.data for w in windows])
    z, _ = _encode_batch(params, data)
    recon, _, _ = _decode_batch(params, z, data.shape[2])
    return float(np.mean((recon - data) ** 2))


def train(windows, config: TrainConfig = TrainConfig()):
    """Train the autoencoder; returns (params, loss_curve).

    loss_curve[0] is the full-dataset loss at initialization and
    loss_curve[e] the loss after epoch e, so the curve has epochs + 1
    entries. Identical (windows, config) reproduce the run bit-for-bit.
    """
    if not windows:
        raise DegenerateInputError("cannot train on zero windows")
    lengths = {w.data.shape[1] for w in windows}
    if len(lengths) != 1:
        raise ShapeMismatchError(f"mixed window lengths {sorted(lengths)}")
    data = np.stack([w.data for w in windows])
    n = data.shape[0]

    params = init_params(config.hidden_dim, data.shape[1], seed=config.seed)
    velocity = {name: np.zeros_like(t) for name, t in params.tensors().items()}
    shuffle_rng = np.random.default_rng(config.seed + 1)

    curve = [dataset_loss(params, windows)]
    for epoch in range(1, config.epochs + 1):
        order = shuffle_rng.permutation(n)
        for lo in range(0, n, config.batch_size):
            batch = data[order[lo : lo + config.batch_size]]
            loss, grads = _loss_and_grads(params, batch)
            if not np.isfinite(loss):
                raise TrainingDivergedError(epoch)
            tensors = params.tensors()
            for name in TENSOR_FIELDS:
                velocity[name] = (
                    config.momentum * velocity[name] - config.learning_rate * grads[name]
                )
                tensors[name] = tensors[name] + velocity[name]
            params = params.with_tensors(tensors)
        epoch_loss = dataset_loss(params, windows)
        if not np.isfinite(epoch_loss):
            raise TrainingDivergedError(epoch)
        curve.append(epoch_loss)
    return params, curve


def save_checkpoint(path, params: AeParams, stats: NormStats):
    """Write model weights + normalization stats as deterministic JSON."""
    doc = {
        "format_version": CHECKPOINT_VERSION,
        "hidden_dim": params.hidden_dim,
        "feature_dim": int(params.feature_dim),
        "tensors": {name: t.tolist() for name, t in params.tensors().items()},
        "norm_mean": stats.mean.tolist(),
        "norm_std": stats.std.tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_checkpoint(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format_version") != CHECKPOINT_VERSION:
        raise ShapeMismatchError(
            f"unsupported checkpoint version {doc.get('format_version')}"
        )
    tensors = {name: np.asarray(doc["tensors"][name], dtype=float) for name in TENSOR_FIELDS}
    params = AeParams(hidden_dim=int(doc["hidden_dim"]), **tensors)
    stats = NormStats(
        mean=np.asarray(doc["norm_mean"], dtype=float),
        std=np.asarray(doc["norm_std"], dtype=float),
    )
    return params, stats
