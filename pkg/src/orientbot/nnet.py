"""A small feed-forward CNN engine: conv, LRN, ReLU, flatten, FC, softmax.

Arrays are float64, channel-last. Image batches are (N, H, W, C); convolution
filters are (kh, kw, in_channels, out_channels); FC weights are (in, out).
Every ``*_forward`` returns ``(out, cache)`` and the matching ``*_backward``
consumes that cache.
"""
from __future__ import annotations

import logging
import math
import struct
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .errors import MagicMismatchError, TruncatedFileError, VersionMismatchError

log = logging.getLogger(__name__)

INPUT_SHAPE = (32, 32, 3)
N_CLASSES = 8

LRN_DEFAULTS = dict(k=2.0, n=5, alpha=1e-4, beta=0.75)


class ShapeError(ValueError):
    pass


class DivergenceError(RuntimeError):
    def __init__(self, step: int, loss: float):
        super().__init__(f"training diverged at step {step} (loss={loss})")
        self.step = step
        self.loss = loss


def _as_batch(x):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 3:
        return x[None], True
    if x.ndim != 4:
        raise ShapeError(f"expected (H, W, C) or (N, H, W, C) input, got shape {x.shape}")
    return x, False


def conv_output_size(size: int, k: int, stride: int, padding: str) -> tuple[int, int]:
    """Return (output extent, per-side zero padding)."""
    if padding == "same":
        pad = (k - 1) // 2
    elif padding == "valid":
        pad = 0
    else:
        raise ValueError(f"unknown padding {padding!r}")
    return (size + 2 * pad - k) // stride + 1, pad


# --------------------------------------------------------------------- conv

def conv2d_forward(x, filters, bias=None, stride: int = 1, padding: str = "same"):
    """Strided 2-D cross-correlation plus per-filter bias (no activation)."""
    xb, single = _as_batch(x)
    filters = np.asarray(filters, dtype=np.float64)
    if filters.ndim != 4 or filters.shape[0] != filters.shape[1]:
        raise ShapeError(f"filters must be (k, k, in, out), got {filters.shape}")
    k, _, cin, cout = filters.shape
    if xb.shape[3] != cin:
        raise ShapeError(f"input has {xb.shape[3]} channels but filters expect {cin} "
                         f"(input {xb.shape}, filters {filters.shape})")
    if stride < 1:
        raise ShapeError(f"stride must be >= 1, got {stride}")
    if bias is None:
        bias = np.zeros(cout)
    bias = np.asarray(bias, dtype=np.float64)
    if bias.shape != (cout,):
        raise ShapeError(f"bias must be ({cout},), got {bias.shape}")
    n, h, w, _ = xb.shape
    oh, pad = conv_output_size(h, k, stride, padding)
    ow, _ = conv_output_size(w, k, stride, padding)
    if oh < 1 or ow < 1:
        raise ShapeError(f"filter {k}x{k} does not fit input {h}x{w} with padding {padding!r}")
    if pad:
        xpad = np.zeros((n, h + 2 * pad, w + 2 * pad, cin))
        xpad[:, pad:pad + h, pad:pad + w, :] = xb
    else:
        xpad = np.ascontiguousarray(xb)
    cols = kernels.im2col(xpad, k, stride, oh, ow)
    out = (cols @ filters.reshape(k * k * cin, cout)).reshape(n, oh, ow, cout) + bias
    cache = dict(cols=cols, filters=filters, x_shape=xb.shape, pad=pad, stride=stride,
                 out_hw=(oh, ow), single=single)
    return (out[0] if single else out), cache


def conv2d_backward(grad_out, cache, need_input_grad: bool = True):
    """Returns (grad_input, grad_filters, grad_bias); grad_input is None if not requested."""
    if not cache:
        raise ValueError("conv2d_backward needs the cache from conv2d_forward")
    g, _ = _as_batch(grad_out)
    filters = cache["filters"]
    k, _, cin, cout = filters.shape
    n, h, w, _ = cache["x_shape"]
    oh, ow = cache["out_hw"]
    if g.shape != (n, oh, ow, cout):
        raise ShapeError(f"grad_out shape {g.shape} does not match forward output {(n, oh, ow, cout)}")
    g2 = g.reshape(-1, cout)
    cols = cache["cols"]
    grad_filters = (cols.T @ g2).reshape(filters.shape)
    grad_bias = g2.sum(axis=0)
    grad_input = None
    if need_input_grad:
        pad, stride = cache["pad"], cache["stride"]
        dcols = g2 @ filters.reshape(k * k * cin, cout).T
        dxpad = kernels.col2im(dcols, n, h + 2 * pad, w + 2 * pad, cin, k, stride, oh, ow)
        grad_input = dxpad[:, pad:pad + h, pad:pad + w, :]
        if cache["single"]:
            grad_input = grad_input[0]
    return grad_input, grad_filters, grad_bias


# ---------------------------------------------------------------------- lrn

def lrn_forward(x, k: float = 2.0, n: int = 5, alpha: float = 1e-4, beta: float = 0.75):
    """Cross-channel local response normalisation over the last axis.

    out[..., c] = x[..., c] / (k + alpha * sum_{|c'-c| <= n//2} x[..., c']**2) ** beta
    """
    if k <= 0:
        raise ValueError(f"LRN constant k must be positive, got {k}")
    if n < 1 or n % 2 == 0:
        raise ValueError(f"LRN window n must be odd, got {n}")
    x = np.ascontiguousarray(x, dtype=np.float64)
    denom = k + alpha * kernels.channel_window_sum(x * x, n // 2)
    scale = denom ** -beta
    return x * scale, dict(x=x, denom=denom, scale=scale, n=n, alpha=alpha, beta=beta)


def lrn_backward(grad_out, cache):
    if not cache:
        raise ValueError("lrn_backward needs the cache from lrn_forward")
    g = np.ascontiguousarray(grad_out, dtype=np.float64)
    if g.shape != cache["x"].shape:
        raise ShapeError(f"grad_out shape {g.shape} != input shape {cache['x'].shape}")
    x, denom, scale = cache["x"], cache["denom"], cache["scale"]
    # d out_i / d x_j = scale_j [i == j] - 2 alpha beta x_j x_i scale_i / denom_i  (j in window(i))
    t = g * x * scale / denom
    acc = kernels.channel_window_sum(t, cache["n"] // 2)
    return g * scale - (2.0 * cache["alpha"] * cache["beta"]) * x * acc


# ------------------------------------------------------- relu, fc, flatten

def relu_forward(x):
    x = np.asarray(x, dtype=np.float64)
    mask = x > 0
    return x * mask, mask


def relu_backward(grad_out, cache):
    if cache is None:
        raise ValueError("relu_backward needs the mask from relu_forward")
    return np.asarray(grad_out, dtype=np.float64) * cache


def fc_forward(x, weights, bias=None):
    x = np.asarray(x, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    if x.shape[-1] != weights.shape[0]:
        raise ShapeError(f"fc input width {x.shape[-1]} != weight rows {weights.shape[0]}")
    out = x @ weights
    if bias is not None:
        out = out + bias
    return out, dict(x=x, weights=weights)


def fc_backward(grad_out, cache, need_input_grad: bool = True):
    if not cache:
        raise ValueError("fc_backward needs the cache from fc_forward")
    g = np.asarray(grad_out, dtype=np.float64)
    x, weights = cache["x"], cache["weights"]
    x2 = x.reshape(-1, x.shape[-1])
    g2 = g.reshape(-1, g.shape[-1])
    grad_w = x2.T @ g2
    grad_b = g2.sum(axis=0)
    grad_x = (g @ weights.T) if need_input_grad else None
    return grad_x, grad_w, grad_b


def flatten_forward(x):
    x = np.asarray(x, dtype=np.float64)
    return x.reshape(x.shape[0], -1), x.shape


def flatten_backward(grad_out, cache):
    return np.asarray(grad_out).reshape(cache)


# ------------------------------------------------------------------ softmax

def softmax(logits):
    z = np.asarray(logits, dtype=np.float64)
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_cross_entropy(logits, labels):
    """Mean cross-entropy and its gradient w.r.t. the logits.

    ``logits`` may be one vector with an int label, or (N, K) with N labels.
    """
    z = np.asarray(logits, dtype=np.float64)
    single = z.ndim == 1
    zb = z[None] if single else z
    y = np.atleast_1d(np.asarray(labels))
    if y.shape != (zb.shape[0],):
        raise ShapeError(f"{zb.shape[0]} logit rows but labels shape {y.shape}")
    if not np.issubdtype(y.dtype, np.integer):
        if np.any(y != np.round(y)):
            raise ValueError("labels must be integer class indices")
        y = y.astype(np.int64)
    if np.any((y < 0) | (y >= zb.shape[1])):
        raise ValueError(f"label out of range 0..{zb.shape[1] - 1}: {y[(y < 0) | (y >= zb.shape[1])][:5]}")
    shifted = zb - zb.max(axis=1, keepdims=True)
    logsum = np.log(np.exp(shifted).sum(axis=1))
    rows = np.arange(zb.shape[0])
    loss = float(np.mean(logsum - shifted[rows, y]))
    p = np.exp(shifted - logsum[:, None])
    grad = p
    grad[rows, y] -= 1.0
    grad /= zb.shape[0]
    return loss, (grad[0] if single else grad)


# -------------------------------------------------------------------- model

KINDS = ("conv", "lrn", "relu", "flatten", "fc", "softmax")


@dataclass(frozen=True)
class LayerSpec:
    kind: str
    size: int = 0          # conv filter size
    in_ch: int = 0         # conv input channels / fc input width
    out_ch: int = 0        # conv filters / fc output width
    stride: int = 1
    padding: str = "same"
    k: float = 2.0         # LRN constants
    n: int = 5
    alpha: float = 1e-4
    beta: float = 0.75

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown layer kind {self.kind!r}")


def paper_layers() -> list[LayerSpec]:
    conv = dict(size=5, out_ch=64, stride=2, padding="same")
    return [
        LayerSpec("conv", in_ch=3, **conv), LayerSpec("lrn", **LRN_DEFAULTS), LayerSpec("relu"),
        LayerSpec("conv", in_ch=64, **conv), LayerSpec("lrn", **LRN_DEFAULTS), LayerSpec("relu"),
        LayerSpec("flatten"),
        LayerSpec("fc", in_ch=8 * 8 * 64, out_ch=384), LayerSpec("relu"),
        LayerSpec("fc", in_ch=384, out_ch=192), LayerSpec("relu"),
        LayerSpec("fc", in_ch=192, out_ch=N_CLASSES),
        LayerSpec("softmax"),
    ]


@dataclass
class OrientationModel:
    layers: list[LayerSpec]
    params: list[dict[str, np.ndarray]]
    seed: int = 0
    trained: bool = False

    @classmethod
    def initialise(cls, layers: list[LayerSpec], seed: int,
                   input_shape=INPUT_SHAPE) -> "OrientationModel":
        """He-normal weights, zero biases, drawn layer by layer from one seeded generator."""
        rng = np.random.default_rng(seed)
        params = []
        for spec in layers:
            if spec.kind == "conv":
                fan_in = spec.size * spec.size * spec.in_ch
                w = rng.normal(0.0, math.sqrt(2.0 / fan_in),
                               (spec.size, spec.size, spec.in_ch, spec.out_ch))
                params.append(dict(W=w, b=np.zeros(spec.out_ch)))
            elif spec.kind == "fc":
                w = rng.normal(0.0, math.sqrt(2.0 / spec.in_ch), (spec.in_ch, spec.out_ch))
                params.append(dict(W=w, b=np.zeros(spec.out_ch)))
            else:
                params.append({})
        model = cls(list(layers), params, seed=seed)
        model.shape_chain(input_shape)
        return model

    def shape_chain(self, input_shape=INPUT_SHAPE) -> list[tuple[int, ...]]:
        """Per-layer output shapes (without batch axis); raises ShapeError on a broken chain."""
        shape = tuple(input_shape)
        chain = [shape]
        for i, spec in enumerate(self.layers):
            if spec.kind == "conv":
                if len(shape) != 3 or shape[2] != spec.in_ch:
                    raise ShapeError(f"layer {i} conv expects (H, W, {spec.in_ch}), got {shape}")
                oh, _ = conv_output_size(shape[0], spec.size, spec.stride, spec.padding)
                ow, _ = conv_output_size(shape[1], spec.size, spec.stride, spec.padding)
                shape = (oh, ow, spec.out_ch)
            elif spec.kind == "flatten":
                shape = (int(np.prod(shape)),)
            elif spec.kind == "fc":
                if shape != (spec.in_ch,):
                    raise ShapeError(f"layer {i} fc expects ({spec.in_ch},), got {shape}")
                shape = (spec.out_ch,)
            chain.append(shape)
        return chain

    def n_params(self) -> int:
        return sum(a.size for p in self.params for a in p.values())

    def copy(self) -> "OrientationModel":
        return OrientationModel(list(self.layers),
                                [{k: v.copy() for k, v in p.items()} for p in self.params],
                                seed=self.seed, trained=self.trained)

    # forward/backward over a batch -------------------------------------
    def _forward(self, x, keep_cache: bool):
        """Runs every layer except a trailing softmax; returns (logits, caches)."""
        h, _ = _as_batch(x)
        caches = []
        for spec, p in zip(self.layers, self.params):
            if spec.kind == "conv":
                h, c = conv2d_forward(h, p["W"], p["b"], spec.stride, spec.padding)
            elif spec.kind == "lrn":
                h, c = lrn_forward(h, spec.k, spec.n, spec.alpha, spec.beta)
            elif spec.kind == "relu":
                h, c = relu_forward(h)
            elif spec.kind == "flatten":
                h, c = flatten_forward(h)
            elif spec.kind == "fc":
                h, c = fc_forward(h, p["W"], p["b"])
            else:
                c = None
            caches.append(c if keep_cache else None)
        return h, caches

    def logits(self, x) -> np.ndarray:
        return self._forward(x, keep_cache=False)[0]

    def forward(self, x) -> np.ndarray:
        """Class probabilities, (N, 8) for a batch or (8,) for one image."""
        xb, single = _as_batch(x)
        if xb.shape[1:] != INPUT_SHAPE:
            raise ShapeError(f"expected images of shape {INPUT_SHAPE}, got {xb.shape[1:]}")
        p = softmax(self.logits(xb))
        return p[0] if single else p

    def loss_and_grads(self, x, labels):
        """Mean cross-entropy over the batch and per-layer parameter gradients."""
        logits, caches = self._forward(x, keep_cache=True)
        loss, g = softmax_cross_entropy(logits, labels)
        grads: list[dict[str, np.ndarray]] = [{} for _ in self.layers]
        first_param = next(i for i, s in enumerate(self.layers) if s.kind in ("conv", "fc"))
        for i in range(len(self.layers) - 1, -1, -1):
            spec, cache = self.layers[i], caches[i]
            need = i > first_param
            if spec.kind == "conv":
                g, gw, gb = conv2d_backward(g, cache, need_input_grad=need)
                grads[i] = dict(W=gw, b=gb)
            elif spec.kind == "fc":
                g, gw, gb = fc_backward(g, cache, need_input_grad=need)
                grads[i] = dict(W=gw, b=gb)
            elif spec.kind == "lrn":
                g = lrn_backward(g, cache)
            elif spec.kind == "relu":
                g = relu_backward(g, cache)
            elif spec.kind == "flatten":
                g = flatten_backward(g, cache)
            if not need and spec.kind in ("conv", "fc"):
                break
        return loss, grads

    def sgd_update(self, grads, lr: float) -> None:
        for p, g in zip(self.params, grads):
            for name in p:
                p[name] -= lr * g[name]


def build_paper_model(seed: int = 0) -> OrientationModel:
    """conv(5x5x64, s2) -> LRN -> ReLU, twice; FC 384 -> ReLU -> FC 192 -> ReLU -> FC 8 -> softmax."""
    return OrientationModel.initialise(paper_layers(), seed)


def predict(model: OrientationModel, image) -> tuple[np.ndarray, int]:
    image = np.asarray(image, dtype=np.float64)
    if image.shape != INPUT_SHAPE:
        raise ShapeError(f"expected one {INPUT_SHAPE} image, got {image.shape}")
    probs = model.forward(image)
    return probs, int(np.argmax(probs))  # argmax picks the lowest index on ties


def predict_batch(model: OrientationModel, images, batch_size: int = 100) -> np.ndarray:
    images = np.asarray(images)
    out = np.empty(len(images), dtype=np.int64)
    for s in range(0, len(images), batch_size):
        out[s:s + batch_size] = np.argmax(model.logits(images[s:s + batch_size]), axis=1)
    return out


# ----------------------------------------------------------------- training

@dataclass
class TrainConfig:
    learning_rate: float = 0.01
    minibatch_size: int = 100
    minibatches_per_step: int = 100
    steps: int = 30
    seed: int = 0
    target_accuracy: float | None = None  # stop early once validation reaches this

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be non-negative")
        if self.minibatch_size < 1 or self.minibatches_per_step < 1 or self.steps < 0:
            raise ValueError("minibatch_size, minibatches_per_step must be >= 1 and steps >= 0")


@dataclass
class TrainReport:
    config: dict
    step_loss: list[float] = field(default_factory=list)
    val_accuracy: list[float] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def steps_run(self) -> int:
        return len(self.step_loss)

    def to_dict(self) -> dict:
        return asdict(self)


class _EpochSampler:
    """Seeded shuffling without replacement; a short tail starts a new epoch."""

    def __init__(self, n: int, seed: int):
        self.n = n
        self.rng = np.random.default_rng(seed)
        self.perm = self.rng.permutation(n)
        self.pos = 0

    def next(self, size: int) -> np.ndarray:
        size = min(size, self.n)
        if self.pos + size > self.n:
            self.perm = self.rng.permutation(self.n)
            self.pos = 0
        idx = self.perm[self.pos:self.pos + size]
        self.pos += size
        return idx


def accuracy_on(model: OrientationModel, images, labels) -> float:
    pred = predict_batch(model, images)
    return float(np.mean(pred == np.asarray(labels)))


def _images_labels(ds):
    if isinstance(ds, tuple):
        return ds
    return ds.images, ds.labels


def train(model: OrientationModel, dataset, cfg: TrainConfig, val_set=None,
          progress=None) -> TrainReport:
    """Plain minibatch SGD. ``dataset``/``val_set`` are Dataset objects or (images, labels).

    One step is ``cfg.minibatches_per_step`` minibatches; the report holds the
    mean loss of each step and, when a validation set is given, the
    validation accuracy after each step.
    """
    import time

    images, labels = _images_labels(dataset)
    if len(images) == 0:
        raise ValueError("cannot train on an empty dataset")
    labels = np.asarray(labels, dtype=np.int64)
    sampler = _EpochSampler(len(images), cfg.seed)
    report = TrainReport(config=asdict(cfg))
    t0 = time.perf_counter()
    for step in range(1, cfg.steps + 1):
        total = 0.0
        for _ in range(cfg.minibatches_per_step):
            idx = np.sort(sampler.next(cfg.minibatch_size))
            loss, grads = model.loss_and_grads(np.asarray(images[idx], dtype=np.float64), labels[idx])
            if not math.isfinite(loss):
                raise DivergenceError(step, loss)
            if cfg.learning_rate:
                model.sgd_update(grads, cfg.learning_rate)
            total += loss
        report.step_loss.append(total / cfg.minibatches_per_step)
        if val_set is not None:
            report.val_accuracy.append(accuracy_on(model, *_images_labels(val_set)))
        log.info("step %d loss %.4f val %s", step, report.step_loss[-1],
                 report.val_accuracy[-1] if report.val_accuracy else "-")
        if progress is not None:
            progress(step, report)
        if (cfg.target_accuracy is not None and report.val_accuracy
                and report.val_accuracy[-1] >= cfg.target_accuracy):
            break
    report.seconds = time.perf_counter() - t0
    if report.steps_run:
        model.trained = True
    return report


def fine_tune(model: OrientationModel, dataset, cfg: TrainConfig, val_set=None,
              progress=None) -> TrainReport:
    """Continue training an already trained model on new data."""
    if not model.trained:
        raise ValueError("fine_tune requires a trained model; use train() first")
    return train(model, dataset, cfg, val_set, progress)


# ------------------------------------------------------------ serialisation

MODEL_MAGIC = b"OBNN"
MODEL_VERSION = 1
_KIND_TAG = {k: i + 1 for i, k in enumerate(KINDS)}
_TAG_KIND = {v: k for k, v in _KIND_TAG.items()}


def model_to_bytes(model: OrientationModel) -> bytes:
    out = [MODEL_MAGIC, struct.pack("<IIQB", MODEL_VERSION, len(model.layers),
                                    model.seed, int(model.trained))]
    for spec in model.layers:
        out.append(struct.pack("<B", _KIND_TAG[spec.kind]))
        if spec.kind == "conv":
            out.append(struct.pack("<IIIIB", spec.size, spec.in_ch, spec.out_ch, spec.stride,
                                   1 if spec.padding == "same" else 0))
        elif spec.kind == "lrn":
            out.append(struct.pack("<dIdd", spec.k, spec.n, spec.alpha, spec.beta))
        elif spec.kind == "fc":
            out.append(struct.pack("<II", spec.in_ch, spec.out_ch))
    for spec, p in zip(model.layers, model.params):
        if spec.kind in ("conv", "fc"):
            out.append(np.ascontiguousarray(p["W"], dtype="<f8").tobytes())
            out.append(np.ascontiguousarray(p["b"], dtype="<f8").tobytes())
    return b"".join(out)


class _Reader:
    def __init__(self, buf: bytes, what: str):
        self.buf, self.pos, self.what = buf, 0, what

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.buf):
            raise TruncatedFileError(f"{self.what} truncated at byte {self.pos} "
                                     f"(needed {n}, {len(self.buf) - self.pos} left)")
        b = self.buf[self.pos:self.pos + n]
        self.pos += n
        return b

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def model_from_bytes(buf: bytes) -> OrientationModel:
    r = _Reader(buf, "model file")
    magic = r.take(4)
    if magic != MODEL_MAGIC:
        raise MagicMismatchError(f"bad model magic {magic!r}, expected {MODEL_MAGIC!r}")
    version, n_layers, seed, trained = r.unpack("<IIQB")
    if version != MODEL_VERSION:
        raise VersionMismatchError(f"model version {version} not supported (expected {MODEL_VERSION})")
    layers = []
    for _ in range(n_layers):
        (tag,) = r.unpack("<B")
        if tag not in _TAG_KIND:
            raise ValueError(f"unknown layer tag {tag}")
        kind = _TAG_KIND[tag]
        if kind == "conv":
            size, cin, cout, stride, same = r.unpack("<IIIIB")
            layers.append(LayerSpec("conv", size=size, in_ch=cin, out_ch=cout, stride=stride,
                                    padding="same" if same else "valid"))
        elif kind == "lrn":
            k, n, alpha, beta = r.unpack("<dIdd")
            layers.append(LayerSpec("lrn", k=k, n=n, alpha=alpha, beta=beta))
        elif kind == "fc":
            cin, cout = r.unpack("<II")
            layers.append(LayerSpec("fc", in_ch=cin, out_ch=cout))
        else:
            layers.append(LayerSpec(kind))
    params = []
    for spec in layers:
        if spec.kind == "conv":
            wshape = (spec.size, spec.size, spec.in_ch, spec.out_ch)
        elif spec.kind == "fc":
            wshape = (spec.in_ch, spec.out_ch)
        else:
            params.append({})
            continue
        nw = int(np.prod(wshape))
        w = np.frombuffer(r.take(8 * nw), dtype="<f8").astype(np.float64).reshape(wshape)
        b = np.frombuffer(r.take(8 * spec.out_ch), dtype="<f8").astype(np.float64)
        params.append(dict(W=w, b=b))
    if r.pos != len(buf):
        raise ValueError(f"{len(buf) - r.pos} trailing bytes after model payload")
    model = OrientationModel(layers, params, seed=seed, trained=bool(trained))
    model.shape_chain()
    return model


def save_model(model: OrientationModel, path) -> None:
    Path(path).write_bytes(model_to_bytes(model))


def load_model(path) -> OrientationModel:
    return model_from_bytes(Path(path).read_bytes())
