"""Minimal neural-network framework with manual backpropagation.

Dense and 1-D convolutional layers, tanh/ReLU activations, an Adam
optimizer with inverse-time learning-rate decay, finite-difference
gradient verification, and the two network shapes the learners need:

* :class:`Actor` -- dense stack, tanh throughout, outputs in (-1, 1).
* :class:`Critic` -- optional 1-D conv front-end over the state (ReLU),
  flattened and concatenated with the action, then a dense stack with
  tanh hidden activations and a linear scalar head.

All arrays are float64; forward passes are pure functions of
(parameters, input), and every layer caches what its backward pass needs.
Batch convention: inputs are (B, ...) and gradients flow back in the same
shape.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import RngStream

__all__ = [
    "conv_output_len",
    "Dense",
    "Conv1d",
    "Tanh",
    "Relu",
    "Actor",
    "Critic",
    "Adam",
    "soft_update",
    "copy_params",
    "save_checkpoint",
    "load_checkpoint",
    "GradCheckReport",
    "finite_diff_check",
    "check_critic_gradients",
    "check_actor_gradients",
]


def conv_output_len(length: int, kernel: int, stride: int, padding: int) -> int:
    """Output length of a 1-D convolution, (J + 2p - k) / s + 1.

    Raises ValueError when the expression is not a positive integer, so
    invalid layer configurations are rejected when the network is built.
    """
    if length < 1 or kernel < 1 or stride < 1 or padding < 0:
        raise ValueError(
            f"bad conv geometry: length={length} kernel={kernel} stride={stride} padding={padding}"
        )
    numer = length + 2 * padding - kernel
    if numer < 0 or numer % stride != 0:
        raise ValueError(
            f"conv output length (J={length}, p={padding}, k_s={kernel}, s_d={stride}) "
            "is not a positive integer"
        )
    return numer // stride + 1


class Dense:
    """Fully connected layer y = x W^T + b with cached input."""

    def __init__(self, in_dim: int, out_dim: int, rng: RngStream):
        limit = 1.0 / np.sqrt(in_dim)
        self.w = rng.uniform(-limit, limit, (out_dim, in_dim))
        self.b = rng.uniform(-limit, limit, out_dim)
        self.gw = np.zeros_like(self.w)
        self.gb = np.zeros_like(self.b)
        self._x = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._x = x
        return x @ self.w.T + self.b

    def backward(self, g: np.ndarray) -> np.ndarray:
        self.gw += g.T @ self._x
        self.gb += g.sum(axis=0)
        return g @ self.w

    def params(self):
        return [self.w, self.b]

    def grads(self):
        return [self.gw, self.gb]


class Conv1d:
    """1-D convolution over (B, in_channels, L) signals.

    Kernel weights have shape (out_channels, in_channels, kernel); output
    length follows ``conv_output_len`` exactly and is validated against the
    configured input length at build time.
    """

    def __init__(self, in_channels: int, out_channels: int, kernel: int,
                 stride: int, padding: int, in_len: int, rng: RngStream):
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kernel = kernel
        self.stride = stride
        self.padding = padding
        self.in_len = in_len
        self.out_len = conv_output_len(in_len, kernel, stride, padding)
        limit = 1.0 / np.sqrt(in_channels * kernel)
        self.w = rng.uniform(-limit, limit, (out_channels, in_channels, kernel))
        self.b = rng.uniform(-limit, limit, out_channels)
        self.gw = np.zeros_like(self.w)
        self.gb = np.zeros_like(self.b)
        self._cols = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.shape[1] != self.in_channels or x.shape[2] != self.in_len:
            raise ValueError(f"expected (B, {self.in_channels}, {self.in_len}), got {x.shape}")
        if self.padding:
            x = np.pad(x, ((0, 0), (0, 0), (self.padding, self.padding)))
        # (B, in_c, out_len, kernel) strided view of the receptive fields
        cols = np.lib.stride_tricks.sliding_window_view(x, self.kernel, axis=2)
        cols = cols[:, :, :: self.stride, :]
        self._cols = cols
        return np.einsum("bilk,oik->bol", cols, self.w) + self.b[None, :, None]

    def backward(self, g: np.ndarray) -> np.ndarray:
        self.gw += np.einsum("bol,bilk->oik", g, self._cols)
        self.gb += g.sum(axis=(0, 2))
        batch = g.shape[0]
        padded_len = self.in_len + 2 * self.padding
        gx = np.zeros((batch, self.in_channels, padded_len))
        for t in range(self.kernel):
            # each kernel tap scatters back onto a strided slice of the input
            gx[:, :, t : t + self.stride * self.out_len : self.stride] += np.einsum(
                "bol,oi->bil", g, self.w[:, :, t]
            )
        if self.padding:
            gx = gx[:, :, self.padding : padded_len - self.padding]
        return gx

    def params(self):
        return [self.w, self.b]

    def grads(self):
        return [self.gw, self.gb]


class Tanh:
    def __init__(self):
        self._y = None

    def forward(self, x):
        self._y = np.tanh(x)
        return self._y

    def backward(self, g):
        return g * (1.0 - self._y**2)

    def params(self):
        return []

    def grads(self):
        return []


class Relu:
    def __init__(self):
        self._mask = None

    def forward(self, x):
        self._mask = x > 0
        return x * self._mask

    def backward(self, g):
        return g * self._mask

    def params(self):
        return []

    def grads(self):
        return []


class _Net:
    """Shared parameter plumbing for Actor/Critic."""

    def _layers(self):
        raise NotImplementedError

    def params(self):
        out = []
        for layer in self._layers():
            out.extend(layer.params())
        return out

    def grads(self):
        out = []
        for layer in self._layers():
            out.extend(layer.grads())
        return out

    def zero_grad(self):
        for g in self.grads():
            g[...] = 0.0

    def named_params(self):
        out = []
        for i, layer in enumerate(self._layers()):
            for name, p in zip(("w", "b"), layer.params()):
                out.append((f"layer{i}.{name}", p))
        return out


class Actor(_Net):
    """Deterministic policy network: dense stack, tanh everywhere.

    The final tanh keeps every output coordinate strictly inside (-1, 1),
    matching what the action projector expects.
    """

    def __init__(self, state_dim: int, action_dim: int, hidden=(256, 256), rng: RngStream = None):
        self.state_dim = state_dim
        self.action_dim = action_dim
        dims = [state_dim, *hidden, action_dim]
        self.stack = []
        for i in range(len(dims) - 1):
            self.stack.append(Dense(dims[i], dims[i + 1], rng))
            self.stack.append(Tanh())

    def _layers(self):
        return self.stack

    def forward(self, s: np.ndarray) -> np.ndarray:
        x = s
        for layer in self.stack:
            x = layer.forward(x)
        return x

    def backward(self, g: np.ndarray) -> np.ndarray:
        for layer in reversed(self.stack):
            g = layer.backward(g)
        return g


@dataclass
class ConvSpec:
    """Geometry of one critic conv layer (kernel/stride/padding shared stack-wide)."""

    channels: tuple = (32, 32)
    kernel: int = 1
    stride: int = 1
    padding: int = 0


class Critic(_Net):
    """Q network: optional conv front-end on the state, dense tail to a scalar.

    conv arch:  state (B, D) -> 1-D conv stack with ReLU -> flatten
                -> concat action -> dense stack (tanh) -> linear -> Q
    plain arch: concat(state, action) straight into the dense stack.

    ``backward`` returns the gradients w.r.t. the state and action inputs;
    the action gradient is what the deterministic policy-gradient step
    chains through.
    """

    def __init__(self, state_dim: int, action_dim: int, hidden=(256, 256),
                 conv: ConvSpec | None = None, rng: RngStream = None):
        self.state_dim = state_dim
        self.action_dim = action_dim
        self.conv_layers = []
        self.conv_acts = []
        feat_len = state_dim
        in_ch = 1
        if conv is not None:
            for out_ch in conv.channels:
                layer = Conv1d(in_ch, out_ch, conv.kernel, conv.stride, conv.padding,
                               feat_len, rng)
                self.conv_layers.append(layer)
                self.conv_acts.append(Relu())
                feat_len = layer.out_len
                in_ch = out_ch
            self.flat_dim = in_ch * feat_len
        else:
            self.flat_dim = state_dim
        dims = [self.flat_dim + action_dim, *hidden]
        self.dense = []
        for i in range(len(dims) - 1):
            self.dense.append(Dense(dims[i], dims[i + 1], rng))
            self.dense.append(Tanh())
        self.dense.append(Dense(dims[-1], 1, rng))
        self._flat_shape = None

    def _layers(self):
        return [*self.conv_layers, *self.dense]

    @property
    def has_conv(self) -> bool:
        return bool(self.conv_layers)

    def forward(self, s: np.ndarray, a: np.ndarray) -> np.ndarray:
        if self.conv_layers:
            x = s[:, None, :]
            for layer, act in zip(self.conv_layers, self.conv_acts):
                x = act.forward(layer.forward(x))
            self._flat_shape = x.shape
            flat = x.reshape(x.shape[0], -1)
        else:
            flat = s
        z = np.concatenate([flat, a], axis=1)
        for layer in self.dense:
            z = layer.forward(z)
        return z[:, 0]

    def backward(self, gq: np.ndarray):
        """Backprop d(loss)/dQ of shape (B,); returns (d_state, d_action)."""
        g = gq[:, None]
        for layer in reversed(self.dense):
            g = layer.backward(g)
        gflat, ga = g[:, : self.flat_dim], g[:, self.flat_dim :]
        if self.conv_layers:
            gx = gflat.reshape(self._flat_shape)
            for layer, act in zip(reversed(self.conv_layers), reversed(self.conv_acts)):
                gx = layer.backward(act.backward(gx))
            gs = gx[:, 0, :]
        else:
            gs = gflat
        return gs, ga


class Adam:
    """Adam with inverse-time decay of the learning rate.

    The effective rate at optimizer step t is lr / (1 + decay * t); with
    decay 1e-5 the rate is halved after 1e5 steps.  Optional L2 weight
    decay (off by default) adds weight_decay * p to each gradient; it is
    the usual guard against actor tanh saturation in this problem family.
    """

    def __init__(self, params, lr: float, decay: float = 0.0,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8,
                 weight_decay: float = 0.0):
        self.params = list(params)
        self.lr = lr
        self.decay = decay
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.weight_decay = weight_decay
        self.m = [np.zeros_like(p) for p in self.params]
        self.v = [np.zeros_like(p) for p in self.params]
        self.t = 0

    @property
    def effective_lr(self) -> float:
        return self.lr / (1.0 + self.decay * self.t)

    def step(self, grads):
        self.t += 1
        lr_t = self.effective_lr
        b1, b2 = self.beta1, self.beta2
        c1 = 1.0 - b1**self.t
        c2 = 1.0 - b2**self.t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            if self.weight_decay:
                g = g + self.weight_decay * p
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            p -= lr_t * (m / c1) / (np.sqrt(v / c2) + self.eps)


def soft_update(target: _Net, train: _Net, tau: float):
    """target <- (1 - tau) * target + tau * train, every parameter."""
    for pt, p in zip(target.params(), train.params()):
        pt *= 1.0 - tau
        pt += tau * p


def copy_params(dst: _Net, src: _Net):
    for pd, ps in zip(dst.params(), src.params()):
        pd[...] = ps


CHECKPOINT_VERSION = 1


def save_checkpoint(path, nets: dict):
    """Write all networks to one .npz file (version 1).

    Keys are "<net>/<layer>.<param>"; arrays are stored in the npy binary
    format, which records dtype and byte order explicitly, so round trips
    are bit exact across platforms.
    """
    payload = {"__version__": np.int64(CHECKPOINT_VERSION)}
    for net_name, net in nets.items():
        for pname, p in net.named_params():
            payload[f"{net_name}/{pname}"] = p
    np.savez(path, **payload)


def load_checkpoint(path, nets: dict):
    """Load parameters saved by :func:`save_checkpoint` into existing nets."""
    with np.load(path) as data:
        version = int(data["__version__"])
        if version != CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version {version}")
        for net_name, net in nets.items():
            for pname, p in net.named_params():
                key = f"{net_name}/{pname}"
                if key not in data:
                    raise KeyError(f"checkpoint missing {key}")
                arr = data[key]
                if arr.shape != p.shape:
                    raise ValueError(f"{key}: shape {arr.shape} != expected {p.shape}")
                p[...] = arr


@dataclass
class GradCheckReport:
    max_rel_err: float
    worst: str
    n_checked: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_rel_err < self.tolerance


def _rel_err(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    if scale < 1e-8:
        return 0.0
    return abs(a - b) / scale


def finite_diff_check(f, params, analytic, eps: float = 1e-5, tol: float = 1e-4,
                      names=None) -> GradCheckReport:
    """Compare analytic gradients against central finite differences.

    f        -- zero-argument callable returning the scalar loss
    params   -- list of parameter arrays perturbed in place
    analytic -- list of gradient arrays aligned with params
    """
    if names is None:
        names = [f"param{i}" for i in range(len(params))]
    worst = ""
    max_err = 0.0
    n = 0
    for name, p, g in zip(names, params, analytic):
        flat_p = p.reshape(-1)
        flat_g = g.reshape(-1)
        for i in range(flat_p.size):
            orig = flat_p[i]
            flat_p[i] = orig + eps
            f_plus = f()
            flat_p[i] = orig - eps
            f_minus = f()
            flat_p[i] = orig
            fd = (f_plus - f_minus) / (2.0 * eps)
            err = _rel_err(flat_g[i], fd)
            n += 1
            if err > max_err:
                max_err = err
                worst = f"{name}[{i}]"
    return GradCheckReport(max_rel_err=max_err, worst=worst, n_checked=n, tolerance=tol)


def check_critic_gradients(critic: Critic, s: np.ndarray, a: np.ndarray,
                           eps: float = 1e-5, tol: float = 1e-4) -> GradCheckReport:
    """Verify every critic parameter gradient and the action-input gradient.

    The scalar under test is the batch-mean Q value.
    """
    batch = s.shape[0]
    critic.zero_grad()
    critic.forward(s, a)
    _, ga = critic.backward(np.full(batch, 1.0 / batch))
    analytic = [g.copy() for g in critic.grads()] + [ga]
    params = critic.params() + [a]
    names = [n for n, _ in critic.named_params()] + ["action_input"]

    def f():
        return float(critic.forward(s, a).mean())

    return finite_diff_check(f, params, analytic, eps=eps, tol=tol, names=names)


def check_actor_gradients(actor: Actor, s: np.ndarray, rng: RngStream,
                          eps: float = 1e-5, tol: float = 1e-4) -> GradCheckReport:
    """Verify actor parameter gradients of a random fixed projection of the output."""
    v = rng.normal(size=(s.shape[0], actor.action_dim))
    actor.zero_grad()
    out = actor.forward(s)
    actor.backward(v)
    analytic = [g.copy() for g in actor.grads()]

    def f():
        return float(np.sum(actor.forward(s) * v))

    assert np.allclose(float(np.sum(out * v)), f())
    return finite_diff_check(f, actor.params(), analytic, eps=eps, tol=tol,
                             names=[n for n, _ in actor.named_params()])
