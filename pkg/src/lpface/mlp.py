"""Feed-forward tanh network trained by batch backpropagation.

Updates combine momentum with delta-bar-delta adaptation: every weight and
bias keeps its own learning rate, raised by a constant ``a`` while the
current gradient agrees in sign with an exponentially smoothed history of
past gradients and cut by the factor ``b`` when they disagree.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, TrainingDivergedError

log = logging.getLogger(__name__)

_ETA_FLOOR = np.finfo(np.float64).tiny
ERROR_NORMS = ("sum", "mean", "mse")


@dataclass
class Hyperparams:
    eta0: float = 0.02
    alpha: float = 0.9
    a: float = 0.001
    b: float = 0.5
    c: float = 0.7
    max_epochs: int = 70000
    goal: float = 1e-6
    e_max: float = 0.0
    seed: int = 0
    error_norm: str = "sum"

    def __post_init__(self):
        if not self.eta0 > 0:
            raise InvalidInputError("eta0 must be positive")
        if not 0 <= self.alpha <= 1:
            raise InvalidInputError("alpha must lie in [0, 1]")
        if not self.a >= 0:
            raise InvalidInputError("a must be non-negative")
        if not 0 <= self.b < 1:
            raise InvalidInputError("b must lie in [0, 1)")
        if not 0 <= self.c <= 1:
            raise InvalidInputError("c must lie in [0, 1]")
        if int(self.max_epochs) != self.max_epochs or self.max_epochs < 1:
            raise InvalidInputError("max_epochs must be a positive integer")
        if self.goal < 0 or self.e_max < 0:
            raise InvalidInputError("goal and e_max must be non-negative")
        if self.error_norm not in ERROR_NORMS:
            raise InvalidInputError(f"error_norm must be one of {ERROR_NORMS}")

    def gradient_scale(self, patterns: int, outputs: int) -> float:
        """Factor turning the gradient of the total error into the gradient of the
        objective selected by ``error_norm``.

        ``sum`` trains on the total error itself, ``mean`` on the error per
        pattern and ``mse`` on the mean squared error over all output values.
        """
        if self.error_norm == "mean":
            return 1.0 / patterns
        if self.error_norm == "mse":
            return 2.0 / (patterns * outputs)
        return 1.0


@dataclass
class Network:
    """Weights ``W[l]`` have shape ``(size[l+1], size[l])``; biases ``b[l]`` shape ``(size[l+1],)``."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def __post_init__(self):
        if len(self.weights) != len(self.biases) or not self.weights:
            raise InvalidInputError("need one bias vector per weight matrix")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.shape != (w.shape[0],):
                raise InvalidInputError(f"layer {i}: weight {w.shape} and bias {b.shape} disagree")
            if i and w.shape[1] != self.weights[i - 1].shape[0]:
                raise InvalidInputError(f"layer {i} input width does not match layer {i - 1} output")

    @property
    def layer_sizes(self) -> list[int]:
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    @property
    def n_in(self) -> int:
        return self.weights[0].shape[1]

    @property
    def n_out(self) -> int:
        return self.weights[-1].shape[0]

    def params(self) -> list[np.ndarray]:
        """Parameter arrays in canonical order ``W0, b0, W1, b1, ...`` (live references)."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out

    def copy(self) -> Network:
        return Network([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        mine, theirs = self.params(), other.params()
        return len(mine) == len(theirs) and all(np.array_equal(x, y) for x, y in zip(mine, theirs))


@dataclass
class TrainState:
    eta: list[np.ndarray]
    lambda_bar: list[np.ndarray]
    delta_prev: list[np.ndarray]
    epoch: int = 0
    errors: list[float] = field(default_factory=list)

    @classmethod
    def fresh(cls, net: Network, eta0: float) -> TrainState:
        params = net.params()
        return cls(
            eta=[np.full_like(p, eta0) for p in params],
            lambda_bar=[np.zeros_like(p) for p in params],
            delta_prev=[np.zeros_like(p) for p in params],
        )


@dataclass
class TrainResult:
    network: Network
    state: TrainState
    errors: list[float]
    epochs: int
    stop_reason: str
    final_error: float


def init_network(layer_sizes, seed: int = 0) -> Network:
    """Uniform weights in ``[-1/sqrt(fan_in), 1/sqrt(fan_in)]``, zero biases."""
    sizes = [int(s) for s in layer_sizes]
    if len(sizes) < 2 or any(s < 1 for s in sizes):
        raise InvalidInputError(f"invalid layer sizes {layer_sizes}")
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return Network(weights, biases)


def _as_batch(net: Network, x) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    batch = x[None, :] if single else x
    if batch.ndim != 2 or batch.shape[1] != net.n_in:
        raise InvalidInputError(f"expected inputs of width {net.n_in}, got shape {x.shape}")
    return batch, single


def forward(net: Network, x):
    """Return ``(output, activations)``; ``activations[0]`` is the input itself.

    ``x`` may be one feature vector or a ``(P, n_in)`` batch; outputs follow the
    same shape convention.
    """
    batch, single = _as_batch(net, x)
    acts = [batch]
    for w, b in zip(net.weights, net.biases):
        acts.append(np.tanh(acts[-1] @ w.T + b))
    if single:
        acts = [a[0] for a in acts]
    return acts[-1], acts


def one_hot_targets(labels, n_out: int) -> np.ndarray:
    """Encode class indices as rows of -1 with +1 at the class position."""
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size and (labels.min() < 0 or labels.max() >= n_out):
        raise InvalidInputError(f"labels must lie in [0, {n_out})")
    targets = -np.ones((labels.size, n_out))
    targets[np.arange(labels.size), labels] = 1.0
    return targets


def _check_batch(net: Network, inputs, targets):
    inputs, _ = _as_batch(net, inputs)
    targets = np.asarray(targets, dtype=np.float64)
    if targets.ndim == 1:
        targets = targets[:, None] if net.n_out == 1 else targets[None, :]
    if inputs.shape[0] == 0:
        raise InvalidInputError("batch is empty")
    if targets.shape != (inputs.shape[0], net.n_out):
        raise InvalidInputError(f"targets shape {targets.shape} does not match batch of {inputs.shape[0]} x {net.n_out}")
    return inputs, targets


def batch_error(net: Network, inputs, targets) -> float:
    """Total squared error ``sum_k 1/2 sum_i (d_i - y_i)^2`` over the batch."""
    inputs, targets = _check_batch(net, inputs, targets)
    out, _ = forward(net, inputs)
    return 0.5 * float(np.sum((targets - out) ** 2))


def _error_and_grads(net: Network, inputs, targets):
    out, acts = forward(net, inputs)
    resid = out - targets
    error = 0.5 * float(np.sum(resid * resid))
    delta = resid * (1.0 - out * out)
    grads = []
    for layer in range(len(net.weights) - 1, -1, -1):
        grads.append(delta.sum(axis=0))
        grads.append(delta.T @ acts[layer])
        if layer:
            a = acts[layer]
            delta = (delta @ net.weights[layer]) * (1.0 - a * a)
    grads.reverse()
    return error, grads


def backward(net: Network, inputs, targets) -> list[np.ndarray]:
    """Gradients of :func:`batch_error`, summed over the batch, in :meth:`Network.params` order."""
    inputs, targets = _check_batch(net, inputs, targets)
    return _error_and_grads(net, inputs, targets)[1]


def update_weights(net: Network, grads, state: TrainState, hp: Hyperparams) -> None:
    """Apply one delta-bar-delta + momentum step in place.

    Per parameter: adapt the rate from the sign of ``lambda_bar(t-1) * grad``,
    then smooth ``lambda_bar``, then move the weight by
    ``-eta * grad + alpha * previous_step``.
    """
    params = net.params()
    if len(grads) != len(params):
        raise InvalidInputError("gradient list does not match network parameters")
    for i, (w, g) in enumerate(zip(params, grads)):
        if g.shape != w.shape:
            raise InvalidInputError(f"gradient {i} has shape {g.shape}, expected {w.shape}")
        eta, lbar = state.eta[i], state.lambda_bar[i]
        agree = lbar * g
        d_eta = np.where(agree > 0, hp.a, np.where(agree < 0, -hp.b * eta, 0.0))
        eta = eta + d_eta
        # repeated decreases must never underflow to zero
        np.maximum(eta, _ETA_FLOOR, out=eta)
        state.eta[i] = eta
        state.lambda_bar[i] = (1.0 - hp.c) * g + hp.c * lbar
        step = -eta * g + hp.alpha * state.delta_prev[i]
        w += step
        state.delta_prev[i] = step


def _grad_norm(grads) -> float:
    return float(np.sqrt(sum(np.sum(g * g) for g in grads)))


def train(net: Network, inputs, targets, hp: Hyperparams, state: TrainState | None = None,
          progress_every: int = 0) -> TrainResult:
    """Full-batch training until the gradient norm reaches ``hp.goal``, the
    error reaches ``hp.e_max`` or ``hp.max_epochs`` updates have been made.

    ``net`` is updated in place. ``targets`` are the desired outputs (use
    :func:`one_hot_targets` for class labels). ``errors`` records the total
    error measured before each epoch's update. Updates and the ``goal`` test
    use the gradient of the objective chosen by ``hp.error_norm``.
    """
    inputs, targets = _check_batch(net, inputs, targets)
    state = state or TrainState.fresh(net, hp.eta0)
    scale = hp.gradient_scale(*targets.shape)
    reason = "max_epochs"
    for _ in range(hp.max_epochs):
        with np.errstate(all="ignore"):
            error, grads = _error_and_grads(net, inputs, targets)
        if scale != 1.0:
            grads = [g * scale for g in grads]
        gnorm = _grad_norm(grads)
        if not (np.isfinite(error) and np.isfinite(gnorm)):
            raise TrainingDivergedError(state.epoch + 1)
        state.errors.append(error)
        if gnorm <= hp.goal:
            reason = "goal"
            break
        if error <= hp.e_max:
            reason = "e_max"
            break
        with np.errstate(all="ignore"):
            update_weights(net, grads, state, hp)
        state.epoch += 1
        if progress_every and state.epoch % progress_every == 0:
            log.info("epoch %d: E=%.6g |grad|=%.3g", state.epoch, error, gnorm)
    with np.errstate(all="ignore"):
        final = batch_error(net, inputs, targets)
    if not np.isfinite(final):
        raise TrainingDivergedError(state.epoch)
    return TrainResult(net, state, state.errors, state.epoch, reason, final)


def classify(net: Network, x) -> tuple[int, np.ndarray]:
    """Winning class (lowest index on ties) and the raw output scores."""
    batch, single = _as_batch(net, x)
    if not single:
        raise InvalidInputError("classify takes a single feature vector")
    scores, _ = forward(net, batch[0])
    return int(np.argmax(scores)), scores
