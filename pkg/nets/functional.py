"""
Forward pass, cross-entropy loss and exact reverse-mode gradients for the
small classifiers in nets.architecture. Everything is float64.
"""

from collections import OrderedDict
from typing import Callable, List, Optional, Tuple

import numpy as np

from models.model_params import Gradient, ModelParams
from nets.architecture import Activation, ModelArchitecture
from utils import make_rng

# hook(params) -> (loss add-on, gradient add-on)
RegularizerHook = Callable[[ModelParams], Tuple[float, Gradient]]


def init_params(arch: ModelArchitecture, seed: int) -> ModelParams:
    """
    Glorot-uniform weights, zero biases; deterministic per seed
    """
    rng = make_rng(seed, "model-init")
    entries = OrderedDict()
    for layer, (fan_in, fan_out) in enumerate(zip(arch.layer_sizes[:-1], arch.layer_sizes[1:])):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        entries[f"layers.{layer}.weight"] = rng.uniform(-bound, bound, size=(fan_out, fan_in))
        entries[f"layers.{layer}.bias"] = np.zeros(fan_out)
    return ModelParams(entries)


def _activate(activation: Activation, z: np.ndarray) -> np.ndarray:
    if activation == Activation.RELU:
        return np.maximum(z, 0.0)
    return np.tanh(z)


def _activation_grad(activation: Activation, z: np.ndarray, h: np.ndarray) -> np.ndarray:
    if activation == Activation.RELU:
        return (z > 0).astype(np.float64)
    return 1.0 - h * h


def _check_inputs(arch: ModelArchitecture, params: ModelParams, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"Expected a 2-d feature matrix, got shape {X.shape}")
    if X.shape[1] != arch.n_features:
        raise ValueError(f"Feature matrix has {X.shape[1]} columns, the model expects {arch.n_features}")
    if params.names() != arch.param_names():
        raise ValueError(f"Parameters {params.names()} do not match architecture {arch.param_names()}")
    return X


def _forward_cache(arch: ModelArchitecture, params: ModelParams, X: np.ndarray):
    inputs: List[np.ndarray] = []
    pre_activations: List[np.ndarray] = []
    h = X
    for layer in range(arch.n_layers):
        inputs.append(h)
        z = h @ params[f"layers.{layer}.weight"].T + params[f"layers.{layer}.bias"]
        pre_activations.append(z)
        h = _activate(arch.activation, z) if layer < arch.n_layers - 1 else z
    return inputs, pre_activations, h


def forward(arch: ModelArchitecture, params: ModelParams, X: np.ndarray) -> np.ndarray:
    """
    Logits of shape (batch, n_classes)
    """
    X = _check_inputs(arch, params, X)
    return _forward_cache(arch, params, X)[2]


def log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def loss_and_grad(arch: ModelArchitecture, params: ModelParams, X: np.ndarray, y: np.ndarray,
                  regularizer: Optional[RegularizerHook] = None) -> Tuple[float, Gradient]:
    """
    Mean cross-entropy over the batch and its exact gradient.

    The optional regularizer hook adds its term to both the loss and the
    gradient.
    """
    X = _check_inputs(arch, params, X)
    y = np.asarray(y, dtype=np.int64)
    n = X.shape[0]
    if y.shape != (n,):
        raise ValueError(f"Expected {n} labels, got shape {y.shape}")
    if n == 0:
        raise ValueError("Cannot compute a loss on an empty batch")
    if y.min() < 0 or y.max() >= arch.n_classes:
        raise ValueError(f"Labels must lie in [0, {arch.n_classes})")

    inputs, pre_activations, logits = _forward_cache(arch, params, X)
    log_probs = log_softmax(logits)
    rows = np.arange(n)
    loss = float(-log_probs[rows, y].mean())

    delta = np.exp(log_probs)
    delta[rows, y] -= 1.0
    delta /= n

    grads = OrderedDict()
    for layer in reversed(range(arch.n_layers)):
        weight = params[f"layers.{layer}.weight"]
        grads[f"layers.{layer}.weight"] = delta.T @ inputs[layer]
        grads[f"layers.{layer}.bias"] = delta.sum(axis=0)
        if layer > 0:
            delta = (delta @ weight) * _activation_grad(arch.activation, pre_activations[layer - 1], inputs[layer])

    gradient = ModelParams(OrderedDict((name, grads[name]) for name in arch.param_names()))

    if regularizer is not None:
        extra_loss, extra_grad = regularizer(params)
        loss += float(extra_loss)
        gradient = gradient + extra_grad

    return loss, gradient


def predict(arch: ModelArchitecture, params: ModelParams, X: np.ndarray) -> np.ndarray:
    """
    Argmax over logits; ties go to the lowest class index
    """
    return np.argmax(forward(arch, params, X), axis=1).astype(np.int64)
