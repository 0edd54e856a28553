"""Loader for externally trained feed-forward policies.

File format (whitespace-separated text, parsed with ``str.split``):

    line 1:  mlp <size_0> <size_1> ... <size_L>
    then, for each layer l in 0..L-1:
        size_{l+1} * size_l weight entries, row-major (out x in),
        followed by size_{l+1} bias entries.

Hidden activations are tanh; the output layer is tanh as well, mapped onto
the action box: per-rotor thrusts use (x + 1) / 2, the body-rate action maps
element 0 the same way and scales elements 1..3 by the 6 rad/s rate limit.
Numbers are parsed with ``float`` so files are bit-exact across platforms.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from ..errors import ConfigurationError
from ..tasks.observations import observation_dim
from ..tasks.spec import ActionMode
from .base import Policy, PolicyRef


class MLP:
    def __init__(self, sizes: list[int], weights: list[np.ndarray], biases: list[np.ndarray]):
        self.sizes = sizes
        self.weights = weights
        self.biases = biases

    def __call__(self, x: np.ndarray) -> np.ndarray:
        h = np.asarray(x, dtype=float)
        for w, b in zip(self.weights, self.biases):
            h = np.tanh(w @ h + b)
        return h


def load_weights_file(path) -> MLP:
    with open(path, "r", encoding="utf-8") as fh:
        tokens = fh.read().split()
    if not tokens or tokens[0] != "mlp":
        raise ConfigurationError("weights file must start with the 'mlp' header")
    pos = 1
    sizes = []
    while pos < len(tokens):
        try:
            sizes.append(int(tokens[pos]))
        except ValueError:
            break
        pos += 1
    if len(sizes) < 2:
        raise ConfigurationError("weights file header needs at least two layer sizes")
    values = [float(t) for t in tokens[pos:]]
    need = sum(sizes[i + 1] * sizes[i] + sizes[i + 1] for i in range(len(sizes) - 1))
    if len(values) != need:
        raise ConfigurationError(f"weights file has {len(values)} values, expected {need}")
    weights, biases = [], []
    at = 0
    for i in range(len(sizes) - 1):
        rows, cols = sizes[i + 1], sizes[i]
        weights.append(np.array(values[at : at + rows * cols]).reshape(rows, cols))
        at += rows * cols
        biases.append(np.array(values[at : at + rows]))
        at += rows
    return MLP(sizes, weights, biases)


class ExternalPolicy(Policy):
    """Applies one loaded network to each controlled drone's observation."""

    def __init__(self, spec, controls, ref: Optional[PolicyRef] = None):
        super().__init__(spec, controls)
        if ref is None or ref.path is None:
            raise ConfigurationError("external policy needs a weights-file path")
        self.net = load_weights_file(ref.path)
        expect = observation_dim(spec)
        if self.net.sizes[0] != expect or self.net.sizes[-1] != 4:
            raise ConfigurationError(
                f"weights file maps {self.net.sizes[0]} -> {self.net.sizes[-1]}, task needs {expect} -> 4"
            )

    def act(self, obs_rows: np.ndarray) -> np.ndarray:
        actions = np.zeros((len(self.controls), 4))
        for k in range(len(self.controls)):
            y = self.net(obs_rows[k])
            if self.spec.action_mode == ActionMode.PRT:
                actions[k] = (y + 1.0) / 2.0
            else:
                actions[k, 0] = (y[0] + 1.0) / 2.0
                actions[k, 1:4] = 6.0 * y[1:4]
        return actions
