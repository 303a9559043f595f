"""Fully connected ReLU networks: layer types, evaluation, JSON I/O.

A network is an ordered list of dense and ReLU nodes over a declared
input dimension.  Dense nodes carry ``weights`` (out x in, row-major)
and ``bias``; ReLU nodes carry nothing and act elementwise on whatever
width reaches them.  The JSON form mirrors this structure:

    {"input_dim": 2,
     "layers": [{"type": "dense", "weights": [[...], ...], "bias": [...]},
                {"type": "relu"}]}

Schema violations are reported with the offending layer index.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DimensionChainError, NonFiniteWeight, SchemaError


@dataclass(frozen=True)
class DenseLayer:
    """Affine node y = W x + b with W of shape (out, in)."""

    weights: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        W = np.atleast_2d(np.asarray(self.weights, dtype=float))
        b = np.atleast_1d(np.asarray(self.bias, dtype=float))
        object.__setattr__(self, "weights", W)
        object.__setattr__(self, "bias", b)
        if W.ndim != 2 or W.shape[0] < 1 or W.shape[1] < 1:
            raise SchemaError(f"weights must be a 2-D matrix, got shape {W.shape}")
        if b.shape != (W.shape[0],):
            raise SchemaError(
                f"bias length {b.shape[0]} does not match {W.shape[0]} output rows"
            )
        if not (np.isfinite(W).all() and np.isfinite(b).all()):
            raise NonFiniteWeight("dense layer contains a non-finite weight or bias")

    @property
    def in_dim(self) -> int:
        return self.weights.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weights.shape[0]

    def homogeneous(self) -> np.ndarray:
        """The lift T = [[W, b], [0, 1]] acting on [x; 1]."""
        out, inp = self.weights.shape
        T = np.zeros((out + 1, inp + 1))
        T[:out, :inp] = self.weights
        T[:out, inp] = self.bias
        T[out, inp] = 1.0
        return T


@dataclass(frozen=True)
class ReLULayer:
    """Elementwise max(z, 0); width is inherited from the incoming signal."""


Layer = DenseLayer | ReLULayer


class Network:
    """A validated dense/ReLU chain."""

    def __init__(self, input_dim: int, layers):
        if not isinstance(input_dim, int) or input_dim < 1:
            raise SchemaError(f"input_dim must be a positive integer, got {input_dim!r}")
        layers = tuple(layers)
        width = input_dim
        relu_widths = []
        for i, layer in enumerate(layers):
            if isinstance(layer, DenseLayer):
                if layer.in_dim != width:
                    raise DimensionChainError(
                        f"layer {i}: expects {layer.in_dim} inputs but receives {width}"
                    )
                width = layer.out_dim
            elif isinstance(layer, ReLULayer):
                relu_widths.append(width)
            else:
                raise SchemaError(f"layer {i}: unsupported layer object {type(layer).__name__}")
        self.input_dim = input_dim
        self.layers = layers
        self.output_dim = width
        self.relu_widths = relu_widths

    @property
    def n_relu_nodes(self) -> int:
        return len(self.relu_widths)

    def forward(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.input_dim,):
            raise DimensionChainError(
                f"input shape {x.shape} does not match input_dim {self.input_dim}"
            )
        v = x
        for layer in self.layers:
            if isinstance(layer, DenseLayer):
                v = layer.weights @ v + layer.bias
            else:
                v = np.maximum(v, 0.0)
        return v

    def forward_many(self, X) -> np.ndarray:
        """Row-wise forward pass over an (n, input_dim) batch."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.input_dim:
            raise DimensionChainError(
                f"batch width {X.shape[1]} does not match input_dim {self.input_dim}"
            )
        V = X
        for layer in self.layers:
            if isinstance(layer, DenseLayer):
                V = V @ layer.weights.T + layer.bias
            else:
                V = np.maximum(V, 0.0)
        return V

    def preactivations(self, x) -> list[np.ndarray]:
        """The signal entering each ReLU node, in network order."""
        x = np.asarray(x, dtype=float)
        v = x
        out = []
        for layer in self.layers:
            if isinstance(layer, DenseLayer):
                v = layer.weights @ v + layer.bias
            else:
                out.append(v.copy())
                v = np.maximum(v, 0.0)
        return out

    def activation_pattern(self, x) -> str:
        """'+'/'-' per ReLU neuron, all nodes concatenated; zeros count as '+'."""
        return "".join(
            "".join("+" if z >= 0.0 else "-" for z in pre) for pre in self.preactivations(x)
        )

    def __repr__(self):
        shape = [self.input_dim]
        for layer in self.layers:
            if isinstance(layer, DenseLayer):
                shape.append(layer.out_dim)
        return f"Network({'-'.join(map(str, shape))}, relu_nodes={self.n_relu_nodes})"


def network_from_dict(data: dict) -> Network:
    if not isinstance(data, dict):
        raise SchemaError(f"network document must be an object, got {type(data).__name__}")
    if "input_dim" not in data:
        raise SchemaError("missing required key 'input_dim'")
    if "layers" not in data or not isinstance(data["layers"], list):
        raise SchemaError("missing or malformed 'layers' list")
    input_dim = data["input_dim"]
    if not isinstance(input_dim, int) or isinstance(input_dim, bool) or input_dim < 1:
        raise SchemaError(f"input_dim must be a positive integer, got {input_dim!r}")
    layers: list[Layer] = []
    for i, spec in enumerate(data["layers"]):
        if not isinstance(spec, dict) or "type" not in spec:
            raise SchemaError(f"layer {i}: each layer needs a 'type' field")
        kind = spec["type"]
        if kind == "dense":
            if "weights" not in spec or "bias" not in spec:
                raise SchemaError(f"layer {i}: dense layers need 'weights' and 'bias'")
            try:
                W = np.array(spec["weights"], dtype=float)
                b = np.array(spec["bias"], dtype=float)
            except (TypeError, ValueError) as exc:
                raise SchemaError(f"layer {i}: malformed numeric data ({exc})") from exc
            if W.ndim != 2:
                raise SchemaError(f"layer {i}: weights must be a matrix, got ndim {W.ndim}")
            try:
                layers.append(DenseLayer(W, b))
            except (SchemaError, NonFiniteWeight) as exc:
                raise type(exc)(f"layer {i}: {exc}") from exc
        elif kind == "relu":
            layers.append(ReLULayer())
        else:
            raise SchemaError(f"layer {i}: unknown layer type {kind!r}")
    try:
        return Network(input_dim, layers)
    except DimensionChainError:
        raise


def network_to_dict(net: Network) -> dict:
    layers = []
    for layer in net.layers:
        if isinstance(layer, DenseLayer):
            layers.append(
                {
                    "type": "dense",
                    "weights": layer.weights.tolist(),
                    "bias": layer.bias.tolist(),
                }
            )
        else:
            layers.append({"type": "relu"})
    return {"input_dim": net.input_dim, "layers": layers}


def load_network(path) -> Network:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}") from exc
    return network_from_dict(data)


def save_network(net: Network, path) -> None:
    with open(path, "w") as fh:
        json.dump(network_to_dict(net), fh, indent=2)
        fh.write("\n")


def random_network(input_dim: int, hidden_widths, output_dim: int, seed: int) -> Network:
    """Dense/ReLU stack with N(0, 1) weights and U(-1, 1) biases.

    One ReLU after every hidden dense node, then a final dense readout.
    """
    rng = np.random.default_rng(seed)
    layers: list[Layer] = []
    width = input_dim
    for h in hidden_widths:
        layers.append(DenseLayer(rng.standard_normal((h, width)), rng.uniform(-1, 1, h)))
        layers.append(ReLULayer())
        width = h
    layers.append(DenseLayer(rng.standard_normal((output_dim, width)), rng.uniform(-1, 1, output_dim)))
    return Network(input_dim, layers)
