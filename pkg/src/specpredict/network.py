"""MLP data model, bipolar-sigmoid forward pass, and model-file IO.

The network is a plain feed-forward perceptron: ``order`` inputs, any
number of hidden layers, and an output layer.  Every neuron applies the
bipolar sigmoid to the weighted sum of its inputs plus its threshold.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ._validation import as_rng, check_interval, check_vector
from .errors import StructuralError

MODEL_ENCODING_VERSION = 1

# Largest double below 1.  Forward activations are clipped here so that a
# saturated neuron never returns exactly +/-1 (which would zero its
# derivative and poison the NaN checks downstream).
_ACTIVATION_CEILING = float(np.nextafter(1.0, 0.0))


def activation(v):
    """Bipolar sigmoid (1 - e^-v) / (1 + e^-v).

    Strictly increasing, odd, with outputs in the open interval (-1, 1);
    algebraically identical to tanh(v/2) and evaluated through it for
    stability at large |v|.  Accepts scalars or arrays.
    """
    arr = np.asarray(v, dtype=np.float64)
    out = np.clip(np.tanh(arr / 2.0), -_ACTIVATION_CEILING, _ACTIVATION_CEILING)
    return float(out) if arr.ndim == 0 else out


def activation_derivative(y):
    """Slope of the activation, expressed in terms of its output y: (1 - y^2) / 2."""
    arr = np.asarray(y, dtype=np.float64)
    out = (1.0 - arr * arr) / 2.0
    return float(out) if arr.ndim == 0 else out


@dataclass(frozen=True)
class NetworkTopology:
    """Layer sizes: ``order`` inputs, hidden layers, then the output layer.

    The input layer holds no neurons; ``len(hidden_sizes) + 1`` computing
    layers carry weights and per-neuron thresholds.
    """

    order: int
    hidden_sizes: tuple[int, ...] = (10,)
    output_size: int = 1

    def __post_init__(self):
        object.__setattr__(self, "hidden_sizes", tuple(int(h) for h in self.hidden_sizes))
        if self.order < 1:
            raise StructuralError(f"order must be >= 1, got {self.order}")
        if any(h < 1 for h in self.hidden_sizes):
            raise StructuralError(f"hidden sizes must be >= 1, got {self.hidden_sizes}")
        if self.output_size < 1:
            raise StructuralError(f"output_size must be >= 1, got {self.output_size}")

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        """Neuron counts of the computing layers, input layer excluded."""
        return (*self.hidden_sizes, self.output_size)

    @property
    def fan_ins(self) -> tuple[int, ...]:
        """Input count seen by each computing layer."""
        return (self.order, *self.hidden_sizes)

    @property
    def parameter_count(self) -> int:
        """Total number of weights plus thresholds."""
        return sum(n * (f + 1) for n, f in zip(self.layer_sizes, self.fan_ins))


def _flatten_layers(weights, thresholds) -> np.ndarray:
    # Canonical order: layers first-to-last; within a layer, neuron by
    # neuron; per neuron, incoming weights in input order then the
    # threshold.  The Jacobian's column order and the GA gene order both
    # follow this flattening.
    parts = [
        np.concatenate([w, b[:, None]], axis=1).ravel()
        for w, b in zip(weights, thresholds)
    ]
    return np.concatenate(parts) if parts else np.empty(0)


def _unflatten_layers(topology: NetworkTopology, flat: np.ndarray):
    flat = np.asarray(flat, dtype=np.float64)
    if flat.shape != (topology.parameter_count,):
        raise StructuralError(
            f"flat parameter vector must have length {topology.parameter_count}, "
            f"got shape {flat.shape}"
        )
    weights, thresholds, offset = [], [], 0
    for n, f in zip(topology.layer_sizes, topology.fan_ins):
        block = flat[offset : offset + n * (f + 1)].reshape(n, f + 1)
        weights.append(block[:, :f].copy())
        thresholds.append(block[:, f].copy())
        offset += n * (f + 1)
    return weights, thresholds


@dataclass
class NetworkWeights:
    """All adaptive parameters: per-layer weight matrices and threshold vectors.

    ``weights[i]`` has shape (neurons in layer i, inputs to layer i) and
    ``thresholds[i]`` has one entry per neuron.
    """

    topology: NetworkTopology
    weights: list[np.ndarray]
    thresholds: list[np.ndarray]

    def __post_init__(self):
        self.weights = [np.asarray(w, dtype=np.float64) for w in self.weights]
        self.thresholds = [np.asarray(b, dtype=np.float64) for b in self.thresholds]
        self.validate()

    def validate(self):
        t = self.topology
        if len(self.weights) != len(t.layer_sizes) or len(self.thresholds) != len(t.layer_sizes):
            raise StructuralError("layer count does not match the topology")
        for i, (n, f) in enumerate(zip(t.layer_sizes, t.fan_ins)):
            if self.weights[i].shape != (n, f):
                raise StructuralError(
                    f"layer {i} weight matrix must be {(n, f)}, got {self.weights[i].shape}"
                )
            if self.thresholds[i].shape != (n,):
                raise StructuralError(
                    f"layer {i} threshold vector must be ({n},), got {self.thresholds[i].shape}"
                )
            if not (np.all(np.isfinite(self.weights[i])) and np.all(np.isfinite(self.thresholds[i]))):
                raise StructuralError(f"layer {i} contains non-finite parameters")

    @classmethod
    def zeros(cls, topology: NetworkTopology) -> "NetworkWeights":
        """Explicit all-zero network (the random initializer rejects [0, 0])."""
        return cls(
            topology,
            [np.zeros((n, f)) for n, f in zip(topology.layer_sizes, topology.fan_ins)],
            [np.zeros(n) for n in topology.layer_sizes],
        )

    @classmethod
    def from_flat(cls, topology: NetworkTopology, flat) -> "NetworkWeights":
        weights, thresholds = _unflatten_layers(topology, flat)
        return cls(topology, weights, thresholds)

    def to_flat(self) -> np.ndarray:
        return _flatten_layers(self.weights, self.thresholds)

    def copy(self) -> "NetworkWeights":
        return NetworkWeights(
            self.topology,
            [w.copy() for w in self.weights],
            [b.copy() for b in self.thresholds],
        )

    def all_finite(self) -> bool:
        return all(np.all(np.isfinite(w)) for w in self.weights) and all(
            np.all(np.isfinite(b)) for b in self.thresholds
        )


@dataclass
class ForwardTrace:
    """Everything one forward pass produced, layer by layer."""

    inputs: np.ndarray
    pre_activations: list[np.ndarray] = field(default_factory=list)
    activations: list[np.ndarray] = field(default_factory=list)

    @property
    def output(self) -> np.ndarray:
        return self.activations[-1]


def forward(weights: NetworkWeights, inputs) -> ForwardTrace:
    """Run one input vector through the network and keep the full trace."""
    x = check_vector(inputs, length=weights.topology.order, name="inputs")
    pre, act = [], []
    prev = x
    for w, b in zip(weights.weights, weights.thresholds):
        v = w @ prev + b
        y = activation(v)
        pre.append(v)
        act.append(y)
        prev = y
    return ForwardTrace(x, pre, act)


def forward_batch(weights: NetworkWeights, x_rows: np.ndarray):
    """Vectorized forward over a pattern matrix.

    Returns (pre_activations, activations) as lists of (n_patterns, layer)
    arrays.  Row p of the result equals forward(weights, x_rows[p]).
    """
    x_rows = np.asarray(x_rows, dtype=np.float64)
    if x_rows.ndim != 2 or x_rows.shape[1] != weights.topology.order:
        raise StructuralError(
            f"pattern matrix must be (n, {weights.topology.order}), got {x_rows.shape}"
        )
    pre, act = [], []
    prev = x_rows
    for w, b in zip(weights.weights, weights.thresholds):
        v = prev @ w.T + b
        y = activation(v)
        pre.append(v)
        act.append(y)
        prev = y
    return pre, act


def network_outputs(weights: NetworkWeights, x_rows: np.ndarray) -> np.ndarray:
    """Output matrix (n_patterns, output_size) for a batch of inputs."""
    _, act = forward_batch(weights, x_rows)
    return act[-1]


def init_random(topology: NetworkTopology, weight_range, rng=None) -> NetworkWeights:
    """Draw every weight and threshold i.i.d. uniform on [lo, hi).

    Draw order is fixed (per layer: weight matrix row-major, then the
    threshold vector) so a seeded generator reproduces the network.
    """
    lo, hi = check_interval(weight_range[0], weight_range[1], name="weight_range")
    rng = as_rng(rng)
    weights, thresholds = [], []
    for n, f in zip(topology.layer_sizes, topology.fan_ins):
        weights.append(rng.uniform(lo, hi, size=(n, f)))
        thresholds.append(rng.uniform(lo, hi, size=n))
    return NetworkWeights(topology, weights, thresholds)


def _fmt_float(x) -> str:
    # 17 significant digits: enough to reproduce any double bit-exactly.
    return format(float(x), ".17g")


def _json_vector(vec) -> str:
    return "[" + ", ".join(_fmt_float(v) for v in vec) + "]"


def _json_matrix(mat) -> str:
    return "[" + ", ".join(_json_vector(row) for row in mat) + "]"


def model_to_json(weights: NetworkWeights) -> str:
    """Serialize a model to the JSON document used by the CLI.

    Floats are written with 17 significant digits so that save -> load
    reproduces every parameter bit-exactly.
    """
    t = weights.topology
    hidden = ", ".join(str(h) for h in t.hidden_sizes)
    lines = [
        "{",
        f'  "encoding_version": {MODEL_ENCODING_VERSION},',
        f'  "topology": {{"order": {t.order}, "hidden_sizes": [{hidden}], '
        f'"output_size": {t.output_size}}},',
        '  "weights": [',
    ]
    for i, w in enumerate(weights.weights):
        comma = "," if i < len(weights.weights) - 1 else ""
        lines.append(f"    {_json_matrix(w)}{comma}")
    lines.append("  ],")
    lines.append('  "thresholds": [')
    for i, b in enumerate(weights.thresholds):
        comma = "," if i < len(weights.thresholds) - 1 else ""
        lines.append(f"    {_json_vector(b)}{comma}")
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def model_from_json(text: str) -> NetworkWeights:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructuralError(f"model file is not valid JSON: {exc}") from exc
    try:
        version = doc["encoding_version"]
        topo = doc["topology"]
        topology = NetworkTopology(
            order=int(topo["order"]),
            hidden_sizes=tuple(int(h) for h in topo["hidden_sizes"]),
            output_size=int(topo["output_size"]),
        )
        weights = [np.asarray(w, dtype=np.float64) for w in doc["weights"]]
        thresholds = [np.asarray(b, dtype=np.float64) for b in doc["thresholds"]]
    except (KeyError, TypeError) as exc:
        raise StructuralError(f"model file is missing required field: {exc}") from exc
    if version != MODEL_ENCODING_VERSION:
        raise StructuralError(f"unsupported model encoding_version {version}")
    return NetworkWeights(topology, weights, thresholds)


def save_model(weights: NetworkWeights, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(model_to_json(weights))


def load_model(path) -> NetworkWeights:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_json(fh.read())
