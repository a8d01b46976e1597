"""Scalar-in/scalar-out feedforward network trained by backprop with momentum.

The architecture is deliberately small: one input, a tanh hidden layer
(five units by default), one output, a bias at every layer.  Targets are
z-scored and routinely exceed (-1, 1), so the output unit is linear by
default; a literal tanh output is available through
``MlpConfig.output_activation`` for comparison.

Training performs per-sample stochastic updates with momentum,

    delta_t = -eta * grad + alpha * delta_{t-1},

visiting each epoch in a freshly shuffled order.  The per-epoch inner loop
runs in the selected kernel backend.
"""

from dataclasses import dataclass, replace

import numpy as np

from ._backend import kernels
from .errors import DivergenceFault, MalformedModel

__all__ = [
    "MlpConfig",
    "TrainConfig",
    "MlpModel",
    "MlpGradient",
    "init_model",
    "forward",
    "gradient",
    "train",
    "serialize",
    "deserialize",
    "save_model",
    "load_model",
]

OUTPUT_ACTIVATIONS = ("identity", "tanh")


@dataclass(frozen=True)
class MlpConfig:
    """Architecture and weight-initialization settings."""

    input_dim: int = 1
    hidden_units: int = 5
    output_dim: int = 1
    hidden_activation: str = "tanh"
    output_activation: str = "identity"
    init_scale: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.input_dim != 1 or self.output_dim != 1:
            raise ValueError("only scalar input/output networks are supported")
        if self.hidden_units < 1:
            raise ValueError("hidden_units must be >= 1")
        if self.hidden_activation != "tanh":
            raise ValueError("hidden activation must be tanh")
        if self.output_activation not in OUTPUT_ACTIVATIONS:
            raise ValueError(
                f"output_activation must be one of {OUTPUT_ACTIVATIONS}"
            )
        if self.init_scale < 0.0:
            raise ValueError("init_scale must be non-negative")


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters of the momentum backprop loop."""

    learning_rate: float = 0.05
    momentum: float = 0.9
    max_epochs: int = 5000
    target_mse: float = 1e-3
    shuffle_seed: int = 0

    def __post_init__(self):
        if not self.learning_rate > 0.0:
            raise ValueError("learning_rate must be positive")
        if not 0.0 <= self.momentum < 1.0:
            raise ValueError("momentum must lie in [0, 1)")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")


@dataclass
class MlpModel:
    """Weights of a 1-H-1 network plus training metadata.

    ``hidden_weights`` and ``hidden_biases`` have one entry per hidden unit;
    ``output_weights`` holds the hidden-to-output row.
    """

    hidden_weights: np.ndarray
    hidden_biases: np.ndarray
    output_weights: np.ndarray
    output_bias: float
    output_activation: str = "identity"
    epochs_trained: int = 0
    final_mse: float = float("nan")

    @property
    def hidden_units(self):
        return len(self.hidden_weights)

    def copy(self):
        return replace(
            self,
            hidden_weights=self.hidden_weights.copy(),
            hidden_biases=self.hidden_biases.copy(),
            output_weights=self.output_weights.copy(),
        )


@dataclass
class MlpGradient:
    """Loss gradient laid out like MlpModel's weights."""

    hidden_weights: np.ndarray
    hidden_biases: np.ndarray
    output_weights: np.ndarray
    output_bias: float


def init_model(config):
    """Draw all weights and biases uniformly from [-init_scale, +init_scale].

    Deterministic for a given config.seed.
    """
    rng = np.random.default_rng(config.seed)
    s = config.init_scale
    h = config.hidden_units
    return MlpModel(
        hidden_weights=rng.uniform(-s, s, h),
        hidden_biases=rng.uniform(-s, s, h),
        output_weights=rng.uniform(-s, s, h),
        output_bias=float(rng.uniform(-s, s)),
        output_activation=config.output_activation,
    )


def forward(model, x):
    """Network output for a scalar or an array of inputs."""
    x = np.asarray(x, dtype=np.float64)
    scalar = x.ndim == 0
    hidden = np.tanh(np.multiply.outer(x, model.hidden_weights) + model.hidden_biases)
    z = hidden @ model.output_weights + model.output_bias
    if model.output_activation == "tanh":
        z = np.tanh(z)
    return float(z) if scalar else z


def gradient(model, x, target):
    """Analytic gradient of the per-sample loss (prediction - target)^2 / 2."""
    t = np.tanh(model.hidden_weights * x + model.hidden_biases)
    z = float(model.output_weights @ t + model.output_bias)
    if model.output_activation == "tanh":
        pred = np.tanh(z)
        dz = (pred - target) * (1.0 - pred * pred)
    else:
        dz = z - target
    gh = dz * model.output_weights * (1.0 - t * t)
    return MlpGradient(
        hidden_weights=gh * x,
        hidden_biases=gh,
        output_weights=dz * t,
        output_bias=dz,
    )


def train(model, inputs, targets, config):
    """Train a copy of ``model`` on standardized (input, target) pairs.

    Runs per-sample momentum updates, one shuffled pass per epoch, until the
    epoch-end MSE over the whole dataset reaches ``config.target_mse`` or
    ``config.max_epochs`` passes have run.  Returns (trained model, array of
    epoch-end MSE values).  Raises DivergenceFault if the MSE goes
    non-finite.
    """
    xs = np.ascontiguousarray(inputs, dtype=np.float64)
    ys = np.ascontiguousarray(targets, dtype=np.float64)
    if xs.ndim != 1 or xs.shape != ys.shape:
        raise ValueError("inputs and targets must be matching 1-D arrays")
    if xs.size == 0:
        raise ValueError("training set is empty")
    wh = np.ascontiguousarray(model.hidden_weights, dtype=np.float64).copy()
    bh = np.ascontiguousarray(model.hidden_biases, dtype=np.float64).copy()
    wo = np.ascontiguousarray(model.output_weights, dtype=np.float64).copy()
    bo = np.array([model.output_bias], dtype=np.float64)
    vwh = np.zeros_like(wh)
    vbh = np.zeros_like(bh)
    vwo = np.zeros_like(wo)
    vbo = np.zeros(1, dtype=np.float64)
    out_tanh = 1 if model.output_activation == "tanh" else 0
    rng = np.random.default_rng(config.shuffle_seed)
    history = []
    for _ in range(config.max_epochs):
        order = rng.permutation(xs.size).astype(np.int64)
        kernels.mlp_epoch(wh, bh, wo, bo, vwh, vbh, vwo, vbo, xs, ys, order,
                          config.learning_rate, config.momentum, out_tanh)
        mse = kernels.mlp_mse(wh, bh, wo, bo, xs, ys, out_tanh)
        history.append(mse)
        if not np.isfinite(mse):
            raise DivergenceFault(
                f"training diverged at epoch {len(history)} (mse={mse})"
            )
        if mse <= config.target_mse:
            break
    trained = MlpModel(
        hidden_weights=wh,
        hidden_biases=bh,
        output_weights=wo,
        output_bias=float(bo[0]),
        output_activation=model.output_activation,
        epochs_trained=len(history),
        final_mse=history[-1],
    )
    return trained, np.array(history)


def serialize(model):
    """Text form: header `mlp 1 H 1`, then one line each of hidden weights,
    hidden biases, output weights, output bias, at full precision."""
    lines = [
        f"mlp 1 {model.hidden_units} 1",
        " ".join(f"{v:.17g}" for v in model.hidden_weights),
        " ".join(f"{v:.17g}" for v in model.hidden_biases),
        " ".join(f"{v:.17g}" for v in model.output_weights),
        f"{model.output_bias:.17g}",
    ]
    return "\n".join(lines) + "\n"


def deserialize(text):
    """Parse the `serialize` format; raises MalformedModel on anything off."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) != 5:
        raise MalformedModel(f"expected 5 non-empty lines, found {len(lines)}")
    header = lines[0].split()
    if len(header) != 4 or header[0] != "mlp":
        raise MalformedModel(f"bad header {lines[0]!r}")
    try:
        din, hidden, dout = (int(v) for v in header[1:])
    except ValueError as exc:
        raise MalformedModel(f"bad header {lines[0]!r}") from exc
    if din != 1 or dout != 1 or hidden < 1:
        raise MalformedModel(f"unsupported dimensions {din}-{hidden}-{dout}")

    def parse(line, expect, what):
        try:
            values = np.array([float(v) for v in line.split()], dtype=np.float64)
        except ValueError as exc:
            raise MalformedModel(f"non-numeric {what}") from exc
        if values.size != expect:
            raise MalformedModel(
                f"expected {expect} {what}, found {values.size}"
            )
        return values

    return MlpModel(
        hidden_weights=parse(lines[1], hidden, "hidden weights"),
        hidden_biases=parse(lines[2], hidden, "hidden biases"),
        output_weights=parse(lines[3], hidden, "output weights"),
        output_bias=float(parse(lines[4], 1, "output bias")[0]),
    )


def save_model(model, path):
    with open(path, "w") as fh:
        fh.write(serialize(model))


def load_model(path):
    with open(path) as fh:
        return deserialize(fh.read())
