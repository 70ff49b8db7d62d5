"""Smooth scalar fields on manifolds, with exact first derivatives.

Every field reports both a coordinate derivative (the row of partials in the
manifold's canonical coordinates; for the sphere, of a smooth ambient
extension) and the Riemannian gradient obtained by raising it through the
metric.  Multilayer perceptrons are the main test subjects; a few analytic
fields support the geometry checks.
"""

from __future__ import annotations

import json
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, ParseError, WrongManifold
from .manifolds import Manifold, Point, TangentVector

ACTIVATIONS = ("identity", "tanh", "softplus")


def _same_space(a: Manifold, b: Manifold) -> bool:
    return a.kind == b.kind and a.dim == b.dim


def require_same_space(field: "ScalarField", manifold: Manifold) -> None:
    if not _same_space(field.manifold, manifold):
        raise WrongManifold(
            f"field lives on {field.manifold.kind}(dim={field.manifold.dim}), "
            f"not on {manifold.kind}(dim={manifold.dim})"
        )


class ScalarField(ABC):
    """A smooth real-valued function on a fixed manifold."""

    def __init__(self, manifold: Manifold):
        self.manifold = manifold

    @abstractmethod
    def value(self, p: Point) -> float:
        ...

    @abstractmethod
    def coord_gradient(self, p: Point) -> np.ndarray:
        """Partial derivatives in canonical coordinates, shape (coord_dim,)."""

    def gradient(self, p: Point) -> TangentVector:
        """Riemannian gradient at ``p``."""
        return self.manifold.raise_gradient(p, self.coord_gradient(p))

    def differential(self, u: TangentVector) -> float:
        """Directional derivative along the tangent vector ``u``."""
        return float(self.coord_gradient(u.base) @ u.components)


class GradientFirstField(ScalarField):
    """Base for fields defined through their Riemannian gradient."""

    @abstractmethod
    def gradient(self, p: Point) -> TangentVector:
        ...

    def coord_gradient(self, p: Point) -> np.ndarray:
        return self.manifold.metric_at(p) @ self.gradient(p).components


class CoordinateField(ScalarField):
    """F(p) = p[index]; on the sphere this is an ambient height function."""

    def __init__(self, manifold: Manifold, index: int):
        super().__init__(manifold)
        if not 0 <= index < manifold.coord_dim:
            raise DimensionMismatch(
                f"coordinate index {index} out of range for coord_dim {manifold.coord_dim}"
            )
        self.index = index

    def value(self, p: Point) -> float:
        return float(p.coords[self.index])

    def coord_gradient(self, p: Point) -> np.ndarray:
        out = np.zeros(self.manifold.coord_dim)
        out[self.index] = 1.0
        return out


class AffineField(ScalarField):
    """F(p) = weights . p + bias in canonical coordinates."""

    def __init__(self, manifold: Manifold, weights, bias: float = 0.0):
        super().__init__(manifold)
        self.weights = np.asarray(weights, dtype=float)
        if self.weights.shape != (manifold.coord_dim,):
            raise DimensionMismatch(
                f"weights shape {self.weights.shape} does not match "
                f"coord_dim {manifold.coord_dim}"
            )
        self.bias = float(bias)

    def value(self, p: Point) -> float:
        return float(self.weights @ p.coords + self.bias)

    def coord_gradient(self, p: Point) -> np.ndarray:
        return np.array(self.weights)


class LogHeightField(ScalarField):
    """F(x, y) = log y on the half-plane; its gradient has constant norm 1."""

    def __init__(self, manifold: Manifold):
        if manifold.kind != "half_plane2":
            raise WrongManifold("LogHeightField is defined on the half-plane only")
        super().__init__(manifold)

    def value(self, p: Point) -> float:
        return float(np.log(p.coords[1]))

    def coord_gradient(self, p: Point) -> np.ndarray:
        return np.array([0.0, 1.0 / float(p.coords[1])])


class GaussianBumpField(GradientFirstField):
    """F(p) = exp(-d(p, center)^2 / (2 width^2)).

    Smooth wherever the squared distance to the center is (everywhere except
    the center's cut locus, which callers must stay away from).
    """

    def __init__(self, manifold: Manifold, center: Point, width: float = 1.0):
        super().__init__(manifold)
        self.center = manifold.validate_point(center)
        if width <= 0:
            raise ValueError("width must be positive")
        self.width = float(width)

    def value(self, p: Point) -> float:
        d = self.manifold.dist(p, self.center)
        return float(np.exp(-0.5 * (d / self.width) ** 2))

    def gradient(self, p: Point) -> TangentVector:
        toward = self.manifold.log_map(p, self.center)
        return (self.value(p) / self.width**2) * toward


@dataclass(frozen=True)
class LayerSpec:
    """One dense layer: out = activation(weights @ x + bias)."""

    weights: np.ndarray
    bias: np.ndarray
    activation: str

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        b = np.array(self.bias, dtype=float)
        if w.ndim != 2:
            raise ParseError(f"layer weights must be a matrix, got ndim {w.ndim}")
        if b.shape != (w.shape[0],):
            raise ParseError(
                f"bias shape {b.shape} does not match weight rows {w.shape[0]}"
            )
        if self.activation not in ACTIVATIONS:
            raise ParseError(
                f"unknown activation {self.activation!r}; expected one of {ACTIVATIONS}"
            )
        w.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", b)


@dataclass(frozen=True)
class MLPWeights:
    """A fully-connected network mapping coord_dim inputs to one output."""

    input_dim: int
    layers: tuple[LayerSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if not self.layers:
            raise ParseError("network needs at least one layer")
        fan_in = self.input_dim
        for i, layer in enumerate(self.layers):
            if layer.weights.shape[1] != fan_in:
                raise ParseError(
                    f"layer {i} expects {layer.weights.shape[1]} inputs, got {fan_in}"
                )
            fan_in = layer.weights.shape[0]
        if fan_in != 1:
            raise ParseError(f"final layer must produce 1 output, got {fan_in}")


def _act(name: str, z: np.ndarray) -> np.ndarray:
    if name == "identity":
        return z
    if name == "tanh":
        return np.tanh(z)
    return np.logaddexp(0.0, z)  # softplus


def _act_prime(name: str, z: np.ndarray) -> np.ndarray:
    if name == "identity":
        return np.ones_like(z)
    if name == "tanh":
        return 1.0 - np.tanh(z) ** 2
    # logistic sigmoid, stable on both tails
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


class MLPField(ScalarField):
    """Scalar field computed by a small dense network on canonical coordinates."""

    def __init__(self, manifold: Manifold, weights: MLPWeights):
        super().__init__(manifold)
        if weights.input_dim != manifold.coord_dim:
            raise DimensionMismatch(
                f"network expects {weights.input_dim} inputs; manifold "
                f"coordinates have {manifold.coord_dim}"
            )
        self.weights = weights

    def _forward(self, x: np.ndarray) -> tuple[float, list[np.ndarray]]:
        pre = []
        a = np.array(x, dtype=float)
        for layer in self.weights.layers:
            z = layer.weights @ a + layer.bias
            pre.append(z)
            a = _act(layer.activation, z)
        return float(a[0]), pre

    def value(self, p: Point) -> float:
        out, _ = self._forward(p.coords)
        return out

    def coord_gradient(self, p: Point) -> np.ndarray:
        _, pre = self._forward(p.coords)
        grad = np.ones(1)
        for layer, z in zip(reversed(self.weights.layers), reversed(pre)):
            grad = layer.weights.T @ (grad * _act_prime(layer.activation, z))
        return grad


class CombinedField(ScalarField):
    """A fixed linear combination of fields on one manifold."""

    def __init__(self, coefficients: Sequence[float], fields: Sequence[ScalarField]):
        if len(coefficients) != len(fields) or not fields:
            raise ParseError("need one coefficient per field, and at least one field")
        base = fields[0].manifold
        for f in fields[1:]:
            require_same_space(f, base)
        super().__init__(base)
        self.coefficients = tuple(float(c) for c in coefficients)
        self.fields = tuple(fields)

    def value(self, p: Point) -> float:
        return sum(c * f.value(p) for c, f in zip(self.coefficients, self.fields))

    def coord_gradient(self, p: Point) -> np.ndarray:
        out = np.zeros(self.manifold.coord_dim)
        for c, f in zip(self.coefficients, self.fields):
            out += c * f.coord_gradient(p)
        return out


def linear_combination(
    coefficients: Sequence[float], fields: Sequence[ScalarField]
) -> ScalarField:
    return CombinedField(coefficients, fields)


class PushforwardField(GradientFirstField):
    """The field F composed with the inverse of an isometry.

    Gradients push forward through the map's differential, which is what
    makes invariance checks cheap and exact.
    """

    def __init__(self, field: ScalarField, isometry):
        require_same_space(field, isometry.manifold)
        super().__init__(isometry.manifold)
        self.field = field
        self.isometry = isometry
        self._inverse = isometry.inverse()

    def value(self, p: Point) -> float:
        return self.field.value(self._inverse.apply(p))

    def gradient(self, p: Point) -> TangentVector:
        q = self._inverse.apply(p)
        return self.isometry.differential(self.field.gradient(q))


class ComposedWithIsometry(ScalarField):
    """The field F composed with an isometry s, that is p -> F(s(p))."""

    def __init__(self, field: ScalarField, isometry):
        require_same_space(field, isometry.manifold)
        super().__init__(isometry.manifold)
        self.field = field
        self.isometry = isometry

    def value(self, p: Point) -> float:
        return self.field.value(self.isometry.apply(p))

    def coord_gradient(self, p: Point) -> np.ndarray:
        # d(F o s)_p(u) = dF_{s(p)}(ds_p u); realised through the metric so
        # it works uniformly for all three coordinate conventions.
        grad = self.gradient(p)
        return self.manifold.metric_at(p) @ grad.components

    def gradient(self, p: Point) -> TangentVector:
        upstream = self.field.gradient(self.isometry.apply(p))
        return self.isometry.inverse().differential(upstream)


# -- network construction and serialization --------------------------------


def random_mlp(
    input_dim: int,
    hidden: Sequence[int],
    rng: np.random.Generator,
    activation: str = "tanh",
    scale: float = 1.0,
) -> MLPWeights:
    """Randomly initialised network with the given hidden widths."""
    widths = [input_dim, *hidden, 1]
    layers = []
    for i in range(len(widths) - 1):
        fan_in, fan_out = widths[i], widths[i + 1]
        w = rng.standard_normal((fan_out, fan_in)) * scale / np.sqrt(fan_in)
        b = rng.standard_normal(fan_out) * 0.1
        act = activation if i < len(widths) - 2 else "identity"
        layers.append(LayerSpec(w, b, act))
    return MLPWeights(input_dim, tuple(layers))


def permute_hidden_units(weights: MLPWeights, layer: int, permutation) -> MLPWeights:
    """Reorder the outputs of one hidden layer; the function is unchanged."""
    perm = np.asarray(permutation, dtype=int)
    layers = list(weights.layers)
    if not 0 <= layer < len(layers) - 1:
        raise ValueError("can only permute a hidden layer")
    here = layers[layer]
    if perm.shape != (here.weights.shape[0],) or sorted(perm) != list(range(len(perm))):
        raise ValueError("permutation must reorder the layer's output units")
    layers[layer] = LayerSpec(here.weights[perm], here.bias[perm], here.activation)
    after = layers[layer + 1]
    layers[layer + 1] = LayerSpec(
        after.weights[:, perm], after.bias, after.activation
    )
    return MLPWeights(weights.input_dim, tuple(layers))


def insert_identity_layer(weights: MLPWeights, position: int) -> MLPWeights:
    """Insert a pass-through layer; the architecture changes, the function not."""
    layers = list(weights.layers)
    if not 0 <= position <= len(layers):
        raise ValueError("position out of range")
    width = weights.input_dim if position == 0 else layers[position - 1].weights.shape[0]
    layers.insert(position, LayerSpec(np.eye(width), np.zeros(width), "identity"))
    return MLPWeights(weights.input_dim, tuple(layers))


def swap_input_columns(weights: MLPWeights, i: int, j: int) -> MLPWeights:
    """Network computing F(swap_ij(x)): exchange two first-layer columns."""
    first = weights.layers[0]
    cols = list(range(first.weights.shape[1]))
    cols[i], cols[j] = cols[j], cols[i]
    swapped = LayerSpec(first.weights[:, cols], first.bias, first.activation)
    return MLPWeights(weights.input_dim, (swapped, *weights.layers[1:]))


def mlp_to_dict(weights: MLPWeights) -> dict:
    return {
        "input_dim": weights.input_dim,
        "layers": [
            {
                "weights": layer.weights.tolist(),
                "bias": layer.bias.tolist(),
                "activation": layer.activation,
            }
            for layer in weights.layers
        ],
    }


def mlp_from_dict(data: dict) -> MLPWeights:
    if not isinstance(data, dict):
        raise ParseError("network document must be a JSON object")
    unknown = set(data) - {"input_dim", "layers"}
    if unknown:
        raise ParseError(f"unknown network keys: {sorted(unknown)}")
    if "input_dim" not in data or "layers" not in data:
        raise ParseError("network document needs 'input_dim' and 'layers'")
    input_dim = data["input_dim"]
    if not isinstance(input_dim, int) or isinstance(input_dim, bool) or input_dim < 1:
        raise ParseError(f"input_dim must be a positive integer, got {input_dim!r}")
    if not isinstance(data["layers"], list) or not data["layers"]:
        raise ParseError("'layers' must be a non-empty list")
    layers = []
    for i, entry in enumerate(data["layers"]):
        if not isinstance(entry, dict):
            raise ParseError(f"layer {i} must be an object")
        extra = set(entry) - {"weights", "bias", "activation"}
        if extra:
            raise ParseError(f"layer {i} has unknown keys: {sorted(extra)}")
        missing = {"weights", "bias", "activation"} - set(entry)
        if missing:
            raise ParseError(f"layer {i} is missing {sorted(missing)}")
        try:
            layers.append(
                LayerSpec(
                    np.array(entry["weights"], dtype=float),
                    np.array(entry["bias"], dtype=float),
                    entry["activation"],
                )
            )
        except (TypeError, ValueError) as exc:
            raise ParseError(f"layer {i} is malformed: {exc}") from exc
    return MLPWeights(input_dim, tuple(layers))


def mlp_from_file(path: str | Path) -> MLPWeights:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read network file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"network file {path} is not valid JSON: {exc}") from exc
    return mlp_from_dict(data)


def mlp_to_file(weights: MLPWeights, path: str | Path) -> None:
    Path(path).write_text(json.dumps(mlp_to_dict(weights), indent=2) + "\n")
