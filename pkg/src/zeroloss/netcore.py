"""ReLU networks in layerwise and cumulative form, truncation maps and projector algebra.

A network with layers ``(W_1, b_1), ..., (W_L, b_L)`` computes
``relu(W_l x + b_l)`` for all but the last layer, which is affine.  The
cumulative form stores the products ``W^(l) = W_l ... W_1`` and the
telescoped biases ``b^(l) = W_l b^(l-1) + b_l``.  For surjective weights the
hidden activations equal ``W^(l) x_tau^(l) + b^(l)``, where ``x_tau`` is the
input pushed through a chain of truncation maps living in input space.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InconsistencyError, InvalidInputError, ProjectorIdentityError, RankError, SchemaError
from .numlin import DEFAULT_TOL, Tolerance, as_matrix, as_vector, pinv, rank

__all__ = [
    "LayerNet",
    "CumulativeNet",
    "relu",
    "forward",
    "layer_outputs",
    "truncate",
    "cumulative_from_layers",
    "layers_from_cumulative",
    "tau_chain",
    "projector_chain",
    "net_to_json",
    "net_from_json",
]


def relu(Z):
    return np.maximum(Z, 0.0)


def _check_chain(weights, biases) -> tuple[list[np.ndarray], list[np.ndarray]]:
    if len(weights) == 0:
        raise InvalidInputError("a network needs at least one layer")
    if len(weights) != len(biases):
        raise InvalidInputError("weights and biases differ in length")
    Ws = [as_matrix(W, f"W[{i}]") for i, W in enumerate(weights)]
    bs = [as_vector(b, f"b[{i}]") for i, b in enumerate(biases)]
    for i, (W, b) in enumerate(zip(Ws, bs)):
        if b.shape[0] != W.shape[0]:
            raise InvalidInputError(f"layer {i}: bias length {b.shape[0]} != rows {W.shape[0]}")
    return Ws, bs


def _freeze(arrays):
    out = []
    for a in arrays:
        a = np.array(a, dtype=float)
        a.setflags(write=False)
        out.append(a)
    return tuple(out)


@dataclass(frozen=True, eq=False)
class LayerNet:
    """Layerwise parameters; ``weights[l]`` has shape ``(d_{l+1}, d_l)``."""

    weights: tuple
    biases: tuple

    def __post_init__(self):
        Ws, bs = _check_chain(self.weights, self.biases)
        for i in range(1, len(Ws)):
            if Ws[i].shape[1] != Ws[i - 1].shape[0]:
                raise InvalidInputError(
                    f"layer {i} expects width {Ws[i].shape[1]}, previous layer gives {Ws[i - 1].shape[0]}"
                )
        object.__setattr__(self, "weights", _freeze(Ws))
        object.__setattr__(self, "biases", _freeze(bs))

    @property
    def depth(self) -> int:
        return len(self.weights)

    @property
    def widths(self) -> list[int]:
        return [self.weights[0].shape[1]] + [W.shape[0] for W in self.weights]


@dataclass(frozen=True, eq=False)
class CumulativeNet:
    """Cumulative parameters; ``weights[l]`` has shape ``(d_{l+1}, d_0)``.

    Surjectivity of every cumulative weight is decided once, here.  By
    default a non-surjective weight is rejected; with
    ``require_surjective=False`` the verdict is only recorded in
    ``surjective`` and the operations that need it refuse to run.
    """

    weights: tuple
    biases: tuple
    tol: Tolerance = DEFAULT_TOL
    require_surjective: bool = True
    surjective: bool = field(init=False, default=False)

    def __post_init__(self):
        Ws, bs = _check_chain(self.weights, self.biases)
        d0 = Ws[0].shape[1]
        onto = True
        for i, W in enumerate(Ws):
            if W.shape[1] != d0:
                raise InvalidInputError(f"cumulative weight {i} has {W.shape[1]} columns, expected {d0}")
            if rank(W, self.tol) < W.shape[0]:
                if self.require_surjective:
                    raise RankError(f"cumulative weight {i} ({W.shape[0]}x{d0}) is not surjective")
                onto = False
        object.__setattr__(self, "weights", _freeze(Ws))
        object.__setattr__(self, "biases", _freeze(bs))
        object.__setattr__(self, "surjective", onto)

    def require_onto(self, what: str) -> None:
        if not self.surjective:
            raise RankError(f"{what} needs every cumulative weight to be surjective")

    @property
    def depth(self) -> int:
        return len(self.weights)

    @property
    def widths(self) -> list[int]:
        return [self.weights[0].shape[1]] + [W.shape[0] for W in self.weights]


def _columns(X, rows: int) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] != rows:
        raise InvalidInputError(f"input must have {rows} rows, got shape {X.shape}")
    return X


def layer_outputs(net: LayerNet, X) -> list[np.ndarray]:
    """Activations ``[X^(1), ..., X^(L)]``; the last entry is the network output."""
    Z = _columns(X, net.widths[0])
    outs = []
    for i, (W, b) in enumerate(zip(net.weights, net.biases)):
        Z = W @ Z + b[:, None]
        if i < net.depth - 1:
            Z = relu(Z)
        outs.append(Z)
    return outs


def forward(net: LayerNet, X) -> np.ndarray:
    """Network output for the columns of ``X``."""
    return layer_outputs(net, X)[-1]


def truncate(W, b, X, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Apply ``x -> pinv(W) (relu(W x + b) - b)`` to each column of ``X``."""
    W = as_matrix(W, "W")
    b = as_vector(b, "b")
    if b.shape[0] != W.shape[0]:
        raise InvalidInputError("bias length does not match W")
    X = _columns(X, W.shape[1])
    return pinv(W, tol) @ (relu(W @ X + b[:, None]) - b[:, None])


def cumulative_from_layers(net: LayerNet, tol: Tolerance = DEFAULT_TOL) -> CumulativeNet:
    """Products ``W_l ... W_1`` and biases ``W_l b^(l-1) + b_l``.

    Works for any network; check ``.surjective`` on the result before
    relying on the truncation-chain picture.
    """
    Wc, bc = _cumulative_products(net)
    return CumulativeNet(tuple(Wc), tuple(bc), tol, require_surjective=False)


def _cumulative_products(net: LayerNet):
    Wc = [net.weights[0]]
    bc = [net.biases[0]]
    for W, b in zip(net.weights[1:], net.biases[1:]):
        Wc.append(W @ Wc[-1])
        bc.append(W @ bc[-1] + b)
    return Wc, bc


def layers_from_cumulative(cnet: CumulativeNet, tol: float = 1e-9) -> LayerNet:
    """Recover layerwise parameters from a cumulative network.

    ``W_l = W^(l) pinv(W^(l-1))`` and ``b_l = b^(l) - W_l b^(l-1)``.  The
    result is multiplied back out and compared against ``cnet``; entries
    may differ by at most ``tol * max(1, max|entry|)`` per layer.
    """
    cnet.require_onto("layers_from_cumulative")
    Ws = [np.array(cnet.weights[0])]
    bs = [np.array(cnet.biases[0])]
    for l in range(1, cnet.depth):
        W = cnet.weights[l] @ pinv(cnet.weights[l - 1], cnet.tol)
        Ws.append(W)
        bs.append(cnet.biases[l] - W @ cnet.biases[l - 1])
    net = LayerNet(tuple(Ws), tuple(bs))

    Wc, bc = _cumulative_products(net)
    for l in range(cnet.depth):
        for got, want, what in ((Wc[l], cnet.weights[l], "weight"), (bc[l], cnet.biases[l], "bias")):
            scale = max(1.0, float(np.abs(want).max()))
            err = float(np.abs(got - want).max())
            if err > tol * scale:
                raise InconsistencyError(
                    f"cumulative {what} {l} not reproduced: error {err:.3e} > {tol * scale:.3e}; "
                    "row spaces of consecutive cumulative weights are not nested"
                )
    return net


def tau_chain(cnet: CumulativeNet, X) -> list[np.ndarray]:
    """Truncated inputs ``[X_tau^(1), ..., X_tau^(L-1)]``, each in input space."""
    Z = _columns(X, cnet.widths[0])
    chain = []
    for W, b in zip(cnet.weights[:-1], cnet.biases[:-1]):
        Z = truncate(W, b, Z, cnet.tol)
        chain.append(Z)
    return chain


def projector_chain(cnet: CumulativeNet, tol: float = 1e-9) -> list[np.ndarray]:
    """Projectors ``P^(l) = pinv(W^(l)) W^(l) P^(l-1)`` for ``l = 1..L``.

    Both ``P^(l) == pinv(W^(l)) W^(l)`` and ``W^(l) P^(l-1) == W^(l)`` are
    checked (relative to the scale of ``W^(l)``); a violation raises
    :class:`ProjectorIdentityError` naming the layer.
    """
    cnet.require_onto("projector_chain")
    d0 = cnet.widths[0]
    P_prev = np.eye(d0)
    out = []
    for l, W in enumerate(cnet.weights, start=1):
        direct = pinv(W, cnet.tol) @ W
        scale = max(1.0, float(np.abs(W).max()))
        err_w = float(np.abs(W @ P_prev - W).max())
        if err_w > tol * scale:
            raise ProjectorIdentityError(l, f"W P_prev differs from W by {err_w:.3e}")
        P = direct @ P_prev
        err_p = float(np.abs(P - direct).max())
        if err_p > tol:
            raise ProjectorIdentityError(l, f"recursive projector differs from direct one by {err_p:.3e}")
        out.append(P)
        P_prev = P
    return out


def net_to_json(net, form: str | None = None) -> dict:
    """Serialise a :class:`LayerNet` or :class:`CumulativeNet`."""
    if form is None:
        form = "cumulative" if isinstance(net, CumulativeNet) else "layerwise"
    if form not in ("layerwise", "cumulative"):
        raise InvalidInputError(f"unknown network form {form!r}")
    return {
        "widths": [int(w) for w in net.widths],
        "layers": [{"W": W.tolist(), "b": b.tolist()} for W, b in zip(net.weights, net.biases)],
        "form": form,
    }


def net_from_json(doc: dict, tol: Tolerance = DEFAULT_TOL):
    """Parse a network document; returns a :class:`LayerNet` or :class:`CumulativeNet`."""
    if not isinstance(doc, dict):
        raise SchemaError("network document must be a JSON object")
    for key in ("layers", "form"):
        if key not in doc:
            raise SchemaError(f"network document lacks field {key!r}")
    form = doc["form"]
    if form not in ("layerwise", "cumulative"):
        raise SchemaError(f"field 'form' must be 'layerwise' or 'cumulative', got {form!r}")
    layers = doc["layers"]
    if not isinstance(layers, list) or not layers:
        raise SchemaError("field 'layers' must be a non-empty list")
    Ws, bs = [], []
    for i, layer in enumerate(layers):
        try:
            Ws.append(np.asarray(layer["W"], dtype=float))
            bs.append(np.asarray(layer["b"], dtype=float))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"layers[{i}]: {exc}") from exc
    try:
        net = CumulativeNet(tuple(Ws), tuple(bs), tol) if form == "cumulative" else LayerNet(tuple(Ws), tuple(bs))
    except InvalidInputError as exc:
        raise SchemaError(f"layers: {exc}") from exc
    if "widths" in doc and list(doc["widths"]) != net.widths:
        raise SchemaError(f"field 'widths' {doc['widths']} disagrees with layer shapes {net.widths}")
    return net
