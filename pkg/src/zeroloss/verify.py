"""Cost evaluation, zero-loss certificates, degeneracy probes and parameter counts."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .construct import ClusteredOptions, SLSOptions, build_clustered, build_sls, certification_tolerance
from .dataset import LabeledDataset, SLSCertificate, find_sls_certificate
from .errors import InvalidInputError, ZeroLossError
from .netcore import LayerNet, forward

__all__ = [
    "ZeroLossCertificate",
    "ProbeReport",
    "ParamCount",
    "cost",
    "cost_normalized",
    "cost_decomposed",
    "certify",
    "degeneracy_probe",
    "count_params",
    "certificate_to_json",
]


def _outputs(net: LayerNet, ds: LabeledDataset) -> np.ndarray:
    if net.widths[0] != ds.ambient_dim or net.widths[-1] != ds.class_count:
        raise InvalidInputError(
            f"network maps R^{net.widths[0]} to R^{net.widths[-1]}, data needs "
            f"R^{ds.ambient_dim} to R^{ds.class_count}"
        )
    return forward(net, ds.X)


def cost(net: LayerNet, ds: LabeledDataset) -> float:
    """Half the squared Frobenius distance between outputs and targets."""
    R = _outputs(net, ds) - ds.Y_ext
    return 0.5 * float(np.sum(R * R))


def _class_outputs(net, ds):
    out = _outputs(net, ds)
    edges = np.cumsum([0] + ds.counts)
    return [out[:, edges[j]:edges[j + 1]] for j in range(ds.class_count)]


def cost_normalized(net: LayerNet, ds: LabeledDataset) -> float:
    """Squared errors with each class weighted by one over its size (no factor one half)."""
    total = 0.0
    for j, block in enumerate(_class_outputs(net, ds)):
        diff = block - ds.labels[:, [j]]
        total += float(np.sum(diff * diff)) / block.shape[1]
    return total


def cost_decomposed(net: LayerNet, ds: LabeledDataset) -> tuple[float, float]:
    """Split :func:`cost_normalized` into within-class variance and mean mismatch.

    Returns ``(variance, mean)`` with
    ``variance = sum_j (1/N_j) sum_i |out_i - mean_j(out)|^2`` and
    ``mean = sum_j |mean_j(out) - y_j|^2``.
    """
    variance = 0.0
    mean = 0.0
    for j, block in enumerate(_class_outputs(net, ds)):
        centre = block.mean(axis=1, keepdims=True)
        dev = block - centre
        variance += float(np.sum(dev * dev)) / block.shape[1]
        miss = centre[:, 0] - ds.labels[:, j]
        mean += float(miss @ miss)
    return variance, mean


@dataclass(frozen=True)
class ZeroLossCertificate:
    cost: float
    variance_term: float
    mean_term: float
    per_class_residuals: tuple
    max_entry_residual: float
    passes: bool
    tolerance: float


def certify(net: LayerNet, ds: LabeledDataset, tol: float | None = None) -> ZeroLossCertificate:
    """Check that ``net`` reproduces every label entry to within ``tol``.

    ``tol=None`` uses ``1e-8 * max(1, diameter)``.  The per-class residual
    is the largest entrywise error within that class.
    """
    if tol is None:
        tol = certification_tolerance(ds)
    if tol < 0:
        raise InvalidInputError("tolerance must be non-negative")
    blocks = _class_outputs(net, ds)
    per_class = tuple(float(np.abs(b - ds.labels[:, [j]]).max()) for j, b in enumerate(blocks))
    worst = max(per_class)
    variance, mean = cost_decomposed(net, ds)
    return ZeroLossCertificate(
        cost=cost(net, ds),
        variance_term=variance,
        mean_term=mean,
        per_class_residuals=per_class,
        max_entry_residual=worst,
        passes=bool(worst <= tol),
        tolerance=float(tol),
    )


def certificate_to_json(c: ZeroLossCertificate) -> dict:
    return {
        "cost": c.cost,
        "variance_term": c.variance_term,
        "mean_term": c.mean_term,
        "passes": c.passes,
        "tolerance": c.tolerance,
        "per_class": list(c.per_class_residuals),
    }


@dataclass(frozen=True)
class ProbeReport:
    """Outcome of rebuilding a network with ``k`` random draws of its free parameters."""

    builder: str
    k: int
    passes: int
    draws: tuple
    failures: tuple = field(default_factory=tuple)

    @property
    def all_pass(self) -> bool:
        return self.passes == self.k


def degeneracy_probe(ds: LabeledDataset, builder: str, k: int = 20, seed: int = 0,
                     cert: SLSCertificate | None = None, tol: float | None = None) -> ProbeReport:
    """Build ``k`` networks with independently drawn free parameters and certify each.

    ``builder="clustered"`` draws apex offsets in (2, 3) per class,
    ``builder="sls"`` draws aperture fractions in (0, 1) per step (the
    separation certificate is searched for once when not supplied).
    Failures are collected, not raised; each carries its draw and message.
    """
    if builder not in ("clustered", "sls"):
        raise InvalidInputError(f"unknown builder {builder!r}")
    if k < 1:
        raise InvalidInputError("k must be positive")
    rng = np.random.default_rng(seed)
    Q = ds.class_count
    if builder == "sls" and cert is None:
        cert = find_sls_certificate(ds)
    draws, failures = [], []
    passes = 0
    for _ in range(k):
        if builder == "clustered":
            draw = tuple(float(x) for x in rng.uniform(2.0, 3.0, Q))
        else:
            draw = tuple(float(x) for x in rng.uniform(0.0, 1.0, Q))
        draws.append(draw)
        try:
            if builder == "clustered":
                net, _ = build_clustered(ds, ClusteredOptions(mu_fractions=draw))
            else:
                net, _ = build_sls(ds, cert, SLSOptions(alpha=draw))
            verdict = certify(net, ds, tol)
        except ZeroLossError as exc:
            failures.append((draw, f"{type(exc).__name__}: {exc}"))
            continue
        if verdict.passes:
            passes += 1
        else:
            failures.append((draw, f"residual {verdict.max_entry_residual:.3e} > {verdict.tolerance:.3e}"))
    return ProbeReport(builder, k, passes, tuple(draws), tuple(failures))


@dataclass(frozen=True)
class ParamCount:
    """Entry counts per layer and in total.

    ``total`` counts every weight and bias.  ``total_without_output_bias``
    leaves out the last bias vector, which the constructors fix at zero in
    cumulative form.  ``reference`` is ``Q (M + Q^2)`` for comparison.
    """

    weights_per_layer: tuple
    biases_per_layer: tuple
    total_weights: int
    total_biases: int
    total: int
    total_without_output_bias: int
    reference: int

    def to_json(self) -> dict:
        return {
            "weights_per_layer": list(self.weights_per_layer),
            "biases_per_layer": list(self.biases_per_layer),
            "total_weights": self.total_weights,
            "total_biases": self.total_biases,
            "total": self.total,
            "total_without_output_bias": self.total_without_output_bias,
            "reference_Q_times_M_plus_Q_squared": self.reference,
        }


def count_params(net: LayerNet) -> ParamCount:
    weights = tuple(int(W.size) for W in net.weights)
    biases = tuple(int(b.size) for b in net.biases)
    M, Q = net.widths[0], net.widths[-1]
    tw, tb = sum(weights), sum(biases)
    return ParamCount(
        weights_per_layer=weights,
        biases_per_layer=biases,
        total_weights=tw,
        total_biases=tb,
        total=tw + tb,
        total_without_output_bias=tw + tb - biases[-1],
        reference=Q * (M + Q * Q),
    )
