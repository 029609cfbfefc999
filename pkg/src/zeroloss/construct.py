"""Explicit zero-loss network constructors.

Both constructors build one hidden layer per class.  Layer ``l`` is the
truncation map of a cone whose backward half swallows class ``l`` (which
collapses to the image of the apex) while its forward half holds every
class still waiting, which passes through untouched.  After all classes
have collapsed to single points, an affine last layer sends each point to
its label.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import (
    LabeledDataset,
    SLSCertificate,
    check_clustered,
    class_stats,
    to_barycentric,
    verify_sls_certificate,
)
from .errors import (
    ConstructionError,
    InconsistencyError,
    InfeasibleConeError,
    InvalidInputError,
    PreconditionError,
    RankError,
    SchemaError,
    StaleCertificateError,
)
from .geom import Cone, angles_to_axis, diagonal_unit, min_enclosing_aperture, w_theta
from .netcore import CumulativeNet, LayerNet, forward, layers_from_cumulative, truncate
from .numlin import DEFAULT_TOL, Tolerance, pinv, rank, rotation_to

__all__ = [
    "ClusteredOptions",
    "SLSOptions",
    "TraceStep",
    "ConstructionTrace",
    "build_truncation_layer",
    "build_clustered",
    "build_sls",
    "solve_last_layer",
    "collapsed_schedule",
    "certification_tolerance",
    "trace_to_json",
    "trace_from_json",
]

COLLAPSE_RTOL = 1e-9
"""Relative (to data diameter) spread below which a class counts as a single point."""


def certification_tolerance(ds: LabeledDataset) -> float:
    """Default entrywise interpolation tolerance: ``1e-8 * max(1, diameter)``."""
    return 1e-8 * max(1.0, ds.diameter)


def _per_class(value, Q: int, name: str) -> list[float]:
    if np.ndim(value) == 0:
        return [float(value)] * Q
    values = [float(v) for v in value]
    if len(values) != Q:
        raise InvalidInputError(f"{name} needs {Q} entries, got {len(values)}")
    return values


@dataclass(frozen=True)
class ClusteredOptions:
    """Free parameters of the clustered constructor.

    ``width_schedule`` lists ``d_0, ..., d_Q`` (the output width ``Q`` is
    implied); ``None`` keeps every hidden layer at the input width.
    ``mu_fractions`` gives the apex offsets as multiples of the cluster
    radius and must lie strictly inside (2, 3).
    """

    width_schedule: tuple | None = None
    mu_fractions: float | tuple = 2.5
    c0: float = 0.125
    theta0_policy: str = "midpoint"

    def __post_init__(self):
        fr = np.atleast_1d(np.asarray(self.mu_fractions, dtype=float))
        if fr.size == 0 or not np.all((fr > 2.0) & (fr < 3.0)):
            raise InvalidInputError(f"mu fractions must lie strictly inside (2, 3), got {self.mu_fractions!r}")
        if not (0.0 < self.c0 < 0.25):
            raise InvalidInputError(f"c0 must lie in (0, 1/4), got {self.c0!r}")
        if self.theta0_policy != "midpoint":
            raise InvalidInputError(f"unknown aperture policy {self.theta0_policy!r}")
        if self.width_schedule is not None:
            ws = tuple(int(w) for w in self.width_schedule)
            if any(b > a for a, b in zip(ws, ws[1:])):
                raise InvalidInputError(f"width schedule must be non-increasing, got {ws}")
            object.__setattr__(self, "width_schedule", ws)


@dataclass(frozen=True)
class SLSOptions:
    """``alpha`` places each aperture at ``theta_min + alpha (pi - theta_min)``; scalar or one per step."""

    alpha: float | tuple = 0.5

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.alpha, dtype=float))
        if a.size == 0 or not np.all((a > 0.0) & (a < 1.0)):
            raise InvalidInputError(f"alpha must lie strictly inside (0, 1), got {self.alpha!r}")


@dataclass(frozen=True, eq=False)
class TraceStep:
    cone: Cone
    collapsed_class: int
    weight: np.ndarray
    bias: np.ndarray
    snapshot: np.ndarray
    collapsed: tuple

    @property
    def snapshot_digest(self) -> str:
        return _digest(self.snapshot)


@dataclass(frozen=True, eq=False)
class ConstructionTrace:
    """Per-layer record of a construction, in the order the layers were built."""

    steps: tuple = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.steps)


def _digest(snapshot: np.ndarray) -> str:
    # Rounded so that last-bit noise and signed zeros do not change the digest.
    data = np.ascontiguousarray(np.round(np.asarray(snapshot, dtype=float), 10) + 0.0, dtype="<f8")
    return hashlib.sha256(data.tobytes()).hexdigest()


def build_truncation_layer(cone: Cone, in_dim: int, out_dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Weights whose truncation map projects the forward cone and collapses the backward cone.

    ``W = E @ w_theta(theta, n) @ R`` where ``R`` turns the cone axis onto the
    diagonal and ``E`` keeps the first ``out_dim`` coordinates; ``b = -W p``.
    """
    n, m = int(in_dim), int(out_dim)
    if cone.dim != n:
        raise InvalidInputError(f"cone lives in dimension {cone.dim}, expected {n}")
    if not (n >= m >= 1) or n < 2:
        raise InvalidInputError(f"need in_dim >= out_dim >= 1 and in_dim >= 2, got {n}, {m}")
    if not cone.aperture < math.pi:
        raise InvalidInputError("a cone of aperture pi is a half-space; it has no truncation layer")
    R = rotation_to(cone.axis, diagonal_unit(n))
    W = (w_theta(cone.aperture, n) @ R)[:m]
    return W, -W @ cone.apex


def solve_last_layer(collapsed_means, Y, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Affine map (with zero bias) sending collapsed class points onto their labels."""
    C = np.asarray(collapsed_means, dtype=float)
    Y = np.asarray(Y, dtype=float)
    Q = C.shape[1]
    if Y.shape[1] != Q:
        raise InvalidInputError(f"{Q} collapsed points but {Y.shape[1]} label columns")
    if rank(C, tol) < Q:
        raise RankError("collapsed class points are linearly dependent")
    W = Y @ pinv(C, tol)
    residual = float(np.linalg.norm(W @ C - Y))
    if residual > 1e-9 * max(float(np.linalg.norm(Y)), 1e-300):
        raise RankError(f"last layer residual {residual:.3e} too large; collapsed points are ill-conditioned")
    return W, np.zeros(Y.shape[0])


def collapsed_schedule(M: int, Q: int) -> tuple[int, ...]:
    """``(M, Q, ..., Q)``: the narrowest width schedule the clustered constructor accepts."""
    return (M,) + (Q,) * Q


def _class_blocks(ds: LabeledDataset):
    edges = np.cumsum([0] + ds.counts)
    return [slice(edges[j], edges[j + 1]) for j in range(ds.class_count)]


def _collapse_flags(Z: np.ndarray, blocks, scale: float) -> tuple:
    flags = []
    for sl in blocks:
        block = Z[:, sl]
        spread = np.abs(block - block.mean(axis=1, keepdims=True)).max()
        flags.append(bool(spread <= COLLAPSE_RTOL * scale))
    return tuple(flags)


def _run_layers(ds, layers, order, blocks, scale, tol):
    """Push the data through cone layers, checking after each one that the intended class collapsed
    and that every class not yet processed was only projected."""
    Z = np.array(ds.X)
    steps = []
    for k, (cone, W, b) in enumerate(layers):
        Z_next = truncate(W, b, Z, tol)
        proj = pinv(W, tol) @ W
        flags = _collapse_flags(Z_next, blocks, scale)
        j = order[k]
        if not flags[j]:
            raise ConstructionError(f"step {k}: class {j} did not collapse to a single point")
        for i in order[k + 1:]:
            sl = blocks[i]
            err = float(np.abs(Z_next[:, sl] - proj @ Z[:, sl]).max())
            if err > COLLAPSE_RTOL * scale:
                raise ConstructionError(f"step {k}: class {i} left the forward cone (deviation {err:.3e})")
        steps.append(TraceStep(cone, int(j), W, b, Z_next, flags))
        Z = Z_next
    return Z, steps


def _finish(ds, layers, steps, Z, blocks, tol) -> tuple[LayerNet, ConstructionTrace]:
    collapsed = np.column_stack([Z[:, sl].mean(axis=1) for sl in blocks])
    W_last, b_last = solve_last_layer(collapsed, ds.labels, tol)
    try:
        cnet = CumulativeNet(tuple(W for _, W, _ in layers) + (W_last,),
                             tuple(b for _, _, b in layers) + (b_last,), tol)
        net = layers_from_cumulative(cnet)
    except (RankError, InconsistencyError) as exc:
        raise ConstructionError(str(exc)) from exc
    out = forward(net, ds.X)
    err = float(np.abs(out - ds.Y_ext).max())
    limit = certification_tolerance(ds)
    if err > limit:
        raise ConstructionError(f"network misses its labels by {err:.3e} > {limit:.3e}")
    return net, ConstructionTrace(tuple(steps))


def build_clustered(ds: LabeledDataset, opts: ClusteredOptions | None = None,
                    tol: Tolerance = DEFAULT_TOL) -> tuple[LayerNet, ConstructionTrace]:
    """Zero-loss network for clustered data, with a non-increasing width schedule.

    Class ``l`` is collapsed by a cone with apex ``mean_l + mu_l f_l`` (``f_l``
    the unit vector from the class mean toward the barycenter), axis
    ``f_l`` and the aperture chosen by :func:`check_clustered`.  Layer ``l``
    acts on the first ``d_l`` vectors of an orthonormal frame whose leading
    vectors span the class means, so the row spaces of the cumulative
    weights are nested and the layerwise weights exist for any schedule
    with ``d_l >= Q``.

    Raises
    ------
    PreconditionError
        If the data is not clustered (the report is attached).
    ConstructionError
        If a layer does not behave as intended or the result does not
        interpolate.
    """
    opts = opts or ClusteredOptions()
    M, Q = ds.ambient_dim, ds.class_count
    if Q < 2:
        raise PreconditionError("the clustered construction needs at least two classes")
    report = check_clustered(ds, opts.c0)
    if not report.passes:
        raise PreconditionError("data is not clustered: " + ", ".join(report.failure_reasons), report)
    schedule = opts.width_schedule or (M,) * (Q + 1)
    if len(schedule) != Q + 1 or schedule[0] != M or schedule[-1] < Q:
        raise InvalidInputError(f"width schedule must have {Q + 1} entries from {M} down to at least {Q}")
    fractions = _per_class(opts.mu_fractions, Q, "mu_fractions")

    stats = class_stats(ds)
    _, frame = to_barycentric(ds, tol)
    U = frame.orthonormal_frame
    theta = report.theta_star
    if stats.delta > 0.0:
        mus = [f * stats.delta for f in fractions]
    else:
        mus = [_point_mass_offset(stats, j, theta, 0.04 * f * min(stats.mean_dists)) for j, f in enumerate(fractions)]

    layers = []
    for l in range(Q):
        d = schedule[l + 1]
        U_l = U[:, :d]
        apex = stats.means[l] + mus[l] * stats.directions[l]
        axis = U_l.T @ stats.directions[l]
        cone = Cone(U_l.T @ apex, axis / np.linalg.norm(axis), theta)
        W_local, b = build_truncation_layer(cone, d, d)
        layers.append((Cone(apex, stats.directions[l], theta), W_local @ U_l.T, b))

    blocks = _class_blocks(ds)
    scale = max(1.0, ds.diameter)
    Z, steps = _run_layers(ds, layers, list(range(Q)), blocks, scale, tol)
    return _finish(ds, layers, steps, Z, blocks, tol)


def _point_mass_offset(stats, j: int, theta: float, mu: float, attempts: int = 30) -> float:
    """Apex offset for a class that is a single point.

    The interval of admissible offsets is empty when the cluster radius is
    zero, so start from the given value and halve it until the cone at the
    shifted apex still holds every other class mean.
    """
    others = np.column_stack([m for i, m in enumerate(stats.means) if i != j])
    for _ in range(attempts):
        apex = stats.means[j] + mu * stats.directions[j]
        angles, _ = angles_to_axis(others - apex[:, None], stats.directions[j])
        if np.all(angles < theta / 2.0):
            return mu
        mu *= 0.5
    raise ConstructionError(f"no apex offset keeps the other classes inside the cone of class {j}")


def build_sls(ds: LabeledDataset, cert: SLSCertificate, opts: SLSOptions | None = None,
              tol: Tolerance = DEFAULT_TOL) -> tuple[LayerNet, ConstructionTrace]:
    """Zero-loss network for sequentially separable data, all hidden widths equal to ``M``.

    Step ``k`` uses the cut point and normal of the certificate; the
    aperture lies between the smallest one whose two halves hold the class
    being removed and everything still ahead of it, and pi.

    Raises
    ------
    PreconditionError
        If the certificate does not hold on ``ds``.
    InfeasibleConeError
        If a required aperture reaches pi.
    RankError
        If the cut points are linearly dependent.
    """
    opts = opts or SLSOptions()
    Q = ds.class_count
    try:
        verify_sls_certificate(ds, cert)
    except StaleCertificateError as exc:
        raise PreconditionError(f"certificate does not hold: {exc}", cert) from exc
    alphas = _per_class(opts.alpha, Q, "alpha")
    points = np.column_stack([np.asarray(p, dtype=float) for p in cert.base_points])
    if rank(points, tol) < Q:
        raise RankError("cut points of the certificate are linearly dependent")

    M = ds.ambient_dim
    layers = []
    for k, j in enumerate(cert.ordering):
        p = np.asarray(cert.base_points[k], dtype=float)
        h = np.asarray(cert.normals[k], dtype=float)
        later = [ds.classes[i] for i in cert.ordering[k + 1:]]
        earlier = [points[:, [i]] for i in range(k)]
        ahead = np.hstack(later + earlier) if later or earlier else np.zeros((M, 0))
        theta_min = max(min_enclosing_aperture(p, -h, ds.classes[j], 0.0),
                        min_enclosing_aperture(p, h, ahead, 0.0))
        if not theta_min < math.pi:
            raise InfeasibleConeError(f"step {k}: minimal aperture {theta_min} reaches pi "
                                      "although the certificate holds; internal inconsistency")
        cone = Cone(p, h / np.linalg.norm(h), theta_min + alphas[k] * (math.pi - theta_min))
        W, b = build_truncation_layer(cone, M, M)
        layers.append((cone, W, b))

    blocks = _class_blocks(ds)
    scale = max(1.0, ds.diameter)
    Z, steps = _run_layers(ds, layers, list(cert.ordering), blocks, scale, tol)
    return _finish(ds, layers, steps, Z, blocks, tol)


def trace_to_json(trace: ConstructionTrace) -> dict:
    """Trace document; the cumulative ``W`` and ``b`` of each step are kept for replay."""
    return {
        "steps": [
            {
                "cone": {"apex": s.cone.apex.tolist(), "axis": s.cone.axis.tolist(), "theta": s.cone.aperture},
                "collapsed_class": s.collapsed_class,
                "snapshot_digest": s.snapshot_digest,
                "W": np.asarray(s.weight).tolist(),
                "b": np.asarray(s.bias).tolist(),
            }
            for s in trace.steps
        ]
    }


def trace_from_json(doc, ds: LabeledDataset | None = None, tol: Tolerance = DEFAULT_TOL) -> ConstructionTrace:
    """Rebuild a trace.  With ``ds`` the snapshots are replayed and their digests checked."""
    if not isinstance(doc, dict) or not isinstance(doc.get("steps"), list):
        raise SchemaError("trace document must be an object with a 'steps' list")
    Z = None if ds is None else np.array(ds.X)
    blocks = None if ds is None else _class_blocks(ds)
    scale = 1.0 if ds is None else max(1.0, ds.diameter)
    steps = []
    for k, entry in enumerate(doc["steps"]):
        try:
            c = entry["cone"]
            cone = Cone(np.asarray(c["apex"], float), np.asarray(c["axis"], float), float(c["theta"]))
            j = int(entry["collapsed_class"])
            W = np.asarray(entry["W"], float)
            b = np.asarray(entry["b"], float)
        except (KeyError, TypeError, ValueError, InvalidInputError) as exc:
            raise SchemaError(f"steps[{k}]: {exc}") from exc
        if Z is None:
            snapshot = np.zeros((0, 0))
            flags = ()
        else:
            Z = truncate(W, b, Z, tol)
            if _digest(Z) != entry.get("snapshot_digest", _digest(Z)):
                raise SchemaError(f"steps[{k}]: snapshot digest does not match the dataset")
            snapshot, flags = Z, _collapse_flags(Z, blocks, scale)
        steps.append(TraceStep(cone, j, W, b, snapshot, flags))
    return ConstructionTrace(tuple(steps))
