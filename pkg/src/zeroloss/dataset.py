"""Labeled point clouds, their class geometry, separability checks and synthetic generators.

Points are stored column-wise: class ``j`` is an ``M x N_j`` matrix and the
label matrix ``Y`` is ``Q x Q`` with column ``j`` the target of class ``j``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.spatial.distance import cdist

from .errors import (
    BallTouchesApexError,
    DegenerateDirectionError,
    GenerationError,
    InvalidInputError,
    NotSeparableError,
    RankError,
    SchemaError,
    StaleCertificateError,
)
from .geom import min_enclosing_aperture
from .numlin import DEFAULT_TOL, Tolerance, as_matrix, pinv, rank

__all__ = [
    "LabeledDataset",
    "ClassStats",
    "BarycentricFrame",
    "ClusterReport",
    "SearchOptions",
    "SLSCertificate",
    "SearchAttempt",
    "SearchReport",
    "class_stats",
    "to_barycentric",
    "check_clustered",
    "max_margin_separator",
    "find_sls_certificate",
    "verify_sls_certificate",
    "gen_clustered",
    "gen_sls",
    "all_certified_orderings",
    "dataset_to_json",
    "dataset_from_json",
    "certificate_to_json",
    "certificate_from_json",
    "DEFAULT_T_GRID",
]

DEFAULT_T_GRID = tuple(round(0.05 * k, 2) for k in range(1, 20))


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Class-partitioned training data.

    Parameters
    ----------
    classes : sequence of arrays
        ``classes[j]`` is the ``M x N_j`` matrix of points of class ``j``.
    labels : array, optional
        ``Q x Q`` matrix whose column ``j`` is the target of class ``j``;
        defaults to the identity.
    """

    classes: tuple
    labels: np.ndarray | None = None

    def __post_init__(self):
        if len(self.classes) == 0:
            raise InvalidInputError("a dataset needs at least one class")
        mats = tuple(_frozen(as_matrix(C, f"class {j}")) for j, C in enumerate(self.classes))
        M = mats[0].shape[0]
        for j, C in enumerate(mats):
            if C.shape[0] != M:
                raise InvalidInputError(f"class {j} lives in dimension {C.shape[0]}, expected {M}")
        Q = len(mats)
        if Q > M:
            raise InvalidInputError(f"{Q} classes cannot have independent means in dimension {M}")
        Y = np.eye(Q) if self.labels is None else as_matrix(self.labels, "labels")
        if Y.shape != (Q, Q):
            raise InvalidInputError(f"labels must be {Q}x{Q}, got {Y.shape}")
        if rank(Y) < Q:
            raise RankError("label matrix must have full rank")
        object.__setattr__(self, "classes", mats)
        object.__setattr__(self, "labels", _frozen(Y))

    @property
    def ambient_dim(self) -> int:
        return self.classes[0].shape[0]

    @property
    def class_count(self) -> int:
        return len(self.classes)

    @property
    def counts(self) -> list[int]:
        return [C.shape[1] for C in self.classes]

    @property
    def n_points(self) -> int:
        return sum(self.counts)

    @cached_property
    def X(self) -> np.ndarray:
        """All points, classes concatenated in order (``M x N``)."""
        return _frozen(np.hstack(self.classes))

    @cached_property
    def class_index(self) -> np.ndarray:
        return np.repeat(np.arange(self.class_count), self.counts)

    @cached_property
    def Y_ext(self) -> np.ndarray:
        """Target matrix with one column per point (``Q x N``)."""
        return _frozen(self.labels[:, self.class_index])

    @cached_property
    def means(self) -> np.ndarray:
        """Class means as columns (``M x Q``)."""
        return _frozen(np.column_stack([C.mean(axis=1) for C in self.classes]))

    @cached_property
    def diameter(self) -> float:
        """Largest distance between two data points."""
        pts = self.X.T
        best = 0.0
        for start in range(0, pts.shape[0], 512):
            best = max(best, float(cdist(pts[start:start + 512], pts).max()))
        return best

    def relabeled(self, labels) -> "LabeledDataset":
        return LabeledDataset(self.classes, labels)

    def mapped(self, fn) -> "LabeledDataset":
        """Dataset with ``fn`` applied to every class matrix, labels kept."""
        return LabeledDataset(tuple(fn(C) for C in self.classes), self.labels)


@dataclass(frozen=True, eq=False)
class ClassStats:
    means: list
    deviations: list
    delta: float
    barycenter: np.ndarray
    directions: list
    mean_dists: list


def class_stats(ds: LabeledDataset, allow_degenerate: bool = False) -> ClassStats:
    """Means, deviations, cluster radius and the unit directions toward the barycenter.

    Raises
    ------
    DegenerateDirectionError
        If a class mean equals the barycenter (unless ``allow_degenerate``,
        in which case that direction is returned as zeros).
    """
    means = [ds.means[:, j].copy() for j in range(ds.class_count)]
    deviations = [C - m[:, None] for C, m in zip(ds.classes, means)]
    delta = max(float(np.linalg.norm(D, axis=0).max()) for D in deviations)
    barycenter = ds.means.mean(axis=1)
    directions, dists = [], []
    for j, m in enumerate(means):
        v = barycenter - m
        d = float(np.linalg.norm(v))
        dists.append(d)
        if d == 0.0:
            if not allow_degenerate:
                raise DegenerateDirectionError(f"mean of class {j} coincides with the barycenter")
            directions.append(np.zeros_like(v))
        else:
            directions.append(v / d)
    return ClassStats(means, deviations, delta, barycenter, directions, dists)


@dataclass(frozen=True, eq=False)
class BarycentricFrame:
    """Coordinates ``x = basis @ kappa + complement_basis @ rest``.

    ``basis`` holds the class means as columns; ``complement_basis`` is an
    orthonormal basis of the orthogonal complement of their span, and
    ``span_basis`` an orthonormal basis of the span itself.
    """

    basis: np.ndarray
    span_basis: np.ndarray
    complement_basis: np.ndarray
    complement_projector: np.ndarray
    forward_matrix: np.ndarray
    backward_matrix: np.ndarray

    def forward(self, X) -> np.ndarray:
        """Ambient points (columns) to ``(kappa, rest)`` coordinates."""
        return self.forward_matrix @ np.asarray(X, dtype=float)

    def backward(self, K) -> np.ndarray:
        return self.backward_matrix @ np.asarray(K, dtype=float)

    @property
    def orthonormal_frame(self) -> np.ndarray:
        """``[span_basis, complement_basis]``: an orthogonal matrix adapted to the means."""
        return np.hstack([self.span_basis, self.complement_basis])


def to_barycentric(ds: LabeledDataset, tol: Tolerance = DEFAULT_TOL) -> tuple[LabeledDataset, BarycentricFrame]:
    """Re-express ``ds`` in barycentric coordinates of its class means."""
    B = np.array(ds.means)
    M, Q = B.shape
    if rank(B, tol) < Q:
        raise RankError("class means are linearly dependent")
    Qfull, _ = np.linalg.qr(B, mode="complete")
    span, comp = Qfull[:, :Q], Qfull[:, Q:]
    Bplus = pinv(B, tol)
    frame = BarycentricFrame(
        basis=_frozen(B),
        span_basis=_frozen(span),
        complement_basis=_frozen(comp),
        complement_projector=_frozen(comp @ comp.T),
        forward_matrix=_frozen(np.vstack([Bplus, comp.T])),
        backward_matrix=_frozen(np.hstack([B, comp])),
    )
    return ds.mapped(frame.forward), frame


@dataclass(frozen=True, eq=False)
class ClusterReport:
    delta: float
    c0: float
    min_mean_dist: float
    theta_star_j: list
    theta_star: float
    passes: bool
    failure_reasons: list = field(default_factory=list)

    def to_json(self) -> dict:
        def num(x):
            return x if math.isfinite(x) else None

        return {
            "delta": self.delta,
            "c0": self.c0,
            "min_mean_dist": self.min_mean_dist,
            "theta_star_j": [num(t) for t in self.theta_star_j],
            "theta_star": num(self.theta_star),
            "passes": self.passes,
            "failure_reasons": list(self.failure_reasons),
        }


def check_clustered(ds: LabeledDataset, c0: float = 0.125) -> ClusterReport:
    """Test whether each class sits in a small ball that cones from its mean can separate.

    Two conditions are checked: the cluster radius ``delta`` is below
    ``c0`` times the smallest mean-to-barycenter distance
    (``"clustercond1"``), and for every class the cone at its mean, pointing
    toward the barycenter and wide enough to hold balls of radius
    ``4 delta`` around all other means, has aperture below pi
    (``"clustercond2"``).  The chosen working aperture is the midpoint of
    ``[max(pi/2, widest such cone), pi)``.
    """
    if not (0.0 < c0 < 0.25):
        raise InvalidInputError(f"c0 must lie in (0, 1/4), got {c0!r}")
    stats = class_stats(ds)
    Q = ds.class_count
    min_dist = min(stats.mean_dists)
    reasons = []
    if not stats.delta < c0 * min_dist:
        reasons.append("clustercond1")

    thetas = []
    for j in range(Q):
        others = [stats.means[i] for i in range(Q) if i != j]
        try:
            thetas.append(min_enclosing_aperture(stats.means[j], stats.directions[j], others, 4.0 * stats.delta))
        except BallTouchesApexError:
            thetas.append(math.inf)
    widest = max(thetas) if thetas else 0.0
    if not widest < math.pi:
        reasons.append("clustercond2")
        theta_star = math.nan
    else:
        theta_star = 0.5 * (max(math.pi / 2, widest) + math.pi)
    passes = not reasons and math.pi / 2 <= theta_star < math.pi
    return ClusterReport(stats.delta, c0, min_dist, thetas, theta_star, passes, reasons)


# --------------------------------------------------------------------------
# Sequential linear separability


@dataclass(frozen=True)
class SearchOptions:
    """Knobs for :func:`find_sls_certificate`.

    ``min_margin=None`` means ``1e-6`` times the data diameter.
    ``orderings`` restricts the search to the listed class orders.
    """

    min_margin: float | None = None
    t_grid: tuple = DEFAULT_T_GRID
    orderings: tuple | None = None

    def __post_init__(self):
        if any(not (0.0 < t < 1.0) for t in self.t_grid):
            raise InvalidInputError("segment parameters must lie in (0, 1)")
        if self.min_margin is not None and self.min_margin <= 0:
            raise InvalidInputError("min_margin must be positive")
        if self.orderings is not None:
            object.__setattr__(self, "orderings", tuple(tuple(int(i) for i in o) for o in self.orderings))


@dataclass(frozen=True, eq=False)
class SLSCertificate:
    """Witness that classes can be split off one at a time by hyperplanes.

    Entry ``k`` of every list refers to step ``k``, which removes class
    ``ordering[k]``.
    """

    ordering: tuple
    base_points: tuple
    segment_params: tuple
    normals: tuple
    margins: tuple
    theta_min: tuple


@dataclass(frozen=True)
class SearchAttempt:
    prefix: tuple
    best_margin: float
    best_t: float


@dataclass(frozen=True)
class SearchReport:
    min_margin: float
    attempts: tuple

    def best_per_ordering(self) -> dict:
        """Best margin reached at the last step of each attempted prefix."""
        return {a.prefix: a.best_margin for a in self.attempts}


def max_margin_separator(inside, outside, point) -> tuple[float, np.ndarray | None]:
    """Hyperplane through ``point`` with ``inside`` on the negative side, ``outside`` on the positive.

    Solves a linear program maximising the common slack under a box bound on
    the normal, then reports the Euclidean margin of the normalised result:
    ``min(-<x - point, h> for inside, <y - point, h> for outside)``.  A
    negative margin means no separating hyperplane was found.
    """
    inside = np.asarray(inside, dtype=float)
    outside = np.asarray(outside, dtype=float)
    point = np.asarray(point, dtype=float)
    d = point.shape[0]
    A = inside - point[:, None]
    B = outside - point[:, None]
    scale = max(float(np.abs(A).max(initial=0.0)), float(np.abs(B).max(initial=0.0)), 1e-300)
    rows = np.vstack([
        np.hstack([A.T / scale, np.ones((A.shape[1], 1))]),
        np.hstack([-B.T / scale, np.ones((B.shape[1], 1))]),
    ])
    cost = np.zeros(d + 1)
    cost[-1] = -1.0
    res = linprog(cost, A_ub=rows, b_ub=np.zeros(rows.shape[0]),
                  bounds=[(-1.0, 1.0)] * d + [(None, 1.0)], method="highs")
    if res.x is None:
        return -math.inf, None
    nu = res.x[:d]
    norm = float(np.linalg.norm(nu))
    if norm == 0.0:
        return -math.inf, None
    h = nu / norm
    return _side_margin(A, B, h), h


def _side_margin(A: np.ndarray, B: np.ndarray, h: np.ndarray) -> float:
    values = []
    if A.shape[1]:
        values.append(float((-(h @ A)).min()))
    if B.shape[1]:
        values.append(float((h @ B).min()))
    return min(values) if values else math.inf


def _step_sets(ds: LabeledDataset, ordering: Sequence[int], k: int, earlier_points: Sequence[np.ndarray]):
    later = [ds.classes[i] for i in ordering[k + 1:]]
    cols = later + [np.asarray(p, dtype=float)[:, None] for p in earlier_points]
    outside = np.hstack(cols) if cols else np.zeros((ds.ambient_dim, 0))
    return ds.classes[ordering[k]], outside


def _theta_min(inside, outside, point, normal) -> float:
    backward = min_enclosing_aperture(point, -normal, inside, 0.0)
    forward = min_enclosing_aperture(point, normal, outside, 0.0)
    return max(backward, forward)


def _heuristic_order(ds: LabeledDataset, candidates) -> list[int]:
    stats = class_stats(ds)
    return sorted(candidates, key=lambda j: -stats.mean_dists[j])


def find_sls_certificate(ds: LabeledDataset, opts: SearchOptions | None = None) -> SLSCertificate:
    """Search for an order in which classes can be cut off one by one.

    At each step the next class ``j`` must be separated, by a hyperplane
    through a point on the segment from its mean toward the barycenter,
    from every class not yet removed and from the points where earlier
    classes were cut.  Candidates are tried farthest-from-barycenter
    first, with full backtracking; for each candidate the segment point
    with the largest margin on ``opts.t_grid`` is used.

    Raises
    ------
    NotSeparableError
        With a :class:`SearchReport` listing the best margin reached on
        every attempted ordering prefix.
    """
    opts = opts or SearchOptions()
    Q = ds.class_count
    stats = class_stats(ds)
    min_margin = opts.min_margin if opts.min_margin is not None else 1e-6 * ds.diameter
    if opts.orderings is not None:
        for o in opts.orderings:
            if sorted(o) != list(range(Q)):
                raise InvalidInputError(f"{o} is not an ordering of {Q} classes")
    attempts: list[SearchAttempt] = []

    def allowed(prefix):
        if opts.orderings is None:
            return True
        return any(o[: len(prefix)] == prefix for o in opts.orderings)

    def best_step(prefix, j, earlier):
        ordering = prefix + (j,) + tuple(i for i in range(Q) if i not in prefix and i != j)
        inside, outside = _step_sets(ds, ordering, len(prefix), earlier)
        best = (-math.inf, None, None, None)
        for t in opts.t_grid:
            p = t * stats.barycenter + (1.0 - t) * stats.means[j]
            margin, h = max_margin_separator(inside, outside, p)
            if margin > best[0]:
                best = (margin, t, p, h)
        return best

    def search(prefix, steps):
        if len(prefix) == Q:
            return steps
        remaining = [j for j in range(Q) if j not in prefix]
        for j in _heuristic_order(ds, remaining):
            if not allowed(prefix + (j,)):
                continue
            margin, t, p, h = best_step(prefix, j, [s[2] for s in steps])
            attempts.append(SearchAttempt(prefix + (j,), margin, t if t is not None else math.nan))
            if margin >= min_margin:
                found = search(prefix + (j,), steps + [(j, t, p, h)])
                if found is not None:
                    return found
        return None

    steps = search((), [])
    if steps is None:
        raise NotSeparableError(
            "no ordering admits a sequential separation with margin >= %.3e" % min_margin,
            report=SearchReport(min_margin, tuple(attempts)),
        )

    ordering, ts, points, normals = zip(*steps)
    cert = _assemble_certificate(ds, ordering, ts, list(points), normals)
    verify_sls_certificate(ds, cert)
    return cert


def _assemble_certificate(ds, ordering, ts, points, normals) -> SLSCertificate:
    margins, thetas = [], []
    for k in range(len(ordering)):
        inside, outside = _step_sets(ds, ordering, k, points[:k])
        A = inside - points[k][:, None]
        B = outside - points[k][:, None]
        margins.append(_side_margin(A, B, normals[k]))
        thetas.append(_theta_min(inside, outside, points[k], normals[k]))
    return SLSCertificate(
        ordering=tuple(int(j) for j in ordering),
        base_points=tuple(_frozen(p) for p in points),
        segment_params=tuple(float(t) for t in ts),
        normals=tuple(_frozen(h) for h in normals),
        margins=tuple(margins),
        theta_min=tuple(thetas),
    )


def verify_sls_certificate(ds: LabeledDataset, cert: SLSCertificate, point_rtol: float = 1e-12) -> None:
    """Re-check every inequality of ``cert`` on all points of ``ds``.

    Raises :class:`StaleCertificateError` naming the first violated
    condition; returns ``None`` when the certificate holds.
    """
    Q = ds.class_count
    if sorted(cert.ordering) != list(range(Q)):
        raise StaleCertificateError(f"ordering {cert.ordering} is not a permutation of {Q} classes")
    n = len(cert.ordering)
    for name in ("base_points", "segment_params", "normals", "margins", "theta_min"):
        if len(getattr(cert, name)) != n:
            raise StaleCertificateError(f"certificate field {name} has the wrong length")
    stats = class_stats(ds)
    scale = max(1.0, float(np.abs(ds.X).max()))
    for k, j in enumerate(cert.ordering):
        p = np.asarray(cert.base_points[k], dtype=float)
        h = np.asarray(cert.normals[k], dtype=float)
        t = cert.segment_params[k]
        margin = cert.margins[k]
        if p.shape != (ds.ambient_dim,) or h.shape != (ds.ambient_dim,):
            raise StaleCertificateError(f"step {k}: vectors have the wrong dimension")
        if not (0.0 < t < 1.0):
            raise StaleCertificateError(f"step {k}: segment parameter {t} outside (0, 1)")
        expected = t * stats.barycenter + (1.0 - t) * stats.means[j]
        if np.abs(p - expected).max() > point_rtol * scale:
            raise StaleCertificateError(f"step {k}: base point is not on the segment of class {j}")
        if abs(np.linalg.norm(h) - 1.0) > 1e-10:
            raise StaleCertificateError(f"step {k}: normal is not a unit vector")
        if not margin > 0.0:
            raise StaleCertificateError(f"step {k}: margin {margin} is not positive")
        inside, outside = _step_sets(ds, cert.ordering, k, cert.base_points[:k])
        if inside.shape[1] and not np.all(h @ (inside - p[:, None]) <= -margin):
            raise StaleCertificateError(f"step {k}: a point of class {j} is within the margin")
        if outside.shape[1] and not np.all(h @ (outside - p[:, None]) >= margin):
            raise StaleCertificateError(f"step {k}: a later point or earlier cut point is within the margin")
        if not cert.theta_min[k] < math.pi:
            raise StaleCertificateError(f"step {k}: minimal aperture {cert.theta_min[k]} is not below pi")


# --------------------------------------------------------------------------
# Generators

GEN_C0 = 0.125
GEN_MEAN_SPACING = 2.0
GEN_RETRIES = 8


def _uniform_ball(rng: np.random.Generator, dim: int, count: int, radius: float) -> np.ndarray:
    directions = rng.standard_normal((dim, count))
    directions /= np.linalg.norm(directions, axis=0)
    radii = radius * rng.uniform(0.0, 1.0, count) ** (1.0 / dim)
    return directions * radii


def _random_orthonormal(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    Qm, R = np.linalg.qr(rng.standard_normal((rows, cols)))
    return Qm * np.sign(np.diag(R))


def gen_clustered(seed: int, M: int, Q: int, points_per_class: int, spread: float) -> LabeledDataset:
    """Tight clusters around scaled orthonormal vectors.

    Class means are ``D / sqrt(2)`` times random orthonormal vectors, so all
    pairwise mean distances equal ``D = 2``.  Points are uniform in balls of
    radius ``spread * D / 16``.  For ``Q >= 2`` this radius keeps the data
    clustered at ``c0 = 1/8``; the result is re-checked before returning.
    """
    if not (2 <= Q <= M):
        raise InvalidInputError(f"need 2 <= Q <= M, got Q={Q}, M={M}")
    if points_per_class < 1:
        raise InvalidInputError("points_per_class must be positive")
    if not (0.0 < spread < 1.0):
        raise InvalidInputError(f"spread must lie in (0, 1), got {spread!r}")
    seq = np.random.SeedSequence(seed)
    radius = spread * GEN_C0 * GEN_MEAN_SPACING / 2.0
    for child in seq.spawn(GEN_RETRIES):
        rng = np.random.default_rng(child)
        means = _random_orthonormal(rng, M, Q) * (GEN_MEAN_SPACING / math.sqrt(2.0))
        classes = tuple(means[:, [j]] + _uniform_ball(rng, M, points_per_class, radius) for j in range(Q))
        ds = LabeledDataset(classes)
        if check_clustered(ds, GEN_C0).passes:
            return ds
    raise GenerationError(f"no clustered dataset found in {GEN_RETRIES} attempts")


def _sls_layout(rng: np.random.Generator, n: int, Q: int, M: int) -> list[np.ndarray]:
    """Planar bands lifted off the origin, plus one satellite blob per extra class.

    Class 0 is split into a light lobe at the upper left and a heavy lobe
    at the right, class 1 is a vertical bar between them and class 2 a
    blob below the cut point of class 0.  The lobes block both other
    classes at the start, and once class 0 is collapsed its cut point
    together with the bar still encloses part of the blob.  The only
    order that works is then (0, 1, 2).  Extra classes sit off the plane
    along their own coordinate axes.
    """
    jig = lambda s: rng.uniform(-s, s)  # noqa: E731

    def disk(cx, cy, r, k):
        ang = rng.uniform(0.0, 2.0 * math.pi, k)
        rad = r * np.sqrt(rng.uniform(0.0, 1.0, k))
        return np.vstack([cx + rad * np.cos(ang), cy + rad * np.sin(ang)])

    light = max(1, int(0.33 * n))
    lobes = np.hstack([
        disk(-3.15 + jig(0.2), 2.3 + jig(0.2), 0.25, light),
        disk(4.18 + jig(0.2), -1.11 + jig(0.1), 0.25, n - light),
    ])
    bar_x = -1.0 + jig(0.1)
    bar = np.vstack([bar_x + rng.uniform(-0.1, 0.1, n), rng.uniform(-3.32, 0.36, n)])
    blob = disk(0.27 + jig(0.1), -1.87 + jig(0.1), 0.43, n)

    lift = 3.0
    classes = []
    for planar in (lobes, bar, blob):
        pts = np.zeros((M, planar.shape[1]))
        pts[:2] = planar
        pts[2] = lift
        classes.append(pts)
    for k in range(3, Q):
        pts = np.zeros((M, n))
        pts[:2] = disk(0.0, 6.0, 0.3, n)
        pts[2] = lift
        pts[k] = 6.0 + 0.3 * rng.uniform(-1.0, 1.0, n)
        classes.append(pts)
    return classes


def gen_sls(seed: int, M: int, Q: int, points_per_class: int) -> LabeledDataset:
    """Data that can be cut off class by class but is not clustered.

    The planar band layout of :func:`_sls_layout` is embedded in ``R^M``
    and turned by a random rotation.  Each draw is re-checked: a
    separation certificate must exist, the cluster test must fail, and
    for ``Q == 3`` exactly one class ordering may admit a certificate.
    Extra classes (``Q > 3``) can be removed at several points of the
    order, so uniqueness is not promised for them.
    """
    if not (3 <= Q <= M):
        raise InvalidInputError(f"need 3 <= Q <= M, got Q={Q}, M={M}")
    if points_per_class < 2:
        raise InvalidInputError("points_per_class must be at least 2")
    seq = np.random.SeedSequence(seed)
    for child in seq.spawn(GEN_RETRIES):
        rng = np.random.default_rng(child)
        rot = _random_orthonormal(rng, M, M)
        ds = LabeledDataset(tuple(rot @ C for C in _sls_layout(rng, points_per_class, Q, M)))
        if check_clustered(ds, GEN_C0).passes:
            continue
        if Q == 3:
            if len(all_certified_orderings(ds)) != 1:
                continue
        else:
            try:
                find_sls_certificate(ds)
            except NotSeparableError:
                continue
        return ds
    raise GenerationError(f"no separable non-clustered dataset found in {GEN_RETRIES} attempts")


def all_certified_orderings(ds: LabeledDataset, opts: SearchOptions | None = None) -> list[tuple]:
    """Every class ordering for which the search succeeds when restricted to it."""
    opts = opts or SearchOptions()
    found = []
    for order in itertools.permutations(range(ds.class_count)):
        try:
            find_sls_certificate(ds, SearchOptions(opts.min_margin, opts.t_grid, (order,)))
        except NotSeparableError:
            continue
        found.append(order)
    return found


# --------------------------------------------------------------------------
# JSON


def dataset_to_json(ds: LabeledDataset) -> dict:
    return {
        "ambient_dim": ds.ambient_dim,
        "classes": [
            {"label": ds.labels[:, j].tolist(), "points": C.T.tolist()}
            for j, C in enumerate(ds.classes)
        ],
    }


def dataset_from_json(doc) -> LabeledDataset:
    """Build a dataset from its JSON form; labels default to the identity."""
    if not isinstance(doc, dict):
        raise SchemaError("dataset document must be a JSON object")
    for key in ("ambient_dim", "classes"):
        if key not in doc:
            raise SchemaError(f"dataset document lacks field {key!r}")
    M = doc["ambient_dim"]
    if not isinstance(M, int) or M < 1:
        raise SchemaError("field 'ambient_dim' must be a positive integer")
    entries = doc["classes"]
    if not isinstance(entries, list) or not entries:
        raise SchemaError("field 'classes' must be a non-empty list")
    classes, labels = [], []
    for j, entry in enumerate(entries):
        if not isinstance(entry, dict) or "points" not in entry:
            raise SchemaError(f"classes[{j}] lacks field 'points'")
        try:
            pts = np.asarray(entry["points"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"classes[{j}].points: {exc}") from exc
        if pts.ndim != 2 or pts.shape[1] != M or pts.shape[0] == 0:
            raise SchemaError(f"classes[{j}].points must be a non-empty list of {M}-vectors")
        classes.append(pts.T)
        labels.append(entry.get("label"))
    Q = len(classes)
    if all(lab is None for lab in labels):
        Y = None
    elif any(lab is None for lab in labels):
        raise SchemaError("either every class has a 'label' or none does")
    else:
        try:
            Y = np.column_stack([np.asarray(lab, dtype=float) for lab in labels])
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"labels: {exc}") from exc
        if Y.shape != (Q, Q):
            raise SchemaError(f"each label must have {Q} entries")
    try:
        return LabeledDataset(tuple(classes), Y)
    except (InvalidInputError, RankError) as exc:
        raise SchemaError(str(exc)) from exc


def certificate_to_json(cert: SLSCertificate) -> dict:
    return {
        "ordering": list(cert.ordering),
        "base_points": [p.tolist() for p in cert.base_points],
        "segment_params": list(cert.segment_params),
        "normals": [h.tolist() for h in cert.normals],
        "margins": list(cert.margins),
        "theta_min": list(cert.theta_min),
    }


def certificate_from_json(doc) -> SLSCertificate:
    try:
        return SLSCertificate(
            ordering=tuple(int(j) for j in doc["ordering"]),
            base_points=tuple(_frozen(p) for p in doc["base_points"]),
            segment_params=tuple(float(t) for t in doc["segment_params"]),
            normals=tuple(_frozen(h) for h in doc["normals"]),
            margins=tuple(float(m) for m in doc["margins"]),
            theta_min=tuple(float(t) for t in doc["theta_min"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"certificate document: {exc}") from exc
