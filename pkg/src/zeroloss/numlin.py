"""Dense linear algebra kernel: pseudoinverse, rank, rotations, pivoted row selection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, NoPermutationError

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "Permutation",
    "as_matrix",
    "as_vector",
    "pinv",
    "rank",
    "rotation_to",
    "invertible_block_permutation",
    "penrose_residuals",
]


@dataclass(frozen=True)
class Tolerance:
    """Numerical thresholds.

    Attributes
    ----------
    rank_rel_tol : float
        Singular values below ``rank_rel_tol * sigma_max`` count as zero.
    identity_abs_tol : float
        Absolute slack for algebraic identities checked after the fact.
    """

    rank_rel_tol: float = 1e-10
    identity_abs_tol: float = 1e-9

    def __post_init__(self):
        for name in ("rank_rel_tol", "identity_abs_tol"):
            value = getattr(self, name)
            if not (0.0 < value < 1.0):
                raise InvalidInputError(f"{name} must lie in (0, 1), got {value!r}")


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class Permutation:
    """A bijection of ``{0, ..., size-1}``; ``images[k]`` is the row moved to position k."""

    images: tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(len(images))):
            raise InvalidInputError(f"not a permutation: {images}")
        object.__setattr__(self, "images", images)

    @property
    def size(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, size: int) -> "Permutation":
        return cls(tuple(range(size)))

    def matrix(self) -> np.ndarray:
        """Orthogonal matrix P with ``(P @ A)[k] == A[images[k]]``."""
        P = np.zeros((self.size, self.size))
        P[np.arange(self.size), self.images] = 1.0
        return P

    def apply_rows(self, A: np.ndarray) -> np.ndarray:
        return np.asarray(A)[list(self.images)]

    def inverse(self) -> "Permutation":
        inv = [0] * self.size
        for k, i in enumerate(self.images):
            inv[i] = k
        return Permutation(tuple(inv))


def as_matrix(A, name: str = "matrix") -> np.ndarray:
    """Validate and return a finite 2-D float array with at least one row and column."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise InvalidInputError(f"{name} must be a non-empty 2-D array, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return A


def as_vector(v, name: str = "vector") -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.shape[0] < 1:
        raise InvalidInputError(f"{name} must be a non-empty 1-D array, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return v


def _kept(s: np.ndarray, tol: Tolerance) -> np.ndarray:
    if s.size == 0 or s[0] == 0.0:
        return np.zeros(s.shape, dtype=bool)
    return s >= tol.rank_rel_tol * s[0]


def pinv(A, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse through a thin SVD.

    Singular values at or above ``tol.rank_rel_tol * sigma_max`` are inverted,
    the rest are treated as exact zeros.  A zero matrix maps to the zero
    matrix of transposed shape.
    """
    A = as_matrix(A)
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    keep = _kept(s, tol)
    if not keep.any():
        return np.zeros((A.shape[1], A.shape[0]))
    return (Vt[keep].T / s[keep]) @ U[:, keep].T


def rank(A, tol: Tolerance = DEFAULT_TOL) -> int:
    """Number of singular values at or above ``tol.rank_rel_tol * sigma_max``."""
    s = np.linalg.svd(as_matrix(A), compute_uv=False)
    return int(np.count_nonzero(_kept(s, tol)))


def penrose_residuals(A, A_plus) -> tuple[float, float, float, float]:
    """Relative violations of the four Penrose conditions.

    Each residual is a max-abs entry divided by ``max(1, max|A|)`` or
    ``max(1, max|A+|)`` as appropriate, so the numbers are scale aware.
    """
    A = np.asarray(A, dtype=float)
    X = np.asarray(A_plus, dtype=float)
    sa = max(1.0, float(np.abs(A).max()))
    sx = max(1.0, float(np.abs(X).max()))
    AX = A @ X
    XA = X @ A
    return (
        float(np.abs(AX @ A - A).max()) / sa,
        float(np.abs(XA @ X - X).max()) / sx,
        float(np.abs(AX - AX.T).max()) / max(1.0, float(np.abs(AX).max())),
        float(np.abs(XA - XA.T).max()) / max(1.0, float(np.abs(XA).max())),
    )


def _unit(v, name: str, slack: float = 1e-8) -> np.ndarray:
    v = as_vector(v, name)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise InvalidInputError(f"{name} is the zero vector")
    if abs(norm - 1.0) > slack:
        raise InvalidInputError(f"{name} is not a unit vector (norm {norm!r})")
    return v / norm


def _plane_rotation(u: np.ndarray, w: np.ndarray, cos_a: float, sin_a: float) -> np.ndarray:
    """Rotation by angle a in the plane of orthonormal (u, w), identity elsewhere."""
    n = u.shape[0]
    R = np.eye(n)
    R += (cos_a - 1.0) * (np.outer(u, u) + np.outer(w, w))
    R += sin_a * (np.outer(w, u) - np.outer(u, w))
    return R


def rotation_to(a, b, antipodal_tol: float = 1e-8) -> np.ndarray:
    """Special orthogonal matrix mapping unit vector ``a`` onto unit vector ``b``.

    The rotation acts in the plane spanned by ``a`` and ``b`` and fixes its
    orthogonal complement.  When ``a`` and ``b`` are antipodal (within
    ``antipodal_tol``) the plane is completed with the lowest-index standard
    basis vector that is not parallel to ``a``, and the rotation is by pi.
    """
    a = _unit(a, "a")
    b = _unit(b, "b")
    n = a.shape[0]
    if b.shape[0] != n:
        raise InvalidInputError(f"dimension mismatch: {n} vs {b.shape[0]}")
    if n < 2:
        raise InvalidInputError("rotations need dimension >= 2")

    if np.linalg.norm(a - b) <= 1e-15:
        return np.eye(n)

    if np.linalg.norm(a + b) <= antipodal_tol:
        companion = next(i for i in range(n) if abs(a[i]) < 1.0 - 1e-8)
        w = np.zeros(n)
        w[companion] = 1.0
        w -= (w @ a) * a
        w -= (w @ a) * a
        w /= np.linalg.norm(w)
        return _plane_rotation(a, w, -1.0, 0.0)

    c = float(a @ b)
    w = b - c * a
    w -= (w @ a) * a  # second Gram-Schmidt pass keeps w orthogonal when b is near -a
    s = float(np.linalg.norm(w))
    w /= s
    # Recompute the angle from the orthonormal pair for a consistent rotation.
    c, s = float(b @ a), float(b @ w)
    r = np.hypot(c, s)
    return _plane_rotation(a, w, c / r, s / r)


def invertible_block_permutation(A, q: int, tol: Tolerance = DEFAULT_TOL) -> Permutation:
    """Row permutation making the leading ``q x q`` block of ``P A`` invertible.

    Greedy partial pivoting on the first ``q`` columns: at each step the row
    with the largest entry in the current column of the Schur complement is
    moved up.

    Raises
    ------
    NoPermutationError
        If the first ``q`` columns of ``A`` do not have rank ``q``.
    """
    A = as_matrix(A)
    rows, cols = A.shape
    if not (1 <= q <= min(rows, cols)):
        raise InvalidInputError(f"q={q} incompatible with shape {A.shape}")
    if rank(A[:, :q], tol) < q:
        raise NoPermutationError(f"first {q} columns have rank < {q}")

    work = A[:, :q].copy()
    order = list(range(rows))
    for k in range(q):
        pivot = k + int(np.argmax(np.abs(work[k:, k])))
        if work[pivot, k] == 0.0:
            raise NoPermutationError(f"zero pivot in column {k}")
        work[[k, pivot]] = work[[pivot, k]]
        order[k], order[pivot] = order[pivot], order[k]
        work[k + 1:, k:] -= np.outer(work[k + 1:, k] / work[k, k], work[k, k:])

    perm = Permutation(tuple(order))
    block = perm.apply_rows(A)[:q, :q]
    s = np.linalg.svd(block, compute_uv=False)
    if s[-1] < tol.rank_rel_tol * s[0]:
        raise NoPermutationError("selected block is numerically singular")
    return perm
