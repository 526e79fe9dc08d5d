"""Dense real vectors and linear/affine subspaces of R^n.

Subspaces are stored as orthonormal bases (one basis vector per row).
Every type is immutable after construction and every operation is pure,
so values may be shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

# Rank decisions are made relative to the largest vector norm involved.
RANK_TOL = 1e-10

# Feasibility / consistency decisions (e.g. "is this point on the subspace").
FEAS_TOL = 1e-9

_ORTHONORMALITY_TOL = 1e-12


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Coerce ``x`` to a 1-D float array with finite entries.

    ``dim``, when given, is enforced; a mismatch raises ``ValueError``.
    """
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    if v.size == 0:
        raise ValueError("vectors must have positive dimension")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    if dim is not None and v.shape[0] != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {v.shape[0]}")
    return v


@dataclass(frozen=True)
class LinearSubspace:
    """A linear subspace of R^n spanned by orthonormal basis rows.

    ``basis`` has shape ``(k, ambient_dim)`` with ``0 <= k <= ambient_dim``;
    ``k = 0`` is the zero subspace.  Use :func:`orthonormal_basis` (or the
    ``span`` classmethod) to build one from arbitrary spanning vectors.
    """

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        if self.ambient_dim < 1:
            raise ValueError("ambient dimension must be positive")
        B = np.asarray(self.basis, dtype=float).reshape(-1, self.ambient_dim)
        if B.shape[0] > self.ambient_dim:
            raise ValueError("more basis vectors than ambient dimensions")
        if not np.all(np.isfinite(B)):
            raise ValueError("basis entries must be finite")
        if B.shape[0]:
            gram = B @ B.T
            if np.max(np.abs(gram - np.eye(B.shape[0]))) > _ORTHONORMALITY_TOL:
                raise ValueError("basis rows are not orthonormal")
        B.setflags(write=False)
        object.__setattr__(self, "basis", B)

    @classmethod
    def span(cls, vectors, rank_tol: float = RANK_TOL, *, dim: int | None = None):
        return orthonormal_basis(vectors, rank_tol, dim=dim)

    @classmethod
    def zero(cls, n: int):
        return cls(n, np.zeros((0, n)))

    @classmethod
    def full(cls, n: int):
        return cls(n, np.eye(n))

    @property
    def dim(self) -> int:
        """Dimension of the subspace itself (number of basis vectors)."""
        return self.basis.shape[0]

    def project(self, x) -> np.ndarray:
        x = as_vector(x, self.ambient_dim)
        if self.dim == 0:
            return np.zeros(self.ambient_dim)
        return self.basis.T @ (self.basis @ x)

    def reflect(self, x) -> np.ndarray:
        x = as_vector(x, self.ambient_dim)
        return 2.0 * self.project(x) - x

    def contains(self, x, tol: float = FEAS_TOL) -> bool:
        x = as_vector(x, self.ambient_dim)
        return float(np.linalg.norm(x - self.project(x))) <= tol * (1.0 + np.linalg.norm(x))

    def same_span(self, other: "LinearSubspace", tol: float = FEAS_TOL) -> bool:
        if self.ambient_dim != other.ambient_dim or self.dim != other.dim:
            return False
        resid = self.basis - (self.basis @ other.basis.T) @ other.basis
        return float(np.abs(resid).max(initial=0.0)) <= tol

    def as_affine(self) -> "AffineSubspace":
        return AffineSubspace(np.zeros(self.ambient_dim), self)


def orthonormal_basis(vectors, rank_tol: float = RANK_TOL, *, dim: int | None = None) -> LinearSubspace:
    """Orthonormalize ``vectors`` into a :class:`LinearSubspace`.

    Modified Gram-Schmidt with one re-orthogonalization pass; a vector whose
    residual norm is at most ``rank_tol`` times the largest input norm is
    treated as dependent and dropped.  ``dim`` is required when ``vectors``
    is empty (the zero subspace carries no dimension information).
    """
    rows = [as_vector(v) for v in list(vectors)]
    if rows:
        n = rows[0].shape[0]
        for v in rows[1:]:
            if v.shape[0] != n:
                raise ValueError("input vectors do not share a dimension")
    else:
        if dim is None:
            raise ValueError("ambient dimension required for empty input")
        n = dim
    if rank_tol <= 0:
        raise ValueError("rank tolerance must be positive")

    scale = max((float(np.linalg.norm(v)) for v in rows), default=0.0)
    basis: list[np.ndarray] = []
    for v in rows:
        w = v.copy()
        for _ in range(2):
            for e in basis:
                w -= (e @ w) * e
        norm_w = float(np.linalg.norm(w))
        if norm_w > rank_tol * scale and norm_w > 0.0:
            basis.append(w / norm_w)
    B = np.array(basis, dtype=float).reshape(len(basis), n)
    return LinearSubspace(n, B)


@dataclass(frozen=True)
class AffineSubspace:
    """An affine subspace ``anchor + direction`` of R^n.

    The anchor is canonicalized to the minimum-norm point of the set, so two
    representations of the same set compare equal entrywise.
    """

    anchor: np.ndarray
    direction: LinearSubspace

    def __post_init__(self):
        a = as_vector(self.anchor, self.direction.ambient_dim)
        correction = self.direction.project(a)
        # skip the subtraction for an already-canonical anchor so that
        # construction from serialized data is bit-exact
        if np.linalg.norm(correction) > 1e-14 * (1.0 + np.linalg.norm(a)):
            a = a - correction
        else:
            a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "anchor", a)

    @classmethod
    def from_points(cls, points):
        """Affine hull of a nonempty collection of points."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[0] == 0:
            raise ValueError("at least one point required")
        direction = orthonormal_basis(pts[1:] - pts[0], dim=pts.shape[1])
        return cls(pts[0], direction)

    @property
    def ambient_dim(self) -> int:
        return self.direction.ambient_dim

    def project(self, x) -> np.ndarray:
        x = as_vector(x, self.ambient_dim)
        return self.anchor + self.direction.project(x - self.anchor)

    def reflect(self, x) -> np.ndarray:
        x = as_vector(x, self.ambient_dim)
        return 2.0 * self.project(x) - x

    def contains(self, x, tol: float = FEAS_TOL) -> bool:
        x = as_vector(x, self.ambient_dim)
        return float(np.linalg.norm(x - self.project(x))) <= tol * (1.0 + np.linalg.norm(x))

    def translate(self, z) -> "AffineSubspace":
        return AffineSubspace(self.anchor + as_vector(z, self.ambient_dim), self.direction)

    def same_set(self, other: "AffineSubspace", tol: float = FEAS_TOL) -> bool:
        return (
            self.direction.same_span(other.direction, tol)
            and float(np.linalg.norm(self.anchor - other.anchor)) <= tol * (1.0 + np.linalg.norm(self.anchor))
        )


def as_affine(s) -> AffineSubspace:
    """Coerce a ``LinearSubspace`` or ``AffineSubspace`` to affine form."""
    if isinstance(s, AffineSubspace):
        return s
    if isinstance(s, LinearSubspace):
        return s.as_affine()
    raise TypeError(f"expected a subspace, got {type(s).__name__}")


def orthogonal_complement(L: LinearSubspace) -> LinearSubspace:
    """The orthogonal complement, with dim(L) + dim(L^perp) = n."""
    n = L.ambient_dim
    if L.dim == 0:
        return LinearSubspace.full(n)
    if L.dim == n:
        return LinearSubspace.zero(n)
    C = scipy.linalg.null_space(L.basis)
    return LinearSubspace(n, C.T)


def intersect(a, b, tol: float = FEAS_TOL):
    """Intersection of two affine (or linear) subspaces.

    Returns an :class:`AffineSubspace`, or ``None`` when the sets are
    disjoint (e.g. parallel lines).  The intersection is computed from the
    nullspace of the stacked orthogonal-complement system, which stays well
    conditioned even for subspaces meeting at small angles.
    """
    A, B = as_affine(a), as_affine(b)
    if A.ambient_dim != B.ambient_dim:
        raise ValueError("subspaces live in different ambient dimensions")
    n = A.ambient_dim
    Ca = orthogonal_complement(A.direction).basis
    Cb = orthogonal_complement(B.direction).basis
    M = np.vstack([Ca, Cb])
    if M.shape[0] == 0:
        return AffineSubspace(np.zeros(n), LinearSubspace.full(n))
    rhs = np.concatenate([Ca @ A.anchor, Cb @ B.anchor])
    x, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    scale = 1.0 + max(np.linalg.norm(A.anchor), np.linalg.norm(B.anchor))
    if float(np.linalg.norm(M @ x - rhs)) > tol * scale:
        return None
    null = scipy.linalg.null_space(M, rcond=RANK_TOL)
    return AffineSubspace(x, LinearSubspace(n, null.T))


def intersect_all(subspaces, tol: float = FEAS_TOL):
    """Fold :func:`intersect` over a nonempty list; ``None`` if empty overall."""
    subs = [as_affine(s) for s in subspaces]
    if not subs:
        raise ValueError("at least one subspace required")
    acc = subs[0]
    for s in subs[1:]:
        acc = intersect(acc, s, tol)
        if acc is None:
            return None
    return acc


def _deflate(L: LinearSubspace, W: LinearSubspace) -> LinearSubspace:
    # L cap W^perp for W inside L: orthogonalize the W-free parts of L's basis.
    if W.dim == 0 or L.dim == 0:
        return L
    resid = L.basis - (L.basis @ W.basis.T) @ W.basis
    return orthonormal_basis(resid, dim=L.ambient_dim)


def friedrichs_cosine(U: LinearSubspace, V: LinearSubspace) -> float:
    """Cosine of the Friedrichs angle between two linear subspaces.

    The intersection is removed from both subspaces first; the result is the
    largest cosine of the remaining principal angles.  When one deflated
    subspace is zero (in particular for nested subspaces) the supremum runs
    over an empty set and the value is 0 by convention.
    """
    if U.ambient_dim != V.ambient_dim:
        raise ValueError("subspaces live in different ambient dimensions")
    inter = intersect(U.as_affine(), V.as_affine())
    W = inter.direction
    Ud = _deflate(U, W)
    Vd = _deflate(V, W)
    if Ud.dim == 0 or Vd.dim == 0:
        return 0.0
    s = np.linalg.svd(Ud.basis @ Vd.basis.T, compute_uv=False)
    return float(np.clip(s[0], 0.0, 1.0))
