"""Circumcenters of finite point sets and the induced circumcenter mapping.

The circumcenter of a finite set K, when it exists, is the unique point of
the affine hull of K equidistant from every point of K.  Two independent
computations are provided: :func:`circumcenter_points` (Gram-system route,
used by the solvers) and :func:`circumcenter_oracle` (direct least-squares
solve of the equidistance conditions, used for verification).  They share no
numerical code path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .linalg import FEAS_TOL, RANK_TOL, AffineSubspace, as_vector, orthonormal_basis
from .operators import OperatorSet

DEFAULT_CC_TOL = 1e-8


class CircumcenterError(RuntimeError):
    """Raised when a circumcenter that must exist cannot be computed."""


@dataclass(frozen=True)
class CircumcenterResult:
    """Outcome of a circumcenter computation.

    ``value`` is ``None`` when no equidistant point exists in the affine
    hull (the set is affinely degenerate with inconsistent distances).
    ``radius`` is the mean distance from the candidate to the points and
    ``residual`` the largest deviation from that mean; acceptance requires
    ``residual <= tol * (1 + radius)``.
    """

    value: np.ndarray | None
    radius: float
    residual: float

    @property
    def exists(self) -> bool:
        return self.value is not None


def _as_points(points) -> np.ndarray:
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if P.shape[0] == 0 or P.shape[1] == 0:
        raise ValueError("point set must be nonempty")
    if not np.all(np.isfinite(P)):
        raise ValueError("point entries must be finite")
    return P


def _accept(candidate: np.ndarray, P: np.ndarray, tol: float) -> CircumcenterResult:
    dists = np.linalg.norm(P - candidate, axis=1)
    radius = float(dists.mean())
    residual = float(np.max(np.abs(dists - radius))) if len(dists) > 1 else 0.0
    if residual <= tol * (1.0 + radius):
        return CircumcenterResult(candidate, radius, residual)
    return CircumcenterResult(None, radius, residual)


def circumcenter_points(points, tol: float = DEFAULT_CC_TOL) -> CircumcenterResult:
    """Circumcenter of a finite point set via the Gram-matrix formula.

    A maximal independent subset of the difference vectors ``p_i - p_1`` is
    selected by rank-revealing orthogonalization (pivot on the largest
    residual norm, ties broken by lowest index).  With G the Gram matrix of
    the selected differences, the coefficients solve
    ``G alpha = (1/2) [ ||d_j||^2 ]`` and the candidate is
    ``p_1 + sum_j alpha_j d_j``.  The candidate is checked for equidistance
    against all points of the set, including the ones dropped by the rank
    filter; failure returns an empty result rather than raising.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    P = _as_points(points)
    p0 = P[0]
    D = P[1:] - p0
    if D.shape[0] == 0:
        return CircumcenterResult(p0.copy(), 0.0, 0.0)

    # pivoted modified Gram-Schmidt over the difference vectors; differences
    # below the rounding noise of the points themselves (about n*eps*|p|
    # for points produced by chains of reflections) are treated as zero,
    # otherwise a noise row can poison the Gram system
    scale = float(np.max(np.linalg.norm(D, axis=1)))
    noise_floor = 64.0 * P.shape[1] * np.finfo(float).eps * float(np.max(np.linalg.norm(P, axis=1)))
    threshold = max(RANK_TOL * scale, noise_floor)
    work = D.copy()
    chosen: list[int] = []
    taken = np.zeros(D.shape[0], dtype=bool)
    while scale > 0.0:
        norms = np.linalg.norm(work, axis=1)
        norms[taken] = -1.0
        j = int(np.argmax(norms))
        if norms[j] <= threshold:
            break
        e = work[j] / norms[j]
        chosen.append(j)
        taken[j] = True
        work = work - np.outer(work @ e, e)

    if not chosen:
        candidate = p0.copy()
    else:
        Dc = D[chosen]
        G = Dc @ Dc.T
        rhs = 0.5 * np.einsum("ij,ij->i", Dc, Dc)
        try:
            alpha = scipy.linalg.cho_solve(scipy.linalg.cho_factor(G), rhs)
        except scipy.linalg.LinAlgError:
            alpha, *_ = np.linalg.lstsq(G, rhs, rcond=None)
        candidate = p0 + alpha @ Dc
    return _accept(candidate, P, tol)


def circumcenter_oracle(points, tol: float = DEFAULT_CC_TOL) -> CircumcenterResult:
    """Independent circumcenter computation from the equidistance conditions.

    Parameterizes the candidate as ``p_1 + B^T c`` over an SVD-derived
    orthonormal basis B of span{p_i - p_1} and solves the full system
    ``||p - p_i||^2 = ||p - p_1||^2`` (one equation per point) by least
    squares.  Deliberately shares no code with :func:`circumcenter_points`.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    P = _as_points(points)
    p0 = P[0]
    D = P[1:] - p0
    if D.shape[0] == 0:
        return CircumcenterResult(p0.copy(), 0.0, 0.0)
    B = scipy.linalg.orth(D.T).T
    if B.shape[0] == 0:
        candidate = p0.copy()
    else:
        A = D @ B.T
        rhs = 0.5 * np.einsum("ij,ij->i", D, D)
        c, *_ = np.linalg.lstsq(A, rhs, rcond=None)
        candidate = p0 + c @ B
    return _accept(candidate, P, tol)


def circumcenter_map(S: OperatorSet, x, tol: float = DEFAULT_CC_TOL) -> np.ndarray:
    """Apply the circumcenter mapping induced by the operator set S.

    For a set of isometries with a common fixed point the mapping is proper
    (always point-valued), so an empty circumcenter here signals a numerical
    failure and raises :class:`CircumcenterError` with the residual attached.
    """
    x = as_vector(x)
    res = circumcenter_points(S.points(x), tol)
    if res.value is None:
        raise CircumcenterError(
            "properness violated numerically: no equidistant point found "
            f"(residual {res.residual:.3e}, radius {res.radius:.3e}); "
            "the operator set may not consist of isometries, or tol is too tight"
        )
    return res.value


def circumcenter_via_fixpoint(S: OperatorSet, x, W: AffineSubspace) -> np.ndarray:
    """Circumcenter through a known subset W of the common fixed set.

    Computes P_W x and projects it onto the affine hull of S(x); agrees with
    :func:`circumcenter_map` whenever W really lies inside the common fixed
    set, which is verified here by sampling points of W.
    """
    x = as_vector(x, W.ambient_dim)
    samples = [W.anchor] + [W.anchor + b for b in W.direction.basis]
    for op in S.ops:
        for w in samples:
            if np.linalg.norm(op(w) - w) > FEAS_TOL * (1.0 + np.linalg.norm(w)):
                raise ValueError("W is not contained in the common fixed set")
    w = W.project(x)
    pts = S.points(x)
    p0 = pts[0]
    hull_dir = orthonormal_basis(pts[1:] - p0, dim=len(p0)) if len(pts) > 1 else None
    if hull_dir is None or hull_dir.dim == 0:
        return p0.copy()
    return p0 + hull_dir.project(w - p0)
