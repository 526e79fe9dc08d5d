"""Fixed-point iteration driver and the solver family.

Solvers are triples ``(init, step, monitor)``: ``init`` maps the user's
starting point into the solver's internal state space, ``step`` advances the
state by one iteration, and ``monitor`` maps the state to the point in the
original space that is compared against the reference solution.  For most
solvers the monitor is the identity; the Douglas-Rachford method iterates
its governed sequence and monitors its projection onto the first subspace,
and the product-space method iterates in the t-fold product and monitors the
first block.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .circumcenter import circumcenter_map
from .linalg import (
    AffineSubspace,
    LinearSubspace,
    as_affine,
    as_vector,
    intersect,
    orthonormal_basis,
)
from .operators import Compose, Identity, OperatorSet, Reflector, dr_operator, reflection_set

SOLVER_KINDS = (
    "crm_s1",
    "crm_s2",
    "crm_s3",
    "crm_s4",
    "drm",
    "map",
    "avg_proj",
    "product_crm",
)
INIT_TRANSFORMS = ("none", "project_U1", "project_U2", "project_sum")

# CLI / CSV spelling of each solver kind.
SOLVER_KEYS = {kind.replace("_", "-"): kind for kind in SOLVER_KINDS}


class DivergenceError(RuntimeError):
    """An iterate left the finite floats; carries the last finite iterate."""

    def __init__(self, message, last_iterate):
        super().__init__(message)
        self.last_iterate = last_iterate


@dataclass(frozen=True)
class IterationConfig:
    tol: float = 1e-6
    max_iter: int = 10**6
    record_trace: bool = False

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass
class Trace:
    """Error history of one solver run.

    ``errors[k]`` is the distance of the k-th monitored iterate to the
    reference; the list always has ``iterations + 1`` entries.  ``iterates``
    holds the raw (governed) states when tracing was requested.
    """

    errors: np.ndarray
    iterations: int
    solved: bool
    wall_time: float
    iterates: list | None = None


@dataclass(frozen=True)
class SolverSpec:
    kind: str
    init_transform: str = "none"

    def __post_init__(self):
        if self.kind not in SOLVER_KINDS:
            raise ValueError(f"unknown solver kind {self.kind!r}")
        if self.init_transform not in INIT_TRANSFORMS:
            raise ValueError(f"unknown init transform {self.init_transform!r}")

    @classmethod
    def from_key(cls, key: str, init_transform: str = "none") -> "SolverSpec":
        """Build a spec from the CLI/CSV solver key (e.g. ``crm-s3``)."""
        kind = SOLVER_KEYS.get(key, key)
        return cls(kind, init_transform)

    @property
    def key(self) -> str:
        return self.kind.replace("_", "-")


class Solver(NamedTuple):
    init: Callable
    step: Callable
    monitor: Callable


def iterate(step, x0, cfg: IterationConfig, reference, monitor=None) -> Trace:
    """Run ``x_{k+1} = step(x_k)`` until the monitored error reaches tol.

    Stops at the smallest k with ``||monitor(x_k) - reference|| <= cfg.tol``
    (k = 0 included), or flags the run unsolved once ``cfg.max_iter``
    iterations have been taken.  A non-finite iterate raises
    :class:`DivergenceError` with the last finite iterate attached.
    """
    x = np.asarray(x0, dtype=float)
    reference = np.asarray(reference, dtype=float)
    errors: list[float] = []
    iterates: list[np.ndarray] | None = [] if cfg.record_trace else None
    k = 0
    start = time.perf_counter()
    while True:
        if not np.all(np.isfinite(x)):
            last = iterates[-1] if iterates else None
            raise DivergenceError(f"iterate {k} is not finite", last)
        if iterates is not None:
            iterates.append(x)
        monitored = monitor(x) if monitor is not None else x
        err = float(np.linalg.norm(monitored - reference))
        errors.append(err)
        if err <= cfg.tol:
            solved = True
            break
        if k >= cfg.max_iter:
            solved = False
            break
        x = step(x)
        k += 1
    wall = time.perf_counter() - start
    return Trace(np.array(errors), k, solved, wall, iterates)


def _sum_subspace(U1: AffineSubspace, U2: AffineSubspace) -> AffineSubspace:
    """The (affine) sum U1 + U2 = {u1 + u2}."""
    direction = orthonormal_basis(
        np.vstack([U1.direction.basis, U2.direction.basis]),
        dim=U1.ambient_dim,
    )
    return AffineSubspace(U1.anchor + U2.anchor, direction)


def lift_to_product(subspaces) -> tuple[AffineSubspace, AffineSubspace]:
    """Product-space lift: C = U_1 x ... x U_t and the diagonal D in R^{tn}.

    C's basis is block diagonal in the blocks' own bases; D is spanned by the
    normalized all-blocks-equal coordinate directions.
    """
    subs = [as_affine(s) for s in subspaces]
    n = subs[0].ambient_dim
    t = len(subs)
    if any(s.ambient_dim != n for s in subs):
        raise ValueError("subspaces live in different ambient dimensions")
    rows = []
    for i, s in enumerate(subs):
        for b in s.direction.basis:
            row = np.zeros(t * n)
            row[i * n : (i + 1) * n] = b
            rows.append(row)
    C_dir = LinearSubspace(t * n, np.array(rows).reshape(len(rows), t * n))
    C = AffineSubspace(np.concatenate([s.anchor for s in subs]), C_dir)
    diag_rows = np.zeros((n, t * n))
    for j in range(n):
        diag_rows[j, j::n] = 1.0 / np.sqrt(t)
    D = AffineSubspace(np.zeros(t * n), LinearSubspace(t * n, diag_rows))
    return C, D


def parallelize(subspaces, z) -> list[LinearSubspace]:
    """Directions par U_i of affine subspaces sharing the common point z.

    Running a circumcentered reflection method on the returned linear
    subspaces from ``x - z`` and adding ``z`` back reproduces the affine run
    from ``x`` exactly.
    """
    subs = [as_affine(s) for s in subspaces]
    z = as_vector(z, subs[0].ambient_dim)
    for i, s in enumerate(subs):
        if np.linalg.norm(s.project(z) - z) > 1e-9 * (1.0 + np.linalg.norm(z)):
            raise ValueError(f"z is not on subspace {i}")
    return [s.direction for s in subs]


def make_solver(spec: SolverSpec, subspaces, cc_tol: float = 1e-8, product_ops: str = "minimal") -> Solver:
    """Instantiate a solver for the given affine subspaces.

    Two subspaces are required for drm/map/crm-s3/crm-s4; crm-s1, crm-s2,
    avg-proj and product-crm accept two or more.  ``product_ops`` selects the
    lifted operator set of product-crm: ``"minimal"`` uses {Id, R_C R_D},
    ``"full"`` adds the two plain reflections.
    """
    subs = [as_affine(s) for s in subspaces]
    t = len(subs)
    if spec.kind in ("drm", "map", "crm_s3", "crm_s4") and t != 2:
        raise ValueError(f"solver {spec.kind!r} requires exactly two subspaces")
    if t < 2:
        raise ValueError("at least two subspaces required")

    U1 = subs[0]
    identity = lambda x: x

    if spec.init_transform == "none":
        init_base = identity
    elif spec.init_transform == "project_U1":
        init_base = subs[0].project
    elif spec.init_transform == "project_U2":
        init_base = subs[1].project
    else:
        init_base = _sum_subspace(subs[0], subs[1]).project

    if spec.kind == "map":
        U2 = subs[1]

        def step(x, _p1=U1.project, _p2=U2.project):
            return _p2(_p1(x))

        return Solver(init_base, step, identity)

    if spec.kind == "drm":
        T = dr_operator(subs[0], subs[1])
        return Solver(init_base, T, U1.project)

    if spec.kind == "avg_proj":
        projectors = [s.project for s in subs]

        def step(x, _ps=projectors, _t=t):
            acc = _ps[0](x)
            for p in _ps[1:]:
                acc = acc + p(x)
            return acc / _t

        return Solver(init_base, step, identity)

    if spec.kind == "product_crm":
        C, D = lift_to_product(subs)
        fix = intersect(C, D)
        rc, rd = Reflector(C), Reflector(D)
        if product_ops == "minimal":
            ops = (Identity(), Compose((rc, rd)))
        elif product_ops == "full":
            ops = (Identity(), rd, rc, Compose((rc, rd)))
        else:
            raise ValueError(f"unknown product operator set {product_ops!r}")
        S = OperatorSet(ops, fixed=fix)
        n = subs[0].ambient_dim

        def init(x, _base=init_base, _t=t):
            return np.tile(np.asarray(_base(x), dtype=float), _t)

        def step(x, _S=S, _tol=cc_tol):
            return circumcenter_map(_S, x, _tol)

        def monitor(v, _n=n):
            return v[:_n]

        return Solver(init, step, monitor)

    # circumcentered reflection methods
    S = reflection_set(spec.kind[-2:], subs)

    def step(x, _S=S, _tol=cc_tol):
        return circumcenter_map(_S, x, _tol)

    return Solver(init_base, step, identity)
