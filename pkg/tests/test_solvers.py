import numpy as np
import pytest

from circumsolve.circumcenter import circumcenter_map
from circumsolve.linalg import (
    AffineSubspace,
    LinearSubspace,
    intersect,
    intersect_all,
    orthonormal_basis,
)
from circumsolve.operators import dr_operator, fixed_subspace, reflection_set
from circumsolve.solvers import (
    DivergenceError,
    IterationConfig,
    SolverSpec,
    iterate,
    lift_to_product,
    make_solver,
    parallelize,
)
from circumsolve.problems import ProblemSpec, gen_subspace_pair

XAXIS = LinearSubspace.span([(1, 0)]).as_affine()
YAXIS = LinearSubspace.span([(0, 1)]).as_affine()
DIAG = LinearSubspace.span([(1, 1)]).as_affine()


def test_iterate_already_converged():
    ref = np.array([1.0, 2.0])
    tr = iterate(lambda x: x, ref.copy(), IterationConfig(), ref)
    assert tr.solved and tr.iterations == 0
    assert len(tr.errors) == 1


def test_iterate_halving_counts_iterations():
    tr = iterate(lambda x: x / 2, np.array([1.0, 0.0]), IterationConfig(tol=0.3), np.zeros(2))
    assert tr.solved and tr.iterations == 2
    np.testing.assert_allclose(tr.errors, [1.0, 0.5, 0.25])


def test_iterate_dr_on_perpendicular_lines_solves_in_one_step():
    T = dr_operator(XAXIS, YAXIS)
    x0 = np.array([2.0, -1.0])  # already in U1 + U2 = R^2
    tr = iterate(T, x0, IterationConfig(tol=1e-12), np.zeros(2))
    assert tr.solved and tr.iterations == 1


def test_iterate_flags_unsolved_at_max_iter():
    tr = iterate(lambda x: x, np.ones(2), IterationConfig(tol=1e-9, max_iter=5), np.zeros(2))
    assert not tr.solved
    assert tr.iterations == 5
    assert len(tr.errors) == 6


@pytest.mark.filterwarnings("ignore:overflow")
def test_iterate_raises_on_divergence():
    def blowup(x):
        return x * 1e200

    with pytest.raises(DivergenceError):
        iterate(blowup, np.ones(2), IterationConfig(tol=1e-9, max_iter=50), np.zeros(2))


def test_config_validation():
    with pytest.raises(ValueError):
        IterationConfig(tol=0.0)
    with pytest.raises(ValueError):
        IterationConfig(max_iter=0)


def test_map_solver_first_iterate():
    s = make_solver(SolverSpec("map"), [XAXIS, DIAG])
    np.testing.assert_allclose(s.step(np.array([1.0, 2.0])), [0.5, 0.5], atol=1e-12)


def test_drm_solver_governed_step_and_shadow():
    s = make_solver(SolverSpec("drm"), [XAXIS, DIAG])
    x = np.array([1.0, 2.0])
    np.testing.assert_allclose(s.step(x), [(1 - 2) / 2, (1 + 2) / 2], atol=1e-12)
    np.testing.assert_allclose(s.monitor(x), [1.0, 0.0], atol=1e-12)


def test_crm_s2_with_projected_start_reaches_the_intersection():
    s = make_solver(SolverSpec("crm_s2", "project_U1"), [XAXIS, DIAG])
    x0 = s.init(np.array([1.0, 2.0]))
    np.testing.assert_allclose(x0, [1.0, 0.0], atol=1e-14)
    x1 = s.step(x0)
    np.testing.assert_allclose(x1, [0.5, 0.5], atol=1e-12)
    x2 = s.step(x1)
    np.testing.assert_allclose(x2, [0.0, 0.0], atol=1e-12)


def test_unknown_kind_and_wrong_subspace_count():
    with pytest.raises(ValueError):
        SolverSpec("newton")
    with pytest.raises(ValueError):
        make_solver(SolverSpec("drm"), [XAXIS, DIAG, YAXIS])
    with pytest.raises(ValueError):
        make_solver(SolverSpec("map"), [XAXIS])


def test_solver_key_round_trip():
    spec = SolverSpec.from_key("crm-s4")
    assert spec.kind == "crm_s4"
    assert spec.key == "crm-s4"


def test_parallelize_subtracts_the_anchor():
    A1 = AffineSubspace((0, 1), LinearSubspace.span([(1, 0)]))
    A2 = AffineSubspace((0, 1), LinearSubspace.span([(1, 1)]))
    L1, L2 = parallelize([A1, A2], (0, 1))
    assert L1.same_span(LinearSubspace.span([(1, 0)]))
    assert L2.same_span(LinearSubspace.span([(1, 1)]))


def test_parallelize_keeps_linear_subspaces():
    L1, L2 = parallelize([XAXIS, DIAG], (0, 0))
    assert L1.same_span(XAXIS.direction)
    assert L2.same_span(DIAG.direction)


def test_parallelize_rejects_points_off_the_intersection():
    with pytest.raises(ValueError):
        parallelize([XAXIS, DIAG], (1.0, 0.0))


def test_affine_run_is_conjugate_to_the_linear_run():
    rng = np.random.default_rng(30)
    worst = 0.0
    for _ in range(50):
        z = rng.standard_normal(4)
        d1 = orthonormal_basis(rng.standard_normal((2, 4)))
        d2 = orthonormal_basis(rng.standard_normal((2, 4)))
        U1, U2 = AffineSubspace(z, d1), AffineSubspace(z, d2)
        S_aff = reflection_set("s2", [U1, U2])
        S_lin = reflection_set("s2", parallelize([U1, U2], z))
        x = rng.standard_normal(4) * 2
        xa, xl = x.copy(), x - z
        for _ in range(20):
            xa = circumcenter_map(S_aff, xa)
            xl = circumcenter_map(S_lin, xl)
            worst = max(worst, float(np.linalg.norm(xa - (z + xl))))
    assert worst < 1e-9


def _controlled_pair(seed, cf_lo=0.3, cf_hi=0.9, n=10, p=3, q=3, r=1):
    spec = ProblemSpec(n=n, p=p, q=q, r=r, cf_range=(cf_lo, cf_hi), pairs=1, points_per_pair=0, seed=seed)
    L1, L2, cf = gen_subspace_pair(spec, 0)
    return L1.as_affine(), L2.as_affine(), cf


@pytest.mark.parametrize("key", ["crm-s1", "crm-s2", "crm-s3", "crm-s4", "drm", "map"])
def test_fejer_monotone_and_projection_invariant_iterates(key):
    U1, U2, _ = _controlled_pair(31)
    inter = intersect(U1, U2)
    rng = np.random.default_rng(32)
    x0 = rng.standard_normal(10) * 5
    ref = inter.project(x0)
    s = make_solver(SolverSpec.from_key(key), [U1, U2])
    cfg = IterationConfig(tol=1e-9, max_iter=3000, record_trace=True)
    tr = iterate(s.step, s.init(x0), cfg, ref, monitor=s.monitor)
    X = np.array(tr.iterates)
    dists = np.linalg.norm(X - ref, axis=1)
    assert np.all(np.diff(dists) <= 1e-12)
    projections = (X - inter.anchor) @ inter.direction.basis.T @ inter.direction.basis + inter.anchor
    drift = np.linalg.norm(projections - projections[0], axis=1)
    assert np.max(drift, initial=0.0) <= 1e-9 * (1 + np.linalg.norm(x0))


@pytest.mark.parametrize("key", ["crm-s1", "crm-s2", "crm-s3", "crm-s4", "drm"])
def test_squared_consecutive_gaps_are_summable(key):
    # holds whenever the identity lies in the affine hull of the operator set
    U1, U2, _ = _controlled_pair(33)
    inter = intersect(U1, U2)
    rng = np.random.default_rng(34)
    x0 = rng.standard_normal(10) * 5
    z = inter.project(x0)
    s = make_solver(SolverSpec.from_key(key), [U1, U2])
    cfg = IterationConfig(tol=1e-10, max_iter=3000, record_trace=True)
    tr = iterate(s.step, s.init(x0), cfg, z, monitor=s.monitor)
    X = np.array(tr.iterates)
    gaps_sq = np.sum(np.diff(X, axis=0) ** 2, axis=1)
    assert gaps_sq.sum() <= np.linalg.norm(x0 - z) ** 2 + 1e-8


@pytest.mark.parametrize("key", ["crm-s1", "crm-s2", "crm-s3", "crm-s4"])
def test_crm_steps_are_orthogonal_to_the_intersection_directions(key):
    U1, U2, _ = _controlled_pair(35)
    inter = intersect(U1, U2)
    rng = np.random.default_rng(36)
    x0 = rng.standard_normal(10) * 5
    s = make_solver(SolverSpec.from_key(key), [U1, U2])
    cfg = IterationConfig(tol=1e-9, max_iter=3000, record_trace=True)
    tr = iterate(s.step, s.init(x0), cfg, inter.project(x0), monitor=s.monitor)
    X = np.array(tr.iterates)
    inner = (X - x0) @ inter.direction.basis.T
    assert np.abs(inner).max(initial=0.0) <= 1e-9 * (1 + np.linalg.norm(x0))


@pytest.mark.parametrize("key", ["crm-s1", "crm-s2", "crm-s3", "crm-s4"])
def test_crm_converges_to_the_best_approximation(key):
    U1, U2, _ = _controlled_pair(37)
    rng = np.random.default_rng(38)
    x0 = rng.standard_normal(10) * 5
    ref = intersect(U1, U2).project(x0)
    s = make_solver(SolverSpec.from_key(key), [U1, U2])
    tr = iterate(s.step, s.init(x0), IterationConfig(tol=1e-9, max_iter=5000), ref, monitor=s.monitor)
    assert tr.solved


def test_drm_limit_misses_the_intersection_from_bad_starts():
    # two lines spanning only a plane in R^3; start with a component off the plane
    U1 = LinearSubspace.span([(1, 0, 0)]).as_affine()
    U2 = LinearSubspace.span([(np.cos(1.0), np.sin(1.0), 0)]).as_affine()
    x0 = np.array([1.0, 2.0, 3.0])
    T = dr_operator(U1, U2)
    target = fixed_subspace(T, dim=3).project(x0)
    tr = iterate(T, x0, IterationConfig(tol=1e-10, max_iter=10000), target)
    assert tr.solved
    p_inter = intersect(U1, U2).project(x0)
    assert np.linalg.norm(target - p_inter) > 1e-3


def test_three_line_chain_set_collapses_to_the_middle_reflector():
    U1, U2, U3 = XAXIS, DIAG, YAXIS
    S = reflection_set("s2", [U1, U2, U3])
    # keep only {Id, R3 R2 R1} as in the anomaly construction
    from circumsolve.operators import OperatorSet

    S2 = OperatorSet((S.ops[0], S.ops[3]), fixed=S.fixed)
    rng = np.random.default_rng(39)
    for _ in range(50):
        x = rng.standard_normal(2) * 3
        np.testing.assert_allclose(circumcenter_map(S2, x), U2.project(x), atol=1e-12)


def test_product_lift_shapes_and_projections():
    rng = np.random.default_rng(40)
    subs = [LinearSubspace.span(rng.standard_normal((2, 4))).as_affine() for _ in range(3)]
    C, D = lift_to_product(subs)
    assert C.ambient_dim == 12 and D.ambient_dim == 12
    x = rng.standard_normal(12)
    blockwise = np.concatenate([s.project(x[4 * i : 4 * (i + 1)]) for i, s in enumerate(subs)])
    np.testing.assert_allclose(C.project(x), blockwise, atol=1e-12)
    mean = x.reshape(3, 4).mean(axis=0)
    np.testing.assert_allclose(D.project(x), np.tile(mean, 3), atol=1e-12)


def test_product_crm_converges_blockwise():
    rng = np.random.default_rng(41)
    shared = rng.standard_normal(6)
    subs = [
        LinearSubspace.span(np.vstack([shared, rng.standard_normal(6)])).as_affine()
        for _ in range(3)
    ]
    x0 = rng.standard_normal(6) * 3
    ref = intersect_all(subs).project(x0)
    s = make_solver(SolverSpec("product_crm"), subs)
    tr = iterate(s.step, s.init(x0), IterationConfig(tol=1e-8, max_iter=10**4), ref, monitor=s.monitor)
    assert tr.solved


def test_product_crm_full_operator_set_also_converges():
    rng = np.random.default_rng(43)
    shared = rng.standard_normal(6)
    subs = [
        LinearSubspace.span(np.vstack([shared, rng.standard_normal(6)])).as_affine()
        for _ in range(3)
    ]
    x0 = rng.standard_normal(6) * 3
    ref = intersect_all(subs).project(x0)
    s = make_solver(SolverSpec("product_crm"), subs, product_ops="full")
    tr = iterate(s.step, s.init(x0), IterationConfig(tol=1e-8, max_iter=10**4), ref, monitor=s.monitor)
    assert tr.solved
    with pytest.raises(ValueError):
        make_solver(SolverSpec("product_crm"), subs, product_ops="bogus")


def test_avg_proj_converges():
    rng = np.random.default_rng(42)
    subs = [LinearSubspace.span(rng.standard_normal((2, 6))).as_affine() for _ in range(3)]
    x0 = rng.standard_normal(6) * 3
    ref = intersect_all(subs).project(x0)
    s = make_solver(SolverSpec("avg_proj"), subs)
    tr = iterate(s.step, s.init(x0), IterationConfig(tol=1e-8, max_iter=10**6), ref)
    assert tr.solved
