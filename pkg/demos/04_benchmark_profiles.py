"""A small benchmark with Dolan-More performance profiles.

Generates a problem set, measures every solver on every problem by
iteration count, and prints the profile values rho(tau): the fraction of
problems a solver finishes within a factor tau of the per-problem winner.
The same pipeline is available from the command line:

    circumsolve gen   --n 60 --cf-lo 0.9 --cf-hi 0.95 --pairs 5 --points 4 --seed 11 --out problems.json
    circumsolve bench --problem-set problems.json --solvers crm-s2,crm-s3,drm,map --measure iters --out matrix.csv
    circumsolve profile --matrix matrix.csv --out profile.csv

Run with:  python demos/04_benchmark_profiles.py
"""

import tempfile
from pathlib import Path

from circumsolve import (
    IterationConfig,
    ProblemSpec,
    generate_problem_set,
    performance_profile,
    run_benchmark,
    run_grid,
    save_problem_set,
)

SOLVERS = ["crm-s2", "crm-s3", "crm-s4", "drm", "map"]

spec = ProblemSpec(n=60, cf_range=(0.9, 0.95), pairs=5, points_per_pair=4, seed=11)
problem_set = generate_problem_set(spec)
problems = problem_set.problems()
print(f"{len(problems)} problems in R^{spec.n} with cF in [0.9, 0.95)")

cells = run_grid(problems, SOLVERS, IterationConfig(tol=1e-6))
curves = performance_profile(cells, SOLVERS)

# rho at tau = 1 is the share of outright wins (ties included); the value at
# the largest breakpoint is the share of problems solved at all
print(f"\n{'solver':10s} {'rho(1)':>8s} {'rho(2)':>8s} {'solved':>8s}")
for curve in curves:
    rho = dict(curve.breakpoints)
    rho1 = rho.get(1.0, 0.0)
    rho2 = max(r for t, r in curve.breakpoints if t <= 2.0)
    print(f"{curve.solver_key:10s} {rho1:8.2f} {rho2:8.2f} {curve.breakpoints[-1][1]:8.2f}")

# the file-based pipeline writes the same numbers as CSV
with tempfile.TemporaryDirectory() as tmp:
    ps_path = Path(tmp) / "problems.json"
    save_problem_set(problem_set, ps_path)
    matrix_path, profile_path = run_benchmark(
        ps_path, SOLVERS, IterationConfig(tol=1e-6), "iterations", Path(tmp) / "matrix.csv"
    )
    print(f"\nmatrix CSV header : {matrix_path.read_text().splitlines()[0]}")
    print(f"profile CSV header: {profile_path.read_text().splitlines()[0]}")
