"""The schemes with only local convergence guarantees.

For NEW1 and the three mixed laws the Laplacian is symmetric everywhere but
negative definite only in places, so both flows are expected to converge
only from starts close to a point where it is.  Each fixture fixes such a
point u*, sets the target to K(u*), and restarts the flows from u* moved by
1e-2 in a random direction.

MIXED1 on the tetra-sphere is the exception: no sampled point has a negative
definite Laplacian, and at the chosen u* one eigenvalue is positive.  Calabi
flow (the gradient flow of |K - Kbar|^2 / 2) still returns, but Ricci flow is
pushed away along the unstable direction until an edge degenerates.

    python3 demos/local_schemes.py
"""

import time

import numpy as np

from hexflow import SolverConfig, laplacian, solve
from hexflow.fixtures import local_fixtures
from hexflow.flows import perturbed_start


def main():
    print(f"{'fixture':9s} {'eigenvalues of Laplacian at u*':>38s}")
    fixtures = local_fixtures()
    for name, fx in fixtures.items():
        ev = np.linalg.eigvalsh(laplacian(fx.cfg, fx.tri, fx.u_star).toarray())
        print(f"{name:9s} {np.array2string(ev, precision=3, floatmode='fixed'):>38s}")

    print(f"\n{'fixture':9s} {'method':7s} {'outcome':16s} {'steps':>6s} {'|u - u*|':>9s} {'time':>6s}")
    for name, fx in fixtures.items():
        u0 = perturbed_start(fx.cfg, fx.tri, fx.u_star, 1e-2, np.random.default_rng(0))
        for method in ("ricci", "calabi"):
            t0 = time.perf_counter()
            tr = solve(fx.cfg, fx.tri, u0, fx.Kbar, SolverConfig(method=method, tol=1e-12, max_steps=20_000))
            dist = np.max(np.abs(tr.u_final - fx.u_star))
            print(f"{name:9s} {method:7s} {tr.outcome.value:16s} {tr.n_steps:6d} {dist:9.1e} {time.perf_counter() - t0:5.1f}s")


if __name__ == "__main__":
    main()
