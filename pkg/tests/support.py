"""Shared random-instance generators for the test suite."""

import numpy as np

from boxipm import BoxQP, StandardQP


def random_boxqp(rng, n, m, feasible=True, tol=1e-2, rank=None, scale=1.0):
    """Random PSD instance; b is reachable from the box iff ``feasible``."""
    r = n if rank is None else rank
    B = rng.normal(size=(r, n))
    Q = scale * (B.T @ B) / n
    c = scale * rng.normal(size=n)
    A = scale * rng.normal(size=(m, n))
    x0 = rng.uniform(-0.8, 0.8, size=n)
    b = A @ x0
    if not feasible:
        u = rng.normal(size=m)
        u /= np.linalg.norm(u)
        # ||A(x - x0)|| <= 2 sqrt(n) ||A||, so this offset keeps b unreachable.
        b = b + 3.0 * np.sqrt(n) * np.linalg.norm(A) * u
    return BoxQP(Q=Q, c=c, A=A, b=b, tol=tol)


def random_boxqp_interior_infeasible(rng, n, m, tol=1e-2):
    """Infeasible instance whose least-squares point is interior to the box.

    A is given rank m-1, so the residual offset lies in null(A'); the
    box-constrained least-squares solution then sits strictly inside the box
    and the bound multipliers stay O(1) instead of O(1/omega).  Keeps traced
    runs inside the regime where binary64 can represent the path margins.
    """
    assert m >= 2
    V = rng.normal(size=(m, m - 1))
    W = rng.normal(size=(m - 1, n))
    A = V @ W
    B = rng.normal(size=(n, n))
    Q = (B.T @ B) / n
    c = rng.normal(size=n)
    x0 = rng.uniform(-0.5, 0.5, size=n)
    # offset in null(A'): unreachable by any x, residual direction fixed
    u = rng.normal(size=m)
    u -= A @ np.linalg.lstsq(A, u, rcond=None)[0]
    u /= np.linalg.norm(u)
    b = A @ x0 + 0.5 * u
    return BoxQP(Q=Q, c=c, A=A, b=b, tol=tol)


def random_standard_with_optimum(rng, n, m):
    """Feasible standard-form instance with a known interior optimum.

    The optimum u* is drawn in (0.1, 0.9)^n; ct is chosen so the objective
    gradient at u* lies in the row space of At, making u* stationary on the
    affine set and hence (being interior to u >= 0) the global optimum.
    """
    B = rng.normal(size=(n, n))
    Qt = B.T @ B / n + 0.5 * np.eye(n)
    At = rng.normal(size=(m, n))
    u_star = rng.uniform(0.1, 0.9, size=n)
    y = rng.normal(size=m)
    ct = At.T @ y - Qt @ u_star
    bt = At @ u_star
    sp = StandardQP(Qt=Qt, ct=ct, At=At, bt=bt)
    return sp, u_star


def random_iterate(rng, n, m):
    """Strictly interior primal-dual point (not on any central path)."""
    from boxipm import Iterate

    return Iterate(
        x=rng.uniform(-0.9, 0.9, size=n),
        lam=rng.normal(size=m),
        mu_l=rng.uniform(0.1, 2.0, size=n),
        mu_r=rng.uniform(0.1, 2.0, size=n),
    )
