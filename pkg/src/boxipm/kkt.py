"""Primal barrier function, optimality function and its Jacobian.

The primal phase minimizes the regularized penalty-barrier

    f(x) = (1/tau_A) * (q(x) + (omega/2)||x||^2 + ||Ax-b||^2/(2 omega))
           - sum_j [log(1+x_j) + log(1-x_j)],

which is self-concordant, strictly convex, and has its minimizer near the
origin because tau_A is large.  The primal-dual phase drives the optimality
function

    F_tau(z) = ( Qx + omega x + c - A'lam - mu_l + mu_r,
                 Ax - b + omega lam,
                 mu_l*(e+x) - tau e,
                 mu_r*(e-x) - tau e )

to the central path, where z = (x, lam, mu_l, mu_r) has dimension
N = 3n + m.  The Jacobian DF does not depend on tau.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InvalidProblem, OutOfDomain
from .linalg import EPS_MACH, as_vector
from .problem import BoxQP

# Barrier evaluations are rejected this close to the box boundary: the log of
# a smaller margin would round into +/-inf downstream.
DOMAIN_MARGIN = 4.0 * EPS_MACH


@dataclass(frozen=True)
class Iterate:
    """Primal-dual point z = (x, lam, mu_l, mu_r); strictly interior.

    ``||x||_inf < 1`` and ``mu_l, mu_r > 0`` componentwise are enforced at
    construction; instances are immutable.
    """

    x: np.ndarray
    lam: np.ndarray
    mu_l: np.ndarray
    mu_r: np.ndarray

    def __post_init__(self):
        x = as_vector(self.x, name="x")
        n = x.shape[0]
        lam = as_vector(self.lam, name="lam")
        mu_l = as_vector(self.mu_l, dim=n, name="mu_l")
        mu_r = as_vector(self.mu_r, dim=n, name="mu_r")
        if np.abs(x).max(initial=0.0) >= 1.0:
            raise InvalidProblem("iterate violates ||x||_inf < 1")
        if n and (mu_l.min() <= 0.0 or mu_r.min() <= 0.0):
            raise InvalidProblem("iterate violates mu_l, mu_r > 0")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "mu_l", mu_l)
        object.__setattr__(self, "mu_r", mu_r)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def m(self) -> int:
        return self.lam.shape[0]

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.x, self.lam, self.mu_l, self.mu_r])

    @staticmethod
    def from_array(v: np.ndarray, n: int, m: int) -> "Iterate":
        v = as_vector(v, dim=3 * n + m, name="z")
        return Iterate(v[:n], v[n : n + m], v[n + m : 2 * n + m], v[2 * n + m :])

    def interior_margin(self) -> float:
        """min over {1 - |x_j|, mu_l_j, mu_r_j}; positive iff strictly interior."""
        return float(
            min(
                (1.0 - np.abs(self.x)).min(initial=np.inf),
                self.mu_l.min(initial=np.inf),
                self.mu_r.min(initial=np.inf),
            )
        )


@dataclass(frozen=True)
class Residual:
    """Blockwise value of F_tau: stationarity r1 (n), equality r2 (m),
    left/right complementarity r3, r4 (n each)."""

    r1: np.ndarray
    r2: np.ndarray
    r3: np.ndarray
    r4: np.ndarray

    @property
    def eq_norm(self) -> float:
        """2-norm of the stacked (r1, r2) blocks."""
        return float(np.sqrt(self.r1 @ self.r1 + self.r2 @ self.r2))

    @property
    def comp_norm(self) -> float:
        """2-norm of the stacked (r3, r4) blocks."""
        return float(np.sqrt(self.r3 @ self.r3 + self.r4 @ self.r4))

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.r1, self.r2, self.r3, self.r4])


def _interior_x(p: BoxQP, x) -> np.ndarray:
    x = as_vector(x, dim=p.n, name="x")
    if p.n and np.abs(x).max() >= 1.0 - DOMAIN_MARGIN:
        raise OutOfDomain(
            f"barrier evaluation requires ||x||_inf < 1 - 4*eps, got {np.abs(x).max()!r}"
        )
    return x


def eval_f(p: BoxQP, mp, x) -> float:
    """Primal barrier value f(x); raises OutOfDomain near the box boundary."""
    x = _interior_x(p, x)
    r = p.A @ x - p.b
    quad = 0.5 * x @ (p.Q @ x) + p.c @ x + 0.5 * mp.omega * (x @ x) + (r @ r) / (2.0 * mp.omega)
    barrier = np.log1p(x) + np.log1p(-x)
    return float(quad / mp.tau_A - barrier.sum())


def eval_grad_f(p: BoxQP, mp, x) -> np.ndarray:
    """Gradient of f: (Qx + omega x + c + A'(Ax-b)/omega)/tau_A - (1/(e+x) - 1/(e-x))."""
    x = _interior_x(p, x)
    quad = p.Q @ x + mp.omega * x + p.c + (p.A.T @ (p.A @ x - p.b)) / mp.omega
    return quad / mp.tau_A - (1.0 / (1.0 + x) - 1.0 / (1.0 - x))


def eval_hess_f(p: BoxQP, mp, x) -> np.ndarray:
    """Hessian of f: (Q + omega I + A'A/omega)/tau_A + diag((e+x)^-2 + (e-x)^-2).

    Symmetric positive definite on the open box; on ||x||_2 <= 0.5 it
    satisfies I <= hess <= C_Hf * I.
    """
    x = _interior_x(p, x)
    quad = (p.Q + mp.omega * np.eye(p.n) + (p.A.T @ p.A) / mp.omega) / mp.tau_A
    diag = (1.0 + x) ** -2 + (1.0 - x) ** -2
    h = 0.5 * (quad + quad.T)
    h[np.diag_indices(p.n)] += diag
    return h


def eval_F(p: BoxQP, mp, z: Iterate, tau: float) -> Residual:
    """Optimality function F_tau(z), blockwise."""
    if not tau > 0.0:
        raise InvalidProblem(f"tau must be positive, got {tau!r}")
    if z.n != p.n or z.m != p.m:
        raise DimensionError("iterate dimensions do not match the problem")
    x, lam, mu_l, mu_r = z.x, z.lam, z.mu_l, z.mu_r
    r1 = p.Q @ x + mp.omega * x + p.c - p.A.T @ lam - mu_l + mu_r
    r2 = p.A @ x - p.b + mp.omega * lam
    r3 = mu_l * (1.0 + x) - tau
    r4 = mu_r * (1.0 - x) - tau
    return Residual(r1, r2, r3, r4)


def eval_DF(p: BoxQP, mp, z: Iterate) -> np.ndarray:
    """Jacobian of F at z (independent of tau), shape (N, N) with N = 3n + m."""
    if z.n != p.n or z.m != p.m:
        raise DimensionError("iterate dimensions do not match the problem")
    n, m = p.n, p.m
    N = 3 * n + m
    J = np.zeros((N, N))
    i_x = slice(0, n)
    i_l = slice(n, n + m)
    i_ml = slice(n + m, 2 * n + m)
    i_mr = slice(2 * n + m, N)
    J[i_x, i_x] = p.Q + mp.omega * np.eye(n)
    J[i_x, i_l] = -p.A.T
    J[i_x, i_ml] = -np.eye(n)
    J[i_x, i_mr] = np.eye(n)
    J[i_l, i_x] = p.A
    J[i_l, i_l] = mp.omega * np.eye(m)
    J[i_ml, i_x] = np.diag(z.mu_l)
    J[i_ml, i_ml] = np.diag(1.0 + z.x)
    J[i_mr, i_x] = -np.diag(z.mu_r)
    J[i_mr, i_mr] = np.diag(1.0 - z.x)
    return J


def eval_phi(p: BoxQP, mp, x, tau: float) -> float:
    """Penalty-barrier phi_tau(x) whose minimizers trace the central path.

    phi_{tau_A}(x) == tau_A * f(x); as tau -> 0 it approaches the
    regularized objective q_omega(x).
    """
    if not tau > 0.0:
        raise InvalidProblem(f"tau must be positive, got {tau!r}")
    x = _interior_x(p, x)
    r = p.A @ x - p.b
    quad = 0.5 * x @ (p.Q @ x) + p.c @ x + 0.5 * mp.omega * (x @ x) + (r @ r) / (2.0 * mp.omega)
    barrier = np.log1p(x) + np.log1p(-x)
    return float(quad - tau * barrier.sum())
