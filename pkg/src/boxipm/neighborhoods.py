"""Central-path neighborhood diagnostics.

A point z is in the width-theta neighborhood at parameter tau when its
stationarity/equality residual blocks vanish, its complementarity residual
norm is at most theta*tau, and it is strictly interior; the half-width
variant tightens theta to theta/2.  Exact block-vanishing is unattainable
in floating point, so membership is tested with an ``eq_slack`` allowance:
zero for exact membership, C_dF * nu as the sufficient-condition proxy for
membership in the nu-envelope of the exact neighborhood.

Classification is a pure diagnostic; it never mutates iterates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidProblem
from .kkt import Iterate, eval_F
from .problem import BoxQP


@dataclass(frozen=True)
class NeighborhoodReport:
    """Membership diagnostics for one iterate at one tau."""

    tau: float
    eq_residual: float
    comp_residual: float
    interior_margin: float
    in_N: bool
    in_Nh: bool
    in_F: bool


def classify(p: BoxQP, mp, z: Iterate, tau: float, eq_slack: float = 0.0) -> NeighborhoodReport:
    """Classify z against the width-theta and half-width neighborhoods at tau.

    Parameters
    ----------
    eq_slack : float
        Allowed 2-norm of the (r1, r2) blocks, and extra allowance on the
        complementarity bound.  Use 0 for exact membership and C_dF * nu as
        the envelope proxy at radius nu.
    """
    if eq_slack < 0.0:
        raise InvalidProblem(f"eq_slack must be nonnegative, got {eq_slack!r}")
    F = eval_F(p, mp, z, tau)
    eq = F.eq_norm
    comp = F.comp_norm
    margin = z.interior_margin()
    interior = margin > 0.0
    in_n = interior and eq <= eq_slack and comp <= mp.theta * tau + eq_slack
    in_nh = interior and eq <= eq_slack and comp <= 0.5 * mp.theta * tau + eq_slack
    in_f = margin >= mp.c_gap
    return NeighborhoodReport(
        tau=float(tau),
        eq_residual=eq,
        comp_residual=comp,
        interior_margin=margin,
        in_N=in_n,
        in_Nh=in_nh,
        in_F=in_f,
    )


def complementarity_gap(z: Iterate) -> float:
    """mu_l'(e + x) + mu_r'(e - x); bounded by 2n(1+theta)tau on the path
    neighborhood, which certifies the optimality gap."""
    return float(z.mu_l @ (1.0 + z.x) + z.mu_r @ (1.0 - z.x))


def min_comp_product(z: Iterate) -> float:
    """Smallest componentwise complementarity product.

    min_j of (1 + x_j) mu_l_j and (1 - x_j) mu_r_j; at least (1-theta)*tau
    for points in the width-theta neighborhood.
    """
    prods_l = (1.0 + z.x) * z.mu_l
    prods_r = (1.0 - z.x) * z.mu_r
    return float(min(prods_l.min(initial=np.inf), prods_r.min(initial=np.inf)))
