"""Method-parameter cascade computed once from (Q, c, A, b, tol).

Every scalar the solver consumes — neighborhood width theta, the
complementarity reduction factor sigma, the path endpoints tau_A/tau_E,
conditioning and boundedness constants, envelope radii nu_0/nu_1/nu_2, and
the iteration counts K and M — derives from the problem data through a
fixed chain of inequalities.  Each chained quantity is nudged one unit in
the last place in its conservative direction after evaluation, so the
emitted record satisfies every inequality verbatim when re-evaluated.

Two variants exist:

* :func:`compute_params` (strict):  the pure theoretical cascade.  For most
  instances at small tol its envelope radii demand precision below binary64
  and the cascade leaves the representable range; that raises ParamOverflow.
* :func:`compute_params_practical`:  identical formulas with floors on the
  envelope radii, tau_E, the interiority gap, and the primal target rho, so
  the record is always representable and the solver always runs.  The loop
  structure is unchanged; only the diagnostic slacks are relaxed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import ParamOverflow
from .linalg import norm2_upper
from .problem import BoxQP

THETA_DEFAULT = 0.3
BETA_DEFAULT = 0.3
C_HF_DEFAULT = 10.0

# Practical-mode floors (see module docstring).
TAU_E_FLOOR = 1e-12
C_GAP_FLOOR = 1e-14
NU_FLOOR_FACTOR = 1e-13  # times C_z
RHO_FLOOR = 1e-12


def _up(v: float) -> float:
    return float(np.nextafter(v, np.inf))


def _down(v: float) -> float:
    return float(np.nextafter(v, -np.inf))


@dataclass(frozen=True)
class MethodParams:
    """The full scalar cascade plus derived bounds.

    Scalars named C_* are a-priori bounds (norms of iterates, Jacobians,
    residuals, sensitivities); nu_* are envelope radii around the exact
    central-path neighborhoods; K and M are the primal and path-following
    iteration counts.  ``floors_applied`` names the practical-mode floors
    that were active (empty for a strict record).
    """

    theta: float
    beta: float
    sigma: float
    N: int
    C_Hf: float
    C_q: float
    omega: float
    C_lambda: float
    C_dmu: float
    tau_A: float
    tau_E: float
    C_mu: float
    C_z: float
    c_gap: float
    C_DF: float
    C_DFinv: float
    kappa_DF: float
    C_dF: float
    C_dDF: float
    C_ddz: float
    C_nu: float
    nu_2: float
    nu_1: float
    nu_0: float
    rho: float
    K: int
    M: int
    C_Df: float
    C_F: float
    C_dz: float
    C_x: float
    floors_applied: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        out = {}
        for f in fields(self):
            if f.name == "floors_applied":
                continue
            out[f.name] = getattr(self, f.name)
        return out


def iteration_count_primal(C_Hf: float, rho: float) -> int:
    """Closed form K = ceil(log2(1 + log2(C_Hf / rho)))."""
    return math.ceil(math.log2(1.0 + math.log2(C_Hf / rho)))


def iteration_count_pd(tau_A: float, tau_E: float, sigma: float) -> int:
    """Closed form M = ceil((log tau_E - log tau_A) / log sigma)."""
    return math.ceil((math.log(tau_E) - math.log(tau_A)) / math.log(sigma))


def _cascade(p: BoxQP, practical: bool) -> MethodParams:
    n, m = p.n, p.m
    tol = p.tol
    sqrt_n = math.sqrt(n)
    norm_Q = norm2_upper(p.Q)
    norm_A = norm2_upper(p.A)
    norm_c = float(np.linalg.norm(p.c))
    norm_b = float(np.linalg.norm(p.b))
    floors: list[str] = []

    def floored(name: str, value: float, floor: float) -> float:
        if practical and value < floor:
            floors.append(name)
            return floor
        return value

    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        theta = THETA_DEFAULT
        beta = BETA_DEFAULT
        sigma = _up(1.0 - beta / math.sqrt(2.0 * n))
        if not sigma < 1.0:  # beta/sqrt(2n) below one ulp of 1
            raise ParamOverflow(f"reduction factor rounded to 1 at n = {n}")
        N = 3 * n + m
        C_Hf = C_HF_DEFAULT
        C_q = _up(norm_Q * n + norm_c * sqrt_n)
        omega = _down(min(tol / (2.0 * n), tol * tol / (4.0 * C_q + n) / 16.0, 1.0))
        C_lambda = _up((norm_A * sqrt_n + norm_b) / omega)
        C_dmu = _up((omega + norm_Q) * sqrt_n + norm_c + norm_A * C_lambda)
        reg_hess = p.Q + omega * np.eye(n) + (p.A.T @ p.A) / omega
        tau_A = _up(
            max(
                norm2_upper(reg_hess) / 4.0,
                4.0 * float(np.linalg.norm(p.c - (p.A.T @ p.b) / omega)),
            )
        )
        # max{.,1} guards the all-zero-data case; smaller tau_E is the
        # conservative direction.  The sigma*tau_A cap keeps tau_E below the
        # path start even for tol >~ 1, and wins over the practical floor.
        tau_E_cap = _down(sigma * tau_A)
        tau_E = _down(
            min(tol * tol * omega / (48.0 * n * max(norm_A, C_q, 1.0)), tau_E_cap)
        )
        tau_E = min(floored("tau_E", tau_E, TAU_E_FLOOR), tau_E_cap)
        C_mu = _up(math.sqrt(2.0 * n) * (C_dmu + (1.0 + theta) * tau_A))
        # hypot form of sqrt(n + C_lambda^2 + C_mu^2): no overflow on squaring
        C_z = _up(float(np.hypot(np.hypot(sqrt_n, C_lambda), C_mu)) + 0.1)
        c_gap = _down((1.0 - theta) / (1.0 + C_z) * sigma * tau_E * 0.5)
        c_gap = floored("c_gap", c_gap, C_GAP_FLOOR)
        C_DF = _up(norm_Q + 2.0 * omega + 2.0 * norm_A + 4.0 + 4.0 * C_z)
        C_DFinv = _up(1.0 / c_gap * max(1.0 / omega, C_z / c_gap))
        kappa_DF = _up(C_DF * C_DFinv)
        C_dF = C_DF
        C_dDF = 2.0
        C_ddz = _up(2.0 * kappa_DF)
        C_nu = _up(
            max(
                2.0 * C_ddz * (C_dF * C_DFinv + 2.0 / omega * C_dDF * C_z),
                1.0 + C_DFinv * C_dF,
            )
        )
        nu_floor = NU_FLOOR_FACTOR * C_z
        nu_2 = _down(
            min(
                0.1,
                c_gap / C_nu,
                omega / (2.0 * C_dDF * kappa_DF),
                theta * sigma * tau_E / (2.0 * C_nu * C_dF),
            )
        )
        nu_2 = floored("nu_2", nu_2, nu_floor)
        nu_1 = floored("nu_1", _down(nu_2 / C_nu), nu_floor)
        nu_0_cap = tol / (2.0 * max(norm_A, C_q)) if max(norm_A, C_q) > 0.0 else math.inf
        nu_0 = floored("nu_0", _down(min(nu_1 / C_nu, nu_0_cap)), nu_floor)
        rho = _down(
            1.0 / (4.0 * math.sqrt(N)) * nu_2 / (norm_A / omega + 1.0 + 8.0 * tau_A)
        )
        rho = floored("rho", rho, RHO_FLOOR)
        C_Df = _up(
            (omega + norm_Q + (norm_A * norm_A + norm_b) / omega) / tau_A + 4.0 * sqrt_n
        )
        C_F = _up(C_DF * C_z + norm_c + norm_b + 2.0 * sqrt_n * tau_A)
        C_dz = _up(C_DFinv * C_F)
        C_x = sqrt_n

    positives = {
        "sigma": sigma, "C_q": C_q, "omega": omega, "tau_A": tau_A, "tau_E": tau_E,
        "C_z": C_z, "c_gap": c_gap, "C_DF": C_DF, "C_DFinv": C_DFinv,
        "kappa_DF": kappa_DF, "C_ddz": C_ddz, "C_nu": C_nu, "nu_2": nu_2,
        "nu_1": nu_1, "nu_0": nu_0, "rho": rho, "C_Df": C_Df, "C_F": C_F,
        "C_dz": C_dz,
    }
    bad = [k for k, v in positives.items() if not (math.isfinite(v) and v > 0.0)]
    others = {"C_lambda": C_lambda, "C_dmu": C_dmu, "C_mu": C_mu}
    bad += [k for k, v in others.items() if not math.isfinite(v)]
    if bad:
        raise ParamOverflow(
            "cascade left the representable binary64 range at: " + ", ".join(bad)
        )
    if not rho < 1.0:
        raise ParamOverflow(f"rho = {rho!r} must lie in (0, 1)")

    K = iteration_count_primal(C_Hf, rho)
    M = iteration_count_pd(tau_A, tau_E, sigma)
    return MethodParams(
        theta=theta, beta=beta, sigma=sigma, N=N, C_Hf=C_Hf, C_q=C_q, omega=omega,
        C_lambda=C_lambda, C_dmu=C_dmu, tau_A=tau_A, tau_E=tau_E, C_mu=C_mu, C_z=C_z,
        c_gap=c_gap, C_DF=C_DF, C_DFinv=C_DFinv, kappa_DF=kappa_DF, C_dF=C_dF,
        C_dDF=C_dDF, C_ddz=C_ddz, C_nu=C_nu, nu_2=nu_2, nu_1=nu_1, nu_0=nu_0,
        rho=rho, K=K, M=M, C_Df=C_Df, C_F=C_F, C_dz=C_dz, C_x=C_x,
        floors_applied=tuple(floors),
    )


def compute_params(p: BoxQP) -> MethodParams:
    """Strict theoretical cascade; raises ParamOverflow when unrepresentable."""
    return _cascade(p, practical=False)


def compute_params_practical(p: BoxQP) -> MethodParams:
    """Cascade with representability floors; always emits a usable record."""
    return _cascade(p, practical=True)


def validate_params(mp: MethodParams, p: BoxQP) -> list[str]:
    """Re-evaluate every cascade right-hand side against the emitted record.

    Returns a list of violated inequalities (empty when the record is
    consistent).  Quantities raised by a practical-mode floor are checked
    against max(formula, floor).
    """
    n, m = p.n, p.m
    tol = p.tol
    sqrt_n = math.sqrt(n)
    norm_Q = norm2_upper(p.Q)
    norm_A = norm2_upper(p.A)
    norm_c = float(np.linalg.norm(p.c))
    norm_b = float(np.linalg.norm(p.b))
    floors = set(mp.floors_applied)
    bad: list[str] = []

    def le(name: str, lhs: float, rhs: float, floor: float = 0.0):
        cap = max(rhs, floor) if name in floors else rhs
        if not lhs <= cap:
            bad.append(f"{name}: {lhs!r} > {cap!r}")

    def ge(name: str, lhs: float, rhs: float):
        if not lhs >= rhs:
            bad.append(f"{name}: {lhs!r} < {rhs!r}")

    le("theta", mp.theta, 0.3)
    le("beta", mp.beta, mp.theta)
    ge("sigma", mp.sigma, 1.0 - mp.beta / math.sqrt(2.0 * n))
    if mp.N != 3 * n + m:
        bad.append("N != 3n + m")
    ge("C_Hf", mp.C_Hf, 10.0)
    ge("C_q", mp.C_q, norm_Q * n + norm_c * sqrt_n)
    le("omega", mp.omega, min(tol / (2.0 * n), tol * tol / (4.0 * mp.C_q + n) / 16.0, 1.0))
    ge("C_lambda", mp.C_lambda, (norm_A * sqrt_n + norm_b) / mp.omega)
    ge("C_dmu", mp.C_dmu, (mp.omega + norm_Q) * sqrt_n + norm_c + norm_A * mp.C_lambda)
    reg_hess = p.Q + mp.omega * np.eye(n) + (p.A.T @ p.A) / mp.omega
    ge(
        "tau_A",
        mp.tau_A,
        max(norm2_upper(reg_hess) / 4.0, 4.0 * float(np.linalg.norm(p.c - (p.A.T @ p.b) / mp.omega))),
    )
    le(
        "tau_E",
        mp.tau_E,
        tol * tol * mp.omega / (48.0 * n * max(norm_A, mp.C_q, 1.0)),
        floor=TAU_E_FLOOR,
    )
    ge("C_mu", mp.C_mu, math.sqrt(2.0 * n) * (mp.C_dmu + (1.0 + mp.theta) * mp.tau_A))
    ge("C_z", mp.C_z, float(np.hypot(np.hypot(sqrt_n, mp.C_lambda), mp.C_mu)) + 0.1)
    le(
        "c_gap",
        mp.c_gap,
        (1.0 - mp.theta) / (1.0 + mp.C_z) * mp.sigma * mp.tau_E * 0.5,
        floor=C_GAP_FLOOR,
    )
    ge("C_DF", mp.C_DF, norm_Q + 2.0 * mp.omega + 2.0 * norm_A + 4.0 + 4.0 * mp.C_z)
    ge("C_DFinv", mp.C_DFinv, 1.0 / mp.c_gap * max(1.0 / mp.omega, mp.C_z / mp.c_gap))
    ge("kappa_DF", mp.kappa_DF, mp.C_DF * mp.C_DFinv)
    ge("C_dF", mp.C_dF, mp.C_DF)
    ge("C_dDF", mp.C_dDF, 2.0)
    ge("C_ddz", mp.C_ddz, 2.0 * mp.kappa_DF)
    ge(
        "C_nu",
        mp.C_nu,
        max(
            2.0 * mp.C_ddz * (mp.C_dF * mp.C_DFinv + 2.0 / mp.omega * mp.C_dDF * mp.C_z),
            1.0 + mp.C_DFinv * mp.C_dF,
        ),
    )
    nu_floor = NU_FLOOR_FACTOR * mp.C_z
    le(
        "nu_2",
        mp.nu_2,
        min(
            0.1,
            mp.c_gap / mp.C_nu,
            mp.omega / (2.0 * mp.C_dDF * mp.kappa_DF),
            mp.theta * mp.sigma * mp.tau_E / (2.0 * mp.C_nu * mp.C_dF),
        ),
        floor=nu_floor,
    )
    le("nu_1", mp.nu_1, mp.nu_2 / mp.C_nu, floor=nu_floor)
    nu_0_cap = tol / (2.0 * max(norm_A, mp.C_q)) if max(norm_A, mp.C_q) > 0.0 else math.inf
    le("nu_0", mp.nu_0, min(mp.nu_1 / mp.C_nu, nu_0_cap), floor=nu_floor)
    le(
        "rho",
        mp.rho,
        1.0 / (4.0 * math.sqrt(mp.N)) * mp.nu_2 / (norm_A / mp.omega + 1.0 + 8.0 * mp.tau_A),
        floor=RHO_FLOOR,
    )
    if mp.K != iteration_count_primal(mp.C_Hf, mp.rho):
        bad.append("K != ceil(log2(1 + log2(C_Hf/rho)))")
    if mp.M != iteration_count_pd(mp.tau_A, mp.tau_E, mp.sigma):
        bad.append("M != ceil((log tau_E - log tau_A)/log sigma)")
    ge("C_Df", mp.C_Df, (mp.omega + norm_Q + (norm_A * norm_A + norm_b) / mp.omega) / mp.tau_A + 4.0 * sqrt_n)
    ge("C_F", mp.C_F, mp.C_DF * mp.C_z + norm_c + norm_b + 2.0 * sqrt_n * mp.tau_A)
    ge("C_dz", mp.C_dz, mp.C_DFinv * mp.C_F)

    # Contraction inequalities actually consumed by the step guarantees.
    # The path-step chain carries the 0.36 factor from u.v <= 0.36||u+v||^2.
    if not 0.36 * (mp.beta + mp.theta) ** 2 / (1.0 - mp.theta) <= mp.theta * mp.sigma:
        bad.append("0.36 (beta+theta)^2/(1-theta) > theta*sigma")
    if not mp.theta**2 / (1.0 - mp.theta) <= 0.5 * mp.theta:
        bad.append("theta^2/(1-theta) > theta/2")
    if not 0.0 < mp.sigma < 1.0:
        bad.append("sigma outside (0, 1)")
    if not mp.tau_E < mp.tau_A:
        bad.append("tau_E >= tau_A")
    if not (mp.nu_0 <= mp.nu_1 <= mp.nu_2):
        bad.append("envelope ordering nu_0 <= nu_1 <= nu_2 violated")
    if not (mp.c_gap > 0.0 and mp.K >= 1 and mp.M >= 1):
        bad.append("positivity of c_gap / K >= 1 / M >= 1 violated")
    return bad


def format_params(mp: MethodParams) -> str:
    """One ``name = value`` line per parameter, full precision."""
    lines = []
    for name, value in mp.as_dict().items():
        lines.append(f"{name} = {value!r}")
    if mp.floors_applied:
        lines.append("floors_applied = " + ",".join(mp.floors_applied))
    return "\n".join(lines) + "\n"
