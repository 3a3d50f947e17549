"""Short-step interior-point solver.

Three phases:

1. Primal initialization: exactly K full Newton steps on the barrier f
   from the origin, landing within gradient norm rho of its minimizer.
2. Lift: close the dual variables in closed form, then one error-reset
   Newton step to zero the stationarity/equality residual blocks.
3. Path following: at most M cycles.  Each cycle reduces tau by the factor
   sigma with a path step; in ``stable`` mode a centrality step (same tau)
   and an error-reset step follow, so rounding errors cannot accumulate
   across cycles.  ``fast`` mode solves one system per cycle instead of
   three and is appropriate when stability is not a concern.

Every step enforces the per-step contraction guarantee at runtime and
rejects (never damps) on failure.  The returned solution x satisfies
``||x||_inf < 1``, an objective within tol of the best attainable, and an
equality residual within tol of the box-minimal one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InvalidProblem,
    IterationBudgetExceeded,
    PrimalInitFailed,
    StepRejected,
)
from .kkt import Iterate, Residual, eval_DF, eval_F, eval_grad_f, eval_hess_f
from .linalg import EPS_MACH, QRFactor
from .neighborhoods import complementarity_gap
from .params import MethodParams, compute_params, compute_params_practical
from .problem import (
    BoxQP,
    StandardQP,
    eval_q,
    grow_pi_schedule,
    residual_norm,
    transform_standard,
)

MODE_STABLE = "stable"
MODE_FAST = "fast"
PARAMS_STRICT = "strict"
PARAMS_PRACTICAL = "practical"

# Relative roundoff grace applied to the per-step contraction checks and to
# the final tau <= tau_E comparison.
COMP_CHECK_RTOL = 1e-6
TAU_END_RTOL = 1e-10

# Largest representable strictly-interior coordinate.  Newton targets with a
# smaller distance to the box faces than one ulp round onto the boundary, so
# updates are snapped back inside; on degenerate instances the exact path
# margin tau/mu drops below this spacing long before tau_E.
_X_MAX = float(np.nextafter(1.0, 0.0))

STEP_PRIMAL = "primal"
STEP_LIFT = "lift"
STEP_PATH = "path"
STEP_CENTRALITY = "centrality"
STEP_ERROR_RESET = "error_reset"

TRACE_FIELDS = (
    "k",
    "tau",
    "step_kind",
    "residual_comp",
    "residual_eq",
    "cond_DF",
    "step_norm",
    "interior_margin",
    "comp_gap",
    "z_norm",
    "newton_dot",
)

_COND_ITERS = 24


@dataclass(frozen=True)
class TraceEntry:
    """One row per Newton step (plus one for the lift).

    For primal rows, residual_eq holds ||grad f(x_k)|| and the complementarity
    fields are NaN; for primal-dual rows the residuals are the post-step
    blocks of F at the row's tau, cond_DF is the condition estimate of the
    system actually factored, newton_dot is dx'(dmu_l - dmu_r) on path steps
    and NaN elsewhere.
    """

    k: int
    tau: float
    step_kind: str
    residual_comp: float
    residual_eq: float
    cond_DF: float
    step_norm: float
    interior_margin: float
    comp_gap: float
    z_norm: float
    newton_dot: float


@dataclass
class SolveReport:
    """Solver output: the solution, its certificates, and the run record."""

    x: np.ndarray
    objective: float
    feas_residual: float
    tau_final: float
    iterations_primal: int
    iterations_pd: int
    mode: str
    params: MethodParams
    trace: list[TraceEntry] = field(default_factory=list)
    linear_solves: int = 0


@dataclass(frozen=True)
class _StepInfo:
    step_norm: float
    newton_dot: float
    cond: float
    post: Residual


def _split(dz: np.ndarray, n: int, m: int):
    return dz[:n], dz[n : n + m], dz[n + m : 2 * n + m], dz[2 * n + m :]


def _advance(z: Iterate, dz: np.ndarray, tau: float) -> Iterate:
    """Apply a full Newton update, snapping to the representable interior.

    x is clipped to |x_j| <= nextafter(1, 0); a mu component driven
    nonpositive by rounding at one-ulp margins is reset to its central-path
    value tau/(1 +- x_j).  Both repairs are within the practical envelope.
    """
    dx, dlam, dmu_l, dmu_r = _split(dz, z.n, z.m)
    x = np.clip(z.x + dx, -_X_MAX, _X_MAX)
    mu_l = z.mu_l + dmu_l
    mu_r = z.mu_r + dmu_r
    bad = mu_l <= 0.0
    if bad.any():
        mu_l = np.where(bad, tau / (1.0 + x), mu_l)
    bad = mu_r <= 0.0
    if bad.any():
        mu_r = np.where(bad, tau / (1.0 - x), mu_r)
    return Iterate(x=x, lam=z.lam + dlam, mu_l=mu_l, mu_r=mu_r)


def _newton_pd(
    p: BoxQP,
    mp: MethodParams,
    z: Iterate,
    tau: float,
    reset_only: bool,
    counter: list | None = None,
    want_cond: bool = False,
) -> tuple[Iterate, _StepInfo]:
    """One primal-dual Newton step on F_tau at z.

    ``reset_only`` zeroes the complementarity blocks of the right-hand side,
    which by linearity cancels the stationarity/equality residuals exactly.
    """
    F = eval_F(p, mp, z, tau)
    if reset_only:
        rhs = -np.concatenate([F.r1, F.r2, np.zeros(p.n), np.zeros(p.n)])
    else:
        rhs = -F.as_array()
    J = eval_DF(p, mp, z)
    # Exact-zero pivot guard: near tau_E the a-priori conditioning bound
    # kappa_DF exceeds 1/(dim*eps), so the relative pivot test would misflag
    # theory-valid systems as singular.
    fac = QRFactor(J, pivot_tol=0.0)
    dz = fac.solve(rhs)
    if counter is not None:
        counter[0] += 1
    if not np.all(np.isfinite(dz)):
        raise StepRejected("Newton step produced non-finite components")
    z_new = _advance(z, dz, tau)
    dx, _, dmu_l, dmu_r = _split(dz, p.n, p.m)
    cond = fac.cond_estimate(J, iters=_COND_ITERS) if want_cond else math.nan
    info = _StepInfo(
        step_norm=float(np.linalg.norm(dz)),
        newton_dot=float(dx @ (dmu_l - dmu_r)),
        cond=cond,
        post=eval_F(p, mp, z_new, tau),
    )
    return z_new, info


def _require(ok: bool, kind: str, detail: str):
    if not ok:
        raise StepRejected(f"{kind} step failed its post-check: {detail}")


def _check_comp(kind: str, post: Residual, bound: float, slack: float):
    limit = bound * (1.0 + COMP_CHECK_RTOL) + slack
    _require(
        post.comp_norm <= limit,
        kind,
        f"comp residual {post.comp_norm!r} > {limit!r}",
    )


def _reset_bound(mp: MethodParams) -> float:
    return 100.0 * mp.N * EPS_MACH * mp.C_DF * mp.C_z


def primal_init(p: BoxQP, mp: MethodParams) -> np.ndarray:
    """Run exactly K full Newton steps on f from the origin.

    Returns x_K with ||grad f(x_K)|| <= rho and ||x_K||_2 <= 0.5; raises
    PrimalInitFailed when rounding prevents either guarantee (the precision
    budget is too small for this instance).
    """
    x, _, _ = _primal_phase(p, mp)
    return x


def _primal_phase(p: BoxQP, mp: MethodParams, counter=None, recorder=None):
    x = np.zeros(p.n)
    for k in range(1, mp.K + 1):
        grad = eval_grad_f(p, mp, x)
        hess = eval_hess_f(p, mp, x)
        fac = QRFactor(hess)  # provably well conditioned: I <= hess <= C_Hf I
        dx = fac.solve(-grad)
        if counter is not None:
            counter[0] += 1
        x = x + dx
        if recorder is not None:
            recorder(k, x, float(np.linalg.norm(dx)), fac, hess)
    gnorm = float(np.linalg.norm(eval_grad_f(p, mp, x)))
    if gnorm > mp.rho:
        raise PrimalInitFailed(
            f"||grad f(x_K)|| = {gnorm!r} exceeds rho = {mp.rho!r} after K = {mp.K} steps"
        )
    xnorm = float(np.linalg.norm(x))
    if xnorm > 0.5:
        raise PrimalInitFailed(f"||x_K||_2 = {xnorm!r} exceeds 0.5")
    return x, gnorm, xnorm


def lift(p: BoxQP, mp: MethodParams, xk) -> Iterate:
    """Close the dual variables of an approximate barrier minimizer.

    lam = -(A x - b)/omega, mu_l = tau_A/(e + x), mu_r = tau_A/(e - x);
    the equality and complementarity blocks of F_{tau_A} vanish to roundoff
    at the result.
    """
    xk = np.asarray(xk, dtype=np.float64)
    return Iterate(
        x=xk,
        lam=-(p.A @ xk - p.b) / mp.omega,
        mu_l=mp.tau_A / (1.0 + xk),
        mu_r=mp.tau_A / (1.0 - xk),
    )


def error_reset_step(p: BoxQP, mp: MethodParams, z: Iterate, tau: float) -> Iterate:
    """Newton step whose right-hand side zeroes only the (r1, r2) blocks.

    By linearity the new stationarity/equality residuals vanish to roundoff;
    the post-check enforces ||(r1, r2)|| <= 100 N eps C_DF C_z.
    """
    z_new, info = _newton_pd(p, mp, z, tau, reset_only=True)
    bound = _reset_bound(mp)
    _require(
        info.post.eq_norm <= bound,
        STEP_ERROR_RESET,
        f"eq residual {info.post.eq_norm!r} > {bound!r}",
    )
    return z_new


def path_step(
    p: BoxQP, mp: MethodParams, z: Iterate, tau: float, slack: float | None = None
) -> tuple[Iterate, float]:
    """Newton step on F at the reduced parameter tau_hat = sigma * tau.

    Returns (new iterate, tau_hat).  Post-checks: complementarity residual
    at most theta * tau_hat (plus envelope slack) and strict interiority.
    """
    if slack is None:
        slack = mp.C_dF * mp.nu_1
    tau_hat = mp.sigma * tau
    z_new, info = _newton_pd(p, mp, z, tau_hat, reset_only=False)
    _check_comp(STEP_PATH, info.post, mp.theta * tau_hat, slack)
    return z_new, tau_hat


def centrality_step(
    p: BoxQP, mp: MethodParams, z: Iterate, tau: float, slack: float | None = None
) -> Iterate:
    """Newton step on F at unchanged tau; halves the neighborhood width."""
    if slack is None:
        slack = mp.C_dF * mp.nu_2
    z_new, info = _newton_pd(p, mp, z, tau, reset_only=False)
    _check_comp(STEP_CENTRALITY, info.post, 0.5 * mp.theta * tau, slack)
    return z_new


def solve(
    p: BoxQP,
    mode: str = MODE_STABLE,
    params_mode: str = PARAMS_PRACTICAL,
    collect_trace: bool = False,
) -> SolveReport:
    """Solve a box-constrained QP instance end to end.

    Parameters
    ----------
    mode : {"stable", "fast"}
        ``stable`` performs the path, centrality and error-reset solves each
        cycle (3 linear systems); ``fast`` performs the path solve only.
    params_mode : {"strict", "practical"}
        Strict uses the pure theoretical parameter cascade (may raise
        ParamOverflow); practical applies representability floors and always
        runs.
    collect_trace : bool
        Record one TraceEntry per step, including condition estimates of
        every factored system (slower).

    Returns
    -------
    SolveReport
        With x strictly interior, ``objective`` within tol of the best
        attainable value and ``feas_residual`` within tol of the box-minimal
        equality residual.
    """
    if mode not in (MODE_STABLE, MODE_FAST):
        raise InvalidProblem(f"unknown mode {mode!r}")
    if params_mode not in (PARAMS_STRICT, PARAMS_PRACTICAL):
        raise InvalidProblem(f"unknown params mode {params_mode!r}")
    mp = compute_params(p) if params_mode == PARAMS_STRICT else compute_params_practical(p)

    trace: list[TraceEntry] = []
    counter = [0]
    want_cond = collect_trace
    step_index = [0]

    def pd_row(kind: str, z: Iterate, tau: float, info: _StepInfo | None, post: Residual, dot_ok=False):
        step_index[0] += 1
        trace.append(
            TraceEntry(
                k=step_index[0],
                tau=tau,
                step_kind=kind,
                residual_comp=post.comp_norm,
                residual_eq=post.eq_norm,
                cond_DF=info.cond if info is not None else math.nan,
                step_norm=info.step_norm if info is not None else math.nan,
                interior_margin=z.interior_margin(),
                comp_gap=complementarity_gap(z),
                z_norm=float(np.linalg.norm(z.as_array())),
                newton_dot=info.newton_dot if (info is not None and dot_ok) else math.nan,
            )
        )

    # --- primal phase ---
    recorder = None
    if collect_trace:

        def recorder(k, xk, dxnorm, fac, hess):
            step_index[0] += 1
            trace.append(
                TraceEntry(
                    k=step_index[0],
                    tau=mp.tau_A,
                    step_kind=STEP_PRIMAL,
                    residual_comp=math.nan,
                    residual_eq=float(np.linalg.norm(eval_grad_f(p, mp, xk))),
                    cond_DF=fac.cond_estimate(hess, iters=_COND_ITERS),
                    step_norm=dxnorm,
                    interior_margin=float(1.0 - np.abs(xk).max(initial=0.0)),
                    comp_gap=math.nan,
                    z_norm=math.nan,
                    newton_dot=math.nan,
                )
            )

    x_k, _, _ = _primal_phase(p, mp, counter=counter, recorder=recorder)

    # --- lift and initial error reset ---
    z_lift = lift(p, mp, x_k)
    z, info = _newton_pd(p, mp, z_lift, mp.tau_A, reset_only=True, counter=counter, want_cond=want_cond)
    _require(
        info.post.eq_norm <= _reset_bound(mp),
        STEP_ERROR_RESET,
        f"eq residual {info.post.eq_norm!r} > {_reset_bound(mp)!r}",
    )
    if collect_trace:
        # The init reset factors DF at the lift point, so its condition
        # estimate belongs to the lift row as well.
        F_lift = eval_F(p, mp, z_lift, mp.tau_A)
        step_index[0] += 1
        trace.append(
            TraceEntry(
                k=step_index[0], tau=mp.tau_A, step_kind=STEP_LIFT,
                residual_comp=F_lift.comp_norm, residual_eq=F_lift.eq_norm,
                cond_DF=info.cond, step_norm=math.nan,
                interior_margin=z_lift.interior_margin(),
                comp_gap=complementarity_gap(z_lift),
                z_norm=float(np.linalg.norm(z_lift.as_array())),
                newton_dot=math.nan,
            )
        )
        pd_row(STEP_ERROR_RESET, z, mp.tau_A, info, info.post)

    # --- path following ---
    strict_fast = mode == MODE_FAST and params_mode == PARAMS_STRICT
    slack_path = 0.0 if strict_fast else mp.C_dF * mp.nu_1
    slack_cent = mp.C_dF * mp.nu_2
    tau = mp.tau_A
    cycles = 0
    for _ in range(mp.M):
        tau_hat = mp.sigma * tau
        z, info = _newton_pd(p, mp, z, tau_hat, reset_only=False, counter=counter, want_cond=want_cond)
        _check_comp(STEP_PATH, info.post, mp.theta * tau_hat, slack_path)
        if collect_trace:
            pd_row(STEP_PATH, z, tau_hat, info, info.post, dot_ok=True)
        if mode == MODE_STABLE:
            z, info = _newton_pd(p, mp, z, tau_hat, reset_only=False, counter=counter, want_cond=want_cond)
            _check_comp(STEP_CENTRALITY, info.post, 0.5 * mp.theta * tau_hat, slack_cent)
            if collect_trace:
                pd_row(STEP_CENTRALITY, z, tau_hat, info, info.post)
            z, info = _newton_pd(p, mp, z, tau_hat, reset_only=True, counter=counter, want_cond=want_cond)
            _require(
                info.post.eq_norm <= _reset_bound(mp),
                STEP_ERROR_RESET,
                f"eq residual {info.post.eq_norm!r} > {_reset_bound(mp)!r}",
            )
            if collect_trace:
                pd_row(STEP_ERROR_RESET, z, tau_hat, info, info.post)
        tau = tau_hat
        cycles += 1
        if tau <= mp.tau_E:
            break
    if tau > mp.tau_E * (1.0 + TAU_END_RTOL):
        raise IterationBudgetExceeded(
            f"tau = {tau!r} still above tau_E = {mp.tau_E!r} after M = {mp.M} cycles"
        )

    return SolveReport(
        x=z.x.copy(),
        objective=eval_q(p, z.x),
        feas_residual=residual_norm(p, z.x),
        tau_final=tau,
        iterations_primal=mp.K,
        iterations_pd=cycles,
        mode=mode,
        params=mp,
        trace=trace,
        linear_solves=counter[0],
    )


# Accept a trial scaling bound once every solution coordinate stays clear of
# the right box faces (standard-form coordinates have no upper bound, so only
# the +1 faces matter).
PI_ACCEPT_MARGIN = 0.9


@dataclass
class StandardReport:
    """Solution of a standard-form CQP in its original coordinates."""

    x: np.ndarray
    objective: float
    feas_residual: float
    pi: float
    trials: int
    box_report: SolveReport


def solve_standard(
    sp: StandardQP,
    tol: float,
    pi: float | str = "auto",
    mode: str = MODE_STABLE,
    params_mode: str = PARAMS_PRACTICAL,
    pi_start: float = 1.0,
    pi_cap: float = 1e100,
    collect_trace: bool = False,
) -> StandardReport:
    """Solve a standard-form CQP by rescaling into the box.

    With ``pi="auto"``, trial bounds grow geometrically from ``pi_start``
    until the box solution satisfies max_j x_j < 0.9 (the scaling is then
    demonstrably large enough) or the cap is hit (PiCapExceeded).
    """

    def run(pi_val: float) -> tuple[SolveReport, np.ndarray]:
        box, back = transform_standard(sp, pi_val, tol)
        rep = solve(box, mode=mode, params_mode=params_mode, collect_trace=collect_trace)
        return rep, back(rep.x)

    if pi == "auto":
        trials = 0
        for pi_val in grow_pi_schedule(pi_start, cap=pi_cap):
            trials += 1
            rep, u = run(pi_val)
            if float(rep.x.max(initial=-1.0)) < PI_ACCEPT_MARGIN:
                break
        # grow_pi_schedule raises PiCapExceeded when exhausted, so reaching
        # here means the trial was accepted.
    else:
        pi_val = float(pi)
        trials = 1
        rep, u = run(pi_val)

    return StandardReport(
        x=u,
        objective=sp.objective(u),
        feas_residual=float(np.linalg.norm(sp.At @ u - sp.bt)),
        pi=pi_val,
        trials=trials,
        box_report=rep,
    )
