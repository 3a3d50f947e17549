import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.optimize import brentq

from boxipm import (
    BoxQP,
    Iterate,
    PiCapExceeded,
    StandardQP,
    compute_params_practical,
    oracle_min_residual,
    oracle_solve_boxqp,
    solve,
    solve_standard,
)
from boxipm.kkt import eval_F, eval_grad_f
from boxipm.solver import (
    STEP_CENTRALITY,
    STEP_PATH,
    STEP_PRIMAL,
    centrality_step,
    error_reset_step,
    lift,
    path_step,
    primal_init,
)
from support import random_boxqp, random_standard_with_optimum
from test_kkt import make_mp, zeros_problem


class TestPrimalInit:
    def test_zero_data_stays_at_origin(self):
        p = zeros_problem(n=2, m=1, tol=0.1)
        mp = compute_params_practical(p)
        assert_allclose(primal_init(p, mp), np.zeros(2))

    def test_scalar_root_find_oracle(self):
        # minimizer of f solves (omega x + gamma)/tau_A + 2x/(1-x^2) = 0
        gamma = 0.05
        p = BoxQP(Q=[[0.0]], c=[gamma], A=[[0.0]], b=[0.0], tol=0.1)
        mp = compute_params_practical(p)

        def dphi(x):
            return (mp.omega * x + gamma) / mp.tau_A + 2.0 * x / (1.0 - x * x)

        root = brentq(dphi, -0.999, 0.999, xtol=1e-15)
        x_k = primal_init(p, mp)
        assert abs(x_k[0] - root) <= 3.0 * mp.rho + 1e-10

    def test_exactly_k_newton_steps(self):
        rng = np.random.default_rng(1)
        p = random_boxqp(rng, 3, 2, tol=1e-2)
        rep = solve(p, collect_trace=True)
        primal_rows = [e for e in rep.trace if e.step_kind == STEP_PRIMAL]
        assert len(primal_rows) == rep.params.K

    def test_guarantees(self):
        rng = np.random.default_rng(2)
        for _ in range(5):
            p = random_boxqp(rng, int(rng.integers(1, 6)), 2, tol=1e-2)
            mp = compute_params_practical(p)
            x_k = primal_init(p, mp)
            assert np.linalg.norm(eval_grad_f(p, mp, x_k)) <= mp.rho
            assert np.linalg.norm(x_k) <= 0.41 + 3.0 * mp.rho


class TestLift:
    def test_zero_point(self):
        p = zeros_problem(n=2, m=1, tol=0.1)
        mp = compute_params_practical(p)
        z = lift(p, mp, np.zeros(2))
        assert_allclose(z.lam, [0.0])
        assert_allclose(z.mu_l, mp.tau_A * np.ones(2))
        assert_allclose(z.mu_r, mp.tau_A * np.ones(2))

    def test_lambda_formula(self):
        p = BoxQP(Q=np.zeros((1, 1)), c=np.zeros(1), A=[[0.0]], b=[0.7], tol=0.1)
        mp = compute_params_practical(p)
        z = lift(p, mp, np.zeros(1))
        assert_allclose(z.lam, [0.7 / mp.omega], rtol=1e-12)

    def test_mu_formulas_at_half(self):
        p = zeros_problem(n=1, m=1, tol=0.1)
        mp = compute_params_practical(p)
        z = lift(p, mp, np.array([0.5]))
        assert_allclose(z.mu_l, [mp.tau_A / 1.5], rtol=1e-12)
        assert_allclose(z.mu_r, [mp.tau_A / 0.5], rtol=1e-12)


class TestErrorResetStep:
    def test_noop_when_blocks_already_zero(self):
        p = zeros_problem()
        mp = make_mp()
        tau = 0.5
        z = Iterate(x=[0.0], lam=[0.0], mu_l=[tau], mu_r=[tau])
        z2 = error_reset_step(p, mp, z, tau)
        assert_allclose(z2.as_array(), z.as_array(), atol=1e-15)

    def test_restores_equality_block_linearly(self):
        # perturbing lam only enters block 2 linearly, so one reset zeroes it
        p = zeros_problem()
        mp = make_mp()
        tau = 0.5
        z = Iterate(x=[0.0], lam=[0.25], mu_l=[tau], mu_r=[tau])
        z2 = error_reset_step(p, mp, z, tau)
        F = eval_F(p, mp, z2, tau)
        assert abs(F.r2[0]) <= 1e-15

    def test_never_increases_equality_residual(self):
        rng = np.random.default_rng(3)
        p = random_boxqp(rng, 3, 2, tol=1e-2)
        mp = compute_params_practical(p)
        x = primal_init(p, mp)
        z = lift(p, mp, x)
        before = eval_F(p, mp, z, mp.tau_A).eq_norm
        z2 = error_reset_step(p, mp, z, mp.tau_A)
        after = eval_F(p, mp, z2, mp.tau_A).eq_norm
        assert after <= before + 1e-12 * (1.0 + before)


class TestPathStep:
    def test_pure_barrier_hand_solution(self):
        # from the exact central point the step lands exactly on the path at
        # tau_hat: x stays 0, both multipliers become tau_hat
        p = zeros_problem()
        mp = make_mp(omega=1.0, sigma=0.75)
        tau = 1.0
        z = Iterate(x=[0.0], lam=[0.0], mu_l=[tau], mu_r=[tau])
        z2, tau_hat = path_step(p, mp, z, tau)
        assert tau_hat == 0.75
        assert_allclose(z2.x, [0.0], atol=1e-15)
        assert_allclose(z2.mu_l, [tau_hat], rtol=1e-14)
        assert_allclose(z2.mu_r, [tau_hat], rtol=1e-14)

    def test_tau_update_exact(self):
        rng = np.random.default_rng(4)
        p = random_boxqp(rng, 2, 1, tol=1e-2)
        mp = compute_params_practical(p)
        z = lift(p, mp, primal_init(p, mp))
        z = error_reset_step(p, mp, z, mp.tau_A)
        _, tau_hat = path_step(p, mp, z, mp.tau_A)
        assert tau_hat == mp.sigma * mp.tau_A


class TestCentralityStep:
    def test_noop_at_central_point(self):
        p = zeros_problem()
        mp = make_mp()
        tau = 0.5
        z = Iterate(x=[0.0], lam=[0.0], mu_l=[tau], mu_r=[tau])
        z2 = centrality_step(p, mp, z, tau)
        assert_allclose(z2.as_array(), z.as_array(), atol=1e-15)

    def test_halves_width_from_boundary(self):
        # start on the width-theta boundary of a pure-barrier instance
        mp = make_mp(theta=0.25, beta=0.25)
        tau = 1.0
        mu_l = 1.25
        p = BoxQP(Q=np.zeros((1, 1)), c=[0.25], A=np.zeros((1, 1)), b=[0.0], tol=0.1)
        z = Iterate(x=[0.0], lam=[0.0], mu_l=[mu_l], mu_r=[tau])
        before = eval_F(p, mp, z, tau).comp_norm
        z2 = centrality_step(p, mp, z, tau, slack=0.0)
        after = eval_F(p, mp, z2, tau).comp_norm
        assert before == mp.theta * tau
        assert after <= 0.5 * mp.theta * tau
        assert after < before


class TestSolve:
    def test_flat_zero_instance(self):
        p = BoxQP(Q=np.zeros((2, 2)), c=np.zeros(2), A=np.zeros((1, 2)), b=np.zeros(1), tol=0.1)
        rep = solve(p)
        assert np.linalg.norm(rep.x) <= 0.1
        assert abs(rep.objective) <= 1e-12

    def test_clipped_scalar_vs_oracle(self):
        p = BoxQP(Q=[[2.0]], c=[-3.0], A=[[0.0]], b=[0.0], tol=1e-2)
        ref = oracle_solve_boxqp(p)
        rep = solve(p)
        assert abs(rep.x[0]) < 1.0
        assert rep.objective <= ref.objective + p.tol

    def test_infeasible_scalar(self):
        p = BoxQP(Q=[[2.0]], c=[0.0], A=[[1.0]], b=[2.0], tol=1e-2)
        rep = solve(p)
        chi = oracle_min_residual(p)
        assert_allclose(chi, 1.0, rtol=1e-12)
        assert rep.feas_residual <= chi + p.tol
        assert abs(rep.x[0]) < 1.0

    def test_tau_sequence_geometric(self):
        rng = np.random.default_rng(5)
        p = random_boxqp(rng, 2, 1, tol=1e-2)
        rep = solve(p, collect_trace=True)
        mp = rep.params
        taus = [e.tau for e in rep.trace if e.step_kind == STEP_PATH]
        for k, tau in enumerate(taus, start=1):
            assert abs(tau - mp.tau_A * mp.sigma**k) <= 1e-10 * mp.tau_A * mp.sigma**k
        assert rep.tau_final <= mp.tau_E * (1.0 + 1e-10)
        assert rep.iterations_pd == len(taus)
        # the loop never runs past the budget and never steps below sigma*tau_E
        assert rep.iterations_pd <= mp.M
        assert rep.tau_final >= mp.sigma * mp.tau_E * (1.0 - 1e-12)

    def test_solve_counts_by_mode(self):
        rng = np.random.default_rng(6)
        p = random_boxqp(rng, 2, 1, tol=1e-2)
        rs = solve(p, mode="stable")
        rf = solve(p, mode="fast")
        assert rs.linear_solves == rs.params.K + 1 + 3 * rs.iterations_pd
        assert rf.linear_solves == rf.params.K + 1 + 1 * rf.iterations_pd

    def test_strict_params_on_trivial_instance(self):
        # the theoretical cascade is representable (and attainable) only for
        # near-trivial data at large tol; exercises the zero-slack fast path
        p = BoxQP(Q=[[0.0]], c=[0.01], A=[[0.0]], b=[0.0], tol=10.0)
        rep = solve(p, params_mode="strict", mode="fast")
        assert rep.params.floors_applied == ()
        assert abs(rep.x[0]) < 1.0

    def test_unconstrained_m_zero(self):
        p = BoxQP(Q=2.0 * np.eye(2), c=[-3.0, 0.0], A=np.zeros((0, 2)), b=np.zeros(0), tol=1e-2)
        rep = solve(p)
        ref = oracle_solve_boxqp(p)
        assert rep.objective <= ref.objective + p.tol
        assert rep.feas_residual == 0.0

    def test_interiority_throughout(self):
        rng = np.random.default_rng(7)
        p = random_boxqp(rng, 3, 2, feasible=False, tol=1e-2)
        rep = solve(p, collect_trace=True)
        margins = [e.interior_margin for e in rep.trace if e.step_kind != STEP_PRIMAL]
        assert min(margins) > 0.0


@pytest.fixture(scope="module")
def feasible_trace():
    rng = np.random.default_rng(101)
    p = random_boxqp(rng, 2, 1, feasible=True, tol=1e-2)
    return p, solve(p, collect_trace=True)


class TestTraceProperties:
    def test_loop_count_law(self, feasible_trace):
        p, rep = feasible_trace
        mp = rep.params
        ceiling = math.ceil((math.log(mp.tau_E) - math.log(mp.tau_A)) / math.log(mp.sigma))
        assert rep.iterations_pd == min(mp.M, ceiling)

    def test_centrality_strictly_reduces_comp_residual(self, feasible_trace):
        # whenever the incoming residual is above the noise floor
        p, rep = feasible_trace
        rows = [e for e in rep.trace if e.step_kind in (STEP_PATH, STEP_CENTRALITY)]
        checked = 0
        for a, b in zip(rows, rows[1:]):
            if a.step_kind == STEP_PATH and b.step_kind == STEP_CENTRALITY:
                if a.residual_comp > 1e-13 * a.tau:
                    assert b.residual_comp < a.residual_comp
                    checked += 1
        assert checked > 0

    def test_error_reset_pins_eq_residual_to_noise_floor(self, feasible_trace):
        # with a reset every cycle, the equality blocks never climb above
        # linear-solve noise relative to the iterate scale; genuine reductions
        # from perturbed points are covered in TestErrorResetStep
        p, rep = feasible_trace
        for e in rep.trace:
            if e.step_kind != STEP_PRIMAL:
                assert e.residual_eq <= 1e-12 * (1.0 + e.z_norm)

    def test_fast_mode_contracts_without_slack(self, feasible_trace):
        # well-conditioned instance: the path-step guarantee holds with no
        # envelope allowance at all
        p, _ = feasible_trace
        rep = solve(p, mode="fast", collect_trace=True)
        mp = rep.params
        for e in rep.trace:
            if e.step_kind == STEP_PATH:
                assert e.residual_comp <= mp.theta * e.tau * (1.0 + 1e-6)

    def test_min_comp_product_and_gap_along_iterates(self):
        # drive the three-step cycle by hand to see the iterates themselves
        from boxipm.neighborhoods import complementarity_gap, min_comp_product

        rng = np.random.default_rng(55)
        p = random_boxqp(rng, 3, 2, feasible=True, tol=1e-2)
        mp = compute_params_practical(p)
        z = error_reset_step(p, mp, lift(p, mp, primal_init(p, mp)), mp.tau_A)
        tau = mp.tau_A
        for _ in range(60):
            z, tau = path_step(p, mp, z, tau)
            z = centrality_step(p, mp, z, tau)
            z = error_reset_step(p, mp, z, tau)
            assert min_comp_product(z) >= (1.0 - mp.theta - 1e-8) * tau
            assert complementarity_gap(z) <= 2 * p.n * (1 + mp.theta) * tau * (1 + 1e-8)


class TestSolveStandard:
    def test_lp_corner(self):
        sp = StandardQP(Qt=np.zeros((2, 2)), ct=[-1.0, 0.0], At=[[1.0, 1.0]], bt=[1.0])
        rep = solve_standard(sp, tol=1e-3, pi=2.0)
        assert_allclose(rep.x, [1.0, 0.0], atol=1e-2)
        assert rep.feas_residual <= 1e-3

    def test_pi_two_back_map(self):
        rng = np.random.default_rng(8)
        sp, u_star = random_standard_with_optimum(rng, 2, 1)
        rep = solve_standard(sp, tol=1e-3, pi=2.0)
        assert_allclose(rep.x, 0.5 * 2.0 * (rep.box_report.x + 1.0), rtol=1e-12)
        assert rep.objective <= sp.objective(u_star) + 1e-3

    def test_auto_schedule_known_norm(self):
        # x~* = 3 forces trials pi = 1, 2, 4: first accepted bound is 4
        sp = StandardQP(Qt=np.zeros((1, 1)), ct=[0.0], At=[[1.0]], bt=[3.0])
        rep = solve_standard(sp, tol=1e-2, pi="auto")
        assert rep.trials == 3
        assert rep.pi == 4.0
        assert_allclose(rep.x, [3.0], atol=1e-2)

    def test_auto_schedule_cap(self):
        sp = StandardQP(Qt=np.zeros((1, 1)), ct=[0.0], At=[[1.0]], bt=[3.0])
        with pytest.raises(PiCapExceeded):
            solve_standard(sp, tol=1e-2, pi="auto", pi_cap=2.0)
