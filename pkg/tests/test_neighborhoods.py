import numpy as np
import pytest
from numpy.testing import assert_allclose

from boxipm import BoxQP, Iterate, compute_params_practical
from boxipm.neighborhoods import classify, complementarity_gap, min_comp_product

from support import random_boxqp, random_iterate
from test_kkt import make_mp, zeros_problem


class TestClassify:
    def test_pure_barrier_central_point(self):
        p = zeros_problem()
        mp = make_mp()
        tau = 0.7
        z = Iterate(x=[0.0], lam=[0.0], mu_l=[tau], mu_r=[tau])
        rep = classify(p, mp, z, tau)
        assert rep.in_Nh and rep.in_N
        assert rep.eq_residual == 0.0 and rep.comp_residual == 0.0

    def test_boundary_of_width_theta(self):
        # r1..r2 vanish by choosing c = mu_l - mu_r; comp residual hits
        # theta*tau exactly (theta chosen binary-exact), so in_N holds on the
        # boundary while in_Nh fails.
        mp = make_mp(theta=0.25, beta=0.25)
        tau = 1.0
        mu_l = 1.25
        mu_r = tau
        p = BoxQP(Q=np.zeros((1, 1)), c=[mu_l - mu_r], A=np.zeros((1, 1)), b=[0.0], tol=0.1)
        z = Iterate(x=[0.0], lam=[0.0], mu_l=[mu_l], mu_r=[mu_r])
        rep = classify(p, mp, z, tau)
        assert rep.eq_residual == 0.0
        assert rep.comp_residual == mp.theta * tau
        assert rep.in_N and not rep.in_Nh

    def test_interiority_required(self):
        # residuals can be tiny, but a vanishing margin kills membership:
        # drive mu_l towards zero with matching c so blocks 1-2 stay zero.
        mp = make_mp()
        tau = 1e-12  # comp residual ~ 1 >> theta*tau: not in N either way
        p = BoxQP(Q=np.zeros((1, 1)), c=[0.0], A=np.zeros((1, 1)), b=[0.0], tol=0.1)
        z = Iterate(x=[0.0], lam=[0.0], mu_l=[1.0], mu_r=[1.0])
        rep = classify(p, mp, z, tau)
        assert not rep.in_N
        assert rep.interior_margin == 1.0

    def test_slack_loosens_membership(self):
        rng = np.random.default_rng(1)
        p = random_boxqp(rng, 2, 1, tol=1e-2)
        mp = compute_params_practical(p)
        z = random_iterate(rng, 2, 1)
        tau = 1.0
        tight = classify(p, mp, z, tau, eq_slack=0.0)
        loose = classify(p, mp, z, tau, eq_slack=1e12)
        assert loose.in_N and loose.in_Nh
        assert tight.eq_residual == loose.eq_residual

    def test_half_width_implies_full_width(self):
        rng = np.random.default_rng(2)
        p = random_boxqp(rng, 3, 2, tol=1e-2)
        mp = compute_params_practical(p)
        for _ in range(200):
            z = random_iterate(rng, 3, 2)
            tau = float(rng.uniform(1e-6, 10.0))
            slack = float(rng.choice([0.0, 1e-3, 1.0, 1e3]))
            rep = classify(p, mp, z, tau, eq_slack=slack)
            assert (not rep.in_Nh) or rep.in_N

    def test_rejects_negative_slack(self):
        p = zeros_problem()
        mp = make_mp()
        z = Iterate(x=[0.0], lam=[0.0], mu_l=[1.0], mu_r=[1.0])
        with pytest.raises(Exception):
            classify(p, mp, z, 1.0, eq_slack=-1.0)


class TestComplementarityGap:
    def test_central_point(self):
        tau = 0.3
        z = Iterate(x=np.zeros(4), lam=np.zeros(2), mu_l=tau * np.ones(4), mu_r=tau * np.ones(4))
        assert_allclose(complementarity_gap(z), 2 * 4 * tau)

    def test_hand_case(self):
        tau = 0.9
        z = Iterate(x=[0.5], lam=[0.0], mu_l=[2.0 * tau / 3.0], mu_r=[2.0 * tau])
        assert_allclose(complementarity_gap(z), 2.0 * tau)

    def test_neighborhood_bound(self):
        # any point with comp residual <= theta*tau has gap <= 2n(1+theta)tau
        rng = np.random.default_rng(3)
        theta = 0.3
        n = 3
        for _ in range(100):
            tau = float(rng.uniform(0.01, 5.0))
            x = rng.uniform(-0.8, 0.8, n)
            # perturb the central multipliers within the allowed band
            d = rng.uniform(-1.0, 1.0, 2 * n)
            d *= theta * tau / max(np.linalg.norm(d), 1e-12)
            mu_l = (tau + d[:n]) / (1.0 + x)
            mu_r = (tau + d[n:]) / (1.0 - x)
            z = Iterate(x=x, lam=np.zeros(1), mu_l=mu_l, mu_r=mu_r)
            assert complementarity_gap(z) <= 2 * n * (1 + theta) * tau * (1 + 1e-12)


class TestMinCompProduct:
    def test_central_point(self):
        tau = 0.25
        z = Iterate(x=np.zeros(2), lam=np.zeros(1), mu_l=tau * np.ones(2), mu_r=tau * np.ones(2))
        assert_allclose(min_comp_product(z), tau)

    def test_min_selection(self):
        theta, tau = 0.3, 1.0
        z = Iterate(x=[0.0, 0.0], lam=[0.0],
                    mu_l=[(1 - theta) * tau, tau], mu_r=[tau, tau])
        assert_allclose(min_comp_product(z), (1 - theta) * tau)

    def test_lower_bound_inside_neighborhood(self):
        # componentwise |mu (1 +- x) - tau| <= theta tau forces >= (1-theta) tau
        rng = np.random.default_rng(4)
        theta = 0.3
        n = 4
        for _ in range(100):
            tau = float(rng.uniform(0.01, 2.0))
            x = rng.uniform(-0.7, 0.7, n)
            d = rng.uniform(-1.0, 1.0, 2 * n)
            d *= theta * tau / max(np.linalg.norm(d), 1e-12)
            z = Iterate(x=x, lam=np.zeros(1),
                        mu_l=(tau + d[:n]) / (1.0 + x), mu_r=(tau + d[n:]) / (1.0 - x))
            assert min_comp_product(z) >= (1 - theta) * tau * (1 - 1e-12)
