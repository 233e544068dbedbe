import math

import numpy as np
import pytest

from transferprices.coordinators import (
    GDConfig,
    NesterovState,
    RunResult,
    gd_step,
    nesterov_init,
    nesterov_step,
    run_static,
    solo_init,
    solo_step,
)
from transferprices.divisions import (
    DivisionModel,
    Family,
    QuadProductionParams,
    QuadSalesParams,
    Role,
    regularity_constants,
)
from transferprices.firm import FirmInstance
from transferprices.oracle import dual_bisection_1d, theorem2_bound
from transferprices.scenario import SamplerSpec, ScenarioStream, sample_instance


def _preset(family, d, seed=0, m=15, n=25):
    spec = SamplerSpec(family=family, d=d, m=m, n=n, c=10.0, seed=seed)
    return sample_instance(ScenarioStream(spec))


class TestGDStep:
    def test_scalar_example(self):
        out = gd_step(np.array([2.0]), np.array([4.0]), GDConfig(eta=0.05))
        assert out[0] == pytest.approx(1.8, abs=1e-15)

    def test_zero_gradient_is_fixed_point(self):
        lam = np.array([3.0, -1.0])
        out = gd_step(lam, np.zeros(2), GDConfig(eta=0.7))
        assert np.array_equal(out, lam)

    def test_first_step_from_zero_price(self):
        # 15 sales divisions each buying the full box c=10 gives excess -150
        # in every coordinate.
        out = gd_step(np.zeros(2), np.array([-150.0, -150.0]), GDConfig(eta=0.1))
        assert np.allclose(out, [15.0, 15.0], atol=1e-12)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            GDConfig(eta=0.0)
        with pytest.raises(ValueError):
            GDConfig(eta=-1.0)
        with pytest.raises(ValueError):
            gd_step(np.array([1.0]), np.array([np.inf]), GDConfig(eta=0.1))
        with pytest.raises(ValueError):
            gd_step(np.array([1.0]), np.array([1.0, 2.0]), GDConfig(eta=0.1))


class TestNesterovStep:
    def test_two_step_example(self):
        state = nesterov_init(np.array([0.0]), eta=0.1)
        state = nesterov_step(state, np.array([-5.0]))
        # momentum coefficient (1-1)/(1+2) = 0 on the first step
        assert state.lambda_cur[0] == pytest.approx(0.5, abs=1e-15)
        assert state.mu[0] == pytest.approx(0.5, abs=1e-15)
        assert state.t == 1

        state = nesterov_step(state, np.array([-1.0]))
        assert state.lambda_cur[0] == pytest.approx(0.6, abs=1e-15)
        # mu_2 = 0.6 + (1/4) * (0.6 - 0.5)
        assert state.mu[0] == pytest.approx(0.625, abs=1e-15)
        assert state.t == 2

    def test_zero_gradient_freezes_iterates(self):
        state = nesterov_init(np.array([2.0, 3.0]), eta=0.2)
        for _ in range(5):
            state = nesterov_step(state, np.zeros(2))
            assert np.array_equal(state.lambda_cur, [2.0, 3.0])
            assert np.array_equal(state.mu, [2.0, 3.0])

    def test_initial_state_invariant(self):
        with pytest.raises(ValueError):
            NesterovState(
                lambda_prev=np.zeros(1),
                lambda_cur=np.ones(1),
                mu=np.ones(1),
                t=0,
                eta=0.1,
            )
        with pytest.raises(ValueError):
            nesterov_init(np.array([0.0]), eta=0.0)

    def test_rejects_non_finite_gradient(self):
        state = nesterov_init(np.zeros(1), eta=0.1)
        with pytest.raises(ValueError):
            nesterov_step(state, np.array([np.nan]))


class TestSoloStep:
    def test_first_price_is_negative_unit_gradient(self):
        state, lam = solo_step(solo_init(1), np.array([-5.0]))
        assert lam[0] == pytest.approx(1.0, abs=1e-15)
        assert state.t == 1
        assert state.sq_sum == 25.0

    def test_two_round_history(self):
        state = solo_init(1)
        state, _ = solo_step(state, np.array([-5.0]))
        _, lam = solo_step(state, np.array([3.0]))
        # -(-5 + 3) / sqrt(25 + 9)
        assert lam[0] == pytest.approx(2.0 / math.sqrt(34.0), abs=1e-15)
        assert lam[0] == pytest.approx(0.34299717028501764, abs=1e-16)

    def test_scale_invariance_of_price_sequence(self):
        rng = np.random.default_rng(3)
        grads = rng.normal(size=(12, 3))
        for scale in (10.0, 0.01, 7.3):
            s1, s2 = solo_init(3), solo_init(3)
            for g in grads:
                s1, lam1 = solo_step(s1, g)
                s2, lam2 = solo_step(s2, scale * g)
                assert np.allclose(lam1, lam2, atol=1e-12)

    def test_zero_history_emits_zero_price(self):
        state, lam = solo_step(solo_init(2), np.zeros(2))
        assert np.array_equal(lam, np.zeros(2))
        assert state.sq_sum == 0.0

    def test_rejects_bad_state_and_gradient(self):
        with pytest.raises(ValueError):
            solo_init(0)
        with pytest.raises(ValueError):
            solo_step(solo_init(1), np.array([np.inf]))
        with pytest.raises(ValueError):
            solo_step(solo_init(2), np.array([1.0]))


class TestRunStatic:
    def test_errors(self, tiny_power):
        with pytest.raises(ValueError):
            run_static(tiny_power, "solo", T=0)
        with pytest.raises(ValueError):
            run_static(tiny_power, "adam", T=5)

    def test_solo_single_round_is_unit_price(self):
        # g_0 = excess at zero price = -m*c in every coordinate, so the first
        # emitted price is the negative unit gradient: 1/sqrt(d) per entry.
        for family, d in ((Family.POWER, 1), (Family.QUADRATIC, 2)):
            inst = _preset(family, d, seed=6)
            res = run_static(inst, "solo", T=1)
            assert np.allclose(res.trace.lam[0], 1.0 / math.sqrt(d), atol=1e-12)
            assert res.trace.t[0] == 1
            assert not res.converged

    def test_solo_stops_when_zero_price_is_optimal(self):
        # A sales division with a nonpositive linear term buys nothing at
        # lambda = 0, so there is no trade and the zero price is optimal.
        sales = DivisionModel(
            role=Role.SALES,
            family=Family.QUADRATIC,
            params=QuadSalesParams(a=np.array([-1.0]), A=np.array([[0.5]])),
            c=10.0,
            validate=False,
        )
        production = DivisionModel(
            role=Role.PRODUCTION,
            family=Family.QUADRATIC,
            params=QuadProductionParams(b=np.array([0.0]), B=np.array([[0.5]])),
            c=10.0,
        )
        inst = FirmInstance(d=1, sales=(sales,), production=(production,), c=10.0)
        res = run_static(inst, "solo", T=50)
        assert res.converged
        assert len(res.trace.t) == 1
        assert np.array_equal(res.final_price, np.zeros(1))

    def test_average_price_matches_trace_mean(self):
        inst = _preset(Family.POWER, 1, seed=8, m=4, n=4)
        res = run_static(inst, "gd", T=40)
        assert np.allclose(res.average_price, res.trace.lam.mean(axis=0), atol=0)
        assert np.array_equal(res.final_price, res.trace.lam[-1])

    def test_gd_default_step_converges_on_preset(self):
        inst = _preset(Family.POWER, 1, seed=0)
        sol = dual_bisection_1d(inst, tol=1e-10)
        res = run_static(inst, "gd", T=3000)
        assert abs(res.final_price[0] - sol.lambda_star[0]) < 1e-4
        # the dual values must be non-increasing under the 1/kappa step
        assert np.all(np.diff(res.trace.dual) <= 1e-10)

    def test_nesterov_eval_points_follow_momentum_recursion(self):
        inst = _preset(Family.POWER, 1, seed=1, m=3, n=3)
        res = run_static(inst, "nesterov", T=30)
        lam = res.trace.lam
        mu = res.trace.eval_points
        assert np.array_equal(mu[0], np.zeros(1))  # mu_0 = lambda_0 = 0
        for t in range(2, len(lam) + 1):
            expect = lam[t - 2] + (t - 1 - 1.0) / (t - 1 + 2.0) * (
                lam[t - 2] - (lam[t - 3] if t >= 3 else np.zeros(1))
            )
            assert np.allclose(mu[t - 1], expect, atol=1e-12)

    def test_nesterov_accuracy_bound_every_round(self):
        # G(lambda_t) - G* <= 2 dist^2 / (eta (t+1)^2) when eta <= 1/kappa.
        inst = _preset(Family.POWER, 1, seed=2)
        sol = dual_bisection_1d(inst, tol=1e-10)
        consts = regularity_constants(inst)
        eta = 1.0 / consts.kappa
        res = run_static(inst, "nesterov", T=500, eta=eta)
        dist2 = float(np.sum(sol.lambda_star**2))  # lambda_0 = 0
        t = res.trace.t.astype(float)
        bound = 2.0 * dist2 / (eta * (t + 1.0) ** 2)
        assert np.all(res.trace.dual - sol.G_star <= bound + 1e-8)

    def test_theorem2_matches_manual_bound_formula(self):
        inst = _preset(Family.POWER, 1, seed=2)
        sol = dual_bisection_1d(inst, tol=1e-10)
        consts = regularity_constants(inst)
        eta = 1.0 / consts.kappa
        dist = float(np.linalg.norm(sol.lambda_star))
        t = 17
        primal_rhs, resid_rhs = theorem2_bound(consts, eta, dist, t)
        assert primal_rhs == pytest.approx(
            2.0 * consts.K / math.sqrt(consts.sigma * eta) * dist / (t + 1), rel=1e-15
        )
        assert resid_rhs == pytest.approx(
            2.0 * math.sqrt(consts.kappa / eta) * dist / (t + 1), rel=1e-15
        )

    def test_solo_iterates_respect_price_box(self):
        # every SOLO price sits in [-1, Kprime + 1] coordinate-wise
        for seed in range(5):
            inst = _preset(Family.POWER, 1, seed=seed, m=6, n=9)
            kprime = regularity_constants(inst).Kprime
            res = run_static(inst, "solo", T=400)
            assert res.trace.lam.min() >= -1.0 - 1e-9
            assert res.trace.lam.max() <= kprime + 1.0 + 1e-9

    def test_bitwise_determinism(self):
        inst = _preset(Family.QUADRATIC, 2, seed=10, m=5, n=5)
        for algo in ("gd", "nesterov", "solo"):
            a = run_static(inst, algo, T=60)
            b = run_static(inst, algo, T=60)
            assert np.array_equal(a.trace.lam, b.trace.lam)
            assert np.array_equal(a.trace.dual, b.trace.dual)
            assert np.array_equal(a.trace.excess, b.trace.excess)

    def test_run_result_fields(self, tiny_power):
        res = run_static(tiny_power, "solo", T=10)
        assert isinstance(res, RunResult)
        assert res.realized_kprime is None
        assert res.trace.avg_excess.shape == (10, 1)
