"""Adaptive integration, halting outcomes, and blow-up extrapolation."""

import gmpy2
import pytest

from offshell import (FourVector, ModelParams, Outcome, ScalarState,
                      Trajectory, WorldlineState, blowup_time_estimate,
                      integrate, step_rk45, sweep_D, worldline_from_scalars)
from offshell.errors import ConfigError, FitError
from offshell.integrator import make_rhs
from offshell.numerics import real, sqrt_pos

D1 = ModelParams(D=1)
FAST = dict(eps_cap=25.0, abs_tol=1e-14, rel_tol=1e-14)

BLOWUP_START = ScalarState(real("0.5"), 0, 0, real("-0.1"), 0, 0)
DECAY_START = ScalarState(real("0.5"), real("0.1"))


class TestStepRk45:
    def test_zero_rhs_is_identity(self):
        state = ScalarState(real("0.5")).as_tuple()
        rhs = make_rhs("scalar", D1)
        new, err = step_rk45(state, rhs, real("0.1"))
        assert new == state
        assert err == 0

    def test_linear_decay_local_order(self):
        # y' = -y: the propagated solution is 4th order, local error O(h^5)
        rhs = lambda y: tuple(-v for v in y)
        y0 = (real(1),)
        errors = []
        for k in (4, 5, 6):
            h = real(2) ** -k
            y1, _ = step_rk45(y0, rhs, h, 1e-300, 1e-300)
            errors.append(abs(y1[0] - gmpy2.exp(-h)))
        assert errors[0] / errors[1] == pytest.approx(32, rel=0.15)
        assert errors[1] / errors[2] == pytest.approx(32, rel=0.15)

    def test_matches_exponential(self):
        rhs = lambda y: tuple(-v for v in y)
        y1, _ = step_rk45((real(1),), rhs, real("0.1"))
        assert abs(y1[0] - gmpy2.exp(real("-0.1"))) < real("1e-7")

    def test_self_convergence_on_blowup_start(self):
        rhs = make_rhs("scalar", D1)
        coarse, _ = step_rk45(BLOWUP_START.as_tuple(), rhs, real("0.001"))
        fine = BLOWUP_START.as_tuple()
        h = real("0.000001")
        for _ in range(1000):
            fine, _ = step_rk45(fine, rhs, h)
        for a, b in zip(coarse, fine):
            assert abs(a - b) <= real("1e-12")

    def test_rejects_nonpositive_step(self):
        with pytest.raises(ValueError):
            step_rk45((real(1),), lambda y: y, 0)


class TestIntegrate:
    def test_uniform_motion_stays_put(self):
        p = ModelParams(D=1, tau_max=3.0)
        traj = integrate(ScalarState(real("0.5")), p, record_every=0.5)
        assert traj.outcome is Outcome.TAU_MAX_REACHED
        for _, st in traj.samples:
            assert st == (real("0.5"), 0, 0, 0, 0, 0)

    def test_blowup_run_diverges(self):
        p = ModelParams(D=1, tau_max=5.0, **FAST)
        traj = integrate(BLOWUP_START, p, record_every=0.01)
        assert traj.outcome is Outcome.DIVERGED
        assert traj.blowup_tau is not None
        tau_star = blowup_time_estimate(traj)
        assert real("0.74") < tau_star < real("0.84")

    def test_blowup_final_sign_pattern(self):
        p = ModelParams(D=1, tau_max=5.0, **FAST)
        traj = integrate(BLOWUP_START, p, record_every=0.01)
        s = ScalarState(*traj.samples[-1][1])
        assert s.eps > 0 and s.deps > 0 and s.ddeps > 0
        assert s.rho < 0 and s.drho < 0 and s.eta < 0
        assert abs(s.rho) < s.ddeps / 2

    def test_decay_run_settles(self):
        p = ModelParams(D=1, tau_max=8.0, abs_tol=1e-14, rel_tol=1e-14)
        traj = integrate(DECAY_START, p, record_every=0.1)
        states = traj.scalar_states()
        final_eps = states[-1][1].eps
        assert final_eps < real("0.05")
        quarter = [s for t, s in states if t >= traj.tau_end * 3 / 4]
        for early, late in zip(quarter, quarter[1:]):
            assert late.eps <= early.eps

    def test_self_convergence_at_checkpoints(self):
        for start, tau_max in ((DECAY_START, 1.0), (BLOWUP_START, 0.5)):
            vals = []
            for tol in (1e-14, 5e-15):
                p = ModelParams(D=1, tau_max=tau_max, abs_tol=tol, rel_tol=tol)
                traj = integrate(start, p, record_every=tau_max)
                vals.append(ScalarState(*traj.samples[-1][1]).eps)
            assert abs(vals[0] - vals[1]) < real("1e-13")

    def test_samples_strictly_increasing_from_zero(self):
        p = ModelParams(D=1, tau_max=1.0, abs_tol=1e-14, rel_tol=1e-14)
        traj = integrate(DECAY_START, p, record_every=0.1)
        taus = traj.taus()
        assert taus[0] == 0
        assert all(a < b for a, b in zip(taus, taus[1:]))
        assert traj.samples[-1][0] == traj.tau_end

    def test_vector_form_round_trip(self):
        p = ModelParams(D=1, tau_max=0.3, abs_tol=1e-14, rel_tol=1e-14)
        w0 = worldline_from_scalars(DECAY_START)
        tv = integrate(w0, p, form="vector", record_every=0.1)
        ts = integrate(DECAY_START, p, form="scalar", record_every=0.1)
        sv = tv.scalar_states()[-1][1]
        ss = ScalarState(*ts.samples[-1][1])
        for a, b in zip(sv.as_tuple(), ss.as_tuple()):
            assert abs(a - b) <= real("1e-8") * max(abs(b), real(1))

    def test_config_errors(self):
        with pytest.raises(ConfigError):
            integrate(DECAY_START, D1, form="tensor")
        with pytest.raises(ConfigError):
            integrate(DECAY_START, D1, form="vector")
        with pytest.raises(ConfigError):
            integrate(DECAY_START, D1, record_every=0)


class TestSweepD:
    def test_uniform_motion_never_diverges(self):
        p = ModelParams(D=1, tau_max=1.0)
        results = sweep_D(ScalarState(real("0.5")), ["0.5", "2", "8"], p,
                          record_every=0.5)
        assert [str(d) for d, _, _ in results] == ["0.5", "2", "8"]
        assert all(o is Outcome.TAU_MAX_REACHED for _, o, _ in results)

    def test_rejects_nonpositive_d(self):
        with pytest.raises(ConfigError):
            sweep_D(ScalarState(real("0.5")), [1, 0], D1)


class TestBlowupTimeEstimate:
    def _synthetic(self, eps_of_tau, taus):
        samples = tuple((real(t), (eps_of_tau(real(t)), real(0), real(0),
                                   real(0), real(0), real(0))) for t in taus)
        return Trajectory(form="scalar", samples=samples,
                          outcome=Outcome.DIVERGED, tau_end=samples[-1][0],
                          blowup_tau=samples[-1][0])

    def test_simple_pole(self):
        taus = ["0.999", "0.9993", "0.9996", "0.9998", "0.9999"]
        traj = self._synthetic(lambda t: 1 / (1 - t), taus)
        assert abs(blowup_time_estimate(traj) - 1) < real("1e-20")

    def test_quadratic_pole(self):
        star = real("0.787")
        taus = ["0.7855", "0.786", "0.7862", "0.7864", "0.7865"]
        traj = self._synthetic(lambda t: (star - t) ** -2, taus)
        assert abs(blowup_time_estimate(traj) - star) < real("0.01")

    def test_requires_diverged(self):
        p = ModelParams(D=1, tau_max=1.0)
        traj = integrate(ScalarState(real("0.5")), p, record_every=0.5)
        with pytest.raises(FitError):
            blowup_time_estimate(traj)

    def test_requires_enough_samples(self):
        traj = self._synthetic(lambda t: 1 / (1 - t), ["0.5", "0.999"])
        with pytest.raises(FitError):
            blowup_time_estimate(traj)
