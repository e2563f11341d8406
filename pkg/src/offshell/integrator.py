"""Adaptive embedded Runge-Kutta-Fehlberg 4(5) integration of either formulation.

States are flat tuples of mpfr (6 scalars, or 12 worldline components in
(u, a, j) order).  The Butcher tableau is stored as exact rationals and
materialized at the working precision, so coefficient roundoff never caps
the achievable accuracy.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from gmpy2 import mpfr

from .core import (FourVector, ModelParams, ScalarState, WorldlineState,
                   epsilon_of, scalars_of, three_velocity)
from .dynamics import scalar_rhs, vector_rhs
from .errors import ConfigError, DomainError, DomainStepError, FitError
from .numerics import get_precision, precision, real

# Fehlberg 4(5): six stages, 4th-order propagation, 5th-order error reference.
_A = [
    [],
    [Fraction(1, 4)],
    [Fraction(3, 32), Fraction(9, 32)],
    [Fraction(1932, 2197), Fraction(-7200, 2197), Fraction(7296, 2197)],
    [Fraction(439, 216), Fraction(-8), Fraction(3680, 513), Fraction(-845, 4104)],
    [Fraction(-8, 27), Fraction(2), Fraction(-3544, 2565), Fraction(1859, 4104),
     Fraction(-11, 40)],
]
_B4 = [Fraction(25, 216), Fraction(0), Fraction(1408, 2565), Fraction(2197, 4104),
       Fraction(-1, 5), Fraction(0)]
_B5 = [Fraction(16, 135), Fraction(0), Fraction(6656, 12825), Fraction(28561, 56430),
       Fraction(-9, 50), Fraction(2, 55)]

_tableau_cache: dict = {}


def _tableau():
    bits = get_precision()
    tab = _tableau_cache.get(bits)
    if tab is None:
        conv = lambda f: mpfr(f.numerator) / mpfr(f.denominator)
        tab = ([[conv(c) for c in row] for row in _A],
               [conv(c) for c in _B4], [conv(c) for c in _B5])
        _tableau_cache[bits] = tab
    return tab


class Outcome(enum.Enum):
    CONVERGED_ONSHELL = "CONVERGED_ONSHELL"
    DIVERGED = "DIVERGED"
    TAU_MAX_REACHED = "TAU_MAX_REACHED"
    STEP_COLLAPSE = "STEP_COLLAPSE"


@dataclass(frozen=True)
class Trajectory:
    """Recorded integration run: (tau, state-tuple) samples plus the outcome."""

    form: str                  # "scalar" | "vector"
    samples: tuple             # ((tau, state-tuple), ...), tau strictly increasing
    outcome: Outcome
    tau_end: mpfr
    blowup_tau: mpfr | None = None

    def taus(self):
        return [t for t, _ in self.samples]

    def scalar_states(self):
        """Samples as ScalarState (mapping vector states through scalars_of)."""
        out = []
        for t, st in self.samples:
            out.append((t, _as_scalar_state(self.form, st)))
        return out


def _as_scalar_state(form, st) -> ScalarState:
    if form == "scalar":
        return ScalarState(*st)
    return scalars_of(_worldline_of(st))


def _worldline_of(st) -> WorldlineState:
    return WorldlineState(u=FourVector(*st[0:4]), a=FourVector(*st[4:8]),
                          j=FourVector(*st[8:12]))


def _scalar_eps(st):
    return st[0]


def _vector_eps(st):
    u = st[0:4]
    return -(-u[0] * u[0] + u[1] * u[1] + u[2] * u[2] + u[3] * u[3]) - 1


def make_rhs(form: str, p: ModelParams):
    """Flat-tuple RHS for the requested formulation.

    Raises DomainStepError (not DomainError) when eps <= 0, so the adaptive
    driver can retry with a smaller step.
    """
    if form == "scalar":
        def rhs(st):
            if st[0] <= 0:
                raise DomainStepError("eps <= 0 at internal stage")
            return scalar_rhs(ScalarState(*st), p)
        return rhs
    if form == "vector":
        def rhs(st):
            if _vector_eps(st) <= 0 or st[0] <= 0:
                raise DomainStepError("eps <= 0 (or u.t <= 0) at internal stage")
            w = _worldline_of(st)
            snap = vector_rhs(w, p)
            return st[4:8] + st[8:12] + snap.components()
        return rhs
    raise ConfigError(f"unknown form {form!r}")


def step_rk45(state: tuple, rhs, h, abs_tol=1e-20, rel_tol=1e-20):
    """One embedded RKF4(5) step.

    Returns (state4, error_estimate) where error_estimate is the max over
    components of |y5 - y4| / (abs_tol + rel_tol * |y4|); a step is
    acceptable when the estimate is <= 1.
    """
    h = real(h)
    if h <= 0:
        raise ValueError("step size must be > 0")
    A, B4, B5 = _tableau()
    abs_tol = real(abs_tol)
    rel_tol = real(rel_tol)
    n = len(state)
    ks = [rhs(state)]
    for i in range(1, 6):
        arow = A[i]
        stage = tuple(
            state[c] + h * sum(arow[m] * ks[m][c] for m in range(i))
            for c in range(n))
        ks.append(rhs(stage))
    y4 = tuple(state[c] + h * sum(B4[m] * ks[m][c] for m in range(6))
               for c in range(n))
    y5 = tuple(state[c] + h * sum(B5[m] * ks[m][c] for m in range(6))
               for c in range(n))
    err = real(0)
    for c in range(n):
        scale = abs_tol + rel_tol * abs(y4[c])
        err = max(err, abs(y5[c] - y4[c]) / scale)
    return y4, err


_SAFETY = Fraction(9, 10)
_GROW_MAX = 5.0
_SHRINK_MIN = 0.2


def integrate(initial, p: ModelParams, form: str = "scalar",
              record_every: float = 0.1) -> Trajectory:
    """Integrate from tau = 0 until an outcome is reached.

    Halting rules:
      CONVERGED_ONSHELL  eps < eps_floor and all other scalars < eps_floor
                         in magnitude
      DIVERGED           eps > eps_cap (blowup_tau = current tau)
      STEP_COLLAPSE      accepted-step control pushed h below h_min
      TAU_MAX_REACHED    tau reached p.tau_max
    """
    if form not in ("scalar", "vector"):
        raise ConfigError(f"unknown form {form!r}")
    if record_every is not None and not float(record_every) > 0:
        raise ConfigError("record_every must be > 0")

    with precision(int(p.precision_bits)):
        if isinstance(initial, ScalarState):
            state = initial.as_tuple()
            if form != "scalar":
                raise ConfigError("vector form requires a WorldlineState initial")
        elif isinstance(initial, WorldlineState):
            if form != "vector":
                raise ConfigError("scalar form requires a ScalarState initial")
            state = initial.u.components() + initial.a.components() + initial.j.components()
        else:
            raise ConfigError(f"unsupported initial state {type(initial)!r}")

        eps_of = _scalar_eps if form == "scalar" else _vector_eps
        if eps_of(state) <= 0:
            raise ConfigError(f"initial state must have eps > 0, got {eps_of(state)}")

        rhs = make_rhs(form, p)
        eps_floor = real(p.eps_floor)
        eps_cap = real(p.eps_cap)
        tau_max = real(p.tau_max)
        h_min = real(p.h_min)
        rec = real(record_every)
        tau = real(0)
        h = rec / 8
        samples = [(tau, state)]
        next_rec = rec
        outcome = None
        blowup = None

        while True:
            if tau >= tau_max:
                outcome = Outcome.TAU_MAX_REACHED
                break
            h = min(h, tau_max - tau)
            try:
                new_state, err = step_rk45(state, rhs, h, p.abs_tol, p.rel_tol)
            except DomainStepError:
                h = h / 2
                if h < h_min:
                    outcome = Outcome.STEP_COLLAPSE
                    break
                continue
            if err <= 1:
                tau = tau + h
                state = new_state
                _check_subluminal(form, state)
                eps = eps_of(state)
                # near blow-up the interval grid undersamples the growth;
                # record every accepted step over the final decade of eps
                if tau >= next_rec or eps > eps_cap / 10:
                    samples.append((tau, state))
                    if tau >= next_rec:
                        next_rec = next_rec + rec * (1 + int((tau - next_rec) / rec))
                if eps > eps_cap:
                    outcome = Outcome.DIVERGED
                    blowup = tau
                    break
                if eps < eps_floor and _derivatives_settled(form, state, eps_floor):
                    outcome = Outcome.CONVERGED_ONSHELL
                    break
            # standard PI-free step-size update, clamped
            if err > 0:
                factor = real(0.9) * err ** real(-0.2)
                factor = min(max(factor, real(_SHRINK_MIN)), real(_GROW_MAX))
            else:
                factor = real(_GROW_MAX)
            h = h * factor
            if h < h_min:
                outcome = Outcome.STEP_COLLAPSE
                break

        if samples[-1][0] != tau:
            samples.append((tau, state))
        return Trajectory(form=form, samples=tuple(samples), outcome=outcome,
                          tau_end=tau, blowup_tau=blowup)


def _check_subluminal(form, state):
    # |v| < 1 is guaranteed analytically whenever eps > 0; assert it on
    # every accepted step of a vector run.
    if form != "vector":
        return
    ut = state[0]
    if ut <= 0:
        raise DomainError("u.t <= 0 on accepted step")
    v2 = (state[1] ** 2 + state[2] ** 2 + state[3] ** 2) / (ut * ut)
    if v2 >= 1:
        raise DomainError(f"superluminal 3-velocity on accepted step: |v|^2 = {v2}")


def _derivatives_settled(form, state, floor):
    s = _as_scalar_state(form, state) if _eps_positive(form, state) else None
    if s is None:
        return False
    return (abs(s.deps) < floor and abs(s.ddeps) < floor and abs(s.rho) < floor
            and abs(s.drho) < floor and abs(s.eta) < floor)


def _eps_positive(form, state):
    eps = _scalar_eps(state) if form == "scalar" else _vector_eps(state)
    return eps > 0


def sweep_D(initial, d_values, p: ModelParams, form: str = "scalar",
            record_every: float = 0.1):
    """Independent integrations of the same initial state, one per D value."""
    results = []
    for d in d_values:
        if not float(d) > 0:
            raise ConfigError(f"D must be > 0, got {d}")
        params = ModelParams(D=d, precision_bits=p.precision_bits,
                             eps_floor=p.eps_floor, eps_cap=p.eps_cap,
                             abs_tol=p.abs_tol, rel_tol=p.rel_tol,
                             tau_max=p.tau_max, h_min=p.h_min)
        traj = integrate(initial, params, form=form, record_every=record_every)
        results.append((d, traj.outcome, traj))
    return results


def blowup_time_estimate(traj: Trajectory) -> mpfr:
    """Extrapolated blow-up time tau*.

    Fits 1/eps(tau) linearly over the final recorded decade of eps growth
    and returns its root; for a genuine pole 1/eps is asymptotically linear.
    """
    if traj.outcome is not Outcome.DIVERGED:
        raise FitError("blow-up estimate requires a DIVERGED trajectory")
    pts = [(t, _as_scalar_state(traj.form, st).eps) for t, st in traj.samples]
    eps_end = pts[-1][1]
    window = [(t, e) for t, e in pts if e >= eps_end / 10 and e > 0]
    if len(window) < 4:
        raise FitError(f"need >= 4 samples in the final decade, got {len(window)}")
    # least squares on y = 1/eps vs tau
    n = real(len(window))
    sx = sum(t for t, _ in window)
    sy = sum(1 / e for _, e in window)
    sxx = sum(t * t for t, _ in window)
    sxy = sum(t / e for t, e in window)
    denom = n * sxx - sx * sx
    if denom == 0:
        raise FitError("degenerate fit window")
    slope = (n * sxy - sx * sy) / denom
    intercept = (sy - slope * sx) / n
    if slope >= 0:
        raise FitError("1/eps not decreasing over the fit window")
    root = -intercept / slope
    return max(root, traj.samples[-1][0])
