"""Kinematic value types and scalar observables.

The worldline is parameterized by the invariant parameter tau, with
c = 1 and metric signature (-1, 1, 1, 1).  The fifth coordinate is
never stored: it is identically tau, so it contributes only the
constant -1 in the mass-shell deviation and is annihilated by every
higher derivative.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpfr

from .errors import ConfigError, DomainError
from .numerics import real, require_finite


@dataclass(frozen=True)
class FourVector:
    """Lorentz 4-vector (t, x, y, z), dimensionless components."""

    t: mpfr
    x: mpfr
    y: mpfr
    z: mpfr

    def __init__(self, t=0, x=0, y=0, z=0):
        object.__setattr__(self, "t", require_finite(t, "t"))
        object.__setattr__(self, "x", require_finite(x, "x"))
        object.__setattr__(self, "y", require_finite(y, "y"))
        object.__setattr__(self, "z", require_finite(z, "z"))

    def __add__(self, other: "FourVector") -> "FourVector":
        return FourVector(self.t + other.t, self.x + other.x,
                          self.y + other.y, self.z + other.z)

    def __sub__(self, other: "FourVector") -> "FourVector":
        return FourVector(self.t - other.t, self.x - other.x,
                          self.y - other.y, self.z - other.z)

    def scaled(self, c) -> "FourVector":
        c = real(c)
        return FourVector(c * self.t, c * self.x, c * self.y, c * self.z)

    def components(self) -> tuple:
        return (self.t, self.x, self.y, self.z)


ZERO4 = FourVector(0, 0, 0, 0)


def minkowski_dot(a: FourVector, b: FourVector) -> mpfr:
    """eta_{mu nu} a^mu b^nu with signature (-1, 1, 1, 1)."""
    return -a.t * b.t + a.x * b.x + a.y * b.y + a.z * b.z


def epsilon_of(u: FourVector) -> mpfr:
    """Mass-shell deviation: -u.u - 1 (the -1 absorbs the fifth component)."""
    return -minkowski_dot(u, u) - 1


def three_velocity(u: FourVector) -> tuple:
    """dx^i/dt = u^i / u^t; requires a future-pointing velocity."""
    if u.t <= 0:
        raise DomainError(f"time component of velocity must be > 0, got {u.t}")
    return (u.x / u.t, u.y / u.t, u.z / u.t)


@dataclass(frozen=True)
class WorldlineState:
    """12-D state of the vector formulation: (u, a, j) = (xdot, xddot, xdddot).

    `pos` is optional bookkeeping for plotting; it never enters the dynamics.
    Construction requires an above-mass-shell, future-pointing velocity.
    """

    u: FourVector
    a: FourVector
    j: FourVector
    pos: FourVector | None = None

    def __post_init__(self):
        if epsilon_of(self.u) <= 0:
            raise DomainError(
                f"above-mass-shell state required: epsilon = {epsilon_of(self.u)} <= 0")
        if self.u.t <= 0:
            raise DomainError(f"time orientation requires u.t > 0, got {self.u.t}")


@dataclass(frozen=True)
class ScalarState:
    """Reduced 6-scalar state (eps, deps, ddeps, rho, drho, eta)."""

    eps: mpfr
    deps: mpfr
    ddeps: mpfr
    rho: mpfr
    drho: mpfr
    eta: mpfr

    def __init__(self, eps, deps=0, ddeps=0, rho=0, drho=0, eta=0):
        object.__setattr__(self, "eps", require_finite(eps, "eps"))
        object.__setattr__(self, "deps", require_finite(deps, "deps"))
        object.__setattr__(self, "ddeps", require_finite(ddeps, "ddeps"))
        object.__setattr__(self, "rho", require_finite(rho, "rho"))
        object.__setattr__(self, "drho", require_finite(drho, "drho"))
        object.__setattr__(self, "eta", require_finite(eta, "eta"))

    def as_tuple(self) -> tuple:
        return (self.eps, self.deps, self.ddeps, self.rho, self.drho, self.eta)

    @staticmethod
    def from_tuple(values) -> "ScalarState":
        return ScalarState(*values)


FIELD_NAMES_SCALAR = ("eps", "deps", "ddeps", "rho", "drho", "eta")


def scalars_of(w: WorldlineState) -> ScalarState:
    """Map a worldline state to the reduced scalars.

    deps = -2<u,a> and ddeps = -2(rho + <u,j>) follow from differentiating
    eps(tau) = -<u,u> - 1 along the worldline; drho and eta likewise.
    """
    eps = epsilon_of(w.u)
    if eps <= 0:
        raise DomainError(f"scalars_of requires eps > 0, got {eps}")
    rho = minkowski_dot(w.a, w.a)
    return ScalarState(
        eps=eps,
        deps=-2 * minkowski_dot(w.u, w.a),
        ddeps=-2 * (rho + minkowski_dot(w.u, w.j)),
        rho=rho,
        drho=2 * minkowski_dot(w.a, w.j),
        eta=minkowski_dot(w.j, w.j),
    )


@dataclass(frozen=True)
class ModelParams:
    """Renormalized-mass coefficient D plus numeric run policy.

    D multiplies the renormalized mass in the equation of motion; the
    remaining fields are integrator policy (they have no counterpart in
    the physics).
    """

    D: float = 1.0
    precision_bits: int = 256
    eps_floor: float = 1e-8
    eps_cap: float = 1e6
    abs_tol: float = 1e-20
    rel_tol: float = 1e-20
    tau_max: float = 50.0
    h_min: float = 1e-30

    def __post_init__(self):
        if not float(self.D) > 0:
            raise ConfigError(f"D must be > 0, got {self.D}")
        if int(self.precision_bits) < 53:
            raise ConfigError(f"precision_bits must be >= 53, got {self.precision_bits}")
        if not (0 < float(self.eps_floor) < float(self.eps_cap)):
            raise ConfigError("require 0 < eps_floor < eps_cap")
        if not (float(self.abs_tol) > 0 and float(self.rel_tol) > 0):
            raise ConfigError("abs_tol and rel_tol must be > 0")
        if not float(self.tau_max) > 0:
            raise ConfigError("tau_max must be > 0")
        if not float(self.h_min) > 0:
            raise ConfigError("h_min must be > 0")
