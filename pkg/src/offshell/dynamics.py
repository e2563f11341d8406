"""Right-hand sides of the renormalized equation of motion.

Two equivalent formulations are provided: the 4th-order vector equation
for the snap xddddot^mu, and the reduced 6-scalar system obtained by
contracting it with xdot, xddot and xdddot.  Both are pure functions of
value types.
"""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpfr

from .core import FourVector, ModelParams, ScalarState, WorldlineState, scalars_of
from .errors import DomainError
from .numerics import pow_half_odd, real, sqrt_pos


@dataclass(frozen=True)
class KPotentials:
    """The three auxiliary potential scalars driving the reduced system."""

    k1: mpfr
    k2: mpfr
    k3: mpfr

    def as_tuple(self) -> tuple:
        return (self.k1, self.k2, self.k3)


def _require_eps(eps) -> mpfr:
    eps = real(eps)
    if eps <= 0:
        raise DomainError(f"dynamics undefined for eps <= 0 (got {eps})")
    return eps


def k_potentials(s: ScalarState, p: ModelParams) -> KPotentials:
    """Evaluate (K1, K2, K3) at a scalar state.

    K1 = (2 deps / eps^2) (35/8 deps^2 - 4 D eps^{7/2})
    K2 = (2 / eps^2) (4 eps ddeps + 3 eps rho - 35/2 deps^2 + 8 D eps^{7/2})
    K3 = 12 deps / eps
    """
    eps = _require_eps(s.eps)
    D = real(p.D)
    eps2 = eps * eps
    eps72 = pow_half_odd(eps, 7, "eps")
    de2 = s.deps * s.deps
    k1 = (2 * s.deps / eps2) * (real(35) / 8 * de2 - 4 * D * eps72)
    k2 = (2 / eps2) * (4 * eps * s.ddeps + 3 * eps * s.rho
                       - real(35) / 2 * de2 + 8 * D * eps72)
    k3 = 12 * s.deps / eps
    return KPotentials(k1, k2, k3)


def k_positive_part(k: KPotentials) -> KPotentials:
    """Positive part K_i+ = max(K_i, 0), componentwise."""
    zero = real(0)
    return KPotentials(max(k.k1, zero), max(k.k2, zero), max(k.k3, zero))


def scalar_rhs(s: ScalarState, p: ModelParams) -> tuple:
    """d/dtau of (eps, deps, ddeps, rho, drho, eta).

    The three nontrivial components couple the state linearly to the
    K-potentials:
      dddeps = -3 drho + 2(eps+1) K1 + deps K2 + (ddeps + 2 rho) K3
      ddrho  = 2 eta - deps K1 + 2 rho K2 + drho K3
      deta   = -(ddeps + 2 rho) K1 + drho K2 + 2 eta K3
    """
    k = k_potentials(s, p)
    acc = s.ddeps + 2 * s.rho
    dddeps = -3 * s.drho + 2 * (s.eps + 1) * k.k1 + s.deps * k.k2 + acc * k.k3
    ddrho = 2 * s.eta - s.deps * k.k1 + 2 * s.rho * k.k2 + s.drho * k.k3
    deta = -acc * k.k1 + s.drho * k.k2 + 2 * s.eta * k.k3
    return (s.deps, s.ddeps, dddeps, s.drho, ddrho, deta)


def vector_rhs(w: WorldlineState, p: ModelParams) -> FourVector:
    """Snap xddddot^mu of the renormalized equation of motion.

    xddddot = (2/eps^2) [ u deps (35/8 deps^2 - 4 D eps^{7/2})
                        + a (4 eps ddeps + 3 eps rho - 35/2 deps^2 + 8 D eps^{7/2})
                        + 6 eps deps j ]
    """
    s = scalars_of(w)
    eps = s.eps
    D = real(p.D)
    eps2 = eps * eps
    eps72 = pow_half_odd(eps, 7, "eps")
    de2 = s.deps * s.deps
    cu = s.deps * (real(35) / 8 * de2 - 4 * D * eps72)
    ca = 4 * eps * s.ddeps + 3 * eps * s.rho - real(35) / 2 * de2 + 8 * D * eps72
    cj = 6 * eps * s.deps
    pref = 2 / eps2
    return FourVector(
        pref * (w.u.t * cu + w.a.t * ca + w.j.t * cj),
        pref * (w.u.x * cu + w.a.x * ca + w.j.x * cj),
        pref * (w.u.y * cu + w.a.y * ca + w.j.y * cj),
        pref * (w.u.z * cu + w.a.z * ca + w.j.z * cj),
    )


def mass_matrix_contraction_check(w: WorldlineState) -> mpfr:
    """Max residual of the contraction identity M^mu_nu xdot_mu = -xdot_nu.

    M^mu_nu = eps delta^mu_nu + xdot^mu xdot_nu, so the identity reduces
    to eps u_nu + <u,u> u_nu + u_nu = 0 for every nu; it holds to
    roundoff for any above-shell velocity.
    """
    from .core import epsilon_of, minkowski_dot
    eps = epsilon_of(w.u)
    uu = minkowski_dot(w.u, w.u)
    res = real(0)
    for c in w.u.components():
        res = max(res, abs(eps * c + uu * c + c))
    return res


def constant_eps_fixed_point(eps, rho, p: ModelParams) -> ScalarState:
    """Constant-mass-shell-deviation state: all derivatives vanish and
    eta = -rho (6 rho / eps + 16 D eps^{3/2})."""
    eps = _require_eps(eps)
    rho = real(rho)
    D = real(p.D)
    eta = -rho * (6 * rho / eps + 16 * D * pow_half_odd(eps, 3, "eps"))
    return ScalarState(eps=eps, deps=0, ddeps=0, rho=rho, drho=0, eta=eta)


def d_coefficient_pull(s: ScalarState, p: ModelParams) -> mpfr:
    """D-proportional part of dddeps: -16 D deps eps^{5/2}.

    The system is affine in D, so this equals dddeps(s, D) - dddeps(s, 0).
    """
    eps = _require_eps(s.eps)
    return -16 * real(p.D) * s.deps * pow_half_odd(eps, 5, "eps")


def worldline_from_scalars(s: ScalarState) -> WorldlineState:
    """Construct a worldline state in the t-x(-y) plane realizing given scalars.

    Orientation gauge: u is purely timelike, a lies in the t-x plane, and
    j picks up a y component only if eta demands it.  The construction
    inverts the dot-product relations used by ``scalars_of``:
        <u,a> = -deps/2        <a,a> = rho
        <u,j> = -ddeps/2 - rho <a,j> = drho/2   <j,j> = eta
    Not every scalar tuple is realizable in this gauge (e.g. rho < 0 with
    deps = 0 has no worldline counterpart at all, since a orthogonal to a
    timelike u is necessarily spacelike); DomainError is raised then.
    """
    eps = _require_eps(s.eps)
    ut = sqrt_pos(1 + eps, "1 + eps")
    u = FourVector(ut, 0, 0, 0)

    at = s.deps / (2 * ut)
    ax2 = s.rho + at * at
    if ax2 < 0:
        raise DomainError(
            f"scalars not realizable: rho + (deps/(2 u_t))^2 = {ax2} < 0")
    ax = sqrt_pos(ax2, "ax^2") if ax2 > 0 else real(0)
    a = FourVector(at, ax, 0, 0)

    jt = (s.ddeps / 2 + s.rho) / ut
    if ax > 0:
        jx = (s.drho / 2 + at * jt) / ax
    else:
        if s.drho + 2 * at * jt != 0:
            raise DomainError("scalars not realizable: drho constraint with a = 0")
        jx = real(0)
    jy2 = s.eta + jt * jt - jx * jx
    if jy2 < 0:
        raise DomainError(f"scalars not realizable: eta leaves jy^2 = {jy2} < 0")
    jy = sqrt_pos(jy2, "jy^2") if jy2 > 0 else real(0)
    j = FourVector(jt, jx, jy, 0)

    w = WorldlineState(u=u, a=a, j=j, pos=FourVector(0, 0, 0, 0))
    return w
