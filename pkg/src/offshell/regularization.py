"""Generalized-function regularization machinery and series cross-checks.

Provides truncated-series arithmetic, the closed-form second derivative
of the force kernel ratio phi = k / T^{5/2}, regularized pairings of
x_+^lambda with polynomial test functions, their residues at negative
integer exponents, and the pointwise 5D retarded Green-function kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr

from .core import FourVector, minkowski_dot
from .errors import DomainError, PoleError
from .numerics import pow_half_odd, real


@dataclass(frozen=True)
class TaylorPoly:
    """Truncated power series sum_k coeffs[k] * h^k, fixed order."""

    coeffs: tuple

    def __init__(self, coeffs):
        object.__setattr__(self, "coeffs", tuple(real(c) for c in coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __add__(self, other: "TaylorPoly") -> "TaylorPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (real(0),) * (n - len(self.coeffs))
        b = other.coeffs + (real(0),) * (n - len(other.coeffs))
        return TaylorPoly([x + y for x, y in zip(a, b)])

    def __mul__(self, other: "TaylorPoly") -> "TaylorPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        out = [real(0)] * n
        for i, ci in enumerate(self.coeffs):
            if i >= n:
                break
            for j, cj in enumerate(other.coeffs):
                if i + j >= n:
                    break
                out[i + j] += ci * cj
        return TaylorPoly(out)

    def scaled(self, c) -> "TaylorPoly":
        c = real(c)
        return TaylorPoly([c * x for x in self.coeffs])

    def truncated(self, order: int) -> "TaylorPoly":
        return TaylorPoly(self.coeffs[:order + 1])

    def shifted_down(self, k: int) -> "TaylorPoly":
        """Divide by h^k; the k leading coefficients must vanish."""
        for c in self.coeffs[:k]:
            if c != 0:
                raise DomainError("series not divisible: nonzero low-order coefficient")
        return TaylorPoly(self.coeffs[k:] or (real(0),))

    def derivative_at_zero(self, n: int) -> mpfr:
        """n-th derivative at 0: n! * coeffs[n]."""
        if n >= len(self.coeffs):
            return real(0)
        return real(math.factorial(n)) * self.coeffs[n]

    def eval(self, x) -> mpfr:
        x = real(x)
        acc = real(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def power(self, exponent) -> "TaylorPoly":
        """Real power of a series with strictly positive constant term.

        Computed as exp(exponent * log(self)) in series arithmetic, which
        handles non-integer exponents uniformly.
        """
        c0 = self.coeffs[0]
        if c0 <= 0:
            raise DomainError(f"series power requires positive constant term, got {c0}")
        exponent = real(exponent)
        n = self.order
        # u = self/c0 - 1 has zero constant term
        u = TaylorPoly([c / c0 for c in self.coeffs])
        u = u + TaylorPoly([-1] + [0] * n)
        # log(1+u) then exp(exponent * log)
        logs = _log1p_series(u, n)
        expo = _exp_series(logs.scaled(exponent), n)
        lead = gmpy2.exp(exponent * gmpy2.log(c0))
        return expo.scaled(lead)


def _log1p_series(u: TaylorPoly, order: int) -> TaylorPoly:
    acc = TaylorPoly([0] * (order + 1))
    term = TaylorPoly([1] + [0] * order)
    for k in range(1, order + 1):
        term = (term * u).truncated(order)
        sign = real(1) if k % 2 == 1 else real(-1)
        acc = acc + term.scaled(sign / k)
    return acc


def _exp_series(v: TaylorPoly, order: int) -> TaylorPoly:
    if v.coeffs[0] != 0:
        raise DomainError("exp series expects zero constant term")
    acc = TaylorPoly([1] + [0] * order)
    term = TaylorPoly([1] + [0] * order)
    for k in range(1, order + 1):
        term = (term * v).truncated(order).scaled(real(1) / k)
        acc = acc + term
    return acc


@dataclass(frozen=True)
class ExpansionCoefficients:
    """Leading expansion data of the force kernel about coincidence.

    b0, b1, b2: numerator coefficients (k = b0 + h b1 + h^2 b2/2 + ...);
    r0, r1, r2: denominator remainder (T = r0 + h r1 + h^2 r2/2 + ...),
    with r0 = eps > 0 above the mass shell.
    """

    b0: mpfr
    b1: mpfr
    b2: mpfr
    r0: mpfr
    r1: mpfr
    r2: mpfr

    def __init__(self, b0, b1, b2, r0, r1, r2):
        object.__setattr__(self, "b0", real(b0))
        object.__setattr__(self, "b1", real(b1))
        object.__setattr__(self, "b2", real(b2))
        object.__setattr__(self, "r0", real(r0))
        object.__setattr__(self, "r1", real(r1))
        object.__setattr__(self, "r2", real(r2))


def phi_second_derivative(c: ExpansionCoefficients) -> mpfr:
    """Closed form of d^2/dh^2 [k(h) T(h)^{-5/2}] at h = 0.

    = (-10 b0 r0 r2 + 35 b0 r1^2 - 20 b1 r0 r1 + 4 b2 r0^2) / (4 r0^{9/2})
    """
    if c.r0 <= 0:
        raise DomainError(f"requires r0 > 0, got {c.r0}")
    num = (-10 * c.b0 * c.r0 * c.r2 + 35 * c.b0 * c.r1 * c.r1
           - 20 * c.b1 * c.r0 * c.r1 + 4 * c.b2 * c.r0 * c.r0)
    return num / (4 * pow_half_odd(c.r0, 9, "r0"))


def phi_second_derivative_series(c: ExpansionCoefficients, guard_order: int = 8) -> mpfr:
    """Independent series-arithmetic evaluation of the same quantity.

    Builds k(h) and T(h) to second order, forms k * T^{-5/2} by truncated
    series arithmetic and reads off twice the h^2 coefficient.
    """
    pad = [0] * (guard_order - 2)
    k = TaylorPoly([c.b0, c.b1, c.b2 / 2] + pad)
    T = TaylorPoly([c.r0, c.r1, c.r2 / 2] + pad)
    phi = (k * T.power(real(-5) / 2)).truncated(2)
    return 2 * phi.coeffs[2]


# ---------------------------------------------------------------------------
# polynomial worldlines and the Lorentzian distance kernel


class PolynomialWorldline:
    """x^mu(tau) with polynomial components; coeffs[k] is the tau^k FourVector."""

    def __init__(self, coeffs):
        self.coeffs = tuple(coeffs)

    def eval(self, tau) -> FourVector:
        tau = real(tau)
        # Horner over components
        t = x = y = z = real(0)
        for c in reversed(self.coeffs):
            t = t * tau + c.t
            x = x * tau + c.x
            y = y * tau + c.y
            z = z * tau + c.z
        return FourVector(t, x, y, z)

    def derivative(self) -> "PolynomialWorldline":
        return PolynomialWorldline(
            [self.coeffs[k].scaled(k) for k in range(1, len(self.coeffs))]
            or [FourVector(0, 0, 0, 0)])


def worldline_R(z: PolynomialWorldline, tau, tau_prime) -> mpfr:
    """Generalized Lorentzian distance:
    -(x(tau)-x(tau'))^2 - (tau-tau')^2 (the last term is the fifth slot)."""
    d = z.eval(tau) - z.eval(tau_prime)
    dt5 = real(tau) - real(tau_prime)
    return -minkowski_dot(d, d) - dt5 * dt5


_SLOTS = (0, 1, 2, 3, 5)  # component labels: t, x, y, z, and the fifth slot


def worldline_h_tensor(z: PolynomialWorldline, tau, tau_prime):
    """Antisymmetric numerator tensor h^{alpha beta}(tau, tau').

    Indices run over {0,1,2,3,5}; returned as a dict keyed by (alpha, beta).
    dR/dx_mu(tau) = -2 (x(tau)-x(tau'))^mu, with the fifth-slot rules
    zdot^5 = 1 and (x^5(tau) - x^5(tau')) = tau - tau'.
    """
    tau = real(tau)
    tau_prime = real(tau_prime)
    zdot = z.derivative()
    v = zdot.eval(tau_prime)
    d = z.eval(tau) - z.eval(tau_prime)
    # contravariant components indexed by slot
    vel = {0: v.t, 1: v.x, 2: v.y, 3: v.z, 5: real(1)}
    grad = {0: -2 * d.t, 1: -2 * d.x, 2: -2 * d.y, 3: -2 * d.z,
            5: -2 * (tau - tau_prime)}
    out = {}
    for a in _SLOTS:
        for b in _SLOTS:
            out[(a, b)] = vel[a] * grad[b] - vel[b] * grad[a]
    return out


# ---------------------------------------------------------------------------
# Gel'fand regularization for polynomial test functions


def gelfand_pair(lam, phi: TaylorPoly, b, m: int) -> mpfr:
    """Regularized pairing (x_+^lam, phi) for a polynomial phi cut off at b.

    With phi = sum_j c_j x^j on [0, b] and zero beyond, the pairing is
    sum_j c_j b^{lam+j+1} / (lam+j+1): the j <= m terms by analytic
    continuation (Taylor subtraction), the rest by direct integration.
    """
    lam = real(lam)
    b = real(b)
    if b <= 0:
        raise DomainError("support cutoff b must be > 0")
    if lam == gmpy2.rint(lam) and -int(m) <= int(lam) <= -1:
        raise PoleError(f"lambda = {lam} is a pole; use gelfand_residue")
    acc = real(0)
    for j, c in enumerate(phi.coeffs):
        if c == 0:
            continue
        p = lam + j + 1
        if p == 0:
            raise PoleError(f"divergent direct term at j = {j} (lambda + j + 1 = 0)")
        if p <= 0 and j > m:
            raise DomainError(
                f"m = {m} subtraction terms insufficient for lambda = {lam}")
        acc += c * _pow_real(b, p) / p
    return acc


def _pow_real(b, p) -> mpfr:
    if b == 1:
        return real(1)
    return gmpy2.exp(p * gmpy2.log(b))


def gelfand_residue(n: int, phi: TaylorPoly) -> mpfr:
    """Residue of (x_+^lam, phi) at lam = -n: phi^{(n-1)}(0) / (n-1)!."""
    if n < 1:
        raise DomainError("n must be a positive integer")
    if n - 1 >= len(phi.coeffs):
        return real(0)
    return phi.coeffs[n - 1]


def remainder_residue(R_series: TaylorPoly, phi_series: TaylorPoly,
                      lam, b, m: int, l: int) -> mpfr:
    """Residue of (R_+^{-lam}, phi) when m*lam - l is a positive integer.

    R has a zero of order m (T = R / h^m, T(0) > 0), phi a zero of order l
    (psi = phi / h^l).  With q = psi / T^lam the residue is
    b^lam * (-1)^{m lam - l - 1} * q^{(m lam - l - 1)}(0), as printed in
    the source derivation (including the b^lam prefactor).
    """
    lam = real(lam)
    b = real(b)
    k_float = m * lam - l
    k = int(gmpy2.rint(k_float))
    if k_float != k or k < 1:
        raise DomainError(f"m*lam - l = {k_float} is not a positive integer")
    T = R_series.shifted_down(m)
    if T.coeffs[0] <= 0:
        raise DomainError(f"T(0) must be > 0, got {T.coeffs[0]}")
    psi = phi_series.shifted_down(l)
    order = max(T.order, psi.order, k - 1)
    T = TaylorPoly(T.coeffs + (0,) * (order - T.order))
    psi = TaylorPoly(psi.coeffs + (0,) * (order - psi.order))
    q = psi * T.power(-lam)
    sign = real(-1) ** ((k - 1) % 2)
    return _pow_real(b, lam) * sign * q.derivative_at_zero(k - 1)


def green_kernel(x: FourVector, tau) -> mpfr:
    """tau-retarded 5D Green-function kernel, pointwise.

    Nonzero only inside the past 5D lightcone with tau > 0:
    g = -(1/4 pi^2) (-x.x - tau^2)^{-3/2}.
    """
    tau = real(tau)
    if tau <= 0:
        return real(0)
    arg = -minkowski_dot(x, x) - tau * tau
    if arg <= 0:
        return real(0)
    pi = gmpy2.const_pi()
    return -1 / (4 * pi * pi * pow_half_odd(arg, 3, "cone argument"))
