"""Jacobian and local eigenvalue analysis of the reduced scalar system.

The 6x6 Jacobian is available in closed form (the K-potentials are
rational in the state up to eps^{1/2} factors) and, as an independent
cross-check, by central finite differences.  Eigenvalues are extracted
at the working precision with mpmath's Hessenberg + shifted-QR solver,
followed by an explicit residual check.
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2
import mpmath
from gmpy2 import mpfr

from .core import ModelParams, ScalarState
from .errors import ConvergenceError, DomainError
from .numerics import get_precision, pow_half_odd, real, sqrt_pos
from .dynamics import k_potentials, scalar_rhs

STATE_ORDER = ("eps", "deps", "ddeps", "rho", "drho", "eta")


@dataclass(frozen=True)
class JacobianMatrix:
    """6x6 matrix d f^a / d x^b, state ordering (eps, deps, ddeps, rho, drho, eta)."""

    entries: tuple  # 6 rows of 6 mpfr

    def row(self, i: int) -> tuple:
        return self.entries[i]

    def trace(self) -> mpfr:
        return sum(self.entries[i][i] for i in range(6))


@dataclass(frozen=True)
class EigenSpectrum:
    """Eigenvalues sorted by descending real part (ties: descending imag)."""

    values: tuple  # 6 mpmath.mpc
    max_real: float

    def real_parts(self) -> tuple:
        return tuple(v.real for v in self.values)


def jacobian(s: ScalarState, p: ModelParams, mode: str = "analytic") -> JacobianMatrix:
    """Jacobian of the first-order scalar system at state s."""
    if mode == "analytic":
        return _jacobian_analytic(s, p)
    if mode == "finite_difference":
        return _jacobian_fd(s, p)
    raise ValueError(f"unknown jacobian mode {mode!r}")


def _jacobian_analytic(s: ScalarState, p: ModelParams) -> JacobianMatrix:
    eps = real(s.eps)
    if eps <= 0:
        raise DomainError(f"jacobian requires eps > 0, got {eps}")
    D = real(p.D)
    de, dde, r, dr, et = s.deps, s.ddeps, s.rho, s.drho, s.eta
    k = k_potentials(s, p)
    k1, k2, k3 = k.k1, k.k2, k.k3

    e2 = eps * eps
    e3 = e2 * eps
    se = sqrt_pos(eps, "eps")
    de2 = de * de

    # K1 = 35/4 de^3/e^2 - 8 D de e^{3/2}
    dk1_de = -real(35) / 2 * de2 * de / e3 - 12 * D * de * se
    dk1_dde = real(105) / 4 * de2 / e2 - 8 * D * pow_half_odd(eps, 3)
    # K2 = 8 dde/e + 6 r/e - 35 de^2/e^2 + 16 D e^{3/2}
    dk2_de = -8 * dde / e2 - 6 * r / e2 + 70 * de2 / e3 + 24 * D * se
    dk2_dde = -70 * de / e2
    dk2_ddde = 8 / eps
    dk2_dr = 6 / eps
    # K3 = 12 de/e
    dk3_de = -12 * de / e2
    dk3_dde = 12 / eps

    zero = real(0)
    one = real(1)
    acc = dde + 2 * r
    ep1 = eps + 1

    row0 = (zero, one, zero, zero, zero, zero)
    row1 = (zero, zero, one, zero, zero, zero)
    row2 = (
        2 * k1 + 2 * ep1 * dk1_de + de * dk2_de + acc * dk3_de,
        2 * ep1 * dk1_dde + k2 + de * dk2_dde + acc * dk3_dde,
        de * dk2_ddde + k3,
        de * dk2_dr + 2 * k3,
        real(-3),
        zero,
    )
    row3 = (zero, zero, zero, zero, one, zero)
    row4 = (
        -de * dk1_de + 2 * r * dk2_de + dr * dk3_de,
        -k1 - de * dk1_dde + 2 * r * dk2_dde + dr * dk3_dde,
        2 * r * dk2_ddde,
        2 * k2 + 2 * r * dk2_dr,
        k3,
        real(2),
    )
    row5 = (
        -acc * dk1_de + dr * dk2_de + 2 * et * dk3_de,
        -acc * dk1_dde + dr * dk2_dde + 2 * et * dk3_dde,
        -k1 + dr * dk2_ddde,
        -2 * k1 + dr * dk2_dr,
        k2,
        2 * k3,
    )
    return JacobianMatrix((row0, row1, row2, row3, row4, row5))


def _jacobian_fd(s: ScalarState, p: ModelParams) -> JacobianMatrix:
    base = s.as_tuple()
    rel = real(2) ** -(int(p.precision_bits) // 2)
    cols = []
    for b in range(6):
        step = rel * max(abs(base[b]), real(1))
        up = list(base)
        dn = list(base)
        up[b] = up[b] + step
        dn[b] = dn[b] - step
        if up[0] <= 0 or dn[0] <= 0:
            raise DomainError("finite-difference perturbation left eps > 0 domain")
        fu = scalar_rhs(ScalarState(*up), p)
        fd = scalar_rhs(ScalarState(*dn), p)
        cols.append(tuple((fu[i] - fd[i]) / (2 * step) for i in range(6)))
    rows = tuple(tuple(cols[b][a] for b in range(6)) for a in range(6))
    return JacobianMatrix(rows)


def _to_mp(x) -> mpmath.mpf:
    # exact transfer via the binary mantissa/exponent decomposition
    x = mpfr(x)
    if not gmpy2.is_finite(x):
        raise DomainError(f"finite value required, got {x}")
    if x == 0:
        return mpmath.mpf(0)
    m, e = x.as_mantissa_exp()
    return mpmath.ldexp(mpmath.mpf(int(m)), int(e))


def eigenvalues(J: JacobianMatrix, residual_tol: float = 1e-10) -> EigenSpectrum:
    """Eigenvalues of the (real, nonsymmetric) Jacobian at working precision.

    Each computed eigenpair must satisfy ||(J - lambda I) v|| <= tol * ||J||;
    conjugate-pair symmetry is enforced on the result.
    """
    prec = get_precision()
    with mpmath.workprec(prec):
        M = mpmath.matrix(6, 6)
        norm = mpmath.mpf(0)
        for i in range(6):
            for j in range(6):
                v = _to_mp(J.entries[i][j])
                if not mpmath.isfinite(v):
                    raise DomainError("jacobian entries must be finite")
                M[i, j] = v
                norm = max(norm, abs(v))
        norm = max(norm, mpmath.mpf(1))
        try:
            E, V = mpmath.eig(M, left=False, right=True)
        except (mpmath.libmp.NoConvergence, ZeroDivisionError) as exc:
            raise ConvergenceError(f"eigen-iteration failed: {exc}") from exc
        for idx in range(6):
            vec = V[:, idx]
            res = mpmath.norm(M * vec - E[idx] * vec, mpmath.inf)
            scale = max(mpmath.norm(vec, mpmath.inf), mpmath.mpf(1e-30))
            if res / scale > residual_tol * norm:
                raise ConvergenceError(
                    f"eigenpair residual {res / scale} exceeds {residual_tol} * ||J||")
        noise = norm * mpmath.mpf(2) ** -(prec // 2)
        vals = _symmetrize_conjugates(list(E), noise)
        vals.sort(key=lambda z: (-z.real, -z.imag))
        return EigenSpectrum(values=tuple(vals), max_real=float(vals[0].real))


def _symmetrize_conjugates(vals, noise):
    """Pair complex eigenvalues of a real matrix into exact conjugates.

    Imaginary parts below the roundoff floor are numerical noise from the
    QR iteration and are zeroed rather than paired.
    """
    out = []
    pool = [z if abs(z.imag) > noise else mpmath.mpc(z.real, 0) for z in vals]
    while pool:
        z = pool.pop(0)
        if z.imag == 0:
            out.append(z)
            continue
        best, bdist = None, None
        for i, w in enumerate(pool):
            d = abs(w - mpmath.conj(z))
            if bdist is None or d < bdist:
                best, bdist = i, d
        if best is None or bdist > (abs(z) + 1) * mpmath.mpf("1e-6"):
            out.append(z)
            continue
        w = pool.pop(best)
        re = (z.real + w.real) / 2
        im = (abs(z.imag) + abs(w.imag)) / 2
        out.append(mpmath.mpc(re, im))
        out.append(mpmath.mpc(re, -im))
    return out


def classify_local(spec: EigenSpectrum, tol: float = 1e-9) -> str:
    """attracting / repelling / marginal / saddle from the real parts."""
    reals = [float(v.real) for v in spec.values]
    if any(abs(r) <= tol for r in reals):
        return "marginal"
    if all(r < -tol for r in reals):
        return "attracting"
    if all(r > tol for r in reals):
        return "repelling"
    return "saddle"
