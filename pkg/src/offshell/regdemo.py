"""Fixed-seed verification table for the regularization machinery.

Used by the `offshell regdemo` subcommand; each identity prints one
pass/fail line.  Tolerances tighten with the working precision: the
256-bit run uses the documented 1e-20 relative bands, the 53-bit mode
relaxes them to 1e-9 (calibrated headroom above double roundoff).
"""

from __future__ import annotations

import random

import gmpy2

from .core import FourVector
from .numerics import precision, real
from .regularization import (ExpansionCoefficients, PolynomialWorldline,
                             TaylorPoly, gelfand_pair, gelfand_residue,
                             phi_second_derivative,
                             phi_second_derivative_series, remainder_residue,
                             worldline_R, green_kernel)

SEED = 20240803


def _rel_err(a, b):
    denom = max(abs(a), abs(b), real(1e-30))
    return abs(a - b) / denom


def run_regdemo(bits: int, echo=print, n_random: int = 200) -> bool:
    tol = real("1e-20") if bits >= 256 else real("1e-9")
    rng = random.Random(SEED)
    results = []

    with precision(bits):
        # 1. closed-form phi'' vs series arithmetic on random coefficients
        worst = real(0)
        for _ in range(n_random):
            c = ExpansionCoefficients(
                b0=rng.uniform(-2, 2), b1=rng.uniform(-2, 2), b2=rng.uniform(-2, 2),
                r0=rng.uniform(0.1, 2), r1=rng.uniform(-1, 1), r2=rng.uniform(-1, 1))
            worst = max(worst, _rel_err(phi_second_derivative(c),
                                        phi_second_derivative_series(c)))
        results.append(("phi'' closed form vs series oracle", worst <= tol, worst))

        # 2. residue limit: (lam + n) * pair -> residue as lam -> -n
        phi = TaylorPoly([rng.uniform(-1, 1) for _ in range(5)])
        worst = real(0)
        for n in (1, 2, 3):
            res = gelfand_residue(n, phi)
            approx = _limit_pair_residue(n, phi)
            worst = max(worst, _rel_err(approx, res))
        ok = worst <= real("1e-10")
        results.append(("(lam+n)(x_+^lam, phi) -> residue limit", ok, worst))

        # 3. direct quadrature agreement for lam > -1
        worst = real(0)
        for _ in range(20):
            lam = real(rng.uniform(-0.9, 2.0))
            poly = TaylorPoly([rng.uniform(-1, 1) for _ in range(4)])
            closed = gelfand_pair(lam, poly, b=1, m=0)
            quad = _quadrature(lam, poly, bits)
            worst = max(worst, _rel_err(closed, quad))
        results.append(("pairing vs direct quadrature (lam > -1)", worst <= real("1e-6"),
                        worst))

        # 4. remainder residue proportional to phi'' in the (5/2, 2, 2) case
        worst = real(0)
        for _ in range(20):
            c = ExpansionCoefficients(
                b0=rng.uniform(-2, 2), b1=rng.uniform(-2, 2), b2=rng.uniform(-2, 2),
                r0=rng.uniform(0.1, 2), r1=rng.uniform(-1, 1), r2=rng.uniform(-1, 1))
            pad = [0] * 6
            R = TaylorPoly([0, 0, c.r0, c.r1, c.r2 / 2] + pad)
            ph = TaylorPoly([0, 0, c.b0, c.b1, c.b2 / 2] + pad)
            got = remainder_residue(R, ph, real(5) / 2, b=1, m=2, l=2)
            worst = max(worst, _rel_err(got, phi_second_derivative(c)))
        results.append(("remainder residue (m=2, l=2, lam=5/2) vs phi''",
                        worst <= tol, worst))

        # 5. distance-function expansion on a random cubic worldline
        worst = _worldline_expansion_error(rng)
        results.append(("R(tau, tau-h) series through h^4", worst <= real("1e-8"),
                        worst))

        # 6. Green kernel support and sample value
        g = green_kernel(FourVector(2, 0, 0, 0), 1)
        expect = -1 / (4 * gmpy2.const_pi() ** 2 * real(27) ** real("0.5"))
        ok = (_rel_err(g, expect) <= tol
              and green_kernel(FourVector(0, 1, 0, 0), real("0.5")) == 0
              and green_kernel(FourVector(2, 0, 0, 0), -1) == 0)
        results.append(("green kernel value and lightcone support", ok, _rel_err(g, expect)))

    all_ok = True
    for name, ok, err in results:
        echo(f"{'PASS' if ok else 'FAIL'}  {name}  (worst rel err {float(err):.3g})")
        all_ok = all_ok and ok
    return all_ok


def _limit_pair_residue(n: int, phi: TaylorPoly):
    # Richardson extrapolation of (lam + n) * pair over lam = -n + 10^-k
    vals = []
    for k in (4, 6, 8):
        lam = real(-n) + real(10) ** -k
        vals.append((real(10) ** -k, (lam + n) * gelfand_pair(lam, phi, b=1, m=n)))
    (ha, va), (hb, vb) = vals[1], vals[2]
    # the pairing is analytic around the pole, so the product is linear in h
    return vb + (vb - va) * hb / (ha - hb)


def _quadrature(lam, poly: TaylorPoly, bits: int):
    # independent tanh-sinh quadrature; handles the x^lam endpoint singularity
    import mpmath
    with mpmath.workprec(bits):
        lam_mp = mpmath.mpf(str(lam))
        cs = [mpmath.mpf(str(c)) for c in poly.coeffs]
        f = lambda x: x ** lam_mp * mpmath.polyval(cs[::-1], x)
        val = mpmath.quad(f, [0, 1])
    return real(str(val))


def _worldline_expansion_error(rng):
    from .core import minkowski_dot
    coeffs = [FourVector(0, 0, 0, 0),
              FourVector(1.2, rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), 0),
              FourVector(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), 0, 0),
              FourVector(rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05), 0, 0)]
    z = PolynomialWorldline(coeffs)
    tau = real("0.3")
    zd = z.derivative()
    zdd = zd.derivative()
    zddd = zdd.derivative()
    u, a, j = zd.eval(tau), zdd.eval(tau), zddd.eval(tau)
    c2 = -minkowski_dot(u, u) - 1
    c3 = minkowski_dot(u, a)
    c4 = -minkowski_dot(a, a) / 4 - minkowski_dot(u, j) / 3
    # remainder after the h^4 term is O(h^5), so |R - series|/h^4 shrinks ~ h
    worst = real(0)
    for k in (20, 24):
        h = real(2) ** -k
        exact = worldline_R(z, tau, tau - h)
        approx = c2 * h ** 2 + c3 * h ** 3 + c4 * h ** 4
        worst = max(worst, abs(exact - approx) / h ** 4)
    return worst
