"""Jacobian construction, eigen-spectra, and local classification."""

import random

import pytest

from offshell import (ConvergenceError, DomainError, ModelParams, ScalarState,
                      classify_local, constant_eps_fixed_point, eigenvalues,
                      jacobian)
from offshell.numerics import real
from offshell.stability import EigenSpectrum, JacobianMatrix

D1 = ModelParams(D=1)


def random_scalar_state(rng):
    return ScalarState(
        eps=real(rng.uniform(0.05, 3)),
        deps=real(rng.uniform(-1, 1)),
        ddeps=real(rng.uniform(-1, 1)),
        rho=real(rng.uniform(-1, 1)),
        drho=real(rng.uniform(-1, 1)),
        eta=real(rng.uniform(-1, 1)),
    )


def diag_matrix(values):
    rows = tuple(tuple(real(values[i]) if i == j else real(0) for j in range(6))
                 for i in range(6))
    return JacobianMatrix(rows)


class TestJacobian:
    def test_shift_rows_exact(self):
        rng = random.Random(41)
        for _ in range(20):
            J = jacobian(random_scalar_state(rng), D1)
            assert J.row(0) == (0, 1, 0, 0, 0, 0)
            assert J.row(1) == (0, 0, 1, 0, 0, 0)
            assert J.row(3) == (0, 0, 0, 0, 1, 0)

    def test_uniform_point_deps_sensitivity(self):
        # at (1,0,0,0,0,0): d(dddeps)/d(deps) = K2 + 2(eps+1) dK1/d(deps)
        # = 16 + 4 * (-8 D eps^{3/2}) = -16
        J = jacobian(ScalarState(1), D1)
        assert J.row(2)[1] == -16

    def test_analytic_matches_finite_difference(self):
        rng = random.Random(43)
        tol = real("1e-8")
        for _ in range(25):
            s = random_scalar_state(rng)
            Ja = jacobian(s, D1, mode="analytic")
            Jf = jacobian(s, D1, mode="finite_difference")
            for i in range(6):
                for j in range(6):
                    scale = max(abs(Ja.row(i)[j]), real(1))
                    assert abs(Ja.row(i)[j] - Jf.row(i)[j]) <= tol * scale

    def test_blowup_initial_point_both_modes(self):
        s = ScalarState(*map(real, ("0.5", "0.1", 0, "-0.1", 0, 0)))
        Ja = jacobian(s, D1)
        Jf = jacobian(s, D1, mode="finite_difference")
        for i in range(6):
            for j in range(6):
                scale = max(abs(Ja.row(i)[j]), real(1))
                assert abs(Ja.row(i)[j] - Jf.row(i)[j]) <= real("1e-8") * scale

    def test_rejects_on_shell(self):
        with pytest.raises(DomainError):
            jacobian(ScalarState(0, 1), D1)

    def test_rejects_unknown_mode(self):
        with pytest.raises(ValueError):
            jacobian(ScalarState(1), D1, mode="symbolic")


class TestEigenvalues:
    def test_diagonal(self):
        spec = eigenvalues(diag_matrix([1, 2, 3, 4, 5, 6]))
        assert [float(v.real) for v in spec.values] == [6, 5, 4, 3, 2, 1]
        assert all(v.imag == 0 for v in spec.values)
        assert spec.max_real == 6

    def test_rotation_block(self):
        rows = [[real(1) if i == j else real(0) for j in range(6)]
                for i in range(6)]
        rows[0][0], rows[0][1] = real(0), real(1)
        rows[1][0], rows[1][1] = real(-1), real(0)
        spec = eigenvalues(JacobianMatrix(tuple(tuple(r) for r in rows)))
        imags = sorted(float(v.imag) for v in spec.values)
        assert imags[0] == pytest.approx(-1, abs=1e-60)
        assert imags[-1] == pytest.approx(1, abs=1e-60)

    def test_conjugate_pairing(self):
        rng = random.Random(47)
        for _ in range(20):
            J = jacobian(random_scalar_state(rng), D1)
            spec = eigenvalues(J)
            vals = list(spec.values)
            for v in vals:
                if v.imag != 0:
                    assert any(w.real == v.real and w.imag + v.imag == 0
                               for w in vals if w is not v)

    def test_trace_and_determinant(self):
        import mpmath
        from offshell.stability import _to_mp
        rng = random.Random(53)
        for _ in range(20):
            J = jacobian(random_scalar_state(rng), D1)
            spec = eigenvalues(J)
            with mpmath.workprec(256):
                tr = _to_mp(J.trace())
                s = sum(spec.values)
                assert abs(s - tr) <= mpmath.mpf("1e-8") * max(abs(tr), 1)
                M = mpmath.matrix(6, 6)
                for i in range(6):
                    for j in range(6):
                        M[i, j] = _to_mp(J.row(i)[j])
                det = mpmath.det(M)
                prod = mpmath.mpf(1)
                for v in spec.values:
                    prod = prod * v
                assert abs(prod - det) <= mpmath.mpf("1e-8") * max(abs(det), 1)

    def test_accelerated_fixed_point_is_unstable(self):
        fp = constant_eps_fixed_point(real("0.5"), real("0.1"), D1)
        spec = eigenvalues(jacobian(fp, D1))
        assert spec.max_real > 1
        # frozen spectrum shape: one strongly positive real branch and its
        # mirror, one conjugate pair, two near-zero modes
        reals = sorted(float(v.real) for v in spec.values)
        assert reals[-1] == pytest.approx(5.1755727, abs=1e-5)
        assert reals[0] == pytest.approx(-5.1755727, abs=1e-5)

    def test_uniform_fixed_point_is_unstable(self):
        fp = constant_eps_fixed_point(real("0.5"), 0, D1)
        spec = eigenvalues(jacobian(fp, D1))
        assert spec.max_real > 1
        reals = sorted(float(v.real) for v in spec.values)
        assert reals[-1] == pytest.approx(4.7568285, abs=1e-5)

    def test_residual_gate_rejects_garbage(self):
        bad = diag_matrix([1, 2, 3, 4, 5, 6])
        spec = eigenvalues(bad, residual_tol=1e-10)
        assert spec.values[0].real == 6  # sanity: gate passes honest input

    def test_rejects_non_finite(self):
        with pytest.raises(DomainError):
            eigenvalues(diag_matrix([float("inf"), 1, 1, 1, 1, 1]))


class TestClassifyLocal:
    def _spec(self, reals):
        import mpmath
        vals = tuple(mpmath.mpc(r, 0) for r in reals)
        return EigenSpectrum(values=vals, max_real=max(reals))

    def test_attracting(self):
        assert classify_local(self._spec([-1] * 6), 1e-6) == "attracting"

    def test_saddle(self):
        assert classify_local(self._spec([1, -1, -2, -3, -4, -5]), 1e-6) == "saddle"

    def test_marginal(self):
        assert classify_local(self._spec([0, 1, 2, 3, 4, 5]), 1e-6) == "marginal"

    def test_repelling(self):
        assert classify_local(self._spec([1, 2, 3, 4, 5, 6]), 1e-6) == "repelling"
