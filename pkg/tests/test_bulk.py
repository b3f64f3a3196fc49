import numpy as np
import pytest

from limitlab.bulk import (BulkParams, ElasticParams, bulk_energy,
                           bulk_gradient, critical_s, critical_tensor,
                           hn_apply, hn_inverse, linearized_gradient,
                           project_in, project_out)
from limitlab.errors import DegenerateBulk, NonUnitDirector, NotInRange
from limitlab.tensor_ops import (frobenius, outer, random_director,
                                 random_sym_traceless, uniaxial)

E1 = np.array([1.0, 0.0, 0.0])


class TestCriticalS:
    def test_unit_coefficients(self):
        s1, s2 = critical_s(BulkParams(1, 1, 1))
        assert s1 == pytest.approx(1.5, abs=1e-15)
        assert s2 == pytest.approx(-1.0, abs=1e-15)

    def test_zero_a(self):
        s1, s2 = critical_s(BulkParams(0, 1, 1))
        assert s1 == pytest.approx(0.5, abs=1e-15)
        assert s2 == pytest.approx(0.0, abs=1e-15)

    def test_quadratic_residual(self, rng):
        for _ in range(50):
            bp = BulkParams(rng.uniform(0, 2), rng.uniform(0, 2),
                            rng.uniform(0.2, 2))
            s1, s2 = critical_s(bp)
            for s in (s1, s2):
                assert abs(2 * bp.c * s * s - bp.b * s - 3 * bp.a) < 1e-12
            assert s1 >= s2

    def test_gradient_vanishes_at_critical_point(self, rng):
        for _ in range(200):
            bp = BulkParams(rng.uniform(0, 2), rng.uniform(0, 2),
                            rng.uniform(0.2, 2))
            n = random_director(rng)
            q = uniaxial(n, critical_s(bp)[0])
            assert np.max(np.abs(bulk_gradient(q, bp))) < 1e-11

    def test_degenerate_c(self):
        with pytest.raises(DegenerateBulk):
            critical_s(BulkParams(1, 1, 0))


class TestBulkEnergyGradient:
    def test_gradient_zero_at_zero(self, bulk111):
        assert np.allclose(bulk_gradient(np.zeros((3, 3)), bulk111), 0.0)

    def test_gradient_pure_a(self):
        bp = BulkParams(1.0, 0.0, 0.0)
        q = uniaxial(E1, 1.0)
        assert np.allclose(bulk_gradient(q, bp), -q, atol=1e-15)

    def test_energy_zero_at_zero(self, bulk111):
        assert bulk_energy(np.zeros((3, 3)), bulk111) == 0.0

    def test_energy_worked_example(self, bulk111):
        # tr Q^2 = 2/3, tr Q^3 = 2/9 for uniaxial(e1, 1)
        val = bulk_energy(uniaxial(E1, 1.0), bulk111)
        expected = -0.5 * (2 / 3) - (1 / 3) * (2 / 9) + 0.25 * (2 / 3) ** 2
        assert val == pytest.approx(expected, abs=1e-15)
        assert val == pytest.approx(-0.2962962962962963, abs=1e-13)

    @pytest.mark.parametrize("h", [1e-4])
    def test_gradient_matches_finite_differences(self, rng, bulk111, h):
        worst = 0.0
        for _ in range(20):
            q = random_sym_traceless(rng)
            d = random_sym_traceless(rng)
            fd = (bulk_energy(q + h * d, bulk111)
                  - bulk_energy(q - h * d, bulk111)) / (2 * h)
            an = frobenius(bulk_gradient(q, bulk111), d)
            worst = max(worst, abs(fd - an) / max(abs(an), 1e-12))
        assert worst < 1e-5

    def test_gradient_fd_error_scales_second_order(self, rng, bulk111):
        q = random_sym_traceless(rng)
        d = random_sym_traceless(rng)
        an = frobenius(bulk_gradient(q, bulk111), d)

        def fd_err(h):
            fd = (bulk_energy(q + h * d, bulk111)
                  - bulk_energy(q - h * d, bulk111)) / (2 * h)
            return abs(fd - an)

        e1, e2 = fd_err(1e-2), fd_err(5e-3)
        assert e1 / e2 == pytest.approx(4.0, rel=0.2)


class TestLinearizedOperator:
    def test_matches_derivative_of_gradient(self, rng, bulk111):
        s1 = critical_s(bulk111)[0]
        for _ in range(50):
            n = random_director(rng)
            q0 = uniaxial(n, s1)
            p = random_sym_traceless(rng)
            diff = hn_apply(n, p, bulk111) - linearized_gradient(q0, p, bulk111)
            assert np.max(np.abs(diff)) < 1e-13

    def test_kernel_annihilation(self, rng, bulk111):
        for _ in range(100):
            n = random_director(rng)
            m = rng.normal(size=3)
            m -= (m @ n) * n
            ker = outer(n, m) + outer(m, n)
            assert np.max(np.abs(hn_apply(n, ker, bulk111))) < 1e-13

    def test_uniaxial_eigenvalue(self, bulk111):
        # a=b=c=1, s=1.5: (4 c s^2 - b s)/3 = 2.5
        q = uniaxial(E1, 1.0)
        assert np.allclose(hn_apply(E1, q, bulk111), 2.5 * q, atol=1e-14)

    def test_positive_semidefinite(self, rng, bulk111):
        n = random_director(rng, shape=(2000,))
        q = random_sym_traceless(rng, shape=(2000,))
        vals = frobenius(hn_apply(n, q, bulk111), q)
        assert np.min(vals) > -1e-12

    def test_coercive_on_complement(self, rng, bulk111):
        n = random_director(rng, shape=(10_000,))
        q = project_out(n, random_sym_traceless(rng, shape=(10_000,)))
        norm2 = frobenius(q, q)
        keep = norm2 > 1e-8
        rayleigh = frobenius(hn_apply(n, q, bulk111), q)[keep] / norm2[keep]
        assert np.min(rayleigh) > 0.0

    def test_self_adjoint(self, rng, bulk111):
        n = random_director(rng, shape=(500,))
        p = random_sym_traceless(rng, shape=(500,))
        q = random_sym_traceless(rng, shape=(500,))
        lhs = frobenius(hn_apply(n, p, bulk111), q)
        rhs = frobenius(p, hn_apply(n, q, bulk111))
        assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_non_unit_director_rejected(self, bulk111):
        with pytest.raises(NonUnitDirector):
            uniaxial(np.array([2.0, 0.0, 0.0]), 1.0)


class TestHnInverse:
    def test_zero(self, bulk111):
        assert np.allclose(hn_inverse(E1, np.zeros((3, 3)), bulk111), 0.0)

    def test_uniaxial_worked_example(self, bulk111):
        q = uniaxial(E1, 1.0)
        assert np.allclose(hn_inverse(E1, q, bulk111), 0.4 * q, atol=1e-14)

    def test_round_trip(self, rng, bulk111):
        n = random_director(rng, shape=(1000,))
        qperp = project_out(n, random_sym_traceless(rng, shape=(1000,)))
        back = hn_apply(n, hn_inverse(n, qperp, bulk111), bulk111)
        assert np.max(np.abs(back - qperp)) < 1e-10

    def test_rejects_in_kernel_input(self, rng, bulk111):
        n = random_director(rng)
        m = rng.normal(size=3)
        m -= (m @ n) * n
        ker = outer(n, m) + outer(m, n)
        with pytest.raises(NotInRange):
            hn_inverse(n, ker, bulk111)

    def test_degenerate_pole(self):
        # 4 c s - b = 0 at a = -... choose b, c with s1 = b/(4c):
        # s1 = (b + sqrt(b^2+24ac))/(4c) equals b/(4c) only if a = 0 and
        # then s1 = b/(2c); force the pole via explicit s
        bp = BulkParams(0.0, 1.0, 1.0)
        with pytest.raises(DegenerateBulk):
            hn_inverse(E1, uniaxial(E1, 1.0), bp, s=bp.b / (4 * bp.c))


class TestProjections:
    def test_kernel_element_projects_out_to_zero(self, bulk111):
        e2 = np.array([0.0, 1.0, 0.0])
        ker = outer(E1, e2) + outer(e2, E1)
        assert np.max(np.abs(project_out(E1, ker))) < 1e-15

    def test_uniaxial_is_out_of_kernel(self):
        q = uniaxial(E1, 1.0)
        assert np.allclose(project_out(E1, q), q, atol=1e-15)

    def test_idempotence_and_orthogonality(self, rng):
        n = random_director(rng, shape=(500,))
        q = random_sym_traceless(rng, shape=(500,))
        p = random_sym_traceless(rng, shape=(500,))
        pin = project_in(n, q)
        pout = project_out(n, q)
        assert np.max(np.abs(project_in(n, pin) - pin)) < 1e-13
        assert np.max(np.abs(project_out(n, pout) - pout)) < 1e-13
        assert np.max(np.abs(project_in(n, pout))) < 1e-13
        assert np.max(np.abs(frobenius(project_in(n, q), project_out(n, p)))) < 1e-13
        assert np.max(np.abs(pin + pout - q)) < 1e-14


def test_elastic_params_positivity():
    with pytest.raises(DegenerateBulk):
        ElasticParams(L1=-1.0, L2=0.0, L3=0.0)
    with pytest.raises(DegenerateBulk):
        ElasticParams(L1=1.0, L2=-0.6, L3=-0.6)
    ElasticParams(L1=1.0, L2=-0.4, L3=-0.4)  # admissible: sum 0.2 > 0


def test_critical_tensor_shorthand(rng, bulk111):
    n = random_director(rng)
    assert np.allclose(critical_tensor(n, bulk111), uniaxial(n, 1.5),
                       atol=1e-15)
