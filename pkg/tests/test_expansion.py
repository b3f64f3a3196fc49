import numpy as np
import pytest

from limitlab.bulk import (bulk_gradient, critical_s, hn_apply, project_in,
                           project_out)
from limitlab.el_solver import ElConfig, ElState, run_el
from limitlab.elastic import elastic_operator
from limitlab.errors import NotCritical
from limitlab.expansion import (build_well_prepared, expand_bulk_gradient,
                                first_corrector, in_kernel_fraction,
                                o1_residual, remainder_energy)
from limitlab.frank import frank_molecular_field
from limitlab.qs_solver import QsState
from limitlab.tensor_ops import (outer, random_director,
                                 random_sym_traceless, uniaxial)

from conftest import smooth_director, smooth_velocity


@pytest.fixture
def el_like_state(grid32, ctx32):
    n = smooth_director(grid32, amp=0.2)
    ndot = np.zeros_like(n)
    return ElState(n, ndot, smooth_velocity(ctx32, amp=0.1))


class TestExpandBulkGradient:
    def test_trivial_inputs(self, rng, bulk111):
        s1 = critical_s(bulk111)[0]
        q0 = uniaxial(random_director(rng), s1)
        z = np.zeros((3, 3))
        terms = expand_bulk_gradient(q0, z, z, z, z, 0.5, bulk111)
        for g in terms.groups:
            assert np.max(np.abs(g)) < 1e-12

    @pytest.mark.parametrize("eps", [1.0, 0.3, 0.1])
    def test_reconstruction_identity(self, rng, bulk111, eps):
        s1 = critical_s(bulk111)[0]
        for _ in range(30):
            q0 = uniaxial(random_director(rng), s1)
            q1, q2, q3, qr = (random_sym_traceless(rng) for _ in range(4))
            terms = expand_bulk_gradient(q0, q1, q2, q3, qr, eps, bulk111)
            target = bulk_gradient(
                q0 + eps * q1 + eps ** 2 * q2 + eps ** 3 * (q3 + qr), bulk111)
            assert np.max(np.abs(terms.reconstruct() - target)) < 1e-11

    def test_first_order_only(self, rng, bulk111):
        # q2 = q3 = qr = 0: groups reduce to Hn(q1), B1(q1,q1), c/3 C(q1^3)
        s1 = critical_s(bulk111)[0]
        n = random_director(rng)
        q0 = uniaxial(n, s1)
        q1 = random_sym_traceless(rng)
        z = np.zeros((3, 3))
        for eps in (1.0, 0.1):
            terms = expand_bulk_gradient(q0, q1, z, z, z, eps, bulk111)
            target = bulk_gradient(q0 + eps * q1, bulk111)
            assert np.max(np.abs(terms.reconstruct() - target)) < 1e-12
            assert np.max(np.abs(terms.groups[1]
                                 - hn_apply(n, q1, bulk111))) < 1e-13

    def test_rejects_noncritical_base(self, rng, bulk111):
        q0 = uniaxial(random_director(rng), 0.9)   # not a critical s
        q1 = random_sym_traceless(rng)
        z = np.zeros((3, 3))
        with pytest.raises(NotCritical):
            expand_bulk_gradient(q0, q1, z, z, z, 0.5, bulk111)


class TestO1Residual:
    def test_equilibrium_zero(self, grid32, ctx32, material_demo):
        n = np.zeros((3,) + grid32.shape)
        n[0] = 1.0
        el = ElState(n, np.zeros_like(n), np.zeros_like(n))
        res = o1_residual(el, material_demo, ctx32)
        assert np.max(np.abs(res)) < 1e-12

    def test_static_reduction_cross_check(self, grid32, ctx32, material_demo):
        # n varying, v = 0, ndot = 0, J-term ignored via ndot=0 and h-balance:
        # P_in(residual)'s elastic part equals the Frank field projection
        p = material_demo
        s1 = p.s1
        n = smooth_director(grid32, amp=0.2)
        el = ElState(n, np.zeros_like(n), np.zeros_like(n))
        q0 = uniaxial(n, s1)
        lq0 = elastic_operator(q0, p.elastic, ctx32)
        lp = p.leslie()
        h = frank_molecular_field(n, lp, ctx32)
        hperp = h - np.einsum('i...,i...->...', h, n) * n
        pred = (outer(n, hperp) + outer(hperp, n)) / (2 * s1)
        assert np.max(np.abs(project_in(n, -lq0) - pred)) < 1e-8

    def test_in_kernel_fraction_small_on_el_states(self, grid32, ctx32,
                                                   material_demo,
                                                   el_like_state):
        # the multiplier solve makes the tangential balance hold pointwise
        frac0 = in_kernel_fraction(el_like_state, material_demo, ctx32)
        assert frac0 <= 1e-6
        # and it stays small along an actual trajectory
        lp = material_demo.leslie()
        evolved = run_el(el_like_state.copy(),
                         ElConfig(leslie=lp, dt=0.002, t_end=0.05), ctx32)
        assert in_kernel_fraction(evolved, material_demo, ctx32) <= 1e-6


class TestWellPrepared:
    def test_order_zero_constant(self, grid32, ctx32, material_demo):
        n = np.zeros((3,) + grid32.shape)
        n[0] = 1.0
        st = build_well_prepared(n, np.zeros_like(n), np.zeros_like(n),
                                 material_demo, 0, ctx32)
        assert np.max(np.abs(st.q - uniaxial(n, material_demo.s1))) < 1e-14
        assert np.max(np.abs(st.qdot)) == 0.0

    def test_corrector_properties(self, grid32, ctx32, material_demo,
                                  el_like_state):
        p = material_demo
        q1p = first_corrector(el_like_state, p, ctx32)
        n = el_like_state.n
        res = o1_residual(el_like_state, p, ctx32)
        assert np.max(np.abs(hn_apply(n, q1p, p.bulk)
                             - project_out(n, res))) < 1e-9
        assert np.max(np.abs(q1p - project_out(n, q1p))) < 1e-9

    def test_linear_scaling_in_eps(self, grid32, ctx32, material_demo,
                                   el_like_state):
        s1 = material_demo.s1
        q0 = uniaxial(el_like_state.n, s1)
        norms = []
        for eps in (0.1, 0.05, 0.025):
            p = material_demo.with_eps(eps)
            st = build_well_prepared(el_like_state.n, el_like_state.ndot,
                                     el_like_state.v, p, 1, ctx32)
            norms.append(ctx32.l2_norm(st.q - q0))
        assert norms[0] / norms[1] == pytest.approx(2.0, rel=1e-10)
        assert norms[1] / norms[2] == pytest.approx(2.0, rel=1e-10)

    def test_qdot_matches_director_rate(self, grid32, ctx32, material_demo,
                                        el_like_state, rng):
        from limitlab.grid import random_band_limited
        ndot = random_band_limited(ctx32, rng, shape=(3,), amplitude=0.1)
        ndot -= np.einsum('i...,i...->...', ndot, el_like_state.n) \
            * el_like_state.n
        st = build_well_prepared(el_like_state.n, ndot, el_like_state.v,
                                 material_demo, 0, ctx32)
        s1 = material_demo.s1
        expected = s1 * (outer(ndot, el_like_state.n)
                         + outer(el_like_state.n, ndot))
        assert np.max(np.abs(st.qdot - expected)) < 1e-13


class TestRemainderEnergy:
    def test_zero_on_exact_truncation(self, grid32, ctx32, material_demo,
                                      el_like_state):
        st = build_well_prepared(el_like_state.n, el_like_state.ndot,
                                 el_like_state.v, material_demo, 1, ctx32)
        qs = QsState(st.q.copy(), st.qdot.copy(), el_like_state.v.copy(), 0.0)
        assert remainder_energy(qs, el_like_state, material_demo, 1,
                                ctx32) == pytest.approx(0.0, abs=1e-12)

    def test_blocks_nonnegative(self, grid32, ctx32, material_demo,
                                el_like_state, rng):
        # Hn + eps L quadratic blocks are non-negative for any discrepancy
        from limitlab.grid import random_band_limited
        from limitlab.tensor_ops import sym_traceless
        st = build_well_prepared(el_like_state.n, el_like_state.ndot,
                                 el_like_state.v, material_demo, 1, ctx32)
        bump = 0.01 * sym_traceless(
            random_band_limited(ctx32, rng, shape=(3, 3)))
        qs = QsState(st.q + bump, st.qdot.copy(), el_like_state.v.copy(), 0.0)
        val = remainder_energy(qs, el_like_state, material_demo, 1, ctx32)
        assert val > 0.0

    def test_norm_power_override(self, grid32, ctx32, material_demo,
                                 el_like_state, rng):
        from limitlab.grid import random_band_limited
        from limitlab.tensor_ops import sym_traceless
        st = build_well_prepared(el_like_state.n, el_like_state.ndot,
                                 el_like_state.v, material_demo, 1, ctx32)
        bump = 0.01 * sym_traceless(
            random_band_limited(ctx32, rng, shape=(3, 3)))
        qs = QsState(st.q + bump, st.qdot.copy(), el_like_state.v.copy(), 0.0)
        eps = material_demo.eps
        default = remainder_energy(qs, el_like_state, material_demo, 1, ctx32)
        override = remainder_energy(qs, el_like_state, material_demo, 1,
                                    ctx32, norm_power=1)
        assert default == pytest.approx(override / eps ** 2, rel=1e-12)
