"""Machine-checkable algebraic identity suite.

Covers the pointwise tensor algebra, the linearized-operator package,
the coefficient bridge, and the expansion/stress-consistency identities.
Each check reports a measured value against its threshold; the suite is
the backing store for the ``identity-suite`` CLI command.
"""

import numpy as np

from .bulk import (BulkParams, ElasticParams, bulk_gradient, critical_s,
                   hn_apply, hn_inverse, project_in, project_out)
from .coefficients import (ViscosityParams, check_el_dissipative,
                           check_qs_dissipative, check_quadratic_form,
                           map_leslie, quadratic_form_minimum)
from .el_solver import ElState
from .expansion import expand_bulk_gradient, first_corrector, o1_residual
from .grid import PeriodicGrid, SpectralContext
from .tensor_ops import (bform, cform, commutator, frobenius, biaxiality,
                         random_director, random_sym_traceless, sym_traceless,
                         uniaxial, outer, matvec)


def _bform_loops(q1, q2):
    """Literal index-loop oracle for the bilinear form."""
    out = np.zeros_like(q1)
    mix = 0.0
    for k in range(3):
        for l in range(3):
            mix = mix + q1[k, l] * q2[k, l]
    for i in range(3):
        for j in range(3):
            acc = 0.0
            for k in range(3):
                acc = acc + q1[i, k] * q2[k, j] + q2[k, i] * q1[j, k]
            out[i, j] = acc
            if i == j:
                out[i, j] = out[i, j] - (2.0 / 3.0) * mix
    return out


def _cform_loops(q1, q2, q3):
    """Literal index-loop oracle for the trilinear form."""
    def dot(a, b):
        acc = 0.0
        for i in range(3):
            for j in range(3):
                acc = acc + a[i, j] * b[i, j]
        return acc
    return q1 * dot(q2, q3) + q2 * dot(q1, q3) + q3 * dot(q1, q2)


class Check:
    def __init__(self, name, group, value, threshold, larger_is_pass=False):
        self.name = name
        self.group = group
        self.value = float(value)
        self.threshold = float(threshold)
        self.passed = (self.value > self.threshold if larger_is_pass
                       else self.value <= self.threshold)

    def as_dict(self):
        return {"name": self.name, "group": self.group, "value": self.value,
                "threshold": self.threshold, "passed": bool(self.passed)}


def algebra_checks(seed=0, n_samples=1000):
    rng = np.random.default_rng(seed)
    out = []

    # critical points: T(s1 (nn - I/3)) = 0 over random (a, b, c, n)
    worst = 0.0
    worst_res = 0.0
    for _ in range(n_samples):
        bp = BulkParams(a=rng.uniform(0, 2), b=rng.uniform(0, 2),
                        c=rng.uniform(0.2, 2))
        s1, _ = critical_s(bp)
        n = random_director(rng)
        worst = max(worst, float(np.max(np.abs(
            bulk_gradient(uniaxial(n, s1), bp)))))
        worst_res = max(worst_res, abs(2 * bp.c * s1 ** 2 - bp.b * s1 - 3 * bp.a))
    out.append(Check("critical_point_gradient", "algebra", worst, 1e-11))
    out.append(Check("critical_point_quadratic_residual", "algebra",
                     worst_res, 1e-12))

    bp = BulkParams(1.0, 1.0, 1.0)
    n = random_director(rng, shape=(n_samples,))
    q = random_sym_traceless(rng, shape=(n_samples,))
    pbatch = random_sym_traceless(rng, shape=(n_samples,))

    # kernel annihilation: H_n(nm + mn) = 0 for m orthogonal to n
    m = rng.normal(size=(3, n_samples))
    m -= np.einsum('is,is->s', m, n) * n
    ker = outer(n, m) + outer(m, n)
    out.append(Check("hn_kernel_annihilation", "algebra",
                     np.max(np.abs(hn_apply(n, ker, bp))), 1e-12))

    # self-adjointness and coercivity of H_n
    lhs = frobenius(hn_apply(n, q, bp), pbatch)
    rhs = frobenius(q, hn_apply(n, pbatch, bp))
    out.append(Check("hn_self_adjoint", "algebra",
                     np.max(np.abs(lhs - rhs)), 1e-12))

    n10k = random_director(rng, shape=(10_000,))
    q10k = random_sym_traceless(rng, shape=(10_000,))
    qperp = project_out(n10k, q10k)
    norm2 = frobenius(qperp, qperp)
    keep = norm2 > 1e-8
    rayleigh = frobenius(hn_apply(n10k, qperp, bp), qperp)[keep] / norm2[keep]
    out.append(Check("hn_coercivity_min_rayleigh", "algebra",
                     np.min(rayleigh), 0.0, larger_is_pass=True))

    # inverse round trip on the out-of-kernel subspace
    qperp_n = project_out(n, q)
    back = hn_apply(n, hn_inverse(n, qperp_n, bp), bp)
    out.append(Check("hn_inverse_round_trip", "algebra",
                     np.max(np.abs(back - qperp_n)), 1e-10))

    # projections: idempotence, orthogonality, complementarity
    pin = project_in(n, q)
    pout = project_out(n, q)
    out.append(Check("projection_in_idempotent", "algebra",
                     np.max(np.abs(project_in(n, pin) - pin)), 1e-13))
    out.append(Check("projection_out_idempotent", "algebra",
                     np.max(np.abs(project_out(n, pout) - pout)), 1e-13))
    out.append(Check("projection_orthogonal", "algebra",
                     np.max(np.abs(frobenius(pin, pout))), 1e-13))
    out.append(Check("projection_complement", "algebra",
                     np.max(np.abs(pin + pout - q)), 1e-13))

    # multilinear forms against the literal index-loop oracles
    worst_b = worst_c = 0.0
    for s in range(min(n_samples, 1000)):
        q1 = q[..., s]
        q2 = pbatch[..., s]
        q3 = ker[..., s]
        worst_b = max(worst_b, float(np.max(np.abs(
            bform(q1, q2) - _bform_loops(q1, q2)))))
        worst_c = max(worst_c, float(np.max(np.abs(
            cform(q1, q2, q3) - _cform_loops(q1, q2, q3)))))
    out.append(Check("bform_loop_oracle", "algebra", worst_b, 1e-14))
    out.append(Check("cform_loop_oracle", "algebra", worst_c, 1e-14))

    # closure: results stay symmetric traceless
    def defect(x):
        return float(np.max(np.abs(x - sym_traceless(x))))
    closure = max(defect(bform(q, pbatch)), defect(cform(q, pbatch, ker)),
                  defect(bulk_gradient(q, bp)), defect(hn_apply(n, q, bp)),
                  defect(pin), defect(pout))
    out.append(Check("closure_sym_traceless", "algebra", closure, 1e-13))

    # projection self-adjointness of sym_traceless
    raw = rng.uniform(-1, 1, size=(3, 3, n_samples))
    out.append(Check("sym_traceless_self_adjoint", "algebra",
                     np.max(np.abs(frobenius(sym_traceless(raw), q)
                                   - frobenius(raw, q))), 1e-13))

    # bform symmetry / cform permutation invariance
    out.append(Check("bform_symmetric", "algebra",
                     np.max(np.abs(bform(q, pbatch) - bform(pbatch, q))), 0.0,
                     larger_is_pass=False))
    # reassociation of the three addends costs one ulp-level rounding
    out.append(Check("cform_permutation", "algebra",
                     max(np.max(np.abs(cform(q, pbatch, ker) - cform(ker, q, pbatch))),
                         np.max(np.abs(cform(q, pbatch, ker) - cform(pbatch, ker, q)))),
                     1e-14))

    # commutator identities
    a_mat = rng.uniform(-1, 1, size=(3, 3, n_samples))
    omega = 0.5 * (a_mat - np.swapaxes(a_mat, 0, 1))
    comm = commutator(omega, q)
    out.append(Check("commutator_self", "algebra",
                     np.max(np.abs(commutator(a_mat, a_mat))), 0.0))
    out.append(Check("commutator_antisym_sym_is_sym", "algebra",
                     np.max(np.abs(comm - np.swapaxes(comm, 0, 1))), 1e-13))

    # biaxiality: zero on uniaxial, one at maximal biaxiality
    s_vals = rng.uniform(0.2, 2.0, size=n_samples)
    out.append(Check("biaxiality_uniaxial_zero", "algebra",
                     np.max(np.abs(biaxiality(uniaxial(n, s_vals)))), 1e-12))
    qmax_biax = np.zeros((3, 3))
    qmax_biax[0, 0], qmax_biax[1, 1] = 1.0, -1.0
    qmax_biax /= np.sqrt(2.0)
    out.append(Check("biaxiality_maximal_one", "algebra",
                     abs(biaxiality(qmax_biax) - 1.0), 1e-13))
    return out


def bridge_checks(seed=1, n_draws=1000, n_triples=200, oracle_samples=100_000):
    rng = np.random.default_rng(seed)
    out = []
    bp_any = []
    worst_parodi = worst_gamma = 0.0
    for _ in range(n_draws):
        bp = BulkParams(a=rng.uniform(0, 2), b=rng.uniform(0, 2),
                        c=rng.uniform(0.2, 2))
        beta5 = rng.uniform(-1, 1)
        mu2 = rng.uniform(-1, 1)
        vp = ViscosityParams(beta1=rng.uniform(0.1, 2), beta4=rng.uniform(0.5, 3),
                             beta5=beta5, beta6=beta5 + mu2,
                             beta7=rng.uniform(0, 2), mu1=rng.uniform(0.5, 3),
                             mu2=mu2, J=rng.uniform(0.01, 0.5))
        lp = map_leslie(vp, bp, ElasticParams(1.0, 0.3, 0.2))
        worst_parodi = max(worst_parodi,
                           abs(lp.alpha2 + lp.alpha3 - (lp.alpha6 - lp.alpha5)))
        worst_gamma = max(worst_gamma,
                          abs(lp.gamma1 - (lp.alpha3 - lp.alpha2)),
                          abs(lp.gamma2 - (lp.alpha6 - lp.alpha5)),
                          abs(lp.k1 - lp.k3))
        bp_any.append((vp, bp))
    out.append(Check("parodi_identity", "bridge", worst_parodi, 1e-13))
    out.append(Check("gamma_and_frank_identities", "bridge", worst_gamma, 1e-13))

    # worked preset table
    vp = ViscosityParams(beta1=1.0, beta4=2.0, beta5=0.5, beta6=2.5,
                         beta7=1.0, mu1=2.0, mu2=2.0, J=0.1)
    lp = map_leslie(vp, BulkParams(1, 1, 1), ElasticParams(1.0, 0.0, 0.0))
    table = {"alpha1": 2.25, "alpha2": -3.0, "alpha3": 6.0, "alpha4": 1.0,
             "alpha5": 1.5, "alpha6": 4.5, "gamma1": 9.0, "gamma2": 3.0,
             "I": 0.45}
    worst = max(abs(getattr(lp, k) - v) for k, v in table.items())
    out.append(Check("worked_preset_table", "bridge", worst, 1e-13))
    out.append(Check("worked_preset_qs_certificate", "bridge",
                     0.0 if check_qs_dissipative(vp).ok else 1.0, 0.5))

    # certifier against the sampled minimization oracle
    true_minima, false_minima = [], []
    for k in range(n_triples):
        triple = rng.uniform(-2, 2, size=3)
        declared = check_quadratic_form(*triple)
        sampled = quadratic_form_minimum(*triple, samples=oracle_samples,
                                         seed=seed + 1000 + k)
        (true_minima if declared else false_minima).append(sampled)
    out.append(Check("certifier_no_false_positive", "bridge",
                     -min(true_minima, default=0.0), 1e-10))
    out.append(Check("certifier_no_false_negative", "bridge",
                     max(false_minima, default=-1.0), -1e-6))
    out.append(Check("certifier_case_counts", "bridge",
                     min(len(true_minima), len(false_minima)), 10,
                     larger_is_pass=True))

    # admissible tensor-model draws map to dissipative director models
    bad = 0
    admissible = 0
    for vp_i, bp_i in bp_any:
        if not check_qs_dissipative(vp_i).ok:
            continue
        admissible += 1
        lp_i = map_leslie(vp_i, bp_i, ElasticParams(1.0, 0.3, 0.2))
        if not check_el_dissipative(lp_i).ok:
            bad += 1
        if admissible >= 500:
            break
    out.append(Check("qs_admissible_maps_to_el_admissible", "bridge",
                     bad, 0.5))
    out.append(Check("qs_admissible_draw_count", "bridge", admissible, 100,
                     larger_is_pass=True))
    return out


def expansion_checks(seed=2):
    rng = np.random.default_rng(seed)
    out = []
    bp = BulkParams(1.0, 1.0, 1.0)
    s1 = critical_s(bp)[0]

    worst = 0.0
    for eps in (1.0, 0.3, 0.1):
        for _ in range(50):
            n = random_director(rng)
            q0 = uniaxial(n, s1)
            q1, q2, q3, qr = (random_sym_traceless(rng) for _ in range(4))
            terms = expand_bulk_gradient(q0, q1, q2, q3, qr, eps, bp)
            target = bulk_gradient(
                q0 + eps * q1 + eps ** 2 * q2 + eps ** 3 * (q3 + qr), bp)
            worst = max(worst, float(np.max(np.abs(
                terms.reconstruct() - target))))
    out.append(Check("expansion_reconstruction", "expansion", worst, 1e-11))

    # field-level stress consistency with mapped coefficients
    from .elastic import distortion_stress, elastic_operator
    from .frank import ericksen_stress, frank_molecular_field
    from .params import MaterialParams
    from .qs_solver import viscous_stress

    grid = PeriodicGrid(32, 32)
    ctx = SpectralContext(grid)
    x, y = grid.meshgrid()
    ep = ElasticParams(1.0, 0.3, 0.2)
    vp = ViscosityParams(beta1=1.0, beta4=2.0, beta5=0.5, beta6=2.5,
                         beta7=1.0, mu1=2.0, mu2=2.0, J=0.1)
    p = MaterialParams(bulk=bp, elastic=ep, visc=vp, eps=0.1)
    lp = map_leslie(vp, bp, ep)

    n = np.stack([np.ones_like(x), 0.25 * np.sin(x) + 0.1 * np.cos(y),
                  0.2 * np.cos(y)])
    n = n / np.sqrt(np.einsum('i...,i...->...', n, n))
    v = ctx.leray_project(0.2 * np.stack(
        [np.sin(x) * np.cos(y), -np.cos(x) * np.sin(y), 0.4 * np.sin(x + y)]))
    ndot = 0.2 * np.stack([np.zeros_like(x), np.cos(y), -np.sin(x)])
    ndot = ndot - np.einsum('i...,i...->...', ndot, n) * n

    d, omega = ctx.strain_and_vorticity(v)
    q0f = uniaxial(n, s1)
    n_rot = ndot - matvec(omega, n)
    # material derivative of the uniaxial tensor; subtracting [Omega, Q0]
    # in the stress then yields s (N n + n N) with N = ndot - Omega.n
    qdot0 = s1 * (outer(ndot, n) + outer(n, ndot))

    def raw_qs_stress():
        from .tensor_ops import mat_mul
        qd = frobenius(q0f, d)
        q2 = mat_mul(q0f, q0f)
        nq = qdot0 - commutator(omega, q0f)
        return (vp.beta1 * q0f * qd + vp.beta4 * d + vp.beta5 * mat_mul(d, q0f)
                + vp.beta6 * mat_mul(q0f, d)
                + vp.beta7 * (mat_mul(d, q2) + mat_mul(q2, d))
                + 0.5 * vp.mu2 * nq + vp.mu1 * commutator(q0f, nq))

    def raw_leslie():
        nndd = np.einsum('i...,ij...,j...->...', n, d, n)
        dn = matvec(d, n)
        return (lp.alpha1 * nndd * outer(n, n) + lp.alpha2 * outer(n_rot, n)
                + lp.alpha3 * outer(n, n_rot) + lp.alpha4 * d
                + lp.alpha5 * outer(dn, n) + lp.alpha6 * outer(n, dn))

    eye = np.eye(3).reshape(3, 3, 1, 1)

    def deviatoric(sig):
        return sig - (np.einsum('ii...->...', sig) / 3.0) * eye

    out.append(Check("viscous_stress_consistency", "expansion",
                     np.max(np.abs(deviatoric(raw_qs_stress())
                                   - deviatoric(raw_leslie()))), 1e-10))
    out.append(Check("elastic_stress_consistency", "expansion",
                     np.max(np.abs(distortion_stress(q0f, q0f, ep, ctx)
                                   - ericksen_stress(n, lp, ctx))), 1e-8))

    # in-kernel part of the molecular-field projection identity:
    # P_in(-L(Q0)) = (1/2s)(n h_perp + h_perp n)
    lq0 = elastic_operator(q0f, ep, ctx)
    pin = project_in(n, -lq0)
    h = frank_molecular_field(n, lp, ctx)
    hperp = h - np.einsum('i...,i...->...', h, n) * n
    pred = (outer(n, hperp) + outer(hperp, n)) / (2 * s1)
    out.append(Check("elastic_vs_frank_projection", "expansion",
                     np.max(np.abs(pin - pred)), 1e-8))

    # corrector: lies in the out-of-kernel space and inverts H_n
    el = ElState(n, ndot, v, 0.0)
    res = o1_residual(el, p, ctx)
    perp = project_out(n, res)
    q1p = first_corrector(el, p, ctx)
    out.append(Check("corrector_inverts_hn", "expansion",
                     np.max(np.abs(hn_apply(n, q1p, bp) - perp)), 1e-9))
    out.append(Check("corrector_out_of_kernel", "expansion",
                     np.max(np.abs(q1p - project_out(n, q1p))), 1e-9))
    return out


def run_identity_suite(seed=0, groups=("algebra", "bridge", "expansion")):
    checks = []
    if "algebra" in groups:
        checks.extend(algebra_checks(seed=seed))
    if "bridge" in groups:
        checks.extend(bridge_checks(seed=seed + 1))
    if "expansion" in groups:
        checks.extend(expansion_checks(seed=seed + 2))
    return checks
