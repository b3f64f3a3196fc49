"""Expansion machinery connecting the tensor model to the director model.

Contains the exact polynomial-in-eps expansion of the bulk gradient
around a critical point, the leading-order residual whose out-of-kernel
part determines the first corrector, well-prepared initial data for the
eps-sweep, and the remainder energy diagnostic.
"""

from dataclasses import dataclass

import numpy as np

from .bulk import (bulk_gradient, hn_inverse, linearized_gradient,
                   project_in, project_out)
from .coefficients import LeslieParams
from .elastic import elastic_operator
from .errors import NotCritical
from .frank import frank_molecular_field
from .grid import SpectralContext
from .params import MaterialParams
from .qs_solver import QsState
from .el_solver import ElState
from .tensor_ops import bform, cform, commutator, frobenius, matvec, outer, uniaxial


@dataclass(frozen=True)
class ExpansionTerms:
    """Grouped terms of T(Q0 + eps Q1 + eps^2 Q2 + eps^3 (Q3 + QR)).

    groups[k] multiplies eps^k for k = 0..3; groups[4] is the top-order
    collection (itself polynomial in eps, evaluated at the given eps) so
    that sum_k eps^k groups[k] reconstructs the bulk gradient exactly.
    """
    groups: tuple
    eps: float

    def reconstruct(self):
        acc = np.zeros_like(self.groups[0])
        for k, g in enumerate(self.groups):
            acc = acc + self.eps ** k * g
        return acc


def expand_bulk_gradient(q0, q1, q2, q3, q_r, eps, bp,
                         tol=1e-10) -> ExpansionTerms:
    """Exact eps-grouping of the bulk gradient at a perturbed critical point.

    The eps^1 group is the linearized operator applied to Q1; quadratic
    cross terms use the bilinear form, cubic ones the trilinear form.  The
    grouping is an algebraic identity: reconstruct() equals
    bulk_gradient(Q0 + eps Q1 + ..., bp) to roundoff.
    """
    t0 = bulk_gradient(q0, bp)
    worst = float(np.max(np.abs(t0)))
    if worst > tol:
        raise NotCritical(f"base tensor has bulk-gradient residual {worst:.3e}")

    # polynomial coefficients of the perturbation P = sum_m eps^m p[m]
    p = {1: np.asarray(q1, dtype=float), 2: np.asarray(q2, dtype=float),
         3: np.asarray(q3, dtype=float) + np.asarray(q_r, dtype=float)}

    def quad(w):
        """- b/2 B(P,P) + c C(Q0,P,P) terms of total weight w."""
        acc = None
        for m in (1, 2, 3):
            mp = w - m
            if mp in p:
                term = (-0.5 * bp.b * bform(p[m], p[mp])
                        + bp.c * cform(q0, p[m], p[mp]))
                acc = term if acc is None else acc + term
        return acc

    def cub(w):
        """c/3 C(P,P,P) terms of total weight w."""
        acc = None
        for m in (1, 2, 3):
            for mp in (1, 2, 3):
                mpp = w - m - mp
                if mpp in p:
                    term = (bp.c / 3.0) * cform(p[m], p[mp], p[mpp])
                    acc = term if acc is None else acc + term
        return acc

    zero = np.zeros_like(t0)
    e1 = linearized_gradient(q0, p[1], bp)
    e2 = linearized_gradient(q0, p[2], bp) + quad(2)
    e3 = linearized_gradient(q0, p[3], bp) + quad(3) + cub(3)
    e4 = zero
    for w in range(4, 10):
        qw = quad(w)
        cw = cub(w)
        extra = (qw if qw is not None else 0) + (cw if cw is not None else 0)
        if np.ndim(extra):
            e4 = e4 + eps ** (w - 4) * extra
    return ExpansionTerms(groups=(t0, e1, e2, e3, e4), eps=eps)


def director_acceleration(el: ElState, lp: LeslieParams, ctx: SpectralContext):
    """Material second derivative of n from the multiplier solve."""
    n, m, v = el.n, el.ndot, el.v
    d, omega = ctx.strain_and_vorticity(v)
    h = frank_molecular_field(n, lp, ctx)
    n_rot = m - ctx.dealias(matvec(omega, n))
    force = h - lp.gamma1 * n_rot - lp.gamma2 * ctx.dealias(matvec(d, n))
    lam = (-np.einsum('i...,i...->...', force, n)
           - lp.I * np.einsum('i...,i...->...', m, m))
    return (force + lam * n) / lp.I


def o1_residual(el: ElState, p: MaterialParams, ctx: SpectralContext):
    """Right-hand side determining the first corrector:

    H_n(Q1) = -J Qddot0 - mu1 (Qdot0 - [Omega, Q0]) - L(Q0) - mu2/2 D,

    built from the uniaxial tensor of the director state, with the
    acceleration from the multiplier solve.  Its in-kernel projection
    vanishes on trajectories of the director model with mapped
    coefficients.
    """
    lp = p.leslie()
    s = p.s1
    n, m, v = el.n, el.ndot, el.v
    ctx.check(n, m, v)
    vp = p.visc
    d, omega = ctx.strain_and_vorticity(v)
    q0 = uniaxial(n, s)
    nddot = director_acceleration(el, lp, ctx)
    qdot0 = s * (outer(m, n) + outer(n, m))
    qddot0 = s * (outer(nddot, n) + 2.0 * outer(m, m) + outer(n, nddot))
    n_q = qdot0 - ctx.dealias(commutator(omega, q0))
    return (-vp.J * qddot0 - vp.mu1 * n_q
            - elastic_operator(q0, p.elastic, ctx) - 0.5 * vp.mu2 * d)


def first_corrector(el: ElState, p: MaterialParams, ctx: SpectralContext):
    """Out-of-kernel corrector Q1_perp = H_n^{-1} P_out(o1_residual)."""
    res = o1_residual(el, p, ctx)
    perp = project_out(el.n, res)
    return hn_inverse(el.n, perp, p.bulk)


def build_well_prepared(n0, ndot0, v0, p: MaterialParams, order: int,
                        ctx: SpectralContext) -> QsState:
    """Tensor-model initial data consistent with the expansion.

    order 0: Q(0) = s(n0 n0 - Id/3); order 1 adds eps * Q1_perp.  In both
    cases Qdot(0) = s(ndot0 n0 + n0 ndot0) and v(0) = v0.
    """
    if order not in (0, 1):
        raise ValueError("well-prepared order must be 0 or 1")
    ctx.check(n0, ndot0, v0)
    s = p.s1
    q = uniaxial(n0, s)
    if order >= 1:
        el = ElState(n0, ndot0, v0, t=0.0)
        q = q + p.eps * first_corrector(el, p, ctx)
    qdot = s * (outer(ndot0, n0) + outer(n0, ndot0))
    v = ctx.leray_project(v0)
    return QsState(q, qdot, v, t=0.0)


def _hn_quadratic(n, x, bp, ep, eps, ctx):
    """Integral of (1/eps) (H_n(X) + eps L(X)) : X (non-negative blocks)."""
    from .bulk import hn_apply
    hn = hn_apply(n, x, bp)
    pointwise = ctx.integrate(frobenius(hn, x))
    elastic = ctx.inner(elastic_operator(x, ep, ctx), x)
    return pointwise / eps + elastic


def remainder_energy(qs: QsState, el: ElState, p: MaterialParams, order: int,
                     ctx: SpectralContext, norm_power=None) -> float:
    """Remainder energy functional evaluated on the discrepancy between a
    tensor-model state and the order-truncated expansion of a director
    state:

        Ef = int |v|^2 + |Q|^2 + |Qdot|^2 + (1/eps) Hn_eps(Q):Q
           + eps^2 sum_i ( |d_i v|^2 + |d_i Qdot|^2 + (1/eps) Hn_eps(d_i Q):d_i Q )
           + eps^4 ( |Lap v|^2 + |Lap Qdot|^2 + (1/eps) Hn_eps(Lap Q):Lap Q ),

    with Hn_eps(X) = H_n(X) + eps L(X) and the remainder transport taken
    along the truncation velocity (= the director-model velocity here).
    The corrector's own time derivative is neglected.

    The discrepancy is divided by eps**norm_power (default order+1).  With
    only the out-of-kernel corrector constructed, the divergence-free
    bounded-in-eps surrogate is order=1 with norm_power=1: the in-kernel
    first-order deviation is then measured at unit weight while the
    stiff (1/eps) block sees the corrector-cleaned out-of-kernel part.
    """
    eps = p.eps
    s = p.s1
    if norm_power is None:
        norm_power = order + 1
    scale = eps ** norm_power
    q_trunc = uniaxial(el.n, s)
    if order >= 1:
        q_trunc = q_trunc + eps * first_corrector(el, p, ctx)
    v_r = (qs.v - el.v) / scale
    q_r = (qs.q - q_trunc) / scale

    qdot0 = s * (outer(el.ndot, el.n) + outer(el.n, el.ndot))
    qdot_eps = qs.qdot - ctx.advect(qs.v - el.v, qs.q)
    qdot_r = (qdot_eps - qdot0) / scale

    bp, ep = p.bulk, p.elastic
    total = (ctx.inner(v_r, v_r) + ctx.inner(q_r, q_r)
             + ctx.inner(qdot_r, qdot_r)
             + _hn_quadratic(el.n, q_r, bp, ep, eps, ctx))
    for axis in ('x', 'y'):
        dv = ctx.partial(v_r, axis)
        dqd = ctx.partial(qdot_r, axis)
        dq = ctx.partial(q_r, axis)
        total += eps ** 2 * (ctx.inner(dv, dv) + ctx.inner(dqd, dqd)
                             + _hn_quadratic(el.n, dq, bp, ep, eps, ctx))
    lv = ctx.laplacian(v_r)
    lqd = ctx.laplacian(qdot_r)
    lq = ctx.laplacian(q_r)
    total += eps ** 4 * (ctx.inner(lv, lv) + ctx.inner(lqd, lqd)
                         + _hn_quadratic(el.n, lq, bp, ep, eps, ctx))
    return float(total)


def in_kernel_fraction(el: ElState, p: MaterialParams, ctx: SpectralContext):
    """Norm ratio ||P_in(res)|| / ||res|| of the leading-order residual."""
    res = o1_residual(el, p, ctx)
    pin = project_in(el.n, res)
    num = ctx.l2_norm(pin)
    den = ctx.l2_norm(res)
    return num / den if den > 0 else 0.0
