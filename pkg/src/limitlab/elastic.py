"""Field-level Landau-de Gennes operators: elastic energy, its variational
derivative, the distortion stress and the full molecular field.

A tensor field has shape (3, 3, nx, ny); spatial derivatives come from a
:class:`~limitlab.grid.SpectralContext`.  z-derivatives vanish but all
three tensor components are kept.
"""

import numpy as np

from .bulk import BulkParams, ElasticParams, bulk_gradient
from .errors import BadEpsilon


def _grad_tensor(qf, ctx):
    """dq[k, i, j] = d_k Q_ij with the z-slot kept (and zero)."""
    ctx.check(qf)
    dq = np.zeros((3,) + qf.shape)
    dq[0] = ctx.dx(qf)
    dq[1] = ctx.dy(qf)
    return dq


def _div2(qf, ctx):
    """Vector w_k = d_m Q_km (divergence over the second tensor index)."""
    return ctx.dx(qf[:, 0]) + ctx.dy(qf[:, 1])


def elastic_energy_density(qf, ep: ElasticParams, ctx):
    """Pointwise density (L1 |grad Q|^2 + L2 Q_ij,j Q_ik,k + L3 Q_ij,k Q_ik,j)/2."""
    dq = _grad_tensor(qf, ctx)
    full = np.einsum('kij...,kij...->...', dq, dq)
    w = _div2(qf, ctx)
    div2 = np.einsum('k...,k...->...', w, w)
    cross = np.einsum('kij...,jik...->...', dq, dq)
    return 0.5 * (ep.L1 * full + ep.L2 * div2 + ep.L3 * cross)


def elastic_energy(qf, ep: ElasticParams, ctx):
    """Cell integral of the elastic energy density."""
    return ctx.integrate(elastic_energy_density(qf, ep, ctx))


def elastic_operator(qf, ep: ElasticParams, ctx):
    """Variational derivative L(Q) of the elastic energy.

    (L Q)_kl = -(L1 Lap Q_kl + (L2+L3)/2 (Q_km,ml + Q_lm,mk
               - 2/3 delta_kl Q_ij,ij)); satisfies
    d/dh int f_e(Q + h P) = <L(Q), P> for symmetric traceless P.
    """
    ctx.check(qf)
    lap = ctx.laplacian(qf)
    w = _div2(qf, ctx)
    gw = ctx.grad_vector(w)                      # gw[l, k] = d_l w_k
    sym = gw + np.swapaxes(gw, 0, 1)
    divw = ctx.div_vector(w)
    eye = np.eye(3).reshape(3, 3, 1, 1)
    return -(ep.L1 * lap
             + 0.5 * (ep.L2 + ep.L3) * (sym - (2.0 / 3.0) * divw * eye))


def distortion_stress(qf, qbar, ep: ElasticParams, ctx):
    """Distortion stress sigma^d_ji(Q, Qbar) =
    -(L1 Q_kl,j Qbar_kl,i + L2 Q_km,m Qbar_kj,i + L3 Q_kj,l Qbar_kl,i).

    Stored with the derivative slot first so that
    ``ctx.div_tensor`` yields (div sigma)_i = d_j sigma_ji directly.
    """
    ctx.check(qf, qbar)
    dq = _grad_tensor(qf, ctx)
    dqb = dq if qbar is qf else _grad_tensor(qbar, ctx)
    t1 = np.einsum('jkl...,ikl...->ji...', dq, dqb)
    w = _div2(qf, ctx)
    t2 = np.einsum('k...,ikj...->ji...', w, dqb)
    t3 = np.einsum('lkj...,ikl...->ji...', dq, dqb)
    return -(ep.L1 * t1 + ep.L2 * t2 + ep.L3 * t3)


def molecular_field(qf, bp: BulkParams, ep: ElasticParams, eps: float, ctx,
                    dealias=True):
    """Molecular field H = -T(Q)/eps - L(Q) of the rescaled free energy."""
    if eps <= 0:
        raise BadEpsilon("eps must be positive")
    ctx.check(qf)
    t = bulk_gradient(qf, bp)
    if dealias:
        t = ctx.dealias(t)
    return -t / eps - elastic_operator(qf, ep, ctx)


def free_energy(qf, bp: BulkParams, ep: ElasticParams, eps: float, ctx):
    """Rescaled free energy F_eps = (1/eps) int f_b + int f_e."""
    from .bulk import bulk_energy
    if eps <= 0:
        raise BadEpsilon("eps must be positive")
    return ctx.integrate(bulk_energy(qf, bp)) / eps + elastic_energy(qf, ep, ctx)
