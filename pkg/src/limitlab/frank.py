"""Oseen-Frank elasticity for director fields: energy, molecular field h,
and the elastic (Ericksen) stress.

The four-constant energy density is

    E_F = k1/2 (div n)^2 + k2/2 (n . curl n)^2 + k3/2 |n x curl n|^2
          + (k2 + k4)/2 (tr (grad n)^2 - (div n)^2).

For unit directors this equals an equivalent quadratic form in grad n
whose Euler-Lagrange field assembles from closed-form second-order
operators; the saddle-splay combination is a null Lagrangian on the
torus and drops out of h entirely.
"""

import numpy as np

from .coefficients import LeslieParams
from .errors import NonUnitField


def _check_unit(n, tol=1e-6):
    nrm = np.sqrt(np.einsum('i...,i...->...', n, n))
    worst = float(np.max(np.abs(nrm - 1.0)))
    if worst > tol:
        raise NonUnitField(f"director field off unit sphere by {worst:.3e}")


def _cross_matrix(n):
    """K with K.w = n x w, i.e. K_ik = eps_iak n_a."""
    z = np.zeros_like(n[0])
    return np.array([[z, -n[2], n[1]],
                     [n[2], z, -n[0]],
                     [-n[1], n[0], z]])


def _curl(n, ctx):
    g = ctx.grad_vector(n)      # g[i, m] = d_i n_m
    return np.stack([g[1, 2] - g[2, 1],
                     g[2, 0] - g[0, 2],
                     g[0, 1] - g[1, 0]])


def _abce(lp: LeslieParams):
    # equivalent quadratic-form coefficients of the energy density:
    # A/2 (div n)^2 + B/2 (n.curl n)^2 + C/2 |grad n|^2 + E/2 tr(grad n)^2
    a = lp.k1 - lp.k2 - lp.k4
    b = lp.k2 - lp.k3
    c = lp.k3
    e = lp.k2 + lp.k4 - lp.k3
    return a, b, c, e


def frank_energy_density(n, lp: LeslieParams, ctx):
    """Four-constant Oseen-Frank energy density."""
    ctx.check(n)
    g = ctx.grad_vector(n)
    s = np.einsum('ii...->...', g)
    c = _curl(n, ctx)
    t = np.einsum('i...,i...->...', n, c)
    nxc = np.cross(n, c, axis=0)
    twist_free = np.einsum('im...,mi...->...', g, g) - s ** 2
    return (0.5 * lp.k1 * s ** 2 + 0.5 * lp.k2 * t ** 2
            + 0.5 * lp.k3 * np.einsum('i...,i...->...', nxc, nxc)
            + 0.5 * (lp.k2 + lp.k4) * twist_free)


def frank_energy(n, lp: LeslieParams, ctx):
    return ctx.integrate(frank_energy_density(n, lp, ctx))


def _stress_potential(n, lp: LeslieParams, ctx):
    """Pi_im = dE_F / d(d_i n_m) from the equivalent quadratic form."""
    a, b, c, e = _abce(lp)
    g = ctx.grad_vector(n)
    s = np.einsum('ii...->...', g)
    cu = _curl(n, ctx)
    t = np.einsum('i...,i...->...', n, cu)
    eye = np.eye(3).reshape(3, 3, 1, 1)
    pi = c * g + e * np.swapaxes(g, 0, 1) + a * s * eye
    if b != 0.0:
        pi = pi - b * t * _cross_matrix(n)
    return pi, cu, t


def frank_molecular_field(n, lp: LeslieParams, ctx):
    """Variational field h = -dE_F/dn + div dE_F/d(grad n).

    Closed form: h = (k1 - k3) grad(div n) + k3 Lap n
                     - (k2 - k3) (T curl n + curl(T n)),  T = n . curl n.
    Reduces to K Lap n in the one-constant case.
    """
    ctx.check(n)
    _check_unit(n)
    a, b, c, e = _abce(lp)
    g = ctx.grad_vector(n)
    s = np.einsum('ii...->...', g)
    h = c * ctx.laplacian(n)
    if a + e != 0.0:
        grad_s = np.stack([ctx.dx(s), ctx.dy(s), np.zeros_like(s)])
        h = h + (a + e) * grad_s
    if b != 0.0:
        cu = _curl(n, ctx)
        t = np.einsum('i...,i...->...', n, cu)
        tn = ctx.dealias(t[None] * n)
        h = h - b * (ctx.dealias(t * cu) + _curl(tn, ctx))
    return h


def ericksen_stress(n, lp: LeslieParams, ctx):
    """Elastic stress sigma^E_ji = -Pi_jm d_i n_m (derivative slot first)."""
    ctx.check(n)
    pi, _, _ = _stress_potential(n, lp, ctx)
    g = ctx.grad_vector(n)
    return -np.einsum('jm...,im...->ji...', pi, g)
