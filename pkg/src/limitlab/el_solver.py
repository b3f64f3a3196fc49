"""Time integration of the full inertial director model.

State: (n, ndot, v) with |n| = 1 pointwise, ndot the material derivative
of n (tangential), v solenoidal.  The director equation

    n x (I nddot - h + gamma1 N + gamma2 D.n) = 0,   N = ndot - Omega.n,

is realized by a pointwise Lagrange multiplier:

    I nddot = F + lambda n,   F = h - gamma1 N - gamma2 D.n,
    lambda = -F.n - I |ndot|^2,

which keeps d^2|n|^2/dt^2 = 0 along exact trajectories.  For I = 0 the
overdamped relation gamma1 N = (Id - nn)(h - gamma2 D.n) replaces the
acceleration solve.  The velocity equation carries the Leslie stress and
the elastic stress of the Oseen-Frank energy.

The IMEX splitting mirrors the tensor-model stepper: implicit k3-Laplacian
of the director, gamma1 damping, and the alpha4 Stokes operator.
"""

from dataclasses import dataclass, field

import numpy as np

from .coefficients import LeslieParams
from .errors import (CflViolation, DegenerateGamma, StateBlowup,
                     StiffnessViolation)
from .frank import ericksen_stress, frank_energy, frank_molecular_field
from .grid import SpectralContext
from .tensor_ops import matvec, outer
from .tolerances import DEFAULT


@dataclass
class ElState:
    n: np.ndarray        # (3, nx, ny), unit pointwise
    ndot: np.ndarray     # (3, nx, ny), tangential
    v: np.ndarray        # (3, nx, ny), solenoidal
    t: float = 0.0
    drift: dict = field(default_factory=dict, compare=False)

    def copy(self):
        return ElState(self.n.copy(), self.ndot.copy(), self.v.copy(), self.t)

    def validate(self, ctx: SpectralContext, tol=DEFAULT):
        ctx.check(self.n, self.ndot, self.v)
        if not (np.all(np.isfinite(self.n)) and np.all(np.isfinite(self.ndot))
                and np.all(np.isfinite(self.v))):
            raise StateBlowup(f"non-finite state at t={self.t}")
        nrm = np.sqrt(np.einsum('i...,i...->...', self.n, self.n))
        if np.max(np.abs(nrm - 1.0)) > tol.solenoidal:
            raise StateBlowup(f"|n| drifted by {np.max(np.abs(nrm-1.0)):.3e}")
        tang = np.einsum('i...,i...->...', self.n, self.ndot)
        if np.max(np.abs(tang)) > 1e-8:
            raise StateBlowup(f"n.ndot drifted to {np.max(np.abs(tang)):.3e}")
        div = ctx.l2_norm(ctx.div_vector(self.v))
        if div > tol.solenoidal * max(1.0, ctx.l2_norm(self.v)):
            raise StateBlowup(f"velocity divergence {div:.3e}")
        return self


@dataclass(frozen=True)
class ElConfig:
    leslie: LeslieParams
    dt: float
    t_end: float
    imex_theta: float = 0.5
    cfl_safety: float = 0.9
    stiff_safety: float = 0.9
    stiff_limit: float = 2.0
    snapshot_every: int = 0

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.leslie.I < 0:
            raise ValueError("inertia I must be non-negative")
        if self.leslie.gamma1 <= 0:
            raise DegenerateGamma("gamma1 must be positive")


def leslie_stress(n, ndot, d, omega, lp: LeslieParams, ctx):
    """Viscous director stress, derivative slot first:

    sigma^L = alpha1 (nn:D) nn + alpha2 N n + alpha3 n N + alpha4 D
              + alpha5 D.nn + alpha6 nn.D.
    """
    dl = ctx.dealias
    nvec = matvec(omega, n)
    n_rot = ndot - dl(nvec)
    dn = dl(matvec(d, n))
    nndd = dl(np.einsum('i...,ij...,j...->...', n, d, n))
    nn = outer(n, n)
    sigma = (lp.alpha1 * dl(nndd * nn)
             + lp.alpha2 * dl(outer(n_rot, n))
             + lp.alpha3 * dl(outer(n, n_rot))
             + lp.alpha4 * d
             + lp.alpha5 * dl(outer(dn, n))
             + lp.alpha6 * dl(outer(n, dn)))
    return sigma


def el_rhs(state: ElState, lp: LeslieParams, ctx: SpectralContext):
    """Tendencies (dn, dndot, dv); dndot is zero on the overdamped I=0 path."""
    n, m, v = state.n, state.ndot, state.v
    ctx.check(n, m, v)
    dl = ctx.dealias
    d, omega = ctx.strain_and_vorticity(v)
    h = frank_molecular_field(n, lp, ctx)
    n_rot = m - dl(matvec(omega, n))
    dn_vec = dl(matvec(d, n))
    force = h - lp.gamma1 * n_rot - lp.gamma2 * dn_vec

    if lp.I > 0:
        lam = (-np.einsum('i...,i...->...', force, n)
               - lp.I * np.einsum('i...,i...->...', m, m))
        nddot = (force + lam * n) / lp.I
        dn = m - ctx.advect(v, n)
        dndot = nddot - ctx.advect(v, m)
    else:
        if lp.gamma1 <= 0:
            raise DegenerateGamma("overdamped path needs gamma1 > 0")
        relax = h - lp.gamma2 * dn_vec
        relax = relax - np.einsum('i...,i...->...', relax, n) * n
        m_eff = dl(matvec(omega, n)) + relax / lp.gamma1
        dn = m_eff - ctx.advect(v, n)
        dndot = np.zeros_like(m)
        n_rot = m_eff - dl(matvec(omega, n))

    sigma = (leslie_stress(n, m if lp.I > 0 else m_eff, d, omega, lp, ctx)
             + ericksen_stress(n, lp, ctx))
    dv = ctx.leray_project(-ctx.advect(v, v) + ctx.div_tensor(sigma))
    if not np.all(np.isfinite(dv)) or not np.all(np.isfinite(dn)):
        raise StateBlowup(f"non-finite tendency at t={state.t}")
    return dn, dndot, dv


def _stab_viscosity(lp):
    """Implicit Stokes coefficient: alpha4 plus a bound on the explicitly
    treated anisotropic Leslie viscosity (|n| = 1 bounds the factors)."""
    return (lp.alpha4 + abs(lp.alpha1) + abs(lp.alpha2) + abs(lp.alpha3)
            + abs(lp.alpha5) + abs(lp.alpha6))


def _lin_apply(state, lp, ctx, nu_imp):
    if lp.I > 0:
        ln = state.ndot
        lm = (lp.k3 * ctx.laplacian(state.n) - lp.gamma1 * state.ndot) / lp.I
    else:
        ln = (lp.k3 / lp.gamma1) * ctx.laplacian(state.n)
        lm = np.zeros_like(state.ndot)
    lv = 0.5 * nu_imp * ctx.laplacian(state.v)
    return ln, lm, lv


def _pair_solve(ctx, sn, sm, h, lp):
    g_over_i = -lp.k3 * ctx.k2 / lp.I
    denom = 1.0 + h * lp.gamma1 / lp.I - h * h * g_over_i
    snh = ctx.fft(sn)
    smh = ctx.fft(sm)
    mh = (smh + h * g_over_i * snh) / denom
    nh = snh + h * mh
    return ctx.ifft(nh), ctx.ifft(mh)


def el_stable_dt(state: ElState, lp: LeslieParams, ctx: SpectralContext,
                 cfg: ElConfig = None):
    """Advective CFL plus the explicit elastic-rate bound."""
    grid = ctx.grid
    vmax = float(np.max(np.abs(state.v)))
    hmin = min(grid.lx / grid.nx, grid.ly / grid.ny)
    dt_cfl = hmin / vmax if vmax > 0 else np.inf
    kmax2 = float(np.max(ctx.k2))
    rate = (abs(lp.k1 - lp.k3) + abs(lp.k2 - lp.k3)) * kmax2 + abs(lp.k3)
    limit = cfg.stiff_limit if cfg is not None else 2.0
    if lp.I > 0:
        dt_stiff = limit / np.sqrt(rate / lp.I) if rate > 0 else np.inf
    else:
        dt_stiff = limit / (rate / lp.gamma1) if rate > 0 else np.inf
    return {"dt_cfl": dt_cfl, "dt_stiff": dt_stiff}


def el_step(state: ElState, cfg: ElConfig, ctx: SpectralContext) -> ElState:
    """One IMEX step; renormalizes n, re-tangentializes ndot, logs the drift."""
    lp = cfg.leslie
    dt = cfg.dt
    bounds = el_stable_dt(state, lp, ctx, cfg)
    if dt > cfg.cfl_safety * bounds["dt_cfl"]:
        raise CflViolation(
            f"dt={dt:g} exceeds advective bound {bounds['dt_cfl']:.3e}")
    if dt > cfg.stiff_safety * bounds["dt_stiff"]:
        raise StiffnessViolation(
            f"dt={dt:g} exceeds explicit stiff bound {bounds['dt_stiff']:.3e}")

    theta = cfg.imex_theta
    nu_imp = _stab_viscosity(lp)
    dn, dm, dv = el_rhs(state, lp, ctx)
    ln, lm, lv = _lin_apply(state, lp, ctx, nu_imp)
    nn_, nm_, nv_ = dn - ln, dm - lm, dv - lv

    def solve(sn, sm, sv, h):
        if lp.I > 0:
            n_new, m_new = _pair_solve(ctx, sn, sm, h, lp)
        else:
            n_new = ctx.solve_helmholtz(sn, h * lp.k3 / lp.gamma1)
            m_new = sm
        v_new = ctx.solve_helmholtz(sv, h * 0.5 * nu_imp)
        return n_new, m_new, v_new

    if theta == 0.5:
        # two-stage midpoint plus one corrector pass (see qs_solver)
        h = 0.5 * dt

        def corrector(mid):
            dn2, dm2, dv2 = el_rhs(mid, lp, ctx)
            ln2, lm2, lv2 = _lin_apply(mid, lp, ctx, nu_imp)
            sn = state.n + h * ln + dt * (dn2 - ln2)
            sm = state.ndot + h * lm + dt * (dm2 - lm2)
            sv = state.v + h * lv + dt * (dv2 - lv2)
            return solve(sn, sm, sv, h)

        nm1, mm1, vm1 = solve(state.n + h * nn_, state.ndot + h * nm_,
                              state.v + h * nv_, h)
        nm1 = nm1 / np.sqrt(np.einsum('i...,i...->...', nm1, nm1))
        n_new, m_new, v_new = corrector(ElState(nm1, mm1, vm1, state.t + h))
        navg = 0.5 * (state.n + n_new)
        navg = navg / np.sqrt(np.einsum('i...,i...->...', navg, navg))
        avg = ElState(navg, 0.5 * (state.ndot + m_new),
                      0.5 * (state.v + v_new), state.t + h)
        n_new, m_new, v_new = corrector(avg)
    elif theta == 0.0:
        n_new = state.n + dt * dn
        m_new = state.ndot + dt * dm
        v_new = state.v + dt * dv
    else:
        h = theta * dt
        sn = state.n + (1 - theta) * dt * ln + dt * nn_
        sm = state.ndot + (1 - theta) * dt * lm + dt * nm_
        sv = state.v + (1 - theta) * dt * lv + dt * nv_
        n_new, m_new, v_new = solve(sn, sm, sv, h)

    # constraint maintenance, with the pre-correction drift recorded
    nrm = np.sqrt(np.einsum('i...,i...->...', n_new, n_new))
    renorm = float(np.max(np.abs(nrm - 1.0)))
    n_new = n_new / nrm
    v_new = ctx.leray_project(v_new)
    if lp.I == 0:
        # overdamped path: ndot is the implied relaxation rate, not a state
        d, omega = ctx.strain_and_vorticity(v_new)
        h = frank_molecular_field(n_new, lp, ctx)
        relax = h - lp.gamma2 * ctx.dealias(matvec(d, n_new))
        relax = relax - np.einsum('i...,i...->...', relax, n_new) * n_new
        m_new = ctx.dealias(matvec(omega, n_new)) + relax / lp.gamma1
    tang = np.einsum('i...,i...->...', n_new, m_new)
    retan = float(np.max(np.abs(tang)))
    m_new = m_new - tang * n_new
    new = ElState(n_new, m_new, v_new, state.t + dt,
                  drift={"renorm": renorm, "retangent": retan})
    if not (np.all(np.isfinite(n_new)) and np.all(np.isfinite(v_new))):
        raise StateBlowup(f"non-finite state after step to t={new.t}")
    return new


@dataclass(frozen=True)
class ElEnergyReport:
    kinetic: float
    inertial: float
    frank: float

    @property
    def total(self):
        return self.kinetic + self.inertial + self.frank


def el_energy(state: ElState, lp: LeslieParams, ctx: SpectralContext):
    kin = 0.5 * ctx.inner(state.v, state.v)
    inert = 0.5 * lp.I * ctx.inner(state.ndot, state.ndot)
    return ElEnergyReport(kinetic=kin, inertial=inert,
                          frank=frank_energy(state.n, lp, ctx))


def el_dissipation_rate(state: ElState, lp: LeslieParams, ctx: SpectralContext):
    """Energy-law right-hand side at one state:

    -[ (alpha1 + gamma2^2/gamma1)(D:nn)^2 + alpha4 |D|^2
       + (alpha5 + alpha6 - gamma2^2/gamma1)|D.n|^2
       + (1/gamma1)|n x (gamma1 N + gamma2 D.n)|^2 ]  integrated,

    where n x (gamma1 N + gamma2 D.n) equals n x (h - I nddot) along the
    multiplier solve.
    """
    n, m, v = state.n, state.ndot, state.v
    d, omega = ctx.strain_and_vorticity(v)
    n_rot = m - matvec(omega, n)
    dn = matvec(d, n)
    nndd = np.einsum('i...,ij...,j...->...', n, d, n)
    torque = np.cross(n, lp.gamma1 * n_rot + lp.gamma2 * dn, axis=0)
    ratio = lp.gamma2 ** 2 / lp.gamma1
    return -((lp.alpha1 + ratio) * ctx.integrate(nndd ** 2)
             + lp.alpha4 * ctx.inner(d, d)
             + (lp.alpha5 + lp.alpha6 - ratio) * ctx.inner(dn, dn)
             + ctx.inner(torque, torque) / lp.gamma1)


def el_midpoint(s0: ElState, s1: ElState) -> ElState:
    n = 0.5 * (s0.n + s1.n)
    n = n / np.sqrt(np.einsum('i...,i...->...', n, n))
    return ElState(n, 0.5 * (s0.ndot + s1.ndot), 0.5 * (s0.v + s1.v),
                   0.5 * (s0.t + s1.t))


def el_energy_residual(s0: ElState, s1: ElState, lp: LeslieParams,
                       ctx: SpectralContext) -> float:
    """|Delta E / dt - R_mid| across one step."""
    dt = s1.t - s0.t
    de = el_energy(s1, lp, ctx).total - el_energy(s0, lp, ctx).total
    r_mid = el_dissipation_rate(el_midpoint(s0, s1), lp, ctx)
    return abs(de / dt - r_mid)


def el_series_row(s0, s1, lp, ctx):
    e = el_energy(s1, lp, ctx)
    de = e.total - el_energy(s0, lp, ctx).total
    residual = abs(de / (s1.t - s0.t) - el_dissipation_rate(
        el_midpoint(s0, s1), lp, ctx))
    nrm = np.sqrt(np.einsum('i...,i...->...', s1.n, s1.n))
    tang = np.abs(np.einsum('i...,i...->...', s1.n, s1.ndot))
    return {
        "t": s1.t, "E_kin": e.kinetic, "E_inertial": e.inertial,
        "E_F": e.frank, "E_total": e.total, "residual": residual,
        "min_n": float(np.min(nrm)), "max_n_ndot": float(np.max(tang)),
    }


def run_el(state: ElState, cfg: ElConfig, ctx: SpectralContext,
           on_step=None):
    """Integrate to t_end; calls on_step(prev, new, row) after every step."""
    nsteps = int(round((cfg.t_end - state.t) / cfg.dt))
    current = state
    for _ in range(nsteps):
        new = el_step(current, cfg, ctx)
        if on_step is not None:
            on_step(current, new, el_series_row(current, new, cfg.leslie, ctx))
        current = new
    return current
