"""Time integration of the inertial Q-tensor system.

State: (Q, Qdot, v) with Qdot the material derivative of Q, reduced to a
first-order system.  The equations of motion are

    J Qddot + mu1 Qdot = H - mu2/2 D + mu1 [Omega, Q],
    v_t + v.grad v = -grad p + div(sigma + sigma^d),   div v = 0,

with H = -T(Q)/eps - L(Q) and the viscous stress

    sigma = beta1 Q (Q:D) + beta4 D + beta5 D.Q + beta6 Q.D
            + beta7 (D.Q^2 + Q^2.D) + mu2/2 N + mu1 [Q, N],   N = Qdot - [Omega, Q].

Stepping is IMEX: the Fourier-diagonal terms ((a/eps) Q, the L1-Laplacian
inside H, the mu1 damping and the beta4 Stokes operator) are implicit;
every remaining (nonlinear, dealiased) term is explicit.  imex_theta=0.5
selects a two-stage midpoint variant (second order); other values use a
one-stage theta scheme (first order).
"""

from dataclasses import dataclass, field

import numpy as np

from .elastic import distortion_stress, elastic_operator, free_energy
from .bulk import bulk_gradient
from .errors import (CflViolation, NotDissipative, StateBlowup,
                     StiffnessViolation)
from .grid import SpectralContext
from .params import MaterialParams
from .tensor_ops import commutator, frobenius, mat_mul, sym_traceless
from .tolerances import DEFAULT


@dataclass
class QsState:
    q: np.ndarray        # (3, 3, nx, ny) symmetric traceless
    qdot: np.ndarray     # (3, 3, nx, ny) material derivative of q
    v: np.ndarray        # (3, nx, ny) solenoidal
    t: float = 0.0
    drift: dict = field(default_factory=dict, compare=False)

    def copy(self):
        return QsState(self.q.copy(), self.qdot.copy(), self.v.copy(), self.t)

    def validate(self, ctx: SpectralContext, tol=DEFAULT):
        ctx.check(self.q, self.qdot, self.v)
        if not (np.all(np.isfinite(self.q)) and np.all(np.isfinite(self.qdot))
                and np.all(np.isfinite(self.v))):
            raise StateBlowup(f"non-finite state at t={self.t}")
        sym_defect = max(np.max(np.abs(self.q - sym_traceless(self.q))),
                         np.max(np.abs(self.qdot - sym_traceless(self.qdot))))
        div = ctx.l2_norm(ctx.div_vector(self.v))
        if sym_defect > 100 * tol.construct:
            raise StateBlowup(f"Q left the symmetric traceless space ({sym_defect:.3e})")
        if div > tol.solenoidal * max(1.0, ctx.l2_norm(self.v)):
            raise StateBlowup(f"velocity divergence {div:.3e}")
        return self


@dataclass(frozen=True)
class QsConfig:
    params: MaterialParams
    dt: float
    t_end: float
    imex_theta: float = 0.5
    cfl_safety: float = 0.9
    stiff_safety: float = 0.9
    stiff_limit: float = 2.0
    snapshot_every: int = 0      # steps between snapshots; 0 disables

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if not 0.0 <= self.imex_theta <= 1.0:
            raise ValueError("imex_theta must lie in [0, 1]")


def viscous_stress(q, qdot, d, omega, vp, ctx):
    """Viscous stress of the tensor model, dealiased, derivative slot first."""
    dl = ctx.dealias
    qd = dl(frobenius(q, d))
    q2 = dl(mat_mul(q, q))
    n_q = qdot - dl(commutator(omega, q))
    sigma = (vp.beta1 * dl(q * qd)
             + vp.beta4 * d
             + vp.beta5 * dl(mat_mul(d, q))
             + vp.beta6 * dl(mat_mul(q, d))
             + vp.beta7 * dl(mat_mul(d, q2) + mat_mul(q2, d))
             + 0.5 * vp.mu2 * n_q
             + vp.mu1 * dl(commutator(q, n_q)))
    return sigma


def qs_rhs(state: QsState, p: MaterialParams, ctx: SpectralContext):
    """Full Eulerian tendencies (dq, dqdot, dv) of the tensor system."""
    q, a, v = state.q, state.qdot, state.v
    ctx.check(q, a, v)
    vp = p.visc
    dl = ctx.dealias
    d, omega = ctx.strain_and_vorticity(v)

    t_bulk = dl(bulk_gradient(q, p.bulk))
    h_field = -t_bulk / p.eps - elastic_operator(q, p.elastic, ctx)

    dq = a - ctx.advect(v, q)
    dqdot = ((h_field - 0.5 * vp.mu2 * d + vp.mu1 * dl(commutator(omega, q))
              - vp.mu1 * a) / vp.J
             - ctx.advect(v, a))

    sigma = viscous_stress(q, a, d, omega, vp, ctx)
    sigma_d = distortion_stress(q, q, p.elastic, ctx)
    dv = ctx.leray_project(-ctx.advect(v, v) + ctx.div_tensor(sigma + sigma_d))

    if not np.all(np.isfinite(dqdot)) or not np.all(np.isfinite(dv)):
        raise StateBlowup(f"non-finite tendency at t={state.t}")
    return dq, dqdot, dv


def _stab_viscosity(state, vp):
    """Implicit Stokes coefficient: beta4 plus a bound on the explicitly
    treated anisotropic viscosity (the shift cancels at scheme order)."""
    qmax = float(np.sqrt(np.max(frobenius(state.q, state.q))))
    return (vp.beta4 + qmax * (abs(vp.beta5) + abs(vp.beta6) + abs(vp.mu2))
            + qmax ** 2 * (vp.beta1 + 2.0 * vp.beta7 + 2.0 * vp.mu1))


def _lin_apply(state, p, ctx, nu_imp):
    """Implicitly treated linear part applied to a state."""
    vp = p.visc
    lq = state.qdot
    la = ((p.bulk.a / p.eps) * state.q
          + p.elastic.L1 * ctx.laplacian(state.q)) / vp.J \
         - (vp.mu1 / vp.J) * state.qdot
    lv = 0.5 * nu_imp * ctx.laplacian(state.v)
    return lq, la, lv


def _pair_solve(ctx, sq, sa, h, p):
    """Solve Q = Sq + h A, A = Sa + h[(g/J) Q - (mu1/J) A] per Fourier mode,
    with g = a/eps - L1 k^2."""
    vp = p.visc
    g_over_j = (p.bulk.a / p.eps - p.elastic.L1 * ctx.k2) / vp.J
    denom = 1.0 + h * vp.mu1 / vp.J - h * h * g_over_j
    if np.min(np.abs(denom)) < 0.05:
        raise StiffnessViolation(
            "implicit pair solve near-singular; reduce dt "
            f"(min |denom| = {np.min(np.abs(denom)):.3e})")
    sqh = ctx.fft(sq)
    sah = ctx.fft(sa)
    ah = (sah + h * g_over_j * sqh) / denom
    qh = sqh + h * ah
    return ctx.ifft(qh), ctx.ifft(ah)


def qs_stable_dt(state: QsState, p: MaterialParams, ctx: SpectralContext,
                 cfg: QsConfig = None):
    """Estimated step-size bounds: advective CFL and the explicit stiff rate.

    The explicitly treated part of -T(Q)/eps has Lipschitz rate
    (a + 2b|Q| + 3c|Q|^2)/eps; with inertia J it drives oscillations at
    omega = sqrt(rate/J), and the (L2+L3) elastic remainder adds
    |L2+L3| kmax^2.  Returns a dict of bounds (np.inf when inactive).
    """
    grid = ctx.grid
    vmax = float(np.max(np.abs(state.v)))
    hmin = min(grid.lx / grid.nx, grid.ly / grid.ny)
    dt_cfl = hmin / vmax if vmax > 0 else np.inf
    qmax = float(np.sqrt(np.max(frobenius(state.q, state.q))))
    bp = p.bulk
    rate = (bp.a + 2.0 * bp.b * qmax + 3.0 * bp.c * qmax ** 2) / p.eps
    rate += abs(p.elastic.L2 + p.elastic.L3) * float(np.max(ctx.k2))
    limit = cfg.stiff_limit if cfg is not None else 2.0
    dt_stiff = limit / np.sqrt(rate / p.visc.J) if rate > 0 else np.inf
    return {"dt_cfl": dt_cfl, "dt_stiff": dt_stiff}


def qs_step(state: QsState, cfg: QsConfig, ctx: SpectralContext) -> QsState:
    """Advance one IMEX step; re-projects Q, Qdot and v afterwards."""
    p = cfg.params
    dt = cfg.dt
    bounds = qs_stable_dt(state, p, ctx, cfg)
    if dt > cfg.cfl_safety * bounds["dt_cfl"]:
        raise CflViolation(
            f"dt={dt:g} exceeds advective bound {bounds['dt_cfl']:.3e}")
    if dt > cfg.stiff_safety * bounds["dt_stiff"]:
        raise StiffnessViolation(
            f"dt={dt:g} exceeds explicit stiff bound {bounds['dt_stiff']:.3e}")

    theta = cfg.imex_theta
    nu_imp = _stab_viscosity(state, p.visc)
    dq, da, dv = qs_rhs(state, p, ctx)
    lq, la, lv = _lin_apply(state, p, ctx, nu_imp)
    nq, na, nv = dq - lq, da - la, dv - lv

    if theta == 0.5:
        # two-stage midpoint with one corrector pass: the corrector
        # re-evaluates the explicit part at the time-averaged state, which
        # keeps second order in the presence of the stabilization shift
        h = 0.5 * dt

        def corrector(mid):
            dqm, dam, dvm = qs_rhs(mid, p, ctx)
            lqm, lam, lvm = _lin_apply(mid, p, ctx, nu_imp)
            sq = state.q + h * lq + dt * (dqm - lqm)
            sa = state.qdot + h * la + dt * (dam - lam)
            sv = state.v + h * lv + dt * (dvm - lvm)
            qn, an = _pair_solve(ctx, sq, sa, h, p)
            vn = ctx.solve_helmholtz(sv, h * 0.5 * nu_imp)
            return qn, an, vn

        qm, am = _pair_solve(ctx, state.q + h * nq, state.qdot + h * na, h, p)
        vm = ctx.solve_helmholtz(state.v + h * nv, h * 0.5 * nu_imp)
        qn, an, vn = corrector(QsState(qm, am, vm, state.t + h))
        avg = QsState(0.5 * (state.q + qn), 0.5 * (state.qdot + an),
                      0.5 * (state.v + vn), state.t + h)
        qn, an, vn = corrector(avg)
    elif theta == 0.0:
        qn = state.q + dt * dq
        an = state.qdot + dt * da
        vn = state.v + dt * dv
    else:
        h = theta * dt
        sq = state.q + (1 - theta) * dt * lq + dt * nq
        sa = state.qdot + (1 - theta) * dt * la + dt * na
        sv = state.v + (1 - theta) * dt * lv + dt * nv
        qn, an = _pair_solve(ctx, sq, sa, h, p)
        vn = ctx.solve_helmholtz(sv, h * 0.5 * nu_imp)

    qn = sym_traceless(qn)
    an = sym_traceless(an)
    vn = ctx.leray_project(vn)
    new = QsState(qn, an, vn, state.t + dt)
    if not (np.all(np.isfinite(qn)) and np.all(np.isfinite(vn))
            and np.all(np.isfinite(an))):
        raise StateBlowup(f"non-finite state after step to t={new.t}")
    return new


@dataclass(frozen=True)
class EnergyReport:
    kinetic: float
    inertial: float
    free: float

    @property
    def total(self):
        return self.kinetic + self.inertial + self.free


def qs_energy(state: QsState, p: MaterialParams, ctx: SpectralContext) -> EnergyReport:
    """Energy components: kinetic 1/2 |v|^2, inertial J/2 |Qdot|^2 and the
    rescaled free energy."""
    kin = 0.5 * ctx.inner(state.v, state.v)
    inert = 0.5 * p.visc.J * ctx.inner(state.qdot, state.qdot)
    free = free_energy(state.q, p.bulk, p.elastic, p.eps, ctx)
    return EnergyReport(kinetic=kin, inertial=inert, free=free)


def qs_dissipation_rate(state: QsState, p: MaterialParams, ctx: SpectralContext):
    """Right-hand side of the energy identity evaluated at one state:

    -beta1 ||Q:D||^2 - (beta4 - mu2^2/(4 mu1)) ||D||^2
    - (beta5+beta6) <D.Q, D> - 2 beta7 ||D.Q||^2
    - mu1 || Qdot - [Omega,Q] + mu2 D / (2 mu1) ||^2.

    Non-positive for parameters passing the dissipativity certificate.
    """
    vp = p.visc
    d, omega = ctx.strain_and_vorticity(state.v)
    q = state.q
    qd_scalar = frobenius(q, d)
    dq = mat_mul(d, q)
    n_shift = state.qdot - commutator(omega, q) + (vp.mu2 / (2.0 * vp.mu1)) * d
    return -(vp.beta1 * ctx.integrate(qd_scalar ** 2)
             + (vp.beta4 - vp.mu2 ** 2 / (4.0 * vp.mu1)) * ctx.inner(d, d)
             + (vp.beta5 + vp.beta6) * ctx.inner(dq, d)
             + 2.0 * vp.beta7 * ctx.inner(dq, dq)
             + vp.mu1 * ctx.inner(n_shift, n_shift))


def qs_midpoint(s0: QsState, s1: QsState) -> QsState:
    return QsState(0.5 * (s0.q + s1.q), 0.5 * (s0.qdot + s1.qdot),
                   0.5 * (s0.v + s1.v), 0.5 * (s0.t + s1.t))


def qs_dissipation_residual(s0: QsState, s1: QsState, p: MaterialParams,
                            ctx: SpectralContext) -> float:
    """|Delta E / dt - R_mid| across one step, R_mid at the midpoint state."""
    dt = s1.t - s0.t
    de = qs_energy(s1, p, ctx).total - qs_energy(s0, p, ctx).total
    r_mid = qs_dissipation_rate(qs_midpoint(s0, s1), p, ctx)
    return abs(de / dt - r_mid)


def qs_series_row(s0, s1, p, ctx):
    """Per-step diagnostics row for the run CSV."""
    e = qs_energy(s1, p, ctx)
    r_mid = qs_dissipation_rate(qs_midpoint(s0, s1), p, ctx)
    de = e.total - qs_energy(s0, p, ctx).total
    residual = abs(de / (s1.t - s0.t) - r_mid)
    qmax = float(np.sqrt(np.max(frobenius(s1.q, s1.q))))
    divnorm = ctx.l2_norm(ctx.div_vector(s1.v))
    return {
        "t": s1.t, "E_kin": e.kinetic, "E_inertial": e.inertial,
        "F_eps": e.free, "E_total": e.total, "R_mid": r_mid,
        "residual": residual, "max_Q": qmax, "div_v_norm": divnorm,
    }


def check_config(cfg: QsConfig):
    """Attach the dissipativity certificate; warn when it fails."""
    import warnings
    cert = cfg.params.certificate()
    if not cert.ok:
        warnings.warn(
            "viscosity parameters fail the dissipativity certificate: "
            + ", ".join(cert.failed_clauses()), NotDissipative)
    return cert


def run_qs(state: QsState, cfg: QsConfig, ctx: SpectralContext,
           on_step=None):
    """Integrate to t_end; calls on_step(prev, new, row) after every step."""
    check_config(cfg)
    nsteps = int(round((cfg.t_end - state.t) / cfg.dt))
    current = state
    for _ in range(nsteps):
        new = qs_step(current, cfg, ctx)
        if on_step is not None:
            on_step(current, new, qs_series_row(current, new, cfg.params, ctx))
        current = new
    return current
