"""The uniaxial-limit experiment: integrate the director model once,
integrate the tensor model for each epsilon with well-prepared data, and
quantify the convergence rate of the discrepancy.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .bulk import critical_s, project_out
from .el_solver import ElConfig, ElState, el_step
from .errors import (CertificateRefused, InsufficientPoints, LimitLabError,
                     NonPositiveError, NotDissipative)
from .expansion import build_well_prepared, remainder_energy
from .grid import PeriodicGrid, SpectralContext
from .params import MaterialParams
from .presets import initial_fields
from .qs_solver import QsConfig, qs_step
from .tensor_ops import uniaxial


@dataclass(frozen=True)
class SweepConfig:
    params: MaterialParams                 # eps field is overridden per run
    epsilons: tuple
    grid: PeriodicGrid
    dt: float
    t_end: float
    recipe: dict = field(default_factory=lambda: {"name": "smooth"})
    order: int = 1                         # well-prepared order, 0 or 1
    n_output: int = 25                     # shared comparison times
    dt_rule: str = "fixed"                 # "fixed" | "proportional"
    force: bool = False
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        eps = tuple(self.epsilons)
        if len(eps) < 1 or any(e <= 0 for e in eps):
            raise ValueError("epsilons must be positive")
        if any(eps[i] <= eps[i + 1] for i in range(len(eps) - 1)):
            raise ValueError("epsilons must be strictly decreasing")
        if self.order not in (0, 1):
            raise ValueError("well-prepared order must be 0 or 1")
        if self.dt_rule not in ("fixed", "proportional"):
            raise ValueError("dt_rule must be 'fixed' or 'proportional'")


@dataclass(frozen=True)
class OrderFit:
    slope: float
    pair_orders: tuple
    fit_residual: float

    def as_dict(self):
        return {"slope": self.slope, "pair_orders": list(self.pair_orders),
                "fit_residual": self.fit_residual}


def fit_order(errors) -> OrderFit:
    """Least-squares slope of log error against log eps.

    ``errors`` is a sequence of (eps, err) pairs with at least three
    entries and strictly positive errors; pairwise orders
    log(e_i/e_{i+1}) / log(eps_i/eps_{i+1}) are reported alongside.
    """
    pts = [(float(e), float(v)) for e, v in errors]
    if len(pts) < 3:
        raise InsufficientPoints(f"need >= 3 points, got {len(pts)}")
    if any(v <= 0 for _, v in pts):
        raise NonPositiveError("errors must be strictly positive")
    le = np.log([e for e, _ in pts])
    lv = np.log([v for _, v in pts])
    coeffs, residuals, *_ = np.polyfit(le, lv, 1, full=True)
    resid = float(residuals[0]) if len(residuals) else 0.0
    pair = tuple(
        float(np.log(pts[i][1] / pts[i + 1][1])
              / np.log(pts[i][0] / pts[i + 1][0]))
        for i in range(len(pts) - 1))
    return OrderFit(slope=float(coeffs[0]), pair_orders=pair,
                    fit_residual=resid)


def _output_schedule(cfg):
    """Fixed dt and step counts so all runs share output timestamps."""
    t_out = cfg.t_end / cfg.n_output
    steps_per_out = max(1, int(round(t_out / cfg.dt)))
    dt = t_out / steps_per_out
    return dt, steps_per_out


def reference_run(cfg: SweepConfig, ctx: SpectralContext):
    """Integrate the director model with mapped coefficients; returns the
    state list at the shared output times (index 0 = initial)."""
    lp = cfg.params.leslie()
    dt, steps_per_out = _output_schedule(cfg)
    n0, ndot0, v0 = initial_fields(cfg.recipe, cfg.grid, ctx)
    state = ElState(n0, ndot0, v0, 0.0)
    el_cfg = ElConfig(leslie=lp, dt=dt, t_end=cfg.t_end)
    states = [state.copy()]
    current = state
    for k in range(steps_per_out * cfg.n_output):
        current = el_step(current, el_cfg, ctx)
        if (k + 1) % steps_per_out == 0:
            states.append(current.copy())
    return states


def _eps_run(cfg: SweepConfig, eps: float, el_states):
    """Tensor-model run at one eps, compared at shared output times."""
    ctx = SpectralContext(cfg.grid)
    p = cfg.params.with_eps(eps)
    s1 = critical_s(p.bulk)[0]
    dt, steps_per_out = _output_schedule(cfg)
    if cfg.dt_rule == "proportional":
        # robustness fallback: dt shrinks linearly with eps
        shrink = max(1, int(round(cfg.epsilons[0] / eps)))
        dt = dt / shrink
        steps_per_out *= shrink
    n0, ndot0, v0 = initial_fields(cfg.recipe, cfg.grid, ctx)
    state = build_well_prepared(n0, ndot0, v0, p, cfg.order, ctx)
    qs_cfg = QsConfig(params=p, dt=dt, t_end=cfg.t_end)

    times, e_q, e_v, e_out, e_inf, ef = [], [], [], [], [], []

    def compare(qs_state, el_state):
        q0f = uniaxial(el_state.n, s1)
        dq = qs_state.q - q0f
        times.append(qs_state.t)
        e_q.append(ctx.l2_norm(dq))
        e_v.append(ctx.l2_norm(qs_state.v - el_state.v))
        e_out.append(ctx.l2_norm(project_out(el_state.n, dq)))
        e_inf.append(float(np.max(np.abs(dq))))
        ef.append(remainder_energy(qs_state, el_state, p, order=1,
                                   ctx=ctx, norm_power=1))

    current = state
    out_idx = 0
    for k in range(steps_per_out * cfg.n_output):
        current = qs_step(current, qs_cfg, ctx)
        if (k + 1) % steps_per_out == 0:
            out_idx += 1
            compare(current, el_states[out_idx])
    return {
        "eps": eps, "t": times, "e_Q": e_q, "e_v": e_v,
        "e_out": e_out, "e_inf": e_inf, "Ef": ef,
        "sup_e_Q": max(e_q), "sup_e_v": max(e_v),
        "sup_e_out_over_eps": max(e_out) / eps, "sup_Ef": max(ef),
    }


def run_sweep(cfg: SweepConfig, progress=None):
    """Full experiment; returns a report dict (JSON-ready).

    Refuses to run when the dissipativity certificate fails, unless
    cfg.force is set.
    """
    cert = cfg.params.certificate()
    from .coefficients import check_el_dissipative
    el_cert = check_el_dissipative(cfg.params.leslie())
    if not (cert.ok and el_cert.ok):
        if not cfg.force:
            raise CertificateRefused(
                "dissipativity certificate failed: "
                + ", ".join(cert.failed_clauses() + el_cert.failed_clauses()))
        warnings.warn("running with failed certificate (--force)",
                      NotDissipative)

    ctx = SpectralContext(cfg.grid)
    if progress:
        progress("reference director-model run")
    el_states = reference_run(cfg, ctx)

    runs = []
    if cfg.threads > 1 and len(cfg.epsilons) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            futures = {eps: pool.submit(_eps_run, cfg, eps, el_states)
                       for eps in cfg.epsilons}
            for eps, fut in futures.items():
                try:
                    runs.append(fut.result())
                except LimitLabError as exc:
                    raise type(exc)(f"[eps={eps:g}] {exc}") from exc
    else:
        for eps in cfg.epsilons:
            if progress:
                progress(f"tensor-model run at eps={eps:g}")
            try:
                runs.append(_eps_run(cfg, eps, el_states))
            except LimitLabError as exc:
                raise type(exc)(f"[eps={eps:g}] {exc}") from exc

    report = {
        "epsilons": list(cfg.epsilons),
        "grid": {"nx": cfg.grid.nx, "ny": cfg.grid.ny,
                 "lx": cfg.grid.lx, "ly": cfg.grid.ly},
        "dt": cfg.dt, "dt_rule": cfg.dt_rule, "t_end": cfg.t_end,
        "n_output": cfg.n_output, "order": cfg.order,
        "recipe": dict(cfg.recipe), "seed": cfg.seed,
        "certificates": {"qs": cert.as_dict(), "el": el_cert.as_dict()},
        "params": {
            "bulk": vars(cfg.params.bulk).copy(),
            "elastic": vars(cfg.params.elastic).copy(),
            "visc": vars(cfg.params.visc).copy(),
        },
        "leslie": vars(cfg.params.leslie()).copy(),
        "runs": runs,
        "sup_e_Q": [r["sup_e_Q"] for r in runs],
        "sup_e_v": [r["sup_e_v"] for r in runs],
        "sup_e_out_over_eps": [r["sup_e_out_over_eps"] for r in runs],
        "sup_Ef": [r["sup_Ef"] for r in runs],
    }
    if len(cfg.epsilons) >= 3:
        for key, sup in (("fitted_order_Q", report["sup_e_Q"]),
                         ("fitted_order_v", report["sup_e_v"])):
            if all(v > 0 for v in sup):
                report[key] = fit_order(list(zip(cfg.epsilons, sup))).as_dict()
            else:
                # a degenerate sweep (exact fixed point) has nothing to fit
                report[key] = None
        if report["fitted_order_Q"]:
            # asymptotic regime reached = consecutive-pair orders stabilized
            pairs = report["fitted_order_Q"]["pair_orders"]
            spread = max(pairs) - min(pairs) if len(pairs) > 1 else 0.0
            report["pair_order_spread_Q"] = spread
            report["asymptotic_regime_reached"] = bool(spread < 0.2)
    return report
