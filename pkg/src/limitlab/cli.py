"""Command-line interface.

Subcommands:
    check-coeffs    mapped Leslie/Frank constants and dissipativity certificates
    simulate-qs     integrate the tensor model, write series + snapshots
    simulate-el     integrate the director model, write series + snapshots
    sweep           the uniaxial-limit convergence experiment
    validate-energy replay a snapshot series and report dissipation residuals
    identity-suite  run every algebraic identity check

Exit codes: 0 success, 1 check/criterion failure, 2 usage or config error.
"""

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .bulk import BulkParams, ElasticParams
from .coefficients import (ViscosityParams, check_el_dissipative,
                           check_qs_dissipative)
from .el_solver import ElConfig, ElState, el_series_row, el_step
from .errors import CertificateRefused, ConfigError, LimitLabError
from .grid import PeriodicGrid, SpectralContext
from .params import MaterialParams
from .presets import PRESET_NAMES, initial_fields, material_preset
from .qs_solver import QsConfig, qs_series_row, qs_step
from .reporting import (EL_COLUMNS, QS_COLUMNS, render_run_figures,
                        render_sweep_figures, write_json, write_series_csv)
from .snapshots import load_el_state, load_qs_state, save_el_state, save_qs_state
from .sweep import SweepConfig, run_sweep


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}")


def _take(cfg, key, default=None, required=False):
    if required and key not in cfg:
        raise ConfigError(f"missing required config key {key!r}")
    return cfg.pop(key, default)


def _reject_unknown(cfg, where):
    if cfg:
        raise ConfigError(f"unknown keys in {where}: {sorted(cfg)}")


def _material_from(cfg, preset_flag, eps=None):
    """Material parameters from a config dict and/or --preset flag."""
    preset = cfg.pop("preset", preset_flag)
    if "params" in cfg:
        raw = dict(cfg.pop("params"))
        bulk = BulkParams(**_take(raw, "bulk", {}))
        elastic = ElasticParams(**_take(raw, "elastic", {}))
        visc = ViscosityParams(**_take(raw, "visc", required=True))
        _reject_unknown(raw, "params")
        base = MaterialParams(bulk=bulk, elastic=elastic, visc=visc,
                              eps=eps if eps is not None else 0.1)
    elif preset:
        base = material_preset(preset, eps=eps if eps is not None else 0.1)
    else:
        raise ConfigError("need either a preset or an explicit params block")
    return base


def _grid_from(cfg):
    raw = dict(cfg.pop("grid", {}))
    grid = PeriodicGrid(nx=int(_take(raw, "nx", 32)),
                        ny=int(_take(raw, "ny", 32)),
                        lx=float(_take(raw, "lx", 2 * np.pi)),
                        ly=float(_take(raw, "ly", 2 * np.pi)))
    _reject_unknown(raw, "grid")
    return grid


def _coeff_payload(p: MaterialParams):
    lp = p.leslie()
    return {
        "s1": p.s1,
        "leslie": {k: getattr(lp, k) for k in
                   ("alpha1", "alpha2", "alpha3", "alpha4", "alpha5",
                    "alpha6", "gamma1", "gamma2", "I")},
        "frank": {k: getattr(lp, k) for k in ("k1", "k2", "k3", "k4")},
        "qs_certificate": check_qs_dissipative(p.visc).as_dict(),
        "el_certificate": check_el_dissipative(lp).as_dict(),
    }


def cmd_check_coeffs(args):
    cfg = _load_json(args.config) if args.config else {}
    p = _material_from(cfg, args.preset, eps=cfg.pop("eps", None))
    _reject_unknown(cfg, "config")
    payload = _coeff_payload(p)
    print(f"s1 = {payload['s1']:.6g}")
    print("Leslie coefficients:")
    for k, v in payload["leslie"].items():
        print(f"  {k:7s} = {v:.6g}")
    print("Frank constants:")
    for k, v in payload["frank"].items():
        print(f"  {k:7s} = {v:.6g}")
    qs_ok = payload["qs_certificate"]["ok"]
    el_ok = payload["el_certificate"]["ok"]
    print(f"QS dissipativity: {'PASS' if qs_ok else 'FAIL'}")
    for cl in payload["qs_certificate"]["clauses"]:
        print(f"  [{'ok' if cl['passed'] else 'VIOLATED'}] {cl['name']}"
              f" (margin {cl['margin']:.6g})")
    print(f"EL dissipativity: {'PASS' if el_ok else 'FAIL'}")
    if args.out:
        write_json(Path(args.out) / "coeffs.json", payload)
    return 0 if (qs_ok and el_ok) else 1


def _run_simulation(args, kind):
    cfg = _load_json(args.config)
    eps = float(_take(cfg, "eps", 0.5))
    p = _material_from(cfg, args.preset, eps=eps)
    grid = _grid_from(cfg)
    dt = float(_take(cfg, "dt", required=True))
    t_end = float(_take(cfg, "t_end", required=True))
    theta = float(_take(cfg, "imex_theta", 0.5))
    recipe = dict(_take(cfg, "recipe", {"name": "smooth"}))
    snap_every = int(_take(cfg, "snapshot_every", 0))
    _reject_unknown(cfg, "config")

    ctx = SpectralContext(grid)
    n0, ndot0, v0 = initial_fields(recipe, grid, ctx)
    out_dir = Path(args.out or f"{kind}-out")
    snap_dir = out_dir / "snapshots"
    rows = []
    cert_payload = _coeff_payload(p)

    qs_ok = cert_payload["qs_certificate"]["ok"]
    el_ok = cert_payload["el_certificate"]["ok"]
    if kind == "qs" and not qs_ok and not args.force:
        raise CertificateRefused(
            "viscosity parameters fail the dissipativity certificate "
            "(use --force to run anyway)")
    if kind == "el" and not el_ok and not args.force:
        raise CertificateRefused(
            "Leslie coefficients fail the dissipativity certificate "
            "(use --force to run anyway)")

    if kind == "qs":
        from .expansion import build_well_prepared
        state = build_well_prepared(n0, ndot0, v0, p, order=0, ctx=ctx)
        run_cfg = QsConfig(params=p, dt=dt, t_end=t_end, imex_theta=theta,
                           snapshot_every=snap_every)
        columns = QS_COLUMNS
        step, row_fn = qs_step, lambda a, b: qs_series_row(a, b, p, ctx)
        save = lambda i, s: save_qs_state(
            snap_dir / f"snap_{i:06d}.qsf", grid, s, {"eps": eps})
    else:
        lp = p.leslie()
        state = ElState(n0, ndot0, v0, 0.0)
        run_cfg = ElConfig(leslie=lp, dt=dt, t_end=t_end, imex_theta=theta,
                           snapshot_every=snap_every)
        columns = EL_COLUMNS
        step, row_fn = el_step, lambda a, b: el_series_row(a, b, lp, ctx)
        save = lambda i, s: save_el_state(
            snap_dir / f"snap_{i:06d}.qsf", grid, s)

    if snap_every:
        snap_dir.mkdir(parents=True, exist_ok=True)
        save(0, state)
    nsteps = int(round(t_end / dt))
    current = state
    for k in range(nsteps):
        new = step(current, run_cfg, ctx)
        rows.append(row_fn(current, new))
        if snap_every and (k + 1) % snap_every == 0:
            save(k + 1, new)
        current = new

    write_series_csv(out_dir / "series.csv", rows, columns)
    report = {
        "kind": kind, "eps": eps, "dt": dt, "t_end": t_end,
        "imex_theta": theta, "snapshot_every": snap_every,
        "recipe": recipe, "seed": args.seed,
        "grid": {"nx": grid.nx, "ny": grid.ny, "lx": grid.lx, "ly": grid.ly},
        "params": {"bulk": vars(p.bulk).copy(),
                   "elastic": vars(p.elastic).copy(),
                   "visc": vars(p.visc).copy()},
        "coefficients": cert_payload,
        "final_time": current.t,
        "final_energy": rows[-1]["E_total"] if rows else None,
    }
    write_json(out_dir / "report.json", report)
    if not args.no_plots:
        energy_cols = ("E_kin", "E_inertial", "F_eps", "E_total") \
            if kind == "qs" else ("E_kin", "E_inertial", "E_F", "E_total")
        render_run_figures(rows, out_dir, energy_cols, kind)
    print(f"{kind} run finished at t={current.t:g}; "
          f"E_total={rows[-1]['E_total']:.6g}" if rows else "no steps taken")
    print(f"outputs in {out_dir}")
    return 0


def cmd_simulate_qs(args):
    return _run_simulation(args, "qs")


def cmd_simulate_el(args):
    return _run_simulation(args, "el")


def cmd_sweep(args):
    cfg = _load_json(args.config)
    p = _material_from(cfg, args.preset)
    grid = _grid_from(cfg)
    threads = args.threads or int(os.environ.get("LIMITLAB_THREADS", "1"))
    sweep_cfg = SweepConfig(
        params=p,
        epsilons=tuple(float(e) for e in _take(cfg, "epsilons", required=True)),
        grid=grid,
        dt=float(_take(cfg, "dt", required=True)),
        t_end=float(_take(cfg, "t_end", required=True)),
        recipe=dict(_take(cfg, "recipe", {"name": "smooth"})),
        order=int(_take(cfg, "order", 1)),
        n_output=int(_take(cfg, "n_output", 25)),
        dt_rule=str(_take(cfg, "dt_rule", "fixed")),
        force=args.force,
        seed=args.seed,
        threads=threads,
    )
    _reject_unknown(cfg, "config")
    out_dir = Path(args.out or "sweep-out")

    report = run_sweep(sweep_cfg, progress=lambda msg: print(f"[sweep] {msg}"))
    write_json(out_dir / "report.json", report)
    for run in report["runs"]:
        rows = [{"t": t, "e_Q": q, "e_v": v, "e_out": o, "e_inf": i, "Ef": f}
                for t, q, v, o, i, f in zip(run["t"], run["e_Q"], run["e_v"],
                                            run["e_out"], run["e_inf"],
                                            run["Ef"])]
        write_series_csv(out_dir / f"series_eps_{run['eps']:g}.csv", rows,
                         ("t", "e_Q", "e_v", "e_out", "e_inf", "Ef"))
    if not args.no_plots:
        render_sweep_figures(report, out_dir)
    if report.get("fitted_order_Q"):
        fit = report["fitted_order_Q"]
        print(f"fitted order of sup_t ||Q - Q0(n)||: {fit['slope']:.3f} "
              f"(pairwise {['%.3f' % o for o in fit['pair_orders']]})")
    print(f"outputs in {out_dir}")
    return 0


def cmd_validate_energy(args):
    run_dir = Path(args.run)
    report_path = run_dir / "report.json"
    if not report_path.exists():
        raise ConfigError(f"no report.json under {run_dir}")
    report = json.loads(report_path.read_text())
    kind = report["kind"]
    snaps = sorted((run_dir / "snapshots").glob("snap_*.qsf"))
    if len(snaps) < 2:
        raise ConfigError("need at least two snapshots to validate")

    p = MaterialParams(bulk=BulkParams(**report["params"]["bulk"]),
                       elastic=ElasticParams(**report["params"]["elastic"]),
                       visc=ViscosityParams(**report["params"]["visc"]),
                       eps=report.get("eps", 0.5))
    grid = PeriodicGrid(**report["grid"])
    ctx = SpectralContext(grid)
    dt = report["dt"]
    theta = report["imex_theta"]

    rows = []
    ok = True
    for left, right in zip(snaps[:-1], snaps[1:]):
        if kind == "qs":
            _, s0, _ = load_qs_state(left)
            _, s1, _ = load_qs_state(right)
            run_cfg = QsConfig(params=p, dt=dt, t_end=s1.t, imex_theta=theta)
            stepper = qs_step
            row_fn = lambda a, b: qs_series_row(a, b, p, ctx)
            fields = lambda s: (s.q, s.qdot, s.v)
        else:
            lp = p.leslie()
            _, s0, _ = load_el_state(left)
            _, s1, _ = load_el_state(right)
            run_cfg = ElConfig(leslie=lp, dt=dt, t_end=s1.t, imex_theta=theta)
            stepper = el_step
            row_fn = lambda a, b: el_series_row(a, b, lp, ctx)
            fields = lambda s: (s.n, s.ndot, s.v)
        nsteps = int(round((s1.t - s0.t) / dt))
        current = s0
        worst_resid = 0.0
        last_row = None
        for _ in range(nsteps):
            new = stepper(current, run_cfg, ctx)
            last_row = row_fn(current, new)
            worst_resid = max(worst_resid, last_row["residual"])
            current = new
        drift = max(float(np.max(np.abs(a - b)))
                    for a, b in zip(fields(current), fields(s1)))
        segment_ok = drift <= 1e-10
        ok = ok and segment_ok
        rows.append({"t0": s0.t, "t1": s1.t, "max_residual": worst_resid,
                     "replay_drift": drift, "ok": float(segment_ok)})
        print(f"[{s0.t:8.4f} -> {s1.t:8.4f}] residual<= {worst_resid:.3e} "
              f"replay drift {drift:.3e} {'ok' if segment_ok else 'MISMATCH'}")

    out_dir = Path(args.out or run_dir)
    write_series_csv(out_dir / "validate.csv", rows,
                     ("t0", "t1", "max_residual", "replay_drift", "ok"))
    write_json(out_dir / "validate.json",
               {"run": str(run_dir), "kind": kind, "segments": rows,
                "ok": bool(ok)})
    if not args.no_plots:
        import matplotlib.pyplot as plt
        fig, ax = plt.subplots(figsize=(6, 4), dpi=130)
        ax.semilogy([r["t1"] for r in rows],
                    [max(r["max_residual"], 1e-300) for r in rows], "o-")
        ax.set_xlabel("t")
        ax.set_ylabel("max |dE/dt - R_mid| per segment")
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        fig.savefig(out_dir / "validate_residuals.png")
        plt.close(fig)
    return 0 if ok else 1


def cmd_identity_suite(args):
    from .identity_suite import run_identity_suite
    checks = run_identity_suite(seed=args.seed)
    for c in checks:
        flag = "PASS" if c.passed else "FAIL"
        print(f"{flag} {c.group:10s} {c.name:42s} "
              f"value={c.value:.6e} threshold={c.threshold:.6e}")
    n_failed = sum(1 for c in checks if not c.passed)
    print(f"{len(checks) - n_failed}/{len(checks)} identity checks passed")
    if args.out:
        write_json(Path(args.out) / "identities.json",
                   {"checks": [c.as_dict() for c in checks],
                    "ok": n_failed == 0})
    return 0 if n_failed == 0 else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="limitlab",
        description="Nematic liquid-crystal hydrodynamics laboratory: "
                    "inertial Q-tensor and director models with their "
                    "coefficient bridge and uniaxial-limit experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, config=True):
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--force", action="store_true",
                        help="run even if a dissipativity certificate fails")
        sp.add_argument("--threads", type=int, default=0,
                        help="parallel workers (default LIMITLAB_THREADS or 1)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--preset", choices=PRESET_NAMES,
                        help="named parameter preset")
        sp.add_argument("--no-plots", action="store_true",
                        help="skip figure rendering")
        if config:
            sp.add_argument("--config", help="JSON configuration file")

    sp = sub.add_parser("check-coeffs",
                        help="print mapped coefficients and certificates")
    common(sp)
    sp.set_defaults(fn=cmd_check_coeffs)

    sp = sub.add_parser("simulate-qs", help="integrate the tensor model")
    common(sp)
    sp.set_defaults(fn=cmd_simulate_qs)

    sp = sub.add_parser("simulate-el", help="integrate the director model")
    common(sp)
    sp.set_defaults(fn=cmd_simulate_el)

    sp = sub.add_parser("sweep", help="uniaxial-limit convergence experiment")
    common(sp)
    sp.set_defaults(fn=cmd_sweep)

    sp = sub.add_parser("validate-energy",
                        help="replay snapshots and check dissipation")
    common(sp)
    sp.add_argument("--run", required=True,
                    help="output directory of a previous simulate run")
    sp.set_defaults(fn=cmd_validate_energy)

    sp = sub.add_parser("identity-suite", help="run all algebraic identities")
    common(sp, config=False)
    sp.set_defaults(fn=cmd_identity_suite)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except CertificateRefused as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 1
    except LimitLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
