"""Delimited output and figure rendering for runs and sweeps.

CSV and JSON files are written deterministically (sorted keys, repr
floats) so identical configurations produce byte-identical outputs.
Figures are rendered next to the delimited files unless plotting is
disabled.
"""

import csv
import json
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

QS_COLUMNS = ("t", "E_kin", "E_inertial", "F_eps", "E_total", "R_mid",
              "residual", "max_Q", "div_v_norm")
EL_COLUMNS = ("t", "E_kin", "E_inertial", "E_F", "E_total", "residual",
              "min_n", "max_n_ndot")


def write_series_csv(path, rows, columns):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([repr(float(row[c])) for c in columns])
    return path


def read_series_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        columns = next(reader)
        rows = [{c: float(v) for c, v in zip(columns, line)}
                for line in reader]
    return columns, rows


def write_json(path, payload):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return path


def _new_axes(title, xlabel, ylabel):
    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=130)
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, which="both", alpha=0.3)
    return fig, ax


def render_energy_figure(rows, out_path, energy_cols, title):
    fig, ax = _new_axes(title, "t", "energy")
    ts = [r["t"] for r in rows]
    for col in energy_cols:
        ax.plot(ts, [r[col] for r in rows], label=col)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return Path(out_path)


def render_residual_figure(rows, out_path, title):
    fig, ax = _new_axes(title, "t", "|dE/dt - R_mid|")
    ts = [r["t"] for r in rows]
    vals = [max(r["residual"], 1e-300) for r in rows]
    ax.semilogy(ts, vals)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return Path(out_path)


def render_run_figures(rows, out_dir, energy_cols, prefix):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = [
        render_energy_figure(rows, out_dir / f"{prefix}_energy.png",
                             energy_cols, "energy budget"),
        render_residual_figure(rows, out_dir / f"{prefix}_residual.png",
                               "dissipation-identity residual"),
    ]
    return paths


def render_sweep_figures(report, out_dir):
    """Convergence and error-history figures for a sweep report."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    eps = report["epsilons"]
    paths = []

    fig, ax = _new_axes("uniaxial-limit convergence", "eps", "sup_t error")
    ax.loglog(eps, report["sup_e_Q"], "o-", label="||Q - Q0(n)||")
    ax.loglog(eps, report["sup_e_v"], "s-", label="||v - v_ref||")
    if report.get("fitted_order_Q"):
        slope = report["fitted_order_Q"]["slope"]
        anchor = report["sup_e_Q"][0]
        ax.loglog(eps, [anchor * (e / eps[0]) ** slope for e in eps],
                  "k--", lw=0.8, label=f"slope {slope:.2f}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = out_dir / "convergence.png"
    fig.savefig(path)
    plt.close(fig)
    paths.append(path)

    fig, ax = _new_axes("discrepancy history", "t", "||Q - Q0(n)||")
    for run in report["runs"]:
        ax.semilogy(run["t"], [max(v, 1e-300) for v in run["e_Q"]],
                    label=f"eps={run['eps']:g}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = out_dir / "errors_vs_time.png"
    fig.savefig(path)
    plt.close(fig)
    paths.append(path)

    fig, ax = _new_axes("remainder energy surrogate", "t", "Ef")
    for run in report["runs"]:
        ax.plot(run["t"], run["Ef"], label=f"eps={run['eps']:g}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = out_dir / "remainder_energy.png"
    fig.savefig(path)
    plt.close(fig)
    paths.append(path)
    return paths
