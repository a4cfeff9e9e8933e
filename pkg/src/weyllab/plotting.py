"""Figure rendering for the CLI report path.

Every helper takes the already-computed report object and writes a single
figure to a file; nothing here recomputes mathematics.  The Agg backend is
forced so rendering works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_RC = {
    "figure.figsize": (7.0, 4.6),
    "figure.dpi": 130,
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.1,
}


def _new_axes(title: str, xlabel: str, ylabel: str):
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    return fig, ax


def _save(fig, path: str) -> None:
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_mean_square(report, path: str, label: str = "R") -> None:
    """Log-log cumulative integral of the squared remainder with its fit."""
    fig, ax = _new_axes(
        f"mean square of {label}(t)", "T", f"integral of {label}^2 up to T"
    )
    ax.loglog(report.t_grid, report.integral_values, label="computed")
    fit = np.exp(report.fitted_log_constant) * report.t_grid ** report.fitted_slope
    ax.loglog(report.t_grid, fit, "--", label=f"slope {report.fitted_slope:.3f}")
    ax.legend()
    _save(fig, path)


def plot_cramer(report, path: str) -> None:
    fig, ax = _new_axes("circle discrepancy mean square", "X", "integral of P^2 up to X")
    ax.loglog(report.x_grid, report.integral_values, label="computed")
    fit = np.exp(report.log_constant) * report.x_grid ** report.slope
    ax.loglog(report.x_grid, fit, "--", label=f"slope {report.slope:.3f}")
    ax.legend()
    _save(fig, path)


def plot_s_trace(report, path: str) -> None:
    """S(u, U) over the pipeline's u-grid with the peak marked."""
    fig, ax = _new_axes(
        f"S(u, U) for U = {report.U}, T = {report.T:g}", "u", "S(u, U)"
    )
    ax.plot(report.u_grid, report.s_trace)
    ax.axvline(report.u_star, color="tab:red", alpha=0.6)
    ax.plot([report.u_star], [report.S_at_u_star], "o", color="tab:red",
            label=f"u* = {report.u_star:.4f}")
    ax.axhline(report.I_value, color="tab:green", alpha=0.6, ls=":",
               label=f"I(T,U) = {report.I_value:.4g}")
    ax.legend()
    _save(fig, path)


def plot_estar_compare(cmp, path: str) -> None:
    """E(u) vs E*(u) and the secular-corrected residual."""
    with plt.rc_context(_RC):
        fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7.0, 6.4), sharex=True)
    ax1.plot(cmp.u_values, cmp.e_values, label="E(u)", alpha=0.8)
    ax1.plot(cmp.u_values, cmp.estar_values, label="E*(u)", alpha=0.8)
    ax1.set_ylabel("value")
    ax1.legend()
    mask = np.abs(cmp.residuals) > 0
    ax2.loglog(cmp.u_values[mask], np.abs(cmp.residuals[mask]), ".", ms=3,
               label=f"|residual|, fitted exponent {cmp.exponent:.3f}")
    ax2.set_xlabel("u")
    ax2.set_ylabel("|E - E* - secular|")
    ax2.legend()
    _save(fig, path)


def plot_vaaler(w, slack, H: int, path: str) -> None:
    fig, ax = _new_axes(f"Vaaler sandwich slack, H = {H}", "w",
                        "Sigma*_H - |psi + Sigma_H|")
    ax.plot(w, slack, lw=0.7)
    ax.axhline(0.0, color="tab:red", alpha=0.6)
    _save(fig, path)


def plot_theta(table, path: str) -> None:
    fig, ax = _new_axes(f"theta coefficients, ell = {table.ell}", "n", "theta(n)")
    n = np.arange(1, table.limit + 1)
    vals = table.values[1:]
    nz = vals > 0
    ax.plot(n[nz], vals[nz], ".", ms=2)
    _save(fig, path)


def plot_counts(ts, counts, mains, path: str, ell: int) -> None:
    fig, ax = _new_axes(f"spectral counting, ell = {ell}", "t", "N(t)")
    ax.plot(ts, counts, drawstyle="steps-post", label="N(t)")
    ax.plot(ts, mains, "--", label="Weyl main term")
    ax.legend()
    _save(fig, path)
