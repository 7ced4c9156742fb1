"""Figures written next to the CSV output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLES = {
    "cosine": dict(color="tab:red", ls="-"),
    "sine": dict(color="tab:blue", ls=":"),
    "sine2": dict(color="tab:purple", ls="--"),
    "experimental": dict(color="k", ls="-."),
}


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_design(s, x1, x0, path, label=""):
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(5, 6), sharex=True)
    ax1.plot(s, x1, **STYLES.get(label, {}))
    ax1.set_ylabel(r"$\tilde x_1(s)$")
    ax2.plot(s, x0, **STYLES.get(label, {}))
    ax2.set_ylabel(r"$\tilde x_0(s)$")
    ax2.set_xlabel("$s$")
    ax1.set_title(label)
    return _finish(fig, path)


def plot_trajectory(s, x, x0, path):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(s, x0, "k--", lw=1, label="trap centre")
    ax.plot(s, x, "tab:red", label="particle")
    ax.set_xlabel("$s$")
    ax.set_ylabel(r"$\tilde x$")
    ax.legend()
    return _finish(fig, path)


def plot_snapshots(x, densities: dict, path):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for s, rho in sorted(densities.items()):
        ax.plot(x, rho, label=f"s={s:g}")
    ax.set_xlabel(r"$x/a_0$")
    ax.set_ylabel(r"$|\psi|^2$")
    ax.legend()
    return _finish(fig, path)


def plot_sweep(rows, path, quantity="energy"):
    """``rows`` are dicts with protocol, trap, log10_xi_over_d, value, status."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    curves = {}
    for r in rows:
        if r["status"] != "ok":
            continue
        curves.setdefault((r["trap"], r["protocol"]), []).append(
            (r["log10_xi_over_d"], r["value"]))
    for (trap, protocol), pts in curves.items():
        xs, ys = np.array(pts).T
        style = dict(STYLES.get(protocol, {}))
        if trap == "quartic" and quantity == "fidelity":
            style["color"] = "k" if protocol == "sine" else "tab:blue"
        if quantity == "energy":
            ax.semilogy(xs, np.abs(ys), label=f"{protocol}", **style)
        else:
            ax.plot(xs, ys, label=f"{trap} {protocol}", **style)
    ax.set_xlabel(r"$\log_{10}(\xi/d)$")
    ax.set_ylabel(r"$|\Delta E|/\hbar\omega_0$" if quantity == "energy" else "$F$")
    ax.legend()
    return _finish(fig, path)
