"""Figure rendering for the CLI report path.

Every command writes its delimited output first; these helpers then render a
matplotlib figure next to it.  Rendering is headless (Agg) and carries no
timestamps, so the delimited outputs remain the canonical, byte-stable
artifacts.
"""
from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "save_symbol_figure",
    "save_kernel_bound_figure",
    "save_iint_figure",
    "save_experiment_figure",
    "save_hermite_figure",
    "save_transplant_figure",
]

_FIG_SIZE = (6.4, 4.0)


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_symbol_figure(path, s_grid, m_values, t_grid, psi_values):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.0, 3.6))
    ax1.plot(s_grid, m_values, "o-", ms=3)
    ax1.set_xlabel("s")
    ax1.set_ylabel("m(s)")
    ax1.set_title("transform values")
    mags = np.abs(psi_values)
    positive = mags > 0
    if positive.any():
        ax2.loglog(np.asarray(t_grid)[positive], mags[positive], "o-", ms=3)
    ax2.set_xlabel("t")
    ax2.set_ylabel("|Psi(t)|")
    ax2.set_title("small-time growth")
    _finish(fig, path)


def save_kernel_bound_figure(path, rows):
    fig, ax = plt.subplots(figsize=_FIG_SIZE)
    by_rho = {}
    for rho, x, _, weighted in rows:
        by_rho.setdefault(rho, []).append((x, weighted))
    for rho, pts in sorted(by_rho.items()):
        xs, ws = zip(*sorted(pts))
        ax.loglog(xs, np.maximum(ws, 1e-300), label=f"rho = {rho:g}")
    ax.set_xlabel("x")
    ax.set_ylabel("x^(alpha+1-sigma) |g_rho(x)|")
    ax.set_title("weighted kernel scan")
    ax.legend()
    _finish(fig, path)


def save_iint_figure(path, samples, regime, gamma, k):
    fig, ax = plt.subplots(figsize=_FIG_SIZE)
    rs = np.array([r for r, _ in samples])
    vals = np.array([v for _, v in samples])
    ax.loglog(1.0 / (1.0 - rs), vals, "o-")
    ax.set_xlabel("1 / (1 - r)")
    ax.set_ylabel("I(r)")
    ax.set_title(f"I integral near r = 1: gamma={gamma:g}, k={k:g} ({regime})")
    _finish(fig, path)


def save_experiment_figure(path, rows, max_ratio):
    fig, ax = plt.subplots(figsize=_FIG_SIZE)
    names = [r.name for r in rows]
    ratios = [r.ratio if not r.note else math.nan for r in rows]
    ax.bar(range(len(rows)), ratios)
    ax.axhline(max_ratio, color="k", lw=0.8, ls="--")
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels(names, rotation=60, ha="right", fontsize=7)
    ax.set_ylabel("q-norm / p-norm")
    ax.set_title("norm ratios across the test family")
    _finish(fig, path)


def save_hermite_figure(path, parity_errors, split_errors, path_error):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.0, 3.6))
    ks = range(len(parity_errors))
    ax1.semilogy(list(ks), np.maximum(parity_errors, 1e-18), "o-", ms=3)
    ax1.set_xlabel("k")
    ax1.set_ylabel("max abs error")
    ax1.set_title("parity identities")
    ks2 = range(len(split_errors))
    ax2.semilogy(list(ks2), np.maximum(split_errors, 1e-18), "o-", ms=3)
    ax2.axhline(max(path_error, 1e-18), color="r", lw=0.8, ls="--",
                label="operator-path error")
    ax2.set_xlabel("k")
    ax2.set_ylabel("relative error")
    ax2.set_title("even/odd split consistency")
    ax2.legend()
    _finish(fig, path)


def save_transplant_figure(path, labels, residuals):
    fig, ax = plt.subplots(figsize=_FIG_SIZE)
    ax.bar(range(len(labels)), np.maximum(residuals, 1e-18))
    ax.set_yscale("log")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels)
    ax.set_ylabel("round-trip L2 residual")
    ax.set_title("transplantation round trips")
    _finish(fig, path)
