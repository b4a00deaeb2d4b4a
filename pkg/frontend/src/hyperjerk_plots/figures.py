"""Histogram and likelihood-curve figures from benchmark CSV files.

Input schemas (produced by the estimation package's CLI):

* trials CSV: ``N,trial,seed,theta_hat_1..theta_hat_p,error_1..error_p,sigma_min``
* likelihood CSV: ``grid_value,objective`` with an empty objective field on
  grid points whose integration diverged.

Rendering is deterministic: fixed figure geometry, Freedman-Diaconis bins
computed on the pooled data, a pinned SVG hash salt, and no date metadata.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

matplotlib.rcParams["svg.hashsalt"] = "hyperjerk-plots"

FIGSIZE = (6.4, 4.8)
DPI = 110


def read_trials_csv(path: str) -> dict:
    """Load a trials CSV into arrays keyed by column name."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    if not rows:
        raise ValueError(f"no trial rows in {path}")
    cols = {name: np.array([float(r[i]) for r in rows]) for i, name in enumerate(header)}
    return cols


def read_likelihood_csv(path: str):
    """Load a likelihood CSV; empty objective fields become NaN gaps."""
    grid, objective = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:2] != ["grid_value", "objective"]:
            raise ValueError(f"{path} is not a likelihood curve CSV (header {header})")
        for row in reader:
            grid.append(float(row[0]))
            objective.append(float(row[1]) if row[1] != "" else math.nan)
    if not grid:
        raise ValueError(f"no curve rows in {path}")
    return np.asarray(grid), np.asarray(objective)


def freedman_diaconis_edges(pooled: np.ndarray) -> np.ndarray:
    """Shared histogram bin edges from the pooled samples.

    Falls back to a single spanning bin when the interquartile range
    degenerates (e.g. one trial per window size).
    """
    lo, hi = float(pooled.min()), float(pooled.max())
    if lo == hi:
        pad = max(abs(lo), 1.0) * 1e-3
        return np.array([lo - pad, hi + pad])
    q75, q25 = np.percentile(pooled, [75, 25])
    width = 2.0 * (q75 - q25) / pooled.size ** (1.0 / 3.0)
    if width <= 0.0:
        return np.array([lo, hi])
    nbins = max(1, min(int(math.ceil((hi - lo) / width)), 200))
    return np.linspace(lo, hi, nbins + 1)


def _save(fig, out_stem: str) -> dict:
    png = f"{out_stem}.png"
    svg = f"{out_stem}.svg"
    os.makedirs(os.path.dirname(os.path.abspath(png)), exist_ok=True)
    fig.savefig(png, dpi=DPI)
    fig.savefig(svg, metadata={"Date": None})
    plt.close(fig)
    return {"png": png, "svg": svg}


@dataclass(frozen=True)
class FigureInfo:
    paths: dict
    panels: int


def plot_histograms(trials_csv: str, component: int, out_stem: str) -> FigureInfo:
    """One histogram panel per window size for theta_hat_<component>.

    ``component`` is 1-based, matching the CSV column names.  Bin edges are
    shared across panels (Freedman-Diaconis on the pooled estimates) so the
    panels are visually comparable.
    """
    cols = read_trials_csv(trials_csv)
    key = f"theta_hat_{component}"
    if key not in cols:
        raise ValueError(f"{trials_csv} has no column {key}")
    N_values = sorted(set(int(v) for v in cols["N"]))
    pooled = cols[key]
    edges = freedman_diaconis_edges(pooled)

    fig, axes = plt.subplots(
        len(N_values), 1, figsize=(FIGSIZE[0], 2.0 * len(N_values)),
        sharex=True, squeeze=False,
    )
    for ax, N in zip(axes[:, 0], N_values):
        values = pooled[cols["N"] == N]
        ax.hist(values, bins=edges, color="#4878d0", edgecolor="white")
        ax.set_ylabel(f"N = {N}")
    axes[-1, 0].set_xlabel(f"estimate of component {component}")
    axes[0, 0].set_title(f"Sampling distribution of theta_hat_{component}")
    fig.tight_layout()
    return FigureInfo(paths=_save(fig, out_stem), panels=len(N_values))


def plot_likelihood(curve_csv: str, out_stem: str) -> FigureInfo:
    """Line plot of the scan objective; diverged grid points leave gaps."""
    grid, objective = read_likelihood_csv(curve_csv)
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.plot(grid, objective, color="#4878d0", linewidth=1.2)
    finite = np.isfinite(objective)
    if finite.any():
        best = int(np.nanargmax(np.where(finite, objective, -np.inf)))
        ax.axvline(grid[best], color="#d65f5f", linestyle=":", linewidth=1.0)
    ax.set_xlabel("parameter value")
    ax.set_ylabel("log-likelihood (affine scale)")
    ax.set_title(os.path.splitext(os.path.basename(curve_csv))[0])
    fig.tight_layout()
    return FigureInfo(paths=_save(fig, out_stem), panels=1)


def render_all(run_dir: str, out_dir: str) -> dict:
    """Render the four standard figures from a completed benchmark run.

    Expects ``trials.csv`` plus ``likelihood_theta1.csv`` and
    ``likelihood_theta2.csv`` in run_dir; writes PNG and SVG for two
    histogram figures and two likelihood curves into out_dir.
    """
    outputs = {}
    trials = os.path.join(run_dir, "trials.csv")
    for component in (1, 2):
        info = plot_histograms(
            trials, component, os.path.join(out_dir, f"sampling_theta{component}")
        )
        outputs[f"sampling_theta{component}"] = info
    for component in (1, 2):
        curve = os.path.join(run_dir, f"likelihood_theta{component}.csv")
        info = plot_likelihood(curve, os.path.join(out_dir, f"likelihood_theta{component}"))
        outputs[f"likelihood_theta{component}"] = info
    return outputs
