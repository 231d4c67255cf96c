"""PNG companions for CLI outputs (headless Agg backend)."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .io import atomic_write_bytes  # noqa: E402


def png_path(out) -> Path:
    return Path(out).with_suffix(".png")


def _save(fig, path):
    import io as _io
    buf = _io.BytesIO()
    fig.savefig(buf, format="png", dpi=110, bbox_inches="tight", metadata={"Software": None})
    plt.close(fig)
    atomic_write_bytes(path, buf.getvalue())


def plot_spectra(results: dict, window, path):
    """Eigenvalue sticks, one row per method."""
    fig, ax = plt.subplots(figsize=(7, 1 + 0.7 * len(results)))
    for row, (name, spec) in enumerate(results.items()):
        ev = np.asarray(spec.eigenvalues)
        ax.vlines(ev, row - 0.35, row + 0.35, lw=1.2)
    ax.axvspan(window.a, window.b, color="0.92", zorder=-1)
    ax.set_yticks(range(len(results)), list(results))
    ax.set_xlabel("eigenvalue")
    _save(fig, path)


def plot_density(t, scaled, c0, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(t, scaled, "o", ms=3, label="scaled smoothed density")
    if c0 is not None:
        ax.plot(t, c0, "-", label="c0(t)")
    ax.set_xlabel("t")
    ax.legend()
    _save(fig, path)


def plot_sweep(sweep, path):
    x = np.asarray(sweep.h_eff, float)
    if sweep.mode == "coupling":
        x = x * x
    r = np.abs(np.asarray(sweep.residuals, float))
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(x, np.where(r > 0, r, np.nan), "o-", label="|residual|")
    if sweep.fit_p is not None:
        ax.loglog(x, sweep.fit_c * x ** sweep.fit_p, "--", label=f"fit p={sweep.fit_p:.3g}")
    ax.set_xlabel("h_eff^2" if sweep.mode == "coupling" else "h")
    ax.legend()
    _save(fig, path)


def plot_c0(samples, path):
    t, v = zip(*samples) if samples else ((), ())
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(t, v, "-")
    ax.set_xlabel("t")
    ax.set_ylabel("c0(t)")
    _save(fig, path)
