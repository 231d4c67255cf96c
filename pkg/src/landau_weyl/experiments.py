"""Spectral sums, smoothed densities, counting, and convergence sweeps."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import asymptotics as asy
from .errors import ConfigError, CutoffIntrusion, TrustWindowTooSmall
from .model import (BandRange, Mollifier, PotentialKind, PotentialSpec, Regime, SmoothTestFunction, SpectralWindow,
                    algebraic_well, contributing_bands, window_preimage_radii)
from .parallel import parallel_map
from .solvers import SpectrumResult, band_effective_spectrum, feshbach_spectrum, radial_spectrum

_TOL = 1e-12


def _require_inside(spec: SpectrumResult, lo: float, hi: float, what: str):
    t0, t1 = spec.trust_window
    if lo < t0 - _TOL or hi > t1 + _TOL:
        raise TrustWindowTooSmall(f"{what} [{lo}, {hi}] not inside trust window [{t0}, {t1}]")


def count_eigs(spec: SpectrumResult, window: SpectralWindow) -> int:
    _require_inside(spec, window.a, window.b, "window")
    ev = np.asarray(spec.eigenvalues)
    inside = (ev >= window.a) & (ev <= window.b)
    return int(np.sum(np.asarray(spec.multiplicities)[inside]))


def trace_sum(spec: SpectrumResult, f: SmoothTestFunction) -> float:
    _require_inside(spec, *f.support, what="test-function support")
    ev = np.asarray(spec.eigenvalues)
    return float(np.sum(np.asarray(spec.multiplicities) * f(ev)))


def smoothed_density(spec: SpectrumResult, f: SmoothTestFunction, mol: Mollifier, eps: float, t_grid) -> list:
    """sum_k mult_k f(l_k) theta_breve_eps(t - l_k) on the t grid."""
    _require_inside(spec, *f.support, what="test-function support")
    t = np.asarray(t_grid, dtype=float)
    t0, t1 = spec.trust_window
    if len(t) and (t.min() < t0 - _TOL or t.max() > t1 + _TOL):
        raise TrustWindowTooSmall("t grid leaves the trust window")
    ev = np.asarray(spec.eigenvalues)
    w = np.asarray(spec.multiplicities) * f(ev)
    vals = mol.theta_breve_eps(t[:, None] - ev[None, :], eps) @ w
    return list(zip(t.tolist(), vals.tolist()))


def match_eigenvalues(e1, e2, max_shift: int = 3):
    """Pair two ascending lists by the index offset that minimises the largest gap.

    Returns ``(pairs, max_distance)``.  Window edges can cut one list a
    state earlier than the other, hence the offset search.
    """
    e1, e2 = np.asarray(e1, float), np.asarray(e2, float)
    need = max(1, min(len(e1), len(e2)) - 1)
    best = None
    for s in range(-max_shift, max_shift + 1):
        i0, j0 = max(0, s), max(0, -s)
        n = min(len(e1) - i0, len(e2) - j0)
        if n < need:
            continue
        d = float(np.max(np.abs(e1[i0:i0 + n] - e2[j0:j0 + n])))
        if best is None or d < best[1]:
            best = (list(zip(e1[i0:i0 + n], e2[j0:j0 + n])), d)
    if best is None:
        return [], math.nan
    return best


def fit_power_law(x: Sequence[float], r: Sequence[float], floor: float = 0.0):
    """Least-squares slope and amplitude of log|r| against log x.

    Returns ``(p, c)`` or ``(None, None)`` when fewer than four points are
    available or any residual is within 10x of the error floor.
    """
    x = np.asarray(x, float)
    r = np.abs(np.asarray(r, float))
    if len(x) < 4 or np.any(r <= 10 * floor) or np.any(r == 0):
        return None, None
    p, logc = np.polyfit(np.log(x), np.log(r), 1)
    return float(p), float(math.exp(logc))


def tail_nonincreasing(r: Sequence[float], slack: float = 0.1) -> bool:
    """|r| non-increasing over the last three points, one step may rise by up to ``slack``."""
    r = np.abs(np.asarray(r, float))[-3:]
    rises = [(b - a) / a for a, b in zip(r[:-1], r[1:]) if b > a]
    return len(rises) == 0 or (len(rises) == 1 and rises[0] <= slack)


def strictly_nonincreasing(r: Sequence[float]) -> bool:
    r = np.abs(np.asarray(r, float))
    return bool(np.all(np.diff(r) <= 0))


@dataclass
class SweepResult:
    mode: str
    params: list
    h_eff: list
    counts: list
    scaled_counts: list
    predicted: float
    residuals: list
    fit_p: Optional[float] = None
    fit_c: Optional[float] = None
    trace_scaled: list = field(default_factory=list)
    trace_predicted: Optional[float] = None
    trace_residuals: list = field(default_factory=list)
    trace_fit_p: Optional[float] = None
    trace_fit_c: Optional[float] = None
    method: str = "radial"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        p = np.asarray(self.params, float)
        d = np.diff(p)
        if len(p) > 1 and not (np.all(d > 0) or np.all(d < 0)):
            raise ConfigError("sweep parameters must be strictly monotone")

    @property
    def tail_ok(self) -> bool:
        return tail_nonincreasing(self.residuals)

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("mode", "method", "params", "h_eff", "counts", "scaled_counts",
                                              "predicted", "residuals", "fit_p", "fit_c", "trace_scaled",
                                              "trace_predicted", "trace_residuals", "trace_fit_p", "trace_fit_c",
                                              "meta")}


def run_spectrum(method: str, pot: PotentialSpec, regime: Regime, window: SpectralWindow,
                 bands: Optional[BandRange] = None, numerics: Optional[dict] = None, jobs: int = 1) -> SpectrumResult:
    """Dispatch to one pipeline with optional numerics overrides (L, N, n_max, R, N_r)."""
    from .solvers import band_grid
    num = dict(numerics or {})
    if bands is None:
        bands = contributing_bands(window, pot)
    if method == "radial":
        return radial_spectrum(pot, regime, window, bands, R=num.get("R"), N_r=num.get("N_r"), jobs=jobs)
    grid = band_grid(pot, window, bands, regime, num.get("L"), num.get("N"))
    if method == "band":
        return band_effective_spectrum(pot, bands, regime, grid, window, jobs=jobs)
    if method == "feshbach":
        return feshbach_spectrum(pot, regime, window, grid, num.get("n_max"), bands)
    raise ConfigError(f"unknown method {method!r}")


def h_sweep(pot: PotentialSpec, window: SpectralWindow, h_list: Sequence[float], f: Optional[SmoothTestFunction] = None,
            method: str = "radial", jobs: int = 1, numerics: Optional[dict] = None,
            quad_floor: float = 1e-10) -> SweepResult:
    """Counting (and trace) residuals against C0 (and alpha0) along decreasing h."""
    h_list = [float(h) for h in h_list]
    if len(h_list) < 4:
        raise ConfigError("an h sweep needs at least four values")
    if any(b >= a for a, b in zip(h_list[:-1], h_list[1:])):
        raise ConfigError("h values must be strictly decreasing")
    bands = contributing_bands(window, pot)
    c0 = asy.C0(window, pot, bands)
    a0 = asy.alpha0(f, pot, bands, rtol=1e-10) if f is not None else None

    def point(h):
        return run_spectrum(method, pot, Regime.semiclassical(h), window, bands, numerics)

    specs = parallel_map(point, h_list, jobs)
    counts = [count_eigs(s, window) for s in specs]
    scaled = [h * h * n for h, n in zip(h_list, counts)]
    res = [s - c0 for s in scaled]
    p, c = fit_power_law(h_list, res, quad_floor)
    out = SweepResult("semiclassical", h_list, h_list, counts, scaled, c0, res, p, c, method=method,
                      meta={"bands": [bands.l0, bands.l], "window": [window.a, window.b]})
    if f is not None:
        tr = [h * h * trace_sum(s, f) for h, s in zip(h_list, specs)]
        out.trace_scaled = tr
        out.trace_predicted = a0
        out.trace_residuals = [t - a0 for t in tr]
        out.trace_fit_p, out.trace_fit_c = fit_power_law(h_list, out.trace_residuals, quad_floor)
    return out


def check_cutoff(pot: PotentialSpec, window: SpectralWindow, bands: BandRange):
    """Window level sets of 2j+1+phi0 must stay outside the cutoff's support."""
    if pot.kind is not PotentialKind.POWER_TAIL:
        return
    r_in, _ = window_preimage_radii(pot, window, bands)
    if not math.isnan(r_in) and r_in <= pot.cutoff_support:
        raise CutoffIntrusion(f"window preimage reaches r = {r_in:.3g} inside the cutoff support "
                              f"{pot.cutoff_support:.3g}; increase M")


def lambda_sweep(pot: PotentialSpec, window: SpectralWindow, lambda_list: Sequence[float], method: str = "band",
                 jobs: int = 1, numerics: Optional[dict] = None) -> SweepResult:
    """Residual lambda^(-2/delta) N - D0 along increasing lambda, fitted in h_eff^2 = lambda^(-2/delta)."""
    lam = [float(v) for v in lambda_list]
    if len(lam) < 4:
        raise ConfigError("a lambda sweep needs at least four values")
    if any(b <= a for a, b in zip(lam[:-1], lam[1:])):
        raise ConfigError("lambda values must be strictly increasing")
    if pot.kind is not PotentialKind.POWER_TAIL:
        raise ConfigError("lambda sweep needs a power-tail potential")
    q = window.require_coupling_gap()
    bands = contributing_bands(window, pot)
    check_cutoff(pot, window, bands)
    d0 = asy.D0(window, pot, q)
    delta = pot.delta

    def point(v):
        return run_spectrum(method, pot, Regime.coupling(v, delta), window, bands, numerics)

    specs = parallel_map(point, lam, jobs)
    counts = [count_eigs(s, window) for s in specs]
    h = [v ** (-1.0 / delta) for v in lam]
    scaled = [v ** (-2.0 / delta) * n for v, n in zip(lam, counts)]
    res = [s - d0 for s in scaled]
    p, c = fit_power_law([x * x for x in h], res)
    return SweepResult("coupling", lam, h, counts, scaled, d0, res, p, c, method=method,
                       meta={"bands": [bands.l0, bands.l], "window": [window.a, window.b], "delta": delta})


def radial_coupling_crosscheck(lam: float, window: SpectralWindow, delta: float = 2.0, amplitude: float = 1.0):
    """Counts for lambda V with V = amplitude (1 + r^2)^(-delta/2): radial oracle vs band pipeline on phi0.

    The band pipeline sees only the tail amplitude r^-delta (cut off at the
    origin), the radial oracle the full profile.
    """
    from .model import default_cutoff_M, power_tail
    V = algebraic_well(amplitude, 1.0, delta)
    rad = radial_spectrum(V, Regime.coupling(lam, delta), window)
    phi = power_tail(amplitude, delta, default_cutoff_M(window))
    band = run_spectrum("band", phi, Regime.coupling(lam, delta), window)
    return count_eigs(rad, window), count_eigs(band, window)
