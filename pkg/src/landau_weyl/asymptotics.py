"""Leading Weyl coefficients as quadratures over the potential's level sets.

All coefficients carry the phase-space normalisation 1/(2 pi):

    alpha0(f) = sum_j (1/2pi) int f(2j+1 + V) dX
    C0        = sum_j (1/2pi) |{X : 2j+1 + V(X) in [a, b]}|
    c0(t)     = f(t) sum_j (1/2pi) int_{2j+1+V=t} dS / |grad V|
    b0(f)     = (1/(2pi delta)) int omega0^(2/delta) dtheta  sum_j int f(u) (u-2j-1)^(-1-2/delta) du
    D0        = (1/(4pi)) int omega0^(2/delta) dtheta  sum_j [(a-2j-1)^(-2/delta) - (b-2j-1)^(-2/delta)]
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import (ConfigError, CriticalEndpoint, CriticalLevel, QuadratureNotConverged, SupportOutsideGap,
                     WindowOutsideGap)
from .model import BandRange, PotentialKind, PotentialSpec, SmoothTestFunction, SpectralWindow

CRITICAL_TOL = 1e-8
N_THETA = 256


# quadrature engine


def _gl_panels(fn: Callable, edges: np.ndarray, order: int = 16):
    x, w = np.polynomial.legendre.leggauss(order)
    lo, hi = edges[:-1], edges[1:]
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    pts = mid[:, None] + half[:, None] * x[None, :]
    vals = fn(pts.ravel()).reshape(pts.shape)
    return float(np.sum(half[:, None] * w[None, :] * vals))


def integrate(fn: Callable, breakpoints: Sequence[float], rtol: float = 1e-10, atol: float = 1e-14,
              max_level: int = 14) -> tuple:
    """Composite Gauss-Legendre on the intervals between breakpoints, panels doubled to convergence.

    Returns ``(value, error_estimate)``; the estimate is the change over the
    last doubling.
    """
    bp = np.unique(np.asarray(breakpoints, dtype=float))
    if len(bp) < 2:
        return 0.0, 0.0
    prev = None
    for level in range(max_level):
        n = 2**level
        edges = np.concatenate([np.linspace(bp[i], bp[i + 1], n + 1)[:-1] for i in range(len(bp) - 1)] + [bp[-1:]])
        val = _gl_panels(fn, edges)
        if prev is not None and abs(val - prev) <= max(rtol * abs(val), atol) and level >= 2:
            return val, abs(val - prev)
        prev = val
    raise QuadratureNotConverged(f"no convergence after {max_level} panel doublings (last {val!r})")


def _theta_grid(n: int = N_THETA):
    return np.linspace(0.0, 2 * np.pi, n, endpoint=False)


def angular_moment(pot: PotentialSpec, power: float, n: int = 1024) -> float:
    """int_0^{2pi} omega0(theta)^power dtheta by the trapezoid rule."""
    th = _theta_grid(n)
    return float(2 * np.pi * np.mean(pot.omega0(th) ** power))


# radial level sets


def _radial_fn(pot: PotentialSpec, theta: Optional[float]):
    if theta is None:
        return pot.radial, pot.dradial
    c, s = math.cos(theta), math.sin(theta)

    def v(r):
        r = np.asarray(r, dtype=float)
        return pot.value(r * c, r * s)

    def dv(r, step=1e-6):
        r = np.asarray(r, dtype=float)
        return (v(r + step) - v(np.maximum(r - step, 0.0))) / (r + step - np.maximum(r - step, 0.0))

    return v, dv


def level_roots(pot: PotentialSpec, level: float, theta: Optional[float] = None,
                r_scan: Optional[np.ndarray] = None) -> np.ndarray:
    """Radii where V(r) = level along a ray (radial profile when theta is None).

    Sign changes on the dense scan grid are refined by Brent's method to 1e-12.
    """
    v, _ = _radial_fn(pot, theta)
    r = pot.sample_points()[0] if r_scan is None else r_scan
    g = v(r) - level
    roots = []
    exact = np.nonzero(g == 0)[0]
    roots.extend(r[exact])
    idx = np.nonzero(np.sign(g[:-1]) * np.sign(g[1:]) < 0)[0]
    for i in idx:
        roots.append(brentq(lambda x: float(v(x)) - level, r[i], r[i + 1], xtol=1e-12, rtol=1e-14))
    return np.sort(np.array(roots, dtype=float))


def _superlevel_intervals(pot, lo, hi, theta=None, r_scan=None, check: bool = True):
    """Radial intervals where lo <= V(r) <= hi, with endpoints refined."""
    v, dv = _radial_fn(pot, theta)
    r = pot.sample_points()[0] if r_scan is None else r_scan
    cuts = np.concatenate([level_roots(pot, lo, theta, r), level_roots(pot, hi, theta, r)])
    if check and len(cuts):
        d = np.abs(dv(cuts))
        if np.any(d < CRITICAL_TOL):
            raise CriticalEndpoint(f"|V'| = {d.min():.2e} at a window preimage boundary")
    pts = np.unique(np.concatenate([[0.0], cuts, [r[-1]]]))
    out = []
    for x0, x1 in zip(pts[:-1], pts[1:]):
        val = float(v(0.5 * (x0 + x1)))
        if lo <= val <= hi:
            if out and abs(out[-1][1] - x0) < 1e-14:
                out[-1] = (out[-1][0], x1)
            else:
                out.append((x0, x1))
    if out and out[-1][1] >= r[-1] and not (lo <= 0.0 <= hi):
        raise ConfigError("preimage reaches the sampling boundary")
    return out


# coefficients


def alpha0(f: SmoothTestFunction, pot: PotentialSpec, bands: BandRange, rtol: float = 1e-6) -> float:
    """(1/2pi) sum_j int f(2j+1+V) dX by polar quadrature with panel doubling."""
    thetas = [None] if pot.is_radial else list(_theta_grid(64))
    total = 0.0
    tight = min(rtol, 1e-10)
    for j in bands.indices:
        s0, s1 = f.support
        shift = 2 * j + 1
        bps = [b - shift for b in f.breakpoints()]

        def ray_integral(theta):
            v, _ = _radial_fn(pot, theta)
            ivs = _superlevel_intervals(pot, s0 - shift, s1 - shift, theta, check=False)
            acc = 0.0
            for r0, r1 in ivs:
                knots = [r0, r1]
                for lv in bps:
                    knots.extend(rt for rt in level_roots(pot, lv, theta) if r0 < rt < r1)
                val, _ = integrate(lambda r: f(shift + v(r)) * r, knots, rtol=tight)
                acc += val
            return acc

        if thetas == [None]:
            total += ray_integral(None)
        else:
            # trapezoid in theta is spectrally accurate; double until settled
            prev = None
            n = 64
            while True:
                th = _theta_grid(n)
                val = float(np.mean([ray_integral(t) for t in th]))
                if prev is not None and abs(val - prev) <= rtol * max(abs(val), 1e-300):
                    break
                if n >= 4096:
                    raise QuadratureNotConverged("angular quadrature for alpha0")
                prev, n = val, 2 * n
            total += val
    return total


def C0(window: SpectralWindow, pot: PotentialSpec, bands: BandRange, n_theta: int = N_THETA) -> float:
    """(1/2pi) sum_j area{2j+1+V in [a,b]} from exact radial interval endpoints."""
    a, b = window.a, window.b
    total = 0.0
    for j in bands.indices:
        lo, hi = a - (2 * j + 1), b - (2 * j + 1)
        if pot.is_radial:
            ivs = _superlevel_intervals(pot, lo, hi)
            total += sum(0.5 * (r1 * r1 - r0 * r0) for r0, r1 in ivs)
        else:
            acc = []
            for th in _theta_grid(n_theta):
                ivs = _superlevel_intervals(pot, lo, hi, th)
                acc.append(sum(0.5 * (r1 * r1 - r0 * r0) for r0, r1 in ivs))
            total += float(np.mean(acc))
    return total


def level_set_density(pot: PotentialSpec, bands: BandRange, t: float) -> float:
    """(1/2pi) sum_j int_{2j+1+V=t} dS/|grad V| (radial closed form or marching squares)."""
    total = 0.0
    for j in bands.indices:
        lv = t - (2 * j + 1)
        if lv == 0.0:
            raise CriticalLevel("level at the Landau level itself")
        if pot.is_radial:
            roots = level_roots(pot, lv)
            if len(roots) == 0:
                continue
            d = np.abs(pot.dradial(roots))
            if np.any(d < CRITICAL_TOL):
                raise CriticalLevel(f"|V'| = {d.min():.2e} on the level set t = {t}")
            total += float(np.sum(roots / d))
        else:
            total += marching_squares_density(pot, lv)[0]
    return total


def c0_curve(f: SmoothTestFunction, pot: PotentialSpec, bands: BandRange, t_grid) -> list:
    out = []
    for t in np.asarray(t_grid, dtype=float):
        ft = float(f(t))
        out.append((float(t), 0.0 if ft == 0.0 else ft * level_set_density(pot, bands, t)))
    return out


def b0(f: SmoothTestFunction, pot: PotentialSpec, q: Optional[int] = None) -> float:
    if pot.kind is not PotentialKind.POWER_TAIL:
        raise ConfigError("b0 needs a power-tail potential")
    s0, s1 = f.support
    if q is None:
        q = int(math.floor((s0 - 1) / 2))
    if not (2 * q + 1 < s0 < s1 < 2 * q + 3):
        raise SupportOutsideGap(f"support [{s0}, {s1}] not inside ({2 * q + 1}, {2 * q + 3})")
    delta = pot.delta
    pref = angular_moment(pot, 2.0 / delta) / (2 * np.pi * delta)
    acc = 0.0
    for j in range(q + 1):
        c = 2 * j + 1
        val, _ = integrate(lambda u: f(u) * (u - c) ** (-1.0 - 2.0 / delta), f.breakpoints(), rtol=1e-12)
        acc += val
    return pref * acc


def D0(window, pot: PotentialSpec, q: Optional[int] = None) -> float:
    """Closed form; ``window`` may be a SpectralWindow or an (a, b) pair with a <= b."""
    if pot.kind is not PotentialKind.POWER_TAIL:
        raise ConfigError("D0 needs a power-tail potential")
    a, b = (window.a, window.b) if isinstance(window, SpectralWindow) else map(float, window)
    if q is None:
        q = int(math.floor((a - 1) / 2))
    if not (2 * q + 1 < a <= b < 2 * q + 3) or a <= 1:
        raise WindowOutsideGap(f"[{a}, {b}] not inside a gap ({2 * q + 1}, {2 * q + 3}) above 1")
    e = 2.0 / pot.delta
    s = sum((a - 2 * j - 1) ** -e - (b - 2 * j - 1) ** -e for j in range(q + 1))
    return angular_moment(pot, e) / (4 * np.pi) * s


def D0_terms(window: SpectralWindow, pot: PotentialSpec, q: int) -> list:
    e = 2.0 / pot.delta
    pref = angular_moment(pot, e) / (4 * np.pi)
    return [pref * ((window.a - 2 * j - 1) ** -e - (window.b - 2 * j - 1) ** -e) for j in range(q + 1)]


# marching squares


def _segments(F: np.ndarray, xs: np.ndarray, ys: np.ndarray):
    """Line segments of the zero set of F sampled on the tensor grid (xs, ys).

    Standard marching squares; saddle cells are split using the cell-centre
    average.  Returns an array of shape (n, 2, 2) of endpoint coordinates.
    """
    f00, f10 = F[:-1, :-1], F[1:, :-1]
    f01, f11 = F[:-1, 1:], F[1:, 1:]
    X0, X1 = xs[:-1][:, None], xs[1:][:, None]
    Y0, Y1 = ys[:-1][None, :], ys[1:][None, :]

    def cross(fa, fb):
        d = fa - fb
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(d != 0, fa / np.where(d != 0, d, 1.0), 0.0)

    # crossing points on the four edges (bottom: y0, top: y1, left: x0, right: x1)
    tb = cross(f00, f10)
    tt = cross(f01, f11)
    tl = cross(f00, f01)
    tr = cross(f10, f11)
    eb = np.stack(np.broadcast_arrays(X0 + tb * (X1 - X0), Y0 + 0 * tb), -1)
    et = np.stack(np.broadcast_arrays(X0 + tt * (X1 - X0), Y1 + 0 * tt), -1)
    el = np.stack(np.broadcast_arrays(X0 + 0 * tl, Y0 + tl * (Y1 - Y0)), -1)
    er = np.stack(np.broadcast_arrays(X1 + 0 * tr, Y0 + tr * (Y1 - Y0)), -1)
    sb = (f00 > 0) != (f10 > 0)
    st = (f01 > 0) != (f11 > 0)
    sl = (f00 > 0) != (f01 > 0)
    sr = (f10 > 0) != (f11 > 0)
    n = sb.astype(int) + st + sl + sr
    segs = []
    two = n == 2
    edges = [(sb, eb), (st, et), (sl, el), (sr, er)]
    # cells with exactly two crossings: connect them
    pts = []
    for mask, e in edges:
        pts.append(np.where((mask & two)[..., None], e, np.nan))
    stacked = np.stack(pts, axis=-2)  # (..., 4, 2)
    sel = stacked[two]
    valid = ~np.isnan(sel[..., 0])
    order = np.argsort(~valid, axis=1, kind="stable")[:, :2]
    seg2 = np.take_along_axis(sel, order[..., None], axis=1)
    segs.append(seg2)
    # saddle cells: four crossings
    four = n == 4
    if np.any(four):
        c = 0.25 * (f00 + f10 + f01 + f11)
        b_, t_, l_, r_ = eb[four], et[four], el[four], er[four]
        pos = (c[four] > 0) == (f00[four] > 0)
        # centre has the sign of corner (0,0): separate that corner
        s1 = np.where(pos[:, None], np.stack([b_, r_], 1).reshape(-1, 4), np.stack([b_, l_], 1).reshape(-1, 4))
        s2 = np.where(pos[:, None], np.stack([t_, l_], 1).reshape(-1, 4), np.stack([t_, r_], 1).reshape(-1, 4))
        segs.append(s1.reshape(-1, 2, 2))
        segs.append(s2.reshape(-1, 2, 2))
    return np.concatenate(segs, axis=0) if segs else np.empty((0, 2, 2))


def _ms_integral(pot: PotentialSpec, level: float, R: float, n: int) -> float:
    xs = np.linspace(-R, R, n + 1)
    # offset the grid slightly so that no node hits a symmetry axis exactly
    xs = xs + 1e-7 * R
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    F = pot.value(X, Y) - level
    seg = _segments(F, xs, xs)
    if len(seg) == 0:
        return 0.0
    mid = 0.5 * (seg[:, 0] + seg[:, 1])
    length = np.linalg.norm(seg[:, 1] - seg[:, 0], axis=1)
    gx, gy = pot.gradient(mid[:, 0], mid[:, 1])
    g = np.hypot(gx, gy)
    if np.any(g < CRITICAL_TOL):
        raise CriticalLevel(f"|grad V| = {g.min():.2e} on the level set")
    return float(np.sum(length / g)) / (2 * np.pi)


def marching_squares_density(pot: PotentialSpec, level: float, R: Optional[float] = None,
                             n: int = 800) -> tuple:
    """(1/2pi) int_{V=level} dS/|grad V| from a marching-squares polyline.

    The linear-interpolation error is O(h^2); one Richardson step on grids
    n and 2n removes it.  Returns ``(value, error_estimate)``.
    """
    if R is None:
        thetas = [None] if pot.is_radial else list(_theta_grid(64))
        r_max = 0.0
        for th in thetas:
            roots = level_roots(pot, level, th)
            if len(roots):
                r_max = max(r_max, float(roots[-1]))
        if r_max == 0.0:
            return 0.0, 0.0
        R = 1.2 * r_max
    coarse = _ms_integral(pot, level, R, n)
    fine = _ms_integral(pot, level, R, 2 * n)
    return fine + (fine - coarse) / 3.0, abs(fine - coarse) / 3.0


# report


@dataclass
class CoeffReport:
    alpha0: Optional[float] = None
    C0: Optional[float] = None
    c0_samples: list = field(default_factory=list)
    b0: Optional[float] = None
    D0: Optional[float] = None
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"alpha0": self.alpha0, "C0": self.C0, "b0": self.b0, "D0": self.D0,
                "c0_samples": [[t, v] for t, v in self.c0_samples], "meta": self.meta}
