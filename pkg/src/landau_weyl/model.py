"""Domain types: potentials, spectral windows, Landau bands, test functions.

The magnetic field strength is fixed to B = 1, so the Landau levels sit at
the odd integers 1, 3, 5, ...  Energies for a general field are obtained by
rescaling.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import BadInterval, ConfigError, EmptyBandSet, GridTooCoarse, InvalidWindow, WindowOutsideGap

ArrayFn = Callable[[np.ndarray], np.ndarray]

# dense sampling used for range bounds and attained-value checks
N_RADIAL_SAMPLES = 40_000
N_ANGULAR_SAMPLES = 256
DECAY_TOL = 1e-6


class PotentialKind(enum.Enum):
    RADIAL_PROFILE = "radial-profile"
    POWER_TAIL = "power-tail"
    SAMPLED_RADIAL = "sampled-radial"


def _smoothstep(u):
    """C-infinity step: 0 for u <= 0, 1 for u >= 1."""
    u = np.asarray(u, dtype=float)
    g0 = np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)
    v = 1.0 - u
    g1 = np.where(v > 0, np.exp(-1.0 / np.where(v > 0, v, 1.0)), 0.0)
    return g0 / (g0 + g1)


def _fd_derivative(fn: ArrayFn, r, order: int, step: float = 1e-4):
    r = np.asarray(r, dtype=float)
    if order == 1:
        return (fn(r + step) - fn(r - step)) / (2 * step)
    return (fn(r + step) - 2 * fn(r) + fn(r - step)) / step**2


@dataclass(frozen=True)
class PotentialSpec:
    """A bounded perturbation ``V`` with ``V(X) -> 0`` at infinity.

    Radial kinds are described by a profile ``r -> V(r)``.  The power-tail
    kind stores the homogeneous tail ``omega0(theta) |X|^-delta`` together
    with the origin cutoff at level ``cutoff_M``; :meth:`value` then returns
    the regularised profile ``phi0``.

    ``sup_norm``, ``inf_value`` and ``sup_value`` are computed by dense
    sampling at construction time when they are not supplied.
    """

    kind: PotentialKind
    radial_profile: Optional[ArrayFn] = None
    radial_d1: Optional[ArrayFn] = None
    radial_d2: Optional[ArrayFn] = None
    omega0: Optional[Callable[[np.ndarray], np.ndarray]] = None
    omega0_constant: Optional[float] = None
    delta: Optional[float] = None
    cutoff_M: Optional[float] = None
    sup_norm: float = math.nan
    inf_value: float = math.nan
    sup_value: float = math.nan
    sample_radius: float = math.nan
    label: str = ""
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind is PotentialKind.POWER_TAIL:
            if self.delta is None or not self.delta > 0:
                raise ConfigError("power tail needs delta > 0")
            if self.cutoff_M is None or not self.cutoff_M > 0:
                raise ConfigError("power tail needs cutoff M > 0")
            if self.omega0 is None:
                raise ConfigError("power tail needs omega0")
            th = np.linspace(0, 2 * np.pi, N_ANGULAR_SAMPLES, endpoint=False)
            if np.min(self.omega0(th)) <= 0:
                raise ConfigError("omega0 must be strictly positive")
        elif self.radial_profile is None:
            raise ConfigError(f"{self.kind.value} potential needs a radial profile")
        if math.isnan(self.sup_norm):
            r_max, lo, hi = self._sample_range()
            object.__setattr__(self, "sample_radius", r_max)
            object.__setattr__(self, "inf_value", lo)
            object.__setattr__(self, "sup_value", hi)
            object.__setattr__(self, "sup_norm", max(abs(lo), abs(hi)))

    # evaluation

    @property
    def is_radial(self) -> bool:
        return self.kind is not PotentialKind.POWER_TAIL or self.omega0_constant is not None

    def omega_min(self) -> float:
        th = np.linspace(0, 2 * np.pi, N_ANGULAR_SAMPLES, endpoint=False)
        return float(np.min(self.omega0(th)))

    def omega_max(self) -> float:
        th = np.linspace(0, 2 * np.pi, N_ANGULAR_SAMPLES, endpoint=False)
        return float(np.max(self.omega0(th)))

    @cached_property
    def cutoff_radius(self) -> float:
        """Radius below which the cutoff function equals one."""
        return 0.9 * (self.omega_min() / self.cutoff_M) ** (1.0 / self.delta)

    @property
    def cutoff_support(self) -> float:
        """Outer radius of the cutoff's support."""
        return 1.1 * self.cutoff_radius

    def chi(self, r):
        rc = self.cutoff_radius
        return 1.0 - _smoothstep((np.asarray(r, dtype=float) - rc) / (0.1 * rc))

    def tail(self, x, y):
        """Homogeneous tail ``omega0(X/|X|) |X|^-delta`` (uncut)."""
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        r = np.hypot(x, y)
        with np.errstate(divide="ignore"):
            return self.omega0(np.arctan2(y, x)) * r ** (-self.delta)

    def radial(self, r):
        """Radial profile; for power tails only when omega0 is constant."""
        r = np.abs(np.asarray(r, dtype=float))
        if self.kind is PotentialKind.POWER_TAIL:
            if self.omega0_constant is None:
                raise ConfigError("power tail with angular dependence has no radial profile")
            chi = self.chi(r)
            with np.errstate(divide="ignore", invalid="ignore"):
                w = self.omega0_constant * np.where(r > 0, r, 1.0) ** (-self.delta)
            return np.where(chi >= 1.0, self.cutoff_M, (1 - chi) * w + chi * self.cutoff_M)
        return self.radial_profile(r)

    def dradial(self, r):
        if self.radial_d1 is not None:
            return self.radial_d1(np.asarray(r, dtype=float))
        return _fd_derivative(self.radial, r, 1)

    def d2radial(self, r):
        if self.radial_d2 is not None:
            return self.radial_d2(np.asarray(r, dtype=float))
        return _fd_derivative(self.radial, r, 2)

    def value(self, x, y):
        """V at points (x, y); phi0 for power tails."""
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        if self.is_radial:
            return self.radial(np.hypot(x, y))
        r = np.hypot(x, y)
        chi = self.chi(r)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = self.omega0(np.arctan2(y, x)) * np.where(r > 0, r, 1.0) ** (-self.delta)
        return np.where(chi >= 1.0, self.cutoff_M, (1 - chi) * w + chi * self.cutoff_M)

    def gradient(self, x, y, step: float = 1e-5):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        if self.is_radial:
            r = np.hypot(x, y)
            d = self.dradial(r)
            with np.errstate(invalid="ignore", divide="ignore"):
                ux = np.where(r > 0, x / np.where(r > 0, r, 1), 0.0)
                uy = np.where(r > 0, y / np.where(r > 0, r, 1), 0.0)
            return d * ux, d * uy
        gx = (self.value(x + step, y) - self.value(x - step, y)) / (2 * step)
        gy = (self.value(x, y + step) - self.value(x, y - step)) / (2 * step)
        return gx, gy

    def hessian(self, x, y, step: float = 1e-4):
        """Second partials (Vxx, Vxy, Vyy)."""
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        if self.is_radial:
            r = np.hypot(x, y)
            rs = np.where(r > 1e-6, r, 1.0)
            d1 = self.dradial(r)
            d2 = self.d2radial(r)
            ux, uy = x / rs, y / rs
            # radial limit at the origin: isotropic curvature d2
            t = np.where(r > 1e-6, d1 / rs, d2)
            vxx = np.where(r > 1e-6, d2 * ux**2 + t * uy**2, d2)
            vyy = np.where(r > 1e-6, d2 * uy**2 + t * ux**2, d2)
            vxy = np.where(r > 1e-6, (d2 - t) * ux * uy, 0.0)
            return vxx, vxy, vyy
        f = self.value
        vxx = (f(x + step, y) - 2 * f(x, y) + f(x - step, y)) / step**2
        vyy = (f(x, y + step) - 2 * f(x, y) + f(x, y - step)) / step**2
        vxy = (f(x + step, y + step) - f(x + step, y - step) - f(x - step, y + step) + f(x - step, y - step)) / (4 * step**2)
        return vxx, vxy, vyy

    # sampling

    def _decay_radius(self) -> float:
        if self.kind is PotentialKind.POWER_TAIL:
            return (self.omega_max() / (0.5 * DECAY_TOL)) ** (1.0 / self.delta)
        r = 1.0
        while r < 1e6:
            probe = np.linspace(r / 2, r, 64)
            if np.max(np.abs(self.radial(probe))) < 0.5 * DECAY_TOL:
                return r
            r *= 2
        raise ConfigError("potential does not decay to zero within r = 1e6")

    def sample_points(self):
        """Radial (and angular) sample grid used for range bounds."""
        r_max = self._decay_radius()
        r = np.concatenate([[0.0], np.geomspace(1e-4, r_max, N_RADIAL_SAMPLES)])
        if self.is_radial:
            return r, None
        th = np.linspace(0, 2 * np.pi, N_ANGULAR_SAMPLES, endpoint=False)
        return r, th

    def _sample_range(self):
        r, th = self.sample_points()
        if th is None:
            v = self.radial(r)
        else:
            v = np.concatenate(
                [self.value(ri * np.cos(th), ri * np.sin(th)) for ri in np.array_split(r, 200)
                 for ri in [ri[:, None]]], axis=None)
        if abs(v[-1]) >= DECAY_TOL:
            raise ConfigError("potential does not vanish at the sampling boundary")
        v = np.append(v, 0.0)  # limit value at infinity
        return float(r[-1]), float(np.min(v)), float(np.max(v))

    def radial_extent(self, tol: float = 1e-8) -> float:
        """Smallest radius beyond which ``|V| < tol`` (sampled, max over angle)."""
        r, th = self.sample_points()
        if th is None:
            v = np.abs(self.radial(r))
        else:
            v = np.array([np.max(np.abs(self.value(ri * np.cos(th), ri * np.sin(th)))) for ri in r[::20]])
            r = r[::20]
        above = np.nonzero(v >= tol)[0]
        if len(above) == 0:
            return 0.0
        i = above[-1]
        return float(r[min(i + 1, len(r) - 1)])


# factories


def gaussian_well(depth: float = -2.0, width: float = 1.0) -> PotentialSpec:
    """``V(r) = depth * exp(-(r/width)^2)``."""
    w2 = width * width

    def v(r):
        return depth * np.exp(-np.asarray(r) ** 2 / w2)

    def d1(r):
        return -2 * np.asarray(r) / w2 * v(r)

    def d2(r):
        r = np.asarray(r)
        return (4 * r**2 / w2**2 - 2 / w2) * v(r)

    return PotentialSpec(PotentialKind.RADIAL_PROFILE, v, d1, d2, label="gaussian-well",
                         params={"family": "gaussian-well", "depth": depth, "width": width})


def algebraic_well(amplitude: float = 1.0, width: float = 1.0, delta: float = 2.0) -> PotentialSpec:
    """``V(r) = amplitude * (1 + (r/width)^2)^(-delta/2)``; tail ``amplitude*width^delta r^-delta``."""
    def v(r):
        return amplitude * (1 + (np.asarray(r) / width) ** 2) ** (-delta / 2)

    def d1(r):
        r = np.asarray(r)
        return -amplitude * delta * r / width**2 * (1 + (r / width) ** 2) ** (-delta / 2 - 1)

    return PotentialSpec(PotentialKind.RADIAL_PROFILE, v, d1, None, delta=delta, label="algebraic",
                         params={"family": "algebraic", "amplitude": amplitude, "width": width, "delta": delta})


def fourier_omega(coeffs: Sequence[float]):
    """``omega0(theta) = c0 + sum_k (a_k cos k theta + b_k sin k theta)`` from ``[c0, a1, b1, ...]``."""
    c = [float(v) for v in coeffs]
    if len(c) % 2 == 0:
        c.append(0.0)

    def omega(theta):
        theta = np.asarray(theta, dtype=float)
        out = np.full(theta.shape, c[0])
        for k in range(1, (len(c) - 1) // 2 + 1):
            out = out + c[2 * k - 1] * np.cos(k * theta) + c[2 * k] * np.sin(k * theta)
        return out

    return omega


def power_tail(omega0=1.0, delta: float = 2.0, M: float = 8.0) -> PotentialSpec:
    """Cut-off homogeneous tail ``phi0 = (1-chi) omega0(theta) r^-delta + M chi``.

    ``omega0`` is a positive constant, a Fourier coefficient list or a
    callable of the polar angle.
    """
    const = None
    if callable(omega0):
        om = omega0
        desc = "callable"
    elif np.ndim(omega0) == 0:
        const = float(omega0)
        om = lambda th, c=const: np.full(np.shape(th), c)  # noqa: E731
        desc = const
    else:
        coeffs = list(omega0)
        if all(abs(v) == 0 for v in coeffs[1:]):
            const = float(coeffs[0])
        om = fourier_omega(coeffs)
        desc = coeffs
    return PotentialSpec(PotentialKind.POWER_TAIL, omega0=om, omega0_constant=const, delta=float(delta),
                         cutoff_M=float(M), label="power-tail",
                         params={"family": "power-tail", "omega0": desc, "delta": delta, "M": M})


def sampled_radial(r, v, label: str = "sampled-radial") -> PotentialSpec:
    """Cubic-spline profile through samples; zero beyond the last node."""
    r = np.asarray(r, dtype=float)
    v = np.asarray(v, dtype=float)
    order = np.argsort(r)
    r, v = r[order], v[order]
    if abs(v[-1]) >= DECAY_TOL:
        raise ConfigError("sampled profile must vanish (|V| < 1e-6) at its last radius")
    spline = CubicSpline(r, v, bc_type=((1, 0.0), "natural"))
    r_end = r[-1]

    def prof(x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= r_end, spline(np.clip(x, r[0], r_end)), 0.0)

    def d1(x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= r_end, spline(np.clip(x, r[0], r_end), 1), 0.0)

    def d2(x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= r_end, spline(np.clip(x, r[0], r_end), 2), 0.0)

    return PotentialSpec(PotentialKind.SAMPLED_RADIAL, prof, d1, d2, label=label,
                         params={"family": "sampled-radial"})


def load_sampled_radial(path) -> PotentialSpec:
    data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    if data.shape[1] < 2:
        raise ConfigError(f"{path}: expected two columns (r, V)")
    return sampled_radial(data[:, 0], data[:, 1], label=f"sampled-radial:{path}")


# windows and bands


@dataclass(frozen=True)
class SpectralWindow:
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise InvalidWindow(f"window needs a < b, got [{self.a}, {self.b}]")
        k = max(1, math.ceil(self.a))
        if k % 2 == 0:
            k += 1
        if k <= self.b:
            raise InvalidWindow(f"window contains Landau level {k}")

    @property
    def width(self) -> float:
        return self.b - self.a

    @property
    def gap_index(self) -> int:
        """q with 2q+1 < a < b < 2q+3; -1 below the first Landau level."""
        return max(-1, int(math.floor((self.a - 1) / 2)))

    def require_coupling_gap(self) -> int:
        if self.a <= 1:
            raise WindowOutsideGap("large coupling needs a > 1")
        return self.gap_index

    def contains(self, t) -> np.ndarray:
        t = np.asarray(t)
        return (t >= self.a) & (t <= self.b)


@dataclass(frozen=True)
class BandRange:
    l0: int
    l: int

    def __post_init__(self):
        if self.l0 < 0 or self.l < self.l0:
            raise ConfigError(f"bad band range {self.l0}..{self.l}")

    @property
    def indices(self) -> range:
        return range(self.l0, self.l + 1)

    def __str__(self):
        return f"{self.l0}..{self.l}"


def contributing_bands(window: SpectralWindow, pot: PotentialSpec) -> BandRange:
    """Landau indices ``j`` whose shifted window ``[a-(2j+1), b-(2j+1)]`` meets the range of V.

    The range is taken from dense sampling (attained extremes); V is
    continuous on the plane so every value in between is attained too.
    """
    lo, hi = pot.inf_value, pot.sup_value
    q_stop = (window.b + pot.sup_norm) / 2
    hits = []
    q = 0
    while q <= q_stop:
        s_lo, s_hi = window.a - (2 * q + 1), window.b - (2 * q + 1)
        if s_lo <= hi and s_hi >= lo:
            hits.append(q)
        q += 1
    if not hits:
        raise EmptyBandSet(f"no Landau band contributes to [{window.a}, {window.b}]")
    return BandRange(min(hits), max(hits))


def default_cutoff_M(window: SpectralWindow) -> float:
    return 2.0 * (window.a + window.b)


# smooth test functions


@dataclass(frozen=True)
class SmoothTestFunction:
    """Bump on ``support`` (peak value one), or a smoothed indicator equal to one on ``plateau``."""

    support: tuple
    plateau: Optional[tuple] = None

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        s0, s1 = self.support
        if self.plateau is None:
            u = (2 * t - s0 - s1) / (s1 - s0)
            inside = np.abs(u) < 1
            us = np.where(inside, u, 0.0)
            return np.where(inside, np.exp(1.0 - 1.0 / (1.0 - us * us)), 0.0)
        p0, p1 = self.plateau
        left = _smoothstep((t - s0) / (p0 - s0))
        right = _smoothstep((s1 - t) / (s1 - p1))
        out = left * right
        return np.where((t <= s0) | (t >= s1), 0.0, out)

    def breakpoints(self):
        pts = list(self.support)
        if self.plateau is not None:
            pts[1:1] = list(self.plateau)
        else:
            pts.insert(1, 0.5 * sum(self.support))
        return pts


def make_test_function(support, plateau=None) -> SmoothTestFunction:
    s0, s1 = map(float, support)
    if not s0 < s1:
        raise BadInterval(f"inverted support [{s0}, {s1}]")
    if plateau is not None:
        p0, p1 = map(float, plateau)
        if not (s0 < p0 <= p1 < s1):
            raise BadInterval("plateau must sit strictly inside the support")
        plateau = (p0, p1)
    return SmoothTestFunction((s0, s1), plateau)


def indicator_approximation(a: float, b: float, eps: float) -> SmoothTestFunction:
    """Smoothed indicator of [a, b]: one on [a+eps, b-eps], zero outside (a, b)."""
    return make_test_function((a, b), (a + eps, b - eps))


# mollifier


def _gauss_legendre(lo: float, hi: float, n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * (hi - lo) * w


@dataclass(frozen=True)
class Mollifier:
    """Even cutoff ``theta`` supported in (-1/C, 1/C) and its transform ``theta_breve``.

    ``theta`` is the normalised autocorrelation of a bump of half-width
    1/(2C), which makes ``theta_breve`` a square and hence nonnegative.
    """

    C: float
    tau: np.ndarray = field(repr=False)
    table: np.ndarray = field(repr=False)
    mass: float = 1.0

    @cached_property
    def _spline(self):
        return CubicSpline(self.tau, self.table)

    @property
    def half_width(self) -> float:
        return 0.5 / self.C

    def _bump(self, s):
        u = np.asarray(s) / self.half_width
        inside = np.abs(u) < 1
        us = np.where(inside, u, 0.0)
        return np.where(inside, np.exp(-1.0 / (1.0 - us * us)), 0.0)

    def theta(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        w = self.half_width
        s, ws = _gauss_legendre(-w, w, 400)
        norm = np.sum(ws * self._bump(s) ** 2)
        out = np.empty_like(t)
        for i, ti in enumerate(t):
            lo, hi = max(-w, -w - ti), min(w, w - ti)
            if hi <= lo:
                out[i] = 0.0
                continue
            x, wx = _gauss_legendre(lo, hi, 400)
            out[i] = np.sum(wx * self._bump(x) * self._bump(x + ti)) / norm
        return out

    def theta_breve(self, tau):
        tau = np.asarray(tau, dtype=float)
        a = np.abs(tau)
        out = np.where(a <= self.tau[-1], self._spline(np.minimum(a, self.tau[-1])), 0.0)
        return out

    def theta_breve_eps(self, t, eps: float):
        return self.theta_breve(np.asarray(t) / eps) / eps


def make_mollifier(C: float = 1.0, tau_half_width: Optional[float] = None, tau_step: Optional[float] = None,
                   n_quad: int = 1024) -> Mollifier:
    if C < 1:
        raise ConfigError("mollifier support parameter C must be >= 1")
    T = 200.0 * C if tau_half_width is None else float(tau_half_width)
    dt = 0.02 * C if tau_step is None else float(tau_step)
    if T < 200.0 * C:
        raise GridTooCoarse("tau grid must span at least [-200C, 200C]")
    w = 0.5 / C
    tau = np.arange(0.0, T + 0.5 * dt, dt)
    s, ws = _gauss_legendre(0.0, w, n_quad)
    u = s / w
    b = np.exp(-1.0 / (1.0 - u * u))
    bhat = 2.0 * (np.cos(np.outer(tau, s)) @ (ws * b))
    norm = 2.0 * np.sum(ws * b * b)
    table = bhat**2 / (2 * np.pi * norm)
    # trapezoid on the symmetric grid; the integrand is smooth and decays fast
    mass = dt * (2.0 * np.sum(table) - table[0])
    if abs(mass - 1.0) > 1e-8 or np.min(table) < -1e-10:
        raise GridTooCoarse(f"mollifier self-test failed: mass {mass!r}")
    return Mollifier(float(C), tau, table, float(mass))


# regimes


@dataclass(frozen=True)
class Regime:
    """Semiclassical (``h``) or large-coupling (``lam``, ``delta``) scaling."""

    mode: str
    h: Optional[float] = None
    lam: Optional[float] = None
    delta: Optional[float] = None

    def __post_init__(self):
        if self.mode == "semiclassical":
            if self.h is None or not self.h > 0:
                raise ConfigError("semiclassical regime needs h > 0")
        elif self.mode == "coupling":
            if self.lam is None or not self.lam > 0 or self.delta is None or not self.delta > 0:
                raise ConfigError("large-coupling regime needs lambda > 0 and delta > 0")
        else:
            raise ConfigError(f"unknown regime mode {self.mode!r}")
        if not 0 < self.h_eff <= 1:
            raise ConfigError(f"effective h = {self.h_eff} outside (0, 1]")

    @classmethod
    def semiclassical(cls, h: float) -> "Regime":
        return cls("semiclassical", h=float(h))

    @classmethod
    def coupling(cls, lam: float, delta: float) -> "Regime":
        return cls("coupling", lam=float(lam), delta=float(delta))

    @property
    def h_eff(self) -> float:
        if self.mode == "semiclassical":
            return self.h
        return self.lam ** (-1.0 / self.delta)

    @property
    def planck(self) -> float:
        return self.h_eff**2

    @property
    def param(self) -> float:
        return self.h if self.mode == "semiclassical" else self.lam

    def check_pairing(self, pot: PotentialSpec):
        if self.mode == "coupling" and pot.delta is not None and abs(pot.delta - self.delta) > 1e-12:
            raise ConfigError(f"regime delta {self.delta} does not match potential delta {pot.delta}")


def window_preimage_radii(pot: PotentialSpec, window: SpectralWindow, bands: BandRange):
    """Inner and outer radius of the union over bands of ``{X : 2j+1+V(X) in [a, b]}``.

    Found on the dense sampling grid; returns ``(nan, nan)`` for an empty preimage.
    """
    r, th = pot.sample_points()
    if th is None:
        v = pot.radial(r)[:, None]
    else:
        v = pot.value(r[:, None] * np.cos(th)[None, :], r[:, None] * np.sin(th)[None, :])
    hit = np.zeros(len(r), dtype=bool)
    for j in bands.indices:
        e = 2 * j + 1 + v
        hit |= np.any((e >= window.a) & (e <= window.b), axis=1)
    if not hit.any():
        return math.nan, math.nan
    idx = np.nonzero(hit)[0]
    lo = r[max(idx[0] - 1, 0)]
    hi = r[min(idx[-1] + 1, len(r) - 1)]
    return float(lo), float(hi)


def default_box_half_width(pot: PotentialSpec, window: SpectralWindow, bands: BandRange,
                           factor: float = 1.5, flat_tol: float = 1e-8, slow_radius: float = 10.0) -> float:
    """Position-box half-width for phase-space quantization.

    Fast-decaying potentials use ``factor`` times the radius where
    ``|V| < flat_tol``.  Slow tails (that radius beyond ``slow_radius``) use
    the radius where ``|V|`` drops below half the distance from the shifted
    window to the nearest Landau level, so the box edge cannot create
    spurious window eigenvalues.
    """
    r_flat = pot.radial_extent(flat_tol)
    if r_flat <= slow_radius:
        return factor * max(r_flat, 1.0)
    gap = min(min(abs(2 * j + 1 - window.a), abs(2 * j + 1 - window.b)) for j in bands.indices)
    r_tail = pot.radial_extent(0.5 * gap)
    _, r_out = window_preimage_radii(pot, window, bands)
    return factor * max(r_tail, r_out if not math.isnan(r_out) else 0.0, 1.0)
