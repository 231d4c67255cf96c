"""Eigenvalue pipelines for the perturbed Landau Hamiltonian in a spectral window.

Three routes to the same discrete spectrum:

* ``band_effective_spectrum``: per Landau band j the h^2-Weyl quantization of
  the scalar symbol 2j+1 + V(x, xi) (leading-order effective Hamiltonian).
* ``radial_spectrum``: exact reduction of a rotationally symmetric problem to
  half-line channel operators, one per angular momentum m.
* ``feshbach_assemble`` / ``feshbach_spectrum``: the operator
  -d_y^2 + y^2 + V^w(x + h D_y, h y + h^2 D_x) truncated to a Hermite basis
  in y, with the band block isolated by a Schur complement.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from .errors import (BoundaryContamination, ChannelRangeNotConverged, ConfigError, ConvergenceFailure,
                     DimensionGuardExceeded, EmptyBandSet, GridTooNarrow, OffBandSingular)
from .model import (BandRange, PotentialKind, PotentialSpec, Regime, SpectralWindow, default_box_half_width,
                    window_preimage_radii)
from .parallel import parallel_map
from .quantize import DENSE_GUARD, Grid1D, Symbol2D, hermite_functions, inverse_weyl_symbol, weyl_matrix_1d


class Method(enum.Enum):
    BAND = "band"
    RADIAL = "radial"
    FESHBACH = "feshbach"


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray
    multiplicities: np.ndarray
    tags: tuple
    method: Method
    regime: Regime
    window: SpectralWindow
    trust_window: tuple
    grid: dict = field(default_factory=dict)

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        if np.any(np.diff(ev) < 0):
            raise ConfigError("eigenvalues must be ascending")
        if len(ev) and (ev[0] < self.trust_window[0] or ev[-1] > self.trust_window[1]):
            raise ConfigError("eigenvalue outside the trust window")

    @property
    def count(self) -> int:
        return int(np.sum(self.multiplicities))

    def expanded(self) -> np.ndarray:
        """Eigenvalues repeated by multiplicity."""
        return np.repeat(self.eigenvalues, self.multiplicities)

    def to_dict(self) -> dict:
        return {
            "method": self.method.value,
            "regime": self.regime.mode,
            "h_eff": self.regime.h_eff,
            "param": self.regime.param,
            "window": [self.window.a, self.window.b],
            "trust_window": list(self.trust_window),
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "multiplicities": [int(v) for v in self.multiplicities],
            "band_or_channel": list(self.tags),
            "grid": self.grid,
        }


def merge_degenerate(values, tags, width: float):
    """Merge eigenvalues closer than 1e-8 * width; multiplicities add up."""
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="stable")
    values = values[order]
    tags = [tags[i] for i in order]
    tol = 1e-8 * width
    out_v, out_m, out_t = [], [], []
    for v, t in zip(values, tags):
        if out_v and v - out_v[-1][-1] <= tol:
            out_v[-1].append(v)
            out_m[-1] += 1
            if t not in out_t[-1]:
                out_t[-1].append(t)
        else:
            out_v.append([v])
            out_m.append(1)
            out_t.append([t])
    ev = np.array([np.mean(g) for g in out_v])
    return ev, np.array(out_m, dtype=int), tuple(",".join(t) for t in out_t)


# dense and tridiagonal eigensolvers


def eigensolve(matrix, check: bool = True, seed: int = 0) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix or a ``(diag, offdiag)`` pair.

    Dense inputs above the dimension guard are refused.  Five random
    eigenpairs are spot-checked for ``|Av - lv| <= 1e-9 |A|``.
    """
    if isinstance(matrix, tuple):
        d, e = (np.asarray(v, dtype=float) for v in matrix)
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise ConfigError("non-finite tridiagonal entries")
        try:
            return eigh_tridiagonal(d, e, eigvals_only=True)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceFailure(str(exc)) from exc
    A = np.asarray(matrix)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ConfigError("eigensolve needs a square matrix")
    n = A.shape[0]
    if n > DENSE_GUARD:
        raise DimensionGuardExceeded(f"dense dimension {n} exceeds {DENSE_GUARD}")
    if not np.all(np.isfinite(A)):
        raise ConfigError("non-finite matrix entries")
    try:
        if not check or n == 0:
            return np.linalg.eigvalsh(A)
        w, U = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    rng = np.random.default_rng(seed)
    norm = max(np.max(np.abs(w)), np.finfo(float).tiny)
    for i in rng.choice(n, size=min(5, n), replace=False):
        r = np.linalg.norm(A @ U[:, i] - w[i] * U[:, i])
        if r > 1e-9 * norm:
            raise ConvergenceFailure(f"eigenpair residual {r:.3g} exceeds tolerance")
    return w


# band-effective pipeline


def effective_symbol(pot: PotentialSpec, j: int) -> Symbol2D:
    """Scalar leading symbol ``2j+1 + V(x, xi)`` of band j (phi0 for power tails)."""
    return Symbol2D(lambda x, p: 2 * j + 1 + pot.value(x, p))


def required_momentum(pot: PotentialSpec, window: SpectralWindow, bands: BandRange, planck: float) -> float:
    """Outer radius of the window preimage plus three oscillator widths."""
    _, r_out = window_preimage_radii(pot, window, bands)
    if math.isnan(r_out):
        return 0.0
    return r_out + 3.0 * math.sqrt(planck)


def trust_window(pot: PotentialSpec, window: SpectralWindow, bands: BandRange, grid: Grid1D,
                 planck: float) -> tuple:
    """Largest piece of [a, b] at distance > 5 planck from the symbol's box-boundary values."""
    L = grid.L
    P = grid.momentum_cutoff(planck)
    t = np.linspace(-1.0, 1.0, 401)
    bx = np.concatenate([L * t, L * t, np.full_like(t, -L), np.full_like(t, L)])
    bp = np.concatenate([np.full_like(t, -P), np.full_like(t, P), P * t, P * t])
    v = pot.value(bx, bp)
    bad = [(2 * j + 1 + v.min() - 5 * planck, 2 * j + 1 + v.max() + 5 * planck) for j in bands.indices]
    pieces = [(window.a, window.b)]
    for lo, hi in bad:
        nxt = []
        for a, b in pieces:
            if hi < a or lo > b:
                nxt.append((a, b))
                continue
            if lo > a:
                nxt.append((a, lo))
            if hi < b:
                nxt.append((hi, b))
        pieces = nxt
    if not pieces:
        return (window.a, window.a)
    return max(pieces, key=lambda ab: ab[1] - ab[0])


def band_grid(pot: PotentialSpec, window: SpectralWindow, bands: BandRange, regime: Regime,
              L: Optional[float] = None, N: Optional[int] = None) -> Grid1D:
    if L is None:
        L = default_box_half_width(pot, window, bands)
    if N is None:
        return Grid1D.auto(L, regime.planck)
    return Grid1D(float(L), int(N))


def band_effective_spectrum(pot: PotentialSpec, bands: Optional[BandRange], regime: Regime,
                            grid: Optional[Grid1D], window: SpectralWindow, jobs: int = 1,
                            p_required: Optional[float] = None) -> SpectrumResult:
    if bands is None:
        from .model import contributing_bands
        bands = contributing_bands(window, pot)
    regime.check_pairing(pot)
    planck = regime.planck
    if grid is None:
        grid = band_grid(pot, window, bands, regime)
    if p_required is None:
        p_required = required_momentum(pot, window, bands, planck)
    _, r_out = window_preimage_radii(pot, window, bands)
    if not math.isnan(r_out) and r_out >= grid.L:
        raise GridTooNarrow(f"window preimage radius {r_out:.3g} exceeds box half-width {grid.L}")
    tw = trust_window(pot, window, bands, grid, planck)

    def solve(j):
        A = weyl_matrix_1d(effective_symbol(pot, j), grid, planck, p_required=p_required)
        w = eigensolve(A)
        return w[(w >= tw[0]) & (w <= tw[1])]

    per_band = parallel_map(solve, list(bands.indices), jobs)
    vals, tags = [], []
    for j, w in zip(bands.indices, per_band):
        vals.extend(w)
        tags.extend([f"j={j}"] * len(w))
    ev, mult, tg = merge_degenerate(vals, tags, window.width)
    return SpectrumResult(ev, mult, tg, Method.BAND, regime, window, tuple(tw),
                          {"L": grid.L, "N": grid.N, "bands": [bands.l0, bands.l]})


# radial channel pipeline


def channel_matrix(U: Callable, m: int, R: float, N_r: int):
    """Symmetric tridiagonal form of the channel operator for angular momentum m.

    Cell-centred nodes r_i = (i - 1/2) dr with a flux-form discretisation of
    -u'' - u'/r + ((m/r - r/2)^2 + U) u, symmetrised by the weights sqrt(r_i);
    the grid never touches r = 0 and the outer boundary is Dirichlet.
    Returns ``(r, diag, offdiag)``.
    """
    dr = R / N_r
    i = np.arange(1, N_r + 1, dtype=float)
    r = (i - 0.5) * dr
    up = i / (i - 0.5)
    lw = np.zeros(N_r)
    lw[1:] = i[:-1] / (i[1:] - 0.5)
    diag = (up + lw) / dr**2 + r * r / 4 - m + U(r) + m * m / (r * r)
    diag[-1] += up[-1] / dr**2
    off = -i[:-1] / np.sqrt((i[:-1] - 0.5) * (i[1:] - 0.5)) / dr**2
    return r, diag, off


def channel_eigenvalues(U: Callable, m: int, R: float, N_r: int, lo: float, hi: float,
                        richardson: bool = True) -> np.ndarray:
    """Channel eigenvalues in (lo, hi], Richardson-extrapolated from N_r and 2 N_r cells.

    Both grids are solved over (lo, hi + 1] and matched by index from the
    bottom, so ``lo`` must lie below the channel's ground state.
    """
    def solve(n):
        _, d, e = channel_matrix(U, m, R, n)
        return eigh_tridiagonal(d, e, eigvals_only=True, select="v", select_range=(lo, hi + 1.0))

    e1 = solve(N_r)
    if not richardson:
        return e1[e1 <= hi]
    e2 = solve(2 * N_r)
    n = min(len(e1), len(e2))
    ex = (4.0 * e2[:n] - e1[:n]) / 3.0
    return ex[ex <= hi]


def channel_profile(pot: PotentialSpec, regime: Regime) -> Callable:
    """Potential seen by the channel operators in unscaled coordinates."""
    if not pot.is_radial:
        raise ConfigError("radial pipeline needs a rotationally symmetric potential")
    h = regime.h_eff
    if regime.mode == "semiclassical" or pot.kind is PotentialKind.POWER_TAIL:
        return lambda r: pot.radial(h * r)
    lam = regime.lam
    return lambda r: lam * pot.radial(r)


def _channel_scale(pot: PotentialSpec, regime: Regime) -> float:
    if regime.mode == "semiclassical" or pot.kind is PotentialKind.POWER_TAIL:
        return 1.0 / regime.h_eff
    return 1.0


def _channel_preimage(pot, regime, window, bands):
    """Window preimage radii in channel coordinates."""
    if regime.mode == "semiclassical" or pot.kind is PotentialKind.POWER_TAIL:
        r_in, r_out = window_preimage_radii(pot, window, bands)
        s = 1.0 / regime.h_eff
        return r_in * s, r_out * s
    r, _ = pot.sample_points()
    v = regime.lam * pot.radial(r)
    hit = np.zeros(len(r), dtype=bool)
    for j in bands.indices:
        e = 2 * j + 1 + v
        hit |= (e >= window.a) & (e <= window.b)
    if not hit.any():
        return math.nan, math.nan
    idx = np.nonzero(hit)[0]
    return float(r[max(idx[0] - 1, 0)]), float(r[min(idx[-1] + 1, len(r) - 1)])


def radial_spectrum(pot: PotentialSpec, regime: Regime, window: SpectralWindow,
                    bands: Optional[BandRange] = None, R: Optional[float] = None,
                    N_r: Optional[int] = None, m_range: Optional[tuple] = None,
                    m_cap: int = 4000, jobs: int = 1, contamination_tol: float = 1e-6) -> SpectrumResult:
    """Exact spectrum in the window from the angular-momentum decomposition.

    Channel m carries Landau band j at guiding-centre radius sqrt(2(j+m)+1).
    Without an explicit ``m_range`` the scan starts from the channels whose
    guiding centres cover the window preimage and widens until two
    consecutive channels at each end contribute nothing.
    """
    if bands is None:
        from .model import contributing_bands
        bands = contributing_bands(window, pot)
    regime.check_pairing(pot)
    U = channel_profile(pot, regime)
    r_in, r_out = _channel_preimage(pot, regime, window, bands)
    if math.isnan(r_out):
        r_in, r_out = 0.0, 0.0
    width_band = 2.0 * math.sqrt(2 * bands.l + 1)
    if R is None:
        R = max(30.0, r_out + 12.0 + width_band)
        scale = _channel_scale(pot, regime)
        r_flat = pot.radial_extent(1e-8) * scale
        if r_flat < 10.0 * R:
            R = max(R, r_flat + 5.0)
    if N_r is None:
        N_r = int(math.ceil(R / 0.01))
    lo = min(0.0, pot.inf_value * (regime.lam if regime.mode == "coupling" and
                                   pot.kind is not PotentialKind.POWER_TAIL else 1.0)) - 2.0

    def channel(m):
        ev = channel_eigenvalues(U, m, R, N_r, lo, window.b)
        return ev[ev >= window.a]

    results = {}
    if m_range is not None:
        ms = list(range(m_range[0], m_range[1] + 1))
        for m, ev in zip(ms, parallel_map(channel, ms, jobs)):
            results[m] = ev
    else:
        k_lo = max(0, int(math.floor((r_in * r_in - 1) / 2)) - 2)
        k_hi = int(math.ceil((r_out * r_out - 1) / 2)) + 2
        m_lo = max(-bands.l, k_lo - bands.l)
        m_hi = k_hi - bands.l0
        ms = list(range(m_lo, m_hi + 1))
        for m, ev in zip(ms, parallel_map(channel, ms, jobs)):
            results[m] = ev
        for step in (-1, 1):
            m = m_lo if step < 0 else m_hi
            empty = 0
            while empty < 2:
                m += step
                if step < 0 and m < -bands.l:
                    break
                if len(results) > m_cap:
                    raise ChannelRangeNotConverged(f"more than {m_cap} channels scanned")
                ev = channel(m)
                results[m] = ev
                empty = empty + 1 if len(ev) == 0 else 0
        m_hi_used = max(results)
        if math.sqrt(2 * (bands.l + m_hi_used) + 1) + width_band > R:
            raise ChannelRangeNotConverged("channel scan reached the radial box edge; increase R")

    vals, tags = [], []
    for m in sorted(results):
        ev = results[m]
        if len(ev):
            _check_contamination(U, m, R, N_r, window, contamination_tol)
        vals.extend(ev)
        tags.extend([f"m={m}"] * len(ev))
    ev, mult, tg = merge_degenerate(vals, tags, window.width)
    ms = sorted(results)
    return SpectrumResult(ev, mult, tg, Method.RADIAL, regime, window, (window.a, window.b),
                          {"R": R, "N_r": N_r, "m_range": [ms[0], ms[-1]] if ms else []})


def _check_contamination(U, m, R, N_r, window, tol):
    _, d, e = channel_matrix(U, m, R, 2 * N_r)
    w, V = eigh_tridiagonal(d, e, select="v", select_range=(window.a - 1e-3, window.b + 1e-3))
    if len(w) == 0:
        return
    tail = int(math.ceil(0.95 * 2 * N_r))
    mass = np.sum(V[tail:] ** 2, axis=0)
    if np.max(mass) > tol:
        raise BoundaryContamination(
            f"channel m={m}: eigenvector mass {np.max(mass):.2e} in the outer 5% of the radial box")


# Feshbach / Schur complement pipeline


def _y_operators(n_max: int):
    """Matrices of y, D_y, D_y^2, y^2 and yD_y + D_y y in the Hermite basis, by quadrature."""
    L = max(12.0, 2.0 * math.sqrt(2 * n_max + 1) + 8.0)
    g = Grid1D(L, 1024)
    phi = hermite_functions(n_max, g)
    y = g.nodes
    xi = np.fft.fftfreq(g.N, d=g.dx) * 2 * np.pi
    F = np.fft.fft(phi, axis=0)
    dphi = np.fft.ifft(xi[:, None] * F, axis=0)  # D_y phi
    d2phi = np.fft.ifft((xi * xi)[:, None] * F, axis=0).real
    w = g.dx

    def herm(M):
        return 0.5 * (M + M.conj().T)

    Y = herm(phi.T @ (y[:, None] * phi) * w)
    Y2 = herm(phi.T @ ((y * y)[:, None] * phi) * w)
    D = herm(phi.T.conj() @ dphi * w)
    D2 = herm(phi.T @ d2phi * w)
    yphi = y[:, None] * phi
    S = yphi.T @ dphi * w
    S = S + S.conj().T
    return Y, D, D2, Y2, herm(S)


@dataclass(frozen=True)
class FeshbachSystem:
    """Truncated P(h) in the basis phi_k(y) x delta_m(x), k <= n_max.

    Basis index is ``k * N + m``; the band projector keeps k in [l0, l].
    """

    P: np.ndarray = field(repr=False)
    grid: Grid1D
    n_max: int
    bands: BandRange
    h: float
    pot: PotentialSpec = field(repr=False)

    @property
    def planck(self) -> float:
        return self.h * self.h

    @cached_property
    def band_mask(self) -> np.ndarray:
        k = np.repeat(np.arange(self.n_max + 1), self.grid.N)
        return (k >= self.bands.l0) & (k <= self.bands.l)

    @cached_property
    def _blocks(self):
        msk = self.band_mask
        P = self.P
        PB = P[np.ix_(msk, msk)]
        B = P[np.ix_(msk, ~msk)]
        mu, W = np.linalg.eigh(P[np.ix_(~msk, ~msk)])
        C = B @ W
        return PB, C, mu

    @cached_property
    def norm(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvalsh(self.P))))

    @property
    def off_band_spectrum(self) -> np.ndarray:
        return self._blocks[2]

    def projector(self) -> np.ndarray:
        return np.diag(self.band_mask.astype(float))


def feshbach_assemble(pot: PotentialSpec, regime: Regime, x_grid: Grid1D, n_max: Optional[int] = None,
                      bands: Optional[BandRange] = None, window: Optional[SpectralWindow] = None,
                      p_required: Optional[float] = None) -> FeshbachSystem:
    """Second-order-in-h expansion of P(h) = P0 + V^w(x + h D_y, h y + h^2 D_x).

    V^w(h) = V^w + h[(d1 V)^w D_y + (d2 V)^w y]
             + h^2/2 [(d11 V)^w D_y^2 + (d12 V)^w (y D_y + D_y y) + (d22 V)^w y^2]
    with x-operators quantized at Planck parameter h^2.
    """
    if bands is None:
        if window is None:
            raise ConfigError("feshbach_assemble needs bands or a window")
        from .model import contributing_bands
        bands = contributing_bands(window, pot)
    if n_max is None:
        n_max = bands.l + 4
    if n_max < bands.l + 2:
        raise ConfigError(f"n_max = {n_max} leaves fewer than two guard bands above band {bands.l}")
    N = x_grid.N
    dim = (n_max + 1) * N
    if dim > DENSE_GUARD:
        raise DimensionGuardExceeded(f"Feshbach dimension {dim} exceeds {DENSE_GUARD}")
    h = regime.h_eff
    planck = regime.planck
    if p_required is None and window is not None:
        p_required = required_momentum(pot, window, bands, planck)

    def q(fn):
        return weyl_matrix_1d(Symbol2D(fn), x_grid, planck, p_required=p_required)

    V0 = q(lambda x, p: pot.value(x, p))
    V1 = q(lambda x, p: pot.gradient(x, p)[0])
    V2 = q(lambda x, p: pot.gradient(x, p)[1])
    H = [q(lambda x, p, i=i: pot.hessian(x, p)[i]) for i in range(3)]
    Y, D, D2, Y2, S = _y_operators(n_max)
    I = np.eye(n_max + 1)
    P = (np.kron(np.diag(2.0 * np.arange(n_max + 1) + 1.0), np.eye(N)) + np.kron(I, V0)
         + h * (np.kron(D, V1) + np.kron(Y, V2))
         + 0.5 * h * h * (np.kron(D2, H[0]) + np.kron(S, H[1]) + np.kron(Y2, H[2])))
    P = 0.5 * (P + P.conj().T)
    # Rephasing phi_k -> i^k phi_k makes every term real: first-order terms
    # (odd in the y-ladder) are imaginary and pick up a factor +-i.
    ph = np.repeat(1j ** np.arange(n_max + 1), N)
    P = ph.conj()[:, None] * P * ph[None, :]
    if np.max(np.abs(P.imag)) <= 1e-13 * np.max(np.abs(P.real)):
        P = np.ascontiguousarray(P.real)
    return FeshbachSystem(P, x_grid, n_max, bands, h, pot)


def schur_complement(sys: FeshbachSystem, z: float, gap_tol: float = 1e-8) -> np.ndarray:
    """E_{-+}(z) = Pi(z-P)Pi - Pi(z-P)Q [Q(z-P)Q]^{-1} Q(z-P)Pi on the band subspace.

    Signed so that dE/dz = I + C diag((z - mu)^-2) C^* is positive.
    """
    PB, C, mu = sys._blocks
    dist = np.min(np.abs(z - mu)) if len(mu) else np.inf
    if dist < gap_tol * max(sys.norm, 1.0):
        raise OffBandSingular(f"z = {z} within {dist:.2e} of an off-band eigenvalue")
    n = PB.shape[0]
    E = z * np.eye(n) - PB - (C / (z - mu)) @ C.conj().T
    return 0.5 * (E + E.conj().T)


def schur_derivative(sys: FeshbachSystem, z: float) -> np.ndarray:
    PB, C, mu = sys._blocks
    E = np.eye(PB.shape[0]) + (C / (z - mu) ** 2) @ C.conj().T
    return 0.5 * (E + E.conj().T)


def off_band_condition(sys: FeshbachSystem, z: float) -> float:
    mu = sys.off_band_spectrum
    d = np.abs(z - mu)
    return float(np.max(d) / np.min(d))


def feshbach_spectrum(pot: PotentialSpec, regime: Regime, window: SpectralWindow,
                      grid: Optional[Grid1D] = None, n_max: Optional[int] = None,
                      bands: Optional[BandRange] = None, sys: Optional[FeshbachSystem] = None,
                      tol: float = 1e-13) -> SpectrumResult:
    """Window eigenvalues of the truncated P(h) as roots of the Schur complement.

    z is an eigenvalue iff z is an eigenvalue of T(z) = PB + C diag(1/(z-mu)) C^*.
    Each sorted eigenvalue branch t_i(z) is nonincreasing in z, so
    g_i(z) = t_i(z) - z has at most one root, bracketed by its signs at the
    window ends.
    """
    if bands is None:
        from .model import contributing_bands
        bands = contributing_bands(window, pot)
    if sys is None:
        if grid is None:
            grid = band_grid(pot, window, bands, regime)
        sys = feshbach_assemble(pot, regime, grid, n_max, bands, window)
    grid = sys.grid
    tw = trust_window(pot, window, bands, grid, sys.planck)
    PB, C, mu = sys._blocks
    a, b = tw
    if np.any((mu >= a) & (mu <= b)):
        raise OffBandSingular("an off-band eigenvalue lies inside the window")

    def t(z):
        return np.linalg.eigvalsh(PB + (C / (z - mu)) @ C.conj().T)

    ta, tb = t(a), t(b)
    roots = []
    for i in range(len(ta)):
        ga, gb = ta[i] - a, tb[i] - b
        if ga >= 0 >= gb:
            if ga == 0:
                roots.append(a)
            elif gb == 0:
                roots.append(b)
            else:
                roots.append(brentq(lambda z, i=i: t(z)[i] - z, a, b, xtol=tol, rtol=4 * np.finfo(float).eps))
    ev, mult, tg = merge_degenerate(roots, ["P"] * len(roots), window.width)
    return SpectrumResult(ev, mult, tg, Method.FESHBACH, regime, window, tuple(tw),
                          {"L": grid.L, "N": grid.N, "n_max": sys.n_max, "bands": [bands.l0, bands.l]})


@dataclass(frozen=True)
class SymbolProbe:
    x: np.ndarray
    p: np.ndarray
    samples: dict = field(repr=False)
    deviation: float = 0.0
    offdiag_norm: float = 0.0


def effective_symbol_probe(sys: FeshbachSystem, z: float, h: Optional[float] = None,
                           trust: float = 0.5) -> SymbolProbe:
    """Weyl symbol of the diagonal band blocks of E_{-+}(z) against z - (2j+1) - V(x, xi).

    ``deviation`` is the largest discrepancy over bands on the trust region
    ``|x| <= trust L``, ``|xi| <= planck xi_max / 2``; ``offdiag_norm`` is the
    largest operator norm of an off-diagonal band block.
    """
    E = schur_complement(sys, z)
    N = sys.grid.N
    nb = sys.bands.l - sys.bands.l0 + 1
    samples = {}
    dev = 0.0
    x = p = None
    for bi, j in enumerate(sys.bands.indices):
        blk = E[bi * N:(bi + 1) * N, bi * N:(bi + 1) * N]
        x, p, sig = inverse_weyl_symbol(blk, sys.grid, sys.planck, trust, constant=z - (2 * j + 1))
        ref = z - (2 * j + 1) - sys.pot.value(x[:, None], p[None, :])
        samples[j] = sig.real
        dev = max(dev, float(np.max(np.abs(sig - ref))))
    off = 0.0
    for bi in range(nb):
        for bk in range(nb):
            if bi != bk:
                blk = E[bi * N:(bi + 1) * N, bk * N:(bk + 1) * N]
                off = max(off, float(np.linalg.norm(blk, 2)))
    return SymbolProbe(x, p, samples, dev, off)
