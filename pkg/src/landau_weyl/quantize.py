"""Weyl quantization of 1D phase-space symbols on a periodised Fourier grid.

The position box [-L, L) carries N nodes; the dual lattice is xi_k = pi k / L.
A symbol a(x, p) is quantized with Planck parameter ``planck`` by sampling
it at momenta ``planck * xi_k``:

    A[m, n] = (1/N) sum_k a((x_m + x_n)/2, planck xi_k) exp(i xi_k (x_m - x_n))

For a fixed midpoint index s = m + n the sum over k is an inverse DFT in
d = m - n, so the whole matrix costs 2N FFTs of length N.  Pairs more than
half a box apart are neighbours across the periodic boundary; for them the
midpoint is taken along the short way round (minimum image).  The literal
midpoint would couple the two box edges through the symbol's value at the
centre and create ghost copies of a localized well.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.fft

from .errors import ConfigError, GridTooNarrow, NonRealSymbol, NyquistViolation

DENSE_GUARD = 8192
# rows of the midpoint/difference table processed at once
_CHUNK_ELEMS = 1 << 22


@dataclass(frozen=True)
class Grid1D:
    L: float
    N: int

    def __post_init__(self):
        if not self.L > 0:
            raise ConfigError("grid half-width must be positive")
        if self.N < 2 or self.N % 2:
            raise ConfigError(f"grid size must be even, got {self.N}")

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def nodes(self) -> np.ndarray:
        return -self.L + self.dx * np.arange(self.N)

    @property
    def dual(self) -> np.ndarray:
        return np.pi / self.L * np.arange(-self.N // 2, self.N // 2)

    @property
    def xi_max(self) -> float:
        return np.pi * self.N / (2.0 * self.L)

    @property
    def midpoints(self) -> np.ndarray:
        """Midpoints (x_m + x_n)/2 indexed by s = m + n."""
        return -self.L + 0.5 * self.dx * np.arange(2 * self.N - 1)

    @property
    def midpoints_periodic(self) -> np.ndarray:
        """All 2N midpoints of the periodic box, index s <-> -L + s dx / 2."""
        return -self.L + 0.5 * self.dx * np.arange(2 * self.N)

    @classmethod
    def auto(cls, L: float, planck: float, kappa: float = 4.0, multiple: int = 16) -> "Grid1D":
        """Grid with ``N = ceil(kappa L^2 / (pi planck))`` rounded up to ``multiple``.

        With kappa = 4 the momentum cutoff ``planck * xi_max`` equals 2L.
        """
        n = math.ceil(kappa * L * L / (np.pi * planck))
        n = max(multiple, multiple * math.ceil(n / multiple))
        return cls(float(L), int(n))

    def momentum_cutoff(self, planck: float) -> float:
        return planck * self.xi_max


@dataclass(frozen=True)
class Symbol2D:
    """Real phase-space symbol with optional analytic first derivatives."""

    fn: Callable
    dx: Optional[Callable] = None
    dxi: Optional[Callable] = None
    momentum_scale: Optional[float] = None

    def __call__(self, x, p):
        return self.fn(x, p)


def as_symbol(sym) -> Symbol2D:
    if isinstance(sym, Symbol2D):
        return sym
    if callable(sym):
        return Symbol2D(sym)
    c = complex(sym) if np.iscomplexobj(sym) else float(sym)
    return Symbol2D(lambda x, p: np.full(np.broadcast(x, p).shape, c),
                    lambda x, p: np.zeros(np.broadcast(x, p).shape),
                    lambda x, p: np.zeros(np.broadcast(x, p).shape))


def check_nyquist(grid: Grid1D, planck: float, p_required: Optional[float]):
    if p_required is None:
        return
    cutoff = grid.momentum_cutoff(planck)
    if cutoff < p_required:
        raise NyquistViolation(
            f"momentum cutoff planck*xi_max = {cutoff:.4g} below the required {p_required:.4g}; "
            f"increase N (now {grid.N}) or decrease L (now {grid.L})")


def _pairs_for_midpoint(s: int, N: int):
    """Index pairs (m, n) whose minimum-image midpoint has index s.

    Differences d = m - n are taken in [-N/2, N/2); pairs further apart
    wrap around the torus and their midpoint moves by half a period.
    """
    ms, ns = [], []
    for t, wrapped in ((s, False), (s + N, True), (s - N, True)):
        if t < 0 or t > 2 * N - 2:
            continue
        m = np.arange(max(0, t - N + 1), min(t, N - 1) + 1)
        d = 2 * m - t
        keep = ((d >= N // 2) | (d < -(N // 2))) if wrapped else ((d >= -(N // 2)) & (d < N // 2))
        ms.append(m[keep])
        ns.append(t - m[keep])
    m = np.concatenate(ms)
    return m, np.concatenate(ns)


def _assemble(sym: Symbol2D, grid: Grid1D, planck: float, allow_complex: bool) -> np.ndarray:
    N = grid.N
    if N > DENSE_GUARD:
        from .errors import DimensionGuardExceeded
        raise DimensionGuardExceeded(f"dense dimension {N} exceeds {DENSE_GUARD}")
    p = planck * np.fft.ifftshift(grid.dual)  # natural FFT order
    X = grid.midpoints_periodic
    A = np.empty((N, N), dtype=complex)
    rows = max(1, _CHUNK_ELEMS // N)
    for s0 in range(0, 2 * N, rows):
        s1 = min(2 * N, s0 + rows)
        vals = sym(X[s0:s1, None], p[None, :])
        vals = np.broadcast_to(vals, (s1 - s0, N))
        if np.iscomplexobj(vals) and not allow_complex:
            if np.max(np.abs(vals.imag)) > 1e-12 * max(1.0, np.max(np.abs(vals.real))):
                raise NonRealSymbol("symbol takes complex values")
            vals = vals.real
        F = scipy.fft.ifft(vals, axis=1)
        for s in range(s0, s1):
            m, n = _pairs_for_midpoint(s, N)
            A[m, n] = F[s - s0, (m - n) % N]
    return A


def weyl_matrix_1d(sym, grid: Grid1D, planck: float, p_required: Optional[float] = None) -> np.ndarray:
    """Hermitian matrix of the Weyl quantization of a real symbol.

    ``p_required`` is the largest momentum the caller needs resolved; a
    :class:`NyquistViolation` is raised when ``planck * xi_max`` falls short.
    The result is real when the imaginary part is pure round-off (symbols
    even in the momentum).
    """
    sym = as_symbol(sym)
    if p_required is None:
        p_required = sym.momentum_scale
    check_nyquist(grid, planck, p_required)
    A = _assemble(sym, grid, planck, allow_complex=False)
    A = 0.5 * (A + A.conj().T)
    scale = max(1.0, float(np.max(np.abs(A.real))))
    if np.max(np.abs(A.imag)) <= 1e-13 * scale:
        return np.ascontiguousarray(A.real)
    return A


def weyl_matrix_raw(sym, grid: Grid1D, planck: float) -> np.ndarray:
    """Unsymmetrised quantization; accepts complex symbols."""
    return _assemble(as_symbol(sym), grid, planck, allow_complex=True)


def hermiticity_defect(A: np.ndarray) -> float:
    return float(np.max(np.abs(A - A.conj().T))) if A.size else 0.0


def poisson_bracket(a, b, step: float):
    """{a, b} = d_p a d_x b - d_x a d_p b, analytic where derivatives are supplied."""
    a, b = as_symbol(a), as_symbol(b)

    def fd_x(s):
        return s.dx if s.dx is not None else (lambda x, p: (s(x + step, p) - s(x - step, p)) / (2 * step))

    def fd_p(s):
        return s.dxi if s.dxi is not None else (lambda x, p: (s(x, p + step) - s(x, p - step)) / (2 * step))

    ax, ap, bx, bp = fd_x(a), fd_p(a), fd_x(b), fd_p(b)
    return lambda x, p: ap(x, p) * bx(x, p) - ax(x, p) * bp(x, p)


def oscillator_projector(grid: Grid1D, planck: float, radius: float) -> np.ndarray:
    """Spectral projector of the quantized x^2 + p^2 onto energies below radius^2."""
    H = weyl_matrix_1d(lambda x, p: x * x + p * p, grid, planck)
    w, U = np.linalg.eigh(H)
    keep = U[:, w < radius * radius]
    return keep @ keep.conj().T


def moyal_residual(a, b, grid: Grid1D, planck: float, order: int = 0,
                   window_radius: Optional[float] = None, p_required: Optional[float] = None) -> float:
    """Operator norm of ``a^w b^w - c^w`` with c the order-0 or order-1 composition symbol.

    With ``window_radius`` the residual is compressed to the phase-space disc
    of that radius (oscillator projector), which removes the wrap-around of
    unbounded symbols at the box edge.
    """
    if order not in (0, 1):
        raise ConfigError("order must be 0 or 1")
    check_nyquist(grid, planck, p_required)
    sa, sb = as_symbol(a), as_symbol(b)
    if order == 0:
        c = lambda x, p: sa(x, p) * sb(x, p)  # noqa: E731
    else:
        pb = poisson_bracket(sa, sb, 1e-4 * grid.L)
        c = lambda x, p: sa(x, p) * sb(x, p) + planck / 2j * pb(x, p)  # noqa: E731
    A = weyl_matrix_raw(sa, grid, planck)
    B = weyl_matrix_raw(sb, grid, planck)
    R = A @ B - weyl_matrix_raw(c, grid, planck)
    if window_radius is not None:
        P = oscillator_projector(grid, planck, window_radius)
        R = P @ R @ P
    return float(np.linalg.norm(R, 2))


def inverse_weyl_symbol(A: np.ndarray, grid: Grid1D, planck: float, trust: float = 0.5, constant: float = 0.0):
    """Recover symbol samples from a matrix by inverting the quadrature.

    Returns ``(x, p, sigma)`` with ``sigma[i, k]`` the symbol at midpoint
    ``x[i]`` and momentum ``p[k]``.  Only midpoints with ``|x| <= trust*L``
    are returned and the symbol is assumed band-limited to
    ``|p| < planck * xi_max / 2``; both conditions make the inversion exact
    for matrices produced by :func:`weyl_matrix_1d`.  A constant symbol is
    not band-limited, so a known constant part is removed first
    (``A - constant * I``) and added back to the samples.
    """
    if constant:
        A = A - constant * np.eye(A.shape[0])
    N = grid.N
    half = N // 2
    X = grid.midpoints
    s_all = np.arange(2 * N - 1)
    count = np.minimum(s_all, N - 1) - np.maximum(0, s_all - N + 1) + 1
    s_idx = np.nonzero((np.abs(X) <= trust * grid.L + 1e-12) & (count >= half))[0]
    k = np.arange(-N // 4, N // 4)
    out = np.empty((len(s_idx), len(k)), dtype=complex)
    for row, s in enumerate(s_idx):
        par = s % 2
        m = np.arange(max(0, s - N + 1), min(s, N - 1) + 1)
        d = 2 * m - s
        # keep the most local representative of each residue class
        e = ((d % N) - par) // 2
        order = np.argsort(np.abs(d), kind="stable")
        G = np.zeros(half, dtype=complex)
        seen = np.zeros(half, dtype=bool)
        for i in order:
            if not seen[e[i]]:
                seen[e[i]] = True
                G[e[i]] = A[m[i], s - m[i]]
        if not seen.all():
            raise GridTooNarrow("midpoint row does not cover all differences")
        tau = 2.0 * scipy.fft.fft(G)[k % half]
        out[row] = tau * np.exp(-2j * np.pi * k * par / N)
    p = planck * np.pi / grid.L * k
    return X[s_idx], p, out + constant


def hermite_functions(n_max: int, y_grid: Grid1D) -> np.ndarray:
    """Sampled oscillator eigenfunctions phi_0..phi_{n_max} as columns.

    Generated by the three-term recurrence and then made exactly
    orthonormal for the grid inner product ``sum f g * dy`` by a Cholesky
    (Gram) correction, which keeps phi_k in the span of phi_0..phi_k.
    """
    if n_max < 0:
        raise ConfigError("n_max must be nonnegative")
    if y_grid.L < 2.0 * math.sqrt(2 * n_max + 1):
        raise GridTooNarrow(f"L = {y_grid.L} < 2 sqrt(2 n_max + 1) for n_max = {n_max}")
    y = y_grid.nodes
    phi = np.empty((len(y), n_max + 1))
    phi[:, 0] = np.pi ** -0.25 * np.exp(-0.5 * y * y)
    if n_max >= 1:
        phi[:, 1] = math.sqrt(2.0) * y * phi[:, 0]
    for n in range(1, n_max):
        phi[:, n + 1] = math.sqrt(2.0 / (n + 1)) * y * phi[:, n] - math.sqrt(n / (n + 1)) * phi[:, n - 1]
    G = phi.T @ phi * y_grid.dx
    R = np.linalg.cholesky(G).T
    return np.linalg.solve(R.T, phi.T).T


def oscillator_fd_rayleigh(phi: np.ndarray, y_grid: Grid1D) -> np.ndarray:
    """Rayleigh quotients of the 3-point finite-difference -d^2/dy^2 + y^2."""
    dy = y_grid.dx
    y = y_grid.nodes
    lap = np.zeros_like(phi)
    lap[1:-1] = (phi[2:] - 2 * phi[1:-1] + phi[:-2]) / dy**2
    lap[0] = (phi[1] - 2 * phi[0]) / dy**2
    lap[-1] = (phi[-2] - 2 * phi[-1]) / dy**2
    Hphi = -lap + (y * y)[:, None] * phi
    return np.sum(phi * Hphi, axis=0) / np.sum(phi * phi, axis=0)
