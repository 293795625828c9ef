"""Fourier representation of real fields on the 2-torus (R/2piZ)^2.

Fields are expanded in the orthonormal basis e_n(x) = (2pi)^{-1} exp(i n.x),
n in Z^2, and truncated to the integer ball |n| <= N (not the square): modes
inside the coefficient square but outside the ball are structural zeros.

Coefficients of a field with band limit K are stored in a dense complex array
of shape (2K+1, 2K+1) indexed by ``c[K + n1, K + n2]``.  Real fields satisfy
c(-n) = conj(c(n)).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft as sfft
from scipy.fft import next_fast_len

TWO_PI = 2.0 * np.pi


@lru_cache(maxsize=64)
def mode_grids(n_max: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Frequency grids (n1, n2, |n|^2) for the coefficient square of size 2K+1."""
    r = np.arange(-n_max, n_max + 1)
    n1, n2 = np.meshgrid(r, r, indexing="ij")
    return n1, n2, n1 * n1 + n2 * n2


@lru_cache(maxsize=64)
def ball_mask(n_max: int) -> np.ndarray:
    """Boolean mask of modes with n1^2 + n2^2 <= n_max^2."""
    _, _, nsq = mode_grids(n_max)
    return nsq <= n_max * n_max


@dataclass
class SpectralField:
    """Band-limited field on T^2 given by its Fourier coefficients.

    coeffs[k1, k2] is the coefficient of e_n with n = (k1 - n_max, k2 - n_max).
    """

    n_max: int
    coeffs: np.ndarray

    def __post_init__(self):
        k = self.n_max
        if self.coeffs.shape != (2 * k + 1, 2 * k + 1):
            raise ValueError(
                f"coefficient array must be {(2 * k + 1, 2 * k + 1)}, got {self.coeffs.shape}"
            )
        self.coeffs = np.where(ball_mask(k), self.coeffs.astype(np.complex128), 0.0)

    @classmethod
    def zeros(cls, n_max: int) -> "SpectralField":
        return cls(n_max, np.zeros((2 * n_max + 1, 2 * n_max + 1), dtype=np.complex128))

    @classmethod
    def from_modes(cls, n_max: int, modes: dict[tuple[int, int], complex]) -> "SpectralField":
        f = cls.zeros(n_max)
        for (a, b), v in modes.items():
            if a * a + b * b > n_max * n_max:
                raise ValueError(f"mode {(a, b)} outside ball of radius {n_max}")
            f.coeffs[n_max + a, n_max + b] = v
        return f

    def coeff(self, n1: int, n2: int) -> complex:
        if max(abs(n1), abs(n2)) > self.n_max:
            return 0.0 + 0.0j
        return complex(self.coeffs[self.n_max + n1, self.n_max + n2])

    def copy(self) -> "SpectralField":
        return SpectralField(self.n_max, self.coeffs.copy())

    def is_real(self, tol: float = 1e-12) -> bool:
        """Check the Hermitian symmetry c(-n) = conj(c(n))."""
        flipped = self.coeffs[::-1, ::-1]
        return bool(np.max(np.abs(flipped - np.conj(self.coeffs))) <= tol)

    def __add__(self, other: "SpectralField") -> "SpectralField":
        if other.n_max == self.n_max:
            return SpectralField(self.n_max, self.coeffs + other.coeffs)
        k = max(self.n_max, other.n_max)
        out = SpectralField.zeros(k)
        for f in (self, other):
            s = k - f.n_max
            out.coeffs[s : s + 2 * f.n_max + 1, s : s + 2 * f.n_max + 1] += f.coeffs
        return out

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        return self + (other * -1.0)

    def __mul__(self, scalar: float) -> "SpectralField":
        return SpectralField(self.n_max, self.coeffs * scalar)

    __rmul__ = __mul__


@dataclass
class PairState:
    """Phase-space state (u, du/dt) with a common band limit."""

    pos: SpectralField
    vel: SpectralField

    def __post_init__(self):
        if self.pos.n_max != self.vel.n_max:
            raise ValueError("position and velocity must share a band limit")

    @property
    def n_max(self) -> int:
        return self.pos.n_max

    def copy(self) -> "PairState":
        return PairState(self.pos.copy(), self.vel.copy())


@dataclass
class PhysicalGrid:
    """Real samples on the uniform collocation grid x_j = 2 pi j / M."""

    size: int
    values: np.ndarray


def project(f: SpectralField, n: int) -> SpectralField:
    """Dirichlet projection onto the ball |m| <= n (idempotent)."""
    if n < 0:
        raise ValueError("projection radius must be >= 0")
    k = min(n, f.n_max)
    s = f.n_max - k
    out = SpectralField(k, f.coeffs[s : s + 2 * k + 1, s : s + 2 * k + 1].copy())
    return out


def _spread_to_fft(coeffs: np.ndarray, n_max: int, m: int) -> np.ndarray:
    """Place the (2K+1)^2 coefficient block into an M x M FFT array (mod M).

    When M < 2K+1 several modes fold onto the same residue and must be
    accumulated, which requires unbuffered addition.
    """
    z = np.zeros((m, m), dtype=np.complex128)
    idx = (np.arange(-n_max, n_max + 1)) % m
    if m >= 2 * n_max + 1:
        z[np.ix_(idx, idx)] = coeffs
    else:
        np.add.at(z, (idx[:, None], idx[None, :]), coeffs)
    return z


def _spread_to_rfft(coeffs: np.ndarray, n_max: int, m: int) -> np.ndarray:
    """Half-spectrum (rfft2 layout) version of _spread_to_fft.

    Keeps the columns n2 mod M in 0..M//2.  For Hermitian-symmetric input the
    conjugate partner of every dropped mode folds into the kept half, so the
    inverse real transform reproduces the full sum exactly.
    """
    half = m // 2 + 1
    z = np.zeros((m, half), dtype=np.complex128)
    r = np.arange(-n_max, n_max + 1)
    rows = r % m
    cols = r % m
    keep = cols < half
    if m >= 2 * n_max + 1:
        z[np.ix_(rows, cols[keep])] = coeffs[:, keep]
    else:
        np.add.at(z, (rows[:, None], cols[None, keep]), coeffs[:, keep])
    return z


def to_physical(f: SpectralField, m: int) -> PhysicalGrid:
    """Evaluate the field at the M x M collocation points (exact pointwise)."""
    if m < 2 * f.n_max + 2:
        raise ValueError(f"grid size {m} too small for band limit {f.n_max}")
    z = _spread_to_rfft(f.coeffs / TWO_PI, f.n_max, m)
    vals = sfft.irfft2(z, s=(m, m)) * (m * m)
    return PhysicalGrid(m, vals)


def pointwise_values(f: SpectralField, m: int) -> np.ndarray:
    """Sample the field at the M x M collocation points for any M >= 1.

    Exact for Hermitian-symmetric (real-valued) fields regardless of the band
    limit because exp(i n x_j) depends on n only mod M on the grid; unlike
    to_physical this makes no round-trip guarantee.
    """
    z = _spread_to_rfft(f.coeffs / TWO_PI, f.n_max, m)
    return sfft.irfft2(z, s=(m, m)) * (m * m)


def to_spectral(grid: PhysicalGrid, n_max: int) -> SpectralField:
    """Forward transform of grid samples, truncated to the ball |n| <= n_max.

    Exact for samples of a band-limited field whose full band (including
    aliases) does not fold into the retained ball.
    """
    m = grid.size
    if m < 2 * n_max + 2:
        raise ValueError(f"grid size {m} too small for band limit {n_max}")
    z = sfft.rfft2(grid.values) / (m * m)
    side = 2 * n_max + 1
    coeffs = np.empty((side, side), dtype=np.complex128)
    rows = np.arange(-n_max, n_max + 1) % m
    # Nonnegative n2 comes straight from the half spectrum; negative n2 by
    # Hermitian symmetry c(-n) = conj(c(n)) of the real samples.
    coeffs[:, n_max:] = z[np.ix_(rows, np.arange(0, n_max + 1))]
    coeffs[:, :n_max] = np.conj(coeffs[::-1, n_max + 1 :][:, ::-1])
    return SpectralField(n_max, TWO_PI * coeffs)


def cubic_grid_size(n_max: int) -> int:
    # Full band of f^3 is 3K per axis; alias images must stay above 3K.
    return next_fast_len(max(6 * n_max + 2, 8))


def cubic_dealiased(f: SpectralField) -> SpectralField:
    """Exact spectral coefficients of f^3 on the band |n| <= 3 n_max."""
    m = cubic_grid_size(f.n_max)
    g = to_physical(f, m)
    return to_spectral(PhysicalGrid(m, g.values**3), 3 * f.n_max)


def sobolev_norm(f: SpectralField, s: float) -> float:
    """H^s norm (sum over modes of <n>^{2s} |c|^2)^{1/2}, <n>^2 = 1 + |n|^2."""
    _, _, nsq = mode_grids(f.n_max)
    w = (1.0 + nsq) ** s
    return float(np.sqrt(np.sum(w * np.abs(f.coeffs) ** 2)))


def bessel_multiplier(f: SpectralField, s: float) -> SpectralField:
    """Apply the Fourier multiplier <n>^s."""
    _, _, nsq = mode_grids(f.n_max)
    return SpectralField(f.n_max, f.coeffs * (1.0 + nsq) ** (s / 2.0))


def winfty_norm(f: SpectralField, s: float, oversample: int = 4) -> float:
    """Grid approximation (from below) of ||<grad>^s f||_{L^infty}.

    Evaluates the smoothed field on a grid of size oversample * (2 n_max + 2);
    converges to the sup norm as the oversampling factor grows.
    """
    if oversample < 2:
        raise ValueError("oversample must be >= 2")
    g = bessel_multiplier(f, s)
    m = next_fast_len(oversample * (2 * f.n_max + 2))
    vals = to_physical(g, m).values
    return float(np.max(np.abs(vals)))


def l4_norm4(f: SpectralField) -> float:
    """Integral of f^4 over T^2 by dealiased quadrature (exact for band-limited f)."""
    m = next_fast_len(4 * f.n_max + 2)
    vals = to_physical(f, m).values
    v2 = vals * vals
    return float(np.sum(v2 * v2) * (TWO_PI / m) ** 2)


def random_real_field(n_max: int, rng: np.random.Generator, scale: float = 1.0) -> SpectralField:
    """Random Hermitian-symmetric field supported on the ball (test helper)."""
    k = n_max
    a = rng.standard_normal((2 * k + 1, 2 * k + 1))
    b = rng.standard_normal((2 * k + 1, 2 * k + 1))
    c = (a + 1j * b) * scale
    c = 0.5 * (c + np.conj(c[::-1, ::-1]))
    return SpectralField(k, c)
