"""Renormalization constants for the truncated stochastic damped NLW.

The central object is the unique positive solution lambda_N of

    lambda = (3 alpha^2 / 8 pi^2) * sum_{|n| <= N} 1 / (lambda + |n|^2),

which equals three times the stationary pointwise variance sigma_N of the
linear solution.  The weak-noise regime instead fixes lambda = 1 and uses
sigma_N = (alpha^2 / 8 pi^2) sum_{|n| <= N} 1 / (1 + |n|^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

_EIGHT_PI_SQ = 8.0 * math.pi**2


@lru_cache(maxsize=32)
def _ball_quadrant(n: int) -> tuple[np.ndarray, np.ndarray]:
    """(|m|^2 values, multiplicities) over one quadrant of the ball |m| <= n.

    Points with a zero coordinate carry weight 2 (or 1 at the origin) so that
    summing weight/(lam + r2) reproduces the full-ball sum.
    """
    a2 = np.arange(n + 1, dtype=np.float64) ** 2
    grid = a2[:, None] + a2[None, :]
    mask = grid <= float(n * n)
    w = np.full((n + 1, n + 1), 4.0)
    w[0, :] = 2.0
    w[:, 0] = 2.0
    w[0, 0] = 1.0
    return grid[mask], w[mask]


def ball_mode_count(n: int) -> int:
    """Number of integer modes with |m| <= n."""
    _, w = _ball_quadrant(n)
    return int(round(float(np.sum(w))))


def mode_sum(lam: float, n: int) -> float:
    """sum_{|m| <= n} 1 / (lam + |m|^2), exact finite sum over the ball."""
    if lam <= 0:
        raise ValueError("mode_sum requires lam > 0")
    if n < 0:
        raise ValueError("n must be >= 0")
    r2, w = _ball_quadrant(n)
    return float(np.sum(w / (lam + r2)))


def solve_lambda(alpha: float, n: int, tol: float = 1e-12, max_iter: int = 400) -> float:
    """Unique positive root of lam = (3 alpha^2 / 8 pi^2) * mode_sum(lam, n).

    The residual lam - c * mode_sum(lam, n) is strictly increasing and
    concave, so a Newton iteration constrained to a sign-change bracket
    converges in a handful of steps; bisection is the fallback whenever a
    Newton step leaves the bracket.
    """
    if alpha == 0:
        raise ValueError("alpha must be nonzero")
    if n < 1:
        raise ValueError("n must be >= 1")
    c = 3.0 * alpha * alpha / _EIGHT_PI_SQ
    r2, w = _ball_quadrant(n)

    def resid_and_slope(lam: float) -> tuple[float, float]:
        d = lam + r2
        return lam - c * float(np.sum(w / d)), 1.0 + c * float(np.sum(w / (d * d)))

    count = ball_mode_count(n)
    hi = c * count
    lo = c * count / (hi + n * n)
    # resid(lo) <= 0 by construction; expand hi until resid(hi) > 0.
    guard = 0
    while resid_and_slope(hi)[0] <= 0:
        hi *= 2.0
        guard += 1
        if guard > 200:
            raise RuntimeError("failed to bracket lambda_N (bracketing bug)")
    x = 0.5 * (lo + hi)
    for _ in range(max_iter):
        r, slope = resid_and_slope(x)
        if abs(r) <= tol * max(1.0, x):
            return x
        if r > 0:
            hi = x
        else:
            lo = x
        step = x - r / slope
        x = step if lo < step < hi else 0.5 * (lo + hi)
    raise RuntimeError("root search for lambda_N did not converge (bracketing bug)")


def sigma_from_lambda(alpha: float, lam: float, n: int) -> float:
    """Stationary pointwise variance (alpha^2 / 8 pi^2) * mode_sum(lam, n)."""
    if alpha == 0:
        return 0.0
    return alpha * alpha / _EIGHT_PI_SQ * mode_sum(lam, n)


def sigma_weak(alpha: float, n: int) -> float:
    """(alpha^2 / 8 pi^2) sum_{|m| <= n} 1 / (1 + |m|^2)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if alpha == 0:
        return 0.0
    return alpha * alpha / _EIGHT_PI_SQ * mode_sum(1.0, n)


def asymptotic_reference(alpha: float, n: int) -> float:
    """Leading-order asymptote (3 / 4 pi) * alpha^2 * log n."""
    if n < 2:
        raise ValueError("n must be >= 2")
    return 3.0 / (4.0 * math.pi) * alpha * alpha * math.log(n)


def log_sum_bound_check(a: float, n: int) -> tuple[float, float]:
    """Deviation of the mode sum from its logarithmic approximation.

    Returns (lhs, rhs) with lhs = |mode_sum(a, n) - pi log(1 + n^2/a)| and
    rhs = a^{-1/2} min(1, n a^{-1/2}).  The implicit constant of the bound is
    diagnosed empirically, not asserted.
    """
    if a < 1 or n < 1:
        raise ValueError("requires a >= 1 and n >= 1")
    lhs = abs(mode_sum(a, n) - math.pi * math.log1p(n * n / a))
    rhs = (1.0 / math.sqrt(a)) * min(1.0, n / math.sqrt(a))
    return lhs, rhs


def beta_n(sigma: float, kappa: float) -> float:
    """3 * (sigma - kappa^2 / 4 pi), the vanishing mass defect of the weak regime."""
    return 3.0 * (sigma - kappa * kappa / (4.0 * math.pi))


def hermite(k: int, x, sigma: float):
    """Hermite polynomial H_k(x; sigma) via H_{k+1} = x H_k - k sigma H_{k-1}.

    Accepts scalar or array ``x``.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    h_prev = np.ones_like(np.asarray(x, dtype=np.float64))
    if k == 0:
        return h_prev if isinstance(x, np.ndarray) else float(h_prev)
    h = np.asarray(x, dtype=np.float64).copy()
    for j in range(1, k):
        h, h_prev = x * h - j * sigma * h_prev, h
    return h if isinstance(x, np.ndarray) else float(h)


def double_factorial_odd(j: int) -> int:
    """(2j - 1)!! with the convention (-1)!! = 1."""
    out = 1
    for i in range(1, 2 * j, 2):
        out *= i
    return out


@dataclass(frozen=True)
class WickCoefficients:
    """Coefficients c_j of u^{2k+1} = sum_j c_j sigma^j :u^{2k+1-2j}:."""

    k: int
    coeffs: tuple[float, ...]


def wick_coefficients(k: int) -> WickCoefficients:
    """c_j = binom(2k+1, 2j) (2j-1)!! for j = 0..k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    cs = tuple(float(math.comb(2 * k + 1, 2 * j) * double_factorial_odd(j)) for j in range(k + 1))
    return WickCoefficients(k, cs)


@dataclass(frozen=True)
class RenormConstants:
    """Bundle (N, alpha, lambda, sigma) for one truncation and regime.

    regime "strong": lambda solves the fixed-point equation and lambda = 3 sigma.
    regime "weak":   lambda = 1 and sigma is the weak-noise variance.
    ``damping`` generalizes the friction coefficient (1 except in tuned runs);
    the stationary variance scales as 1/damping.
    """

    n: int
    alpha: float
    lam: float
    sigma: float
    regime: str
    damping: float = 1.0

    @classmethod
    def strong(cls, alpha: float, n: int) -> "RenormConstants":
        lam = solve_lambda(alpha, n)
        return cls(n, alpha, lam, lam / 3.0, "strong")

    @classmethod
    def weak(cls, alpha: float, n: int) -> "RenormConstants":
        return cls(n, alpha, 1.0, sigma_weak(alpha, n), "weak")

    @classmethod
    def deterministic(cls, n: int, mass: float) -> "RenormConstants":
        """Noise-free constants: flow mass ``mass``, no renormalization."""
        return cls(n, 0.0, mass, 0.0, "deterministic")

    @classmethod
    def tuned(cls, alpha: float, damping: float, n: int) -> "RenormConstants":
        """Weak-style constants for friction ``damping``: lambda = 1, variance ~ alpha^2/damping."""
        sig = sigma_weak(alpha / math.sqrt(damping), n)
        return cls(n, alpha, 1.0, sig, "tuned", damping=damping)


def sigma_strong(rc: RenormConstants) -> float:
    """Stationary variance in the strong regime; satisfies lambda = 3 sigma."""
    if rc.regime != "strong":
        raise ValueError("sigma_strong applies to strong-regime constants")
    return sigma_from_lambda(rc.alpha, rc.lam, rc.n)
