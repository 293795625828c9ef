"""Exact mode-wise solution of the modified linear damped wave flow.

Each Fourier mode of L u = u_tt - Lap u + delta u_t + lambda u = alpha xi
is a 2-dimensional linear SDE for (u(n), u_t(n)) with oscillator frequency
jn^2 = lambda + |n|^2.  The homogeneous propagator over a step h is

    E(h) = e^{-delta h/2} [[C + (delta/2) S, S], [-jn^2 S, C - (delta/2) S]]

with C = cos(h d), S = sin(h d)/d and d = sqrt(jn^2 - delta^2/4) (hyperbolic
branch when the argument is negative).  The stochastic convolution over a step
is an independent Gaussian whose 2x2 covariance Q(h) is computed in closed
form from trigonometric antiderivatives, so one step of the linear flow is
distributionally exact: the invariant measure with per-mode covariance
diag(alpha^2 / (2 delta jn^2), alpha^2 / (2 delta)) is preserved sharply.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .renorm import RenormConstants
from .sampling import NoiseStream, mode_pairs
from .spectral import PairState, SpectralField, mode_grids

_SMALL_DISC = 1e-8


@dataclass(frozen=True)
class ModeSymbols:
    """Per-mode symbols jn^2 = lam + |n|^2 and d^2 = jn^2 - damping^2/4."""

    n_max: int
    lam: float
    damping: float
    jn2: np.ndarray
    disc: np.ndarray

    def sub(self, n_max: int) -> "ModeSymbols":
        if n_max > self.n_max:
            raise ValueError("cannot enlarge a symbol table")
        s = self.n_max - n_max
        sl = slice(s, s + 2 * n_max + 1)
        return ModeSymbols(n_max, self.lam, self.damping, self.jn2[sl, sl], self.disc[sl, sl])


def symbols_for(lam: float, n_max: int, damping: float = 1.0) -> ModeSymbols:
    _, _, nsq = mode_grids(n_max)
    jn2 = lam + nsq.astype(np.float64)
    return ModeSymbols(n_max, lam, damping, jn2, jn2 - 0.25 * damping * damping)


def propagator_symbols(rc: RenormConstants) -> ModeSymbols:
    """Symbols for all |n| <= 3N (Wick powers live up to 3N; dynamics uses N)."""
    return symbols_for(rc.lam, 3 * rc.n, rc.damping)


def _cos_sinc(disc: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """(cos(h d), sin(h d)/d) with the hyperbolic branch for disc < 0.

    The removable singularity at d = 0 is handled by series expansion.
    """
    disc = np.asarray(disc, dtype=np.float64)
    z = disc * h * h
    c = np.empty_like(disc)
    s = np.empty_like(disc)
    small = np.abs(z) < 1e-8
    osc = (~small) & (disc > 0)
    hyp = (~small) & (disc < 0)
    if np.any(osc):
        d = np.sqrt(disc[osc])
        c[osc] = np.cos(h * d)
        s[osc] = np.sin(h * d) / d
    if np.any(hyp):
        r = np.sqrt(-disc[hyp])
        c[hyp] = np.cosh(h * r)
        s[hyp] = np.sinh(h * r) / r
    if np.any(small):
        zz = z[small]
        c[small] = 1.0 - zz / 2.0 + zz * zz / 24.0
        s[small] = h * (1.0 - zz / 6.0 + zz * zz / 120.0)
    return c, s


def propagator_entries(syms: ModeSymbols, h: float):
    """Entries (E11, E12, E21, E22) of the homogeneous one-step matrix E(h).

    Valid for any real h (the flow is entire in time; negative h solves
    backwards, with the damping factor growing accordingly).
    """
    d2 = syms.damping / 2.0
    c, s = _cos_sinc(syms.disc, h)
    e = np.exp(-d2 * h)
    return e * (c + d2 * s), e * s, -e * syms.jn2 * s, e * (c - d2 * s)


def duhamel_kernel(syms: ModeSymbols, h: float):
    """Impulse response (position, velocity) of a unit velocity kick h ago."""
    _, e12, _, e22 = propagator_entries(syms, h)
    return e12, e22


def homogeneous_step(state: PairState, syms: ModeSymbols, h: float) -> PairState:
    """Exact homogeneous evolution of (u, u_t) over a step of length h."""
    sy = syms.sub(state.n_max) if syms.n_max != state.n_max else syms
    e11, e12, e21, e22 = propagator_entries(sy, h)
    p, v = state.pos.coeffs, state.vel.coeffs
    return PairState(
        SpectralField(state.n_max, e11 * p + e12 * v),
        SpectralField(state.n_max, e21 * p + e22 * v),
    )


def stationary_covariance(syms: ModeSymbols, alpha: float):
    """Per-mode invariant covariance diag(alpha^2/(2 delta jn^2), alpha^2/(2 delta))."""
    a2 = alpha * alpha
    return a2 / (2.0 * syms.damping * syms.jn2), np.full_like(syms.jn2, a2 / (2.0 * syms.damping))


def _covariance_closed_form(syms: ModeSymbols, alpha: float, h: float):
    """Q(h) entries from trigonometric antiderivatives (complex branch-safe)."""
    delta = syms.damping
    d = np.sqrt(syms.disc.astype(np.complex128))
    b = 2.0 * d
    den = delta * delta + b * b
    edh = np.exp(-delta * h)
    j0 = (1.0 - edh) / delta
    jc = (delta - edh * (delta * np.cos(b * h) - b * np.sin(b * h))) / den
    js = (b - edh * (delta * np.sin(b * h) + b * np.cos(b * h))) / den
    i_ss = 0.5 * (j0 - jc)
    i_cc = 0.5 * (j0 + jc)
    i_sc = 0.5 * js
    a2 = alpha * alpha
    # Modes with d ~ 0 produce 0/0 here and are replaced by the Lyapunov form.
    with np.errstate(invalid="ignore", divide="ignore"):
        q_pos = a2 * i_ss / (d * d)
        q_cross = a2 * (i_sc / d - 0.5 * delta * i_ss / (d * d))
        q_vel = a2 * (i_cc - delta * i_sc / d + 0.25 * delta * delta * i_ss / (d * d))
    return np.real(q_pos), np.real(q_cross), np.real(q_vel)


def _covariance_lyapunov(syms: ModeSymbols, alpha: float, h: float):
    """Q(h) = Sigma_stat - E(h) Sigma_stat E(h)^T (exact; used near d = 0)."""
    sp, sv = stationary_covariance(syms, alpha)
    e11, e12, e21, e22 = propagator_entries(syms, h)
    q_pos = sp - (e11 * e11 * sp + e12 * e12 * sv)
    q_cross = -(e11 * e21 * sp + e12 * e22 * sv)
    q_vel = sv - (e21 * e21 * sp + e22 * e22 * sv)
    return q_pos, q_cross, q_vel


@dataclass(frozen=True)
class TransitionOperator:
    """One-step transition data: E(h) entries and the Cholesky factor of Q(h)."""

    n_max: int
    h: float
    alpha: float
    e11: np.ndarray
    e12: np.ndarray
    e21: np.ndarray
    e22: np.ndarray
    q_pos: np.ndarray
    q_cross: np.ndarray
    q_vel: np.ndarray
    l11: np.ndarray
    l21: np.ndarray
    l22: np.ndarray


def transition_covariance(syms: ModeSymbols, alpha: float, h: float) -> TransitionOperator:
    """Exact covariance of the stochastic-convolution increment over a step h."""
    if h <= 0:
        raise ValueError("h must be > 0")
    e11, e12, e21, e22 = propagator_entries(syms, h)
    if alpha == 0.0:
        zero = np.zeros_like(syms.jn2)
        return TransitionOperator(
            syms.n_max, h, alpha, e11, e12, e21, e22,
            zero, zero, zero, zero, zero, zero,
        )
    if syms.damping <= 0:
        raise ValueError("noise requires positive damping (no stationary measure)")
    q_pos, q_cross, q_vel = _covariance_closed_form(syms, alpha, h)
    near_zero = np.abs(syms.disc) * h * h < _SMALL_DISC
    if np.any(near_zero):
        lp, lc, lv = _covariance_lyapunov(syms, alpha, h)
        q_pos = np.where(near_zero, lp, q_pos)
        q_cross = np.where(near_zero, lc, q_cross)
        q_vel = np.where(near_zero, lv, q_vel)
    # 2x2 Cholesky, guarded against roundoff at alpha = 0.
    l11 = np.sqrt(np.maximum(q_pos, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        l21 = np.where(l11 > 0, q_cross / np.where(l11 > 0, l11, 1.0), 0.0)
    l22 = np.sqrt(np.maximum(q_vel - l21 * l21, 0.0))
    return TransitionOperator(
        syms.n_max, h, alpha, e11, e12, e21, e22, q_pos, q_cross, q_vel, l11, l21, l22
    )


def _flat(arr: np.ndarray) -> np.ndarray:
    return arr.ravel()


def zN_step(
    state: PairState, op: TransitionOperator, stream: NoiseStream, step: int
) -> PairState:
    """One distributionally-exact step of the linear stochastic flow.

    state' = E(h) state + G with G ~ N(0, Q(h)), Hermitian-paired across +-n.
    """
    k = state.n_max
    if op.n_max != k:
        raise ValueError("transition operator band does not match state")
    rep_idx, conj_idx, zero_idx, _ = mode_pairs(k)
    p = _flat(state.pos.coeffs).copy()
    v = _flat(state.vel.coeffs).copy()
    e11, e12, e21, e22 = (_flat(op.e11), _flat(op.e12), _flat(op.e21), _flat(op.e22))
    l11, l21, l22 = _flat(op.l11), _flat(op.l21), _flat(op.l22)

    new_p = e11 * p + e12 * v
    new_v = e21 * p + e22 * v

    side = 2 * k + 1
    if op.alpha == 0.0:
        return PairState(
            SpectralField(k, new_p.reshape(side, side)),
            SpectralField(k, new_v.reshape(side, side)),
        )

    rng = stream.generator(step)
    # Zero mode: real 2-vector.
    xi = rng.standard_normal(2)
    new_p[zero_idx] += l11[zero_idx] * xi[0]
    new_v[zero_idx] += l21[zero_idx] * xi[0] + l22[zero_idx] * xi[1]
    # Representatives: standard complex 2-vectors (E|zeta|^2 = 1 per entry).
    n_rep = rep_idx.size
    z = rng.standard_normal((4, n_rep))
    z1 = (z[0] + 1j * z[1]) / np.sqrt(2.0)
    z2 = (z[2] + 1j * z[3]) / np.sqrt(2.0)
    g_p = l11[rep_idx] * z1
    g_v = l21[rep_idx] * z1 + l22[rep_idx] * z2
    new_p[rep_idx] += g_p
    new_v[rep_idx] += g_v
    new_p[conj_idx] = np.conj(new_p[rep_idx])
    new_v[conj_idx] = np.conj(new_v[rep_idx])

    return PairState(
        SpectralField(k, new_p.reshape(side, side)),
        SpectralField(k, new_v.reshape(side, side)),
    )
