"""Seeded Gaussian sampling for initial data and Wiener increments.

All randomness flows through counter-based Philox streams keyed by
(seed, role, replica) with the step index as counter, so a sample depends only
on its key and position, never on scheduling order.  Within one draw, modes
are consumed in a fixed canonical order: the representative of each {n, -n}
pair is the lexicographically larger mode, and the partner is filled by
conjugation, which enforces real-valuedness exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .renorm import RenormConstants
from .spectral import PairState, SpectralField, mode_grids

ROLE_IDS = {"initial_g": 1, "initial_h": 2, "wiener": 3}


@lru_cache(maxsize=64)
def mode_pairs(n_max: int):
    """Canonical mode bookkeeping for the ball |n| <= n_max.

    Returns (rep_idx, conj_idx, zero_idx, rep_nsq): flat indices into the
    (2K+1)^2 coefficient array for the pair representatives (n1 > 0, or
    n1 == 0 and n2 > 0), their conjugate partners, and the zero mode.
    """
    n1, n2, nsq = mode_grids(n_max)
    in_ball = nsq <= n_max * n_max
    rep = in_ball & ((n1 > 0) | ((n1 == 0) & (n2 > 0)))
    side = 2 * n_max + 1
    flat = lambda a, b: (a + n_max) * side + (b + n_max)
    r1, r2 = n1[rep], n2[rep]
    rep_idx = flat(r1, r2)
    conj_idx = flat(-r1, -r2)
    zero_idx = flat(np.array(0), np.array(0))
    return rep_idx, conj_idx, int(zero_idx), nsq.ravel()[rep_idx].astype(np.float64)


@dataclass(frozen=True)
class NoiseStream:
    """Immutable key for a reproducible Gaussian stream."""

    seed: int
    role: str
    replica: int = 0

    def generator(self, step: int = 0) -> np.random.Generator:
        key = (np.uint64(self.seed), np.uint64((ROLE_IDS[self.role] << 32) | self.replica))
        # The step goes in the highest counter word: the generator itself
        # increments the low words while drawing, so distinct steps must be
        # separated in a word the draw counter can never reach.
        bg = np.random.Philox(key=key, counter=[0, 0, 0, np.uint64(step)])
        return np.random.Generator(bg)

    def for_replica(self, replica: int) -> "NoiseStream":
        return replace(self, replica=replica)


def _standard_complex_modes(rng: np.random.Generator, n_rep: int) -> tuple[float, np.ndarray]:
    """One real standard normal for n = 0 and n_rep standard complex normals.

    Complex convention: real and imaginary parts independent N(0, 1/2), so
    E|g|^2 = 1.
    """
    z0 = float(rng.standard_normal())
    x = rng.standard_normal(n_rep)
    y = rng.standard_normal(n_rep)
    return z0, (x + 1j * y) / np.sqrt(2.0)


def _fill_hermitian(n_max: int, zero_val: complex, rep_vals: np.ndarray) -> SpectralField:
    rep_idx, conj_idx, zero_idx, _ = mode_pairs(n_max)
    side = 2 * n_max + 1
    c = np.zeros(side * side, dtype=np.complex128)
    c[rep_idx] = rep_vals
    c[conj_idx] = np.conj(rep_vals)
    c[zero_idx] = zero_val
    return SpectralField(n_max, c.reshape(side, side))


@dataclass
class GaussianPair:
    z0: SpectralField
    z1: SpectralField


def sample_initial(rc: RenormConstants, seed: int, replica: int = 0) -> GaussianPair:
    """Draw (z0, z1) from the invariant Gaussian measure of the linear flow.

    z0(n) = (alpha / sqrt(2 damping)) g_n / <n>_N  and
    z1(n) = (alpha / sqrt(2 damping)) h_n, with <n>_N^2 = lambda + |n|^2.
    """
    k = rc.n
    _, _, _, rep_nsq = mode_pairs(k)
    jn = np.sqrt(rc.lam + rep_nsq)
    if rc.alpha == 0.0:
        amp = 0.0
    elif rc.damping > 0:
        amp = rc.alpha / np.sqrt(2.0 * rc.damping)
    else:
        raise ValueError("noise requires positive damping (no stationary measure)")

    g_rng = NoiseStream(seed, "initial_g", replica).generator()
    g0, g = _standard_complex_modes(g_rng, rep_nsq.size)
    z0 = _fill_hermitian(k, amp * g0 / np.sqrt(rc.lam), amp * g / jn)

    h_rng = NoiseStream(seed, "initial_h", replica).generator()
    h0, h = _standard_complex_modes(h_rng, rep_nsq.size)
    z1 = _fill_hermitian(k, amp * h0, amp * h)
    return GaussianPair(z0, z1)


def initial_pair_state(rc: RenormConstants, seed: int, replica: int = 0) -> PairState:
    gp = sample_initial(rc, seed, replica)
    return PairState(gp.z0, gp.z1)


def wiener_increment(n: int, dt: float, stream: NoiseStream, step: int = 0) -> SpectralField:
    """Increment of the truncated cylindrical Wiener process over a step of dt.

    Each retained mode gets an independent Gaussian with E|dW(n)|^2 = dt
    (the n = 0 mode is real with variance dt), Hermitian-paired across +-n.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    _, _, _, rep_nsq = mode_pairs(n)
    rng = stream.generator(step)
    w0, w = _standard_complex_modes(rng, rep_nsq.size)
    s = np.sqrt(dt)
    return _fill_hermitian(n, s * w0, s * w)
