"""Norms and statistics used by the convergence studies.

The central construction is the windowed space-time Sobolev norm: a
trajectory on [0, T] is extended by multiplication with a fixed smooth cutoff
chi_T (identically 1 on [0, T], supported in (-T/2, 3T/2)) and the norm of
the extension

    ||chi_T u||_{H^b(R; H^s)}
      = ((1/2pi) sum_tau sum_n <tau>^{2b} <n>^{2s} |w_hat(tau, n)|^2 dtau)^{1/2}

is evaluated by a discrete time Fourier transform on the padded uniform grid.
This is an upper bound for the restriction-space infimum norm; an upper bound
that decays is all the convergence studies need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .integrator import TrajectoryRecord, wick_powers
from .linear import propagator_entries, symbols_for, transition_covariance, zN_step
from .renorm import RenormConstants
from .sampling import NoiseStream, sample_initial
from .spectral import PairState, SpectralField, mode_grids, sobolev_norm, winfty_norm


def _smoothstep(x: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for x <= 0, 1 for x >= 1, built from exp(-1/x)."""
    x = np.clip(x, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        f = np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)
        g = np.where(x < 1, np.exp(-1.0 / np.where(x < 1, 1.0 - x, 1.0)), 0.0)
    return f / (f + g)


def window_profile(t: np.ndarray, t_final: float) -> np.ndarray:
    """Cutoff chi_T: 1 on [0, T], smooth, supported in (-T/2, 3T/2)."""
    if t_final <= 0:
        raise ValueError("t_final must be > 0")
    x = np.asarray(t, dtype=np.float64) / t_final
    rise = _smoothstep(2.0 * x + 1.0)
    fall = _smoothstep(3.0 - 2.0 * x)
    return rise * fall


@dataclass
class SpaceTimeSample:
    """Field snapshots on a uniform time grid with the cutoff values attached."""

    n_max: int
    t_final: float
    times: np.ndarray
    coeffs: np.ndarray
    window: np.ndarray

    def __post_init__(self):
        side = 2 * self.n_max + 1
        if self.coeffs.shape != (self.times.size, side, side):
            raise ValueError("snapshot array shape does not match times and band")
        dt = np.diff(self.times)
        if dt.size == 0 or not np.allclose(dt, dt[0], rtol=1e-9, atol=1e-12):
            raise ValueError("time grid must be uniform with at least two points")
        on = (self.times >= -1e-12) & (self.times <= self.t_final + 1e-12)
        if not np.all(np.abs(self.window[on] - 1.0) < 1e-12):
            raise ValueError("window must be identically 1 on [0, t_final]")

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])


def make_sample(
    n_max: int, t_final: float, times: np.ndarray, coeffs: np.ndarray
) -> SpaceTimeSample:
    """Attach the standard cutoff profile to a snapshot array."""
    times = np.asarray(times, dtype=np.float64)
    return SpaceTimeSample(n_max, t_final, times, coeffs, window_profile(times, t_final))


def spacetime_norm(sample: SpaceTimeSample, b: float, s: float) -> float:
    """H^b-in-time, H^s-in-space norm of the windowed extension chi_T u."""
    dt = sample.dt
    w = sample.coeffs * sample.window[:, None, None]
    what = dt * np.fft.fft(w, axis=0)
    tau = 2.0 * math.pi * np.fft.fftfreq(sample.times.size, d=dt)
    wt = (1.0 + tau * tau) ** b
    _, _, nsq = mode_grids(sample.n_max)
    ws = (1.0 + nsq.astype(np.float64)) ** s
    # dtau / (2 pi) = 1 / (n_t dt), making b = 0 a Riemann sum of ||u(t)||_{H^s}^2.
    total = np.sum(wt[:, None, None] * ws[None, :, :] * np.abs(what) ** 2)
    return float(np.sqrt(total / (sample.times.size * dt)))


def scalar_extension_norm(t_final: float, times: np.ndarray, b: float) -> float:
    """||chi_T||_{H^b(R)} on the same grid and convention (oracle helper)."""
    times = np.asarray(times, dtype=np.float64)
    dt = float(times[1] - times[0])
    w = window_profile(times, t_final)
    what = dt * np.fft.fft(w)
    tau = 2.0 * math.pi * np.fft.fftfreq(times.size, d=dt)
    total = np.sum((1.0 + tau * tau) ** b * np.abs(what) ** 2)
    return float(np.sqrt(total / (times.size * dt)))


def sup_sobolev(coeffs: np.ndarray, n_max: int, s: float) -> float:
    """sup over the time axis of the spatial H^s norms of a snapshot array."""
    _, _, nsq = mode_grids(n_max)
    w = (1.0 + nsq.astype(np.float64)) ** s
    per_time = np.sqrt(np.sum(w[None, :, :] * np.abs(coeffs) ** 2, axis=(1, 2)))
    return float(np.max(per_time))


def trapezoid_l2(values: np.ndarray, dt: float) -> float:
    """L^2-in-time norm of sampled scalar values by the trapezoid rule."""
    return float(np.sqrt(np.trapezoid(np.asarray(values) ** 2, dx=dt)))


def vlin_trajectory(
    v0v1: PairState, rc: RenormConstants, times: np.ndarray, t_final: float
) -> SpaceTimeSample:
    """Exact homogeneous evolution of (v0, v1) sampled at the given times.

    Valid for negative times too (the closed-form propagator is entire in t),
    which supplies the natural backward extension used by the space-time norms.
    """
    times = np.asarray(times, dtype=np.float64)
    k = v0v1.n_max
    syms = symbols_for(rc.lam, k, rc.damping)
    side = 2 * k + 1
    out = np.empty((times.size, side, side), dtype=np.complex128)
    p0 = v0v1.pos.coeffs
    v0 = v0v1.vel.coeffs
    for i, t in enumerate(times):
        e11, e12, _, _ = propagator_entries(syms, float(t))
        out[i] = e11 * p0 + e12 * v0
    return make_sample(k, t_final, times, out)


def z_path(
    rc: RenormConstants, stream: NoiseStream, times: np.ndarray
) -> Iterator[SpectralField]:
    """Stationary linear-flow path sampled at a uniform time grid.

    The transition sampling is distributionally exact for any step size, so
    the grid spacing is purely an output choice.
    """
    times = np.asarray(times, dtype=np.float64)
    dt = np.diff(times)
    if dt.size and not np.allclose(dt, dt[0], rtol=1e-9, atol=1e-12):
        raise ValueError("time grid must be uniform")
    syms = symbols_for(rc.lam, rc.n, rc.damping)
    gp = sample_initial(rc, stream.seed, stream.replica)
    state = PairState(gp.z0, gp.z1)
    yield state.pos
    if dt.size:
        op = transition_covariance(syms, rc.alpha, float(dt[0]))
        wiener = NoiseStream(stream.seed, "wiener", stream.replica)
        for step in range(dt.size):
            state = zN_step(state, op, wiener, step)
            yield state.pos


def wick_replica_norms(
    rc: RenormConstants,
    stream: NoiseStream,
    times: np.ndarray,
    eps: float,
    oversample: int = 2,
) -> dict[str, float]:
    """Path norms of z and its renormalized powers for one replica.

    Returns sup_t ||z||_{H^{-eps}} and the L^2-in-time W^{-eps,infty} norms of
    :z:, :z^2:, :z^3: on the given grid.
    """
    times = np.asarray(times, dtype=np.float64)
    dt = float(times[1] - times[0])
    z_h = []
    w1 = []
    w2 = []
    w3 = []
    for z in z_path(rc, stream, times):
        z_h.append(sobolev_norm(z, -eps))
        w1.append(winfty_norm(z, -eps, oversample))
        z2, z3 = wick_powers(z, rc.sigma)
        w2.append(winfty_norm(z2, -eps, oversample))
        w3.append(winfty_norm(z3, -eps, oversample))
    return {
        "z_ct_hneg": float(np.max(z_h)),
        "wick1_l2t_winf": trapezoid_l2(np.asarray(w1), dt),
        "wick2_l2t_winf": trapezoid_l2(np.asarray(w2), dt),
        "wick3_l2t_winf": trapezoid_l2(np.asarray(w3), dt),
    }


def summarize(values: np.ndarray) -> dict[str, float]:
    """Mean, standard error, median and 90th percentile of a sample.

    A single observation reports SE = 0 by convention.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise ValueError("cannot summarize an empty sample")
    se = float(np.std(v, ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
    return {
        "mean": float(np.mean(v)),
        "se": se,
        "median": float(np.median(v)),
        "q90": float(np.quantile(v, 0.9)),
    }


@dataclass
class McSummary:
    """Per-time replica statistics of named diagnostics."""

    times: np.ndarray
    n_replicas: int
    n_blowups: int
    stats: dict[str, dict[str, np.ndarray]]


def aggregate(records: list[TrajectoryRecord]) -> McSummary:
    """Reduce replica trajectory records to per-time summary statistics.

    Blown-up replicas are counted and excluded from the statistics.
    """
    if not records:
        raise ValueError("no records to aggregate")
    good = [r for r in records if not r.blowup]
    n_blow = len(records) - len(good)
    if not good:
        raise ValueError("all replicas blew up")
    times = good[0].times
    for r in good[1:]:
        if r.times.shape != times.shape or not np.allclose(r.times, times):
            raise ValueError("records do not share a time grid")
    stats: dict[str, dict[str, np.ndarray]] = {}
    for name in good[0].diagnostics:
        mat = np.stack([r.diagnostics[name] for r in good])
        n = len(good)
        se = np.std(mat, axis=0, ddof=1) / math.sqrt(n) if n > 1 else np.zeros(times.size)
        stats[name] = {
            "mean": np.mean(mat, axis=0),
            "se": se,
            "median": np.median(mat, axis=0),
            "q90": np.quantile(mat, 0.9, axis=0),
        }
    return McSummary(times, len(good), n_blow, stats)
