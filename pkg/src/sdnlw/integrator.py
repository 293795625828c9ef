"""Time stepping of the residual wave dynamics and assembly of u = z + v.

The full solution is split as u = z + v: z is the exactly sampled linear
stochastic flow and v solves the shifted residual equation

    v_tt - Lap v + delta v_t + lam v + F(v, z) = 0,

with F the cubic forcing written in Wick form.  The strong regime uses the
self-consistent mass lam and F = v^3 + 3v^2 z + 3v :z^2: + :z^3:; the weak
and tuned regimes keep lam = 1 in the flow and move the mass defect into the
extra linear term (3 sigma - 1)(v + z).

v is advanced by a two-stage exponential integrator (exact linear flow plus a
trapezoidal Duhamel correction, formal order 2); the forcing is evaluated
pointwise on a dealiased collocation grid and its projection onto the band
|n| <= N is exact.  z is advanced on the half-step grid of the same clock so
the corrector stage sees a consistent sample of the driving path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.fft import next_fast_len

import math

from .linear import (
    ModeSymbols,
    propagator_entries,
    symbols_for,
    transition_covariance,
    zN_step,
)
from .renorm import RenormConstants, wick_coefficients
from .sampling import NoiseStream, sample_initial
from .spectral import (
    PairState,
    PhysicalGrid,
    SpectralField,
    l4_norm4,
    mode_grids,
    pointwise_values,
    sobolev_norm,
    to_spectral,
)

BLOWUP_THRESHOLD = 1e8

REGIMES = ("strong", "weak", "deterministic", "tuned_damping")


@dataclass(frozen=True)
class SimConfig:
    """Parameters of one simulation run (one truncation, one regime)."""

    n: int
    regime: str
    t_final: float
    h: float
    epsilon: float = 0.25
    t_pad: float = 0.0
    record_every: int = 1
    power_k: int = 1
    record_fields: tuple[str, ...] = ()
    record_tail: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.regime not in REGIMES:
            raise ValueError(f"unknown regime {self.regime!r}")
        if self.h <= 0 or self.t_final < self.h:
            raise ValueError("need h > 0 and t_final >= h")
        if self.t_pad < 0:
            raise ValueError("t_pad must be >= 0")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")
        if self.power_k not in (1, 2, 3):
            raise ValueError("power_k must be in {1, 2, 3}")
        bad = set(self.record_fields) - {"z", "v"}
        if bad:
            raise ValueError(f"unknown record fields {sorted(bad)}")


@dataclass
class TrajectoryRecord:
    """Diagnostics (and optional field snapshots) of one run on a uniform grid.

    times covers [-t_pad, t_final + t_pad]; diagnostics that involve v or u
    are NaN before t = 0, where only the stationary z path exists.
    """

    times: np.ndarray
    diagnostics: dict[str, np.ndarray]
    snapshots: dict[str, np.ndarray] = field(default_factory=dict)
    blowup: bool = False
    blowup_time: float | None = None

    def __post_init__(self):
        dt = np.diff(self.times)
        if dt.size and not np.all(dt > 0):
            raise ValueError("record times must be strictly increasing")


def wick_powers(z: SpectralField, sigma: float) -> tuple[SpectralField, SpectralField]:
    """Renormalized powers (z^2 - sigma, z^3 - 3 sigma z) as spectral fields.

    Evaluated pointwise on a grid wide enough that the full bands (2N and 3N)
    are alias-free, so both outputs are exact.
    """
    k = z.n_max
    m = next_fast_len(max(6 * k + 2, 8))
    vals = pointwise_values(z, m)
    v2 = vals * vals
    z2 = to_spectral(PhysicalGrid(m, v2 - sigma), 2 * k)
    z3 = to_spectral(PhysicalGrid(m, v2 * vals - 3.0 * sigma * vals), 3 * k)
    return z2, z3


def nonlinearity_strong(
    v: SpectralField,
    z: SpectralField,
    z2: SpectralField,
    z3: SpectralField,
) -> SpectralField:
    """Band-N projection of v^3 + 3 v^2 z + 3 v z2 + z3, alias-free.

    The summands have full band 3N; on a grid of size M >= 4N + 2 every alias
    image lands outside the retained ball, so the projection is exact.
    """
    k = v.n_max
    m = next_fast_len(max(4 * k + 2, 8))
    vv = pointwise_values(v, m)
    zv = pointwise_values(z, m)
    z2v = pointwise_values(z2, m)
    z3v = pointwise_values(z3, m)
    vv2 = vv * vv
    vals = vv2 * vv + 3.0 * vv2 * zv + 3.0 * vv * z2v + z3v
    return to_spectral(PhysicalGrid(m, vals), k)


def general_power_nonlinearity(
    v: SpectralField, z: SpectralField, sigma: float, k: int
) -> SpectralField:
    """Band-N projection of (v + z)^{2k+1} assembled in Hermite form.

    Uses the identity u^{2k+1} = sum_j binom(2k+1, 2j) (2j-1)!! sigma^j
    H_{2k+1-2j}(u; sigma), which holds identically in (u, sigma); evaluating
    through the Hermite pieces keeps the k = 1 path numerically aligned with
    the Wick-form cubic forcing.
    """
    if v.n_max != z.n_max:
        raise ValueError("v and z must share a band limit")
    kk = v.n_max
    deg = 2 * k + 1
    m = next_fast_len(max(2 * deg * kk + 2, 8))
    u = pointwise_values(v, m) + pointwise_values(z, m)
    # Hermite ladder H_0 .. H_deg at the grid points.
    h_prev = np.ones_like(u)
    h_cur = u.copy()
    herm = [h_prev, h_cur]
    for j in range(1, deg):
        h_cur, h_prev = u * h_cur - j * sigma * h_prev, h_cur
        herm.append(h_cur)
    cs = wick_coefficients(k).coeffs
    vals = np.zeros_like(u)
    for j, c in enumerate(cs):
        vals += c * sigma**j * herm[deg - 2 * j]
    return to_spectral(PhysicalGrid(m, vals), kk)


def _step_core(
    pos: np.ndarray,
    vel: np.ndarray,
    f_t: np.ndarray,
    f_next_of,
    entries,
    h: float,
):
    """Shared predictor-corrector update on raw coefficient arrays.

    f_t is the forcing at the step start; f_next_of(pos*, vel*) evaluates it at
    the predicted endpoint.  Equation convention: state' = A state - (0, F).
    """
    e11, e12, e21, e22 = entries
    hp = pos * e11 + vel * e12
    hv = pos * e21 + vel * e22
    # Predictor: freeze the forcing at t and push it through the Duhamel row.
    pred_p = hp - h * e12 * f_t
    pred_v = hv - h * e22 * f_t
    f_next = f_next_of(pred_p, pred_v)
    # Corrector: trapezoid in the Duhamel kernel, K(0+) = (0, 1).
    new_p = hp - 0.5 * h * e12 * f_t
    new_v = hv - 0.5 * h * (e22 * f_t + f_next)
    return new_p, new_v


def step_vN(
    v: PairState,
    z_samples: list[tuple[SpectralField, SpectralField, SpectralField]],
    syms: ModeSymbols,
    h: float,
    extra_linear: float = 0.0,
) -> PairState:
    """One exponential predictor-corrector step of the residual equation.

    z_samples holds the (z, :z^2:, :z^3:) triples at the two substage times
    t and t + h.  extra_linear adds c (v + z) to the forcing (the weak-regime
    mass defect c = 3 sigma - 1).
    """
    if len(z_samples) != 2:
        raise ValueError("need z samples at both substage times")
    k = v.n_max
    sy = syms.sub(k) if syms.n_max != k else syms
    entries = propagator_entries(sy, h)

    def forcing(pos_coeffs: np.ndarray, triple) -> np.ndarray:
        z, z2, z3 = triple
        f = nonlinearity_strong(SpectralField(k, pos_coeffs), z, z2, z3).coeffs
        if extra_linear != 0.0:
            f = f + extra_linear * (pos_coeffs + z.coeffs)
        return f

    f_t = forcing(v.pos.coeffs, z_samples[0])
    new_p, new_v = _step_core(
        v.pos.coeffs,
        v.vel.coeffs,
        f_t,
        lambda pp, pv: forcing(pp, z_samples[1]),
        entries,
        h,
    )
    return PairState(SpectralField(k, new_p), SpectralField(k, new_v))


def energy(v: PairState, lam: float) -> float:
    """E = (1/2)||grad v||^2 + (1/2)||v_t||^2 + (1/4)||v||_{L^4}^4 + (lam/2)||v||^2.

    Dissipated by the unforced deterministic flow (up to the O(h^2) error of
    the time stepping).
    """
    _, _, nsq = mode_grids(v.n_max)
    p = np.abs(v.pos.coeffs) ** 2
    grad = float(np.sum(nsq * p))
    mass = float(np.sum(p))
    kin = float(np.sum(np.abs(v.vel.coeffs) ** 2))
    return 0.5 * grad + 0.5 * kin + 0.25 * l4_norm4(v.pos) + 0.5 * lam * mass


class _Forcing:
    """Pointwise forcing evaluator bound to one (regime, grid, sigma)."""

    def __init__(self, config: SimConfig, rc: RenormConstants):
        self.k = config.n
        self.sigma = rc.sigma
        self.regime = rc.regime
        self.power_k = config.power_k
        deg = 2 * config.power_k + 1
        width = 4 if config.power_k == 1 else 2 * deg
        self.m = next_fast_len(max(width * self.k + 2, 8))
        # Weak-style regimes carry the mass defect as an explicit linear term.
        self.c_lin = (3.0 * rc.sigma - 1.0) if rc.regime in ("weak", "tuned") else 0.0
        if config.power_k > 1:
            self.c_lin = -1.0
            cs = wick_coefficients(config.power_k).coeffs
            self.coeffs = [c * rc.sigma**j for j, c in enumerate(cs)]

    def z_values(self, z: SpectralField) -> np.ndarray:
        return pointwise_values(z, self.m)

    def __call__(
        self, pos_coeffs: np.ndarray, z_coeffs: np.ndarray, z_vals: np.ndarray
    ) -> np.ndarray:
        vv = pointwise_values(SpectralField(self.k, pos_coeffs), self.m)
        s = self.sigma
        if self.power_k == 1:
            vv2 = vv * vv
            if z_vals is None:
                vals = vv2 * vv - 3.0 * s * vv
            else:
                zv2 = z_vals * z_vals
                vals = (
                    vv2 * vv
                    + 3.0 * vv2 * z_vals
                    + 3.0 * vv * (zv2 - s)
                    + (zv2 * z_vals - 3.0 * s * z_vals)
                )
        else:
            u = vv if z_vals is None else vv + z_vals
            deg = 2 * self.power_k + 1
            h_prev = np.ones_like(u)
            h_cur = u.copy()
            herm = [h_prev, h_cur]
            for j in range(1, deg):
                h_cur, h_prev = u * h_cur - j * s * h_prev, h_cur
                herm.append(h_cur)
            vals = np.zeros_like(u)
            for j, c in enumerate(self.coeffs):
                vals += c * herm[deg - 2 * j]
        f = to_spectral(PhysicalGrid(self.m, vals), self.k).coeffs
        if self.c_lin != 0.0:
            zc = 0.0 if z_coeffs is None else z_coeffs
            f = f + self.c_lin * (pos_coeffs + zc)
        return f


def _tail_norm(forcing: _Forcing, pos_coeffs: np.ndarray, z: SpectralField, sigma: float) -> float:
    """H^{-1} norm of the forcing modes above the retained band (audit only)."""
    k = forcing.k
    v = SpectralField(k, pos_coeffs)
    z2, z3 = wick_powers(z, sigma)
    m = next_fast_len(max(8 * k + 2, 8))
    vv = pointwise_values(v, m)
    vv2 = vv * vv
    vals = (
        vv2 * vv
        + 3.0 * vv2 * pointwise_values(z, m)
        + 3.0 * vv * pointwise_values(z2, m)
        + pointwise_values(z3, m)
    )
    full = to_spectral(PhysicalGrid(m, vals), 3 * k)
    s = 3 * k - k
    full.coeffs[s : s + 2 * k + 1, s : s + 2 * k + 1] = 0.0
    return sobolev_norm(full, -1.0)


def simulate(
    config: SimConfig,
    rc: RenormConstants,
    stream: NoiseStream,
    v_init: PairState | None = None,
) -> TrajectoryRecord:
    """Co-evolve the exact linear flow z and the residual v on one clock.

    z runs on [-t_pad, t_final + t_pad] starting from a fresh stationary
    sample (stationarity makes the early start a distributional no-op while
    providing a two-sided path); v starts from v_init at t = 0.  Wiener
    increments are consumed through ``stream`` with a deterministic step
    counter, so a record is a pure function of (config, rc, stream, v_init).
    """
    if rc.n != config.n:
        raise ValueError("constants and config disagree on the truncation")
    expected = {
        "strong": "strong",
        "weak": "weak",
        "tuned_damping": "tuned",
        "deterministic": "deterministic",
    }
    if rc.regime != expected[config.regime]:
        raise ValueError(f"constants regime {rc.regime!r} does not fit {config.regime!r}")
    k = config.n
    h = config.h
    noisy = rc.alpha != 0.0

    n_steps = int(round((config.t_final + config.t_pad) / h))
    pad_steps = int(round(config.t_pad / h))
    re = config.record_every
    if pad_steps % re:
        pad_steps += re - pad_steps % re

    syms = symbols_for(rc.lam, k, rc.damping)
    entries = propagator_entries(syms, h)
    forcing = _Forcing(config, rc)

    if noisy:
        op_half = transition_covariance(syms, rc.alpha, 0.5 * h)
        gp = sample_initial(rc, stream.seed, stream.replica)
        z = PairState(gp.z0, gp.z1)
        wiener = NoiseStream(stream.seed, "wiener", stream.replica)
    else:
        op_half = None
        z = PairState(SpectralField.zeros(k), SpectralField.zeros(k))
        wiener = None
    if v_init is None:
        v = PairState(SpectralField.zeros(k), SpectralField.zeros(k))
    else:
        if v_init.n_max != k:
            raise ValueError("initial data band does not match config")
        v = v_init.copy()

    rec_times: list[float] = []
    diag: dict[str, list[float]] = {
        "u_h_neg": [],
        "z_h_neg": [],
        "v_h1": [],
        "energy": [],
    }
    if config.record_tail:
        diag["forcing_tail"] = []
    snaps: dict[str, list[np.ndarray]] = {name: [] for name in config.record_fields}
    eps = config.epsilon

    def advance_z(counter: int) -> None:
        nonlocal z
        if op_half is not None:
            z = zN_step(z, op_half, wiener, counter)

    def record(j: int, with_v: bool) -> None:
        rec_times.append(j * h)
        diag["z_h_neg"].append(sobolev_norm(z.pos, -eps))
        if with_v:
            u = SpectralField(k, z.pos.coeffs + v.pos.coeffs)
            diag["u_h_neg"].append(sobolev_norm(u, -eps))
            diag["v_h1"].append(sobolev_norm(v.pos, 1.0))
            diag["energy"].append(energy(v, rc.lam))
            if config.record_tail:
                diag["forcing_tail"].append(_tail_norm(forcing, v.pos.coeffs, z.pos, rc.sigma))
        else:
            diag["u_h_neg"].append(math.nan)
            diag["v_h1"].append(math.nan)
            diag["energy"].append(math.nan)
            if config.record_tail:
                diag["forcing_tail"].append(math.nan)
        if "z" in snaps:
            snaps["z"].append(z.pos.coeffs.copy())
        if "v" in snaps:
            snaps["v"].append(v.pos.coeffs.copy() if with_v else np.zeros_like(v.pos.coeffs))

    blowup = False
    blowup_time: float | None = None

    # Pad phase: only z exists.
    for j in range(-pad_steps, 0):
        if (j + pad_steps) % re == 0:
            record(j, with_v=False)
        c = 2 * (j + pad_steps)
        advance_z(c)
        advance_z(c + 1)

    record(0, with_v=True)
    z_vals = forcing.z_values(z.pos) if noisy else None
    for j in range(n_steps):
        f_t = forcing(v.pos.coeffs, z.pos.coeffs if noisy else None, z_vals)
        c = 2 * (j + pad_steps)
        advance_z(c)
        advance_z(c + 1)
        z_vals = forcing.z_values(z.pos) if noisy else None
        zc = z.pos.coeffs if noisy else None

        def f_next(pp: np.ndarray, pv: np.ndarray) -> np.ndarray:
            return forcing(pp, zc, z_vals)

        new_p, new_v = _step_core(v.pos.coeffs, v.vel.coeffs, f_t, f_next, entries, h)
        v = PairState(SpectralField(k, new_p), SpectralField(k, new_v))
        peak = max(np.max(np.abs(new_p)), np.max(np.abs(new_v)))
        if not np.isfinite(peak) or peak > BLOWUP_THRESHOLD:
            blowup = True
            blowup_time = (j + 1) * h
            break
        if (j + 1) % re == 0 or j + 1 == n_steps:
            record(j + 1, with_v=True)

    return TrajectoryRecord(
        times=np.asarray(rec_times),
        diagnostics={name: np.asarray(vals) for name, vals in diag.items()},
        snapshots={name: np.asarray(arrs) for name, arrs in snaps.items()},
        blowup=blowup,
        blowup_time=blowup_time,
    )


def limit_mass(kappa: float) -> float:
    """Mass coefficient (3 / 4 pi) kappa^2 of the deterministic limit flow."""
    return 3.0 / (4.0 * math.pi) * kappa * kappa


def solve_deterministic_limit(
    kappa: float,
    v0v1: PairState,
    t_final: float,
    h: float,
    record_every: int = 1,
    t_pad: float = 0.0,
    damping: float = 1.0,
    mass: float | None = None,
) -> TrajectoryRecord:
    """Integrate the noise-free limit equation with mass (3/4pi) kappa^2.

    ``mass`` overrides the kappa-derived value when given.  Implemented
    through the weak-regime stepping with the mass shifted into the flow
    symbols, so at kappa = 0 it reproduces a zero-noise weak run bit for bit.
    """
    n = v0v1.n_max
    if mass is None:
        mass = limit_mass(kappa)
    rc = RenormConstants(n, 0.0, 1.0 + mass, 0.0, "weak", damping=damping)
    config = SimConfig(
        n=n,
        regime="weak",
        t_final=t_final,
        h=h,
        record_every=record_every,
        t_pad=t_pad,
        record_fields=("v",),
    )
    return simulate(config, rc, NoiseStream(0, "wiener"), v_init=v0v1)
