"""Ladder studies: mass-constant asymptotics, Wick-power decay, the
strong-noise vanishing of solutions, the weak-noise deterministic limit, and
the tuned-damping variant; plus CSV persistence and plot-data emission.

Every runner is a pure function of (spec, seed): replicas draw from
counter-based streams keyed by (seed, role, replica), results are ordered by
(N, replica) before writing, and floats are formatted with a fixed precision,
so identical inputs give byte-identical output files.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .diagnostics import (
    make_sample,
    spacetime_norm,
    summarize,
    sup_sobolev,
    vlin_trajectory,
    wick_replica_norms,
)
from .integrator import (
    SimConfig,
    limit_mass,
    simulate,
    solve_deterministic_limit,
)
from .renorm import RenormConstants, asymptotic_reference, mode_sum
from .sampling import NoiseStream
from .spectral import PairState, SpectralField, mode_grids

EXIT_OK = 0
EXIT_TREND = 2
EXIT_BLOWUP = 3
EXIT_CONFIG = 4

RECORD_DT = 0.05
BLOWUP_BUDGET = 0.10
INITIAL_DATA_NAMES = ("zero", "single_mode", "bump")
STUDY_NAMES = (
    "lambda_asymptotics",
    "wick_decay",
    "strong_triviality",
    "weak_limit",
    "tuned_damping",
)
DEFAULT_REPLICAS = {
    "wick_decay": 64,
    "strong_triviality": 64,
    "weak_limit": 16,
    "tuned_damping": 8,
}
DEFAULT_LADDERS = {
    "lambda_asymptotics": (4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096),
    "wick_decay": (8, 16, 32, 64, 128),
    "strong_triviality": (8, 16, 32, 64),
    "weak_limit": (16, 32, 64, 128),
    "tuned_damping": (8, 16, 32),
}


class ConfigError(ValueError):
    """Invalid study specification (maps to exit code 4)."""


@dataclass(frozen=True)
class StudySpec:
    """Parameters of one ladder study."""

    study: str
    output_dir: str
    n_ladder: tuple[int, ...] = ()
    alpha: float = 1.0
    kappa: float = 1.0
    gamma: float = 1.0
    tuned_branch: str = "finite"
    t_final: float = 1.0
    epsilon: float = 0.25
    mc_replicas: int | None = None
    initial_data: str = "single_mode"
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.study not in STUDY_NAMES:
            raise ConfigError(f"unknown study {self.study!r}")
        ladder = tuple(int(n) for n in self.n_ladder) or DEFAULT_LADDERS[self.study]
        object.__setattr__(self, "n_ladder", ladder)
        if any(b <= a for a, b in zip(ladder, ladder[1:])):
            raise ConfigError("n_ladder must be strictly increasing")
        if ladder[0] < 2:
            raise ConfigError("n_ladder entries must be >= 2")
        if self.initial_data not in INITIAL_DATA_NAMES:
            raise ConfigError(f"unknown initial data {self.initial_data!r}")
        if self.tuned_branch not in ("finite", "infinite"):
            raise ConfigError("tuned_branch must be 'finite' or 'infinite'")
        if self.t_final <= 0 or self.epsilon <= 0 or self.epsilon >= 1:
            raise ConfigError("need t_final > 0 and epsilon in (0, 1)")
        if self.mc_replicas is not None and self.mc_replicas < 1:
            raise ConfigError("mc_replicas must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    @property
    def replicas(self) -> int:
        if self.mc_replicas is not None:
            return self.mc_replicas
        return DEFAULT_REPLICAS.get(self.study, 16)


# --------------------------------------------------------------------------
# Fixed initial-data library (band <= 8, identical across all N >= 8).

INITIAL_DATA_BAND = 8


def initial_data(name: str, n_max: int) -> PairState:
    """Named (v0, v1) pairs; band-limited to 8 so every ladder sees the same data."""
    if name not in INITIAL_DATA_NAMES:
        raise ConfigError(f"unknown initial data {name!r}")
    k = min(INITIAL_DATA_BAND, n_max)
    v0 = SpectralField.zeros(k)
    if name == "single_mode":
        # cos(x1): coefficients pi at n = (+-1, 0) in the (2pi)^{-1} e^{inx} basis.
        v0.coeffs[k + 1, k] = math.pi
        v0.coeffs[k - 1, k] = math.pi
    elif name == "bump":
        n1, n2, nsq = mode_grids(k)
        v0 = SpectralField(k, 0.5 * np.exp(-nsq / 8.0).astype(np.complex128))
    v1 = SpectralField.zeros(k)
    return PairState(_embed(v0, n_max), _embed(v1, n_max))


def _embed(f: SpectralField, n_max: int) -> SpectralField:
    if f.n_max == n_max:
        return f
    out = SpectralField.zeros(n_max)
    s = n_max - f.n_max
    out.coeffs[s : s + 2 * f.n_max + 1, s : s + 2 * f.n_max + 1] = f.coeffs
    return out


# --------------------------------------------------------------------------
# Deterministic persistence helpers.


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.12g" % float(x)
    return str(x)


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def write_json(path: Path, payload) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _step_size(n: int, record_dt: float = RECORD_DT) -> tuple[float, int]:
    """Step h dividing the record spacing, near min(0.05, 0.5/N)."""
    target = min(0.05, 0.5 / n)
    m = max(1, math.ceil(record_dt / target - 1e-9))
    return record_dt / m, m


def _trend_ok(values: list[float], window: int = 3) -> bool:
    """Strictly decreasing over the last ``window`` ladder entries."""
    tail = values[-window:] if len(values) >= window else values
    return all(b < a for a, b in zip(tail, tail[1:]))


def _run_tasks(fn, tasks: list, workers: int) -> list:
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, tasks, chunksize=1))


def _meta(spec: StudySpec, exit_code: int, extra: dict | None = None) -> dict:
    payload = {
        "study": spec.study,
        "seed": spec.seed,
        "n_ladder": list(spec.n_ladder),
        "alpha": spec.alpha,
        "kappa": spec.kappa,
        "gamma": spec.gamma,
        "t_final": spec.t_final,
        "epsilon": spec.epsilon,
        "replicas": spec.replicas,
        "initial_data": spec.initial_data,
        "exit_code": exit_code,
    }
    if extra:
        payload.update(extra)
    return payload


# --------------------------------------------------------------------------
# Lambda asymptotics.


def run_lambda_study(spec: StudySpec) -> int:
    """Mass constant lambda_N against its (3/4pi) alpha^2 log N asymptote."""
    out = Path(spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    a = spec.alpha
    rows = []
    ratios = []
    for n in spec.n_ladder:
        rc = RenormConstants.strong(a, n)
        ref = asymptotic_reference(a, n)
        resid = rc.lam - ref
        ratio = rc.lam / ref
        rows.append([n, a, rc.lam, ref, resid, ratio])
        ratios.append(ratio)
    write_csv(
        out / "lambda_study.csv",
        ["n", "alpha", "lambda", "reference", "residual", "ratio"],
        rows,
    )
    # The ratio lambda / reference approaches 1 monotonically from above
    # (the subleading correction changes sign only once, far up the ladder).
    if len(rows) > 1:
        monotone = all(b < a_ for a_, b in zip(ratios, ratios[1:]))
        ok = monotone and 0.8 <= ratios[-1] <= 1.2
        code = EXIT_OK if ok else EXIT_TREND
    else:
        code = EXIT_OK
    write_json(out / "study_meta.json", _meta(spec, code))
    return code


# --------------------------------------------------------------------------
# Wick decay.


def _wick_task(args) -> dict[str, float]:
    rc, seed, replica, times, eps = args
    return wick_replica_norms(rc, NoiseStream(seed, "wiener", replica), times, eps)


def run_wick_study(spec: StudySpec) -> int:
    """Decay in N of the renormalized-power path norms (strong regime)."""
    out = Path(spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    dt = 0.1
    times = np.arange(0, int(round(spec.t_final / dt)) + 1) * dt
    keys = ("z_ct_hneg", "wick1_l2t_winf", "wick2_l2t_winf", "wick3_l2t_winf")
    record_rows = []
    summary_rows = []
    means: dict[str, list[float]] = {k: [] for k in keys}
    for n in spec.n_ladder:
        rc = RenormConstants.strong(spec.alpha, n)
        tasks = [(rc, spec.seed, r, times, spec.epsilon) for r in range(spec.replicas)]
        results = _run_tasks(_wick_task, tasks, spec.workers)
        for r, res in enumerate(results):
            for key in keys:
                record_rows.append(
                    [spec.study, n, r, "", key, res[key], rc.alpha, rc.lam,
                     rc.sigma, dt, spec.epsilon, spec.seed]
                )
        row = [n, rc.alpha, rc.lam, rc.sigma]
        for key in keys:
            stats = summarize(np.array([res[key] for res in results]))
            row += [stats["mean"], stats["se"]]
            means[key].append(stats["mean"])
        summary_rows.append(row)
    header = ["n", "alpha", "lambda", "sigma"]
    for key in keys:
        header += [f"{key}_mean", f"{key}_se"]
    write_csv(out / "wick_summary.csv", header, summary_rows)
    write_csv(out / "wick_records.csv", _RECORD_HEADER, record_rows)
    ok = all(_trend_ok(means[k], window=len(spec.n_ladder)) for k in keys)
    code = EXIT_OK if ok else EXIT_TREND
    write_json(out / "study_meta.json", _meta(spec, code))
    return code


_RECORD_HEADER = [
    "study", "n", "replica", "time", "diagnostic", "value",
    "alpha", "lambda", "sigma", "h", "epsilon", "seed",
]


# --------------------------------------------------------------------------
# Strong-noise triviality.


def _strong_task(args) -> dict[str, float]:
    rc, config, seed, replica, data_name = args
    v0v1 = initial_data(data_name, rc.n)
    rec = simulate(config, rc, NoiseStream(seed, "wiener", replica), v_init=v0v1)
    if rec.blowup:
        return {"blowup": 1.0, "blowup_time": rec.blowup_time or math.nan}
    times = rec.times
    t_final = config.t_final
    eps = config.epsilon
    vlin = vlin_trajectory(v0v1, rc, times, t_final)
    z_snap = rec.snapshots["z"]
    v_snap = rec.snapshots["v"]
    neg = times < -1e-12
    # Backward extension of u: the stationary z path plus the closed-form
    # homogeneous tail of v (continuous at t = 0 since v(0) = vlin(0)).
    u = z_snap + np.where(neg[:, None, None], vlin.coeffs, v_snap)
    u_st = spacetime_norm(make_sample(rc.n, t_final, times, u), -eps, -eps)
    on = (times >= -1e-12) & (times <= t_final + 1e-12)
    z_ct = float(np.max(rec.diagnostics["z_h_neg"][on]))
    vlin_st = spacetime_norm(vlin, -eps, 1.0 - eps)
    resid = v_snap[on] - vlin.coeffs[on]
    resid_ct = sup_sobolev(resid, rc.n, 1.0 - eps)
    return {
        "blowup": 0.0,
        "u_spacetime": u_st,
        "z_ct": z_ct,
        "vlin_spacetime": vlin_st,
        "resid_ct": resid_ct,
    }


def run_strong_study(spec: StudySpec) -> int:
    """Vanishing of u_N in the windowed space-time norm along the ladder."""
    out = Path(spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    keys = ("u_spacetime", "z_ct", "vlin_spacetime", "resid_ct")
    record_rows = []
    summary_rows = []
    u_q90 = []
    blowup_excess = False
    for n in spec.n_ladder:
        # h must divide the half-window pad so the record grid stays uniform.
        h = 0.5 / max(1, math.ceil(0.5 / min(0.05, 0.5 / n) - 1e-9))
        rc = RenormConstants.strong(spec.alpha, n)
        config = SimConfig(
            n=n,
            regime="strong",
            t_final=spec.t_final,
            h=h,
            epsilon=spec.epsilon,
            t_pad=spec.t_final / 2.0,
            record_every=1,
            record_fields=("z", "v"),
        )
        tasks = [(rc, config, spec.seed, r, spec.initial_data) for r in range(spec.replicas)]
        results = _run_tasks(_strong_task, tasks, spec.workers)
        good = [res for res in results if not res["blowup"]]
        n_blow = len(results) - len(good)
        if n_blow > BLOWUP_BUDGET * len(results) or not good:
            blowup_excess = True
        for r, res in enumerate(results):
            if res["blowup"]:
                record_rows.append(
                    [spec.study, n, r, "", "blowup_time", res["blowup_time"],
                     rc.alpha, rc.lam, rc.sigma, h, spec.epsilon, spec.seed]
                )
                continue
            for key in keys:
                record_rows.append(
                    [spec.study, n, r, "", key, res[key],
                     rc.alpha, rc.lam, rc.sigma, h, spec.epsilon, spec.seed]
                )
        row = [n, rc.alpha, rc.lam, rc.sigma, h, len(results), n_blow]
        if good:
            u_stats = summarize(np.array([res["u_spacetime"] for res in good]))
            row += [
                u_stats["q90"],
                float(np.median([res["z_ct"] for res in good])),
                good[0]["vlin_spacetime"],
                float(np.median([res["resid_ct"] for res in good])),
            ]
            u_q90.append(u_stats["q90"])
        else:
            row += [math.nan] * 4
        summary_rows.append(row)
    write_csv(
        out / "strong_summary.csv",
        ["n", "alpha", "lambda", "sigma", "h", "replicas", "blowups",
         "u_spacetime_q90", "z_ct_median", "vlin_spacetime", "resid_ct_median"],
        summary_rows,
    )
    write_csv(out / "strong_records.csv", _RECORD_HEADER, record_rows)
    if blowup_excess:
        code = EXIT_BLOWUP
    else:
        code = EXIT_OK if _trend_ok(u_q90) else EXIT_TREND
    write_json(out / "study_meta.json", _meta(spec, code))
    return code


# --------------------------------------------------------------------------
# Weak-noise deterministic limit.


def _reference_parts(w_snap: np.ndarray, n_ref: int, n: int, weights: dict[str, float]):
    """Project reference snapshots to band n; keep squared tails per weight."""
    s0 = n_ref - n
    block = w_snap[:, s0 : s0 + 2 * n + 1, s0 : s0 + 2 * n + 1].copy()
    _, _, nsq_small = mode_grids(n)
    block[:, nsq_small > n * n] = 0.0
    _, _, nsq_ref = mode_grids(n_ref)
    outside = np.ones((2 * n_ref + 1, 2 * n_ref + 1), dtype=bool)
    outside[s0 : s0 + 2 * n + 1, s0 : s0 + 2 * n + 1] = nsq_small > n * n
    tails = {}
    for name, s in weights.items():
        w = (1.0 + nsq_ref.astype(np.float64)) ** s
        tails[name] = np.sum(w[None] * np.abs(w_snap) ** 2 * outside[None], axis=(1, 2))
    return block, tails


def _sup_diff_norm(
    snap: np.ndarray, ref_block: np.ndarray, tail2: np.ndarray, n: int, s: float
) -> float:
    _, _, nsq = mode_grids(n)
    w = (1.0 + nsq.astype(np.float64)) ** s
    per_time = np.sum(w[None] * np.abs(snap - ref_block) ** 2, axis=(1, 2)) + tail2
    return float(np.sqrt(np.max(per_time)))


def _weak_task(args) -> dict[str, float]:
    rc, config, seed, replica, data_name, refs = args
    v0v1 = initial_data(data_name, rc.n)
    rec = simulate(config, rc, NoiseStream(seed, "wiener", replica), v_init=v0v1)
    if rec.blowup:
        return {"blowup": 1.0, "blowup_time": rec.blowup_time or math.nan}
    n = rc.n
    eps = config.epsilon
    u = rec.snapshots["z"] + rec.snapshots["v"]
    out: dict[str, float] = {"blowup": 0.0}
    for label, (block, tails) in refs.items():
        out[f"u_err_{label}"] = _sup_diff_norm(u, block, tails["neg"], n, -eps)
        out[f"v_err_{label}"] = _sup_diff_norm(
            rec.snapshots["v"], block, tails["pos"], n, 1.0 - eps
        )
    return out


def _solve_reference(
    v0v1: PairState, t_final: float, mass: float, damping: float = 1.0
) -> np.ndarray:
    n_ref = v0v1.n_max
    h, m = _step_size(n_ref)
    h, m = h / 2.0, 2 * m
    rec = solve_deterministic_limit(
        0.0, v0v1, t_final, h, record_every=m, damping=damping, mass=mass
    )
    if rec.blowup:
        raise RuntimeError("reference integration blew up; decrease h")
    return rec.snapshots["v"]


def _run_limit_comparison(
    spec: StudySpec,
    regimes: dict[int, RenormConstants],
    ref_masses: dict[str, float],
    ref_damping: float,
) -> tuple[list, list, dict[str, list[float]], bool]:
    """Shared ladder loop for the weak and tuned studies."""
    n_ref = max(spec.n_ladder)
    data_ref = initial_data(spec.initial_data, n_ref)
    weights = {"neg": -spec.epsilon, "pos": 1.0 - spec.epsilon}
    w_snaps = {
        label: _solve_reference(data_ref, spec.t_final, mass, ref_damping)
        for label, mass in ref_masses.items()
    }
    record_rows = []
    summary_rows = []
    curves: dict[str, list[float]] = {f"u_err_{lb}_q90": [] for lb in ref_masses}
    curves.update({f"u_err_{lb}_median": [] for lb in ref_masses})
    blowup_excess = False
    for n in spec.n_ladder:
        rc = regimes[n]
        h, m = _step_size(n)
        config = SimConfig(
            n=n,
            regime="weak" if rc.regime == "weak" else "tuned_damping",
            t_final=spec.t_final,
            h=h,
            epsilon=spec.epsilon,
            record_every=m,
            record_fields=("z", "v"),
        )
        refs = {
            label: _reference_parts(w_snaps[label], n_ref, n, weights)
            for label in ref_masses
        }
        tasks = [
            (rc, config, spec.seed, r, spec.initial_data, refs)
            for r in range(spec.replicas)
        ]
        results = _run_tasks(_weak_task, tasks, spec.workers)
        good = [res for res in results if not res["blowup"]]
        n_blow = len(results) - len(good)
        if n_blow > BLOWUP_BUDGET * len(results) or not good:
            blowup_excess = True
        for r, res in enumerate(results):
            items = (
                [("blowup_time", res["blowup_time"])]
                if res["blowup"]
                else [(k, v) for k, v in res.items() if k != "blowup"]
            )
            for key, value in items:
                record_rows.append(
                    [spec.study, n, r, "", key, value,
                     rc.alpha, rc.lam, rc.sigma, h, spec.epsilon, spec.seed]
                )
        row = [n, rc.alpha, rc.lam, rc.sigma, rc.damping, h, len(results), n_blow]
        for label in ref_masses:
            if good:
                u_stats = summarize(np.array([res[f"u_err_{label}"] for res in good]))
                v_stats = summarize(np.array([res[f"v_err_{label}"] for res in good]))
                row += [u_stats["q90"], u_stats["median"], v_stats["q90"]]
                curves[f"u_err_{label}_q90"].append(u_stats["q90"])
                curves[f"u_err_{label}_median"].append(u_stats["median"])
            else:
                row += [math.nan] * 3
        summary_rows.append(row)
    return record_rows, summary_rows, curves, blowup_excess


def run_weak_study(spec: StudySpec) -> int:
    """Convergence of u_N to the limit flow under vanishing noise."""
    out = Path(spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    kappa = spec.kappa
    regimes = {
        n: RenormConstants.weak(kappa / math.sqrt(math.log(n)), n) for n in spec.n_ladder
    }
    masses = {"limit": limit_mass(kappa)}
    records, summary, curves, blowup_excess = _run_limit_comparison(
        spec, regimes, masses, ref_damping=1.0
    )
    header = ["n", "alpha", "lambda", "sigma", "damping", "h", "replicas", "blowups",
              "u_err_limit_q90", "u_err_limit_median", "v_err_limit_q90"]
    write_csv(out / "weak_summary.csv", header, summary)
    write_csv(out / "weak_records.csv", _RECORD_HEADER, records)

    # Mass discrimination at the top of the ladder: the error to the limit
    # flow with the emergent mass must beat the error to the massless flow.
    kd = 2.0
    nd = max(spec.n_ladder)
    d_spec = StudySpec(
        study="weak_limit",
        output_dir=spec.output_dir,
        n_ladder=(nd,),
        kappa=kd,
        t_final=spec.t_final,
        epsilon=spec.epsilon,
        mc_replicas=spec.replicas,
        initial_data=spec.initial_data,
        seed=spec.seed + 1,
        workers=spec.workers,
    )
    d_regimes = {nd: RenormConstants.weak(kd / math.sqrt(math.log(nd)), nd)}
    d_masses = {"limit": limit_mass(kd), "zero": 0.0}
    _, _, d_curves, d_blow = _run_limit_comparison(d_spec, d_regimes, d_masses, 1.0)
    err_limit = d_curves["u_err_limit_median"][0]
    err_zero = d_curves["u_err_zero_median"][0]
    write_csv(
        out / "weak_mass.csv",
        ["label", "kappa", "n", "u_err_median"],
        [["mass_limit", kd, nd, err_limit], ["mass_zero", kd, nd, err_zero]],
    )
    if blowup_excess or d_blow:
        code = EXIT_BLOWUP
    elif _trend_ok(curves["u_err_limit_q90"]) and err_limit < err_zero:
        code = EXIT_OK
    else:
        code = EXIT_TREND
    write_json(out / "study_meta.json", _meta(spec, code, {
        "mass_check": {"err_limit": err_limit, "err_zero": err_zero},
    }))
    return code


def run_tuned_damping_study(spec: StudySpec) -> int:
    """Vanishing-friction variant: friction 1/log N with rescaled noise."""
    out = Path(spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    gamma = spec.gamma
    if spec.tuned_branch == "infinite":
        # Effective noise diverges: expect triviality of the total norm.
        rows = []
        totals = []
        record_rows = []
        for n in spec.n_ladder:
            damping = 1.0 / math.log(n)
            rc = RenormConstants.tuned(spec.alpha, damping, n)
            h, m = _step_size(n)
            config = SimConfig(
                n=n, regime="tuned_damping", t_final=spec.t_final, h=h,
                epsilon=spec.epsilon, record_every=m,
            )
            vals = []
            for r in range(spec.replicas):
                rec = simulate(config, rc, NoiseStream(spec.seed, "wiener", r),
                               v_init=initial_data(spec.initial_data, n))
                if rec.blowup:
                    continue
                vals.append(float(np.nanmax(rec.diagnostics["u_h_neg"])))
            stats = summarize(np.array(vals))
            rows.append([n, rc.alpha, rc.damping, rc.sigma, stats["q90"], stats["median"]])
            totals.append(stats["q90"])
            for r, v in enumerate(vals):
                record_rows.append([spec.study, n, r, "", "u_ct_hneg", v,
                                    rc.alpha, rc.lam, rc.sigma, h, spec.epsilon, spec.seed])
        write_csv(out / "tuned_summary.csv",
                  ["n", "alpha", "damping", "sigma", "u_ct_q90", "u_ct_median"], rows)
        write_csv(out / "tuned_records.csv", _RECORD_HEADER, record_rows)
        code = EXIT_OK if _trend_ok(totals) else EXIT_TREND
        write_json(out / "study_meta.json", _meta(spec, code))
        return code

    regimes = {}
    for n in spec.n_ladder:
        damping = 1.0 / math.log(n)
        alpha = math.sqrt(2.0) * gamma / math.log(n)
        regimes[n] = RenormConstants.tuned(alpha, damping, n)
    # Emergent mass 3 * lim sigma = (3/2pi) gamma^2; the alternative value
    # (3/4pi) gamma^2 is tracked for comparison.
    masses = {
        "limit": 3.0 * gamma * gamma / (2.0 * math.pi),
        "alt": 3.0 * gamma * gamma / (4.0 * math.pi),
    }
    records, summary, curves, blowup_excess = _run_limit_comparison(
        spec, regimes, masses, ref_damping=0.0
    )
    header = ["n", "alpha", "lambda", "sigma", "damping", "h", "replicas", "blowups"]
    for label in masses:
        header += [f"u_err_{label}_q90", f"u_err_{label}_median", f"v_err_{label}_q90"]
    write_csv(out / "tuned_summary.csv", header, summary)
    write_csv(out / "tuned_records.csv", _RECORD_HEADER, records)
    if blowup_excess:
        code = EXIT_BLOWUP
    else:
        code = EXIT_OK if _trend_ok(curves["u_err_limit_q90"]) else EXIT_TREND
    write_json(out / "study_meta.json", _meta(spec, code))
    return code


RUNNERS = {
    "lambda_asymptotics": run_lambda_study,
    "wick_decay": run_wick_study,
    "strong_triviality": run_strong_study,
    "weak_limit": run_weak_study,
    "tuned_damping": run_tuned_damping_study,
}


# --------------------------------------------------------------------------
# Plot data emission.

MANIFEST_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "Figure manifest",
    "type": "object",
    "required": ["version", "figures"],
    "properties": {
        "version": {"type": "integer"},
        "figures": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "csv", "x", "y", "xscale", "yscale"],
                "properties": {
                    "id": {"type": "string"},
                    "csv": {"type": "string"},
                    "x": {"type": "string"},
                    "y": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                    "xscale": {"enum": ["linear", "log"]},
                    "yscale": {"enum": ["linear", "log"]},
                    "monotonic": {"enum": ["increasing", "decreasing", "none"]},
                    "reference": {
                        "type": "object",
                        "required": ["kind"],
                        "properties": {
                            "kind": {"type": "string"},
                            "column": {"type": "string"},
                            "label": {"type": "string"},
                        },
                    },
                },
            },
        },
    },
}


def _read_csv(path: Path) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def emit_plotdata(in_dir: str, out_dir: str) -> int:
    """Transform study outputs into tidy per-figure CSVs plus a manifest."""
    src = Path(in_dir)
    dst = Path(out_dir)
    dst.mkdir(parents=True, exist_ok=True)
    figures = []

    path = src / "lambda_study.csv"
    if path.exists():
        rows = _read_csv(path)
        out_rows = [
            [r["n"], math.log(int(r["n"])), float(r["lambda"]),
             float(r["reference"]), float(r["lambda"]) / float(r["reference"])]
            for r in rows
        ]
        write_csv(dst / "lambda_vs_logN.csv",
                  ["n", "log_n", "lambda", "reference", "ratio"], out_rows)
        figures.append({
            "id": "lambda_vs_logN",
            "csv": "lambda_vs_logN.csv",
            "x": "log_n",
            "y": ["lambda", "reference"],
            "xscale": "linear",
            "yscale": "linear",
            "monotonic": "increasing",
            "reference": {"kind": "line", "column": "reference",
                          "label": "(3/4pi) alpha^2 log N"},
        })

    path = src / "wick_summary.csv"
    if path.exists():
        rows = _read_csv(path)
        eps = 0.25
        meta = src / "study_meta.json"
        if meta.exists():
            eps = json.loads(meta.read_text()).get("epsilon", eps)
        base = None
        out_rows = []
        for r in rows:
            lam = float(r["lambda"])
            w1 = float(r["wick1_l2t_winf_mean"])
            if base is None:
                base = (w1, lam)
            guide = base[0] * (lam / base[1]) ** (-eps / 4.0)
            out_rows.append([
                r["n"], lam,
                w1, float(r["wick1_l2t_winf_se"]),
                float(r["wick2_l2t_winf_mean"]), float(r["wick2_l2t_winf_se"]),
                float(r["wick3_l2t_winf_mean"]), float(r["wick3_l2t_winf_se"]),
                float(r["z_ct_hneg_mean"]), guide,
            ])
        write_csv(dst / "wick_decay.csv",
                  ["n", "lambda", "wick1_mean", "wick1_se", "wick2_mean", "wick2_se",
                   "wick3_mean", "wick3_se", "z_ct_mean", "guide"], out_rows)
        figures.append({
            "id": "wick_decay",
            "csv": "wick_decay.csv",
            "x": "n",
            "y": ["wick1_mean", "wick2_mean", "wick3_mean"],
            "xscale": "log",
            "yscale": "log",
            "monotonic": "decreasing",
            "reference": {"kind": "guide", "column": "guide",
                          "label": "lambda^(-eps/4)"},
        })

    path = src / "strong_summary.csv"
    if path.exists():
        rows = _read_csv(path)
        out_rows = [
            [r["n"], float(r["u_spacetime_q90"]), float(r["z_ct_median"]),
             float(r["vlin_spacetime"]), float(r["resid_ct_median"])]
            for r in rows
        ]
        write_csv(dst / "strong_split.csv",
                  ["n", "total", "z_part", "vlin_part", "resid_part"], out_rows)
        figures.append({
            "id": "strong_split",
            "csv": "strong_split.csv",
            "x": "n",
            "y": ["total", "z_part", "vlin_part", "resid_part"],
            "xscale": "log",
            "yscale": "log",
            "monotonic": "decreasing",
        })

    path = src / "weak_summary.csv"
    if path.exists():
        rows = _read_csv(path)
        out_rows = [
            [r["n"], float(r["u_err_limit_q90"]), float(r["u_err_limit_median"]),
             float(r["v_err_limit_q90"])]
            for r in rows
        ]
        write_csv(dst / "weak_error.csv",
                  ["n", "u_err_q90", "u_err_median", "v_err_q90"], out_rows)
        figures.append({
            "id": "weak_error",
            "csv": "weak_error.csv",
            "x": "n",
            "y": ["u_err_q90", "u_err_median"],
            "xscale": "log",
            "yscale": "log",
            "monotonic": "decreasing",
        })

    path = src / "weak_mass.csv"
    if path.exists():
        rows = _read_csv(path)
        write_csv(dst / "weak_mass.csv",
                  ["label", "kappa", "n", "u_err_median"],
                  [[r["label"], float(r["kappa"]), r["n"], float(r["u_err_median"])]
                   for r in rows])
        figures.append({
            "id": "weak_mass_discrimination",
            "csv": "weak_mass.csv",
            "x": "label",
            "y": ["u_err_median"],
            "xscale": "linear",
            "yscale": "linear",
            "monotonic": "none",
        })

    manifest = {"version": 1, "figures": figures}
    write_json(dst / "manifest.json", manifest)
    write_json(dst / "plot_manifest.schema.json", MANIFEST_SCHEMA)
    return EXIT_OK
