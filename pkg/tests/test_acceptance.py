"""End-to-end acceptance suite: one test per headline property.

Each test is a single pass/fail check of one quantitative or trend-based
claim, using the same entry points a study run would use.  Monte-Carlo checks
use fixed streams, so every run of this suite sees identical numbers.
"""

import math
import time
from pathlib import Path

import numpy as np
import pytest
from scipy.fft import next_fast_len
from scipy.stats import linregress

from sdnlw.diagnostics import vlin_trajectory, spacetime_norm
from sdnlw.integrator import (
    SimConfig,
    general_power_nonlinearity,
    nonlinearity_strong,
    simulate,
    solve_deterministic_limit,
    wick_powers,
)
from sdnlw.linear import (
    stationary_covariance,
    symbols_for,
    transition_covariance,
    zN_step,
)
from sdnlw.renorm import (
    RenormConstants,
    asymptotic_reference,
    hermite,
    mode_sum,
    solve_lambda,
)
from sdnlw.sampling import NoiseStream, initial_pair_state
from sdnlw.spectral import (
    PairState,
    PhysicalGrid,
    ball_mask,
    pointwise_values,
    random_real_field,
    to_spectral,
)
from sdnlw.studies import (
    EXIT_OK,
    StudySpec,
    initial_data,
    run_strong_study,
    run_weak_study,
    run_wick_study,
)

_EIGHT_PI_SQ = 8.0 * math.pi**2


def test_mass_constant_solver_anchor():
    # Residual at solver precision on every rung, ratio to the logarithmic
    # reference monotonically approaching 1 and within [0.8, 1.2] at the top.
    t0 = time.time()
    ladder = (4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096)
    ratios = []
    for n in ladder:
        lam = solve_lambda(1.0, n)
        resid = lam - 3.0 / _EIGHT_PI_SQ * mode_sum(lam, n)
        assert abs(resid) <= 1e-12 * max(1.0, lam)
        ratios.append(lam / asymptotic_reference(1.0, n))
    assert all(b < a for a, b in zip(ratios, ratios[1:]))
    assert 0.8 <= ratios[-1] <= 1.2
    assert time.time() - t0 < 5.0


def test_cubic_recombination_identity_on_fields():
    # The Hermite-form cubic forcing plus its mass counterterm reassembles the
    # plain cubic exactly: for any sigma, the band projection of (v + z)^3
    # equals v^3 + 3 v^2 z + 3 v :z^2: + :z^3: + 3 sigma (v + z).
    rng = np.random.default_rng(2024)
    count = 0
    worst = 0.0
    for n in (2, 4, 8):
        for _ in range(34):
            v = random_real_field(n, rng, scale=0.5)
            z = random_real_field(n, rng, scale=0.5)
            sigma = float(rng.uniform(0.0, 2.0))
            z2, z3 = wick_powers(z, sigma)
            wick_form = nonlinearity_strong(v, z, z2, z3).coeffs + 3.0 * sigma * (
                v.coeffs + z.coeffs
            )
            m = next_fast_len(6 * n + 2)
            u_vals = pointwise_values(v, m) + pointwise_values(z, m)
            plain = to_spectral(PhysicalGrid(m, u_vals**3), n).coeffs
            worst = max(worst, float(np.max(np.abs(wick_form - plain))))
            # The general odd-power path agrees with the dedicated cubic path.
            alt = general_power_nonlinearity(v, z, sigma, 1).coeffs
            worst = max(worst, float(np.max(np.abs(alt - plain))))
            count += 1
    assert count >= 100
    assert worst <= 1e-10


def test_exact_transition_preserves_invariant_measure():
    # 10^4 replicas, three transition steps: every per-mode variance stays
    # within 3 SE of the invariant covariance, and the pointwise variance of
    # the field stays within 3 SE of sigma at all three times.
    rc = RenormConstants.strong(1.0, 4)
    syms = symbols_for(rc.lam, 4)
    op = transition_covariance(syms, rc.alpha, 0.2)
    reps = 10_000
    side = 9
    acc_p = [np.zeros((side, side)) for _ in range(3)]
    acc_v = [np.zeros((side, side)) for _ in range(3)]
    acc_pt = [0.0, 0.0, 0.0]
    for r in range(reps):
        st = initial_pair_state(rc, seed=42, replica=r)
        wiener = NoiseStream(42, "wiener", r)
        for j in range(3):
            st = zN_step(st, op, wiener, j)
            acc_p[j] += np.abs(st.pos.coeffs) ** 2
            acc_v[j] += np.abs(st.vel.coeffs) ** 2
            acc_pt[j] += pointwise_values(st.pos, 4)[0, 0] ** 2
    sp, sv = stationary_covariance(syms, rc.alpha)
    mask = ball_mask(4)
    for j in range(3):
        for acc, target in ((acc_p[j], sp), (acc_v[j], sv)):
            mean = acc / reps
            # |z(n)|^2 of a standard complex Gaussian has SD = mean; the real
            # zero mode has SD = sqrt(2) * mean.
            z = np.abs(mean - target) / (target / math.sqrt(reps))
            z[4, 4] /= math.sqrt(2.0)
            assert np.max(z[mask]) <= 3.0
        pt = acc_pt[j] / reps
        z_pt = abs(pt - rc.sigma) / (rc.sigma * math.sqrt(2.0 / reps))
        assert z_pt <= 3.0


def test_renormalized_power_pairing_orthogonality():
    # E[H_k(f) H_m(g)] = delta_km k! E[fg]^k for jointly Gaussian (f, g),
    # verified within 3 SE at 2 * 10^4 replicas for k, m in {1, 2, 3}.
    rng = np.random.Generator(np.random.Philox(key=(0, 0)))
    reps = 20_000
    sf, sg, c = 1.3, 0.8, 0.45
    l = np.linalg.cholesky(np.array([[sf, c], [c, sg]]))
    x = rng.standard_normal((2, reps))
    f = l[0, 0] * x[0]
    g = l[1, 0] * x[0] + l[1, 1] * x[1]
    for k in range(1, 4):
        for m in range(1, 4):
            prod = hermite(k, f, sf) * hermite(m, g, sg)
            target = math.factorial(k) * c**k if k == m else 0.0
            se = prod.std(ddof=1) / math.sqrt(reps)
            assert abs(prod.mean() - target) <= 3.0 * se


def test_renormalized_power_norms_decay_along_ladder(tmp_path):
    # Path norms of :z:, :z^2:, :z^3: strictly decreasing in N over the whole
    # ladder, with the measured log-log slope within a factor 2 of the
    # lambda^{-eps/4} guide.
    spec = StudySpec(study="wick_decay", output_dir=str(tmp_path), seed=0)
    code = run_wick_study(spec)
    rows = (Path(tmp_path) / "wick_summary.csv").read_text().splitlines()
    header = rows[0].split(",")
    data = [dict(zip(header, r.split(","))) for r in rows[1:]]
    lams = np.array([float(r["lambda"]) for r in data])
    guide_slope = -spec.epsilon / 4.0
    for key in ("wick1_l2t_winf_mean", "wick2_l2t_winf_mean", "wick3_l2t_winf_mean"):
        means = np.array([float(r[key]) for r in data])
        slope = linregress(np.log(lams), np.log(means)).slope
        assert 2.0 * guide_slope <= slope <= 0.5 * guide_slope, (
            f"{key}: slope {slope:.3f} outside factor 2 of guide {guide_slope:.3f}"
        )
    assert code == EXIT_OK


def test_linear_solution_spacetime_norm_decay():
    # Deterministic: the homogeneous evolution of fixed H^1 data, measured in
    # the windowed space-time norm with the strong-regime mass, strictly
    # decreases along the ladder.
    dt = 0.05
    times = np.arange(-10, 31) * dt
    vals = []
    for n in (8, 16, 32, 64, 128):
        rc = RenormConstants.strong(1.0, n)
        v0 = initial_data("single_mode", n)
        sample = vlin_trajectory(v0, rc, times, 1.0)
        vals.append(spacetime_norm(sample, -0.25, 0.75))
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_strong_noise_solutions_vanish(tmp_path):
    # 64 replicas per rung: the 90th percentile of the total space-time norm
    # strictly decreases over the last three rungs and at most 10% of the
    # replicas blow up.
    spec = StudySpec(study="strong_triviality", output_dir=str(tmp_path), seed=0)
    assert run_strong_study(spec) == EXIT_OK


def test_weak_noise_limit_and_mass_discrimination(tmp_path):
    # Vanishing noise: the distance to the deterministic limit flow strictly
    # decreases along the ladder, and at the top rung the limit flow with the
    # emergent mass beats the massless flow in median error.
    spec = StudySpec(study="weak_limit", output_dir=str(tmp_path), seed=0)
    assert run_weak_study(spec) == EXIT_OK


def test_integrator_order_and_energy_dissipation():
    rng = np.random.default_rng(7)
    n = 8
    v0 = PairState(random_real_field(n, rng, 0.4), random_real_field(n, rng, 0.2))

    def endpoint(h):
        return solve_deterministic_limit(1.0, v0, 0.5, h).snapshots["v"][-1]

    u1, u2, u4 = endpoint(0.02), endpoint(0.01), endpoint(0.005)
    order = math.log2(np.max(np.abs(u1 - u2)) / np.max(np.abs(u2 - u4)))
    assert abs(order - 2.0) <= 0.3
    # Unforced flow: the energy decreases monotonically up to O(h^2) error.
    h = 0.01
    rec = solve_deterministic_limit(0.0, v0, 1.0, h)
    en = rec.diagnostics["energy"]
    assert np.all(np.diff(en) <= 10.0 * h * h * max(1.0, en[0]))
    assert en[-1] < en[0]


def test_study_rerun_is_byte_identical(tmp_path):
    kwargs = dict(
        study="strong_triviality", n_ladder=(4, 8), mc_replicas=3, t_final=0.5, seed=3
    )
    out1 = tmp_path / "r1"
    out2 = tmp_path / "r2"
    run_strong_study(StudySpec(output_dir=str(out1), **kwargs))
    run_strong_study(StudySpec(output_dir=str(out2), **kwargs))
    names = [p.name for p in out1.iterdir() if p.suffix == ".csv"]
    assert names
    for name in names:
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    w_kwargs = dict(study="wick_decay", n_ladder=(2, 4), mc_replicas=3, t_final=0.3, seed=5)
    out3 = tmp_path / "r3"
    out4 = tmp_path / "r4"
    run_wick_study(StudySpec(output_dir=str(out3), **w_kwargs))
    run_wick_study(StudySpec(output_dir=str(out4), **w_kwargs))
    for name in ("wick_summary.csv", "wick_records.csv"):
        assert (out3 / name).read_bytes() == (out4 / name).read_bytes()
