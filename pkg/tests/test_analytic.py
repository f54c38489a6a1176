import math

import numpy as np
import pytest
from scipy.integrate import quad

from leoshare.analytic import (
    coverage_probability,
    conditional_coverage,
    density_ratio_threshold,
    ergodic_se,
    laplace_derivative,
    laplace_interference,
    mean_interference,
    mean_serving_tier_interference,
    nearest_distance_cdf,
    nearest_distance_pdf,
    nonempty_probability,
    se_lower_bound,
    serving_gain_power,
)
from leoshare.antenna import GainProfile, db_to_linear, effective_gain
from leoshare.config import QuadratureConfig, Sharing
from leoshare.fading import ShadowedRicianParams, sample_sr_power, sr_power_log_mean
from leoshare.geometry import (
    bs_gain_boundary_distance,
    cos_cap_edge,
    downlink_cap,
    ring_density,
    sample_cap_distances,
    uplink_cap,
)
from leoshare.montecarlo import estimate

TIGHT = QuadratureConfig(rel_tol_outer=1e-8, rel_tol_radial=1e-10)


# --- nonempty probability and nearest distance -----------------------------------


def test_nonempty_probability_limits(handheld):
    cap = uplink_cap(handheld.geometry, "sat_user")
    assert nonempty_probability(0.0, cap) == 0.0
    assert nonempty_probability(1.0, cap) == 1.0  # enormous density saturates


def test_nonempty_probability_matches_sampler_frequency(handheld, rng):
    geom = handheld.geometry
    cap = uplink_cap(geom, "sat_user")
    lam = 0.9 / cap.area  # mean below one node, so the probability is informative
    lam_ring = ring_density(lam, geom.sat_user_radius, geom.sat_radius)
    n = 20000
    hits = sum(
        sample_cap_distances(geom.sat_radius, geom.sat_user_radius, cap, lam, rng).size > 0
        for _ in range(n)
    )
    p_hat = hits / n
    p = nonempty_probability(lam_ring, cap)
    se = math.sqrt(p * (1 - p) / n)
    assert abs(p_hat - p) < 3.0 * se


def test_nearest_distance_pdf_normalizes(vsat):
    geom = vsat.geometry
    cap = uplink_cap(geom, "sat_user")
    lam_ring = ring_density(vsat.sat_user_density, geom.sat_user_radius, geom.sat_radius)
    total, _ = quad(lambda r: nearest_distance_pdf(lam_ring, cap, r), cap.r_min, cap.r_max,
                    limit=200)
    assert total == pytest.approx(1.0, abs=1e-8)


def test_nearest_distance_pdf_concentrates_at_high_density(handheld):
    cap = uplink_cap(handheld.geometry, "sat_user")
    lam_ring = 1e-6  # astronomically dense
    mass, _ = quad(lambda r: nearest_distance_pdf(lam_ring, cap, r),
                   cap.r_min, cap.r_min + 1e3, limit=100)
    assert mass > 0.999


def test_nearest_distance_pdf_domain_error(handheld):
    cap = uplink_cap(handheld.geometry, "sat_user")
    with pytest.raises(ValueError, match="outside cap bounds"):
        nearest_distance_pdf(1e-11, cap, cap.r_max * 1.5)


def test_nearest_distance_cdf_consistent_with_pdf(handheld):
    geom = handheld.geometry
    cap = uplink_cap(geom, "sat_user")
    lam_ring = ring_density(handheld.sat_user_density, geom.sat_user_radius, geom.sat_radius)
    for r in (cap.r_min + 1e4, 7e5, cap.r_max):
        mass, _ = quad(lambda x: nearest_distance_pdf(lam_ring, cap, x), cap.r_min, r, limit=200)
        assert nearest_distance_cdf(lam_ring, cap, r) == pytest.approx(mass, abs=1e-9)


# --- Laplace transform --------------------------------------------------------------


def test_laplace_is_one_at_zero_argument(handheld):
    cfg = handheld.scenario(Sharing.UL_SAT_DL_TERR, 100.0)
    r = cfg.serving_cap().r_min * 1.1
    assert laplace_interference(cfg, r, 0.0) == 1.0
    quiet = handheld.with_overrides(noise_power=0.0).scenario(Sharing.UL_SAT_DL_TERR, 100.0)
    assert laplace_interference(quiet, r, 0.0) == 1.0


def test_laplace_is_one_without_interference_or_noise(handheld):
    params = handheld.with_overrides(
        noise_power=0.0, sat_user_density=0.0, bs_density_ul=0.0
    )
    cfg = params.scenario(Sharing.UL_SAT_DL_TERR, 0.0)
    r = cfg.serving_cap().r_min * 1.2
    for s in (0.0, 1e8, 1e12, 1e16):
        assert laplace_interference(cfg, r, s) == 1.0


def test_laplace_monotone_decreasing_in_s(handheld):
    cfg = handheld.with_overrides(noise_power=0.0).scenario(Sharing.UL_SAT_UL_TERR, 100.0)
    r = cfg.serving_cap().r_min * 1.05
    s_grid = np.logspace(4, 10, 15)  # beyond this the transform underflows double precision
    vals = [laplace_interference(cfg, r, s) for s in s_grid]
    assert all(0.0 < v <= 1.0 for v in vals)
    assert all(b < a for a, b in zip(vals, vals[1:]))


def _mc_laplace_oracle(cfg, r, s, n_trials, rng):
    """Vectorized E[exp(-s I)] over PPP realizations, conditioned on serving
    distance r (the in-tier population is restricted to distances >= r)."""
    geom, gains = cfg.geometry, cfg.gains
    totals = np.full(n_trials, cfg.noise_power)

    def add_tier(shell_radius, cap, density, gain_for, sr=True, keep_beyond=None):
        counts = rng.poisson(density * cap.area, n_trials)
        total_pts = int(counts.sum())
        if total_pts == 0:
            return
        ce = cos_cap_edge(geom.sat_radius, shell_radius, cap.r_max)
        u = rng.uniform(ce, 1.0, total_pts)
        d = np.sqrt(geom.sat_radius**2 + shell_radius**2
                    - 2.0 * geom.sat_radius * shell_radius * u)
        h = sample_sr_power(cfg.sat_fading, rng, total_pts)
        contrib = gain_for(d) * h * d**-cfg.sat_path_loss_exp
        if keep_beyond is not None:
            contrib = np.where(d >= keep_beyond, contrib, 0.0)
        idx = np.repeat(np.arange(n_trials), counts)
        np.add.at(totals, idx, contrib)

    serve_cap = cfg.serving_cap()
    g_us = effective_gain(gains, ("sat_user", "sat")) * cfg.sat_user_power
    add_tier(geom.sat_user_radius, serve_cap, cfg.sat_user_density,
             lambda d: g_us, keep_beyond=r)
    bs_cap = uplink_cap(geom, "bs")
    boundary = bs_gain_boundary_distance(geom)
    g_low = effective_gain(gains, ("bs", "sat"), bs_level="low") * cfg.bs_power
    g_high = effective_gain(gains, ("bs", "sat"), bs_level="high") * cfg.bs_power
    add_tier(geom.bs_radius, bs_cap, cfg.bs_density,
             lambda d: np.where(d < boundary, g_low, g_high))
    return np.exp(-s * totals)


def test_laplace_matches_mc_oracle(handheld, rng):
    cfg = handheld.scenario(Sharing.UL_SAT_DL_TERR, 100.0)
    cap = cfg.serving_cap()
    r = cap.r_min
    s = 1.0 / (serving_gain_power(cfg) * r**-cfg.sat_path_loss_exp)
    samples = _mc_laplace_oracle(cfg, r, s, 100_000, rng)
    se = samples.std(ddof=1) / math.sqrt(samples.size)
    assert abs(samples.mean() - laplace_interference(cfg, r, s)) < 3.0 * se


# --- Laplace derivatives ---------------------------------------------------------------


def test_laplace_derivative_order_zero_equals_transform(handheld):
    cfg = handheld.scenario(Sharing.UL_SAT_UL_TERR, 10.0)
    r = cfg.serving_cap().r_min * 1.3
    s = 1e10
    assert laplace_derivative(cfg, r, s, 0) == laplace_interference(cfg, r, s)


def test_laplace_derivative_rejects_out_of_range_order(handheld):
    cfg = handheld.scenario(Sharing.UL_SAT_UL_TERR, 10.0)
    with pytest.raises(ValueError, match="derivative order"):
        laplace_derivative(cfg, cfg.serving_cap().r_min * 1.1, 1e9, 1)


def _m2_params(base):
    return base.with_overrides(sat_fading=ShadowedRicianParams(m=2, b=0.063, omega=8.97e-4))


def test_laplace_derivative_matches_finite_difference(handheld):
    params = _m2_params(handheld)
    cfg = params.scenario(Sharing.UL_SAT_UL_TERR, 100.0)
    cap = cfg.serving_cap()
    tight = QuadratureConfig(rel_tol_outer=1e-8, rel_tol_radial=1e-12, abs_tol=1e-30)
    for r_frac, s in [(1.02, 3e9), (1.4, 1e11)]:
        r = cap.r_min * r_frac
        h = s * 1e-5
        fd = (
            laplace_interference(cfg, r, s + h, tight)
            - laplace_interference(cfg, r, s - h, tight)
        ) / (2.0 * h)
        exact = laplace_derivative(cfg, r, s, 1, tight)
        assert exact == pytest.approx(fd, rel=1e-4)
        assert exact < 0  # (-1)^1 * L' >= 0


# --- coverage ---------------------------------------------------------------------------


def test_coverage_limits(handheld):
    cfg = handheld.scenario(Sharing.UL_SAT_UL_TERR, 100.0)
    cap = cfg.serving_cap()
    p_ne = nonempty_probability(cfg.serving_ring_density, cap)
    assert coverage_probability(cfg, 0.0) == pytest.approx(p_ne, rel=1e-12)
    assert coverage_probability(cfg, 1e-9) == pytest.approx(p_ne, rel=1e-4)
    assert coverage_probability(cfg, 1e12) == pytest.approx(0.0, abs=1e-9)


def test_coverage_monotone_in_threshold_and_density(handheld):
    gammas = np.logspace(-3, 2, 8)
    cfg = handheld.scenario(Sharing.UL_SAT_UL_TERR, 100.0)
    cov = [coverage_probability(cfg, g) for g in gammas]
    assert all(b <= a + 1e-12 for a, b in zip(cov, cov[1:]))
    denser = handheld.scenario(Sharing.UL_SAT_UL_TERR, 200.0)
    cov_dense = [coverage_probability(denser, g) for g in gammas]
    assert all(d <= c + 1e-12 for c, d in zip(cov, cov_dense))
    more_bs = handheld.with_overrides(bs_density_ul=2e-11).scenario(Sharing.UL_SAT_DL_TERR, 1.0)
    base_bs = handheld.scenario(Sharing.UL_SAT_DL_TERR, 1.0)
    for g in (0.1, 1.0, 10.0):
        assert coverage_probability(more_bs, g) <= coverage_probability(base_bs, g) + 1e-12


def test_coverage_matches_mc(handheld):
    cfg = handheld.scenario(Sharing.UL_SAT_UL_TERR, 100.0)
    est = estimate(cfg, 10_000, master_seed=11, gamma_grid=(1.0,))
    assert coverage_probability(cfg, 1.0) == pytest.approx(est.coverage[0].value, abs=0.01)


def test_conditional_coverage_one_at_zero_threshold(handheld):
    cfg = handheld.scenario(Sharing.DL_SAT_DL_TERR, 10.0)
    assert conditional_coverage(cfg, 0.0, cfg.serving_cap().r_min * 1.5) == 1.0


# --- ergodic spectral efficiency ---------------------------------------------------------


def test_ergodic_se_zero_when_no_serving_nodes(handheld):
    cfg = handheld.with_overrides(sat_user_density=0.0).scenario(Sharing.UL_SAT_UL_TERR, 10.0)
    assert ergodic_se(cfg) == 0.0


def test_ergodic_se_transforms_agree(handheld):
    cfg = handheld.scenario(Sharing.DL_SAT_UL_TERR, 30.0)
    rational = ergodic_se(cfg, QuadratureConfig(gamma_transform="rational"))
    logt = ergodic_se(cfg, QuadratureConfig(gamma_transform="log"))
    assert rational == pytest.approx(logt, rel=1e-4)


def test_ergodic_se_matches_mc_quickly(handheld):
    cfg = handheld.scenario(Sharing.UL_SAT_UL_TERR, 100.0)
    est = estimate(cfg, 4000, master_seed=5)
    dev = abs(ergodic_se(cfg) - est.ergodic_se.value)
    assert dev < max(3.0 * est.ergodic_se.stderr, 0.05 * est.ergodic_se.value)


def _rayleigh_reference_se(cfg):
    """Independent pipeline for unit-shadowing, zero-LOS fading.

    Written from the exponential-power CCDF directly: coverage given r is
    exp(-s0 sigma^2) times per-tier factors exp(-2 pi lam J), with J the
    radial integral of s0 G P w^-a / (rate + s0 G P w^-a) * w, all by direct
    numerical quadrature (no shared code with the closed-form engine).
    """
    geom, gains = cfg.geometry, cfg.gains
    rate = 1.0 / (2.0 * cfg.sat_fading.b)  # omega = 0
    cap = cfg.serving_cap()
    lam_serve = cfg.serving_ring_density
    g1p = serving_gain_power(cfg)

    cap_ut = uplink_cap(geom, "terr_user")
    lam_ut = ring_density(cfg.terr_user_density, geom.terr_user_radius, geom.sat_radius)
    gp_ut = effective_gain(gains, ("terr_user", "sat")) * cfg.terr_user_power
    gp_us = effective_gain(gains, ("sat_user", "sat")) * cfg.sat_user_power

    def tier_integral(s0, gp, lo, hi):
        val, _ = quad(
            lambda w: (s0 * gp * w**-2 / (rate + s0 * gp * w**-2)) * w,
            lo, hi, epsrel=1e-10, limit=300,
        )
        return val

    def cond_cov(gamma, r):
        s0 = rate * gamma * r**2 / g1p
        expo = -s0 * cfg.noise_power
        expo -= 2 * math.pi * lam_serve * tier_integral(s0, gp_us, r, cap.r_max)
        expo -= 2 * math.pi * lam_ut * tier_integral(s0, gp_ut, cap_ut.r_min, cap_ut.r_max)
        return math.exp(expo)

    denom = -math.expm1(-lam_serve * math.pi * (cap.r_max**2 - cap.r_min**2))

    def pdf(r):
        return (2 * math.pi * lam_serve * r
                * math.exp(-lam_serve * math.pi * (r**2 - cap.r_min**2)) / denom)

    def cov(gamma):
        val, _ = quad(lambda r: cond_cov(gamma, r) * pdf(r), cap.r_min, cap.r_max,
                      epsrel=1e-9, limit=300)
        return denom * val

    val, _ = quad(lambda t: cov(t / (1 - t)) / (1 - t), 0.0, 1.0, epsrel=1e-8, limit=300)
    return val * math.log2(math.e)


def test_rayleigh_limit_matches_independent_implementation(handheld):
    params = handheld.with_overrides(
        sat_fading=ShadowedRicianParams(m=1, b=0.063, omega=0.0)
    )
    cfg = params.scenario(Sharing.UL_SAT_UL_TERR, 100.0)
    assert ergodic_se(cfg, TIGHT) == pytest.approx(_rayleigh_reference_se(cfg), rel=1e-6)


def test_ergodic_se_unit_scale_invariance(handheld):
    """Kilometers instead of meters must not change the SE (alpha = 2 uplink)."""
    cfg_m = handheld.scenario(Sharing.UL_SAT_DL_TERR, 100.0)
    k = 1e-3
    geom = handheld.geometry
    geom_km = type(geom)(
        sat_radius=geom.sat_radius * k,
        sat_user_radius=geom.sat_user_radius * k,
        bs_radius=geom.bs_radius * k,
        terr_user_radius=geom.terr_user_radius * k,
        sat_visibility_angle=geom.sat_visibility_angle,
        user_elevation_angle=geom.user_elevation_angle,
        bs_main_threshold=geom.bs_main_threshold,
        bs_side_threshold=geom.bs_side_threshold,
        terr_user_disk_radius=geom.terr_user_disk_radius * k,
    )
    params_km = handheld.with_overrides(
        geometry=geom_km,
        sat_density=handheld.sat_density / k**2,
        sat_user_density=handheld.sat_user_density / k**2,
        bs_density_ul=handheld.bs_density_ul / k**2,
        bs_density_dl=handheld.bs_density_dl / k**2,
        noise_power=handheld.noise_power / k**2,
        terr_user_exclusion_radius=handheld.terr_user_exclusion_radius * k,
    )
    cfg_km = params_km.scenario(Sharing.UL_SAT_DL_TERR, 100.0)
    assert ergodic_se(cfg_km, TIGHT) == pytest.approx(ergodic_se(cfg_m, TIGHT), rel=1e-6)


# --- mean interference --------------------------------------------------------------------


def test_mean_interference_zero_density(handheld):
    cfg = handheld.with_overrides(bs_density_ul=0.0).scenario(Sharing.UL_SAT_DL_TERR, 0.0)
    assert mean_interference(cfg) == 0.0


def test_mean_interference_linear_in_density(handheld):
    base = mean_interference(handheld.scenario(Sharing.UL_SAT_DL_TERR, 1.0))
    doubled = mean_interference(
        handheld.with_overrides(bs_density_ul=2 * handheld.bs_density_ul)
        .scenario(Sharing.UL_SAT_DL_TERR, 1.0)
    )
    assert doubled == pytest.approx(2.0 * base, rel=1e-12)


def test_mean_interference_matches_mc(handheld):
    cfg = handheld.scenario(Sharing.UL_SAT_DL_TERR, 1.0)
    est = estimate(cfg, 30_000, master_seed=21)
    mc = est.mean_terr_interference
    assert abs(mean_interference(cfg) - mc.value) < 3.0 * mc.stderr


def test_mean_serving_tier_interference_matches_mc(handheld):
    cfg = handheld.with_overrides(bs_density_ul=0.0).scenario(Sharing.UL_SAT_DL_TERR, 0.0)
    est = estimate(cfg, 30_000, master_seed=23)
    mc = est.mean_sat_interference
    assert abs(mean_serving_tier_interference(cfg) - mc.value) < 3.0 * mc.stderr


# --- thresholds and the SE lower bound -------------------------------------------------------


def test_density_ratio_thresholds_reference_windows(handheld, vsat):
    for params in (handheld, vsat):
        assert 230.0 <= density_ratio_threshold(params, "ul") <= 240.0
        assert 33.0 <= density_ratio_threshold(params, "dl") <= 37.0


def test_density_ratio_threshold_symmetric_configuration(handheld):
    geom = handheld.geometry
    sym_geom = type(geom)(
        sat_radius=geom.sat_radius,
        sat_user_radius=geom.sat_user_radius,
        bs_radius=geom.terr_user_radius,  # same shell as the terrestrial users
        terr_user_radius=geom.terr_user_radius,
        sat_visibility_angle=geom.sat_visibility_angle,
        user_elevation_angle=geom.user_elevation_angle,
        bs_main_threshold=geom.bs_main_threshold,
        bs_side_threshold=geom.bs_side_threshold,
        terr_user_disk_radius=geom.terr_user_disk_radius,
    )
    g = handheld.gains
    sym_gains = GainProfile(
        sat_main=g.sat_main, sat_side=g.sat_side,
        sat_user_main=g.sat_user_main, sat_user_side=g.sat_user_side,
        bs_main=g.bs_main, bs_side_high=1.0, bs_side_low=1.0,
        terr_user_main=1.0, terr_user_side=1.0,
        carrier_frequency=g.carrier_frequency,
    )
    params = handheld.with_overrides(
        geometry=sym_geom, gains=sym_gains, bs_power=handheld.terr_user_power
    )
    assert density_ratio_threshold(params, "ul") == pytest.approx(1.0, rel=1e-12)


def test_density_ratio_threshold_dl_reduces_to_prefactor_with_matched_brackets(handheld):
    geom = handheld.geometry
    cap_b = downlink_cap(geom, "bs")
    g = handheld.gains
    matched_geom = type(geom)(
        sat_radius=geom.sat_radius, sat_user_radius=geom.sat_user_radius,
        bs_radius=geom.bs_radius, terr_user_radius=geom.terr_user_radius,
        sat_visibility_angle=geom.sat_visibility_angle,
        user_elevation_angle=geom.user_elevation_angle,
        bs_main_threshold=geom.bs_main_threshold,
        bs_side_threshold=geom.bs_side_threshold,
        terr_user_disk_radius=cap_b.r_max,  # user disk spans the same distances
    )
    matched_gains = GainProfile(
        sat_main=g.sat_main, sat_side=g.sat_side,
        sat_user_main=g.sat_user_main, sat_user_side=g.sat_user_side,
        bs_main=g.bs_main, bs_side_high=1.0, bs_side_low=1.0,
        terr_user_main=1.0, terr_user_side=1.0,
        carrier_frequency=g.carrier_frequency,
    )
    params = handheld.with_overrides(
        geometry=matched_geom, gains=matched_gains,
        bs_power=handheld.terr_user_power,
        terr_user_exclusion_radius=cap_b.r_min,
    )
    expected_prefactor = geom.bs_radius / geom.sat_user_radius
    assert density_ratio_threshold(params, "dl") == pytest.approx(expected_prefactor, rel=1e-12)


def test_density_ratio_threshold_precondition_errors(handheld):
    steep = handheld.with_overrides(sat_path_loss_exp=3.0)
    with pytest.raises(ValueError, match="requires sat_path_loss_exp == 2"):
        density_ratio_threshold(steep, "ul")
    steep_t = handheld.with_overrides(terr_path_loss_exp=3.0)
    with pytest.raises(ValueError, match="terrestrial exponent 4"):
        density_ratio_threshold(steep_t, "dl")
    with pytest.raises(ValueError, match="family"):
        density_ratio_threshold(handheld, "sideways")


def test_se_lower_bound_below_exact(handheld):
    for sharing, ratio in [(Sharing.UL_SAT_DL_TERR, 10.0), (Sharing.DL_SAT_DL_TERR, 10.0)]:
        cfg = handheld.scenario(sharing, ratio)
        assert se_lower_bound(cfg) <= ergodic_se(cfg)


def test_se_lower_bound_formula_without_terrestrial_interference(handheld):
    params = handheld.with_overrides(bs_density_ul=0.0)
    cfg = params.scenario(Sharing.UL_SAT_DL_TERR, 0.0)
    geom = cfg.geometry
    cap = cfg.serving_cap()
    lam = cfg.serving_ring_density

    def pdf(r):
        return nearest_distance_pdf(lam, cap, r)

    e_log_r, _ = quad(lambda r: math.log(r) * pdf(r), cap.r_min, cap.r_max, limit=200)
    e_log_signal = (
        math.log(serving_gain_power(cfg)) + sr_power_log_mean(cfg.sat_fading) - 2.0 * e_log_r
    )
    gp = effective_gain(cfg.gains, ("sat_user", "sat")) * cfg.sat_user_power
    e_h = 2 * 0.063 + 8.97e-4

    def inner(r):
        return math.log(cap.r_max / r) * pdf(r)

    e_campbell, _ = quad(inner, cap.r_min, cap.r_max, limit=200)
    mean_in_tier = 2.0 * math.pi * lam * gp * e_h * e_campbell
    expected = math.log2(1.0 + math.exp(e_log_signal) / (mean_in_tier + cfg.noise_power))
    assert se_lower_bound(cfg) == pytest.approx(expected, rel=1e-8)
