"""Brute-force Monte Carlo oracle for SINR, coverage and spectral efficiency.

Each trial draws one full network realization: every population is sampled
directly on its visible spherical cap (no annulus transform, so the sampler
independently exercises the cap-to-ring equivalence used by the closed
forms), fading is drawn per link, the serving node is the nearest in-tier
node, and the SINR follows the sharing configuration's signal model.

Reproducibility: every trial owns a counter-based Philox stream keyed by
(master seed, trial index), and estimates reduce per-trial arrays in index
order, so results are bit-identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import fading as fad
from .antenna import bs_gain_by_elevation, effective_gain, free_space_factor
from .analytic import serving_gain_power
from .config import ScenarioConfig, Sharing
from .geometry import (
    downlink_cap,
    ring_density,
    sample_annulus_distances,
    sample_cap_distances,
    sample_disk_distances,
    uplink_cap,
    sat_elevation_from_distance,
)

__all__ = ["TrialResult", "EstimateWithCI", "MCEstimates", "trial_rng", "run_trial", "estimate"]

_LOG2 = math.log(2.0)


@dataclass(frozen=True)
class TrialResult:
    sinr: float                          # linear; 0 when unserved, inf if interference-and-noise-free
    serving_distance: float              # [m]; nan when unserved
    served: bool
    interference_satellite_tier: float   # [W]
    interference_terrestrial_tier: float  # [W]


@dataclass(frozen=True)
class EstimateWithCI:
    value: float
    stderr: float
    n_trials: int
    master_seed: int


@dataclass(frozen=True)
class MCEstimates:
    ergodic_se: EstimateWithCI
    coverage: tuple          # EstimateWithCI per gamma grid point
    gamma_grid: tuple
    mean_terr_interference: EstimateWithCI
    mean_sat_interference: EstimateWithCI
    served_fraction: EstimateWithCI


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    """Counter-based per-trial stream; independent of execution order."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((master_seed, trial_index))))


def _sample_tier_distances(rng, observer_radius, shell_radius, bounds, density, ring_sampling):
    if ring_sampling:
        lam = ring_density(density, shell_radius, observer_radius)
        return sample_annulus_distances(bounds, lam, rng)
    return sample_cap_distances(observer_radius, shell_radius, bounds, density, rng)


def run_trial(
    cfg: ScenarioConfig,
    trial_seed,
    ring_sampling: bool = False,
    ut_exclusion: bool = False,
) -> TrialResult:
    """One network realization.

    ``trial_seed`` is anything ``np.random.SeedSequence`` accepts (the
    estimator passes (master_seed, index) tuples). ``ring_sampling`` swaps the
    direct cap sampler for the transformed-annulus one; ``ut_exclusion``
    carves the exclusion radius out of the downlink user disk.
    """
    if isinstance(trial_seed, np.random.Generator):
        rng = trial_seed
    else:
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(trial_seed)))
    geom, gains = cfg.geometry, cfg.gains
    obs_r = cfg.observer_radius
    serving_cap = cfg.serving_cap()

    d_serv = _sample_tier_distances(
        rng, obs_r, cfg.serving_shell_radius, serving_cap, cfg.serving_density, ring_sampling
    )
    served = d_serv.size > 0
    serving_distance = float("nan")
    signal = 0.0
    sat_tier_i = 0.0
    if served:
        h = fad.sample_sr_power(cfg.sat_fading, rng, d_serv.size)
        j = int(np.argmin(d_serv))
        serving_distance = float(d_serv[j])
        signal = serving_gain_power(cfg) * h[j] * serving_distance**-cfg.sat_path_loss_exp
        if d_serv.size > 1:
            mask = np.ones(d_serv.size, dtype=bool)
            mask[j] = False
            link = ("sat_user", "sat") if cfg.is_uplink else ("sat", "sat_user")
            g_int = effective_gain(gains, link) * cfg.serving_power
            sat_tier_i = float(np.sum(h[mask] * d_serv[mask] ** -cfg.sat_path_loss_exp)) * g_int

    terr_i = 0.0
    if cfg.sharing is Sharing.UL_SAT_DL_TERR and cfg.bs_density > 0:
        cap = uplink_cap(geom, "bs")
        d = _sample_tier_distances(rng, obs_r, geom.bs_radius, cap, cfg.bs_density, ring_sampling)
        if d.size:
            elev = sat_elevation_from_distance(geom, d)
            g_bs = bs_gain_by_elevation(gains, elev, geom.bs_main_threshold, geom.bs_side_threshold)
            g = g_bs * gains.sat_side * free_space_factor(gains)
            h = fad.sample_sr_power(cfg.sat_fading, rng, d.size)
            terr_i = float(np.sum(g * h * d**-cfg.sat_path_loss_exp)) * cfg.bs_power
    elif cfg.sharing is Sharing.UL_SAT_UL_TERR and cfg.terr_user_density > 0:
        cap = uplink_cap(geom, "terr_user")
        d = _sample_tier_distances(rng, obs_r, geom.terr_user_radius, cap,
                                   cfg.terr_user_density, ring_sampling)
        if d.size:
            h = fad.sample_sr_power(cfg.sat_fading, rng, d.size)
            g = effective_gain(gains, ("terr_user", "sat")) * cfg.terr_user_power
            terr_i = float(np.sum(h * d**-cfg.sat_path_loss_exp)) * g
    elif cfg.sharing is Sharing.DL_SAT_DL_TERR and cfg.bs_density > 0:
        cap = downlink_cap(geom, "bs")
        d = _sample_tier_distances(rng, obs_r, geom.bs_radius, cap, cfg.bs_density, ring_sampling)
        if d.size:
            h = fad.sample_nakagami_power(cfg.terr_fading, rng, d.size)
            g = effective_gain(gains, ("bs", "sat_user")) * cfg.bs_power
            terr_i = float(np.sum(h * d**-cfg.terr_path_loss_exp)) * g
    elif cfg.sharing is Sharing.DL_SAT_UL_TERR and cfg.terr_user_density > 0:
        inner = cfg.terr_user_exclusion_radius if ut_exclusion else 0.0
        d = sample_disk_distances(geom.terr_user_disk_radius, cfg.terr_user_density, rng, inner)
        if d.size:
            h = fad.sample_nakagami_power(cfg.terr_fading, rng, d.size)
            g = effective_gain(gains, ("terr_user", "sat_user")) * cfg.terr_user_power
            terr_i = float(np.sum(h * d**-cfg.terr_path_loss_exp)) * g

    denom = sat_tier_i + terr_i + cfg.noise_power
    if not served:
        sinr = 0.0
    elif denom == 0.0:
        sinr = float("inf")  # interference- and noise-free sentinel
    else:
        sinr = signal / denom
    return TrialResult(
        sinr=sinr,
        serving_distance=serving_distance,
        served=served,
        interference_satellite_tier=sat_tier_i,
        interference_terrestrial_tier=terr_i,
    )


def _mean_ci(values: np.ndarray, n: int, master_seed: int) -> EstimateWithCI:
    mean = float(np.sum(values) / n)
    if n > 1:
        var = float(np.sum((values - mean) ** 2) / (n - 1))
        stderr = math.sqrt(var / n)
    else:
        stderr = 0.0
    return EstimateWithCI(value=mean, stderr=stderr, n_trials=n, master_seed=master_seed)


def estimate(
    cfg: ScenarioConfig,
    n_trials: int,
    master_seed: int = 0,
    gamma_grid=(),
    workers: int = 1,
    ring_sampling: bool = False,
    ut_exclusion: bool = False,
    conditional: bool = False,
) -> MCEstimates:
    """Monte Carlo estimates with standard errors over ``n_trials`` realizations.

    Unserved trials contribute zero spectral efficiency and count as not
    covered, matching the unconditional metric; ``conditional=True`` instead
    averages over served trials only (debug mode).
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    n = int(n_trials)
    se_vals = np.empty(n)
    sinr_vals = np.empty(n)
    served = np.empty(n, dtype=bool)
    sat_i = np.empty(n)
    terr_i = np.empty(n)

    def fill(lo: int, hi: int) -> None:
        for i in range(lo, hi):
            res = run_trial(cfg, (master_seed, i), ring_sampling, ut_exclusion)
            sinr_vals[i] = res.sinr
            served[i] = res.served
            sat_i[i] = res.interference_satellite_tier
            terr_i[i] = res.interference_terrestrial_tier
            se_vals[i] = math.log1p(res.sinr) / _LOG2 if math.isfinite(res.sinr) else math.inf

    workers = max(1, int(workers))
    if workers == 1:
        fill(0, n)
    else:
        step = -(-n // workers)
        spans = [(k * step, min((k + 1) * step, n)) for k in range(workers) if k * step < n]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(lambda span: fill(*span), spans))

    if conditional:
        idx = np.flatnonzero(served)
        se_est = _mean_ci(se_vals[idx], max(idx.size, 1), master_seed)
    else:
        se_est = _mean_ci(se_vals, n, master_seed)
    coverage = tuple(
        _mean_ci((served & (sinr_vals >= g)).astype(float), n, master_seed) for g in gamma_grid
    )
    return MCEstimates(
        ergodic_se=se_est,
        coverage=coverage,
        gamma_grid=tuple(gamma_grid),
        mean_terr_interference=_mean_ci(terr_i, n, master_seed),
        mean_sat_interference=_mean_ci(sat_i, n, master_seed),
        served_fraction=_mean_ci(served.astype(float), n, master_seed),
    )
