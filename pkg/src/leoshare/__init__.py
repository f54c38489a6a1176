"""Ergodic spectral efficiency of LEO satellite networks sharing spectrum with
terrestrial networks, analyzed with stochastic geometry on concentric spheres.

The library pairs a closed-form engine (:mod:`leoshare.analytic`) with an
independent Monte Carlo oracle (:mod:`leoshare.montecarlo`) over the same
scenario descriptions, plus density-ratio sweep tooling and a CLI.
"""

from .antenna import GainProfile, SPEED_OF_LIGHT, db_to_linear, effective_gain, linear_to_db
from .analytic import (
    NumericsError,
    conditional_coverage,
    coverage_probability,
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
from .config import (
    ConfigError,
    ParameterSet,
    QuadratureConfig,
    ScenarioConfig,
    Sharing,
    collect_diagnostics,
    parse_config_file,
    write_config_file,
)
from .fading import (
    NakagamiParams,
    ShadowedRicianParams,
    nakagami_laplace_factor,
    sample_nakagami_power,
    sample_sr_power,
    sr_amplitude_pdf,
    sr_power_ccdf,
    sr_power_mean,
    sr_power_pdf,
)
from .geometry import (
    CapBounds,
    NetworkGeometry,
    bs_gain_boundary_distance,
    downlink_cap,
    ring_density,
    sample_cap_distances,
    sample_cap_points,
    terr_user_disk_area,
    uplink_cap,
)
from .montecarlo import EstimateWithCI, MCEstimates, TrialResult, estimate, run_trial
from .presets import PRESET_NAMES, handheld_params, preset, vsat_params
from .sweep import SweepResult, SweepRow, SweepSpec, find_crossing, read_csv, run_sweep, write_csv

__version__ = "0.1.0"

__all__ = [
    "CapBounds", "ConfigError", "EstimateWithCI", "GainProfile", "MCEstimates",
    "NakagamiParams", "NetworkGeometry", "NumericsError", "PRESET_NAMES",
    "ParameterSet", "QuadratureConfig", "ScenarioConfig", "Sharing",
    "ShadowedRicianParams", "SweepResult", "SweepRow", "SweepSpec",
    "SPEED_OF_LIGHT", "TrialResult",
    "bs_gain_boundary_distance", "collect_diagnostics", "conditional_coverage",
    "coverage_probability", "db_to_linear", "density_ratio_threshold",
    "downlink_cap", "effective_gain", "ergodic_se", "estimate", "find_crossing",
    "handheld_params", "laplace_derivative", "laplace_interference",
    "linear_to_db", "mean_interference", "mean_serving_tier_interference",
    "nakagami_laplace_factor", "nearest_distance_cdf", "nearest_distance_pdf",
    "nonempty_probability", "parse_config_file", "preset", "read_csv",
    "ring_density", "run_sweep", "run_trial", "sample_cap_distances",
    "sample_cap_points", "sample_nakagami_power", "sample_sr_power",
    "se_lower_bound", "serving_gain_power", "sr_amplitude_pdf", "sr_power_ccdf",
    "sr_power_mean", "sr_power_pdf", "terr_user_disk_area", "uplink_cap",
    "vsat_params", "write_config_file", "write_csv",
]
