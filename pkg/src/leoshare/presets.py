"""Reference parameter sets for the VSAT and handheld user-terminal classes.

Numeric values follow the standard Ka-band VSAT / S-band handheld simulation
setups for dense LEO constellations at 530 km altitude. Densities are given
per km^2 here and converted to SI. Three values are artifact calibration
choices rather than externally specified numbers and are documented as such:
the per-family BS densities (the uplink study keeps the BS population light,
the downlink study uses a dense cellular layout) and the terrestrial-user
visibility disk radius of 11.43 m, which is calibrated so the closed-form
downlink density-ratio threshold reproduces its reference value of ~35 with
the 7 m exclusion radius.
"""

from __future__ import annotations

import math

from .antenna import GainProfile, db_to_linear
from .config import ParameterSet
from .fading import NakagamiParams, ShadowedRicianParams
from .geometry import NetworkGeometry

__all__ = ["PRESET_NAMES", "preset", "vsat_params", "handheld_params"]

EARTH_RADIUS = 6378e3  # [m]
SAT_ALTITUDE = 530e3   # [m]
USER_ALTITUDE = 1.5    # [m]
BS_ALTITUDE = 35.0     # [m]

PER_KM2 = 1e-6  # per-km^2 -> per-m^2

PRESET_NAMES = ("vsat", "handheld")


def _dbm(x):
    return 10.0 ** (x / 10.0) / 1e3


def _geometry() -> NetworkGeometry:
    return NetworkGeometry(
        sat_radius=EARTH_RADIUS + SAT_ALTITUDE,
        sat_user_radius=EARTH_RADIUS + USER_ALTITUDE,
        bs_radius=EARTH_RADIUS + BS_ALTITUDE,
        terr_user_radius=EARTH_RADIUS + USER_ALTITUDE,
        sat_visibility_angle=math.radians(57.0),
        user_elevation_angle=math.radians(0.0),
        bs_main_threshold=math.radians(10.0),
        bs_side_threshold=math.radians(40.0),
        terr_user_disk_radius=11.43,
    )


def _gains(sat_main_dbi, sat_side_dbi, user_main_dbi, user_side_dbi, fc_hz) -> GainProfile:
    return GainProfile(
        sat_main=float(db_to_linear(sat_main_dbi)),
        sat_side=float(db_to_linear(sat_side_dbi)),
        sat_user_main=float(db_to_linear(user_main_dbi)),
        sat_user_side=float(db_to_linear(user_side_dbi)),
        bs_main=float(db_to_linear(20.0)),  # never points at the sky in valid configs
        bs_side_high=float(db_to_linear(4.0)),
        bs_side_low=float(db_to_linear(-12.0)),
        terr_user_main=float(db_to_linear(0.0)),
        terr_user_side=float(db_to_linear(0.0)),
        carrier_frequency=fc_hz,
    )


def _common(gains: GainProfile, sat_user_power, bandwidth_hz, sat_user_density, user_class) -> ParameterSet:
    noise_density = _dbm(-174.0)  # [W/Hz]
    return ParameterSet(
        geometry=_geometry(),
        gains=gains,
        sat_fading=ShadowedRicianParams(m=1, b=0.063, omega=8.97e-4),
        terr_fading=NakagamiParams(m=1),
        sat_power=_dbm(43.0),
        sat_user_power=sat_user_power,
        bs_power=_dbm(46.0),
        terr_user_power=_dbm(23.0),
        sat_path_loss_exp=2.0,
        terr_path_loss_exp=4.0,
        noise_power=noise_density * bandwidth_hz,
        sat_density=1e-6 * PER_KM2,
        sat_user_density=sat_user_density,
        bs_density_ul=1e-5 * PER_KM2,
        bs_density_dl=200.0 * PER_KM2,
        user_class=user_class,
        terr_user_exclusion_radius=7.0,
    )


def vsat_params() -> ParameterSet:
    """Ka-band VSAT terminals: 28 GHz, 50 MHz, high-gain dishes."""
    gains = _gains(44.5, 31.5, 34.2, 21.2, 28e9)
    return _common(gains, _dbm(35.05), 50e6, 10**-5.5 * PER_KM2, "vsat")


def handheld_params() -> ParameterSet:
    """S-band handheld terminals: 1.99 GHz, 5 MHz, isotropic handsets."""
    gains = _gains(50.0, 30.0, 0.0, 0.0, 1.99e9)
    return _common(gains, _dbm(23.0), 5e6, 10**-4.5 * PER_KM2, "handheld")


def preset(name: str) -> ParameterSet:
    if name == "vsat":
        return vsat_params()
    if name == "handheld":
        return handheld_params()
    raise ValueError(f"unknown preset {name!r}; available: {PRESET_NAMES}")
