"""Scenario configuration: sharing modes, parameter sets, file parsing, validation.

A ``ParameterSet`` carries every network parameter except the sharing mode and
the swept terrestrial-user density; ``ParameterSet.scenario`` specializes it
into an immutable ``ScenarioConfig`` for one sharing configuration at one
density ratio. Config files are INI-style with [scenario], [satellite],
[terrestrial], [fading] and [sweep] sections; human units there (dBm, dBi,
GHz, km, degrees, per-km^2) are converted to SI on parse.
"""

from __future__ import annotations

import configparser
import math
import warnings
from dataclasses import dataclass, field, replace
from enum import Enum

from .antenna import GainProfile, db_to_linear
from .fading import NakagamiParams, ShadowedRicianParams
from .geometry import NetworkGeometry, downlink_cap, ring_density, uplink_cap

__all__ = [
    "Sharing",
    "ScenarioConfig",
    "ParameterSet",
    "QuadratureConfig",
    "ConfigError",
    "Diagnostic",
    "parse_config_file",
    "write_config_file",
    "collect_diagnostics",
]


class ConfigError(ValueError):
    """Raised when a configuration file or parameter set is invalid."""


class Sharing(str, Enum):
    """The four spectrum-sharing configurations (satellite side / terrestrial side)."""

    UL_SAT_DL_TERR = "ul-dn"
    UL_SAT_UL_TERR = "ul-up"
    DL_SAT_DL_TERR = "dl-dn"
    DL_SAT_UL_TERR = "dl-up"

    @property
    def is_uplink(self) -> bool:
        """True when the satellite network operates in the uplink."""
        return self.value.startswith("ul")

    @property
    def terrestrial_interferer(self) -> str:
        """Which terrestrial population transmits in-band: 'bs' or 'terr_user'."""
        return "bs" if self.value.endswith("dn") else "terr_user"

    @property
    def family(self) -> str:
        return "ul" if self.is_uplink else "dl"


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and transform choice for the nested integrals."""

    rel_tol_outer: float = 1e-5    # SINR-threshold and serving-distance integrals
    rel_tol_radial: float = 1e-7   # radial interference integrals
    abs_tol: float = 1e-14
    max_subdivisions: int = 200
    gamma_transform: str = "rational"  # 'rational': gamma = t/(1-t); 'log': gamma = e^u

    def __post_init__(self):
        if self.rel_tol_outer <= 0 or self.rel_tol_radial <= 0 or self.abs_tol <= 0:
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 10:
            raise ValueError("max_subdivisions too small")
        if self.gamma_transform not in ("rational", "log"):
            raise ValueError("gamma_transform must be 'rational' or 'log'")


@dataclass(frozen=True)
class ScenarioConfig:
    """One sharing configuration with all densities, powers and models fixed."""

    sharing: Sharing
    sat_density: float        # [m^-2]
    sat_user_density: float   # [m^-2]
    bs_density: float         # [m^-2]
    terr_user_density: float  # [m^-2]
    sat_power: float          # [W]
    sat_user_power: float     # [W]
    bs_power: float           # [W]
    terr_user_power: float    # [W]
    sat_path_loss_exp: float
    terr_path_loss_exp: float
    noise_power: float        # [W], N0 * bandwidth
    geometry: NetworkGeometry
    gains: GainProfile
    sat_fading: ShadowedRicianParams
    terr_fading: NakagamiParams
    user_class: str = "custom"
    terr_user_exclusion_radius: float = 7.0  # [m], inner cutoff for mean-interference forms

    def __post_init__(self):
        for name in ("sat_density", "sat_user_density", "bs_density", "terr_user_density"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        for name in ("sat_power", "sat_user_power", "bs_power", "terr_user_power"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.sat_path_loss_exp < 2 or self.terr_path_loss_exp < 2:
            raise ValueError("path-loss exponents must be >= 2")
        if self.noise_power < 0:
            raise ValueError("noise_power must be nonnegative")
        if not 0 <= self.terr_user_exclusion_radius:
            raise ValueError("terr_user_exclusion_radius must be nonnegative")

    # --- serving-link helpers -------------------------------------------------

    @property
    def is_uplink(self) -> bool:
        return self.sharing.is_uplink

    @property
    def observer_radius(self) -> float:
        """Shell radius of the typical receiver."""
        return self.geometry.sat_radius if self.is_uplink else self.geometry.sat_user_radius

    def serving_cap(self):
        if self.is_uplink:
            return uplink_cap(self.geometry, "sat_user")
        return downlink_cap(self.geometry, "sat")

    @property
    def serving_density(self) -> float:
        return self.sat_user_density if self.is_uplink else self.sat_density

    @property
    def serving_shell_radius(self) -> float:
        return self.geometry.sat_user_radius if self.is_uplink else self.geometry.sat_radius

    @property
    def serving_ring_density(self) -> float:
        return ring_density(self.serving_density, self.serving_shell_radius, self.observer_radius)

    @property
    def serving_power(self) -> float:
        return self.sat_user_power if self.is_uplink else self.sat_power


@dataclass(frozen=True)
class ParameterSet:
    """Shared parameters from which per-sharing scenarios are derived.

    The BS density differs between the uplink and downlink studies (the two
    families probe very different interference geometries), so both are
    carried and picked by family. The terrestrial-user density is expressed
    through the swept ratio against the family's BS density.
    """

    geometry: NetworkGeometry
    gains: GainProfile
    sat_fading: ShadowedRicianParams
    terr_fading: NakagamiParams
    sat_power: float
    sat_user_power: float
    bs_power: float
    terr_user_power: float
    sat_path_loss_exp: float
    terr_path_loss_exp: float
    noise_power: float
    sat_density: float
    sat_user_density: float
    bs_density_ul: float
    bs_density_dl: float
    user_class: str = "custom"
    terr_user_exclusion_radius: float = 7.0

    def bs_density(self, family: str) -> float:
        if family == "ul":
            return self.bs_density_ul
        if family == "dl":
            return self.bs_density_dl
        raise ValueError(f"unknown family {family!r}")

    def scenario(self, sharing: Sharing | str, density_ratio: float) -> ScenarioConfig:
        """Build the scenario for one sharing mode at one lambda_ut/lambda_b ratio."""
        sharing = Sharing(sharing)
        if density_ratio < 0:
            raise ValueError("density ratio must be nonnegative")
        lam_b = self.bs_density(sharing.family)
        return ScenarioConfig(
            sharing=sharing,
            sat_density=self.sat_density,
            sat_user_density=self.sat_user_density,
            bs_density=lam_b,
            terr_user_density=density_ratio * lam_b,
            sat_power=self.sat_power,
            sat_user_power=self.sat_user_power,
            bs_power=self.bs_power,
            terr_user_power=self.terr_user_power,
            sat_path_loss_exp=self.sat_path_loss_exp,
            terr_path_loss_exp=self.terr_path_loss_exp,
            noise_power=self.noise_power,
            geometry=self.geometry,
            gains=self.gains,
            sat_fading=self.sat_fading,
            terr_fading=self.terr_fading,
            user_class=self.user_class,
            terr_user_exclusion_radius=self.terr_user_exclusion_radius,
        )

    def with_overrides(self, **kwargs) -> "ParameterSet":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # 'error' | 'warning'
    field: str
    message: str

    def __str__(self):
        return f"[{self.severity}] {self.field}: {self.message}"


# --- file format -----------------------------------------------------------

_PER_KM2 = 1e-6  # per-km^2 -> per-m^2


def _raw_from_params(p: ParameterSet, sweep: dict | None = None) -> dict:
    g, gains = p.geometry, p.gains

    def to_dbm(watts):
        return 10.0 * math.log10(watts * 1e3)

    def to_dbi(linear):
        return 10.0 * math.log10(linear)

    raw = {
        "scenario": {"user_class": p.user_class},
        "satellite": {
            "carrier_frequency_ghz": gains.carrier_frequency / 1e9,
            "sat_power_dbm": to_dbm(p.sat_power),
            "sat_user_power_dbm": to_dbm(p.sat_user_power),
            "sat_gain_main_dbi": to_dbi(gains.sat_main),
            "sat_gain_side_dbi": to_dbi(gains.sat_side),
            "sat_user_gain_main_dbi": to_dbi(gains.sat_user_main),
            "sat_user_gain_side_dbi": to_dbi(gains.sat_user_side),
            "sat_radius_km": g.sat_radius / 1e3,
            "sat_user_radius_km": g.sat_user_radius / 1e3,
            "sat_visibility_angle_deg": math.degrees(g.sat_visibility_angle),
            "user_elevation_angle_deg": math.degrees(g.user_elevation_angle),
            "sat_path_loss_exp": p.sat_path_loss_exp,
            "noise_power_w": p.noise_power,
            "sat_density_per_km2": p.sat_density / _PER_KM2,
            "sat_user_density_per_km2": p.sat_user_density / _PER_KM2,
        },
        "terrestrial": {
            "bs_power_dbm": to_dbm(p.bs_power),
            "terr_user_power_dbm": to_dbm(p.terr_user_power),
            "bs_gain_main_dbi": to_dbi(gains.bs_main),
            "bs_gain_side_high_dbi": to_dbi(gains.bs_side_high),
            "bs_gain_side_low_dbi": to_dbi(gains.bs_side_low),
            "terr_user_gain_main_dbi": to_dbi(gains.terr_user_main),
            "terr_user_gain_side_dbi": to_dbi(gains.terr_user_side),
            "bs_main_threshold_deg": math.degrees(g.bs_main_threshold),
            "bs_side_threshold_deg": math.degrees(g.bs_side_threshold),
            "bs_radius_km": g.bs_radius / 1e3,
            "terr_user_radius_km": g.terr_user_radius / 1e3,
            "terr_path_loss_exp": p.terr_path_loss_exp,
            "bs_density_ul_per_km2": p.bs_density_ul / _PER_KM2,
            "bs_density_dl_per_km2": p.bs_density_dl / _PER_KM2,
            "terr_user_disk_radius_m": g.terr_user_disk_radius,
            "terr_user_exclusion_radius_m": p.terr_user_exclusion_radius,
        },
        "fading": {
            "sat_shadowing_order": p.sat_fading.m,
            "sat_scatter_half_power": p.sat_fading.b,
            "sat_los_power": p.sat_fading.omega,
            "terr_nakagami_order": p.terr_fading.m,
        },
    }
    if sweep:
        raw["sweep"] = dict(sweep)
    return raw


def write_config_file(path, params: ParameterSet, sweep: dict | None = None) -> None:
    cp = configparser.ConfigParser()
    for section, values in _raw_from_params(params, sweep).items():
        cp[section] = {k: repr(v) if not isinstance(v, str) else v for k, v in values.items()}
    with open(path, "w") as fh:
        cp.write(fh)


def _get(cp, section, key, cast=float):
    try:
        raw = cp.get(section, key)
    except (configparser.NoSectionError, configparser.NoOptionError) as exc:
        raise ConfigError(f"missing {section}.{key}") from exc
    try:
        return cast(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {section}.{key}: {raw!r}") from exc


def _cast_int(raw: str) -> int:
    val = float(raw)
    if val != int(val):
        raise ConfigError(f"expected an integer, got {raw!r}")
    return int(val)


def parse_config_file(path) -> tuple[ParameterSet, dict]:
    """Parse an INI config into a ParameterSet plus the raw [sweep] section."""
    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    geometry = NetworkGeometry(
        sat_radius=_get(cp, "satellite", "sat_radius_km") * 1e3,
        sat_user_radius=_get(cp, "satellite", "sat_user_radius_km") * 1e3,
        bs_radius=_get(cp, "terrestrial", "bs_radius_km") * 1e3,
        terr_user_radius=_get(cp, "terrestrial", "terr_user_radius_km") * 1e3,
        sat_visibility_angle=math.radians(_get(cp, "satellite", "sat_visibility_angle_deg")),
        user_elevation_angle=math.radians(_get(cp, "satellite", "user_elevation_angle_deg")),
        bs_main_threshold=math.radians(_get(cp, "terrestrial", "bs_main_threshold_deg")),
        bs_side_threshold=math.radians(_get(cp, "terrestrial", "bs_side_threshold_deg")),
        terr_user_disk_radius=_get(cp, "terrestrial", "terr_user_disk_radius_m"),
    )
    gains = GainProfile(
        sat_main=float(db_to_linear(_get(cp, "satellite", "sat_gain_main_dbi"))),
        sat_side=float(db_to_linear(_get(cp, "satellite", "sat_gain_side_dbi"))),
        sat_user_main=float(db_to_linear(_get(cp, "satellite", "sat_user_gain_main_dbi"))),
        sat_user_side=float(db_to_linear(_get(cp, "satellite", "sat_user_gain_side_dbi"))),
        bs_main=float(db_to_linear(_get(cp, "terrestrial", "bs_gain_main_dbi"))),
        bs_side_high=float(db_to_linear(_get(cp, "terrestrial", "bs_gain_side_high_dbi"))),
        bs_side_low=float(db_to_linear(_get(cp, "terrestrial", "bs_gain_side_low_dbi"))),
        terr_user_main=float(db_to_linear(_get(cp, "terrestrial", "terr_user_gain_main_dbi"))),
        terr_user_side=float(db_to_linear(_get(cp, "terrestrial", "terr_user_gain_side_dbi"))),
        carrier_frequency=_get(cp, "satellite", "carrier_frequency_ghz") * 1e9,
    )
    sat_fading = ShadowedRicianParams(
        m=_get(cp, "fading", "sat_shadowing_order", _cast_int),
        b=_get(cp, "fading", "sat_scatter_half_power"),
        omega=_get(cp, "fading", "sat_los_power"),
    )
    terr_fading = NakagamiParams(m=_get(cp, "fading", "terr_nakagami_order", _cast_int))

    def from_dbm(dbm):
        return 10.0 ** (dbm / 10.0) / 1e3

    params = ParameterSet(
        geometry=geometry,
        gains=gains,
        sat_fading=sat_fading,
        terr_fading=terr_fading,
        sat_power=from_dbm(_get(cp, "satellite", "sat_power_dbm")),
        sat_user_power=from_dbm(_get(cp, "satellite", "sat_user_power_dbm")),
        bs_power=from_dbm(_get(cp, "terrestrial", "bs_power_dbm")),
        terr_user_power=from_dbm(_get(cp, "terrestrial", "terr_user_power_dbm")),
        sat_path_loss_exp=_get(cp, "satellite", "sat_path_loss_exp"),
        terr_path_loss_exp=_get(cp, "terrestrial", "terr_path_loss_exp"),
        noise_power=_get(cp, "satellite", "noise_power_w"),
        sat_density=_get(cp, "satellite", "sat_density_per_km2") * _PER_KM2,
        sat_user_density=_get(cp, "satellite", "sat_user_density_per_km2") * _PER_KM2,
        bs_density_ul=_get(cp, "terrestrial", "bs_density_ul_per_km2") * _PER_KM2,
        bs_density_dl=_get(cp, "terrestrial", "bs_density_dl_per_km2") * _PER_KM2,
        user_class=cp.get("scenario", "user_class", fallback="custom"),
        terr_user_exclusion_radius=_get(cp, "terrestrial", "terr_user_exclusion_radius_m"),
    )
    sweep = dict(cp["sweep"]) if cp.has_section("sweep") else {}
    return params, sweep


# --- validation --------------------------------------------------------------


def check_bs_sidelobe_visibility(params: ParameterSet) -> Diagnostic | None:
    """Warn when the BS main lobe can point at a visible satellite.

    The analysis assumes every visible BS shows the satellite a side lobe,
    which holds when the main-lobe threshold stays below acos(sin theta_s).
    """
    g = params.geometry
    limit = math.acos(math.sin(g.sat_visibility_angle))
    if g.bs_main_threshold >= limit:
        return Diagnostic(
            "warning",
            "geometry.bs_main_threshold",
            f"main-lobe threshold {math.degrees(g.bs_main_threshold):.2f} deg is not below "
            f"acos(sin(visibility angle)) = {math.degrees(limit):.2f} deg; visible BSs may "
            "point their main lobe at the satellite, which the sectored analysis ignores",
        )
    return None


def collect_diagnostics(path) -> list[Diagnostic]:
    """Validate a config file; error diagnostics name the offending field."""
    diags: list[Diagnostic] = []
    cp = configparser.ConfigParser()
    if not cp.read(path):
        return [Diagnostic("error", "file", f"cannot read config file {path}")]

    params = None
    try:
        params, sweep = parse_config_file(path)
    except (ConfigError, ValueError) as exc:
        diags.append(Diagnostic("error", _guess_field(str(exc)), str(exc)))

    if params is not None:
        for name in ("sat_density", "sat_user_density", "bs_density_ul", "bs_density_dl"):
            if getattr(params, name) < 0:
                diags.append(Diagnostic("error", name, "density must be nonnegative"))
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("error")
                params.scenario(Sharing.UL_SAT_DL_TERR, 1.0)
                params.scenario(Sharing.DL_SAT_UL_TERR, 1.0)
        except (ValueError, Warning) as exc:
            diags.append(Diagnostic("error", _guess_field(str(exc)), str(exc)))
        warn = check_bs_sidelobe_visibility(params)
        if warn:
            diags.append(warn)
    return diags


_FIELD_HINTS = (
    "sat_radius", "sat_user_radius", "bs_radius", "terr_user_radius",
    "sat_visibility_angle", "user_elevation_angle", "bs_main_threshold",
    "bs_side_threshold", "terr_user_disk_radius", "Earth-grazing",
    "sat_density", "sat_user_density", "bs_density", "terr_user_density",
    "sat_power", "sat_user_power", "bs_power", "terr_user_power",
    "noise_power", "carrier", "gains", "beta", "m must", "weights",
    "path-loss",
)


def _guess_field(message: str) -> str:
    for hint in _FIELD_HINTS:
        if hint in message:
            return hint.replace("Earth-grazing", "geometry.sat_visibility_angle")
    return "config"
