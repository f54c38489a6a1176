"""Sectored antenna gains and effective link gains.

Every terminal uses a two-level (main/side lobe) sectored pattern except the
terrestrial BS, whose side lobe toward the sky is split into a high and a low
level keyed to the elevation of the satellite above the BS horizon (down-tilted
BS antennas radiate less toward high elevations). Effective link gains multiply
the transmit and receive lobe gains with the free-space factor
(c / (4 pi f_c))^2, so a received power is ``gain * P_tx * H * d^-alpha``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SPEED_OF_LIGHT",
    "GainProfile",
    "db_to_linear",
    "linear_to_db",
    "free_space_factor",
    "effective_gain",
    "bs_gain_by_elevation",
    "LINK_KINDS",
]

SPEED_OF_LIGHT = 299792458.0  # m/s

# (transmitter kind, receiver kind) pairs with a defined effective gain
LINK_KINDS = (
    ("sat_user", "sat"),
    ("bs", "sat"),
    ("terr_user", "sat"),
    ("sat", "sat_user"),
    ("bs", "sat_user"),
    ("terr_user", "sat_user"),
)


def db_to_linear(x_db) -> np.ndarray:
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def linear_to_db(x_lin) -> np.ndarray:
    return 10.0 * np.log10(np.asarray(x_lin, dtype=float))


@dataclass(frozen=True)
class GainProfile:
    """Linear-scale lobe gains per node kind plus the carrier frequency."""

    sat_main: float
    sat_side: float
    sat_user_main: float
    sat_user_side: float
    bs_main: float
    bs_side_high: float
    bs_side_low: float
    terr_user_main: float
    terr_user_side: float
    carrier_frequency: float  # [Hz]

    def __post_init__(self):
        pairs = [
            ("sat", self.sat_main, self.sat_side),
            ("sat_user", self.sat_user_main, self.sat_user_side),
            ("terr_user", self.terr_user_main, self.terr_user_side),
            ("bs", self.bs_main, self.bs_side_high),
        ]
        for kind, main, side in pairs:
            if side <= 0 or main < side:
                raise ValueError(f"{kind} gains must satisfy main >= side > 0")
        if self.bs_side_low <= 0 or self.bs_side_high < self.bs_side_low:
            raise ValueError("BS side lobes must satisfy high >= low > 0")
        if self.carrier_frequency <= 0:
            raise ValueError("carrier frequency must be positive")


def free_space_factor(profile: GainProfile) -> float:
    """(c / (4 pi f_c))^2, the isotropic free-space aperture factor."""
    return (SPEED_OF_LIGHT / (4.0 * math.pi * profile.carrier_frequency)) ** 2


def _lobe(profile: GainProfile, kind: str, main: bool) -> float:
    table = {
        "sat": (profile.sat_main, profile.sat_side),
        "sat_user": (profile.sat_user_main, profile.sat_user_side),
        "terr_user": (profile.terr_user_main, profile.terr_user_side),
    }
    if kind not in table:
        raise ValueError(f"no two-lobe pattern for node kind {kind!r}")
    return table[kind][0 if main else 1]


def effective_gain(
    profile: GainProfile,
    link: tuple[str, str],
    aligned: bool = False,
    bs_level: str | None = None,
) -> float:
    """Effective gain (tx lobe * rx lobe * free-space factor) of one link.

    ``aligned`` marks the serving link, where both beams point at each other.
    BS transmitters toward the satellite need ``bs_level`` ("high" or "low")
    to pick the side-lobe level; toward a satellite user the BS always
    contributes its high side lobe.
    """
    if link not in LINK_KINDS:
        raise ValueError(f"undefined link {link!r}; expected one of {LINK_KINDS}")
    tx, rx = link
    fs = free_space_factor(profile)
    if tx == "bs":
        if aligned:
            raise ValueError("BS links are interference-only; aligned=True is invalid")
        if rx == "sat":
            if bs_level not in ("high", "low"):
                raise ValueError("bs->sat links need bs_level='high' or 'low'")
            g_tx = profile.bs_side_high if bs_level == "high" else profile.bs_side_low
        else:
            g_tx = profile.bs_side_high
        return g_tx * _lobe(profile, rx, main=False) * fs
    if bs_level is not None:
        raise ValueError("bs_level only applies to BS transmitters")
    g_tx = _lobe(profile, tx, main=aligned)
    g_rx = _lobe(profile, rx, main=aligned)
    return g_tx * g_rx * fs


def bs_gain_by_elevation(
    profile: GainProfile,
    elevation,
    main_threshold: float,
    side_threshold: float,
) -> np.ndarray:
    """BS lobe gain toward a satellite at the given elevation(s) [rad].

    Piecewise constant: main lobe up to ``main_threshold`` (inclusive), high
    side lobe up to ``side_threshold`` (inclusive), low side lobe above.
    """
    psi = np.asarray(elevation, dtype=float)
    if np.any((psi < 0) | (psi > math.pi / 2 + 1e-12)):
        raise ValueError("elevation must lie in [0, pi/2]")
    return np.where(
        psi <= main_threshold,
        profile.bs_main,
        np.where(psi <= side_threshold, profile.bs_side_high, profile.bs_side_low),
    )
