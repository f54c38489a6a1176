"""Spherical-cap geometry for multi-shell satellite/terrestrial networks.

All node populations live on spheres concentric with the Earth. An observer
(the receiving satellite for the uplink, the receiving ground user for the
downlink) sees only a spherical cap of each shell, bounded either by the
observer's visibility half-angle (uplink) or by a minimum elevation angle
(downlink). This module computes those caps, the equivalent planar-annulus
density transform, and uniform point sampling on caps and disks.

Distances are meters, angles radians, densities per square meter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "NetworkGeometry",
    "CapBounds",
    "uplink_cap",
    "downlink_cap",
    "terr_user_disk_area",
    "ring_density",
    "annulus_area",
    "nonempty_area",
    "bs_gain_boundary_distance",
    "sat_elevation_from_distance",
    "cos_cap_edge",
    "sample_cap_distances",
    "sample_cap_points",
    "sample_annulus_distances",
    "sample_disk_distances",
]

UPLINK_TARGETS = ("sat_user", "bs", "terr_user")
DOWNLINK_TARGETS = ("sat", "bs")


@dataclass(frozen=True)
class CapBounds:
    """Distance range and surface area of a visible spherical cap."""

    r_min: float  # nearest possible node distance [m]
    r_max: float  # farthest visible node distance [m]
    area: float   # cap surface area [m^2]

    def __post_init__(self):
        if self.r_min < 0 or self.r_max < self.r_min:
            raise ValueError(f"invalid cap bounds: r_min={self.r_min}, r_max={self.r_max}")
        if self.area < 0:
            raise ValueError(f"negative cap area: {self.area}")


@dataclass(frozen=True)
class NetworkGeometry:
    """Shell radii and visibility angles for all node populations.

    The four shells are the satellite shell, the satellite-user shell, the
    terrestrial-BS shell and the terrestrial-user shell. Terrestrial users
    share the ground-user altitude, so for the downlink they are modeled as
    a flat disk of radius ``terr_user_disk_radius`` around the typical user
    rather than as a cap.
    """

    sat_radius: float          # satellite shell radius [m]
    sat_user_radius: float     # satellite-user shell radius [m]
    bs_radius: float           # terrestrial-BS shell radius [m]
    terr_user_radius: float    # terrestrial-user shell radius [m]
    sat_visibility_angle: float   # uplink visibility half-angle at the satellite [rad]
    user_elevation_angle: float   # downlink minimum elevation at the user [rad]
    bs_main_threshold: float      # BS elevation below which the main lobe points at the sky [rad]
    bs_side_threshold: float      # BS elevation separating high/low side-lobe levels [rad]
    terr_user_disk_radius: float  # downlink terrestrial-user visibility disk radius [m]

    def __post_init__(self):
        for name in ("sat_radius", "sat_user_radius", "bs_radius", "terr_user_radius"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not (self.sat_radius > self.bs_radius >= self.terr_user_radius):
            raise ValueError("need sat_radius > bs_radius >= terr_user_radius")
        if not (self.sat_radius > self.sat_user_radius):
            raise ValueError("need sat_radius > sat_user_radius")
        if not 0.0 <= self.sat_visibility_angle < math.pi / 2:
            raise ValueError("sat_visibility_angle must lie in [0, pi/2)")
        if not 0.0 <= self.user_elevation_angle <= math.pi / 2:
            raise ValueError("user_elevation_angle must lie in [0, pi/2]")
        if not 0.0 <= self.bs_main_threshold < self.bs_side_threshold <= math.pi / 2:
            raise ValueError("need 0 <= bs_main_threshold < bs_side_threshold <= pi/2")
        if self.terr_user_disk_radius < 0:
            raise ValueError("terr_user_disk_radius must be nonnegative")
        # Earth-grazing: the visibility cone must intersect every ground shell.
        sin_th = math.sin(self.sat_visibility_angle)
        for name in ("sat_user_radius", "bs_radius", "terr_user_radius"):
            r_o = getattr(self, name)
            if r_o * r_o < (self.sat_radius * sin_th) ** 2:
                raise ValueError(
                    f"Earth-grazing violation: visibility cone at {math.degrees(self.sat_visibility_angle):.2f} deg "
                    f"misses the {name} shell (r_o^2 < R_s^2 sin^2 theta)"
                )

    def shell_radius(self, kind: str) -> float:
        radii = {
            "sat": self.sat_radius,
            "sat_user": self.sat_user_radius,
            "bs": self.bs_radius,
            "terr_user": self.terr_user_radius,
        }
        try:
            return radii[kind]
        except KeyError:
            raise ValueError(f"unknown node kind {kind!r}") from None


def uplink_cap(geom: NetworkGeometry, target: str) -> CapBounds:
    """Cap of the ``target`` shell visible from the typical satellite.

    The observer sits at radius ``sat_radius``; a shell point is visible when
    its direction is within the visibility half-angle of nadir. Degenerate
    zero-aperture configurations return a zero-area cap instead of erring.
    """
    if target not in UPLINK_TARGETS:
        raise ValueError(f"uplink target must be one of {UPLINK_TARGETS}, got {target!r}")
    r_s = geom.sat_radius
    r_o = geom.shell_radius(target)
    theta = geom.sat_visibility_angle
    r_min = r_s - r_o
    disc = (r_o - r_s * math.sin(theta)) * (r_o + r_s * math.sin(theta))
    if disc < 0:
        raise ValueError(
            f"Earth-grazing violation for target {target!r}: r_o^2 < R_s^2 sin^2 theta"
        )
    # rationalized form of R_s cos(theta) - sqrt(disc); stable near grazing
    r_max = (r_s - r_o) * (r_s + r_o) / (r_s * math.cos(theta) + math.sqrt(disc))
    if theta == 0.0:
        return CapBounds(r_min=r_min, r_max=r_min, area=0.0)
    # cap height written as x^2 / (r_o + sqrt(r_o^2 - x^2)) to avoid cancellation
    x = r_max * math.sin(theta)
    height = x * x / (r_o + math.sqrt(r_o * r_o - x * x))
    return CapBounds(r_min=r_min, r_max=r_max, area=2.0 * math.pi * r_o * height)


def downlink_cap(geom: NetworkGeometry, target: str) -> CapBounds:
    """Cap of the ``target`` shell visible from the typical ground user.

    The observer sits at radius ``sat_user_radius`` and sees shell points
    above its minimum elevation angle. Only shells strictly above the
    observer are meaningful here.
    """
    if target not in DOWNLINK_TARGETS:
        raise ValueError(f"downlink target must be one of {DOWNLINK_TARGETS}, got {target!r}")
    r_u = geom.sat_user_radius
    r_o = geom.shell_radius(target)
    if r_o <= r_u:
        raise ValueError(f"downlink target shell {target!r} must lie above the user shell")
    theta = geom.user_elevation_angle
    sin_th, cos_th = math.sin(theta), math.cos(theta)
    r_min = r_o - r_u
    root = math.sqrt((r_o - r_u * cos_th) * (r_o + r_u * cos_th))
    # rationalized forms of sqrt(...) - r_u sin(theta) and of the cap height
    # r_o - r_u - r_max sin(theta); both are cancellation-free for shallow caps
    r_max = (r_o - r_u) * (r_o + r_u) / (root + r_u * sin_th)
    if r_max <= r_min:
        # elevation cone so steep that only the zenith point remains
        return CapBounds(r_min=r_min, r_max=r_min, area=0.0)
    height = (
        (r_o - r_u) ** 2 * (r_o + r_u) * cos_th**2
        / ((root + r_u * sin_th) * (root + r_o * sin_th))
    )
    return CapBounds(r_min=r_min, r_max=r_max, area=2.0 * math.pi * r_o * height)


def terr_user_disk_area(geom: NetworkGeometry) -> float:
    """Area [m^2] of the flat terrestrial-user visibility disk around the user."""
    return math.pi * geom.terr_user_disk_radius**2


def ring_density(density: float, shell_radius: float, observer_radius: float) -> float:
    """Equivalent planar-annulus density for a cap population.

    A homogeneous cap population of intensity ``density`` on a shell of radius
    ``shell_radius``, observed from radius ``observer_radius``, has the same
    distance statistics as a planar PPP of intensity
    ``density * shell_radius / observer_radius`` on the annulus
    [r_min, r_max]. Counts are preserved exactly:
    cap area * density == annulus area * ring density.
    """
    if density < 0:
        raise ValueError("density must be nonnegative")
    if shell_radius <= 0 or observer_radius <= 0:
        raise ValueError("radii must be positive")
    return density * shell_radius / observer_radius


def annulus_area(bounds: CapBounds) -> float:
    """Area [m^2] of the planar annulus with the cap's distance bounds."""
    return math.pi * (bounds.r_max**2 - bounds.r_min**2)


def nonempty_area(bounds: CapBounds) -> bool:
    return bounds.area > 0.0


def bs_gain_boundary_distance(geom: NetworkGeometry) -> float:
    """Slant distance at which the satellite's elevation from a BS equals the side-lobe threshold.

    BSs nearer than this see the satellite above ``bs_side_threshold``
    (low side lobe); farther ones see it below (high side lobe). The
    difference of squares is factored to stay accurate at near-grazing
    angles.
    """
    r_s, r_b = geom.sat_radius, geom.bs_radius
    psi = geom.bs_side_threshold
    disc = (r_s - r_b * math.cos(psi)) * (r_s + r_b * math.cos(psi))
    d = math.sqrt(disc) - r_b * math.sin(psi)
    cap = uplink_cap(geom, "bs")
    if not (cap.r_min - 1e-9 <= d <= cap.r_max + 1e-9):
        raise ValueError(
            f"side-lobe boundary distance {d:.1f} m falls outside the visible BS cap "
            f"[{cap.r_min:.1f}, {cap.r_max:.1f}]; check the threshold angles"
        )
    return min(max(d, cap.r_min), cap.r_max)


def sat_elevation_from_distance(geom: NetworkGeometry, distance) -> np.ndarray:
    """Elevation [rad] of the typical satellite seen from a BS at slant ``distance``."""
    r_s, r_b = geom.sat_radius, geom.bs_radius
    d = np.asarray(distance, dtype=float)
    sin_psi = (r_s * r_s - r_b * r_b - d * d) / (2.0 * r_b * d)
    return np.arcsin(np.clip(sin_psi, -1.0, 1.0))


def cos_cap_edge(observer_radius: float, shell_radius: float, r_max: float) -> float:
    """Cosine of the cap's polar half-angle (measured at the sphere center)."""
    return (observer_radius**2 + shell_radius**2 - r_max**2) / (2.0 * observer_radius * shell_radius)


def sample_cap_distances(
    observer_radius: float,
    shell_radius: float,
    bounds: CapBounds,
    density: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Observer distances of one Poisson draw of cap points.

    The axial coordinate of a uniform point on a cap is itself uniform
    (Archimedes), so distances can be sampled without materializing 3-D
    positions. Count is Poisson(density * cap area).
    """
    if density < 0:
        raise ValueError("density must be nonnegative")
    if bounds.area == 0.0 or density == 0.0:
        return np.empty(0)
    n = rng.poisson(density * bounds.area)
    if n == 0:
        return np.empty(0)
    u = rng.uniform(cos_cap_edge(observer_radius, shell_radius, bounds.r_max), 1.0, n)
    d_sq = observer_radius**2 + shell_radius**2 - 2.0 * observer_radius * shell_radius * u
    return np.sqrt(np.maximum(d_sq, 0.0))


def sample_cap_points(
    observer_radius: float,
    shell_radius: float,
    bounds: CapBounds,
    density: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """One Poisson draw of uniform cap points as an (n, 3) array.

    The observer sits on the +z axis at ``observer_radius``; the cap is
    centered on that axis.
    """
    if density < 0:
        raise ValueError("density must be nonnegative")
    if bounds.area == 0.0 or density == 0.0:
        return np.empty((0, 3))
    n = rng.poisson(density * bounds.area)
    if n == 0:
        return np.empty((0, 3))
    u = rng.uniform(cos_cap_edge(observer_radius, shell_radius, bounds.r_max), 1.0, n)
    phi = rng.uniform(0.0, 2.0 * math.pi, n)
    rho = shell_radius * np.sqrt(np.maximum(1.0 - u * u, 0.0))
    return np.column_stack((rho * np.cos(phi), rho * np.sin(phi), shell_radius * u))


def sample_annulus_distances(
    bounds: CapBounds,
    lam_ring: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Distances of one Poisson draw on the equivalent planar annulus.

    Used to exercise the cap-to-annulus replacement directly; the cap
    sampler above is the primary (transform-free) route.
    """
    if lam_ring < 0:
        raise ValueError("density must be nonnegative")
    area = annulus_area(bounds)
    if area == 0.0 or lam_ring == 0.0:
        return np.empty(0)
    n = rng.poisson(lam_ring * area)
    if n == 0:
        return np.empty(0)
    u = rng.uniform(0.0, 1.0, n)
    return np.sqrt(bounds.r_min**2 + u * (bounds.r_max**2 - bounds.r_min**2))


def sample_disk_distances(
    radius: float,
    density: float,
    rng: np.random.Generator,
    inner_radius: float = 0.0,
) -> np.ndarray:
    """Planar distances of one Poisson draw on a disk (or annulus) around the origin."""
    if density < 0:
        raise ValueError("density must be nonnegative")
    if radius <= inner_radius or density == 0.0:
        return np.empty(0)
    area = math.pi * (radius**2 - inner_radius**2)
    n = rng.poisson(density * area)
    if n == 0:
        return np.empty(0)
    u = rng.uniform(0.0, 1.0, n)
    return np.sqrt(inner_radius**2 + u * (radius**2 - inner_radius**2))
