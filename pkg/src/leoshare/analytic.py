"""Closed-form engine: coverage and ergodic spectral efficiency.

The receiver conditions on having at least one serving node in its visible
cap and on the serving distance r (nearest in-tier node). Coverage at SINR
threshold gamma reduces to derivatives of the Laplace transform of the
aggregated interference-plus-noise power,

    L(s) = exp( -s sigma^2 - sum_tiers 2 pi lam integral (1 - B(s, w)) w dw ),

where each tier's bracket B is the fading-averaged per-interferer factor:
a finite Shadowed-Rician series for links received by or from a satellite,
and (1 + s G P w^-alpha / m)^-m for Nakagami terrestrial links. The ergodic
spectral efficiency integrates the unconditional coverage against
log2(e) / (1 + gamma).

Radial integrals use adaptive quadrature with closed forms on the common
special cases (exponential satellite fading with alpha = 2, Rayleigh
terrestrial fading with alpha = 4). Laplace derivatives differentiate the
exponent under the integral sign and recombine with the Leibniz/Bell
recursion L^(n) = sum C(n-1,k) L^(k) g^(n-k).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.special import poch

from . import fading as fad
from .antenna import effective_gain
from .config import ParameterSet, QuadratureConfig, ScenarioConfig, Sharing
from .geometry import (
    CapBounds,
    bs_gain_boundary_distance,
    downlink_cap,
    ring_density,
    uplink_cap,
)

__all__ = [
    "NumericsError",
    "nonempty_probability",
    "nearest_distance_pdf",
    "nearest_distance_cdf",
    "serving_gain_power",
    "laplace_interference",
    "laplace_derivative",
    "conditional_coverage",
    "coverage_probability",
    "ergodic_se",
    "mean_interference",
    "mean_serving_tier_interference",
    "density_ratio_threshold",
    "se_lower_bound",
]

DEFAULT_QUADRATURE = QuadratureConfig()
_LOG_GAMMA_SPAN = 50.0  # integration range of ln(gamma) for the 'log' transform


class NumericsError(RuntimeError):
    """Adaptive quadrature failed to converge; the message names the integral."""


def _quad(func, lo, hi, quad: QuadratureConfig, label: str, rel_tol: float) -> float:
    if hi <= lo:
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(
            func, lo, hi, epsabs=quad.abs_tol, epsrel=rel_tol, limit=quad.max_subdivisions,
            full_output=1,
        )
    value, abserr = out[0], out[1]
    if len(out) >= 4:  # quadpack attached a convergence complaint
        if abserr > max(quad.abs_tol, 100.0 * rel_tol * abs(value)):
            raise NumericsError(f"{label}: {out[3].strip()} (estimate {value!r}, abserr {abserr!r})")
    return value


# --- nearest-node distance ----------------------------------------------------


def nonempty_probability(lam_ring: float, bounds: CapBounds) -> float:
    """P[at least one node in the cap] = 1 - exp(-lam * annulus area)."""
    if lam_ring < 0:
        raise ValueError("density must be nonnegative")
    exponent = lam_ring * math.pi * (bounds.r_max**2 - bounds.r_min**2)
    return -math.expm1(-exponent)


def nearest_distance_pdf(lam_ring: float, bounds: CapBounds, r) -> np.ndarray:
    """Density of the nearest-node distance, conditioned on a nonempty cap."""
    if lam_ring <= 0:
        raise ValueError("density must be positive for a nearest-node distance")
    r_arr = np.asarray(r, dtype=float)
    if np.any((r_arr < bounds.r_min - 1e-9) | (r_arr > bounds.r_max + 1e-9)):
        raise ValueError(f"distance outside cap bounds [{bounds.r_min}, {bounds.r_max}]")
    denom = nonempty_probability(lam_ring, bounds)
    if denom <= 0:
        raise ValueError("degenerate cap: nonempty probability is zero")
    out = (
        2.0 * math.pi * lam_ring * r_arr
        * np.exp(-lam_ring * math.pi * (r_arr**2 - bounds.r_min**2))
        / denom
    )
    return out if out.shape else float(out)


def nearest_distance_cdf(lam_ring: float, bounds: CapBounds, r) -> np.ndarray:
    """CDF companion of :func:`nearest_distance_pdf` (used by the MC checks)."""
    r_arr = np.clip(np.asarray(r, dtype=float), bounds.r_min, bounds.r_max)
    denom = nonempty_probability(lam_ring, bounds)
    num = -np.expm1(-lam_ring * math.pi * (r_arr**2 - bounds.r_min**2))
    out = num / denom
    return out if out.shape else float(out)


# --- interference tiers --------------------------------------------------------


@dataclass(frozen=True)
class _Tier:
    label: str
    fading: str        # 'sr' | 'nakagami'
    lam: float         # planar intensity after the ring transform (or disk density)
    gain_power: float  # effective link gain * transmit power [W]
    alpha: float
    lo: float
    hi: float
    from_serving_distance: bool = False  # lower limit replaced by the serving distance


@lru_cache(maxsize=256)
def _tiers(cfg: ScenarioConfig) -> tuple:
    geom, gains = cfg.geometry, cfg.gains
    serving_cap = cfg.serving_cap()
    tiers = []
    if cfg.is_uplink:
        tiers.append(_Tier(
            label="co-tier satellite users",
            fading="sr",
            lam=cfg.serving_ring_density,
            gain_power=effective_gain(gains, ("sat_user", "sat")) * cfg.sat_user_power,
            alpha=cfg.sat_path_loss_exp,
            lo=serving_cap.r_min,
            hi=serving_cap.r_max,
            from_serving_distance=True,
        ))
        if cfg.sharing is Sharing.UL_SAT_DL_TERR:
            cap = uplink_cap(geom, "bs")
            boundary = bs_gain_boundary_distance(geom)
            lam = ring_density(cfg.bs_density, geom.bs_radius, geom.sat_radius)
            tiers.append(_Tier(
                label="BSs (low side lobe)",
                fading="sr",
                lam=lam,
                gain_power=effective_gain(gains, ("bs", "sat"), bs_level="low") * cfg.bs_power,
                alpha=cfg.sat_path_loss_exp,
                lo=cap.r_min,
                hi=boundary,
            ))
            tiers.append(_Tier(
                label="BSs (high side lobe)",
                fading="sr",
                lam=lam,
                gain_power=effective_gain(gains, ("bs", "sat"), bs_level="high") * cfg.bs_power,
                alpha=cfg.sat_path_loss_exp,
                lo=boundary,
                hi=cap.r_max,
            ))
        else:
            cap = uplink_cap(geom, "terr_user")
            tiers.append(_Tier(
                label="terrestrial users (uplink cap)",
                fading="sr",
                lam=ring_density(cfg.terr_user_density, geom.terr_user_radius, geom.sat_radius),
                gain_power=effective_gain(gains, ("terr_user", "sat")) * cfg.terr_user_power,
                alpha=cfg.sat_path_loss_exp,
                lo=cap.r_min,
                hi=cap.r_max,
            ))
    else:
        tiers.append(_Tier(
            label="co-tier satellites",
            fading="sr",
            lam=cfg.serving_ring_density,
            gain_power=effective_gain(gains, ("sat", "sat_user")) * cfg.sat_power,
            alpha=cfg.sat_path_loss_exp,
            lo=serving_cap.r_min,
            hi=serving_cap.r_max,
            from_serving_distance=True,
        ))
        if cfg.sharing is Sharing.DL_SAT_DL_TERR:
            cap = downlink_cap(geom, "bs")
            tiers.append(_Tier(
                label="BSs (downlink cap)",
                fading="nakagami",
                lam=ring_density(cfg.bs_density, geom.bs_radius, geom.sat_user_radius),
                gain_power=effective_gain(gains, ("bs", "sat_user")) * cfg.bs_power,
                alpha=cfg.terr_path_loss_exp,
                lo=cap.r_min,
                hi=cap.r_max,
            ))
        else:
            tiers.append(_Tier(
                label="terrestrial users (visibility disk)",
                fading="nakagami",
                lam=cfg.terr_user_density,
                gain_power=effective_gain(gains, ("terr_user", "sat_user")) * cfg.terr_user_power,
                alpha=cfg.terr_path_loss_exp,
                lo=0.0,
                hi=geom.terr_user_disk_radius,
            ))
    return tuple(tiers)


def serving_gain_power(cfg: ScenarioConfig) -> float:
    """Aligned-beam effective gain times transmit power of the serving link [W]."""
    link = ("sat_user", "sat") if cfg.is_uplink else ("sat", "sat_user")
    return effective_gain(cfg.gains, link, aligned=True) * cfg.serving_power


# --- per-tier exponent terms ----------------------------------------------------


def _sr_bracket(params: fad.ShadowedRicianParams, u) -> np.ndarray:
    """E[exp(-u H)] for Shadowed-Rician power H (finite series in u >= 0)."""
    a = params.decay_rate
    acc = 0.0
    for z, coeff in enumerate(params.zeta):
        acc = acc + coeff * math.factorial(z) / (a + u) ** (z + 1)
    return acc


def _tier_term(cfg: ScenarioConfig, tier: _Tier, s: float, order: int, lo: float,
               quad: QuadratureConfig) -> float:
    """d^order/ds^order of the tier's exponent contribution at s.

    order 0 returns -2 pi lam * integral (1 - B) w dw; higher orders return
    2 pi lam * integral d^k B / ds^k w dw (sign carried by the integrand).
    """
    if tier.lam == 0.0 or lo >= tier.hi:
        return 0.0
    if s == 0.0 and order == 0:
        return 0.0
    gp = tier.gain_power
    if order == 0:
        closed = _closed_term(cfg, tier, s, lo)
        if closed is not None:
            return closed

        if tier.fading == "sr":
            p = cfg.sat_fading

            def integrand(w):
                return (1.0 - _sr_bracket(p, s * gp * w**-tier.alpha)) * w
        else:
            m = cfg.terr_fading.m

            def integrand(w):
                return (1.0 - (1.0 + s * gp * w**-tier.alpha / m) ** -m) * w

        val = _quad(integrand, lo, tier.hi, quad, f"radial integral, {tier.label}", quad.rel_tol_radial)
        return -2.0 * math.pi * tier.lam * val

    k = order
    if tier.fading == "sr":
        p = cfg.sat_fading
        a = p.decay_rate

        def integrand(w):
            u = s * gp * w**-tier.alpha
            gpk = (gp * w**-tier.alpha) ** k
            acc = 0.0
            for z, coeff in enumerate(p.zeta):
                acc += coeff * math.factorial(z + k) / (a + u) ** (z + k + 1)
            return (-1.0) ** k * gpk * acc * w
    else:
        m = cfg.terr_fading.m

        def integrand(w):
            x = gp * w**-tier.alpha / m
            return (-1.0) ** k * poch(m, k) * x**k * (1.0 + s * x) ** -(m + k) * w

    val = _quad(integrand, lo, tier.hi, quad, f"radial integral (order {k}), {tier.label}",
                quad.rel_tol_radial)
    return 2.0 * math.pi * tier.lam * val


def _closed_term(cfg: ScenarioConfig, tier: _Tier, s: float, lo: float) -> float | None:
    """Closed-form tier exponent for the common fading/path-loss special cases."""
    q = s * tier.gain_power
    if q == 0.0:
        return 0.0
    hi = tier.hi
    if tier.fading == "sr" and cfg.sat_fading.m == 1 and tier.alpha == 2.0:
        a = cfg.sat_fading.decay_rate
        # integral of q w / (a w^2 + q): (q / 2a) ln((a hi^2 + q)/(a lo^2 + q))
        val = (q / (2.0 * a)) * math.log1p(a * (hi * hi - lo * lo) / (a * lo * lo + q))
        return -2.0 * math.pi * tier.lam * val
    if tier.fading == "nakagami" and cfg.terr_fading.m == 1:
        if tier.alpha == 4.0:
            sq = math.sqrt(q)
            val = (sq / 2.0) * (math.atan(hi * hi / sq) - math.atan(lo * lo / sq))
            return -2.0 * math.pi * tier.lam * val
        if tier.alpha == 2.0:
            val = (q / 2.0) * math.log1p((hi * hi - lo * lo) / (lo * lo + q))
            return -2.0 * math.pi * tier.lam * val
    return None


def _log_laplace_derivs(cfg: ScenarioConfig, r: float, s: float, max_order: int,
                        quad: QuadratureConfig) -> list[float]:
    """[g(s), g'(s), ..., g^(max_order)(s)] for the exponent g of L = e^g."""
    tiers = _tiers(cfg)
    out = []
    for k in range(max_order + 1):
        term = -s * cfg.noise_power if k == 0 else (-cfg.noise_power if k == 1 else 0.0)
        for tier in tiers:
            lo = max(tier.lo, r) if tier.from_serving_distance else tier.lo
            term += _tier_term(cfg, tier, s, k, lo, quad)
        out.append(term)
    return out


def _check_serving_distance(cfg: ScenarioConfig, r: float) -> None:
    cap = cfg.serving_cap()
    if not (cap.r_min - 1e-6 <= r <= cap.r_max + 1e-6):
        raise ValueError(f"serving distance {r} outside cap bounds [{cap.r_min}, {cap.r_max}]")


def laplace_interference(cfg: ScenarioConfig, r: float, s: float,
                         quad: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Conditional Laplace transform of interference-plus-noise power at s >= 0."""
    if s < 0:
        raise ValueError("Laplace argument s must be nonnegative")
    _check_serving_distance(cfg, r)
    g = _log_laplace_derivs(cfg, r, s, 0, quad)[0]
    return math.exp(g)


def laplace_derivative(cfg: ScenarioConfig, r: float, s: float, v: int,
                       quad: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """v-th derivative of the conditional Laplace transform with respect to s.

    The sign alternates so that (-1)^v * derivative >= 0. Orders are limited
    to the Shadowed-Rician shadowing order minus one, which is all the
    coverage expansion ever needs.
    """
    if not 0 <= v <= cfg.sat_fading.m - 1:
        raise ValueError(f"derivative order {v} outside 0..{cfg.sat_fading.m - 1}")
    if s < 0:
        raise ValueError("Laplace argument s must be nonnegative")
    _check_serving_distance(cfg, r)
    g = _log_laplace_derivs(cfg, r, s, v, quad)
    derivs = [math.exp(g[0])]
    for n in range(1, v + 1):
        derivs.append(math.fsum(
            math.comb(n - 1, k) * derivs[k] * g[n - k] for k in range(n)
        ))
    return derivs[v]


# --- coverage and spectral efficiency -------------------------------------------


def _laplace_derivs_all(cfg: ScenarioConfig, r: float, s: float, max_order: int,
                        quad: QuadratureConfig) -> list[float]:
    g = _log_laplace_derivs(cfg, r, s, max_order, quad)
    derivs = [math.exp(g[0])]
    for n in range(1, max_order + 1):
        derivs.append(math.fsum(
            math.comb(n - 1, k) * derivs[k] * g[n - k] for k in range(n)
        ))
    return derivs


def conditional_coverage(cfg: ScenarioConfig, gamma: float, r: float,
                         quad: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """P[SINR >= gamma | serving distance r, nonempty serving cap].

    Expands the Shadowed-Rician CCDF of the serving fade into the Gamma
    mixture (weights sum to one) and applies E[I^v e^{-sI}] =
    (-1)^v L^(v)(s) at s = (beta - c) gamma r^alpha / (G1 P).
    """
    if gamma < 0:
        raise ValueError("SINR threshold must be nonnegative")
    if gamma == 0.0:
        return 1.0
    p = cfg.sat_fading
    s0 = p.decay_rate * gamma * r**cfg.sat_path_loss_exp / serving_gain_power(cfg)
    m = p.m
    if m == 1:
        g = _log_laplace_derivs(cfg, r, s0, 0, quad)[0]
        return min(max(math.exp(g), 0.0), 1.0)
    derivs = _laplace_derivs_all(cfg, r, s0, m - 1, quad)
    # tail weights W_v = sum_{z >= v} w_z let the double sum collapse to one pass
    tail = np.cumsum(np.asarray(p.weights)[::-1])[::-1]
    acc = 0.0
    for v in range(m):
        acc += tail[v] * (s0**v / math.factorial(v)) * (-1.0) ** v * derivs[v]
    return min(max(acc, 0.0), 1.0)


def coverage_probability(cfg: ScenarioConfig, gamma: float,
                         quad: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Unconditional P[SINR >= gamma], including the nonempty-cap factor."""
    if gamma < 0:
        raise ValueError("SINR threshold must be nonnegative")
    cap = cfg.serving_cap()
    lam = cfg.serving_ring_density
    if lam == 0.0 or cap.area == 0.0:
        return 0.0
    p_serve = nonempty_probability(lam, cap)
    if gamma == 0.0:
        return p_serve

    def integrand(r):
        return conditional_coverage(cfg, gamma, r, quad) * nearest_distance_pdf(lam, cap, r)

    val = _quad(integrand, cap.r_min, cap.r_max, quad, "serving-distance integral",
                quad.rel_tol_outer)
    return min(max(p_serve * val, 0.0), 1.0)


def ergodic_se(cfg: ScenarioConfig, quad: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Ergodic spectral efficiency E[log2(1 + SINR)] [bit/s/Hz]."""
    cap = cfg.serving_cap()
    if cfg.serving_ring_density == 0.0 or cap.area == 0.0:
        return 0.0
    if quad.gamma_transform == "rational":
        def integrand(t):
            return coverage_probability(cfg, t / (1.0 - t), quad) / (1.0 - t)

        val = _quad(integrand, 0.0, 1.0, quad, "SINR-threshold integral", quad.rel_tol_outer)
    else:
        def integrand(u):
            gamma = math.exp(u)
            return coverage_probability(cfg, gamma, quad) * gamma / (1.0 + gamma)

        val = _quad(integrand, -_LOG_GAMMA_SPAN, _LOG_GAMMA_SPAN, quad,
                    "SINR-threshold integral", quad.rel_tol_outer)
    return val * math.log2(math.e)


# --- mean interference, bounds, thresholds ---------------------------------------


def _campbell_radial(lo: float, hi: float, alpha: float, quad: QuadratureConfig,
                     label: str) -> float:
    """integral_lo^hi w^(1-alpha) dw with closed forms for alpha in {2, 4}."""
    if hi <= lo:
        return 0.0
    if lo <= 0.0:
        raise ValueError(f"{label}: mean interference diverges at distance zero; "
                         "use a positive inner exclusion radius")
    if alpha == 2.0:
        return math.log(hi / lo)
    if alpha == 4.0:
        return 0.5 * (lo**-2 - hi**-2)
    return _quad(lambda w: w ** (1.0 - alpha), lo, hi, quad, label, quad.rel_tol_radial)


def mean_interference(cfg: ScenarioConfig, quad: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Mean aggregate terrestrial-tier interference power [W] (Campbell sum).

    The downlink terrestrial-user disk uses the configured exclusion radius
    as its inner limit; the Laplace-transform route keeps integrating from
    zero, where it converges without help.
    """
    e_h_sat = fad.sr_power_mean(cfg.sat_fading)
    total = 0.0
    for tier in _tiers(cfg):
        if tier.from_serving_distance:
            continue
        lo = tier.lo
        if lo == 0.0:
            lo = cfg.terr_user_exclusion_radius
        e_h = e_h_sat if tier.fading == "sr" else 1.0
        radial = _campbell_radial(lo, tier.hi, tier.alpha, quad, f"Campbell integral, {tier.label}")
        total += 2.0 * math.pi * tier.lam * tier.gain_power * e_h * radial
    return total


def mean_serving_tier_interference(cfg: ScenarioConfig,
                                   quad: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Mean in-tier (satellite-band) interference power [W].

    Campbell's integral runs from the serving distance outward; the outer
    expectation is over the nearest-node distance density.
    """
    cap = cfg.serving_cap()
    lam = cfg.serving_ring_density
    if lam == 0.0 or cap.area == 0.0:
        return 0.0
    tier = _tiers(cfg)[0]
    e_h = fad.sr_power_mean(cfg.sat_fading)

    def integrand(r):
        radial = _campbell_radial(r, tier.hi, tier.alpha, quad, "in-tier Campbell integral")
        return radial * nearest_distance_pdf(lam, cap, r)

    val = _quad(integrand, cap.r_min, cap.r_max, quad, "in-tier Campbell outer integral",
                quad.rel_tol_outer)
    return 2.0 * math.pi * tier.lam * tier.gain_power * e_h * val


def density_ratio_threshold(params: ParameterSet, family: str) -> float:
    """Terrestrial density ratio lambda_ut / lambda_b below which sharing with
    uplink terrestrial networks beats sharing with downlink ones (per the
    mean-interference lower bound on the spectral efficiency).

    The uplink form needs a satellite path-loss exponent of 2; the downlink
    form additionally needs a terrestrial exponent of 4.
    """
    geom, gains = params.geometry, params.gains
    if family == "ul":
        if params.sat_path_loss_exp != 2.0:
            raise ValueError("uplink threshold requires sat_path_loss_exp == 2")
        cap_b = uplink_cap(geom, "bs")
        cap_ut = uplink_cap(geom, "terr_user")
        boundary = bs_gain_boundary_distance(geom)
        g_low = effective_gain(gains, ("bs", "sat"), bs_level="low")
        g_high = effective_gain(gains, ("bs", "sat"), bs_level="high")
        g_ut = effective_gain(gains, ("terr_user", "sat"))
        num = g_low * math.log(boundary / cap_b.r_min) + g_high * math.log(cap_b.r_max / boundary)
        den = g_ut * math.log(cap_ut.r_max / cap_ut.r_min)
        power_alt = (params.bs_power * geom.bs_radius) / (params.terr_user_power * geom.terr_user_radius)
        return power_alt * num / den
    if family == "dl":
        if params.sat_path_loss_exp != 2.0 or params.terr_path_loss_exp != 4.0:
            raise ValueError("downlink threshold requires sat exponent 2 and terrestrial exponent 4")
        cap_b = downlink_cap(geom, "bs")
        eps = params.terr_user_exclusion_radius
        disk = geom.terr_user_disk_radius
        if not 0 < eps < disk:
            raise ValueError("need 0 < exclusion radius < disk radius for the downlink threshold")
        g_b = effective_gain(gains, ("bs", "sat_user"))
        g_ut = effective_gain(gains, ("terr_user", "sat_user"))
        num = g_b * (cap_b.r_min**-2 - cap_b.r_max**-2)
        den = g_ut * (eps**-2 - disk**-2)
        power_alt = (params.bs_power * geom.bs_radius) / (params.terr_user_power * geom.sat_user_radius)
        return power_alt * num / den
    raise ValueError(f"family must be 'ul' or 'dl', got {family!r}")


def se_lower_bound(cfg: ScenarioConfig, quad: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Jensen-style lower bound on the ergodic spectral efficiency [bit/s/Hz].

    log2(1 + exp(E[ln signal]) / (E[in-tier I] + E[terrestrial I] + noise)).
    The terrestrial-user mean uses the exclusion-radius convention, so the
    bound is meaningful only where near-field user interference is a rare
    event (it is, at the shipped presets' ratios).
    """
    cap = cfg.serving_cap()
    lam = cfg.serving_ring_density
    if lam == 0.0 or cap.area == 0.0:
        return 0.0

    def log_r_integrand(r):
        return math.log(r) * nearest_distance_pdf(lam, cap, r)

    e_log_r = _quad(log_r_integrand, cap.r_min, cap.r_max, quad,
                    "log serving-distance integral", quad.rel_tol_outer)
    e_log_signal = (
        math.log(serving_gain_power(cfg))
        + fad.sr_power_log_mean(cfg.sat_fading)
        - cfg.sat_path_loss_exp * e_log_r
    )
    denom = (
        mean_serving_tier_interference(cfg, quad)
        + mean_interference(cfg, quad)
        + cfg.noise_power
    )
    return math.log2(1.0 + math.exp(e_log_signal) / denom)
