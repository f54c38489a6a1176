"""Shadowed-Rician and Nakagami-m channel fading models.

Satellite links (any link whose receiver or transmitter is a satellite) fade
with a Shadowed-Rician law: line-of-sight power ``omega``, scatter half-power
``b``, integer shadowing order ``m``. For integer ``m`` the channel power has
a finite mixture-of-Gamma density

    f_H(x) = sum_z zeta(z) x^z exp(-(beta - c) x),   z = 0 .. m-1,

with ``beta = 1/(2b)`` and ``c = omega / (2b (2bm + omega))``. The mixture
weights ``zeta(z) z! / (beta - c)^(z+1)`` sum to one, which the constructor
asserts. Terrestrial links fade with a unit-mean Nakagami-m law, i.e. the
power is Gamma(m, 1/m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

__all__ = [
    "ShadowedRicianParams",
    "NakagamiParams",
    "sr_amplitude_pdf",
    "sr_power_pdf",
    "sr_power_ccdf",
    "sr_power_mean",
    "sr_power_log_mean",
    "sample_sr_power",
    "nakagami_power_log_mean",
    "sample_nakagami_power",
    "nakagami_laplace_factor",
]

_NORMALIZATION_TOL = 1e-10


@dataclass(frozen=True)
class ShadowedRicianParams:
    """Shadowed-Rician fading parameters with derived series constants."""

    m: int          # shadowing order (positive integer)
    b: float        # half average scatter power
    omega: float    # average line-of-sight power
    beta: float = field(init=False)
    c_sr: float = field(init=False)
    zeta: tuple = field(init=False)     # series coefficients zeta(0..m-1)
    weights: tuple = field(init=False)  # Gamma-mixture weights, sum to 1

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or self.m < 1:
            raise ValueError(f"shadowing order m must be a positive integer, got {self.m!r}")
        if self.b <= 0:
            raise ValueError("scatter half-power b must be positive")
        if self.omega < 0:
            raise ValueError("LOS power omega must be nonnegative")
        beta = 1.0 / (2.0 * self.b)
        c_sr = self.omega / (2.0 * self.b * (2.0 * self.b * self.m + self.omega))
        if not beta > c_sr >= 0.0:
            raise ValueError("derived constants violate beta > c >= 0")
        prefactor = (2.0 * self.b * self.m / (2.0 * self.b * self.m + self.omega)) ** self.m
        zeta = []
        weights = []
        for z in range(self.m):
            coeff = (
                prefactor
                * beta
                * (-1.0) ** z
                * special.poch(1 - self.m, z)
                * c_sr**z
                / math.factorial(z) ** 2
            )
            zeta.append(coeff)
            weights.append(coeff * math.factorial(z) / (beta - c_sr) ** (z + 1))
        total = math.fsum(weights)
        if abs(total - 1.0) > _NORMALIZATION_TOL:
            raise ValueError(f"power-density mixture weights sum to {total!r}, not 1")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "c_sr", c_sr)
        object.__setattr__(self, "zeta", tuple(zeta))
        object.__setattr__(self, "weights", tuple(weights))

    @property
    def decay_rate(self) -> float:
        """Exponential decay rate beta - c of the power density."""
        return self.beta - self.c_sr


@dataclass(frozen=True)
class NakagamiParams:
    """Unit-mean Nakagami-m fading; power is Gamma(m, 1/m)."""

    m: int

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or self.m < 1:
            raise ValueError(f"Nakagami order m must be a positive integer, got {self.m!r}")


def sr_amplitude_pdf(params: ShadowedRicianParams, x) -> np.ndarray:
    """Density of the Shadowed-Rician channel amplitude at ``x >= 0``."""
    shape = np.shape(x)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    m = params.m
    pref = (2.0 * params.b * m / (2.0 * params.b * m + params.omega)) ** m
    arg = params.c_sr * x * x  # confluent hypergeometric argument
    out = np.zeros_like(x)
    small = arg < 600.0
    out[small] = (
        pref * (x[small] / params.b) * np.exp(-x[small] ** 2 / (2.0 * params.b))
        * special.hyp1f1(m, 1.0, arg[small])
    )
    if np.any(~small):
        # large-argument asymptotic of 1F1(m; 1; z) in log space; the tail decays
        # like exp(-(beta - c) x^2), so this branch only shapes deep-underflow mass
        z = arg[~small]
        log_hyp = z + (m - 1.0) * np.log(z) - special.gammaln(m) + np.log1p((m - 1.0) ** 2 / z)
        log_pdf = (
            math.log(pref) + np.log(x[~small] / params.b)
            - x[~small] ** 2 / (2.0 * params.b) + log_hyp
        )
        out[~small] = np.exp(log_pdf)
    return np.where(x >= 0, out, 0.0).reshape(shape)


def sr_power_pdf(params: ShadowedRicianParams, x) -> np.ndarray:
    """Density of the Shadowed-Rician channel power at ``x >= 0`` (finite series)."""
    x = np.asarray(x, dtype=float)
    acc = np.zeros_like(x)
    for z, coeff in enumerate(params.zeta):
        acc = acc + coeff * x**z
    out = acc * np.exp(-params.decay_rate * x)
    return np.where(x >= 0, out, 0.0)


def sr_power_ccdf(params: ShadowedRicianParams, t) -> np.ndarray:
    """P[H >= t] for the Shadowed-Rician power H.

    Term-wise upper incomplete Gamma of the mixture: for threshold t,
    each Gamma(z+1, 1/(beta-c)) component contributes
    exp(-(beta-c) t) * sum_{v<=z} ((beta-c) t)^v / v!.
    """
    t = np.asarray(t, dtype=float)
    a = params.decay_rate
    acc = np.zeros_like(t)
    partial = np.zeros_like(t)  # sum_{v<=z} (a t)^v / v!
    for z, w in enumerate(params.weights):
        partial = partial + (a * t) ** z / math.factorial(z)
        acc = acc + w * partial
    out = acc * np.exp(-a * t)
    return np.where(t <= 0, 1.0, np.clip(out, 0.0, 1.0))


def sr_power_mean(params: ShadowedRicianParams) -> float:
    """E[H]; equals 2b + omega."""
    a = params.decay_rate
    return math.fsum(w * (z + 1) / a for z, w in enumerate(params.weights))


def sr_power_log_mean(params: ShadowedRicianParams) -> float:
    """E[ln H] via the Gamma-mixture log moment."""
    a = params.decay_rate
    return math.fsum(w * (special.digamma(z + 1) - math.log(a)) for z, w in enumerate(params.weights))


def sample_sr_power(params: ShadowedRicianParams, rng: np.random.Generator, size=None) -> np.ndarray:
    """Draw Shadowed-Rician channel powers (Gamma-mixture sampler)."""
    scale = 1.0 / params.decay_rate
    if params.m == 1:
        return rng.exponential(scale, size)
    n = 1 if size is None else int(np.prod(size))
    comp = rng.choice(params.m, size=n, p=np.asarray(params.weights))
    out = rng.gamma(comp + 1.0, scale, n)
    if size is None:
        return out[0]
    return out.reshape(size)


def nakagami_power_log_mean(params: NakagamiParams) -> float:
    """E[ln H] for unit-mean Nakagami-m power (Gamma(m, 1/m))."""
    return float(special.digamma(params.m) - math.log(params.m))


def sample_nakagami_power(params: NakagamiParams, rng: np.random.Generator, size=None) -> np.ndarray:
    """Draw unit-mean Nakagami-m channel powers."""
    if params.m == 1:
        return rng.standard_exponential(size)
    return rng.gamma(params.m, 1.0 / params.m, size)


def nakagami_laplace_factor(params: NakagamiParams, arg) -> np.ndarray:
    """E[exp(-arg * H)] = (1 + arg/m)^(-m) for Nakagami-m power H, arg >= 0."""
    arg = np.asarray(arg, dtype=float)
    if np.any(arg < 0):
        raise ValueError("Laplace argument must be nonnegative")
    return (1.0 + arg / params.m) ** (-params.m)
