"""Distributions of beam- and antenna-selection gains over Rician fading.

Every distribution here is a finite product of powers of

    Q_gamma(x) = F_ncx2(2 (K+1) x | 2, 2 K gamma),

the CDF of a single branch whose line-of-sight gain is ``gamma``. A single
beam is one factor, beam selection is the product over the beam pattern,
antenna selection is ``Q_1 ** M`` and ``W = Q_0``. :class:`GainCdf` stores
that factorization and evaluates it either in absolute terms (vectorized, for
integration and sample comparisons) or in log space with full relative
accuracy (for ordering checks).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import specfun
from .beams import ArrayConfig, beam_pattern, first_beam_direction, majorizing_vector

__all__ = [
    "GainCdf",
    "RicianParams",
    "antenna_dist",
    "antenna_selection_cdf",
    "antenna_selection_dist",
    "beam_selection_cdf",
    "beam_selection_dist",
    "beam_selection_logcdf",
    "bound_q",
    "bound_q_dist",
    "bound_q_quantile",
    "bound_w",
    "max_exponential_moments",
    "quantile_tightness",
    "resolve_theta",
    "selection_quantile",
    "single_beam_cdf",
    "single_beam_dist",
    "theta0_bounds",
    "theta0_lower_dist",
    "theta0_upper_dist",
]


@dataclass(frozen=True)
class RicianParams:
    """Rician K-factor in linear units. ``K = inf`` is the deterministic channel."""

    K: float

    def __post_init__(self):
        if math.isnan(self.K) or self.K < 0:
            raise ValueError(f"K must be >= 0, got {self.K!r}")
        object.__setattr__(self, "K", float(self.K))

    @classmethod
    def from_db(cls, k_db: float) -> "RicianParams":
        return cls(10.0 ** (k_db / 10.0))

    @property
    def deterministic(self) -> bool:
        return math.isinf(self.K)

    @property
    def los_weight(self) -> float:
        return 1.0 if self.deterministic else math.sqrt(self.K / (self.K + 1.0))

    @property
    def nlos_weight(self) -> float:
        return 0.0 if self.deterministic else math.sqrt(1.0 / (self.K + 1.0))


def _merge_factors(gammas, exponent: float = 1.0, rtol: float = 1e-12):
    merged: list[list[float]] = []
    for g in sorted(float(v) for v in gammas):
        g = max(g, 0.0)
        if g < 1e-13:
            g = 0.0
        if merged and abs(g - merged[-1][0]) <= rtol * max(1.0, g):
            merged[-1][1] += exponent
        else:
            merged.append([g, exponent])
    return tuple((g, e) for g, e in merged)


@dataclass(frozen=True)
class GainCdf:
    """CDF of a gain distributed as ``prod_j Q_{gamma_j}(x) ** e_j``.

    ``kind`` is a free-form label (``"beam_selection"``, ``"antenna"``, ...);
    ``params`` carries provenance such as ``M`` or ``theta``.
    """

    kind: str
    rician: RicianParams
    factors: tuple
    params: dict = field(default_factory=dict, compare=False)

    def _scaled(self, x):
        xa = np.asarray(x, dtype=float)
        if np.any(np.isnan(xa)) or np.any(xa < 0):
            raise ValueError("gain argument x must be >= 0")
        return 2.0 * (self.rician.K + 1.0) * xa

    @property
    def step_location(self) -> float:
        """Largest line-of-sight gain; the jump point when K is infinite."""
        return max((g for g, e in self.factors if e > 0), default=0.0)

    def cdf(self, x):
        """Vectorized CDF, absolute error around 1e-15."""
        if self.rician.deterministic:
            out = (np.asarray(x, dtype=float) >= self.step_location).astype(float)
            return float(out) if out.ndim == 0 else out
        y = self._scaled(x)
        out = np.ones(np.shape(y))
        for g, e in self.factors:
            if g == 0.0:
                f = -np.expm1(-0.5 * y)
            else:
                f = specfun.ncx2_cdf(y, 2.0 * self.rician.K * g)
            out = out * np.power(f, e)
        return float(out) if out.ndim == 0 else out

    def sf(self, x):
        if self.rician.deterministic:
            return 1.0 - self.cdf(x)
        y = self._scaled(x)
        log_cdf = np.zeros(np.shape(y))
        with np.errstate(divide="ignore"):
            for g, e in self.factors:
                if g == 0.0:
                    lf = np.log(-np.expm1(-0.5 * y))
                else:
                    lf = np.log(specfun.ncx2_cdf(y, 2.0 * self.rician.K * g))
                log_cdf = log_cdf + e * lf
        out = -np.expm1(log_cdf)
        return float(out) if out.ndim == 0 else out

    def logcdf(self, x):
        """Log CDF with full relative accuracy in both tails (scalar loop)."""
        if self.rician.deterministic:
            with np.errstate(divide="ignore"):
                return np.log(self.cdf(x))
        y = self._scaled(x)
        total = np.zeros(np.shape(y))
        with np.errstate(divide="ignore", invalid="ignore"):
            for g, e in self.factors:
                if g == 0.0:
                    t = 0.5 * y
                    lf = np.where(
                        t > math.log(2.0), np.log1p(-np.exp(-t)), np.log(-np.expm1(-t))
                    )
                else:
                    lf = specfun.ncx2_logcdf(y, 2.0 * self.rician.K * g)
                total = total + e * lf
        return float(total) if np.ndim(total) == 0 else total

    def __call__(self, x):
        return self.cdf(x)

    def quantile(self, p: float, tol: float = 1e-10) -> float:
        """Smallest ``x`` with ``cdf(x) >= p`` to within ``tol`` in probability."""
        p = float(p)
        if not 0.0 <= p < 1.0:
            raise ValueError(f"quantile requires 0 <= p < 1, got {p!r}")
        if p == 0.0:
            return 0.0
        if self.rician.deterministic:
            return self.step_location
        hi = 1.0
        while self.cdf(hi) < p:
            hi *= 2.0
        lo = 0.0 if hi == 1.0 else hi / 2.0
        x = brentq(lambda v: self.cdf(v) - p, lo, hi, xtol=1e-300, rtol=1e-15, maxiter=500)
        err = abs(self.cdf(x) - p)
        if err > tol:
            # Brent stops on the x-tolerance; fall back to plain bisection on p.
            a, b = lo, hi
            for _ in range(2000):
                x = 0.5 * (a + b)
                fx = self.cdf(x) - p
                if abs(fx) <= tol or b - a <= 4e-16 * b:
                    break
                if fx < 0:
                    a = x
                else:
                    b = x
        return x


# ---------------------------------------------------------------------------
# Factories
# ---------------------------------------------------------------------------

def single_beam_dist(m: int, theta: float, cfg: ArrayConfig, rician: RicianParams) -> GainCdf:
    g = float(beam_pattern(theta, cfg).gammas[m - 1]) if 1 <= m <= cfg.M else None
    if g is None:
        raise ValueError(f"beam index must be in 1..{cfg.M}, got {m!r}")
    return GainCdf("single_beam", rician, _merge_factors([g]), {"m": m, "theta": theta, "M": cfg.M})


def beam_selection_dist(theta: float, cfg: ArrayConfig, rician: RicianParams) -> GainCdf:
    gammas = beam_pattern(theta, cfg).gammas
    return GainCdf(
        "beam_selection", rician, _merge_factors(gammas), {"theta": float(theta), "M": cfg.M}
    )


def antenna_dist(rician: RicianParams) -> GainCdf:
    return GainCdf("antenna", rician, ((1.0, 1.0),))


def antenna_selection_dist(cfg: ArrayConfig, rician: RicianParams) -> GainCdf:
    return GainCdf("antenna_selection", rician, ((1.0, float(cfg.M)),), {"M": cfg.M})


def bound_q_dist(gamma: float, rician: RicianParams, power: float = 1.0) -> GainCdf:
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    return GainCdf("bound_q", rician, ((float(gamma), float(power)),), {"gamma": gamma})


def theta0_upper_dist(cfg: ArrayConfig, rician: RicianParams) -> GainCdf:
    """``Q_{a_M}^2``: dominates the CDF between beams."""
    a, _ = majorizing_vector(cfg)
    return GainCdf("theta0_upper", rician, ((a, 2.0),), {"M": cfg.M})


def theta0_lower_dist(cfg: ArrayConfig, rician: RicianParams) -> GainCdf:
    """``Q_{a_M}^2 Q_{b_M}^2 W^{M-4}``: dominated by the CDF between beams."""
    a, b = majorizing_vector(cfg)
    factors = [(b, 2.0), (a, 2.0)]
    if cfg.M > 4:
        factors.insert(0, (0.0, float(cfg.M - 4)))
    return GainCdf("theta0_lower", rician, tuple(factors), {"M": cfg.M})


# ---------------------------------------------------------------------------
# Scalar-style convenience functions
# ---------------------------------------------------------------------------

def single_beam_cdf(x, m: int, theta: float, cfg: ArrayConfig, rician: RicianParams):
    return single_beam_dist(m, theta, cfg, rician).cdf(x)


def beam_selection_cdf(x, theta: float, cfg: ArrayConfig, rician: RicianParams):
    return beam_selection_dist(theta, cfg, rician).cdf(x)


def beam_selection_logcdf(x, theta: float, cfg: ArrayConfig, rician: RicianParams):
    return beam_selection_dist(theta, cfg, rician).logcdf(x)


def antenna_selection_cdf(x, cfg: ArrayConfig, rician: RicianParams):
    return antenna_selection_dist(cfg, rician).cdf(x)


def bound_q(x, gamma: float, rician: RicianParams):
    return bound_q_dist(gamma, rician).cdf(x)


def bound_w(x, rician: RicianParams):
    """Exponential CDF ``1 - exp(-(K+1) x)``: a branch with no line of sight."""
    return bound_q_dist(0.0, rician).cdf(x)


def theta0_bounds(x, cfg: ArrayConfig, rician: RicianParams):
    """``(Q_{a_M}^2(x), Q_{a_M}^2(x) Q_{b_M}^2(x) W^{M-4}(x))``, which sandwich
    the beam-selection CDF at ``theta = 0`` from above and below."""
    return theta0_upper_dist(cfg, rician).cdf(x), theta0_lower_dist(cfg, rician).cdf(x)


def selection_quantile(p: float, theta: float, cfg: ArrayConfig, rician: RicianParams) -> float:
    return beam_selection_dist(theta, cfg, rician).quantile(p)


def bound_q_quantile(p: float, gamma: float, rician: RicianParams) -> float:
    """Inverse of ``Q_gamma`` through the noncentral chi-square quantile."""
    if rician.deterministic:
        return bound_q_dist(gamma, rician).quantile(p)
    return specfun.ncx2_quantile(p, 2.0 * rician.K * gamma) / (2.0 * (rician.K + 1.0))


def resolve_theta(theta, cfg: ArrayConfig) -> float:
    """Accept ``"zero"``/``"nu"`` symbols as well as numeric radians."""
    if isinstance(theta, str):
        if theta == "zero":
            return 0.0
        if theta == "nu":
            return first_beam_direction(cfg)
        raise ValueError(f"unknown symbolic angle {theta!r}")
    return float(theta)


# ---------------------------------------------------------------------------
# Quantile tightness diagnostics at the beam direction
# ---------------------------------------------------------------------------

def max_exponential_moments(count: int, rician: RicianParams) -> tuple[float, float]:
    """Mean and variance of ``W ** count``, the largest of ``count`` i.i.d.
    exponential gains with rate ``K + 1``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rate = rician.K + 1.0
    k = np.arange(1, count + 1, dtype=float)
    return math.fsum(1.0 / k) / rate, math.fsum(1.0 / k**2) / rate**2


def quantile_tightness(p: float, cfg: ArrayConfig, rician: RicianParams) -> dict:
    """How close ``F^{-1}(p | nu)`` sits to ``Q_M^{-1}(p)``.

    Returns the exact inner point ``x1 = Q_M^{-1}(p)``, its normal
    approximation, the beam-selection quantile ``x2`` and the outer point
    ``x3 = Q_M^{-1}(p / W^{M-1}(x1))`` (so ``x1 <= x2 <= x3``), plus a
    one-sided Chebyshev bound on ``1 - W^{M-1}(x1)``.
    """
    if not 0.0 < p < 1.0:
        raise ValueError("p must be in (0, 1)")
    if rician.deterministic or rician.K == 0:
        raise ValueError("tightness diagnostics need 0 < K < inf")
    if cfg.M < 2:
        raise ValueError("tightness diagnostics need M >= 2")
    K, M = rician.K, cfg.M
    x1 = bound_q_quantile(p, M, rician)
    z = specfun.gaussian_quantile(p)
    x1_normal = (0.5 + max(math.sqrt(2 * K * M + 0.5) + z, 0.0) ** 2) / (2 * (K + 1))
    mu, var = max_exponential_moments(M - 1, rician)
    w_max = float(bound_q_dist(0.0, rician, power=M - 1).cdf(x1))
    gap = x1 - mu
    chebyshev = var / (var + gap * gap) if gap > 0 else 1.0
    epsilon = var / (gap * gap) if gap > 0 else math.inf
    target = p / w_max if w_max > 0 else math.inf
    x3 = bound_q_quantile(target, M, rician) if target < 1 else math.inf
    x2 = beam_selection_dist(first_beam_direction(cfg), cfg, rician).quantile(p)
    return {
        "x1": x1,
        "x1_normal": x1_normal,
        "x2": x2,
        "x3": x3,
        "mean_wmax": mu,
        "var_wmax": var,
        "wmax_tail": 1.0 - w_max,
        "chebyshev_bound": chebyshev,
        "epsilon": epsilon,
    }
