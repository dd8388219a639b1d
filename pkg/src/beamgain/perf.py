"""Expected gain, ergodic capacity and outage of beam/antenna selection.

Exact values integrate the survival function, which needs only the CDFs:

    E[X]               = int_0^inf (1 - F(x)) dx
    E[log2(1 + rho X)] = int_0^inf rho / ((1 + rho x) ln 2) (1 - F(x)) dx

Approximations are the closed forms valid at the two extreme user angles,
``theta = nu`` (on a beam) and ``theta = 0`` (midway between two beams).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .beams import ArrayConfig, first_beam_direction, majorizing_vector
from .dist import (
    GainCdf,
    RicianParams,
    antenna_selection_dist,
    beam_selection_dist,
    bound_q_dist,
    bound_q_quantile,
    resolve_theta,
    theta0_upper_dist,
)

__all__ = [
    "IntegrationError",
    "PerfResult",
    "adaptive_simpson",
    "ergodic_capacity",
    "ergodic_capacity_approx",
    "expected_gain",
    "expected_gain_approx",
    "growth_diagnostics",
    "mean_capacity",
    "mean_gain",
    "outage_capacity",
    "outage_capacity_approx",
    "outage_probability",
    "outage_probability_approx",
]

TAIL_PROB = 1e-12


class IntegrationError(ArithmeticError):
    """Adaptive quadrature failed to meet its tolerance."""


@dataclass(frozen=True)
class PerfResult:
    exact: Optional[float]
    approx: float
    brackets: Optional[tuple] = None
    M: Optional[int] = None
    K: Optional[float] = None
    rho: Optional[float] = None
    theta: Optional[float] = None


def adaptive_simpson(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float = 1e-10,
    initial: int = 32,
    max_depth: int = 40,
) -> float:
    """Adaptive Simpson quadrature, refined level by level.

    ``f`` must accept an array. All intervals awaiting refinement at a level
    are evaluated in one call, so the cost is a handful of vectorized
    evaluations rather than one Python call per node. Each interval must
    meet ``|S2 - S1| <= 15 tol_i`` where ``tol_i`` is its share of ``tol``.
    """
    if not b > a:
        return 0.0
    edges = np.linspace(a, b, initial + 1)
    lo, hi = edges[:-1], edges[1:]
    mid = 0.5 * (lo + hi)
    vals = f(np.concatenate([lo, mid, hi[-1:]]))
    n = lo.size
    f_lo, f_mid = vals[:n], vals[n : 2 * n]
    f_hi = np.append(vals[1:n], vals[-1])
    whole = (hi - lo) / 6.0 * (f_lo + 4 * f_mid + f_hi)
    tols = np.full(n, tol / n)
    total = 0.0
    for _ in range(max_depth):
        qm_left = 0.5 * (lo + mid)
        qm_right = 0.5 * (mid + hi)
        fv = f(np.concatenate([qm_left, qm_right]))
        f_ql, f_qr = fv[: lo.size], fv[lo.size :]
        left = (mid - lo) / 6.0 * (f_lo + 4 * f_ql + f_mid)
        right = (hi - mid) / 6.0 * (f_mid + 4 * f_qr + f_hi)
        err = left + right - whole
        done = np.abs(err) <= 15.0 * tols
        total += float(np.sum((left + right + err / 15.0)[done]))
        keep = ~done
        if not np.any(keep):
            return total
        lo, mid, hi = lo[keep], mid[keep], hi[keep]
        f_lo, f_mid, f_hi = f_lo[keep], f_mid[keep], f_hi[keep]
        f_ql, f_qr = f_ql[keep], f_qr[keep]
        left, right, tols = left[keep], right[keep], tols[keep]
        lo, mid, hi = (
            np.concatenate([lo, mid]),
            np.concatenate([qm_left[keep], qm_right[keep]]),
            np.concatenate([mid, hi]),
        )
        f_lo, f_mid, f_hi = (
            np.concatenate([f_lo, f_mid]),
            np.concatenate([f_ql, f_qr]),
            np.concatenate([f_mid, f_hi]),
        )
        whole = np.concatenate([left, right])
        tols = np.concatenate([tols, tols]) / 2.0
    raise IntegrationError(f"adaptive Simpson did not converge on [{a}, {b}] with tol={tol}")


def _upper_limit(dist: GainCdf) -> float:
    return dist.quantile(1.0 - TAIL_PROB)


def mean_gain(dist: GainCdf, tol: float = 1e-10) -> float:
    """Mean of a gain distribution by integrating its survival function."""
    if dist.rician.deterministic:
        return dist.step_location
    return adaptive_simpson(dist.sf, 0.0, _upper_limit(dist), tol=tol)


def mean_capacity(dist: GainCdf, rho: float, tol: float = 1e-10) -> float:
    """``E[log2(1 + rho X)]`` for a gain distribution, integrated by parts."""
    if rho < 0:
        raise ValueError("rho must be >= 0")
    if rho == 0:
        return 0.0
    if dist.rician.deterministic:
        return math.log2(1.0 + rho * dist.step_location)
    scale = rho / math.log(2.0)
    return adaptive_simpson(
        lambda x: scale / (1.0 + rho * x) * dist.sf(x), 0.0, _upper_limit(dist), tol=tol
    )


def _extreme(theta, cfg: ArrayConfig) -> str:
    if isinstance(theta, str):
        if theta in ("zero", "nu"):
            return theta
        raise ValueError(f"unknown symbolic angle {theta!r}")
    nu = first_beam_direction(cfg)
    if abs(theta - nu) <= 1e-12:
        return "nu"
    if abs(theta) <= 1e-12:
        return "zero"
    raise ValueError(f"closed-form approximations exist only at theta=0 and theta=nu={nu}")


def _mean_levels(cfg: ArrayConfig, rician: RicianParams, which: str) -> float:
    K = rician.K
    level = cfg.M if which == "nu" else majorizing_vector(cfg)[0]
    if rician.deterministic:
        return level
    return (K * level + 1.0) / (K + 1.0)


def expected_gain(theta, cfg: ArrayConfig, rician: RicianParams) -> float:
    theta = resolve_theta(theta, cfg)
    return mean_gain(beam_selection_dist(theta, cfg, rician))


def expected_gain_approx(
    theta, cfg: ArrayConfig, rician: RicianParams, exact: bool = True
) -> PerfResult:
    """Closed-form mean at ``theta = nu`` or ``theta = 0``.

    At ``nu`` the approximation is ``(K M + 1)/(K + 1)``. At ``0`` the target
    is the mean of the maximum of two ``Q_{a_M}`` draws, bracketed by its
    single-draw mean ``mu`` and ``mu + sigma/sqrt(3)``; ``approx`` is the
    lower end, the dominant term.
    """
    which = _extreme(theta, cfg)
    th = resolve_theta(which, cfg)
    mean = _mean_levels(cfg, rician, which)
    brackets = None
    if which == "zero":
        a, _ = majorizing_vector(cfg)
        K = rician.K
        if rician.deterministic:
            brackets = (a, a)
        else:
            sigma = math.sqrt(2.0 * K * a + 1.0) / (K + 1.0)
            brackets = (mean, mean + sigma / math.sqrt(3.0))
    value = expected_gain(th, cfg, rician) if exact else None
    return PerfResult(value, mean, brackets, cfg.M, rician.K, None, th)


def ergodic_capacity(theta, cfg: ArrayConfig, rician: RicianParams, rho: float) -> float:
    theta = resolve_theta(theta, cfg)
    return mean_capacity(beam_selection_dist(theta, cfg, rician), rho)


def ergodic_capacity_approx(theta, cfg: ArrayConfig, rician: RicianParams, rho: float) -> float:
    which = _extreme(theta, cfg)
    if rho < 0:
        raise ValueError("rho must be >= 0")
    return math.log2(1.0 + rho * _mean_levels(cfg, rician, which))


def _threshold(c0: float, rho: float) -> float:
    if c0 < 0:
        raise ValueError("rate C0 must be >= 0")
    if rho <= 0:
        raise ValueError("rho must be > 0")
    return math.expm1(c0 * math.log(2.0)) / rho


def outage_probability(c0: float, theta, cfg: ArrayConfig, rician: RicianParams, rho: float) -> float:
    theta = resolve_theta(theta, cfg)
    return beam_selection_dist(theta, cfg, rician).cdf(_threshold(c0, rho))


def _approx_dist(which: str, cfg: ArrayConfig, rician: RicianParams) -> GainCdf:
    if which == "nu":
        return bound_q_dist(cfg.M, rician)
    return theta0_upper_dist(cfg, rician)


def outage_probability_approx(
    c0: float, theta, cfg: ArrayConfig, rician: RicianParams, rho: float
) -> float:
    which = _extreme(theta, cfg)
    return _approx_dist(which, cfg, rician).cdf(_threshold(c0, rho))


def _check_p0(p0: float) -> float:
    p0 = float(p0)
    if not 0.0 < p0 < 1.0:
        raise ValueError(f"outage target P0 must be in (0, 1), got {p0!r}")
    return p0


def outage_capacity(p0: float, theta, cfg: ArrayConfig, rician: RicianParams, rho: float) -> float:
    p0 = _check_p0(p0)
    theta = resolve_theta(theta, cfg)
    x = beam_selection_dist(theta, cfg, rician).quantile(p0)
    return math.log2(1.0 + rho * x)


def outage_capacity_approx(
    p0: float, theta, cfg: ArrayConfig, rician: RicianParams, rho: float
) -> float:
    p0 = _check_p0(p0)
    which = _extreme(theta, cfg)
    if which == "nu":
        x = bound_q_quantile(p0, cfg.M, rician)
    else:
        x = bound_q_quantile(math.sqrt(p0), majorizing_vector(cfg)[0], rician)
    return math.log2(1.0 + rho * x)


def growth_diagnostics(
    Ms: Sequence[int],
    rician: RicianParams,
    rho: float,
    spacing: float = 0.5,
    theta="nu",
) -> list[dict]:
    """Tabulate how mean gain and capacity scale with the antenna count.

    Beam selection grows like M in mean gain (log M in capacity); antenna
    selection grows like log M (log log M). Ratios are reported, never
    asserted.
    """
    Ms = [int(m) for m in Ms]
    if any(b <= a for a, b in zip(Ms, Ms[1:])):
        raise ValueError("Ms must be strictly ascending")
    rows = []
    for M in Ms:
        cfg = ArrayConfig(M, spacing)
        th = resolve_theta(theta, cfg)
        beam = beam_selection_dist(th, cfg, rician)
        ant = antenna_selection_dist(cfg, rician)
        beam_mean, ant_mean = mean_gain(beam), mean_gain(ant)
        beam_cap, ant_cap = mean_capacity(beam, rho), mean_capacity(ant, rho)
        log_m = math.log(M)
        rows.append(
            {
                "M": M,
                "beam_mean": beam_mean,
                "beam_mean_over_M": beam_mean / M,
                "antenna_mean": ant_mean,
                "antenna_mean_over_lnM": ant_mean / log_m if M > 1 else math.nan,
                "beam_capacity": beam_cap,
                "beam_capacity_over_log2M": beam_cap / math.log2(M) if M > 1 else math.nan,
                "antenna_capacity": ant_cap,
                "antenna_capacity_over_log2M": ant_cap / math.log2(M) if M > 1 else math.nan,
            }
        )
    return rows
