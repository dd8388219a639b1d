"""Butler fixed-beamforming network on a uniform linear array.

Angles are in radians. The arbitrary phase of the line-of-sight component is
fixed to zero; it cancels in every squared magnitude used downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ArrayConfig",
    "BeamPattern",
    "beam_gain",
    "beam_pattern",
    "butler_matrix",
    "butler_row",
    "equivalent_angle",
    "first_beam_direction",
    "los_vector",
    "majorizing_vector",
    "sorted_partial_sums",
]

# Distance of phi to the nearest multiple of 2*pi below which the closed form
# is replaced by its limit M.
_SINGULAR_TOL = 1e-8


@dataclass(frozen=True)
class ArrayConfig:
    """Antenna count ``M`` and element spacing in carrier wavelengths.

    The spacing must exceed ``(M-1)/(2M)`` so that every beam has a main lobe.
    ``M = 1`` is accepted as a degenerate single-antenna configuration.
    """

    M: int
    spacing: float = 0.5

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1:
            raise ValueError(f"M must be a positive integer, got {self.M!r}")
        object.__setattr__(self, "M", int(self.M))
        if not math.isfinite(self.spacing) or self.spacing <= 0:
            raise ValueError(f"spacing must be positive and finite, got {self.spacing!r}")
        if not (self.M - 1) / (2 * self.M) < self.spacing:
            raise ValueError(
                f"spacing {self.spacing} too small for M={self.M}: "
                f"need spacing > {(self.M - 1) / (2 * self.M)}"
            )


@dataclass(frozen=True)
class BeamPattern:
    """Line-of-sight gains ``gammas[m-1]`` of the M beams at azimuth ``theta``."""

    theta: float
    gammas: np.ndarray

    @property
    def M(self) -> int:
        return self.gammas.size

    def sorted(self) -> np.ndarray:
        return np.sort(self.gammas)


def _check_index(m: int, cfg: ArrayConfig) -> int:
    if int(m) != m or not 1 <= m <= cfg.M:
        raise ValueError(f"beam index must be in 1..{cfg.M}, got {m!r}")
    return int(m)


def _check_theta(theta: float) -> float:
    theta = float(theta)
    if not math.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta!r}")
    return theta


def butler_row(m: int, cfg: ArrayConfig) -> np.ndarray:
    """Row ``m`` (1-based) of the M x M Butler matrix."""
    m = _check_index(m, cfg)
    k = np.arange(1, cfg.M + 1)
    return np.exp(1j * (2 * math.pi / cfg.M) * (m - 0.5) * k) / math.sqrt(cfg.M)


def butler_matrix(cfg: ArrayConfig) -> np.ndarray:
    """All Butler rows stacked; unitary."""
    m = np.arange(1, cfg.M + 1)[:, None]
    k = np.arange(1, cfg.M + 1)[None, :]
    return np.exp(1j * (2 * math.pi / cfg.M) * (m - 0.5) * k) / math.sqrt(cfg.M)


def los_vector(theta: float, cfg: ArrayConfig) -> np.ndarray:
    """Unit-modulus line-of-sight array response for azimuth ``theta``."""
    theta = _check_theta(theta)
    k = np.arange(cfg.M)
    return np.exp(-2j * math.pi * k * cfg.spacing * math.sin(theta))


def _phi(theta: float, cfg: ArrayConfig) -> np.ndarray:
    m = np.arange(1, cfg.M + 1)
    return 2 * math.pi * ((m - 0.5) / cfg.M - cfg.spacing * math.sin(theta))


def _eta(phi: np.ndarray, M: int) -> np.ndarray:
    """Array factor sin^2(M phi/2) / (M sin^2(phi/2)) with its removable
    singularity at multiples of 2*pi filled by the limit M."""
    wrapped = np.remainder(phi + math.pi, 2 * math.pi) - math.pi
    near = np.abs(wrapped) < _SINGULAR_TOL
    safe = np.where(near, 1.0, wrapped)
    val = np.sin(0.5 * M * safe) ** 2 / (M * np.sin(0.5 * safe) ** 2)
    return np.where(near, float(M), val)


def beam_gain(m: int, theta: float, cfg: ArrayConfig) -> float:
    """Deterministic line-of-sight gain of beam ``m`` at azimuth ``theta``."""
    m = _check_index(m, cfg)
    theta = _check_theta(theta)
    return float(_eta(_phi(theta, cfg)[m - 1 : m], cfg.M)[0])


def beam_pattern(theta: float, cfg: ArrayConfig) -> BeamPattern:
    theta = _check_theta(theta)
    return BeamPattern(theta, _eta(_phi(theta, cfg), cfg.M))


def first_beam_direction(cfg: ArrayConfig) -> float:
    """Azimuth ``arcsin(1 / (2 M spacing))`` where beam 1 peaks at gain M."""
    arg = 1.0 / (2 * cfg.M * cfg.spacing)
    if arg > 1.0:
        raise ValueError(
            f"spacing {cfg.spacing} too small: first beam direction undefined for M={cfg.M}"
        )
    return math.asin(arg)


def equivalent_angle(theta: float, cfg: ArrayConfig) -> float:
    """Angle in ``[0, nu]`` whose beam pattern is a permutation of the one at ``theta``.

    The pattern depends on ``theta`` only through the phase progression
    ``beta = 2 pi spacing sin(theta)``; shifting ``beta`` by ``2 pi / M``
    cyclically permutes the beams and negating it mirrors them. This covers
    the rear half-plane too, since only ``sin(theta)`` enters.
    """
    theta = _check_theta(theta)
    period = 2 * math.pi / cfg.M
    beta = 2 * math.pi * cfg.spacing * math.sin(theta)
    r = math.fmod(beta, period)
    if r < 0:
        r += period
    folded = min(r, period - r)
    return math.asin(min(1.0, folded / (2 * math.pi * cfg.spacing)))


def sorted_partial_sums(theta: float, cfg: ArrayConfig) -> np.ndarray:
    """Cumulative sums of the ascending-sorted pattern at ``theta`` in ``[0, nu]``."""
    theta = _check_theta(theta)
    nu = first_beam_direction(cfg)
    if not -1e-15 <= theta <= nu + 1e-15:
        raise ValueError(
            f"theta={theta} outside [0, nu={nu}]; map it first with equivalent_angle"
        )
    return np.cumsum(beam_pattern(theta, cfg).sorted())


def majorizing_vector(cfg: ArrayConfig) -> tuple[float, float]:
    """The two nonzero levels ``(a_M, b_M)`` of the vector majorizing the
    pattern between beams; each level occupies two slots."""
    if cfg.M < 4:
        raise ValueError(f"majorizing vector needs M >= 4, got M={cfg.M}")
    a = 1.0 / (cfg.M * math.sin(math.pi / (2 * cfg.M)) ** 2)
    return a, cfg.M / 2.0 - a
