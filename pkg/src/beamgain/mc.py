"""Seeded Monte Carlo sampling of beam and antenna selection gains.

Randomness comes from numpy's Philox4x64 counter-based generator, keyed per
chunk; complex Gaussians are drawn by Box-Muller on pairs of uniforms. A run
is split into fixed-size chunks whose keys derive from ``seed`` and the chunk
index only, so any execution order (serial or threaded) yields the same
multiset of samples.
"""

from __future__ import annotations

import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .beams import ArrayConfig, butler_matrix, los_vector
from .dist import RicianParams

__all__ = [
    "EmpiricalCdf",
    "SimConfig",
    "chunk_seed",
    "ks_distance",
    "read_samples",
    "run_simulation",
    "sample_channel",
    "sample_channels",
    "selection_gains",
    "write_samples",
]

_MASK64 = (1 << 64) - 1
DEFAULT_CHUNK = 1 << 16


def _splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def chunk_seed(seed: int, chunk: int) -> int:
    """Key of chunk ``chunk``: ``seed XOR splitmix64(chunk)``."""
    return (int(seed) & _MASK64) ^ _splitmix64(int(chunk))


@dataclass(frozen=True)
class SimConfig:
    n_samples: int
    seed: int
    theta: float
    cfg: ArrayConfig
    rician: RicianParams
    chunk_size: int = DEFAULT_CHUNK

    def __post_init__(self):
        if int(self.n_samples) != self.n_samples or self.n_samples < 1:
            raise ValueError(f"n_samples must be a positive integer, got {self.n_samples!r}")
        if not 0 <= int(self.seed) <= _MASK64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be positive")

    @property
    def n_chunks(self) -> int:
        return -(-self.n_samples // self.chunk_size)

    def chunk_length(self, chunk: int) -> int:
        return min(self.chunk_size, self.n_samples - chunk * self.chunk_size)


@dataclass(frozen=True)
class EmpiricalCdf:
    """Sorted samples of a gain plus the seed that produced them."""

    sorted_samples: np.ndarray
    seed: int | None = None
    label: str = ""

    def __post_init__(self):
        s = np.asarray(self.sorted_samples, dtype=float)
        if s.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if s.size > 1 and np.any(np.diff(s) < 0):
            s = np.sort(s)
        object.__setattr__(self, "sorted_samples", s)

    @property
    def n(self) -> int:
        return self.sorted_samples.size

    def __call__(self, x):
        """Fraction of samples <= x."""
        return np.searchsorted(self.sorted_samples, x, side="right") / self.n

    @property
    def mean(self) -> float:
        return float(np.mean(self.sorted_samples))

    @property
    def std_error(self) -> float:
        return float(np.std(self.sorted_samples, ddof=1) / math.sqrt(self.n)) if self.n > 1 else math.inf


def _complex_normals(rng: np.random.Generator, shape) -> np.ndarray:
    """Unit-variance circularly symmetric complex Gaussians via Box-Muller."""
    u1 = rng.random(shape)
    u2 = rng.random(shape)
    radius = np.sqrt(-np.log1p(-u1))
    return radius * np.exp(2j * math.pi * u2)


def sample_channels(sim: SimConfig, chunk: int) -> np.ndarray:
    """Channel vectors of one chunk, shape ``(chunk_length, M)``."""
    if not 0 <= chunk < sim.n_chunks:
        raise ValueError(f"chunk index {chunk} out of range 0..{sim.n_chunks - 1}")
    n = sim.chunk_length(chunk)
    h_los = los_vector(sim.theta, sim.cfg)
    if sim.rician.deterministic:
        return np.broadcast_to(h_los, (n, sim.cfg.M)).copy()
    rng = np.random.Generator(np.random.Philox(key=chunk_seed(sim.seed, chunk)))
    h_nlos = _complex_normals(rng, (n, sim.cfg.M))
    return sim.rician.los_weight * h_los[None, :] + sim.rician.nlos_weight * h_nlos


def sample_channel(sim: SimConfig, position: int) -> np.ndarray:
    """The channel vector at stream position ``position`` (0-based)."""
    if not 0 <= position < sim.n_samples:
        raise ValueError(f"position {position} out of range")
    chunk, offset = divmod(position, sim.chunk_size)
    return sample_channels(sim, chunk)[offset]


def selection_gains(h: np.ndarray, cfg: ArrayConfig) -> tuple:
    """Best-beam gain ``max_m |b_m^T h|^2`` and best-antenna gain ``max_m |h_m|^2``.

    ``h`` may be a single vector or a stack of shape ``(n, M)``.
    """
    h = np.asarray(h)
    if h.shape[-1] != cfg.M:
        raise ValueError(f"channel length {h.shape[-1]} does not match M={cfg.M}")
    beams = np.abs(h @ butler_matrix(cfg).T) ** 2
    ants = np.abs(h) ** 2
    beam, ant = beams.max(axis=-1), ants.max(axis=-1)
    if h.ndim == 1:
        return float(beam), float(ant)
    return beam, ant


def _run_chunk(sim: SimConfig, chunk: int):
    return selection_gains(sample_channels(sim, chunk), sim.cfg)


def run_simulation(sim: SimConfig, workers: int = 1) -> tuple[EmpiricalCdf, EmpiricalCdf]:
    """Empirical CDFs of beam- and antenna-selection gains."""
    chunks = range(sim.n_chunks)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: _run_chunk(sim, c), chunks))
    else:
        parts = [_run_chunk(sim, c) for c in chunks]
    beam = np.sort(np.concatenate([p[0] for p in parts]))
    ant = np.sort(np.concatenate([p[1] for p in parts]))
    return EmpiricalCdf(beam, sim.seed, "beam"), EmpiricalCdf(ant, sim.seed, "antenna")


def ks_distance(emp: EmpiricalCdf, analytic) -> float:
    """Kolmogorov-Smirnov distance between samples and a CDF.

    ``analytic`` is a callable or any object with a vectorized ``cdf``. Both
    one-sided gaps are taken at each sample point, which is where the
    supremum of ``|F_n - F|`` is attained for continuous ``F``.
    """
    if emp.n == 0:
        raise ValueError("empty sample")
    cdf = analytic.cdf if hasattr(analytic, "cdf") else analytic
    x = emp.sorted_samples
    F = np.asarray(cdf(x), dtype=float)
    n = emp.n
    # Ties: F_n jumps to the count of samples <= x at the last tied point.
    above = np.searchsorted(x, x, side="right") / n
    below = np.searchsorted(x, x, side="left") / n
    return float(min(1.0, max(np.max(above - F), np.max(F - below), 0.0)))


# ---------------------------------------------------------------------------
# Binary sample dumps
# ---------------------------------------------------------------------------

_MAGIC = b"BGSAMP01"
# magic, n, seed, M, spacing, K, theta, label length
_HEADER = struct.Struct("<8sQQIdddH")


def write_samples(path, emp: EmpiricalCdf, sim: SimConfig) -> None:
    """Little-endian dump: fixed header, UTF-8 label, then n float64 samples."""
    label = emp.label.encode("utf-8")
    header = _HEADER.pack(
        _MAGIC, emp.n, int(sim.seed) & _MASK64, sim.cfg.M, sim.cfg.spacing,
        sim.rician.K, float(sim.theta), len(label),
    )
    with open(Path(path), "wb") as fh:
        fh.write(header)
        fh.write(label)
        fh.write(emp.sorted_samples.astype("<f8").tobytes())


def read_samples(path) -> tuple[EmpiricalCdf, dict]:
    with open(Path(path), "rb") as fh:
        raw = fh.read()
    magic, n, seed, M, spacing, K, theta, label_len = _HEADER.unpack_from(raw, 0)
    if magic != _MAGIC:
        raise ValueError(f"{path}: not a beamgain sample dump")
    offset = _HEADER.size
    label = raw[offset : offset + label_len].decode("utf-8")
    offset += label_len
    data = np.frombuffer(raw, dtype="<f8", count=n, offset=offset).astype(float)
    meta = {"n": n, "seed": seed, "M": M, "spacing": spacing, "K": K, "theta": theta}
    return EmpiricalCdf(data, seed, label), meta
