"""Scalar special functions for the two-degree-of-freedom noncentral chi-square law.

Two evaluation paths exist for the noncentral chi-square CDF:

* :func:`ncx2_cdf` is vectorized over ``x`` and accurate in the absolute sense
  (errors of order 1e-15). It is the workhorse for quadrature and for
  Kolmogorov-Smirnov comparisons against large samples.
* :func:`ncx2_logcdf` / :func:`ncx2_logsf` keep full *relative* accuracy in
  both tails, so products of many CDFs and their derivatives with respect to
  the noncentrality can be compared even when the CDF is 1e-40 or 1 - 1e-200.

The Marcum Q-function is evaluated independently by quadrature of its
defining integral, which gives a cross-check for the Poisson-mixture series.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special as _sp

__all__ = [
    "NoncentralChiSq2",
    "bessel_i0",
    "bessel_i0e",
    "chi2_cdf_even",
    "gaussian_cdf",
    "gaussian_quantile",
    "log_ncx2_cdf_ddelta",
    "marcum_q",
    "marcum_q_bounds",
    "ncx2_cdf",
    "ncx2_cdf_marcum",
    "ncx2_logcdf",
    "ncx2_logsf",
    "ncx2_pdf",
    "ncx2_quantile",
    "ncx2_sf",
    "sankaran_guess",
]

_SERIES_SWITCH = 30.0
_POISSON_MASS_TOL = 1e-16


def _check_finite(name, value):
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return arr


# ---------------------------------------------------------------------------
# Bessel I0
# ---------------------------------------------------------------------------

def _i0_series(x):
    """Power series sum (x/2)^(2k)/(k!)^2, vectorized; no exponential scaling."""
    q = 0.25 * x * x
    term = np.ones_like(x)
    total = np.ones_like(x)
    k = 0
    while True:
        k += 1
        term = term * q / (k * k)
        total = total + term
        if np.all(term <= 1e-17 * total):
            return total


def _i0e_asymptotic(x):
    """exp(-x) I0(x) from the large-argument expansion; valid for x > 30."""
    term = np.ones_like(x)
    total = np.ones_like(x)
    k = 0
    while True:
        k += 1
        term = term * (2 * k - 1) ** 2 / (8.0 * k * x)
        total = total + term
        if np.all(np.abs(term) <= 1e-17 * total) or k > 60:
            return total / np.sqrt(2.0 * math.pi * x)


def bessel_i0e(x):
    """Exponentially scaled modified Bessel function ``exp(-x) * I0(x)``, x >= 0."""
    arr = _check_finite("x", x)
    if np.any(arr < 0):
        raise ValueError("bessel_i0e requires x >= 0")
    flat = np.atleast_1d(arr).astype(float)
    out = np.empty_like(flat)
    small = flat <= _SERIES_SWITCH
    if np.any(small):
        xs = flat[small]
        out[small] = np.exp(-xs) * _i0_series(xs)
    if np.any(~small):
        out[~small] = _i0e_asymptotic(flat[~small])
    return out.reshape(arr.shape) if arr.ndim else float(out[0])


def bessel_i0(x):
    """Modified Bessel function of the first kind, order zero.

    Uses the power series up to x = 30 and the asymptotic expansion beyond,
    which keeps the relative error near machine precision everywhere the
    result is representable.
    """
    arr = _check_finite("x", x)
    if np.any(arr < 0):
        raise ValueError("bessel_i0 requires x >= 0")
    flat = np.atleast_1d(arr).astype(float)
    out = np.empty_like(flat)
    small = flat <= _SERIES_SWITCH
    if np.any(small):
        out[small] = _i0_series(flat[small])
    if np.any(~small):
        xl = flat[~small]
        with np.errstate(over="ignore"):
            out[~small] = np.exp(xl) * _i0e_asymptotic(xl)
    return out.reshape(arr.shape) if arr.ndim else float(out[0])


# ---------------------------------------------------------------------------
# Marcum Q
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)
_MARCUM_HALF_WIDTH = 40.0


def marcum_q(a: float, b: float) -> float:
    """First-order Marcum Q-function by quadrature of its defining integral.

    The integrand ``t exp(-(t-a)^2/2) * exp(-a t) I0(a t)`` is Gaussian-like
    with unit width around ``t = a``, so composite Gauss-Legendre panels of
    width 1/2 over ``[max(b, a-40), max(a, b)+40]`` capture it to roughly
    machine precision.
    """
    a = float(_check_finite("a", a))
    b = float(_check_finite("b", b))
    if a < 0 or b < 0:
        raise ValueError("marcum_q requires a >= 0 and b >= 0")
    lo = max(b, a - _MARCUM_HALF_WIDTH)
    hi = max(a, b) + _MARCUM_HALF_WIDTH
    if b >= a + _MARCUM_HALF_WIDTH:
        return 0.0
    n_panels = max(1, int(math.ceil((hi - lo) / 0.5)))
    edges = np.linspace(lo, hi, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    integrand = t * np.exp(-0.5 * (t - a) ** 2) * bessel_i0e(a * t)
    value = float(np.dot(w, integrand))
    return min(1.0, max(0.0, value))


def marcum_q_bounds(a: float, b: float) -> tuple[float, float]:
    """Closed-form lower/upper bounds on the Marcum Q-function.

    For ``a > b`` the lower bound ``1 - a/(a-b) exp(-(a-b)^2/2)`` applies; for
    ``a < b`` the upper bound ``b/(b-a) exp(-(b-a)^2/2)`` applies. The bound
    that does not apply on a given side is reported as the trivial 0 or 1.
    """
    a = float(_check_finite("a", a))
    b = float(_check_finite("b", b))
    if a < 0 or b < 0:
        raise ValueError("marcum_q_bounds requires a >= 0 and b >= 0")
    if a == b:
        raise ValueError("marcum_q_bounds unavailable for a == b")
    if a > b:
        lower = 1.0 - a / (a - b) * math.exp(-0.5 * (a - b) ** 2)
        return max(0.0, lower), 1.0
    upper = b / (b - a) * math.exp(-0.5 * (b - a) ** 2)
    return 0.0, min(1.0, upper)


# ---------------------------------------------------------------------------
# Central and noncentral chi-square, two degrees of freedom
# ---------------------------------------------------------------------------

def chi2_cdf_even(x: float, q: int) -> float:
    """Chi-square CDF for an even number of degrees of freedom ``q``."""
    x = float(_check_finite("x", x))
    if x < 0:
        raise ValueError("chi2_cdf_even requires x >= 0")
    if int(q) != q or q < 2 or q % 2:
        raise ValueError(f"q must be an even integer >= 2, got {q!r}")
    half = 0.5 * x
    if half == 0.0:
        return 0.0
    n = int(q) // 2
    # Lower branch 1 - e^{-h} sum_{k<n} h^k/k! when the sum is small relative
    # to e^{h}; otherwise sum the complementary tail directly.
    log_terms = [k * math.log(half) - half - math.lgamma(k + 1) for k in range(n)]
    head = math.fsum(math.exp(t) for t in log_terms)
    if head < 0.5:
        return 1.0 - head
    k = n
    tail = []
    while True:
        t = math.exp(k * math.log(half) - half - math.lgamma(k + 1))
        tail.append(t)
        if k > half and t < 1e-18 * math.fsum(tail):
            break
        k += 1
    return math.fsum(tail)


@lru_cache(maxsize=8)
def _log_factorials(n: int) -> np.ndarray:
    """log(k!) for k = 0..n inclusive, from math.lgamma (no cumulative drift)."""
    return np.array([math.lgamma(k + 1.0) for k in range(n + 1)])


def _log_fact(n: int) -> np.ndarray:
    size = 1 << max(10, int(n).bit_length())
    return _log_factorials(size)[: n + 1]


def _poisson_logpmf(k_max: int, mean: float) -> np.ndarray:
    k = np.arange(k_max + 1, dtype=float)
    if mean == 0.0:
        out = np.full(k_max + 1, -np.inf)
        out[0] = 0.0
        return out
    return k * math.log(mean) - mean - _log_fact(k_max)


def _mixture_top(mean: float) -> int:
    return int(math.ceil(mean + 12.0 * math.sqrt(mean) + 40.0))


def _mixture_window(mean: float) -> tuple[int, np.ndarray]:
    """Poisson(mean) weights on the smallest window leaving < 1e-15 mass out.

    Returns ``(lo, weights)`` where ``weights[j]`` is the pmf at ``lo + j``.
    """
    top = _mixture_top(mean)
    pmf = np.exp(_poisson_logpmf(top, mean))
    below = np.cumsum(pmf)
    above = np.cumsum(pmf[::-1])[::-1]
    lo = int(np.searchsorted(below, _POISSON_MASS_TOL, side="right"))
    keep = np.nonzero(above > _POISSON_MASS_TOL)[0]
    hi = int(keep[-1]) if keep.size else top
    lo = min(lo, hi)
    return lo, pmf[lo : hi + 1]


def _as_delta(delta) -> float:
    if isinstance(delta, NoncentralChiSq2):
        return delta.delta
    d = float(_check_finite("delta", delta))
    if d < 0:
        raise ValueError("noncentrality delta must be >= 0")
    return d


def _as_x(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)):
        raise ValueError("x must not be NaN")
    if np.any(arr < 0):
        raise ValueError("x must be >= 0")
    return arr


def _ncx2_cdf_sf_fast(x: np.ndarray, delta: float) -> tuple[np.ndarray, np.ndarray]:
    """Absolute-accuracy CDF and survival, vectorized over x.

    F = sum_i Pois(i; delta/2) P(N > i), N ~ Poisson(x/2), with P(N > i)
    advanced by the downward recurrence P(N > i) = P(N > i-1) - pmf_N(i).
    """
    flat = np.atleast_1d(x).astype(float).ravel()
    cdf = np.zeros_like(flat)
    finite = np.isfinite(flat) & (flat > 0)
    cdf[np.isinf(flat)] = 1.0
    if np.any(finite):
        lam = 0.5 * flat[finite]
        lo, weights = _mixture_window(0.5 * delta)
        n_terms = weights.size
        # P(N > lo) and the pmf at lo, both for every lam.
        tail = _sp.gammainc(lo + 1.0, lam)
        log_lam = np.log(lam)
        log_fact = _log_fact(lo + n_terms)
        pmf = np.exp((lo + 1) * log_lam - lam - log_fact[lo + 1])
        acc = weights[0] * tail
        for j in range(1, n_terms):
            i = lo + j
            tail = tail - pmf
            np.maximum(tail, 0.0, out=tail)
            acc += weights[j] * tail
            pmf = pmf * (lam / (i + 1))
        cdf[finite] = acc / weights.sum()
    np.clip(cdf, 0.0, 1.0, out=cdf)
    shape = np.shape(x)
    cdf = cdf.reshape(shape) if shape else cdf[0]
    return cdf, 1.0 - cdf


def ncx2_cdf(x, delta):
    """Noncentral chi-square CDF with two degrees of freedom.

    Vectorized over ``x``; ``delta`` is the noncentrality (a float or a
    :class:`NoncentralChiSq2`). Absolute error is of order 1e-15.
    """
    d = _as_delta(delta)
    xa = _as_x(x)
    cdf, _ = _ncx2_cdf_sf_fast(xa, d)
    return float(cdf) if np.ndim(cdf) == 0 else cdf


def ncx2_sf(x, delta):
    """Survival function ``1 - ncx2_cdf`` (absolute accuracy)."""
    d = _as_delta(delta)
    xa = _as_x(x)
    _, sf = _ncx2_cdf_sf_fast(xa, d)
    return float(sf) if np.ndim(sf) == 0 else sf


def _log_tails_scalar(x: float, delta: float) -> tuple[float, float, np.ndarray, np.ndarray]:
    """log F, log S for one (x, delta) together with the pieces reused by
    the delta-derivative: the mixture log-weights and log pmf of Poisson(x/2).
    """
    lam = 0.5 * x
    mu = 0.5 * delta
    # Far in the upper tail S is carried by high-index terms, so the window
    # must reach past x/2 as well as past the mixture's own bulk.
    top = max(_mixture_top(mu), _mixture_top(lam))
    log_w = _poisson_logpmf(top, mu)
    if lam >= top + 1:
        log_pmf = _poisson_logpmf(top + 1, lam)
        log_lower = np.logaddexp.accumulate(log_pmf[: top + 1])
        log_upper = np.log(-np.expm1(np.minimum(log_lower, -1e-300)))
    else:
        extra = int(math.ceil(12.0 * math.sqrt(top + 1.0) + 40.0))
        log_pmf = _poisson_logpmf(top + 1 + extra, lam)
        log_lower = np.logaddexp.accumulate(log_pmf[: top + 1])
        rev = np.logaddexp.accumulate(log_pmf[::-1])[::-1]
        log_upper = rev[1 : top + 2]
    log_cdf = float(np.logaddexp.reduce(log_w + log_upper))
    log_sf = float(np.logaddexp.reduce(log_w + log_lower))
    return log_cdf, log_sf, log_w, log_pmf


def _scalar_map(func, x):
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        return func(float(arr))
    out = np.empty(arr.shape)
    for idx, v in np.ndenumerate(arr):
        out[idx] = func(float(v))
    return out


def ncx2_logcdf(x, delta):
    """Natural log of the noncentral chi-square CDF, accurate in both tails."""
    d = _as_delta(delta)
    xa = _as_x(x)

    def one(v: float) -> float:
        if v == 0.0:
            return -math.inf
        if math.isinf(v):
            return 0.0
        log_cdf, log_sf, _, _ = _log_tails_scalar(v, d)
        # Prefer log1p(-S) when S is small: it is the more accurate of the two.
        if log_sf < math.log(0.5):
            return math.log1p(-math.exp(log_sf))
        return log_cdf

    return _scalar_map(one, xa)


def ncx2_logsf(x, delta):
    """Natural log of the noncentral chi-square survival function."""
    d = _as_delta(delta)
    xa = _as_x(x)

    def one(v: float) -> float:
        if v == 0.0:
            return 0.0
        if math.isinf(v):
            return -math.inf
        log_cdf, log_sf, _, _ = _log_tails_scalar(v, d)
        if log_cdf < math.log(0.5):
            return math.log1p(-math.exp(log_cdf))
        return log_sf

    return _scalar_map(one, xa)


def ncx2_cdf_marcum(x, delta):
    """Noncentral chi-square CDF as ``1 - Q1(sqrt(delta), sqrt(x))``."""
    d = _as_delta(delta)
    xa = _as_x(x)
    return _scalar_map(lambda v: 1.0 - marcum_q(math.sqrt(d), math.sqrt(v)), xa)


def ncx2_pdf(x, delta):
    """Density ``exp(-(x+delta)/2) I0(sqrt(delta x)) / 2``."""
    d = _as_delta(delta)
    xa = _as_x(x)
    root = np.sqrt(xa)
    dens = 0.5 * np.exp(-0.5 * (root - math.sqrt(d)) ** 2) * bessel_i0e(np.sqrt(d * xa))
    return float(dens) if np.ndim(dens) == 0 else dens


def log_ncx2_cdf_ddelta(x: float, delta: float) -> float:
    """Derivative of ``log F(x | 2, delta)`` with respect to ``delta``.

    Uses the ratio of Poisson-weighted series
    ``sum w_i (alpha_{i+1} - alpha_i) / (2 sum w_i alpha_i)`` where
    ``alpha_i`` is the central chi-square CDF with ``2 + 2i`` degrees of
    freedom; ``alpha_{i+1} - alpha_i`` is minus the Poisson(x/2) pmf at
    ``i + 1``, so the result is strictly negative.
    """
    x = float(_check_finite("x", x))
    d = _as_delta(delta)
    if x <= 0:
        raise ValueError("log_ncx2_cdf_ddelta requires x > 0")
    log_cdf, _, log_w, log_pmf = _log_tails_scalar(x, d)
    top = log_w.size - 1
    log_num = float(np.logaddexp.reduce(log_w + log_pmf[1 : top + 2]))
    return -math.exp(log_num - log_cdf - math.log(2.0))


# ---------------------------------------------------------------------------
# Gaussian
# ---------------------------------------------------------------------------

_STD_NORMAL = statistics.NormalDist()


def gaussian_cdf(x: float) -> float:
    """Standard normal CDF."""
    return 0.5 * math.erfc(-float(x) / math.sqrt(2.0))


def gaussian_quantile(p: float) -> float:
    """Inverse standard normal CDF for 0 < p < 1."""
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ValueError(f"gaussian_quantile requires 0 < p < 1, got {p!r}")
    return _STD_NORMAL.inv_cdf(p)


# ---------------------------------------------------------------------------
# Quantiles
# ---------------------------------------------------------------------------

def sankaran_guess(p: float, delta: float, dof: int = 2) -> float:
    """Normal approximation to the noncentral chi-square quantile.

    ``sqrt(X - (n-1)/2) - sqrt(delta + (n-1)/2)`` is treated as standard
    normal, so ``X ~ (n-1)/2 + (sqrt(delta + (n-1)/2) + z_p)^2``.
    """
    if not 0.0 < p < 1.0:
        raise ValueError("sankaran_guess requires 0 < p < 1")
    shift = 0.5 * (dof - 1)
    root = math.sqrt(delta + shift) + gaussian_quantile(p)
    return shift + max(root, 0.0) ** 2


def ncx2_quantile(p: float, delta, tol: float = 1e-13) -> float:
    """Inverse of :func:`ncx2_cdf` in ``x``.

    Starts from Sankaran's normal approximation, bisects the bracket
    ``[0, 4*guess + 10]`` (expanded if needed) down to width 1, then takes
    safeguarded Newton steps.
    """
    d = _as_delta(delta)
    p = float(p)
    if not 0.0 <= p < 1.0:
        raise ValueError(f"ncx2_quantile requires 0 <= p < 1, got {p!r}")
    if p == 0.0:
        return 0.0
    guess = sankaran_guess(p, d)
    lo, hi = 0.0, 4.0 * guess + 10.0
    while ncx2_cdf(hi, d) < p:
        lo, hi = hi, 2.0 * hi
    while hi - lo > 1.0:
        mid = 0.5 * (lo + hi)
        if ncx2_cdf(mid, d) < p:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(200):
        err = ncx2_cdf(x, d) - p
        if abs(err) <= tol:
            return x
        if err < 0:
            lo = x
        else:
            hi = x
        dens = ncx2_pdf(x, d)
        step = err / dens if dens > 0 else math.inf
        cand = x - step
        if not lo < cand < hi:
            cand = 0.5 * (lo + hi)
        if hi - lo <= 4 * np.finfo(float).eps * max(hi, 1e-300):
            return cand
        x = cand
    return x


@dataclass(frozen=True)
class NoncentralChiSq2:
    """Noncentral chi-square law with two degrees of freedom."""

    delta: float

    def __post_init__(self):
        if not math.isfinite(self.delta) or self.delta < 0:
            raise ValueError(f"delta must be finite and >= 0, got {self.delta!r}")

    def cdf(self, x):
        return ncx2_cdf(x, self.delta)

    def sf(self, x):
        return ncx2_sf(x, self.delta)

    def logcdf(self, x):
        return ncx2_logcdf(x, self.delta)

    def logsf(self, x):
        return ncx2_logsf(x, self.delta)

    def pdf(self, x):
        return ncx2_pdf(x, self.delta)

    def ppf(self, p: float) -> float:
        return ncx2_quantile(p, self.delta)

    @property
    def mean(self) -> float:
        return 2.0 + self.delta

    @property
    def var(self) -> float:
        return 4.0 + 4.0 * self.delta
