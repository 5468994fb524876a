"""Wiener randomisation of profiles and its Monte Carlo statistics.

A draw attaches an independent standard complex Gaussian g_k (real and
imaginary parts independent N(0,1), so E|g_k|^2 = 2) to every unit window
k.  Coefficients are generated counter-based: each value is a pure hash of
(seed, sample_index, k) pushed through a Box-Muller step, so draws are
reproducible regardless of evaluation order, chunking, or thread count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .spectral import (
    SQRT_2PI,
    PropagatorConfig,
    ResolutionError,
    SpectralProfile,
    phase,
    trapezoid_weights,
    validate_resolution,
)
from .windows import wiener_decompose

__all__ = [
    "GaussianDraw",
    "KhinchineResult",
    "TailCurve",
    "gaussian_coefficients",
    "khinchine_check",
    "randomize",
    "sample_draw",
    "stochastic_continuity",
    "tail_bound_curve",
    "wilson_interval",
]

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U53 = 2.0**-53


def _mix64(z: np.ndarray) -> np.ndarray:
    """SplitMix64 finaliser (64-bit avalanche)."""
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def _uniform(bits: np.ndarray) -> np.ndarray:
    """Map 64 hash bits to a double in the open interval (0, 1)."""
    return ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * _U53


def gaussian_coefficients(seed: int, sample_index, ks) -> np.ndarray:
    """Standard complex Gaussians indexed by (seed, sample_index, k).

    `sample_index` and `ks` broadcast against each other (an array of
    sample indices yields one row per sample).  The value at a given
    (seed, sample_index, k) never depends on which other indices are
    requested alongside it.
    """
    samples = np.asarray(sample_index, dtype=np.uint64)
    kbits = np.asarray(ks, dtype=np.int64).astype(np.uint64)  # two's complement
    with np.errstate(over="ignore"):
        h = _mix64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + _GOLDEN)
        h = _mix64(h + _GOLDEN * (samples + np.uint64(1)))
        h = _mix64(h[..., None] + _GOLDEN * (kbits + np.uint64(1)))
        u1 = _uniform(_mix64(h + _GOLDEN))
        u2 = _uniform(_mix64(h + _GOLDEN + _GOLDEN))
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * math.pi * u2
    out = radius * np.cos(angle) + 1j * radius * np.sin(angle)
    return out if np.ndim(sample_index) else out[0] if out.ndim > 1 else out


@dataclass
class GaussianDraw:
    """One realisation of the window coefficients g_k, k_min <= k <= k_max."""

    k_min: int
    k_max: int
    coefficients: np.ndarray
    seed: int = 0
    sample_index: int = 0

    def __post_init__(self):
        if self.k_max < self.k_min:
            raise ValueError("k_max must be >= k_min")
        coeffs = np.asarray(self.coefficients, dtype=np.complex128)
        if coeffs.shape != (self.k_max - self.k_min + 1,):
            raise ValueError("need one coefficient per window")
        self.coefficients = coeffs

    def coefficient(self, k: int) -> complex:
        if not self.k_min <= k <= self.k_max:
            raise KeyError(f"k = {k} outside draw range")
        return complex(self.coefficients[k - self.k_min])


def sample_draw(k_range: tuple[int, int], seed: int = 0, sample_index: int = 0) -> GaussianDraw:
    """Draw coefficients for every window in the inclusive `k_range`."""
    k_min, k_max = int(k_range[0]), int(k_range[1])
    if k_max < k_min:
        raise ValueError("k_range must satisfy k_min <= k_max")
    ks = np.arange(k_min, k_max + 1)
    coeffs = gaussian_coefficients(seed, sample_index, ks)
    return GaussianDraw(k_min, k_max, coeffs, seed, sample_index)


def _floor_offsets(xi: np.ndarray, k_min: int, k_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Window bookkeeping for the two-term hat mix at every grid point.

    Returns (idx, d) with idx the offset of floor(xi) into the coefficient
    array (clipped so idx + 1 stays in range on zero-amplitude points
    outside the covered band) and d = xi - floor(xi).
    """
    k0 = np.floor(xi).astype(np.int64)
    d = xi - k0
    idx = np.clip(k0, k_min, k_max - 1) - k_min
    return idx, d


def randomize(p: SpectralProfile, draw: GaussianDraw) -> SpectralProfile:
    """Multiply each unit-window component of `p` by its draw coefficient.

    At every grid point at most the two windows flooring/ceiling xi
    contribute, with weights (1 - d) and d; their exact sum is 1, so unit
    coefficients reproduce the input bit for bit.
    """
    dec_lo, dec_hi = _support_k_range(p)
    if dec_lo < draw.k_min or dec_hi > draw.k_max:
        raise ValueError(
            f"draw covers windows [{draw.k_min}, {draw.k_max}] but the profile "
            f"needs [{dec_lo}, {dec_hi}]"
        )
    if not np.any(p.amplitudes):
        return p.with_amplitudes(p.amplitudes)
    idx, d = _floor_offsets(p.xi, draw.k_min, draw.k_max)
    mix = draw.coefficients[idx] * (1.0 - d) + draw.coefficients[idx + 1] * d
    return p.with_amplitudes(p.amplitudes * mix)


def _support_k_range(p: SpectralProfile) -> tuple[int, int]:
    supported = p.xi[p.amplitudes != 0.0]
    if supported.size == 0:
        return 0, 0
    return int(math.floor(supported.min())) - 1, int(math.ceil(supported.max())) + 1


@dataclass
class KhinchineResult:
    """Empirical p-th moment of sum_k g_k c_k against the sqrt(p) l2 bound."""

    power: float
    n_samples: int
    moment: float       # (E |S|^p)^(1/p), empirical
    ratio: float        # moment / (sqrt(p) * ||c||_2)
    ratio_stderr: float


def khinchine_check(coefficients, power: float, n_samples: int, seed: int = 0) -> KhinchineResult:
    """Monte Carlo estimate of ||sum g_k c_k||_{L^p} / (sqrt(p) ||c||_2)."""
    c = np.asarray(coefficients, dtype=np.complex128)
    if c.ndim != 1 or c.size == 0:
        raise ValueError("need a non-empty coefficient sequence")
    if power < 1.0:
        raise ValueError("power must be >= 1")
    if n_samples < 2:
        raise ValueError("need at least two samples")
    l2 = float(np.linalg.norm(c))
    if l2 == 0.0:
        raise ValueError("coefficient sequence must not vanish")
    ks = np.arange(c.size)
    sums = np.empty(n_samples, dtype=np.complex128)
    block = 4096
    for lo in range(0, n_samples, block):
        hi = min(lo + block, n_samples)
        g = gaussian_coefficients(seed, np.arange(lo, hi), ks)
        sums[lo:hi] = g @ c
    powered = np.abs(sums) ** power
    mean = float(np.mean(powered))
    stderr_mean = float(np.std(powered, ddof=1) / math.sqrt(n_samples))
    moment = mean ** (1.0 / power)
    ratio = moment / (math.sqrt(power) * l2)
    # delta method: d ratio / d mean = ratio / (p * mean)
    ratio_stderr = ratio * stderr_mean / (power * mean)
    return KhinchineResult(power, n_samples, moment, ratio, ratio_stderr)


def randomized_point_samples(p: SpectralProfile, x: float, n_samples: int,
                             seed: int = 0) -> np.ndarray:
    """Values of the window-randomized profile at one point, per draw.

    Sample ``i`` is the synthesis of ``randomize(p, draw_i)`` evaluated at
    ``x``, computed without materializing the per-draw profiles.
    """
    if n_samples < 1:
        raise ValueError("need at least one sample")
    out = np.zeros(n_samples, dtype=np.complex128)
    nz = p.amplitudes != 0.0
    if not np.any(nz):
        return out
    k_lo, k_hi = _support_k_range(p)
    ks = np.arange(k_lo, k_hi + 1)
    probe = trapezoid_weights(p.n) * np.exp(1j * x * p.xi) * (p.xi_step / SQRT_2PI)
    base = probe * p.amplitudes
    idx, d = _floor_offsets(p.xi, k_lo, k_hi)
    block = 4096
    for lo in range(0, n_samples, block):
        hi = min(lo + block, n_samples)
        g = gaussian_coefficients(seed, np.arange(lo, hi), ks)
        mix = g[:, idx] * (1.0 - d) + g[:, idx + 1] * d
        out[lo:hi] = mix @ base
    return out


def khinchine_analytic_ratio(power: float) -> float:
    """Exact limit of the moment ratio for complex Gaussian sums.

    |sum g_k c_k| is Rayleigh with E|S|^2 = 2 ||c||^2, so
    (E|S|^p)^(1/p) / (sqrt(p) ||c||) = sqrt(2) * Gamma(p/2 + 1)^(1/p) / sqrt(p).
    """
    if power < 1.0:
        raise ValueError("power must be >= 1")
    return math.sqrt(2.0) * math.exp(math.lgamma(power / 2.0 + 1.0) / power) / math.sqrt(power)


_WILSON_Z = 1.959963984540054  # two-sided 95%


def wilson_interval(successes: int, n: int, z: float = _WILSON_Z) -> tuple[float, float, float]:
    """Wilson score interval: (lo, hi, halfwidth).  Halfwidth is always > 0."""
    if n < 1:
        raise ValueError("need n >= 1 trials")
    if not 0 <= successes <= n:
        raise ValueError("successes must lie in [0, n]")
    phat = successes / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / n + z * z / (4 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half), half


@dataclass
class TailCurve:
    """Empirical exceedance probabilities of |U(t) f^w - f^w| at one point."""

    alpha: float
    t_values: np.ndarray
    empirical_probs: np.ndarray
    n_samples: int
    wilson_halfwidth: np.ndarray
    x: float = 0.0
    seed: int = 0
    wilson_lo: np.ndarray = field(default=None, repr=False)
    wilson_hi: np.ndarray = field(default=None, repr=False)


def stochastic_continuity(p: SpectralProfile, x: float, alpha: float, t_values,
                          n_samples: int, seed: int = 0, sign: str = "+") -> TailCurve:
    """Fraction of draws with |U(t) f^w (x) - f^w (x)| > alpha, per time.

    The same `n_samples` draws are reused across every t (common random
    numbers), and each per-draw value is formed literally as the evolved
    point value minus the unevolved one, so t = 0 gives exactly zero.
    """
    ts = np.asarray(t_values, dtype=np.float64)
    if ts.ndim != 1 or ts.size == 0:
        raise ValueError("need a non-empty t sequence")
    if np.any(np.diff(ts) >= 0.0):
        raise ValueError("t_values must be strictly decreasing")
    if not alpha > 0.0:
        raise ValueError("alpha must be positive")
    if n_samples < 1:
        raise ValueError("need at least one sample")
    report = validate_resolution(p, PropagatorConfig(sign, float(np.max(np.abs(ts)))))
    if not report.ok:
        raise ResolutionError(report)

    k_lo, k_hi = _support_k_range(p)
    ks = np.arange(k_lo, k_hi + 1)
    xi = p.xi
    probe = trapezoid_weights(p.n) * np.exp(1j * x * xi) * (p.xi_step / SQRT_2PI)
    nz = p.amplitudes != 0.0
    # last row holds the unevolved baseline; sharing one product keeps a
    # t = 0 entry bit-identical to it, so its exceedance count is exactly 0
    multipliers = np.ones((ts.size + 1, p.n), dtype=np.complex128)
    if np.any(nz):
        multipliers[:-1, nz] = np.exp(1j * np.outer(ts, phase(xi[nz], sign)))
    evolved_probe = probe * multipliers  # (T + 1, n)

    exceed = np.zeros(ts.size, dtype=np.int64)
    if np.any(nz):
        idx, d = _floor_offsets(xi, k_lo, k_hi)
        block = 256
        for lo in range(0, n_samples, block):
            hi = min(lo + block, n_samples)
            g = gaussian_coefficients(seed, np.arange(lo, hi), ks)  # (block, K)
            mix = g[:, idx] * (1.0 - d) + g[:, idx + 1] * d
            amps = mix * p.amplitudes  # (block, n)
            values = amps @ evolved_probe.T  # (block, T + 1)
            deviations = np.abs(values[:, :-1] - values[:, -1:])
            exceed += np.sum(deviations > alpha, axis=0)

    probs = exceed / n_samples
    intervals = np.array([wilson_interval(int(c), n_samples) for c in exceed])
    return TailCurve(
        alpha=alpha,
        t_values=ts,
        empirical_probs=probs,
        n_samples=n_samples,
        wilson_halfwidth=intervals[:, 2],
        x=x,
        seed=seed,
        wilson_lo=intervals[:, 0],
        wilson_hi=intervals[:, 1],
    )


_C1 = math.e**2


def tail_bound_curve(alpha: float, epsilon: float, c_fit: float, c1: float = _C1) -> float:
    """Gaussian-type tail majorant 3*c1*exp(-(alpha / (2*c_fit*e*epsilon))**2)."""
    if alpha < 0.0 or epsilon <= 0.0 or c_fit <= 0.0:
        raise ValueError("need alpha >= 0, epsilon > 0, c_fit > 0")
    return 3.0 * c1 * math.exp(-((alpha / (2.0 * c_fit * math.e * epsilon)) ** 2))
