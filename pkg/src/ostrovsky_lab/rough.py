"""Maximal-function experiments for rough (low-regularity) data.

The family under test concentrates on the dyadic band 2^k <= |xi| <= 2^(k+1)
with amplitude 2^(-k(s+1/2)), which pins its H^s norm near a k-independent
constant.  Scanning sup_t |U(t) f_k| over a shrinking time window
t <= 2^(-3k)/100 and measuring its L4 norm on |x| <= 2^(-k) produces ratios
R_k whose log2 grows linearly in k with slope 1/4 - s; fitting that slope is
the point of the module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectral import (
    SQRT_2PI,
    PropagatorConfig,
    ResolutionError,
    SpaceField,
    SpaceGrid,
    SpectralProfile,
    hs_norm,
    lp_norm_space,
    phase,
    trapezoid_weights,
    validate_resolution,
)

__all__ = [
    "CounterexampleSpec",
    "MaximalScan",
    "ScalingFit",
    "counterexample_profile",
    "counterexample_ratio",
    "convergence_trace",
    "maximal_scan",
    "maximal_time_grid",
    "scaling_fit",
]

#: Ratio between the smallest and largest scanned time.
TIME_SPAN = 1e-4

#: Minimum number of grid cells across one dyadic band.
MIN_BAND_CELLS = 64


@dataclass
class CounterexampleSpec:
    """Band index k >= 1 and Sobolev exponent s of the rough family."""

    k: int
    s: float

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("band index k must be >= 1")
        if not math.isfinite(self.s):
            raise ValueError("s must be finite")

    @property
    def band(self) -> tuple[float, float]:
        return (2.0**self.k, 2.0 ** (self.k + 1))

    @property
    def amplitude(self) -> float:
        return 2.0 ** (-self.k * (self.s + 0.5))

    @property
    def t_max(self) -> float:
        return 2.0 ** (-3 * self.k) / 100.0

    @property
    def x_window(self) -> float:
        return 2.0**-self.k


def counterexample_profile(spec: CounterexampleSpec, xi_step: float) -> SpectralProfile:
    """Indicator of 2^k <= |xi| <= 2^(k+1) (both signs) at the family amplitude.

    The grid spans [-2^(k+1), 2^(k+1)] and `xi_step` must cut each band
    into at least MIN_BAND_CELLS whole cells.
    """
    lo, hi = spec.band
    cells = (hi - lo) / xi_step
    if abs(cells - round(cells)) > 1e-9 * cells:
        raise ValueError("xi_step must divide the dyadic band into whole cells")
    if round(cells) < MIN_BAND_CELLS:
        raise ValueError(
            f"xi_step cuts the band into {int(round(cells))} cells; "
            f"need at least {MIN_BAND_CELLS}"
        )
    n = int(round(2.0 * hi / xi_step)) + 1
    xi = -hi + xi_step * np.arange(n)
    amps = np.where((np.abs(xi) >= lo) & (np.abs(xi) <= hi), spec.amplitude, 0.0)
    return SpectralProfile(-hi, xi_step, amps)


def maximal_time_grid(t_max: float, n_t: int, span: float = TIME_SPAN) -> np.ndarray:
    """Geometric times over [t_max * span, t_max], largest last.

    Refining n_t -> 2*n_t - 1 keeps every existing node, so sup scans over
    refined grids are monotone.
    """
    if t_max <= 0.0:
        raise ValueError("t_max must be positive")
    if n_t < 1:
        raise ValueError("n_t must be >= 1")
    if n_t == 1:
        return np.array([t_max])
    exponents = 1.0 - np.arange(n_t) / (n_t - 1)
    return t_max * span**exponents


@dataclass
class MaximalScan:
    """Pointwise sup over scanned times of |U(t) f| on a spatial grid."""

    x_min: float
    x_step: float
    sup_values: np.ndarray
    t_count: int
    t_max: float
    t_rule: str = "geometric"

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.x_step * np.arange(self.sup_values.size)

    def as_field(self) -> SpaceField:
        return SpaceField(self.x_min, self.x_step, self.sup_values)


def maximal_scan(p: SpectralProfile, sign: str, t_max: float, grid: SpaceGrid,
                 n_t: int = 256, refine_around_peak: bool = True) -> MaximalScan:
    """Scan |U(t) f (x)| over the geometric time grid and keep the sup per x.

    With `refine_around_peak` a second pass samples eight extra times
    inside the bracket around each point's coarse argmax, which only ever
    raises the sup.
    """
    report = validate_resolution(p, PropagatorConfig(sign, t_max))
    if not report.ok:
        raise ResolutionError(report)
    ts = maximal_time_grid(t_max, n_t)
    xi = p.xi
    coeff = trapezoid_weights(p.n) * p.amplitudes * (p.xi_step / SQRT_2PI)
    nz = coeff != 0.0
    phi = np.zeros(p.n)
    if np.any(nz):
        phi[nz] = phase(xi[nz], sign)
    basis = np.exp(1j * np.outer(grid.points, xi))  # (n_x, n_xi)
    fields = (np.exp(1j * np.outer(ts, phi)) * coeff) @ basis.T  # (n_t, n_x)
    magnitudes = np.abs(fields)
    sup = magnitudes.max(axis=0)

    if refine_around_peak and n_t > 1:
        peak = magnitudes.argmax(axis=0)
        t_lo = ts[np.maximum(peak - 1, 0)]
        t_hi = ts[np.minimum(peak + 1, n_t - 1)]
        for j in range(8):
            # bracket around each point's own argmax: a per-x time, so only
            # the row-wise product with that point's basis row is needed
            tj = t_lo * (t_hi / t_lo) ** ((j + 1) / 9.0)
            refined = np.einsum("xj,xj->x", np.exp(1j * np.outer(tj, phi)) * coeff, basis)
            sup = np.maximum(sup, np.abs(refined))
    return MaximalScan(grid.x_min, grid.x_step, sup, n_t, t_max)


def counterexample_ratio(spec: CounterexampleSpec, band_cells: int = 256,
                         n_x: int = 257, n_t: int = 256, sign: str = "+") -> float:
    """R_k: L4 norm of the maximal scan on |x| <= 2^-k over the H^s norm."""
    xi_step = 2.0**spec.k / band_cells
    p = counterexample_profile(spec, xi_step)
    w = spec.x_window
    grid = SpaceGrid.spanning(-w, w, n_x)
    scan = maximal_scan(p, sign, spec.t_max, grid, n_t)
    return lp_norm_space(scan.as_field(), 4.0) / hs_norm(p, spec.s)


@dataclass
class ScalingFit:
    """Least-squares line through (k, log2 R_k)."""

    points: list  # (k, R_k) pairs
    slope: float
    intercept: float
    residual: float  # max |log2 R_k - fit|


def scaling_fit(points) -> ScalingFit:
    """Fit log2(R_k) = slope * k + intercept over >= 3 distinct k."""
    pts = [(int(k), float(r)) for k, r in points]
    if len(pts) < 3:
        raise ValueError("need at least three (k, R_k) points")
    ks = np.array([k for k, _ in pts], dtype=np.float64)
    rs = np.array([r for _, r in pts])
    if np.any(rs <= 0.0):
        raise ValueError("ratios must be positive")
    if np.all(ks == ks[0]):
        raise ValueError("k values are degenerate (all equal)")
    logs = np.log2(rs)
    design = np.stack([ks, np.ones_like(ks)], axis=1)
    (slope, intercept), *_ = np.linalg.lstsq(design, logs, rcond=None)
    residual = float(np.max(np.abs(logs - (slope * ks + intercept))))
    return ScalingFit(pts, float(slope), float(intercept), residual)


def convergence_trace(p: SpectralProfile, x: float, t_sequence, sign: str = "+") -> np.ndarray:
    """|U(t) f (x) - f (x)| along a time sequence decreasing towards 0."""
    ts = np.asarray(t_sequence, dtype=np.float64)
    if ts.ndim != 1 or ts.size == 0:
        raise ValueError("need a non-empty t sequence")
    if ts.size > 1 and np.any(np.diff(ts) >= 0.0):
        raise ValueError("t_sequence must be strictly decreasing")
    report = validate_resolution(p, PropagatorConfig(sign, float(np.max(np.abs(ts)))))
    if not report.ok:
        raise ResolutionError(report)
    xi = p.xi
    probe = trapezoid_weights(p.n) * np.exp(1j * x * xi) * (p.xi_step / SQRT_2PI)
    nz = p.amplitudes != 0.0
    # last row holds the unevolved baseline; sharing one product keeps a
    # t = 0 entry bit-identical to it, so its deviation is exactly zero
    multipliers = np.ones((ts.size + 1, p.n), dtype=np.complex128)
    if np.any(nz):
        multipliers[:-1, nz] = np.exp(1j * np.outer(ts, phase(xi[nz], sign)))
    values = (multipliers * p.amplitudes) @ probe
    return np.abs(values[:-1] - values[-1])
