"""Frequency-side data containers, the free propagator, and discrete norms.

The propagator acts on Fourier data by the unimodular multiplier

    exp(i * t * (xi**3 + sign / xi)),      sign in {+1, -1},

and fields are recovered by the inverse transform with the symmetric
1/sqrt(2*pi) normalisation.  Everything here is plain trapezoid quadrature
on uniform grids; the two design points that deserve a comment are

* the multiplier phase blows up at xi = 0, so profiles carry a hard
  exclusion radius: grid points with |xi| below it are zeroed at
  construction and the removed l1 mass is recorded rather than silently
  dropped;
* time evolution is only trusted while the phase advances by at most
  MAX_PHASE_INCREMENT radians per grid cell at every point that carries
  amplitude; `propagate` refuses to synthesise otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DEFAULT_ZERO_EXCLUSION",
    "MAX_PHASE_INCREMENT",
    "SQRT_2PI",
    "PropagatorConfig",
    "ResolutionError",
    "ResolutionReport",
    "SpaceField",
    "SpaceGrid",
    "SpectralProfile",
    "evolve_spectral",
    "hs_norm",
    "lp_norm_space",
    "phase",
    "phase_derivative",
    "propagate",
    "synthesize",
    "trapezoid_weights",
    "validate_resolution",
]

SQRT_2PI = math.sqrt(2.0 * math.pi)

#: Default exclusion radius around the singular frequency xi = 0.
DEFAULT_ZERO_EXCLUSION = 2.0**-20

#: Largest tolerated phase advance per grid cell, in radians.
MAX_PHASE_INCREMENT = 0.1

_SIGNS = {"+": 1.0, "-": -1.0}


def _check_sign(sign: str) -> float:
    try:
        return _SIGNS[sign]
    except KeyError:
        raise ValueError(f"sign must be '+' or '-', got {sign!r}") from None


@dataclass
class SpectralProfile:
    """Complex Fourier amplitudes sampled on a uniform frequency grid.

    Grid point j sits at ``xi_min + j * xi_step``.  Construction zeroes
    every amplitude with ``|xi| < zero_exclusion`` and stores the removed
    l1 mass (step-weighted) in ``truncated_mass``.
    """

    xi_min: float
    xi_step: float
    amplitudes: np.ndarray
    zero_exclusion: float = DEFAULT_ZERO_EXCLUSION
    truncated_mass: float = field(init=False, default=0.0)

    def __post_init__(self):
        if not (math.isfinite(self.xi_min) and math.isfinite(self.xi_step)):
            raise ValueError("grid origin and step must be finite")
        if self.xi_step <= 0.0:
            raise ValueError(f"xi_step must be positive, got {self.xi_step}")
        if not (math.isfinite(self.zero_exclusion) and self.zero_exclusion >= 0.0):
            raise ValueError("zero_exclusion must be finite and >= 0")
        amps = np.array(self.amplitudes, dtype=np.complex128, copy=True)
        if amps.ndim != 1 or amps.size == 0:
            raise ValueError("amplitudes must be a non-empty 1-d array")
        if not np.all(np.isfinite(amps.view(np.float64))):
            raise ValueError("amplitudes must be finite")
        self.amplitudes = amps
        xi = self.xi
        inside = np.abs(xi) < self.zero_exclusion
        if np.any(inside):
            self.truncated_mass = float(np.sum(np.abs(amps[inside])) * self.xi_step)
            amps[inside] = 0.0
        if np.any((xi == 0.0) & (amps != 0.0)):
            raise ValueError("xi = 0 may not carry amplitude (phase is singular there)")
        self.amplitudes.setflags(write=False)

    @property
    def n(self) -> int:
        return self.amplitudes.size

    @property
    def xi(self) -> np.ndarray:
        return self.xi_min + self.xi_step * np.arange(self.n)

    def with_amplitudes(self, amplitudes: np.ndarray) -> "SpectralProfile":
        """Same grid and exclusion radius, new amplitude array."""
        return SpectralProfile(self.xi_min, self.xi_step, amplitudes, self.zero_exclusion)


@dataclass
class SpaceGrid:
    """Uniform grid of observation points x_min + j * x_step, j < n."""

    x_min: float
    x_step: float
    n: int

    def __post_init__(self):
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_step)):
            raise ValueError("grid origin and step must be finite")
        if self.x_step <= 0.0:
            raise ValueError(f"x_step must be positive, got {self.x_step}")
        if self.n < 1:
            raise ValueError("grid needs at least one point")

    @classmethod
    def spanning(cls, lo: float, hi: float, n: int) -> "SpaceGrid":
        if n < 2:
            raise ValueError("spanning grid needs n >= 2")
        if not hi > lo:
            raise ValueError(f"need hi > lo, got [{lo}, {hi}]")
        return cls(lo, (hi - lo) / (n - 1), n)

    @property
    def points(self) -> np.ndarray:
        return self.x_min + self.x_step * np.arange(self.n)


@dataclass
class SpaceField:
    """Complex field values sampled on a uniform spatial grid."""

    x_min: float
    x_step: float
    values: np.ndarray

    def __post_init__(self):
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_step)):
            raise ValueError("grid origin and step must be finite")
        if self.x_step <= 0.0:
            raise ValueError(f"x_step must be positive, got {self.x_step}")
        vals = np.array(self.values, dtype=np.complex128, copy=True)
        if vals.ndim != 1 or vals.size == 0:
            raise ValueError("values must be a non-empty 1-d array")
        if not np.all(np.isfinite(vals.view(np.float64))):
            raise ValueError("values must be finite")
        self.values = vals

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.x_step * np.arange(self.n)


@dataclass
class PropagatorConfig:
    """Sign of the 1/xi phase term and the evolution time."""

    sign: str = "+"
    t: float = 0.0

    def __post_init__(self):
        _check_sign(self.sign)
        if not math.isfinite(self.t):
            raise ValueError("t must be finite")


@dataclass
class ResolutionReport:
    """Outcome of the per-cell phase-increment check."""

    max_phase_increment: float
    truncated_mass: float
    ok: bool


class ResolutionError(ValueError):
    """A propagation request failed the phase-resolution rule."""

    def __init__(self, report: ResolutionReport):
        super().__init__(
            f"phase advance {report.max_phase_increment:.3g} rad per cell exceeds "
            f"{MAX_PHASE_INCREMENT}; refine xi_step or reduce |t|"
        )
        self.report = report


# ---------------------------------------------------------------------------
# propagator phase
# ---------------------------------------------------------------------------


def phase(xi, sign: str = "+"):
    """Dispersion phase xi**3 + sign/xi.  Rejects xi = 0."""
    s = _check_sign(sign)
    x = np.asarray(xi, dtype=np.float64)
    if np.any(x == 0.0):
        raise ValueError("phase is singular at xi = 0")
    out = x**3 + s / x
    return out if out.ndim else float(out)


def phase_derivative(xi, sign: str = "+"):
    """d/dxi of the dispersion phase: 3*xi**2 - sign/xi**2."""
    s = _check_sign(sign)
    x = np.asarray(xi, dtype=np.float64)
    if np.any(x == 0.0):
        raise ValueError("phase derivative is singular at xi = 0")
    out = 3.0 * x**2 - s / x**2
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def evolve_spectral(p: SpectralProfile, cfg: PropagatorConfig) -> SpectralProfile:
    """Multiply amplitudes by the propagator phase factor.

    The grid is unchanged and the multiplier is unimodular, so the l2 norm
    is preserved to rounding.  Zero-amplitude points never see the phase,
    which keeps excluded near-singular frequencies out of the arithmetic.
    """
    amps = p.amplitudes.copy()
    nz = amps != 0.0
    if np.any(nz):
        amps[nz] = amps[nz] * np.exp(1j * cfg.t * phase(p.xi[nz], cfg.sign))
    return p.with_amplitudes(amps)


def trapezoid_weights(n: int) -> np.ndarray:
    """Composite-trapezoid weights: interior 1, the two end points 1/2."""
    w = np.ones(n)
    if n >= 2:
        w[0] = w[-1] = 0.5
    return w


def synthesize(p: SpectralProfile, grid: SpaceGrid) -> SpaceField:
    """Inverse transform of the sampled profile by trapezoid quadrature.

    u(x) = (1/sqrt(2*pi)) * sum_j w_j * exp(i*x*xi_j) * amp_j * xi_step
    """
    coeff = trapezoid_weights(p.n) * p.amplitudes * (p.xi_step / SQRT_2PI)
    xi = p.xi
    x = grid.points
    values = np.empty(grid.n, dtype=np.complex128)
    # chunk the x rows so the exp table stays modest for large grids
    chunk = max(1, int(4_000_000 // max(p.n, 1)))
    for lo in range(0, grid.n, chunk):
        hi = min(lo + chunk, grid.n)
        values[lo:hi] = np.exp(1j * np.outer(x[lo:hi], xi)) @ coeff
    return SpaceField(grid.x_min, grid.x_step, values)


def validate_resolution(p: SpectralProfile, cfg: PropagatorConfig) -> ResolutionReport:
    """Check |t| * |phase'(xi)| * xi_step <= 0.1 over amplitude-carrying points."""
    nz = p.amplitudes != 0.0
    if not np.any(nz) or cfg.t == 0.0:
        increment = 0.0
    else:
        dphi = phase_derivative(p.xi[nz], cfg.sign)
        increment = float(abs(cfg.t) * np.max(np.abs(dphi)) * p.xi_step)
    return ResolutionReport(increment, p.truncated_mass, increment <= MAX_PHASE_INCREMENT)


def propagate(p: SpectralProfile, cfg: PropagatorConfig, grid: SpaceGrid) -> SpaceField:
    """Evolve by the propagator and synthesise on `grid`.

    Refuses (raising ResolutionError with the report attached) when the
    phase-increment rule fails; at t = 0 the output is bit-identical to
    `synthesize(p, grid)`.
    """
    report = validate_resolution(p, cfg)
    if not report.ok:
        raise ResolutionError(report)
    return synthesize(evolve_spectral(p, cfg), grid)


def hs_norm(p: SpectralProfile, s: float) -> float:
    """Discrete Sobolev norm: sqrt(sum (1+xi^2)^s |amp|^2 * xi_step)."""
    if not math.isfinite(s):
        raise ValueError("s must be finite")
    xi = p.xi
    weight = (1.0 + xi * xi) ** s
    return float(np.sqrt(np.sum(weight * np.abs(p.amplitudes) ** 2) * p.xi_step))


def lp_norm_space(u: SpaceField, power: float) -> float:
    """Trapezoid L^p norm over the field's grid; power = inf gives the sup."""
    a = np.abs(u.values)
    if power == math.inf:
        return float(np.max(a))
    if power < 1.0:
        raise ValueError(f"L^p norm needs p >= 1, got {power}")
    w = trapezoid_weights(u.n)
    return float(np.sum(w * a**power * u.x_step) ** (1.0 / power))
