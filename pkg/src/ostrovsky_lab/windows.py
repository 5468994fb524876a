"""Littlewood-Paley cutoffs, unit-scale Wiener windows, and the square function.

Two partitions of frequency space are used side by side:

* dyadic: a radial bump `dyadic_cutoff` equal to 1 on |xi| <= 1 and 0 on
  |xi| >= 2, with a quintic smoothstep in between, rescaled to N to build
  low/band/high projections that telescope exactly;
* unit-scale: the triangle hat ``max(0, 1 - |xi|)`` translated to every
  integer, which sums to exactly 1 pointwise, so the translated windows
  reassemble a profile without error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectral import (
    SQRT_2PI,
    SpaceField,
    SpaceGrid,
    SpectralProfile,
    trapezoid_weights,
)

__all__ = [
    "WienerDecomposition",
    "dyadic_cutoff",
    "project_band",
    "project_high",
    "project_low",
    "square_function",
    "wiener_decompose",
    "wiener_project",
    "wiener_window",
]


def dyadic_cutoff(xi):
    """Radial bump: 1 on |xi| <= 1, 0 on |xi| >= 2, quintic smoothstep between."""
    a = np.abs(np.asarray(xi, dtype=np.float64))
    out = np.ones_like(a)
    out[a >= 2.0] = 0.0
    mid = (a > 1.0) & (a < 2.0)
    u = a[mid] - 1.0
    # descending smoothstep 1 - (10 u^3 - 15 u^4 + 6 u^5); C^2 at both ends
    out[mid] = 1.0 - u**3 * (10.0 + u * (-15.0 + 6.0 * u))
    return out if out.ndim else float(out)


def wiener_window(xi):
    """Triangle hat max(0, 1 - |xi|); its integer translates sum to 1."""
    x = np.asarray(xi, dtype=np.float64)
    out = np.maximum(0.0, 1.0 - np.abs(x))
    return out if out.ndim else float(out)


def _check_scale(scale: float) -> float:
    if not (math.isfinite(scale) and scale > 0.0):
        raise ValueError(f"projection scale must be finite and positive, got {scale}")
    return float(scale)


def project_low(p: SpectralProfile, scale: float) -> SpectralProfile:
    """Frequencies |xi| <~ scale: multiplier dyadic_cutoff(xi / scale)."""
    n = _check_scale(scale)
    return p.with_amplitudes(p.amplitudes * dyadic_cutoff(p.xi / n))


def project_band(p: SpectralProfile, scale: float) -> SpectralProfile:
    """The dyadic shell at `scale`: cutoff(xi/scale) - cutoff(2 xi/scale)."""
    n = _check_scale(scale)
    xi = p.xi
    mult = dyadic_cutoff(xi / n) - dyadic_cutoff(2.0 * xi / n)
    return p.with_amplitudes(p.amplitudes * mult)


def project_high(p: SpectralProfile, scale: float) -> SpectralProfile:
    """Frequencies |xi| >~ scale: multiplier 1 - dyadic_cutoff(xi / scale)."""
    n = _check_scale(scale)
    return p.with_amplitudes(p.amplitudes * (1.0 - dyadic_cutoff(p.xi / n)))


def wiener_project(p: SpectralProfile, k: int) -> SpectralProfile:
    """Restrict to the unit window centred at integer k."""
    return p.with_amplitudes(p.amplitudes * wiener_window(p.xi - k))


@dataclass
class WienerDecomposition:
    """Profile split over the integer-translated unit windows k_min..k_max."""

    k_min: int
    k_max: int
    pieces: list  # SpectralProfile per k, in k order

    def __post_init__(self):
        if self.k_max < self.k_min:
            raise ValueError("k_max must be >= k_min")
        if len(self.pieces) != self.k_max - self.k_min + 1:
            raise ValueError("one piece per k is required")

    @property
    def ks(self) -> np.ndarray:
        return np.arange(self.k_min, self.k_max + 1)

    def piece(self, k: int) -> SpectralProfile:
        if not self.k_min <= k <= self.k_max:
            raise KeyError(f"k = {k} outside decomposition range")
        return self.pieces[k - self.k_min]

    def reconstruct(self) -> SpectralProfile:
        """Sum the pieces in k order (exact up to one rounding per product)."""
        total = np.zeros(self.pieces[0].n, dtype=np.complex128)
        for piece in self.pieces:
            total += piece.amplitudes
        return self.pieces[0].with_amplitudes(total)


def wiener_decompose(p: SpectralProfile) -> WienerDecomposition:
    """Split `p` over unit windows covering its amplitude support.

    The window range is [floor(min supported xi) - 1, ceil(max supported
    xi) + 1], which always includes the two edge windows that vanish on
    the support itself.
    """
    supported = p.xi[p.amplitudes != 0.0]
    if supported.size == 0:
        k_min = k_max = 0
    else:
        k_min = int(math.floor(supported.min())) - 1
        k_max = int(math.ceil(supported.max())) + 1
    pieces = [wiener_project(p, k) for k in range(k_min, k_max + 1)]
    return WienerDecomposition(k_min, k_max, pieces)


def square_function(p: SpectralProfile, grid: SpaceGrid) -> SpaceField:
    """Pointwise l2 aggregate of the synthesised Wiener pieces.

    Returns sqrt(sum_k |piece_k(x)|^2) as a real-valued field; its sup is
    controlled by the L2 norm of `p` with room to spare.
    """
    dec = wiener_decompose(p)
    coeffs = np.stack([piece.amplitudes for piece in dec.pieces])
    coeffs = coeffs * (trapezoid_weights(p.n) * (p.xi_step / SQRT_2PI))
    xi = p.xi
    x = grid.points
    out = np.empty(grid.n)
    chunk = max(1, int(4_000_000 // max(p.n, 1)))
    for lo in range(0, grid.n, chunk):
        hi = min(lo + chunk, grid.n)
        fields = np.exp(1j * np.outer(x[lo:hi], xi)) @ coeffs.T  # (chunk, K)
        out[lo:hi] = np.sqrt(np.sum(np.abs(fields) ** 2, axis=1))
    return SpaceField(grid.x_min, grid.x_step, out)
