"""Array geometry and the feed matrix between active antennas and the passive array.

Coordinate convention: the passive array sits in the vertical plane
``x = R_d`` and faces the active ring along the boresight axis ``+x``.
Elevation is measured from the global vertical axis ``+z`` and azimuth in
the horizontal plane from ``+x``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

logger = logging.getLogger(__name__)

__all__ = [
    "Position3",
    "ArrayGeometry",
    "RadiationPattern",
    "FeedMatrix",
    "DegenerateGeometryError",
    "build_default_geometry",
    "build_geometry",
    "relative_spherical",
    "pattern_gain",
    "build_feed_matrix",
]


class DegenerateGeometryError(ValueError):
    """Raised when an active antenna and a passive element coincide."""


@dataclass(frozen=True)
class Position3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not np.all(np.isfinite([self.x, self.y, self.z])):
            raise ValueError(f"non-finite position {self!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class ArrayGeometry:
    """Positions of the ``N`` active antennas and ``M`` passive elements.

    ``ring_radius`` and ``separation`` describe how the positions were laid
    out and are kept for reporting; the feed matrix only uses the positions.
    """

    wavelength: float
    active_positions: tuple[Position3, ...]
    passive_positions: tuple[Position3, ...]
    ring_radius: float
    separation: float
    efficiency: float = 1.0

    def __post_init__(self):
        if not self.wavelength > 0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")
        if not self.separation > 0:
            raise ValueError(f"separation must be positive, got {self.separation}")
        if not 0 < self.efficiency <= 1:
            raise ValueError(f"efficiency must lie in (0, 1], got {self.efficiency}")
        if len(self.active_positions) < 1 or len(self.passive_positions) < 1:
            raise ValueError("geometry needs at least one active and one passive element")

    @property
    def n_active(self) -> int:
        return len(self.active_positions)

    @property
    def n_passive(self) -> int:
        return len(self.passive_positions)

    def active_array(self) -> np.ndarray:
        return np.array([p.as_array() for p in self.active_positions])

    def passive_array(self) -> np.ndarray:
        return np.array([p.as_array() for p in self.passive_positions])


@dataclass(frozen=True)
class RadiationPattern:
    """Horizontally omnidirectional pattern, uniform over an elevation band."""

    elevation_lo: float = np.pi / 6
    elevation_hi: float = 5 * np.pi / 6

    def __post_init__(self):
        if not 0 <= self.elevation_lo < self.elevation_hi <= np.pi:
            raise ValueError(
                f"need 0 <= elevation_lo < elevation_hi <= pi, got "
                f"({self.elevation_lo}, {self.elevation_hi})"
            )


@dataclass(frozen=True)
class FeedMatrix:
    """``M x N`` complex channel from the active antennas to the passive array."""

    entries: np.ndarray
    normalized: bool = True
    n_zero: int = 0
    distances: np.ndarray = field(default=None, repr=False)
    elevations: np.ndarray = field(default=None, repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


def _positions(points) -> tuple[Position3, ...]:
    out = []
    for p in points:
        out.append(p if isinstance(p, Position3) else Position3(*map(float, p)))
    return tuple(out)


def build_geometry(
    wavelength: float,
    n_active: int = 4,
    ring_radius: float | None = None,
    separation: float | None = None,
    passive_rows: int = 8,
    passive_cols: int = 8,
    passive_spacing: float | None = None,
    efficiency: float = 1.0,
    active_positions: Sequence | None = None,
    passive_positions: Sequence | None = None,
) -> ArrayGeometry:
    """Lay out an active ring facing a rectangular passive grid.

    Lengths default to multiples of the wavelength: ring radius ``lambda``,
    separation ``4 lambda / sqrt(pi)`` and grid spacing ``lambda / 2``.
    Explicit position lists replace the parametric layout.
    """
    if not wavelength > 0:
        raise ValueError(f"wavelength must be positive, got {wavelength}")
    if ring_radius is None:
        ring_radius = wavelength
    if separation is None:
        separation = 4 * wavelength / np.sqrt(np.pi)
    if passive_spacing is None:
        passive_spacing = wavelength / 2
    if n_active < 1 or passive_rows < 1 or passive_cols < 1:
        raise ValueError("element counts must be positive")

    if active_positions is None:
        angles = 2 * np.pi * np.arange(n_active) / n_active
        active_positions = [(0.0, ring_radius * np.cos(a), ring_radius * np.sin(a)) for a in angles]
    if passive_positions is None:
        cy = (np.arange(passive_cols) - (passive_cols - 1) / 2) * passive_spacing
        cz = (np.arange(passive_rows) - (passive_rows - 1) / 2) * passive_spacing
        passive_positions = [(separation, y, z) for z in cz for y in cy]

    return ArrayGeometry(
        wavelength=float(wavelength),
        active_positions=_positions(active_positions),
        passive_positions=_positions(passive_positions),
        ring_radius=float(ring_radius),
        separation=float(separation),
        efficiency=float(efficiency),
    )


def build_default_geometry(wavelength: float) -> ArrayGeometry:
    """64 passive elements on an 8x8 half-wavelength grid, 4 antennas on a ring of radius ``wavelength``."""
    return build_geometry(wavelength)


def _spherical(delta: np.ndarray):
    r = np.linalg.norm(delta, axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        theta = np.arccos(np.clip(delta[..., 2] / r, -1.0, 1.0))
    phi = np.mod(np.arctan2(delta[..., 1], delta[..., 0]), 2 * np.pi)
    return r, theta, phi


def relative_spherical(active: Position3, passive: Position3) -> tuple[float, float, float]:
    """Spherical coordinates ``(r, theta, phi)`` of ``passive`` seen from ``active``."""
    r, theta, phi = _spherical(passive.as_array() - active.as_array())
    if r == 0:
        raise DegenerateGeometryError(f"coincident positions {active} and {passive}")
    return float(r), float(theta), float(phi)


def pattern_gain(p: RadiationPattern, theta, phi=0.0):
    """Gain 1 inside the closed elevation band, 0 outside; independent of azimuth."""
    theta = np.asarray(theta, dtype=float)
    g = ((theta >= p.elevation_lo) & (theta <= p.elevation_hi)).astype(float)
    return g if g.ndim else float(g)


def build_feed_matrix(g: ArrayGeometry, p: RadiationPattern | None = None, normalize: bool = True) -> FeedMatrix:
    """Free-space feed matrix from every active antenna to every passive element.

    Entry ``(m, n)`` is ``lambda sqrt(zeta G) / (4 pi r) exp(-j 2 pi r / lambda)``.
    With ``normalize`` each nonzero entry is scaled to unit modulus; entries
    outside the antenna pattern stay zero.
    """
    if p is None:
        p = RadiationPattern()
    delta = g.passive_array()[:, None, :] - g.active_array()[None, :, :]
    r, theta, phi = _spherical(delta)
    if np.any(r == 0):
        m, n = np.argwhere(r == 0)[0]
        raise DegenerateGeometryError(f"passive element {m} coincides with active antenna {n}")

    lam = g.wavelength
    gain = pattern_gain(p, theta, phi)
    phase = np.exp(-2j * np.pi * r / lam)
    if normalize:
        entries = np.where(gain > 0, phase, 0.0 + 0.0j)
    else:
        entries = lam * np.sqrt(g.efficiency * gain) / (4 * np.pi * r) * phase

    n_zero = int(np.count_nonzero(gain == 0))
    if n_zero:
        logger.warning("feed matrix has %d zero entries outside the antenna pattern", n_zero)
    return FeedMatrix(entries=entries, normalized=normalize, n_zero=n_zero, distances=r, elevations=theta)
