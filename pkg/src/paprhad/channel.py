"""Seeded random channels and information symbols.

Every realization ``j`` owns an independent PCG64 stream derived from
``SeedSequence(seed, spawn_key=(j,))``, so realization ``j`` is reproducible
on its own and independent of how realizations are split across workers.
Gaussian samples come from ``Generator.standard_normal`` (ziggurat).
The channel matrix is drawn first, then the symbols, from the same stream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ChannelRealization",
    "realization_rng",
    "complex_gaussian",
    "draw_channel",
    "draw_symbols",
    "draw_realization",
    "draw_batch",
]


@dataclass(frozen=True)
class ChannelRealization:
    H: np.ndarray
    s: np.ndarray
    seed_tag: int

    def __post_init__(self):
        if self.H.ndim != 2 or self.s.shape != (self.H.shape[0],):
            raise ValueError(f"shape mismatch: H {self.H.shape}, s {self.s.shape}")
        if not (np.all(np.isfinite(self.H)) and np.all(np.isfinite(self.s))):
            raise ValueError("non-finite channel realization")


def realization_rng(seed: int, index: int) -> np.random.Generator:
    """Independent generator for realization ``index`` under master ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(index),)))


def complex_gaussian(rng: np.random.Generator, shape, variance: float = 1.0) -> np.ndarray:
    """Circularly-symmetric complex Gaussian samples with the given variance."""
    scale = np.sqrt(variance / 2)
    z = rng.standard_normal((*np.atleast_1d(shape), 2))
    return scale * (z[..., 0] + 1j * z[..., 1])


def draw_channel(K: int, M: int, rng: np.random.Generator) -> np.ndarray:
    """``K x M`` channel with i.i.d. CN(0, 1/M) entries."""
    if K < 1 or M < 1:
        raise ValueError(f"K and M must be positive, got K={K}, M={M}")
    return complex_gaussian(rng, (K, M), 1.0 / M)


def draw_symbols(K: int, rng: np.random.Generator) -> np.ndarray:
    """``K`` i.i.d. CN(0, 1) information symbols."""
    if K < 1:
        raise ValueError(f"K must be positive, got {K}")
    return complex_gaussian(rng, (K,), 1.0)


def draw_realization(K: int, M: int, seed: int, index: int) -> ChannelRealization:
    rng = realization_rng(seed, index)
    H = draw_channel(K, M, rng)
    s = draw_symbols(K, rng)
    return ChannelRealization(H=H, s=s, seed_tag=int(index))


def draw_batch(K: int, M: int, seed: int, indices) -> tuple[np.ndarray, np.ndarray]:
    """Stack realizations ``indices`` into arrays of shape ``(J, K, M)`` and ``(J, K)``."""
    reals = [draw_realization(K, M, seed, j) for j in indices]
    if not reals:
        return np.empty((0, K, M), complex), np.empty((0, K), complex)
    return np.stack([r.H for r in reals]), np.stack([r.s for r in reals])
