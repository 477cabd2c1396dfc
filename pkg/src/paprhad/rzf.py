"""Regularized zero-forcing baseline with per-antenna clipping."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .glse import _as_matrix, ridge_solution

__all__ = ["RzfConfig", "SingularSystemError", "solve_rzf", "clip", "rzf_matched_identity_check"]

# reciprocal-condition threshold below which the K x K system is treated as singular
_RCOND_MIN = 1e3 * np.finfo(float).eps


class SingularSystemError(np.linalg.LinAlgError):
    """The regularized Gram matrix ``H_e H_e^H + mu I`` is numerically singular."""


@dataclass(frozen=True)
class RzfConfig:
    mu: float = 0.0
    peak_power: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.mu):
            raise ValueError(f"regularizer must be finite, got {self.mu}")
        if not self.peak_power > 0:
            raise ValueError(f"peak power must be positive, got {self.peak_power}")


def solve_rzf(H_e, s, cfg: RzfConfig | float) -> np.ndarray:
    """Unclipped RZF signal ``H_e^H (H_e H_e^H + mu I_K)^{-1} s``.

    Accepts leading batch dimensions. Raises :class:`SingularSystemError`
    when any Gram matrix in the batch is numerically singular.
    """
    mu = cfg.mu if isinstance(cfg, RzfConfig) else float(cfg)
    A = _as_matrix(H_e)
    s = np.asarray(s)
    if A.shape[-2] != s.shape[-1]:
        raise ValueError(f"dimension mismatch: H_e {A.shape}, s {s.shape}")
    AH = np.swapaxes(A.conj(), -1, -2)
    G = A @ AH + mu * np.eye(A.shape[-2])
    sv = np.linalg.svd(G, compute_uv=False)
    rcond = sv[..., -1] / np.maximum(sv[..., 0], np.finfo(float).tiny)
    if np.any(rcond < _RCOND_MIN):
        raise SingularSystemError(
            f"H_e H_e^H + {mu:g} I is singular (reciprocal condition {np.min(rcond):.3g})"
        )
    u = np.linalg.solve(G, s[..., None])
    return (AH @ u)[..., 0]


def clip(x, P: float) -> np.ndarray:
    """Scale entries with ``|x_n|^2 > P`` back to the peak-power circle."""
    x = np.asarray(x)
    mag = np.abs(x)
    over = mag**2 > P
    scale = np.ones_like(mag)
    np.divide(np.sqrt(P), mag, out=scale, where=over)
    return x * scale


def rzf_matched_identity_check(H_e, s, mu: float) -> float:
    """Relative gap between the ridge and RZF forms of the same linear precoder.

    Both equal ``(H_e^H H_e + mu I)^{-1} H_e^H s`` by the push-through
    identity, so the returned value only measures round-off.
    """
    x_rzf = solve_rzf(H_e, s, mu)
    x_ridge = ridge_solution(H_e, s, mu)
    denom = np.linalg.norm(x_rzf)
    if denom == 0:
        return float(np.linalg.norm(x_ridge))
    return float(np.linalg.norm(x_ridge - x_rzf) / denom)
