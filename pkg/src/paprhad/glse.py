"""PAPR-limited regularized least-squares precoding.

The precoder solves::

    minimize   ||H_e v - s||^2 + mu ||v||^2
    subject to |v_n|^2 <= P   for every n

by projected gradient descent with a fixed ``1/L`` step and optional
Nesterov momentum. Momentum is reset whenever a step would increase the
objective, so the objective sequence is monotone in both modes.

All array routines accept leading batch dimensions: ``H_e`` of shape
``(..., K, N)`` with ``s`` of shape ``(..., K)``. Each problem in a batch
stops independently once its fixed-point residual drops below ``tol``.

``mu`` may be negative. For ``mu < -lambda_min(H_e^H H_e)`` the problem is
no longer convex; the solver then returns a stationary point reached from
the starting vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "GlseConfig",
    "PrecodedSignal",
    "EffectiveChannel",
    "effective_channel",
    "project_disk",
    "glse_objective",
    "lipschitz_constant",
    "max_eigenvalue",
    "solve_glse",
    "solve_glse_batch",
    "ridge_solution",
]


@dataclass(frozen=True)
class GlseConfig:
    mu: float = 0.0
    peak_power: float = 1.0
    tol: float = 1e-8
    max_iter: int = 5000
    accelerate: bool = True

    def __post_init__(self):
        if not np.isfinite(self.mu):
            raise ValueError(f"regularizer must be finite, got {self.mu}")
        if not self.peak_power > 0:
            raise ValueError(f"peak power must be positive, got {self.peak_power}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be at least 1, got {self.max_iter}")


@dataclass
class PrecodedSignal:
    x: np.ndarray
    objective: float
    iterations: int
    converged: bool
    residual: float = 0.0


@dataclass(frozen=True)
class EffectiveChannel:
    matrix: np.ndarray

    def __post_init__(self):
        if not np.all(np.isfinite(self.matrix)):
            raise ValueError("effective channel has non-finite entries")


def _as_matrix(a) -> np.ndarray:
    if isinstance(a, EffectiveChannel):
        return a.matrix
    if hasattr(a, "entries"):
        return a.entries
    return np.asarray(a)


def _as_phases(d) -> np.ndarray:
    return np.asarray(getattr(d, "d", d))


def effective_channel(H, d, T) -> EffectiveChannel:
    """End-to-end channel ``H diag(d) T``."""
    H = np.asarray(H)
    d = _as_phases(d)
    T = _as_matrix(T)
    if H.shape[-1] != d.shape[-1] or T.shape[-2] != d.shape[-1]:
        raise ValueError(f"dimension mismatch: H {H.shape}, d {d.shape}, T {T.shape}")
    return EffectiveChannel((H * d[..., None, :]) @ T)


def project_disk(v, P: float):
    """Project entries of ``v`` onto the disk ``|v|^2 <= P``, keeping their phase."""
    v = np.asarray(v)
    mag = np.abs(v)
    outside = mag**2 > P
    if not np.any(outside):
        return v.copy() if v.ndim else v[()]
    scale = np.ones_like(mag)
    np.divide(np.sqrt(P), mag, out=scale, where=outside)
    out = v * scale
    return out if out.ndim else out[()]


def glse_objective(v, H_e, s, mu: float):
    """``||H_e v - s||^2 + mu ||v||^2`` (batched over leading dimensions)."""
    A = _as_matrix(H_e)
    v = np.asarray(v)
    s = np.asarray(s)
    if A.shape[-1] != v.shape[-1] or A.shape[-2] != s.shape[-1]:
        raise ValueError(f"dimension mismatch: H_e {A.shape}, v {v.shape}, s {s.shape}")
    r = np.einsum("...kn,...n->...k", A, v) - s
    return np.sum(np.abs(r) ** 2, axis=-1) + mu * np.sum(np.abs(v) ** 2, axis=-1)


def max_eigenvalue(G: np.ndarray, max_iter: int = 50, rtol: float = 1e-10) -> np.ndarray:
    """Largest eigenvalue of Hermitian PSD matrices ``G`` (``(..., N, N)``) by power iteration."""
    n = G.shape[-1]
    u = np.ones(G.shape[:-1], dtype=complex) / np.sqrt(n)
    lam = np.zeros(G.shape[:-2])
    for _ in range(max_iter):
        w = np.einsum("...ij,...j->...i", G, u)
        new = np.linalg.norm(w, axis=-1)
        safe = np.where(new > 0, new, 1.0)
        u = w / safe[..., None]
        done = np.all(np.abs(new - lam) <= rtol * np.maximum(new, np.finfo(float).tiny))
        lam = new
        if done:
            break
    return lam


def lipschitz_constant(A: np.ndarray, mu) -> np.ndarray:
    """Gradient Lipschitz constant ``2 max|lambda_i + mu|`` of the objective."""
    G = np.einsum("...kn,...km->...nm", A.conj(), A)
    lam = max_eigenvalue(G)
    mu = np.asarray(mu, dtype=float)
    L = 2 * np.maximum(lam + mu, -mu)
    return np.maximum(L, np.finfo(float).tiny)


def _grad(A, AH, v, s, mu):
    r = np.einsum("...kn,...n->...k", A, v) - s
    return 2 * (np.einsum("...nk,...k->...n", AH, r) + mu[..., None] * v)


def _objective(A, v, s, mu):
    r = np.einsum("...kn,...n->...k", A, v) - s
    return np.sum(r.real**2 + r.imag**2, axis=-1) + mu * np.sum(v.real**2 + v.imag**2, axis=-1)


def solve_glse_batch(A, s, mu, peak_power=1.0, tol=1e-8, max_iter=5000, accelerate=True, x0=None, trace=False):
    """Solve a batch of independent problems.

    Returns ``(x, objective, iterations, converged, residual)`` with batch
    shape ``A.shape[:-2]``; with ``trace=True`` a list of per-iteration
    objective arrays (over the whole batch) is appended.
    """
    A = np.asarray(A, dtype=complex)
    s = np.asarray(s, dtype=complex)
    batch = A.shape[:-2]
    K, N = A.shape[-2:]
    if s.shape != (*batch, K):
        raise ValueError(f"dimension mismatch: H_e {A.shape}, s {s.shape}")

    A = A.reshape(-1, K, N)
    s = s.reshape(-1, K)
    B = A.shape[0]
    mu = np.broadcast_to(np.asarray(mu, dtype=float), batch).reshape(-1).copy()
    P = float(peak_power)

    if x0 is None:
        x = np.zeros((B, N), complex)
    else:
        x = project_disk(np.broadcast_to(np.asarray(x0, dtype=complex), (*batch, N)).reshape(B, N), P)

    L = lipschitz_constant(A, mu)
    out_x = x.copy()
    out_iter = np.zeros(B, int)
    out_conv = np.zeros(B, bool)
    out_res = np.full(B, np.inf)
    history = []

    idx = np.arange(B)
    Aa, AHa, sa, mua, La = A, A.conj().transpose(0, 2, 1), s, mu, L
    xa = x
    ya = x.copy()
    ta = np.ones(B)
    fa = _objective(Aa, xa, sa, mua)

    for it in range(max_iter + 1):
        # fixed-point residual at the current iterate
        pg = project_disk(xa - _grad(Aa, AHa, xa, sa, mua) / La[:, None], P)
        res = np.linalg.norm(xa - pg, axis=-1)
        if trace:
            full = np.full(B, np.nan)
            full[idx] = fa
            history.append(full)
        done = res <= tol
        if it == max_iter:
            done[:] = True
        if np.any(done):
            out_x[idx[done]] = xa[done]
            out_iter[idx[done]] = it
            out_conv[idx[done]] = res[done] <= tol
            out_res[idx[done]] = res[done]
            keep = ~done
            if not np.any(keep):
                break
            idx = idx[keep]
            Aa, AHa, sa, mua, La = Aa[keep], AHa[keep], sa[keep], mua[keep], La[keep]
            xa, ya, ta, fa, pg = xa[keep], ya[keep], ta[keep], fa[keep], pg[keep]

        if not accelerate:
            fz = _objective(Aa, pg, sa, mua)
            xa, fa = pg, fz
            continue

        z = project_disk(ya - _grad(Aa, AHa, ya, sa, mua) / La[:, None], P)
        fz = _objective(Aa, z, sa, mua)
        # a step taken from the restart point is a plain projected-gradient
        # step, which descends in exact arithmetic; accept it regardless of
        # round-off in the comparison
        ok = (fz <= fa) | (ta == 1.0)
        tn = (1 + np.sqrt(1 + 4 * ta**2)) / 2
        y_acc = z + ((ta - 1) / tn)[:, None] * (z - xa)
        # rejected steps restart momentum from the current iterate
        ya = np.where(ok[:, None], y_acc, xa)
        xa = np.where(ok[:, None], z, xa)
        fa = np.where(ok, fz, fa)
        ta = np.where(ok, tn, 1.0)

    out_x = out_x.reshape(*batch, N)
    obj = _objective(A, out_x.reshape(B, N), s, mu).reshape(batch)
    result = (out_x, obj, out_iter.reshape(batch), out_conv.reshape(batch), out_res.reshape(batch))
    if trace:
        return result + (history,)
    return result


def solve_glse(H_e, s, cfg: GlseConfig, warm_start=None) -> PrecodedSignal:
    """Precoded signal for one channel realization."""
    A = _as_matrix(H_e)
    s = np.asarray(s)
    if A.ndim != 2:
        raise ValueError(f"expected a single K x N channel, got shape {A.shape}")
    if warm_start is not None and np.shape(warm_start) != (A.shape[1],):
        raise ValueError(f"warm start must have length {A.shape[1]}")
    x, obj, it, conv, res = solve_glse_batch(
        A, s, cfg.mu, cfg.peak_power, cfg.tol, cfg.max_iter, cfg.accelerate, x0=warm_start
    )
    return PrecodedSignal(x=x, objective=float(obj), iterations=int(it), converged=bool(conv), residual=float(res))


def ridge_solution(H_e, s, mu: float) -> np.ndarray:
    """Unconstrained minimizer ``(H_e^H H_e + mu I)^{-1} H_e^H s``."""
    A = _as_matrix(H_e)
    AH = np.swapaxes(A.conj(), -1, -2)
    G = AH @ A + mu * np.eye(A.shape[-1])
    return np.linalg.solve(G, (AH @ np.asarray(s)[..., None]))[..., 0]
