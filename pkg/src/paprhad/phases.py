"""Quantized phase-shift optimization for the passive array.

With the precoded signal ``x`` held fixed, the residual
``H diag(d) T x - s`` is affine in the phase vector ``d``. The phases are
updated by exact coordinate descent: each entry is set to the best member
of the phase alphabet while the others stay fixed.

:func:`alternate_had` alternates that update with the constrained
least-squares precoder until the phases stop changing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .glse import GlseConfig, PrecodedSignal, _as_matrix, effective_channel, solve_glse_batch

__all__ = [
    "PhaseAlphabet",
    "PhaseConfig",
    "AlternatingConfig",
    "AlternatingResult",
    "phase_objective",
    "coordinate_descent_phases",
    "alternate_had",
    "alternate_had_batch",
    "regularized_objective",
]


@dataclass(frozen=True)
class PhaseAlphabet:
    """Realizable phase shifts ``exp(j 2 pi B_q)``."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex).reshape(-1)
        if v.size < 1:
            raise ValueError("alphabet needs at least one value")
        if np.any(np.abs(np.abs(v) - 1) > 1e-12):
            raise ValueError("alphabet values must have unit modulus")
        if np.unique(np.round(v, 12)).size != v.size:
            raise ValueError("alphabet values must be distinct")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def uniform(cls, Q: int = 4) -> "PhaseAlphabet":
        """``Q`` equally spaced phases starting at 0."""
        if Q < 1:
            raise ValueError(f"Q must be positive, got {Q}")
        return cls.from_fractions(np.arange(Q) / Q)

    @classmethod
    def from_fractions(cls, fractions) -> "PhaseAlphabet":
        b = np.asarray(fractions, dtype=float)
        if np.any((b < 0) | (b > 1)):
            raise ValueError("phase fractions must lie in [0, 1]")
        return cls(np.exp(2j * np.pi * b))

    @property
    def Q(self) -> int:
        return self.values.size

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class PhaseConfig:
    """Phase vector ``d`` stored as alphabet indices; ``d`` is looked up from the alphabet."""

    indices: np.ndarray
    alphabet: PhaseAlphabet

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=int)
        if np.any((idx < 0) | (idx >= self.alphabet.Q)):
            raise ValueError("phase index outside the alphabet")
        object.__setattr__(self, "indices", idx)

    @property
    def d(self) -> np.ndarray:
        return self.alphabet.values[self.indices]

    @property
    def M(self) -> int:
        return self.indices.shape[-1]

    @classmethod
    def ones(cls, M: int, alphabet: PhaseAlphabet) -> "PhaseConfig":
        """All elements at the first alphabet value (zero phase for uniform alphabets)."""
        return cls(np.zeros(M, int), alphabet)

    @classmethod
    def random(cls, M: int, alphabet: PhaseAlphabet, rng: np.random.Generator) -> "PhaseConfig":
        return cls(rng.integers(0, alphabet.Q, size=M), alphabet)


@dataclass(frozen=True)
class AlternatingConfig:
    threshold: float
    max_iter: int = 20

    def __post_init__(self):
        if not self.threshold > 0:
            raise ValueError(f"threshold must be positive, got {self.threshold}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be at least 1, got {self.max_iter}")

    @classmethod
    def default(cls, M: int) -> "AlternatingConfig":
        return cls(threshold=1e-6 * np.sqrt(M), max_iter=20)


@dataclass
class AlternatingResult:
    signal: PrecodedSignal
    phases: PhaseConfig
    trace: list = field(default_factory=list)
    iterations: int = 0
    stopped_by: str = ""


def _feed(T) -> np.ndarray:
    return _as_matrix(T)


def phase_objective(d, x, H, T, s):
    """``||H diag(d) T x - s||^2`` for a fixed precoded signal."""
    d = np.asarray(getattr(d, "d", d))
    H = np.asarray(H)
    w0 = np.einsum("...mn,...n->...m", _feed(T), np.asarray(x))
    if H.shape[-1] != d.shape[-1] or w0.shape[-1] != d.shape[-1]:
        raise ValueError(f"dimension mismatch: H {H.shape}, d {d.shape}, T x {w0.shape}")
    r = np.einsum("...km,...m->...k", H, d * w0) - s
    return np.sum(np.abs(r) ** 2, axis=-1)


def regularized_objective(x, d, H, T, s, mu: float):
    """``||H diag(d) T x - s||^2 + mu ||x||^2``."""
    return phase_objective(d, x, H, T, s) + mu * np.sum(np.abs(np.asarray(x)) ** 2, axis=-1)


def _descend(idx, values, B, s, sweeps, history=None):
    """Coordinate descent on index arrays ``idx`` of shape ``(b, M)``; ``B = H diag(T x)``.

    When ``history`` is a list, the cached objective after every coordinate
    visit is appended to it.
    """
    idx = idx.copy()
    M = idx.shape[-1]
    rows = np.arange(idx.shape[0])
    col_energy = np.sum(np.abs(B) ** 2, axis=-2)  # (b, M)
    changed_any = np.zeros(idx.shape[0], bool)
    for _ in range(sweeps):
        r = np.einsum("bkm,bm->bk", B, values[idx]) - s
        changed = np.zeros(idx.shape[0], bool)
        for m in range(M):
            cur = values[idx[:, m]]
            delta = values[None, :] - cur[:, None]  # (b, Q)
            corr = np.einsum("bk,bk->b", B[:, :, m].conj(), r)  # B_m^H r
            gain = 2 * np.real(delta.conj() * corr[:, None]) + np.abs(delta) ** 2 * col_energy[:, m, None]
            gain[rows, idx[:, m]] = 0.0
            best = np.argmin(gain, axis=-1)
            move = gain[rows, best] < 0
            if np.any(move):
                sel = rows[move]
                r[sel] += B[sel, :, m] * delta[sel, best[move], None]
                idx[sel, m] = best[move]
                changed |= move
            if history is not None:
                history.append(np.sum(np.abs(r) ** 2, axis=-1))
        changed_any |= changed
        if not np.any(changed):
            break
    return idx, changed_any


def coordinate_descent_phases(d0: PhaseConfig, x, H, T, s, sweeps: int = 1, history: list | None = None) -> PhaseConfig:
    """Improve ``d0`` by ``sweeps`` passes of exact per-coordinate minimization.

    Coordinates are visited in ascending order. A coordinate only moves when
    another alphabet value strictly lowers the objective; ties keep the
    current value, otherwise the lowest index wins. Stops early once a full
    pass changes nothing. Leading batch dimensions on ``x``, ``H``, ``s`` and
    ``d0.indices`` are supported.

    Pass a list as ``history`` to collect the objective after each
    coordinate visit.
    """
    H = np.asarray(H)
    s = np.asarray(s)
    w0 = np.einsum("...mn,...n->...m", _feed(T), np.asarray(x))
    B = H * w0[..., None, :]
    batch = B.shape[:-2]
    K, M = B.shape[-2:]
    if d0.indices.shape[-1] != M:
        raise ValueError(f"phase vector has length {d0.indices.shape[-1]}, expected {M}")
    idx0 = np.broadcast_to(d0.indices, (*batch, M)).reshape(-1, M)
    steps = [] if history is not None else None
    idx, _ = _descend(idx0, d0.alphabet.values, B.reshape(-1, K, M), s.reshape(-1, K), sweeps, steps)
    if history is not None:
        history.extend(h.reshape(batch) for h in steps)
    return PhaseConfig(idx.reshape(*batch, M), d0.alphabet)


def alternate_had_batch(
    s,
    H,
    T,
    glse_cfg: GlseConfig,
    alt_cfg: AlternatingConfig,
    d_init: PhaseConfig,
    sweeps: int = 1,
    x_init=None,
    precoder=None,
):
    """Alternating precoder/phase optimization over a batch of realizations.

    Each realization stops independently when ``||d_{t+1} - d_t|| < threshold``
    or after ``alt_cfg.max_iter`` outer iterations. Every precoder solve is
    warm-started from the previous signal, which keeps the regularized
    objective non-increasing across half-steps.

    ``precoder(H_e, s, x_prev) -> (x, converged)`` replaces the GLSE step
    when given (used to pair the phase update with other precoders).

    Returns ``(x, indices, objective, converged, iterations, settled, trace)``
    where ``settled`` marks realizations stopped by the threshold and the
    trace has shape ``(..., 2 * max_iter)`` with NaN after a realization stops.
    """
    H = np.asarray(H)
    s = np.asarray(s)
    Tm = _feed(T)
    K, M = H.shape[-2:]
    N = Tm.shape[-1]
    batch = H.shape[:-2]
    H = H.reshape(-1, K, M)
    s = s.reshape(-1, K)
    b = H.shape[0]
    values = d_init.alphabet.values
    idx = np.broadcast_to(d_init.indices, (*batch, M)).reshape(-1, M).copy()
    x = np.zeros((b, N), complex) if x_init is None else np.broadcast_to(x_init, (*batch, N)).reshape(b, N).copy()
    obj = np.zeros(b)
    conv = np.zeros(b, bool)
    iters = np.zeros(b, int)
    settled = np.zeros(b, bool)
    trace = np.full((b, 2 * alt_cfg.max_iter), np.nan)
    active = np.arange(b)
    mu = glse_cfg.mu

    for t in range(alt_cfg.max_iter):
        Ha, sa, ia = H[active], s[active], idx[active]
        A = effective_channel(Ha, values[ia], Tm).matrix
        if precoder is None:
            xa, _, _, ca, _ = solve_glse_batch(
                A, sa, mu, glse_cfg.peak_power, glse_cfg.tol, glse_cfg.max_iter, glse_cfg.accelerate, x0=x[active]
            )
        else:
            xa, ca = precoder(A, sa, x[active])
        trace[active, 2 * t] = regularized_objective(xa, values[ia], Ha, Tm, sa, mu)
        w0 = xa @ Tm.T
        new_idx, _ = _descend(ia, values, Ha * w0[:, None, :], sa, sweeps)
        trace[active, 2 * t + 1] = regularized_objective(xa, values[new_idx], Ha, Tm, sa, mu)
        step = np.linalg.norm(values[new_idx] - values[ia], axis=-1)

        x[active], idx[active], conv[active], iters[active] = xa, new_idx, ca, t + 1
        obj[active] = trace[active, 2 * t + 1]
        settled[active] = step < alt_cfg.threshold
        active = active[~settled[active]]
        if active.size == 0:
            break

    return (
        x.reshape(*batch, N),
        idx.reshape(*batch, M),
        obj.reshape(batch),
        conv.reshape(batch),
        iters.reshape(batch),
        settled.reshape(batch),
        trace.reshape(*batch, -1),
    )


def alternate_had(
    s, H, T, glse_cfg: GlseConfig, alt_cfg: AlternatingConfig, d_init: PhaseConfig, sweeps: int = 1, x_init=None
) -> AlternatingResult:
    """Alternate precoder solves and phase updates for one realization.

    Returns the last precoded signal and phase vector together with the
    regularized objective after every half-step.
    """
    x, idx, obj, conv, iters, settled, trace = alternate_had_batch(
        s, H, T, glse_cfg, alt_cfg, d_init, sweeps=sweeps, x_init=x_init
    )
    n = int(iters)
    tr = trace[: 2 * n].tolist()
    phases = PhaseConfig(idx, d_init.alphabet)
    stopped = "threshold" if settled else "max_iter"
    signal = PrecodedSignal(
        x=x,
        objective=float(regularized_objective(x, phases.d, H, T, s, glse_cfg.mu)),
        iterations=n,
        converged=bool(conv),
    )
    return AlternatingResult(signal=signal, phases=phases, trace=tr, iterations=n, stopped_by=stopped)

