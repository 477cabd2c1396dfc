"""Monte Carlo sweep of the PAPR/distortion trade-off.

Realizations are processed in fixed-size chunks. Chunk boundaries depend
only on ``chunk_size``, never on the worker count, and chunk results are
concatenated in index order before any reduction, so a run is bit-identical
for any number of workers.

Both schemes see the same realizations at every sweep point, which makes
differences between them paired samples.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channel import draw_batch
from .config import ExperimentConfig
from .geometry import build_feed_matrix
from .glse import effective_channel, solve_glse_batch
from .metrics import PowerAccumulator, rss
from .phases import PhaseConfig, alternate_had_batch
from .rzf import clip, solve_rzf

logger = logging.getLogger(__name__)

__all__ = ["SCHEMES", "CurvePoint", "run_experiment", "paired_gap", "pareto_front", "interpolate_scheme"]

SCHEMES = ("glse", "rzf-clipped")


@dataclass
class CurvePoint:
    scheme: str
    mu: float
    papr_linear: float
    papr_db: float
    rss_mean: float
    J: int
    K: int
    N: int
    M: int
    seed: int
    converged_fraction: float
    mean_iterations: float = 0.0
    rss_scale: float = 1.0
    papr_per_antenna: np.ndarray = field(default=None, repr=False)
    rss_values: np.ndarray = field(default=None, repr=False)
    peak_values: np.ndarray = field(default=None, repr=False)


def _chunks(J: int, size: int):
    return [(a, min(a + size, J)) for a in range(0, J, size)]


def _run_chunk(cfg: ExperimentConfig, start: int, stop: int) -> dict:
    """Precode realizations ``start..stop-1`` for every scheme and sweep point."""
    T = build_feed_matrix(cfg.geometry(), cfg.pattern(), normalize=True).entries
    H, s = draw_batch(cfg.K, cfg.M, cfg.seed, range(start, stop))
    alphabet = cfg.alphabet()
    d0 = PhaseConfig.ones(cfg.M, alphabet)
    d_fixed = np.broadcast_to(d0.d, (H.shape[0], cfg.M))
    A_fixed = effective_channel(H, d_fixed, T).matrix
    P = cfg.peak_power

    out = {}
    for scheme, mus in (("glse", cfg.mu_rls), ("rzf-clipped", cfg.mu_rzf)):
        rows = []
        for mu in mus:
            if cfg.optimize_phases:
                precoder = None
                if scheme == "rzf-clipped":
                    def precoder(A, sa, _prev, mu=mu):
                        return clip(solve_rzf(A, sa, mu), P), np.ones(A.shape[0], bool)
                x, idx, _, conv, iters, _, _ = alternate_had_batch(
                    s, H, T, cfg.glse(mu), cfg.alternating(), d0, sweeps=cfg.phase_sweeps, precoder=precoder
                )
                d = alphabet.values[idx]
            elif scheme == "glse":
                x, _, iters, conv, _ = solve_glse_batch(
                    A_fixed, s, mu, P, cfg.glse_tol, cfg.glse_max_iter, cfg.glse_accelerate
                )
                d = d_fixed
            else:
                x = clip(solve_rzf(A_fixed, s, mu), P)
                conv = np.ones(H.shape[0], bool)
                iters = np.zeros(H.shape[0], int)
                d = d_fixed
            rows.append(
                {
                    "power": np.abs(x) ** 2,
                    "rss": rss(x, d, T, H, s),
                    "converged": np.asarray(conv, bool),
                    "iterations": np.asarray(iters, float),
                }
            )
        out[scheme] = rows
    return out


def _run_chunk_star(args):
    return _run_chunk(*args)


def run_experiment(cfg: ExperimentConfig, workers: int | None = None) -> list[CurvePoint]:
    """One curve point per scheme and regularizer, GLSE points first."""
    workers = cfg.workers if workers is None else workers
    J = cfg.realizations
    tasks = [(cfg, a, b) for a, b in _chunks(J, cfg.chunk_size)]
    logger.info("running %d realizations in %d chunks on %d worker(s)", J, len(tasks), workers)
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk_star, tasks))
    else:
        parts = [_run_chunk_star(t) for t in tasks]

    points = []
    for scheme, mus in (("glse", cfg.mu_rls), ("rzf-clipped", cfg.mu_rzf)):
        for i, mu in enumerate(mus):
            cat = lambda key: np.concatenate([p[scheme][i][key] for p in parts])  # noqa: E731
            power, rss_values, conv, iters = cat("power"), cat("rss"), cat("converged"), cat("iterations")
            acc = PowerAccumulator(cfg.N)
            acc.add_batch(power, rss_values)
            agg = acc.result(cfg.K, cfg.rss_normalization)
            points.append(
                CurvePoint(
                    scheme=scheme,
                    mu=float(mu),
                    papr_linear=agg.papr_mean,
                    papr_db=agg.papr_mean_db,
                    rss_mean=agg.rss_mean,
                    J=J,
                    K=cfg.K,
                    N=cfg.N,
                    M=cfg.M,
                    seed=cfg.seed,
                    converged_fraction=float(np.mean(conv)),
                    mean_iterations=float(np.mean(iters)),
                    rss_scale=(J if cfg.rss_normalization == "per-user-total" else 1) / cfg.K,
                    papr_per_antenna=agg.papr_per_antenna,
                    rss_values=rss_values,
                    peak_values=power.max(axis=1),
                )
            )
            if agg.undefined_antennas:
                logger.warning("%s mu=%g: antennas %s never transmit", scheme, mu, agg.undefined_antennas)
    return points


def pareto_front(points: list[CurvePoint]) -> list[CurvePoint]:
    """Points not beaten in both PAPR and RSS by another point, sorted by PAPR."""
    ordered = sorted(points, key=lambda p: (p.papr_db, p.rss_mean))
    front, best = [], np.inf
    for p in ordered:
        if p.rss_mean < best:
            front.append(p)
            best = p.rss_mean
    return front


def interpolate_scheme(points: list[CurvePoint], papr_db: float):
    """Linear interpolation of a PAPR-sorted curve at ``papr_db``.

    Returns ``(rss_mean, per-realization rss)`` using the same weights for
    both, or ``None`` outside the curve's PAPR range.
    """
    x = np.array([p.papr_db for p in points])
    if not x[0] <= papr_db <= x[-1]:
        return None
    hi = int(np.searchsorted(x, papr_db, side="left"))
    if x[hi] == papr_db or hi == 0:
        p = points[hi]
        return p.rss_mean, p.rss_values
    lo = hi - 1
    w = (papr_db - x[lo]) / (x[hi] - x[lo])
    a, b = points[lo], points[hi]
    return (1 - w) * a.rss_mean + w * b.rss_mean, (1 - w) * a.rss_values + w * b.rss_values


def paired_gap(first: list[CurvePoint], second: list[CurvePoint], papr_db: float):
    """Interpolated RSS gap ``second - first`` at ``papr_db`` and its paired standard error.

    Standard error is computed from per-realization differences, which is
    valid because both curves use the same realizations. Both values are in
    the units of ``rss_mean``.
    """
    a = interpolate_scheme(first, papr_db)
    b = interpolate_scheme(second, papr_db)
    if a is None or b is None:
        return None
    diff = b[1] - a[1]
    scale = first[0].rss_scale
    se = float(scale * np.std(diff, ddof=1) / np.sqrt(diff.size)) if diff.size > 1 else float("inf")
    return b[0] - a[0], se
