"""Brute-force reference computations and the small-instance verification suite.

Everything here is deliberately naive: explicit loops, exhaustive
enumeration and grid search. None of it shares code paths with the
optimized routines it checks.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "OracleCheck",
    "disk_grid",
    "grid_minimum",
    "grid_resolution_bound",
    "naive_effective_channel",
    "naive_residual_energy",
    "enumerate_phases",
    "dense_rzf",
    "two_pass_papr",
    "random_instance",
    "run_oracle_suite",
]


@dataclass
class OracleCheck:
    name: str
    passed: bool
    detail: str = ""


def disk_grid(P: float, step: float) -> np.ndarray:
    """Square-lattice points ``a + jb`` (spacing ``step``) with ``a^2 + b^2 <= P``."""
    r = math.sqrt(P)
    n = int(math.floor(r / step + 1e-9))
    axis = step * np.arange(-n, n + 1)
    re, im = np.meshgrid(axis, axis, indexing="ij")
    pts = (re + 1j * im).ravel()
    return pts[re.ravel() ** 2 + im.ravel() ** 2 <= P]


def grid_minimum(A, s, mu: float, P: float, step: float, block: int = 256) -> tuple[float, np.ndarray]:
    """Minimum of ``||A v - s||^2 + mu ||v||^2`` over the product grid of the polydisk.

    Supports ``N = 1`` and ``N = 2``. For two coordinates the objective at
    every grid pair ``(g_i, g_j)`` is ``c_i + 2 Re(conj(g_j) b_i) + e |g_j|^2``,
    which is evaluated for all pairs in blocks.
    """
    A = np.asarray(A, dtype=complex)
    s = np.asarray(s, dtype=complex)
    g = disk_grid(P, step)
    N = A.shape[1]
    if N == 1:
        vals = np.sum(np.abs(np.outer(A[:, 0], g) - s[:, None]) ** 2, axis=0) + mu * np.abs(g) ** 2
        i = int(np.argmin(vals))
        return float(vals[i]), np.array([g[i]])
    if N != 2:
        raise ValueError("grid search supports N <= 2")
    a1, a2 = A[:, 0], A[:, 1]
    e = float(np.sum(np.abs(a2) ** 2) + mu)
    g2_energy = e * np.abs(g) ** 2
    best, arg = np.inf, None
    for start in range(0, g.size, block):
        g1 = g[start : start + block]
        r1 = np.outer(g1, a1) - s[None, :]
        c = np.sum(np.abs(r1) ** 2, axis=1) + mu * np.abs(g1) ** 2
        b = r1 @ a2.conj()
        vals = c[:, None] + 2 * np.real(np.conj(g)[None, :] * b[:, None]) + g2_energy[None, :]
        k = int(np.argmin(vals))
        if vals.flat[k] < best:
            i, j = divmod(k, g.size)
            best, arg = float(vals.flat[k]), np.array([g1[i], g[j]])
    return best, arg


def grid_resolution_bound(A, s, mu: float, x, step: float) -> float:
    """Upper bound on ``grid_min - f(x)`` from the grid spacing.

    Every polydisk point has a feasible grid point within ``step`` per
    coordinate, so the gap is at most ``|grad f(x)| d + (L/2) d^2`` with
    ``d = step sqrt(N)``.
    """
    A = np.asarray(A)
    grad = 2 * (A.conj().T @ (A @ x - s) + mu * x)
    L = 2 * (np.linalg.norm(A, 2) ** 2 + abs(mu))
    d = step * math.sqrt(A.shape[1])
    return float(np.linalg.norm(grad) * d + 0.5 * L * d * d)


def naive_effective_channel(H, d, T) -> np.ndarray:
    K, M = H.shape
    N = T.shape[1]
    out = np.zeros((K, N), complex)
    for k in range(K):
        for n in range(N):
            acc = 0j
            for m in range(M):
                acc += H[k, m] * d[m] * T[m, n]
            out[k, n] = acc
    return out


def naive_residual_energy(x, d, T, H, s, mu: float = 0.0) -> float:
    He = naive_effective_channel(H, d, T)
    total = 0.0
    for k in range(He.shape[0]):
        y = sum(He[k, n] * x[n] for n in range(He.shape[1]))
        total += abs(y - s[k]) ** 2
    return total + mu * sum(abs(v) ** 2 for v in x)


def enumerate_phases(x, H, T, s, values) -> tuple[float, tuple]:
    """Exhaustive minimum of the residual energy over all ``Q^M`` phase vectors."""
    M = H.shape[1]
    w0 = T @ x
    best, arg = np.inf, None
    for combo in itertools.product(range(len(values)), repeat=M):
        d = np.asarray(values)[list(combo)]
        r = H @ (d * w0) - s
        val = float(np.vdot(r, r).real)
        if val < best:
            best, arg = val, combo
    return best, arg


def dense_rzf(H_e, s, mu: float) -> np.ndarray:
    """RZF through an explicit LU factorization of the ``K x K`` system."""
    K = H_e.shape[0]
    G = H_e @ H_e.conj().T + mu * np.eye(K)
    lu, piv = scipy.linalg.lu_factor(G)
    return H_e.conj().T @ scipy.linalg.lu_solve((lu, piv), s)


def two_pass_papr(powers) -> np.ndarray:
    """PAPR per antenna: first pass for the mean, second for the peak."""
    powers = [list(map(float, row)) for row in powers]
    J, N = len(powers), len(powers[0])
    out = []
    for n in range(N):
        mean = sum(powers[j][n] for j in range(J)) / J
        peak = max(powers[j][n] for j in range(J))
        out.append(peak / mean if mean > 0 else float("nan"))
    return np.array(out)


def random_instance(rng: np.random.Generator, K: int, N: int, M: int | None = None):
    """Random ``(H_e, s)`` or, with ``M``, ``(H, T, s)`` using unit-modulus ``T``."""
    cn = lambda *shape, var=1.0: np.sqrt(var / 2) * (  # noqa: E731
        rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    )
    s = cn(K)
    if M is None:
        return cn(K, N), s
    H = cn(K, M, var=1.0 / M)
    T = np.exp(2j * np.pi * rng.random((M, N)))
    return H, T, s


def run_oracle_suite(seed: int = 0) -> list[OracleCheck]:
    """Small brute-force checks of every module, each reported as pass/fail."""
    from .channel import draw_channel, draw_symbols, realization_rng
    from .config import ExperimentConfig
    from .experiment import run_experiment
    from .geometry import build_default_geometry, build_feed_matrix
    from .glse import GlseConfig, effective_channel, glse_objective, solve_glse
    from .metrics import papr_from_powers, rss
    from .phases import (
        AlternatingConfig,
        PhaseAlphabet,
        PhaseConfig,
        alternate_had,
        coordinate_descent_phases,
        phase_objective,
    )
    from .report import format_csv
    from .rzf import rzf_matched_identity_check, solve_rzf

    rng = np.random.default_rng(seed)
    checks: list[OracleCheck] = []

    def add(name, passed, detail=""):
        checks.append(OracleCheck(name, bool(passed), detail))

    lam = 5e-3
    geo = build_default_geometry(lam)
    pas = geo.passive_array()
    dmin = min(np.linalg.norm(pas[i] - pas[j]) for i in range(len(pas)) for j in range(i))
    add("passive grid minimum spacing is lambda/2", abs(dmin - lam / 2) < 1e-15, f"{dmin:.6e} m")

    F = build_feed_matrix(geo)
    act = geo.active_array()
    thetas = [
        math.acos((pas[m, 2] - act[n, 2]) / np.linalg.norm(pas[m] - act[n]))
        for m in range(len(pas))
        for n in range(len(act))
    ]
    add(
        "all elevations inside [pi/6, 5pi/6]",
        min(thetas) >= math.pi / 6 and max(thetas) <= 5 * math.pi / 6,
        f"range [{min(thetas):.4f}, {max(thetas):.4f}]",
    )
    ok = all(
        abs(F.entries[m, n] - complex(math.cos(-2 * math.pi * np.linalg.norm(pas[m] - act[n]) / lam),
                                      math.sin(-2 * math.pi * np.linalg.norm(pas[m] - act[n]) / lam))) < 1e-9
        for m in range(len(pas))
        for n in range(len(act))
    )
    add("normalized feed matrix matches scalar phase formula", ok)

    Hbig = draw_channel(1000, 1000, realization_rng(seed, 0))
    p2 = float(np.mean(np.abs(Hbig) ** 2)) * 1000
    add("channel entry variance 1/M within 0.5%", abs(p2 - 1) < 5e-3, f"M*E|h|^2 = {p2:.5f}")
    sym = draw_symbols(10**6, realization_rng(seed, 1))
    v = float(np.mean(np.abs(sym) ** 2))
    add("symbol variance 1 within 0.5%", abs(v - 1) < 5e-3, f"E|s|^2 = {v:.5f}")

    H, T, s = random_instance(rng, 3, 2, 5)
    d = np.exp(2j * np.pi * rng.random(5))
    err = np.max(np.abs(effective_channel(H, d, T).matrix - naive_effective_channel(H, d, T)))
    add("effective channel equals triple-loop product", err < 1e-14, f"max err {err:.1e}")

    x = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    a = float(glse_objective(x, effective_channel(H, d, T), s, 0.3))
    b = naive_residual_energy(x, d, T, H, s, 0.3)
    add("objective equals naive re-evaluation", abs(a - b) < 1e-12 * max(1, b), f"{a:.15g} vs {b:.15g}")
    r1 = float(rss(x, d, T, H, s))
    add("rss equals naive re-evaluation", abs(r1 - naive_residual_energy(x, d, T, H, s)) < 1e-12 * max(1, r1))
    p1 = float(phase_objective(d, x, H, T, s))
    add("phase objective equals naive re-evaluation", abs(p1 - r1) < 1e-12 * max(1, r1))

    A, s2 = random_instance(rng, 2, 2)
    sol = solve_glse(A, s2, GlseConfig(mu=0.1, peak_power=1.0))
    gmin, _ = grid_minimum(A, s2, 0.1, 1.0, 0.02)
    bound = grid_resolution_bound(A, s2, 0.1, sol.x, 0.02)
    add(
        "GLSE optimum matches polydisk grid search",
        sol.objective <= gmin + 1e-9 and gmin <= sol.objective + bound,
        f"solver {sol.objective:.6f}, grid {gmin:.6f}, bound {bound:.2e}",
    )

    He, s8 = random_instance(rng, 8, 4)
    mu = 0.5
    e = np.linalg.norm(solve_rzf(He, s8, mu) - dense_rzf(He, s8, mu)) / np.linalg.norm(dense_rzf(He, s8, mu))
    add("RZF equals dense LU solve", e < 1e-10, f"rel err {e:.1e}")
    e2 = rzf_matched_identity_check(He, s8, mu)
    add("RZF equals ridge form (K=8, N=4)", e2 < 1e-10, f"rel gap {e2:.1e}")

    alphabet = PhaseAlphabet.uniform(4)
    H, T, s = random_instance(rng, 2, 2, 4)
    x = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    best, combo = enumerate_phases(x, H, T, s, alphabet.values)
    cd = coordinate_descent_phases(PhaseConfig.ones(4, alphabet), x, H, T, s, sweeps=10)
    fcd = float(phase_objective(cd, x, H, T, s))
    add("coordinate descent within 5% of enumeration", best - 1e-12 <= fcd <= 1.05 * best + 1e-12,
        f"cd {fcd:.6f}, exhaustive {best:.6f}")
    opt = PhaseConfig(np.array(combo), alphabet)
    fixed = coordinate_descent_phases(opt, x, H, T, s, sweeps=5)
    add("enumerated optimum is a coordinate-descent fixed point", np.array_equal(fixed.indices, opt.indices))

    H, T, s = random_instance(rng, 4, 2, 16)
    res = alternate_had(s, H, T, GlseConfig(mu=0.1), AlternatingConfig(1e-6 * 4, 20), PhaseConfig.ones(16, alphabet))
    tr = np.asarray(res.trace)
    worst = float(np.max(np.diff(tr) / np.maximum(tr[:-1], 1e-300))) if tr.size > 1 else 0.0
    add("alternating objective non-increasing", worst <= 1e-12, f"{res.iterations} iterations, max rel rise {worst:.1e}")

    powers = np.abs(rng.standard_normal((50, 4))) ** 2
    add("PAPR equals two-pass computation", np.array_equal(papr_from_powers(powers), two_pass_papr(powers)))

    cfg = ExperimentConfig(realizations=12, chunk_size=4, seed=seed, mu_rls=[-1.0, 0.1], mu_rzf=[-1.0, 0.1])
    one = format_csv(run_experiment(cfg, workers=1))
    two = format_csv(run_experiment(cfg, workers=2))
    add("experiment output independent of worker count", one == two)

    return checks
