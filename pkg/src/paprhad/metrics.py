"""Distortion and peak-to-average power metrics.

Two normalizations of the average RSS are offered:

``"per-realization"`` (default)
    ``sum_j RSS_j / (J K)``, the distortion per user and realization.
``"per-user-total"``
    ``sum_j RSS_j / K``, which grows with the number of realizations.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "RealizationRecord",
    "AggregateMetrics",
    "PowerAccumulator",
    "NORMALIZATIONS",
    "rss",
    "papr_per_antenna",
    "papr_from_powers",
    "aggregate",
    "to_db",
]

NORMALIZATIONS = ("per-realization", "per-user-total")


@dataclass
class RealizationRecord:
    rss: float
    per_antenna_power: np.ndarray
    index: int = 0

    def __post_init__(self):
        if not np.isfinite(self.rss) or self.rss < 0:
            raise ValueError(f"rss must be finite and non-negative, got {self.rss}")
        self.per_antenna_power = np.asarray(self.per_antenna_power, dtype=float)

    @classmethod
    def from_signal(cls, x, rss_value: float, index: int = 0) -> "RealizationRecord":
        return cls(rss=float(rss_value), per_antenna_power=np.abs(np.asarray(x)) ** 2, index=index)


@dataclass
class AggregateMetrics:
    papr_per_antenna: np.ndarray
    papr_mean: float
    papr_mean_db: float
    rss_mean: float
    n_realizations: int = 0
    undefined_antennas: list = field(default_factory=list)


def to_db(value):
    return 10 * np.log10(value)


def rss(x, d, T, H, s):
    """``||H diag(d) T x - s||^2``; batched over leading dimensions."""
    d = np.asarray(getattr(d, "d", d))
    T = getattr(T, "entries", T)
    w = np.einsum("...mn,...n->...m", np.asarray(T), np.asarray(x))
    H = np.asarray(H)
    if H.shape[-1] != w.shape[-1] or d.shape[-1] != w.shape[-1]:
        raise ValueError(f"dimension mismatch: H {H.shape}, d {d.shape}, T {np.shape(T)}")
    r = np.einsum("...km,...m->...k", H, d * w) - np.asarray(s)
    return np.sum(r.real**2 + r.imag**2, axis=-1)


def papr_from_powers(powers) -> np.ndarray:
    """Per-antenna PAPR from a ``(J, N)`` array of instantaneous powers.

    Antennas with zero power in every realization get NaN.
    """
    p = np.asarray(powers, dtype=float)
    if p.ndim != 2 or p.shape[0] < 1:
        raise ValueError(f"expected a (J, N) power array with J >= 1, got {p.shape}")
    return _papr(p.max(axis=0), p.sum(axis=0), p.shape[0])


def _papr(peak, total, count):
    mean = total / count
    out = np.full(peak.shape, np.nan)
    np.divide(peak, mean, out=out, where=mean > 0)
    return out


def papr_per_antenna(records) -> np.ndarray:
    """``max_j |x_n(j)|^2 / mean_j |x_n(j)|^2`` for every antenna ``n``."""
    records = list(records)
    if not records:
        raise ValueError("need at least one realization")
    return papr_from_powers(np.stack([r.per_antenna_power for r in records]))


class PowerAccumulator:
    """Streaming per-antenna peak/sum powers and RSS sum with associative merge."""

    def __init__(self, n_antennas: int):
        self.peak = np.zeros(n_antennas)
        self.total = np.zeros(n_antennas)
        self.rss_total = 0.0
        self.count = 0

    def add(self, record: RealizationRecord) -> None:
        p = record.per_antenna_power
        self.peak = np.maximum(self.peak, p)
        self.total = self.total + p
        self.rss_total += record.rss
        self.count += 1

    def add_batch(self, powers, rss_values) -> None:
        powers = np.asarray(powers, dtype=float)
        if powers.shape[0] == 0:
            return
        self.peak = np.maximum(self.peak, powers.max(axis=0))
        self.total = self.total + powers.sum(axis=0)
        self.rss_total += float(np.sum(rss_values))
        self.count += powers.shape[0]

    def merge(self, other: "PowerAccumulator") -> "PowerAccumulator":
        out = PowerAccumulator(self.peak.size)
        out.peak = np.maximum(self.peak, other.peak)
        out.total = self.total + other.total
        out.rss_total = self.rss_total + other.rss_total
        out.count = self.count + other.count
        return out

    def result(self, K: int, normalization: str = "per-realization") -> AggregateMetrics:
        if self.count < 1:
            raise ValueError("no realizations accumulated")
        return _finish(_papr(self.peak, self.total, self.count), self.rss_total, self.count, K, normalization)


def _finish(papr, rss_total, J, K, normalization):
    if normalization == "per-realization":
        rss_mean = rss_total / (J * K)
    elif normalization == "per-user-total":
        rss_mean = rss_total / K
    else:
        raise ValueError(f"unknown normalization {normalization!r}; expected one of {NORMALIZATIONS}")
    undefined = [int(n) for n in np.flatnonzero(np.isnan(papr))]
    if undefined:
        warnings.warn(f"antennas {undefined} carry no power; their PAPR is undefined", RuntimeWarning)
    defined = papr[~np.isnan(papr)]
    papr_mean = float(np.mean(defined)) if defined.size else float("nan")
    return AggregateMetrics(
        papr_per_antenna=papr,
        papr_mean=papr_mean,
        papr_mean_db=float(to_db(papr_mean)) if defined.size else float("nan"),
        rss_mean=float(rss_mean),
        n_realizations=J,
        undefined_antennas=undefined,
    )


def aggregate(records, K: int, normalization: str = "per-realization") -> AggregateMetrics:
    """Average PAPR over antennas and normalized average RSS over realizations."""
    records = list(records)
    if not records:
        raise ValueError("need at least one realization")
    papr = papr_per_antenna(records)
    total = float(np.sum([r.rss for r in records]))
    return _finish(papr, total, len(records), K, normalization)
