"""Experiment configuration stored as a flat TOML file.

Lengths carry their unit in the key name (``wavelength_mm``,
``ring_radius_wavelengths``, ...). Every key is optional; missing keys take
the defaults below, which reproduce the 8-user, 4-chain, 64-element setup.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import tomli
import tomli_w

from .geometry import ArrayGeometry, RadiationPattern, build_geometry
from .glse import GlseConfig
from .metrics import NORMALIZATIONS
from .phases import AlternatingConfig, PhaseAlphabet

__all__ = ["ConfigError", "ExperimentConfig", "DEFAULT_MU_SWEEP", "load_config", "dump_config", "loads_config"]

# Negative regularizers reward transmit power and push entries onto the
# peak-power circle; sweeping towards zero trades PAPR for distortion.
DEFAULT_MU_SWEEP = tuple(float(v) for v in -np.logspace(np.log10(8.0), -3, 20))

FORMATS = ("csv", "json")


class ConfigError(ValueError):
    """Invalid or unreadable experiment configuration."""


@dataclass
class ExperimentConfig:
    users: int = 8
    rf_chains: int = 4
    passive_elements: int = 64
    wavelength_mm: float = 5.0
    ring_radius_wavelengths: float = 1.0
    separation_wavelengths: float = float(4 / np.sqrt(np.pi))
    passive_rows: int = 8
    passive_cols: int = 8
    passive_spacing_wavelengths: float = 0.5
    efficiency: float = 1.0
    active_positions_mm: list | None = None
    passive_positions_mm: list | None = None
    pattern_elevation_lo_rad: float = float(np.pi / 6)
    pattern_elevation_hi_rad: float = float(5 * np.pi / 6)

    peak_power: float = 1.0
    noise_variance: float = 0.0
    mu_rls: list = field(default_factory=lambda: list(DEFAULT_MU_SWEEP))
    mu_rzf: list = field(default_factory=lambda: list(DEFAULT_MU_SWEEP))
    realizations: int = 10_000
    seed: int = 0

    optimize_phases: bool = False
    phase_levels: int = 4
    phase_threshold: float | None = None
    phase_max_iter: int = 20
    phase_sweeps: int = 1

    glse_tol: float = 1e-8
    glse_max_iter: int = 5000
    glse_accelerate: bool = True

    rss_normalization: str = "per-realization"
    output_path: str = "results.csv"
    output_format: str = "csv"
    workers: int = 1
    chunk_size: int = 100

    def __post_init__(self):
        self.validate()

    # -- validation ---------------------------------------------------------

    def validate(self) -> None:
        for name in ("users", "rf_chains", "passive_elements", "realizations", "passive_rows",
                     "passive_cols", "phase_levels", "phase_max_iter", "phase_sweeps",
                     "glse_max_iter", "workers", "chunk_size"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        for name in ("wavelength_mm", "separation_wavelengths", "peak_power", "glse_tol", "passive_spacing_wavelengths"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and np.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be a positive number, got {value!r}")
        if self.ring_radius_wavelengths < 0:
            raise ConfigError("ring_radius_wavelengths must be non-negative")
        if not 0 < self.efficiency <= 1:
            raise ConfigError(f"efficiency must lie in (0, 1], got {self.efficiency}")
        if not 0 <= self.pattern_elevation_lo_rad < self.pattern_elevation_hi_rad <= np.pi:
            raise ConfigError("need 0 <= pattern_elevation_lo_rad < pattern_elevation_hi_rad <= pi")
        if self.noise_variance < 0:
            raise ConfigError("noise_variance must be non-negative")
        for name in ("mu_rls", "mu_rzf"):
            values = getattr(self, name)
            if not isinstance(values, (list, tuple)) or len(values) == 0:
                raise ConfigError(f"{name} must be a non-empty list")
            if not all(isinstance(v, (int, float)) and np.isfinite(v) for v in values):
                raise ConfigError(f"{name} entries must be finite numbers")
        if self.phase_threshold is not None and not self.phase_threshold > 0:
            raise ConfigError("phase_threshold must be positive")
        if self.rss_normalization not in NORMALIZATIONS:
            raise ConfigError(f"rss_normalization must be one of {NORMALIZATIONS}")
        if self.output_format not in FORMATS:
            raise ConfigError(f"output_format must be one of {FORMATS}")

        for name in ("active_positions_mm", "passive_positions_mm"):
            pts = getattr(self, name)
            if pts is not None:
                arr = np.asarray(pts, dtype=float)
                if arr.ndim != 2 or arr.shape[1] != 3 or arr.shape[0] < 1:
                    raise ConfigError(f"{name} must be a list of [x, y, z] triples")
        n_active = len(self.active_positions_mm) if self.active_positions_mm is not None else self.rf_chains
        n_passive = (
            len(self.passive_positions_mm)
            if self.passive_positions_mm is not None
            else self.passive_rows * self.passive_cols
        )
        if n_active != self.rf_chains:
            raise ConfigError(f"rf_chains={self.rf_chains} but geometry has {n_active} active antennas")
        if n_passive != self.passive_elements:
            raise ConfigError(f"passive_elements={self.passive_elements} but geometry has {n_passive} elements")

    # -- derived objects ----------------------------------------------------

    @property
    def K(self) -> int:
        return self.users

    @property
    def N(self) -> int:
        return self.rf_chains

    @property
    def M(self) -> int:
        return self.passive_elements

    @property
    def wavelength(self) -> float:
        return self.wavelength_mm * 1e-3

    def geometry(self) -> ArrayGeometry:
        lam = self.wavelength
        mm = lambda pts: None if pts is None else [[c * 1e-3 for c in p] for p in pts]  # noqa: E731
        return build_geometry(
            lam,
            n_active=self.rf_chains,
            ring_radius=self.ring_radius_wavelengths * lam,
            separation=self.separation_wavelengths * lam,
            passive_rows=self.passive_rows,
            passive_cols=self.passive_cols,
            passive_spacing=self.passive_spacing_wavelengths * lam,
            efficiency=self.efficiency,
            active_positions=mm(self.active_positions_mm),
            passive_positions=mm(self.passive_positions_mm),
        )

    def pattern(self) -> RadiationPattern:
        return RadiationPattern(self.pattern_elevation_lo_rad, self.pattern_elevation_hi_rad)

    def glse(self, mu: float) -> GlseConfig:
        return GlseConfig(mu=mu, peak_power=self.peak_power, tol=self.glse_tol,
                          max_iter=self.glse_max_iter, accelerate=self.glse_accelerate)

    def alternating(self) -> AlternatingConfig:
        threshold = 1e-6 * np.sqrt(self.M) if self.phase_threshold is None else self.phase_threshold
        return AlternatingConfig(threshold, self.phase_max_iter)

    def alphabet(self) -> PhaseAlphabet:
        return PhaseAlphabet.uniform(self.phase_levels)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        return {k: v for k, v in d.items() if v is not None}


def loads_config(text: str, source: str = "<string>") -> ExperimentConfig:
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"{source}: unknown keys {unknown}")
    try:
        return ExperimentConfig(**data)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror or exc}") from exc
    return loads_config(text, str(path))


def dump_config(cfg: ExperimentConfig, path=None) -> str:
    """Serialize ``cfg`` to TOML; also write it to ``path`` when given."""
    text = tomli_w.dumps(cfg.to_dict())
    if path is not None:
        Path(path).write_text(text)
    return text
