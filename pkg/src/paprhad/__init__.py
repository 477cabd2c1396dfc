"""PAPR-limited digital precoding for hybrid analog-digital transmitters
with a passive reflect- or transmit-array front end."""

from .geometry import (
    ArrayGeometry,
    FeedMatrix,
    Position3,
    RadiationPattern,
    build_default_geometry,
    build_feed_matrix,
    pattern_gain,
    relative_spherical,
)
from .channel import ChannelRealization, draw_channel, draw_realization, draw_symbols, realization_rng
from .glse import GlseConfig, PrecodedSignal, effective_channel, glse_objective, project_disk, solve_glse
from .rzf import RzfConfig, clip, rzf_matched_identity_check, solve_rzf
from .phases import (
    AlternatingConfig,
    AlternatingResult,
    PhaseAlphabet,
    PhaseConfig,
    alternate_had,
    coordinate_descent_phases,
    phase_objective,
)
from .metrics import AggregateMetrics, PowerAccumulator, RealizationRecord, aggregate, papr_per_antenna, rss

__version__ = "0.1.0"
