"""Attention analytics for single-electrode EEG headset recordings."""

from .efga import EfgaRecord, efga_score, retention_rate, split_groups, validate_scale
from .protocol import DataPacket, FrameError, decode_stream, encode_packet
from .session import AttentionSession, EsenseBand, classify_band, export_csv, from_packets, ingest_csv
from .stats import anderson_darling, cronbach_alpha, descriptives, mann_whitney, pearson
from .trend import TrendFit, TrendModelKind, accuracy, classify_shape, fit_quadratic, select_model

__version__ = "0.1.0"
