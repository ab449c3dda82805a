"""Deterministic synthetic attention sessions.

Noise comes from a counter-based SplitMix64 stream (Steele, Lea & Flood 2014)
turned into Gaussian deviates with the Box-Muller transform. Value ``i`` of a
stream with seed ``s`` depends only on ``(s, i)``, so fixtures are stable
across numpy versions and machines.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .session import AttentionSession
from .trend import TrendModelKind, predict

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


class SynthError(ValueError):
    pass


def mix64(z: int) -> int:
    """SplitMix64 finaliser on a Python int."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def splitmix64(seed: int, n: int) -> np.ndarray:
    """First ``n`` outputs of SplitMix64 seeded with ``seed``, as uint64."""
    with np.errstate(over="ignore"):
        i = np.arange(1, n + 1, dtype=np.uint64)
        z = np.uint64(seed & MASK64) + i * np.uint64(GOLDEN_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def uniforms(seed: int, n: int) -> np.ndarray:
    """Doubles in (0, 1] built from the top 53 bits of each output."""
    return ((splitmix64(seed, n) >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53


def gaussians(seed: int, n: int) -> np.ndarray:
    """Standard normal deviates by Box-Muller over consecutive uniform pairs."""
    pairs = (n + 1) // 2
    u = uniforms(seed, 2 * pairs)
    r = np.sqrt(-2.0 * np.log(u[0::2]))
    theta = 2.0 * np.pi * u[1::2]
    out = np.empty(2 * pairs)
    out[0::2] = r * np.cos(theta)
    out[1::2] = r * np.sin(theta)
    return out[:n]


@dataclass(frozen=True)
class SynthSpec:
    n_samples: int
    trend: TrendModelKind
    coefficients: tuple[float, ...]
    noise_sd: float = 0.0
    clamp: bool = False
    seed: int = 0
    quantize: bool = False  # round to whole eSense units before clamping
    participant_id: Optional[str] = None
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.n_samples < 1:
            raise SynthError("n_samples must be >= 1")
        if self.noise_sd < 0:
            raise SynthError("noise_sd must be >= 0")
        if not 0 <= self.seed <= MASK64:
            raise SynthError("seed must be a 64-bit unsigned value")


def generate(spec: SynthSpec, participant_id: Optional[str] = None) -> AttentionSession:
    n = spec.n_samples
    t = np.arange(1, n + 1, dtype=np.float64)
    with np.errstate(all="ignore"):
        y = predict(spec.trend, spec.coefficients, t)
    if not np.all(np.isfinite(y)):
        raise SynthError("trend produced nonfinite values")
    if spec.noise_sd > 0:
        y = y + spec.noise_sd * gaussians(spec.seed, n)
    if spec.quantize:
        y = np.rint(y)
    clamped = 0
    if spec.clamp:
        clamped = int(np.count_nonzero((y < 0) | (y > 100)))
        y = np.clip(y, 0.0, 100.0)
    elif np.any(y < 0) or np.any(y > 100):
        raise SynthError("generated values leave [0, 100]; enable clamp")
    pid = participant_id or spec.participant_id or ""
    meta = {"synthetic": True, "seed": spec.seed, "clamped": clamped, **spec.metadata}
    return AttentionSession(pid, seconds=t - 1.0, attention=y, metadata=meta)


def derive_seed(seed: int, index: int) -> int:
    """Per-participant seed: SplitMix64 finaliser of ``seed XOR index``."""
    return mix64((seed ^ index) & MASK64)


def generate_cohort(specs: Sequence[SynthSpec]) -> list[AttentionSession]:
    sessions = []
    for i, spec in enumerate(specs):
        pid = spec.participant_id or f"P{i + 1:02d}"
        derived = SynthSpec(
            spec.n_samples,
            spec.trend,
            spec.coefficients,
            spec.noise_sd,
            spec.clamp,
            derive_seed(spec.seed, i),
            spec.quantize,
            pid,
            spec.metadata,
        )
        sessions.append(generate(derived))
    return sessions


def reference_like_specs(n_samples: int, seed: int = 0) -> list[SynthSpec]:
    """Eighteen quantized, clamped quadratic sessions shaped after the reference cohort.

    Participants with a known quadratic equation reuse its intercept and slope;
    the rest get a flat trend at their reported mean. Noise sd is the reported
    standard deviation.
    """
    from .cohort import QUADRATIC_EQUATIONS, REFERENCE_COHORT

    specs = []
    for row in REFERENCE_COHORT:
        b0, b1, _ = QUADRATIC_EQUATIONS.get(row.participant_id, (row.mean, 0.0, 0.0))
        specs.append(
            SynthSpec(
                n_samples,
                TrendModelKind.QUADRATIC,
                (b0, b1, 0.0),
                noise_sd=row.std_dev,
                clamp=True,
                seed=seed,
                quantize=True,
                participant_id=row.participant_id,
            )
        )
    return specs
