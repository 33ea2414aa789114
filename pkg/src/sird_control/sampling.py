"""Seeded generation of i.i.d. bounded draw sequences.

Each Monte Carlo path owns three (four with prices) independent substreams
derived deterministically from ``(master_seed, path_index, stream)`` via
``numpy.random.SeedSequence`` spawn keys, so ensembles reproduce bit-for-bit
regardless of evaluation order or worker count.

Only point, uniform and discrete distributions are supported: the model
premises known bounds on every process, and richer families would buy
nothing while complicating bounds checking.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .model import UncertaintyDraw

_KINDS = ("point", "uniform", "discrete")

# Stable substream indices per uncertainty process.
STREAM_DELTA = 0
STREAM_V = 1
STREAM_D_I = 2
STREAM_PRICE = 3

_MEAN_TOL = 1e-9
_PROB_TOL = 1e-12


@dataclass(frozen=True)
class DistributionSpec:
    """A bounded distribution for one uncertainty process.

    Use the ``point``, ``uniform`` or ``discrete`` constructors rather than
    instantiating directly.
    """

    kind: str
    value: float = 0.0
    low: float = 0.0
    high: float = 0.0
    values: tuple[float, ...] = ()
    probs: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if self.kind == "uniform" and not self.low <= self.high:
            raise ValueError(f"uniform needs low <= high, got [{self.low}, {self.high}]")
        if self.kind == "discrete":
            if len(self.values) == 0 or len(self.values) != len(self.probs):
                raise ValueError("discrete needs matching, non-empty values and probs")
            if any(p < 0 for p in self.probs):
                raise ValueError("discrete probabilities must be nonnegative")
            if abs(sum(self.probs) - 1.0) > _PROB_TOL:
                raise ValueError(f"discrete probabilities sum to {sum(self.probs)}, not 1")

    @classmethod
    def point(cls, value: float) -> "DistributionSpec":
        return cls(kind="point", value=value)

    @classmethod
    def uniform(cls, low: float, high: float) -> "DistributionSpec":
        return cls(kind="uniform", low=low, high=high)

    @classmethod
    def discrete(cls, values, probs) -> "DistributionSpec":
        return cls(kind="discrete", values=tuple(values), probs=tuple(probs))

    def support(self) -> tuple[float, float]:
        """Smallest interval containing every possible sample."""
        if self.kind == "point":
            return self.value, self.value
        if self.kind == "uniform":
            return self.low, self.high
        return min(self.values), max(self.values)

    def mean(self) -> float:
        if self.kind == "point":
            return self.value
        if self.kind == "uniform":
            return 0.5 * (self.low + self.high)
        return float(sum(v * p for v, p in zip(self.values, self.probs)))

    def validate_bounds(self, low: float, high: float, mean: float, label: str) -> None:
        """Check support containment in [low, high] and mean agreement.

        The declared model bounds must contain the support, and the computed
        mean must match the model's mean field to within 1e-9.
        """
        lo, hi = self.support()
        if lo < low or hi > high:
            raise ValueError(
                f"{label}: support [{lo}, {hi}] not contained in declared bounds [{low}, {high}]"
            )
        if abs(self.mean() - mean) > _MEAN_TOL:
            raise ValueError(
                f"{label}: distribution mean {self.mean()} does not match declared mean {mean}"
            )

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "point":
            return np.full(size, self.value, dtype=np.float64)
        if self.kind == "uniform":
            return rng.uniform(self.low, self.high, size)
        return rng.choice(np.asarray(self.values, dtype=np.float64), size=size, p=self.probs)

    def to_dict(self) -> dict[str, Any]:
        if self.kind == "point":
            return {"kind": "point", "value": self.value}
        if self.kind == "uniform":
            return {"kind": "uniform", "low": self.low, "high": self.high}
        return {"kind": "discrete", "values": list(self.values), "probs": list(self.probs)}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "DistributionSpec":
        kind = data.get("kind")
        if kind == "point":
            return cls.point(float(data["value"]))
        if kind == "uniform":
            return cls.uniform(float(data["low"]), float(data["high"]))
        if kind == "discrete":
            return cls.discrete([float(v) for v in data["values"]],
                                [float(p) for p in data["probs"]])
        raise ValueError(f"unknown distribution kind {kind!r}")


@dataclass(frozen=True)
class SeedSpec:
    """Master seed plus path index identifying one independent stream set."""

    master_seed: int
    path_index: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if self.path_index < 0:
            raise ValueError("path_index must be nonnegative")


def substream(seed: SeedSpec, stream: int) -> np.random.Generator:
    """Generator for one (path, process) substream.

    Distinct (master_seed, path_index, stream) triples map to statistically
    independent PCG64 states.
    """
    ss = np.random.SeedSequence(seed.master_seed, spawn_key=(seed.path_index, stream))
    return np.random.default_rng(ss)


def draw_arrays(
    specs: tuple[DistributionSpec, DistributionSpec, DistributionSpec],
    seed: SeedSpec,
    horizon: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sample (delta, v, d_i) arrays of length ``horizon`` from independent substreams."""
    if horizon < 0:
        raise ValueError(f"horizon must be nonnegative, got {horizon}")
    delta_spec, v_spec, d_i_spec = specs
    delta = delta_spec.sample(substream(seed, STREAM_DELTA), horizon)
    v = v_spec.sample(substream(seed, STREAM_V), horizon)
    d_i = d_i_spec.sample(substream(seed, STREAM_D_I), horizon)
    return delta, v, d_i


def draw_sequence(
    specs: tuple[DistributionSpec, DistributionSpec, DistributionSpec],
    seed: SeedSpec,
    horizon: int,
) -> list[UncertaintyDraw]:
    """Sample ``horizon`` i.i.d. daily draws, reproducibly for a given seed."""
    delta, v, d_i = draw_arrays(specs, seed, horizon)
    return [UncertaintyDraw(delta=float(a), v=float(b), d_i=float(c))
            for a, b, c in zip(delta, v, d_i)]


__all__ = [
    "DistributionSpec",
    "SeedSpec",
    "substream",
    "draw_arrays",
    "draw_sequence",
    "STREAM_DELTA",
    "STREAM_V",
    "STREAM_D_I",
    "STREAM_PRICE",
]
