"""Sampling: spec validation, reproducibility, bound respect, independence."""

from __future__ import annotations

import numpy as np
import pytest

from sird_control import DistributionSpec, SeedSpec, draw_sequence
from sird_control.sampling import STREAM_DELTA, STREAM_V, substream


class TestDistributionSpec:
    def test_point(self):
        spec = DistributionSpec.point(0.1)
        assert spec.support() == (0.1, 0.1)
        assert spec.mean() == 0.1

    def test_uniform(self):
        spec = DistributionSpec.uniform(0.1, 0.2)
        assert spec.support() == (0.1, 0.2)
        assert spec.mean() == pytest.approx(0.15, rel=1e-12)

    def test_uniform_reversed_rejected(self):
        with pytest.raises(ValueError):
            DistributionSpec.uniform(0.2, 0.1)

    def test_discrete(self):
        spec = DistributionSpec.discrete([0.0, 0.5], [0.25, 0.75])
        assert spec.support() == (0.0, 0.5)
        assert spec.mean() == pytest.approx(0.375, rel=1e-12)

    def test_discrete_bad_probs_rejected(self):
        with pytest.raises(ValueError):
            DistributionSpec.discrete([0.0, 0.5], [0.3, 0.8])
        with pytest.raises(ValueError):
            DistributionSpec.discrete([0.0, 0.5], [-0.1, 1.1])
        with pytest.raises(ValueError):
            DistributionSpec.discrete([], [])

    def test_bounds_validation(self):
        spec = DistributionSpec.uniform(0.1, 0.2)
        spec.validate_bounds(0.1, 0.2, 0.15, "v")
        with pytest.raises(ValueError):
            spec.validate_bounds(0.12, 0.2, 0.15, "v")  # support escapes bounds
        with pytest.raises(ValueError):
            spec.validate_bounds(0.1, 0.2, 0.16, "v")  # mean mismatch

    @pytest.mark.parametrize(
        "spec",
        [
            DistributionSpec.point(0.1),
            DistributionSpec.uniform(0.1, 0.2),
            DistributionSpec.discrete([0.0, 0.25, 0.5], [0.2, 0.5, 0.3]),
        ],
    )
    def test_dict_round_trip(self, spec):
        assert DistributionSpec.from_dict(spec.to_dict()) == spec

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            DistributionSpec.from_dict({"kind": "gaussian", "mu": 0.0})


class TestSeedSpec:
    def test_validation(self):
        SeedSpec(0, 0)
        with pytest.raises(ValueError):
            SeedSpec(-1, 0)
        with pytest.raises(ValueError):
            SeedSpec(2**64, 0)
        with pytest.raises(ValueError):
            SeedSpec(0, -1)


class TestDrawSequence:
    SPECS = (
        DistributionSpec.point(0.1),
        DistributionSpec.uniform(0.1, 0.2),
        DistributionSpec.discrete([0.0, 0.05], [0.5, 0.5]),
    )

    def test_point_degenerate(self):
        specs = (
            DistributionSpec.point(0.1),
            DistributionSpec.point(0.5),
            DistributionSpec.point(0.05),
        )
        draws = draw_sequence(specs, SeedSpec(123, 0), 3)
        assert len(draws) == 3
        for draw in draws:
            assert (draw.delta, draw.v, draw.d_i) == (0.1, 0.5, 0.05)

    def test_zero_horizon(self):
        assert draw_sequence(self.SPECS, SeedSpec(1, 0), 0) == []

    def test_negative_horizon_rejected(self):
        with pytest.raises(ValueError):
            draw_sequence(self.SPECS, SeedSpec(1, 0), -1)

    def test_reproducibility_bit_for_bit(self):
        a = draw_sequence(self.SPECS, SeedSpec(987654321, 7), 50)
        b = draw_sequence(self.SPECS, SeedSpec(987654321, 7), 50)
        assert a == b

    def test_distinct_paths_differ(self):
        a = draw_sequence(self.SPECS, SeedSpec(987654321, 0), 50)
        b = draw_sequence(self.SPECS, SeedSpec(987654321, 1), 50)
        assert a != b

    def test_uniform_effectiveness_bounds_and_mean(self):
        # The uniform effectiveness model on [0.1, 0.2]: all samples inside,
        # empirical mean near 0.15.
        spec = DistributionSpec.uniform(0.1, 0.2)
        samples = spec.sample(substream(SeedSpec(5, 0), STREAM_V), 1_000_000)
        assert samples.min() >= 0.1
        assert samples.max() <= 0.2
        se = samples.std(ddof=1) / np.sqrt(len(samples))
        assert abs(samples.mean() - 0.15) <= 4 * se

    def test_bound_respect_million_samples(self):
        spec = DistributionSpec.discrete([0.0, 0.02, 0.05], [0.6, 0.3, 0.1])
        samples = spec.sample(substream(SeedSpec(6, 0), STREAM_DELTA), 1_000_000)
        assert set(np.unique(samples)) <= {0.0, 0.02, 0.05}

    def test_cross_stream_independence(self):
        # Smoke test: the delta and v substreams of one path should be
        # uncorrelated to within 4/sqrt(n).
        n = 100_000
        seed = SeedSpec(2024, 3)
        delta = DistributionSpec.uniform(0.0, 0.3).sample(substream(seed, STREAM_DELTA), n)
        v = DistributionSpec.uniform(0.1, 0.2).sample(substream(seed, STREAM_V), n)
        corr = np.corrcoef(delta, v)[0, 1]
        assert abs(corr) <= 4 / np.sqrt(n)

    def test_draws_respect_universal_bounds(self):
        draws = draw_sequence(self.SPECS, SeedSpec(99, 0), 1000)
        for draw in draws:
            assert draw.delta >= 0
            assert 0 < draw.v <= 1
            assert 0 <= draw.d_i < 1
