import numpy as np
import pytest

from isac_regions.channel import ChannelModel
from isac_regions.errors import DomainError
from isac_regions.examples import make_example1
from isac_regions.montecarlo import (
    BLOCK,
    SampleConfig,
    analytic_distortion,
    empirical_distortion,
    empirical_mutual_information,
    sample_joint,
)

EX1 = make_example1(0.25, 0.7)
HALF = np.array([[0.5, 0.5]])
PUX = np.array([[0.3, 0.05], [0.1, 0.15], [0.1, 0.3]])


class TestSampleConfig:
    @pytest.mark.parametrize("kw", [{"n": 0}, {"n": 10, "estimator_kind": "yz"}, {"n": 10, "threads": 0}])
    def test_rejects(self, kw):
        with pytest.raises(DomainError):
            SampleConfig(**kw)


class TestSampleJoint:
    def test_point_mass(self):
        # deterministic model: S=1, X=0, Y=0, Z=1
        k = np.zeros((2, 2, 2, 2))
        k[:, :, 0, 1] = 1.0
        c = ChannelModel([0.0, 1.0], k)
        counts = sample_joint(c, [[1.0, 0.0]], SampleConfig(1, seed=5))
        assert counts.sum() == 1
        assert counts[1, 0, 0, 0, 1] == 1

    def test_counts_sum_and_shape(self):
        counts = sample_joint(EX1, PUX, SampleConfig(BLOCK + 17, seed=1))
        assert counts.shape == (2, 3, 2, 2, 4)
        assert counts.sum() == BLOCK + 17

    def test_zero_probability_cells_never_drawn(self):
        counts = sample_joint(EX1, HALF, SampleConfig(100000, seed=2))
        # y=1 with x=0 is impossible in example 1
        assert counts[:, :, 0, 1, :].sum() == 0

    def test_deterministic(self):
        a = sample_joint(EX1, PUX, SampleConfig(300000, seed=9))
        b = sample_joint(EX1, PUX, SampleConfig(300000, seed=9))
        np.testing.assert_array_equal(a, b)

    def test_seed_changes_draws(self):
        a = sample_joint(EX1, PUX, SampleConfig(1000, seed=9))
        b = sample_joint(EX1, PUX, SampleConfig(1000, seed=10))
        assert not np.array_equal(a, b)

    def test_threads_invariant(self):
        cfg1 = SampleConfig(3 * BLOCK + 5, seed=4, threads=1)
        cfg4 = SampleConfig(3 * BLOCK + 5, seed=4, threads=4)
        np.testing.assert_array_equal(sample_joint(EX1, PUX, cfg1), sample_joint(EX1, PUX, cfg4))

    def test_prefix_property(self):
        # the first block is shared by any n >= BLOCK with the same seed
        a = sample_joint(EX1, HALF, SampleConfig(BLOCK, seed=3))
        b = sample_joint(EX1, HALF, SampleConfig(2 * BLOCK, seed=3))
        assert np.all(b >= a)

    def test_cell_frequency(self):
        n = 200000
        counts = sample_joint(EX1, HALF, SampleConfig(n, seed=11))
        pz_a = 0.0875
        se = np.sqrt(pz_a * (1 - pz_a) / n)
        assert abs(counts[..., 2].sum() / n - pz_a) <= 3 * se


class TestEmpiricalDistortion:
    def test_zero_distortion(self):
        c = ChannelModel(EX1.state_pmf, EX1.kernel, np.zeros((2, 2)))
        assert empirical_distortion(c, HALF, SampleConfig(5000, seed=1)) == (0.0, 0.0)

    def test_single_draw_has_zero_error_bar(self):
        _, se = empirical_distortion(EX1, HALF, SampleConfig(1, seed=1))
        assert se == 0.0

    @pytest.mark.parametrize("kind", ["z", "uz", "xz"])
    def test_standard_error_is_binomial(self, kind):
        n = 100000
        d_hat, se = empirical_distortion(EX1, PUX, SampleConfig(n, seed=6, estimator_kind=kind))
        assert se == pytest.approx(np.sqrt(d_hat * (1 - d_hat) / (n - 1)), rel=1e-9)

    def test_spread_shrinks_with_n(self):
        def spread(n):
            vals = [empirical_distortion(EX1, HALF, SampleConfig(n, seed=s, estimator_kind="z"))[0] for s in range(30)]
            return np.std(vals)

        assert spread(40000) < 0.6 * spread(2500)

    def test_coverage(self):
        d = analytic_distortion(EX1, PUX, "uz")
        inside = 0
        for s in range(100):
            d_hat, se = empirical_distortion(EX1, PUX, SampleConfig(20000, seed=1000 + s, estimator_kind="uz"))
            inside += abs(d_hat - d) <= 4 * se
        assert inside >= 99

    def test_analytic_values(self):
        assert analytic_distortion(EX1, HALF, "z") == pytest.approx(0.2375, abs=1e-15)
        assert analytic_distortion(EX1, HALF, "xz") == pytest.approx(0.15, abs=1e-15)
        # a constant auxiliary gives the blind estimator
        assert analytic_distortion(EX1, HALF, "uz") == pytest.approx(0.2375, abs=1e-15)

    def test_accepts_px_vector(self):
        assert analytic_distortion(EX1, [0.5, 0.5], "z") == pytest.approx(0.2375, abs=1e-15)


class TestEmpiricalMutualInformation:
    def test_independent_pair_is_small(self):
        # X and S are independent by construction
        mi = empirical_mutual_information(EX1, HALF, SampleConfig(200000, seed=1), ("X", "S"))
        assert 0.0 <= mi <= 0.002

    def test_conditional_rate(self):
        mi = empirical_mutual_information(EX1, HALF, SampleConfig(400000, seed=2), ("X", "Y", "S"))
        assert mi == pytest.approx(0.7, abs=0.005)
