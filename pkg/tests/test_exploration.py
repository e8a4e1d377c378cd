import numpy as np
import pytest

from synq import (ConfigurationError, make_sinusoid_sum, no_exploration,
                  pe_gram, symmetric_eigen)


class TestSinusoidSum:
    def test_zero_at_time_zero(self):
        sig = make_sinusoid_sum(count=100, freq_range=(-50, 50), seed=0,
                                active_until=90.0)
        assert np.array_equal(sig.eval(0.0), np.zeros(1))

    def test_zero_after_cutoff(self):
        sig = make_sinusoid_sum(count=10, freq_range=(-5, 5), seed=0,
                                active_until=2.0)
        for t in (2.0, 2.5, 100.0):
            assert np.array_equal(sig.eval(t), np.zeros(1))
        assert np.any(sig.eval(1.9) != 0.0)

    def test_triangle_bound(self):
        sig = make_sinusoid_sum(count=100, freq_range=(-50, 50), seed=4,
                                active_until=1e9, amplitude=1.0)
        ts = np.linspace(0.0, 20.0, 5000)
        sup = max(abs(sig.eval(t)[0]) for t in ts)
        assert sup <= 100.0
        assert sig.bound() == pytest.approx(100.0)

    def test_seed_determinism(self):
        a = make_sinusoid_sum(100, (-50, 50), seed=7, active_until=90.0)
        b = make_sinusoid_sum(100, (-50, 50), seed=7, active_until=90.0)
        assert np.array_equal(a.frequencies, b.frequencies)
        c = make_sinusoid_sum(100, (-50, 50), seed=8, active_until=90.0)
        assert not np.array_equal(a.frequencies, c.frequencies)

    def test_frequencies_in_range(self):
        sig = make_sinusoid_sum(200, (-50, 50), seed=1, active_until=1.0)
        assert sig.frequencies.min() >= -50.0
        assert sig.frequencies.max() <= 50.0

    def test_zero_count_rejected(self):
        with pytest.raises(ConfigurationError):
            make_sinusoid_sum(0, (-50, 50), seed=0, active_until=1.0)

    def test_bad_range_rejected(self):
        with pytest.raises(ConfigurationError):
            make_sinusoid_sum(5, (50, -50), seed=0, active_until=1.0)

    def test_multichannel(self):
        sig = make_sinusoid_sum(8, (-5, 5), seed=0, active_until=10.0, channels=3)
        assert sig.eval(0.5).shape == (3,)
        # channels draw distinct frequencies from one stream
        assert not np.array_equal(sig.frequencies[0], sig.frequencies[1])

    def test_no_exploration_is_identically_zero(self):
        sig = no_exploration(channels=2)
        for t in (0.0, 1.0, 50.0):
            assert np.array_equal(sig.eval(t), np.zeros(2))


class TestSymmetricEigen:
    def test_identity(self):
        assert np.allclose(symmetric_eigen(np.eye(3)), [1.0, 1.0, 1.0])

    def test_diagonal(self):
        assert np.allclose(symmetric_eigen(np.diag([3.0, 1.0, 2.0])), [1, 2, 3])

    def test_two_by_two_hand_oracle(self):
        # char poly of [[2,1],[1,2]]: (2-L)^2 - 1 -> L = 1, 3
        eigs = symmetric_eigen(np.array([[2.0, 1.0], [1.0, 2.0]]))
        assert np.allclose(eigs, [1.0, 3.0], atol=1e-12)

    def test_against_numpy_on_random_symmetric(self):
        rng = np.random.default_rng(11)
        for n in (2, 5, 9, 16):
            M = rng.standard_normal((n, n))
            M = 0.5 * (M + M.T)
            eigs = symmetric_eigen(M)
            ref = np.linalg.eigvalsh(M)
            assert np.allclose(eigs, ref, atol=1e-10)

    def test_asymmetric_rejected(self):
        with pytest.raises(ConfigurationError):
            symmetric_eigen(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_dimension_cap(self):
        with pytest.raises(ConfigurationError):
            symmetric_eigen(np.eye(65))

    def test_scalar_matrix(self):
        assert np.allclose(symmetric_eigen(np.array([[4.0]])), [4.0])


class TestPEGram:
    def test_all_zero_samples(self):
        samples = [(np.zeros(3), 0.01)] * 10
        report = pe_gram(samples)
        assert report.beta1 == 0.0
        assert report.beta2 == 0.0
        assert report.gram_dim == 3

    def test_constant_unit_vector_rank_one(self):
        # Gram = T * e1 e1', so beta2 = T and beta1 = 0
        T = 0.5
        samples = [(np.array([1.0, 0.0]), T / 50)] * 50
        report = pe_gram(samples)
        assert report.beta2 == pytest.approx(T, rel=1e-12)
        assert report.beta1 == pytest.approx(0.0, abs=1e-14)

    def test_alternating_axes_diagonal_gram(self):
        T = 1.0
        dt = T / 100
        samples = []
        for k in range(100):
            v = np.array([1.0, 0.0]) if k % 2 == 0 else np.array([0.0, 1.0])
            samples.append((v, dt))
        report = pe_gram(samples)
        assert report.beta1 == pytest.approx(T / 2, rel=1e-12)
        assert report.beta2 == pytest.approx(T / 2, rel=1e-12)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(2)
        samples = [(rng.standard_normal(4), 0.01) for _ in range(30)]
        a = pe_gram(samples)
        rng.shuffle(samples)
        b = pe_gram(samples)
        assert a.beta1 == pytest.approx(b.beta1, rel=1e-10, abs=1e-14)
        assert a.beta2 == pytest.approx(b.beta2, rel=1e-10, abs=1e-14)

    def test_window_times(self):
        samples = [(np.ones(2), 0.1)] * 5
        report = pe_gram(samples, window_start=2.0, window_end=2.5)
        assert report.window_start == 2.0
        assert report.window_end == 2.5

    def test_empty_rejected(self):
        with pytest.raises(ConfigurationError):
            pe_gram([])

    def test_mixed_dimensions_rejected(self):
        with pytest.raises(ConfigurationError):
            pe_gram([(np.ones(2), 0.1), (np.ones(3), 0.1)])
