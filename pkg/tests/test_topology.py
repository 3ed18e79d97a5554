import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iafeedback.errors import (
    CorrelationNotPSDError,
    NegativeEigenvalueError,
    NotHermitianError,
)
from iafeedback.rng import substream, tag_to_int
from iafeedback.topology import (
    InterferenceTopologyProfile,
    LinkStats,
    SystemDims,
    effective_rank,
    exponential_correlation,
    iid_link_stats,
    itp_from_json,
    itp_to_json,
    matrix_sqrt_psd,
    sample_channel,
    sample_random_itp,
)


def random_psd(n, rng, trace=None):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    m = a @ a.conj().T
    if trace is not None:
        m *= trace / np.trace(m).real
    return m


class TestMatrixSqrt:
    def test_squares_back(self):
        rng = np.random.default_rng(0)
        for n in (1, 2, 4, 7):
            m = random_psd(n, rng)
            s = matrix_sqrt_psd(m)
            assert np.allclose(s @ s, m, atol=1e-10)
            assert np.allclose(s, s.conj().T, atol=1e-12)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitianError):
            matrix_sqrt_psd(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_rejects_negative_definite(self):
        with pytest.raises(NegativeEigenvalueError):
            matrix_sqrt_psd(np.diag([1.0, -0.5]))

    def test_clamps_tiny_negative(self):
        # Roundoff-scale negatives are treated as zero, not an error.
        s = matrix_sqrt_psd(np.diag([1.0, -1e-11]))
        assert s[1, 1] == 0.0


class TestEffectiveRank:
    def test_full_rank_identity(self):
        assert effective_rank(np.eye(4)) == 4

    def test_near_singular_direction_dropped(self):
        m = np.diag([2.8, 0.1, 1e-12])
        assert effective_rank(m) == 2

    def test_threshold_is_relative(self):
        # Scaling the matrix must not change the verdict.
        m = np.diag([1.0, 1e-10])
        assert effective_rank(m) == effective_rank(m * 1e8) == 1

    def test_zero_matrix(self):
        assert effective_rank(np.zeros((3, 3))) == 0


class TestLinkStats:
    def test_trace_normalization_enforced(self):
        with pytest.raises(CorrelationNotPSDError):
            LinkStats(2 * np.eye(2), np.eye(3), 1.0)

    def test_effective_ranks_cached(self):
        st_ = LinkStats(np.eye(2), np.diag([2.8, 0.1, 0.1]), 1.0)
        assert (st_.m_r, st_.m_t) == (2, 3)

    def test_negative_gain_rejected(self):
        with pytest.raises(ValueError):
            iid_link_stats(2, 3, -1.0)

    def test_sqrt_cache_matches_direct(self):
        st_ = LinkStats(np.eye(2), np.diag([2.8, 0.1, 0.1]), 1.0)
        assert np.allclose(st_.sqrt_phi_t @ st_.sqrt_phi_t, st_.phi_t)


class TestSampleChannel:
    def test_kronecker_second_moments(self):
        # E{vec(H) vec(H)^H} = phi_t^T kron phi_r for the column-major vec.
        rng = np.random.default_rng(1)
        phi_t = exponential_correlation(3, 0.6)
        links = ((LinkStats(np.eye(2), phi_t, 1.0),),)
        itp = InterferenceTopologyProfile(SystemDims(1, 3, 2, 1), links)
        acc = np.zeros((6, 6), dtype=complex)
        n = 4000
        for _ in range(n):
            h = sample_channel(itp, rng).h[0][0]
            v = h.reshape(-1, order="F")
            acc += np.outer(v, v.conj())
        acc /= n
        expected = np.kron(phi_t.T, np.eye(2))
        assert np.max(np.abs(acc - expected)) < 0.15

    def test_unit_average_energy(self):
        rng = np.random.default_rng(2)
        itp = InterferenceTopologyProfile(
            SystemDims(1, 3, 2, 1), ((iid_link_stats(2, 3),),)
        )
        e = np.mean(
            [np.linalg.norm(sample_channel(itp, rng).h[0][0]) ** 2 for _ in range(2000)]
        )
        assert abs(e - 6.0) < 0.3


class TestExponentialCorrelation:
    def test_structure(self):
        eps = 0.7 * np.exp(1j * 0.3)
        phi = exponential_correlation(4, eps)
        assert np.allclose(np.diag(phi), 1.0)
        assert phi[0, 1] == pytest.approx(eps)
        assert phi[1, 0] == pytest.approx(np.conj(eps))
        assert phi[0, 3] == pytest.approx(eps**3)
        assert np.all(np.linalg.eigvalsh(phi) > -1e-12)

    def test_rejects_unit_magnitude(self):
        with pytest.raises(CorrelationNotPSDError):
            exponential_correlation(3, 1.0)


class TestRandomModel:
    def test_direct_links_iid_unit_gain(self):
        itp = sample_random_itp(SystemDims(3, 3, 2, 1), 0.7, 3.0,
                                np.random.default_rng(0))
        for j in range(3):
            st_ = itp.links[j][j]
            assert st_.gain == 1.0
            assert np.allclose(st_.phi_t, np.eye(3))

    def test_shadowing_mean_is_one(self):
        rng = np.random.default_rng(3)
        gains = []
        for _ in range(300):
            itp = sample_random_itp(SystemDims(3, 3, 2, 1), 0.0, 2.0, rng)
            gains += [st.gain for _, _, st in itp.cross_links()]
        assert np.mean(gains) == pytest.approx(1.0, abs=0.25)

    @given(st.floats(0.0, 0.95), st.floats(0.0, 4.0))
    @settings(max_examples=20, deadline=None)
    def test_cross_links_share_correlation(self, eps, delta2):
        itp = sample_random_itp(SystemDims(3, 3, 2, 1), eps, delta2,
                                np.random.default_rng(7))
        ref = exponential_correlation(3, eps)
        for _, _, st_ in itp.cross_links():
            assert np.allclose(st_.phi_t, ref)
            assert st_.gain > 0


class TestSerialization:
    def test_round_trip_exact(self):
        itp = sample_random_itp(SystemDims(3, 3, 2, 1), 0.4 + 0.2j, 1.5,
                                np.random.default_rng(11))
        back = itp_from_json(itp_to_json(itp))
        assert back.dims == itp.dims
        for j in range(3):
            for i in range(3):
                assert np.array_equal(back.links[j][i].phi_t, itp.links[j][i].phi_t)
                assert back.links[j][i].gain == itp.links[j][i].gain


class TestSubstreams:
    def test_deterministic(self):
        a = substream(42, "cell", 3).standard_normal(5)
        b = substream(42, "cell", 3).standard_normal(5)
        assert np.array_equal(a, b)

    def test_distinct_tags_diverge(self):
        a = substream(42, "cell", 3).standard_normal(5)
        b = substream(42, "cell", 4).standard_normal(5)
        assert not np.array_equal(a, b)

    def test_tag_hash_stable_across_types(self):
        assert tag_to_int("x") == tag_to_int("x")
        assert tag_to_int(7) == 7
