import numpy as np
import pytest

from iafeedback.errors import DimensionMismatchError
from iafeedback.ia import (
    Feasibility,
    IaOptions,
    TransceiverSet,
    check_feasibility,
    compute_ia,
    leakage,
    random_transceivers,
    solve_ia_batch,
)
from iafeedback.topology import SystemDims, crandn


def cross_grid(rng, k, nr, nt):
    return [
        [crandn(rng, (nr, nt)) if i != j else None for i in range(k)]
        for j in range(k)
    ]


def ones_weights(k):
    return [[0.0 if i == j else 1.0 for i in range(k)] for j in range(k)]


DIMS = SystemDims(k=3, nt=2, nr=2, d=1)


class TestFeasibility:
    def test_proper_system(self):
        assert check_feasibility(DIMS) is Feasibility.FEASIBLE
        assert check_feasibility(SystemDims(4, 3, 2, 1)) is Feasibility.FEASIBLE

    def test_improper_system(self):
        assert check_feasibility(SystemDims(5, 2, 2, 1)) is Feasibility.INFEASIBLE
        assert check_feasibility(SystemDims(4, 4, 4, 2)) is Feasibility.INFEASIBLE


class TestTransceiverSet:
    def test_orthonormality_enforced(self):
        good = random_transceivers(DIMS, np.random.default_rng(0))
        assert len(good.v) == 3
        with pytest.raises(ValueError):
            TransceiverSet(v=(np.ones((2, 1)),) * 3, u=good.u)

    def test_random_transceivers_deterministic(self):
        a = random_transceivers(DIMS, np.random.default_rng(5))
        b = random_transceivers(DIMS, np.random.default_rng(5))
        for x, y in zip(a.v, b.v):
            assert np.array_equal(x, y)


class TestComputeIa:
    def test_aligns_proper_system(self):
        rng = np.random.default_rng(1)
        channels = cross_grid(rng, 3, 2, 2)
        res = compute_ia(channels, DIMS)
        assert res.converged
        assert res.leakage < 1e-9

    def test_leakage_matches_direct_evaluation(self):
        rng = np.random.default_rng(2)
        channels = cross_grid(rng, 3, 2, 2)
        w = ones_weights(3)
        res = compute_ia(channels, DIMS, weights=w)
        direct = leakage(res.transceivers, channels, w, DIMS)
        assert direct == pytest.approx(res.leakage, abs=1e-9)

    def test_trace_monotone_nonincreasing(self):
        rng = np.random.default_rng(3)
        channels = cross_grid(rng, 4, 2, 3)
        dims = SystemDims(4, 3, 2, 1)
        res = compute_ia(channels, dims, IaOptions(max_iters=300),
                         collect_trace=True)
        tr = np.array(res.trace)
        assert len(tr) > 2
        assert np.all(np.diff(tr) <= np.maximum(1e-12 * tr[:-1], 1e-30))

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(4)
        channels = cross_grid(rng, 3, 2, 2)
        a = compute_ia(channels, DIMS, IaOptions(init_seed=7))
        b = compute_ia(channels, DIMS, IaOptions(init_seed=7))
        for x, y in zip(a.transceivers.v, b.transceivers.v):
            assert np.array_equal(x, y)

    def test_weights_steer_leakage(self):
        # With one dominant weight the aligned solution must suppress that
        # link's leakage hardest.
        rng = np.random.default_rng(5)
        dims = SystemDims(4, 3, 2, 1)
        channels = cross_grid(rng, 4, 2, 3)
        w = ones_weights(4)
        w[0][2] = 1e4
        res = compute_ia(channels, dims, IaOptions(max_iters=100,
                                                   leakage_floor=0.0,
                                                   restart_count=1),
                         weights=w)
        ts = res.transceivers
        strong = np.linalg.norm(ts.u[0].conj().T @ channels[0][2] @ ts.v[2]) ** 2
        others = [
            np.linalg.norm(ts.u[j].conj().T @ channels[j][i] @ ts.v[i]) ** 2
            for j in range(4) for i in range(4)
            if i != j and (j, i) != (0, 2)
        ]
        assert strong < np.mean(others)

    def test_missing_link_rejected(self):
        channels = cross_grid(np.random.default_rng(0), 3, 2, 2)
        channels[0][1] = None
        with pytest.raises(DimensionMismatchError):
            compute_ia(channels, DIMS)

    def test_wrong_shape_rejected(self):
        channels = cross_grid(np.random.default_rng(0), 3, 2, 2)
        channels[0][1] = np.zeros((3, 3))
        with pytest.raises(DimensionMismatchError):
            compute_ia(channels, DIMS)

    def test_not_converged_flag(self):
        rng = np.random.default_rng(6)
        channels = cross_grid(rng, 4, 2, 3)
        dims = SystemDims(4, 3, 2, 1)
        res = compute_ia(channels, dims,
                         IaOptions(max_iters=3, leakage_floor=0.0,
                                   restart_count=1))
        assert not res.converged
        assert np.isfinite(res.leakage)


class TestBatchSolver:
    def test_batch_matches_single(self):
        rng = np.random.default_rng(7)
        k, nr, nt = 3, 2, 2
        b = 4
        h = np.zeros((b, k, k, nr, nt), dtype=complex)
        for t in range(b):
            for j in range(k):
                for i in range(k):
                    if i != j:
                        h[t, j, i] = crandn(rng, (nr, nt))
        w = np.ones((b, k, k))
        seeds = np.array([11, 12, 13, 14])
        u, v, leak, conv, _, _ = solve_ia_batch(h, w, DIMS,
                                                init_seeds=seeds)
        # Solving any single item alone gives bit-identical output.
        u1, v1, leak1, _, _, _ = solve_ia_batch(h[2:3], w[2:3], DIMS,
                                                init_seeds=seeds[2:3])
        assert np.array_equal(u1[0], u[2])
        assert np.array_equal(v1[0], v[2])
        assert leak1[0] == leak[2]

    def test_orthonormal_outputs(self):
        rng = np.random.default_rng(8)
        dims = SystemDims(3, 4, 4, 2)
        h = np.zeros((2, 3, 3, 4, 4), dtype=complex)
        for t in range(2):
            for j in range(3):
                for i in range(3):
                    if i != j:
                        h[t, j, i] = crandn(rng, (4, 4))
        u, v, _, _, _, _ = solve_ia_batch(h, np.ones((2, 3, 3)), dims)
        for t in range(2):
            for j in range(3):
                assert np.allclose(u[t, j].conj().T @ u[t, j], np.eye(2),
                                   atol=1e-10)
                assert np.allclose(v[t, j].conj().T @ v[t, j], np.eye(2),
                                   atol=1e-10)
