"""Centralized interference-alignment solver.

Alternating minimization of weighted interference leakage: receive filters
take the weakest eigenvectors of the interference covariance at each Rx,
then the same update runs in the reciprocal network (roles swapped,
channels conjugate-transposed) for the precoders. The solver is batched
over realizations; the public single-realization API wraps a batch of one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DimensionMismatchError
from .topology import SystemDims, crandn

__all__ = [
    "TransceiverSet",
    "IaOptions",
    "IaResult",
    "Feasibility",
    "compute_ia",
    "solve_ia_batch",
    "leakage",
    "check_feasibility",
    "random_transceivers",
]

_ORTHO_TOL = 1e-10


class Feasibility(Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class TransceiverSet:
    """Per-pair precoders v[i] (Nt x d) and decorrelators u[j] (Nr x d),
    all with orthonormal columns."""

    v: tuple
    u: tuple

    def __post_init__(self):
        v = tuple(np.asarray(m, dtype=complex) for m in self.v)
        u = tuple(np.asarray(m, dtype=complex) for m in self.u)
        for m in (*v, *u):
            d = m.shape[1]
            if np.max(np.abs(m.conj().T @ m - np.eye(d))) > _ORTHO_TOL:
                raise ValueError("transceiver columns are not orthonormal")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "u", u)


@dataclass(frozen=True)
class IaOptions:
    max_iters: int = 2000
    leakage_tol: float = 1e-10  # relative change per iteration
    # Perfect alignment makes the leakage decay geometrically to zero, so
    # the relative-change test alone never fires; a solve also counts as
    # converged once the leakage falls below this fraction of its value
    # after the first sweep.
    leakage_floor: float = 1e-11
    init_seed: int = 0
    restart_count: int = 3

    def __post_init__(self):
        if self.max_iters < 1 or self.restart_count < 1 or self.leakage_tol <= 0:
            raise ValueError("limits must be positive")
        if self.leakage_floor < 0:
            raise ValueError("leakage_floor must be nonnegative")


@dataclass(frozen=True)
class IaResult:
    transceivers: TransceiverSet
    leakage: float
    converged: bool
    iterations: int
    trace: tuple = field(default=(), repr=False)


def check_feasibility(dims: SystemDims) -> Feasibility:
    """Symmetric proper-system counting heuristic."""
    lhs = dims.nt + dims.nr
    rhs = (dims.k + 1) * dims.d
    if lhs < rhs:
        return Feasibility.INFEASIBLE
    if dims.d <= min(dims.nt, dims.nr):
        return Feasibility.FEASIBLE
    return Feasibility.UNKNOWN


def random_transceivers(dims: SystemDims, rng: np.random.Generator) -> TransceiverSet:
    """Haar-distributed column spaces from QR of Gaussian matrices."""
    u, v = [], []
    for _ in range(dims.k):
        qv, _ = np.linalg.qr(crandn(rng, (dims.nt, dims.d)))
        qu, _ = np.linalg.qr(crandn(rng, (dims.nr, dims.d)))
        v.append(qv)
        u.append(qu)
    return TransceiverSet(v=tuple(v), u=tuple(u))


def _fix_phase(m: np.ndarray) -> np.ndarray:
    """Make the first non-negligible entry of every column real positive.

    Operates on stacked (..., n, d) arrays.
    """
    mag = np.abs(m)
    first = np.argmax(mag > 1e-12, axis=-2)  # (..., d)
    pivot = np.take_along_axis(m, first[..., None, :], axis=-2)[..., 0, :]
    phase = np.where(np.abs(pivot) > 0, pivot / np.maximum(np.abs(pivot), 1e-300), 1.0)
    return m * np.conj(phase)[..., None, :]


def _smallest_eigvecs(q: np.ndarray, d: int):
    """Eigenvectors of the d smallest eigenvalues for stacked Hermitian
    matrices, plus the summed smallest eigenvalues (the per-receiver
    leakage). Column phases are arbitrary here — the iteration only uses
    the subspaces — and get fixed once on the final output."""
    vals, vecs = np.linalg.eigh(q)
    return vecs[..., :d], vals[..., :d].sum(axis=-1)


def _channels_to_array(channels, dims: SystemDims) -> np.ndarray:
    k, nr, nt = dims.k, dims.nr, dims.nt
    h = np.zeros((k, k, nr, nt), dtype=complex)
    for j in range(k):
        for i in range(k):
            if i == j:
                continue
            m = channels[j][i]
            if m is None:
                raise DimensionMismatchError(f"missing cross link ({j},{i})")
            m = np.asarray(m, dtype=complex)
            if m.shape != (nr, nt):
                raise DimensionMismatchError(
                    f"link ({j},{i}) has shape {m.shape}, expected {(nr, nt)}"
                )
            h[j, i] = m
    return h


def solve_ia_batch(
    h: np.ndarray,
    weights: np.ndarray,
    dims: SystemDims,
    opts: IaOptions = IaOptions(),
    collect_trace: bool = False,
    init_seeds=None,
):
    """Batched leakage-minimization solve.

    Parameters
    ----------
    h : (B, K, K, Nr, Nt) complex array, diagonal entries ignored.
    weights : (B, K, K) nonnegative array, diagonal ignored.
    init_seeds : optional length-B integer array; when given, item b's
        initializations come from seed ``init_seeds[b]`` instead of the
        shared ``opts.init_seed``, so batch membership does not change
        results.

    Returns
    -------
    u : (B, K, Nr, d), v : (B, K, Nt, d), leak : (B,), converged : (B,),
    iterations : (B,), traces : list of per-item leakage tuples (empty
    unless ``collect_trace``).
    """
    b, k = h.shape[0], dims.k
    nr, nt = dims.nr, dims.nt
    w = np.array(weights, dtype=float)
    w[:, np.arange(k), np.arange(k)] = 0.0
    hc = np.asarray(h, dtype=complex)

    best_u = np.zeros((b, k, nr, dims.d), dtype=complex)
    best_v = np.zeros((b, k, nt, dims.d), dtype=complex)
    best_leak = np.full(b, np.inf)
    best_conv = np.zeros(b, dtype=bool)
    best_iters = np.zeros(b, dtype=int)
    traces = [[] for _ in range(b)] if collect_trace else None
    seeds = None if init_seeds is None else np.asarray(init_seeds, dtype=np.int64)

    for restart in range(opts.restart_count):
        if restart == 0:
            sel = np.arange(b)
        else:
            # Items that already hit the convergence test keep their
            # solution; only stragglers get another initialization.
            sel = np.flatnonzero(~best_conv)
            if sel.size == 0:
                break
        u, v, leak, conv, iters = _solve_once(
            hc[sel], w[sel], dims, opts, restart,
            None if seeds is None else seeds[sel],
            traces, sel,
        )
        better = (leak < best_leak[sel]) | (conv & ~best_conv[sel])
        tgt = sel[better]
        best_leak[tgt] = leak[better]
        best_conv[tgt] = conv[better]
        best_iters[tgt] = iters[better]
        best_u[tgt] = u[better]
        best_v[tgt] = v[better]
    return best_u, best_v, best_leak, best_conv, best_iters, traces or []


def _solve_once(hc, w, dims, opts, restart, init_seeds, traces, trace_ids):
    """One initialization of the alternating minimization, batched, with an
    active set that shrinks as items converge."""
    b, k, d = hc.shape[0], dims.k, dims.d
    nr, nt = dims.nr, dims.nt
    if init_seeds is None:
        rng = np.random.default_rng(
            np.random.SeedSequence([int(opts.init_seed), restart])
        )
        v0 = crandn(rng, (b, k, nt, d))
    else:
        v0 = np.empty((b, k, nt, d), dtype=complex)
        for pos in range(b):
            rng = np.random.default_rng(
                np.random.SeedSequence([int(init_seeds[pos]), restart])
            )
            v0[pos] = crandn(rng, (k, nt, d))
    v, _ = np.linalg.qr(v0)
    u = np.zeros((b, k, nr, d), dtype=complex)
    leak = np.full(b, np.inf)
    scale = np.zeros(b)
    conv = np.zeros(b, dtype=bool)
    iters = np.zeros(b, dtype=int)
    leak_prev = np.full(b, np.inf)
    active = np.arange(b)
    ha, wa, va = hc, w, v
    for it in range(opts.max_iters):
        # Rx side: weakest-eigenvector receive filters.
        hv = np.einsum("bjirt,bitd->bjird", ha, va)
        q = np.einsum("bji,bjird,bjise->bjrs", wa, hv, hv.conj())
        ua, _ = _smallest_eigvecs(q, d)
        # Reciprocal network: same update for the precoders.
        hu = np.einsum("bjitr,bjrd->bjitd", ha.conj().transpose(0, 1, 2, 4, 3), ua)
        qb = np.einsum("bji,bjitd,bjise->bits", wa, hu, hu.conj())
        va, lk = _smallest_eigvecs(qb, d)
        # eigh roundoff can leave tiny negative sums near exact alignment.
        new_leak = np.maximum(lk.sum(axis=1), 0.0)
        if traces is not None:
            for pos, idx in enumerate(active):
                traces[trace_ids[idx]].append(float(new_leak[pos]))
        if it == 0:
            scale[active] = new_leak
        rel = np.abs(leak_prev[active] - new_leak) / np.maximum(new_leak, 1e-30)
        leak[active] = new_leak
        iters[active] = it + 1
        u[active] = ua
        v[active] = va
        leak_prev[active] = new_leak
        done = (rel < opts.leakage_tol) | (
            new_leak <= opts.leakage_floor * scale[active]
        )
        if np.any(done):
            conv[active[done]] = True
            active = active[~done]
            if active.size == 0:
                break
            ha, wa, va = hc[active], w[active], v[active]
        else:
            va = v[active]
    return _fix_phase(u), _fix_phase(v), leak, conv, iters


def compute_ia(
    channels,
    dims: SystemDims,
    opts: IaOptions = IaOptions(),
    weights=None,
    collect_trace: bool = False,
) -> IaResult:
    """Solve one network realization.

    ``channels`` is a K x K grid of cross-link matrices (diagonal unused);
    ``weights`` a K x K grid of nonnegative per-link weights (defaults to
    all ones off the diagonal).
    """
    h = _channels_to_array(channels, dims)[None]
    if weights is None:
        w = np.ones((1, dims.k, dims.k))
    else:
        w = np.asarray(weights, dtype=float)[None]
    u, v, leak, conv, iters, traces = solve_ia_batch(
        h, w, dims, opts, collect_trace=collect_trace
    )
    ts = TransceiverSet(v=tuple(v[0]), u=tuple(u[0]))
    return IaResult(
        transceivers=ts,
        leakage=float(leak[0]),
        converged=bool(conv[0]),
        iterations=int(iters[0]),
        trace=tuple(traces[0]) if traces else (),
    )


def leakage(ts: TransceiverSet, channels, weights, dims: SystemDims) -> float:
    """Total weighted interference power past the decorrelators."""
    total = 0.0
    for j in range(dims.k):
        for i in range(dims.k):
            if i == j:
                continue
            m = ts.u[j].conj().T @ np.asarray(channels[j][i]) @ ts.v[i]
            total += float(weights[j][i]) * float(np.linalg.norm(m) ** 2)
    return total
