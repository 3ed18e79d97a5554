"""Interference topology profiles and correlated channel sampling.

A network is described by per-link long-term statistics (receive/transmit
correlation matrices and a large-scale gain) plus the system dimensions.
Small-scale fading realizations follow the Kronecker model: the i.i.d.
complex Gaussian core is colored on both sides by the PSD square roots of
the correlation matrices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import CorrelationNotPSDError, NegativeEigenvalueError, NotHermitianError

__all__ = [
    "SystemDims",
    "LinkStats",
    "InterferenceTopologyProfile",
    "ChannelRealization",
    "matrix_sqrt_psd",
    "effective_rank",
    "sample_channel",
    "sample_random_itp",
    "exponential_correlation",
    "iid_link_stats",
    "crandn",
    "itp_to_json",
    "itp_from_json",
    "EPS_RANK_DEFAULT",
    "GAIN_FLOOR_DEFAULT",
]

EPS_RANK_DEFAULT = 1e-9
# Gains below this are treated as a disconnected link.
GAIN_FLOOR_DEFAULT = 1e-12

_HERM_TOL = 1e-10
_TRACE_TOL = 1e-8


def crandn(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard complex Gaussian array: unit variance per complex entry."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def _check_hermitian(m: np.ndarray, tol: float = _HERM_TOL) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotHermitianError(f"expected a square matrix, got shape {m.shape}")
    if np.max(np.abs(m - m.conj().T)) > tol:
        raise NotHermitianError("matrix is not Hermitian within tolerance")
    return m


def matrix_sqrt_psd(m: np.ndarray) -> np.ndarray:
    """Hermitian PSD square root via eigendecomposition.

    Eigenvalues in [-1e-10, 0) are clamped to zero; anything more negative
    is an error rather than silently projected.
    """
    m = _check_hermitian(m)
    evals, evecs = np.linalg.eigh(m)
    if np.any(evals < -_HERM_TOL):
        raise NegativeEigenvalueError(
            f"eigenvalue {evals.min():.3e} below PSD tolerance"
        )
    evals = np.clip(evals, 0.0, None)
    return (evecs * np.sqrt(evals)) @ evecs.conj().T


def effective_rank(m: np.ndarray, eps_rank: float = EPS_RANK_DEFAULT) -> int:
    """Number of eigenvalues above ``eps_rank`` relative to the largest."""
    m = _check_hermitian(m)
    evals = np.linalg.eigvalsh(m)
    top = float(evals.max(initial=0.0))
    if top <= 0.0:
        return 0
    return int(np.count_nonzero(evals > eps_rank * top))


@dataclass(frozen=True)
class SystemDims:
    """Network dimensions: K pairs, Nt/Nr antennas, d streams per pair."""

    k: int
    nt: int
    nr: int
    d: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("need at least one Tx-Rx pair")
        if not (1 <= self.d <= min(self.nt, self.nr)):
            raise ValueError("streams must satisfy 1 <= d <= min(Nt, Nr)")


@dataclass(frozen=True)
class LinkStats:
    """Long-term statistics of one Tx->Rx link.

    ``phi_r`` / ``phi_t`` are trace-normalized Hermitian PSD correlation
    matrices; ``gain`` is the large-scale gain on linear scale. Effective
    ranks are derived at construction and cached.
    """

    phi_r: np.ndarray
    phi_t: np.ndarray
    gain: float
    eps_rank: float = EPS_RANK_DEFAULT
    m_r: int = field(init=False)
    m_t: int = field(init=False)

    def __post_init__(self):
        phi_r = _check_hermitian(self.phi_r)
        phi_t = _check_hermitian(self.phi_t)
        nr, nt = phi_r.shape[0], phi_t.shape[0]
        if abs(np.trace(phi_r).real - nr) > _TRACE_TOL:
            raise CorrelationNotPSDError("trace(phi_r) must equal Nr")
        if abs(np.trace(phi_t).real - nt) > _TRACE_TOL:
            raise CorrelationNotPSDError("trace(phi_t) must equal Nt")
        if self.gain < 0:
            raise ValueError("gain must be nonnegative")
        phi_r.setflags(write=False)
        phi_t.setflags(write=False)
        object.__setattr__(self, "phi_r", phi_r)
        object.__setattr__(self, "phi_t", phi_t)
        object.__setattr__(self, "m_r", effective_rank(phi_r, self.eps_rank))
        object.__setattr__(self, "m_t", effective_rank(phi_t, self.eps_rank))
        if self.m_r == 0 or self.m_t == 0:
            raise CorrelationNotPSDError("correlation matrix has rank zero")

    @property
    def nr(self) -> int:
        return self.phi_r.shape[0]

    @property
    def nt(self) -> int:
        return self.phi_t.shape[0]

    def connected(self, floor: float = GAIN_FLOOR_DEFAULT) -> bool:
        return self.gain > floor

    @property
    def sqrt_phi_r(self) -> np.ndarray:
        """PSD square root of phi_r, computed once per instance."""
        cached = self.__dict__.get("_sqrt_phi_r")
        if cached is None:
            cached = matrix_sqrt_psd(self.phi_r)
            object.__setattr__(self, "_sqrt_phi_r", cached)
        return cached

    @property
    def sqrt_phi_t(self) -> np.ndarray:
        cached = self.__dict__.get("_sqrt_phi_t")
        if cached is None:
            cached = matrix_sqrt_psd(self.phi_t)
            object.__setattr__(self, "_sqrt_phi_t", cached)
        return cached


def iid_link_stats(nr: int, nt: int, gain: float = 1.0) -> LinkStats:
    """Identity correlations on both sides (i.i.d. Rayleigh fading)."""
    return LinkStats(np.eye(nr, dtype=complex), np.eye(nt, dtype=complex), gain)


@dataclass(frozen=True)
class InterferenceTopologyProfile:
    """System dimensions plus the K x K grid of link statistics.

    ``links[j][i]`` holds the statistics of the channel from Tx i to Rx j.
    """

    dims: SystemDims
    links: tuple

    def __post_init__(self):
        k = self.dims.k
        links = tuple(tuple(row) for row in self.links)
        if len(links) != k or any(len(row) != k for row in links):
            raise ValueError("links must be a K x K grid")
        for row in links:
            for st in row:
                if st.nr != self.dims.nr or st.nt != self.dims.nt:
                    raise ValueError("link statistics do not match system dims")
        object.__setattr__(self, "links", links)

    def link(self, j: int, i: int) -> LinkStats:
        return self.links[j][i]

    def cross_links(self):
        """Yield (j, i, stats) over all cross links i != j."""
        k = self.dims.k
        for j in range(k):
            for i in range(k):
                if i != j:
                    yield j, i, self.links[j][i]


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of all small-scale matrices; ``h[j][i]`` is Nr x Nt."""

    h: tuple
    seed_tag: str = ""

    def __post_init__(self):
        h = tuple(tuple(np.asarray(m, dtype=complex) for m in row) for row in self.h)
        object.__setattr__(self, "h", h)


def sample_channel(
    itp: InterferenceTopologyProfile,
    rng: np.random.Generator,
    seed_tag: str = "",
) -> ChannelRealization:
    """Draw one Kronecker-model realization of every link in the network.

    Each link uses an independent i.i.d. complex Gaussian core, colored by
    the PSD square roots of its correlation matrices. The large-scale gain
    is *not* folded into the matrices; it is applied by the consumers.
    """
    k = itp.dims.k
    grid = []
    for j in range(k):
        row = []
        for i in range(k):
            st = itp.links[j][i]
            hw = crandn(rng, (itp.dims.nr, itp.dims.nt))
            row.append(st.sqrt_phi_r @ hw @ st.sqrt_phi_t)
        grid.append(tuple(row))
    return ChannelRealization(h=tuple(grid), seed_tag=seed_tag)


def exponential_correlation(n: int, eps: complex) -> np.ndarray:
    """Exponential correlation matrix: entry (p, q) = eps^(q-p) for q >= p."""
    if abs(eps) >= 1:
        raise CorrelationNotPSDError("|eps| must be < 1")
    idx = np.arange(n)
    diff = idx[None, :] - idx[None, :].T  # q - p
    phi = np.where(diff >= 0, np.power(complex(eps), np.abs(diff)),
                   np.conj(np.power(complex(eps), np.abs(diff))))
    # Unit diagonal already gives trace n; rescale only to absorb roundoff.
    tr = np.trace(phi).real
    if abs(tr - n) > 1e-13:
        phi = phi * (n / tr)
    return phi


def sample_random_itp(
    dims: SystemDims,
    eps: complex,
    delta2: float,
    rng: np.random.Generator,
) -> InterferenceTopologyProfile:
    """Random cross-link topology: exponential transmit correlation plus
    i.i.d. log-normal shadowing with the mean normalized to one.

    Direct links are i.i.d. with unit gain.
    """
    if abs(eps) >= 1:
        raise CorrelationNotPSDError("|eps| must be < 1")
    if delta2 < 0:
        raise ValueError("delta2 must be nonnegative")
    phi_t = exponential_correlation(dims.nt, eps)
    eye_r = np.eye(dims.nr, dtype=complex)
    u = -0.5 * delta2
    sigma = np.sqrt(delta2)
    grid = []
    for j in range(dims.k):
        row = []
        for i in range(dims.k):
            if i == j:
                row.append(iid_link_stats(dims.nr, dims.nt, 1.0))
            else:
                gain = float(np.exp(rng.normal(u, sigma))) if delta2 > 0 else 1.0
                row.append(LinkStats(eye_r, phi_t.copy(), gain))
        grid.append(tuple(row))
    return InterferenceTopologyProfile(dims=dims, links=tuple(grid))


# ---------------------------------------------------------------------------
# Serialization: JSON with complex matrices as [[re, im], ...] row lists.
# Python's float repr round-trips exactly, so the format is lossless.
# ---------------------------------------------------------------------------


def _mat_to_lists(m: np.ndarray):
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(m)]


def _mat_from_lists(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def itp_to_json(itp: InterferenceTopologyProfile) -> str:
    doc = {
        "dims": {"k": itp.dims.k, "nt": itp.dims.nt, "nr": itp.dims.nr, "d": itp.dims.d},
        "links": [
            [
                {
                    "phi_r": _mat_to_lists(st.phi_r),
                    "phi_t": _mat_to_lists(st.phi_t),
                    "gain": st.gain,
                }
                for st in row
            ]
            for row in itp.links
        ],
    }
    return json.dumps(doc)


def itp_from_json(text: str) -> InterferenceTopologyProfile:
    doc = json.loads(text)
    dims = SystemDims(**doc["dims"])
    links = tuple(
        tuple(
            LinkStats(
                _mat_from_lists(entry["phi_r"]),
                _mat_from_lists(entry["phi_t"]),
                float(entry["gain"]),
            )
            for entry in row
        )
        for row in doc["links"]
    )
    return InterferenceTopologyProfile(dims=dims, links=links)
