"""Random vector quantization codebooks, spatial transforms, and the
distortion statistics that drive bit allocation.

Base codebooks are i.i.d. Gaussian matrices normalized to unit Frobenius
norm, generated word-by-word so that a 2^B-word book is always the prefix
of the 2^(B+1)-word book from the same seed. A spatial codebook colors
every base word with the link's correlation square roots and renormalizes,
which matches the codeword distribution to the channel distribution.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    BudgetTooLargeError,
    DegenerateCodewordError,
    RankOneStatisticsError,
    ZeroInputError,
)
from .rng import substream
from .topology import EPS_RANK_DEFAULT, matrix_sqrt_psd

__all__ = [
    "BaseCodebook",
    "SpatialCodebook",
    "QuantizationResult",
    "BetaEstimate",
    "gen_base_codebook",
    "transform_codebook",
    "identity_codebook",
    "quantize",
    "quantize_with_refinement",
    "rank_one_direction",
    "distortion_coefficient_beta",
    "distortion_bound",
    "vec",
    "unvec",
    "codebook_to_json",
    "codebook_from_json",
    "MAX_WORDS_DEFAULT",
]

MAX_WORDS_DEFAULT = 2 ** 24
_NORM_TOL = 1e-12


def vec(m: np.ndarray) -> np.ndarray:
    """Column-major stacking, so vec(A X B) = (B^T kron A) vec(X)."""
    return np.asarray(m).reshape(-1, order="F")


def unvec(v: np.ndarray, nr: int, nt: int) -> np.ndarray:
    return np.asarray(v).reshape((nr, nt), order="F")


@dataclass(frozen=True)
class BaseCodebook:
    """2^bits unit-norm random words of shape Nr x Nt."""

    nr: int
    nt: int
    bits: int
    gen_seed: int
    words: np.ndarray  # (2^bits, nr, nt)

    def __post_init__(self):
        self.words.setflags(write=False)

    def __len__(self) -> int:
        return self.words.shape[0]


@dataclass(frozen=True)
class SpatialCodebook:
    """Base codebook colored by a link's correlation matrices."""

    words: np.ndarray  # (N, nr, nt), unit Frobenius norm
    source: BaseCodebook
    phi_r: np.ndarray
    phi_t: np.ndarray

    def __post_init__(self):
        self.words.setflags(write=False)

    def __len__(self) -> int:
        return self.words.shape[0]

    @property
    def nr(self) -> int:
        return self.words.shape[1]

    @property
    def nt(self) -> int:
        return self.words.shape[2]


@dataclass(frozen=True)
class QuantizationResult:
    index: int
    h_hat: np.ndarray
    alpha: complex
    delta_h: np.ndarray
    distortion: float
    bits: int


@dataclass(frozen=True)
class BetaEstimate:
    value: float
    stderr: float
    n_samples: int


def gen_base_codebook(
    nr: int,
    nt: int,
    bits: int,
    seed: int,
    max_words: int = MAX_WORDS_DEFAULT,
) -> BaseCodebook:
    """Draw 2^bits normalized i.i.d. Gaussian words.

    Real/imag parts are drawn per word (trailing axis) so that books of
    different sizes from the same seed share a common prefix.
    """
    if bits < 0:
        raise ValueError("bits must be nonnegative")
    n = 1 << bits
    if n > max_words:
        raise BudgetTooLargeError(f"2^{bits} words exceeds cap of {max_words}")
    rng = substream(seed, "base-codebook", nr, nt)
    raw = rng.standard_normal((n, nr, nt, 2))
    words = (raw[..., 0] + 1j * raw[..., 1]) / np.sqrt(2.0)
    norms = np.linalg.norm(words.reshape(n, -1), axis=1)
    words = words / norms[:, None, None]
    return BaseCodebook(nr=nr, nt=nt, bits=bits, gen_seed=seed, words=words)


def identity_codebook(base: BaseCodebook) -> SpatialCodebook:
    """Wrap a base codebook as a spatial codebook with identity transform."""
    return SpatialCodebook(
        words=base.words,
        source=base,
        phi_r=np.eye(base.nr, dtype=complex),
        phi_t=np.eye(base.nt, dtype=complex),
    )


def transform_codebook(
    base: BaseCodebook, phi_r: np.ndarray, phi_t: np.ndarray
) -> SpatialCodebook:
    """Color every base word by sqrt(phi_r) . S . sqrt(phi_t), renormalized.

    Words falling entirely into the correlation null space are replaced by
    fresh draws from a reserve stream of the same seed.
    """
    sr = matrix_sqrt_psd(phi_r)
    st = matrix_sqrt_psd(phi_t)
    if sr.shape[0] != base.nr or st.shape[0] != base.nt:
        raise ValueError("correlation dimensions do not match the codebook")
    words = np.einsum("ab,lbc,cd->lad", sr, base.words, st)
    norms = np.linalg.norm(words.reshape(len(base), -1), axis=1)
    degenerate = np.flatnonzero(norms < _NORM_TOL)
    if degenerate.size:
        reserve = substream(base.gen_seed, "degenerate-reserve", base.nr, base.nt)
        for idx in degenerate:
            for _ in range(1000):
                raw = reserve.standard_normal((base.nr, base.nt, 2))
                s = (raw[..., 0] + 1j * raw[..., 1]) / np.sqrt(2.0)
                w = sr @ (s / np.linalg.norm(s)) @ st
                nw = np.linalg.norm(w)
                if nw >= _NORM_TOL:
                    words[idx] = w
                    norms[idx] = nw
                    break
            else:
                raise DegenerateCodewordError("could not regenerate codeword")
    words = words / norms[:, None, None]
    return SpatialCodebook(words=words, source=base, phi_r=np.asarray(phi_r),
                           phi_t=np.asarray(phi_t))


def quantize(h: np.ndarray, cb: SpatialCodebook) -> QuantizationResult:
    """Pick the codeword maximizing |<vec(h), vec(W)>|; ties -> lowest index.

    The residual is the projection of h off the selected (unit-norm)
    codeword, so |alpha|^2 + distortion = ||h||^2.
    """
    h = np.asarray(h, dtype=complex)
    hn = np.linalg.norm(h)
    if hn == 0.0 or not np.isfinite(hn):
        raise ZeroInputError("cannot quantize a zero or non-finite matrix")
    n = len(cb)
    # vec is column-major but the inner product is order-agnostic as long
    # as both sides flatten the same way.
    flat_words = cb.words.reshape(n, -1)
    corr = np.abs(flat_words.conj() @ h.reshape(-1))
    index = int(np.argmax(corr))
    h_hat = cb.words[index]
    alpha = complex(np.vdot(h_hat, h))
    delta = h - alpha * h_hat
    return QuantizationResult(
        index=index,
        h_hat=h_hat,
        alpha=alpha,
        delta_h=delta,
        distortion=float(np.linalg.norm(delta) ** 2),
        bits=cb.source.bits,
    )


def rank_one_direction(phi_r: np.ndarray, phi_t: np.ndarray) -> np.ndarray:
    """Deterministic channel direction when both correlations are rank one.

    The realization is always a scalar multiple of u v^H built from the top
    eigenvectors, so no feedback bits are needed for the direction.
    """
    er, fr = np.linalg.eigh(np.asarray(phi_r, dtype=complex))
    et, ft = np.linalg.eigh(np.asarray(phi_t, dtype=complex))
    u = fr[:, -1]
    v = ft[:, -1]
    # Fix the global phase for reproducibility.
    u = u * np.exp(-1j * np.angle(u[np.argmax(np.abs(u))]))
    v = v * np.exp(-1j * np.angle(v[np.argmax(np.abs(v))]))
    w = np.outer(u, v.conj())
    return w / np.linalg.norm(w)


def quantize_with_refinement(
    h: np.ndarray,
    phi_r: np.ndarray,
    phi_t: np.ndarray,
    bits: int,
    codebook_seed: int,
    spatial: bool,
    m_r: int,
    m_t: int,
    materialize_cap_bits: int = 16,
    max_words: int = MAX_WORDS_DEFAULT,
) -> QuantizationResult:
    """Quantize with at most 2^cap materialized words, extrapolating beyond.

    For budgets above the cap, the selected codeword's angle to the channel
    is shrunk by the asymptotic per-bit factor 2^(-1/(Mr*Mt-1)) per extra
    bit (in squared sine), keeping the residual direction. The scaled
    minimum-distortion law is exact for the normalized extreme-value limit
    of random codebooks, so the synthetic codeword matches the distribution
    a full-size book would produce.
    """
    t = m_r * m_t
    if t == 1:
        w = rank_one_direction(phi_r, phi_t)
        alpha = complex(np.vdot(w, h))
        delta = h - alpha * w
        return QuantizationResult(0, w, alpha, delta,
                                  float(np.linalg.norm(delta) ** 2), bits)
    b0 = min(bits, materialize_cap_bits)
    base = gen_base_codebook(np.asarray(phi_r).shape[0], np.asarray(phi_t).shape[0],
                             b0, codebook_seed, max_words=max_words)
    cb = transform_codebook(base, phi_r, phi_t) if spatial else identity_codebook(base)
    res = quantize(h, cb)
    if bits <= b0:
        return res
    h = np.asarray(h, dtype=complex)
    vh = vec(h)
    vh = vh / np.linalg.norm(vh)
    w0 = vec(res.h_hat)
    inner = np.vdot(vh, w0)
    cos0_sq = min(abs(inner) ** 2, 1.0)
    sin0_sq = 1.0 - cos0_sq
    if sin0_sq <= 0.0:
        return QuantizationResult(res.index, res.h_hat, res.alpha, res.delta_h,
                                  res.distortion, bits)
    sin_new_sq = sin0_sq * 2.0 ** (-(bits - b0) / (t - 1))
    perp = w0 - inner * vh
    z = perp / np.linalg.norm(perp)
    phase = inner / abs(inner)
    w_new = phase * np.sqrt(1.0 - sin_new_sq) * vh + np.sqrt(sin_new_sq) * z
    h_hat = unvec(w_new, h.shape[0], h.shape[1])
    alpha = complex(np.vdot(h_hat, h))
    delta = h - alpha * h_hat
    return QuantizationResult(res.index, h_hat, alpha, delta,
                              float(np.linalg.norm(delta) ** 2), bits)


def distortion_coefficient_beta(
    phi_r: np.ndarray,
    phi_t: np.ndarray,
    n_samples: int = 100_000,
    rng: np.random.Generator | None = None,
    eps_rank: float = EPS_RANK_DEFAULT,
) -> BetaEstimate:
    """Monte Carlo estimate of the distortion coefficient of a link.

    Draws i.i.d. chi-square(2) weights over the grid of nonzero eigenvalue
    products and averages the distortion integrand; for identity
    correlations the estimate concentrates on Nr*Nt - 1.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    phi_r = np.asarray(phi_r, dtype=complex)
    phi_t = np.asarray(phi_t, dtype=complex)
    nr, nt = phi_r.shape[0], phi_t.shape[0]
    lam = np.linalg.eigvalsh(phi_r)
    sig = np.linalg.eigvalsh(phi_t)
    lam = lam[lam > eps_rank * lam.max()]
    sig = sig[sig > eps_rank * sig.max()]
    t = lam.size * sig.size
    if t < 2:
        raise RankOneStatisticsError("beta is undefined for rank-one statistics")
    prod = np.outer(lam, sig).reshape(-1)  # lambda_m * sigma_n over the grid
    k1 = 1.0 / (t - 1)
    k2 = (2 * t - 1) / (t - 1)
    y = rng.chisquare(2, size=(n_samples, t))
    num = y.sum(axis=1)
    den = y @ prod
    weight = y @ (prod * (nr * nt - prod))
    samples = (num / den) ** k2 * weight
    scale = np.prod(prod) ** k1 / (2 * t)
    vals = scale * samples
    return BetaEstimate(
        value=float(vals.mean()),
        stderr=float(vals.std(ddof=1) / np.sqrt(n_samples)),
        n_samples=n_samples,
    )


def distortion_bound(beta: float, m_r: int, m_t: int, bits: float) -> float:
    """High-resolution mean-distortion envelope: beta * 2^(-B/(Mr*Mt-1))."""
    t = m_r * m_t
    if t < 2:
        raise RankOneStatisticsError("bound undefined for rank-one statistics")
    if bits < 0:
        raise ValueError("bits must be nonnegative")
    return beta * 2.0 ** (-bits / (t - 1))


# ---------------------------------------------------------------------------
# Export / import
# ---------------------------------------------------------------------------


def _mat_to_lists(m):
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(m)]


def _mat_from_lists(rows):
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def codebook_to_json(cb: SpatialCodebook) -> str:
    doc = {
        "header": {
            "nr": cb.nr,
            "nt": cb.nt,
            "bits": cb.source.bits,
            "seed": cb.source.gen_seed,
            "transform": "spatial",
        },
        "phi_r": _mat_to_lists(cb.phi_r),
        "phi_t": _mat_to_lists(cb.phi_t),
        "words": [_mat_to_lists(w) for w in cb.words],
        "base_words": [_mat_to_lists(w) for w in cb.source.words],
    }
    return json.dumps(doc)


def codebook_from_json(text: str) -> SpatialCodebook:
    doc = json.loads(text)
    hdr = doc["header"]
    base_words = np.array([_mat_from_lists(w) for w in doc["base_words"]])
    base = BaseCodebook(nr=hdr["nr"], nt=hdr["nt"], bits=hdr["bits"],
                        gen_seed=hdr["seed"], words=base_words)
    words = np.array([_mat_from_lists(w) for w in doc["words"]])
    return SpatialCodebook(words=words, source=base,
                           phi_r=_mat_from_lists(doc["phi_r"]),
                           phi_t=_mat_from_lists(doc["phi_t"]))
