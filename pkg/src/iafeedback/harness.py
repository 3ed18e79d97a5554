"""Scenario orchestration: schemes, Monte Carlo cells, sweeps, persistence.

A *cell* is one (scheme, SNR, budget, topology-model) point averaged over
trials. Every trial derives its own named substream from the master seed,
so results do not depend on execution order or parallelism. Within a cell,
trials are prepared (channel sampling + quantization) in parallel chunks
and the alignment solves run batched over each chunk.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np
from joblib import Parallel, delayed

from . import __version__
from .allocation import (
    BitAllocation,
    LinkQuantStats,
    allocate_bits,
    equal_allocation,
    scaling_bits,
)
from .codebook import distortion_coefficient_beta, quantize_with_refinement
from .errors import DimensionMismatchError
from .evaluation import ThroughputSample, bound_report, rinr, trial_sample
from .ia import (
    Feasibility,
    IaOptions,
    TransceiverSet,
    check_feasibility,
    random_transceivers,
    solve_ia_batch,
)
from .rng import substream
from .topology import (
    GAIN_FLOOR_DEFAULT,
    InterferenceTopologyProfile,
    LinkStats,
    SystemDims,
    exponential_correlation,
    iid_link_stats,
    itp_from_json,
    itp_to_json,
    sample_channel,
    sample_random_itp,
)

__all__ = [
    "Scheme",
    "ScenarioConfig",
    "SimRecord",
    "Table1Result",
    "run_trial",
    "run_cell",
    "table1_experiment",
    "sweep",
    "simulate",
    "records_to_csv",
    "write_records",
    "CSV_COLUMNS",
]

_SCHEME_ORDER = ("DFS", "CVQ", "HDS1", "HDS2", "RB")


class Scheme:
    """Feedback scheme: which codebooks and which bit split each link gets."""

    DFS = "DFS"  # spatial codebooks, water-filled bits
    CVQ = "CVQ"  # base codebooks, equal bits
    HDS1 = "HDS1"  # spatial codebooks, equal bits
    HDS2 = "HDS2"  # base codebooks, water-filled bits
    RB = "RB"  # random transceivers, no feedback

    ALL = _SCHEME_ORDER

    @staticmethod
    def validate(name: str) -> str:
        if name not in _SCHEME_ORDER:
            raise ValueError(f"unknown scheme {name!r}; pick from {_SCHEME_ORDER}")
        return name

    @staticmethod
    def spatial(name: str) -> bool:
        return name in ("DFS", "HDS1")

    @staticmethod
    def dynamic_bits(name: str) -> bool:
        return name in ("DFS", "HDS2")

    @staticmethod
    def uses_feedback(name: str) -> bool:
        return name != "RB"


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything a sweep needs; serializable to/from JSON."""

    dims: SystemDims
    itp: InterferenceTopologyProfile | None = None  # explicit topology
    eps: float = 0.7  # transmit-correlation magnitude (random model)
    delta2: float = 3.0  # shadowing log-variance (random model)
    snr_db: tuple = (25.0,)
    budgets: tuple = (120,)
    schemes: tuple = _SCHEME_ORDER
    trials: int = 500
    seed: int = 0
    # Monte Carlo cells tolerate a looser alignment floor: the quantization
    # residual dominates the leakage long before 1e-8 of the initial value.
    ia: IaOptions = field(default_factory=lambda: IaOptions(leakage_floor=1e-8))
    axis_values: tuple = ()  # points for correlation/shadowing axes
    bounds: bool = True
    fresh_codebooks: bool = True
    codebook_cap_bits: int = 12
    beta_samples: int = 10_000
    n_jobs: int = -1
    chunk_size: int = 250
    output: str | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.snr_db or not self.budgets:
            raise ValueError("snr and budget lists must be nonempty")
        for s in self.schemes:
            Scheme.validate(s)
        object.__setattr__(self, "snr_db", tuple(float(x) for x in self.snr_db))
        object.__setattr__(self, "budgets", tuple(int(b) for b in self.budgets))
        object.__setattr__(self, "schemes", tuple(self.schemes))
        object.__setattr__(self, "axis_values", tuple(self.axis_values))

    def to_json(self) -> str:
        doc = {
            "dims": {"k": self.dims.k, "nt": self.dims.nt,
                     "nr": self.dims.nr, "d": self.dims.d},
            "itp": json.loads(itp_to_json(self.itp)) if self.itp else None,
            "eps": self.eps,
            "delta2": self.delta2,
            "snr_db": list(self.snr_db),
            "budgets": list(self.budgets),
            "schemes": list(self.schemes),
            "trials": self.trials,
            "seed": self.seed,
            "ia": {"max_iters": self.ia.max_iters,
                   "leakage_tol": self.ia.leakage_tol,
                   "init_seed": self.ia.init_seed,
                   "restart_count": self.ia.restart_count},
            "axis_values": list(self.axis_values),
            "bounds": self.bounds,
            "fresh_codebooks": self.fresh_codebooks,
            "codebook_cap_bits": self.codebook_cap_bits,
            "beta_samples": self.beta_samples,
            "n_jobs": self.n_jobs,
            "chunk_size": self.chunk_size,
            "output": self.output,
        }
        return json.dumps(doc, indent=2)

    @staticmethod
    def from_json(text: str) -> "ScenarioConfig":
        doc = json.loads(text)
        dims = SystemDims(**doc["dims"])
        itp = None
        if doc.get("itp"):
            itp = itp_from_json(json.dumps(doc["itp"]))
        ia = IaOptions(**doc.get("ia", {}))
        kwargs = {
            k: doc[k]
            for k in (
                "eps", "delta2", "snr_db", "budgets", "schemes", "trials",
                "seed", "axis_values", "bounds", "fresh_codebooks",
                "codebook_cap_bits", "beta_samples", "n_jobs", "chunk_size",
                "output",
            )
            if k in doc
        }
        return ScenarioConfig(dims=dims, itp=itp, ia=ia, **kwargs)


CSV_COLUMNS = (
    "scheme",
    "axis",
    "p_db",
    "budget",
    "eps",
    "delta2",
    "trials",
    "mean_rinr",
    "rinr_half_width",
    "mean_rlim",
    "rlim_half_width",
    "r_per",
    "r_low",
    "r_low_conventional",
    "mean_rinr_per_rx",
    "converged_frac",
    "seed",
)


@dataclass(frozen=True)
class SimRecord:
    """One cell of results: scheme x operating point, with every mean
    carrying a 95% normal-approximation half-width."""

    scheme: str
    axis: str
    p_db: float
    budget: int
    eps: float
    delta2: float
    trials: int
    mean_rinr: float
    rinr_half_width: float
    mean_rlim: float
    rlim_half_width: float
    r_per: float
    r_low: float
    r_low_conventional: float
    mean_rinr_per_rx: tuple
    converged_frac: float
    seed: int

    def row(self) -> list:
        vals = []
        for col in CSV_COLUMNS:
            v = getattr(self, col)
            if col == "mean_rinr_per_rx":
                vals.append("|".join(repr(float(x)) for x in v))
            elif isinstance(v, float):
                vals.append(repr(v))
            else:
                vals.append(str(v))
        return vals


@dataclass(frozen=True)
class Table1Result:
    """Mean RINR at receiver 1 of the two-quantized-link toy network."""

    cells: dict  # (scheme name, budget) -> (mean, half_width)
    trials: int
    seed: int


# ---------------------------------------------------------------------------
# Distortion-coefficient cache: the coefficient depends only on the nonzero
# correlation eigenvalues, so it is memoized on them (per sample count).
# Estimates use a seed derived from the key, keeping results independent of
# call order.
# ---------------------------------------------------------------------------

_BETA_CACHE: dict = {}


def _beta_key(phi_r, phi_t, n_samples):
    lr = tuple(np.round(np.linalg.eigvalsh(np.asarray(phi_r, dtype=complex)), 12))
    lt = tuple(np.round(np.linalg.eigvalsh(np.asarray(phi_t, dtype=complex)), 12))
    return (lr, lt, int(n_samples))


def _beta_cached(phi_r, phi_t, n_samples: int) -> float:
    key = _beta_key(phi_r, phi_t, n_samples)
    if key not in _BETA_CACHE:
        rng = substream(0, "beta-estimate", repr(key))
        est = distortion_coefficient_beta(phi_r, phi_t, n_samples=n_samples, rng=rng)
        _BETA_CACHE[key] = est.value
    return _BETA_CACHE[key]


def link_quant_stats(
    itp: InterferenceTopologyProfile, beta_samples: int = 10_000
) -> list:
    """Allocator inputs for every cross link of a topology."""
    out = []
    for j, i, st in itp.cross_links():
        t = st.m_r * st.m_t
        beta = _beta_cached(st.phi_r, st.phi_t, beta_samples) if t >= 2 else 0.0
        out.append(LinkQuantStats(rx=j, tx=i, beta=beta, gain=st.gain,
                                  m_r=st.m_r, m_t=st.m_t))
    return out


def _scheme_allocation(scheme: str, stats: list, budget: int) -> BitAllocation:
    if Scheme.dynamic_bits(scheme):
        return allocate_bits(stats, budget)
    ids = [s.link_id for s in stats if s.eligible()]
    return equal_allocation(budget, ids)


def _prepare_trial(itp, scheme, budget, p, rng, cap_bits, beta_samples):
    """Sample a channel, quantize the cross links, and package IA inputs.

    Returns (true channel realization, quantized K x K array, weight array,
    init seed). Codebook seeds are drawn from ``rng`` in a scheme-independent
    order so schemes sharing a codebook family see identical books.
    """
    dims = itp.dims
    chan = sample_channel(itp, rng)
    stats = link_quant_stats(itp, beta_samples)
    alloc = _scheme_allocation(scheme, stats, budget)
    k = dims.k
    hq = np.zeros((k, k, dims.nr, dims.nt), dtype=complex)
    w = np.zeros((k, k))
    for j, i, st in itp.cross_links():
        seed = int(rng.integers(1 << 62))
        res = quantize_with_refinement(
            chan.h[j][i], st.phi_r, st.phi_t,
            bits=alloc.bits.get((j, i), 0),
            codebook_seed=seed,
            spatial=Scheme.spatial(scheme),
            m_r=st.m_r, m_t=st.m_t,
            materialize_cap_bits=cap_bits,
        )
        hq[j, i] = res.h_hat
        w[j, i] = st.gain * p / dims.d
    init_seed = int(rng.integers(1 << 62))
    return chan, hq, w, init_seed


def _trial_rng(seed, cell_tag, trial):
    return substream(seed, *cell_tag, trial)


def _make_itp(cfg: ScenarioConfig, eps, delta2, seed, cell_tag, trial):
    if cfg.itp is not None:
        return cfg.itp
    rng = substream(seed, *cell_tag, trial, "itp")
    return sample_random_itp(cfg.dims, eps, delta2, rng)


def _run_chunk(cfg, scheme, budget, p, eps, delta2, cell_tag, trial_ids):
    """Prepare + solve + evaluate one chunk of trials; IA solves batched."""
    dims = cfg.dims
    samples = [None] * len(trial_ids)
    if scheme == Scheme.RB:
        for pos, t in enumerate(trial_ids):
            itp = _make_itp(cfg, eps, delta2, cfg.seed, cell_tag, t)
            rng = _trial_rng(cfg.seed, cell_tag, t)
            chan = sample_channel(itp, rng)
            ts = random_transceivers(dims, rng)
            s = trial_sample(ts, chan.h, itp, p, dims.d)
            samples[pos] = replace(s, seed_tag=f"trial-{t}")
        return samples

    chans, itps = [], []
    hq = np.zeros((len(trial_ids), dims.k, dims.k, dims.nr, dims.nt), dtype=complex)
    w = np.zeros((len(trial_ids), dims.k, dims.k))
    init_seeds = np.zeros(len(trial_ids), dtype=np.int64)
    for pos, t in enumerate(trial_ids):
        itp = _make_itp(cfg, eps, delta2, cfg.seed, cell_tag, t)
        rng = _trial_rng(cfg.seed, cell_tag, t)
        if not cfg.fresh_codebooks:
            # One codebook family for the whole cell: codebook seeds come
            # from a cell-level stream instead of the per-trial stream.
            rng = _FixedSeedRng(rng, cell_tag, cfg.seed)
        chan, q, wi, iseed = _prepare_trial(
            itp, scheme, budget, p, rng,
            cfg.codebook_cap_bits, cfg.beta_samples,
        )
        chans.append(chan)
        itps.append(itp)
        hq[pos], w[pos], init_seeds[pos] = q, wi, iseed
    u, v, _leak, conv, _iters, _ = solve_ia_batch(
        hq, w, dims, cfg.ia, init_seeds=init_seeds
    )
    for pos, t in enumerate(trial_ids):
        ts = TransceiverSet(v=tuple(v[pos]), u=tuple(u[pos]))
        s = trial_sample(ts, chans[pos].h, itps[pos], p, dims.d)
        samples[pos] = replace(
            s, seed_tag=f"trial-{t}", converged=bool(conv[pos])
        )
    return samples


class _FixedSeedRng:
    """Wraps a trial stream but serves codebook seeds from a fixed cell-level
    sequence, for the fixed-codebook configuration."""

    def __init__(self, trial_rng, cell_tag, master_seed):
        self._trial = trial_rng
        self._fixed = substream(master_seed, *cell_tag, "fixed-codebooks")

    def integers(self, high):
        return self._fixed.integers(high)

    def __getattr__(self, name):
        return getattr(self._trial, name)


def run_trial(
    itp: InterferenceTopologyProfile,
    scheme: str,
    budget: int,
    p: float,
    rng: np.random.Generator,
    ia_opts: IaOptions = IaOptions(),
    cap_bits: int = 12,
    beta_samples: int = 10_000,
) -> ThroughputSample:
    """One Monte Carlo trial of one scheme at one operating point."""
    Scheme.validate(scheme)
    if check_feasibility(itp.dims) is Feasibility.INFEASIBLE:
        raise DimensionMismatchError("system dimensions fail the feasibility screen")
    dims = itp.dims
    if scheme == Scheme.RB:
        chan = sample_channel(itp, rng)
        ts = random_transceivers(dims, rng)
        return trial_sample(ts, chan.h, itp, p, dims.d)
    chan, hq, w, init_seed = _prepare_trial(
        itp, scheme, budget, p, rng, cap_bits, beta_samples
    )
    u, v, _leak, conv, _iters, _ = solve_ia_batch(
        hq[None], w[None], dims, ia_opts, init_seeds=[init_seed]
    )
    ts = TransceiverSet(v=tuple(v[0]), u=tuple(u[0]))
    s = trial_sample(ts, chan.h, itp, p, dims.d)
    return replace(s, converged=bool(conv[0]))


def run_cell(
    cfg: ScenarioConfig,
    scheme: str,
    budget: int,
    p_db: float,
    eps: float,
    delta2: float,
    cell_tag: tuple,
) -> list:
    """All trials of one cell, chunked and parallelized."""
    p = 10.0 ** (p_db / 10.0)
    ids = list(range(cfg.trials))
    chunks = [
        ids[s : s + cfg.chunk_size] for s in range(0, len(ids), cfg.chunk_size)
    ]
    if len(chunks) > 1 and cfg.n_jobs != 1:
        parts = Parallel(n_jobs=cfg.n_jobs)(
            delayed(_run_chunk)(cfg, scheme, budget, p, eps, delta2, cell_tag, c)
            for c in chunks
        )
    else:
        parts = [
            _run_chunk(cfg, scheme, budget, p, eps, delta2, cell_tag, c)
            for c in chunks
        ]
    return [s for part in parts for s in part]


def _half_width(x: np.ndarray) -> float:
    if x.size < 2:
        return 0.0
    return float(1.96 * x.std(ddof=1) / math.sqrt(x.size))


def _nominal_stats(cfg: ScenarioConfig, eps: float) -> list:
    """Cross-link statistics at the ensemble-mean gain, used for bounds
    and for the throughput-preserving budget rule."""
    if cfg.itp is not None:
        return link_quant_stats(cfg.itp, cfg.beta_samples)
    phi_t = exponential_correlation(cfg.dims.nt, eps)
    eye = np.eye(cfg.dims.nr, dtype=complex)
    link = LinkStats(eye, phi_t, 1.0)
    beta = _beta_cached(link.phi_r, link.phi_t, cfg.beta_samples)
    return [
        LinkQuantStats(rx=j, tx=i, beta=beta, gain=1.0,
                       m_r=link.m_r, m_t=link.m_t)
        for j in range(cfg.dims.k)
        for i in range(cfg.dims.k)
        if i != j
    ]


def _cell_record(cfg, scheme, axis, budget, p_db, eps, delta2, cell_tag) -> SimRecord:
    samples = run_cell(cfg, scheme, budget, p_db, eps, delta2, cell_tag)
    k = cfg.dims.k
    rinrs = np.array([s.rinrs for s in samples])  # (T, K)
    rates = np.array([s.sum_rate for s in samples])
    per_rx = tuple(float(m) for m in rinrs.mean(axis=0))
    p = 10.0 ** (p_db / 10.0)
    r_per = r_low = r_low_conv = math.nan
    if cfg.bounds:
        stats = _nominal_stats(cfg, eps)
        if Scheme.uses_feedback(scheme):
            alloc = _scheme_allocation(scheme, stats, budget)
            rep = bound_report(alloc, stats, p, cfg.dims.d, k)
            r_per, r_low, r_low_conv = rep.r_per, rep.r_low, rep.r_low_conventional
        else:
            from .evaluation import throughput_perfect

            r_per = throughput_perfect(p, cfg.dims.d, k)
    return SimRecord(
        scheme=scheme,
        axis=axis,
        p_db=float(p_db),
        budget=int(budget),
        eps=float(eps),
        delta2=float(delta2),
        trials=len(samples),
        mean_rinr=float(rinrs.mean()),
        rinr_half_width=_half_width(rinrs.mean(axis=1)),
        mean_rlim=float(rates.mean()),
        rlim_half_width=_half_width(rates),
        r_per=float(r_per),
        r_low=float(r_low),
        r_low_conventional=float(r_low_conv),
        mean_rinr_per_rx=per_rx,
        converged_frac=float(np.mean([s.converged for s in samples])),
        seed=cfg.seed,
    )


_AXES = ("bits", "snr", "snr-scaled", "correlation", "shadowing")


def sweep(cfg: ScenarioConfig, axis: str) -> list:
    """Cartesian product of schemes and axis points, one SimRecord each."""
    if axis not in _AXES:
        raise ValueError(f"axis must be one of {_AXES}")
    records = []
    p0, b0 = cfg.snr_db[0], cfg.budgets[0]
    if axis == "bits":
        points = [("bits", b, p0, cfg.eps, cfg.delta2) for b in cfg.budgets]
    elif axis == "snr":
        points = [("snr", b0, p, cfg.eps, cfg.delta2) for p in cfg.snr_db]
    elif axis == "snr-scaled":
        points = []
        for p_db in cfg.snr_db:
            p = 10.0 ** (p_db / 10.0)
            b = scaling_bits(p, _nominal_stats(cfg, cfg.eps))
            points.append(("snr-scaled", b, p_db, cfg.eps, cfg.delta2))
    elif axis == "correlation":
        vals = cfg.axis_values or (0.1, 0.4, 0.7, 0.9)
        points = [("correlation", b0, p0, e, cfg.delta2) for e in vals]
    else:
        vals = cfg.axis_values or (0.5, 1.5, 3.0, 4.5)
        points = [("shadowing", b0, p0, cfg.eps, d2) for d2 in vals]
    for scheme in cfg.schemes:
        for ax, budget, p_db, eps, delta2 in points:
            cell_tag = ("cell", scheme, ax, repr(budget), repr(p_db),
                        repr(eps), repr(delta2))
            records.append(
                _cell_record(cfg, scheme, ax, budget, p_db, eps, delta2, cell_tag)
            )
    return records


def simulate(cfg: ScenarioConfig) -> list:
    """Full grid: schemes x SNR points x budgets."""
    records = []
    for scheme in cfg.schemes:
        for p_db in cfg.snr_db:
            for budget in cfg.budgets:
                cell_tag = ("cell", scheme, "grid", repr(budget), repr(p_db),
                            repr(cfg.eps), repr(cfg.delta2))
                records.append(
                    _cell_record(cfg, scheme, "grid", budget, p_db,
                                 cfg.eps, cfg.delta2, cell_tag)
                )
    return records


# ---------------------------------------------------------------------------
# Two-quantized-link toy network
# ---------------------------------------------------------------------------


def toy_network() -> InterferenceTopologyProfile:
    """K=4, 3x2, d=1 network where receiver 1 has one strongly correlated
    interferer at unit gain and one weak uncorrelated interferer."""
    dims = SystemDims(k=4, nt=3, nr=2, d=1)
    phi_corr = np.diag([2.8, 0.1, 0.1]).astype(complex)
    links = []
    for j in range(4):
        row = []
        for i in range(4):
            if j == 0 and i == 2:
                row.append(LinkStats(np.eye(2, dtype=complex), phi_corr, 1.0))
            elif j == 0 and i == 3:
                row.append(iid_link_stats(2, 3, 0.1))
            else:
                row.append(iid_link_stats(2, 3, 1.0))
        links.append(tuple(row))
    return InterferenceTopologyProfile(dims=dims, links=tuple(links))


def _toy_chunk(budget, dynamic, seed, trial_ids, ia_opts, cap_bits):
    """Toy-network trials: only the two interfering links into receiver 1
    are quantized; everything else is known exactly."""
    itp = toy_network()
    dims = itp.dims
    p = 1.0
    n = len(trial_ids)
    hq = np.zeros((n, 4, 4, 2, 3), dtype=complex)
    w = np.zeros((n, 4, 4))
    init_seeds = np.zeros(n, dtype=np.int64)
    chans = []
    kind = "dynamic" if dynamic else "conventional"
    for pos, t in enumerate(trial_ids):
        rng = substream(seed, "toy", kind, budget, t)
        chan = sample_channel(itp, rng)
        chans.append(chan)
        for j, i, st in itp.cross_links():
            hm = chan.h[j][i]
            w[pos, j, i] = st.gain * p / dims.d
            hq[pos, j, i] = hm / np.linalg.norm(hm)
        for (j, i), bits, spatial in (
            ((0, 2), budget if dynamic else budget // 2, dynamic),
            ((0, 3), 0 if dynamic else budget - budget // 2, False),
        ):
            st = itp.links[j][i]
            res = quantize_with_refinement(
                chan.h[j][i], st.phi_r, st.phi_t, bits=bits,
                codebook_seed=int(rng.integers(1 << 62)),
                spatial=spatial, m_r=st.m_r, m_t=st.m_t,
                materialize_cap_bits=cap_bits,
            )
            hq[pos, j, i] = res.h_hat
        init_seeds[pos] = int(rng.integers(1 << 62))
    u, v, _leak, _conv, _iters, _ = solve_ia_batch(
        hq, w, dims, ia_opts, init_seeds=init_seeds
    )
    out = np.empty(n)
    for pos in range(n):
        ts = TransceiverSet(v=tuple(v[pos]), u=tuple(u[pos]))
        out[pos] = rinr(ts, chans[pos].h, itp, p, dims.d, 0)
    return out


def table1_experiment(
    trials: int = 10_000,
    budgets: tuple = (4, 10, 16),
    seed: int = 0,
    n_jobs: int = -1,
    chunk_size: int = 250,
    cap_bits: int = 12,
    ia_opts: IaOptions = IaOptions(leakage_floor=1e-8),
) -> Table1Result:
    """Mean RINR at receiver 1 of the toy network, for the equal-bits/base
    codebook scheme versus the all-bits-on-the-strong-link/spatial-codebook
    scheme, at each budget."""
    cells = {}
    ids = list(range(trials))
    chunks = [ids[s : s + chunk_size] for s in range(0, len(ids), chunk_size)]
    for budget in budgets:
        for dynamic, name in ((False, "conventional"), (True, "dynamic")):
            parts = Parallel(n_jobs=n_jobs)(
                delayed(_toy_chunk)(budget, dynamic, seed, c, ia_opts, cap_bits)
                for c in chunks
            )
            vals = np.concatenate(parts)
            cells[(name, budget)] = (float(vals.mean()), _half_width(vals))
    return Table1Result(cells=cells, trials=trials, seed=seed)


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------


def records_to_csv(records: list) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow(rec.row())
    return buf.getvalue()


def write_records(records: list, path: str, cfg: ScenarioConfig | None = None):
    """Write the CSV plus a JSON sidecar echoing the configuration."""
    with open(path, "w", newline="") as f:
        f.write(records_to_csv(records))
    sidecar = {
        "version": __version__,
        "config": json.loads(cfg.to_json()) if cfg is not None else None,
        "seed": cfg.seed if cfg is not None else None,
        "columns": list(CSV_COLUMNS),
    }
    with open(path + ".meta.json", "w") as f:
        json.dump(sidecar, f, indent=2)
        f.write("\n")
