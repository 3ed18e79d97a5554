"""Feedback-bit allocation across cross links.

The optimizer minimizes the sum of per-receiver residual-interference
envelopes, which has a water-filling solution: each eligible link gets a
clamped affine function of a common water level. The level is found by
bisection, the real solution is floored, and leftover bits are handed out
greedily by marginal objective decrease (optimal for this separable convex
objective), followed by a single-bit exchange pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoEligibleLinksError
from .topology import GAIN_FLOOR_DEFAULT

__all__ = [
    "LinkQuantStats",
    "BitAllocation",
    "allocate_bits",
    "water_fill_real",
    "allocation_objective",
    "rinr_upper_bound",
    "scaling_bits",
    "equal_allocation",
]


@dataclass(frozen=True)
class LinkQuantStats:
    """Per-link inputs to the allocator: (rx, tx) id, distortion
    coefficient, gain, and correlation effective ranks."""

    rx: int
    tx: int
    beta: float
    gain: float
    m_r: int
    m_t: int

    @property
    def link_id(self):
        return (self.rx, self.tx)

    @property
    def rank_product(self) -> int:
        return self.m_r * self.m_t

    def eligible(self, gain_floor: float = GAIN_FLOOR_DEFAULT) -> bool:
        return self.gain > gain_floor and self.rank_product >= 2


@dataclass(frozen=True)
class BitAllocation:
    bits: dict  # link id -> nonnegative int
    budget: int
    water_level: float

    def __post_init__(self):
        total = sum(self.bits.values())
        if total != self.budget:
            raise ValueError(f"allocation sums to {total}, budget is {self.budget}")
        if any(b < 0 for b in self.bits.values()):
            raise ValueError("negative bit count")


def _link_cost(stats: LinkQuantStats, bits: float) -> float:
    """Residual-interference envelope of one link (common P*d factor
    dropped; it does not affect the argmin)."""
    t = stats.rank_product
    if t < 2 or stats.gain <= 0:
        return 0.0
    return stats.beta * stats.gain / (t - 1) * 2.0 ** (-bits / (t - 1))


def allocation_objective(stats: list, bits: dict) -> float:
    """Sum of per-link envelopes for a candidate integer allocation."""
    return sum(_link_cost(s, bits.get(s.link_id, 0)) for s in stats)


def _real_bits(stats: LinkQuantStats, level: float) -> float:
    t = stats.rank_product
    arg = stats.beta * stats.gain / (t - 1) ** 2
    return max(0.0, (t - 1) * (math.log2(arg) + level))


def water_fill_real(
    eligible: list, budget: float, tol: float = 1e-12
) -> tuple:
    """Bisection on the water level; returns (per-link real bits, level)."""
    if budget <= 0:
        return {s.link_id: 0.0 for s in eligible}, -math.inf
    lo, hi = -200.0, 200.0
    # Widen if the budget is enormous relative to the default bracket.
    while sum(_real_bits(s, hi) for s in eligible) < budget:
        hi *= 2
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if sum(_real_bits(s, mid) for s in eligible) < budget:
            lo = mid
        else:
            hi = mid
    level = 0.5 * (lo + hi)
    return {s.link_id: _real_bits(s, level) for s in eligible}, level


def allocate_bits(
    stats: list,
    budget: int,
    gain_floor: float = GAIN_FLOOR_DEFAULT,
) -> BitAllocation:
    """Integer allocation of ``budget`` bits over the given links.

    Disconnected and rank-one links always receive zero bits. The rounded
    solution is locally optimal under all single-bit moves.
    """
    if budget < 0:
        raise ValueError("budget must be nonnegative")
    eligible = [s for s in stats if s.eligible(gain_floor)]
    if not eligible:
        raise NoEligibleLinksError("no link can use feedback bits")
    bits = {s.link_id: 0 for s in stats}
    if budget == 0:
        return BitAllocation(bits=bits, budget=0, water_level=-math.inf)

    real, level = water_fill_real(eligible, float(budget))
    for s in eligible:
        bits[s.link_id] = int(math.floor(real[s.link_id]))
    by_id = {s.link_id: s for s in eligible}

    def marginal_gain(link_id, b):
        # Objective decrease from granting bit b+1 to this link.
        s = by_id[link_id]
        return _link_cost(s, b) - _link_cost(s, b + 1)

    remaining = budget - sum(bits.values())
    for _ in range(remaining):
        best = max(eligible, key=lambda s: marginal_gain(s.link_id, bits[s.link_id]))
        bits[best.link_id] += 1

    # Single-bit exchange pass: move a bit wherever it strictly helps.
    improved = True
    while improved:
        improved = False
        for a in eligible:
            if bits[a.link_id] == 0:
                continue
            loss = marginal_gain(a.link_id, bits[a.link_id] - 1)
            for b in eligible:
                if b.link_id == a.link_id:
                    continue
                gain = marginal_gain(b.link_id, bits[b.link_id])
                if gain > loss * (1 + 1e-12) and gain > loss + 1e-15:
                    bits[a.link_id] -= 1
                    bits[b.link_id] += 1
                    improved = True
                    break
            if improved:
                break
    return BitAllocation(bits=bits, budget=budget, water_level=level)


def rinr_upper_bound(
    alloc: BitAllocation,
    stats: list,
    p: float,
    d: int,
    rx: int,
    gain_floor: float = GAIN_FLOOR_DEFAULT,
) -> float:
    """High-resolution envelope of the mean residual interference at one
    receiver: P*d * sum over its cross links of the per-link envelope."""
    total = 0.0
    for s in stats:
        if s.rx != rx or not s.eligible(gain_floor):
            continue
        t = s.rank_product
        total += (s.beta * s.gain / (t - 1)) * 2.0 ** (-alloc.bits.get(s.link_id, 0) / (t - 1))
    return p * d * total


def scaling_bits(
    p: float,
    stats: list,
    c_b: float = 0.0,
    gain_floor: float = GAIN_FLOOR_DEFAULT,
) -> int:
    """Total budget that preserves the throughput slope at SNR ``p``.

    Each connected link contributes (Mr*Mt - 1) * log2(p) bits.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    coeff = sum(s.rank_product - 1 for s in stats if s.gain > gain_floor)
    return int(math.ceil(coeff * math.log2(p) + c_b))


def equal_allocation(budget: int, link_ids: list) -> BitAllocation:
    """Uniform split; the remainder goes to the lowest link ids."""
    if budget < 0:
        raise ValueError("budget must be nonnegative")
    n = len(link_ids)
    if n == 0:
        raise NoEligibleLinksError("no links to allocate to")
    base, rem = divmod(budget, n)
    ordered = sorted(link_ids)
    bits = {lid: base + (1 if k < rem else 0) for k, lid in enumerate(ordered)}
    return BitAllocation(bits=bits, budget=budget, water_level=math.nan)
