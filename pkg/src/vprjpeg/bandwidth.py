"""Transmission feasibility of compressed corpora over a fixed-rate channel.

The channel is the simplest quantitative model that makes bandwidth limits
concrete: a constant byte rate with a multiplicative protocol-overhead
fraction. No loss or latency modeling. Budget selection treats the corpus as
one map transfer; per-frame feasibility comes out as achievable frames per
second.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .metrics import DegradationCurve


@dataclass(frozen=True)
class ChannelModel:
    rate_bytes_per_s: float
    overhead_fraction: float = 0.0

    def __post_init__(self) -> None:
        if self.rate_bytes_per_s <= 0:
            raise ValueError("channel rate must be positive")
        if not 0.0 <= self.overhead_fraction <= 1.0:
            raise ValueError("overhead fraction must be in [0, 1]")


@dataclass(frozen=True)
class TransmissionPlan:
    percent: int
    total_bytes: int
    transfer_seconds: float
    frames_per_second: float
    accuracy: float | None = None  # filled when a degradation curve is supplied


def transfer_time(byte_count: float, channel: ChannelModel) -> float:
    """Seconds to push byte_count through the channel, overhead included."""
    if byte_count < 0:
        raise ValueError("byte count must be non-negative")
    return byte_count * (1.0 + channel.overhead_fraction) / channel.rate_bytes_per_s


def min_compression_for_budget(
    totals: Mapping[int, float], budget_bytes: float
) -> int | None:
    """Smallest compression percent whose corpus total fits the budget.

    Least compression that fits; None when even the strongest level exceeds
    the budget.
    """
    if not totals:
        raise ValueError("empty size sweep")
    for percent in sorted(totals):
        if totals[percent] <= budget_bytes:
            return percent
    return None


def make_plan(
    percent: int,
    totals: Mapping[int, float],
    image_count: int,
    channel: ChannelModel,
    curve: DegradationCurve | None = None,
) -> TransmissionPlan:
    """Transfer time and frame rate for one level of a size sweep."""
    total = totals[percent]
    seconds = transfer_time(total, channel)
    per_frame = transfer_time(total / image_count, channel) if image_count > 0 else float("inf")
    acc = None
    if curve is not None:
        by_level = {p: res.accuracy for p, res in curve.points}
        acc = by_level.get(percent)
    return TransmissionPlan(
        percent=percent,
        total_bytes=int(total),
        transfer_seconds=seconds,
        frames_per_second=(1.0 / per_frame) if per_frame > 0 else float("inf"),
        accuracy=acc,
    )


@dataclass(frozen=True)
class ParetoPoint:
    percent: int
    total_bytes: float
    accuracy: float
    optimal: bool


def accuracy_bytes_pareto(
    curve: DegradationCurve, totals: Mapping[int, float]
) -> list[ParetoPoint]:
    """Flag levels not dominated by any level with strictly fewer bytes and
    strictly higher accuracy. Curve and sweep must cover identical level sets.
    """
    curve_levels = [p for p, _ in curve.points]
    if set(curve_levels) != set(totals):
        raise ValueError(
            f"level sets differ: curve {sorted(curve_levels)} vs sweep {sorted(totals)}"
        )
    acc = {p: res.accuracy for p, res in curve.points}
    # Scan in ascending byte order, tracking the best accuracy seen at a
    # strictly smaller size; ties in bytes cannot dominate each other.
    order = sorted(curve_levels, key=lambda p: (totals[p], p))
    dominated: dict[int, bool] = {}
    best_acc_smaller = float("-inf")
    i = 0
    while i < len(order):
        j = i
        while j < len(order) and totals[order[j]] == totals[order[i]]:
            j += 1
        for p in order[i:j]:
            dominated[p] = acc[p] < best_acc_smaller
        best_acc_smaller = max([best_acc_smaller] + [acc[p] for p in order[i:j]])
        i = j
    return [
        ParetoPoint(percent=p, total_bytes=float(totals[p]), accuracy=acc[p], optimal=not dominated[p])
        for p in curve_levels
    ]
