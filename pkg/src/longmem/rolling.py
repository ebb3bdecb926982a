"""Sliding-window Hurst estimation and crisis-date splitting."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date as Date

import numpy as np

from .estimators import (
    METHOD_DFA,
    METHOD_RS,
    BlockLadder,
    HurstEstimate,
    hurst_dfa,
    hurst_rs,
)
from .series import ReturnSeries

__all__ = [
    "RollingProtocol",
    "WindowEstimate",
    "RollingResult",
    "window_count",
    "window_offsets",
    "rolling_hurst",
    "split_at",
]

WINDOW_COUNT_RULE = "floor((N - window) / step) + 1"


@dataclass(frozen=True)
class RollingProtocol:
    """Fixed-length windows advanced by a fixed step, one estimate per window."""

    window: int = 500
    step: int = 7
    estimator: str = METHOD_DFA
    ladder: BlockLadder = field(default_factory=BlockLadder.default)
    detrend_order: int = 1

    def __post_init__(self) -> None:
        if self.estimator not in (METHOD_DFA, METHOD_RS):
            raise ValueError(f"unknown estimator {self.estimator!r}")
        if self.step < 1:
            raise ValueError("step must be >= 1")
        if self.window < 2 * self.ladder.max_size:
            raise ValueError(
                f"window {self.window} must be at least twice the largest "
                f"ladder size ({self.ladder.max_size})"
            )
        if self.detrend_order < 1:
            raise ValueError("detrend_order must be >= 1")

    def estimate(self, values: np.ndarray) -> HurstEstimate:
        if self.estimator == METHOD_DFA:
            return hurst_dfa(values, self.ladder, self.detrend_order)
        return hurst_rs(values, self.ladder)


@dataclass(frozen=True)
class WindowEstimate:
    start_date: Date
    end_date: Date
    estimate: HurstEstimate


@dataclass(frozen=True)
class RollingResult:
    id: str
    protocol: RollingProtocol
    estimates: tuple[WindowEstimate, ...]

    @property
    def h_values(self) -> np.ndarray:
        return np.array([w.estimate.h for w in self.estimates])


def window_count(n: int, window: int, step: int) -> int:
    """Number of complete windows: floor((n - window) / step) + 1."""
    if n < window:
        raise ValueError(f"series of length {n} is shorter than window {window}")
    return (n - window) // step + 1


def window_offsets(n: int, window: int, step: int) -> range:
    """Start offsets 0, step, 2*step, ... of every complete window."""
    if n < window:
        raise ValueError(f"series of length {n} is shorter than window {window}")
    return range(0, n - window + 1, step)


def rolling_hurst(returns: ReturnSeries, protocol: RollingProtocol) -> RollingResult:
    """One Hurst estimate per window, dated by the window's first and last return."""
    values = returns.values
    estimates = []
    for off in window_offsets(values.size, protocol.window, protocol.step):
        est = protocol.estimate(values[off : off + protocol.window])
        estimates.append(
            WindowEstimate(
                returns.dates[off],
                returns.dates[off + protocol.window - 1],
                est,
            )
        )
    return RollingResult(returns.id, protocol, tuple(estimates))


def split_at(
    result: RollingResult, split_date: Date, by: str = "start"
) -> tuple[list[WindowEstimate], list[WindowEstimate]]:
    """Partition estimates around a date: window date < split_date goes before.

    ``by`` selects which window date classifies the estimate: "start" (a
    window belongs to the before group if it begins before the split, even
    when it spans it) or "end".
    """
    if by not in ("start", "end"):
        raise ValueError("split classification must be 'start' or 'end'")
    if not result.estimates:
        raise ValueError("cannot split an empty rolling result")
    before, after = [], []
    for w in result.estimates:
        key = w.start_date if by == "start" else w.end_date
        (before if key < split_date else after).append(w)
    return before, after
