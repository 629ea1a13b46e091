"""Three-state verdicts and the two-window trend rule.

Finite data cannot decide "there is a constant C for all k".  Every asymptotic
predicate is therefore reduced to a statistic ``c`` indexed by ``k`` (or by a
grid position) and judged on two tail windows ``[n/2, 3n/4)`` and
``[3n/4, n]``:

* bounded (holds) when ``max(W2) - max(W1) <= tol``;
* unbounded (fails) when both ``max`` and ``min`` rise by more than ``tol``;
* inconclusive otherwise.
"""
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

TOL_TREND = 0.05


class Trend(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    INCONCLUSIVE = "inconclusive"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Verdict:
    """Outcome of one predicate at finite truncation.

    ``constant`` is log-domain (``log C`` / ``log D``) and is the smallest value
    certifying the inequality over the indices that were scanned.
    """

    at_truncation: bool
    trend: Trend
    constant: float | None = None
    witness: tuple | None = None
    note: str = ""
    context: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "trend", Trend(self.trend))
        if not self.at_truncation and self.witness is None:
            raise ValueError("a verdict failing at truncation needs a witness")
        if self.constant is not None:
            object.__setattr__(self, "constant", float(self.constant))
        if self.witness is not None:
            object.__setattr__(self, "witness", tuple(_plain(w) for w in self.witness))

    @property
    def holds(self) -> bool:
        return self.trend is Trend.HOLDS

    @property
    def fails(self) -> bool:
        return self.trend is Trend.FAILS

    def to_dict(self) -> dict:
        d = {
            "at_truncation": bool(self.at_truncation),
            "trend": self.trend.value,
            "constant": self.constant,
            "witness": list(self.witness) if self.witness is not None else None,
        }
        if self.note:
            d["note"] = self.note
        if self.context:
            d["context"] = self.context
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Verdict":
        w = d.get("witness")
        return cls(d["at_truncation"], Trend(d["trend"]), d.get("constant"),
                   tuple(w) if w is not None else None, d.get("note", ""),
                   d.get("context", {}))


def _plain(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (list, tuple)):
        return tuple(_plain(x) for x in v)
    return v


def tail_windows(n: int) -> tuple[slice, slice]:
    """Window slices over positions ``0..n`` (inclusive)."""
    if n < 7:
        raise ValueError(f"need at least 8 positions for the trend windows, got {n + 1}")
    lo, mid = n // 2, (3 * n) // 4
    return slice(lo, mid), slice(mid, n + 1)


def _window_stats(stat):
    stat = np.asarray(stat, dtype=np.float64)
    w1, w2 = tail_windows(len(stat) - 1)
    a, b = stat[w1], stat[w2]
    a, b = a[np.isfinite(a)], b[np.isfinite(b)]
    if len(a) == 0 or len(b) == 0:
        raise ValueError("trend windows contain no finite values")
    return a, b


def window_shift(stat) -> tuple[float, float]:
    """``(max(W2) - max(W1), min(W2) - min(W1))``."""
    a, b = _window_stats(stat)
    return float(b.max() - a.max()), float(b.min() - a.min())


def bounded_trend(stat, tol: float = TOL_TREND) -> Trend:
    """Is ``stat`` bounded above along the tail?"""
    dmax, dmin = window_shift(stat)
    if dmax <= tol:
        return Trend.HOLDS
    if dmin > tol:
        return Trend.FAILS
    return Trend.INCONCLUSIVE


def diverges_trend(stat, tol: float = TOL_TREND) -> Trend:
    """Does ``stat`` tend to ``+inf`` along the tail?"""
    b = bounded_trend(stat, tol)
    if b is Trend.FAILS:
        return Trend.HOLDS
    if b is Trend.HOLDS:
        return Trend.FAILS
    return Trend.INCONCLUSIVE


def tail_max(stat) -> float:
    stat = np.asarray(stat, dtype=np.float64)
    n = len(stat) - 1
    t = stat[n // 2:]
    return float(np.max(t[np.isfinite(t)]))


def last_window_mean(stat) -> float:
    _, b = _window_stats(stat)
    return float(b.mean())


def combine(verdicts) -> Trend:
    """Conjunction: fails dominates, then inconclusive."""
    trends = [v.trend if isinstance(v, Verdict) else Trend(v) for v in verdicts]
    if any(t is Trend.FAILS for t in trends):
        return Trend.FAILS
    if any(t is Trend.INCONCLUSIVE for t in trends):
        return Trend.INCONCLUSIVE
    return Trend.HOLDS
