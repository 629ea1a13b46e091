"""Weight sequences in log domain, single-sequence conditions and growth relations.

A weight sequence ``M = (M_0, ..., M_N)`` is stored as ``logM``; ``m_k = M_k/k!``
and ``mu_k = M_k/M_{k-1}`` (with ``mu_0 = 1``) are derived on demand.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import gammaln

from .errors import MismatchedTruncation, SchemaError, TruncationError, WeightlabError
from .verdict import (TOL_TREND, Trend, Verdict, bounded_trend, combine, diverges_trend,
                      last_window_mean, tail_max, tail_windows)

MIN_N = 8
DEFAULT_N = 64


def log_factorial(n) -> np.ndarray:
    """``log k!`` for ``k = 0..n``."""
    return gammaln(np.arange(n + 1, dtype=np.float64) + 1.0)


@dataclass(frozen=True, eq=False)
class LogSeq:
    logM: np.ndarray
    label: str = ""

    def __post_init__(self):
        arr = np.array(self.logM, dtype=np.float64)
        if arr.ndim != 1:
            raise WeightlabError("log values must be one-dimensional")
        if len(arr) - 1 < MIN_N:
            raise TruncationError(f"truncation N={len(arr) - 1} is below the minimum {MIN_N}")
        if not np.all(np.isfinite(arr)):
            bad = int(np.flatnonzero(~np.isfinite(arr))[0])
            raise WeightlabError(f"non-finite log value at index {bad}")
        arr.setflags(write=False)
        object.__setattr__(self, "logM", arr)

    @property
    def N(self) -> int:
        return len(self.logM) - 1

    def __len__(self):
        return len(self.logM)

    def __eq__(self, other):
        if not isinstance(other, LogSeq):
            return NotImplemented
        return self.label == other.label and np.array_equal(self.logM, other.logM)

    def __hash__(self):
        return hash((self.label, self.logM.tobytes()))

    def __repr__(self):
        return f"LogSeq({self.label!r}, N={self.N})"

    def truncate(self, n: int) -> "LogSeq":
        return LogSeq(self.logM[:n + 1], self.label)

    def shifted(self, log_c: float, label: str | None = None) -> "LogSeq":
        """Geometric rescale ``(c^k M_k)_k``."""
        k = np.arange(self.N + 1)
        return LogSeq(self.logM + k * log_c, label if label is not None else self.label)

    @property
    def m(self) -> "LogSeq":
        return derive(self)[0]

    @property
    def mu(self) -> "LogSeq":
        return derive(self)[1]

    def to_dict(self) -> dict:
        return {"label": self.label, "log_values": [float(v) for v in self.logM]}

    @classmethod
    def from_dict(cls, d) -> "LogSeq":
        if not isinstance(d, dict) or "log_values" not in d:
            raise SchemaError("sequence JSON needs a 'log_values' array")
        vals = d["log_values"]
        if not isinstance(vals, list) or not all(isinstance(v, (int, float)) for v in vals):
            raise SchemaError("'log_values' must be a list of numbers")
        return cls(np.asarray(vals, dtype=np.float64), str(d.get("label", "")))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "LogSeq":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from None


def _require_same_n(a: LogSeq, b: LogSeq):
    if a.N != b.N:
        raise MismatchedTruncation(f"truncations differ: {a.N} vs {b.N}")


def derive(seq: LogSeq) -> tuple[LogSeq, LogSeq]:
    """Return ``(m, mu)`` with ``m_k = M_k/k!`` and ``mu_k = M_k/M_{k-1}``."""
    logm = seq.logM - log_factorial(seq.N)
    logmu = np.empty_like(seq.logM)
    logmu[0] = 0.0
    logmu[1:] = np.diff(seq.logM)
    return LogSeq(logm, f"m({seq.label})"), LogSeq(logmu, f"mu({seq.label})")


def from_m(logm, label: str = "") -> LogSeq:
    """Build ``M`` from its ``m``-view, ``M_k = k! m_k``."""
    logm = np.asarray(logm, dtype=np.float64)
    return LogSeq(logm + log_factorial(len(logm) - 1), label)


# ---------------------------------------------------------------- conditions

def check_lc(seq: LogSeq, on: str = "M") -> Verdict:
    """Log-convexity of ``M`` (``on="M"``) or strong log-convexity (``on="m"``).

    Exact at truncation; the trend just mirrors the finite answer.
    """
    if on not in ("M", "m"):
        raise WeightlabError(f"on must be 'M' or 'm', got {on!r}")
    x = seq.logM if on == "M" else derive(seq)[0].logM
    if len(x) < 3:
        raise TruncationError("log-convexity needs N >= 2")
    excess = 2 * x[1:-1] - x[:-2] - x[2:]
    # absolute slack for round-off in sums of large log values
    slack = 1e-12 * np.maximum(1.0, np.abs(x[1:-1]))
    bad = np.flatnonzero(excess > slack)
    worst = float(excess.max())
    if len(bad):
        j = int(bad[0]) + 1
        return Verdict(False, Trend.FAILS, worst, (j,), note=f"{on}-sequence not log-convex")
    return Verdict(True, Trend.HOLDS, worst)


def mg_profile(seq: LogSeq) -> tuple[np.ndarray, np.ndarray]:
    """Per-index moderate-growth constants.

    ``c[n] = max_{j+k=n} (logM[n] - logM[j] - logM[k]) / n`` with the smallest
    maximizing ``j``; ``c[0]`` is ``-inf``.
    """
    x = seq.logM
    n_max = seq.N
    c = np.full(n_max + 1, -np.inf)
    arg = np.zeros(n_max + 1, dtype=np.int64)
    for n in range(1, n_max + 1):
        j = np.arange(0, n // 2 + 1)
        vals = x[n] - x[j] - x[n - j]
        i = int(np.argmax(vals))
        c[n] = vals[i] / n
        arg[n] = j[i]
    return c, arg


def check_mg(seq: LogSeq, tol: float = TOL_TREND) -> Verdict:
    c, arg = mg_profile(seq)
    n = int(np.argmax(c[1:])) + 1
    j = int(arg[n])
    return Verdict(True, bounded_trend(c, tol), c[n], (j, n - j))


def check_dc(seq: LogSeq, tol: float = TOL_TREND) -> Verdict:
    x = seq.logM
    c = np.full(seq.N + 1, -np.inf)
    j = np.arange(seq.N)
    # c[j+1] = (logM[j+1] - logM[j]) / (j+1)
    c[1:] = (x[1:] - x[:-1]) / (j + 1)
    i = int(np.argmax(c[1:])) + 1
    return Verdict(True, bounded_trend(c, tol), c[i], (i - 1,))


def root_profile(seq: LogSeq) -> np.ndarray:
    """``logM[k]/k`` for ``k >= 1`` (``-inf`` at 0)."""
    r = np.full(seq.N + 1, -np.inf)
    r[1:] = seq.logM[1:] / np.arange(1, seq.N + 1)
    return r


def check_lcset(seq: LogSeq, tol: float = TOL_TREND) -> Verdict:
    """Normalized, log-convex and ``M_k^{1/k} -> inf``."""
    x = seq.logM
    if abs(x[0]) > 1e-12 or x[1] < -1e-12:
        return Verdict(False, Trend.FAILS, None, (0 if abs(x[0]) > 1e-12 else 1,),
                       note="not normalized")
    lc = check_lc(seq, "M")
    if not lc.at_truncation:
        return Verdict(False, Trend.FAILS, None, lc.witness, note="not log-convex")
    roots = root_profile(seq)
    growth = diverges_trend(roots, tol)
    lo = max(seq.N // 2, 1)
    steps = np.diff(roots[lo:])
    flat = np.flatnonzero(steps <= 0)
    if len(flat):
        k = int(flat[0]) + lo + 1
        return Verdict(False, growth if growth is not Trend.HOLDS else Trend.INCONCLUSIVE,
                       None, (k,), note="M_k^(1/k) not strictly increasing on the tail")
    return Verdict(True, growth, None, note="" if growth is Trend.HOLDS else "root not divergent")


# ------------------------------------------------------------------ relations

class RelationKind(str, Enum):
    PRECEQ = "preceq"
    TRIANGLE = "triangle"
    APPROX = "approx"
    NONE = "none"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class RelationResult:
    kind: RelationKind
    sup_ratio_root: float
    limit_estimate: float
    forward: Trend = Trend.INCONCLUSIVE
    backward: Trend = Trend.INCONCLUSIVE

    def __post_init__(self):
        object.__setattr__(self, "kind", RelationKind(self.kind))
        object.__setattr__(self, "forward", Trend(self.forward))
        object.__setattr__(self, "backward", Trend(self.backward))

    @property
    def preceq(self) -> bool:
        """``A ⪯ B`` in the verdict sense (also true for triangle and approx)."""
        return self.kind is not RelationKind.NONE

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "sup_ratio_root": self.sup_ratio_root,
                "limit_estimate": self.limit_estimate, "forward": self.forward.value,
                "backward": self.backward.value}

    @classmethod
    def from_dict(cls, d) -> "RelationResult":
        return cls(d["kind"], d["sup_ratio_root"], d["limit_estimate"],
                   d.get("forward", "inconclusive"), d.get("backward", "inconclusive"))


def ratio_root(a: LogSeq, b: LogSeq) -> np.ndarray:
    """``d_p = (logA_p - logB_p)/p``, with ``d_0 = nan``."""
    _require_same_n(a, b)
    d = np.full(a.N + 1, np.nan)
    d[1:] = (a.logM[1:] - b.logM[1:]) / np.arange(1, a.N + 1)
    return d


def relate(a: LogSeq, b: LogSeq, tol: float = TOL_TREND) -> RelationResult:
    d = ratio_root(a, b)
    forward = bounded_trend(d, tol)
    backward = bounded_trend(-d, tol)
    _, w2 = tail_windows(a.N)
    decays = diverges_trend(-d, tol) is Trend.HOLDS and np.nanmax(d[w2]) < -tol
    if decays:
        kind = RelationKind.TRIANGLE
    elif forward is Trend.HOLDS and backward is Trend.HOLDS:
        kind = RelationKind.APPROX
    elif forward is Trend.HOLDS:
        kind = RelationKind.PRECEQ
    else:
        kind = RelationKind.NONE
    return RelationResult(kind, tail_max(d), last_window_mean(d), forward, backward)


def seminorm_ratio(b: LogSeq, M: LogSeq, h: float) -> float:
    """``log sup_k b_k / (h^k M_k)``."""
    if not h > 0:
        raise WeightlabError(f"h must be positive, got {h}")
    _require_same_n(b, M)
    k = np.arange(M.N + 1)
    return float(np.max(b.logM - k * np.log(h) - M.logM))


def classify_membership(b: LogSeq, M: LogSeq, tol: float = TOL_TREND):
    """Roumieu/Beurling membership of a derivative-bound sequence ``b``.

    Returns ``(roumieu, beurling, h_star)``.  ``h_star`` is the tail estimate of
    the smallest admissible ``h``.  A verdict fails at truncation exactly when
    its trend fails; the witness is then the tail index of the largest ratio root.
    """
    d = ratio_root(b, M)
    n = M.N
    k_star = n // 2 + int(np.nanargmax(d[n // 2:]))
    h_star = float(np.exp(tail_max(d)))

    r_trend = bounded_trend(d, tol)
    rel = relate(b, M, tol)
    if rel.kind is RelationKind.TRIANGLE:
        b_trend = Trend.HOLDS
    elif diverges_trend(-d, tol) is Trend.FAILS:
        b_trend = Trend.FAILS
    else:
        b_trend = Trend.INCONCLUSIVE

    def verdict(t):
        ok = t is not Trend.FAILS
        return Verdict(ok, t, tail_max(d), None if ok else (k_star,))

    return verdict(r_trend), verdict(b_trend), h_star


def implication_check(premise: Verdict, conclusion: Verdict) -> bool:
    """Verdict-level implication: a holding premise must not yield a failing conclusion."""
    return not (premise.trend is Trend.HOLDS and conclusion.trend is Trend.FAILS)


__all__ = [
    "LogSeq", "RelationKind", "RelationResult", "Verdict", "Trend", "derive", "from_m",
    "check_lc", "check_mg", "check_dc", "check_lcset", "relate", "ratio_root",
    "seminorm_ratio", "classify_membership", "log_factorial", "mg_profile", "combine",
]
