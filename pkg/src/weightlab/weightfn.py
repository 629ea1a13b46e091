"""Weight functions, their growth conditions and the Legendre-Fenchel-Young conjugate.

A weight function is handled through ``phi(u) = omega(e^u)``, so every
evaluation happens in log coordinates and never overflows for large ``t``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import BracketOverflow, GridTooShort, SchemaError, WeightlabError
from .seqcore import LogSeq, log_factorial
from .verdict import (TOL_TREND, Trend, Verdict, bounded_trend, diverges_trend,
                      tail_max)

GRID_POINTS = 4096
T_MAX = 1e8
H_GRID = tuple(2.0 ** i for i in range(21))
LAMBDA_GRID = H_GRID
DEFAULT_L_GRID = tuple(2.0 ** i for i in range(-4, 7))

TOL_CONJ = 1e-9
BRACKET_LIMIT = 1e9
_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


# ------------------------------------------------------------- convex weights

@dataclass(frozen=True, eq=False)
class ConvexWeight:
    """Convex increasing ``phi`` on ``[0, inf)`` with ``phi(0) = 0``.

    ``phi`` must accept numpy arrays.  ``y_max`` bounds the default sample grid
    (the exponential weight needs a shorter one to stay below the bracket limit
    once conjugated twice).
    """

    phi: Callable[[np.ndarray], np.ndarray]
    label: str = ""
    y_max: float = 64.0

    def __post_init__(self):
        if float(self(0.0)) != 0.0:
            raise WeightlabError(f"{self.label}: phi(0) must be exactly 0")

    def __call__(self, y):
        return self.phi(np.asarray(y, dtype=np.float64))

    def grid(self, n: int = 256) -> np.ndarray:
        return np.linspace(self.y_max / n, self.y_max, n)

    def derivative(self, y):
        """Central difference with a scale-free step; one-sided at the origin."""
        y = np.asarray(y, dtype=np.float64)
        h = np.maximum(1e-6, 1e-6 * y)
        lo = np.maximum(y - h, 0.0)
        return (self(y + h) - self(lo)) / (y + h - lo)

    def check(self, tol: float = 1e-9) -> Verdict:
        """Midpoint convexity on the sample grid plus superlinear growth of ``phi(t)/t``."""
        y = self.grid()
        v = self(y)
        mid = self(0.5 * (y[:-1] + y[1:]))
        excess = mid - 0.5 * (v[:-1] + v[1:])
        bad = np.flatnonzero(excess > tol * np.maximum(1.0, np.abs(mid)))
        if len(bad):
            return Verdict(False, Trend.FAILS, float(excess.max()), (int(bad[0]),),
                           note="midpoint convexity violated")
        trend = diverges_trend(v / y)
        return Verdict(True, trend, None, note="" if trend is Trend.HOLDS else "phi(t)/t not divergent")


def _power(s):
    return ConvexWeight(lambda y: np.maximum(y, 0.0) ** s, f"power:{s:g}")


def _tlogt():
    def phi(y):
        y = np.maximum(y, 1.0)
        return y * np.log(y)
    return ConvexWeight(phi, "tlogt")


def _exp():
    return ConvexWeight(lambda y: np.expm1(y), "exp", y_max=16.0)


CONVEX = {"power": (_power, 2.0), "tlogt": (_tlogt, None), "exp": (_exp, None)}
DEFAULT_CONVEX_CATALOG = ("power:1.5", "power:2", "power:3", "tlogt", "exp")


def convex_weight(name: str) -> ConvexWeight:
    base, _, arg = name.partition(":")
    if base == "conj_log_power":
        return conjugate_of(weight_function(f"log_power:{arg or 2}").convex)
    if base not in CONVEX:
        raise SchemaError(f"unknown convex weight {base!r}; known: {', '.join(sorted(CONVEX))}, conj_log_power")
    make, default = CONVEX[base]
    if default is None:
        if arg:
            raise SchemaError(f"convex weight {base!r} takes no parameter")
        return make()
    return make(float(arg) if arg else default)


# ------------------------------------------------------------------ conjugate

def conjugate(cw: ConvexWeight, x):
    """``phi*(x) = sup { x y - phi(y) : y >= 0 }``, vectorized over ``x``.

    Bracket ``[0, b]`` by doubling ``b`` until the slope ``x - phi'(b)`` is
    negative, then golden-section search to ``TOL_CONJ`` in ``y``.
    """
    x = np.asarray(x, dtype=np.float64)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise WeightlabError("conjugate needs finite x >= 0")

    out = np.zeros_like(x)
    # slope at the origin: if phi grows at least as fast as x y from the start,
    # the sup sits at y = 0 and equals 0
    active = x - cw.derivative(np.zeros_like(x)) > 0
    if not np.any(active):
        return float(out[0]) if scalar else out
    xa = x[active]

    lo = np.zeros_like(xa)
    hi = np.ones_like(xa)
    rising = xa - cw.derivative(hi) >= 0
    while np.any(rising):
        if np.any(hi[rising] > BRACKET_LIMIT):
            raise BracketOverflow(
                f"{cw.label}: slope still positive at y > {BRACKET_LIMIT:g} (phi not superlinear?)")
        lo = np.where(rising, hi, lo)
        hi = np.where(rising, 2.0 * hi, hi)
        rising = xa - cw.derivative(hi) >= 0
    # slope is positive at lo and negative at hi, so the maximizer lies between
    a = lo.copy()
    b = hi.copy()

    def f(y):
        return xa * y - cw(y)

    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(200):
        width = b - a
        if np.all(width <= np.maximum(TOL_CONJ, 4 * np.finfo(float).eps * b)):
            break
        left = fc >= fd
        # keep [a, d] when f(c) >= f(d), else [c, b]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - _INVPHI * (b - a)
        new_d = a + _INVPHI * (b - a)
        c_next = np.where(left, new_c, d)
        d_next = np.where(left, c, new_d)
        fc_next = np.where(left, f(new_c), fd)
        fd_next = np.where(left, fc, f(new_d))
        c, d, fc, fd = c_next, d_next, fc_next, fd_next
    best = np.maximum.reduce([fc, fd, f(a), f(b), np.zeros_like(xa)])
    out[active] = best
    return float(out[0]) if scalar else out


def conjugate_of(cw: ConvexWeight, label: str | None = None) -> ConvexWeight:
    """``phi*`` as a convex weight, evaluated numerically on demand."""
    return ConvexWeight(lambda x: conjugate(cw, x), label or f"conj({cw.label})", cw.y_max)


def biconjugate(cw: ConvexWeight, y):
    return conjugate(conjugate_of(cw), y)


def conjugate_power_closed_form(s: float, x):
    """``x^{s/(s-1)} R(s)``, the conjugate of ``y^s``."""
    r = s ** (-1.0 / (s - 1.0)) - s ** (-s / (s - 1.0))
    return np.asarray(x, dtype=np.float64) ** (s / (s - 1.0)) * r


def R(s: float) -> float:
    return float(s ** (-1.0 / (s - 1.0)) - s ** (-s / (s - 1.0)))


def check_phi_mg(cw: ConvexWeight, t=None, tol: float = TOL_TREND) -> Verdict:
    """``Phi(2t) <= 2 Phi(t) + D t``; ``constant`` is the sup of ``(Phi(2t) - 2 Phi(t))/t``."""
    if t is None:
        t = np.geomspace(1e-2, 1e6, 512)
    t = np.asarray(t, dtype=np.float64)
    stat = (cw(2 * t) - 2 * cw(t)) / t
    i = int(np.argmax(stat))
    return Verdict(True, bounded_trend(stat, tol), float(stat[i]), (i,),
                   context={"t": float(t[i])})


# ------------------------------------------------------------ weight functions

@dataclass(frozen=True, eq=False)
class WeightFunction:
    """A weight ``omega`` represented by ``phi(u) = omega(e^u)`` (vectorized).

    ``form`` is one of ``log_power``, ``gevrey_weight``, ``linear``, ``log``,
    ``custom_table`` or ``phi_derived``.
    """

    phi: Callable[[np.ndarray], np.ndarray]
    form: str
    label: str = ""
    param: float | None = None
    note: str = ""
    t_max: float = T_MAX
    grid_points: int = GRID_POINTS

    def __post_init__(self):
        if self.t_max < 1e6:
            raise GridTooShort(f"t_max={self.t_max:g} is below 1e6")

    def phi_at(self, u):
        u = np.asarray(u, dtype=np.float64)
        return np.where(u > 0, self.phi(np.maximum(u, 0.0)), 0.0)

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        with np.errstate(divide="ignore"):
            return self.phi_at(np.log(np.maximum(t, 1e-300)))

    @property
    def grid(self) -> np.ndarray:
        return np.geomspace(1.0, self.t_max, self.grid_points)

    @property
    def log_grid(self) -> np.ndarray:
        return np.linspace(0.0, np.log(self.t_max), self.grid_points)

    @property
    def convex(self) -> ConvexWeight:
        """``phi_omega`` restricted to ``y >= 0``."""
        return ConvexWeight(self.phi_at, f"phi[{self.label}]")

    def check(self) -> Verdict:
        """The standing (omega_0) requirements, exact on the grid."""
        u = self.log_grid
        v = self.phi_at(u)
        if abs(float(self.phi_at(0.0))) > 1e-12:
            return Verdict(False, Trend.FAILS, None, (0,), note="omega(1) != 0")
        drops = np.flatnonzero(np.diff(v) < -1e-12 * np.maximum(1.0, np.abs(v[1:])))
        if len(drops):
            return Verdict(False, Trend.FAILS, None, (int(drops[0]) + 1,), note="omega decreases")
        if not v[-1] > v[0]:
            return Verdict(False, Trend.FAILS, None, (len(v) - 1,), note="omega does not grow")
        return Verdict(True, Trend.HOLDS, None)


def _log_power(s):
    return WeightFunction(lambda u: u ** s, "log_power", f"log_power:{s:g}", s)


def _gevrey_weight(s):
    # omega(t) = t^{1/s} - 1 on [1, inf): Gevrey-type, satisfies (omega_6) with H = 2^s
    return WeightFunction(lambda u: np.expm1(u / s), "gevrey_weight", f"gevrey_weight:{s:g}", s)


def _linear():
    return WeightFunction(np.expm1, "linear", "linear")


def _log():
    return WeightFunction(lambda u: u, "log", "log")


WEIGHTS = {
    "log_power": (_log_power, 2.0),
    "gevrey_weight": (_gevrey_weight, 2.0),
    "linear": (_linear, None),
    "log": (_log, None),
}
DEFAULT_WEIGHT_CATALOG = ("log_power:1.5", "log_power:2", "log_power:3", "gevrey_weight:2")


def weight_function(name: str) -> WeightFunction:
    base, _, arg = name.partition(":")
    if base not in WEIGHTS:
        raise SchemaError(f"unknown weight function {base!r}; known: {', '.join(sorted(WEIGHTS))}")
    make, default = WEIGHTS[base]
    if default is None:
        if arg:
            raise SchemaError(f"weight function {base!r} takes no parameter")
        return make()
    try:
        s = float(arg) if arg else default
    except ValueError:
        raise SchemaError(f"bad parameter in {name!r}") from None
    if base == "log_power" and s <= 1:
        raise WeightlabError("log_power needs s > 1")
    return make(s)


def from_phi(cw: ConvexWeight, label: str | None = None) -> WeightFunction:
    """The weight with ``phi_omega = cw`` on ``[0, inf)``."""
    return WeightFunction(cw, "phi_derived", label or f"phi_derived[{cw.label}]")


def from_table(t, omega, label: str = "custom_table") -> WeightFunction:
    """Piecewise-linear weight in ``(log t, omega)`` with linear extrapolation.

    Points below ``t = 1`` are dropped; if ``omega(1) != 0`` the table is shifted
    by ``-omega(1)`` and the shift recorded in ``note``.
    """
    t = np.asarray(t, dtype=np.float64)
    w = np.asarray(omega, dtype=np.float64)
    if t.ndim != 1 or t.shape != w.shape or len(t) < 2:
        raise SchemaError("table needs matching t and omega columns with at least two rows")
    if not np.all(np.isfinite(t)) or not np.all(np.isfinite(w)) or np.any(t <= 0):
        raise SchemaError("table entries must be finite with t > 0")
    order = np.argsort(t)
    t, w = t[order], w[order]
    if np.any(np.diff(t) == 0):
        raise SchemaError("duplicate t values in table")
    u = np.log(t)
    w1 = float(np.interp(0.0, u, w)) if u[0] <= 0 else float(w[0] + (w[1] - w[0]) * (0 - u[0]) / (u[1] - u[0]))
    keep = u > 0
    u = np.concatenate([[0.0], u[keep]])
    w = np.concatenate([[w1], w[keep]])
    if len(u) < 2:
        raise SchemaError("table has no points with t > 1")
    note = ""
    if w1 != 0.0:
        w = w - w1
        note = f"shifted by {-w1:g} so that omega(1) = 0"
    slope = (w[-1] - w[-2]) / (u[-1] - u[-2])

    def phi(uu):
        uu = np.asarray(uu, dtype=np.float64)
        inner = np.interp(uu, u, w)
        return np.where(uu > u[-1], w[-1] + slope * (uu - u[-1]), inner)

    return WeightFunction(phi, "custom_table", label, None, note)


def load_table(path, label: str | None = None) -> WeightFunction:
    """Read a ``t,omega`` CSV (header optional)."""
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.reader(fh):
            if not rec or rec[0].strip().startswith("#"):
                continue
            try:
                rows.append((float(rec[0]), float(rec[1])))
            except (ValueError, IndexError):
                if rows:
                    raise SchemaError(f"bad table row: {rec!r}") from None
                continue  # header
    if not rows:
        raise SchemaError(f"{path}: no numeric rows")
    arr = np.array(rows)
    return from_table(arr[:, 0], arr[:, 1], label or str(path))


def resolve_weight(name_or_path: str) -> WeightFunction:
    if name_or_path.lower().endswith(".csv"):
        return load_table(name_or_path)
    return weight_function(name_or_path)


# ----------------------------------------------------------------- conditions

def _positive_tail(w: WeightFunction):
    u = w.log_grid
    v = w.phi_at(u)
    keep = v > 0
    if keep.sum() < 16:
        raise GridTooShort(f"{w.label}: fewer than 16 grid points with omega > 0")
    return u[keep], v[keep]


def _asymptotic(stat, kind: str, tol: float) -> Verdict:
    if kind == "bounded":
        trend = bounded_trend(stat, tol)
    elif kind == "diverges":
        trend = diverges_trend(stat, tol)
    else:  # to -inf
        trend = diverges_trend(-stat, tol)
    return Verdict(True, trend, tail_max(stat))


def doubling_shift(w: WeightFunction, u) -> np.ndarray:
    """``l(u)`` with ``phi(u + l) = 2 phi(u)``: ``e^l`` is the factor doubling omega at ``t = e^u``.

    Solved by bisection; entries with ``phi(u) = 0`` get ``l = 0``.
    """
    u = np.asarray(u, dtype=np.float64)
    target = 2 * w.phi_at(u)
    lo = np.zeros_like(u)
    hi = np.ones_like(u)
    short = w.phi_at(u + hi) < target
    while np.any(short):
        if np.any(hi > 1e4):
            raise GridTooShort(f"{w.label}: omega does not double within a factor e^1e4")
        lo = np.where(short, hi, lo)
        hi = np.where(short, 2 * hi, hi)
        short = w.phi_at(u + hi) < target
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        below = w.phi_at(u + mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return hi


def _omega6(w: WeightFunction, tol: float) -> Verdict:
    """``2 omega(t) <= omega(Ht) + H`` for some ``H`` in the grid.

    The asymptotic part is judged on the doubling shift ``l(t)``: the condition
    needs ``log H >= limsup l``.  ``H`` is the least grid value that satisfies the
    inequality on the whole sample grid and dominates the tail of ``l``.
    """
    u = w.log_grid
    v = w.phi_at(u)
    up, _ = _positive_tail(w)
    shift = doubling_shift(w, up)
    trend = bounded_trend(shift, tol)
    need = tail_max(shift)
    at_trunc = None
    for H in H_GRID:
        if np.all(2 * v - w.phi_at(u + np.log(H)) <= H):
            at_trunc = H
            break
    ctx = {"doubling_shift_tail_max": need}
    if at_trunc is None:
        H = H_GRID[-1]
        c = 2 * v - w.phi_at(u + np.log(H)) - H
        i = int(np.argmax(c))
        return Verdict(False, Trend.FAILS if trend is Trend.HOLDS else trend, None, (i,),
                       note=f"violated at t={np.exp(u[i]):.6g} for every H in the grid", context=ctx)
    if trend is Trend.HOLDS:
        for H in H_GRID:
            if H >= at_trunc and np.log(H) >= need - tol:
                ctx["H"] = H
                return Verdict(True, Trend.HOLDS, np.log(H), context=ctx)
        trend = Trend.INCONCLUSIVE
    ctx["H"] = at_trunc
    return Verdict(True, trend, np.log(at_trunc), context=ctx,
                   note="inequality holds on the grid but the doubling shift grows")


def _omega1_prime(w: WeightFunction, tol: float) -> Verdict:
    u, v = _positive_tail(w)
    logv = np.log(v)
    stat = np.full_like(u, -np.inf)
    for lam in LAMBDA_GRID:
        stat = np.maximum(stat, np.log(w.phi_at(u + np.log(lam))) - np.log(lam) - logv)
    return _asymptotic(stat, "bounded", tol)


def check_omega_conditions(w: WeightFunction, tol: float = TOL_TREND) -> dict:
    """Verdicts for omega0..omega6 and omega1' on the log-spaced grid over ``[1, t_max]``."""
    out = {"omega0": w.check()}
    u, v = _positive_tail(w)
    logv = np.log(v)
    with np.errstate(divide="ignore"):
        out["omega1"] = _asymptotic(np.log(w.phi_at(u + np.log(2.0))) - logv, "bounded", tol)
        out["omega2"] = _asymptotic(logv - u, "bounded", tol)
        pos = u > 0
        out["omega3"] = _asymptotic(logv[pos] - np.log(u[pos]), "diverges", tol)

    uu = w.log_grid
    phi = w.phi_at(uu)
    second = phi[:-2] - 2 * phi[1:-1] + phi[2:]
    bad = np.flatnonzero(second < -1e-9 * np.maximum(1.0, np.abs(phi[1:-1])))
    if len(bad):
        out["omega4"] = Verdict(False, Trend.FAILS, float(second.min()), (int(bad[0]) + 1,),
                                note="phi_omega not convex")
    else:
        out["omega4"] = Verdict(True, Trend.HOLDS, float(second.min()))
    out["omega5"] = _asymptotic(logv - u, "to_minus_inf", tol)
    out["omega6"] = _omega6(w, tol)
    out["omega1'"] = _omega1_prime(w, tol)
    return out


# ------------------------------------------------------------ matrix builders

def associated_rows(w: WeightFunction, l_grid, N: int) -> list[LogSeq]:
    """Rows ``log Omega^l_j = phi*(l j) / l``."""
    cw = w.convex
    j = np.arange(N + 1, dtype=np.float64)
    rows = []
    for l in l_grid:
        rows.append(LogSeq(conjugate(cw, l * j) / l, f"Omega^{l:g}[{w.label}]"))
    return rows


def phi_rows(cw: ConvexWeight, a_grid, N: int) -> list[LogSeq]:
    """Rows ``log M_p = log p! + Phi(a p)``."""
    p = np.arange(N + 1, dtype=np.float64)
    lf = log_factorial(N)
    return [LogSeq(lf + cw(a * p), f"M^Phi_{a:g}[{cw.label}]") for a in a_grid]


def associated_matrix(w: WeightFunction, l_grid=DEFAULT_L_GRID, N: int = 64):
    from .matrix import WeightMatrix
    return WeightMatrix(list(l_grid), associated_rows(w, l_grid, N), label=f"Omega[{w.label}]")


def phi_matrix(cw: ConvexWeight, a_grid=DEFAULT_L_GRID, N: int = 64):
    from .matrix import WeightMatrix
    return WeightMatrix(list(a_grid), phi_rows(cw, a_grid, N), label=f"M^Phi[{cw.label}]")
