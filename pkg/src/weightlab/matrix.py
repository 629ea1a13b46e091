"""Weight matrices on a finite parameter grid, their conditions and relations.

Quantifiers over the parameter set are realized on the sampled grid.  A
universally quantified index ranges over a *universe* (by default the grid
without its last row for Roumieu-type and without its first row for
Beurling-type conditions, since the edge row has no partner beyond the grid).
Existential indices are searched over the whole grid, starting on the
favourable side of the universal index in order of increasing distance.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernels
from .errors import InvariantViolation, SchemaError, WeightlabError
from .fdb import compose_max
from .seqcore import LogSeq, RelationKind, check_lcset, derive, log_factorial, relate
from .verdict import TOL_TREND, Trend, Verdict, bounded_trend, combine, diverges_trend, tail_max

C_GRID = tuple(2.0 ** i for i in range(11))
DEFAULT_GRID = tuple(2.0 ** i for i in range(-4, 7))
CONDITIONS = ("dc", "mg", "alg", "L", "strict", "FdB", "rai")
FLAVORS = ("roumieu", "beurling")
_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    """Rows ``M^x`` for ``x`` in an increasing grid, all with the same truncation."""

    lambdas: tuple
    rows: tuple
    label: str = ""
    validate: bool = True

    def __post_init__(self):
        lam = tuple(float(x) for x in self.lambdas)
        rows = tuple(self.rows)
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "rows", rows)
        if len(lam) == 0 or len(lam) != len(rows):
            raise WeightlabError("matrix needs one row per grid value and at least one row")
        if any(not x > 0 for x in lam):
            raise WeightlabError("grid values must be positive")
        if any(b <= a for a, b in zip(lam, lam[1:])):
            raise WeightlabError("grid must be strictly increasing")
        if len({r.N for r in rows}) != 1:
            raise WeightlabError("rows have different truncations")
        if self.validate:
            self.check_structure()

    def check_structure(self):
        """Raise ``InvariantViolation`` at the first ``(x, k)`` breaking normalization or monotonicity."""
        for x, r in zip(self.lambdas, self.rows):
            v = r.logM
            if abs(v[0]) > _EPS:
                raise InvariantViolation(f"row {x:g} not normalized: log M_0 = {v[0]:g}", (x, 0))
            if v[1] < -_EPS:
                raise InvariantViolation(f"row {x:g} not normalized: M_1 < 1", (x, 1))
            drop = np.flatnonzero(np.diff(v) < -_EPS * np.maximum(1.0, np.abs(v[1:])))
            if len(drop):
                k = int(drop[0]) + 1
                raise InvariantViolation(f"row {x:g} decreases at k={k}", (x, k))
        for (x, a), (y, b) in zip(zip(self.lambdas, self.rows), zip(self.lambdas[1:], self.rows[1:])):
            bad = np.flatnonzero(b.logM < a.logM - _EPS * np.maximum(1.0, np.abs(a.logM)))
            if len(bad):
                k = int(bad[0])
                raise InvariantViolation(f"rows not increasing in the parameter: M^{y:g}_{k} < M^{x:g}_{k}", (y, k))

    @property
    def N(self) -> int:
        return self.rows[0].N

    def __len__(self):
        return len(self.rows)

    def row(self, x: float) -> LogSeq:
        return self.rows[self.index(x)]

    def index(self, x: float) -> int:
        for i, lam in enumerate(self.lambdas):
            if np.isclose(lam, x, rtol=1e-12, atol=0):
                return i
        raise WeightlabError(f"{x:g} is not in the grid of {self.label or 'matrix'}")

    @cached_property
    def m_rows(self) -> tuple:
        return tuple(derive(r)[0] for r in self.rows)

    @cached_property
    def circ_rows(self) -> tuple:
        return tuple(compose_max(m).circ for m in self.m_rows)

    def to_dict(self) -> dict:
        return {"label": self.label, "lambda": list(self.lambdas), "rows": [r.to_dict() for r in self.rows]}

    @classmethod
    def from_dict(cls, d, validate: bool = True) -> "WeightMatrix":
        if not isinstance(d, dict) or "lambda" not in d or "rows" not in d:
            raise SchemaError("matrix JSON needs 'lambda' and 'rows'")
        if not isinstance(d["lambda"], list) or not isinstance(d["rows"], list):
            raise SchemaError("'lambda' and 'rows' must be arrays")
        rows = [LogSeq.from_dict(r) for r in d["rows"]]
        return cls(d["lambda"], rows, str(d.get("label", "")), validate)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "WeightMatrix":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from None


# --------------------------------------------------------------- constructors

def make_gevrey(s_grid=(1.0, 2.0, 3.0), N: int = 64) -> WeightMatrix:
    """Rows ``p!^(s+1)``."""
    lf = log_factorial(N)
    return WeightMatrix(list(s_grid), [LogSeq((s + 1) * lf, f"gevrey:{s:g}") for s in s_grid], "gevrey")


def make_constant(M: LogSeq, x: float = 1.0) -> WeightMatrix:
    return WeightMatrix([x], [M], f"constant[{M.label}]")


def make_omega(w, l_grid=DEFAULT_GRID, N: int = 64) -> WeightMatrix:
    from .weightfn import associated_matrix
    return associated_matrix(w, l_grid, N)


def make_phi(cw, a_grid=DEFAULT_GRID, N: int = 64) -> WeightMatrix:
    from .weightfn import phi_matrix
    return phi_matrix(cw, a_grid, N)


# ------------------------------------------------------------------ verdicts

@dataclass(frozen=True)
class MatrixEntry:
    """Outcome for one universally quantified index ``x``.

    ``witness`` is the chosen existential index ``(y,)`` or ``(y1, y2)``;
    ``constant`` is log-domain.
    """

    x: float
    witness: tuple | None
    constant: float | None
    verdict: Verdict

    def to_dict(self) -> dict:
        return {"x": self.x, "witness": list(self.witness) if self.witness else None,
                "constant": self.constant, "verdict": self.verdict.to_dict()}

    @classmethod
    def from_dict(cls, d) -> "MatrixEntry":
        w = d.get("witness")
        return cls(d["x"], tuple(w) if w else None, d.get("constant"), Verdict.from_dict(d["verdict"]))


@dataclass(frozen=True)
class MatrixVerdict:
    condition: str
    flavor: str
    per_x: tuple
    note: str = ""

    @property
    def trend(self) -> Trend:
        if not self.per_x:
            return Trend.INCONCLUSIVE
        return combine(e.verdict for e in self.per_x)

    @property
    def holds(self) -> bool:
        return self.trend is Trend.HOLDS

    @property
    def verdict(self) -> Verdict:
        trend = self.trend
        failing = [e for e in self.per_x if e.verdict.trend is Trend.FAILS]
        consts = [e.constant for e in self.per_x if e.constant is not None]
        return Verdict(not failing, trend, max(consts) if consts else None,
                       (failing[0].x,) if failing else None, self.note)

    def entry(self, x: float) -> MatrixEntry:
        for e in self.per_x:
            if np.isclose(e.x, x, rtol=1e-12, atol=0):
                return e
        raise KeyError(x)

    def witness_map(self) -> dict:
        return {e.x: e.witness for e in self.per_x}

    def to_dict(self) -> dict:
        d = {"condition": self.condition, "flavor": self.flavor, "trend": self.trend.value,
             "per_x": [e.to_dict() for e in self.per_x]}
        if self.note:
            d["note"] = self.note
        return d

    @classmethod
    def from_dict(cls, d) -> "MatrixVerdict":
        return cls(d["condition"], d["flavor"], tuple(MatrixEntry.from_dict(e) for e in d["per_x"]),
                   d.get("note", ""))


def _search_order(grid, x: float, upward: bool) -> list[int]:
    """Grid indices on the favourable side of ``x`` by increasing log-distance, then the rest."""
    lx = np.log(x)
    idx = list(range(len(grid)))
    key = lambda i: (abs(np.log(grid[i]) - lx), grid[i] if upward else -grid[i])
    if upward:
        good = [i for i in idx if grid[i] >= x * (1 - 1e-12)]
    else:
        good = [i for i in idx if grid[i] <= x * (1 + 1e-12)]
    rest = [i for i in idx if i not in good]
    return sorted(good, key=key) + sorted(rest, key=key)


def _universe(mx: WeightMatrix, flavor: str, universe, margin: int) -> list[int]:
    n = len(mx.lambdas)
    if universe is not None:
        return [mx.index(x) for x in universe]
    if n <= margin:
        return list(range(n))
    return list(range(n - margin)) if flavor == "roumieu" else list(range(margin, n))


def _search(grid, x, upward, stat_for, tol, kind="bounded"):
    """First ``y`` (in search order) whose statistic passes; returns ``(i, constant, trend)``."""
    best = None
    for i in _search_order(grid, x, upward):
        stat = stat_for(i)
        if kind == "bounded":
            trend = bounded_trend(stat, tol)
            const = float(np.max(stat[np.isfinite(stat)]))
        else:
            trend = diverges_trend(stat, tol)
            const = tail_max(stat)
        if trend is Trend.HOLDS:
            return i, const, trend
        if best is None or (best[2] is Trend.FAILS and trend is Trend.INCONCLUSIVE):
            best = (i, const, trend)
    return best


def _per_index(v: np.ndarray, offset: int = 0) -> np.ndarray:
    """``v[n] / (n + offset)`` with ``-inf`` where the denominator vanishes."""
    n = np.arange(len(v)) + offset
    out = np.full(len(v), -np.inf)
    out[n > 0] = v[n > 0] / n[n > 0]
    return out


def _entry(x, witness, const, trend, note=""):
    ok = trend is not Trend.FAILS
    return MatrixEntry(x, witness, const, Verdict(ok, trend, const, None if ok else (x,), note))


def check_matrix_condition(mx: WeightMatrix, cond: str, flavor: str = "roumieu", *,
                           universe=None, margin: int = 1, tol: float = TOL_TREND,
                           c_grid=C_GRID) -> MatrixVerdict:
    """Evaluate one Roumieu- or Beurling-type matrix condition on the grid.

    Pairs quantified universally over two indices (Beurling mg, Roumieu alg) are
    reduced to the diagonal: by monotonicity of the rows the worst pair is
    ``x1 = x2`` at the smaller (resp. larger) index.
    """
    if cond not in CONDITIONS:
        raise WeightlabError(f"unknown condition {cond!r}; choose from {', '.join(CONDITIONS)}")
    if flavor not in FLAVORS:
        raise WeightlabError(f"flavor must be roumieu or beurling, got {flavor!r}")
    R = [r.logM for r in mx.rows]
    grid = mx.lambdas
    roum = flavor == "roumieu"
    entries = []
    for ix in _universe(mx, flavor, universe, margin):
        x = grid[ix]
        if cond == "dc":
            if roum:
                stat_for = lambda iy: _per_index(np.concatenate([[-np.inf], R[ix][1:] - R[iy][:-1]]))
            else:
                stat_for = lambda iy: _per_index(np.concatenate([[-np.inf], R[iy][1:] - R[ix][:-1]]))
            i, c, t = _search(grid, x, roum, stat_for, tol)
            entries.append(_entry(x, (grid[i],), c, t))
        elif cond == "mg":
            if roum:
                stat_for = lambda iy: _per_index(_kernels.pair_excess(R[ix], R[iy], R[iy])[0])
            else:
                stat_for = lambda iy: _per_index(_kernels.pair_excess(R[iy], R[ix], R[ix])[0])
            i, c, t = _search(grid, x, roum, stat_for, tol)
            entries.append(_entry(x, (grid[i], grid[i]), c, t))
        elif cond == "alg":
            if roum:
                stat_for = lambda iy: _per_index(_kernels.conv_max(R[ix], R[ix])[0][:mx.N + 1] - R[iy])
            else:
                stat_for = lambda iy: _per_index(_kernels.conv_max(R[iy], R[iy])[0][:mx.N + 1] - R[ix])
            i, c, t = _search(grid, x, roum, stat_for, tol)
            entries.append(_entry(x, (grid[i], grid[i]) if not roum else (grid[i],), c, t))
        elif cond == "L":
            k = np.arange(mx.N + 1)
            per_c = []
            for C in c_grid:
                lc = np.log(C)
                if roum:
                    stat_for = lambda iy: k * lc + R[ix] - R[iy]
                else:
                    stat_for = lambda iy: k * lc + R[iy] - R[ix]
                per_c.append((C,) + tuple(_search(grid, x, roum, stat_for, tol)))
            trend = combine(t for *_, t in per_c)
            worst = per_c[-1] if trend is Trend.HOLDS else next(p for p in per_c if p[3] is trend)
            C, i, c, _ = worst
            entries.append(_entry(x, (grid[i],), c, trend, note=f"C={C:g}"))
        elif cond == "strict":
            if roum:
                stat_for = lambda iy: _per_index(R[iy] - R[ix])
            else:
                stat_for = lambda iy: _per_index(R[ix] - R[iy])
            i, c, t = _search(grid, x, roum, stat_for, tol, kind="diverges")
            entries.append(_entry(x, (grid[i],), c, t))
        elif cond == "FdB":
            circ = mx.circ_rows
            m = [r.logM for r in mx.m_rows]
            if roum:
                stat_for = lambda iy: _per_index(circ[ix].logM - m[iy])
            else:
                stat_for = lambda iy: _per_index(circ[iy].logM - m[ix])
            i, c, t = _search(grid, x, roum, stat_for, tol)
            entries.append(_entry(x, (grid[i],), c, t))
        elif cond == "rai":
            roots = [_per_index(r.logM)[1:] for r in mx.m_rows]
            run = [np.maximum.accumulate(r) for r in roots]
            if roum:
                stat_for = lambda iy: np.concatenate([[-np.inf], run[ix] - roots[iy]])
            else:
                stat_for = lambda iy: np.concatenate([[-np.inf], run[iy] - roots[ix]])
            i, c, t = _search(grid, x, roum, stat_for, tol)
            entries.append(_entry(x, (grid[i],), c, t))
    note = "grid-relative verdict"
    if any(e.verdict.trend is Trend.FAILS for e in entries):
        note += "; no certifying partner in the grid for some x (a wider grid may change this)"
    return MatrixVerdict(cond, flavor, tuple(entries), note)


def check_msc(mx: WeightMatrix, tol: float = TOL_TREND) -> Verdict:
    """Every row normalized, log-convex with ``M_k^{1/k} -> inf``."""
    verdicts = [check_lcset(r, tol) for r in mx.rows]
    trend = combine(verdicts)
    bad = [x for x, v in zip(mx.lambdas, verdicts) if not v.at_truncation]
    return Verdict(not bad, trend, None, (bad[0],) if bad else None,
                   context={"per_row": {f"{x:g}": v.trend.value for x, v in zip(mx.lambdas, verdicts)}})


def check_inclusion_flags(mx: WeightMatrix, tol: float = TOL_TREND) -> dict:
    """Root statistics of the ``m``-rows: ``liminf m_k^{1/k} > 0`` (some / all rows) and ``-> inf`` (all rows)."""
    pos, div = [], []
    for x, m in zip(mx.lambdas, mx.m_rows):
        roots = _per_index(m.logM)
        pos.append((x, bounded_trend(-roots, tol)))
        div.append((x, diverges_trend(roots, tol)))

    def exists(items):
        for x, t in items:
            if t is Trend.HOLDS:
                return Verdict(True, Trend.HOLDS, None, (x,))
        t = combine(t for _, t in items)
        return Verdict(t is not Trend.FAILS, t, None, None if t is not Trend.FAILS else (items[0][0],))

    def forall(items):
        t = combine(t for _, t in items)
        bad = [x for x, tt in items if tt is Trend.FAILS]
        return Verdict(not bad, t, None, (bad[0],) if bad else None)

    return {"C_omega": exists(pos), "H": forall(pos), "beurling_C_omega": forall(div)}


# ------------------------------------------------------------------ relations

@dataclass(frozen=True)
class MatrixRelation:
    """``forward`` is ``A rel B``; ``backward`` is ``B rel A`` (absent for triangle)."""

    flavor: str
    forward: MatrixVerdict
    backward: MatrixVerdict | None

    @property
    def kind(self) -> str:
        fwd = self.forward.holds
        if self.flavor == "triangle":
            return "triangle" if fwd else "none"
        if fwd and self.backward is not None and self.backward.holds:
            return "approx"
        return "preceq" if fwd else "none"

    @property
    def equivalent(self) -> bool:
        return self.kind == "approx"

    def to_dict(self) -> dict:
        return {"flavor": self.flavor, "kind": self.kind, "forward": self.forward.to_dict(),
                "backward": self.backward.to_dict() if self.backward else None}

    @classmethod
    def from_dict(cls, d) -> "MatrixRelation":
        b = d.get("backward")
        return cls(d["flavor"], MatrixVerdict.from_dict(d["forward"]), MatrixVerdict.from_dict(b) if b else None)


def _preceq_search(A, B, roumieu: bool, universe, tol):
    """Roumieu: for all ``x`` in ``A`` find ``y`` in ``B`` with ``A^x ⪯ B^y``.

    Beurling: for all ``y`` in ``B`` find ``x`` in ``A`` with ``A^x ⪯ B^y``.
    """
    entries = []
    if roumieu:
        idx = [A.index(u) for u in universe] if universe is not None else range(len(A))
        for ia in idx:
            x = A.lambdas[ia]
            best = None
            for ib in _search_order(B.lambdas, x, True):
                rel = relate(A.rows[ia], B.rows[ib], tol)
                if rel.forward is Trend.HOLDS:
                    best = (ib, rel, Trend.HOLDS)
                    break
                if best is None or (best[2] is Trend.FAILS and rel.forward is Trend.INCONCLUSIVE):
                    best = (ib, rel, rel.forward)
            ib, rel, t = best
            entries.append(_entry(x, (B.lambdas[ib],), rel.sup_ratio_root, t))
    else:
        idx = [B.index(u) for u in universe] if universe is not None else range(len(B))
        for ib in idx:
            y = B.lambdas[ib]
            best = None
            for ia in _search_order(A.lambdas, y, False):
                rel = relate(A.rows[ia], B.rows[ib], tol)
                if rel.forward is Trend.HOLDS:
                    best = (ia, rel, Trend.HOLDS)
                    break
                if best is None or (best[2] is Trend.FAILS and rel.forward is Trend.INCONCLUSIVE):
                    best = (ia, rel, rel.forward)
            ia, rel, t = best
            entries.append(_entry(y, (A.lambdas[ia],), rel.sup_ratio_root, t))
    return entries


def relate_matrices(A: WeightMatrix, B: WeightMatrix, flavor: str = "roumieu", *,
                    universe_a=None, universe_b=None, tol: float = TOL_TREND) -> MatrixRelation:
    """``{⪯}``/``{≈}`` (roumieu), ``(⪯)``/``(≈)`` (beurling) or ``◁`` (triangle).

    ``universe_a``/``universe_b`` restrict the universally quantified grid
    values of ``A`` and ``B``; the existential side always searches the full grid.
    """
    if A.N != B.N:
        raise WeightlabError(f"truncations differ: {A.N} vs {B.N}")
    if flavor == "triangle":
        entries = []
        ua = [A.index(u) for u in universe_a] if universe_a is not None else range(len(A))
        ub = [B.index(u) for u in universe_b] if universe_b is not None else range(len(B))
        for ia in ua:
            rels = [(ib, relate(A.rows[ia], B.rows[ib], tol)) for ib in ub]
            bad = [(ib, r) for ib, r in rels if r.kind is not RelationKind.TRIANGLE]
            ib, r = bad[0] if bad else max(rels, key=lambda p: p[1].sup_ratio_root)
            trend = Trend.HOLDS if not bad else (
                Trend.FAILS if any(rr.backward is Trend.HOLDS for _, rr in bad) else Trend.INCONCLUSIVE)
            entries.append(_entry(A.lambdas[ia], (B.lambdas[ib],), r.sup_ratio_root, trend))
        return MatrixRelation("triangle", MatrixVerdict("triangle", "triangle", tuple(entries)), None)
    if flavor not in FLAVORS:
        raise WeightlabError(f"flavor must be roumieu, beurling or triangle, got {flavor!r}")
    roum = flavor == "roumieu"
    if roum:
        fwd = _preceq_search(A, B, True, universe_a, tol)
        bwd = _preceq_search(B, A, True, universe_b, tol)
    else:
        fwd = _preceq_search(A, B, False, universe_b, tol)
        bwd = _preceq_search(B, A, False, universe_a, tol)
    name = "preceq"
    return MatrixRelation(flavor, MatrixVerdict(name, flavor, tuple(fwd)),
                          MatrixVerdict(name, flavor, tuple(bwd)))
