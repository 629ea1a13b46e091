"""Constructive objects: sequence families, characteristic derivatives,
moderate-growth violations and the block construction for projective descriptions.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from . import _kernels
from .errors import DivergentTail, InsufficientDivergence, MissingMatrix, WeightlabError
from .fdb import compose_min
from .matrix import WeightMatrix
from .seqcore import LogSeq, derive, log_factorial, mg_profile, relate
from .verdict import TOL_TREND, Trend, Verdict, bounded_trend, combine, diverges_trend

T_GRID = tuple(2.0 ** i for i in range(-10, 11))
FAMILIES = (
    "R_Roum", "R_Roum_sub", "R_Beur", "R_Beur_sub",
    "S_Roum", "S~_Roum", "S~_Roum_sub", "S_Roum_FdB",
    "S_Beur", "S~_Beur", "S~_Beur_sub", "S_Beur_FdB",
)
R_FAMILIES = FAMILIES[:4]
CUTOFF = 40.0  # log-units below the running max at which a series is truncated


@dataclass(frozen=True)
class FamilyTag:
    """Membership verdict; ``t_witness`` for R-families, ``x_witness`` for S-families."""

    family: str
    verdict: Verdict
    t_witness: float | None = None
    x_witness: float | None = None

    @property
    def member(self) -> bool:
        return self.verdict.trend is Trend.HOLDS

    def to_dict(self) -> dict:
        return {"family": self.family, "verdict": self.verdict.to_dict(),
                "t_witness": self.t_witness, "x_witness": self.x_witness}


def _verdict(trend: Trend, witness=None, note="", constant=None) -> Verdict:
    ok = trend is not Trend.FAILS
    if not ok and witness is None:
        witness = (0,)
    return Verdict(ok, trend, constant, witness if not ok else None, note)


def _subadditive(logr: np.ndarray) -> Verdict:
    """``r_{j+k} <= r_j r_k`` for all ``j, k`` (including 0), exact at truncation."""
    value, j, k = _kernels.subadditive_violation(logr)
    slack = 1e-12 * max(1.0, float(np.max(np.abs(logr))))
    if logr[0] < -slack:
        return Verdict(False, Trend.FAILS, -float(logr[0]), (0, 0), "r_0 < 1")
    if value > slack:
        return Verdict(False, Trend.FAILS, value, (j, k))
    return Verdict(True, Trend.HOLDS, value)


def _r_families(seq: LogSeq, t_grid, tol) -> list[FamilyTag]:
    k = np.arange(seq.N + 1)
    trends = [(t, diverges_trend(-(seq.logM + k * np.log(t)), tol)) for t in t_grid]
    roum = combine(tr for _, tr in trends)
    first_bad = next((t for t, tr in trends if tr is not Trend.HOLDS), None)
    good = [t for t, tr in trends if tr is Trend.HOLDS]
    if good:
        beur, t_beur = Trend.HOLDS, max(good)
    else:
        beur = Trend.INCONCLUSIVE if any(tr is Trend.INCONCLUSIVE for _, tr in trends) else Trend.FAILS
        t_beur = None
    sub = _subadditive(seq.logM)
    r_roum = _verdict(roum, (first_bad,) if first_bad is not None else None)
    r_beur = _verdict(beur, (t_grid[-1],))
    return [
        FamilyTag("R_Roum", r_roum, first_bad),
        FamilyTag("R_Roum_sub", _verdict(combine([roum, sub.trend]), sub.witness or r_roum.witness,
                                         "" if sub.at_truncation else "not sub-additive"), first_bad),
        FamilyTag("R_Beur", r_beur, t_beur),
        FamilyTag("R_Beur_sub", _verdict(combine([beur, sub.trend]), sub.witness or r_beur.witness,
                                         "" if sub.at_truncation else "not sub-additive"), t_beur),
    ]


def _row_stats(logs: np.ndarray, rows) -> list[np.ndarray]:
    out = []
    k = np.arange(1, len(logs))
    for r in rows:
        stat = np.full(len(logs), -np.inf)
        stat[1:] = (logs[1:] + r.logM[1:]) / k
        out.append(stat)
    return out


def _forall_exists(lambdas, trends):
    """(forall-verdict, first failing x), (exists-verdict, largest certifying x)."""
    fa = combine(trends)
    bad = next((x for x, t in zip(lambdas, trends) if t is not Trend.HOLDS), None)
    good = [x for x, t in zip(lambdas, trends) if t is Trend.HOLDS]
    if good:
        ex, x_ex = Trend.HOLDS, max(good)
    else:
        ex = Trend.INCONCLUSIVE if Trend.INCONCLUSIVE in trends else Trend.FAILS
        x_ex = None
    return (fa, bad), (ex, x_ex)


def _s_membership(logs: np.ndarray, mx: WeightMatrix, tilde: bool, tol):
    rows = mx.rows if tilde else mx.m_rows
    trends = [bounded_trend(st, tol) for st in _row_stats(logs, rows)]
    return _forall_exists(mx.lambdas, trends)


def _fdb_sub(s: LogSeq, mx: WeightMatrix, roumieu: bool, tol):
    """Search ``s_hat = 1/m^y`` (y in the grid) in the same S-family with ``s ⪯ (s_hat)_o``."""
    best = Trend.FAILS
    for y, m in zip(mx.lambdas, mx.m_rows):
        shat = LogSeq(-m.logM, f"1/m^{y:g}")
        (fa, _), (ex, _) = _s_membership(shat.logM, mx, False, tol)
        if (fa if roumieu else ex) is not Trend.HOLDS:
            continue
        composed = compose_min(shat).circ
        fwd = relate(s, composed, tol).forward
        if fwd is Trend.HOLDS:
            return Trend.HOLDS, y
        if fwd is Trend.INCONCLUSIVE:
            best = Trend.INCONCLUSIVE
    return best, None


def classify_family(seq: LogSeq, mx: WeightMatrix | None = None, *, families=None,
                    t_grid=T_GRID, tol: float = TOL_TREND) -> list[FamilyTag]:
    """Membership of ``seq`` (log values of ``r_k`` or ``s_k``) in the sequence families.

    R-families need no matrix and are the default without one.  "For each t" and "for some t" are realized as
    all / any of ``t_grid``; S-families quantify over the rows of ``mx``.
    """
    if families is None:
        families = FAMILIES if mx is not None else R_FAMILIES
    wanted = set(families)
    unknown = wanted - set(FAMILIES)
    if unknown:
        raise WeightlabError(f"unknown families: {sorted(unknown)}")
    tags = []
    if wanted & set(R_FAMILIES):
        tags += [t for t in _r_families(seq, t_grid, tol) if t.family in wanted]
    s_wanted = wanted - set(R_FAMILIES)
    if not s_wanted:
        return tags
    if mx is None:
        raise MissingMatrix("S-families need a weight matrix")
    if mx.N != seq.N:
        raise WeightlabError(f"truncations differ: {seq.N} vs {mx.N}")

    logs = seq.logM
    (sr, sr_bad), (sb, sb_x) = _s_membership(logs, mx, False, tol)
    (tr, tr_bad), (tb, tb_x) = _s_membership(logs, mx, True, tol)
    mg_c, _ = mg_profile(seq)
    sub = bounded_trend(mg_c, tol)

    def tag(name, trend, x=None, note=""):
        return FamilyTag(name, _verdict(trend, (x,) if x is not None else None, note), x_witness=x)

    if "S_Roum" in s_wanted:
        tags.append(tag("S_Roum", sr, sr_bad))
    if "S~_Roum" in s_wanted:
        tags.append(tag("S~_Roum", tr, tr_bad))
    if "S~_Roum_sub" in s_wanted:
        tags.append(tag("S~_Roum_sub", combine([tr, sub]), tr_bad))
    if "S_Roum_FdB" in s_wanted:
        f, y = _fdb_sub(seq, mx, True, tol) if sr is not Trend.FAILS else (Trend.FAILS, None)
        tags.append(tag("S_Roum_FdB", combine([sr, f]), y,
                        "s_hat searched among row reciprocals 1/m^y only"))
    if "S_Beur" in s_wanted:
        tags.append(tag("S_Beur", sb, sb_x))
    if "S~_Beur" in s_wanted:
        tags.append(tag("S~_Beur", tb, tb_x))
    if "S~_Beur_sub" in s_wanted:
        tags.append(tag("S~_Beur_sub", combine([tb, sub]), tb_x))
    if "S_Beur_FdB" in s_wanted:
        f, y = _fdb_sub(seq, mx, False, tol) if sb is not Trend.FAILS else (Trend.FAILS, None)
        tags.append(tag("S_Beur_FdB", combine([sb, f]), y,
                        "s_hat searched among row reciprocals 1/m^y only"))
    return tags


# ------------------------------------------------- characteristic derivatives

def characteristic_derivatives(M: LogSeq, j_max: int, cutoff: float = CUTOFF) -> LogSeq:
    """``s_j = sum_k M_k (2 mu_k)^(j-k)`` for ``j = 0..j_max`` (log domain).

    The series is cut once a term past ``k = j`` lies ``cutoff`` log-units below
    the running maximum and the terms decrease.  ``context`` of the returned
    label is not available, so the relative tail bound of each sum is exposed
    by :func:`characteristic_terms`.
    """
    logs, _ = characteristic_terms(M, j_max, cutoff)
    return LogSeq(logs, f"char({M.label})")


def characteristic_terms(M: LogSeq, j_max: int, cutoff: float = CUTOFF):
    """Return ``(log s_j, relative tail bound)`` arrays for ``j = 0..j_max``."""
    if j_max > M.N // 2:
        raise WeightlabError(f"j_max={j_max} exceeds N/2={M.N // 2}")
    logmu = derive(M)[1].logM
    k = np.arange(M.N + 1)
    logs = np.empty(j_max + 1)
    tails = np.empty(j_max + 1)
    for j in range(j_max + 1):
        terms = M.logM + (j - k) * (np.log(2.0) + logmu)
        running = np.maximum.accumulate(terms)
        stop = None
        for kk in range(j + 1, M.N + 1):
            if terms[kk] < running[kk] - cutoff and terms[kk] < terms[kk - 1]:
                stop = kk
                break
        if stop is None:
            raise DivergentTail(f"terms of s_{j} do not decay within N={M.N}")
        total = logsumexp(terms[:stop + 1])
        # consecutive ratios are at most 1/2 past k=j for log-convex M, so the
        # remainder is bounded by the last included term
        q = min(np.exp(terms[stop] - terms[stop - 1]), 0.5)
        tails[j] = np.exp(terms[stop] + np.log(q / (1 - q)) - total)
        logs[j] = total
    if np.any(logs < M.logM[:j_max + 1] - 1e-12 * np.maximum(1.0, np.abs(M.logM[:j_max + 1]))):
        j = int(np.flatnonzero(logs < M.logM[:j_max + 1])[0])
        raise WeightlabError(f"s_{j} < M_{j}: input is not log-convex")
    return logs, tails


# -------------------------------------------------------------- mg violation

def find_mg_violation(mx: WeightMatrix, x: float, n: float, j_max: int = 64, y: float | None = None):
    """Smallest ``(j, k)`` (lexicographic) with ``j + k <= j_max`` and
    ``(log M^x_{j+k} - log M^y_j - log M^y_k) / (j+k) >= log n``.

    ``y`` defaults to the smallest grid value ``>= n`` (the top row if none is).
    Returns ``None`` if no pair violates the bound.
    """
    if n < 1:
        raise WeightlabError("n must be >= 1")
    top = mx.row(x).logM
    if y is None:
        above = [lam for lam in mx.lambdas if lam >= n * (1 - 1e-12)]
        y = above[0] if above else mx.lambdas[-1]
    right = mx.row(y).logM
    j_max = min(j_max, mx.N)
    logn = np.log(n)
    for j in range(0, j_max + 1):
        ks = np.arange(max(1 - j, 0), j_max - j + 1)
        if len(ks) == 0:
            continue
        vals = (top[j + ks] - right[j] - right[ks]) / (j + ks)
        hit = np.flatnonzero(vals >= logn)
        if len(hit):
            return (j, int(ks[hit[0]]))
    return None


# ------------------------------------------------------------ block witness

@dataclass(frozen=True, eq=False)
class BlockWitness:
    """Blocks ``[k_{n-1}, k_n - 1]`` with ``r_k = n^{-2k}`` and ``s_k = 1/m^{gamma(k)}_k``.

    ``log_r``, ``log_s``, ``log_s_hat`` and ``gamma`` are indexed by ``k`` from 0
    to ``k_last - 1``; index 0 carries ``r_0 = s_0 = 1`` and ``gamma = nan``.
    """

    breakpoints: tuple
    log_r: np.ndarray
    log_s: np.ndarray
    gamma: np.ndarray
    block_sums: tuple
    log_s_hat: np.ndarray | None = None
    alpha_offset: int = 1
    note: str = ""

    @property
    def blocks(self) -> int:
        return len(self.breakpoints) - 1

    def to_dict(self) -> dict:
        fix = lambda a: None if a is None else [None if not np.isfinite(v) else float(v) for v in a]
        return {"breakpoints": list(self.breakpoints), "log_r": fix(self.log_r), "log_s": fix(self.log_s),
                "gamma": fix(self.gamma), "block_log_sums": [float(v) for v in self.block_sums],
                "log_s_hat": fix(self.log_s_hat), "alpha_offset": self.alpha_offset, "note": self.note}


def fdb_alpha_map(mx: WeightMatrix, tol: float = TOL_TREND) -> dict:
    """``alpha(x) = min { y : (m^x)° ⪯ m^y }`` over the grid (absent where no y exists)."""
    alpha = {}
    for x, circ in zip(mx.lambdas, mx.circ_rows):
        for y, m in zip(mx.lambdas, mx.m_rows):
            if relate(circ, m, tol).forward is Trend.HOLDS:
                alpha[x] = y
                break
    return alpha


def fdb_beta_map(mx: WeightMatrix, tol: float = TOL_TREND) -> dict:
    """``beta(y) = max { x : alpha(x) <= y }``; grid values without such ``x`` are omitted."""
    alpha = fdb_alpha_map(mx, tol)
    beta = {}
    for y in mx.lambdas:
        xs = [x for x, a in alpha.items() if a <= y]
        if xs:
            beta[y] = max(xs)
    return beta


def build_block_witness(mx: WeightMatrix, b: LogSeq, alpha_offset: int = 1,
                        max_blocks: int | None = None, with_s_hat: bool = True,
                        tol: float = TOL_TREND) -> BlockWitness:
    """Chain blocks ``k_0 = 1 < k_1 < ...`` with ``sum_{block n} a^{gamma}_k n^{-2k} >= 1``.

    ``gamma`` on block ``n`` is the ``(n + alpha_offset)``-th grid row (1-based)
    and ``a^x_k = b_k / M^x_k``.  Blocks are built until the rows (or
    ``max_blocks``) run out.  A block that cannot reach the threshold within
    ``N`` raises ``InsufficientDivergence`` carrying the completed blocks.
    """
    if mx.N != b.N:
        raise WeightlabError(f"truncations differ: {b.N} vs {mx.N}")
    if alpha_offset < 0:
        raise WeightlabError("alpha_offset must be >= 0")
    N = mx.N
    beta = fdb_beta_map(mx, tol) if with_s_hat else {}
    breaks = [1]
    sums = []
    gam, logr, logs, logsh = [np.nan], [0.0], [0.0], [0.0]
    n = 0
    while True:
        n += 1
        row = n + alpha_offset - 1
        if row >= len(mx) or (max_blocks is not None and n > max_blocks):
            break
        x = mx.lambdas[row]
        a = b.logM - mx.rows[row].logM
        start = breaks[-1]
        acc = -np.inf
        end = None
        for k in range(start, N + 1):
            acc = np.logaddexp(acc, a[k] - 2 * k * np.log(n))
            if acc >= 0:
                end = k + 1
                break
        if end is None:
            partial = _assemble(breaks, logr, logs, gam, logsh, sums, beta, alpha_offset,
                                f"block {n} (row {x:g}) stays below 1 up to k={N}")
            raise InsufficientDivergence(
                f"block {n} on row {x:g} does not reach the threshold within N={N}; "
                f"{len(sums)} complete block(s)", partial)
        ks = np.arange(start, end)
        m_row = derive(mx.rows[row])[0].logM
        logr += list(-2.0 * ks * np.log(n))
        logs += list(-m_row[ks])
        gam += [x] * len(ks)
        if x in beta:
            m_beta = derive(mx.row(beta[x]))[0].logM
            logsh += list(-m_beta[ks])
        else:
            logsh += [np.nan] * len(ks)
        sums.append(float(acc))
        breaks.append(end)
        if end > N:
            break
    if not sums:
        raise InsufficientDivergence("no rows available for a first block", None)
    return _assemble(breaks, logr, logs, gam, logsh, sums, beta, alpha_offset, "")


def _assemble(breaks, logr, logs, gam, logsh, sums, beta, alpha_offset, note):
    sh = np.array(logsh) if beta else None
    if sh is not None and np.any(np.isnan(sh[1:])):
        note = (note + "; " if note else "") + "s_hat undefined where beta has no grid value"
    return BlockWitness(tuple(breaks), np.array(logr), np.array(logs), np.array(gam), tuple(sums),
                        sh, alpha_offset, note)


def block_sums(w: BlockWitness, b: LogSeq) -> list[float]:
    """Re-evaluate ``log sum_{block} b_k r_k s_k / k!`` independently of the construction."""
    lf = log_factorial(b.N)
    out = []
    for lo, hi in zip(w.breakpoints, w.breakpoints[1:]):
        ks = np.arange(lo, hi)
        out.append(float(logsumexp(b.logM[ks] + w.log_r[ks] + w.log_s[ks] - lf[ks])))
    return out
