"""Composed sequences over integer compositions and the (FdB)/(rai) predicates.

``circ_k = max { m_j m_{a_1} ... m_{a_j} : a_i >= 1, a_1 + ... + a_j = k }`` and its
min-form twin are computed with a layered max-plus (min-plus) DP in O(N^3).
"""
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .seqcore import LogSeq, derive
from .verdict import TOL_TREND, Verdict, bounded_trend

WITNESS_KMAX = 32


@dataclass(frozen=True)
class ComposedSeq:
    """``base`` is the input (m-view), ``circ`` the composed sequence.

    ``argmax[k]`` is ``(j, parts)`` for ``1 <= k <= 32`` (``argmax[0]`` is ``None``);
    for the min form it holds the minimizer.
    """

    base: LogSeq
    circ: LogSeq
    argmax: tuple
    maximize: bool = True


def _compose(seq: LogSeq, maximize: bool) -> ComposedSeq:
    logm = seq.logM
    n = seq.N
    G, arg = _kernels.compose_layers(logm, maximize, n)
    circ = np.zeros(n + 1)
    best_j = np.zeros(n + 1, dtype=np.int64)
    for k in range(1, n + 1):
        j = np.arange(1, k + 1)
        vals = logm[j] + G[j, k]
        i = int(np.argmax(vals)) if maximize else int(np.argmin(vals))
        circ[k] = vals[i]
        best_j[k] = j[i]

    witnesses = [None]
    for k in range(1, min(n, WITNESS_KMAX) + 1):
        j = int(best_j[k])
        parts, rest = [], k
        for layer in range(j, 0, -1):
            a = int(arg[layer, rest])
            parts.append(a)
            rest -= a
        witnesses.append((j, tuple(reversed(parts))))
    tag = "circ" if maximize else "s_o"
    return ComposedSeq(seq, LogSeq(circ, f"{tag}({seq.label})"), tuple(witnesses), maximize)


def compose_max(m: LogSeq) -> ComposedSeq:
    """Max form ``m°``; ``m.logM[0]`` is never used."""
    return _compose(m, True)


def compose_min(s: LogSeq) -> ComposedSeq:
    """Min form ``(s_o)``."""
    return _compose(s, False)


def fdb_profile(M: LogSeq, against: LogSeq | None = None) -> tuple[np.ndarray, ComposedSeq]:
    """``e_k = (log m°_k - log m'_k)/k`` where ``m'`` is ``against``'s m-view (default ``M``)."""
    m = derive(M)[0]
    target = m if against is None else derive(against)[0]
    comp = compose_max(m)
    e = np.full(M.N + 1, -np.inf)
    k = np.arange(1, M.N + 1)
    e[1:] = (comp.circ.logM[1:] - target.logM[1:]) / k
    return e, comp


def check_fdb(M: LogSeq, tol: float = TOL_TREND) -> Verdict:
    """``m°_k <= D^k m_k``; ``constant`` is ``log D`` and the witness the worst ``k``."""
    e, comp = fdb_profile(M)
    k = int(np.argmax(e[1:])) + 1
    return Verdict(True, bounded_trend(e, tol), e[k], (k,),
                   context={"partition": comp.argmax[k] if k < len(comp.argmax) else None})


def check_rai(M: LogSeq, tol: float = TOL_TREND) -> Verdict:
    """``m_j^{1/j} <= C m_k^{1/k}`` for ``1 <= j <= k``; ``constant`` is ``log C``."""
    m = derive(M)[0]
    n = M.N
    roots = m.logM[1:] / np.arange(1, n + 1)
    run = np.maximum.accumulate(roots)
    # first index attaining the running max, for the witness
    first = np.zeros(n, dtype=np.int64)
    for i in range(1, n):
        first[i] = first[i - 1] if roots[i] <= run[i - 1] else i
    gap = np.full(n + 1, -np.inf)
    gap[1:] = run - roots
    k = int(np.argmax(gap[1:])) + 1
    return Verdict(True, bounded_trend(gap, tol), gap[k], (int(first[k - 1]) + 1, k))
