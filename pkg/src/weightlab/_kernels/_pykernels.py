"""Reference kernels in plain numpy.

Every function here has a compiled twin in ``_ckernels.pyx`` with the same
signature and the same tie-breaking (smallest index wins), so the two backends
return identical arrays.
"""
import numpy as np


def conv_max(a, b):
    """Max-plus convolution ``out[p] = max_{j+k=p} a[j] + b[k]``.

    Returns ``(out, argj)`` where ``argj[p]`` is the smallest maximizing ``j``.
    Entries equal to ``-inf`` are treated as absent.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    n = len(a) + len(b) - 1
    out = np.full(n, -np.inf)
    argj = np.full(n, -1, dtype=np.int64)
    for p in range(n):
        jlo = max(0, p - len(b) + 1)
        jhi = min(p, len(a) - 1)
        vals = a[jlo:jhi + 1] + b[p - jhi:p - jlo + 1][::-1]
        i = int(np.argmax(vals))
        if vals[i] > -np.inf:
            out[p] = vals[i]
            argj[p] = jlo + i
    return out, argj


def conv_min(a, b):
    """Min-plus convolution; ``+inf`` entries are treated as absent."""
    out, argj = conv_max(-np.asarray(a, dtype=np.float64), -np.asarray(b, dtype=np.float64))
    return -out, argj


def compose_layers(logm, maximize, kmax):
    """Layered DP behind the composed sequences.

    ``G[j, k]`` is the extreme of ``sum(logm[alpha_i])`` over compositions of
    ``k`` into ``j`` positive parts, and ``arg[j, k]`` the smallest last part
    attaining it.  Only ``0 <= j, k <= kmax`` is filled.
    """
    logm = np.asarray(logm, dtype=np.float64)
    bad = -np.inf if maximize else np.inf
    G = np.full((kmax + 1, kmax + 1), bad)
    arg = np.zeros((kmax + 1, kmax + 1), dtype=np.int64)
    G[0, 0] = 0.0
    parts = logm[1:kmax + 1]
    for j in range(1, kmax + 1):
        prev = G[j - 1]
        for k in range(j, kmax + 1):
            # last part a in 1..k-j+1, remainder k-a composed into j-1 parts
            cand = prev[j - 1:k][::-1] + parts[:k - j + 1]
            i = int(np.argmax(cand)) if maximize else int(np.argmin(cand))
            G[j, k] = cand[i]
            arg[j, k] = i + 1
    return G, arg


def pair_excess(top, left, right):
    """``out[p] = max_{j+k=p} top[p] - left[j] - right[k]`` with smallest argmax ``j``."""
    conv, argj = conv_min(left, right)
    n = min(len(top), len(conv))
    return np.asarray(top, dtype=np.float64)[:n] - conv[:n], argj[:n]


def subadditive_violation(logr):
    """Largest ``logr[j+k] - logr[j] - logr[k]`` over ``j, k >= 1``, ``j+k < len``.

    Returns ``(value, j, k)``; ``value`` is ``-inf`` when fewer than three entries.
    """
    logr = np.asarray(logr, dtype=np.float64)
    best, bj, bk = -np.inf, -1, -1
    n = len(logr)
    for j in range(1, n):
        ks = np.arange(j, n - j)
        if len(ks) == 0:
            break
        vals = logr[j + ks] - logr[j] - logr[ks]
        i = int(np.argmax(vals))
        if vals[i] > best:
            best, bj, bk = float(vals[i]), j, int(ks[i])
    return best, bj, bk
