import mpmath as mp
import numpy as np
import pytest

from weightlab.catalog import DEFAULT_CATALOG, sequence
from weightlab.errors import DivergentTail, InsufficientDivergence, MissingMatrix, WeightlabError
from weightlab.matrix import DEFAULT_GRID, make_constant, make_gevrey, make_omega, make_phi
from weightlab.seqcore import LogSeq, check_mg, log_factorial
from weightlab.verdict import Trend
from weightlab.weightfn import convex_weight, weight_function
from weightlab.witness import (FAMILIES, block_sums, build_block_witness, characteristic_derivatives,
                               characteristic_terms, classify_family, fdb_alpha_map, fdb_beta_map,
                               find_mg_violation)

N = 64
SUB = {"R_Roum_sub": "R_Roum", "R_Beur_sub": "R_Beur", "S~_Roum_sub": "S~_Roum",
       "S~_Beur_sub": "S~_Beur", "S_Roum_FdB": "S_Roum", "S_Beur_FdB": "S_Beur"}


def tags(seq, mx=None, **kw):
    return {t.family: t for t in classify_family(seq, mx, **kw)}


@pytest.fixture(scope="module")
def gevrey():
    return make_gevrey((0.5, 1.0, 2.0, 3.0), N)


# ------------------------------------------------------------------ families

def test_factorial_reciprocal_is_roumieu_sub():
    t = tags(LogSeq(-log_factorial(4096)))
    assert t["R_Roum"].member and t["R_Roum_sub"].member


def test_geometric_is_beurling_only():
    k = np.arange(N + 1)
    t = tags(LogSeq(-k * np.log(2)))
    assert t["R_Beur"].member and t["R_Beur"].t_witness == 1.0
    assert t["R_Roum"].verdict.fails and t["R_Roum"].t_witness == 2.0


def test_gevrey_row_reciprocal(gevrey):
    s = LogSeq(-gevrey.m_rows[1].logM)  # 1/m^1
    t = tags(s, gevrey)
    assert t["S_Roum"].verdict.fails and t["S_Roum"].x_witness == 2.0
    assert t["S_Beur"].member and t["S_Beur"].x_witness == 1.0


def test_s_families_need_matrix():
    with pytest.raises(MissingMatrix):
        classify_family(sequence("factorial"), None, families=["S_Roum"])
    with pytest.raises(WeightlabError):
        classify_family(sequence("factorial"), None, families=["nope"])


def test_default_without_matrix_is_r_families():
    assert [t.family for t in classify_family(sequence("factorial"))] == list(FAMILIES[:4])


def _catalog_s(gevrey):
    # reciprocals and plain catalog members as test sequences for the S-families
    out = [LogSeq(-s.logM, f"1/{s.label}") for s in (sequence(n) for n in DEFAULT_CATALOG)]
    out += [sequence(n) for n in DEFAULT_CATALOG]
    out += [LogSeq(-m.logM) for m in gevrey.m_rows]
    return out


def test_subfamilies_imply_parents(gevrey):
    for s in _catalog_s(gevrey):
        t = tags(s, gevrey)
        for sub, parent in SUB.items():
            if t[sub].member:
                assert t[parent].member, (s.label, sub)


def test_tilde_iff_factorial_multiple(gevrey):
    lf = log_factorial(N)
    for s in _catalog_s(gevrey):
        t = tags(s, gevrey)
        u = tags(LogSeq(s.logM + lf), gevrey)
        assert t["S~_Roum"].verdict.trend is u["S_Roum"].verdict.trend, s.label
        assert t["S~_Beur"].verdict.trend is u["S_Beur"].verdict.trend, s.label


@pytest.mark.parametrize("B", [0.5, 2.0])
def test_scale_stability(gevrey, B):
    for s in _catalog_s(gevrey):
        base = tags(s, gevrey)
        scaled = tags(s.shifted(np.log(B)), gevrey)
        for fam in FAMILIES:
            if fam.startswith("R_"):
                continue  # the t-grid is finite; see the dedicated test below
            assert base[fam].verdict.trend is scaled[fam].verdict.trend, (s.label, fam)


@pytest.mark.parametrize("B", [0.5, 2.0])
def test_r_family_scale_stability(B):
    k = np.arange(4097)
    for r in (LogSeq(-log_factorial(4096)), LogSeq(-k * np.log(3.0)), LogSeq(-k * np.log(np.maximum(k, 1)))):
        base, scaled = tags(r), tags(r.shifted(np.log(B)))
        for fam in ("R_Roum", "R_Beur"):
            assert base[fam].member == scaled[fam].member


# ------------------------------------------------------------------ characteristic derivatives

def mp_char(logM, j, terms=200):
    """Direct high-precision summation with a hard term cap."""
    mp.mp.dps = 60
    M = [mp.e ** mp.mpf(v) for v in logM[:terms]]
    total = mp.mpf(0)
    for k in range(len(M)):
        mu = M[k] / M[k - 1] if k else mp.mpf(1)
        total += M[k] * (2 * mu) ** (j - k)
    return float(mp.log(total))


def test_char_derivs_zero_index():
    s = characteristic_derivatives(sequence("gevrey:1", 128), 8)
    assert s.logM[0] >= 0.0


def test_char_derivs_against_oracle():
    M = sequence("gevrey:1", 200)
    logs, tails = characteristic_terms(M.truncate(128), 32)
    for j in (0, 1, 2, 5, 16, 32):
        assert logs[j] == pytest.approx(mp_char(M.logM, j), rel=1e-13, abs=1e-13)
    assert tails.max() < 1e-12


@pytest.mark.parametrize("name", ["gevrey:0.5", "gevrey:2", "exp_power:1.5", "loglog:1"])
def test_char_derivs_dominate(name):
    M = sequence(name, 128)
    s = characteristic_derivatives(M, 32)
    assert np.all(s.logM >= M.logM[:33])
    ratio = s.logM - M.logM[:33]
    assert np.all(np.isfinite(ratio))


def test_char_derivs_divergent_tail():
    with pytest.raises(DivergentTail):
        # mu_k = 1/k: terms grow like (e/2)^k
        characteristic_terms(LogSeq(-log_factorial(N)), 8)


def test_char_derivs_j_max_limit():
    with pytest.raises(WeightlabError):
        characteristic_terms(sequence("gevrey:1"), 40)


# ------------------------------------------------------------------ mg violation

def test_mg_violation_factorial_none():
    mx = make_constant(sequence("factorial"))
    for n in (4, 5, 8, 100):
        assert find_mg_violation(mx, 1.0, n) is None


def test_mg_violation_gevrey_none_above_diagonal(gevrey):
    for ix, x in enumerate(gevrey.lambdas):
        for y in gevrey.lambdas[ix + 1:]:
            assert find_mg_violation(gevrey, x, 4, y=y) is None


def test_mg_violation_small_n_found(gevrey):
    hit = find_mg_violation(gevrey, 3.0, 4)
    assert hit == (1, 1)
    R = gevrey.row(3.0).logM
    assert (R[2] - 2 * R[1]) / 2 >= np.log(4) - 1e-12


def test_mg_violation_omega2_explicit_partner():
    O = make_omega(weight_function("log_power:2"), DEFAULT_GRID, N)
    # with partner row y = 1 the statistic is jk / (2(j+k)); j = 1 never reaches log 2
    assert find_mg_violation(O, 1.0, 2.0, y=1.0) == (2, 5)


def test_mg_violation_consistent_with_row_constants():
    mxs = [make_gevrey((0.5, 1.0), N), make_constant(sequence("factorial")),
           make_phi(convex_weight("tlogt"), (0.25, 0.5), N)]
    for mx in mxs:
        for x in mx.lambdas:
            c = max(check_mg(mx.row(x)).constant, 0.0)
            for n in (4, 8, 16):
                if c < np.log(n):
                    assert find_mg_violation(mx, x, n, y=x) is None


# ------------------------------------------------------------------ blocks

def test_blocks_first_endpoint(gevrey):
    top = gevrey.rows[-1]
    k = np.arange(N + 1)
    b = LogSeq(top.logM + np.log(np.maximum(k, 1)))
    w = build_block_witness(gevrey, b, max_blocks=2)
    assert w.breakpoints[0] == 1 and w.breakpoints[1] - 1 == 1
    assert w.blocks == 2


def test_blocks_r_and_s_formulas(gevrey):
    k = np.arange(N + 1)
    b = LogSeq(gevrey.rows[-1].logM + np.log(np.maximum(k, 1)))
    w = build_block_witness(gevrey, b, max_blocks=2)
    for n, (lo, hi) in enumerate(zip(w.breakpoints, w.breakpoints[1:]), start=1):
        ks = np.arange(lo, hi)
        assert np.array_equal(w.log_r[ks], -2.0 * ks * np.log(n))
        x = gevrey.lambdas[n]
        np.testing.assert_array_equal(w.log_s[ks], -gevrey.m_rows[n].logM[ks])
        assert np.all(w.gamma[ks] == x)


def test_block_sums_reach_threshold(gevrey):
    k = np.arange(N + 1)
    b = LogSeq(gevrey.rows[-1].logM + np.log(np.maximum(k, 1)))
    w = build_block_witness(gevrey, b, max_blocks=2)
    sums = block_sums(w, b)
    assert all(v >= -1e-12 for v in sums)
    total = np.log(np.sum(np.exp(sums)))
    assert total >= np.log(w.blocks) - 1e-12


def test_blocks_insufficient_divergence_reports_partial(gevrey):
    k = np.arange(N + 1)
    b = LogSeq(gevrey.rows[-1].logM + np.log(np.maximum(k, 1)))
    with pytest.raises(InsufficientDivergence) as exc:
        build_block_witness(gevrey, b)
    assert exc.value.witness.blocks == 2


def test_blocks_low_row_insufficient():
    # block 1 has r_k = 1 and may close on the first terms alone; block 2 cannot
    P = make_phi(convex_weight("power:2"), DEFAULT_GRID, N)
    with pytest.raises(InsufficientDivergence) as exc:
        build_block_witness(P, P.rows[0])
    assert exc.value.witness.blocks <= 1


def test_beta_map_inverts_alpha(gevrey):
    alpha, beta = fdb_alpha_map(gevrey), fdb_beta_map(gevrey)
    for y, x in beta.items():
        assert alpha[x] <= y
        assert all(alpha[z] > y for z in alpha if z > x)
