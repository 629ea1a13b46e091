
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from weightlab import _kernels
from weightlab._kernels import _pykernels

finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)


def brute_conv(a, b, op):
    n = len(a) + len(b) - 1
    out, arg = np.empty(n), np.empty(n, dtype=int)
    for p in range(n):
        cands = [(a[j] + b[p - j], j) for j in range(len(a)) if 0 <= p - j < len(b)]
        best = op(v for v, _ in cands)
        out[p] = best
        arg[p] = min(j for v, j in cands if v == best)
    return out, arg


def test_conv_max_matches_brute_force(kernels, rng):
    a, b = rng.normal(size=9), rng.normal(size=6)
    out, arg = kernels.conv_max(a, b)
    ref, refarg = brute_conv(a, b, max)
    np.testing.assert_array_equal(out, ref)
    np.testing.assert_array_equal(arg, refarg)


def test_conv_min_matches_brute_force(kernels, rng):
    a, b = rng.normal(size=7), rng.normal(size=7)
    out, _ = kernels.conv_min(a, b)
    np.testing.assert_allclose(out, brute_conv(a, b, min)[0], rtol=0, atol=1e-15)


def test_ties_resolve_to_smallest_index(kernels):
    out, arg = kernels.conv_max(np.zeros(5), np.zeros(5))
    assert np.all(out == 0)
    np.testing.assert_array_equal(arg, [max(0, p - 4) for p in range(9)])


def test_compose_layers_small_case(kernels):
    logm = np.log([1.0, 4.0, 1.0, 1.0, 1.0, 1.0])
    G, _ = kernels.compose_layers(logm, True, 5)
    # j parts, each part 1 contributes log 4
    assert G[3, 3] == pytest.approx(3 * np.log(4))
    assert G[1, 4] == pytest.approx(0.0)
    assert G[0, 0] == 0 and G[0, 1] == -np.inf


def test_pair_excess_definition(kernels, rng):
    top, left, right = rng.normal(size=10), rng.normal(size=10), rng.normal(size=10)
    ex, argj = kernels.pair_excess(top, left, right)
    for p in range(10):
        j = argj[p]
        assert ex[p] == pytest.approx(top[p] - left[j] - right[p - j])
        assert ex[p] == pytest.approx(max(top[p] - left[i] - right[p - i] for i in range(p + 1)))


def test_subadditive_violation_brute_force(kernels, rng):
    r = rng.normal(size=12)
    v, j, k = kernels.subadditive_violation(r)
    best = max(r[a + b] - r[a] - r[b] for a in range(1, 12) for b in range(a, 12) if a + b < 12)
    assert v == pytest.approx(best)
    assert r[j + k] - r[j] - r[k] == pytest.approx(best)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.integers(1, 12), elements=finite),
       arrays(np.float64, st.integers(1, 12), elements=finite))
def test_backends_agree_on_convolutions(a, b):
    ref = _pykernels.conv_max(a, b)
    got = _kernels.conv_max(a, b)
    np.testing.assert_array_equal(ref[0], got[0])
    np.testing.assert_array_equal(ref[1], got[1])


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, st.integers(2, 14), elements=finite), st.booleans())
def test_backends_agree_on_composition(logm, maximize):
    k = len(logm) - 1
    G1, A1 = _pykernels.compose_layers(logm, maximize, k)
    G2, A2 = _kernels.compose_layers(logm, maximize, k)
    np.testing.assert_array_equal(G1, G2)
    np.testing.assert_array_equal(A1, A2)


def test_read_only_inputs_accepted(kernels):
    a = np.arange(6, dtype=float)
    a.setflags(write=False)
    kernels.conv_max(a, a)
    kernels.compose_layers(a, True, 5)
    kernels.subadditive_violation(a)


def test_backend_is_reported():
    assert _kernels.BACKEND in ("python", "cython")
