import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weightlab.errors import BracketOverflow, GridTooShort, SchemaError, WeightlabError
from weightlab.seqcore import RelationKind, relate
from weightlab.verdict import Trend
from weightlab.weightfn import (DEFAULT_CONVEX_CATALOG, R, ConvexWeight, associated_matrix,
                                associated_rows, biconjugate, check_omega_conditions, check_phi_mg,
                                conjugate, conjugate_of, conjugate_power_closed_form, convex_weight,
                                WeightFunction, doubling_shift, load_table, phi_matrix, phi_rows,
                                weight_function)


def test_R_closed_form():
    assert R(2.0) == pytest.approx(0.25)
    for s in (1.5, 3.0):
        assert R(s) == pytest.approx(s ** (-1 / (s - 1)) - s ** (-s / (s - 1)))


def test_conjugate_quadratic():
    x = np.array([0.0, 0.5, 1.0, 3.0, 10.0])
    np.testing.assert_allclose(conjugate(convex_weight("power:2"), x), x ** 2 / 4, atol=1e-12)


@pytest.mark.parametrize("s", [1.5, 2.0, 3.0])
def test_conjugate_log_power_closed_form(s):
    x = np.array([0.5, 1, 2, 4, 8, 30])
    num = conjugate(weight_function(f"log_power:{s}").convex, x)
    np.testing.assert_allclose(num, conjugate_power_closed_form(s, x), rtol=1e-9)


def test_conjugate_at_zero():
    assert conjugate(convex_weight("tlogt"), 0.0) == 0.0


def test_conjugate_bracket_overflow():
    linear = ConvexWeight(lambda y: np.asarray(y, dtype=float), "identity")
    with pytest.raises(BracketOverflow):
        conjugate(linear, 2.0)


def test_convex_weight_rejects_nonzero_origin():
    with pytest.raises(WeightlabError):
        ConvexWeight(lambda y: np.asarray(y) + 1.0, "shifted")


@pytest.mark.parametrize("name", DEFAULT_CONVEX_CATALOG)
def test_catalog_convex_weights_are_valid(name):
    assert convex_weight(name).check().holds


@pytest.mark.parametrize("name", DEFAULT_CONVEX_CATALOG)
def test_conjugate_over_x_nondecreasing(name):
    cw = convex_weight(name)
    x = np.geomspace(0.01, 15, 200)
    q = conjugate(cw, x) / x
    assert np.all(np.diff(q) >= -1e-9)


def test_biconjugate_power():
    cw = convex_weight("power:3")
    y = np.linspace(1, 10, 7)
    np.testing.assert_allclose(biconjugate(cw, y), cw(y), rtol=1e-8)


# ------------------------------------------------------------------ omega conditions

def test_log_power_two_conditions():
    c = check_omega_conditions(weight_function("log_power:2"))
    for k in ("omega0", "omega1", "omega3", "omega4", "omega5", "omega1'"):
        assert c[k].holds, k
    assert c["omega6"].fails


def test_linear_weight():
    c = check_omega_conditions(weight_function("linear"))
    assert c["omega2"].holds and c["omega5"].fails
    assert c["omega6"].holds and c["omega6"].context["H"] == 2.0


def test_log_weight_fails_omega3():
    assert check_omega_conditions(weight_function("log"))["omega3"].fails


@pytest.mark.parametrize("s", [1.5, 3.0])
def test_log_power_never_satisfies_omega6(s):
    assert check_omega_conditions(weight_function(f"log_power:{s}"))["omega6"].fails


def test_gevrey_weight_satisfies_omega6():
    v = check_omega_conditions(weight_function("gevrey_weight:2"))["omega6"]
    assert v.holds and v.context["H"] == 4.0


def test_doubling_shift_log_power():
    # (u + l)^2 = 2 u^2  =>  l = (sqrt 2 - 1) u
    u = np.array([1.0, 5.0, 10.0])
    np.testing.assert_allclose(doubling_shift(weight_function("log_power:2"), u), (np.sqrt(2) - 1) * u,
                               rtol=1e-12)


def test_unknown_weight_name():
    with pytest.raises(SchemaError):
        weight_function("nope")
    with pytest.raises(WeightlabError):
        weight_function("log_power:1")


def test_short_grid_rejected():
    with pytest.raises(GridTooShort):
        WeightFunction(lambda u: u, "log", t_max=1e3)


def test_table_loader_shifts_and_notes(tmp_path):
    t = np.geomspace(0.5, 1e8, 200)
    om = np.log(t) ** 2 + 0.5
    path = tmp_path / "w.csv"
    path.write_text("t,omega\n" + "".join(f"{float(a)!r},{float(b)!r}\n" for a, b in zip(t, om)))
    w = load_table(path)
    assert w(1.0) == pytest.approx(0.0, abs=1e-12)
    assert "shift" in w.note
    ref = weight_function("log_power:2")
    tt = np.geomspace(2, 1e7, 20)
    np.testing.assert_allclose(w(tt), ref(tt), rtol=5e-3)  # piecewise-linear interpolation


def test_table_loader_schema(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("t,omega\n1,a\n")
    with pytest.raises(SchemaError):
        load_table(path)


# ------------------------------------------------------------------ matrices

def test_associated_matrix_s2_closed_form():
    grid = [0.5, 1, 2, 4]
    mx = associated_matrix(weight_function("log_power:2"), grid, 64)
    p = np.arange(65.0)
    for l, row in zip(grid, mx.rows):
        np.testing.assert_allclose(row.logM, l * p ** 2 / 4, rtol=1e-12, atol=1e-12)
        assert row.logM[0] == 0.0


def test_omega_rows_mg_with_doubled_index():
    w = weight_function("log_power:1.5")
    grid = [0.5, 1, 2, 4]
    rows = dict(zip(grid, associated_rows(w, grid, 48)))
    for l in grid[:-1]:
        a, b = rows[l].logM, rows[2 * l].logM
        for j in range(49):
            k = np.arange(0, 49 - j)
            assert np.all(a[j + k] <= b[j] + b[k] + 1e-9 * (1 + np.abs(a[j + k])))


def test_phi_rows_tlogt_values():
    row = phi_rows(convex_weight("tlogt"), [2.0], 32)[0]
    p = np.arange(1, 33.0)
    from weightlab.seqcore import log_factorial
    np.testing.assert_allclose(row.logM[1:] - log_factorial(32)[1:], 2 * p * np.log(2 * p), rtol=1e-12)
    assert row.logM[0] == 0.0


def test_phi_matrix_rows_monotone_and_strictly_separated():
    mx = phi_matrix(convex_weight("power:2"), [0.5, 1, 2], 64)
    for a, b in zip(mx.rows, mx.rows[1:]):
        assert np.all(a.logM <= b.logM)
        assert relate(a, b).kind is RelationKind.TRIANGLE


def test_phi_mg_examples():
    v = check_phi_mg(convex_weight("tlogt"))
    assert v.holds and v.constant == pytest.approx(2 * np.log(2))
    assert check_phi_mg(convex_weight("power:2")).fails
    gw = conjugate_of(weight_function("gevrey_weight:2").convex)
    assert check_phi_mg(gw).trend is not Trend.FAILS


@settings(max_examples=25, deadline=None)
@given(st.floats(1.2, 4.0), st.floats(0.1, 20.0))
def test_conjugate_dominates_every_affine_minorant(s, x):
    cw = weight_function(f"log_power:{s}").convex
    val = float(conjugate(cw, x))
    y = np.linspace(0, 40, 400)
    assert np.all(x * y - cw(y) <= val + 1e-9 * max(1.0, val))
