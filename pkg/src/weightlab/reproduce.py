"""The worked computations regenerated end to end: conjugates, matrix equivalences,
the t log t / Gevrey identification, Phi-matrix mg constants and the omega_2 dichotomy.
"""
from __future__ import annotations

import numpy as np

from .matrix import DEFAULT_GRID, check_matrix_condition, make_gevrey, make_omega, make_phi, relate_matrices
from .report import Report
from .seqcore import check_mg, derive, relate
from .weightfn import (R, associated_rows, check_omega_conditions, conjugate,
                       conjugate_power_closed_form, convex_weight, phi_rows, weight_function)

S_VALUES = (1.5, 2.0, 3.0)
CONJ_X = (0.5, 1.0, 2.0, 4.0, 8.0)
# Omega rows on a half-step grid so that 2^(s-1) l^s has nearby partners
OMEGA_GRID = tuple(2.0 ** (i / 2) for i in range(-8, 17))
UNIVERSE_OMEGA = (1.0, 2.0, 4.0, 8.0)
UNIVERSE_PHI = (1.0, 2.0, 4.0)
GEVREY_ALIGNED = (0.5, 1.0, 2.0, 3.0)
N_REPRO = 64


def step_conjugates(tol: float = 1e-6) -> dict:
    rows, worst = [], 0.0
    for s in S_VALUES:
        cw = weight_function(f"log_power:{s:g}").convex
        x = np.array(CONJ_X)
        num = conjugate(cw, x)
        ref = conjugate_power_closed_form(s, x)
        rel = np.abs(num - ref) / np.abs(ref)
        worst = max(worst, float(rel.max()))
        rows.append({"s": s, "R": R(s), "x": list(CONJ_X), "numeric": num.tolist(), "closed_form": ref.tolist()})
    return {"passed": worst <= tol, "measured": {"max_rel_err": worst, "rows": rows},
            "expected": f"x^(s/(s-1)) R(s) within {tol:g} relative"}


def omega_phi_pair(s: float, N: int = N_REPRO):
    O = make_omega(weight_function(f"log_power:{s:g}"), OMEGA_GRID, N)
    P = make_phi(convex_weight(f"conj_log_power:{s:g}"), DEFAULT_GRID, N)
    return O, P


def step_equivalence(N: int = N_REPRO) -> dict:
    out, ok = [], True
    for s in S_VALUES:
        O, P = omega_phi_pair(s, N)
        w = weight_function(f"log_power:{s:g}")
        cw = convex_weight(f"conj_log_power:{s:g}")
        rec = {"s": s}
        for flavor in ("roumieu", "beurling"):
            rel = relate_matrices(O, P, flavor, universe_a=UNIVERSE_OMEGA, universe_b=UNIVERSE_PHI)
            rec[flavor] = rel.kind
            ok &= rel.kind == "approx"
        # M^Phi {⪯} Omega: for each a the grid witness must not exceed 2^(s-1) a^s
        rel = relate_matrices(O, P, "roumieu", universe_a=UNIVERSE_OMEGA, universe_b=UNIVERSE_PHI)
        back = {e.x: e.witness[0] for e in rel.backward.per_x}
        bound = {a: 2 ** (s - 1) * a ** s for a in back}
        rec["roumieu_witness"] = back
        rec["roumieu_bound"] = bound
        ok &= all(back[a] <= bound[a] * (1 + 1e-12) for a in back)
        # Omega (⪯) M^Phi: for each a the grid witness must not exceed a^s
        rel = relate_matrices(O, P, "beurling", universe_a=UNIVERSE_OMEGA, universe_b=UNIVERSE_PHI)
        fwd = {e.x: e.witness[0] for e in rel.forward.per_x}
        rec["beurling_witness"] = fwd
        ok &= all(fwd[a] <= a ** s * (1 + 1e-12) for a in fwd)
        # the explicit maps certify on off-grid rows
        direct = []
        for a in UNIVERSE_PHI:
            phi_row = phi_rows(cw, [a], N)[0]
            up = associated_rows(w, [2 ** (s - 1) * a ** s], N)[0]
            down = associated_rows(w, [a ** s], N)[0]
            r1, r2 = relate(phi_row, up).preceq, relate(down, phi_row).preceq
            direct.append({"a": a, "phi_below_omega": r1, "omega_below_phi": r2})
            ok &= r1 and r2
        rec["explicit_maps"] = direct
        out.append(rec)
    return {"passed": bool(ok), "measured": out,
            "expected": "approx in both flavors; witnesses within n = 2^(s-1) l^s and n = l^s"}


def step_gevrey(N: int = N_REPRO) -> dict:
    P = make_phi(convex_weight("tlogt"), GEVREY_ALIGNED, N)
    G = make_gevrey(GEVREY_ALIGNED, N)
    kinds = {}
    consts = {}
    for flavor in ("roumieu", "beurling"):
        rel = relate_matrices(P, G, flavor)
        kinds[flavor] = rel.kind
        consts[flavor] = max(e.constant for e in rel.forward.per_x + rel.backward.per_x)
    ok = all(k == "approx" for k in kinds.values()) and all(np.isfinite(c) for c in consts.values())
    return {"passed": bool(ok), "measured": {"kind": kinds, "max_log_constant": consts},
            "expected": "approx in both flavors with finite constants"}


def step_phi_mg(tol: float = 1e-9, N: int = N_REPRO) -> dict:
    P = make_phi(convex_weight("tlogt"), DEFAULT_GRID, N)
    rows, worst = [], 0.0
    for a, row in zip(P.lambdas, P.rows):
        c = check_mg(derive(row)[0]).constant
        err = abs(c - a * np.log(2.0))
        worst = max(worst, err)
        rows.append({"a": a, "constant": c, "expected": a * np.log(2.0)})
    return {"passed": worst <= tol, "measured": {"max_abs_err": worst, "rows": rows},
            "expected": f"a log 2 within {tol:g}"}


def step_omega2(N: int = N_REPRO) -> dict:
    w = weight_function("log_power:2")
    conds = check_omega_conditions(w)
    O = make_omega(w, DEFAULT_GRID, N)
    mg = check_matrix_condition(O, "mg", "roumieu")
    rows_fail = [check_mg(r).trend.value for r in O.rows]
    doubled = all(np.isclose(e.witness[0], 2 * e.x) for e in mg.per_x)
    ok = (conds["omega6"].fails and mg.holds and doubled
          and all(t == "fails" for t in rows_fail)
          and all(abs(e.constant) <= 1e-9 for e in mg.per_x))
    return {"passed": bool(ok),
            "measured": {"conditions": {k: v.trend.value for k, v in conds.items()},
                         "matrix_mg": mg, "row_mg": rows_fail},
            "expected": "omega6 fails; {mg} holds with y = 2l and C = 1; every row fails mg"}


STEPS = (
    ("conjugate_closed_form", step_conjugates),
    ("omega_phi_equivalence", step_equivalence),
    ("tlogt_gevrey", step_gevrey),
    ("phi_row_mg_constant", step_phi_mg),
    ("omega2_dichotomy", step_omega2),
)


def run_reproduce(config: dict | None = None) -> Report:
    rep = Report("reproduce", {}, [], dict(config or {}, n=N_REPRO))
    for name, fn in STEPS:
        try:
            res = fn()
        except Exception as exc:  # a failing step is recorded and the suite continues
            res = {"passed": False, "measured": None, "expected": None, "error": f"{type(exc).__name__}: {exc}"}
        rep.add(name, "step", res, {"n": N_REPRO})
    return rep
