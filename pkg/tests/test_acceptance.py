"""Acceptance gate: one test per criterion, each at its stated tolerance and time budget.

Run with ``pytest tests/test_acceptance.py -v`` (the verdict lines appear in the
terminal summary) or ``python3 tests/test_acceptance.py``.
"""
import time

import pytest

from bowtie_mech.verify import run_suite

SEED = 0
RESULTS = {}   # criterion number -> (passed, detail)


def _run(name):
    t0 = time.perf_counter()
    r = run_suite(name, seed=SEED)
    return r.residuals, time.perf_counter() - t0


def _record(n, title, checks, elapsed, budget=None):
    """checks: list of (label, value, bound, kind) with kind '<', '>=' or '=='."""
    ok = True
    parts = []
    for label, value, bound, kind in checks:
        good = {"<": value < bound, ">=": value >= bound, "==": value == bound}[kind]
        ok = ok and good
        parts.append(f"{label}={value:.3g} ({kind} {bound:g})")
    if budget is not None:
        ok = ok and elapsed < budget
        parts.append(f"time={elapsed:.2f}s (< {budget:g}s)")
    else:
        parts.append(f"time={elapsed:.2f}s")
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title}: " + ", ".join(parts)
    RESULTS[n] = (ok, line)
    print(line)
    assert ok, line


def test_criterion_01_axioms():
    r, dt = _run("axioms")
    _record(1, "matched-pair axioms", [("max_residual", r["max"], 1e-12, "<")], dt, 5)


def test_criterion_02_bracket_commutator():
    r, dt = _run("bracket_commutator")
    _record(2, "bracket vs commutator", [("max_error", r["max_error"], 1e-12, "<")], dt, 5)


def test_criterion_03_group():
    r, dt = _run("group")
    _record(3, "group compatibility and factorization",
            [(k, r[k], 1e-10, "<") for k in sorted(r)], dt, 10)


def test_criterion_04_derivatives():
    r, dt = _run("derivatives")
    checks = [(k, r[k], 1e-6, "<") for k in sorted(r) if k.endswith("_err")]
    checks += [(k, r[k], 1.8, ">=") for k in sorted(r) if k.endswith("_order")]
    _record(4, "derivative consistency", checks, dt, 10)


def test_criterion_05_duality():
    r, dt = _run("duality")
    checks = [(k, r[k], 1e-14, "<") for k in ("phi_star_B", "phi_star_Y", "x_star_psi", "a_star", "b_star",
                                              "b_star_vs_transpose")]
    # negative control: the uncorrected sign of b* must fail the same pairing
    checks.append(("uncorrected_b_star_error", r["uncorrected_b_star_error"], 1e-14, ">="))
    _record(5, "duality pairings", checks, dt)


def test_criterion_06_energy():
    r, dt = _run("energy")
    _record(6, "energy conservation", [("max|E-2|", r["max_abs_E_minus_2"], 1e-8, "<"),
                                       ("max_pairing", r["max_pairing"], 1e-12, "<")], dt, 10)


def test_criterion_07_oracle_trajectory():
    r, dt = _run("oracle_trajectory")
    _record(7, "oracle trajectory", [(k, r[k], 1e-10, "<") for k in sorted(r)], dt, 10)


def test_criterion_08_semidirect():
    r, dt = _run("semidirect")
    _record(8, "semidirect degeneration (exact)", [(k, r[k], 0.0, "==") for k in sorted(r)], dt)


def test_criterion_09_trivialization():
    r, dt = _run("trivialization")
    _record(9, "trivialization and embedding", [("roundtrip", r["roundtrip"], 1e-11, "<"),
                                                ("forward_vs_oracle", r["forward_vs_oracle"], 1e-11, "<"),
                                                ("embedding_hom", r["embedding_hom"], 1e-10, "<")], dt)


def test_criterion_10_rk4_order():
    r, dt = _run("rk4_order")
    _record(10, "RK4 self-convergence", [("min_order", r["min_order"], 3.8, ">=")], dt)


def test_criterion_11_adjoint():
    r, dt = _run("adjoint")
    _record(11, "adjoint action", [("max_error", r["max_error"], 1e-10, "<")], dt)


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-s"]))
