"""Acceptance suite: one test per reference criterion, each printing a PASS/FAIL line."""
from __future__ import annotations

import math

import pytest

from lesliedelay import reproduce as rp


@pytest.fixture
def report(capsys):
    def emit(check, ok):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {check.number}. {check.title} ({check.seconds:.1f} s)")
            for line in check.lines:
                print(f"        {line}")

    return emit


def _close(got, ref, tol):
    return len(got) == len(ref) and all(abs(a - b) <= tol for a, b in zip(got, ref))


def test_f_roots_match_reference(report):
    c = rp.check_f_roots()
    m = c.measured
    ok = (
        _close(m[0], (0.2587, 0.6682, 0.7697, 1.1791), 2e-3)
        and _close(m[1], (0.184, 0.5264, 0.8607, 1.189), 2e-3)
        and _close(m[2], (0.8968, 1.171), 2e-3)
        and _close(m[3], (0.6638, 0.9798), 2e-3)
        and all(len(m[n]) == 0 for n in range(4, 11))
        and c.seconds < 5.0
    )
    report(c, ok and c.passed)
    assert ok and c.passed


def test_endpoint_angles_and_bits(report):
    c = rp.check_endpoints()
    ok = _close(c.measured["angles"], (math.pi, math.pi, math.pi, 0.0), 1e-3)
    ok &= c.measured["bits"] == ((1, 1), (1, 0))
    report(c, ok and c.passed)
    assert ok and c.passed


def test_curve_residuals(report):
    c = rp.check_residuals()
    ok = c.measured["samples"] == 10_000 and c.measured["max_residual"] < 1e-8 and c.seconds < 10.0
    report(c, ok and c.passed)
    assert ok and c.passed


def test_crossing_directions_match_root_counts(report):
    c = rp.check_directions()
    ok = sum(line.startswith("ok") and "count change" in line for line in c.lines) == 20 and c.seconds < 60.0
    report(c, ok and c.passed)
    assert ok and c.passed


@pytest.fixture(scope="module")
def hh_check():
    return rp.check_hh()


def test_double_hopf_point(report, hh_check):
    c = hh_check
    pt = c.measured.get("hh")
    ok = (
        pt is not None
        and abs(pt.tau1_star - 3.9042) <= 5e-3
        and abs(pt.tau2_star - 1.406) <= 5e-3
        and abs(pt.omega1 - 0.61081) <= 1e-3
        and abs(pt.omega2 - 0.94964) <= 1e-3
        and pt.resonance_flag == "none"
        and c.seconds < 10.0
    )
    report(c, ok and c.passed)
    assert ok and c.passed


def test_unfolding_parameters(report, hh_check):
    c = rp.check_unfolding(hh_check.measured.get("hh"))
    m = c.measured
    ref = {"eps1": 1, "eps2": -1, "b": 0.4946, "c": -11.5623, "d": -1, "d_minus_bc": 4.7192}
    ok = all(abs(m[k] - v) <= 5e-4 for k, v in ref.items())
    ok &= _close(m["slopes"], (-13.6972, 2.8383, 1.2106, 0.6790, 0.6790, -3.5180, -13.6972, 2.8381), 5e-3)
    report(c, ok and c.passed)
    assert ok and c.passed


@pytest.mark.slow
def test_stability_and_simulation(report):
    c = rp.check_stability_sim()
    ok = c.seconds < 300.0
    report(c, ok and c.passed)
    assert ok and c.passed


@pytest.mark.slow
def test_torus_and_chaos_classification(report):
    c = rp.check_torus()
    ok = c.measured[(3.82, 1.4345)] == "torus2" and c.measured[(3.905, 1.4136)] == "torus3-or-chaos"
    ok &= c.seconds < 600.0
    report(c, ok and c.passed)
    assert ok and c.passed


def test_property_suites(report):
    c = rp.check_properties()
    m = c.measured
    ok = m["drift"] < 1e-12 and m["order_t"] >= 3.5 and m["order_x"] >= 1.9 and m["fd"] < 1e-6
    ok &= len(m["cases"]) == 12
    report(c, ok and c.passed)
    assert ok and c.passed
