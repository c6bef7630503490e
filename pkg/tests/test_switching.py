from __future__ import annotations

import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lesliedelay import quasipoly as qp
from lesliedelay import switching as sw
from lesliedelay.model import REFERENCE_PARAMS


def test_crossing_set_reference_modes():
    iv0 = sw.crossing_set(qp.build(REFERENCE_PARAMS, 0))
    assert [(round(i.a, 3), round(i.b, 3)) for i in iv0] == [(0.259, 0.668), (0.770, 1.179)]
    iv3 = sw.crossing_set(qp.build(REFERENCE_PARAMS, 3))
    assert len(iv3) == 1
    assert iv3[0].a == pytest.approx(0.6638, abs=2e-3) and iv3[0].b == pytest.approx(0.9798, abs=2e-3)
    assert sw.crossing_set(qp.build(REFERENCE_PARAMS, 5)) == []


def test_crossing_interval_bits():
    iv = sw.crossing_set(qp.build(REFERENCE_PARAMS, 0))[0]
    assert (iv.delta1a, iv.delta2a, iv.delta1b, iv.delta2b) == (1, 1, 1, 0)
    q = qp.build(REFERENCE_PARAMS, 0)
    # Endpoints are bisected to 1e-10 in omega.
    assert abs(qp.F(q, iv.a)) < 1e-10 and abs(qp.F(q, iv.b)) < 1e-10


def test_curve_through_double_hopf_point(hh):
    q = qp.build(REFERENCE_PARAMS, 0)
    hits = []
    for sign in (1, -1):
        for j1 in range(3):
            for j2 in range(3):
                t1, t2 = sw.tau_curve(q, hh.omega1, sign, j1, j2)
                hits.append(math.hypot(t1 - 3.9042, t2 - 1.406))
    assert min(hits) < 5e-3


@pytest.mark.parametrize("j1, j2", [(0, 0), (1, 2), (3, -1)])
def test_endpoint_identity(j1, j2):
    q = qp.build(REFERENCE_PARAMS, 0)
    iv = sw.crossing_set(q)[0]
    plus = sw.tau_curve(q, iv.a, 1, j1, j2)
    minus = sw.tau_curve(q, iv.a, -1, j1 + iv.delta1a, j2 - iv.delta2a)
    assert np.allclose(plus, minus, atol=1e-9)
    plus_b = sw.tau_curve(q, iv.b, 1, j1, j2)
    minus_b = sw.tau_curve(q, iv.b, -1, j1 + iv.delta1b, j2 - iv.delta2b)
    assert np.allclose(plus_b, minus_b, atol=1e-9)


@given(st.floats(0.0, 1.0, exclude_min=True, exclude_max=True), st.sampled_from((1, -1)), st.integers(0, 3), st.integers(0, 3))
@settings(max_examples=100)
def test_interior_residual(s, sign, j1, j2):
    q = qp.build(REFERENCE_PARAMS, 0)
    iv = sw.crossing_set(q)[0]
    w = iv.a + s * (iv.b - iv.a)
    t1, t2 = sw.tau_curve(q, w, sign, j1, j2)
    assert abs(qp.eval_D(q, 1j * w, t1, t2)) < 1e-8


def test_segments_invariants(segments):
    assert sorted(segments) == [0, 1, 2, 3]
    for n, segs in segments.items():
        q = qp.build(REFERENCE_PARAMS, n)
        assert [s.key for s in segs] == sorted(s.key for s in segs)
        for s in segs:
            assert np.all(np.diff(s.omega) > 0)
            assert np.all(s.tau >= 0)
            res = np.abs(qp.eval_D(q, 1j * s.omega, s.tau[:, 0], s.tau[:, 1]))
            assert res.max() < 1e-8


def test_window_far_from_curves_is_empty():
    assert sw.generate_segments(qp.build(REFERENCE_PARAMS, 0), (0.01, 0.01)) == []


@pytest.mark.parametrize("window", [(0.0, 0.0), (-1.0, 5.0)])
def test_non_positive_window_rejected(window):
    with pytest.raises(ValueError):
        sw.generate_segments(qp.build(REFERENCE_PARAMS, 0), window)


def test_connectivity_matches_bit_prediction(segments):
    for n, segs in segments.items():
        links = sw.connectivity(segs)
        by_key = {s.key: s for s in segs}
        for ka, kb, tag in links:
            a, b = by_key[ka], by_key[kb]
            ea = a.tau[0] if tag == "a" else a.tau[-1]
            eb = b.tau[0] if tag == "a" else b.tau[-1]
            assert math.dist(ea, eb) < sw.LINK_TOL
            plus, minus = (a, b) if a.sign == 1 else (b, a)
            assert plus.sign == 1 and minus.sign == -1
            assert (minus.j1, minus.j2) == sw.predicted_partner(plus.interval, plus.j1, plus.j2, tag)


def test_leftmost_curve_chain():
    # The (+, 0, 0) branch meets (-, 1, 0) at b and (+, 0, 1) meets (-, 1, 0) at a.
    segs = sw.mode_segments(REFERENCE_PARAMS, (20.0, 20.0), n_max=0)[0]
    links = {(ka[:5], kb[:5], tag) for ka, kb, tag in sw.connectivity([s for s in segs if s.j == 1])}
    sym = links | {(kb, ka, tag) for ka, kb, tag in links}
    assert ((0, 1, 1, 0, 0), (0, 1, -1, 1, 0), "b") in sym
    assert ((0, 1, 1, 0, 1), (0, 1, -1, 1, 0), "a") in sym


def test_csv_export(tmp_path, segments):
    path = tmp_path / "c.csv"
    sw.write_csv(path, segments[0])
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == sw.CSV_COLUMNS
    assert len(rows) - 1 == sum(len(s.samples) for s in segments[0])


def test_half_open_interval_sampling():
    iv = sw.CrossingInterval(0, 1, 0.0, 0.5, None, None, 1, 0)
    w = sw.sample_omegas(iv, 50)
    assert iv.half_open and w[0] == sw.OMEGA_FLOOR and w[-1] == 0.5
