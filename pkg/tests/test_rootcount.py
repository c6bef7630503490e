from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lesliedelay import quasipoly as qp
from lesliedelay import rootcount
from lesliedelay.model import REFERENCE_PARAMS


@given(st.floats(-2.0, 2.0), st.floats(0.1, 3.0))
@settings(max_examples=60, deadline=None)
def test_polynomial_case_matches_np_roots(alpha, beta):
    # Zero delays reduce D to p0 + p1 + p2 + p3, here lam^2 + alpha lam + beta.
    q = qp.QuasiPolynomial(0, (beta, alpha, 1.0), (0.0,), (0.0,), (0.0,))
    roots = np.roots([1.0, alpha, beta])
    if np.any(np.abs(roots.real) < 1e-6):
        return
    box = (0.0, 10.0, -10.0, 10.0)
    assert rootcount.count_unstable(q, 0.0, 0.0, box=box) == int(np.sum(roots.real > 0))


def test_root_free_radius_bound():
    q = qp.build(REFERENCE_PARAMS, 0)
    R = rootcount.root_free_radius(q)
    # Outside the radius in the closed right half-plane the dominant term wins.
    th = np.linspace(-np.pi / 2, np.pi / 2, 400)
    for r in (R, 2 * R, 10 * R):
        lam = r * np.exp(1j * th)
        P0, P1, P2, P3 = q.polys_at(lam)
        assert np.all(np.abs(P0) > np.abs(P1) + np.abs(P2) + np.abs(P3))


def test_crossing_box_agrees_with_full_count():
    for tau in ((3.62, 1.435), (10.0, 3.0), (1.74, 0.67)):
        for n in range(4):
            q = qp.build(REFERENCE_PARAMS, n)
            assert rootcount.count_unstable(q, *tau) == rootcount.count_unstable(q, *tau, box=rootcount.CROSSING_BOX)


def test_contour_through_root_detected():
    q = qp.QuasiPolynomial(0, (1.0, 0.0, 1.0), (0.0,), (0.0,), (0.0,))
    with pytest.raises(rootcount.ContourError):
        rootcount.count_unstable(q, 0.0, 0.0, box=(0.0, 2.0, -2.0, 2.0), points=400)
