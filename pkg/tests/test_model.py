from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lesliedelay.errors import SingularDenominatorError
from lesliedelay.model import (
    REFERENCE_PARAMS,
    ModelParams,
    equilibrium,
    global_stability_hint,
    linearize,
    reaction,
    zero_delay_coefficients,
    zero_delay_stable,
)

valid_params = st.builds(
    ModelParams,
    r1=st.floats(0.05, 5),
    r2=st.floats(0.05, 5),
    a=st.floats(0.0, 5),
    K=st.floats(0.05, 5),
    gamma=st.floats(0.05, 5),
    m=st.floats(0.0, 0.99),
    l=st.floats(0.2, 5),
    d1=st.floats(0.01, 2),
    d2=st.floats(0.01, 2),
)


def test_reference_equilibrium():
    e = equilibrium(REFERENCE_PARAMS)
    assert round(e.u_star, 4) == 0.4358
    assert round(e.v_star, 4) == 0.3181


def test_no_predation_equilibrium():
    p = ModelParams(0.8, 1.0, 0.0, 0.7, 1.0, 0.27, 2.0, 0.3, 0.4)
    e = equilibrium(p)
    assert e.u_star == pytest.approx(0.7)
    assert e.v_star == pytest.approx(0.73 * 0.7)


def test_prey_density_rises_with_refuge():
    us = [equilibrium(ModelParams(0.8, 1.0, 1.3, 0.7, 1.0, m, 2.0, 0.3, 0.4)).u_star for m in np.linspace(0, 0.999, 200)]
    assert np.all(np.diff(us) > 0)
    assert us[-1] < 0.7


@pytest.mark.parametrize(
    "field, value",
    [("r1", 0.0), ("K", -1.0), ("d2", 0.0), ("l", -2.0), ("m", 1.0), ("m", -0.1), ("a", -0.5), ("r2", math.nan)],
)
def test_invalid_parameters_rejected(field, value):
    kw = REFERENCE_PARAMS.as_dict()
    kw[field] = value
    with pytest.raises(ValueError):
        ModelParams(**kw)


def test_linearization_structure():
    p = REFERENCE_PARAMS
    e = equilibrium(p)
    lin = linearize(p)
    assert lin.B[0, 0] == pytest.approx(-0.8 * e.u_star / 0.7)
    assert round(lin.B[0, 0], 4) == -0.4981
    assert np.count_nonzero(lin.B) == 1
    assert np.count_nonzero(lin.A) == 1 and lin.A[0, 1] == pytest.approx(-1.3 * 0.73 * e.u_star)
    assert np.all(lin.C[0] == 0)
    assert lin.C[1, 0] == pytest.approx(0.73 * 1.0) and lin.C[1, 1] == -1.0


def test_linearization_no_refuge_unit_quality():
    p = ModelParams(0.8, 1.7, 1.3, 0.7, 1.0, 0.0, 2.0, 0.3, 0.4)
    assert linearize(p).C[1, 0] == pytest.approx(1.7)


@given(valid_params)
def test_equilibrium_invariants(p):
    e = equilibrium(p)
    assert e.u_star > 0 and e.v_star > 0
    assert e.v_star == p.gamma * (1 - p.m) * e.u_star
    du, dv = reaction(p, e.u_star, e.v_star, e.u_star, e.u_star, e.v_star)
    scale = p.r1 * e.u_star + p.r2 * e.v_star
    assert abs(du) <= 1e-14 * scale and abs(dv) <= 1e-14 * scale
    a12 = linearize(p).A[0, 1]
    assert a12 < 0 if p.a > 0 else a12 == 0


@given(valid_params)
@settings(max_examples=50)
def test_zero_delay_stable_everywhere(p):
    assert zero_delay_stable(p, 20)
    A, _ = zero_delay_coefficients(p, 0)
    assert A == pytest.approx(p.r1 * equilibrium(p).u_star / p.K + p.r2)


def test_zero_delay_stable_reference():
    assert zero_delay_stable(REFERENCE_PARAMS, 10)
    with pytest.raises(ValueError):
        zero_delay_stable(REFERENCE_PARAMS, -1)


def test_global_stability_hint():
    assert global_stability_hint(REFERENCE_PARAMS)
    kw = REFERENCE_PARAMS.as_dict()
    assert global_stability_hint(ModelParams(**{**kw, "a": 0.0}))
    assert not global_stability_hint(ModelParams(**{**kw, "r1": 1e-6}))


def test_reaction_predator_free():
    p = REFERENCE_PARAMS
    du, dv = reaction(p, 0.5, 0.0, 0.45, 0.44, 0.0)
    assert dv == 0
    assert du == pytest.approx(0.8 * 0.5 * (1 - 0.45 / 0.7))


def test_reaction_hand_evaluation():
    p = REFERENCE_PARAMS
    u, v, u1, u2, v2 = 0.5, 0.3, 0.45, 0.44, 0.32
    du, dv = reaction(p, u, v, u1, u2, v2)
    assert du == pytest.approx(0.8 * 0.5 * (1 - 0.45 / 0.7) - 1.3 * 0.73 * 0.5 * 0.3, rel=1e-14)
    assert dv == pytest.approx(1.0 * 0.3 * (1 - 0.32 / (1.0 * 0.73 * 0.44)), rel=1e-14)


@pytest.mark.parametrize("u_lag2", [0.0, -0.1, 1e-13])
def test_reaction_singular_denominator(u_lag2):
    with pytest.raises(SingularDenominatorError):
        reaction(REFERENCE_PARAMS, 0.5, 0.3, 0.45, u_lag2, 0.32)
    with pytest.raises(ZeroDivisionError):
        reaction(REFERENCE_PARAMS, 0.5, 0.3, 0.45, u_lag2, 0.32)
