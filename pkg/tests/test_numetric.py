import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nugap.boundary import BoundaryFunction
from nugap.errors import DomainError, InconclusiveError, NormalizationError, ShapeMismatchError
from nugap.ncf import CoprimePair, normalized_coprime_factorization
from nugap.numetric import (
    Branch,
    Case,
    NuOptions,
    Route,
    closed_form_pole_uncertainty,
    closed_form_zero_uncertainty,
    cross_gram,
    lemma_grid,
    lemma_positivity_check,
    nu_metric,
    nu_metric_fixed_rho,
    parallel_residual,
    zero_uncertainty_gram,
)
from nugap.plantcore import DelayRationalPlant
from nugap.windex import RadiusSchedule

SHORT = NuOptions(schedule=RadiusSchedule.geometric(1 - 2.0**-15))


def zero_plant(T, b, a):
    return DelayRationalPlant.from_coefficients(T, [-a, 1], [-b, 1])


def pole_plant(T, a):
    return DelayRationalPlant.from_coefficients(T, [0, 1], [-a, 1])


def factor(P):
    return normalized_coprime_factorization(P)


def test_closed_form_examples():
    v, c = closed_form_zero_uncertainty(1, 1, 3, 3.2)
    assert c.case is Case.CASE1
    assert c.discriminant == pytest.approx(8 * 9.24 - 4)
    assert v == pytest.approx(0.2 / (math.sqrt(2) * (math.sqrt(8) + math.sqrt(9.24))))
    assert v == pytest.approx(0.02410, abs=1e-5)
    v, c = closed_form_zero_uncertainty(1, 1, 0.5, 0.6)
    assert c.case is Case.CASE2
    assert c.discriminant < 0
    assert v == pytest.approx(0.1 / (math.sqrt(1.25) * math.sqrt(1.36)))
    assert v == pytest.approx(0.07670, abs=1e-5)
    assert closed_form_zero_uncertainty(1, 1, 3, 3)[0] == 0
    assert closed_form_zero_uncertainty(1, 1, 0.5, 0.5)[0] == 0
    with pytest.raises(DomainError):
        closed_form_zero_uncertainty(1, 1, 1, 2)


def test_pole_closed_form_examples():
    assert closed_form_pole_uncertainty(1, 1) == 0
    assert closed_form_pole_uncertainty(1, 1.05) == pytest.approx(0.017247, abs=1e-6)
    assert closed_form_pole_uncertainty(2, 2.1) == pytest.approx(0.017246, abs=1e-6)
    with pytest.raises(DomainError):
        closed_form_pole_uncertainty(0, 1)


def test_cross_gram_examples():
    p1, p2 = factor(zero_plant(1, 1, 3)), factor(zero_plant(1, 1, 3.2))
    w = np.linspace(-30, 30, 61)
    assert np.allclose(cross_gram(p1, p1)(1j * w), 1)
    # on the axis the closed-form display and the pipeline agree
    got = cross_gram(p1, p2)(np.array([1j]))[0]
    want = zero_uncertainty_gram(1j, 1, 1, 3, 3.2)
    assert abs(got - want) <= 1e-12
    negN = CoprimePair(
        BoundaryFunction(lambda s: -p1.N(s), "halfplane"), p1.D,
        BoundaryFunction(lambda s: -p1.N(s), "halfplane"), p1.D,
    )
    s = 1j * w
    assert np.allclose(cross_gram(p1, negN)(s), np.abs(p1.D(s)) ** 2 - np.abs(p1.N(s)) ** 2)


def test_parallel_residual_examples():
    p1, p2 = factor(zero_plant(1, 1, 3)), factor(zero_plant(1, 1, 3.2))
    assert parallel_residual(p1, p1).expr.is_zero()
    v = parallel_residual(p1, p2)(np.array([0.0]))[0]
    assert v == pytest.approx((-0.2) * (-1) / (math.sqrt(10) * math.sqrt(11.24)), rel=1e-12)
    # D1 = D2 leaves (N2 - N1) D1
    other = CoprimePair(p2.N, p1.D, p2.N, p1.D)
    s = np.array([0.3 + 1j, 2j])
    assert np.allclose(parallel_residual(p1, other)(s), (p2.N(s) - p1.N(s)) * p1.D(s))


def test_identical_plants_zero():
    P = zero_plant(1, 1, 3)
    res = nu_metric(P, P, SHORT)
    assert res.value == 0.0
    assert res.branch is Branch.NORM and res.winding == 0
    assert nu_metric_fixed_rho(P, P, 0.9, SHORT).value == 0.0


def test_zero_uncertainty_pipeline():
    res = nu_metric(zero_plant(1, 1, 3), zero_plant(1, 1, 3.2))
    want, _ = closed_form_zero_uncertainty(1, 1, 3, 3.2)
    assert res.value == pytest.approx(want, abs=1e-6)
    assert res.branch is Branch.NORM and res.invertible and res.winding == 0
    assert res.route is Route.LIMIT and res.rho is None
    for rho in (0.9, 0.99):
        fr = nu_metric_fixed_rho(zero_plant(1, 1, 3), zero_plant(1, 1, 3.2), rho)
        assert fr.route is Route.FIXED_RHO and fr.rho == rho
        assert fr.value == pytest.approx(res.value, abs=1e-12)


def test_delay_mismatch_is_unity():
    res = nu_metric(pole_plant(1, 1), pole_plant(1.5, 1))
    assert res.value == 1 and res.branch is Branch.UNITY
    assert not res.invertible
    res = nu_metric_fixed_rho(pole_plant(1, 1), pole_plant(1.5, 1), 0.99)
    assert res.value == 1


def test_nonzero_winding_is_unity():
    # stable vs unstable first-order plants: no winding-zero cross gram
    res = nu_metric(DelayRationalPlant.from_coefficients(0, [1], [1, 1]),
                    DelayRationalPlant.from_coefficients(0, [-4], [-1, 1]), SHORT)
    assert res.branch is Branch.UNITY and res.value == 1
    assert res.invertible and res.winding != 0


def test_hovering_margin_is_inconclusive():
    base = nu_metric(zero_plant(1, 1, 3), zero_plant(1, 1, 3.2), SHORT)
    margin = min(m for _, m in base.margin_curve[-4:])
    opts = NuOptions(delta=margin, schedule=SHORT.schedule)
    with pytest.raises(InconclusiveError) as err:
        nu_metric(zero_plant(1, 1, 3), zero_plant(1, 1, 3.2), opts)
    assert err.value.diagnostics["margin"] == pytest.approx(margin)


def test_rho_validation():
    with pytest.raises(ValueError):
        nu_metric_fixed_rho(zero_plant(1, 1, 3), zero_plant(1, 1, 3), 1.0)


def test_result_serialization_is_deterministic():
    a = nu_metric(zero_plant(1, 1, 0.5), zero_plant(1, 1, 0.6), SHORT).to_dict()
    b = nu_metric(zero_plant(1, 1, 0.5), zero_plant(1, 1, 0.6), SHORT).to_dict()
    text = json.dumps(a)
    assert text == json.dumps(b)
    back = json.loads(text)
    assert back["value"] == a["value"]
    assert back["options"]["schedule"]["radii"] == list(SHORT.schedule.radii)
    assert back["options"]["delta"] == SHORT.delta


def block_pair(*pairs):
    def diag(name):
        def ev(s):
            out = np.zeros((len(s), 2, 2), dtype=complex)
            for k, pr in enumerate(pairs):
                out[:, k, k] = getattr(pr, name)(s)
            return out

        return ev

    return CoprimePair.from_callables(diag("N"), diag("D"), diag("Ntilde"), diag("Dtilde"), 2, 2)


def test_mimo_block_diagonal_metric():
    a1, a2 = factor(zero_plant(1, 1, 3)), factor(zero_plant(1, 1, 3.2))
    b1, b2 = factor(pole_plant(1, 1)), factor(pole_plant(1, 1.05))
    res = nu_metric(block_pair(a1, b1), block_pair(a2, b2), SHORT)
    want = max(closed_form_zero_uncertainty(1, 1, 3, 3.2)[0], closed_form_pole_uncertainty(1, 1.05))
    assert res.branch is Branch.NORM
    assert res.value == pytest.approx(want, abs=1e-6)


def test_mimo_requires_normalized_factors():
    a = factor(zero_plant(1, 1, 3))
    with pytest.raises(NormalizationError):
        nu_metric(block_pair(a, a).scaled(2.0), block_pair(a, a), SHORT)
    with pytest.raises(ShapeMismatchError):
        nu_metric(block_pair(a, a), zero_plant(1, 1, 3), SHORT)


def test_lemma_check_examples():
    assert len(lemma_grid()) >= 100_000
    holds, m = lemma_positivity_check(1, 1, 3, 3)
    assert holds and m > 0
    assert lemma_positivity_check(1, 1, 3, 3.2)[0]
    assert lemma_positivity_check(1, 1, 0.5, 0.6)[0]
    # far-apart zeros: diagnostic only, but the value must be finite
    assert math.isfinite(lemma_positivity_check(1, 1, 3, -3.2)[1])


family = st.tuples(st.floats(0.5, 2.0), st.floats(2.5, 5.0), st.floats(-0.05, 0.05))


@settings(max_examples=6, deadline=None)
@given(family)
def test_symmetry_and_range(params):
    T, a, da = params
    P1, P2 = zero_plant(T, 1, a), zero_plant(T, 1, a + da)
    d12 = nu_metric(P1, P2, SHORT)
    d21 = nu_metric(P2, P1, SHORT)
    assert 0 <= d12.value <= 1
    assert abs(d12.value - d21.value) <= 1e-9
    if d12.branch is Branch.UNITY:
        assert d12.value == 1
    else:
        assert d12.winding == 0 and d12.invertible
