"""Interval measures, Gauss-Jacobi rules, moments, Cauchy transforms."""

import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp, mpf, mpc

from cauchybi import (
    Interval,
    MeasureError,
    SupportError,
    WeightSpec,
    cauchy_transform,
    lebesgue,
    make_measure,
    moment,
)
from cauchybi.measures import jacobi_moment_exact


def tight():
    return mpf(10) ** (-mp.dps + 10)


def test_interval_validation():
    with pytest.raises(MeasureError):
        Interval(1, 1)
    with pytest.raises(MeasureError):
        Interval(2, 1)


def test_interval_geometry():
    iv = Interval(0, 2)
    assert iv.length == 2 and iv.midpoint == 1
    assert iv.contains(0) and not iv.contains(0, closed=False)
    assert Interval(0, 1).gap_to(Interval(2, 3)) == 1
    assert Interval(0, 1).gap_to(Interval("0.5", 3)) == 0
    assert Interval(0, 1).distance_to_point(mpc(2, 0)) == 1
    assert abs(Interval(0, 1).distance_to_point(mpc("0.5", "0.25")) - mpf("0.25")) < tight()


def test_weight_validation():
    with pytest.raises(MeasureError):
        WeightSpec(alpha=-1)
    with pytest.raises(MeasureError):
        WeightSpec(beta="-1.5")
    # polynomial factor with a root inside the interval is rejected
    with pytest.raises(MeasureError):
        make_measure(Interval(0, 1), WeightSpec(poly_factor=(mpf("-0.5"), 1)))


def test_lebesgue_mass_and_moments():
    mu = lebesgue(0, 1)
    assert abs(mu.mass - 1) < tight()
    for k in range(6):
        assert abs(moment(mu, k) - mpf(1) / (k + 1)) < tight()


def test_jacobi_measure_matches_closed_form():
    # weight (x-a)^alpha (b-x)^beta on [-1,1] vs the exact beta-sum moments
    mu = make_measure(Interval(-1, 1), WeightSpec(alpha="0.5", beta="1.5"))
    for k in range(5):
        exact = jacobi_moment_exact(k, mpf("1.5"), mpf("0.5"))
        assert abs(moment(mu, k) - exact) < tight()


def test_polynomial_factor_folded_into_weights():
    # w(x) = (1 + x^2) on [0,1]: moment k is 1/(k+1) + 1/(k+3)
    mu = make_measure(Interval(0, 1), WeightSpec(poly_factor=(1, 0, 1)))
    for k in range(4):
        exact = mpf(1) / (k + 1) + mpf(1) / (k + 3)
        assert abs(moment(mu, k) - exact) < tight()


def test_quadrature_nodes_interior_weights_positive():
    mu = make_measure(Interval(2, 3), WeightSpec(alpha="0.25"), node_count=32)
    assert len(mu.nodes) == 32
    assert all(mpf(2) < x < mpf(3) for x in mu.nodes)
    assert all(w > 0 for w in mu.weights)
    assert list(mu.nodes) == sorted(mu.nodes)


def test_quadrature_exact_for_high_degree():
    # N-point Gauss integrates degree 2N-1 exactly
    mu = lebesgue(-1, 1, node_count=16)
    k = 31
    assert abs(moment(mu, k) - 0) < tight()
    assert abs(moment(mu, 30) - mpf(2) / 31) < tight()


def test_cauchy_transform_real_and_complex():
    mu = lebesgue(0, 1)
    # exact value is log((z-0)/(z-1)); the quadrature approximation carries
    # a geometric truncation error (~rho^-2N), far below the tolerances the
    # package works to but well above the arithmetic roundoff level
    quad_err = mpf(10) ** (-80)
    z = mpf(2)
    assert abs(cauchy_transform(mu, z) - mp.log(2)) < quad_err
    zc = mpc(0, 1)
    exact = mp.log(zc / (zc - 1))
    assert abs(cauchy_transform(mu, zc) - exact) < quad_err


def test_cauchy_transform_on_support_rejected():
    mu = lebesgue(0, 1)
    with pytest.raises(SupportError):
        cauchy_transform(mu, mpf("0.5"))
    with pytest.raises(SupportError):
        cauchy_transform(mu, mpc("0.5", 0))


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=2, max_value=40))
def test_mass_positive_any_node_count(n):
    mu = lebesgue(0, 1, node_count=n)
    assert abs(mu.mass - 1) < tight()
