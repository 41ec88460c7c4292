#!/usr/bin/env python3
"""
Bound tests
Closed forms, the optimizer, d0, interval bounds and the circle clique
"""

import math

import pytest
from pydantic import ValidationError

from hypchroma.bounds import (
    INTERVAL_TABLE,
    LOG2,
    LOG3,
    LOG4,
    BoundResult,
    BoundSource,
    bound_report,
    closed_form_bound,
    closed_form_candidates,
    d0_closed_form,
    d0_residual,
    interval_clique_points,
    interval_upper_bound,
    k_of_h,
    large_d_crossover,
    large_d_value,
    optimize_checkerboard,
    solve_d0,
    w_of_h,
)
from hypchroma.checkerboard import MAX_DISTANCE, validate_scheme, verify_by_sampling
from hypchroma.errors import DomainError, ParameterError
from hypchroma.hypgeom import HPoint, hyp_distance


def test_w_of_h():
    assert w_of_h(1.0, 0.5) == 1.0
    small = w_of_h(0.3, 0.15)
    assert 0.0 < small < 0.3
    assert small == pytest.approx(math.acosh((1 + 2 * math.exp(0.15) * math.cosh(0.3) - math.exp(0.3)) / 2))
    assert w_of_h(2.0, 1e-6) == 2.0
    with pytest.raises(DomainError):
        w_of_h(1.0, 1.0)
    with pytest.raises(DomainError):
        w_of_h(1.0, -0.1)


def test_k_of_h():
    assert k_of_h(1.0, 0.5) == 2
    assert k_of_h(2.0 * LOG3, LOG3) == 3
    assert k_of_h(5.0, 0.2) == math.ceil(math.exp(0.2))


def test_bound_result_respects_universal_floor():
    with pytest.raises(ValidationError):
        BoundResult(value=3, source=BoundSource.OPTIMIZED)


@pytest.mark.parametrize("d, ceiling", [(1.0, 9), (2.0, 12), (10.0, 45)])
def test_optimizer_examples(d, ceiling):
    result = optimize_checkerboard(d)
    assert result.source == BoundSource.OPTIMIZED
    assert 9 <= result.value <= ceiling
    assert result.params.palette_size == result.value
    if d == 1.0:
        assert result.value == 9


@pytest.mark.parametrize("d", [0.3, 0.7, 1.0, 1.386, 2.0, 3.3, 5.0, 12.5, 20.0])
def test_optimized_schemes_are_valid(d):
    scheme = optimize_checkerboard(d).params
    assert validate_scheme(scheme).passed
    assert verify_by_sampling(scheme, 10_000, seed=17).violation_count == 0


@pytest.mark.slow
@pytest.mark.parametrize("d", [0.3, 0.7, 1.0, 1.386])
def test_small_d_million_samples(d):
    result = optimize_checkerboard(d)
    assert result.value <= 9
    assert verify_by_sampling(result.params, 1_000_000, seed=7, jobs=4).violation_count == 0


def test_optimizer_rejects_bad_input():
    with pytest.raises(ParameterError):
        optimize_checkerboard(0.0)
    with pytest.raises(ParameterError):
        optimize_checkerboard(1.0, grid_steps=5)


def test_closed_form_examples():
    # 1.3 lies in both the small-d range and the heptagonal window; the smaller bound wins
    assert closed_form_bound(1.3).value == 8
    assert closed_form_bound(1.3).source == BoundSource.FUNDDOM_8
    at_13 = {b.source: b.value for b in closed_form_candidates(1.3)}
    assert at_13[BoundSource.SMALL_D_9] == 9
    assert closed_form_bound(1.0).value == 9
    assert closed_form_bound(1.0).source == BoundSource.SMALL_D_9
    assert closed_form_bound(1.5).value == 8
    assert closed_form_bound(1.5).source == BoundSource.FUNDDOM_8
    assert closed_form_bound(100.0).value == 370
    assert closed_form_bound(100.0).source == BoundSource.LARGE_D_K4


def test_very_large_distances():
    near_limit = closed_form_bound(MAX_DISTANCE)
    assert near_limit.value == large_d_value(MAX_DISTANCE, 4)
    assert near_limit.params.r == pytest.approx(2.0 * math.sinh(MAX_DISTANCE / 2.0), rel=1e-12)
    assert validate_scheme(near_limit.params).passed
    optimized = optimize_checkerboard(MAX_DISTANCE)
    assert optimized.value >= near_limit.value
    assert optimized.params.d_max == MAX_DISTANCE
    for call in (closed_form_bound, optimize_checkerboard, bound_report):
        with pytest.raises(ParameterError):
            call(800.0)
    with pytest.raises(ParameterError):
        interval_upper_bound(400.0, 2.0)
    with pytest.raises(ParameterError):
        interval_clique_points(400.0, 2.0)
    assert interval_upper_bound(300.0, 2.0).applicable


def test_w_of_h_stays_finite_for_large_d():
    d = 650.0
    for h in (0.5, 10.0, 300.0, 649.0):
        w = w_of_h(d, h)
        assert 0.0 < w <= d
    assert k_of_h(d, LOG4) == 4


def test_small_d_endpoint_is_inclusive():
    at = {b.source for b in closed_form_candidates(2.0 * LOG2)}
    past = {b.source for b in closed_form_candidates(2.0 * LOG2 + 1e-9)}
    assert BoundSource.SMALL_D_9 in at
    assert BoundSource.SMALL_D_9 not in past


@pytest.mark.parametrize("d, value", [(1.9, 12), (2.5, 15), (3.0, 16), (3.4, 18)])
def test_table_interiors(d, value):
    assert closed_form_bound(d).value == value


@pytest.mark.parametrize("upper, value", INTERVAL_TABLE)
def test_optimizer_matches_table_at_right_endpoints(upper, value):
    assert optimize_checkerboard(upper).value <= value


@pytest.mark.parametrize("d", [2.0, 10.0, 100.0, 150.0])
def test_large_d_closed_form(d):
    expected = min(5 * (math.ceil(d / LOG4) + 1), 4 * (math.ceil(d / LOG3) + 1))
    assert closed_form_bound(d).value == expected
    assert large_d_value(d, 4) == 5 * (math.ceil(d / LOG4) + 1)


def test_k4_family_wins_at_150():
    assert large_d_value(150.0, 4) == 550
    assert large_d_value(150.0, 3) == 552
    assert closed_form_bound(150.0).source == BoundSource.LARGE_D_K4


def test_large_d_crossover_region():
    crossover = large_d_crossover()
    assert 40.0 < crossover <= 200.0
    for d in (crossover + 0.5, crossover + 10.0, 300.0):
        assert large_d_value(d, 4) <= large_d_value(d, 3)


def test_d0():
    root = solve_d0()
    assert round(root, 2) == 0.56
    assert abs(root - d0_closed_form()) <= 1e-9
    assert abs(d0_residual(root)) <= 1e-10
    # the base width at h = d/2 reaches d exactly from d0 on
    assert w_of_h(root + 0.05, (root + 0.05) / 2.0) == root + 0.05
    assert w_of_h(root - 0.05, (root - 0.05) / 2.0) < root - 0.05


def test_interval_upper_bound_example():
    result = interval_upper_bound(6.0, 2.0)
    k = math.ceil(4.0 * math.sqrt((math.cosh(12.0) - 1.0) / (math.cosh(6.0) - 1.0)))
    assert result.applicable
    assert result.value == (k + 1) * 13
    assert result.envelope == pytest.approx(2.0 * (2.0 * math.exp(5.5) + 1.0) * 13.0)
    assert result.value <= result.envelope
    assert result.params.palette_size == result.value


def test_interval_upper_bound_inapplicable_for_small_d():
    result = interval_upper_bound(0.5, 2.0)
    assert not result.applicable
    assert result.value is None
    assert result.envelope is not None
    with pytest.raises(ParameterError):
        interval_upper_bound(6.0, 1.0)


@pytest.mark.parametrize("d, c", [(2.0, 1.5), (4.0, 2.0), (6.0, 3.0), (10.0, 1.2)])
def test_interval_envelope_holds(d, c):
    result = interval_upper_bound(d, c)
    assert result.applicable
    assert result.value <= result.envelope


def test_interval_clique_example():
    witness = interval_clique_points(6.0, 2.0)
    assert witness.theta == pytest.approx(2.0 * math.asin(math.sinh(3.0) / math.sinh(6.0)))
    assert witness.theta == pytest.approx(0.09937, abs=1e-5)
    assert witness.n == 63
    assert len(witness.points) == 63
    assert witness.pairwise_ok
    assert witness.min_distance >= 6.0 - 1e-9
    assert witness.max_distance <= 12.0 + 1e-9
    assert hyp_distance(witness.points[0], witness.points[1]) == pytest.approx(6.0, abs=1e-8)
    center = HPoint(x=0.0, y=1.0)
    for a, b in zip(witness.points, witness.points[1:]):
        assert hyp_distance(a, b) == pytest.approx(6.0, abs=1e-8)
        assert hyp_distance(center, b) == pytest.approx(6.0, abs=1e-8)


@pytest.mark.parametrize("d, c", [(2.0, 1.5), (3.0, 2.0), (4.0, 1.5), (6.0, 2.0), (8.0, 1.25)])
def test_interval_clique_growth(d, c):
    witness = interval_clique_points(d, c)
    assert witness.pairwise_ok
    assert witness.n >= 2.0 * math.exp((c - 1.0) * d / 2.0)


def test_bound_report():
    report = bound_report(1.5)
    assert report.best.value == 8
    sources = {b.source for b in report.bounds}
    assert BoundSource.OPTIMIZED in sources
    interval = bound_report(10.0, 2.0)
    assert interval.c == 2.0
    assert interval.bounds[0].source == BoundSource.INTERVAL
    assert interval.best == interval.bounds[0]
