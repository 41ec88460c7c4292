#!/usr/bin/env python3
"""
Half-plane geometry tests
Exact distance examples, isometry invariance and the sampled round trip
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from pydantic import ValidationError

from hypchroma.errors import DomainError
from hypchroma.hypgeom import (
    HPoint,
    Isometry,
    apply_isometry,
    dilation,
    half_turn_about,
    hyp_distance,
    hyp_distance_xy,
    point_at_angle,
    point_at_angle_xy,
    point_at_distance,
    point_at_distance_xy,
    rotation_about,
    translation,
)

xs = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)
ys = st.floats(min_value=0.05, max_value=20.0, allow_nan=False)
points = st.builds(HPoint, x=xs, y=ys)
angles = st.floats(min_value=0.0, max_value=2.0 * math.pi)
lengths = st.floats(min_value=0.0, max_value=6.0)


def test_vertical_distance_is_log_ratio():
    """Points on a vertical line are log(y'/y) apart."""
    assert hyp_distance(HPoint(x=0, y=1), HPoint(x=0, y=math.e)) == pytest.approx(1.0, abs=1e-12)
    assert hyp_distance(HPoint(x=3, y=2), HPoint(x=3, y=2)) == 0.0


def test_horizontal_unit_chord():
    """Points (0, 1) and (r, 1) are w apart when r^2 = 2 (cosh w - 1)."""
    w = 1.7
    r = math.sqrt(2.0 * (math.cosh(w) - 1.0))
    assert hyp_distance(HPoint(x=0, y=1), HPoint(x=r, y=1)) == pytest.approx(w, rel=1e-12)


def test_invalid_points_rejected():
    with pytest.raises(ValidationError):
        HPoint(x=0.0, y=0.0)
    with pytest.raises(ValidationError):
        HPoint(x=math.inf, y=1.0)
    with pytest.raises(DomainError):
        hyp_distance_xy(0.0, 1.0, 0.0, -1.0)
    with pytest.raises(DomainError):
        point_at_distance(HPoint(x=0, y=1), 0.0, -0.5)


@given(points, points)
def test_distance_symmetric_and_non_negative(p, q):
    assert hyp_distance(p, q) >= 0.0
    assert hyp_distance(p, q) == pytest.approx(hyp_distance(q, p), rel=1e-12, abs=1e-15)


@settings(max_examples=300)
@given(points, points, points)
def test_triangle_inequality(p, q, r):
    assert hyp_distance(p, r) <= hyp_distance(p, q) + hyp_distance(q, r) + 1e-9


@settings(max_examples=300)
@given(points, angles, lengths)
def test_point_at_distance_round_trip(p, phi, s):
    q = point_at_distance(p, phi, s)
    assert hyp_distance(p, q) == pytest.approx(s, abs=1e-9)


def test_point_at_distance_sampled_round_trip():
    """Vectorized round trip over 10^5 seeded samples."""
    rng = np.random.default_rng(20240611)
    n = 100_000
    x = rng.uniform(-10.0, 10.0, n)
    y = np.exp(rng.uniform(-2.0, 3.0, n))
    phi = rng.uniform(0.0, 2.0 * np.pi, n)
    s = rng.uniform(1e-3, 6.0, n)
    qx, qy = point_at_distance_xy(x, y, phi, s)
    assert np.all(qy > 0)
    assert np.max(np.abs(hyp_distance_xy(x, y, qx, qy) - s)) <= 1e-9
    assert np.allclose(hyp_distance_xy(qx, qy, x, y), hyp_distance_xy(x, y, qx, qy), rtol=1e-12, atol=1e-15)


def test_vectorized_matches_scalar():
    p = HPoint(x=0.3, y=0.7)
    q = point_at_distance(p, 1.1, 2.5)
    qx, qy = point_at_distance_xy(p.x, p.y, 1.1, 2.5)
    assert float(qx) == pytest.approx(q.x, rel=1e-14)
    assert float(qy) == pytest.approx(q.y, rel=1e-14)
    assert float(hyp_distance_xy(p.x, p.y, q.x, q.y)) == pytest.approx(hyp_distance(p, q), rel=1e-14)


def test_isometry_requires_unit_determinant():
    with pytest.raises(ValidationError):
        Isometry(a=2.0, b=0.0, c=0.0, e=1.0)
    with pytest.raises(DomainError):
        Isometry.from_matrix(1.0, 2.0, 2.0, 4.0)
    m = Isometry.from_matrix(2.0, 1.0, 0.0, 3.0)
    assert m.det == pytest.approx(1.0, abs=1e-12)


def test_compose_and_inverse():
    m = rotation_about(HPoint(x=1.0, y=2.0), 0.8).compose(translation(0.4))
    p = HPoint(x=-0.5, y=1.3)
    back = apply_isometry(m.inverse(), apply_isometry(m, p))
    assert back.x == pytest.approx(p.x, abs=1e-12)
    assert back.y == pytest.approx(p.y, abs=1e-12)
    ident = m.compose(m.inverse())
    assert (ident.a, ident.b, ident.c, ident.e) == pytest.approx((1.0, 0.0, 0.0, 1.0), abs=1e-12)


def test_rotation_fixes_center_and_has_order_seven():
    center = HPoint(x=0.2, y=1.5)
    rot = rotation_about(center, 2.0 * math.pi / 7.0)
    fixed = apply_isometry(rot, center)
    assert fixed.x == pytest.approx(center.x, abs=1e-12)
    assert fixed.y == pytest.approx(center.y, abs=1e-12)

    p = HPoint(x=1.0, y=0.5)
    q = p
    for _ in range(7):
        q = apply_isometry(rot, q)
    assert q.x == pytest.approx(p.x, abs=1e-9)
    assert q.y == pytest.approx(p.y, abs=1e-9)


def test_rotation_is_counter_clockwise():
    """A quarter turn about (0, 1) moves the point straight above it onto the unit circle, to the left."""
    center = HPoint(x=0.0, y=1.0)
    above = point_at_angle(center, math.pi / 2.0, 1.0)
    assert (above.x, above.y) == pytest.approx((0.0, math.e), abs=1e-12)
    turned = apply_isometry(rotation_about(center, math.pi / 2.0), above)
    assert turned.x == pytest.approx(-math.tanh(1.0), abs=1e-12)
    assert turned.y == pytest.approx(1.0 / math.cosh(1.0), abs=1e-12)
    expected = point_at_angle(center, math.pi, 1.0)
    assert turned.x == pytest.approx(expected.x, abs=1e-12)
    assert turned.y == pytest.approx(expected.y, abs=1e-12)


@settings(max_examples=200)
@given(points, angles, st.floats(min_value=-math.pi, max_value=math.pi), st.floats(min_value=0.0, max_value=4.0))
def test_rotation_advances_angle(p, theta, turn, s):
    q = point_at_angle(p, theta, s)
    assert hyp_distance(p, q) == pytest.approx(s, abs=1e-9 * (1.0 + s))
    turned = apply_isometry(rotation_about(p, turn), q)
    expected = point_at_angle(p, theta + turn, s)
    assert turned.x == pytest.approx(expected.x, rel=1e-8, abs=1e-8 * p.y)
    assert turned.y == pytest.approx(expected.y, rel=1e-8, abs=1e-8 * p.y)


def test_point_at_angle_is_rotated_vertical_point():
    p = HPoint(x=0.3, y=1.7)
    for theta in (0.0, 0.9, 2.0 * math.pi / 7.0, 4.0):
        q = point_at_angle(p, theta, 0.75)
        r = apply_isometry(rotation_about(p, theta - math.pi / 2.0), HPoint(x=p.x, y=p.y * math.exp(0.75)))
        assert q.x == pytest.approx(r.x, abs=1e-12)
        assert q.y == pytest.approx(r.y, abs=1e-12)


def test_point_at_angle_differs_from_euclidean_direction():
    """Away from the vertical the hyperbolic angle and the Euclidean circle parameter disagree."""
    center = HPoint(x=0.0, y=1.0)
    along = point_at_angle(center, 0.0, 1.0)
    circle = point_at_distance(center, 0.0, 1.0)
    assert (along.x, along.y) == pytest.approx((math.tanh(1.0), 1.0 / math.cosh(1.0)), abs=1e-12)
    assert (circle.x, circle.y) == pytest.approx((math.sinh(1.0), math.cosh(1.0)), abs=1e-12)


def test_point_at_angle_rejects_negative_distance():
    with pytest.raises(DomainError):
        point_at_angle(HPoint(x=0.0, y=1.0), 0.0, -0.1)
    with pytest.raises(DomainError):
        point_at_angle_xy(0.0, 1.0, 0.0, np.array([0.5, -0.5]))


def test_half_turn_swaps_opposite_points():
    center = HPoint(x=0.5, y=2.0)
    p = point_at_distance(center, 0.3, 0.9)
    q = apply_isometry(half_turn_about(center), p)
    assert hyp_distance(p, q) == pytest.approx(1.8, abs=1e-10)


isometries = st.one_of(
    st.builds(translation, st.floats(min_value=-5, max_value=5)),
    st.builds(dilation, st.floats(min_value=0.1, max_value=10)),
    st.builds(rotation_about, points, angles),
)


@settings(max_examples=300)
@given(isometries, points, points)
def test_isometries_preserve_distance(m, p, q):
    before = hyp_distance(p, q)
    after = hyp_distance(apply_isometry(m, p), apply_isometry(m, q))
    assert after == pytest.approx(before, rel=1e-7, abs=1e-7)
