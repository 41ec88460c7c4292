#!/usr/bin/env python3
"""
Upper Half-Plane Geometry
Exact-formula primitives for the upper half-plane model of the hyperbolic plane:
distances, points at a prescribed distance, and Möbius isometries.
"""

import math
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .errors import DomainError

DET_TOLERANCE = 1e-9


class HPoint(BaseModel):
    """A point (x, y) of the upper half-plane, y > 0."""
    model_config = ConfigDict(frozen=True)

    x: float = Field(..., description="Horizontal coordinate")
    y: float = Field(..., description="Height above the boundary, strictly positive")

    @field_validator("x", "y")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("coordinates must be finite")
        return value

    @field_validator("y")
    @classmethod
    def _positive_height(cls, value: float) -> float:
        if value <= 0:
            raise ValueError("y must be strictly positive")
        return value

    def as_tuple(self) -> Tuple[float, float]:
        return (self.x, self.y)


def _acosh_1p(delta):
    """arccosh(1 + delta) without cancellation for small delta."""
    return np.log1p(delta + np.sqrt(delta * (delta + 2.0)))


def hyp_distance(p: HPoint, q: HPoint) -> float:
    """
    Hyperbolic distance between two half-plane points

    Uses arccosh(1 + ((x-x')^2 + (y-y')^2) / (2yy')), evaluated through
    log1p so that nearly coincident points keep full relative precision.
    """
    if p.y <= 0 or q.y <= 0:
        raise DomainError("hyp_distance requires y > 0 for both points")
    dx = p.x - q.x
    dy = p.y - q.y
    delta = (dx * dx + dy * dy) / (2.0 * p.y * q.y)
    return float(math.log1p(delta + math.sqrt(delta * (delta + 2.0))))


def hyp_distance_xy(x1, y1, x2, y2) -> np.ndarray:
    """Vectorized hyp_distance over numpy arrays (broadcasting)."""
    x1, y1, x2, y2 = (np.asarray(v, dtype=float) for v in (x1, y1, x2, y2))
    if np.any(y1 <= 0) or np.any(y2 <= 0):
        raise DomainError("hyp_distance requires y > 0 for all points")
    dx = x1 - x2
    dy = y1 - y2
    return _acosh_1p((dx * dx + dy * dy) / (2.0 * y1 * y2))


def _height_factor(phi, s):
    # cosh s + sinh s sin(phi) written as a sum of two non-negative terms
    psi = 0.5 * (phi - 0.5 * np.pi)
    return np.exp(s) * np.cos(psi) ** 2 + np.exp(-s) * np.sin(psi) ** 2


def point_at_distance(p: HPoint, phi: float, s: float) -> HPoint:
    """
    Point at hyperbolic distance s from p, leaving p in Euclidean direction phi

    The result is (x + y sinh(s) cos(phi), y (cosh(s) + sinh(s) sin(phi))), i.e. a
    point of the hyperbolic circle about p with Euclidean center (x, y cosh s)
    and radius y sinh s.
    """
    if s < 0 or not math.isfinite(s):
        raise DomainError(f"distance must be finite and non-negative, got {s}")
    x = p.x + p.y * math.sinh(s) * math.cos(phi)
    y = p.y * float(_height_factor(phi, s))
    return HPoint(x=x, y=y)


def point_at_distance_xy(x, y, phi, s) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized point_at_distance; all arguments broadcast."""
    x, y, phi, s = (np.asarray(v, dtype=float) for v in (x, y, phi, s))
    if np.any(s < 0):
        raise DomainError("distance must be non-negative")
    return x + y * np.sinh(s) * np.cos(phi), y * _height_factor(phi, s)


def point_at_angle_xy(x, y, theta, s) -> Tuple[np.ndarray, np.ndarray]:
    """
    Point at hyperbolic distance s from (x, y) along the geodesic leaving at
    hyperbolic angle theta

    Angles are measured counter-clockwise from the positive x direction, so
    theta = pi/2 is straight up and gives (x, y e^s). This is the image of
    (x, y e^s) under rotation_about((x, y), theta - pi/2).
    """
    x, y, theta, s = (np.asarray(v, dtype=float) for v in (x, y, theta, s))
    if np.any(s < 0):
        raise DomainError("distance must be non-negative")
    # t = tanh(s/2), with gap = 1 - t formed directly so it keeps its digits for large s
    gap = 2.0 / (1.0 + np.exp(s))
    t = 1.0 - gap
    denom = gap * gap + 4.0 * t * np.sin(0.25 * np.pi - 0.5 * theta) ** 2
    return x + y * 2.0 * t * np.cos(theta) / denom, y * gap * (2.0 - gap) / denom


def point_at_angle(p: HPoint, theta: float, s: float) -> HPoint:
    if s < 0 or not math.isfinite(s):
        raise DomainError(f"distance must be finite and non-negative, got {s}")
    x, y = point_at_angle_xy(p.x, p.y, theta, s)
    return HPoint(x=float(x), y=float(y))


class Isometry(BaseModel):
    """
    Orientation-preserving isometry z -> (a z + b) / (c z + e)

    Entries form a real 2x2 matrix of determinant 1. Use from_matrix() to
    normalize an arbitrary positive-determinant matrix.
    """
    model_config = ConfigDict(frozen=True)

    a: float = Field(..., description="Top-left matrix entry")
    b: float = Field(..., description="Top-right matrix entry")
    c: float = Field(..., description="Bottom-left matrix entry")
    e: float = Field(..., description="Bottom-right matrix entry")

    @model_validator(mode="after")
    def _unimodular(self) -> "Isometry":
        values = (self.a, self.b, self.c, self.e)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("matrix entries must be finite")
        if abs(self.det - 1.0) > DET_TOLERANCE:
            raise ValueError(f"determinant must be 1, got {self.det}")
        return self

    @property
    def det(self) -> float:
        return self.a * self.e - self.b * self.c

    @classmethod
    def from_matrix(cls, a: float, b: float, c: float, e: float) -> "Isometry":
        det = a * e - b * c
        if not math.isfinite(det) or det <= 1e-300:
            raise DomainError(f"degenerate or orientation-reversing matrix (det={det})")
        scale = 1.0 / math.sqrt(det)
        return cls(a=a * scale, b=b * scale, c=c * scale, e=e * scale)

    @classmethod
    def identity(cls) -> "Isometry":
        return cls(a=1.0, b=0.0, c=0.0, e=1.0)

    def compose(self, other: "Isometry") -> "Isometry":
        """self after other (apply other first)."""
        return Isometry.from_matrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.e,
            self.c * other.a + self.e * other.c,
            self.c * other.b + self.e * other.e,
        )

    def inverse(self) -> "Isometry":
        return Isometry.from_matrix(self.e, -self.b, -self.c, self.a)


def apply_isometry(m: Isometry, p: HPoint) -> HPoint:
    """Image of p under the Möbius map m."""
    x, y = apply_isometry_xy(m, p.x, p.y)
    return HPoint(x=float(x), y=float(y))


def apply_isometry_xy(m: Isometry, x, y) -> Tuple[np.ndarray, np.ndarray]:
    det = m.det
    if det <= 0:
        raise DomainError("degenerate isometry")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    cx_e = m.c * x + m.e
    cy = m.c * y
    denom = cx_e * cx_e + cy * cy
    new_x = ((m.a * x + m.b) * cx_e + m.a * cy * y) / denom
    new_y = det * y / denom
    return new_x, new_y


def translation(t: float) -> Isometry:
    return Isometry(a=1.0, b=t, c=0.0, e=1.0)


def dilation(factor: float) -> Isometry:
    if factor <= 0:
        raise DomainError("dilation factor must be positive")
    root = math.sqrt(factor)
    return Isometry(a=root, b=0.0, c=0.0, e=1.0 / root)


def rotation_about(p: HPoint, theta: float) -> Isometry:
    """Counter-clockwise rotation by theta about p."""
    half = 0.5 * theta
    spin = Isometry.from_matrix(math.cos(half), math.sin(half), -math.sin(half), math.cos(half))
    root = math.sqrt(p.y)
    carry = Isometry.from_matrix(root, p.x / root, 0.0, 1.0 / root)
    return carry.compose(spin).compose(carry.inverse())


def half_turn_about(p: HPoint) -> Isometry:
    return rotation_about(p, math.pi)
