#!/usr/bin/env python3
"""
Horocyclic Checkerboard Colorings
Builds, validates and falsifies checkerboard colorings of the half-plane for a
forbidden distance d or a forbidden interval [d, cd].

Rectangles are half-open: R(i, j) = [r i e^{jh}, r (i+1) e^{jh}) x [e^{jh}, e^{(j+1)h}).
"""

import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, TextIO, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from .errors import ParameterError
from .hypgeom import HPoint, point_at_distance_xy

logger = logging.getLogger(__name__)

# relative slack for floating comparisons against integer thresholds
TOL = 1e-9
SAMPLE_CHUNK = 1 << 16
PERTURBATION = 1e-7
# longest distance whose cosh stays finite in double precision, with headroom
MAX_DISTANCE = 700.0


def check_distance(value: float, name: str = "d") -> None:
    """Distances must be positive and short enough that cosh(value) is a finite double."""
    if not value > 0:
        raise ParameterError(f"{name} must be positive")
    if value > MAX_DISTANCE:
        raise ParameterError(f"{name} = {value} exceeds the supported maximum {MAX_DISTANCE}")


def ceil_tol(value: float) -> int:
    """Ceiling that ignores floating noise just above an integer."""
    return math.ceil(value - TOL * max(1.0, abs(value)))


class Scheme(BaseModel):
    """A checkerboard coloring: rectangles of width w and height h, periods k+1 and m+1."""
    model_config = ConfigDict(frozen=True)

    d_min: float = Field(..., gt=0, le=MAX_DISTANCE, description="Lower end of the forbidden distance range")
    d_max: float = Field(..., gt=0, le=MAX_DISTANCE, description="Upper end of the forbidden distance range")
    h: float = Field(..., gt=0, description="Stratum height")
    w: float = Field(..., gt=0, le=MAX_DISTANCE, description="Hyperbolic length of a rectangle base")
    k_period: int = Field(..., ge=2, description="Horizontal color period is k_period + 1")
    m_period: int = Field(..., ge=1, description="Vertical palette period is m_period + 1")

    @model_validator(mode="after")
    def _ordered(self) -> "Scheme":
        if self.d_max < self.d_min:
            raise ValueError("d_max must be at least d_min")
        return self

    @computed_field
    @property
    def r(self) -> float:
        """Euclidean base length at height 1."""
        return 2.0 * math.sinh(0.5 * self.w)

    @property
    def palette_size(self) -> int:
        return (self.k_period + 1) * (self.m_period + 1)

    @property
    def is_interval(self) -> bool:
        return self.d_max > self.d_min


class RectIndex(BaseModel):
    model_config = ConfigDict(frozen=True)

    i: int = Field(..., description="Horizontal index within the stratum")
    j: int = Field(..., description="Stratum index")


class Color(BaseModel):
    model_config = ConfigDict(frozen=True)

    horiz: int = Field(..., ge=0, description="i mod (k_period + 1)")
    vert: int = Field(..., ge=0, description="j mod (m_period + 1)")

    def index(self, scheme: Scheme) -> int:
        return self.horiz + (scheme.k_period + 1) * self.vert


def rect_index_xy(s: Scheme, x, y) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized rectangle lookup; boundary fix-ups keep the half-open convention."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    j = np.floor(np.log(y) / s.h)
    j = j - (y < np.exp(j * s.h))
    j = j + (y >= np.exp((j + 1) * s.h))

    width = s.r * np.exp(j * s.h)
    i = np.floor(x / width)
    i = i - (x < i * width)
    i = i + (x >= (i + 1) * width)
    return i.astype(np.int64), j.astype(np.int64)


def rect_of_point(s: Scheme, p: HPoint) -> RectIndex:
    i, j = rect_index_xy(s, p.x, p.y)
    return RectIndex(i=int(i), j=int(j))


def color_of_point(s: Scheme, p: HPoint) -> Color:
    rect = rect_of_point(s, p)
    return Color(horiz=rect.i % (s.k_period + 1), vert=rect.j % (s.m_period + 1))


def color_index_xy(s: Scheme, x, y) -> np.ndarray:
    i, j = rect_index_xy(s, x, y)
    return np.mod(i, s.k_period + 1) + (s.k_period + 1) * np.mod(j, s.m_period + 1)


def rect_diameter(w: float, h: float) -> float:
    """Diameter of a rectangle: the larger of the base and the diagonal."""
    diagonal = math.acosh(1.0 + (math.cosh(w) - 1.0) * math.exp(-h) - 0.5 * math.expm1(h) * math.expm1(-h))
    return max(w, diagonal)


def upper_corner_distance(w: float, h: float) -> float:
    return math.acosh(1.0 + (math.cosh(w) - 1.0) / math.exp(2.0 * h))


def same_stratum_separation(w: float, h: float, gap: int) -> float:
    """
    Distance between the closures of two rectangles of one stratum

    gap counts the rectangles strictly between them; the closest points are
    the facing upper corners, hence arccosh(1 + gap^2 (cosh w - 1) / e^{2h}).
    """
    if gap < 0:
        raise ParameterError("gap must be non-negative")
    return math.acosh(1.0 + gap * gap * (math.cosh(w) - 1.0) / math.exp(2.0 * h))


def _log_sinh(x: float) -> float:
    return x + math.log(-math.expm1(-2.0 * x)) - math.log(2.0)


def log_period_ratio(d_max: float, w: float) -> float:
    """log sqrt((cosh d_max - 1) / (cosh w - 1)), i.e. log(sinh(d_max/2) / sinh(w/2))."""
    if d_max <= 0 or w <= 0:
        raise ParameterError("lengths must be positive")
    return _log_sinh(0.5 * d_max) - _log_sinh(0.5 * w)


def required_k(d_max: float, w: float, h: float) -> int:
    log_k = h + log_period_ratio(d_max, w)
    if log_k > MAX_DISTANCE:
        raise ParameterError(f"horizontal period e^{log_k:.1f} is out of range")
    return ceil_tol(math.exp(log_k))


class InvariantCheck(BaseModel):
    name: str
    passed: bool
    lhs: float
    relation: str
    rhs: float


class ValidationReport(BaseModel):
    scheme: Scheme
    checks: List[InvariantCheck]

    @computed_field
    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


def validate_scheme(s: Scheme) -> ValidationReport:
    """Check every Scheme invariant, reporting both sides of each inequality."""
    base_length = 2.0 * math.asinh(0.5 * s.r)
    k_needed = required_k(s.d_max, s.w, s.h)
    vertical = s.m_period * s.h
    diameter = rect_diameter(s.w, s.h)
    checks = [
        InvariantCheck(name="base_length", passed=abs(base_length - s.w) <= 1e-9 * max(1.0, s.w),
                       lhs=base_length, relation="==", rhs=s.w),
        InvariantCheck(name="horizontal_period", passed=s.k_period >= k_needed,
                       lhs=s.k_period, relation=">=", rhs=k_needed),
        InvariantCheck(name="vertical_period", passed=vertical >= s.d_max * (1.0 - TOL),
                       lhs=vertical, relation=">=", rhs=s.d_max),
        InvariantCheck(name="diameter", passed=diameter <= s.d_min * (1.0 + TOL),
                       lhs=diameter, relation="<=", rhs=s.d_min),
    ]
    return ValidationReport(scheme=s, checks=checks)


def mutate_scheme(s: Scheme, k_delta: int = 0, m_delta: int = 0) -> Scheme:
    """Copy of s with shifted periods; used to build deliberately broken schemes."""
    if s.k_period + k_delta < 2 or s.m_period + m_delta < 1:
        raise ParameterError("mutation leaves a period below its minimum")
    return Scheme(d_min=s.d_min, d_max=s.d_max, h=s.h, w=s.w,
                  k_period=s.k_period + k_delta, m_period=s.m_period + m_delta)


def large_d_scheme(d: float, k: int) -> Scheme:
    """Scheme with w = d and h = log k (k in {3, 4}) used for d >= 2."""
    if k not in (3, 4):
        raise ParameterError("large-d schemes use k = 3 or k = 4")
    check_distance(d)
    h = math.log(k)
    return Scheme(d_min=d, d_max=d, h=h, w=d, k_period=k, m_period=max(1, ceil_tol(d / h)))


class Violation(BaseModel):
    p: Tuple[float, float]
    q: Tuple[float, float]
    t: float
    color: int


class ViolationReport(BaseModel):
    scheme: Scheme
    samples: int
    seed: int
    violation_count: int = 0
    violations: List[Violation] = Field(default_factory=list)

    @computed_field
    @property
    def passed(self) -> bool:
        return self.violation_count == 0


def _draw(s: Scheme, rng: np.random.Generator, size: int, window_periods: int):
    strata = window_periods * (s.m_period + 1)
    j = rng.integers(0, strata + 1, size=size)
    y = np.exp((j + rng.random(size)) * s.h)
    x = rng.random(size) * window_periods * (s.k_period + 1) * s.r * np.exp(j * s.h)
    phi = rng.random(size) * 2.0 * np.pi
    if s.is_interval:
        t = rng.uniform(s.d_min, s.d_max, size=size)
    else:
        t = np.full(size, s.d_min)
    return x, y, phi, t


def _same_color(s: Scheme, x, y, phi, t) -> np.ndarray:
    qx, qy = point_at_distance_xy(x, y, phi, t)
    return color_index_xy(s, x, y) == color_index_xy(s, qx, qy)


def _confirmed(s: Scheme, x, y, phi, t) -> np.ndarray:
    keep = np.ones(x.shape, dtype=bool)
    for sx, sy in ((1, 1), (-1, -1), (1, -1), (-1, 1)):
        px = x + sx * PERTURBATION * y
        py = y * (1.0 + sy * PERTURBATION)
        keep &= _same_color(s, px, py, phi, t)
    return keep


def _sample_chunk(s: Scheme, seq: np.random.SeedSequence, size: int, window_periods: int,
                  max_witnesses: int) -> Tuple[int, List[Violation]]:
    rng = np.random.default_rng(seq)
    x, y, phi, t = _draw(s, rng, size, window_periods)
    hit = np.flatnonzero(_same_color(s, x, y, phi, t))
    if hit.size:
        hit = hit[_confirmed(s, x[hit], y[hit], phi[hit], t[hit])]

    witnesses = []
    for idx in hit[:max_witnesses]:
        qx, qy = point_at_distance_xy(x[idx], y[idx], phi[idx], t[idx])
        witnesses.append(Violation(p=(float(x[idx]), float(y[idx])), q=(float(qx), float(qy)),
                                   t=float(t[idx]), color=int(color_index_xy(s, x[idx], y[idx]))))
    return int(hit.size), witnesses


def verify_by_sampling(s: Scheme, n_samples: int, seed: int, *, jobs: int = 1,
                       window_periods: int = 3, max_witnesses: int = 20,
                       enforce_valid: bool = True) -> ViolationReport:
    """
    Empirically falsify a scheme

    Draws n_samples triples (p, phi, t), maps p to q = point_at_distance(p, phi, t)
    and counts pairs sharing a color. Samples come in fixed chunks, each with its
    own child seed, so the report does not depend on the number of workers.
    """
    if n_samples < 0:
        raise ParameterError("n_samples must be non-negative")
    if enforce_valid:
        report = validate_scheme(s)
        if not report.passed:
            failed = [c.name for c in report.checks if not c.passed]
            raise ParameterError(f"invalid scheme refused (failed: {', '.join(failed)})")

    chunks = math.ceil(n_samples / SAMPLE_CHUNK)
    seqs = np.random.SeedSequence(seed).spawn(chunks)
    sizes = [min(SAMPLE_CHUNK, n_samples - n * SAMPLE_CHUNK) for n in range(chunks)]

    def work(n: int):
        return _sample_chunk(s, seqs[n], sizes[n], window_periods, max_witnesses)

    if jobs > 1 and chunks > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(work, range(chunks)))
    else:
        results = [work(n) for n in range(chunks)]

    total = 0
    witnesses: List[Violation] = []
    for count, found in results:
        total += count
        witnesses.extend(found[: max_witnesses - len(witnesses)])
    logger.info("sampled %d pairs in %d chunks, %d violations", n_samples, chunks, total)
    return ViolationReport(scheme=s, samples=n_samples, seed=seed,
                           violation_count=total, violations=witnesses)


def color_map_rows(s: Scheme, nx: int = 64, ny: int = 64,
                   window_periods: int = 1) -> List[Tuple[float, float, int, int, int]]:
    """Grid of (x, y, horiz, vert, color_index) rows over the sampling window."""
    top = window_periods * (s.m_period + 1) * s.h
    ys = np.exp(np.linspace(0.0, top, ny, endpoint=False))
    rows = []
    for y in ys:
        xs = np.linspace(0.0, window_periods * (s.k_period + 1) * s.r * y, nx, endpoint=False)
        i, j = rect_index_xy(s, xs, np.full(nx, y))
        horiz = np.mod(i, s.k_period + 1)
        vert = np.mod(j, s.m_period + 1)
        for x, hz, vt in zip(xs, horiz, vert):
            rows.append((float(x), float(y), int(hz), int(vt), int(hz + (s.k_period + 1) * vt)))
    return rows


def export_color_map(s: Scheme, stream: TextIO, nx: int = 64, ny: int = 64,
                     window_periods: Optional[int] = None) -> int:
    writer = csv.writer(stream)
    writer.writerow(["x", "y", "horiz", "vert", "colorIndex"])
    rows = color_map_rows(s, nx, ny, window_periods or 1)
    writer.writerows(rows)
    return len(rows)


def interval_scheme(d: float, c: float) -> Scheme:
    """Scheme for the forbidden interval [d, cd] with w = d and h = log 4."""
    if c <= 1:
        raise ParameterError("interval schemes need c > 1")
    check_distance(d)
    check_distance(c * d, "cd")
    h = math.log(4.0)
    cd = c * d
    k = max(2, required_k(cd, d, h))
    m = max(1, math.floor(cd), ceil_tol(cd / h))
    return Scheme(d_min=d, d_max=cd, h=h, w=d, k_period=k, m_period=m)
