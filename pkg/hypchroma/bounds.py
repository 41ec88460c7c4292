#!/usr/bin/env python3
"""
Chromatic Number Bounds for the Hyperbolic Plane
Closed-form and optimized upper bounds for chi(H, d) and chi(H, [d, cd]),
the small-d threshold d0, and the circle clique for interval problems.
"""

import logging
import math
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator
from scipy import optimize

from .checkerboard import (
    MAX_DISTANCE,
    Scheme,
    ceil_tol,
    check_distance,
    interval_scheme,
    large_d_scheme,
    log_period_ratio,
    rect_diameter,
    required_k,
)
from .errors import DomainError, ParameterError
from .hypgeom import HPoint, hyp_distance_xy, point_at_angle_xy

logger = logging.getLogger(__name__)

LOG2 = math.log(2.0)
LOG3 = math.log(3.0)
LOG4 = math.log(4.0)

UNIVERSAL_LOWER_BOUND = 4
FUNDDOM_WINDOW = (1.22, 1.77)

# (inclusive upper end of d, palette size)
INTERVAL_TABLE: List[Tuple[float, int]] = [
    (2.0 * LOG3, 12),
    (2.0 * LOG4, 15),
    (3.0 * LOG3, 16),
    (5.0 * LOG2, 18),
]


class BoundSource(str, Enum):
    SMALL_D_9 = "SMALL_D_9"
    TABLE_12 = "TABLE_12"
    TABLE_15 = "TABLE_15"
    TABLE_16 = "TABLE_16"
    TABLE_18 = "TABLE_18"
    FUNDDOM_8 = "FUNDDOM_8"
    LARGE_D_K4 = "LARGE_D_K4"
    LARGE_D_K3 = "LARGE_D_K3"
    OPTIMIZED = "OPTIMIZED"
    INTERVAL = "INTERVAL"


_TABLE_SOURCES = {12: BoundSource.TABLE_12, 15: BoundSource.TABLE_15,
                  16: BoundSource.TABLE_16, 18: BoundSource.TABLE_18}


class BoundResult(BaseModel):
    """An upper bound on a chromatic number together with its provenance."""
    value: Optional[int] = Field(None, description="Color count; None when the construction does not apply")
    source: BoundSource
    params: Optional[Scheme] = Field(None, description="Checkerboard realizing the bound, if any")
    applicable: bool = True
    envelope: Optional[float] = Field(None, description="Analytic envelope for interval bounds")
    note: str = ""

    @field_validator("value")
    @classmethod
    def _above_universal_floor(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and value < UNIVERSAL_LOWER_BOUND:
            raise ValueError(f"bound {value} is below the universal lower bound {UNIVERSAL_LOWER_BOUND}")
        return value


class CliqueWitness(BaseModel):
    points: List[HPoint]
    d_min: float
    d_max: float
    n: int
    theta: float
    min_distance: float
    max_distance: float
    pairwise_ok: bool


class BoundReport(BaseModel):
    d: float
    c: Optional[float] = None
    bounds: List[BoundResult]
    best: Optional[BoundResult]


def w_of_h(d: float, h: float) -> float:
    """Widest base for stratum height h keeping the rectangle diameter at most d."""
    if not 0 < h < d:
        raise DomainError(f"need 0 < h < d, got h={h}, d={d}")
    # arccosh of (1 + 2 e^h cosh d - e^{2h}) / 2, taken in log space
    scaled = 1.0 + math.exp(-2.0 * d) - math.exp(h - d) + math.exp(-h - d)
    log_arg = h + d - LOG2 + math.log(scaled)
    if log_arg <= 0.0:
        raise DomainError(f"h={h} too large for d={d}")
    return min(d, log_arg + math.log1p(math.sqrt(-math.expm1(-2.0 * log_arg))))


def _log_k(d: float, h: float) -> float:
    return h + log_period_ratio(d, w_of_h(d, h))


def k_of_h(d: float, h: float) -> int:
    return max(2, required_k(d, w_of_h(d, h), h))


def _scheme_at(d: float, h: float) -> Optional[Scheme]:
    try:
        w = w_of_h(d, h)
        k = k_of_h(d, h)
    except (DomainError, ParameterError):
        return None
    m = ceil_tol(d / h)
    if m < 2:
        return None
    return Scheme(d_min=d, d_max=d, h=h, w=w, k_period=k, m_period=m)


def _relaxation(d: float, h: float) -> float:
    try:
        log_k = _log_k(d, h)
    except DomainError:
        return math.inf
    if log_k > MAX_DISTANCE:
        return math.inf
    return (math.exp(log_k) + 1.0) * (d / h + 1.0)


def optimize_checkerboard(d: float, grid_steps: int = 512) -> BoundResult:
    """
    Minimize (k(h)+1)(ceil(d/h)+1) over the stratum height h

    Candidates are a log-uniform grid on (d/50, d), the breakpoints h = d/m of
    the ceiling term, and a bounded golden-section refinement of the continuous
    relaxation around its best grid bracket. Ties go to the larger h.
    """
    check_distance(d)
    if grid_steps < 10:
        raise ParameterError("grid_steps must be at least 10")

    grid = d * np.exp(np.linspace(math.log(1.0 / 50.0), 0.0, grid_steps + 2)[1:-1])
    candidates = [float(h) for h in grid]
    candidates += [d / m for m in range(2, 51)]

    relaxed = [_relaxation(d, h) for h in grid]
    best_idx = int(np.argmin(relaxed))
    lo = float(grid[max(best_idx - 1, 0)])
    hi = float(grid[min(best_idx + 1, len(grid) - 1)])
    if hi > lo:
        refined = optimize.minimize_scalar(lambda h: _relaxation(d, h), bounds=(lo, hi), method="bounded")
        h_ref = float(refined.x)
        candidates += [h_ref, d / max(2, ceil_tol(d / h_ref))]

    best: Optional[Scheme] = None
    for h in candidates:
        scheme = _scheme_at(d, h)
        if scheme is None:
            continue
        if best is None or (scheme.palette_size, -scheme.h) < (best.palette_size, -best.h):
            best = scheme

    if best is None:
        raise DomainError(f"no admissible stratum height for d={d}")
    logger.debug("optimize_checkerboard(d=%s): h=%s palette=%d", d, best.h, best.palette_size)
    return BoundResult(value=best.palette_size, source=BoundSource.OPTIMIZED, params=best)


def large_d_value(d: float, k: int) -> int:
    return (k + 1) * (ceil_tol(d / math.log(k)) + 1)


def closed_form_candidates(d: float) -> List[BoundResult]:
    """Every closed-form bound that applies at d, in priority order."""
    check_distance(d)
    found: List[BoundResult] = []

    if d <= 2.0 * LOG2:
        found.append(BoundResult(value=9, source=BoundSource.SMALL_D_9, params=_scheme_at(d, d / 2.0)))
    if FUNDDOM_WINDOW[0] <= d <= FUNDDOM_WINDOW[1]:
        found.append(BoundResult(value=8, source=BoundSource.FUNDDOM_8,
                                 note="heptagonal tiling colored by a fundamental domain"))
    for upper, value in INTERVAL_TABLE:
        if d <= upper:
            found.append(BoundResult(value=value, source=_TABLE_SOURCES[value]))
            break
    if d >= 2.0:
        found.append(BoundResult(value=large_d_value(d, 4), source=BoundSource.LARGE_D_K4,
                                 params=large_d_scheme(d, 4)))
        found.append(BoundResult(value=large_d_value(d, 3), source=BoundSource.LARGE_D_K3,
                                 params=large_d_scheme(d, 3)))
    return found


def closed_form_bound(d: float) -> BoundResult:
    """Smallest applicable closed-form bound; earlier sources win ties."""
    return min(closed_form_candidates(d), key=lambda b: b.value)


def large_d_crossover(d_start: float = 2.0, d_stop: float = 400.0, step: float = 0.01) -> float:
    """Smallest scanned d beyond which the k=4 family never loses to k=3."""
    last_loss = d_start
    for d in np.arange(d_start, d_stop, step):
        if large_d_value(float(d), 3) < large_d_value(float(d), 4):
            last_loss = float(d)
    return last_loss + step


def d0_residual(d: float) -> float:
    # base width equals d at h = d/2
    return (1.0 + 2.0 * math.exp(d / 2.0) * math.cosh(d) - math.exp(d)) / 2.0 - math.cosh(d)


def d0_closed_form() -> float:
    root = (108.0 + 12.0 * math.sqrt(69.0)) ** (1.0 / 3.0)
    return 2.0 * math.log((root + 12.0 / root) / 6.0)


def solve_d0() -> float:
    """Positive threshold below which w(d/2) < d, found by bisection."""
    try:
        return float(optimize.bisect(d0_residual, 0.1, 1.0, xtol=1e-13, maxiter=200))
    except ValueError as e:
        raise DomainError(f"d0 bracket failure: {e}") from e


def interval_upper_bound(d: float, c: float) -> BoundResult:
    """Checkerboard bound for the forbidden interval [d, cd] with w = d, h = log 4."""
    if c <= 1:
        raise ParameterError("c must exceed 1")
    check_distance(d)
    check_distance(c * d, "cd")
    envelope = 2.0 * (2.0 * math.exp((c * d - 1.0) / 2.0) + 1.0) * (c * d + 1.0)

    if rect_diameter(d, LOG4) > d * (1.0 + 1e-9):
        return BoundResult(source=BoundSource.INTERVAL, applicable=False, envelope=envelope,
                           note=f"rectangle diameter {rect_diameter(d, LOG4):.6f} exceeds d at h = log 4")

    scheme = interval_scheme(d, c)
    value = scheme.palette_size
    if d >= 2 and value > envelope:
        raise DomainError(f"interval bound {value} exceeds its envelope {envelope}")
    return BoundResult(value=value, source=BoundSource.INTERVAL, params=scheme, envelope=envelope)


def interval_clique_points(d: float, c: float, tol: float = 1e-9) -> CliqueWitness:
    """
    Points on a hyperbolic circle of radius cd/2, consecutive ones at distance d

    Every pair is then at distance in [d, cd]; n = floor(2 pi / theta) with
    theta = 2 arcsin(sinh(d/2) / sinh(cd/2)).
    """
    if c <= 1:
        raise ParameterError("need c > 1")
    check_distance(d)
    check_distance(c * d, "cd")
    radius = c * d / 2.0
    theta = 2.0 * math.asin(math.exp(log_period_ratio(d, c * d)))
    n = int(math.floor(2.0 * math.pi / theta))

    # successive points at hyperbolic angle theta about the center
    xs, ys = point_at_angle_xy(0.0, 1.0, theta * np.arange(n), radius)
    points = [HPoint(x=float(x), y=float(y)) for x, y in zip(xs, ys)]
    dist = hyp_distance_xy(xs[:, None], ys[:, None], xs[None, :], ys[None, :])
    slack = tol * max(1.0, c * d)

    from_first = dist[0, 1: n // 2 + 1]
    if np.any(np.diff(from_first) < -slack):
        raise DomainError("chord length not monotone in central angle")

    off = dist[~np.eye(n, dtype=bool)]
    lo = float(off.min()) if off.size else 0.0
    hi = float(off.max()) if off.size else 0.0
    ok = bool(off.size == 0 or (lo >= d - slack and hi <= c * d + slack))
    return CliqueWitness(points=points, d_min=d, d_max=c * d, n=n, theta=theta,
                         min_distance=lo, max_distance=hi, pairwise_ok=ok)


def bound_report(d: float, c: Optional[float] = None, grid_steps: int = 512) -> BoundReport:
    """All bounds the CLI reports for d (and the interval [d, cd] when c is given)."""
    if c is not None:
        interval = interval_upper_bound(d, c)
        return BoundReport(d=d, c=c, bounds=[interval], best=interval if interval.applicable else None)

    bounds = closed_form_candidates(d)
    try:
        bounds.append(optimize_checkerboard(d, grid_steps))
    except DomainError as e:
        logger.warning("optimizer failed for d=%s: %s", d, e)
    return BoundReport(d=d, bounds=bounds, best=min(bounds, key=lambda b: b.value))
