#!/usr/bin/env python3
"""
Heptagonal Tiling Patches
Finite patches of the {7,3} tiling of the half-plane, the 8-coloring of its
dual graph, and numerical checks of the heptagon diameter and of the
separation between same-colored tiles.

Every tile is the image of one base heptagon centered at (0, 1). Edge k of a
tile has its midpoint at hyperbolic angle 2 pi k / 7 from the center (counter-clockwise).
The tile across edge k of the tile carried by g is carried by g R^k E, with R
the rotation by 2 pi / 7 about the center and E the half-turn about the
midpoint of edge 0. Colors are read off a label in PSL(2, 7) that follows the
same words (R -> z + 1, E -> -1/z), so the coloring is a function of the tile.
"""

import csv
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, TextIO, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import optimize

from .errors import ConstructionError, ParameterError
from .hypgeom import (
    HPoint,
    Isometry,
    apply_isometry,
    apply_isometry_xy,
    half_turn_about,
    hyp_distance_xy,
    point_at_angle,
    rotation_about,
)

logger = logging.getLogger(__name__)

SIDES = 7
COLORS = 8
MAX_DEPTH = 5
DEDUP_TOL = 1e-7
SAMPLES_PER_SIDE = 64
REFINE_ROUNDS = 2
MODULUS = 7

# turn rule, in edge steps: at a tile, the edge two steps ccw from the edge
# towards u leads to v; at v, four steps ccw from the edge back leads to w
RULE_FIRST_TURN = 2
RULE_SECOND_TURN = 4

Label = Tuple[int, int, int, int]


class HeptagonGeometry(BaseModel):
    model_config = ConfigDict(frozen=True)

    circumradius: float
    inradius: float
    side_length: float
    diameter: float
    interior_angle: float = Field(2.0 * math.pi / 3.0)
    vertex_count: int = SIDES


def heptagon_geometry() -> HeptagonGeometry:
    """Regular heptagon with interior angles 2 pi / 3."""
    cot = lambda t: 1.0 / math.tan(t)  # noqa: E731
    circumradius = math.acosh(cot(math.pi / 7.0) * cot(math.pi / 3.0))
    inradius = math.acosh(math.cos(math.pi / 3.0) / math.sin(math.pi / 7.0))
    side = 2.0 * math.asinh(math.sinh(circumradius) * math.sin(math.pi / 7.0))
    chords = [
        math.acosh(math.cosh(circumradius) ** 2
                   - math.sinh(circumradius) ** 2 * math.cos(2.0 * math.pi * k / 7.0))
        for k in (1, 2, 3)
    ]
    return HeptagonGeometry(circumradius=circumradius, inradius=inradius,
                            side_length=side, diameter=max(chords))


def _label_mul(p: Label, q: Label) -> Label:
    a, b, c, d = p
    e, f, g, h = q
    return ((a * e + b * g) % MODULUS, (a * f + b * h) % MODULUS,
            (c * e + d * g) % MODULUS, (c * f + d * h) % MODULUS)


def label_color(label: Label) -> int:
    """Image of infinity under the label: infinity -> 0, p -> p + 1."""
    a, _, c, _ = label
    if c % MODULUS == 0:
        return 0
    return (a * pow(c, MODULUS - 2, MODULUS)) % MODULUS + 1


_IDENTITY_LABEL: Label = (1, 0, 0, 1)
_SHIFT_LABEL: Label = (1, 1, 0, 1)
_FLIP_LABEL: Label = (0, MODULUS - 1, 1, 0)


class Tile(BaseModel):
    model_config = ConfigDict(frozen=True)

    motion: Isometry = Field(..., description="Carries the base heptagon onto this tile")
    dual_id: int
    depth: int = Field(..., description="Dual-graph distance from the base tile")
    label: Label
    color_id: Optional[int] = Field(None, ge=0, le=COLORS - 1)

    @property
    def center(self) -> HPoint:
        x, y = apply_isometry_xy(self.motion, 0.0, 1.0)
        return HPoint(x=float(x), y=float(y))


@dataclass(frozen=True)
class TilingPatch:
    tiles: List[Tile]
    adjacency: List[List[int]]  # adjacency[t][k] = tile across edge k, or -1
    depth: int
    geometry: HeptagonGeometry = field(default_factory=heptagon_geometry)

    def is_interior(self, t: int) -> bool:
        return all(n >= 0 for n in self.adjacency[t])

    @property
    def colored(self) -> bool:
        return all(t.color_id is not None for t in self.tiles)


class _Frame:
    """Base heptagon generators and per-edge data shared by patch operations."""

    def __init__(self, geometry: HeptagonGeometry):
        self.geometry = geometry
        self.center = HPoint(x=0.0, y=1.0)
        rot = rotation_about(self.center, 2.0 * math.pi / SIDES)
        midpoint = point_at_angle(self.center, 0.0, geometry.inradius)
        flip = half_turn_about(midpoint)

        self.rot_pow = [Isometry.identity()]
        for _ in range(SIDES - 1):
            self.rot_pow.append(self.rot_pow[-1].compose(rot))
        self.steps = [r.compose(flip) for r in self.rot_pow]

        shift_pow = [_IDENTITY_LABEL]
        for _ in range(SIDES - 1):
            shift_pow.append(_label_mul(shift_pow[-1], _SHIFT_LABEL))
        self.label_steps = [_label_mul(s, _FLIP_LABEL) for s in shift_pow]

        # midpoint k is midpoint 0 carried by R^k
        mids = [apply_isometry(r, midpoint) for r in self.rot_pow]
        self.mid_x = np.array([m.x for m in mids])
        self.mid_y = np.array([m.y for m in mids])

        # side k as the image of the geodesic |z| = e^r, arc-length parameter u;
        # the vertical direction (angle pi/2) is turned onto angle 2 pi k / 7
        quarter_back = rotation_about(self.center, -math.pi / 2.0)
        self.side_maps = [r.compose(quarter_back) for r in self.rot_pow]
        self.half_side = geometry.side_length / 2.0

    def side_point(self, motion: Isometry, side: int, u):
        scale = math.exp(self.geometry.inradius)
        x = scale * np.tanh(u)
        y = scale / np.cosh(u)
        return apply_isometry_xy(motion.compose(self.side_maps[side]), x, y)

    def boundary(self, motion: Isometry, per_side: int):
        u = np.linspace(-self.half_side, self.half_side, per_side)
        xs, ys, sides, params = [], [], [], []
        for k in range(SIDES):
            x, y = self.side_point(motion, k, u)
            xs.append(x)
            ys.append(y)
            sides.append(np.full(per_side, k))
            params.append(u)
        return np.concatenate(xs), np.concatenate(ys), np.concatenate(sides), np.concatenate(params)

    def vertices(self, motion: Isometry):
        xs, ys = [], []
        for k in range(SIDES):
            x, y = self.side_point(motion, k, self.half_side)
            xs.append(float(x))
            ys.append(float(y))
        return xs, ys


def generate_patch(depth: int) -> TilingPatch:
    """All tiles within dual-graph distance depth of the base tile."""
    if not 0 <= depth <= MAX_DEPTH:
        raise ParameterError(f"depth must be in [0, {MAX_DEPTH}], got {depth}")
    frame = _Frame(heptagon_geometry())

    motions: List[Isometry] = [Isometry.identity()]
    labels: List[Label] = [_IDENTITY_LABEL]
    depths: List[int] = [0]
    mids: List[Tuple[np.ndarray, np.ndarray]] = [(frame.mid_x, frame.mid_y)]
    adjacency: List[List[int]] = [[-1] * SIDES]
    capacity = 8192
    cx = np.empty(capacity)
    cy = np.empty(capacity)
    cx[0], cy[0] = 0.0, 1.0

    def find(x: float, y: float) -> int:
        n = len(motions)
        dist = hyp_distance_xy(cx[:n], cy[:n], x, y)
        idx = int(np.argmin(dist))
        return idx if dist[idx] < DEDUP_TOL else -1

    def link(t: int, k: int, n: int) -> None:
        mx, my = mids[t]
        back = hyp_distance_xy(mids[n][0], mids[n][1], mx[k], my[k])
        j = int(np.argmin(back))
        if back[j] > 1e-6:
            raise ConstructionError(f"tiles {t} and {n} share no edge", witness=(t, k, n))
        adjacency[t][k] = n
        adjacency[n][j] = t

    queue = deque([0])
    while queue:
        t = queue.popleft()
        for k in range(SIDES):
            if adjacency[t][k] >= 0:
                continue
            motion = motions[t].compose(frame.steps[k])
            label = _label_mul(labels[t], frame.label_steps[k])
            x, y = apply_isometry_xy(motion, 0.0, 1.0)
            n = find(float(x), float(y))
            if n >= 0:
                if label_color(label) != label_color(labels[n]):
                    raise ConstructionError(f"tile {n} reached with two colors", witness=(t, k, n))
                link(t, k, n)
                continue
            if depths[t] >= depth:
                continue
            n = len(motions)
            motions.append(motion)
            labels.append(label)
            depths.append(depths[t] + 1)
            mids.append(apply_isometry_xy(motion, frame.mid_x, frame.mid_y))
            adjacency.append([-1] * SIDES)
            cx[n], cy[n] = float(x), float(y)
            link(t, k, n)
            queue.append(n)
        if len(motions) >= capacity:
            raise ConstructionError("tile buffer exhausted")

    tiles = [Tile(motion=m, dual_id=i, depth=d, label=lb)
             for i, (m, d, lb) in enumerate(zip(motions, depths, labels))]
    logger.info("heptagon patch depth %d: %d tiles", depth, len(tiles))
    return TilingPatch(tiles=tiles, adjacency=adjacency, depth=depth, geometry=frame.geometry)


def rule_walks(patch: TilingPatch):
    """Yield every (u, a, v, w) walk of the turn rule available in the patch."""
    adj = patch.adjacency
    for a in range(len(patch.tiles)):
        for b in range(SIDES):
            u = adj[a][b]
            v = adj[a][(b + RULE_FIRST_TURN) % SIDES]
            if u < 0 or v < 0:
                continue
            back = adj[v].index(a)
            w = adj[v][(back + RULE_SECOND_TURN) % SIDES]
            if w >= 0:
                yield u, a, v, w


def color_patch(patch: TilingPatch) -> TilingPatch:
    """
    Color the patch with 8 colors

    The base tile and its 7 neighbors receive the 8 distinct colors; every
    walk of the turn rule must return to the starting color and no two
    adjacent tiles may share a color. Any failure raises ConstructionError
    carrying the offending walk.
    """
    colors = [label_color(t.label) for t in patch.tiles]

    seed = [0] + [n for n in patch.adjacency[0] if n >= 0]
    if len(seed) == SIDES + 1 and len({colors[t] for t in seed}) != COLORS:
        raise ConstructionError("base shape is not 8-colored", witness=seed)

    for u, a, v, w in rule_walks(patch):
        if colors[u] != colors[w]:
            raise ConstructionError(f"turn rule broken on walk {(u, a, v, w)}", witness=(u, a, v, w))

    for t, row in enumerate(patch.adjacency):
        for n in row:
            if n >= 0 and colors[n] == colors[t]:
                raise ConstructionError(f"adjacent tiles {t}, {n} share color", witness=(t, n))

    tiles = [tile.model_copy(update={"color_id": c}) for tile, c in zip(patch.tiles, colors)]
    return TilingPatch(tiles=tiles, adjacency=patch.adjacency, depth=patch.depth, geometry=patch.geometry)


def dual_distance(patch: TilingPatch, source: int, target: int) -> int:
    seen = {source: 0}
    queue = deque([source])
    while queue:
        t = queue.popleft()
        if t == target:
            return seen[t]
        for n in patch.adjacency[t]:
            if n >= 0 and n not in seen:
                seen[n] = seen[t] + 1
                queue.append(n)
    return -1


class SeparationResult(BaseModel):
    distance: float
    tile_a: int
    tile_b: int
    point_a: Tuple[float, float]
    point_b: Tuple[float, float]
    dual_distance: int
    pairs_examined: int


def _refine(frame: _Frame, motion_a: Isometry, side_a: int, ua: float,
            motion_b: Isometry, side_b: int, ub: float, step: float):
    lo_a, hi_a = max(-frame.half_side, ua - step), min(frame.half_side, ua + step)
    lo_b, hi_b = max(-frame.half_side, ub - step), min(frame.half_side, ub + step)

    def dist(u1, u2):
        x1, y1 = frame.side_point(motion_a, side_a, u1)
        x2, y2 = frame.side_point(motion_b, side_b, u2)
        return float(hyp_distance_xy(x1, y1, x2, y2))

    for _ in range(REFINE_ROUNDS):
        ua = optimize.minimize_scalar(lambda u: dist(u, ub), bounds=(lo_a, hi_a),
                                      method="bounded", options={"xatol": 1e-12}).x
        ub = optimize.minimize_scalar(lambda u: dist(ua, u), bounds=(lo_b, hi_b),
                                      method="bounded", options={"xatol": 1e-12}).x
    return float(ua), float(ub), dist(ua, ub)


def closest_same_color_pair(patch: TilingPatch) -> SeparationResult:
    """Same-colored pair of tiles whose closures are nearest, with the realizing points."""
    if not patch.colored:
        patch = color_patch(patch)
    frame = _Frame(patch.geometry)
    geom = patch.geometry

    pairs = []
    centers = [t.center for t in patch.tiles]
    for a in range(len(patch.tiles)):
        for b in range(a + 1, len(patch.tiles)):
            if patch.tiles[a].color_id == patch.tiles[b].color_id:
                gap = float(hyp_distance_xy(centers[a].x, centers[a].y, centers[b].x, centers[b].y))
                pairs.append((gap, a, b))
    if not pairs:
        raise ParameterError("no same-colored pair of tiles in the patch")
    pairs.sort()

    boundaries = {}

    def boundary(t: int):
        if t not in boundaries:
            boundaries[t] = frame.boundary(patch.tiles[t].motion, SAMPLES_PER_SIDE)
        return boundaries[t]

    best = (math.inf, -1, -1, 0, 0)
    examined = 0
    for gap, a, b in pairs:
        if gap - 2.0 * geom.circumradius > best[0]:
            break
        examined += 1
        xa, ya, _, _ = boundary(a)
        xb, yb, _, _ = boundary(b)
        dist = hyp_distance_xy(xa[:, None], ya[:, None], xb[None, :], yb[None, :])
        ia, ib = np.unravel_index(int(np.argmin(dist)), dist.shape)
        if dist[ia, ib] < best[0]:
            best = (float(dist[ia, ib]), a, b, int(ia), int(ib))

    _, a, b, ia, ib = best
    _, _, side_a, param_a = boundary(a)
    _, _, side_b, param_b = boundary(b)
    step = 2.0 * frame.half_side / (SAMPLES_PER_SIDE - 1)
    motion_a, motion_b = patch.tiles[a].motion, patch.tiles[b].motion
    ua, ub, distance = _refine(frame, motion_a, int(side_a[ia]), float(param_a[ia]),
                               motion_b, int(side_b[ib]), float(param_b[ib]), step)
    distance = min(distance, best[0])
    pa = frame.side_point(motion_a, int(side_a[ia]), ua)
    pb = frame.side_point(motion_b, int(side_b[ib]), ub)
    return SeparationResult(distance=distance, tile_a=a, tile_b=b,
                            point_a=(float(pa[0]), float(pa[1])), point_b=(float(pb[0]), float(pb[1])),
                            dual_distance=dual_distance(patch, a, b), pairs_examined=examined)


def min_same_color_separation(patch: TilingPatch) -> float:
    return closest_same_color_pair(patch).distance


class HeptileReport(BaseModel):
    geometry: HeptagonGeometry
    depth: int
    tile_count: int
    colors_used: int = 0
    separation: Optional[SeparationResult] = None
    printed_window: Tuple[float, float] = (1.22, 1.77)
    computed_window: Optional[Tuple[float, float]] = None


def heptile_report(depth: int) -> HeptileReport:
    """Geometry plus, for depth >= 2, the same-color separation of a colored patch."""
    geometry = heptagon_geometry()
    patch = color_patch(generate_patch(depth))
    report = HeptileReport(geometry=geometry, depth=depth, tile_count=len(patch.tiles),
                           colors_used=len({t.color_id for t in patch.tiles}))
    if depth >= 2:
        separation = closest_same_color_pair(patch)
        report = report.model_copy(update={
            "separation": separation,
            "computed_window": (geometry.diameter, separation.distance),
        })
    return report


def tile_rows(patch: TilingPatch) -> List[Tuple[int, int, float, float]]:
    rows = []
    for tile in patch.tiles:
        c = tile.center
        rows.append((tile.dual_id, -1 if tile.color_id is None else tile.color_id, c.x, c.y))
    return rows


def export_tiles(patch: TilingPatch, stream: TextIO) -> int:
    writer = csv.writer(stream)
    writer.writerow(["dualId", "colorId", "centerX", "centerY"])
    rows = tile_rows(patch)
    writer.writerows(rows)
    return len(rows)


def tile_vertices(patch: TilingPatch) -> Dict[int, List[Tuple[float, float]]]:
    frame = _Frame(patch.geometry)
    out = {}
    for tile in patch.tiles:
        xs, ys = frame.vertices(tile.motion)
        out[tile.dual_id] = list(zip(xs, ys))
    return out
