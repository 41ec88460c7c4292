#!/usr/bin/env python3
"""
Regular Tree Balls
Finite balls of the q-regular tree T_q together with a spine x_0, x_1, ..., x_K
towards a fixed end, the Busemann stratification that end induces, and the
tree colorings, cliques and spindle gadgets built on it.

Vertex 0 is the base x_0. Every vertex except x_K has a parent (one step
towards the end); children carry labels 0..q-2. Under a spine vertex x_k the
child x_{k-1} has label 0.
"""

import csv
import logging
import math
from collections import deque
from dataclasses import dataclass
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, TextIO, Tuple

from pydantic import BaseModel, Field, computed_field

from .config import get_settings
from .errors import ConstructionError, DomainError, ParameterError, SizeLimitError

logger = logging.getLogger(__name__)

ColorFn = Callable[["TreeBall", int], Optional[Hashable]]


@dataclass(frozen=True)
class TreeBall:
    q: int
    radius: int
    spine_len: int
    parent: List[int]
    children: List[List[int]]
    label: List[int]
    level: List[int]
    dist0: List[int]
    spine: List[int]

    @property
    def base(self) -> int:
        return 0

    @property
    def vertex_count(self) -> int:
        return len(self.parent)

    @property
    def ball_vertices(self) -> List[int]:
        return [v for v, d in enumerate(self.dist0) if d <= self.radius]

    def neighbors(self, v: int) -> List[int]:
        p = self.parent[v]
        return self.children[v] + ([p] if p >= 0 else [])

    def edges(self) -> List[Tuple[int, int]]:
        return [(p, v) for v, p in enumerate(self.parent) if p >= 0]


def ball_size(q: int, radius: int) -> int:
    return 1 + q * ((q - 1) ** radius - 1) // (q - 2)


def build_ball(q: int, radius: int, spine_len: int, vertex_cap: Optional[int] = None) -> TreeBall:
    """Ball of the given radius about x_0 together with the spine up to x_K."""
    if q < 3:
        raise ParameterError("q must be at least 3")
    if radius < 1:
        raise ParameterError("radius must be at least 1")
    if spine_len < radius + 1:
        raise ParameterError("spine length must exceed the radius")
    cap = vertex_cap or get_settings().vertex_cap
    total = ball_size(q, radius) + spine_len - radius
    if total > cap:
        raise SizeLimitError(f"ball of {total} vertices exceeds cap {cap}")

    parent = [-1]
    children: List[List[int]] = [[]]
    label = [0]
    level = [0]
    dist0 = [0]

    def add(p: int, lab: int, lev: int, d: int) -> int:
        parent.append(p)
        children.append([])
        label.append(lab)
        level.append(lev)
        dist0.append(d)
        return len(parent) - 1

    spine = [0]
    for k in range(1, spine_len + 1):
        x = add(-1, 0, -k, k)
        parent[spine[-1]] = x
        children[x].append(spine[-1])
        spine.append(x)

    # grow away from the end, breadth first from the base and the spine
    queue = deque()
    for lab in range(q - 1):
        child = add(0, lab, 1, 1)
        children[0].append(child)
        queue.append(child)
    for k in range(1, min(radius, spine_len + 1)):
        x = spine[k]
        for lab in range(1, q - 1):
            child = add(x, lab, -k + 1, k + 1)
            children[x].append(child)
            queue.append(child)
    while queue:
        v = queue.popleft()
        if dist0[v] >= radius:
            continue
        for lab in range(q - 1):
            child = add(v, lab, level[v] + 1, dist0[v] + 1)
            children[v].append(child)
            queue.append(child)

    ball = TreeBall(q=q, radius=radius, spine_len=spine_len, parent=parent, children=children,
                    label=label, level=level, dist0=dist0, spine=spine)
    logger.debug("built T_%d ball radius %d: %d vertices", q, radius, ball.vertex_count)
    return ball


def busemann_level(ball: TreeBall, v: int) -> int:
    return ball.level[v]


def ancestor(ball: TreeBall, v: int, steps: int) -> Optional[int]:
    """Vertex `steps` edges towards the end from v, or None past x_K."""
    for _ in range(steps):
        v = ball.parent[v]
        if v < 0:
            return None
    return v


def ancestor_at_height(ball: TreeBall, v: int, height: int) -> Optional[int]:
    """Ancestor `height` levels above v (height 0 is v itself)."""
    return ancestor(ball, v, height)


def tree_distance(ball: TreeBall, u: int, v: int) -> int:
    """Length of the path between u and v through their end-rooted common ancestor."""
    level, parent = ball.level, ball.parent
    a, b = u, v
    while level[a] > level[b]:
        a = parent[a]
    while level[b] > level[a]:
        b = parent[b]
    while a != b:
        a, b = parent[a], parent[b]
        if a < 0 or b < 0:
            raise DomainError(f"vertices {u}, {v} have no common ancestor in the ball")
    return (level[u] - level[a]) + (level[v] - level[a])


def vertices_at_distance(ball: TreeBall, source: int, max_distance: int) -> Dict[int, int]:
    """Breadth-first distances from source, truncated at max_distance."""
    seen = {source: 0}
    frontier = [source]
    for d in range(1, max_distance + 1):
        nxt = []
        for v in frontier:
            for n in ball.neighbors(v):
                if n not in seen:
                    seen[n] = d
                    nxt.append(n)
        frontier = nxt
    return seen


def color_odd(ball: TreeBall, v: int) -> int:
    return ball.level[v] % 2


def _require_even(d: int) -> None:
    if int(d) != d:
        raise DomainError("tree distances are integers")
    if d < 2 or d % 2:
        raise ParameterError("d must be an even integer >= 2")


def color_even(ball: TreeBall, v: int, d: int) -> Optional[Tuple[int, int]]:
    """
    (branch, stratum) coloring for even d

    The branch is the child label, below v's ancestor at height d/2, of the
    subtree holding v's ancestor at height (d-2)/2. Returns None when the
    ancestor lies beyond the spine.
    """
    _require_even(d)
    root = ancestor(ball, v, (d - 2) // 2)
    if root is None or ball.parent[root] < 0:
        return None
    return ball.label[root], ball.level[v] % (d + 1)


def interval_heights(d: int, c: float) -> Tuple[int, int, int]:
    """(super-bundle height, bundle-root height, stratum period) for [d, cd]."""
    cd = c * d
    return math.floor(cd / 2.0) + 1, math.ceil((d - 2) / 2.0), math.floor(cd) + 1


def color_interval_tree(ball: TreeBall, v: int, d: int, c: float) -> Optional[Tuple[Tuple[int, ...], int]]:
    """
    Coloring for the forbidden interval [d, cd]

    Color is the word of child labels from the ancestor at height
    floor(cd/2) + 1 down to the bundle root at height ceil((d-2)/2), together
    with the level modulo floor(cd) + 1.
    """
    if int(d) != d or d < 2:
        raise ParameterError("d must be an integer >= 2")
    if c <= 1:
        raise ParameterError("c must exceed 1")
    top, bottom, period = interval_heights(d, c)
    if ancestor(ball, v, top) is None:
        return None
    word = []
    node = ancestor(ball, v, bottom)
    for _ in range(top - bottom):
        word.append(ball.label[node])
        node = ball.parent[node]
    return tuple(reversed(word)), ball.level[v] % period


def color_even_palette(q: int, d: int) -> int:
    return (q - 1) * (d + 1)


def color_interval_palette(q: int, d: int, c: float) -> int:
    top, bottom, period = interval_heights(d, c)
    return (q - 1) ** (top - bottom) * period


def brooks_bound(q: int, d: int) -> int:
    if q < 3 or d < 1:
        raise ParameterError("need q >= 3 and d >= 1")
    return q * (q - 1) ** (d - 1) + 1


def _descend(ball: TreeBall, v: int, labels: Sequence[int]) -> int:
    for lab in labels:
        kids = [c for c in ball.children[v] if ball.label[c] == lab]
        if not kids:
            raise ParameterError("ball radius too small for the construction")
        v = kids[0]
    return v


def _check_pairs(ball: TreeBall, pairs: Iterable[Tuple[int, int]], lo: int, hi: int) -> None:
    for u, v in pairs:
        dist = tree_distance(ball, u, v)
        if not lo <= dist <= hi:
            raise ConstructionError(f"pair {(u, v)} at distance {dist}, expected [{lo}, {hi}]", witness=(u, v))


def clique_q(ball: TreeBall, d: int) -> List[int]:
    """q vertices pairwise at distance d: one per branch at distance d/2 from x_0."""
    _require_even(d)
    half = d // 2
    if ball.radius < half:
        raise ParameterError(f"radius {ball.radius} too small, need {half}")
    clique = [ball.spine[half]]
    clique += [_descend(ball, 0, [lab] + [0] * (half - 1)) for lab in range(ball.q - 1)]
    _check_pairs(ball, [(a, b) for i, a in enumerate(clique) for b in clique[i + 1:]], d, d)
    return clique


class SpindleGadget(BaseModel):
    vertices: List[int]
    pairs: List[Tuple[int, int]]
    d: int

    @computed_field
    @property
    def vertex_count(self) -> int:
        return len(self.vertices)


def moser_spindle(ball: TreeBall, d: int) -> SpindleGadget:
    """
    Rigid distance-d gadget forcing q + 1 colors

    Two q-cliques {v_1..v_{q-1}, v_q} and {v'_1..v'_{q-1}, v'_q} hang below
    x_0 (every v_i, v'_i at distance d from x_0) and v_q, v'_q are at
    distance d from each other.
    """
    _require_even(d)
    if d < 4:
        raise ParameterError("spindles need d >= 4")
    m = d // 2
    if ball.radius < d:
        raise ParameterError(f"radius {ball.radius} too small, need {d}")
    q = ball.q
    v0 = 0

    def family(center_path: List[int]) -> Tuple[List[int], int]:
        center = _descend(ball, v0, center_path)
        members = [_descend(ball, center, [i] + [0] * (m - 1)) for i in range(q - 1)]
        return members, center

    members, c = family([0] * m)
    p1 = ball.parent[c]
    other = _descend(ball, p1, [1])
    apex = _descend(ball, other, [0] * (m - 2))

    members_b, c_b = family([1] + [0] * (m - 1))
    y = ancestor(ball, c_b, m - 1)
    apex_b = _descend(ball, y, [1])

    pairs = [(v0, v) for v in members + members_b]
    for fam, top in ((members, apex), (members_b, apex_b)):
        pairs += [(a, b) for i, a in enumerate(fam) for b in fam[i + 1:]]
        pairs += [(a, top) for a in fam]
    pairs.append((apex, apex_b))

    vertices = [v0] + members + [apex] + members_b + [apex_b]
    if len(set(vertices)) != len(vertices):
        raise ConstructionError("spindle vertices collide", witness=vertices)
    _check_pairs(ball, pairs, d, d)
    return SpindleGadget(vertices=vertices, pairs=pairs, d=d)


def interval_clique_tree(ball: TreeBall, d: int, c: float) -> List[int]:
    """
    Clique for [d, floor(cd)]: companions at distance floor(cd/2) from x_0

    Every vertex at distance floor(cd/2) - ceil(d/2) + 1 from x_0 is extended
    by one fixed downward path to distance floor(cd/2).
    """
    if int(d) != d or d < 1 or c <= 1:
        raise ParameterError("need integer d >= 1 and c > 1")
    reach = math.floor(c * d / 2.0)
    inner = reach - math.ceil(d / 2.0) + 1
    if ball.radius < reach:
        raise ParameterError(f"radius {ball.radius} too small, need {reach}")
    if inner < 1:
        raise ParameterError("c too small for an interval clique")

    seeds = [v for v in ball.ball_vertices if ball.dist0[v] == inner]
    clique = []
    for node in seeds:
        for _ in range(reach - inner):
            node = next(n for n in ball.neighbors(node) if ball.dist0[n] == ball.dist0[node] + 1)
        clique.append(node)
    _check_pairs(ball, [(a, b) for i, a in enumerate(clique) for b in clique[i + 1:]],
                 d, math.floor(c * d))
    logger.debug("interval clique: %d vertices", len(clique))
    return sorted(clique)


class TreeWitness(BaseModel):
    u: int
    v: int
    distance: int
    color: str


class TreeVerification(BaseModel):
    q: int
    radius: int
    distances: List[int]
    checked_vertices: int
    checked_pairs: int
    palette_size: int
    violation_count: int
    witnesses: List[TreeWitness] = Field(default_factory=list)

    @computed_field
    @property
    def passed(self) -> bool:
        return self.violation_count == 0


def verify_tree_coloring(ball: TreeBall, color_fn: ColorFn, distance_set: Iterable[int],
                         max_witnesses: int = 20) -> TreeVerification:
    """
    Exhaustive check that no two ball vertices at a forbidden distance share a color

    Vertices whose color is undefined (None: a needed ancestor is past the
    spine) are skipped.
    """
    distances = sorted(set(int(d) for d in distance_set))
    if not distances or distances[0] < 1:
        raise ParameterError("distance set must contain positive integers")
    reach = distances[-1]
    wanted = set(distances)

    colors = {}
    for v in ball.ball_vertices:
        col = color_fn(ball, v)
        if col is not None:
            colors[v] = col

    pairs = 0
    violations = 0
    witnesses: List[TreeWitness] = []
    for u, cu in colors.items():
        for v, dist in vertices_at_distance(ball, u, reach).items():
            if v <= u or dist not in wanted or v not in colors:
                continue
            pairs += 1
            if colors[v] == cu:
                violations += 1
                if len(witnesses) < max_witnesses:
                    witnesses.append(TreeWitness(u=u, v=v, distance=dist, color=str(cu)))
    return TreeVerification(q=ball.q, radius=ball.radius, distances=distances,
                            checked_vertices=len(colors), checked_pairs=pairs,
                            palette_size=len(set(colors.values())), violation_count=violations,
                            witnesses=witnesses)


def palette_size(ball: TreeBall, color_fn: ColorFn) -> int:
    return len({col for v in ball.ball_vertices if (col := color_fn(ball, v)) is not None})


def levels_agree(q: int, radius: int, spine_len: int) -> bool:
    """Busemann levels of the ball do not change when the spine grows by one."""
    a = build_ball(q, radius, spine_len)
    b = build_ball(q, radius, spine_len + 1)
    return [a.level[v] for v in a.ball_vertices] == [b.level[v] for v in b.ball_vertices]


def export_edges(ball: TreeBall, stream: TextIO) -> int:
    edges = ball.edges()
    for u, v in edges:
        stream.write(f"{u} {v}\n")
    return len(edges)


def export_coloring(ball: TreeBall, color_fn: ColorFn, stream: TextIO) -> int:
    """CSV rows vertexId,level,colorIndex; color indices follow first appearance."""
    writer = csv.writer(stream)
    writer.writerow(["vertexId", "level", "colorIndex"])
    index: Dict[Hashable, int] = {}
    rows = 0
    for v in ball.ball_vertices:
        col = color_fn(ball, v)
        if col is None:
            continue
        writer.writerow([v, ball.level[v], index.setdefault(col, len(index))])
        rows += 1
    return rows
