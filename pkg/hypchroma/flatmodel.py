#!/usr/bin/env python3
"""
Flat Model H_n
Combinatorial patches of the complex of equilateral triangles with n triangles
around every vertex, and the embedding of T_q into it.

A patch is grown ring by ring around a base vertex. Completing a ring vertex
b adds, outside the current disk, one triangle on each boundary edge (its apex
is a new vertex) and n - t(b) - 2 further triangles fanning around b, where
t(b) is the number of triangles b already has.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, TextIO, Tuple

from pydantic import BaseModel

from .config import get_settings
from .errors import ConstructionError, ParameterError, SizeLimitError

logger = logging.getLogger(__name__)

MAX_DEPTH = 6

Triangle = Tuple[int, int, int]


@dataclass(frozen=True)
class FlatComplex:
    n: int
    depth: int
    triangles: List[Triangle]
    rotation: List[List[int]]  # neighbors in counter-clockwise order
    complete: List[bool]
    ring: List[int]

    @property
    def vertex_count(self) -> int:
        return len(self.rotation)

    @property
    def edge_count(self) -> int:
        return sum(len(set(r)) for r in self.rotation) // 2

    @property
    def boundary_size(self) -> int:
        return sum(1 for r in self.ring if r == self.depth + 1)

    def euler_characteristic(self) -> int:
        return self.vertex_count - self.edge_count + len(self.triangles)


def ring_counts(n: int, depth: int) -> List[Tuple[int, int]]:
    """(apex, intermediate) vertex counts of rings 1..depth+1."""
    counts = [(0, n)]
    for _ in range(depth):
        apex, inter = counts[-1]
        counts.append((apex + inter, apex * (n - 6) + inter * (n - 5)))
    return counts


def ring_sizes(n: int, depth: int) -> List[int]:
    return [a + i for a, i in ring_counts(n, depth)]


def predicted_counts(n: int, depth: int) -> Tuple[int, int]:
    """Vertex and triangle counts of build_flat_patch(n, depth), by recurrence."""
    counts = ring_counts(n, depth)
    vertices = 1 + sum(a + i for a, i in counts)
    triangles = n + sum(a + i + a * (n - 5) + i * (n - 4) for a, i in counts[:depth])
    return vertices, triangles


def build_flat_patch(n: int, depth: int, vertex_cap: Optional[int] = None) -> FlatComplex:
    """
    Patch of H_n in which every vertex within `depth` steps of the base is complete

    The patch holds rings 0..depth+1; ring depth+1 is the boundary.
    """
    if n < 6:
        raise ParameterError("n must be at least 6")
    if not 0 <= depth <= MAX_DEPTH:
        raise ParameterError(f"depth must be in [0, {MAX_DEPTH}]")
    cap = vertex_cap or get_settings().vertex_cap
    expected_vertices, _ = predicted_counts(n, depth)
    if expected_vertices > cap:
        raise SizeLimitError(f"patch of {expected_vertices} vertices exceeds cap {cap}")

    tcount = [0]
    ring = [0]
    triangles: List[Triangle] = []

    def new_vertex(r: int) -> int:
        tcount.append(0)
        ring.append(r)
        return len(tcount) - 1

    def add_triangle(a: int, b: int, c: int) -> None:
        triangles.append((a, b, c))
        for v in (a, b, c):
            tcount[v] += 1

    current = [new_vertex(1) for _ in range(n)]
    for i in range(n):
        add_triangle(0, current[i], current[(i + 1) % n])

    for r in range(1, depth + 1):
        size = len(current)
        fans = []
        outer = []
        for b in current:
            extra = n - tcount[b] - 3
            if extra < 0:
                raise ConstructionError(f"vertex {b} already has {tcount[b]} triangles", witness=b)
            middle = [new_vertex(r + 1) for _ in range(extra)]
            apex = new_vertex(r + 1)
            fans.append((middle, apex))
            outer.extend(middle + [apex])
        for i, b in enumerate(current):
            middle, apex = fans[i]
            chain = [fans[i - 1][1]] + middle + [apex]
            for x, y in zip(chain, chain[1:]):
                add_triangle(b, x, y)
            add_triangle(b, apex, current[(i + 1) % size])
        current = outer
        logger.debug("H_%d ring %d: %d vertices", n, r + 1, len(current))

    rotation = _rotations(len(tcount), triangles)
    complete = [c == n for c in tcount]
    return FlatComplex(n=n, depth=depth, triangles=triangles, rotation=rotation,
                       complete=complete, ring=ring)


def _rotations(count: int, triangles: List[Triangle]) -> List[List[int]]:
    succ: List[Dict[int, int]] = [dict() for _ in range(count)]
    for a, b, c in triangles:
        succ[a][b] = c
        succ[b][c] = a
        succ[c][a] = b
    rotation = []
    for v in range(count):
        nxt = succ[v]
        starts = set(nxt) - set(nxt.values())
        start = min(starts) if starts else min(nxt)
        order = [start]
        while order[-1] in nxt and nxt[order[-1]] != start:
            order.append(nxt[order[-1]])
        rotation.append(order)
    return rotation


@dataclass(frozen=True)
class EmbeddingMap:
    q: int
    depth: int
    complex: FlatComplex
    tree_parent: List[int]
    tree_depth: List[int]
    vertex_map: List[int]
    edge_map: List[Tuple[int, int]] = field(default_factory=list)

    def pairs(self) -> List[Tuple[int, int]]:
        return list(enumerate(self.vertex_map))


def embed_tree(q: int, n: int, depth: int) -> EmbeddingMap:
    """
    Embed the radius-`depth` ball of T_q into H_n

    Around every image vertex the q image edges are spread evenly through the
    n edges in counter-clockwise order starting from the edge to the parent,
    so consecutive image edges are at least 3 positions apart.
    """
    if q < 2:
        raise ParameterError("q must be at least 2")
    if q > n // 3:
        raise ParameterError(f"q={q} exceeds floor(n/3)={n // 3}")
    if depth < 1:
        raise ParameterError("depth must be at least 1")
    flat = build_flat_patch(n, depth - 1)

    parent = [-1]
    tdepth = [0]
    image = [0]
    edges: List[Tuple[int, int]] = []
    offsets = [(j * n) // q for j in range(q)]

    frontier = [0]
    for level in range(depth):
        nxt = []
        for v in frontier:
            w = image[v]
            if not flat.complete[w]:
                raise ConstructionError(f"image vertex {w} lies on the patch boundary", witness=w)
            around = flat.rotation[w]
            if v == 0:
                targets = [around[k] for k in offsets]
            else:
                start = around.index(image[parent[v]])
                targets = [around[(start + k) % n] for k in offsets[1:]]
            for t in targets:
                parent.append(v)
                tdepth.append(level + 1)
                image.append(t)
                edges.append((w, t))
                nxt.append(len(image) - 1)
        frontier = nxt

    return EmbeddingMap(q=q, depth=depth, complex=flat, tree_parent=parent,
                        tree_depth=tdepth, vertex_map=image, edge_map=edges)


class AngleCertificate(BaseModel):
    passed: bool
    injective: bool
    checked_vertices: int
    min_gap: Optional[int] = None
    witness: Optional[int] = None
    reason: str = ""


def check_angle_certificate(emb: EmbeddingMap) -> AngleCertificate:
    """
    Local geodesy certificate

    At every image vertex, consecutive image edges must be separated by at
    least two non-image edges in the cyclic order (an angle of at least pi).
    """
    flat = emb.complex
    injective = len(set(emb.vertex_map)) == len(emb.vertex_map)

    incident: Dict[int, set] = {}
    for a, b in emb.edge_map:
        if b not in flat.rotation[a]:
            return AngleCertificate(passed=False, injective=injective, checked_vertices=0,
                                    witness=a, reason=f"image edge ({a}, {b}) is not an edge of the complex")
        incident.setdefault(a, set()).add(b)
        incident.setdefault(b, set()).add(a)

    checked = 0
    min_gap = None
    for w, nbrs in sorted(incident.items()):
        if len(nbrs) < 2:
            continue
        if not flat.complete[w]:
            return AngleCertificate(passed=False, injective=injective, checked_vertices=checked,
                                    witness=w, reason="image vertex on the patch boundary")
        around = flat.rotation[w]
        pos = sorted(around.index(x) for x in nbrs)
        gaps = [b - a - 1 for a, b in zip(pos, pos[1:])] + [pos[0] + flat.n - pos[-1] - 1]
        checked += 1
        smallest = min(gaps)
        min_gap = smallest if min_gap is None else min(min_gap, smallest)
        if smallest < 2:
            return AngleCertificate(passed=False, injective=injective, checked_vertices=checked,
                                    min_gap=min_gap, witness=w,
                                    reason=f"image edges at {w} only {smallest} apart")

    if not injective:
        return AngleCertificate(passed=False, injective=False, checked_vertices=checked,
                                min_gap=min_gap, reason="vertex map is not injective")
    return AngleCertificate(passed=True, injective=True, checked_vertices=checked, min_gap=min_gap)


def export_map(emb: EmbeddingMap, stream: TextIO) -> int:
    for tree_vertex, flat_vertex in emb.pairs():
        stream.write(f"{tree_vertex} {flat_vertex}\n")
    return len(emb.vertex_map)
