#!/usr/bin/env python3
"""
Exact Coloring Search
Distance graphs of finite metric samples and the exact machinery run on them:
maximum clique, DSATUR-based k-colorability, chromatic number, and DIMACS CNF
export for external SAT solvers.

Budgets count search nodes, never wall time, so results are reproducible.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, TextIO, Tuple, Union

import networkx as nx
from pydantic import BaseModel, Field, model_validator
from pysat.formula import CNF
from pysat.solvers import Solver

from .config import get_settings
from .errors import ConstructionError, ParameterError
from .hypgeom import HPoint, hyp_distance
from .treegeom import TreeBall, vertices_at_distance

logger = logging.getLogger(__name__)

Forbidden = Union[int, float, Tuple[float, float], Iterable[int]]


@dataclass(frozen=True)
class DistGraph:
    """Simple undirected graph on 0..vertex_count-1; labels keep the source ids."""
    vertex_count: int
    edges: List[Tuple[int, int]]
    provenance: str = ""
    labels: Optional[List[int]] = None

    @cached_property
    def adjacency(self) -> List[List[int]]:
        adj: List[List[int]] = [[] for _ in range(self.vertex_count)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    @cached_property
    def neighbor_bits(self) -> List[int]:
        return [sum(1 << u for u in row) for row in self.adjacency]

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.vertex_count))
        graph.add_edges_from(self.edges)
        return graph

    def subgraph(self, vertices: Sequence[int]) -> "DistGraph":
        index = {v: i for i, v in enumerate(vertices)}
        edges = [(index[u], index[v]) for u, v in self.edges if u in index and v in index]
        return DistGraph(len(vertices), edges, self.provenance, list(vertices))


def _normalize_edges(edges: Iterable[Tuple[int, int]]) -> List[Tuple[int, int]]:
    return sorted({(min(u, v), max(u, v)) for u, v in edges if u != v})


def make_graph(vertex_count: int, edges: Iterable[Tuple[int, int]], provenance: str = "") -> DistGraph:
    edges = _normalize_edges(edges)
    for u, v in edges:
        if not 0 <= u < vertex_count or not 0 <= v < vertex_count:
            raise ParameterError(f"edge ({u}, {v}) outside 0..{vertex_count - 1}")
    return DistGraph(vertex_count, edges, provenance)


def _tree_distances(forbidden: Forbidden) -> List[int]:
    if isinstance(forbidden, tuple) and len(forbidden) == 2:
        lo, hi = forbidden
        return list(range(int(lo), int(hi) + 1))
    if isinstance(forbidden, (int, float)):
        if int(forbidden) != forbidden:
            raise ParameterError("tree distances are integers")
        return [int(forbidden)]
    return sorted(set(int(d) for d in forbidden))


def build_distance_graph(source: Union[TreeBall, Sequence[HPoint]], forbidden: Forbidden,
                         distance_fn: Optional[Callable] = None, tol: float = 1e-9) -> DistGraph:
    """
    Graph on the points of a finite source with edges at forbidden distances

    For a TreeBall the vertices are the ball vertices (ids kept in `labels`)
    and distances are exact integers; `forbidden` is an int, an inclusive
    (lo, hi) pair or a collection of ints. For a point list the comparison
    uses tol and `forbidden` is a distance or an inclusive (lo, hi) interval.
    """
    if isinstance(source, TreeBall):
        wanted = _tree_distances(forbidden)
        if not wanted or wanted[0] < 1:
            raise ParameterError("forbidden tree distances must be positive")
        vertices = source.ball_vertices
        index = {v: i for i, v in enumerate(vertices)}
        allowed = set(wanted)
        edges = []
        for v in vertices:
            for u, dist in vertices_at_distance(source, v, wanted[-1]).items():
                if dist in allowed and u in index and index[u] > index[v]:
                    edges.append((index[v], index[u]))
        provenance = f"T_{source.q} ball radius {source.radius}, distances {wanted}"
        return DistGraph(len(vertices), sorted(edges), provenance, list(vertices))

    points = list(source)
    metric = distance_fn or hyp_distance
    if isinstance(forbidden, tuple):
        lo, hi = forbidden
    else:
        lo = hi = float(forbidden)
    edges = []
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            dist = metric(points[i], points[j])
            if lo - tol <= dist <= hi + tol:
                edges.append((i, j))
    return DistGraph(len(points), edges, f"{len(points)} points, forbidden [{lo}, {hi}]")


class SolveStatus(str, Enum):
    SOLVED = "SOLVED"
    BOUNDED = "BOUNDED"
    TIMEOUT = "TIMEOUT"


class Decision(str, Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    TIMEOUT = "TIMEOUT"


class CliqueResult(BaseModel):
    size: int
    witness: List[int]
    status: SolveStatus
    nodes: int = 0


class DecisionResult(BaseModel):
    k: int
    status: Decision
    certificate: Optional[List[int]] = None
    nodes: int = 0


class ColoringResult(BaseModel):
    lower_bound: int
    upper_bound: int
    exact: Optional[int] = None
    certificate: Optional[List[int]] = None
    status: SolveStatus
    nodes: int = 0
    clique: List[int] = Field(default_factory=list)

    @model_validator(mode="after")
    def _consistent(self) -> "ColoringResult":
        if self.lower_bound > self.upper_bound:
            raise ValueError("lower bound exceeds upper bound")
        if self.exact is not None and not (self.lower_bound == self.exact == self.upper_bound):
            raise ValueError("exact value must equal both bounds")
        return self


class _BudgetExceeded(Exception):
    pass


def _budget(budget: Optional[int]) -> int:
    return budget if budget is not None else get_settings().budget


def verify_coloring(g: DistGraph, coloring: Sequence[int]) -> bool:
    if len(coloring) != g.vertex_count:
        return False
    return all(coloring[u] != coloring[v] for u, v in g.edges)


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def max_clique(g: DistGraph, budget: Optional[int] = None) -> CliqueResult:
    """Branch and bound with greedy-coloring bounds over bitsets, seeded greedily."""
    n = g.vertex_count
    if n == 0:
        return CliqueResult(size=0, witness=[], status=SolveStatus.SOLVED)
    nbits = g.neighbor_bits
    limit = _budget(budget)

    seed: List[int] = []
    candidates = (1 << n) - 1
    for v in sorted(range(n), key=lambda v: (-len(g.adjacency[v]), v)):
        if candidates >> v & 1:
            seed.append(v)
            candidates &= nbits[v]
    best = list(seed)
    nodes = 0

    def color_sort(mask: int) -> Tuple[List[int], List[int]]:
        order, bounds = [], []
        color = 0
        uncolored = mask
        while uncolored:
            color += 1
            available = uncolored
            while available:
                v = (available & -available).bit_length() - 1
                available &= ~nbits[v] & ~(1 << v)
                uncolored &= ~(1 << v)
                order.append(v)
                bounds.append(color)
        return order, bounds

    def expand(current: List[int], mask: int) -> None:
        nonlocal best, nodes
        nodes += 1
        if nodes > limit:
            raise _BudgetExceeded
        order, bounds = color_sort(mask)
        for v, bound in zip(reversed(order), reversed(bounds)):
            if len(current) + bound <= len(best):
                return
            current.append(v)
            nxt = mask & nbits[v]
            if nxt:
                expand(current, nxt)
            elif len(current) > len(best):
                best = list(current)
            current.pop()
            mask &= ~(1 << v)

    try:
        expand([], (1 << n) - 1)
        status = SolveStatus.SOLVED
    except _BudgetExceeded:
        status = SolveStatus.BOUNDED
    return CliqueResult(size=len(best), witness=sorted(best), status=status, nodes=nodes)


def greedy_dsatur(g: DistGraph) -> List[int]:
    """Greedy DSATUR coloring; ties by degree then lowest id."""
    n = g.vertex_count
    adj = g.adjacency
    colors = [-1] * n
    seen: List[set] = [set() for _ in range(n)]
    for _ in range(n):
        v = max((u for u in range(n) if colors[u] < 0),
                key=lambda u: (len(seen[u]), len(adj[u]), -u))
        c = 0
        while c in seen[v]:
            c += 1
        colors[v] = c
        for u in adj[v]:
            seen[u].add(c)
    return colors


def _compact(coloring: Sequence[int]) -> List[int]:
    relabel: Dict[int, int] = {}
    return [relabel.setdefault(c, len(relabel)) for c in coloring]


def k_colorable(g: DistGraph, k: int, budget: Optional[int] = None,
                hint: Optional[Sequence[int]] = None,
                clique: Optional[Sequence[int]] = None) -> DecisionResult:
    """
    Decide whether g has a proper k-coloring

    DSATUR branching (most saturated vertex, then highest degree, then lowest
    id) with forward checking. A clique is precolored 0..|C|-1 and a vertex
    may open at most one new color, which removes color permutations. A
    proper hint using at most k colors is returned directly as a certificate.
    """
    if k < 1:
        raise ParameterError("k must be at least 1")
    n = g.vertex_count
    if n == 0:
        return DecisionResult(k=k, status=Decision.SAT, certificate=[])
    if hint is not None and verify_coloring(g, hint) and len(set(hint)) <= k:
        return DecisionResult(k=k, status=Decision.SAT, certificate=_compact(hint))

    limit = _budget(budget)
    adj = g.adjacency
    degree = [len(row) for row in adj]
    if clique is None:
        clique = max_clique(g, limit).witness
    if len(clique) > k:
        return DecisionResult(k=k, status=Decision.UNSAT)

    colors = [-1] * n
    counts = [[0] * k for _ in range(n)]
    sat = [0] * n

    def assign(v: int, c: int) -> None:
        colors[v] = c
        for u in adj[v]:
            if counts[u][c] == 0:
                sat[u] += 1
            counts[u][c] += 1

    def unassign(v: int, c: int) -> None:
        colors[v] = -1
        for u in adj[v]:
            counts[u][c] -= 1
            if counts[u][c] == 0:
                sat[u] -= 1

    for i, v in enumerate(clique):
        assign(v, i)
    uncolored = n - len(clique)
    max_used = len(clique) - 1
    preferred = list(hint) if hint is not None and len(hint) == n else None

    stack: List[list] = []
    nodes = 0
    need_select = True
    while True:
        if need_select:
            if uncolored == 0:
                certificate = list(colors)
                if not verify_coloring(g, certificate):
                    raise ConstructionError("search produced an improper coloring")
                return DecisionResult(k=k, status=Decision.SAT, certificate=certificate, nodes=nodes)
            v = max((u for u in range(n) if colors[u] < 0), key=lambda u: (sat[u], degree[u], -u))
            options = [c for c in range(min(k, max_used + 2)) if counts[v][c] == 0]
            if preferred is not None and preferred[v] in options:
                options.remove(preferred[v])
                options.insert(0, preferred[v])
            stack.append([v, options, 0, max_used])
            need_select = False

        frame = stack[-1]
        v, options, idx, prev_max = frame
        if colors[v] >= 0:
            unassign(v, colors[v])
            uncolored += 1
            max_used = prev_max
        if idx >= len(options):
            stack.pop()
            if not stack:
                return DecisionResult(k=k, status=Decision.UNSAT, nodes=nodes)
            continue

        c = options[idx]
        frame[2] = idx + 1
        nodes += 1
        if nodes > limit:
            return DecisionResult(k=k, status=Decision.TIMEOUT, nodes=nodes)
        assign(v, c)
        uncolored -= 1
        max_used = max(max_used, c)
        if any(colors[u] < 0 and sat[u] >= k for u in adj[v]):
            continue
        need_select = True


def _solve_component(g: DistGraph, limit: int) -> ColoringResult:
    clique = max_clique(g, limit)
    greedy = greedy_dsatur(g)
    lower = max(clique.size, 1 if g.vertex_count else 0)
    upper = max(greedy) + 1 if greedy else 0
    nodes = clique.nodes
    certificate = greedy

    k = lower
    while k < upper:
        logger.info("deciding %d-colorability of %d vertices", k, g.vertex_count)
        result = k_colorable(g, k, max(limit - nodes, 1), clique=clique.witness)
        nodes += result.nodes
        if result.status == Decision.SAT:
            upper = k
            certificate = result.certificate
            break
        if result.status == Decision.TIMEOUT:
            return ColoringResult(lower_bound=lower, upper_bound=upper, certificate=certificate,
                                  status=SolveStatus.TIMEOUT, nodes=nodes, clique=clique.witness)
        lower = k + 1
        k += 1

    lower = upper
    return ColoringResult(lower_bound=lower, upper_bound=upper, exact=upper, certificate=certificate,
                          status=SolveStatus.SOLVED, nodes=nodes, clique=clique.witness)


def chromatic_number(g: DistGraph, budget: Optional[int] = None) -> ColoringResult:
    """
    Exact chromatic number, solved independently on each connected component

    Each component goes from its clique bound up through k-colorability
    decisions until the first SAT; the DSATUR greedy coloring caps the range.
    """
    if g.vertex_count == 0:
        return ColoringResult(lower_bound=0, upper_bound=0, exact=0, certificate=[], status=SolveStatus.SOLVED)
    limit = _budget(budget)
    components = sorted((sorted(c) for c in nx.connected_components(g.to_networkx())),
                        key=lambda c: c[0])

    coloring = [0] * g.vertex_count
    lower = upper = 0
    nodes = 0
    best_clique: List[int] = []
    timed_out = False
    for comp in components:
        result = _solve_component(g.subgraph(comp), max(limit - nodes, 1))
        nodes += result.nodes
        lower = max(lower, result.lower_bound)
        upper = max(upper, result.upper_bound)
        if len(result.clique) > len(best_clique):
            best_clique = [comp[i] for i in result.clique]
        for i, v in enumerate(comp):
            coloring[v] = result.certificate[i]
        timed_out |= result.status == SolveStatus.TIMEOUT

    if not verify_coloring(g, coloring):
        raise ConstructionError("assembled coloring is improper")
    if timed_out:
        return ColoringResult(lower_bound=lower, upper_bound=upper, certificate=coloring,
                              status=SolveStatus.TIMEOUT, nodes=nodes, clique=best_clique)
    return ColoringResult(lower_bound=upper, upper_bound=upper, exact=upper, certificate=coloring,
                          status=SolveStatus.SOLVED, nodes=nodes, clique=best_clique)


class CnfSummary(BaseModel):
    variables: int
    clauses: int
    destination: Optional[str] = None


def coloring_clauses(g: DistGraph, k: int) -> Iterator[List[int]]:
    """Clauses of the k-coloring encoding; x(v, c) is variable v*k + c + 1."""
    if k < 1:
        raise ParameterError("k must be at least 1")

    def var(v: int, c: int) -> int:
        return v * k + c + 1

    for v in range(g.vertex_count):
        yield [var(v, c) for c in range(k)]
    for v in range(g.vertex_count):
        for c1 in range(k):
            for c2 in range(c1 + 1, k):
                yield [-var(v, c1), -var(v, c2)]
    for u, v in g.edges:
        for c in range(k):
            yield [-var(u, c), -var(v, c)]


def clause_count(g: DistGraph, k: int) -> int:
    return g.vertex_count * (1 + k * (k - 1) // 2) + len(g.edges) * k


def export_dimacs_cnf(g: DistGraph, k: int, destination: Union[str, Path, TextIO]) -> CnfSummary:
    """Write the k-coloring CNF of g in DIMACS format."""
    variables = g.vertex_count * k
    clauses = clause_count(g, k)

    def write(stream: TextIO) -> None:
        stream.write(f"p cnf {variables} {clauses}\n")
        for clause in coloring_clauses(g, k):
            stream.write(" ".join(str(lit) for lit in clause) + " 0\n")

    if isinstance(destination, (str, Path)):
        path = Path(destination)
        with open(path, "w", encoding="utf-8") as f:
            write(f)
        return CnfSummary(variables=variables, clauses=clauses, destination=str(path))
    write(destination)
    return CnfSummary(variables=variables, clauses=clauses)


def solve_cnf_with_pysat(g: DistGraph, k: int, cnf_path: Optional[Union[str, Path]] = None,
                    solver_name: str = "g3", conflict_budget: Optional[int] = None,
                    clique: Optional[Sequence[int]] = None) -> DecisionResult:
    """
    Decide k-colorability with a SAT solver from python-sat

    Reads the CNF from cnf_path when given (as written by export_dimacs_cnf),
    otherwise encodes g directly. A clique is fixed through assumptions, so
    the formula itself is left untouched.
    """
    cnf = CNF(from_file=str(cnf_path)) if cnf_path is not None else CNF(from_clauses=list(coloring_clauses(g, k)))
    if clique is None:
        clique = max_clique(g).witness
    if len(clique) > k:
        return DecisionResult(k=k, status=Decision.UNSAT)
    assumptions = [v * k + i + 1 for i, v in enumerate(clique)]

    with Solver(name=solver_name, bootstrap_with=cnf.clauses) as solver:
        if conflict_budget is not None:
            solver.conf_budget(conflict_budget)
            outcome = solver.solve_limited(assumptions=assumptions)
        else:
            outcome = solver.solve(assumptions=assumptions)
        if outcome is None:
            return DecisionResult(k=k, status=Decision.TIMEOUT)
        if not outcome:
            return DecisionResult(k=k, status=Decision.UNSAT)
        model = set(lit for lit in solver.get_model() if lit > 0)

    certificate = []
    for v in range(g.vertex_count):
        certificate.append(next(c for c in range(k) if v * k + c + 1 in model))
    if not verify_coloring(g, certificate):
        raise ConstructionError("SAT model is not a proper coloring")
    return DecisionResult(k=k, status=Decision.SAT, certificate=certificate)


def read_edge_list(stream: TextIO, provenance: str = "edge list") -> DistGraph:
    """Parse `u v` lines (blank lines and # comments ignored)."""
    edges = []
    top = -1
    for line in stream:
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        u, v = (int(tok) for tok in line.split()[:2])
        edges.append((u, v))
        top = max(top, u, v)
    return make_graph(top + 1, edges, provenance)


def write_edge_list(g: DistGraph, stream: TextIO) -> int:
    for u, v in g.edges:
        stream.write(f"{u} {v}\n")
    return len(g.edges)
