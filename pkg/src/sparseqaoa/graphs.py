"""Graphs, cut evaluation and exact MaxCut oracles.

Bit convention, used everywhere in this package: an assignment is a string of
'0'/'1' characters of length n, character i being the side of vertex i.  Its
integer encoding is little-endian, bit i = vertex i, so assignment "011" maps
to index 0b110 = 6 and amplitude index x of a statevector describes the same
partition.
"""

from __future__ import annotations

import functools
import itertools
from collections import deque
from dataclasses import dataclass

import numpy as np

from .exceptions import CapabilityError, NotFoundError

# Hard budgets for exhaustive enumeration.
ENUMERATION_MAX_VERTICES = 28
SPECTRUM_MAX_VERTICES = 20

_CHUNK = 1 << 20


@dataclass(frozen=True)
class Graph:
    """Simple undirected unweighted graph as a canonical edge list.

    Edges are stored sorted lexicographically with u < v in each pair, so two
    equal graphs compare (and hash) identically.  Use :meth:`from_edges` to
    build from unordered input.
    """

    num_vertices: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.num_vertices < 1:
            raise ValueError("graph needs at least one vertex")
        prev = None
        for u, v in self.edges:
            if not (0 <= u < v < self.num_vertices):
                raise ValueError(f"edge ({u}, {v}) is not canonical or out of range")
            if prev is not None and (u, v) <= prev:
                raise ValueError("edge list is not in canonical sorted order")
            prev = (u, v)

    @classmethod
    def from_edges(cls, num_vertices: int, edges) -> "Graph":
        """Canonicalize an iterable of vertex pairs into a Graph."""
        canon = []
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            canon.append((min(u, v), max(u, v)))
        canon.sort()
        for a, b in itertools.pairwise(canon):
            if a == b:
                raise ValueError(f"duplicate edge {a}")
        return cls(num_vertices, tuple(canon))

    @property
    def num_edges(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class CutSolution:
    """A vertex assignment together with its cut size."""

    assignment: str
    value: int


@dataclass(frozen=True)
class SpectrumLevel:
    cut_value: int
    members: frozenset[str]


@dataclass(frozen=True)
class Spectrum:
    """All 2^n assignments grouped by cut value, largest cut first."""

    levels: tuple[SpectrumLevel, ...]


def assignment_to_index(assignment: str) -> int:
    """Little-endian encoding: bit i of the result is character i."""
    x = 0
    for i, c in enumerate(assignment):
        if c == "1":
            x |= 1 << i
        elif c != "0":
            raise ValueError(f"assignment must be a 0/1 string, got {assignment!r}")
    return x


def index_to_assignment(x: int, num_vertices: int) -> str:
    return "".join("1" if (x >> i) & 1 else "0" for i in range(num_vertices))


def _check_assignment(g: Graph, assignment: str) -> None:
    if len(assignment) != g.num_vertices:
        raise ValueError(
            f"assignment length {len(assignment)} != {g.num_vertices} vertices"
        )


def cut_value(g: Graph, assignment: str) -> int:
    """Number of edges whose endpoints lie on different sides."""
    _check_assignment(g, assignment)
    return sum(1 for u, v in g.edges if assignment[u] != assignment[v])


def cut_solution(g: Graph, assignment: str) -> CutSolution:
    return CutSolution(assignment, cut_value(g, assignment))


@functools.lru_cache(maxsize=64)
def cut_table(g: Graph) -> np.ndarray:
    """Cut value of every assignment, indexed by the little-endian encoding.

    The table is cached per graph and marked read-only; treat it as shared.
    Filled in chunks so peak scratch memory stays bounded at large n.
    """
    n = g.num_vertices
    if n > ENUMERATION_MAX_VERTICES:
        raise CapabilityError(
            f"cut table limited to {ENUMERATION_MAX_VERTICES} vertices, got {n}"
        )
    size = 1 << n
    table = np.zeros(size, dtype=np.uint16)
    for start in range(0, size, _CHUNK):
        stop = min(start + _CHUNK, size)
        table[start:stop] = _chunked_cuts(g, start, stop)
    table.flags.writeable = False
    return table


def _chunked_cuts(g: Graph, start: int, stop: int, step: int = 1) -> np.ndarray:
    idx = np.arange(start, stop, step, dtype=np.int64)
    acc = np.zeros(len(idx), dtype=np.uint16)
    for u, v in g.edges:
        acc += (((idx >> u) ^ (idx >> v)) & 1).astype(np.uint16)
    return acc


@functools.lru_cache(maxsize=256)
def max_cut_value(g: Graph) -> int:
    """Exact C_max by exhaustive scan (complement symmetry halves the work)."""
    if g.num_vertices > ENUMERATION_MAX_VERTICES:
        raise CapabilityError(
            f"enumeration limited to {ENUMERATION_MAX_VERTICES} vertices, got {g.num_vertices}"
        )
    size = 1 << g.num_vertices
    best = 0
    for start in range(0, size, 2 * _CHUNK):
        stop = min(start + 2 * _CHUNK, size)
        cuts = _chunked_cuts(g, start, stop, step=2)  # even x <=> vertex 0 on side 0
        best = max(best, int(cuts.max()))
    return best


def brute_force_maxcut(g: Graph) -> tuple[int, frozenset[CutSolution]]:
    """Exact maximum cut with every maximizer whose vertex 0 is on side 0.

    Each optimal partition appears once, represented by the assignment with
    bit 0 = 0 (its complement is equally optimal and is omitted).
    """
    c_max = max_cut_value(g)
    n = g.num_vertices
    size = 1 << n
    optima = []
    for start in range(0, size, 2 * _CHUNK):
        stop = min(start + 2 * _CHUNK, size)
        cuts = _chunked_cuts(g, start, stop, step=2)
        for off in np.flatnonzero(cuts == c_max):
            x = start + 2 * int(off)
            optima.append(CutSolution(index_to_assignment(x, n), c_max))
    return c_max, frozenset(optima)


def partition_edges(
    g: Graph, sol: CutSolution
) -> tuple[tuple[tuple[int, int], ...], tuple[tuple[int, int], ...]]:
    """Split the edge list into (in_cut, not_in_cut) for a given solution."""
    _check_assignment(g, sol.assignment)
    a = sol.assignment
    in_cut = tuple(e for e in g.edges if a[e[0]] != a[e[1]])
    not_in_cut = tuple(e for e in g.edges if a[e[0]] == a[e[1]])
    return in_cut, not_in_cut


def spectrum(g: Graph) -> Spectrum:
    """Group all assignments by cut value, in decreasing cut order."""
    if g.num_vertices > SPECTRUM_MAX_VERTICES:
        raise CapabilityError(
            f"spectrum limited to {SPECTRUM_MAX_VERTICES} vertices, got {g.num_vertices}"
        )
    table = cut_table(g)
    n = g.num_vertices
    levels = []
    for value in sorted(set(int(v) for v in np.unique(table)), reverse=True):
        members = frozenset(
            index_to_assignment(int(x), n) for x in np.flatnonzero(table == value)
        )
        levels.append(SpectrumLevel(value, members))
    return Spectrum(tuple(levels))


def all_vertex_pairs(n: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(n), 2))


def generate_random_graph(n: int, m: int, seed: int) -> Graph:
    """Uniform random graph with exactly m distinct edges, deterministic per seed.

    Disconnected outputs are kept as-is; use :func:`is_connected` to check.
    """
    pairs = all_vertex_pairs(n)
    if m > len(pairs):
        raise ValueError(f"m={m} exceeds the {len(pairs)} possible edges on {n} vertices")
    rng = np.random.default_rng(seed)
    chosen = rng.choice(len(pairs), size=m, replace=False)
    return Graph.from_edges(n, (pairs[i] for i in chosen))


def adjacency_sets(g: Graph) -> list[set[int]]:
    nbrs: list[set[int]] = [set() for _ in range(g.num_vertices)]
    for u, v in g.edges:
        nbrs[u].add(v)
        nbrs[v].add(u)
    return nbrs


def is_connected(g: Graph) -> bool:
    if g.num_vertices == 1:
        return True
    nbrs = adjacency_sets(g)
    seen = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for w in nbrs[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == g.num_vertices


def connected_components(g: Graph) -> int:
    nbrs = adjacency_sets(g)
    seen: set[int] = set()
    count = 0
    for s in range(g.num_vertices):
        if s in seen:
            continue
        count += 1
        queue = deque([s])
        seen.add(s)
        while queue:
            u = queue.popleft()
            for w in nbrs[u]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
    return count


def solution_at_distance(g: Graph, d: int, seed: int) -> CutSolution:
    """A uniformly seeded assignment whose cut value is exactly C_max - d.

    Raises NotFoundError when no assignment attains that value (cut values
    need not cover every integer below C_max).
    """
    if d < 0:
        raise ValueError("distance must be non-negative")
    if g.num_vertices > SPECTRUM_MAX_VERTICES:
        raise CapabilityError(
            f"distance solutions limited to {SPECTRUM_MAX_VERTICES} vertices"
        )
    table = cut_table(g)
    target = int(table.max()) - d
    candidates = np.flatnonzero(table == target)
    if len(candidates) == 0:
        raise NotFoundError(f"no assignment with cut value {target}")
    rng = np.random.default_rng(seed)
    x = int(candidates[rng.integers(len(candidates))])
    return CutSolution(index_to_assignment(x, g.num_vertices), target)


# --- edge-list text format -------------------------------------------------
#
#   line 1: "n m"
#   then m lines "u v" (0-indexed); '#' starts a comment, blank lines ignored.


def parse_edge_list(text: str) -> Graph:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected two integers, got {raw!r}")
        try:
            rows.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise ValueError(f"line {lineno}: expected two integers, got {raw!r}") from None
    if not rows:
        raise ValueError("empty graph file")
    n, m = rows[0]
    if len(rows) - 1 != m:
        raise ValueError(f"header declares {m} edges but file has {len(rows) - 1}")
    return Graph.from_edges(n, rows[1:])


def format_edge_list(g: Graph) -> str:
    lines = [f"{g.num_vertices} {g.num_edges}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def read_graph_file(path) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_edge_list(fh.read())


def write_graph_file(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_edge_list(g))
