"""Edge scoring and sparsification.

Eight edge scorers share one interface: :func:`score_edges` returns a score
per edge plus a keep direction, and :func:`filter_to_ratio` keeps the best
``round(target_ratio * m)`` edges.  Solution-guided sparsification (keep the
cut edges of a reference solution, drop the rest wholesale, randomly, or
gradually) lives here too.

Keep directions: local degree, local similarity, SCAN, Simmelian, forest
fire and effective resistance keep high scores; random and algebraic
distance keep low scores (algebraic can be flipped with ``reverse``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigError
from .graphs import Graph, CutSolution, adjacency_sets, partition_edges

KEEP_HIGH = "keep_high"
KEEP_LOW = "keep_low"

METHODS = (
    "random",
    "algebraic",
    "fire",
    "degree",
    "similarity",
    "scan",
    "simmelian",
    "effective",
)

_DEFAULT_PARAMS: dict[str, dict] = {
    "random": {},
    "algebraic": {
        "num_test_vectors": 10,
        "num_sweeps": 20,
        "omega": 0.5,
        "norm_order": 2.0,
        "exponent": 1.0,
        "reverse": False,
    },
    "fire": {"burn_probability": 0.7, "budget_factor": 100},
    "degree": {},
    "similarity": {},
    "scan": {},
    "simmelian": {},
    "effective": {},
}


@dataclass(frozen=True)
class SparsifyConfig:
    method: str
    target_ratio: float = 0.66
    seed: int = 0
    method_params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"unknown sparsification method {self.method!r}")
        if not 0.0 < self.target_ratio <= 1.0:
            raise ConfigError("target_ratio must be in (0, 1]")
        unknown = set(self.method_params) - set(_DEFAULT_PARAMS[self.method])
        if unknown:
            raise ConfigError(
                f"unknown parameters for method {self.method!r}: {sorted(unknown)}"
            )

    def resolved_params(self) -> dict:
        params = dict(_DEFAULT_PARAMS[self.method])
        params.update(self.method_params)
        return params


@dataclass(frozen=True)
class EdgeScores:
    graph: Graph
    scores: tuple[float, ...]
    direction: str

    def __post_init__(self):
        if len(self.scores) != self.graph.num_edges:
            raise ValueError("one score per edge required")
        if any(not math.isfinite(s) for s in self.scores):
            raise ValueError("scores must be finite")
        if self.direction not in (KEEP_HIGH, KEEP_LOW):
            raise ValueError(f"bad direction {self.direction!r}")


def _score_random(g: Graph, rng: np.random.Generator, params: dict) -> tuple[list[float], str]:
    return list(rng.uniform(0.0, 1.0, size=g.num_edges)), KEEP_LOW


def _score_algebraic(g: Graph, rng: np.random.Generator, params: dict) -> tuple[list[float], str]:
    """Algebraic distance: test vectors relaxed by weighted-Jacobi sweeps on
    the graph; an edge joining well-connected vertices scores low."""
    nbrs = adjacency_sets(g)
    n = g.num_vertices
    omega = float(params["omega"])
    x = rng.uniform(-0.5, 0.5, size=(int(params["num_test_vectors"]), n))
    neighbor_lists = [sorted(s) for s in nbrs]
    for _ in range(int(params["num_sweeps"])):
        means = np.empty_like(x)
        for v in range(n):
            lst = neighbor_lists[v]
            means[:, v] = x[:, lst].mean(axis=1) if lst else x[:, v]
        x = (1.0 - omega) * x + omega * means
    order = float(params["norm_order"])
    exponent = float(params["exponent"])
    scores = []
    for u, v in g.edges:
        diff = np.abs(x[:, u] - x[:, v])
        scores.append(float(np.linalg.norm(diff, ord=order) ** exponent))
    direction = KEEP_HIGH if params["reverse"] else KEEP_LOW
    return scores, direction


def _score_fire(g: Graph, rng: np.random.Generator, params: dict) -> tuple[list[float], str]:
    """Forest-fire edge visits: burn from random roots, each neighbor trial
    succeeds with the burn probability; restart whenever a fire dies out."""
    nbrs = [sorted(s) for s in adjacency_sets(g)]
    edge_index = {e: i for i, e in enumerate(g.edges)}
    visits = [0.0] * g.num_edges
    budget = int(params["budget_factor"]) * g.num_edges
    p_burn = float(params["burn_probability"])
    if not 0.0 < p_burn <= 1.0:
        raise ConfigError("burn_probability must be in (0, 1]")
    total = 0
    while total < budget:
        root = int(rng.integers(g.num_vertices))
        burned = {root}
        frontier = [root]
        while frontier and total < budget:
            v = frontier.pop()
            order = rng.permutation(len(nbrs[v]))
            for j in order:
                w = nbrs[v][j]
                if rng.random() < p_burn:
                    visits[edge_index[(min(v, w), max(v, w))]] += 1.0
                    total += 1
                    if w not in burned:
                        burned.add(w)
                        frontier.append(w)
                    if total >= budget:
                        break
    return visits, KEEP_HIGH


def _score_degree(g: Graph, rng: np.random.Generator, params: dict) -> tuple[list[float], str]:
    """Hub backbone: an edge scores the best rank percentile its endpoints
    give each other's degree within their neighbor lists."""
    nbrs = adjacency_sets(g)
    deg = [len(s) for s in nbrs]

    def percentile(u: int, v: int) -> float:
        at_most = sum(1 for w in nbrs[u] if deg[w] <= deg[v])
        return at_most / len(nbrs[u])

    scores = [max(percentile(u, v), percentile(v, u)) for u, v in g.edges]
    return scores, KEEP_HIGH


def _score_similarity(g: Graph, rng: np.random.Generator, params: dict) -> tuple[list[float], str]:
    """Jaccard overlap of open neighborhoods."""
    nbrs = adjacency_sets(g)
    scores = []
    for u, v in g.edges:
        union = len(nbrs[u] | nbrs[v])
        scores.append(len(nbrs[u] & nbrs[v]) / union if union else 0.0)
    return scores, KEEP_HIGH


def _score_scan(g: Graph, rng: np.random.Generator, params: dict) -> tuple[list[float], str]:
    """SCAN structural similarity: common closed-neighborhood size over the
    geometric mean of the closed neighborhood sizes."""
    nbrs = adjacency_sets(g)
    closed = [s | {v} for v, s in enumerate(nbrs)]
    scores = []
    for u, v in g.edges:
        common = len(closed[u] & closed[v])
        scores.append(common / math.sqrt(len(closed[u]) * len(closed[v])))
    return scores, KEEP_HIGH


def _score_simmelian(g: Graph, rng: np.random.Generator, params: dict) -> tuple[list[float], str]:
    """Non-parametric Simmelian backbone score: rank each vertex's neighbors
    by tie strength (common neighbor count), then take the best Jaccard
    overlap of equal-length ranked prefixes of the two endpoint lists."""
    nbrs = adjacency_sets(g)

    def strength(u: int, v: int) -> int:
        return len(nbrs[u] & nbrs[v])

    ranked = [
        sorted(nbrs[v], key=lambda w: (-strength(v, w), w)) for v in range(g.num_vertices)
    ]
    scores = []
    for u, v in g.edges:
        best = 0.0
        for k in range(1, max(len(ranked[u]), len(ranked[v])) + 1):
            top_u = set(ranked[u][:k])
            top_v = set(ranked[v][:k])
            union = len(top_u | top_v)
            if union:
                best = max(best, len(top_u & top_v) / union)
        scores.append(best)
    return scores, KEEP_HIGH


def _score_effective(g: Graph, rng: np.random.Generator, params: dict) -> tuple[list[float], str]:
    """Effective resistance of each edge via the Laplacian pseudoinverse.

    Equals the probability that the edge lies in a uniform random spanning
    tree; the scores over all edges sum to n minus the component count."""
    n = g.num_vertices
    lap = np.zeros((n, n))
    for u, v in g.edges:
        lap[u, u] += 1.0
        lap[v, v] += 1.0
        lap[u, v] -= 1.0
        lap[v, u] -= 1.0
    pinv = np.linalg.pinv(lap, hermitian=True)
    scores = [float(pinv[u, u] + pinv[v, v] - 2.0 * pinv[u, v]) for u, v in g.edges]
    return scores, KEEP_HIGH


_SCORERS = {
    "random": _score_random,
    "algebraic": _score_algebraic,
    "fire": _score_fire,
    "degree": _score_degree,
    "similarity": _score_similarity,
    "scan": _score_scan,
    "simmelian": _score_simmelian,
    "effective": _score_effective,
}


def score_edges(g: Graph, config: SparsifyConfig) -> EdgeScores:
    """Score every edge with the configured method; deterministic per seed."""
    if g.num_edges == 0:
        raise ValueError("cannot score an empty edge list")
    rng = np.random.default_rng(config.seed)
    scores, direction = _SCORERS[config.method](g, rng, config.resolved_params())
    return EdgeScores(g, tuple(scores), direction)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def filter_to_ratio(scores: EdgeScores, target_ratio: float, seed: int) -> Graph:
    """Keep exactly round(target_ratio * m) edges, best scores first.

    Ties are broken by a seeded shuffle, then canonical edge order; the
    vertex set is unchanged.
    """
    if not 0.0 < target_ratio <= 1.0:
        raise ValueError("target_ratio must be in (0, 1]")
    m = scores.graph.num_edges
    keep = _round_half_up(target_ratio * m)
    rng = np.random.default_rng(seed)
    shuffle = rng.permutation(m)
    sign = -1.0 if scores.direction == KEEP_HIGH else 1.0
    ranked = sorted(range(m), key=lambda i: (sign * scores.scores[i], shuffle[i], i))
    kept = sorted(scores.graph.edges[i] for i in ranked[:keep])
    return Graph(scores.graph.num_vertices, tuple(kept))


def sparsify(g: Graph, config: SparsifyConfig) -> Graph:
    """Score with the configured method and keep the target ratio of edges."""
    return filter_to_ratio(score_edges(g, config), config.target_ratio, config.seed)


def sparsify_by_solution(g: Graph, sol: CutSolution, p_e: float, seed: int) -> Graph:
    """Keep every edge the solution cuts; drop each other edge with
    probability p_e.  p_e = 1 removes all non-cut edges."""
    if not 0.0 <= p_e <= 1.0:
        raise ValueError("p_e must be in [0, 1]")
    in_cut, not_in_cut = partition_edges(g, sol)
    rng = np.random.default_rng(seed)
    kept = list(in_cut)
    draws = rng.uniform(size=len(not_in_cut))
    kept.extend(e for e, r in zip(not_in_cut, draws) if r >= p_e)
    return Graph(g.num_vertices, tuple(sorted(kept)))


def remove_k_noncut_edges(g: Graph, sol: CutSolution, k: int, seed: int) -> Graph:
    """Remove exactly k non-cut edges following a seeded order that is
    prefix-consistent: the removals for k are a subset of those for k+1."""
    in_cut, not_in_cut = partition_edges(g, sol)
    if not 0 <= k <= len(not_in_cut):
        raise ValueError(f"k must be in [0, {len(not_in_cut)}], got {k}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(not_in_cut))
    removed = {not_in_cut[i] for i in order[:k]}
    kept = list(in_cut) + [e for e in not_in_cut if e not in removed]
    return Graph(g.num_vertices, tuple(sorted(kept)))
