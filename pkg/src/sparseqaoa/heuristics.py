"""Classical initial-solution generators: exact oracle delegation, a
low-rank Goemans-Williamson style relaxation with hyperplane rounding, and
greedy single-flip local search."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .graphs import Graph, CutSolution, brute_force_maxcut, cut_value

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GwConfig:
    rank: int | None = None  # default: ceil(sqrt(2n)) + 1
    ascent_iterations: int = 500
    rounding_trials: int = 100
    relaxation_tolerance: float = 1e-7
    seed: int = 0

    def __post_init__(self):
        if self.rank is not None and self.rank < 2:
            raise ValueError("rank must be >= 2")
        if self.rounding_trials < 1:
            raise ValueError("rounding_trials must be >= 1")


@dataclass
class RelaxationResult:
    vectors: np.ndarray  # (n, r), unit rows
    values: list[float]  # accepted objective values, non-decreasing
    converged: bool


def _normalize_rows(x: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    norms[norms < 1e-15] = 1.0
    return x / norms


def solve_cut_relaxation(g: Graph, config: GwConfig | None = None) -> RelaxationResult:
    """Maximize sum_(u,v) (1 - x_u . x_v)/2 over unit vectors on a rank-r
    sphere by projected gradient ascent with adaptive step halving.

    The low-rank factorization avoids an SDP solver; at these sizes it
    reliably reaches the relaxation optimum.
    """
    config = config or GwConfig()
    n = g.num_vertices
    r = config.rank or (math.ceil(math.sqrt(2 * n)) + 1)
    r = max(2, r)
    rng = np.random.default_rng([config.seed, 0])
    x = _normalize_rows(rng.standard_normal((n, r)))

    adj = np.zeros((n, n))
    for u, v in g.edges:
        adj[u, v] = 1.0
        adj[v, u] = 1.0

    def value(vectors: np.ndarray) -> float:
        return g.num_edges / 2.0 - 0.25 * float(np.sum(adj * (vectors @ vectors.T)))

    values = [value(x)]
    step = 1.0
    stationary = False
    for _ in range(config.ascent_iterations):
        grad = -0.5 * (adj @ x)
        accepted = False
        while step > 1e-12:
            candidate = _normalize_rows(x + step * grad)
            if value(candidate) > values[-1]:
                accepted = True
                break
            step *= 0.5
        if not accepted:  # no step improves: numerically at the optimum
            stationary = True
            break
        x = candidate
        values.append(value(x))
        step = min(step * 1.2, 2.0)
    converged = (
        stationary
        or len(values) < 2
        or (values[-1] - values[-2]) <= config.relaxation_tolerance
    )
    if not converged:
        logger.warning(
            "cut relaxation still improving after %d iterations (last step %.3g); "
            "returning the best point so far",
            config.ascent_iterations,
            values[-1] - values[-2],
        )
    return RelaxationResult(x, values, converged)


def goemans_williamson(g: Graph, config: GwConfig | None = None) -> CutSolution:
    """Relax, then round with random hyperplanes; returns the best of the
    configured number of rounding trials.  Deterministic per seed."""
    if g.num_edges < 1:
        raise ValueError("graph needs at least one edge")
    config = config or GwConfig()
    relax = solve_cut_relaxation(g, config)
    rng = np.random.default_rng([config.seed, 1])
    best: CutSolution | None = None
    for _ in range(config.rounding_trials):
        direction = rng.standard_normal(relax.vectors.shape[1])
        side = (relax.vectors @ direction) >= 0.0
        assignment = "".join("1" if b else "0" for b in side)
        val = cut_value(g, assignment)
        if best is None or val > best.value:
            best = CutSolution(assignment, val)
    return best


def local_search_1flip(g: Graph, start: str, seed: int = 0) -> CutSolution:
    """Flip the vertex with the largest cut gain until no flip helps.

    Deterministic: ties go to the smallest vertex index (the seed argument is
    accepted for interface symmetry only).  Terminates within m improving
    flips since each one raises an integer cut bounded by m.
    """
    if len(start) != g.num_vertices or set(start) - {"0", "1"}:
        raise ValueError("start must be a 0/1 string matching the vertex count")
    bits = list(start)
    nbrs: list[list[int]] = [[] for _ in range(g.num_vertices)]
    for u, v in g.edges:
        nbrs[u].append(v)
        nbrs[v].append(u)
    while True:
        best_gain, best_vertex = 0, -1
        for v in range(g.num_vertices):
            gain = sum(1 if bits[v] == bits[w] else -1 for w in nbrs[v])
            if gain > best_gain:
                best_gain, best_vertex = gain, v
        if best_vertex < 0:
            break
        bits[best_vertex] = "1" if bits[best_vertex] == "0" else "0"
    assignment = "".join(bits)
    return CutSolution(assignment, cut_value(g, assignment))


INITIAL_CHOICES = ("exact", "gw", "local_search", "given")


def initial_solution(
    g: Graph,
    choice: str,
    seed: int = 0,
    assignment: str | None = None,
    gw_config: GwConfig | None = None,
) -> CutSolution:
    """Dispatch to an initial MaxCut solution source.

    ``exact`` returns the lexicographically smallest optimal representative;
    ``given`` validates and scores the provided assignment.
    """
    if choice == "exact":
        _, optima = brute_force_maxcut(g)
        return min(optima, key=lambda s: s.assignment)
    if choice == "gw":
        return goemans_williamson(g, gw_config or GwConfig(seed=seed))
    if choice == "local_search":
        rng = np.random.default_rng(seed)
        start = "".join(rng.choice(("0", "1"), size=g.num_vertices))
        return local_search_1flip(g, start, seed)
    if choice == "given":
        if assignment is None:
            raise ValueError("choice 'given' requires an assignment")
        return CutSolution(assignment, cut_value(g, assignment))
    raise ValueError(f"unknown initial solution choice {choice!r}")
