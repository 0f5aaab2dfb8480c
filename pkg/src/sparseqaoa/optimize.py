"""Outer classical loop: objective, finite-difference gradient, quasi-Newton
local search (scipy L-BFGS-B) and the seeded multi-start protocol."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from .exceptions import NumericalError
from .graphs import Graph, cut_table, max_cut_value
from .simulator import (
    PhaseSpec,
    QaoaParams,
    _apply_mixer_inplace,
    _apply_phase_inplace,
    _phase_tables,
)

TWO_PI = 2.0 * math.pi


@dataclass
class OptimizerConfig:
    max_iterations: int = 20000
    gradient_step: float = 1e-6
    gradient_tolerance: float = 1e-8
    objective_tolerance: float = 1e-10
    num_random_starts: int = 30
    start_low: float = -TWO_PI
    start_high: float = TWO_PI
    extra_starts: tuple[QaoaParams, ...] = ()
    seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if min(self.gradient_step, self.gradient_tolerance, self.objective_tolerance) <= 0:
            raise ValueError("steps and tolerances must be positive")


@dataclass
class StartRecord:
    start: QaoaParams
    params: QaoaParams | None
    value: float | None
    iterations: int
    converged: bool
    error: str | None = None


@dataclass
class OptimizationResult:
    best_params: QaoaParams
    best_expectation: float
    ratio: float
    records: list[StartRecord] = field(default_factory=list)


def _objective_fn(spec: PhaseSpec, original: Graph, depth: int):
    """Closure evaluating the expectation as a function of the flat parameter
    vector; tables are resolved once."""
    n = original.num_vertices
    tables = _phase_tables(spec, n)
    orig_table = cut_table(original)
    two_gamma = spec.two_gamma
    width = 2 if two_gamma else 1
    size = 1 << n
    base = 2.0 ** (-n / 2)

    def fn(vec: np.ndarray) -> float:
        amps = np.full(size, base, dtype=complex)
        for k in range(depth):
            if two_gamma:
                gam = (vec[2 * k], vec[2 * k + 1])
            else:
                gam = (vec[k],)
            _apply_phase_inplace(amps, tables, gam)
            _apply_mixer_inplace(amps, n, vec[width * depth + k])
        probs = amps.real**2 + amps.imag**2
        return float(probs @ orig_table)

    return fn


def objective(spec: PhaseSpec, original: Graph, params: QaoaParams) -> float:
    """Expected original-graph cut of the trial state for these parameters."""
    fn = _objective_fn(spec, original, params.depth)
    return fn(params.to_vector())


def _central_gradient(fn, vec: np.ndarray, step: float) -> np.ndarray:
    grad = np.empty(len(vec))
    for i in range(len(vec)):
        shifted = vec.copy()
        shifted[i] = vec[i] + step
        hi = fn(shifted)
        shifted[i] = vec[i] - step
        lo = fn(shifted)
        grad[i] = (hi - lo) / (2.0 * step)
    return grad


def gradient(
    spec: PhaseSpec, original: Graph, params: QaoaParams, step: float = 1e-6
) -> np.ndarray:
    """Central-difference gradient of the objective in the flat layout."""
    fn = _objective_fn(spec, original, params.depth)
    return _central_gradient(fn, params.to_vector(), step)


def local_optimize(
    spec: PhaseSpec, original: Graph, start: QaoaParams, config: OptimizerConfig
) -> StartRecord:
    """One quasi-Newton ascent (L-BFGS-B on the negated objective).

    The returned record holds the best point seen across every evaluation, so
    the reported value never falls below the start's.
    """
    depth = start.depth
    fn = _objective_fn(spec, original, depth)
    best_value = -math.inf
    best_vec = start.to_vector()

    def tracked(vec: np.ndarray) -> float:
        nonlocal best_value, best_vec
        value = fn(vec)
        if not math.isfinite(value):
            raise NumericalError(f"non-finite objective {value} at parameters {vec.tolist()}")
        if value > best_value:
            best_value = value
            best_vec = vec.copy()
        return value

    def neg(vec: np.ndarray) -> float:
        return -tracked(vec)

    def neg_grad(vec: np.ndarray) -> np.ndarray:
        return -_central_gradient(tracked, vec, config.gradient_step)

    result = scipy.optimize.minimize(
        neg,
        start.to_vector(),
        jac=neg_grad,
        method="L-BFGS-B",
        options={
            "maxiter": config.max_iterations,
            "maxcor": 10,
            "ftol": config.objective_tolerance,
            "gtol": config.gradient_tolerance,
        },
    )
    params = QaoaParams.from_vector(best_vec, depth, start.two_gamma)
    return StartRecord(
        start=start,
        params=params,
        value=best_value,
        iterations=int(result.nit),
        converged=bool(result.success),
    )


def random_starts(
    depth: int, two_gamma: bool, config: OptimizerConfig
) -> list[QaoaParams]:
    rng = np.random.default_rng(config.seed)
    width = 2 if two_gamma else 1
    dim = (width + 1) * depth
    box = rng.uniform(config.start_low, config.start_high, size=(config.num_random_starts, dim))
    return [QaoaParams.from_vector(v, depth, two_gamma) for v in box]


def linear_ramp_start(depth: int, two_gamma: bool = False, scale: float = 0.75) -> QaoaParams:
    """Annealing-style heuristic start: gammas ramp up, betas ramp down."""
    fractions = [(k + 0.5) / depth for k in range(depth)]
    betas = tuple(scale * (1.0 - f) for f in fractions)
    if two_gamma:
        gammas: tuple = tuple((scale * f, scale * f) for f in fractions)
    else:
        gammas = tuple(scale * f for f in fractions)
    return QaoaParams(gammas, betas)


def multistart_optimize(
    spec: PhaseSpec, original: Graph, p: int, config: OptimizerConfig
) -> OptimizationResult:
    """Local search from seeded uniform starts plus any explicit extras.

    Deterministic per config seed; a failing start is recorded and skipped.
    Ties on the best value go to the earliest start.
    """
    if p < 1:
        raise ValueError("depth must be >= 1")
    two_gamma = spec.two_gamma
    starts = random_starts(p, two_gamma, config) + list(config.extra_starts)
    for extra in config.extra_starts:
        if extra.depth != p or extra.two_gamma != two_gamma:
            raise ValueError("extra start does not match the requested depth/arity")
    records: list[StartRecord] = []
    best: StartRecord | None = None
    for start in starts:
        try:
            record = local_optimize(spec, original, start, config)
        except NumericalError as exc:
            record = StartRecord(start, None, None, 0, False, error=str(exc))
        records.append(record)
        if record.value is not None and (best is None or record.value > best.value):
            best = record
    if best is None:
        raise RuntimeError("every optimization start failed")
    c_max = max_cut_value(original)
    return OptimizationResult(
        best_params=best.params,
        best_expectation=best.value,
        ratio=best.value / c_max,
        records=records,
    )
