"""Exact statevector simulation of MaxCut QAOA circuits.

Conventions, fixed across the package:

* Amplitude index x encodes an assignment little-endian (bit i = qubit i =
  vertex i), matching :mod:`sparseqaoa.graphs`.
* The phase layer multiplies the amplitude of |x> by exp(-i * gamma * c(x))
  where c(x) counts the phase topology's edges cut by x.  Per edge this is
  exp(-i*gamma*(1 - Z_u Z_v)/2); the circuit realization is two CNOTs around
  a single-qubit Z rotation on the target.
* The mixer applies exp(-i*beta*X) to every qubit, i.e. the matrix
  [[cos b, -i sin b], [-i sin b, cos b]].  In the half-angle gate convention
  this is Rx(2*beta); since beta is an optimized parameter the choice only
  relabels the axis.
* Two-gamma phase layers carry an edge class label in {1, 2} per edge and
  apply gamma_1 to class-1 edges and gamma_2 to class-2 edges.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import CapabilityError
from .graphs import Graph, cut_table

MAX_QUBITS = 28


@dataclass
class Statevector:
    num_qubits: int
    amplitudes: np.ndarray

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class PhaseSpec:
    """Topology of a phase layer, optionally split into two edge classes.

    ``edge_class`` labels every edge of ``topology`` with 1 or 2, aligned
    with the canonical edge order; ``None`` means a single shared gamma.
    """

    topology: Graph
    edge_class: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.edge_class is not None:
            if len(self.edge_class) != self.topology.num_edges:
                raise ValueError("edge_class must label every edge of the topology")
            if any(c not in (1, 2) for c in self.edge_class):
                raise ValueError("edge class labels must be 1 or 2")

    @property
    def two_gamma(self) -> bool:
        return self.edge_class is not None


@dataclass(frozen=True)
class QaoaParams:
    """Per-layer angles: gammas are floats, or (gamma1, gamma2) pairs for
    two-class phase layers; betas are floats.  All angles in radians."""

    gammas: tuple
    betas: tuple[float, ...]

    def __post_init__(self):
        if len(self.gammas) != len(self.betas):
            raise ValueError("need one gamma entry and one beta per layer")
        arities = {2 if isinstance(gk, tuple) else 1 for gk in self.gammas}
        if len(arities) > 1:
            raise ValueError("mixed gamma arities across layers")

    @property
    def depth(self) -> int:
        return len(self.betas)

    @property
    def two_gamma(self) -> bool:
        return bool(self.gammas) and isinstance(self.gammas[0], tuple)

    def to_vector(self) -> np.ndarray:
        """Flatten as [all gammas (pairs kept adjacent), then all betas]."""
        flat: list[float] = []
        for gk in self.gammas:
            flat.extend(gk if isinstance(gk, tuple) else (gk,))
        flat.extend(self.betas)
        return np.array(flat, dtype=float)

    @classmethod
    def from_vector(cls, vec, depth: int, two_gamma: bool) -> "QaoaParams":
        vec = np.asarray(vec, dtype=float)
        width = 2 if two_gamma else 1
        if len(vec) != (width + 1) * depth:
            raise ValueError(
                f"expected {(width + 1) * depth} parameters for depth {depth}, got {len(vec)}"
            )
        if two_gamma:
            gammas = tuple(
                (float(vec[2 * k]), float(vec[2 * k + 1])) for k in range(depth)
            )
        else:
            gammas = tuple(float(vec[k]) for k in range(depth))
        betas = tuple(float(b) for b in vec[width * depth :])
        return cls(gammas, betas)


@dataclass(frozen=True)
class GateCounts:
    cnot: int
    rz: int
    rx: int
    h: int
    total: int
    phase_gate_count: int


def prepare_plus_state(n: int) -> Statevector:
    """Uniform superposition over all 2^n basis states."""
    if not 1 <= n <= MAX_QUBITS:
        raise CapabilityError(f"qubit count must be in [1, {MAX_QUBITS}], got {n}")
    amps = np.full(1 << n, 2.0 ** (-n / 2), dtype=complex)
    return Statevector(n, amps)


def _class_graph(spec: PhaseSpec, label: int) -> Graph:
    edges = tuple(
        e for e, c in zip(spec.topology.edges, spec.edge_class) if c == label
    )
    return Graph(spec.topology.num_vertices, edges)


@functools.lru_cache(maxsize=64)
def _phase_tables(spec: PhaseSpec, n: int) -> tuple[np.ndarray, ...]:
    """Per-gamma cut-count tables of the phase topology, tiled to n qubits."""
    if spec.topology.num_vertices > n:
        raise ValueError(
            f"state has {n} qubits but topology needs {spec.topology.num_vertices}"
        )
    if spec.edge_class is None:
        graphs = (spec.topology,)
    else:
        graphs = (_class_graph(spec, 1), _class_graph(spec, 2))
    tables = []
    reps = 1 << (n - spec.topology.num_vertices)
    for g in graphs:
        t = cut_table(g).astype(np.float64)
        if reps > 1:
            t = np.tile(t, reps)  # high qubits do not touch the topology
        t.flags.writeable = False
        tables.append(t)
    return tuple(tables)


def _as_gamma_tuple(spec: PhaseSpec, gammas) -> tuple[float, ...]:
    if spec.edge_class is None:
        if isinstance(gammas, (tuple, list, np.ndarray)):
            raise ValueError("single-class phase layer takes one gamma")
        return (float(gammas),)
    if not isinstance(gammas, (tuple, list, np.ndarray)) or len(gammas) != 2:
        raise ValueError("two-class phase layer takes a (gamma1, gamma2) pair")
    return (float(gammas[0]), float(gammas[1]))


def _apply_phase_inplace(amps: np.ndarray, tables, gammas: tuple[float, ...]) -> None:
    angle = gammas[0] * tables[0]
    if len(tables) == 2:
        angle = angle + gammas[1] * tables[1]
    amps *= np.exp(-1j * angle)


def _apply_mixer_inplace(amps: np.ndarray, n: int, beta: float) -> None:
    if beta == 0.0:
        return
    c = math.cos(beta)
    s = math.sin(beta)
    for q in range(n):
        view = amps.reshape(-1, 2, 1 << q)
        a0 = view[:, 0, :].copy()
        a1 = view[:, 1, :]
        view[:, 0, :] = c * a0 - 1j * s * a1
        view[:, 1, :] = c * a1 - 1j * s * a0


def apply_phase(state: Statevector, spec: PhaseSpec, gammas) -> Statevector:
    """Diagonal phase layer: |x> picks up exp(-i sum_e gamma_class(e) [e cut by x])."""
    gam = _as_gamma_tuple(spec, gammas)
    tables = _phase_tables(spec, state.num_qubits)
    amps = state.amplitudes.copy()
    _apply_phase_inplace(amps, tables, gam)
    return Statevector(state.num_qubits, amps)


def apply_mixer(state: Statevector, beta: float) -> Statevector:
    """Apply exp(-i*beta*X) to every qubit."""
    amps = state.amplitudes.copy()
    _apply_mixer_inplace(amps, state.num_qubits, float(beta))
    return Statevector(state.num_qubits, amps)


def trial_state(n: int, spec: PhaseSpec, params: QaoaParams) -> Statevector:
    """Alternate phase and mixer layers on the plus state."""
    if params.depth and params.two_gamma != spec.two_gamma:
        raise ValueError("gamma arity of params does not match the phase spec")
    state = prepare_plus_state(n)
    amps = state.amplitudes
    tables = _phase_tables(spec, n)
    for gk, bk in zip(params.gammas, params.betas):
        _apply_phase_inplace(amps, tables, _as_gamma_tuple(spec, gk))
        _apply_mixer_inplace(amps, n, float(bk))
    return state


def expectation(state: Statevector, original: Graph) -> float:
    """Expected cut value of the measured assignment, against ``original``.

    The sparsified topology only shapes the circuit; the objective is always
    scored on the original graph.
    """
    if state.num_qubits != original.num_vertices:
        raise ValueError(
            f"state has {state.num_qubits} qubits, graph has {original.num_vertices} vertices"
        )
    amps = state.amplitudes
    probs = amps.real**2 + amps.imag**2
    return float(probs @ cut_table(original))


def approximation_ratio(expect: float, c_max: int) -> float:
    if c_max <= 0:
        raise ValueError("c_max must be positive (graph with a non-empty cut)")
    return expect / c_max


def gate_count(spec: PhaseSpec, p: int, n: int) -> GateCounts:
    """Gate tally for a depth-p circuit: per edge and layer the phase costs
    2 CNOT + 1 Rz, the mixer costs one Rx per qubit, plus n Hadamards."""
    if p < 0:
        raise ValueError("depth must be non-negative")
    m = spec.topology.num_edges
    cnot = 2 * p * m
    rz = p * m
    rx = p * n
    h = n
    return GateCounts(cnot, rz, rx, h, cnot + rz + rx + h, 3 * p * m)
