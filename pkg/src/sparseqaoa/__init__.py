"""Statevector QAOA for MaxCut with sparsified and multi-parameter phase
operators: graph oracles, edge sparsifiers, an exact simulator, a multistart
optimizer, energy-level alignment analysis and an experiment runner."""

__version__ = "0.1.0"

from .exceptions import CapabilityError, ConfigError, NotFoundError, NumericalError
from .graphs import (
    Graph,
    CutSolution,
    Spectrum,
    SpectrumLevel,
    assignment_to_index,
    brute_force_maxcut,
    cut_solution,
    cut_value,
    generate_random_graph,
    index_to_assignment,
    is_connected,
    max_cut_value,
    partition_edges,
    read_graph_file,
    solution_at_distance,
    spectrum,
    write_graph_file,
)
from .simulator import (
    GateCounts,
    PhaseSpec,
    QaoaParams,
    Statevector,
    apply_mixer,
    apply_phase,
    approximation_ratio,
    expectation,
    gate_count,
    prepare_plus_state,
    trial_state,
)
from .sparsify import (
    EdgeScores,
    SparsifyConfig,
    filter_to_ratio,
    remove_k_noncut_edges,
    score_edges,
    sparsify,
    sparsify_by_solution,
)
from .optimize import (
    OptimizationResult,
    OptimizerConfig,
    StartRecord,
    gradient,
    linear_ramp_start,
    local_optimize,
    multistart_optimize,
    objective,
)
from .heuristics import (
    GwConfig,
    goemans_williamson,
    initial_solution,
    local_search_1flip,
    solve_cut_relaxation,
)
from .alignment import AlignmentReport, aligned_levels, alignment_ratio_study
from .experiment import ExperimentConfig, load_config, parse_config, run_experiment

__all__ = [name for name in dir() if not name.startswith("_")]
