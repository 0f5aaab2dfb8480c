"""Experiment orchestration: variant dispatch, p sweeps, hierarchical
seeding, CSV/manifest persistence and deterministic replay.

A config is a JSON file (see README for the schema).  Each row of the output
CSV is one (graph, variant instantiation, p) optimization against the
original graph's objective; the CSV is the canonical artifact and plots are
regenerable from it alone.
"""

from __future__ import annotations

import concurrent.futures
import csv
import hashlib
import json
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .alignment import aligned_levels
from .exceptions import CapabilityError, ConfigError
from .graphs import (
    Graph,
    CutSolution,
    generate_random_graph,
    is_connected,
    max_cut_value,
    partition_edges,
    read_graph_file,
    solution_at_distance,
)
from .heuristics import GwConfig, goemans_williamson, initial_solution
from .optimize import OptimizerConfig, linear_ramp_start, multistart_optimize
from .simulator import PhaseSpec, gate_count
from .sparsify import (
    METHODS,
    SparsifyConfig,
    remove_k_noncut_edges,
    sparsify,
    sparsify_by_solution,
)

SCHEMA_VERSION = 1

VARIANTS = ("standard", "sparse", "random_sparse", "cut", "random_cut", "sparsifier")

INITIAL_CHOICES = ("exact", "gw", "local_search", "given", "distance")

CSV_COLUMNS = [
    "graph_id",
    "n",
    "m_original",
    "variant",
    "method",
    "detail",
    "p",
    "scaled_p",
    "phase_gate_count",
    "expectation",
    "c_max",
    "ratio",
    "aligned_levels",
    "seed",
    "wall_time_ms",
]


def derive_seed(*parts) -> int:
    """Stable 63-bit seed from a path of labels; children never collide with
    siblings, so adding a variant leaves other streams untouched."""
    text = "\x1f".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


@dataclass(frozen=True)
class GraphSpec:
    graph_id: str
    path: str | None = None
    n: int | None = None
    m: int | None = None
    seed: int | None = None

    def load(self, base_dir: Path) -> Graph:
        if self.path is not None:
            return read_graph_file(base_dir / self.path)
        return generate_random_graph(self.n, self.m, self.seed)


@dataclass(frozen=True)
class InitialSpec:
    choice: str = "exact"
    assignment: str | None = None
    d: int | None = None
    require_suboptimal: bool = False
    max_attempts: int = 20

    def detail(self) -> str:
        return f"d={self.d}" if self.choice == "distance" else ""


@dataclass(frozen=True)
class VariantSpec:
    kind: str
    initial: InitialSpec = InitialSpec()
    p_e: float | None = None
    k_values: tuple[int, ...] | str = "all"
    repeats: int = 1
    method: str | None = None
    target_ratio: float | None = None
    method_params: tuple = ()
    pin_equal_gammas: bool = False

    def seed_label(self) -> str:
        # Standard ignores every sub-option, and the pinned debug flag routes
        # to the standard computation; both share one canonical seed stream
        # so pinned rows reproduce standard rows bit for bit.
        if self.kind == "standard" or (self.kind == "cut" and self.pin_equal_gammas):
            return json.dumps({"kind": "standard"}, sort_keys=True)
        payload = {
            "kind": self.kind,
            "initial": vars(self.initial),
            "p_e": self.p_e,
            "k_values": list(self.k_values) if isinstance(self.k_values, tuple) else self.k_values,
            "repeats": self.repeats,
            "method": self.method,
            "target_ratio": self.target_ratio,
            "method_params": list(self.method_params),
        }
        return json.dumps(payload, sort_keys=True)


@dataclass
class ExperimentConfig:
    graphs: list[GraphSpec]
    variants: list[VariantSpec]
    p_values: list[int]
    seed: int = 0
    out_dir: str = "results"
    optimizer: dict = field(default_factory=dict)
    ramp_start: bool = False
    plots: list[str] = field(default_factory=list)
    base_dir: Path = field(default_factory=Path)
    raw: dict = field(default_factory=dict)


def _parse_graph_spec(entry: dict, index: int, problems: list[str]) -> GraphSpec | None:
    if "path" in entry:
        path = entry["path"]
        graph_id = entry.get("id") or Path(path).stem
        return GraphSpec(graph_id=graph_id, path=path)
    if all(k in entry for k in ("n", "m", "seed")):
        n, m, seed = entry["n"], entry["m"], entry["seed"]
        graph_id = entry.get("id") or f"g{n}m{m}s{seed}"
        return GraphSpec(graph_id=graph_id, n=n, m=m, seed=seed)
    problems.append(f"graphs[{index}]: need either 'path' or all of 'n', 'm', 'seed'")
    return None


def _parse_variant(entry: dict, index: int, problems: list[str]) -> VariantSpec | None:
    kind = entry.get("kind")
    where = f"variants[{index}]"
    if kind not in VARIANTS:
        problems.append(f"{where}: unknown kind {kind!r}, expected one of {VARIANTS}")
        return None
    init_raw = entry.get("initial", {})
    choice = init_raw.get("choice", "exact")
    if choice not in INITIAL_CHOICES:
        problems.append(f"{where}: unknown initial choice {choice!r}")
        return None
    initial = InitialSpec(
        choice=choice,
        assignment=init_raw.get("assignment"),
        d=init_raw.get("d"),
        require_suboptimal=bool(init_raw.get("require_suboptimal", False)),
        max_attempts=int(init_raw.get("max_attempts", 20)),
    )
    if choice == "given" and initial.assignment is None:
        problems.append(f"{where}: initial choice 'given' requires 'assignment'")
    if choice == "distance" and initial.d is None:
        problems.append(f"{where}: initial choice 'distance' requires 'd'")
    p_e = entry.get("p_e")
    if kind in ("random_sparse", "random_cut"):
        if p_e is None:
            problems.append(f"{where}: kind {kind!r} requires 'p_e'")
        elif not 0.0 <= p_e <= 1.0:
            problems.append(f"{where}: p_e must be in [0, 1]")
    k_values = entry.get("k_values", "all")
    if k_values != "all":
        try:
            k_values = tuple(int(k) for k in k_values)
        except (TypeError, ValueError):
            problems.append(f"{where}: k_values must be 'all' or a list of integers")
            k_values = "all"
    repeats = int(entry.get("repeats", 1))
    if repeats < 1:
        problems.append(f"{where}: repeats must be >= 1")
    method = entry.get("method")
    target_ratio = entry.get("target_ratio")
    if kind == "sparsifier":
        if method not in METHODS:
            problems.append(f"{where}: sparsifier requires a 'method' among {METHODS}")
        if target_ratio is None or not 0.0 < target_ratio <= 1.0:
            problems.append(f"{where}: sparsifier requires 'target_ratio' in (0, 1]")
    return VariantSpec(
        kind=kind,
        initial=initial,
        p_e=p_e,
        k_values=k_values,
        repeats=repeats,
        method=method,
        target_ratio=target_ratio,
        method_params=tuple(sorted((entry.get("method_params") or {}).items())),
        pin_equal_gammas=bool(entry.get("pin_equal_gammas", False)),
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    return parse_config(raw, base_dir=path.parent)


def parse_config(raw: dict, base_dir: Path | None = None) -> ExperimentConfig:
    """Validate the whole config up front; every problem is reported at once."""
    problems: list[str] = []
    if raw.get("schema_version") != SCHEMA_VERSION:
        problems.append(f"schema_version must be {SCHEMA_VERSION}")
    graphs = []
    for i, entry in enumerate(raw.get("graphs") or []):
        spec = _parse_graph_spec(entry, i, problems)
        if spec is not None:
            graphs.append(spec)
    if not graphs:
        problems.append("at least one graph is required")
    variants_raw = raw.get("variants")
    if isinstance(variants_raw, dict):
        variants_raw = [variants_raw]
    variants = []
    for i, entry in enumerate(variants_raw or []):
        spec = _parse_variant(entry, i, problems)
        if spec is not None:
            variants.append(spec)
    if not variants:
        problems.append("at least one variant is required")
    p_values = raw.get("p_values") or []
    if not p_values or any(not isinstance(p, int) or p < 1 for p in p_values):
        problems.append("p_values must be a non-empty list of positive integers")
    ids = [spec.graph_id for spec in graphs]
    if len(set(ids)) != len(ids):
        problems.append("graph ids must be unique (they key the seed streams)")
    optimizer = raw.get("optimizer", {})
    try:
        _optimizer_from_dict(optimizer, seed=0)
    except (TypeError, ValueError) as exc:
        problems.append(f"optimizer: {exc}")
    plots = raw.get("plots", [])
    from .plotting import STYLES  # deferred: pulls in matplotlib

    for style in plots:
        if style not in STYLES:
            problems.append(f"unknown plot style {style!r}, expected one of {STYLES}")
    if problems:
        raise ConfigError("invalid config:\n  " + "\n  ".join(problems))
    return ExperimentConfig(
        graphs=graphs,
        variants=variants,
        p_values=list(p_values),
        seed=int(raw.get("seed", 0)),
        out_dir=raw.get("out_dir", "results"),
        optimizer=optimizer,
        ramp_start=bool(raw.get("ramp_start", False)),
        plots=list(plots),
        base_dir=base_dir or Path(),
        raw=raw,
    )


def _optimizer_from_dict(options: dict, seed: int) -> OptimizerConfig:
    known = {
        "max_iterations",
        "gradient_step",
        "gradient_tolerance",
        "objective_tolerance",
        "num_random_starts",
        "start_low",
        "start_high",
    }
    unknown = set(options) - known
    if unknown:
        raise ValueError(f"unknown optimizer options {sorted(unknown)}")
    return OptimizerConfig(seed=seed, **options)


@dataclass(frozen=True)
class Instantiation:
    detail: str
    spec: PhaseSpec
    method: str
    aligned: int | None
    note: str | None = None
    # Seed-path identity; differs from `detail` only for the pinned debug
    # flag, which must replay the standard rows bit for bit.
    seed_detail: str | None = None

    def seed_key(self) -> str:
        return self.detail if self.seed_detail is None else self.seed_detail


def _alignment_count(g: Graph, topology: Graph) -> int | None:
    try:
        return aligned_levels(g, topology).aligned_levels
    except CapabilityError:
        return None


def _resolve_initial(
    g: Graph, variant: VariantSpec, seed: int, c_max: int
) -> tuple[CutSolution, str | None]:
    init = variant.initial
    if init.choice == "distance":
        return solution_at_distance(g, init.d, seed), None
    if init.choice == "gw" and init.require_suboptimal:
        last = None
        for attempt in range(init.max_attempts):
            last = goemans_williamson(g, GwConfig(seed=derive_seed(seed, attempt)))
            if last.value < c_max:
                return last, None
        return last, f"gw stayed optimal for {init.max_attempts} attempts"
    if init.choice == "gw":
        return goemans_williamson(g, GwConfig(seed=seed)), None
    return (
        initial_solution(g, init.choice, seed=seed, assignment=init.assignment),
        None,
    )


def build_instantiations(
    g: Graph, variant: VariantSpec, root_seed: int, graph_id: str, c_max: int
) -> list[Instantiation]:
    label = variant.seed_label()
    if variant.kind == "standard" or (variant.kind == "cut" and variant.pin_equal_gammas):
        detail = "pinned" if variant.kind == "cut" else ""
        return [Instantiation(detail, PhaseSpec(g), "", None, seed_detail="")]

    init_seed = derive_seed(root_seed, graph_id, label, "init")
    sol, note = _resolve_initial(g, variant, init_seed, c_max)
    in_cut, not_in_cut = partition_edges(g, sol)
    init_detail = variant.initial.detail()
    method = variant.initial.choice

    def with_init(detail: str) -> str:
        return ";".join(part for part in (init_detail, detail) if part)

    out: list[Instantiation] = []
    if variant.kind == "sparse":
        sparsify_seed = derive_seed(root_seed, graph_id, label, "sparsify")
        ks = (
            [len(not_in_cut)] if variant.k_values == "all" else list(variant.k_values)
        )
        for k in ks:
            topo = remove_k_noncut_edges(g, sol, k, sparsify_seed)
            tag = "all" if variant.k_values == "all" else str(k)
            out.append(
                Instantiation(
                    with_init(f"k={tag}"),
                    PhaseSpec(topo),
                    method,
                    _alignment_count(g, topo),
                    note,
                )
            )
    elif variant.kind == "random_sparse":
        for rep in range(variant.repeats):
            topo = sparsify_by_solution(
                g, sol, variant.p_e, derive_seed(root_seed, graph_id, label, "sparsify", rep)
            )
            detail = f"pe={variant.p_e}" + (f";rep={rep}" if variant.repeats > 1 else "")
            out.append(
                Instantiation(
                    with_init(detail),
                    PhaseSpec(topo),
                    method,
                    _alignment_count(g, topo),
                    note,
                )
            )
    elif variant.kind == "cut":
        in_cut_set = set(in_cut)
        classes = tuple(1 if e in in_cut_set else 2 for e in g.edges)
        out.append(Instantiation(with_init(""), PhaseSpec(g, classes), method, None, note))
    elif variant.kind == "random_cut":
        for rep in range(variant.repeats):
            rng = np.random.default_rng(
                derive_seed(root_seed, graph_id, label, "select", rep)
            )
            draws = rng.uniform(size=len(not_in_cut))
            selected = {e for e, r in zip(not_in_cut, draws) if r < variant.p_e}
            classes = tuple(2 if e in selected else 1 for e in g.edges)
            detail = f"pe={variant.p_e}" + (f";rep={rep}" if variant.repeats > 1 else "")
            out.append(
                Instantiation(with_init(detail), PhaseSpec(g, classes), method, None, note)
            )
    elif variant.kind == "sparsifier":
        cfg = SparsifyConfig(
            method=variant.method,
            target_ratio=variant.target_ratio,
            seed=derive_seed(root_seed, graph_id, label, "sparsify"),
            method_params=dict(variant.method_params),
        )
        topo = sparsify(g, cfg)
        out.append(
            Instantiation(
                f"ratio={variant.target_ratio}",
                PhaseSpec(topo),
                variant.method,
                _alignment_count(g, topo),
                note,
            )
        )
    else:  # pragma: no cover - guarded by config validation
        raise ConfigError(f"unhandled variant kind {variant.kind!r}")
    return out


@dataclass(frozen=True)
class Job:
    graph: Graph
    graph_id: str
    c_max: int
    variant: str
    method: str
    detail: str
    aligned: int | None
    spec: PhaseSpec
    p: int
    optimizer: OptimizerConfig


def _execute_job(job: Job) -> tuple[str, dict]:
    started = time.perf_counter()
    try:
        result = multistart_optimize(job.spec, job.graph, job.p, job.optimizer)
    except Exception as exc:  # recorded in the manifest, sweep continues
        return (
            "error",
            {
                "graph_id": job.graph_id,
                "variant": job.variant,
                "detail": job.detail,
                "p": job.p,
                "error": f"{type(exc).__name__}: {exc}",
            },
        )
    elapsed_ms = (time.perf_counter() - started) * 1000.0
    m_used = job.spec.topology.num_edges
    counts = gate_count(job.spec, job.p, job.graph.num_vertices)
    row = {
        "graph_id": job.graph_id,
        "n": job.graph.num_vertices,
        "m_original": job.graph.num_edges,
        "variant": job.variant,
        "method": job.method,
        "detail": job.detail,
        "p": job.p,
        "scaled_p": job.p * m_used / job.graph.num_edges,
        "phase_gate_count": counts.phase_gate_count,
        "expectation": result.best_expectation,
        "c_max": job.c_max,
        "ratio": result.best_expectation / job.c_max,
        "aligned_levels": "" if job.aligned is None else job.aligned,
        "seed": job.optimizer.seed,
        "wall_time_ms": round(elapsed_ms, 3),
    }
    return ("ok", row)


@dataclass
class RunResult:
    rows: list[dict]
    errors: list[dict]
    csv_path: Path | None
    manifest_path: Path | None
    plot_paths: list[Path]
    study_path: Path | None = None


STUDY_COLUMNS = [
    "graph_id",
    "sparsifier",
    "aligned_levels",
    "ratio_sparse",
    "ratio_standard",
    "delta",
]


def alignment_study_rows(rows: list[dict]) -> list[dict]:
    """Join each sparsified row with the standard baseline at the same
    (graph, p), yielding one alignment-vs-delta record per pair."""
    standard = {
        (row["graph_id"], row["p"]): float(row["ratio"])
        for row in rows
        if row["variant"] == "standard"
    }
    out = []
    for row in rows:
        if row["variant"] == "standard" or row["aligned_levels"] in ("", None):
            continue
        base = standard.get((row["graph_id"], row["p"]))
        if base is None:
            continue
        label = row["variant"]
        if row["method"]:
            label += f"/{row['method']}"
        if row["detail"]:
            label += f"[{row['detail']}]"
        ratio = float(row["ratio"])
        out.append(
            {
                "graph_id": row["graph_id"],
                "sparsifier": label,
                "aligned_levels": int(row["aligned_levels"]),
                "ratio_sparse": ratio,
                "ratio_standard": base,
                "delta": ratio - base,
            }
        )
    return out


def plan_summary(config: ExperimentConfig) -> list[str]:
    """Human-readable sweep plan for --dry-run; loads graphs but runs nothing."""
    lines = [f"root seed: {config.seed}", f"out dir: {config.out_dir}"]
    total = 0
    for gspec in config.graphs:
        g = gspec.load(config.base_dir)
        lines.append(f"graph {gspec.graph_id}: n={g.num_vertices} m={g.num_edges}")
        for variant in config.variants:
            count = 1
            if variant.kind == "sparse" and variant.k_values != "all":
                count = len(variant.k_values)
            elif variant.kind in ("random_sparse", "random_cut"):
                count = variant.repeats
            rows = count * len(config.p_values)
            total += rows
            lines.append(
                f"  {variant.kind}"
                + (f" method={variant.method}" if variant.method else "")
                + f" x {count} instantiation(s) x p in {config.p_values} -> {rows} rows"
            )
    lines.append(f"total planned rows: {total}")
    return lines


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> RunResult:
    base_optimizer = _optimizer_from_dict(config.optimizer, seed=0)
    job_list: list[Job] = []
    graph_meta: list[dict] = []
    notes: list[str] = []
    plan_errors: list[dict] = []
    for gspec in config.graphs:
        g = gspec.load(config.base_dir)
        c_max = max_cut_value(g)
        graph_meta.append(
            {
                "graph_id": gspec.graph_id,
                "n": g.num_vertices,
                "m": g.num_edges,
                "connected": is_connected(g),
                "c_max": c_max,
            }
        )
        for variant in config.variants:
            label = variant.seed_label()
            try:
                instantiations = build_instantiations(
                    g, variant, config.seed, gspec.graph_id, c_max
                )
            except Exception as exc:  # e.g. unattainable distance-d solution
                plan_errors.append(
                    {
                        "graph_id": gspec.graph_id,
                        "variant": variant.kind,
                        "detail": "",
                        "p": None,
                        "error": f"{type(exc).__name__}: {exc}",
                    }
                )
                continue
            for inst in instantiations:
                if inst.note:
                    notes.append(f"{gspec.graph_id}/{variant.kind}: {inst.note}")
                for p in config.p_values:
                    opt_seed = derive_seed(
                        config.seed, gspec.graph_id, label, inst.seed_key(), p, "opt"
                    )
                    extra = (
                        (linear_ramp_start(p, inst.spec.two_gamma),)
                        if config.ramp_start
                        else ()
                    )
                    optimizer = replace(
                        base_optimizer, seed=opt_seed, extra_starts=extra
                    )
                    job_list.append(
                        Job(
                            graph=g,
                            graph_id=gspec.graph_id,
                            c_max=c_max,
                            variant=variant.kind,
                            method=inst.method,
                            detail=inst.detail,
                            aligned=inst.aligned,
                            spec=inst.spec,
                            p=p,
                            optimizer=optimizer,
                        )
                    )

    if jobs > 1 and len(job_list) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_execute_job, job_list))
    else:
        outcomes = [_execute_job(job) for job in job_list]

    rows = [payload for status, payload in outcomes if status == "ok"]
    errors = plan_errors + [payload for status, payload in outcomes if status == "error"]

    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "results.csv"
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)

    manifest = {
        "schema_version": SCHEMA_VERSION,
        "package_version": __version__,
        "config_sha256": hashlib.sha256(
            json.dumps(config.raw, sort_keys=True).encode()
        ).hexdigest(),
        "root_seed": config.seed,
        "csv_columns": CSV_COLUMNS,
        "graphs": graph_meta,
        "row_count": len(rows),
        "errors": errors,
        "notes": notes,
    }
    manifest_path = out_dir / "manifest.json"
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")

    study = alignment_study_rows(rows)
    study_path = None
    if study:
        study_path = out_dir / "alignment_study.csv"
        with open(study_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=STUDY_COLUMNS)
            writer.writeheader()
            writer.writerows(study)

    plot_paths: list[Path] = []
    if config.plots:
        from .plotting import emit_plots

        for style in config.plots:
            plot_paths.extend(emit_plots(rows, style, out_dir))
    return RunResult(rows, errors, csv_path, manifest_path, plot_paths, study_path)
