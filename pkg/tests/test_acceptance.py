"""Acceptance suite: one test per release criterion.

Each test here is a single pass/fail gate; the conftest summary hook
prints one line per criterion at the end of the run.  Criterion 2
needs the standard benchmark instances on disk (they are not bundled);
point NBGA_TSPLIB_DIR at a directory holding them or fetch them into
tests/data/tsplib with the `nbga fetch` command.
"""

import os
import time
from pathlib import Path

import numpy as np
import pytest

from nbga.cli import ExperimentConfig, emit_trace, render_report, run_experiment
from nbga.core import EngineConfig, MutationSchedule, evolve
from nbga.ligand import (
    LigandChromosome,
    LigandProblem,
    correct,
    load_site,
    segment_crossover,
    validate_chromosome,
)
from nbga.tsp import (
    MULTILEVEL_VARIANTS,
    TspInstance,
    TspProblem,
    brute_force_optimum,
    error_percent,
    load_tsplib,
    multilevel_mutation,
    multiple_exchange_mutation,
    random_displacement,
    random_inversion,
    random_order_crossover,
)
from tests.conftest import PinRng, hexagon_instance

SAMPLE_SITE = str(Path(__file__).resolve().parents[1] / "src" / "nbga" / "data" / "sample_site.txt")
INSTANCE_DIR_ENV = "NBGA_TSPLIB_DIR"
DEFAULT_INSTANCE_DIR = Path(__file__).parent / "data" / "tsplib"


# ---------------------------------------------------------------------------
# Shared expensive batches (used by criteria 5 and 6)


@pytest.fixture(scope="module")
def ligand_batches():
    """Ten seeded runs each of the three configurations under the
    published settings: population 100, 100 generations."""
    reports = {}
    for label, problem, algorithm in [
        ("variable_nbga", "ligand-variable", "nbga"),
        ("fixed_nbga", "ligand-fixed", "nbga"),
        ("fixed_classic", "ligand-fixed", "classic"),
    ]:
        cfg = ExperimentConfig(
            problem=problem, algorithm=algorithm, runs=10, pop=100,
            generations=100, seed=0, site=SAMPLE_SITE,
        )
        reports[label] = run_experiment(cfg)
    return reports


# ---------------------------------------------------------------------------
# Criterion 1 — the published error metric


def test_criterion_1_error_metric_reproduces_published_rows():
    published = [
        (1272.0, 1272.0, 0.0000),
        (1610.0, 1610.0, 0.0000),
        (5084.0, 5046.0, 0.7531),
        (432.0, 426.0, 1.4084),
        (684.0, 675.0, 1.3333),
    ]
    for average, optimum, printed in published:
        assert abs(error_percent(average, optimum) - printed) < 1e-4


# ---------------------------------------------------------------------------
# Criterion 2 — benchmark quality on the standard instances


BENCHMARK_TARGETS = {
    # name -> (kind, value): "exact" needs one run hitting value,
    # "at_most" needs one run at or below value
    "gr24": ("exact", 1272.0),
    "bayg29": ("exact", 1610.0),
    "eil51": ("at_most", 433.0),
    "st70": ("at_most", 689.0),
}
MAX_BENCHMARK_RUNS = 30
RUN_SECONDS_BUDGET = 60.0


def _instance_dir() -> Path:
    override = os.environ.get(INSTANCE_DIR_ENV)
    return Path(override) if override else DEFAULT_INSTANCE_DIR


def _benchmark_one(path: Path, kind: str, target: float) -> None:
    instance = load_tsplib(path)
    problem = TspProblem(instance)
    schedule = MutationSchedule.for_dimension(instance.n, 2000)
    best_seen = np.inf
    for seed in range(MAX_BENCHMARK_RUNS):
        started = time.perf_counter()
        result = evolve(
            problem,
            EngineConfig(max_pop=100, generations=2000, seed=seed, schedule=schedule),
        )
        elapsed = time.perf_counter() - started
        assert elapsed <= RUN_SECONDS_BUDGET, (
            f"{path.name} seed {seed} took {elapsed:.1f}s (budget {RUN_SECONDS_BUDGET}s)"
        )
        best_seen = min(best_seen, result.best_individual.objective)
        if (kind == "exact" and best_seen == target) or (
            kind == "at_most" and best_seen <= target
        ):
            return
    raise AssertionError(
        f"{path.name}: best over {MAX_BENCHMARK_RUNS} runs was {best_seen}, "
        f"needed {'exactly' if kind == 'exact' else 'at most'} {target}"
    )


def test_criterion_2_tsp_benchmark_quality():
    directory = _instance_dir()
    missing = []
    for name, (kind, target) in BENCHMARK_TARGETS.items():
        path = directory / f"{name}.tsp"
        if path.exists():
            _benchmark_one(path, kind, target)
        else:
            missing.append(name)
    if missing:
        pytest.skip(
            f"benchmark instances not on disk: {', '.join(missing)} "
            f"(looked in {directory}); download them with "
            f"`nbga fetch {' '.join(missing)} --out {directory} "
            f"--base-url <instance repository URL>` or point "
            f"${INSTANCE_DIR_ENV} at a directory holding them"
        )


# ---------------------------------------------------------------------------
# Criterion 3 — exhaustive-enumeration equivalence on small instances


def test_criterion_3_engine_matches_brute_force_on_small_instances():
    maker = np.random.default_rng(20260818)
    for idx, n in enumerate((6, 7, 8, 7, 6)):
        coords = [(float(x), float(y)) for x, y in maker.uniform(0, 100, size=(n, 2))]
        instance = TspInstance.from_coords(f"rand{idx}", coords)
        optimum, _ = brute_force_optimum(instance)
        problem = TspProblem(instance)
        schedule = MutationSchedule.for_dimension(n, 500)
        hits = sum(
            evolve(
                problem,
                EngineConfig(max_pop=50, generations=500, seed=seed, schedule=schedule),
            ).best_individual.objective
            == optimum
            for seed in range(5)
        )
        assert hits >= 4, f"instance {idx} (n={n}): only {hits}/5 seeds hit {optimum}"


# ---------------------------------------------------------------------------
# Criterion 4 — crossover and repair golden example


def test_criterion_4_crossover_and_repair_golden_example():
    p1 = (1, 5, 2, 8, 8, 1, 5, 1, 4, 6)
    p2 = (2, 7, 1, 8, 3, 2, 5, 8, 6, 2)
    son1, son2 = segment_crossover(p1, p2, 3, 4, 6)
    assert son1 == (1, 5, 2, 8, 5, 8, 6, 1, 4, 6)
    assert son2 == (2, 7, 1, 8, 3, 2, 8, 1, 5, 2)

    # repairing son 1 fills its empty chain slot with the pinned
    # non-polar draw (code 2)
    valid_left = (1, 1, 1, 8, 8, 8, 8)
    repaired = correct(LigandChromosome(son1, valid_left), "variable", PinRng())
    assert repaired.right == (1, 5, 2, 8, 5, 2, 6, 1, 4, 6)
    assert repaired.left == valid_left


# ---------------------------------------------------------------------------
# Criterion 5 — configuration ordering on the shipped site


def test_criterion_5_variable_length_beats_fixed_beats_classic(ligand_batches):
    v = np.array([s.best_objective for s in ligand_batches["variable_nbga"].summaries])
    n = np.array([s.best_objective for s in ligand_batches["fixed_nbga"].summaries])
    g = np.array([s.best_objective for s in ligand_batches["fixed_classic"].summaries])
    assert len(v) == len(n) == len(g) == 10
    assert v.mean() <= n.mean() <= g.mean(), (
        f"mean best energies out of order: variable {v.mean():.6f}, "
        f"fixed {n.mean():.6f}, classic {g.mean():.6f}"
    )
    strict = int((v < g).sum())
    assert strict >= 8, f"variable beat classic in only {strict}/10 seeds"


# ---------------------------------------------------------------------------
# Criterion 6 — every emitted trace is monotone


def test_criterion_6_traces_never_worsen(ligand_batches, tmp_path, hexagon):
    all_results = [
        result for report in ligand_batches.values() for result in report.results
    ]
    problem = TspProblem(hexagon)
    schedule = MutationSchedule.for_dimension(6, 100)
    all_results += [
        evolve(problem, EngineConfig(max_pop=30, generations=100, seed=seed, schedule=schedule))
        for seed in range(5)
    ]
    assert len(all_results) == 35
    for idx, result in enumerate(all_results):
        path = tmp_path / f"trace_{idx}.csv"
        emit_trace(result, path)
        rows = path.read_text().splitlines()
        assert rows[0] == "generation,best_objective,fitness"
        assert len(rows) == 101
        values = [float(line.split(",")[1]) for line in rows[1:]]
        assert all(a >= b for a, b in zip(values, values[1:])), (
            f"trace {idx} worsens between generations"
        )


# ---------------------------------------------------------------------------
# Criterion 7 — operator invariants over 10,000 applications each


APPLICATIONS = 10_000


def test_criterion_7_operators_preserve_invariants():
    n = 30
    identity = list(range(n))
    rng = np.random.default_rng(7)
    tour = rng.permutation(n)

    for _ in range(APPLICATIONS):
        ri = int(rng.integers(2, n + 1))
        tour = multiple_exchange_mutation(tour, ri, rng)
        assert sorted(tour.tolist()) == identity
    for _ in range(APPLICATIONS):
        tour = random_inversion(tour, rng)
        assert sorted(tour.tolist()) == identity
    for _ in range(APPLICATIONS):
        tour = random_displacement(tour, rng)
        assert sorted(tour.tolist()) == identity
    for variant in MULTILEVEL_VARIANTS:
        for _ in range(APPLICATIONS):
            tour = multilevel_mutation(tour, variant, rng)
            assert sorted(tour.tolist()) == identity
    other = rng.permutation(n)
    for _ in range(APPLICATIONS):
        tour, other = random_order_crossover(tour, other, rng)
        assert sorted(tour.tolist()) == identity
        assert sorted(other.tolist()) == identity

    site = load_site(SAMPLE_SITE)
    problem = LigandProblem(site)
    schedule = MutationSchedule.for_dimension(17, 100)

    def assert_valid(c):
        violations = validate_chromosome(
            c, "variable", problem.right_bounds, problem.left_bounds
        )
        assert violations == [], violations

    c = problem.random_genome(rng)
    for i in range(APPLICATIONS):
        c = problem.mutate(c, 1 + i % 100, schedule, rng)
        assert_valid(c)
    mate = problem.random_genome(rng)
    for _ in range(APPLICATIONS):
        c, mate = problem.crossover(c, mate, rng)
        assert_valid(c)
        assert_valid(mate)
    for _ in range(APPLICATIONS):
        raw = LigandChromosome.from_array(rng.integers(1, 9, size=17))
        repaired = correct(raw, "variable", rng, problem.right_bounds, problem.left_bounds)
        assert_valid(repaired)


# ---------------------------------------------------------------------------
# Criterion 8 — byte-identical reruns


def _experiment_bytes(cfg: ExperimentConfig, tmp_path: Path, tag: str):
    report = run_experiment(cfg)
    trace_path = tmp_path / f"{tag}.csv"
    fitness_k = 100.0 if cfg.problem.startswith("ligand") else None
    best = min(report.results, key=lambda r: r.best_individual.objective)
    emit_trace(best, trace_path, fitness_k=fitness_k)
    return render_report(report).encode(), trace_path.read_bytes()


def test_criterion_8_reruns_are_byte_identical(tmp_path, hexagon_file):
    tsp_cfg = ExperimentConfig(
        problem="tsp", runs=2, pop=20, generations=40, seed=0,
        instance=str(hexagon_file), optimum=60.0,
    )
    ligand_cfg = ExperimentConfig(
        problem="ligand-variable", runs=2, pop=20, generations=20, seed=0,
        site=SAMPLE_SITE,
    )
    for tag, cfg in (("tsp", tsp_cfg), ("ligand", ligand_cfg)):
        first = _experiment_bytes(cfg, tmp_path, f"{tag}_first")
        second = _experiment_bytes(cfg, tmp_path, f"{tag}_second")
        assert first == second, f"{tag} rerun changed its outputs"

    # concurrency must not change reported numbers either
    parallel = ExperimentConfig(
        problem="tsp", runs=2, pop=20, generations=40, seed=0,
        instance=str(hexagon_file), optimum=60.0, jobs=2,
    )
    assert _experiment_bytes(parallel, tmp_path, "tsp_parallel") == _experiment_bytes(
        tsp_cfg, tmp_path, "tsp_sequential"
    )
