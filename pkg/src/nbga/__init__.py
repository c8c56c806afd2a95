"""Neighbourhood-based genetic algorithm toolkit.

A genome-generic GA engine built around a ring parent topology, trio
selection and a scheduled mutation mix, with problem bundles for
travelling-salesman tours and tree-structured ligand design.
"""

from .core import (
    EngineConfig,
    Individual,
    MutationSchedule,
    RunResult,
    evolve,
    hi_at,
    ring_pairs,
    trio_select,
)
from .ligand import (
    CATALOGUE,
    ActiveSite,
    EnergyParams,
    LigandChromosome,
    LigandProblem,
    correct,
    fitness,
    interaction_energy,
    layout,
    load_site,
    parse_site,
    validate_chromosome,
)
from .tsp import (
    BenchmarkStats,
    TspInstance,
    TspProblem,
    brute_force_optimum,
    error_percent,
    load_tsplib,
    parse_tsplib,
    tour_cost,
)

__all__ = [
    "EngineConfig",
    "Individual",
    "MutationSchedule",
    "RunResult",
    "evolve",
    "hi_at",
    "ring_pairs",
    "trio_select",
    "BenchmarkStats",
    "TspInstance",
    "TspProblem",
    "brute_force_optimum",
    "error_percent",
    "load_tsplib",
    "parse_tsplib",
    "tour_cost",
    "CATALOGUE",
    "ActiveSite",
    "EnergyParams",
    "LigandChromosome",
    "LigandProblem",
    "correct",
    "fitness",
    "interaction_energy",
    "layout",
    "load_site",
    "parse_site",
    "validate_chromosome",
]

__version__ = "0.1.0"
