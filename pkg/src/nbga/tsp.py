"""TSP problem bundle: instances, a TSPLIB-subset parser, permutation
operators and benchmark statistics.

The mutation and crossover operators work on any 1-D integer array, so
the variable-length ligand encoding reuses them on group-code arrays.
Deterministic cores take explicit positions/cuts; the ``random_*``
wrappers draw parameters from a generator.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import MutationSchedule, hi_at

__all__ = [
    "TspInstance",
    "BenchmarkStats",
    "TspProblem",
    "euclid",
    "tour_cost",
    "parse_tsplib",
    "load_tsplib",
    "permute_at",
    "multiple_exchange_mutation",
    "simple_inversion_mutation",
    "displacement_mutation",
    "random_inversion",
    "random_displacement",
    "multilevel_mutation",
    "order_crossover",
    "random_order_crossover",
    "error_percent",
    "brute_force_optimum",
    "MULTILEVEL_VARIANTS",
]


def euclid(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Euclidean distance between two 2-D points."""
    return math.hypot(a[0] - b[0], a[1] - b[1])


@dataclass(frozen=True)
class TspInstance:
    """A symmetric TSP instance held as a full cost matrix.

    ``cost`` is an ``n x n`` symmetric matrix with zero diagonal;
    ``coords`` is kept when the instance came from city coordinates.
    ``known_optimum`` is the published optimal tour length, when any.
    """

    name: str
    n: int
    cost: np.ndarray
    coords: np.ndarray | None = None
    known_optimum: float | None = None

    def __post_init__(self) -> None:
        c = np.asarray(self.cost, dtype=float)
        if c.shape != (self.n, self.n):
            raise ValueError(f"cost matrix shape {c.shape} does not match n={self.n}")
        if self.n < 3:
            raise ValueError(f"need at least 3 cities, got {self.n}")
        if np.any(c < 0):
            raise ValueError("negative edge costs are not allowed")
        if np.any(np.diag(c) != 0):
            raise ValueError("cost matrix diagonal must be zero")
        if not np.array_equal(c, c.T):
            raise ValueError("cost matrix must be symmetric")
        object.__setattr__(self, "cost", c)

    @classmethod
    def from_coords(
        cls,
        name: str,
        coords,
        round_distances: bool = True,
        known_optimum: float | None = None,
    ) -> "TspInstance":
        """Build an instance from city coordinates.

        With ``round_distances`` each distance is rounded to the nearest
        integer (the TSPLIB EUC_2D convention, which makes the published
        integer optima attainable); without it raw Euclidean distances
        are kept.
        """
        pts = np.asarray(coords, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError("coords must be an (n, 2) array")
        diff = pts[:, None, :] - pts[None, :, :]
        dist = np.sqrt((diff**2).sum(axis=-1))
        if round_distances:
            dist = np.floor(dist + 0.5)  # TSPLIB nint()
        np.fill_diagonal(dist, 0.0)
        return cls(name=name, n=len(pts), cost=dist, coords=pts, known_optimum=known_optimum)


def tour_cost(tour: np.ndarray, instance: TspInstance) -> float:
    """Length of the closed tour, including the edge back to the start."""
    t = np.asarray(tour)
    if t.shape != (instance.n,):
        raise ValueError(f"tour has {t.shape} cities, instance has {instance.n}")
    c = instance.cost
    return float(c[t[:-1], t[1:]].sum() + c[t[-1], t[0]])


# ---------------------------------------------------------------------------
# TSPLIB subset parser


class TsplibFormatError(ValueError):
    """Raised for files outside the supported TSPLIB subset."""


_KNOWN_KEYS = {
    "NAME",
    "TYPE",
    "COMMENT",
    "DIMENSION",
    "EDGE_WEIGHT_TYPE",
    "EDGE_WEIGHT_FORMAT",
    "DISPLAY_DATA_TYPE",
    "NODE_COORD_TYPE",
}


def _section_tokens(lines: list[str], start: int, stop_words: set[str]):
    """Numeric tokens of a section with their line numbers (1-based)."""
    toks: list[tuple[str, int]] = []
    i = start
    while i < len(lines):
        stripped = lines[i].strip()
        word = stripped.split(":")[0].strip().upper() if stripped else ""
        if word in stop_words:
            break
        for tok in stripped.split():
            toks.append((tok, i + 1))
        i += 1
    return toks, i


def _to_float(tok: str, line: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise TsplibFormatError(f"line {line}: non-numeric token {tok!r}") from None


def parse_tsplib(text: str, round_euclidean: bool = True) -> TspInstance:
    """Parse a TSPLIB-subset instance from file contents.

    Supported: ``EDGE_WEIGHT_TYPE`` of ``EUC_2D`` (with a
    ``NODE_COORD_SECTION``) or ``EXPLICIT`` with ``EDGE_WEIGHT_FORMAT``
    ``FULL_MATRIX``, ``UPPER_ROW`` or ``LOWER_DIAG_ROW``.  Display data
    sections are skipped.  Errors carry the offending line number.
    """
    lines = text.splitlines()
    header: dict[str, str] = {}
    coord_toks = None
    weight_toks = None

    section_stops = {"NODE_COORD_SECTION", "EDGE_WEIGHT_SECTION", "DISPLAY_DATA_SECTION", "EOF"}
    i = 0
    while i < len(lines):
        stripped = lines[i].strip()
        if not stripped:
            i += 1
            continue
        upper = stripped.upper()
        if upper == "EOF":
            break
        if upper.startswith("NODE_COORD_SECTION"):
            coord_toks, i = _section_tokens(lines, i + 1, section_stops | _KNOWN_KEYS)
            continue
        if upper.startswith("EDGE_WEIGHT_SECTION"):
            weight_toks, i = _section_tokens(lines, i + 1, section_stops | _KNOWN_KEYS)
            continue
        if upper.startswith("DISPLAY_DATA_SECTION"):
            _, i = _section_tokens(lines, i + 1, section_stops | _KNOWN_KEYS)
            continue
        if ":" in stripped:
            key, _, value = stripped.partition(":")
            key = key.strip().upper()
            if key not in _KNOWN_KEYS:
                raise TsplibFormatError(f"line {i + 1}: unsupported keyword {key!r}")
            header[key] = value.strip()
            i += 1
            continue
        raise TsplibFormatError(f"line {i + 1}: unrecognized line {stripped!r}")

    if "DIMENSION" not in header:
        raise TsplibFormatError("missing DIMENSION")
    try:
        n = int(header["DIMENSION"])
    except ValueError:
        raise TsplibFormatError(f"bad DIMENSION value {header['DIMENSION']!r}") from None
    declared_type = header.get("TYPE", "TSP").upper()
    if declared_type not in ("TSP",):
        raise TsplibFormatError(f"unsupported TYPE {declared_type!r}")
    name = header.get("NAME", "unnamed")
    ewt = header.get("EDGE_WEIGHT_TYPE", "").upper()

    if ewt == "EUC_2D":
        if coord_toks is None:
            raise TsplibFormatError("EUC_2D instance without NODE_COORD_SECTION")
        if len(coord_toks) != 3 * n:
            raise TsplibFormatError(
                f"NODE_COORD_SECTION holds {len(coord_toks)} tokens, expected {3 * n}"
            )
        coords = np.zeros((n, 2))
        seen = np.zeros(n, dtype=bool)
        for k in range(n):
            idx_tok, idx_line = coord_toks[3 * k]
            idx = int(_to_float(idx_tok, idx_line))
            if not 1 <= idx <= n or seen[idx - 1]:
                raise TsplibFormatError(f"line {idx_line}: bad or repeated node index {idx}")
            seen[idx - 1] = True
            coords[idx - 1, 0] = _to_float(*coord_toks[3 * k + 1])
            coords[idx - 1, 1] = _to_float(*coord_toks[3 * k + 2])
        return TspInstance.from_coords(name, coords, round_distances=round_euclidean)

    if ewt == "EXPLICIT":
        fmt = header.get("EDGE_WEIGHT_FORMAT", "").upper()
        if weight_toks is None:
            raise TsplibFormatError("EXPLICIT instance without EDGE_WEIGHT_SECTION")
        values = [_to_float(tok, line) for tok, line in weight_toks]
        cost = np.zeros((n, n))
        if fmt == "FULL_MATRIX":
            if len(values) != n * n:
                raise TsplibFormatError(
                    f"FULL_MATRIX holds {len(values)} entries, expected {n * n}"
                )
            cost = np.asarray(values).reshape(n, n)
            if not np.array_equal(cost, cost.T):
                raise TsplibFormatError("FULL_MATRIX is not symmetric")
        elif fmt == "UPPER_ROW":
            expect = n * (n - 1) // 2
            if len(values) != expect:
                raise TsplibFormatError(
                    f"UPPER_ROW holds {len(values)} entries, expected {expect}"
                )
            it = iter(values)
            for r in range(n - 1):
                for c in range(r + 1, n):
                    v = next(it)
                    cost[r, c] = cost[c, r] = v
        elif fmt == "LOWER_DIAG_ROW":
            expect = n * (n + 1) // 2
            if len(values) != expect:
                raise TsplibFormatError(
                    f"LOWER_DIAG_ROW holds {len(values)} entries, expected {expect}"
                )
            it = iter(values)
            for r in range(n):
                for c in range(r + 1):
                    v = next(it)
                    cost[r, c] = cost[c, r] = v
        else:
            raise TsplibFormatError(f"unsupported EDGE_WEIGHT_FORMAT {fmt!r}")
        return TspInstance(name=name, n=n, cost=cost)

    raise TsplibFormatError(f"unsupported EDGE_WEIGHT_TYPE {ewt!r}")


def load_tsplib(path, round_euclidean: bool = True, known_optimum: float | None = None) -> TspInstance:
    """Parse a TSPLIB file from disk."""
    with open(path) as fh:
        inst = parse_tsplib(fh.read(), round_euclidean=round_euclidean)
    if known_optimum is not None:
        inst = TspInstance(inst.name, inst.n, inst.cost, inst.coords, known_optimum)
    return inst


# ---------------------------------------------------------------------------
# Array operators (shared by tours and ligand code arrays)


def permute_at(arr: np.ndarray, positions, order) -> np.ndarray:
    """Copy of ``arr`` with the values at ``positions`` rearranged.

    ``order`` indexes into the selected values: position ``positions[k]``
    receives the value previously at ``positions[order[k]]``.
    """
    positions = np.asarray(positions)
    out = np.array(arr)
    out[positions] = out[positions][np.asarray(order)]
    return out


def multiple_exchange_mutation(arr: np.ndarray, ri: int, rng: np.random.Generator) -> np.ndarray:
    """Exchange the contents of ``ri`` randomly chosen positions.

    Draws ``ri`` distinct positions uniformly and applies a uniformly
    random non-identity rearrangement to the values held there (single
    positions may stay put, the whole selection cannot).  ``ri = 2`` is
    the classic exchange mutation.
    """
    n = len(arr)
    if not 2 <= ri <= n:
        raise ValueError(f"ri must lie in [2, {n}], got {ri}")
    positions = rng.choice(n, size=ri, replace=False)
    order = rng.permutation(ri)
    while (order == np.arange(ri)).all():
        order = rng.permutation(ri)
    return permute_at(arr, positions, order)


def simple_inversion_mutation(arr: np.ndarray, i: int, j: int) -> np.ndarray:
    """Reverse the closed segment ``[i..j]`` (0-based, ``i < j``)."""
    if not 0 <= i < j < len(arr):
        raise ValueError(f"need 0 <= i < j < {len(arr)}, got i={i} j={j}")
    out = np.array(arr)
    out[i : j + 1] = out[i : j + 1][::-1]
    return out


def displacement_mutation(arr: np.ndarray, i: int, j: int, p: int) -> np.ndarray:
    """Move the closed segment ``[i..j]`` so it starts after ``p``
    elements of the remainder (0-based; ``p = i`` is the identity)."""
    n = len(arr)
    if not 0 <= i <= j < n:
        raise ValueError(f"need 0 <= i <= j < {n}, got i={i} j={j}")
    seg_len = j - i + 1
    if not 0 <= p <= n - seg_len:
        raise ValueError(f"insertion index p={p} out of range [0, {n - seg_len}]")
    seg = np.array(arr[i : j + 1])
    rest = np.concatenate([arr[:i], arr[j + 1 :]])
    return np.concatenate([rest[:p], seg, rest[p:]])


def random_inversion(arr: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    i, j = np.sort(rng.choice(len(arr), size=2, replace=False))
    return simple_inversion_mutation(arr, int(i), int(j))


def random_displacement(arr: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    n = len(arr)
    i = int(rng.integers(n))
    j = int(rng.integers(i, n))
    p = int(rng.integers(0, n - (j - i + 1) + 1))
    return displacement_mutation(arr, i, j, p)


MULTILEVEL_VARIANTS = ("exchange+displacement", "inversion+displacement")


def multilevel_mutation(arr: np.ndarray, variant: str, rng: np.random.Generator) -> np.ndarray:
    """Compose two mutations with independently drawn parameters."""
    if variant == "exchange+displacement":
        step = multiple_exchange_mutation(arr, 2, rng)
    elif variant == "inversion+displacement":
        step = random_inversion(arr, rng)
    else:
        raise ValueError(f"unknown multilevel variant {variant!r}")
    return random_displacement(step, rng)


def order_crossover(p1: np.ndarray, p2: np.ndarray, cut1: int, cut2: int) -> tuple[np.ndarray, np.ndarray]:
    """Standard order crossover (OX) with cuts at ``[cut1..cut2]``.

    Each child keeps one parent's segment and receives the remaining
    cities in the other parent's order, filling slots cyclically from
    just past the segment.
    """
    n = len(p1)
    if len(p2) != n:
        raise ValueError("parents must have equal length")
    if not 0 <= cut1 < cut2 < n:
        raise ValueError(f"need 0 <= cut1 < cut2 < {n}, got {cut1}, {cut2}")

    def make(keep: np.ndarray, donor: np.ndarray) -> np.ndarray:
        child = np.empty(n, dtype=keep.dtype)
        child[cut1 : cut2 + 1] = keep[cut1 : cut2 + 1]
        kept = set(int(v) for v in keep[cut1 : cut2 + 1])
        fill = [v for k in range(n) if int(v := donor[(cut2 + 1 + k) % n]) not in kept]
        for offset, v in enumerate(fill):
            child[(cut2 + 1 + offset) % n] = v
        return child

    return make(p1, p2), make(p2, p1)


def random_order_crossover(p1: np.ndarray, p2: np.ndarray, rng: np.random.Generator):
    cut1, cut2 = np.sort(rng.choice(len(p1), size=2, replace=False))
    return order_crossover(p1, p2, int(cut1), int(cut2))


# ---------------------------------------------------------------------------
# Statistics and oracles


@dataclass(frozen=True)
class BenchmarkStats:
    """Best / average / error summary over a batch of runs."""

    best: float
    average: float
    error_percent: float | None
    runs: int


def error_percent(average: float, optimum: float) -> float:
    """Relative excess of the average over the known optimum, in percent."""
    if optimum <= 0:
        raise ValueError(f"optimum must be positive, got {optimum}")
    return 100.0 * (average - optimum) / optimum


def brute_force_optimum(instance: TspInstance) -> tuple[float, np.ndarray]:
    """Exhaustive-enumeration optimum; only sensible for small n.

    Fixes city 0 and enumerates the remaining ``(n-1)!`` orderings,
    skipping reversed duplicates.
    """
    if instance.n > 10:
        raise ValueError("brute force is limited to n <= 10")
    best_cost = math.inf
    best_tour = None
    rest = range(1, instance.n)
    for perm in itertools.permutations(rest):
        if perm[0] > perm[-1]:  # each cycle once, not its mirror
            continue
        tour = np.array((0,) + perm)
        cost = tour_cost(tour, instance)
        if cost < best_cost:
            best_cost = cost
            best_tour = tour
    return best_cost, best_tour


# ---------------------------------------------------------------------------
# Problem bundle


class TspProblem:
    """Adapts a :class:`TspInstance` to the engine's problem surface.

    ``operators`` names the base mutations drawn from uniformly when a
    mutation call is not promoted to a multilevel one; any of
    ``"multiple_exchange"``, ``"inversion"``, ``"displacement"``.
    """

    def __init__(
        self,
        instance: TspInstance,
        operators: tuple[str, ...] = ("multiple_exchange", "inversion", "displacement"),
    ):
        known = {"multiple_exchange", "inversion", "displacement"}
        bad = set(operators) - known
        if bad:
            raise ValueError(f"unknown operators: {sorted(bad)}")
        if not operators:
            raise ValueError("need at least one mutation operator")
        self.instance = instance
        self.n = instance.n
        self.operators = tuple(operators)
        self.repair = None

    def random_genome(self, rng: np.random.Generator) -> np.ndarray:
        return rng.permutation(self.n)

    def objective(self, tour: np.ndarray) -> float:
        c = self.instance.cost
        return float(c[tour[:-1], tour[1:]].sum() + c[tour[-1], tour[0]])

    def mutate(
        self,
        tour: np.ndarray,
        gen: int,
        schedule: MutationSchedule,
        rng: np.random.Generator,
    ) -> np.ndarray:
        if (
            gen >= schedule.multilevel_start_generation
            and rng.random() < schedule.multilevel_probability
        ):
            variant = MULTILEVEL_VARIANTS[int(rng.integers(len(MULTILEVEL_VARIANTS)))]
            return multilevel_mutation(tour, variant, rng)
        op = self.operators[int(rng.integers(len(self.operators)))]
        if op == "multiple_exchange":
            hi = hi_at(gen, self.n, schedule)
            ri = int(rng.integers(2, hi + 1))
            return multiple_exchange_mutation(tour, ri, rng)
        if op == "inversion":
            return random_inversion(tour, rng)
        return random_displacement(tour, rng)

    def crossover(self, a: np.ndarray, b: np.ndarray, rng: np.random.Generator):
        return random_order_crossover(a, b, rng)
