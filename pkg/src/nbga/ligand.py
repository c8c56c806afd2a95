"""Ligand-design problem bundle: functional-group catalogue, two-tree
chromosome with repair, deterministic 2D geometry, and a Van der Waals
interaction-energy objective with distance window and polarity
penalties.

A candidate ligand is a fixed central scaffold with a *right* tree of
10 group slots and a *left* tree of 7, each slot holding one of eight
group codes (code 8 = NUL marks an empty slot in variable-length mode).
All positions in this module are 0-based; the catalogue codes keep
their conventional 1-based numbering.

Chromosome validity means three things:

C1 (polarity)
    An internal (backbone) slot holds no polar code unless every slot
    below it is NUL.
C2 (connectivity)
    No internal slot is NUL while any slot below it is occupied.
Length bounds
    Each side carries at least ``l_min`` occupied slots, where l_min is
    derived from the active site's major axis and the longest bond.

``correct`` repairs arbitrary code arrays into valid chromosomes and is
applied after every generation/mutation/crossover step, so the engine
only ever evaluates valid candidates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .core import MutationSchedule, hi_at
from .tsp import (
    MULTILEVEL_VARIANTS,
    multilevel_mutation,
    multiple_exchange_mutation,
)

__all__ = [
    "FunctionalGroup",
    "CATALOGUE",
    "NUL",
    "POLAR_CODES",
    "NONPOLAR_CODES",
    "TreeTopology",
    "RIGHT_TOPOLOGY",
    "LEFT_TOPOLOGY",
    "LigandChromosome",
    "LengthBounds",
    "Residue",
    "ActiveSite",
    "EnergyParams",
    "Placement",
    "GroupTerm",
    "EnergyReport",
    "LigandProblem",
    "length_bounds",
    "validate_chromosome",
    "correct",
    "segment_crossover",
    "group_mutation",
    "layout",
    "vdw",
    "interaction_energy",
    "interaction_total",
    "fitness",
    "parse_site",
    "load_site",
]


# ---------------------------------------------------------------------------
# Functional-group catalogue


@dataclass(frozen=True)
class FunctionalGroup:
    """One fragment type: code, display name, x-projected bond length
    in Angstrom, and polarity.  Code 8 (NUL) has neither length nor
    polarity — it marks an empty slot."""

    code: int
    name: str
    bond_length_x: float | None
    polar: bool | None


CATALOGUE: dict[int, FunctionalGroup] = {
    1: FunctionalGroup(1, "Alkyl-1C", 0.65, False),
    2: FunctionalGroup(2, "Alkyl-3C", 1.75, False),
    3: FunctionalGroup(3, "Alkyl-1C-Polar", 1.1, True),
    4: FunctionalGroup(4, "Alkyl-3C-Polar", 2.2, True),
    5: FunctionalGroup(5, "Polar", 0.01, True),
    6: FunctionalGroup(6, "Aromatic", 1.9, False),
    7: FunctionalGroup(7, "Aromatic-Polar", 2.7, True),
    8: FunctionalGroup(8, "NUL", None, None),
}

NUL = 8
POLAR_CODES = (3, 4, 5, 7)
NONPOLAR_CODES = (1, 2, 6)
_POLAR_SET = frozenset(POLAR_CODES)

# deterministic polar -> non-polar substitution used by C1 repair
_POLAR_REMAP = {3: 1, 4: 2, 7: 6, 5: 1}

MAX_BOND_LENGTH = max(g.bond_length_x for g in CATALOGUE.values() if g.bond_length_x)
MIN_BOND_LENGTH = min(g.bond_length_x for g in CATALOGUE.values() if g.bond_length_x)


# ---------------------------------------------------------------------------
# Tree topology


@dataclass(frozen=True)
class TreeTopology:
    """Parent/child structure of one ligand side.

    ``parents[i]`` is the slot index feeding slot ``i`` (-1 for the
    root, which hangs off the side's anchor).  ``backbone`` lists the
    internal slots — exactly the slots that have children; every other
    slot is a leaf.  Derived tables (children, transitive descendants,
    per-slot y offsets, and the deepest-first leaf fill order) are
    computed once at construction.
    """

    name: str
    parents: tuple[int, ...]
    backbone: tuple[int, ...]
    children: tuple[tuple[int, ...], ...] = field(init=False, repr=False)
    descendants: tuple[tuple[int, ...], ...] = field(init=False, repr=False)
    depths: tuple[int, ...] = field(init=False, repr=False)
    y_steps: tuple[int, ...] = field(init=False, repr=False)
    leaf_fill_order: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        n = len(self.parents)
        if n < 1 or self.parents[0] != -1:
            raise ValueError("slot 0 must be the root (parent -1)")
        for i, p in enumerate(self.parents[1:], start=1):
            if not 0 <= p < i:
                raise ValueError(f"slot {i} must attach to an earlier slot, got {p}")

        kids: list[list[int]] = [[] for _ in range(n)]
        for i in range(1, n):
            kids[self.parents[i]].append(i)
        internal = tuple(i for i in range(n) if kids[i])
        if internal != tuple(sorted(self.backbone)):
            raise ValueError(
                f"backbone {self.backbone} must be exactly the slots with children {internal}"
            )

        desc: list[list[int]] = [[] for _ in range(n)]
        for i in range(n - 1, 0, -1):
            desc[self.parents[i]].extend([i] + desc[i])
        depths = [1] * n
        for i in range(1, n):
            depths[i] = depths[self.parents[i]] + 1

        # fan-out pattern for the j-th non-backbone child of a slot:
        # j = 1, 2, 3, 4, ... -> y steps -1, +1, -2, +2, ...
        backbone_set = set(self.backbone)
        steps = [0] * n
        for i in range(n):
            j = 0
            for child in kids[i]:
                if child in backbone_set:
                    continue
                j += 1
                steps[child] = (-1) ** j * math.ceil(j / 2)

        leaves = [i for i in range(n) if not kids[i]]
        leaves.sort(key=lambda i: (-depths[i], i))

        object.__setattr__(self, "children", tuple(tuple(k) for k in kids))
        object.__setattr__(self, "descendants", tuple(tuple(sorted(d)) for d in desc))
        object.__setattr__(self, "depths", tuple(depths))
        object.__setattr__(self, "y_steps", tuple(steps))
        object.__setattr__(self, "leaf_fill_order", tuple(leaves))

    @property
    def slots(self) -> int:
        return len(self.parents)


RIGHT_TOPOLOGY = TreeTopology(
    name="right",
    parents=(-1, 0, 0, 2, 2, 2, 5, 5, 5, 5),
    backbone=(0, 2, 5),
)
LEFT_TOPOLOGY = TreeTopology(
    name="left",
    parents=(-1, 0, 0, 2, 2, 2, 2),
    backbone=(0, 2),
)


# ---------------------------------------------------------------------------
# Chromosome


@dataclass(frozen=True)
class LigandChromosome:
    """Group codes for both sides: 10 right slots and 7 left slots."""

    right: tuple[int, ...]
    left: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.right) != RIGHT_TOPOLOGY.slots:
            raise ValueError(f"right side needs {RIGHT_TOPOLOGY.slots} codes")
        if len(self.left) != LEFT_TOPOLOGY.slots:
            raise ValueError(f"left side needs {LEFT_TOPOLOGY.slots} codes")
        for v in self.right + self.left:
            if not 1 <= int(v) <= 8:
                raise ValueError(f"illegal group code {v}")
        object.__setattr__(self, "right", tuple(int(v) for v in self.right))
        object.__setattr__(self, "left", tuple(int(v) for v in self.left))

    def as_array(self) -> np.ndarray:
        """Both sides concatenated (right then left) as an int array."""
        return np.array(self.right + self.left, dtype=int)

    @classmethod
    def from_array(cls, codes: np.ndarray) -> "LigandChromosome":
        r = RIGHT_TOPOLOGY.slots
        return cls(tuple(int(v) for v in codes[:r]), tuple(int(v) for v in codes[r:]))


@dataclass(frozen=True)
class LengthBounds:
    """Occupied-slot count limits for one side."""

    l_min: int
    l_max: int

    def __post_init__(self) -> None:
        if not 0 < self.l_min <= self.l_max:
            raise ValueError(f"need 0 < l_min <= l_max, got {self.l_min}, {self.l_max}")


def length_bounds(major_axis: float, slots: int, catalogue=CATALOGUE) -> LengthBounds:
    """Occupancy bounds implied by a pocket's major-axis length.

    The minimum count assumes every group contributes the longest bond;
    the maximum assumes the shortest, capped at the slot count.  A tiny
    epsilon guards the exact-division cases against float noise.
    """
    if major_axis <= 0:
        raise ValueError(f"major axis must be positive, got {major_axis}")
    longest = max(g.bond_length_x for g in catalogue.values() if g.bond_length_x)
    shortest = min(g.bond_length_x for g in catalogue.values() if g.bond_length_x)
    l_min = max(1, math.ceil(major_axis / longest - 1e-9))
    l_max = min(slots, math.floor(major_axis / shortest + 1e-9))
    if l_min > slots:
        raise ValueError(
            f"axis {major_axis} needs at least {l_min} groups but only {slots} slots exist"
        )
    return LengthBounds(l_min=l_min, l_max=l_max)


DEFAULT_RIGHT_BOUNDS = LengthBounds(7, RIGHT_TOPOLOGY.slots)
DEFAULT_LEFT_BOUNDS = LengthBounds(2, LEFT_TOPOLOGY.slots)


# ---------------------------------------------------------------------------
# Validation and repair


def _side_violations(codes, topo: TreeTopology, bounds: LengthBounds, mode: str) -> list[str]:
    out = []
    for i in topo.backbone:
        live_below = any(codes[d] != NUL for d in topo.descendants[i])
        if codes[i] == NUL and live_below:
            out.append(f"{topo.name}[{i}]: NUL internal slot with occupied descendants")
        if codes[i] in _POLAR_SET and live_below:
            out.append(f"{topo.name}[{i}]: polar code {codes[i]} on a non-terminal internal slot")
    live = sum(1 for v in codes if v != NUL)
    if mode == "fixed":
        if any(v == NUL for v in codes):
            out.append(f"{topo.name}: NUL code present in fixed-length mode")
    elif live < bounds.l_min:
        out.append(f"{topo.name}: {live} occupied slots, need at least {bounds.l_min}")
    return out


def validate_chromosome(
    c: LigandChromosome,
    mode: str = "variable",
    right_bounds: LengthBounds = DEFAULT_RIGHT_BOUNDS,
    left_bounds: LengthBounds = DEFAULT_LEFT_BOUNDS,
) -> list[str]:
    """All invariant violations of a chromosome (empty list = valid)."""
    if mode not in ("fixed", "variable"):
        raise ValueError(f"mode must be 'fixed' or 'variable', got {mode!r}")
    return _side_violations(c.right, RIGHT_TOPOLOGY, right_bounds, mode) + _side_violations(
        c.left, LEFT_TOPOLOGY, left_bounds, mode
    )


def _correct_side(
    codes: list[int],
    topo: TreeTopology,
    bounds: LengthBounds,
    mode: str,
    rng,
) -> list[int]:
    top = 7 if mode == "fixed" else 8
    for v in codes:
        if not 1 <= v <= top:
            raise ValueError(f"illegal group code {v} for {mode} mode")

    def live_below(i: int) -> bool:
        return any(codes[d] != NUL for d in topo.descendants[i])

    # C2: backbone in position order is root-to-leaf along the chain
    for i in topo.backbone:
        if codes[i] == NUL and live_below(i):
            codes[i] = NONPOLAR_CODES[int(rng.integers(len(NONPOLAR_CODES)))]
    # C1
    for i in topo.backbone:
        if codes[i] in _POLAR_SET and live_below(i):
            codes[i] = _POLAR_REMAP[codes[i]]
    # occupancy floor: fill empty leaves deepest-first, reviving any dead
    # slots on the path up so connectivity holds
    if mode == "variable":
        live = sum(1 for v in codes if v != NUL)
        for slot in topo.leaf_fill_order:
            if live >= bounds.l_min:
                break
            if codes[slot] != NUL:
                continue
            codes[slot] = int(rng.integers(1, 8))
            live += 1
            a = topo.parents[slot]
            while a >= 0:
                if codes[a] == NUL:
                    codes[a] = NONPOLAR_CODES[int(rng.integers(len(NONPOLAR_CODES)))]
                    live += 1
                a = topo.parents[a]
        # a fill can hand live descendants to a previously-terminal polar slot
        for i in topo.backbone:
            if codes[i] in _POLAR_SET and live_below(i):
                codes[i] = _POLAR_REMAP[codes[i]]
    return codes


def correct(
    c: LigandChromosome,
    mode: str = "variable",
    rng: np.random.Generator | None = None,
    right_bounds: LengthBounds = DEFAULT_RIGHT_BOUNDS,
    left_bounds: LengthBounds = DEFAULT_LEFT_BOUNDS,
) -> LigandChromosome:
    """Repair a chromosome into a valid one.

    Sweep order per side (right first, then left): connectivity (C2)
    root-to-leaf — an empty internal slot with occupied descendants
    gets a random non-polar code; polarity (C1) — a polar internal slot
    with occupied descendants is substituted non-polar (3→1, 4→2, 7→6,
    5→1); then, in variable mode, empty leaves are filled deepest-first
    with random codes until ``l_min`` is met, reviving dead slots on
    the path to the root.  Already-valid input comes back unchanged
    with no generator draws, so the repair is idempotent.
    """
    if mode not in ("fixed", "variable"):
        raise ValueError(f"mode must be 'fixed' or 'variable', got {mode!r}")
    if rng is None:
        raise ValueError("correct() needs the run's generator for repair draws")
    right = _correct_side(list(c.right), RIGHT_TOPOLOGY, right_bounds, mode, rng)
    left = _correct_side(list(c.left), LEFT_TOPOLOGY, left_bounds, mode, rng)
    fixed = LigandChromosome(tuple(right), tuple(left))
    remaining = validate_chromosome(fixed, mode, right_bounds, left_bounds)
    if remaining:
        raise RuntimeError(f"repair left violations: {remaining}")
    return fixed


# ---------------------------------------------------------------------------
# Variation operators


def segment_crossover(p1, p2, seg_len: int, pos1: int, pos2: int):
    """Swap a length-``seg_len`` segment between two same-side arrays.

    Child 1 is parent 1 with its segment at ``pos1`` replaced by parent
    2's segment at ``pos2``; child 2 is the mirror image.  Children are
    raw — run them through :func:`correct` before evaluating.
    """
    a = tuple(int(v) for v in p1)
    b = tuple(int(v) for v in p2)
    n = len(a)
    if len(b) != n:
        raise ValueError("parents must be the same side (equal length)")
    if not 1 <= seg_len <= n:
        raise ValueError(f"segment length {seg_len} out of range [1, {n}]")
    for pos in (pos1, pos2):
        if not 0 <= pos <= n - seg_len:
            raise ValueError(f"segment at {pos} overruns the array (len {seg_len})")
    child1 = a[:pos1] + b[pos2 : pos2 + seg_len] + a[pos1 + seg_len :]
    child2 = b[:pos2] + a[pos1 : pos1 + seg_len] + b[pos2 + seg_len :]
    return child1, child2


def group_mutation(
    c: LigandChromosome,
    gen: int,
    schedule: MutationSchedule,
    mode: str,
    rng: np.random.Generator,
    right_bounds: LengthBounds = DEFAULT_RIGHT_BOUNDS,
    left_bounds: LengthBounds = DEFAULT_LEFT_BOUNDS,
) -> LigandChromosome:
    """Mutate a chromosome and repair the result.

    Acts on the concatenated 17-code array so exchanges may move codes
    across sides.  Draw order: first the multilevel gate (when the
    schedule allows it), then a fair coin between a scheduled
    multiple-exchange and a single-slot resample from the mode's legal
    codes.  The mutant is passed through :func:`correct`.
    """
    codes = c.as_array()
    top = 7 if mode == "fixed" else 8
    if (
        gen >= schedule.multilevel_start_generation
        and rng.random() < schedule.multilevel_probability
    ):
        variant = MULTILEVEL_VARIANTS[int(rng.integers(len(MULTILEVEL_VARIANTS)))]
        codes = multilevel_mutation(codes, variant, rng)
    elif rng.random() < 0.5:
        hi = hi_at(gen, len(codes), schedule)
        ri = int(rng.integers(2, hi + 1))
        codes = multiple_exchange_mutation(codes, ri, rng)
    else:
        codes = codes.copy()
        slot = int(rng.integers(len(codes)))
        codes[slot] = int(rng.integers(1, top + 1))
    return correct(LigandChromosome.from_array(codes), mode, rng, right_bounds, left_bounds)


# ---------------------------------------------------------------------------
# Active site and geometry


@dataclass(frozen=True)
class Residue:
    """One amino-acid site point the ligand interacts with."""

    name: str
    x: float
    y: float
    polar: bool


@dataclass(frozen=True)
class ActiveSite:
    """2D pocket model: residues plus anchors and axis lengths for the
    two tree sides."""

    residues: tuple[Residue, ...]
    right_anchor: tuple[float, float]
    left_anchor: tuple[float, float]
    right_major_axis: float
    left_major_axis: float

    def __post_init__(self) -> None:
        if not self.residues:
            raise ValueError("active site needs at least one residue")
        if tuple(self.right_anchor) == tuple(self.left_anchor):
            raise ValueError("anchors must be distinct points")
        if self.right_major_axis <= 0 or self.left_major_axis <= 0:
            raise ValueError("major axes must be positive")
        object.__setattr__(self, "residues", tuple(self.residues))
        object.__setattr__(self, "right_anchor", tuple(map(float, self.right_anchor)))
        object.__setattr__(self, "left_anchor", tuple(map(float, self.left_anchor)))


class SiteFormatError(ValueError):
    """Raised for malformed active-site files."""


def parse_site(text: str) -> ActiveSite:
    """Parse an active-site description.

    Line-oriented: ``#`` starts a comment; directives ``right_anchor x
    y``, ``left_anchor x y``, ``right_axis L``, ``left_axis L``; every
    other non-blank line is a residue ``NAME x y P|H`` (P polar, H
    hydrophobic).  Distances are Angstrom.  Errors carry line numbers.
    """
    anchors: dict[str, tuple[float, float]] = {}
    axes: dict[str, float] = {}
    residues: list[Residue] = []

    def want_floats(parts, count, lineno):
        try:
            return [float(p) for p in parts]
        except ValueError:
            raise SiteFormatError(f"line {lineno}: expected {count} numbers, got {parts}") from None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key = parts[0].lower()
        if key in ("right_anchor", "left_anchor"):
            if len(parts) != 3:
                raise SiteFormatError(f"line {lineno}: {key} needs x and y")
            x, y = want_floats(parts[1:], 2, lineno)
            anchors[key] = (x, y)
        elif key in ("right_axis", "left_axis"):
            if len(parts) != 2:
                raise SiteFormatError(f"line {lineno}: {key} needs one length")
            (length,) = want_floats(parts[1:], 1, lineno)
            axes[key] = length
        else:
            if len(parts) != 4:
                raise SiteFormatError(
                    f"line {lineno}: residue lines are 'NAME x y P|H', got {raw.strip()!r}"
                )
            x, y = want_floats(parts[1:3], 2, lineno)
            flag = parts[3].upper()
            if flag not in ("P", "H"):
                raise SiteFormatError(f"line {lineno}: polarity must be P or H, got {parts[3]!r}")
            residues.append(Residue(parts[0], x, y, flag == "P"))

    for need in ("right_anchor", "left_anchor", "right_axis", "left_axis"):
        if need not in anchors and need not in axes:
            raise SiteFormatError(f"missing {need} directive")
    if not residues:
        raise SiteFormatError("no residue lines found")
    return ActiveSite(
        residues=tuple(residues),
        right_anchor=anchors["right_anchor"],
        left_anchor=anchors["left_anchor"],
        right_major_axis=axes["right_axis"],
        left_major_axis=axes["left_axis"],
    )


def load_site(path) -> ActiveSite:
    """Parse an active-site file from disk."""
    with open(path) as fh:
        return parse_site(fh.read())


@dataclass(frozen=True)
class Placement:
    """One occupied slot with its resolved 2D coordinates."""

    side: str
    position: int
    code: int
    x: float
    y: float


_BOND = tuple(
    CATALOGUE[code].bond_length_x if code != NUL else 0.0 for code in range(1, 9)
)
_IS_POLAR = tuple(bool(CATALOGUE[code].polar) for code in range(1, 8)) + (False,)


def _layout_side(codes, topo: TreeTopology, anchor, direction: int, dy: float):
    """(position, code, x, y) rows for one side's occupied slots."""
    placed: list[tuple[int, int, float, float]] = []
    xs: dict[int, float] = {}
    ys: dict[int, float] = {}
    for i in range(topo.slots):
        code = codes[i]
        if code == NUL:
            continue
        parent = topo.parents[i]
        if parent < 0:
            px, py = anchor
        elif parent in xs:
            px, py = xs[parent], ys[parent]
        else:
            raise ValueError(f"{topo.name}[{i}] is occupied under an empty slot {parent}")
        x = px + direction * _BOND[code - 1]
        y = py + topo.y_steps[i] * dy
        xs[i], ys[i] = x, y
        placed.append((i, code, x, y))
    return placed


def _placed_rows(c: LigandChromosome, site: ActiveSite, dy: float):
    right = _layout_side(c.right, RIGHT_TOPOLOGY, site.right_anchor, +1, dy)
    left = _layout_side(c.left, LEFT_TOPOLOGY, site.left_anchor, -1, dy)
    return [("right", *row) for row in right] + [("left", *row) for row in left]


def layout(c: LigandChromosome, site: ActiveSite, dy: float = 1.0) -> tuple[Placement, ...]:
    """Deterministic 2D coordinates for every occupied slot.

    Each side grows from its anchor away from the scaffold along x
    (right +, left −); a slot's x is its parent's x displaced by the
    slot's own bond length.  Backbone slots keep their parent's y; the
    j-th non-backbone child of a slot fans out to parent_y + dy·(−1)^j
    ·ceil(j/2), counting child slots in position order.  NUL slots are
    omitted.
    """
    return tuple(Placement(*row) for row in _placed_rows(c, site, dy))


# ---------------------------------------------------------------------------
# Energy model


@dataclass(frozen=True)
class EnergyParams:
    """Constants of the interaction-energy model.

    ``vdw`` is evaluated as Cn·r⁻⁶ − Cm·r⁻¹²; set ``standard_lj`` to
    flip to the usual repulsive-minus-attractive orientation.  A group
    closer than ``r_min`` to its nearest residue costs the clash
    penalty; inside the [r_min, r_max] window it contributes vdw plus
    the mismatch penalty when group and residue polarity differ; past
    ``r_max`` it contributes nothing.  The total is clamped below at
    ``E_floor`` so the fitness k/E stays finite.
    """

    Cn: float = 1.0
    Cm: float = 1.0
    r_min: float = 0.7
    r_max: float = 2.7
    clash_penalty: float = 10.0
    mismatch_penalty: float = 5.0
    k: float = 100.0
    E_floor: float = 1e-6
    standard_lj: bool = False

    def __post_init__(self) -> None:
        if not 0 < self.r_min < self.r_max:
            raise ValueError(f"need 0 < r_min < r_max, got {self.r_min}, {self.r_max}")
        if self.clash_penalty < 0 or self.mismatch_penalty < 0:
            raise ValueError("penalties must be non-negative")
        if self.k <= 0:
            raise ValueError("fitness constant k must be positive")
        if self.E_floor <= 0:
            raise ValueError("E_floor must be positive")


DEFAULT_PARAMS = EnergyParams()


def vdw(r: float, params: EnergyParams = DEFAULT_PARAMS) -> float:
    """Pairwise Van der Waals potential at distance ``r``."""
    if r <= 0:
        raise ValueError(f"distance must be positive, got {r}")
    attractive = params.Cn / r**6
    repulsive = params.Cm / r**12
    return repulsive - attractive if params.standard_lj else attractive - repulsive


@dataclass(frozen=True)
class GroupTerm:
    """Energy contribution of one placed group against its nearest
    residue."""

    side: str
    position: int
    code: int
    residue: str
    distance: float
    term: float


@dataclass(frozen=True)
class EnergyReport:
    """Total interaction energy plus the per-group breakdown."""

    total: float
    terms: tuple[GroupTerm, ...]


@lru_cache(maxsize=16)
def _site_arrays(site: ActiveSite):
    res_x = np.array([r.x for r in site.residues])
    res_y = np.array([r.y for r in site.residues])
    res_polar = tuple(r.polar for r in site.residues)
    return res_x, res_y, res_polar


def _group_terms(rows, site: ActiveSite, params: EnergyParams):
    """Yield (row, nearest index, distance, term) per occupied slot."""
    res_x, res_y, res_polar = _site_arrays(site)
    for row in rows:
        _, _, code, x, y = row
        d2 = (res_x - x) ** 2 + (res_y - y) ** 2
        idx = int(np.argmin(d2))
        d = float(math.sqrt(d2[idx]))
        if d < params.r_min:
            term = params.clash_penalty
        elif d <= params.r_max:
            term = vdw(d, params)
            if _IS_POLAR[code - 1] != res_polar[idx]:
                term += params.mismatch_penalty
        else:
            term = 0.0
        yield row, idx, d, term


def interaction_energy(
    c: LigandChromosome,
    site: ActiveSite,
    params: EnergyParams = DEFAULT_PARAMS,
    dy: float = 1.0,
) -> EnergyReport:
    """Sum each placed group's term against its nearest residue.

    Nearest is by Euclidean distance (first residue wins ties).  The
    per-group rule is the window rule documented on
    :class:`EnergyParams`; the clamped total is never below
    ``params.E_floor``.
    """
    rows = _placed_rows(c, site, dy)
    if not rows:
        raise ValueError("chromosome places no groups")
    terms: list[GroupTerm] = []
    total = 0.0
    for (side, pos, code, _, _), idx, d, term in _group_terms(rows, site, params):
        total += term
        terms.append(GroupTerm(side, pos, code, site.residues[idx].name, d, term))
    return EnergyReport(total=max(total, params.E_floor), terms=tuple(terms))


def interaction_total(
    c: LigandChromosome,
    site: ActiveSite,
    params: EnergyParams = DEFAULT_PARAMS,
    dy: float = 1.0,
) -> float:
    """Total of :func:`interaction_energy` without the per-group report.

    Same arithmetic in the same order, so the value is identical; this
    is the engine's hot path.
    """
    rows = _placed_rows(c, site, dy)
    if not rows:
        raise ValueError("chromosome places no groups")
    total = 0.0
    for _, _, _, term in _group_terms(rows, site, params):
        total += term
    return max(total, params.E_floor)


def fitness(E: float, params: EnergyParams = DEFAULT_PARAMS) -> float:
    """Reported fitness F = k/E (selection minimizes E directly)."""
    if E < params.E_floor:
        raise ValueError(f"energy {E} below the clamp {params.E_floor}")
    return params.k / E


# ---------------------------------------------------------------------------
# Problem bundle


class LigandProblem:
    """Adapts ligand design to the engine's problem surface.

    ``mode`` is ``"variable"`` (NUL codes allowed, occupancy bounded by
    the site's axes) or ``"fixed"`` (all 17 slots occupied).  Genomes
    are :class:`LigandChromosome` values; every operator output is
    repaired, so the engine only sees valid chromosomes.
    """

    def __init__(
        self,
        site: ActiveSite,
        mode: str = "variable",
        params: EnergyParams = DEFAULT_PARAMS,
        dy: float = 1.0,
    ):
        if mode not in ("fixed", "variable"):
            raise ValueError(f"mode must be 'fixed' or 'variable', got {mode!r}")
        self.site = site
        self.mode = mode
        self.params = params
        self.dy = dy
        self.right_bounds = length_bounds(site.right_major_axis, RIGHT_TOPOLOGY.slots)
        self.left_bounds = length_bounds(site.left_major_axis, LEFT_TOPOLOGY.slots)
        self.repair = None  # operators repair their own outputs

    def random_genome(self, rng: np.random.Generator) -> LigandChromosome:
        top = 7 if self.mode == "fixed" else 8
        codes = rng.integers(1, top + 1, size=RIGHT_TOPOLOGY.slots + LEFT_TOPOLOGY.slots)
        return correct(
            LigandChromosome.from_array(codes),
            self.mode,
            rng,
            self.right_bounds,
            self.left_bounds,
        )

    def objective(self, c: LigandChromosome) -> float:
        return interaction_total(c, self.site, self.params, self.dy)

    def fitness_of(self, energy: float) -> float:
        return fitness(energy, self.params)

    def mutate(
        self,
        c: LigandChromosome,
        gen: int,
        schedule: MutationSchedule,
        rng: np.random.Generator,
    ) -> LigandChromosome:
        return group_mutation(
            c, gen, schedule, self.mode, rng, self.right_bounds, self.left_bounds
        )

    def crossover(self, a: LigandChromosome, b: LigandChromosome, rng: np.random.Generator):
        """Per-side segment swap, then repair of both children.

        Draw order: right (seg_len, pos1, pos2), left (seg_len, pos1,
        pos2), repair of child 1, repair of child 2.
        """
        sides = []
        for s1, s2 in ((a.right, b.right), (a.left, b.left)):
            n = len(s1)
            seg_len = int(rng.integers(1, n // 2 + 1))
            pos1 = int(rng.integers(0, n - seg_len + 1))
            pos2 = int(rng.integers(0, n - seg_len + 1))
            sides.append(segment_crossover(s1, s2, seg_len, pos1, pos2))
        (r1, r2), (l1, l2) = sides
        child1 = correct(
            LigandChromosome(r1, l1), self.mode, rng, self.right_bounds, self.left_bounds
        )
        child2 = correct(
            LigandChromosome(r2, l2), self.mode, rng, self.right_bounds, self.left_bounds
        )
        return child1, child2
