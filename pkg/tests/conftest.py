"""Shared fixtures and deterministic RNG stand-ins for the test suite."""

import math

import numpy as np
import pytest

from nbga.ligand import ActiveSite, Residue
from nbga.tsp import TspInstance


def hexagon_coords(radius: float = 1.0) -> list[tuple[float, float]]:
    """Six points evenly spaced on a circle.

    With integer rounding the adjacent side is ``radius`` (to the
    nearest unit), so the perimeter tour is provably optimal: it is the
    only Hamiltonian cycle using six minimum-weight edges.
    """
    return [
        (radius * math.cos(k * math.pi / 3), radius * math.sin(k * math.pi / 3))
        for k in range(6)
    ]


def hexagon_instance(radius: float = 1.0, round_distances: bool = True) -> TspInstance:
    return TspInstance.from_coords(
        "hexagon", hexagon_coords(radius), round_distances=round_distances
    )


def hexagon_tsplib_text(radius: float = 10.0) -> str:
    lines = [
        "NAME: hexagon",
        "TYPE: TSP",
        "DIMENSION: 6",
        "EDGE_WEIGHT_TYPE: EUC_2D",
        "NODE_COORD_SECTION",
    ]
    for i, (x, y) in enumerate(hexagon_coords(radius), start=1):
        lines.append(f"{i} {x:.9f} {y:.9f}")
    lines.append("EOF")
    return "\n".join(lines) + "\n"


@pytest.fixture
def hexagon() -> TspInstance:
    return hexagon_instance()


@pytest.fixture
def hexagon_file(tmp_path):
    path = tmp_path / "hexagon.tsp"
    path.write_text(hexagon_tsplib_text())
    return path


def two_shelf_site() -> ActiveSite:
    """Minimal hand-built pocket: one polar and one non-polar residue
    per side, far enough up/down that nothing clashes."""
    return ActiveSite(
        right_anchor=(0.0, 0.0),
        left_anchor=(-1.0, 0.0),
        right_major_axis=18.9,
        left_major_axis=5.4,
        residues=(
            Residue("R_P", 2.0, 3.0, True),
            Residue("R_H", 5.0, -3.0, False),
            Residue("L_P", -3.0, 3.0, True),
            Residue("L_H", -5.0, -3.0, False),
        ),
    )


@pytest.fixture
def small_site() -> ActiveSite:
    return two_shelf_site()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL/SKIP line per acceptance criterion at the end of
    the run, regardless of verbosity."""
    outcomes = {}
    for status in ("passed", "failed", "error", "skipped"):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance" in nodeid and "::" in nodeid:
                outcomes.setdefault(nodeid.split("::")[-1], status.upper())
    if outcomes:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name in sorted(outcomes):
            terminalreporter.write_line(f"{outcomes[name]:7s} {name}")


class PinRng:
    """Generator stand-in whose every integer draw is 1 (and whose
    ``random()`` is 1.0, so no probability gate ever fires)."""

    def integers(self, *args, **kwargs):
        return 1

    def random(self):
        return 1.0


class NoDrawRng:
    """Generator stand-in that fails the test if any draw happens."""

    def _refuse(self, *args, **kwargs):
        raise AssertionError("unexpected RNG draw")

    integers = _refuse
    random = _refuse
    choice = _refuse
    permutation = _refuse


class ScriptedRng:
    """Generator stand-in replaying queued results per method.

    Each queue entry is consumed in call order; running a method with
    an empty queue fails the test, which pins the exact draw sequence
    an operator makes.
    """

    def __init__(self, integers=(), random=(), choice=(), permutation=()):
        self._queues = {
            "integers": list(integers),
            "random": list(random),
            "choice": list(choice),
            "permutation": list(permutation),
        }

    def _pop(self, name):
        queue = self._queues[name]
        if not queue:
            raise AssertionError(f"unexpected extra {name}() draw")
        return queue.pop(0)

    def integers(self, *args, **kwargs):
        return self._pop("integers")

    def random(self):
        return self._pop("random")

    def choice(self, *args, **kwargs):
        return np.asarray(self._pop("choice"))

    def permutation(self, *args, **kwargs):
        return np.asarray(self._pop("permutation"))

    def assert_exhausted(self):
        leftovers = {k: v for k, v in self._queues.items() if v}
        assert not leftovers, f"unused scripted draws: {leftovers}"
