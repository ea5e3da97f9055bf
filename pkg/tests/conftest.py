from pathlib import Path

import numpy as np
import pytest

from lamina import kernels
from lamina.lamination import LevelRelation, Tower
from lamina.portrait import load_portrait_pair, make_pair

ROOT = Path(__file__).resolve().parent.parent
PORTRAITS = ROOT / "portraits"
PAIR_NAMES = ("g", "r4", "r2")

# white and black level-1 classes of the degree-4 pair g
G_WHITE = [["1/8", "5/8"], ["3/16", "7/16"], ["11/16", "15/16"]]
G_BLACK = [["1/16", "5/16"], ["3/8", "7/8"], ["9/16", "13/16"]]

# one broken variant of g per axiom, each breaking only that axiom
MUTANTS = {
    "a": (G_WHITE[1:] + [["1/8", "9/16"]], G_BLACK),
    "b": (G_WHITE[:2], G_BLACK),
    "c": ([["1/8", "5/8"], ["7/16", "11/16"], ["3/16", "15/16"]], G_BLACK),
    "d": ([["0", "1/4", "1/2"], ["11/16", "15/16"]], G_BLACK),
    "e": (G_WHITE, G_WHITE),
}

# acceptance criterion number -> (passed, note), printed at the end of the run
ACCEPTANCE: dict = {}


def load(name):
    return load_portrait_pair(PORTRAITS / f"{name}.portrait")


def synthetic_fatou():
    """Degree 2, both colours {0, 1/2}: a periodic critical class."""
    return make_pair(2, [["0", "1/2"]], [["0", "1/2"]])


def mutant(axiom):
    white, black = MUTANTS[axiom]
    return make_pair(4, white, black)


def forge_merge(tower, color, n, i, j):
    """Overwrite the cached level-n relation with classes of i and j merged."""
    rel = tower.relation(color, n)
    labels = rel.labels.copy()
    labels[labels == labels[j]] = labels[i]
    first = {}
    parent = np.array([first.setdefault(lab, x) for x, lab in enumerate(labels.tolist())], dtype=np.int64)
    labels = kernels.canonical_labels(parent)
    succ, pred = kernels.class_links(labels)
    tower._relations[(color, n)] = LevelRelation(n, color, labels, succ, pred)
    return tower


@pytest.fixture(scope="session")
def pairs():
    return {name: load(name) for name in PAIR_NAMES}


@pytest.fixture(scope="session")
def towers(pairs):
    return {name: Tower(pair) for name, pair in pairs.items()}


@pytest.fixture(scope="session")
def g_tower(towers):
    return towers["g"]


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, note = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {note}")
