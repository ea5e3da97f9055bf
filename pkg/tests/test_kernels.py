import os
import subprocess
import sys

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lamina import _kernels_py, kernels

from conftest import ROOT

try:
    from lamina import _kernels as compiled
except ImportError:
    compiled = None

backends = [_kernels_py] + ([compiled] if compiled is not None else [])
labelings = st.lists(st.integers(0, 7), min_size=1, max_size=64).map(lambda xs: np.array(xs, dtype=np.int64))


def canonical(labels):
    first = {}
    return np.array([first.setdefault(x, len(first)) for x in labels.tolist()], dtype=np.int64)


def blocks(labels):
    out = {}
    for i, lab in enumerate(labels.tolist()):
        out.setdefault(lab, []).append(i)
    return sorted(out.values())


def test_backend_is_reported():
    assert kernels.BACKEND in ("cython", "python")


def test_compiled_backend_was_built():
    # the editable install builds the extension; a missing one means the fallback is silently in use
    assert compiled is not None
    assert kernels.BACKEND == "cython"


@pytest.mark.parametrize("impl", backends, ids=lambda m: m.__name__)
@given(first=labelings, second=labelings)
def test_join_matches_graph_components(impl, first, second):
    n = min(len(first), len(second))
    first, second = first[:n], second[:n]
    graph = nx.Graph()
    graph.add_nodes_from(range(n))
    for labels in (first, second):
        for block in blocks(labels):
            nx.add_path(graph, block)
    want = sorted(sorted(c) for c in nx.connected_components(graph))
    got = impl.join_labels(first, second)
    assert blocks(got) == want
    assert np.array_equal(got, canonical(got))


@pytest.mark.parametrize("impl", backends, ids=lambda m: m.__name__)
@given(labels=labelings)
def test_class_links_cycle_through_sorted_members(impl, labels):
    succ, pred = impl.class_links(labels)
    for block in blocks(labels):
        for a, b in zip(block, block[1:] + block[:1]):
            assert succ[a] == b
            assert pred[b] == a


@pytest.mark.parametrize("impl", backends, ids=lambda m: m.__name__)
@given(perm=st.permutations(list(range(12))))
def test_cycle_ids_match_permutation_cycles(impl, perm):
    step = np.array(perm, dtype=np.int64)
    ids = impl.cycle_ids(step)
    for i in range(12):
        assert ids[i] == ids[step[i]]
    assert len(set(ids.tolist())) == sum(1 for _ in _cycles(perm))


def _cycles(perm):
    seen = set()
    for i in range(len(perm)):
        if i in seen:
            continue
        j = i
        while j not in seen:
            seen.add(j)
            j = perm[j]
        yield i


def brute_force_crossing(labels):
    """Two classes interleave as a < b < c < d."""
    seq = labels.tolist()
    n = len(seq)
    for a in range(n):
        for b in range(a + 1, n):
            for c in range(b + 1, n):
                for d in range(c + 1, n):
                    if seq[a] == seq[c] and seq[b] == seq[d] and seq[a] != seq[b]:
                        return True
    return False


@pytest.mark.parametrize("impl", backends, ids=lambda m: m.__name__)
@settings(max_examples=200)
@given(labels=st.lists(st.integers(0, 4), min_size=1, max_size=14).map(lambda xs: np.array(xs, dtype=np.int64)))
def test_first_crossing_agrees_with_brute_force(impl, labels):
    assert (impl.first_crossing(labels) >= 0) == brute_force_crossing(labels)


@pytest.mark.parametrize("impl", backends, ids=lambda m: m.__name__)
@given(edges=st.lists(st.tuples(st.integers(0, 19), st.integers(0, 19)), max_size=40))
def test_count_components_matches_networkx(impl, edges):
    graph = nx.Graph()
    graph.add_nodes_from(range(20))
    graph.add_edges_from(edges)
    left = np.array([u for u, _ in edges], dtype=np.int64)
    right = np.array([v for _, v in edges], dtype=np.int64)
    assert impl.count_components(20, left, right) == nx.number_connected_components(graph)


@pytest.mark.skipif(compiled is None, reason="compiled kernels not built")
@given(first=labelings, second=labelings)
def test_backends_agree(first, second):
    n = min(len(first), len(second))
    first, second = first[:n], second[:n]
    assert np.array_equal(compiled.join_labels(first, second), _kernels_py.join_labels(first, second))
    assert np.array_equal(compiled.first_crossing(first), _kernels_py.first_crossing(first))
    for x, y in zip(compiled.class_links(first), _kernels_py.class_links(first)):
        assert np.array_equal(x, y)


@pytest.mark.skipif(compiled is None, reason="compiled kernels not built")
def test_backends_agree_on_a_real_tower(g_tower):
    below = g_tower.gaps("black", 3)
    here = g_tower.angles(4)
    args = (len(here), here.embed[below.arcs], *g_tower.lift_tables, g_tower.base_successors["black"])
    assert np.array_equal(compiled.pullback_labels(*args), _kernels_py.pullback_labels(*args))


def test_fallback_is_selected_by_environment():
    env = dict(os.environ, LAMINA_PURE_PYTHON="1")
    code = (
        "from lamina import kernels\n"
        "from lamina.cli import build_report\n"
        "from lamina.lamination import Tower\n"
        "from lamina.portrait import load_portrait_pair\n"
        "lines, ok = build_report(Tower(load_portrait_pair('portraits/r2.portrait')), 3)\n"
        "print(kernels.BACKEND, ok)\n"
    )
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, cwd=ROOT)
    assert out.stdout.split() == ["python", "True"], out.stderr
