"""Pure-Python versions of the hot loops.

These mirror ``_kernels.pyx`` line for line and are used when the compiled
extension is unavailable.  Inputs are int64 numpy arrays; outputs likewise.
"""
import numpy as np


def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def canonical_labels(parent):
    """Number the roots of a union-find forest by first appearance."""
    n = len(parent)
    labels = [-1] * n
    root_label = {}
    for i in range(n):
        r = _find(parent, i)
        lab = root_label.get(r)
        if lab is None:
            lab = root_label[r] = len(root_label)
        labels[i] = lab
    return np.array(labels, dtype=np.int64)


def pullback_labels(size, gap_starts, start_type, start_off, end_type, end_off, succ1):
    """Union every lifted succeeding pair of the base relation inside every gap.

    ``gap_starts[g, j]`` is the index of the first angle of the type-j arc of
    gap g.  A base angle q lifts to ``gap_starts[g, start_type[q]] + start_off[q]``
    when it opens a succeeding pair and to the ``end_*`` variant when it
    closes one.
    """
    parent = list(range(size))
    starts = gap_starts.tolist()
    st, so = start_type.tolist(), start_off.tolist()
    et, eo = end_type.tolist(), end_off.tolist()
    nxt = succ1.tolist()
    base = len(nxt)
    for row in starts:
        for q in range(base):
            r = nxt[q]
            u = (row[st[q]] + so[q]) % size
            v = (row[et[r]] + eo[r]) % size
            ru, rv = _find(parent, u), _find(parent, v)
            if ru != rv:
                if ru < rv:
                    parent[rv] = ru
                else:
                    parent[ru] = rv
    return canonical_labels(parent)


def join_labels(first, second):
    """Labels of the finest partition coarser than both labelings."""
    n = len(first)
    parent = list(range(n))
    for labels in (first.tolist(), second.tolist()):
        seen = {}
        for i, lab in enumerate(labels):
            j = seen.setdefault(lab, i)
            if j != i:
                ri, rj = _find(parent, i), _find(parent, j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    return canonical_labels(parent)


def class_links(labels):
    """Counterclockwise successor and predecessor of each point in its class."""
    labs = labels.tolist()
    n = len(labs)
    succ = [0] * n
    pred = [0] * n
    first = {}
    last = {}
    for i, lab in enumerate(labs):
        if lab in last:
            j = last[lab]
            succ[j] = i
            pred[i] = j
        else:
            first[lab] = i
        last[lab] = i
    for lab, j in last.items():
        i = first[lab]
        succ[j] = i
        pred[i] = j
    return np.array(succ, dtype=np.int64), np.array(pred, dtype=np.int64)


def cycle_ids(step):
    """Cycle id of every element of a permutation, numbered by least element."""
    nxt = step.tolist()
    n = len(nxt)
    ids = [-1] * n
    count = 0
    for i in range(n):
        if ids[i] >= 0:
            continue
        j = i
        while ids[j] < 0:
            ids[j] = count
            j = nxt[j]
        count += 1
    return np.array(ids, dtype=np.int64)


def first_crossing(labels):
    """Index where a stack sweep detects two interleaved classes, or -1."""
    labs = labels.tolist()
    remaining = {}
    for lab in labs:
        remaining[lab] = remaining.get(lab, 0) + 1
    opened = set()
    stack = []
    for i, lab in enumerate(labs):
        if lab not in opened:
            opened.add(lab)
            remaining[lab] -= 1
            if remaining[lab]:
                stack.append(lab)
            continue
        if not stack or stack[-1] != lab:
            return i
        remaining[lab] -= 1
        if not remaining[lab]:
            stack.pop()
    return -1


def count_components(size, left, right):
    """Number of connected components of a graph given as an edge list."""
    parent = list(range(size))
    count = size
    for u, v in zip(left.tolist(), right.tolist()):
        ru, rv = _find(parent, u), _find(parent, v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
            count -= 1
    return count
