# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops; see ``_kernels_py`` for the reference."""
import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64


def _width(labels):
    """Table size needed to index by label; labels need not be below the length."""
    return int(labels.max()) + 1 if len(labels) else 0


cdef inline i64 _find(i64[::1] parent, i64 x) noexcept nogil:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


cdef inline void _unite(i64[::1] parent, i64 a, i64 b) noexcept nogil:
    cdef i64 ra = _find(parent, a)
    cdef i64 rb = _find(parent, b)
    if ra < rb:
        parent[rb] = ra
    elif rb < ra:
        parent[ra] = rb


def canonical_labels(parent_in):
    cdef i64[::1] parent = np.ascontiguousarray(parent_in, dtype=np.int64).copy()
    cdef Py_ssize_t n = parent.shape[0]
    cdef i64[::1] root_label = np.full(n, -1, dtype=np.int64)
    out = np.empty(n, dtype=np.int64)
    cdef i64[::1] labels = out
    cdef i64 count = 0, r
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            r = _find(parent, i)
            if root_label[r] < 0:
                root_label[r] = count
                count += 1
            labels[i] = root_label[r]
    return out


def pullback_labels(i64 size, gap_starts, start_type, start_off, end_type, end_off, succ1):
    cdef i64[:, ::1] starts = np.ascontiguousarray(gap_starts, dtype=np.int64)
    cdef i64[::1] st = np.ascontiguousarray(start_type, dtype=np.int64)
    cdef i64[::1] so = np.ascontiguousarray(start_off, dtype=np.int64)
    cdef i64[::1] et = np.ascontiguousarray(end_type, dtype=np.int64)
    cdef i64[::1] eo = np.ascontiguousarray(end_off, dtype=np.int64)
    cdef i64[::1] nxt = np.ascontiguousarray(succ1, dtype=np.int64)
    parent_arr = np.arange(size, dtype=np.int64)
    cdef i64[::1] parent = parent_arr
    cdef Py_ssize_t g, q, gaps = starts.shape[0], base = nxt.shape[0]
    cdef i64 r, u, v
    with nogil:
        for g in range(gaps):
            for q in range(base):
                r = nxt[q]
                u = (starts[g, st[q]] + so[q]) % size
                v = (starts[g, et[r]] + eo[r]) % size
                _unite(parent, u, v)
    return canonical_labels(parent_arr)


def join_labels(first, second):
    cdef i64[::1] a = np.ascontiguousarray(first, dtype=np.int64)
    cdef i64[::1] b = np.ascontiguousarray(second, dtype=np.int64)
    cdef Py_ssize_t n = a.shape[0], i
    parent_arr = np.arange(n, dtype=np.int64)
    cdef i64[::1] parent = parent_arr
    cdef i64[::1] seen_a = np.full(_width(np.asarray(a)), -1, dtype=np.int64)
    cdef i64[::1] seen_b = np.full(_width(np.asarray(b)), -1, dtype=np.int64)
    with nogil:
        for i in range(n):
            if seen_a[a[i]] < 0:
                seen_a[a[i]] = i
            else:
                _unite(parent, i, seen_a[a[i]])
            if seen_b[b[i]] < 0:
                seen_b[b[i]] = i
            else:
                _unite(parent, i, seen_b[b[i]])
    return canonical_labels(parent_arr)


def class_links(labels_in):
    cdef i64[::1] labels = np.ascontiguousarray(labels_in, dtype=np.int64)
    cdef Py_ssize_t n = labels.shape[0], i
    succ_arr = np.empty(n, dtype=np.int64)
    pred_arr = np.empty(n, dtype=np.int64)
    cdef i64[::1] succ = succ_arr
    cdef i64[::1] pred = pred_arr
    cdef Py_ssize_t width = _width(np.asarray(labels))
    cdef i64[::1] first = np.full(width, -1, dtype=np.int64)
    cdef i64[::1] last = np.full(width, -1, dtype=np.int64)
    cdef i64 lab, j
    with nogil:
        for i in range(n):
            lab = labels[i]
            j = last[lab]
            if j >= 0:
                succ[j] = i
                pred[i] = j
            else:
                first[lab] = i
            last[lab] = i
        for lab in range(width):
            j = last[lab]
            if j >= 0:
                succ[j] = first[lab]
                pred[first[lab]] = j
    return succ_arr, pred_arr


def cycle_ids(step_in):
    cdef i64[::1] step = np.ascontiguousarray(step_in, dtype=np.int64)
    cdef Py_ssize_t n = step.shape[0], i
    ids_arr = np.full(n, -1, dtype=np.int64)
    cdef i64[::1] ids = ids_arr
    cdef i64 count = 0, j
    with nogil:
        for i in range(n):
            if ids[i] >= 0:
                continue
            j = i
            while ids[j] < 0:
                ids[j] = count
                j = step[j]
            count += 1
    return ids_arr


def first_crossing(labels_in):
    cdef i64[::1] labels = np.ascontiguousarray(labels_in, dtype=np.int64)
    cdef Py_ssize_t n = labels.shape[0], i
    cdef Py_ssize_t width = _width(np.asarray(labels))
    cdef i64[::1] remaining = np.zeros(width, dtype=np.int64)
    cdef i64[::1] opened = np.zeros(width, dtype=np.int64)
    cdef i64[::1] stack = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t top = 0
    cdef i64 lab, found = -1
    with nogil:
        for i in range(n):
            remaining[labels[i]] += 1
        for i in range(n):
            lab = labels[i]
            if not opened[lab]:
                opened[lab] = 1
                remaining[lab] -= 1
                if remaining[lab]:
                    stack[top] = lab
                    top += 1
                continue
            if top == 0 or stack[top - 1] != lab:
                found = i
                break
            remaining[lab] -= 1
            if not remaining[lab]:
                top -= 1
    return found


def count_components(i64 size, left, right):
    cdef i64[::1] a = np.ascontiguousarray(left, dtype=np.int64)
    cdef i64[::1] b = np.ascontiguousarray(right, dtype=np.int64)
    cdef i64[::1] parent = np.arange(size, dtype=np.int64)
    cdef i64 count = size, ra, rb
    cdef Py_ssize_t i
    with nogil:
        for i in range(a.shape[0]):
            ra = _find(parent, a[i])
            rb = _find(parent, b[i])
            if ra != rb:
                if ra < rb:
                    parent[rb] = ra
                else:
                    parent[ra] = rb
                count -= 1
    return count
