"""Pick the compiled kernels when available, else the pure-Python ones.

Set ``LAMINA_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

if os.environ.get("LAMINA_PURE_PYTHON"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

pullback_labels = _impl.pullback_labels
join_labels = _impl.join_labels
class_links = _impl.class_links
cycle_ids = _impl.cycle_ids
first_crossing = _impl.first_crossing
canonical_labels = _impl.canonical_labels
count_components = _impl.count_components
