"""Kernel backend selection.

The compiled module is used when it was built; ``UCQENUM_PURE=1`` forces the
pure-Python kernels.
"""
import os

if os.environ.get("UCQENUM_PURE"):
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "python"

project = _impl.project
key_set = _impl.key_set
semijoin = _impl.semijoin
build_index = _impl.build_index
intersect = _impl.intersect
