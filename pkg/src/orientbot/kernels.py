"""Hot-loop kernels, compiled when available.

The Cython extension ``orientbot._ckernels`` is used if it imports; otherwise
the numpy/pure-Python versions in ``orientbot._pykernels`` are used. Set
``ORIENTBOT_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels

if os.environ.get("ORIENTBOT_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = _impl.BACKEND

im2col = _impl.im2col
col2im = _impl.col2im
channel_window_sum = _impl.channel_window_sum
bfs_distances = _impl.bfs_distances
supercover = _impl.supercover
segment_blocked = _impl.segment_blocked
