"""Hot inner loops: max/min-plus convolutions and the composition DP.

The compiled extension is used when it was built; otherwise the numpy
reference implementation is imported.  Set ``WEIGHTLAB_PURE_PYTHON=1`` to force
the fallback.
"""
import os

from . import _pykernels

if os.environ.get("WEIGHTLAB_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
        BACKEND = "python"

conv_max = _impl.conv_max
conv_min = _impl.conv_min
compose_layers = _impl.compose_layers
pair_excess = _impl.pair_excess
subadditive_violation = _impl.subadditive_violation

__all__ = ["BACKEND", "conv_max", "conv_min", "compose_layers", "pair_excess",
           "subadditive_violation"]
