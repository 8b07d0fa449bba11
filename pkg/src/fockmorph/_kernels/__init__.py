"""Hot loops for basis indexing, ladder matrices and second-quantized blocks.

The compiled module is used when it imports; set ``FOCKMORPH_PURE_PYTHON=1``
to force the numpy fallback.
"""
import os

from . import _pykernels as python_kernels

compiled_kernels = None
if not os.environ.get("FOCKMORPH_PURE_PYTHON"):
    try:
        from . import _ckernels as compiled_kernels
    except ImportError:  # extension not built
        compiled_kernels = None

_active = compiled_kernels if compiled_kernels is not None else python_kernels

BACKEND = _active.BACKEND
count_table = _active.count_table
rank_state = _active.rank_state
ladder_entries = _active.ladder_entries
permanent = _active.permanent
gamma_block = _active.gamma_block

__all__ = [
    "BACKEND",
    "compiled_kernels",
    "python_kernels",
    "count_table",
    "rank_state",
    "ladder_entries",
    "permanent",
    "gamma_block",
]
