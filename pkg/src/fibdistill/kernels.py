"""Backend selection for the braid-application kernel.

The compiled extension is used when it was built; setting
``FIBDISTILL_PURE_PYTHON=1`` forces the numpy fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
apply_gate_sequence = _kernels_py.apply_gate_sequence

if not os.environ.get("FIBDISTILL_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None
    else:
        apply_gate_sequence = _compiled.apply_gate_sequence
        BACKEND = "cython"

python_apply_gate_sequence = _kernels_py.apply_gate_sequence

__all__ = ["BACKEND", "apply_gate_sequence", "python_apply_gate_sequence"]
