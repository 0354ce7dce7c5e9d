"""Pure-Python (numpy) implementation of the gate-sequence kernel."""

import numpy as np


def apply_gate_sequence(src1, c1, src2, c2, gates, psi):
    """Apply stacked two-term gather gates to the columns of ``psi``.

    Gate ``g`` maps ``out[j] = c1[g, j] * psi[src1[g, j]] + c2[g, j] * psi[src2[g, j]]``.
    ``gates`` lists gate ids in application order.
    """
    cur = np.array(psi, dtype=np.complex128, copy=True, order="C")
    for g in gates:
        cur = c1[g][:, None] * cur[src1[g]] + c2[g][:, None] * cur[src2[g]]
    return cur
