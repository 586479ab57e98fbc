"""Finite-difference reference derivatives used by several test modules.

These are built from plain evaluations only, so comparing them against
the forward-mode jets is an independent check of the derivative code.
"""

import numpy as np

from gchs.fields import eval_jet


def fd_first(f, Q, P, h=1e-5):
    """Centered first differences along every chart direction, (2n, m)."""
    n, m = Q.shape
    out = np.empty((2 * n, m), dtype=complex)
    for a in range(2 * n):
        dQ = np.zeros_like(Q)
        dP = np.zeros_like(P)
        (dQ if a < n else dP)[a % n] = h
        up = eval_jet(f, Q + dQ, P + dP, order=0).val
        dn = eval_jet(f, Q - dQ, P - dP, order=0).val
        out[a] = (up - dn) / (2 * h)
    return out


def fd_second(f, Q, P, h=1e-4):
    """Centered second differences for the full chart Hessian, (2n, 2n, m)."""
    n, m = Q.shape
    out = np.empty((2 * n, 2 * n, m), dtype=complex)

    def shifted(sa, a, sb, b):
        dQ = np.zeros_like(Q)
        dP = np.zeros_like(P)
        (dQ if a < n else dP)[a % n] += sa * h
        (dQ if b < n else dP)[b % n] += sb * h
        return eval_jet(f, Q + dQ, P + dP, order=0).val

    for a in range(2 * n):
        for b in range(2 * n):
            out[a, b] = (shifted(+1, a, +1, b) - shifted(+1, a, -1, b)
                         - shifted(-1, a, +1, b) + shifted(-1, a, -1, b)
                         ) / (4 * h * h)
    return out
