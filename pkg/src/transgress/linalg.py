"""Batched dense linear algebra helpers."""

from __future__ import annotations

import numpy as np

# Pade(13) coefficients and the theta_13 bound of Higham's scaling and squaring
_PADE13 = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)
_THETA13 = 5.371920351148152


def expm_batched(a: np.ndarray) -> np.ndarray:
    """exp of each matrix in a stack of shape (..., m, m)."""
    a = np.asarray(a, complex)
    shape = a.shape
    m = shape[-1]
    a = a.reshape(-1, m, m)
    norms = np.abs(a).sum(axis=1).max(axis=1)
    s = np.maximum(0, np.ceil(np.log2(np.maximum(norms, 1e-300) / _THETA13))).astype(int)
    out = np.empty_like(a)
    for sv in np.unique(s):
        idx = np.nonzero(s == sv)[0]
        out[idx] = _pade13(a[idx] / 2.0**sv, int(sv))
    return out.reshape(shape)


def _pade13(a: np.ndarray, squarings: int) -> np.ndarray:
    b = _PADE13
    ident = np.broadcast_to(np.eye(a.shape[-1], dtype=complex), a.shape)
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a4 @ a2
    u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
    v = a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident
    r = np.linalg.solve(v - u, v + u)
    for _ in range(squarings):
        r = r @ r
    return r
