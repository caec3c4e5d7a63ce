"""Batched matrix exponential by scaling and squaring with a [13/13] Pade approximant.

Works on stacks ``(..., n, n)`` of real or complex matrices; each matrix gets
its own scaling exponent from its 1-norm.
"""

from __future__ import annotations

import numpy as np

# [13/13] Pade numerator coefficients; the denominator uses the same with alternating signs
_B13 = (
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0, 10559470521600.0, 670442572800.0, 33522128640.0,
    1323241920.0, 40840800.0, 960960.0, 16380.0, 182.0, 1.0,
)
THETA13 = 5.371920351148152


def _pade13(A: np.ndarray) -> np.ndarray:
    b = _B13
    eye = np.broadcast_to(np.eye(A.shape[-1], dtype=A.dtype), A.shape)
    A2 = A @ A
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
             + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * eye)
    V = A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * eye
    return np.linalg.solve(V - U, V + U)


def expm(A: np.ndarray) -> np.ndarray:
    """``exp(A)`` for a single matrix or a stack of matrices."""
    A = np.asarray(A)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2]:
        raise ValueError("expm expects square matrices")
    if not np.issubdtype(A.dtype, np.inexact):
        A = A.astype(float)
    single = A.ndim == 2
    stack = A.reshape(-1, A.shape[-1], A.shape[-1])
    norm1 = np.max(np.sum(np.abs(stack), axis=-2), axis=-1)
    with np.errstate(divide="ignore"):
        s = np.where(norm1 > THETA13, np.ceil(np.log2(norm1 / THETA13)), 0.0).astype(int)
    scaled = stack / (2.0 ** s)[:, None, None]
    R = _pade13(scaled)
    for k in range(int(s.max(initial=0))):
        idx = np.nonzero(s > k)[0]
        R[idx] = R[idx] @ R[idx]
    return R[0] if single else R.reshape(A.shape)
