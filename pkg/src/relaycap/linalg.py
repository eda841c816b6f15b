"""Complex dense linear-algebra kernel.

Thin, contract-checked wrappers around LAPACK (via numpy/scipy) for the
small dense complex matrices this simulator works with: QR with a unique
sign convention, the left pseudo-inverse of a wide matrix, and Hermitian
eigendecomposition.  All operations are pure; matrices up to ~16x16.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

#: Condition-number threshold above which a Gram matrix is treated as
#: numerically singular.
COND_LIMIT = 1e12


class SingularMatrixError(np.linalg.LinAlgError):
    """A matrix that must be inverted is singular or catastrophically
    ill-conditioned (condition estimate above COND_LIMIT)."""


def _as_complex(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def hermitian(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose, batched over leading axes."""
    return np.conj(np.swapaxes(a, -1, -2))


def qr_decompose(a):
    """QR factorization of a square matrix with real nonnegative diag(R).

    Householder QR followed by a per-column phase normalization so that the
    diagonal of R is real and nonnegative, which makes the factorization
    unique for full-rank input.  Rank-deficient input succeeds with zero
    diagonal entries in R.  Batched over leading axes.

    Returns (Q, R) with a = Q @ R, Q unitary, R upper triangular.
    """
    a = _as_complex(a)
    if a.shape[-1] != a.shape[-2]:
        raise ValueError(f"qr_decompose needs a square matrix, got {a.shape}")
    q, r = np.linalg.qr(a)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    mag = np.abs(d)
    phase = np.where(mag > 0, d / np.where(mag > 0, mag, 1.0), 1.0)
    q = q * phase[..., None, :]
    r = r * np.conj(phase)[..., :, None]
    # scrub the rounding-level imaginary residue left on the diagonal
    m = a.shape[-1]
    idx = np.arange(m)
    r[..., idx, idx] = r[..., idx, idx].real
    return q, r


def pseudo_inverse(a) -> np.ndarray:
    """Left pseudo-inverse A^H (A A^H)^-1 of a wide matrix (M x N, M <= N).

    Solved through a Cholesky factorization of the Gram matrix rather than
    an SVD.  Raises SingularMatrixError when the Gram matrix is singular or
    its condition estimate exceeds COND_LIMIT.
    """
    a = _as_complex(a)
    if a.ndim != 2:
        raise ValueError("pseudo_inverse expects a single 2-D matrix")
    m, n = a.shape
    if m > n:
        raise ValueError(f"pseudo_inverse needs M <= N, got {a.shape}")
    gram = a @ hermitian(a)
    if np.linalg.cond(gram) > COND_LIMIT:
        raise SingularMatrixError(
            "Gram matrix condition estimate exceeds the singularity threshold"
        )
    try:
        factor = scipy.linalg.cho_factor(gram)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - guarded above
        raise SingularMatrixError(str(exc)) from exc
    return hermitian(scipy.linalg.cho_solve(factor, a))


def hermitian_eig(a):
    """Eigendecomposition of a Hermitian matrix.

    Returns (U, lambdas) with a = U diag(lambdas) U^H, eigenvalues real and
    sorted in descending order.  Raises ValueError when the input is not
    Hermitian to within 1e-10 relative Frobenius error.
    """
    a = _as_complex(a)
    if a.shape[-1] != a.shape[-2]:
        raise ValueError(f"hermitian_eig needs a square matrix, got {a.shape}")
    scale = np.linalg.norm(a)
    if scale > 0 and np.linalg.norm(a - hermitian(a)) > 1e-10 * scale:
        raise ValueError("input matrix is not Hermitian")
    lambdas, u = np.linalg.eigh(a)
    return u[..., ::-1], lambdas[..., ::-1]


def back_substitute(r, v):
    """Solve the upper-triangular system R x = v."""
    return scipy.linalg.solve_triangular(np.asarray(r, dtype=np.complex128), v)
