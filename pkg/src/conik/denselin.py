"""Dense symmetric linear algebra used by the barrier and scaling code."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

DEFAULT_TOL = 1e-9
SYM_TOL = 1e-12


class NotPositiveDefinite(np.linalg.LinAlgError):
    """Raised when a factorization needs a positive definite matrix."""

    def __init__(self, pivot):
        super().__init__(f"matrix is not positive definite (pivot {pivot})")
        self.pivot = pivot


@dataclass(frozen=True)
class Factor:
    """Outcome of a Cholesky attempt; ``L`` is None on failure."""

    L: np.ndarray = None
    ok: bool = True
    pivot: int = -1


def _as_sym(M, name="M"):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    scale = max(1.0, np.max(np.abs(M))) if M.size else 1.0
    if np.max(np.abs(M - M.T), initial=0.0) > SYM_TOL * scale:
        raise ValueError(f"{name} is not symmetric")
    return M


def symmetrize(M):
    return 0.5 * (M + M.T)


def chol_factor(M):
    """Lower Cholesky factor of a symmetric matrix.

    Returns a :class:`Factor`; when ``M`` is not positive definite the
    factor carries ``ok=False`` and the (0-based) failing pivot.
    """
    M = _as_sym(M)
    L, info = scipy.linalg.lapack.dpotrf(M, lower=1, clean=1)
    if info > 0:
        return Factor(None, False, int(info) - 1)
    if info < 0:
        raise ValueError("invalid argument to dpotrf")
    return Factor(L, True, -1)


def chol_or_raise(M):
    f = chol_factor(M)
    if not f.ok:
        raise NotPositiveDefinite(f.pivot)
    return f.L


def geneig_max(A, B):
    """Largest generalized eigenpair of ``A q = lam B q``.

    ``B`` is whitened with its Cholesky factor, so the problem becomes an
    ordinary symmetric eigenproblem.  The returned eigenvector has unit
    Euclidean norm.
    """
    A = _as_sym(A, "A")
    B = _as_sym(B, "B")
    if A.shape != B.shape:
        raise ValueError("dimension mismatch")
    L = chol_or_raise(B)
    C = scipy.linalg.solve_triangular(L, A, lower=True)
    C = scipy.linalg.solve_triangular(L, C.T, lower=True)
    w, V = np.linalg.eigh(symmetrize(C))
    q = scipy.linalg.solve_triangular(L.T, V[:, -1], lower=False)
    q /= np.linalg.norm(q)
    return float(w[-1]), q


def geneig_all(A, B):
    """All generalized eigenvalues of the pair (A, B), ascending."""
    L = chol_or_raise(_as_sym(B, "B"))
    C = scipy.linalg.solve_triangular(L, _as_sym(A, "A"), lower=True)
    C = scipy.linalg.solve_triangular(L, C.T, lower=True)
    return np.linalg.eigvalsh(symmetrize(C))


def min_eig_diff(A, B):
    """Smallest eigenvalue of ``B - A``; nonnegative certifies ``A <= B``."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return float(np.linalg.eigvalsh(symmetrize(B - A))[0])


def sym_sqrt(M):
    w, V = np.linalg.eigh(symmetrize(M))
    return (V * np.sqrt(np.maximum(w, 0.0))) @ V.T


def sym_invsqrt(M):
    w, V = np.linalg.eigh(symmetrize(M))
    return (V / np.sqrt(w)) @ V.T


def spd_inv(M):
    L = chol_or_raise(M)
    Linv = scipy.linalg.solve_triangular(L, np.eye(len(M)), lower=True)
    return Linv.T @ Linv


def spd_solve(M, b):
    return scipy.linalg.cho_solve((chol_or_raise(M), True), b)
