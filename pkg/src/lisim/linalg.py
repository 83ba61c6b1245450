"""Dense complex-matrix primitives with fixed ordering and phase conventions.

Every decomposition here is deterministic for identical input bits:
eigenvalues and singular values are returned in descending order, ties keep
the underlying factorization order, and each eigen/singular vector is scaled
so its first nonzero component is real and positive. All other modules rely
on these conventions for reproducible results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_RTOL = 1e-10


@dataclass(frozen=True)
class HermitianEigen:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class SingularDecomp:
    """SVD A = U diag(s) V^H with s descending and orthonormal U, V columns."""

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray


def _require_hermitian(a: np.ndarray, rtol: float = HERMITIAN_RTOL) -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    scale = np.linalg.norm(a)
    if np.linalg.norm(a - a.conj().T) > rtol * max(scale, 0.0) + 1e-300:
        raise ValueError("matrix is not Hermitian within tolerance")


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Scale each column so its first nonzero component is real positive."""
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        mags = np.abs(col)
        peak = mags.max()
        if peak == 0.0:
            continue
        idx = int(np.argmax(mags > 1e-8 * peak))
        pivot = col[idx]
        out[:, j] = col * (pivot.conjugate() / abs(pivot))
    return out


def eigh(a: np.ndarray) -> HermitianEigen:
    """Hermitian eigendecomposition with descending eigenvalues.

    Ties keep the stable order of the underlying factorization; column
    phases follow the first-nonzero-real-positive convention.
    """
    a = np.asarray(a, dtype=np.complex128)
    _require_hermitian(a)
    w, v = np.linalg.eigh(a)
    order = np.argsort(-w, kind="stable")
    return HermitianEigen(w[order], _fix_phases(v[:, order]))


def svd(a: np.ndarray, full_matrices: bool = False) -> SingularDecomp:
    """Singular value decomposition with the same ordering/phase contract.

    Returns right singular vectors as columns of ``v`` (A = U diag(s) V^H).
    With ``full_matrices`` the orthonormal complements beyond the rank are
    included; their phase is fixed as well so output is deterministic.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {a.shape}")
    u, s, vh = np.linalg.svd(a, full_matrices=full_matrices)
    r = s.shape[0]
    phases = np.ones(u.shape[1], dtype=np.complex128)
    for j in range(u.shape[1]):
        col = u[:, j]
        mags = np.abs(col)
        peak = mags.max()
        if peak == 0.0:
            continue
        idx = int(np.argmax(mags > 1e-8 * peak))
        phases[j] = col[idx] / abs(col[idx])
    u = u * phases.conj()[None, :]
    # compensate on the V side so U diag(s) V^H is unchanged
    vh = vh.copy()
    vh[:r] *= phases[:r, None]
    if vh.shape[0] > r:
        vh[r:] = _fix_phases(vh[r:].conj().T).conj().T
    return SingularDecomp(u, s, vh.conj().T)


def inv_sqrt_psd(z: np.ndarray, eigen_floor: float | None = None) -> np.ndarray:
    """Whitening factor ``U S^{-1/2}`` of a Hermitian PSD matrix Z = U S U^H.

    The returned T satisfies T^H Z T = I (up to flooring). Eigenvalues below
    ``eigen_floor`` are clamped before inversion; the default floor is
    1e-12 times the largest eigenvalue (or 1 if all eigenvalues are zero).
    """
    e = eigh(z)
    lam_max = float(e.eigenvalues[0]) if e.eigenvalues.size else 0.0
    neg_tol = 1e-10 * max(1.0, lam_max)
    if e.eigenvalues.size and float(e.eigenvalues[-1]) < -neg_tol:
        raise ValueError("matrix has a negative eigenvalue, not PSD")
    if eigen_floor is None:
        eigen_floor = 1e-12 * (lam_max if lam_max > 0.0 else 1.0)
    s = np.maximum(e.eigenvalues, eigen_floor)
    return e.eigenvectors * (s**-0.5)[None, :]


def logdet_hpd(a: np.ndarray) -> float:
    """Natural-log determinant of a Hermitian positive-definite matrix.

    Computed via Cholesky; raises ValueError when the factorization fails
    (a pivot is not positive). Callers convert to base 2 as needed.
    """
    a = np.asarray(a, dtype=np.complex128)
    _require_hermitian(a)
    try:
        chol = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise ValueError("matrix is not positive definite") from exc
    return float(2.0 * np.sum(np.log(np.real(np.diag(chol)))))
