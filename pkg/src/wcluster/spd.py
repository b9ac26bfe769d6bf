"""Spectral operations on symmetric positive-definite (SPD) matrices.

Square roots and inverse square roots are computed through a full symmetric
eigendecomposition. For the matrix sizes this package targets (d up to a few
hundred) the spectral route is exact to solver precision and simpler to
reason about than iterative alternatives.
"""

import numpy as np

from .errors import IllConditionedError, NonFiniteError, NotSpdError

# Relative symmetry tolerance: eigensolver noise scale for float64.
SYM_TOL = 1e-9
# Positive-definiteness floor, relative to the largest eigenvalue.
PD_FLOOR_REL = 1e-12


def sym_part(matrix: np.ndarray) -> np.ndarray:
    """Symmetric part ``(A + A.T) / 2`` of a square matrix.

    Composite products that are symmetric in exact arithmetic drift in
    floating point; re-symmetrizing before any spectral call keeps that
    drift from triggering spurious symmetry failures.
    """
    return 0.5 * (matrix + matrix.T)


def _as_square(matrix, name: str) -> np.ndarray:
    A = np.asarray(matrix, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotSpdError(f"{name} must be a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NonFiniteError(f"{name} contains non-finite entries")
    return A


def _check_symmetric(A: np.ndarray, name: str) -> None:
    scale = max(1.0, float(np.linalg.norm(A)))
    gap = float(np.max(np.abs(A - A.T))) if A.size else 0.0
    if gap > SYM_TOL * scale:
        raise NotSpdError(
            f"{name} is not symmetric: max asymmetry {gap:.3e} exceeds "
            f"{SYM_TOL:.0e} relative tolerance"
        )


def _eigh_pd(matrix, name: str):
    """Eigendecomposition of a validated SPD matrix.

    Returns
    -------
    eigvals : (d,) ndarray, ascending
    eigvecs : (d, d) ndarray, orthonormal columns
    """
    A = _as_square(matrix, name)
    _check_symmetric(A, name)
    eigvals, eigvecs = np.linalg.eigh(sym_part(A))
    if eigvals[0] <= 0.0:
        raise NotSpdError(
            f"{name} is not positive definite: smallest eigenvalue {eigvals[0]:.3e}"
        )
    return eigvals, eigvecs


def check_spd(matrix, name: str = "matrix") -> np.ndarray:
    """Validate that ``matrix`` is symmetric positive definite.

    Parameters
    ----------
    matrix : array_like
        Square matrix to validate.
    name : str
        Label used in error messages.

    Returns
    -------
    ndarray
        The validated matrix, symmetrized, as a float64 array.

    Raises
    ------
    NotSpdError
        If the matrix is not square, not symmetric within tolerance, or has
        a non-positive eigenvalue.
    NonFiniteError
        If any entry is NaN or infinite.
    """
    A = _as_square(matrix, name)
    _check_symmetric(A, name)
    A = sym_part(A)
    eigvals = np.linalg.eigvalsh(A)
    if eigvals[0] <= 0.0:
        raise NotSpdError(
            f"{name} is not positive definite: smallest eigenvalue {eigvals[0]:.3e}"
        )
    return A


def sqrt_spd(matrix) -> np.ndarray:
    """Principal matrix square root of an SPD matrix.

    Computed as ``Q sqrt(L) Q.T`` from the eigendecomposition ``Q L Q.T``.
    The result ``B`` is SPD and satisfies ``B @ B == matrix`` to solver
    precision.

    Raises
    ------
    NotSpdError
        If the input fails the SPD checks.
    """
    eigvals, eigvecs = _eigh_pd(matrix, "matrix")
    root = (eigvecs * np.sqrt(eigvals)) @ eigvecs.T
    return sym_part(root)


def inv_sqrt_spd(matrix) -> np.ndarray:
    """Inverse matrix square root of an SPD matrix.

    Returns ``B`` with ``B @ matrix @ B == identity`` to solver precision.

    Raises
    ------
    NotSpdError
        If the input fails the SPD checks.
    IllConditionedError
        If the smallest eigenvalue is at or below the relative
        positive-definiteness floor.
    """
    eigvals, eigvecs = _eigh_pd(matrix, "matrix")
    if eigvals[0] <= PD_FLOOR_REL * eigvals[-1]:
        raise IllConditionedError(
            f"smallest eigenvalue {eigvals[0]:.3e} is at or below the "
            f"conditioning floor {PD_FLOOR_REL * eigvals[-1]:.3e}"
        )
    inv_root = (eigvecs / np.sqrt(eigvals)) @ eigvecs.T
    return sym_part(inv_root)


def spd_roots(matrix):
    """Square root and inverse square root from a single eigendecomposition.

    Convenience for fixed-point loops that need both ``A**(1/2)`` and
    ``A**(-1/2)`` of the same iterate.
    """
    eigvals, eigvecs = _eigh_pd(matrix, "matrix")
    if eigvals[0] <= PD_FLOOR_REL * eigvals[-1]:
        raise IllConditionedError(
            f"smallest eigenvalue {eigvals[0]:.3e} is at or below the "
            f"conditioning floor {PD_FLOOR_REL * eigvals[-1]:.3e}"
        )
    sq = np.sqrt(eigvals)
    return sym_part((eigvecs * sq) @ eigvecs.T), sym_part((eigvecs / sq) @ eigvecs.T)


def ensure_spd(matrix, jitter: float = 1e-8) -> np.ndarray:
    """Symmetrize a matrix and repair it to SPD if needed.

    The input is symmetrized as ``(A + A.T) / 2``. If its smallest
    eigenvalue clears the relative positive-definiteness floor the matrix is
    returned unchanged; otherwise ``(jitter + |lambda_min|) * I`` is added,
    which makes the result strictly positive definite.

    Parameters
    ----------
    matrix : array_like
        Square matrix, e.g. a sample covariance that may be singular.
    jitter : float
        Positive ridge added on repair.

    Raises
    ------
    NonFiniteError
        If any entry is NaN or infinite.
    """
    if jitter <= 0.0:
        raise ValueError(f"jitter must be positive, got {jitter}")
    A = np.asarray(matrix, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotSpdError(f"matrix must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NonFiniteError("matrix contains non-finite entries")
    A = sym_part(A)
    eigvals = np.linalg.eigvalsh(A)
    floor = PD_FLOOR_REL * max(float(eigvals[-1]), 0.0)
    if eigvals[0] > floor:
        return A
    return A + (jitter + abs(float(eigvals[0]))) * np.eye(A.shape[0])
