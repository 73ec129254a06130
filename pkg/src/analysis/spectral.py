"""Largest-eigenvalue helpers shared by the CN check and the norm estimators.

Small symmetric problems are solved exactly with LAPACK. Larger or
matrix-free problems go through ARPACK's Lanczos iteration, which is a
Krylov acceleration of power iteration: each returned Ritz value is a
Rayleigh quotient and therefore never exceeds the true top eigenvalue.
Sweeps over a family of nearby operators use LOBPCG instead, which takes
warm-start vectors and still returns a Rayleigh quotient when it stops early.
"""

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh, lobpcg

from src.common.errors import ConvergenceError

logger = logging.getLogger(__name__)

DENSE_LIMIT = 64


@dataclass
class EigenResult:
    value: float
    vector: Optional[np.ndarray]
    converged: bool


def max_symmetric_eigenpair(matrix: np.ndarray, dense_limit: int = DENSE_LIMIT,
                            tol: float = 1e-10, max_iter: int = 100_000) -> Tuple[float, np.ndarray]:
    """Top eigenpair of a real symmetric matrix.

    Args:
        matrix: Real symmetric array
        dense_limit: Largest dimension solved by a full decomposition
        tol: Relative tolerance for the iterative path
        max_iter: Iteration cap for the iterative path

    Returns:
        (eigenvalue, unit eigenvector)

    Raises:
        ConvergenceError: if the iterative path hits its cap
    """
    n = matrix.shape[0]
    if n <= dense_limit:
        values, vectors = np.linalg.eigh(matrix)
        return float(values[-1]), vectors[:, -1]

    # shift by a Gershgorin bound so the wanted eigenvalue is also the dominant one
    shift = float(np.max(np.sum(np.abs(matrix), axis=1)))
    shifted = matrix + shift * np.eye(n)
    v0 = np.random.default_rng(0).standard_normal(n)
    try:
        values, vectors = eigsh(shifted, k=1, which='LA', tol=tol, maxiter=max_iter, v0=v0)
    except ArpackNoConvergence as e:
        raise ConvergenceError(f"Lanczos did not converge within {max_iter} iterations") from e
    return float(values[0]) - shift, vectors[:, 0]


def top_eigenvalue(apply: Callable[[np.ndarray], np.ndarray], dim: int, dtype=complex,
                   tol: float = 1e-8, max_iter: int = 10_000, seed: int = 0,
                   which: str = 'LA') -> EigenResult:
    """Extreme eigenvalue of a Hermitian operator given only by its action.

    Never raises on non-convergence: the best Ritz value found is returned with
    `converged=False` and a warning is logged.
    """
    if dim <= DENSE_LIMIT:
        columns = [apply(column) for column in np.eye(dim, dtype=dtype)]
        matrix = np.array(columns).T
        matrix = (matrix + matrix.conj().T) / 2
        values, vectors = np.linalg.eigh(matrix)
        pick = -1 if which == 'LA' else 0
        return EigenResult(float(values[pick]), vectors[:, pick], True)

    operator = LinearOperator((dim, dim), matvec=apply, dtype=dtype)
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(dim)
    if np.issubdtype(np.dtype(dtype), np.complexfloating):
        v0 = v0 + 1j * rng.standard_normal(dim)
    v0 = v0.astype(dtype)

    try:
        values, vectors = eigsh(operator, k=1, which=which, tol=tol, maxiter=max_iter, v0=v0)
        return EigenResult(float(values[0]), vectors[:, 0], True)
    except ArpackNoConvergence as e:
        logger.warning(f"Lanczos hit its cap of {max_iter} iterations (dim {dim}); returning best iterate")
        if len(e.eigenvalues):
            pick = np.argmax(e.eigenvalues) if which == 'LA' else np.argmin(e.eigenvalues)
            return EigenResult(float(np.real(e.eigenvalues[pick])), e.eigenvectors[:, pick], False)
        value = float(np.real(np.vdot(v0, apply(v0)) / np.vdot(v0, v0)))
        return EigenResult(value, v0, False)


def refine_top_eigenvalue(apply: Callable[[np.ndarray], np.ndarray], dim: int,
                          guesses: Optional[np.ndarray] = None, dtype=complex, tol: float = 1e-8,
                          max_iter: int = 400, seed: int = 0) -> EigenResult:
    """Top eigenvalue of a Hermitian operator by LOBPCG started from `guesses`.

    `guesses` holds warm-start vectors as columns; a random column is used
    when none survive orthonormalization. The value reported is the Rayleigh
    quotient of the returned vector, so it stays a lower bound of the top
    eigenvalue when the iteration stops at `max_iter`. `tol` is an absolute
    residual tolerance.
    """
    if dim <= DENSE_LIMIT:
        return top_eigenvalue(apply, dim, dtype=dtype, tol=tol, seed=seed)

    columns = np.zeros((dim, 0), dtype=dtype)
    if guesses is not None:
        block = np.asarray(guesses, dtype=dtype).reshape(dim, -1)
        q, r = np.linalg.qr(block)
        diagonal = np.abs(np.diag(r))
        columns = q[:, diagonal > 1e-8 * diagonal.max()] if diagonal.max() > 0 else columns
    if columns.shape[1] == 0:
        rng = np.random.default_rng(seed)
        start = rng.standard_normal(dim)
        if np.issubdtype(np.dtype(dtype), np.complexfloating):
            start = start + 1j * rng.standard_normal(dim)
        columns = (start / np.linalg.norm(start)).astype(dtype).reshape(dim, 1)

    operator = LinearOperator((dim, dim), matvec=apply, dtype=dtype)
    with warnings.catch_warnings():
        # running out of iterations is reported through `converged`
        warnings.simplefilter('ignore', UserWarning)
        values, vectors = lobpcg(operator, columns, tol=tol, maxiter=max_iter, largest=True)

    vector = vectors[:, int(np.argmax(values))]
    image = apply(vector)
    norm_sq = float(np.real(np.vdot(vector, vector)))
    value = float(np.real(np.vdot(vector, image))) / norm_sq
    residual = float(np.linalg.norm(image - value * vector)) / math.sqrt(norm_sq)
    converged = residual <= 10 * tol
    if not converged:
        logger.debug(f"LOBPCG stopped after {max_iter} iterations (dim {dim}, residual {residual:.2e})")
    return EigenResult(value, vector / math.sqrt(norm_sq), converged)
