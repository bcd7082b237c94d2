"""
Matrix-free Krylov solves for the Picard sub-blocks
"""

import logging
from typing import Callable, Tuple

import numpy as np
from scipy.sparse.linalg import LinearOperator, bicgstab, gmres

from ...exceptions import LinearSolveError

logger = logging.getLogger(__name__)

GMRES_RESTART = 50


def solve_block(
    matvec: Callable[[np.ndarray], np.ndarray],
    rhs: np.ndarray,
    guess: np.ndarray,
    diagonal: np.ndarray,
    tol: float,
    maxiter: int,
    label: str,
) -> Tuple[np.ndarray, int]:
    """
    Solve A x = b with Jacobi-preconditioned BiCGStab, falling back to GMRES

    Args:
        matvec: Action of A on a flat vector
        rhs: Right-hand side, any shape
        guess: Initial iterate with the shape of rhs
        diagonal: Jacobi scaling with the shape of rhs
        tol: Relative residual tolerance
        maxiter: Iteration cap per method
        label: Block name used in logs and errors

    Returns:
        Solution with the shape of rhs and the number of iterations spent
    """
    shape = rhs.shape
    size = rhs.size
    scale = np.where(np.abs(diagonal) > 0, np.abs(diagonal), 1.0).ravel()

    operator = LinearOperator((size, size), matvec=lambda v: matvec(v.reshape(shape)).ravel(), dtype=float)
    preconditioner = LinearOperator((size, size), matvec=lambda v: v / scale, dtype=float)

    count = [0]

    def tick(_):
        count[0] += 1

    b = rhs.ravel()
    x, info = bicgstab(
        operator, b, x0=guess.ravel(), rtol=tol, atol=0.0, maxiter=maxiter, M=preconditioner, callback=tick
    )
    if info != 0:
        logger.warning(f"BiCGStab on the {label} block stopped with info={info}, retrying with GMRES")
        x, info = gmres(
            operator, b, x0=x, rtol=tol, atol=0.0, restart=GMRES_RESTART, maxiter=maxiter,
            M=preconditioner, callback=tick, callback_type="pr_norm",
        )
        if info != 0:
            logger.error(f"GMRES on the {label} block failed with info={info}")
            raise LinearSolveError(f"{label} block did not converge (info={info})")

    if not np.all(np.isfinite(x)):
        raise LinearSolveError(f"{label} block produced nonfinite values")
    return x.reshape(shape), count[0]
