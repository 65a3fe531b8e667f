"""Symplectic form and eigenvalues for quadrature covariance matrices.

Mode ordering is (q_1, p_1, q_2, p_2, ...); vacuum variances are 1/2 per
quadrature, so a physical state has all symplectic eigenvalues >= 1/2.
"""

import numpy as np

PHYSICALITY_TOL = 1e-9


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal form with [[0, 1], [-1, 0]] per mode."""
    block = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(np.eye(n_modes), block)


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Moduli of the eigenvalues of i*Omega*C, one per mode, ascending."""
    cov = np.asarray(cov, dtype=float)
    n2 = cov.shape[0]
    if cov.shape != (n2, n2) or n2 % 2:
        raise ValueError(f"expected an even-dimensional square matrix, got {cov.shape}")
    omega = symplectic_form(n2 // 2)
    eigs = np.sort(np.abs(np.linalg.eigvals(1j * omega @ cov)))
    # eigenvalues come in +/- pairs; keep one representative of each
    return eigs[::2]


def min_symplectic_eigenvalue(cov: np.ndarray) -> float:
    return float(symplectic_eigenvalues(cov)[0])


def is_physical(cov: np.ndarray, tol: float = PHYSICALITY_TOL) -> bool:
    """True when every symplectic eigenvalue sits above 1/2 - tol."""
    return min_symplectic_eigenvalue(cov) >= 0.5 - tol
