"""Generalized Lyapunov equations for the system Gramians.

The reachability Gramian P solves  A P E^T + E P A^T + B B^T = 0  and Q
solves  A^T Q E + E^T Q A + C^T C = 0  (E^T Q E is the observability
Gramian proper).  Both reduce to standard Lyapunov equations once E is
inverted onto the data, which is fine at dense desk scale.  When that
route misses the residual target (stiff or badly scaled pencils), the
solution is polished by iterative refinement against the direct n^2 x n^2
Kronecker form of the generalized equation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as spla

from .errors import IllConditioned, NotPSD, UnstableSystem
from .lti import StateSpaceModel, is_asymptotically_stable

__all__ = ["Gramian", "GramianFactor", "solve_lyapunov_P", "solve_lyapunov_Q", "factor"]

#: Relative residual target for the Lyapunov solves.
RESIDUAL_TOL = 1e-10

#: Eigenvalues below -tol * ||M||_2 flag a Gramian as not PSD.
PSD_TOL = 1e-10

#: Eigenvalues below this fraction of ||M||_2 are truncated when factoring.
FACTOR_TRUNCATION = 1e-12

#: Largest order for which the dense Kronecker system is formed.
KRON_LIMIT = 200

#: Cap on iterative refinement sweeps against the Kronecker operator.
REFINE_STEPS = 3


@dataclass(frozen=True)
class Gramian:
    """Symmetric PSD solution of one of the two generalized Lyapunov equations.

    ``kind`` is "reachability" for P or "observability" for the Q factor of
    the observability Gramian E^T Q E.
    """

    M: np.ndarray
    kind: str

    def __post_init__(self):
        M = np.asarray(self.M, dtype=float)
        if self.kind not in ("reachability", "observability"):
            raise ValueError(f"unknown Gramian kind {self.kind!r}")
        scale = np.linalg.norm(M, "fro")
        if scale > 0 and np.linalg.norm(M - M.T, "fro") > 1e-12 * scale:
            raise NotPSD("Gramian is not symmetric")
        M = 0.5 * (M + M.T)
        evals = np.linalg.eigvalsh(M)
        if evals.size and evals[0] < -PSD_TOL * max(evals[-1], 0.0):
            raise NotPSD(f"Gramian has negative eigenvalue {evals[0]:.3e}")
        frozen = np.array(M, copy=True)
        frozen.setflags(write=False)
        object.__setattr__(self, "M", frozen)


@dataclass(frozen=True)
class GramianFactor:
    """Square-root factor F with F F^T reproducing the Gramian (k <= n columns)."""

    F: np.ndarray

    def __post_init__(self):
        F = np.array(np.atleast_2d(np.asarray(self.F, dtype=float)), copy=True)
        F.setflags(write=False)
        object.__setattr__(self, "F", F)

    @property
    def rank(self) -> int:
        return self.F.shape[1]


def _lyapunov_residual(model: StateSpaceModel, X: np.ndarray, kind: str) -> float:
    E, A = model.E, model.A
    if kind == "reachability":
        rhs = model.B @ model.B.T
        res = A @ X @ E.T + E @ X @ A.T + rhs
    else:
        rhs = model.C.T @ model.C
        res = A.T @ X @ E + E.T @ X @ A + rhs
    scale = np.linalg.norm(rhs, "fro")
    return float(np.linalg.norm(res, "fro") / scale) if scale > 0 else float(np.linalg.norm(res, "fro"))


def _refine_direct(model: StateSpaceModel, X: np.ndarray, kind: str) -> np.ndarray:
    """Polish X against the n^2 x n^2 Kronecker form of the generalized equation.

    Correction steps solve the exact linearized equation, so each sweep
    knocks the residual down toward round-off; the lowest-residual iterate
    wins in case a step stalls.
    """
    E, A = model.E, model.A
    n = model.n
    K = np.kron(E, A) + np.kron(A, E)
    if kind == "observability":
        K = K.T
    lu = spla.lu_factor(K)
    best, best_resid = X, _lyapunov_residual(model, X, kind)
    for _ in range(REFINE_STEPS):
        if kind == "reachability":
            R = A @ X @ E.T + E @ X @ A.T + model.B @ model.B.T
        else:
            R = A.T @ X @ E + E.T @ X @ A + model.C.T @ model.C
        delta = spla.lu_solve(lu, R.reshape(-1, order="F")).reshape((n, n), order="F")
        X = X - 0.5 * (delta + delta.T)
        resid = _lyapunov_residual(model, X, kind)
        if resid < best_resid:
            best, best_resid = X, resid
        if best_resid <= RESIDUAL_TOL:
            break
    return best


def _solve(model: StateSpaceModel, kind: str) -> Gramian:
    if not is_asymptotically_stable(model):
        raise UnstableSystem(f"cannot solve the {kind} Lyapunov equation for an unstable system")
    E, A = model.E, model.A
    Ahat = np.linalg.solve(E, A)
    if kind == "reachability":
        # A P E^T + E P A^T + B B^T = 0  <=>  Ahat P + P Ahat^T + Bhat Bhat^T = 0
        Bhat = np.linalg.solve(E, model.B)
        X = spla.solve_continuous_lyapunov(Ahat, -Bhat @ Bhat.T)
    else:
        # A^T Q E + E^T Q A + C^T C = 0 in terms of X = E^T Q E reads
        # Ahat^T X + X Ahat + C^T C = 0; recover Q = E^{-T} X E^{-1}.
        X = spla.solve_continuous_lyapunov(Ahat.T, -model.C.T @ model.C)
        X = np.linalg.solve(E.T, X)
        X = np.linalg.solve(E.T, X.T).T
    X = 0.5 * (X + X.T)
    resid = _lyapunov_residual(model, X, kind)
    if resid > RESIDUAL_TOL and model.n <= KRON_LIMIT:
        X = _refine_direct(model, X, kind)
        X = 0.5 * (X + X.T)
        resid = _lyapunov_residual(model, X, kind)
    if resid > RESIDUAL_TOL:
        raise IllConditioned(
            f"{kind} Lyapunov solve missed the residual target: {resid:.3e} > {RESIDUAL_TOL:.0e}"
        )
    return Gramian(M=X, kind=kind)


def solve_lyapunov_P(model: StateSpaceModel) -> Gramian:
    """Reachability Gramian P of a stable system."""
    return _solve(model, "reachability")


def solve_lyapunov_Q(model: StateSpaceModel) -> Gramian:
    """Gramian Q whose congruence E^T Q E is the observability Gramian."""
    return _solve(model, "observability")


def factor(gramian: Gramian) -> GramianFactor:
    """Square-root factor of a Gramian via symmetric eigendecomposition.

    Eigenvalues below ``FACTOR_TRUNCATION`` times the spectral norm are
    truncated, which keeps the factor well defined for numerically
    semidefinite input; a significantly negative eigenvalue raises
    :class:`NotPSD`.
    """
    M = gramian.M
    evals, vecs = np.linalg.eigh(M)
    top = max(evals[-1], 0.0)
    if evals[0] < -PSD_TOL * top:
        raise NotPSD(f"matrix has negative eigenvalue {evals[0]:.3e}")
    keep = evals > FACTOR_TRUNCATION * top
    F = vecs[:, keep] * np.sqrt(evals[keep])
    if F.size == 0:
        F = np.zeros((M.shape[0], 1))
    scale = np.linalg.norm(M, "fro")
    err = np.linalg.norm(F @ F.T - M, "fro")
    if scale > 0 and err > 1e-10 * scale:
        raise IllConditioned(f"factor reconstruction error {err / scale:.3e} exceeds 1e-10")
    return GramianFactor(F=F)
