"""Shift sets, conjugate pairing, and rational Krylov interpolation bases.

Shift sets are conjugate-closed so that projected models admit real
realizations.  ``real_basis_transform`` builds the unitary change of basis
that rotates a conjugate-symmetric family of columns (or rows) onto real
vectors; applying it on the right as V @ U, or on the left as U^H L,
leaves transfer functions unchanged while producing real matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidModel, InvalidSpec, SingularShift
from .lti import StateSpaceModel, shifted_solve

__all__ = [
    "ShiftSet",
    "pair_conjugates",
    "real_basis_transform",
    "as_real",
    "default_initial_shifts",
    "rational_krylov_basis",
]

#: Matching tolerance for conjugate-pair detection, relative to max(1, |value|).
PAIR_TOL = 1e-10


def pair_conjugates(values: np.ndarray, tol: float = PAIR_TOL) -> list[tuple[int, int]]:
    """Group indices of a conjugate-closed complex vector into pairs.

    Returns (i, i) for real entries and (i, j) with values[j] = conj(values[i])
    and Im values[i] > 0 otherwise.  Raises InvalidSpec when some entry has
    no conjugate partner within tolerance.
    """
    values = np.asarray(values, dtype=complex)
    order = np.lexsort((values.imag, values.real))
    used = np.zeros(values.size, dtype=bool)
    pairs: list[tuple[int, int]] = []
    for i in order:
        if used[i]:
            continue
        v = values[i]
        scale = max(1.0, abs(v))
        if abs(v.imag) <= tol * scale:
            used[i] = True
            pairs.append((int(i), int(i)))
            continue
        best, best_dist = -1, np.inf
        for j in range(values.size):
            if used[j] or j == i:
                continue
            dist = abs(values[j] - np.conj(v))
            if dist < best_dist:
                best, best_dist = j, dist
        if best < 0 or best_dist > tol * scale:
            raise InvalidSpec(f"value {v} has no conjugate partner")
        used[i] = used[best] = True
        if v.imag > 0:
            pairs.append((int(i), int(best)))
        else:
            pairs.append((int(best), int(i)))
    return pairs


def real_basis_transform(values: np.ndarray, tol: float = PAIR_TOL) -> np.ndarray:
    """Unitary U mapping conjugate-symmetric column families to real ones.

    For a matrix V whose column at conj(value) is the conjugate of the
    column at value, V @ U is real; for rows with the mirrored structure,
    U^H L is real.  Real entries keep their coordinate direction, and each
    conjugate pair (p, q) with Im values[p] > 0 is rotated onto
    (e_p + e_q)/sqrt(2) and i (e_q - e_p)/sqrt(2).
    """
    values = np.asarray(values, dtype=complex)
    m = values.size
    U = np.zeros((m, m), dtype=complex)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for p, q in pair_conjugates(values, tol=tol):
        if p == q:
            U[p, p] = 1.0
        else:
            U[p, p] = U[q, p] = inv_sqrt2
            U[p, q] = -1j * inv_sqrt2
            U[q, q] = 1j * inv_sqrt2
    return U


def as_real(M: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Strip a negligible imaginary part, raising InvalidModel if it is not."""
    M = np.asarray(M)
    if not np.iscomplexobj(M):
        return np.asarray(M, dtype=float)
    scale = max(np.linalg.norm(M.ravel()), 1.0)
    residue = np.linalg.norm(M.imag.ravel())
    if residue > tol * scale:
        raise InvalidModel(f"imaginary residue {residue:.3e} exceeds {tol:.0e} of scale")
    return np.array(M.real, dtype=float)


@dataclass(frozen=True)
class ShiftSet:
    """Conjugate-closed interpolation points with an iteration index."""

    shifts: np.ndarray
    k: int = field(default=0, compare=False)

    def __post_init__(self):
        shifts = np.atleast_1d(np.asarray(self.shifts, dtype=complex))
        if shifts.ndim != 1 or shifts.size == 0:
            raise InvalidSpec("shifts must form a nonempty vector")
        if not np.all(np.isfinite(shifts)):
            raise InvalidSpec("shifts must be finite")
        pair_conjugates(shifts)
        shifts = np.array(shifts, copy=True)
        shifts.setflags(write=False)
        object.__setattr__(self, "shifts", shifts)

    @property
    def r(self) -> int:
        return self.shifts.size


def default_initial_shifts(r: int) -> ShiftSet:
    """Logarithmically spaced positive real shifts in [0.1, 10]."""
    if r < 1:
        raise InvalidSpec(f"reduced order must be at least 1, got {r}")
    if r == 1:
        return ShiftSet(shifts=np.array([1.0 + 0j]))
    return ShiftSet(shifts=np.logspace(-1.0, 1.0, r).astype(complex))


def rational_krylov_basis(
    model: StateSpaceModel,
    shifts: ShiftSet,
    orthonormalize: bool = False,
) -> np.ndarray:
    """Primitive rational Krylov matrix with columns (eta_j E - A)^{-1} B.

    The primitive columns solve the generalized Sylvester equation
    A K + B [1 ... 1] = E K diag(eta); ``orthonormalize`` replaces them by
    an orthonormal basis of the same column span (the projected transfer
    function is unchanged, the Sylvester relation is not preserved).
    """
    K = np.empty((model.n, shifts.r), dtype=complex)
    for j, eta in enumerate(shifts.shifts):
        try:
            K[:, j] = shifted_solve(model, eta, model.B)[:, 0]
        except SingularShift as exc:
            raise SingularShift(f"shift {eta} lies on the system spectrum: {exc}") from exc
    if orthonormalize:
        K, _ = np.linalg.qr(K)
    return K
