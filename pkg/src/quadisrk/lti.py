"""SISO LTI systems in generalized state-space form.

A system is the quadruple (E, A, B, C) describing E x'(t) = A x(t) + B u(t),
y(t) = C x(t), with E nonsingular.  Transfer-function evaluation, pole
computation and the stability test live here; norms are in
:mod:`quadisrk.norms` because they need the Lyapunov machinery.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as spla
from scipy.linalg import lapack

from .errors import InvalidModel, PencilFailure, SingularShift

__all__ = [
    "StateSpaceModel",
    "ReducedModel",
    "eval_transfer",
    "poles",
    "is_asymptotically_stable",
    "shifted_solve",
    "model_to_dict",
    "model_from_dict",
    "load_model",
    "save_model",
    "rom_to_dict",
    "rom_from_dict",
]

#: Pole real parts within this distance of zero count as unstable.
STABILITY_MARGIN = 1e-12

#: Reciprocal-condition floor below which a shifted solve is rejected.
RCOND_FLOOR = 1e-13

#: Condition-number ceiling for E at model construction.
E_COND_LIMIT = 1e12


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _as_column(v, n: int, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim == 1:
        v = v.reshape(-1, 1)
    if v.shape != (n, 1):
        raise InvalidModel(f"{name} must be an {n}x1 column, got shape {v.shape}")
    return v


def _as_row(v, n: int, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim == 1:
        v = v.reshape(1, -1)
    if v.shape != (1, n):
        raise InvalidModel(f"{name} must be a 1x{n} row, got shape {v.shape}")
    return v


@dataclass(frozen=True)
class StateSpaceModel:
    """Real SISO system (E, A, B, C) with nonsingular E.

    Arrays are copied and marked read-only at construction, so instances
    are safe to share across threads.
    """

    E: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        E = np.atleast_2d(np.asarray(self.E, dtype=float))
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        if E.shape[0] != E.shape[1]:
            raise InvalidModel(f"E must be square, got shape {E.shape}")
        n = E.shape[0]
        if A.shape != (n, n):
            raise InvalidModel(f"A must match E's shape {(n, n)}, got {A.shape}")
        B = _as_column(self.B, n, "B")
        C = _as_row(self.C, n, "C")
        for name, mat in (("E", E), ("A", A), ("B", B), ("C", C)):
            if not np.all(np.isfinite(mat)):
                raise InvalidModel(f"{name} contains non-finite entries")
        if np.linalg.cond(E) > E_COND_LIMIT:
            raise InvalidModel("E is numerically singular")
        object.__setattr__(self, "E", _freeze(E))
        object.__setattr__(self, "A", _freeze(A))
        object.__setattr__(self, "B", _freeze(B))
        object.__setattr__(self, "C", _freeze(C))

    @property
    def n(self) -> int:
        return self.E.shape[0]


@dataclass(frozen=True)
class ReducedModel:
    """Order-r model (E, A, B, C); entries may be complex mid-pipeline.

    Regularity of the pencil is the producing operation's responsibility;
    construction only validates shapes and finiteness.
    """

    E: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    source: str = field(default="", compare=False)

    def __post_init__(self):
        E = np.atleast_2d(np.asarray(self.E))
        A = np.atleast_2d(np.asarray(self.A))
        if E.shape[0] != E.shape[1] or E.shape[0] < 1:
            raise InvalidModel(f"E must be square and nonempty, got shape {E.shape}")
        r = E.shape[0]
        if A.shape != (r, r):
            raise InvalidModel(f"A must match E's shape {(r, r)}, got {A.shape}")
        B = np.asarray(self.B)
        C = np.asarray(self.C)
        if B.ndim == 1:
            B = B.reshape(-1, 1)
        if C.ndim == 1:
            C = C.reshape(1, -1)
        if B.shape != (r, 1):
            raise InvalidModel(f"B must be an {r}x1 column, got shape {B.shape}")
        if C.shape != (1, r):
            raise InvalidModel(f"C must be a 1x{r} row, got shape {C.shape}")
        for name, mat in (("E", E), ("A", A), ("B", B), ("C", C)):
            if not np.all(np.isfinite(mat)):
                raise InvalidModel(f"{name} contains non-finite entries")
        object.__setattr__(self, "E", _freeze(E))
        object.__setattr__(self, "A", _freeze(A))
        object.__setattr__(self, "B", _freeze(B))
        object.__setattr__(self, "C", _freeze(C))

    @property
    def r(self) -> int:
        return self.E.shape[0]

    @property
    def is_real(self) -> bool:
        return all(not np.iscomplexobj(m) for m in (self.E, self.A, self.B, self.C))


def shifted_solve(model, s: complex, rhs: np.ndarray, transpose: bool = False) -> np.ndarray:
    """Solve (sE - A) x = rhs, or the transposed system if `transpose`.

    Uses an LU factorization plus a reciprocal-condition estimate; the
    inverse is never formed.  Raises :class:`SingularShift` when the
    shifted pencil is singular to working precision.
    """
    M = np.asarray(s * model.E - model.A, dtype=complex)
    if transpose:
        M = M.T
    anorm = np.linalg.norm(M, 1)
    try:
        with warnings.catch_warnings():
            # Exact singularity is detected below via rcond; scipy's
            # factor-time warning would just duplicate that signal.
            warnings.simplefilter("ignore", spla.LinAlgWarning)
            lu, piv = spla.lu_factor(M, check_finite=False)
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise SingularShift(f"factorization failed at s={s}: {exc}") from exc
    rcond, info = lapack.zgecon(lu, anorm)
    if info != 0 or not np.isfinite(rcond) or rcond < RCOND_FLOOR:
        raise SingularShift(f"sE - A is numerically singular at s={s} (rcond={rcond:.2e})")
    x = spla.lu_solve((lu, piv), np.asarray(rhs, dtype=complex), check_finite=False)
    if not np.all(np.isfinite(x)):
        raise SingularShift(f"solve at s={s} produced non-finite values")
    return x


def eval_transfer(model, s: complex) -> complex:
    """Transfer function C (sE - A)^{-1} B at the point s (one linear solve)."""
    x = shifted_solve(model, s, model.B)
    return complex((model.C @ x)[0, 0])


def poles(model) -> np.ndarray:
    """All generalized eigenvalues of (A, E), sorted by real then imaginary part."""
    try:
        vals = spla.eig(model.A, model.E, right=False)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise PencilFailure(f"generalized eigensolver failed: {exc}") from exc
    if not np.all(np.isfinite(vals)):
        raise PencilFailure("pencil has infinite or undefined eigenvalues")
    order = np.lexsort((vals.imag, vals.real))
    return vals[order]


def is_asymptotically_stable(model) -> bool:
    """True iff every pole is strictly in the open left half-plane.

    Real parts within ``STABILITY_MARGIN`` of zero are treated as unstable,
    so borderline systems never pass as stable.
    """
    return bool(np.max(poles(model).real) < -STABILITY_MARGIN)


# ---------------------------------------------------------------------------
# Model file format (JSON): {"n": int, "E": [[...]], "A": [[...]],
# "B": [...], "C": [...]}, row-major dense.
# ---------------------------------------------------------------------------

def model_to_dict(model: StateSpaceModel) -> dict:
    return {
        "n": model.n,
        "E": model.E.tolist(),
        "A": model.A.tolist(),
        "B": model.B[:, 0].tolist(),
        "C": model.C[0, :].tolist(),
    }


def model_from_dict(data: dict) -> StateSpaceModel:
    try:
        n = int(data["n"])
        E = np.asarray(data["E"], dtype=float)
        A = np.asarray(data["A"], dtype=float)
        B = np.asarray(data["B"], dtype=float)
        C = np.asarray(data["C"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidModel(f"malformed model data: {exc}") from exc
    if E.shape != (n, n):
        raise InvalidModel(f"E has shape {E.shape}, expected {(n, n)}")
    model = StateSpaceModel(E=E, A=A, B=B, C=C)
    if model.n != n:
        raise InvalidModel(f"declared n={n} does not match matrices of order {model.n}")
    return model


def load_model(path) -> StateSpaceModel:
    with open(path) as fh:
        return model_from_dict(json.load(fh))


def save_model(model: StateSpaceModel, path) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_dict(model), fh, indent=2)
        fh.write("\n")


def rom_to_dict(rom: ReducedModel) -> dict:
    """ROM as a model dict with an added "r" field; requires a real realization."""
    if not rom.is_real:
        imag = max(float(np.abs(np.imag(m)).max()) for m in (rom.E, rom.A, rom.B, rom.C))
        if imag > 1e-10:
            raise InvalidModel(f"ROM has imaginary residue {imag:.2e}; cannot serialize as real")
    return {
        "n": rom.r,
        "r": rom.r,
        "E": np.real(rom.E).tolist(),
        "A": np.real(rom.A).tolist(),
        "B": np.real(rom.B)[:, 0].tolist(),
        "C": np.real(rom.C)[0, :].tolist(),
    }


def rom_from_dict(data: dict) -> ReducedModel:
    try:
        r = int(data["r"])
        E = np.asarray(data["E"], dtype=float)
        A = np.asarray(data["A"], dtype=float)
        B = np.asarray(data["B"], dtype=float)
        C = np.asarray(data["C"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidModel(f"malformed ROM data: {exc}") from exc
    rom = ReducedModel(E=E, A=A, B=B, C=C)
    if rom.r != r:
        raise InvalidModel(f"declared r={r} does not match matrices of order {rom.r}")
    return rom
