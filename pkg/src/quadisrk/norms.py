"""System norms and reduction-error measures.

H2 comes from the reachability Gramian, sqrt(C P C^T).  H-infinity is a
dense logarithmic frequency sweep refined by bounded local search; for
desk-scale SISO systems this is accurate to about 1e-3 relative, which is
all the error tables need.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as spla
from scipy.optimize import minimize_scalar

from .errors import InvalidModel, SingularShift, UnstableSystem
from .lti import (
    ReducedModel,
    StateSpaceModel,
    eval_transfer,
    is_asymptotically_stable,
    poles,
)
from .lyapunov import solve_lyapunov_P

__all__ = ["h2_norm", "hinf_norm", "error_system", "relative_errors"]

#: Default H-infinity grid bounds (rad/s) and point count.
HINF_RANGE = (1e-4, 1e4)
HINF_POINTS = 2000


def h2_norm(model: StateSpaceModel) -> float:
    """H2 norm sqrt(C P C^T) with P the reachability Gramian."""
    P = solve_lyapunov_P(model).M
    val = float((model.C @ P @ model.C.T)[0, 0])
    return float(np.sqrt(max(val, 0.0)))


def _gain(model: StateSpaceModel, omega: float) -> float:
    try:
        return abs(eval_transfer(model, 1j * omega))
    except SingularShift:
        # Right at a lightly damped resonance the shifted solve trips its
        # rcond gate; a least-squares solve still gives the peak gain to
        # the few digits the sweep needs.
        x, *_ = np.linalg.lstsq(1j * omega * model.E - model.A, model.B, rcond=None)
        return float(abs((model.C @ x)[0, 0]))


def _refine(model: StateSpaceModel, lo: float, hi: float) -> float:
    """Largest gain on [lo, hi], searched in log frequency when possible."""
    if lo > 0:
        res = minimize_scalar(
            lambda x: -_gain(model, 10.0**x),
            bounds=(np.log10(lo), np.log10(hi)),
            method="bounded",
            options={"xatol": 1e-9},
        )
    else:
        res = minimize_scalar(
            lambda w: -_gain(model, w),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-9 * max(hi, 1.0)},
        )
    return float(-res.fun)


def hinf_norm(
    model: StateSpaceModel,
    freq_range: tuple[float, float] = HINF_RANGE,
    num_points: int = HINF_POINTS,
) -> float:
    """H-infinity norm via log-spaced grid plus local refinement.

    Candidate frequencies are the grid, omega = 0, and the imaginary parts
    of the system poles (resonance peaks sit next to those); a bounded
    search then polishes a bracket around each promising candidate.  The
    result is never below any grid evaluation.
    """
    lo, hi = freq_range
    if not (0 < lo < hi):
        raise InvalidModel(f"invalid frequency range ({lo}, {hi})")
    if not is_asymptotically_stable(model):
        raise UnstableSystem("H-infinity norm needs a stable model")
    grid = np.logspace(np.log10(lo), np.log10(hi), num_points)
    ratio = (hi / lo) ** (1.0 / (num_points - 1))

    candidates = [0.0]
    candidates.extend(grid.tolist())
    for lam in poles(model):
        w = abs(lam.imag)
        if w > 0:
            candidates.append(min(max(w, lo), hi))

    gains = np.array([_gain(model, w) for w in candidates])
    best = float(gains.max())

    # Polish around the global maximizer and around every pole-seeded
    # candidate; an undersampled narrow peak may not win on the raw grid.
    polish = {int(np.argmax(gains))}
    polish.update(range(1 + num_points, len(candidates)))
    for idx in polish:
        w = candidates[idx]
        if w == 0.0:
            best = max(best, _refine(model, 0.0, grid[0]))
        else:
            best = max(best, _refine(model, w / ratio, w * ratio))
    return best


def _equilibrate(E, A, B, C, sweeps: int = 4):
    """Row/column equilibration of a realization by exact powers of two.

    Diagonal state-space equivalences leave the transfer function
    untouched, and power-of-two factors do not round, so this only evens
    out the magnitude spread of |E| + |A| (Ruiz style).  Badly scaled
    reduced blocks otherwise drag down the rcond of the stacked error
    pencil near resonances.
    """
    E, A, B, C = E.copy(), A.copy(), B.copy(), C.copy()
    for _ in range(sweeps):
        M = np.abs(E) + np.abs(A)
        row = M.max(axis=1)
        dl = np.where(row > 0, 2.0 ** np.round(-0.5 * np.log2(np.maximum(row, 1e-300))), 1.0)
        E *= dl[:, None]
        A *= dl[:, None]
        B *= dl[:, None]
        M = np.abs(E) + np.abs(A)
        col = M.max(axis=0)
        dr = np.where(col > 0, 2.0 ** np.round(-0.5 * np.log2(np.maximum(col, 1e-300))), 1.0)
        E *= dr[None, :]
        A *= dr[None, :]
        C *= dr[None, :]
    return E, A, B, C


def error_system(full: StateSpaceModel, rom: ReducedModel) -> StateSpaceModel:
    """Block system realizing H(s) - H_r(s); stable iff both inputs are.

    The reduced block is equilibrated (transfer-invariant power-of-two
    scaling) before stacking so one badly scaled block cannot poison the
    conditioning of the combined pencil.
    """
    if not rom.is_real:
        raise InvalidModel("error system requires a real reduced model")
    Er, Ar, Br, Cr = _equilibrate(rom.E.real, rom.A.real, rom.B.real, rom.C.real)
    E = spla.block_diag(full.E, Er)
    A = spla.block_diag(full.A, Ar)
    B = np.vstack([full.B, Br])
    C = np.hstack([full.C, -Cr])
    return StateSpaceModel(E=E, A=A, B=B, C=C)


def relative_errors(full: StateSpaceModel, rom: ReducedModel) -> dict[str, float]:
    """Relative H2 and H-infinity norms of the error system.

    Raises UnstableSystem if either the full model or the reduced one has a
    pole outside the open left half-plane.
    """
    err = error_system(full, rom)
    h2_rel = h2_norm(err) / h2_norm(full)
    hinf_rel = hinf_norm(err) / hinf_norm(full)
    return {"h2_rel": float(h2_rel), "hinf_rel": float(hinf_rel)}
