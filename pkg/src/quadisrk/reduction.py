"""Iterative shift-driven reduction: intrusive and data-driven variants.

All three algorithms share one loop: build an order-r model from the
current shifts, mirror its poles into new shifts, and stop once the
relative shift change drops below tau.  They differ only in how the model
is built per iteration:

* ``isrk``   projects with V_r from rational Krylov directions and
  W_r = Q E V_r, pulling in the observability Gramian (one-sided
  interpolation plus Gramian information).
* ``irka``   projects two-sided with Krylov directions of the system and
  its transpose at the same shifts.
* ``quad_isrk`` reproduces the ISRK step with the Gramian replaced by its
  quadrature approximation, assembled purely from transfer-function
  samples; it receives an oracle and never touches system matrices.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSpec, SizeMismatch, UnstableSystem
from .interpolation import (
    ShiftSet,
    as_real,
    default_initial_shifts,
    pair_conjugates,
    rational_krylov_basis,
    real_basis_transform,
)
from .lti import ReducedModel, StateSpaceModel, is_asymptotically_stable, poles, shifted_solve
from .loewner import assemble_rom, build_data_block
from .lyapunov import solve_lyapunov_Q
from .quadrature import QuadratureRule
from .sampling import FrequencyResponseOracle

__all__ = [
    "ReductionConfig",
    "IterationRecord",
    "IterationTrace",
    "update_shifts",
    "shift_change",
    "isrk",
    "irka",
    "quad_isrk",
    "trace_to_csv",
]

logger = logging.getLogger(__name__)

#: Shifts closer than this (relative) are treated as repeated and jittered.
DUPLICATE_TOL = 1e-10

#: Relative scaling applied to break up repeated shifts.
JITTER = 1e-8


@dataclass(frozen=True)
class ReductionConfig:
    """Order, tolerance, iteration cap, and initial shifts of a reduction run."""

    r: int
    tau: float = 1e-4
    max_iter: int = 100
    initial_shifts: ShiftSet | None = None
    orthonormalize: bool = False

    def __post_init__(self):
        if self.r < 1:
            raise InvalidSpec(f"reduced order must be at least 1, got {self.r}")
        if not (self.tau > 0):
            raise InvalidSpec(f"tolerance must be positive, got {self.tau}")
        if self.max_iter < 1:
            raise InvalidSpec(f"iteration cap must be at least 1, got {self.max_iter}")
        if self.initial_shifts is not None and self.initial_shifts.r != self.r:
            raise InvalidSpec(
                f"initial shift count {self.initial_shifts.r} does not match r = {self.r}"
            )

    def starting_shifts(self) -> ShiftSet:
        if self.initial_shifts is not None:
            return self.initial_shifts
        return default_initial_shifts(self.r)


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    shifts: np.ndarray
    shift_change: float
    poles: np.ndarray
    oracle_queries: int


@dataclass(frozen=True)
class IterationTrace:
    """Per-iteration shifts, poles, and query counts, plus terminal status."""

    records: list[IterationRecord] = field(default_factory=list)
    status: str = "converged"

    @property
    def iterations(self) -> int:
        return len(self.records)

    @property
    def converged(self) -> bool:
        return self.status == "converged"

    @property
    def final_shifts(self) -> np.ndarray:
        return self.records[-1].shifts


def _propose_shifts(pole_values: np.ndarray, k: int) -> ShiftSet:
    """Mirror poles into shifts, reflect into the right half-plane, de-duplicate."""
    proposed = -np.asarray(pole_values, dtype=complex)
    flip = proposed.real < 0
    proposed[flip] = -proposed[flip].real + 1j * proposed[flip].imag
    # Work on conjugate representatives so jitter keeps the set closed.
    pairs = pair_conjugates(proposed)
    reps = [proposed[p] for p, _ in pairs]
    for i in range(len(reps)):
        bumps = 0
        for j in range(i):
            if abs(reps[i] - reps[j]) <= DUPLICATE_TOL * max(1.0, abs(reps[j])):
                bumps += 1
        if bumps:
            logger.warning(
                "repeated shift %s perturbed by %d x %.0e relative jitter",
                reps[i], bumps, JITTER,
            )
            reps[i] = reps[i] * (1.0 + bumps * JITTER)
    out = []
    for (p, q), v in zip(pairs, reps):
        out.append(v)
        if p != q:
            out.append(np.conj(v))
    arr = np.asarray(out)
    arr = arr[np.lexsort((arr.imag, arr.real))]
    return ShiftSet(shifts=arr, k=k)


def update_shifts(rom: ReducedModel) -> ShiftSet:
    """New shifts as reflected mirror images of the reduced poles."""
    return _propose_shifts(poles(rom), k=0)


def shift_change(old: ShiftSet, new: ShiftSet) -> float:
    """Max relative displacement after sorting both sets by (Re, Im)."""
    if old.r != new.r:
        raise SizeMismatch(f"shift sets have sizes {old.r} and {new.r}")
    a = old.shifts[np.lexsort((old.shifts.imag, old.shifts.real))]
    b = new.shifts[np.lexsort((new.shifts.imag, new.shifts.real))]
    denom = np.maximum(np.abs(a), 1e-14)
    return float(np.max(np.abs(b - a) / denom))


def _iterate(build, config: ReductionConfig, count_queries):
    """Shared loop: build, mirror poles, measure change, stop below tau."""
    shifts = config.starting_shifts()
    records: list[IterationRecord] = []
    rom = None
    for k in range(1, config.max_iter + 1):
        rom = build(shifts)
        rom_poles = poles(rom)
        proposed = _propose_shifts(rom_poles, k=k)
        change = shift_change(shifts, proposed)
        records.append(
            IterationRecord(
                iteration=k,
                shifts=shifts.shifts,
                shift_change=change,
                poles=rom_poles,
                oracle_queries=count_queries(),
            )
        )
        if change < config.tau:
            return rom, IterationTrace(records=records, status="converged")
        shifts = proposed
    return rom, IterationTrace(records=records, status="max_iter")


def isrk(model: StateSpaceModel, config: ReductionConfig):
    """Gramian-weighted one-sided iteration on the full model.

    The Gramian Q is solved once (the model does not change between
    iterations); each pass projects with V_r from the current shifts and
    W_r = Q E V_r, then mirrors the reduced poles.
    """
    if not is_asymptotically_stable(model):
        raise UnstableSystem("reduction requires an asymptotically stable model")
    if config.r > model.n:
        raise InvalidSpec(f"reduced order {config.r} exceeds model order {model.n}")
    QE = solve_lyapunov_Q(model).M @ model.E

    def build(shifts: ShiftSet) -> ReducedModel:
        T = real_basis_transform(shifts.shifts)
        Vr = as_real(rational_krylov_basis(model, shifts) @ T)
        if config.orthonormalize:
            Vr, _ = np.linalg.qr(Vr)
        Wr = QE @ Vr
        return ReducedModel(
            E=Wr.T @ model.E @ Vr,
            A=Wr.T @ model.A @ Vr,
            B=Wr.T @ model.B,
            C=model.C @ Vr,
            source="isrk",
        )

    return _iterate(build, config, lambda: 0)


def irka(model: StateSpaceModel, config: ReductionConfig):
    """Two-sided Krylov iteration (the standard H2 baseline)."""
    if not is_asymptotically_stable(model):
        raise UnstableSystem("reduction requires an asymptotically stable model")
    if config.r > model.n:
        raise InvalidSpec(f"reduced order {config.r} exceeds model order {model.n}")

    def build(shifts: ShiftSet) -> ReducedModel:
        T = real_basis_transform(shifts.shifts)
        Vr = as_real(rational_krylov_basis(model, shifts) @ T)
        Kw = np.empty((model.n, shifts.r), dtype=complex)
        for j, eta in enumerate(shifts.shifts):
            Kw[:, j] = shifted_solve(model, eta, model.C.T, transpose=True)[:, 0]
        Wr = as_real(Kw @ T)
        if config.orthonormalize:
            Vr, _ = np.linalg.qr(Vr)
            Wr, _ = np.linalg.qr(Wr)
        return ReducedModel(
            E=Wr.T @ model.E @ Vr,
            A=Wr.T @ model.A @ Vr,
            B=Wr.T @ model.B,
            C=model.C @ Vr,
            source="irka",
        )

    return _iterate(build, config, lambda: 0)


def quad_isrk(
    oracle: FrequencyResponseOracle,
    rule: QuadratureRule,
    config: ReductionConfig,
):
    """Data-driven twin of ``isrk`` working from samples alone.

    Each iteration queries the oracle at the quadrature nodes and current
    shifts, forms the divided-difference data block, and assembles the
    reduced model from it; a caching oracle makes the repeated node
    queries free after the first pass.
    """
    if not rule.is_conjugate_closed:
        raise InvalidSpec("the data-driven iteration needs a conjugate-closed rule")
    if config.r > rule.Nq:
        raise InvalidSpec(f"reduced order {config.r} exceeds the node count {rule.Nq}")

    def build(shifts: ShiftSet) -> ReducedModel:
        block = build_data_block(oracle, rule, shifts)
        rom = assemble_rom(block)
        return ReducedModel(E=rom.E, A=rom.A, B=rom.B, C=rom.C, source="quad_isrk")

    def count_queries() -> int:
        for name in ("backend_queries", "total_queries"):
            value = getattr(oracle, name, None)
            if value is not None:
                return int(value)
        return 0

    return _iterate(build, config, count_queries)


def _fmt_complex(z: complex) -> str:
    return f"{z.real:.17g}{z.imag:+.17g}j"


def trace_to_csv(trace: IterationTrace, path) -> None:
    """Write per-iteration rows; complex lists are semicolon-joined."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "shifts", "shift_change", "poles", "oracle_queries"])
        for rec in trace.records:
            writer.writerow(
                [
                    rec.iteration,
                    ";".join(_fmt_complex(z) for z in rec.shifts),
                    repr(rec.shift_change),
                    ";".join(_fmt_complex(z) for z in rec.poles),
                    rec.oracle_queries,
                ]
            )
