"""Loewner-style data matrices from transfer-function samples.

``build_data_block`` assembles, purely from samples at quadrature nodes
and shifts, the divided-difference matrices whose products reproduce the
intrusively projected reduced model: with L and M below,

    L^H L = (Q~ E V_r projection of E),   L^H M = (same projection of A),

so ``assemble_rom`` needs no system matrices at all.
``intrusive_data_block`` computes the same block from the matrices and is
kept as the equivalence oracle for tests.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateShift, InvalidSpec, RankDeficientData
from .interpolation import ShiftSet, as_real, rational_krylov_basis, real_basis_transform
from .lti import ReducedModel, StateSpaceModel
from .quadrature import QuadratureRule, approx_factor_rows
from .sampling import FrequencyResponseOracle

__all__ = [
    "LoewnerDataBlock",
    "build_data_block",
    "intrusive_data_block",
    "assemble_rom",
    "loewner_realization",
    "save_block",
    "load_block",
]

#: Nodes and shifts closer than this raise DegenerateShift (divided differences).
DEGENERACY_TOL = 1e-10

#: Condition-number gate on L (squared for L^H L) before inversion-based steps.
CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class LoewnerDataBlock:
    """Data matrices over Nq quadrature nodes and r shifts.

    L[i, j] = -phi_i (H(s_i) - H(eta_j)) / (s_i - eta_j)
    M[i, j] = -phi_i (s_i H(s_i) - eta_j H(eta_j)) / (s_i - eta_j)
    V[i]    =  phi_i H(s_i)
    W[j]    =  H(eta_j)

    with s_i the nodes.  The node and shift samples are stored so the
    entries can be recomputed and verified.
    """

    L: np.ndarray
    M: np.ndarray
    V: np.ndarray
    W: np.ndarray
    rule: QuadratureRule
    shifts: ShiftSet
    node_samples: np.ndarray
    shift_samples: np.ndarray

    def __post_init__(self):
        Nq, r = self.rule.Nq, self.shifts.r
        arrays = {
            "L": (np.asarray(self.L, dtype=complex), (Nq, r)),
            "M": (np.asarray(self.M, dtype=complex), (Nq, r)),
            "V": (np.asarray(self.V, dtype=complex), (Nq, 1)),
            "W": (np.asarray(self.W, dtype=complex), (1, r)),
            "node_samples": (np.asarray(self.node_samples, dtype=complex), (Nq,)),
            "shift_samples": (np.asarray(self.shift_samples, dtype=complex), (r,)),
        }
        for name, (arr, shape) in arrays.items():
            if arr.shape != shape:
                raise InvalidSpec(f"{name} must have shape {shape}, got {arr.shape}")
            frozen = np.array(arr, copy=True)
            frozen.setflags(write=False)
            object.__setattr__(self, name, frozen)

    @property
    def Nq(self) -> int:
        return self.rule.Nq

    @property
    def r(self) -> int:
        return self.shifts.r

    def max_recomputation_error(self) -> float:
        """Largest absolute deviation of the stored entries from the formulas."""
        L, M, V, W = _entries(
            self.rule.nodes,
            self.rule.weights,
            self.shifts.shifts,
            self.node_samples,
            self.shift_samples,
        )
        return float(
            max(
                np.abs(self.L - L).max(),
                np.abs(self.M - M).max(),
                np.abs(self.V - V).max(),
                np.abs(self.W - W).max(),
            )
        )


def _check_degeneracy(nodes: np.ndarray, shifts: np.ndarray) -> None:
    gaps = np.abs(nodes[:, None] - shifts[None, :])
    if gaps.min() <= DEGENERACY_TOL:
        i, j = np.unravel_index(int(gaps.argmin()), gaps.shape)
        raise DegenerateShift(
            f"shift {shifts[j]} is within {DEGENERACY_TOL:.0e} of node {nodes[i]}"
        )


def _entries(nodes, weights, shifts, h_nodes, h_shifts):
    s = nodes[:, None]
    eta = shifts[None, :]
    phi = weights[:, None]
    hn = h_nodes[:, None]
    hs = h_shifts[None, :]
    denom = s - eta
    L = -phi * (hn - hs) / denom
    M = -phi * (s * hn - eta * hs) / denom
    V = (weights * h_nodes)[:, None]
    W = h_shifts[None, :]
    return L, M, V, W


def build_data_block(
    oracle: FrequencyResponseOracle,
    rule: QuadratureRule,
    shifts: ShiftSet,
) -> LoewnerDataBlock:
    """Assemble the data block from oracle samples only.

    Issues exactly one oracle query per distinct node and per distinct
    shift (Nq + r for distinct shifts); any caching beyond that is the
    oracle's business.
    """
    _check_degeneracy(rule.nodes, shifts.shifts)
    h_nodes = np.asarray([oracle.sample(s) for s in rule.nodes])
    cache: dict[complex, complex] = {}
    h_shifts = np.empty(shifts.r, dtype=complex)
    for j, eta in enumerate(shifts.shifts):
        key = complex(eta)
        if key not in cache:
            cache[key] = oracle.sample(key)
        h_shifts[j] = cache[key]
    L, M, V, W = _entries(rule.nodes, rule.weights, shifts.shifts, h_nodes, h_shifts)
    return LoewnerDataBlock(
        L=L, M=M, V=V, W=W, rule=rule, shifts=shifts,
        node_samples=h_nodes, shift_samples=h_shifts,
    )


def intrusive_data_block(
    model: StateSpaceModel,
    rule: QuadratureRule,
    shifts: ShiftSet,
) -> LoewnerDataBlock:
    """TEST-ONLY twin of build_data_block computed from system matrices.

    Uses the quadrature factor rows and the rational Krylov basis:
    L = rows E K, M = rows A K, V = rows B, W = C K.  Equality with the
    sampled block is the core data-driven identity.
    """
    _check_degeneracy(rule.nodes, shifts.shifts)
    rows = approx_factor_rows(model, rule)
    K = rational_krylov_basis(model, shifts)
    L = rows @ model.E @ K
    M = rows @ model.A @ K
    V = rows @ model.B
    W = model.C @ K
    h_nodes = V[:, 0] / rule.weights
    h_shifts = W[0, :].copy()
    return LoewnerDataBlock(
        L=L, M=M, V=V, W=W, rule=rule, shifts=shifts,
        node_samples=h_nodes, shift_samples=h_shifts,
    )


def _condition(matrix: np.ndarray) -> float:
    svals = np.linalg.svd(matrix, compute_uv=False)
    if svals[-1] == 0.0 or not np.all(np.isfinite(svals)):
        return np.inf
    return float(svals[0] / svals[-1])


def _is_realifiable(block: LoewnerDataBlock) -> bool:
    return block.rule.is_conjugate_closed


def assemble_rom(block: LoewnerDataBlock) -> ReducedModel:
    """Reduced model (L^H L, L^H M, L^H V, W) from a data block.

    When the rule is conjugate-closed (shift sets always are), a unitary
    change of basis turns all four matrices real without touching the
    transfer function; otherwise the complex matrices are returned.
    """
    cond_L = _condition(block.L)
    if cond_L**2 >= CONDITION_LIMIT:
        raise RankDeficientData(
            f"cond(L^H L) about {cond_L**2:.2e} exceeds {CONDITION_LIMIT:.0e}"
        )
    L, M = block.L, block.M
    E_r = L.conj().T @ L
    A_r = L.conj().T @ M
    B_r = L.conj().T @ block.V
    C_r = block.W
    if _is_realifiable(block):
        T = real_basis_transform(block.shifts.shifts)
        Th = T.conj().T
        E_r = as_real(Th @ E_r @ T)
        A_r = as_real(Th @ A_r @ T)
        B_r = as_real(Th @ B_r)
        C_r = as_real(C_r @ T)
    return ReducedModel(E=E_r, A=A_r, B=B_r, C=C_r, source="assemble_rom")


def loewner_realization(block: LoewnerDataBlock) -> ReducedModel:
    """Direct realization from the raw data matrices.

    For r = Nq the realization is (L, M, V, W) itself; for r < Nq the
    left generalized inverse (L^H L)^{-1} L^H collapses the tall matrices
    to order r.  Both have the same transfer function as assemble_rom.
    """
    Nq, r = block.Nq, block.r
    if r > Nq:
        raise InvalidSpec(f"r = {r} exceeds the node count Nq = {Nq}")
    realify = _is_realifiable(block)
    T = real_basis_transform(block.shifts.shifts) if realify else None
    if r == Nq:
        if _condition(block.L) >= CONDITION_LIMIT:
            raise RankDeficientData("square data matrix L is numerically singular")
        E_r, A_r, B_r, C_r = block.L, block.M, block.V, block.W
        if realify:
            S = real_basis_transform(block.rule.nodes)
            Sh = S.conj().T
            E_r = as_real(Sh @ E_r @ T)
            A_r = as_real(Sh @ A_r @ T)
            B_r = as_real(Sh @ B_r)
            C_r = as_real(C_r @ T)
        return ReducedModel(E=E_r, A=A_r, B=B_r, C=C_r, source="loewner_realization")
    cond_L = _condition(block.L)
    if cond_L**2 >= CONDITION_LIMIT:
        raise RankDeficientData(
            f"cond(L^H L) about {cond_L**2:.2e} exceeds {CONDITION_LIMIT:.0e}"
        )
    gram = block.L.conj().T @ block.L
    K = np.linalg.solve(gram, block.L.conj().T)
    E_r = np.eye(r, dtype=complex)
    A_r = K @ block.M
    B_r = K @ block.V
    C_r = block.W
    if realify:
        Th = T.conj().T
        E_r = np.eye(r)
        A_r = as_real(Th @ A_r @ T)
        B_r = as_real(Th @ B_r)
        C_r = as_real(C_r @ T)
    return ReducedModel(E=E_r, A=A_r, B=B_r, C=C_r, source="loewner_realization")


def _complex_to_pairs(arr: np.ndarray):
    return [[float(z.real), float(z.imag)] for z in np.asarray(arr).ravel()]


def _pairs_to_complex(pairs, shape):
    flat = np.asarray([complex(re, im) for re, im in pairs])
    return flat.reshape(shape)


def save_block(block: LoewnerDataBlock, path) -> None:
    """Serialize a data block (matrices flattened as [re, im] pairs)."""
    payload = {
        "Nq": block.Nq,
        "r": block.r,
        "omega": [float(w) for w in block.rule.nodes.imag],
        "weight": [float(w) for w in block.rule.weights],
        "shifts": _complex_to_pairs(block.shifts.shifts),
        "node_samples": _complex_to_pairs(block.node_samples),
        "shift_samples": _complex_to_pairs(block.shift_samples),
        "L": _complex_to_pairs(block.L),
        "M": _complex_to_pairs(block.M),
        "V": _complex_to_pairs(block.V),
        "W": _complex_to_pairs(block.W),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)


def load_block(path) -> LoewnerDataBlock:
    with open(path) as fh:
        payload = json.load(fh)
    Nq, r = int(payload["Nq"]), int(payload["r"])
    rule = QuadratureRule(
        nodes=1j * np.asarray(payload["omega"], dtype=float),
        weights=np.asarray(payload["weight"], dtype=float),
    )
    shifts = ShiftSet(shifts=_pairs_to_complex(payload["shifts"], (r,)))
    return LoewnerDataBlock(
        L=_pairs_to_complex(payload["L"], (Nq, r)),
        M=_pairs_to_complex(payload["M"], (Nq, r)),
        V=_pairs_to_complex(payload["V"], (Nq, 1)),
        W=_pairs_to_complex(payload["W"], (1, r)),
        rule=rule,
        shifts=shifts,
        node_samples=_pairs_to_complex(payload["node_samples"], (Nq,)),
        shift_samples=_pairs_to_complex(payload["shift_samples"], (r,)),
    )
