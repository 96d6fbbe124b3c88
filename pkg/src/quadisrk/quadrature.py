"""Quadrature rules on the imaginary axis and the Gramian they induce.

``trapezoid_rule`` lays half_count logarithmically spaced frequencies on
[omega_min, omega_max] together with their conjugates, carrying composite
trapezoid weights phi_k = sqrt(delta_k / (2 pi)) so that phi_k^2 absorbs
the integration measure.  ``approx_gramian_Q`` and ``approx_factor_rows``
are intrusive test oracles: they form the quadrature approximation of the
observability-side Gramian directly from the system matrices, which the
data-driven iteration itself must never do.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import InvalidRange
from .lti import StateSpaceModel, shifted_solve

__all__ = [
    "QuadratureRule",
    "trapezoid_rule",
    "approx_factor_rows",
    "approx_gramian_Q",
    "save_rule",
    "load_rule",
]


@dataclass(frozen=True)
class QuadratureRule:
    """Purely imaginary nodes i*omega_k with positive weights phi_k.

    Construction accepts any distinct node set; conjugate closure (needed
    for real-valued reduced models) is reported by
    :attr:`is_conjugate_closed` and enforced by :func:`trapezoid_rule` and
    the CSV loader rather than by the constructor, so that single-node
    diagnostic rules remain expressible.
    """

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.atleast_1d(np.asarray(self.nodes, dtype=complex))
        weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if nodes.ndim != 1 or weights.ndim != 1 or nodes.shape != weights.shape:
            raise InvalidRange("nodes and weights must be equal-length vectors")
        if nodes.size == 0:
            raise InvalidRange("empty quadrature rule")
        if np.any(nodes.real != 0.0):
            raise InvalidRange("quadrature nodes must be purely imaginary")
        if np.any(weights <= 0.0) or not np.all(np.isfinite(weights)):
            raise InvalidRange("quadrature weights must be strictly positive")
        omega = nodes.imag
        if np.unique(omega).size != omega.size:
            raise InvalidRange("quadrature nodes must be distinct")
        nodes = np.array(nodes, copy=True)
        weights = np.array(weights, copy=True)
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def Nq(self) -> int:
        return self.nodes.size

    @property
    def is_conjugate_closed(self) -> bool:
        """True when every node i*omega has a mirror -i*omega of equal weight."""
        pairs = {}
        for om, w in zip(self.nodes.imag, self.weights):
            pairs[om] = w
        for om, w in pairs.items():
            wc = pairs.get(-om)
            if wc is None or abs(wc - w) > 1e-12 * max(w, wc):
                return False
        return True


def trapezoid_rule(omega_min: float, omega_max: float, half_count: int) -> QuadratureRule:
    """Conjugate-closed composite trapezoid rule on a log frequency grid.

    The positive frequencies are logarithmically spaced; each carries the
    weight sqrt(delta_k / (2 pi)) with delta_k the local trapezoid width
    (half-width at the endpoints), so the squared weights telescope to
    (omega_max - omega_min) / (2 pi) over the positive nodes.
    """
    if not (0 < omega_min < omega_max):
        raise InvalidRange(f"need 0 < omega_min < omega_max, got [{omega_min}, {omega_max}]")
    if half_count < 2:
        raise InvalidRange(f"half_count must be at least 2, got {half_count}")
    omega = np.logspace(np.log10(omega_min), np.log10(omega_max), half_count)
    delta = np.empty(half_count)
    delta[0] = 0.5 * (omega[1] - omega[0])
    delta[-1] = 0.5 * (omega[-1] - omega[-2])
    if half_count > 2:
        delta[1:-1] = 0.5 * (omega[2:] - omega[:-2])
    phi = np.sqrt(delta / (2.0 * np.pi))
    nodes = np.concatenate([1j * omega, -1j * omega])
    weights = np.concatenate([phi, phi])
    return QuadratureRule(nodes=nodes, weights=weights)


def approx_factor_rows(model: StateSpaceModel, rule: QuadratureRule) -> np.ndarray:
    """Nq x n matrix with row k equal to phi_k C (i omega_k E - A)^{-1}.

    TEST-ONLY oracle: stacking these rows gives the square factor of the
    quadrature Gramian, rows^H rows = approx_gramian_Q.
    """
    rows = np.empty((rule.Nq, model.n), dtype=complex)
    for k, (s, phi) in enumerate(zip(rule.nodes, rule.weights)):
        # row^T = (s E - A)^{-T} C^T, so one transposed solve per node.
        rows[k] = phi * shifted_solve(model, s, model.C.T, transpose=True)[:, 0]
    return rows


def approx_gramian_Q(model: StateSpaceModel, rule: QuadratureRule) -> np.ndarray:
    """Quadrature approximation of the Gramian Q as a weighted resolvent sum.

    Returns a real symmetric matrix for conjugate-closed rules (the
    imaginary parts cancel in exact arithmetic and are checked to be
    negligible); otherwise the complex Hermitian sum is returned as-is.
    TEST-ONLY: the data-driven iteration never forms this matrix.
    """
    rows = approx_factor_rows(model, rule)
    Q = rows.conj().T @ rows
    Q = 0.5 * (Q + Q.conj().T)
    if rule.is_conjugate_closed:
        scale = max(np.linalg.norm(Q, "fro"), 1.0)
        imag_norm = np.linalg.norm(Q.imag, "fro")
        if imag_norm > 1e-10 * scale:
            raise InvalidRange(
                f"imaginary residue {imag_norm:.3e} on a conjugate-closed rule"
            )
        return 0.5 * (Q.real + Q.real.T)
    return Q


def save_rule(rule: QuadratureRule, path) -> None:
    """Write a rule as CSV with columns omega, weight."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["omega", "weight"])
        for s, phi in zip(rule.nodes, rule.weights):
            writer.writerow([repr(float(s.imag)), repr(float(phi))])


def load_rule(path) -> QuadratureRule:
    """Read a rule CSV and re-validate conjugate closure."""
    omegas, phis = [], []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or set(reader.fieldnames) != {"omega", "weight"}:
            raise InvalidRange(f"rule file {path} must have columns omega, weight")
        for row in reader:
            omegas.append(float(row["omega"]))
            phis.append(float(row["weight"]))
    rule = QuadratureRule(nodes=1j * np.asarray(omegas), weights=np.asarray(phis))
    if not rule.is_conjugate_closed:
        raise InvalidRange(f"rule file {path} is not closed under conjugation")
    return rule
