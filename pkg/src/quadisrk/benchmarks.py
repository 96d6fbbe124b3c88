"""Seeded benchmark models and method sweeps over the reduced order.

Three synthetic families stand in for the classic reduction benchmarks:
lightly damped modal chains (beam-like error decay), RC-ladder style
tridiagonal diffusion, and dense random stable pencils.  ``run_sweep``
runs each requested (method, r) cell, measures relative errors against
the full model, and reports one CSV-ready row per cell.
"""

from __future__ import annotations

import csv
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as spla

from .errors import InvalidSpec, QuadISRKError
from .lti import StateSpaceModel, is_asymptotically_stable
from .norms import error_system, h2_norm, hinf_norm
from .quadrature import trapezoid_rule
from .reduction import ReductionConfig, irka, isrk, quad_isrk
from .sampling import caching_oracle, state_space_oracle

__all__ = [
    "MODEL_KINDS",
    "METHODS",
    "generate_model",
    "BenchmarkSpec",
    "SweepRow",
    "SweepResult",
    "run_sweep",
    "sweep_to_csv",
]

MODEL_KINDS = ("modal-beam-like", "rc-ladder", "random-stable")
METHODS = ("irka", "isrk", "quad-isrk")

#: Exact CSV header of sweep results.
SWEEP_HEADER = [
    "method",
    "r",
    "h2_rel",
    "hinf_rel",
    "iterations",
    "converged",
    "oracle_queries",
    "wall_time_s",
]


def _modal_beam_like(n: int, rng: np.random.Generator) -> StateSpaceModel:
    if n % 2:
        raise InvalidSpec(f"modal models need even dimension, got n = {n}")
    half = n // 2
    omega = np.logspace(-1.0, 2.0, half)
    zeta = 10.0 ** rng.uniform(-3.0, -1.0, size=half)
    blocks = [
        np.array([[0.0, 1.0], [-w * w, -2.0 * z * w]]) for w, z in zip(omega, zeta)
    ]
    A = spla.block_diag(*blocks)
    B = rng.standard_normal((n, 1))
    C = rng.standard_normal((1, n))
    return StateSpaceModel(E=np.eye(n), A=A, B=B, C=C)


def _rc_ladder(n: int, rng: np.random.Generator) -> StateSpaceModel:
    g = rng.uniform(0.5, 1.5, size=n - 1)
    T = np.zeros((n, n))
    for i, gi in enumerate(g):
        T[i, i] += gi
        T[i + 1, i + 1] += gi
        T[i, i + 1] -= gi
        T[i + 1, i] -= gi
    A = -(T + 0.05 * np.eye(n))
    B = np.zeros((n, 1))
    B[0, 0] = 1.0
    C = np.zeros((1, n))
    C[0, -1] = 1.0
    return StateSpaceModel(E=np.eye(n), A=A, B=B, C=C)


def _random_stable(n: int, rng: np.random.Generator) -> StateSpaceModel:
    A0 = rng.standard_normal((n, n))
    E = np.eye(n) + 0.1 * rng.standard_normal((n, n)) / np.sqrt(n)
    while np.linalg.cond(E) > 100.0:
        E = np.eye(n) + 0.1 * rng.standard_normal((n, n)) / np.sqrt(n)
    abscissa = float(np.max(spla.eig(A0, E, right=False).real))
    A = A0 - (abscissa + 0.05) * E
    B = rng.standard_normal((n, 1))
    C = rng.standard_normal((1, n))
    return StateSpaceModel(E=E, A=A, B=B, C=C)


def generate_model(kind: str, n: int, seed: int) -> StateSpaceModel:
    """Seeded synthetic benchmark model; identical arguments, identical matrices."""
    if kind not in MODEL_KINDS:
        raise InvalidSpec(f"unknown model kind {kind!r}; choose from {MODEL_KINDS}")
    if n < 2:
        raise InvalidSpec(f"benchmark models need n >= 2, got {n}")
    rng = np.random.default_rng(seed)
    if kind == "modal-beam-like":
        model = _modal_beam_like(n, rng)
    elif kind == "rc-ladder":
        model = _rc_ladder(n, rng)
    else:
        model = _random_stable(n, rng)
    if not is_asymptotically_stable(model):
        raise InvalidSpec(f"generated {kind} model is not stable (internal error)")
    return model


@dataclass(frozen=True)
class BenchmarkSpec:
    """Reproducible description of a sweep: model, orders, methods, quadrature."""

    kind: str
    n: int
    seed: int
    r_list: tuple[int, ...]
    methods: tuple[str, ...] = METHODS
    omega_min: float = 1e-2
    omega_max: float = 1e2
    half_count: int = 200
    tau: float = 1e-4
    max_iter: int = 100

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise InvalidSpec(f"unknown model kind {self.kind!r}")
        if self.n < 2:
            raise InvalidSpec(f"n must be at least 2, got {self.n}")
        object.__setattr__(self, "r_list", tuple(int(r) for r in self.r_list))
        object.__setattr__(self, "methods", tuple(self.methods))
        if not self.r_list or any(r < 1 for r in self.r_list):
            raise InvalidSpec("r_list must be a nonempty list of positive integers")
        bad = [m for m in self.methods if m not in METHODS]
        if bad or not self.methods:
            raise InvalidSpec(f"methods must be a nonempty subset of {METHODS}, got {bad}")
        if not (0 < self.omega_min < self.omega_max):
            raise InvalidSpec("need 0 < omega_min < omega_max")
        if self.half_count < 2:
            raise InvalidSpec("half_count must be at least 2")
        if not (self.tau > 0) or self.max_iter < 1:
            raise InvalidSpec("tau must be positive and max_iter at least 1")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "seed": self.seed,
            "r_list": list(self.r_list),
            "methods": list(self.methods),
            "quadrature": {
                "omega_min": self.omega_min,
                "omega_max": self.omega_max,
                "half_count": self.half_count,
            },
            "tau": self.tau,
            "max_iter": self.max_iter,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BenchmarkSpec":
        allowed = {"kind", "n", "seed", "r_list", "methods", "quadrature", "tau", "max_iter"}
        unknown = set(data) - allowed
        if unknown:
            raise InvalidSpec(f"unknown benchmark spec fields: {sorted(unknown)}")
        for key in ("kind", "n", "seed", "r_list"):
            if key not in data:
                raise InvalidSpec(f"benchmark spec is missing required field {key!r}")
        quad = dict(data.get("quadrature", {}))
        unknown_q = set(quad) - {"omega_min", "omega_max", "half_count"}
        if unknown_q:
            raise InvalidSpec(f"unknown quadrature fields: {sorted(unknown_q)}")
        return cls(
            kind=data["kind"],
            n=int(data["n"]),
            seed=int(data["seed"]),
            r_list=tuple(data["r_list"]),
            methods=tuple(data.get("methods", METHODS)),
            omega_min=float(quad.get("omega_min", 1e-2)),
            omega_max=float(quad.get("omega_max", 1e2)),
            half_count=int(quad.get("half_count", 200)),
            tau=float(data.get("tau", 1e-4)),
            max_iter=int(data.get("max_iter", 100)),
        )


@dataclass(frozen=True)
class SweepRow:
    method: str
    r: int
    h2_rel: float
    hinf_rel: float
    iterations: int
    converged: bool
    oracle_queries: int
    wall_time_s: float


@dataclass(frozen=True)
class SweepResult:
    spec: BenchmarkSpec
    rows: tuple[SweepRow, ...] = field(default_factory=tuple)


def _thread_cap() -> int:
    raw = os.environ.get("QUADISRK_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _run_cell(model, rule, full_h2, full_hinf, spec, method, r) -> SweepRow:
    start = time.perf_counter()
    config = ReductionConfig(r=r, tau=spec.tau, max_iter=spec.max_iter)
    oracle = None
    h2_rel = hinf_rel = float("nan")
    iterations, converged, queries = 0, False, 0
    try:
        if method == "quad-isrk":
            oracle = caching_oracle(state_space_oracle(model))
            rom, trace = quad_isrk(oracle, rule, config)
            queries = oracle.backend_queries
        elif method == "isrk":
            rom, trace = isrk(model, config)
        else:
            rom, trace = irka(model, config)
        iterations, converged = trace.iterations, trace.converged
        err = error_system(model, rom)
        h2_rel = h2_norm(err) / full_h2
        hinf_rel = hinf_norm(err) / full_hinf
    except QuadISRKError:
        h2_rel = hinf_rel = float("nan")
        converged = False
        if oracle is not None:
            queries = oracle.backend_queries
    wall = time.perf_counter() - start
    return SweepRow(
        method=method,
        r=r,
        h2_rel=h2_rel,
        hinf_rel=hinf_rel,
        iterations=iterations,
        converged=converged,
        oracle_queries=queries,
        wall_time_s=wall,
    )


def run_sweep(spec: BenchmarkSpec) -> SweepResult:
    """Run every (method, r) cell of a benchmark spec and collect sorted rows.

    Cell failures are recorded (converged false, NaN errors) and the sweep
    continues.  The data-driven method gets a fresh caching oracle per
    cell, so its reported query count is deterministic.  Cells may run in
    parallel, capped by the QUADISRK_THREADS environment variable.
    """
    model = generate_model(spec.kind, spec.n, spec.seed)
    rule = trapezoid_rule(spec.omega_min, spec.omega_max, spec.half_count)
    full_h2 = h2_norm(model)
    full_hinf = hinf_norm(model)
    cells = [(method, r) for method in spec.methods for r in spec.r_list]

    def work(cell):
        method, r = cell
        return _run_cell(model, rule, full_h2, full_hinf, spec, method, r)

    cap = _thread_cap()
    if cap == 1 or len(cells) == 1:
        rows = [work(cell) for cell in cells]
    else:
        with ThreadPoolExecutor(max_workers=cap) as pool:
            rows = list(pool.map(work, cells))
    rows.sort(key=lambda row: (row.method, row.r))
    return SweepResult(spec=spec, rows=tuple(rows))


def sweep_to_csv(result: SweepResult, path) -> None:
    """Write rows under the fixed header; floats use shortest-roundtrip repr."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_HEADER)
        for row in result.rows:
            writer.writerow(
                [
                    row.method,
                    row.r,
                    repr(float(row.h2_rel)),
                    repr(float(row.hinf_rel)),
                    row.iterations,
                    "true" if row.converged else "false",
                    row.oracle_queries,
                    repr(float(row.wall_time_s)),
                ]
            )
