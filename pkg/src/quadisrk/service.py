"""Reduction service: schema-typed handlers shared by the HTTP API and CLI.

Each handler converts payloads to core objects, runs the corresponding
core operation, and converts back.  Numerical failures propagate as
QuadISRKError subclasses; the API layer maps them to HTTP errors and the
CLI to exit code 2.
"""

from __future__ import annotations

import numpy as np

from . import schemas
from .benchmarks import BenchmarkSpec, run_sweep
from .errors import InvalidSpec, QuadISRKError
from .interpolation import ShiftSet
from .lti import (
    E_COND_LIMIT,
    STABILITY_MARGIN,
    ReducedModel,
    StateSpaceModel,
    model_from_dict,
    poles,
    rom_to_dict,
)
from .norms import relative_errors
from .quadrature import trapezoid_rule
from .reduction import IterationTrace, ReductionConfig, irka, isrk, quad_isrk
from .sampling import caching_oracle, replay_oracle, state_space_oracle

__all__ = [
    "reduce_endpoint",
    "sweep_endpoint",
    "validate_endpoint",
    "sample_export_endpoint",
]


def _pairs(values) -> list[tuple[float, float]]:
    return [(float(z.real), float(z.imag)) for z in np.asarray(values, dtype=complex)]


def _model_from_payload(payload: schemas.ModelPayload) -> StateSpaceModel:
    return model_from_dict(payload.model_dump())


def _rom_payload(rom: ReducedModel) -> schemas.RomPayload:
    return schemas.RomPayload(**rom_to_dict(rom))


def _trace_payload(trace: IterationTrace) -> schemas.TracePayload:
    records = [
        schemas.TraceRecordPayload(
            iteration=rec.iteration,
            shifts=_pairs(rec.shifts),
            shift_change=rec.shift_change,
            poles=_pairs(rec.poles),
            oracle_queries=rec.oracle_queries,
        )
        for rec in trace.records
    ]
    return schemas.TracePayload(
        status=trace.status, iterations=trace.iterations, records=records
    )


def _config_from_request(req) -> ReductionConfig:
    initial = None
    if req.initial_shifts is not None:
        initial = ShiftSet(shifts=np.asarray([complex(re, im) for re, im in req.initial_shifts]))
    orthonormalize = bool(getattr(req, "orthonormalize", False))
    return ReductionConfig(
        r=req.r,
        tau=req.tau,
        max_iter=req.max_iter,
        initial_shifts=initial,
        orthonormalize=orthonormalize,
    )


def _rule_from_request(req):
    quad = req.quadrature or schemas.QuadraturePayload()
    return trapezoid_rule(quad.omega_min, quad.omega_max, quad.half_count)


def reduce_endpoint(req: schemas.ReduceRequest) -> schemas.ReduceResponse:
    """Run one reduction; intrusive methods need a model, quad-isrk accepts
    either a model (oracle-wrapped) or recorded samples."""
    config = _config_from_request(req)
    queries = 0
    model = _model_from_payload(req.model) if req.model is not None else None
    if req.method in ("irka", "isrk"):
        if model is None:
            raise InvalidSpec(f"method {req.method} requires a model (matrix access)")
        rom, trace = (isrk if req.method == "isrk" else irka)(model, config)
    else:
        rule = _rule_from_request(req)
        if req.samples is not None:
            records = [
                (complex(s.s_re, s.s_im), complex(s.H_re, s.H_im)) for s in req.samples
            ]
            oracle = caching_oracle(replay_oracle(records))
        elif model is not None:
            oracle = caching_oracle(state_space_oracle(model))
        else:
            raise InvalidSpec("quad-isrk requires either a model or recorded samples")
        rom, trace = quad_isrk(oracle, rule, config)
        queries = oracle.backend_queries
    h2_rel = hinf_rel = None
    if model is not None:
        try:
            errs = relative_errors(model, rom)
            h2_rel, hinf_rel = errs["h2_rel"], errs["hinf_rel"]
        except QuadISRKError:
            pass
    return schemas.ReduceResponse(
        rom=_rom_payload(rom),
        trace=_trace_payload(trace),
        h2_rel=h2_rel,
        hinf_rel=hinf_rel,
        oracle_queries=queries,
    )


def sweep_endpoint(req: schemas.SweepRequest) -> schemas.SweepResponse:
    quad = req.quadrature or schemas.QuadraturePayload()
    spec = BenchmarkSpec(
        kind=req.kind,
        n=req.n,
        seed=req.seed,
        r_list=tuple(req.r_list),
        methods=tuple(req.methods) if req.methods else ("irka", "isrk", "quad-isrk"),
        omega_min=quad.omega_min,
        omega_max=quad.omega_max,
        half_count=quad.half_count,
        tau=req.tau,
        max_iter=req.max_iter,
    )
    result = run_sweep(spec)
    rows = [
        schemas.SweepRowPayload(
            method=row.method,
            r=row.r,
            h2_rel=row.h2_rel,
            hinf_rel=row.hinf_rel,
            iterations=row.iterations,
            converged=row.converged,
            oracle_queries=row.oracle_queries,
            wall_time_s=row.wall_time_s,
        )
        for row in result.rows
    ]
    return schemas.SweepResponse(rows=rows)


def validate_endpoint(req: schemas.ValidateRequest) -> schemas.ValidateResponse:
    """Invariant report for a model file: shapes, E conditioning, stability."""
    messages: list[str] = []
    try:
        model = _model_from_payload(req.model)
    except QuadISRKError as exc:
        return schemas.ValidateResponse(
            valid=False,
            stable=False,
            n=req.model.n,
            messages=[f"model rejected: {exc}"],
        )
    cond_E = float(np.linalg.cond(model.E))
    messages.append(f"model order n = {model.n}")
    messages.append(f"cond(E) = {cond_E:.3e} (limit {E_COND_LIMIT:.0e})")
    try:
        pole_values = poles(model)
    except QuadISRKError as exc:
        return schemas.ValidateResponse(
            valid=False,
            stable=False,
            n=model.n,
            cond_E=cond_E,
            messages=messages + [f"pencil eigenvalue failure: {exc}"],
        )
    abscissa = float(np.max(pole_values.real))
    stable = bool(abscissa < -STABILITY_MARGIN)
    messages.append(f"spectral abscissa = {abscissa:.6e}")
    messages.append(
        "asymptotically stable" if stable else "NOT asymptotically stable"
    )
    return schemas.ValidateResponse(
        valid=stable,
        stable=stable,
        n=model.n,
        spectral_abscissa=abscissa,
        cond_E=cond_E,
        poles=_pairs(pole_values),
        messages=messages,
    )


def sample_export_endpoint(req: schemas.SampleExportRequest) -> schemas.SampleExportResponse:
    """Run the data-driven method against a model and export the distinct
    samples it drew, ready to feed a later replay-based reduction."""
    model = _model_from_payload(req.model)
    config = _config_from_request(req)
    rule = _rule_from_request(req)
    oracle = caching_oracle(state_space_oracle(model))
    _, trace = quad_isrk(oracle, rule, config)
    samples = [
        schemas.SamplePayload(
            s_re=rec.s.real, s_im=rec.s.imag, H_re=rec.value.real, H_im=rec.value.imag
        )
        for rec in oracle.log.records
        if rec.source != "cache"
    ]
    return schemas.SampleExportResponse(
        samples=samples,
        backend_queries=oracle.backend_queries,
        iterations=trace.iterations,
        converged=trace.converged,
    )
