"""Command-line harness: thin client over the reduction service.

Subcommands run against the in-process service by default; ``--url``
sends the same request to a remote server started with ``serve``.
Exit codes: 0 success, 1 usage error (bad arguments or input files),
2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from types import SimpleNamespace

import httpx
from pydantic import ValidationError

from . import schemas, service
from .benchmarks import BenchmarkSpec, run_sweep, sweep_to_csv
from .errors import QuadISRKError
from .sampling import load_samples

__all__ = ["main", "build_parser"]


class _RemoteNumericalError(QuadISRKError):
    """Numerical failure reported by a remote server."""


class _UsageError(Exception):
    """Bad invocation or unusable input files."""


class _Parser(argparse.ArgumentParser):
    """argparse exits with code 2 on usage errors; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="quadisrk",
        description="Sample-based and intrusive model order reduction.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_quadrature_args(p):
        p.add_argument("--half-count", type=int, default=200,
                       help="positive quadrature nodes per half axis (default 200)")
        p.add_argument("--omega-min", type=float, default=1e-2,
                       help="lower frequency bound (default 1e-2)")
        p.add_argument("--omega-max", type=float, default=1e2,
                       help="upper frequency bound (default 1e2)")

    reduce_p = sub.add_parser("reduce", help="reduce one model or sample set")
    reduce_p.add_argument("--method", required=True,
                          choices=["irka", "isrk", "quad-isrk"])
    reduce_p.add_argument("--r", required=True, type=int, help="reduced order")
    reduce_p.add_argument("--model", help="model JSON file")
    reduce_p.add_argument("--samples", help="recorded-sample CSV (quad-isrk only)")
    reduce_p.add_argument("--tau", type=float, default=1e-4)
    reduce_p.add_argument("--max-iter", type=int, default=100)
    add_quadrature_args(reduce_p)
    reduce_p.add_argument("--out", required=True, help="output ROM JSON path")
    reduce_p.add_argument("--trace", help="optional iteration trace CSV path")
    reduce_p.add_argument("--url", help="remote service base URL")
    reduce_p.set_defaults(func=_cmd_reduce)

    sweep_p = sub.add_parser("sweep", help="run a benchmark spec, write result CSV")
    sweep_p.add_argument("--spec", required=True, help="benchmark spec JSON file")
    sweep_p.add_argument("--out", required=True, help="output CSV path")
    sweep_p.add_argument("--url", help="remote service base URL")
    sweep_p.set_defaults(func=_cmd_sweep)

    export_p = sub.add_parser(
        "sample-export",
        help="run the data-driven method on a model and dump its samples",
    )
    export_p.add_argument("--model", required=True, help="model JSON file")
    export_p.add_argument("--r", required=True, type=int)
    export_p.add_argument("--tau", type=float, default=1e-4)
    export_p.add_argument("--max-iter", type=int, default=100)
    add_quadrature_args(export_p)
    export_p.add_argument("--out", required=True, help="output sample CSV path")
    export_p.add_argument("--url", help="remote service base URL")
    export_p.set_defaults(func=_cmd_sample_export)

    validate_p = sub.add_parser("validate", help="check model file invariants")
    validate_p.add_argument("--model", required=True, help="model JSON file")
    validate_p.add_argument("--url", help="remote service base URL")
    validate_p.set_defaults(func=_cmd_validate)

    serve_p = sub.add_parser("serve", help="start the HTTP service")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8000)
    serve_p.set_defaults(func=_cmd_serve)

    return parser


def _post(url: str, route: str, payload: dict) -> dict:
    try:
        resp = httpx.post(url.rstrip("/") + route, json=payload, timeout=600.0)
    except httpx.HTTPError as exc:
        raise _UsageError(f"cannot reach {url}: {exc}") from exc
    if resp.status_code == 422:
        body = resp.json()
        if isinstance(body, dict) and "error" in body:
            raise _RemoteNumericalError(f"{body['error']}: {body['detail']}")
        raise _UsageError(f"request rejected: {body}")
    if resp.status_code != 200:
        raise _UsageError(f"server returned {resp.status_code}: {resp.text}")
    return resp.json()


def _load_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _write_trace_csv(trace: schemas.TracePayload, path) -> None:
    def fmt(pairs):
        return ";".join(f"{re:.17g}{im:+.17g}j" for re, im in pairs)

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "shifts", "shift_change", "poles", "oracle_queries"])
        for rec in trace.records:
            writer.writerow(
                [rec.iteration, fmt(rec.shifts), repr(rec.shift_change),
                 fmt(rec.poles), rec.oracle_queries]
            )


def _cmd_reduce(args) -> int:
    if args.method in ("irka", "isrk"):
        if not args.model or args.samples:
            raise _UsageError(f"method {args.method} needs --model (and no --samples)")
    elif bool(args.model) == bool(args.samples):
        raise _UsageError("quad-isrk needs exactly one of --model or --samples")
    payload: dict = {
        "method": args.method,
        "r": args.r,
        "tau": args.tau,
        "max_iter": args.max_iter,
        "quadrature": {
            "omega_min": args.omega_min,
            "omega_max": args.omega_max,
            "half_count": args.half_count,
        },
    }
    if args.model:
        payload["model"] = _load_json(args.model)
    if args.samples:
        payload["samples"] = [
            {"s_re": s.real, "s_im": s.imag, "H_re": h.real, "H_im": h.imag}
            for s, h in load_samples(args.samples)
        ]
    if args.url:
        resp = schemas.ReduceResponse(**_post(args.url, "/reduce", payload))
    else:
        resp = service.reduce_endpoint(schemas.ReduceRequest(**payload))
    with open(args.out, "w") as fh:
        json.dump(resp.rom.model_dump(), fh, indent=2)
        fh.write("\n")
    if args.trace:
        _write_trace_csv(resp.trace, args.trace)
    line = f"{args.method} r={args.r}: {resp.trace.status} after {resp.trace.iterations} iterations"
    if resp.h2_rel is not None:
        line += f", h2_rel={resp.h2_rel:.3e}, hinf_rel={resp.hinf_rel:.3e}"
    if args.method == "quad-isrk":
        line += f", oracle_queries={resp.oracle_queries}"
    print(line)
    return 0


def _cmd_sweep(args) -> int:
    data = _load_json(args.spec)
    if args.url:
        spec = BenchmarkSpec.from_dict(data)  # validate before shipping
        payload = {
            "kind": spec.kind,
            "n": spec.n,
            "seed": spec.seed,
            "r_list": list(spec.r_list),
            "methods": list(spec.methods),
            "quadrature": {
                "omega_min": spec.omega_min,
                "omega_max": spec.omega_max,
                "half_count": spec.half_count,
            },
            "tau": spec.tau,
            "max_iter": spec.max_iter,
        }
        resp = schemas.SweepResponse(**_post(args.url, "/sweep", payload))
        sweep_to_csv(SimpleNamespace(rows=resp.rows), args.out)
    else:
        result = run_sweep(BenchmarkSpec.from_dict(data))
        sweep_to_csv(result, args.out)
    print(f"sweep written to {args.out}")
    return 0


def _cmd_sample_export(args) -> int:
    payload = {
        "model": _load_json(args.model),
        "r": args.r,
        "tau": args.tau,
        "max_iter": args.max_iter,
        "quadrature": {
            "omega_min": args.omega_min,
            "omega_max": args.omega_max,
            "half_count": args.half_count,
        },
    }
    if args.url:
        resp = schemas.SampleExportResponse(**_post(args.url, "/sample-export", payload))
    else:
        resp = service.sample_export_endpoint(schemas.SampleExportRequest(**payload))
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["s_re", "s_im", "H_re", "H_im"])
        for s in resp.samples:
            writer.writerow([repr(s.s_re), repr(s.s_im), repr(s.H_re), repr(s.H_im)])
    print(
        f"exported {len(resp.samples)} samples "
        f"({resp.backend_queries} backend queries, {resp.iterations} iterations)"
    )
    return 0


def _cmd_validate(args) -> int:
    payload = {"model": _load_json(args.model)}
    if args.url:
        resp = schemas.ValidateResponse(**_post(args.url, "/validate", payload))
    else:
        resp = service.validate_endpoint(schemas.ValidateRequest(**payload))
    for line in resp.messages:
        print(line)
    return 0 if resp.valid else 2


def _cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except QuadISRKError as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 2
    except (_UsageError, OSError, json.JSONDecodeError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
