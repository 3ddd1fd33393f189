"""Command-line interface: ``symcone verify | compute | solve``.

Exit codes: 0 success, 1 numeric or domain failure, 2 usage or parse error.
Reports are JSON lines followed by one ``{"summary": ...}`` record.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import barriers as bar
from . import geometry as geo
from . import ipm
from . import verification as ver
from .exceptions import InitializationError, StructuralError
from .jordan import Algebra, Element, LinMap, algebra_from_dict, parse_algebra
from .reports import dumps_line, render
from .suites import SUITES, RunConfig

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

BUNDLED = {"sdp2x2": "sdp2x2.json", "lp": "lp.json", "soc-toy": "soc_toy.json"}


class ParseError(ValueError):
    """Malformed command input."""


def _algebra_arg(text):
    try:
        return parse_algebra(text)
    except (StructuralError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _positive_float(text):
    val = float(text)
    if not val > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return val


def _positive_int(text):
    val = int(text)
    if val < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return val


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symcone",
        description="Symmetric-cone geometry, self-scaled barrier checks and a small conic solver.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=_positive_float, default=None)
    common.add_argument("--output", default="-", help="report path, '-' for stdout")

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", help="one of: " + ", ".join(SUITES))
    v.add_argument("--algebra", type=_algebra_arg, default=None,
                   help="sym:N, spin:D or a sum such as sum:sym:3,spin:4")
    v.add_argument("--trials", type=_positive_int, default=None)
    v.add_argument("--samples", type=_positive_int, default=100)
    v.add_argument("--n", type=_positive_int, default=None)

    c = sub.add_parser("compute", parents=[common], help="evaluate one geometric quantity")
    c.add_argument("what", choices=["geomean", "distance", "scaling-point", "barrier",
                                    "hessian-apply", "polar", "factor"])
    c.add_argument("--input", required=True, help="JSON input file, '-' for stdin")

    s = sub.add_parser("solve", parents=[common], help="solve a conic program")
    s.add_argument("program", help="program JSON file or a bundled example: " + ", ".join(BUNDLED))
    s.add_argument("--max-iters", type=_positive_int, default=50)
    return parser


def _emit(text: str, output: str):
    if output == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


###############################################################################
# verify


def cmd_verify(args) -> int:
    if args.suite not in SUITES:
        print(f"symcone: unknown suite {args.suite!r}; choose from {', '.join(SUITES)}",
              file=sys.stderr)
        return EXIT_USAGE
    cfg = RunConfig(seed=args.seed, tol=args.tol, trials=args.trials,
                    algebras=None if args.algebra is None else [args.algebra],
                    samples=args.samples, n=args.n)
    reports = SUITES[args.suite](cfg)
    _emit(render(reports, {"suite": args.suite, "seed": args.seed}), args.output)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


###############################################################################
# compute


def _read_json(path):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        data = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError("input must be a JSON object")
    return data


def _field(data, key):
    if key not in data:
        raise ParseError(f"missing field {key!r}")
    return data[key]


def _element(alg: Algebra, raw, key) -> Element:
    """Coordinates, or a nested matrix for a single ``sym`` algebra."""
    try:
        arr = np.asarray(raw, dtype=float)
        if arr.ndim == 2 and alg.kind == "sym":
            if not np.allclose(arr, arr.T):
                raise ParseError(f"{key} is not symmetric")
            return alg.from_matrix(arr)
        return Element(alg, arr)
    except (TypeError, ValueError, StructuralError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"bad element {key!r}: {exc}") from exc


def _matrix(raw, key) -> np.ndarray:
    try:
        arr = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad matrix {key!r}: {exc}") from exc
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ParseError(f"{key} must be a square matrix")
    return arr


def _spec(alg, data):
    try:
        return bar.BarrierSpec(alg, data.get("c0", 0.0), data.get("weights"))
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad barrier weights: {exc}") from exc


def _compute(what, data) -> dict:
    if what == "factor":
        X, S = ver.factor_nondefective(_matrix(_field(data, "matrix"), "matrix"))
        return {"X": X.tolist(), "S": S.tolist()}
    try:
        alg = algebra_from_dict(_field(data, "algebra"))
    except (StructuralError, ValueError) as exc:
        raise ParseError(str(exc)) from exc
    if what == "polar":
        theta = _matrix(_field(data, "theta"), "theta")
        if theta.shape[0] != alg.dim:
            raise ParseError(f"theta must be {alg.dim} x {alg.dim}")
        res = ver.polar_decompose(LinMap(alg, theta))
        return {"omega": res.omega.matrix.tolist(), "w": res.w.coords.tolist(),
                "residual": res.residual, "orthogonality": res.orthogonality}
    get = lambda key: _element(alg, _field(data, key), key)  # noqa: E731
    if what == "geomean":
        return {"result": geo.geometric_mean(get("a"), get("b")).coords.tolist()}
    if what == "distance":
        return {"result": geo.riemannian_distance(get("a"), get("b"))}
    if what == "scaling-point":
        x, s = get("x"), get("s")
        rep = bar.barrier_scaling_point(_spec(alg, data), x, s)
        return {"result": rep.w.coords.tolist(), "residual": rep.residual}
    if what == "barrier":
        spec, x = _spec(alg, data), get("x")
        return {"value": bar.barrier_value(spec, x),
                "gradient": bar.barrier_gradient(spec, x).coords.tolist(), "nu": spec.nu}
    if what == "hessian-apply":
        spec = _spec(alg, data)
        return {"result": bar.barrier_hessian(spec, get("at"))(get("v")).coords.tolist()}
    raise ParseError(f"unknown quantity {what!r}")


def cmd_compute(args) -> int:
    try:
        data = _read_json(args.input)
        out = _compute(args.what, data)
    except ParseError as exc:
        print(f"symcone: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, ValueError) as exc:
        print(f"symcone: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _emit(dumps_line({"compute": args.what, **out}) + "\n", args.output)
    return EXIT_OK


###############################################################################
# solve


def _load_program(name: str) -> ipm.ConicProgram:
    path = Path(name)
    try:
        if path.exists():
            data = json.loads(path.read_text())
        else:
            key = name[:-5] if name.endswith(".json") else name
            key = key.replace("_", "-")
            if key not in BUNDLED:
                raise ParseError(f"no such file or bundled example: {name}")
            data = json.loads(resources.files("symcone.data").joinpath(BUNDLED[key]).read_text())
        return ipm.ConicProgram.from_dict(data)
    except (OSError, json.JSONDecodeError, StructuralError, AttributeError) as exc:
        raise ParseError(f"cannot load program {name}: {exc}") from exc


def cmd_solve(args) -> int:
    try:
        program = _load_program(args.program)
    except ParseError as exc:
        print(f"symcone: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        rep = ipm.solve(program, tol=args.tol or 1e-8, max_iters=args.max_iters)
    except (InitializationError, ArithmeticError) as exc:
        print(f"symcone: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    lines = [dumps_line(rec) for rec in rep.trace]
    lines.append(dumps_line({"summary": {
        "status": rep.status,
        "iterations": rep.iterations,
        "primal_objective": rep.primal_objective,
        "dual_objective": rep.dual_objective,
        "gap": rep.gap,
        "x": rep.state.x.coords.tolist(),
        "y": rep.state.y.tolist(),
    }}))
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK if rep.status == "optimal" else EXIT_FAIL


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"verify": cmd_verify, "compute": cmd_compute, "solve": cmd_solve}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
