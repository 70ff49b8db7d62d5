"""Command-line front end.

Three subcommands:

``attribute``
    Compute per-direction attributions for a field between two points and
    write the report as JSON and CSV.

``verify``
    Run the certification suite (or a configured subset) and report one
    pass/fail line per check.

``compare``
    Side-by-side table: straight-line versus geodesic attributions on flat
    space, or default-frame versus eigenframe attributions elsewhere.

Exit codes: 0 success, 1 configuration or validation errors (and failed
verification), 2 geodesic ambiguity between cut points, 3 quadrature
refinement exhausted.  Argument errors also exit 1 so code 2 stays
unambiguous.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import report as report_io
from .attribution import DEFAULT_QUADRATURE, eigen_rig, ig, rig
from .axioms import DEFAULT_SEED, default_suite, run_check, suite_from_dict
from .errors import (
    CutLocusAmbiguity,
    DimensionMismatch,
    EigenSolverFailure,
    InvalidCurve,
    InvalidIsometry,
    InvalidPoint,
    InvalidTangent,
    ParseError,
    QuadratureNotConverged,
    WrongManifold,
)
from .fields import (
    AffineField,
    CoordinateField,
    GaussianBumpField,
    LogHeightField,
    MLPField,
    ScalarField,
    mlp_from_file,
)
from .manifolds import KINDS, Manifold, OrthonormalFrame, make_manifold, manifold_from_file
from .quadrature import Quadrature

SPHERE_ENTRY_TOL = 1e-6

CONFIG_ERRORS = (
    ParseError,
    InvalidPoint,
    InvalidTangent,
    InvalidCurve,
    InvalidIsometry,
    WrongManifold,
    DimensionMismatch,
    EigenSolverFailure,
)


class _Parser(argparse.ArgumentParser):
    """Argument errors raise ParseError so they exit 1, not argparse's 2."""

    def error(self, message):
        raise ParseError(message)


def _parse_vector(text: str, label: str) -> np.ndarray:
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError:
        raise ParseError(f"{label} must be comma-separated decimals, got {text!r}") from None
    if not values:
        raise ParseError(f"{label} is empty")
    return np.array(values, dtype=float)


def _build_manifold(args, point_hint: np.ndarray | None) -> Manifold:
    """Resolve --manifold: a kind name, kind:dim, or a config file path."""
    spec = args.manifold
    steps = args.transport_steps
    kind, _, suffix = spec.partition(":")
    if kind in KINDS:
        if suffix:
            try:
                dim = int(suffix)
            except ValueError:
                raise ParseError(f"bad dimension suffix in --manifold {spec!r}") from None
        elif kind == "euclidean":
            if point_hint is None:
                raise ParseError("euclidean manifold needs a dimension (use euclidean:n)")
            dim = point_hint.size
        else:
            dim = None
        return make_manifold(kind, dim=dim, transport_steps=steps or 256)
    path = Path(spec)
    if not path.exists():
        raise ParseError(f"--manifold {spec!r} is neither a known kind nor a file")
    manifold = manifold_from_file(path)
    if steps:
        manifold = make_manifold(
            manifold.kind, dim=manifold.dim, transport_steps=steps, bvp_tol=manifold.bvp_tol
        )
    return manifold


def _parse_point(manifold: Manifold, text: str, label: str):
    coords = _parse_vector(text, label)
    if manifold.kind == "sphere2":
        norm = float(np.linalg.norm(coords))
        if abs(norm - 1.0) > SPHERE_ENTRY_TOL:
            raise InvalidPoint(
                f"{label} has norm {norm:.9f}; sphere points must be within "
                f"{SPHERE_ENTRY_TOL:g} of unit length"
            )
        if abs(norm - 1.0) > 1e-12:
            coords = coords / norm
    return manifold.point(coords)


def _parse_field(manifold: Manifold, args) -> ScalarField:
    spec = args.field
    name, _, rest = spec.partition(":")
    if name == "mlp":
        if not args.weights:
            raise ParseError("--weights is required with --field mlp")
        return MLPField(manifold, mlp_from_file(args.weights))
    if name == "height":
        return CoordinateField(manifold, manifold.coord_dim - 1)
    if name == "coordinate":
        try:
            index = int(rest)
        except ValueError:
            raise ParseError(f"--field coordinate needs an index, got {spec!r}") from None
        return CoordinateField(manifold, index)
    if name == "log_height":
        return LogHeightField(manifold)
    if name == "affine":
        parts = rest.split(":")
        if not parts or not parts[0]:
            raise ParseError("--field affine needs weights, e.g. affine:1,0,-2 or affine:1,0:0.5")
        weights = _parse_vector(parts[0], "affine weights")
        bias = float(parts[1]) if len(parts) > 1 else 0.0
        return AffineField(manifold, weights, bias)
    if name == "bump":
        parts = rest.split(":")
        if not parts or not parts[0]:
            raise ParseError("--field bump needs a center, e.g. bump:0,0,1 or bump:0,0,1:0.5")
        center = _parse_point(manifold, parts[0], "bump center")
        width = float(parts[1]) if len(parts) > 1 else 1.0
        return GaussianBumpField(manifold, center, width)
    raise ParseError(
        f"unknown field {spec!r}; expected one of height, coordinate:k, log_height, "
        "affine:w[:b], bump:center[:width], mlp"
    )


def _parse_frame(manifold: Manifold, p, spec: str) -> OrthonormalFrame | None:
    """Returns the frame to use, or None when the eigenframe was requested."""
    if spec == "eigen":
        return None
    if spec == "default":
        return manifold.orthonormal_frame(p)
    rows = [
        _parse_vector(chunk, "frame vector") for chunk in spec.split(";") if chunk.strip()
    ]
    if not rows:
        raise ParseError("--frame expects 'default', 'eigen', or semicolon-separated vectors")
    vectors = tuple(manifold.tangent(p, row) for row in rows)
    frame = OrthonormalFrame(p, vectors)
    manifold.validate_frame(frame)
    return frame


def _quadrature(args) -> Quadrature:
    if args.quadrature_nodes:
        return Quadrature(nodes=args.quadrature_nodes)
    return DEFAULT_QUADRATURE


def _summary_lines(report) -> list[str]:
    lines = [
        f"method:               {report.method}",
        f"manifold:             {report.manifold_kind}",
        f"value at point:       {report.value_at_point!r}",
        f"value at base point:  {report.value_at_base!r}",
        f"error term:           {report.error_term!r}",
    ]
    for i, value in enumerate(report.attributions):
        lines.append(f"attribution[{i}]:       {float(value)!r}")
    lines.append(f"trace:                {float(np.sum(report.attributions))!r}")
    lines.append(f"completeness residual: {report.completeness_residual:.3e}")
    d = report.diagnostics
    lines.append(
        "diagnostics:          "
        f"nodes={d.nodes_used} transport={d.transport_mode}({d.transport_steps}) "
        f"geodesic_defect={'n/a' if d.geodesic_defect is None else format(d.geodesic_defect, '.3e')}"
    )
    return lines


def _emit_report(report, args, out) -> None:
    if args.out:
        base = Path(args.out)
        if base.suffix in (".json", ".csv"):
            base = base.with_suffix("")
        json_path = base.with_suffix(".json")
        csv_path = base.with_suffix(".csv")
        report_io.write_attribution_json(report, json_path)
        report_io.write_attribution_csv(report, csv_path)
        print(f"wrote {json_path} and {csv_path}", file=out)
        for line in _summary_lines(report):
            print(line, file=out)
    elif args.format == "csv":
        out.write(report_io.attribution_report_csv(report))
    else:
        print(json.dumps(report_io.attribution_report_to_dict(report), indent=2), file=out)


def cmd_attribute(args, out) -> int:
    p_raw = _parse_vector(args.p, "--p")
    manifold = _build_manifold(args, p_raw)
    p = _parse_point(manifold, args.p, "--p")
    o = _parse_point(manifold, args.o, "--o")
    field = _parse_field(manifold, args)
    quad = _quadrature(args)
    frame = _parse_frame(manifold, p, args.frame)
    if frame is None:
        report = eigen_rig(field, manifold, p, o, manifold.orthonormal_frame(p), quad)
    else:
        report = rig(field, manifold, p, o, frame, quad)
    _emit_report(report, args, out)
    return 0


def cmd_compare(args, out) -> int:
    p_raw = _parse_vector(args.p, "--p")
    manifold = _build_manifold(args, p_raw)
    if args.method == "ig" and manifold.kind != "euclidean":
        raise WrongManifold(
            "the straight-line method is defined on flat space only; "
            f"--manifold is {manifold.kind}"
        )
    p = _parse_point(manifold, args.p, "--p")
    o = _parse_point(manifold, args.o, "--o")
    field = _parse_field(manifold, args)
    quad = _quadrature(args)
    frame = manifold.orthonormal_frame(p)

    if manifold.kind == "euclidean":
        left = ig(field, p, o, frame, quad)
        right = rig(field, manifold, p, o, frame, quad)
        print("direction  straight-line        geodesic             gap", file=out)
        gaps = np.abs(left.attributions - right.attributions)
        for i in range(len(frame)):
            print(
                f"{i:>9}  {left.attributions[i]: .12e}  "
                f"{right.attributions[i]: .12e}  {gaps[i]:.3e}",
                file=out,
            )
        print(f"max per-direction gap: {float(np.max(gaps)) if gaps.size else 0.0:.3e}", file=out)
    else:
        left = rig(field, manifold, p, o, frame, quad)
        right = eigen_rig(field, manifold, p, o, frame, quad)
        print("direction  default-frame        eigenframe", file=out)
        for i in range(len(frame)):
            print(
                f"{i:>9}  {left.attributions[i]: .12e}  {right.attributions[i]: .12e}",
                file=out,
            )
        trace_left = float(np.sum(left.attributions))
        trace_right = float(np.sum(right.attributions))
        print(f"trace (default frame): {trace_left: .12e}", file=out)
        print(f"trace (eigenframe):    {trace_right: .12e}", file=out)
        print(f"trace gap: {abs(trace_left - trace_right):.3e}", file=out)

    if args.out:
        payload = {
            "first": report_io.attribution_report_to_dict(left),
            "second": report_io.attribution_report_to_dict(right),
        }
        report_io._atomic_write(args.out, json.dumps(payload, indent=2) + "\n")
        print(f"wrote {args.out}", file=out)
    return 0


def cmd_verify(args, out) -> int:
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise ParseError(f"cannot read {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ParseError(f"{args.config} is not valid JSON: {exc}") from exc
        specs = suite_from_dict(data)
    else:
        specs = default_suite(args.seed)

    reports = []
    all_passed = True
    for spec in specs:
        result = run_check(spec)
        reports.append(result)
        all_passed = all_passed and result.passed
        status = "PASS" if result.passed else "FAIL"
        print(
            f"[{status}] {spec.axiom:<20} {spec.manifold_kind:<12} "
            f"max_residual={result.max_residual:.3e} tolerance={spec.tolerance:g} "
            f"trials={len(result.residuals)} aborted={result.aborted}",
            file=out,
        )

    if args.out:
        directory = Path(args.out)
        directory.mkdir(parents=True, exist_ok=True)
        report_io.write_suite_json(reports, directory / "suite.json")
        for i, result in enumerate(reports):
            name = f"check_{i:02d}_{result.spec.axiom}_{result.spec.manifold_kind}.csv"
            report_io.write_residuals_csv(result, directory / name)
        print(f"wrote {directory}/suite.json and per-check residual tables", file=out)

    if not all_passed:
        failing = [r.spec.axiom for r in reports if not r.passed]
        print(f"failing checks: {', '.join(failing)}", file=out)
        return 1
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="rigrad", description=__doc__, add_help=True)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--manifold", required=True, help="kind, kind:dim, or config file")
        p.add_argument("--field", required=True, help="builtin field id (see docs) or mlp")
        p.add_argument("--weights", help="MLP weights file (JSON), for --field mlp")
        p.add_argument("--p", required=True, help="explained point, comma-separated")
        p.add_argument("--o", required=True, help="base point, comma-separated")
        p.add_argument("--quadrature-nodes", type=int, default=0)
        p.add_argument("--transport-steps", type=int, default=0)
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--out", help="output path (attribute writes .json and .csv)")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    attribute = sub.add_parser("attribute", help="compute attributions between two points")
    common(attribute)
    attribute.add_argument(
        "--frame", default="default", help="default | eigen | 'v1;v2;...' components"
    )

    compare = sub.add_parser("compare", help="compare attribution methods or frames")
    common(compare)
    compare.add_argument("--method", choices=("ig", "rig"), default=None)

    verify = sub.add_parser("verify", help="run the certification suite")
    verify.add_argument("--config", help="JSON file with a 'checks' list")
    verify.add_argument("--seed", type=int, default=DEFAULT_SEED)
    verify.add_argument("--out", help="directory for the consolidated report")
    return parser


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "attribute":
            return cmd_attribute(args, out)
        if args.command == "compare":
            return cmd_compare(args, out)
        return cmd_verify(args, out)
    except CutLocusAmbiguity as exc:
        print(f"CutLocusAmbiguity: {exc}", file=sys.stderr)
        return 2
    except QuadratureNotConverged as exc:
        print(f"QuadratureNotConverged: {exc}", file=sys.stderr)
        return 3
    except CONFIG_ERRORS as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
