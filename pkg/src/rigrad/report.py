"""Serialization of attribution and certification reports.

JSON carries the full structure; CSV gives one flat row per direction for
spreadsheet use.  All numbers are written as shortest round-trip decimals, so
re-parsing a report reproduces every float bit for bit.  Files are written
atomically (temp file plus rename) so readers never observe partial output.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .attribution import AttributionReport, PathDiagnostics
from .axioms import AxiomCheckSpec, AxiomReport
from .errors import ParseError
from .manifolds import OrthonormalFrame, Point, TangentVector


def _atomic_write(path: str | Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def attribution_report_to_dict(report: AttributionReport) -> dict:
    d = report.diagnostics
    return {
        "method": report.method,
        "manifold": report.manifold_kind,
        "point": report.point.coords.tolist(),
        "base_point": report.base_point.coords.tolist(),
        "frame": [v.components.tolist() for v in report.frame.vectors],
        "attributions": report.attributions.tolist(),
        "eigenvalues": None if report.eigenvalues is None else report.eigenvalues.tolist(),
        "value_at_point": report.value_at_point,
        "value_at_base": report.value_at_base,
        "completeness_residual": report.completeness_residual,
        "error_term": report.error_term,
        "path_is_geodesic": report.path_is_geodesic,
        "diagnostics": {
            "curve_length": d.curve_length,
            "nodes_used": d.nodes_used,
            "refinement_gap": d.refinement_gap,
            "transport_mode": d.transport_mode,
            "transport_steps": d.transport_steps,
            "geodesic_defect": d.geodesic_defect,
        },
    }


def attribution_report_from_dict(data: dict) -> AttributionReport:
    try:
        point = Point(np.array(data["point"], dtype=float))
        base_point = Point(np.array(data["base_point"], dtype=float))
        frame = OrthonormalFrame(
            point,
            tuple(
                TangentVector(point, np.array(row, dtype=float))
                for row in data["frame"]
            ),
        )
        diag = data["diagnostics"]
        eigenvalues = data["eigenvalues"]
        return AttributionReport(
            method=data["method"],
            manifold_kind=data["manifold"],
            point=point,
            base_point=base_point,
            frame=frame,
            attributions=np.array(data["attributions"], dtype=float),
            value_at_point=float(data["value_at_point"]),
            value_at_base=float(data["value_at_base"]),
            completeness_residual=float(data["completeness_residual"]),
            error_term=float(data["error_term"]),
            path_is_geodesic=bool(data["path_is_geodesic"]),
            eigenvalues=None if eigenvalues is None else np.array(eigenvalues, dtype=float),
            diagnostics=PathDiagnostics(
                curve_length=float(diag["curve_length"]),
                nodes_used=int(diag["nodes_used"]),
                refinement_gap=(
                    None if diag["refinement_gap"] is None else float(diag["refinement_gap"])
                ),
                transport_mode=diag["transport_mode"],
                transport_steps=int(diag["transport_steps"]),
                geodesic_defect=(
                    None if diag["geodesic_defect"] is None else float(diag["geodesic_defect"])
                ),
            ),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed attribution report: {exc!r}") from exc


def write_attribution_json(report: AttributionReport, path: str | Path) -> None:
    _atomic_write(path, json.dumps(attribution_report_to_dict(report), indent=2) + "\n")


def read_attribution_json(path: str | Path) -> AttributionReport:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"cannot read report {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"report {path} is not valid JSON: {exc}") from exc
    return attribution_report_from_dict(data)


def attribution_report_csv(report: AttributionReport) -> str:
    """Flat table: index, attribution, eigenvalue (may be empty), components."""
    coord_dim = report.point.coords.size
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    header = ["index", "attribution", "eigenvalue"]
    header += [f"frame_{k}" for k in range(coord_dim)]
    writer.writerow(header)
    for i, vector in enumerate(report.frame.vectors):
        eigen = "" if report.eigenvalues is None else repr(float(report.eigenvalues[i]))
        row = [str(i), repr(float(report.attributions[i])), eigen]
        row += [repr(float(c)) for c in vector.components]
        writer.writerow(row)
    return buffer.getvalue()


def write_attribution_csv(report: AttributionReport, path: str | Path) -> None:
    _atomic_write(path, attribution_report_csv(report))


def parse_attribution_csv(text: str) -> list[dict]:
    """Rows of the flat CSV with floats restored exactly."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty attribution CSV") from None
    frame_cols = [name for name in header if name.startswith("frame_")]
    rows = []
    for record in reader:
        if len(record) != len(header):
            raise ParseError(f"CSV row has {len(record)} cells, expected {len(header)}")
        entry = dict(zip(header, record))
        rows.append(
            {
                "index": int(entry["index"]),
                "attribution": float(entry["attribution"]),
                "eigenvalue": float(entry["eigenvalue"]) if entry["eigenvalue"] else None,
                "frame": [float(entry[c]) for c in frame_cols],
            }
        )
    return rows


# -- certification suite reports -------------------------------------------


def axiom_report_to_dict(report: AxiomReport) -> dict:
    spec = report.spec
    return {
        "axiom": spec.axiom,
        "manifold": spec.manifold_kind,
        "dim": spec.dim,
        "tolerance": spec.tolerance,
        "trials": spec.trials,
        "seed": spec.seed,
        "samples": spec.samples,
        "residuals": list(report.residuals),
        "notes": list(report.notes),
        "aborted": report.aborted,
        "max_residual": report.max_residual,
        "passed": report.passed,
    }


def suite_report_to_dict(reports) -> dict:
    return {
        "passed": all(r.passed for r in reports),
        "checks": [axiom_report_to_dict(r) for r in reports],
    }


def write_suite_json(reports, path: str | Path) -> None:
    _atomic_write(path, json.dumps(suite_report_to_dict(reports), indent=2) + "\n")


def residuals_csv(report: AxiomReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["trial", "residual", "note"])
    for i, (residual, note) in enumerate(zip(report.residuals, report.notes)):
        writer.writerow([str(i), repr(float(residual)), note])
    return buffer.getvalue()


def write_residuals_csv(report: AxiomReport, path: str | Path) -> None:
    _atomic_write(path, residuals_csv(report))
