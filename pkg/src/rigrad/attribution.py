"""Attribution of a scalar field's change to tangent directions along paths.

The central object is a bilinear form on the tangent space at the point being
explained: both arguments are parallel-transported along the connecting curve
and paired with the field's differential and the curve velocity,

    entries[i, j] = - integral of dF(U_i(t)) * g(V_j(t), velocity(t)) dt,

where U_i, V_j are the transported frame vectors.  Along minimising geodesics
the diagonal of this matrix is the per-direction attribution; its trace
accounts for the total change F(p) - F(o).  The sign convention follows from
orienting the curve from the explained point p at t=0 to the base point o at
t=1; the flat-space method integrates base to input instead, and the minus
sign makes the two agree.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    EigenSolverFailure,
    InvalidCurve,
    InvalidTangent,
    QuadratureNotConverged,
    WrongManifold,
)
from .fields import ScalarField, require_same_space
from .manifolds import Curve, Manifold, OrthonormalFrame, Point, TangentVector
from .manifolds.diagnostics import geodesic_residual
from .manifolds.transport import transport_along
from .quadrature import Quadrature

DEFAULT_QUADRATURE = Quadrature()

METHOD_IG = "IG"
METHOD_RIG = "RIG"
METHOD_GENERIC_BAM = "GenericBAM"
METHOD_EIGEN_RIG = "EigenRIG"


@dataclass(frozen=True)
class PathDiagnostics:
    """How a path integral was computed."""

    curve_length: float
    nodes_used: int
    refinement_gap: float | None
    transport_mode: str
    transport_steps: int
    geodesic_defect: float | None


@dataclass(frozen=True)
class AttributionMatrix:
    """The bilinear attribution form evaluated on an orthonormal frame."""

    base: Point
    base_point: Point
    frame: OrthonormalFrame
    entries: np.ndarray
    diagnostics: PathDiagnostics

    def trace(self) -> float:
        return float(np.trace(self.entries))


@dataclass(frozen=True)
class EigenAttribution:
    """Spectral data of the symmetrized attribution form."""

    eigenvalues: np.ndarray
    frame: OrthonormalFrame
    coefficients: np.ndarray  # column k holds eigenvector k in the source frame
    residual: float


@dataclass(frozen=True)
class BoundCheckReport:
    """Monte Carlo audit of the extremal-eigenvalue bound on |form(u, u)|."""

    samples: int
    seed: int
    violations: int
    max_ratio: float
    max_abs_value: float
    largest_abs_eigenvalue: float


@dataclass(frozen=True)
class AttributionReport:
    """Per-direction attributions plus the bookkeeping that certifies them."""

    method: str
    manifold_kind: str
    point: Point
    base_point: Point
    frame: OrthonormalFrame
    attributions: np.ndarray
    value_at_point: float
    value_at_base: float
    completeness_residual: float
    error_term: float
    path_is_geodesic: bool
    eigenvalues: np.ndarray | None
    diagnostics: PathDiagnostics


def _check_frame(manifold: Manifold, p: Point, frame: OrthonormalFrame) -> None:
    if not np.array_equal(frame.base.coords, p.coords):
        raise InvalidTangent("frame must be based at the point being explained")
    manifold.validate_frame(frame)


def _node_tables(
    field: ScalarField,
    manifold: Manifold,
    curve: Curve,
    vectors,
    ts: np.ndarray,
):
    """Tables a[i, k] = dF(U_i(t_k)) and b[j, k] = g(U_j(t_k), velocity(t_k))."""
    moved, mode, steps = transport_along(manifold, curve, list(vectors), list(ts))
    n = len(vectors)
    a = np.zeros((n, ts.size))
    b = np.zeros((n, ts.size))
    for k, t in enumerate(ts):
        position = curve.position(float(t))
        coord_grad = field.coord_gradient(position)
        vel = curve.velocity_fn(float(t))
        g_vel = manifold.metric_at(position) @ vel
        for i, vector in enumerate(moved[k]):
            a[i, k] = coord_grad @ vector.components
            b[i, k] = vector.components @ g_vel
    return a, b, mode, steps


def _form_entries(field, manifold, curve, vectors, quadrature):
    """Quadrature loop for the bilinear form; returns (entries, diagnostics)."""
    schedule = quadrature.schedule()
    previous = None
    gap = None
    for count in schedule:
        ts, weights = quadrature.nodes_weights(count)
        a, b, mode, steps = _node_tables(field, manifold, curve, vectors, ts)
        entries = -np.einsum("k,ik,jk->ij", weights, a, b)
        if previous is not None:
            gap = float(np.max(np.abs(entries - previous)))
            if gap < quadrature.tol:
                return entries, count, gap, mode, steps
        previous = entries
    if quadrature.refine and len(schedule) > 1:
        raise QuadratureNotConverged(
            f"entries still moving by {gap:.3e} at {schedule[-1]} nodes "
            f"(tol {quadrature.tol:.1e})"
        )
    return previous, schedule[-1], gap, mode, steps


def _zero_diagnostics() -> PathDiagnostics:
    return PathDiagnostics(
        curve_length=0.0,
        nodes_used=0,
        refinement_gap=None,
        transport_mode="identity",
        transport_steps=0,
        geodesic_defect=0.0,
    )


def attribution_matrix(
    field: ScalarField,
    manifold: Manifold,
    p: Point,
    o: Point,
    frame: OrthonormalFrame,
    quadrature: Quadrature = DEFAULT_QUADRATURE,
) -> AttributionMatrix:
    """Evaluate the attribution form on ``frame`` along the minimising geodesic.

    Raises CutLocusAmbiguity when the geodesic is not unique and
    QuadratureNotConverged when refinement exhausts its node budget.
    """
    require_same_space(field, manifold)
    p = manifold.validate_point(p)
    o = manifold.validate_point(o)
    _check_frame(manifold, p, frame)

    n = len(frame)
    if np.array_equal(p.coords, o.coords):
        return AttributionMatrix(
            base=p,
            base_point=o,
            frame=frame,
            entries=np.zeros((n, n)),
            diagnostics=_zero_diagnostics(),
        )

    curve = manifold.geodesic_between(p, o)
    entries, nodes_used, gap, mode, steps = _form_entries(
        field, manifold, curve, frame.vectors, quadrature
    )
    diagnostics = PathDiagnostics(
        curve_length=curve.length,
        nodes_used=nodes_used,
        refinement_gap=gap,
        transport_mode=mode,
        transport_steps=steps,
        geodesic_defect=geodesic_residual(manifold, curve),
    )
    return AttributionMatrix(
        base=p, base_point=o, frame=frame, entries=entries, diagnostics=diagnostics
    )


def bam_along_curve(
    field: ScalarField,
    curve: Curve,
    u: TangentVector,
    quadrature: Quadrature = DEFAULT_QUADRATURE,
) -> float:
    """Attribution to direction ``u`` along an arbitrary smooth curve."""
    manifold = curve.manifold
    require_same_space(field, manifold)
    if not np.array_equal(u.base.coords, curve.start.coords):
        raise InvalidTangent("u must be based at the curve's start point")
    if np.array_equal(curve.start.coords, curve.end.coords) and curve.length == 0.0:
        return 0.0
    entries, _, _, _, _ = _form_entries(field, manifold, curve, [u], quadrature)
    return float(entries[0, 0])


def rig(
    field: ScalarField,
    manifold: Manifold,
    p: Point,
    o: Point,
    frame: OrthonormalFrame,
    quadrature: Quadrature = DEFAULT_QUADRATURE,
) -> AttributionReport:
    """Per-direction attributions along the minimising geodesic from p to o."""
    matrix = attribution_matrix(field, manifold, p, o, frame, quadrature)
    return _report_from_matrix(METHOD_RIG, field, manifold, matrix, eigen=None)


def eigen_rig(
    field: ScalarField,
    manifold: Manifold,
    p: Point,
    o: Point,
    frame: OrthonormalFrame,
    quadrature: Quadrature = DEFAULT_QUADRATURE,
) -> AttributionReport:
    """Attributions in the eigenframe of the symmetrized form.

    The reported values are the eigenvalues; re-running the plain method in
    the returned frame reproduces them through the quadratic form.
    """
    matrix = attribution_matrix(field, manifold, p, o, frame, quadrature)
    eigen = eigen_attributions(matrix)
    return _report_from_matrix(METHOD_EIGEN_RIG, field, manifold, matrix, eigen=eigen)


def generic_bam_report(
    field: ScalarField,
    curve: Curve,
    frame: OrthonormalFrame,
    quadrature: Quadrature = DEFAULT_QUADRATURE,
) -> AttributionReport:
    """Per-direction attributions along a caller-supplied curve.

    Off-geodesic paths do not promise completeness; the residual against
    F(start) - F(end) is still reported so callers can judge it.
    """
    manifold = curve.manifold
    require_same_space(field, manifold)
    _check_frame(manifold, curve.start, frame)
    entries, nodes_used, gap, mode, steps = _form_entries(
        field, manifold, curve, frame.vectors, quadrature
    )
    diagnostics = PathDiagnostics(
        curve_length=curve.length,
        nodes_used=nodes_used,
        refinement_gap=gap,
        transport_mode=mode,
        transport_steps=steps,
        geodesic_defect=None,
    )
    matrix = AttributionMatrix(
        base=curve.start,
        base_point=curve.end,
        frame=frame,
        entries=entries,
        diagnostics=diagnostics,
    )
    return _report_from_matrix(
        METHOD_GENERIC_BAM,
        field,
        manifold,
        matrix,
        eigen=None,
        path_is_geodesic=curve.is_geodesic,
    )


def _report_from_matrix(
    method: str,
    field: ScalarField,
    manifold: Manifold,
    matrix: AttributionMatrix,
    eigen: EigenAttribution | None,
    path_is_geodesic: bool = True,
) -> AttributionReport:
    value_p = field.value(matrix.base)
    value_o = field.value(matrix.base_point)
    if eigen is None:
        frame = matrix.frame
        values = np.diag(matrix.entries).copy()
        eigenvalues = None
    else:
        frame = eigen.frame
        values = np.array(eigen.eigenvalues)
        eigenvalues = np.array(eigen.eigenvalues)
    residual = abs(float(np.sum(values)) - (value_p - value_o))
    return AttributionReport(
        method=method,
        manifold_kind=manifold.kind,
        point=matrix.base,
        base_point=matrix.base_point,
        frame=frame,
        attributions=values,
        value_at_point=value_p,
        value_at_base=value_o,
        completeness_residual=residual,
        error_term=-value_o,
        path_is_geodesic=path_is_geodesic,
        eigenvalues=eigenvalues,
        diagnostics=matrix.diagnostics,
    )


def ig(
    field: ScalarField,
    x: Point,
    x_prime: Point,
    basis: OrthonormalFrame,
    quadrature: Quadrature = DEFAULT_QUADRATURE,
) -> AttributionReport:
    """Straight-line attributions in flat space, integrating base to input."""
    manifold = field.manifold
    if manifold.kind != "euclidean":
        raise WrongManifold("the straight-line method is defined on flat space only")
    x = manifold.validate_point(x)
    x_prime = manifold.validate_point(x_prime)
    _check_frame(manifold, x, basis)

    delta = x.coords - x_prime.coords
    directions = basis.component_matrix()
    gaps = directions @ delta

    schedule = quadrature.schedule()
    previous = None
    gap = None
    for count in schedule:
        ts, weights = quadrature.nodes_weights(count)
        grads = np.array(
            [
                field.coord_gradient(Point(x_prime.coords + t * delta))
                for t in ts
            ]
        )
        integrals = (directions @ grads.T) @ weights
        values = gaps * integrals
        if previous is not None:
            gap = float(np.max(np.abs(values - previous)))
            if gap < quadrature.tol:
                previous = values
                break
        previous = values
    else:
        if quadrature.refine and len(schedule) > 1:
            raise QuadratureNotConverged(
                f"attributions still moving by {gap:.3e} at {schedule[-1]} nodes"
            )
        count = schedule[-1]

    value_x = field.value(x)
    value_base = field.value(x_prime)
    residual = abs(float(np.sum(previous)) - (value_x - value_base))
    diagnostics = PathDiagnostics(
        curve_length=float(np.linalg.norm(delta)),
        nodes_used=count,
        refinement_gap=gap,
        transport_mode="identity",
        transport_steps=0,
        geodesic_defect=None,
    )
    return AttributionReport(
        method=METHOD_IG,
        manifold_kind=manifold.kind,
        point=x,
        base_point=x_prime,
        frame=basis,
        attributions=previous,
        value_at_point=value_x,
        value_at_base=value_base,
        completeness_residual=residual,
        error_term=-value_base,
        path_is_geodesic=True,
        eigenvalues=None,
        diagnostics=diagnostics,
    )


def symmetrize(matrix: AttributionMatrix) -> AttributionMatrix:
    """Half-sum with the transpose; the diagonal is untouched."""
    return replace(matrix, entries=0.5 * (matrix.entries + matrix.entries.T))


def eigen_attributions(matrix: AttributionMatrix) -> EigenAttribution:
    """Eigendecomposition of the symmetrized form.

    Eigenvalues are sorted by absolute value, ascending; each eigenvector's
    sign is fixed so its first nonzero coefficient is positive, and the
    vectors are returned as tangent vectors through the source frame.
    """
    sym = 0.5 * (matrix.entries + matrix.entries.T)
    try:
        values, vectors = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverFailure(f"symmetric eigensolver failed: {exc}") from exc

    order = np.argsort(np.abs(values), kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    for k in range(vectors.shape[1]):
        column = vectors[:, k]
        nonzero = np.flatnonzero(np.abs(column) > 1e-12 * np.max(np.abs(column)))
        if nonzero.size and column[nonzero[0]] < 0.0:
            vectors[:, k] = -column

    residual = float(np.max(np.abs(sym @ vectors - vectors * values))) if values.size else 0.0
    basis = matrix.frame.component_matrix()
    tangents = tuple(
        TangentVector(matrix.base, vectors[:, k] @ basis)
        for k in range(vectors.shape[1])
    )
    return EigenAttribution(
        eigenvalues=values,
        frame=OrthonormalFrame(matrix.base, tangents),
        coefficients=vectors,
        residual=residual,
    )


def attribution_bound_check(
    matrix: AttributionMatrix, samples: int, seed: int
) -> BoundCheckReport:
    """Sample unit directions and compare |form(u, u)| to the top eigenvalue."""
    if samples < 1:
        raise ValueError("samples must be positive")
    eigen = eigen_attributions(matrix)
    bound = float(np.abs(eigen.eigenvalues[-1])) if eigen.eigenvalues.size else 0.0
    sym = 0.5 * (matrix.entries + matrix.entries.T)
    rng = np.random.default_rng(seed)
    n = sym.shape[0]
    worst_value = 0.0
    violations = 0
    for _ in range(samples):
        direction = rng.standard_normal(n)
        norm = np.linalg.norm(direction)
        if norm < 1e-12:
            continue
        direction /= norm
        value = abs(float(direction @ sym @ direction))
        worst_value = max(worst_value, value)
        if value > bound + 1e-10:
            violations += 1
    ratio = worst_value / bound if bound > 0.0 else (1.0 if worst_value > 0.0 else 0.0)
    return BoundCheckReport(
        samples=samples,
        seed=seed,
        violations=violations,
        max_ratio=ratio,
        max_abs_value=worst_value,
        largest_abs_eigenvalue=bound,
    )
