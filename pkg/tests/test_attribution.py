"""The attribution engine: path integrals, completeness, eigenframes, bounds."""

import math

import numpy as np
import pytest

import rigrad as rg
from rigrad.attribution import PathDiagnostics

from conftest import random_unit_tangent


def make_synthetic_matrix(entries):
    """An attribution matrix with prescribed entries on flat 2-space."""
    man = rg.make_manifold("euclidean", dim=2)
    p = man.point(np.array([0.0, 0.0]))
    o = man.point(np.array([1.0, 0.0]))
    diagnostics = PathDiagnostics(
        curve_length=1.0,
        nodes_used=2,
        refinement_gap=None,
        transport_mode="identity",
        transport_steps=0,
        geodesic_defect=None,
    )
    return rg.AttributionMatrix(
        base=p,
        base_point=o,
        frame=man.orthonormal_frame(p),
        entries=np.array(entries, dtype=float),
        diagnostics=diagnostics,
    )


# -- flat-space closed form ---------------------------------------------------


def test_ig_linear_field_closed_form():
    """For F(x) = <w, x> the straight-line attribution along e_i is
    (x - x')_i * w_i.  Frozen numeric example."""
    man = rg.make_manifold("euclidean", dim=3)
    field = rg.AffineField(man, np.array([2.0, -1.0, 0.5]), bias=1.0)
    x = man.point(np.array([1.0, 2.0, -1.0]))
    x_prime = man.point(np.array([0.0, 0.0, 0.0]))
    report = rg.ig(field, x, x_prime, man.orthonormal_frame(x))
    assert np.max(np.abs(report.attributions - np.array([2.0, -2.0, -0.5]))) <= 1e-12
    assert abs(np.sum(report.attributions) + 0.5) <= 1e-12
    assert report.completeness_residual <= 1e-12
    assert report.error_term == -field.value(x_prime)


def test_rig_reproduces_ig_on_straight_lines(rng):
    man = rg.make_manifold("euclidean", dim=5)
    field = rg.MLPField(man, rg.random_mlp(5, (9, 8), rng))
    for _ in range(5):
        x = man.random_point(rng)
        o = man.random_point(rng)
        frame = man.orthonormal_frame(x)
        a = rg.ig(field, x, o, frame)
        b = rg.rig(field, man, x, o, frame)
        assert np.max(np.abs(a.attributions - b.attributions)) <= 1e-10


def test_ig_rejects_curved_manifolds():
    man = rg.make_manifold("sphere2")
    field = rg.CoordinateField(man, 2)
    p = man.point(np.array([0.0, 0.0, 1.0]))
    o = man.point(np.array([1.0, 0.0, 0.0]))
    with pytest.raises(rg.WrongManifold):
        rg.ig(field, p, o, man.orthonormal_frame(p))


# -- frozen curved-space matrices ---------------------------------------------


def test_sphere_height_field_matrix_oracle():
    """Pole-to-equator quarter circle, F = third coordinate.

    Worked out by hand: transported first frame vector tracks the velocity,
    giving entry 1; the second stays orthogonal to the motion, giving 0.
    """
    man = rg.make_manifold("sphere2")
    field = rg.CoordinateField(man, 2)
    p = man.point(np.array([0.0, 0.0, 1.0]))
    o = man.point(np.array([1.0, 0.0, 0.0]))
    mat = rg.attribution_matrix(field, man, p, o, man.orthonormal_frame(p))
    assert np.max(np.abs(mat.entries - np.diag([1.0, 0.0]))) <= 1e-10
    assert abs(mat.trace() - 1.0) <= 1e-10


def test_halfplane_log_height_matrix_oracle():
    """Vertical geodesic from y=2 down to y=1/2 with F = log y.

    The horizontal frame direction never sees the field change (entry 0);
    the vertical one accumulates the full drop log 4.
    """
    man = rg.make_manifold("half_plane2")
    field = rg.LogHeightField(man)
    p = man.point(np.array([0.0, 2.0]))
    o = man.point(np.array([0.0, 0.5]))
    mat = rg.attribution_matrix(field, man, p, o, man.orthonormal_frame(p))
    expected = np.diag([0.0, 2.0 * math.log(2.0)])
    assert np.max(np.abs(mat.entries - expected)) <= 1e-10


# -- structural properties ------------------------------------------------------


def test_completeness_of_the_diagonal(manifold, rng):
    field = rg.MLPField(manifold, rg.random_mlp(manifold.coord_dim, (6, 5), rng))
    for _ in range(5):
        p = manifold.random_point(rng)
        o = manifold.random_point(rng)
        if manifold.kind == "sphere2" and manifold.dist(p, o) > 2.9:
            continue
        report = rg.rig(field, manifold, p, o, manifold.orthonormal_frame(p))
        delta = report.value_at_point - report.value_at_base
        assert abs(np.sum(report.attributions) - delta) <= 1e-6
        assert report.completeness_residual <= 1e-6
        assert report.error_term == -report.value_at_base


def test_identical_points_give_zero_matrix():
    man = rg.make_manifold("sphere2")
    field = rg.CoordinateField(man, 0)
    p = man.point(np.array([0.0, 1.0, 0.0]))
    mat = rg.attribution_matrix(field, man, p, p, man.orthonormal_frame(p))
    assert np.array_equal(mat.entries, np.zeros((2, 2)))
    report = rg.rig(field, man, p, p, man.orthonormal_frame(p))
    assert np.array_equal(report.attributions, np.zeros(2))
    assert report.completeness_residual == 0.0


def test_bam_on_constant_curve_is_zero(rng):
    man = rg.make_manifold("half_plane2")
    field = rg.LogHeightField(man)
    p = man.random_point(rng)
    curve = man.geodesic_between(p, p)
    u = random_unit_tangent(man, p, rng)
    assert rg.bam_along_curve(field, curve, u) == 0.0


def test_curve_attribution_is_reparametrization_invariant(manifold, rng):
    """The integral only sees the path's image, not its clock."""
    field = rg.MLPField(manifold, rg.random_mlp(manifold.coord_dim, (6, 4), rng))
    p = manifold.random_point(rng)
    o = manifold.random_point(rng)
    if manifold.kind == "sphere2":
        while manifold.dist(p, o) > 2.8:
            o = manifold.random_point(rng)
    geo = manifold.geodesic_between(p, o)

    def squared_pos(t):
        return geo.position(t * t).coords

    def squared_vel(t):
        return 2.0 * t * geo.velocity(t * t).components

    squared = rg.Curve(
        manifold=manifold,
        position_fn=squared_pos,
        velocity_fn=squared_vel,
        start=geo.start,
        end=geo.end,
        is_geodesic=False,
        length=geo.length,
    )
    u = random_unit_tangent(manifold, p, rng)
    a = rg.bam_along_curve(field, geo, u)
    b = rg.bam_along_curve(field, squared, u)
    assert abs(a - b) <= 1e-8 * (1.0 + abs(a))


def test_straight_line_bam_matches_ig(rng):
    man = rg.make_manifold("euclidean", dim=4)
    field = rg.MLPField(man, rg.random_mlp(4, (7,), rng))
    x = man.random_point(rng)
    o = man.random_point(rng)
    frame = man.orthonormal_frame(x)
    line = man.geodesic_between(x, o)
    ig_report = rg.ig(field, x, o, frame)
    for i, u in enumerate(frame.vectors):
        value = rg.bam_along_curve(field, line, u)
        assert abs(value - ig_report.attributions[i]) <= 1e-10


def test_frame_covariance(manifold, rng):
    """Re-expressing the frame through an orthogonal matrix conjugates the
    matrix of the bilinear form."""
    field = rg.MLPField(manifold, rg.random_mlp(manifold.coord_dim, (5, 5), rng))
    p = manifold.random_point(rng)
    o = manifold.random_point(rng)
    if manifold.kind == "sphere2":
        while manifold.dist(p, o) > 2.8:
            o = manifold.random_point(rng)
    frame = manifold.orthonormal_frame(p)
    n = manifold.dim
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    rotated_vectors = tuple(
        rg.TangentVector(p, sum(q[i, j] * frame.vectors[i].components for i in range(n)))
        for j in range(n)
    )
    rotated = rg.OrthonormalFrame(p, rotated_vectors)
    manifold.validate_frame(rotated)

    base = rg.attribution_matrix(field, manifold, p, o, frame)
    moved = rg.attribution_matrix(field, manifold, p, o, rotated)
    conjugated = q.T @ base.entries @ q
    assert np.max(np.abs(moved.entries - conjugated)) <= 1e-9
    assert abs(moved.trace() - base.trace()) <= 1e-9


def test_antipodal_attribution_is_refused():
    man = rg.make_manifold("sphere2")
    field = rg.CoordinateField(man, 2)
    p = man.point(np.array([0.0, 0.0, 1.0]))
    o = man.point(np.array([0.0, 0.0, -1.0]))
    with pytest.raises(rg.CutLocusAmbiguity):
        rg.rig(field, man, p, o, man.orthonormal_frame(p))


def test_frame_at_wrong_point_is_rejected(rng):
    man = rg.make_manifold("sphere2")
    field = rg.CoordinateField(man, 2)
    p = man.point(np.array([0.0, 0.0, 1.0]))
    o = man.point(np.array([1.0, 0.0, 0.0]))
    stray = man.orthonormal_frame(o)
    with pytest.raises(rg.InvalidTangent):
        rg.rig(field, man, p, o, stray)


def test_quadrature_budget_exhaustion_raises(rng):
    man = rg.make_manifold("euclidean", dim=3)
    field = rg.MLPField(man, rg.random_mlp(3, (8, 8), rng, scale=3.0))
    p = man.point(np.array([1.5, -0.5, 2.0]))
    o = man.point(np.array([-2.0, 1.0, -1.5]))
    starving = rg.Quadrature(nodes=2, max_nodes=4, tol=1e-16)
    with pytest.raises(rg.QuadratureNotConverged):
        rg.rig(field, man, p, o, man.orthonormal_frame(p), starving)
    with pytest.raises(rg.QuadratureNotConverged):
        rg.ig(field, p, o, man.orthonormal_frame(p), starving)


def test_generic_curve_report_flags_non_geodesic(rng):
    man = rg.make_manifold("sphere2")
    field = rg.CoordinateField(man, 2)
    loop = man.latitude_loop(math.pi / 3.0)
    p = loop.start
    frame = man.orthonormal_frame(p)
    report = rg.generic_bam_report(field, loop, frame)
    assert report.method == "GenericBAM"
    assert not report.path_is_geodesic
    # no completeness promise off the geodesic, but the residual is reported
    assert np.isfinite(report.completeness_residual)
    assert report.diagnostics.transport_mode == "ode"


def test_report_diagnostics_are_populated(rng):
    man = rg.make_manifold("half_plane2")
    field = rg.LogHeightField(man)
    p = man.point(np.array([-0.4, 1.1]))
    o = man.point(np.array([0.9, 0.3]))
    report = rg.rig(field, man, p, o, man.orthonormal_frame(p))
    d = report.diagnostics
    assert d.nodes_used >= 32
    assert d.transport_mode == "closed-form"
    assert d.geodesic_defect is not None and d.geodesic_defect <= 1e-6
    assert d.curve_length == pytest.approx(man.dist(p, o), abs=1e-12)


# -- symmetrization and eigenframes --------------------------------------------


def test_symmetrize_keeps_diagonal():
    mat = make_synthetic_matrix([[1.0, 2.0], [0.0, -3.0]])
    sym = rg.symmetrize(mat)
    assert np.array_equal(np.diag(sym.entries), np.diag(mat.entries))
    assert np.array_equal(sym.entries, np.array([[1.0, 1.0], [1.0, -3.0]]))


def test_eigen_attributions_order_and_signs():
    mat = make_synthetic_matrix([[1.0, 0.0], [0.0, -3.0]])
    eigen = rg.eigen_attributions(mat)
    # ascending by magnitude
    assert np.array_equal(np.abs(eigen.eigenvalues), np.array([1.0, 3.0]))
    assert eigen.eigenvalues[1] == -3.0
    # first nonzero coefficient of each vector is positive
    for k in range(2):
        column = eigen.coefficients[:, k]
        lead = column[np.flatnonzero(np.abs(column) > 1e-12)[0]]
        assert lead > 0.0
    assert eigen.residual <= 1e-10


def test_eigen_sum_matches_trace(manifold, rng):
    field = rg.MLPField(manifold, rg.random_mlp(manifold.coord_dim, (6,), rng))
    p = manifold.random_point(rng)
    o = manifold.random_point(rng)
    if manifold.kind == "sphere2":
        while manifold.dist(p, o) > 2.8:
            o = manifold.random_point(rng)
    mat = rg.attribution_matrix(field, manifold, p, o, manifold.orthonormal_frame(p))
    eigen = rg.eigen_attributions(mat)
    assert abs(float(np.sum(eigen.eigenvalues)) - mat.trace()) <= 1e-10
    # eigenvectors stay g-orthonormal
    manifold.validate_frame(eigen.frame)


def test_eigen_rig_report_carries_eigenvalues(rng):
    man = rg.make_manifold("half_plane2")
    field = rg.MLPField(man, rg.random_mlp(2, (5, 4), rng))
    p = man.random_point(rng)
    o = man.random_point(rng)
    report = rg.eigen_rig(field, man, p, o, man.orthonormal_frame(p))
    assert report.method == "EigenRIG"
    assert report.eigenvalues is not None
    assert np.array_equal(report.attributions, report.eigenvalues)
    delta = report.value_at_point - report.value_at_base
    assert abs(float(np.sum(report.eigenvalues)) - delta) <= 1e-6


def test_reevaluating_in_the_eigenframe_reproduces_eigenvalues(rng):
    man = rg.make_manifold("sphere2")
    field = rg.MLPField(man, rg.random_mlp(3, (6, 5), rng))
    p = man.random_point(rng)
    o = man.random_point(rng)
    while man.dist(p, o) > 2.8:
        o = man.random_point(rng)
    mat = rg.attribution_matrix(field, man, p, o, man.orthonormal_frame(p))
    eigen = rg.eigen_attributions(mat)
    remat = rg.attribution_matrix(field, man, p, o, eigen.frame)
    resym = 0.5 * (remat.entries + remat.entries.T)
    assert np.max(np.abs(np.diag(resym) - eigen.eigenvalues)) <= 1e-8


def test_bound_check_on_prescribed_spectrum():
    """diag(1, -3): the quadratic form on unit directions never exceeds 3,
    and the top eigendirection attains it."""
    mat = make_synthetic_matrix([[1.0, 0.0], [0.0, -3.0]])
    check = rg.attribution_bound_check(mat, samples=4000, seed=9)
    assert check.largest_abs_eigenvalue == 3.0
    assert check.violations == 0
    assert check.max_ratio <= 1.0 + 1e-12
    top = np.array([0.0, 1.0])
    value = abs(top @ mat.entries @ top)
    assert value == check.largest_abs_eigenvalue


def test_bound_check_is_seed_deterministic():
    mat = make_synthetic_matrix([[0.3, 0.1], [-0.2, 1.7]])
    a = rg.attribution_bound_check(mat, samples=500, seed=42)
    b = rg.attribution_bound_check(mat, samples=500, seed=42)
    assert a.max_ratio == b.max_ratio
    assert a.max_abs_value == b.max_abs_value
