"""Parallel transport along curves.

Three routes, picked automatically:

* flat space: transport leaves components unchanged along any curve;
* geodesics on the 2-manifolds: exact velocity/normal frame rotation;
* everything else: Runge-Kutta integration of the transport equation in a
  chart, with step doubling until successive refinements agree.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import InvalidCurve, InvalidTangent
from .base import Curve, Manifold, Point, TangentVector

ODE_TOL = 1e-9
ODE_MAX_STEPS = 4096
CURVE_CHART_SAMPLES = 65


def _check_bases(curve: Curve, vectors: Sequence[TangentVector]) -> None:
    for u in vectors:
        if not np.array_equal(u.base.coords, curve.start.coords):
            raise InvalidTangent("vectors must be based at the curve's start point")


def _clamp_param(t: float) -> float:
    if not -1e-9 <= t <= 1.0 + 1e-9:
        raise InvalidCurve(f"transport parameter {t} outside [0, 1]")
    return min(max(t, 0.0), 1.0)


def _identity_transport(curve: Curve, vectors, ts):
    out = []
    for t in ts:
        p = curve.position(t)
        out.append([TangentVector(p, np.array(u.components)) for u in vectors])
    return out


def _geodesic_frame(manifold: Manifold, curve: Curve, t: float):
    """g-orthonormal (tangent, normal) pair along a 2-manifold geodesic."""
    vel = curve.velocity(t)
    speed = manifold.norm(vel)
    if speed < 1e-13:
        raise InvalidCurve("geodesic transport needs a nonvanishing velocity")
    tangent = vel.components / speed
    p = vel.base
    if manifold.kind == "sphere2":
        normal = np.cross(p.coords, tangent)
    else:
        normal = np.array([-tangent[1], tangent[0]])
    return p, tangent, normal


def _closed_form_transport(manifold: Manifold, curve: Curve, vectors, ts):
    _, t0, n0 = _geodesic_frame(manifold, curve, 0.0)
    u0 = TangentVector(curve.start, t0)
    w0 = TangentVector(curve.start, n0)
    coeffs = [
        (manifold.inner(u, u0), manifold.inner(u, w0)) for u in vectors
    ]
    out = []
    for t in ts:
        p, tan, nor = _geodesic_frame(manifold, curve, t)
        out.append(
            [TangentVector(p, a * tan + b * nor) for a, b in coeffs]
        )
    return out


def ode_transport(
    manifold: Manifold,
    curve: Curve,
    components: np.ndarray,
    t0: float,
    t1: float,
    steps: int,
    chart=None,
) -> np.ndarray:
    """Integrate the transport equation with ``steps`` uniform RK4 steps.

    ``components`` has one row of chart components per vector; the returned
    array holds the transported chart components at t1.
    """
    if chart is None:
        samples = [curve.position(t) for t in np.linspace(0.0, 1.0, CURVE_CHART_SAMPLES)]
        chart = manifold.chart_for_curve(samples)

    def rhs(t: float, w: np.ndarray) -> np.ndarray:
        p = curve.position(t)
        x = chart.to_chart(p)
        xdot = chart.pull(p, curve.velocity_fn(t))
        gamma = chart.christoffel(x)
        return -np.einsum("kij,i,...j->...k", gamma, xdot, w)

    w = np.array(components, dtype=float)
    h = (t1 - t0) / steps
    t = t0
    for _ in range(steps):
        k1 = rhs(t, w)
        k2 = rhs(t + 0.5 * h, w + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, w + 0.5 * h * k2)
        k4 = rhs(t + h, w + h * k3)
        w = w + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += h
    return w


def _ode_pass(manifold, curve, chart, w0, ts_sorted, total_steps):
    """One integration sweep hitting every target parameter in order."""
    results = []
    w = np.array(w0)
    prev = 0.0
    for t in ts_sorted:
        if t > prev:
            seg_steps = max(1, int(np.ceil((t - prev) * total_steps)))
            w = ode_transport(manifold, curve, w, prev, t, seg_steps, chart)
            prev = t
        results.append(np.array(w))
    return results


def _ode_route(manifold, curve, vectors, ts, steps):
    samples = [curve.position(t) for t in np.linspace(0.0, 1.0, CURVE_CHART_SAMPLES)]
    chart = manifold.chart_for_curve(samples)
    w0 = np.array([chart.pull(curve.start, u.components) for u in vectors])

    order = np.argsort(ts, kind="stable")
    ts_sorted = [ts[i] for i in order]

    n = steps
    coarse = _ode_pass(manifold, curve, chart, w0, ts_sorted, n)
    while True:
        fine = _ode_pass(manifold, curve, chart, w0, ts_sorted, 2 * n)
        gap = max(
            float(np.max(np.abs(a - b))) if a.size else 0.0
            for a, b in zip(coarse, fine)
        )
        n *= 2
        if gap < ODE_TOL or n >= ODE_MAX_STEPS:
            break
        coarse = fine

    out_sorted = []
    for t, w in zip(ts_sorted, fine):
        p = curve.position(t)
        x = chart.to_chart(p)
        out_sorted.append(
            [manifold.project_tangent(p, chart.push(x, row)) for row in w]
        )
    out = [None] * len(ts)
    for pos, idx in enumerate(order):
        out[idx] = out_sorted[pos]
    return out, n


def transport_along(
    manifold: Manifold,
    curve: Curve,
    vectors: Sequence[TangentVector],
    ts: Sequence[float],
    steps: int | None = None,
):
    """Parallel transport of ``vectors`` from curve(0) to each parameter in ``ts``.

    Returns (results, mode, steps_used) where results[i][j] is vector j moved
    to curve(ts[i]), mode is one of "identity", "closed-form" or "ode", and
    steps_used is the final RK4 step count (0 off the ODE route).
    """
    _check_bases(curve, vectors)
    ts = [_clamp_param(float(t)) for t in ts]
    if not vectors or not ts:
        return [[] for _ in ts], "identity", 0

    if manifold.kind == "euclidean":
        return _identity_transport(curve, vectors, ts), "identity", 0

    if curve.is_geodesic:
        if curve.length < 1e-13:
            return _identity_transport(curve, vectors, ts), "closed-form", 0
        return _closed_form_transport(manifold, curve, vectors, ts), "closed-form", 0

    results, steps_used = _ode_route(
        manifold, curve, vectors, ts, steps or manifold.transport_steps
    )
    return results, "ode", steps_used
