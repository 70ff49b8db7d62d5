"""The hyperbolic upper half-plane with metric (dx^2 + dy^2) / y^2.

Geodesics are vertical rays and semicircles centred on the x-axis.  Both
are handled through the unit-speed parameter s with sinh(s) = (c - x) / y,
which stays well conditioned for nearby points where the classical arccosh
distance formula loses digits.
"""

from __future__ import annotations

import numpy as np

from ..errors import DimensionMismatch, InvalidPoint
from .base import (
    Chart,
    Curve,
    IdentityChart,
    Manifold,
    OrthonormalFrame,
    Point,
    TangentVector,
    constant_curve,
    pin_endpoints,
)

# Below this fraction of the coordinate scale a horizontal offset is treated
# as zero and the geodesic as a vertical ray; the semicircle construction
# divides by the offset and would otherwise blow up.
VERTICAL_CUTOFF = 1e-13


def _sech(s: float) -> float:
    """Overflow-free 1/cosh."""
    e = np.exp(-abs(s))
    return 2.0 * e / (1.0 + e * e)


def _christoffel(x: np.ndarray) -> np.ndarray:
    y = float(x[1])
    gamma = np.zeros((2, 2, 2))
    inv_y = 1.0 / y
    gamma[0, 0, 1] = -inv_y
    gamma[0, 1, 0] = -inv_y
    gamma[1, 0, 0] = inv_y
    gamma[1, 1, 1] = -inv_y
    return gamma


class HalfPlane2(Manifold):
    """Poincare upper half-plane; points are (x, y) with y > 0."""

    kind = "half_plane2"

    def __init__(self, transport_steps: int = 256, bvp_tol: float = 1e-10):
        super().__init__(transport_steps, bvp_tol)
        self.dim = 2
        self.coord_dim = 2
        self._chart = IdentityChart(
            2,
            metric_fn=lambda x: np.eye(2) / float(x[1]) ** 2,
            christoffel_fn=_christoffel,
            validate_fn=lambda x: self.point(x),
        )

    def point(self, coords) -> Point:
        arr = np.asarray(coords, dtype=float)
        if arr.shape != (2,):
            raise InvalidPoint(f"expected 2 coordinates, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidPoint("coordinates must be finite")
        if arr[1] <= 0.0:
            raise InvalidPoint(f"second coordinate must be positive, got {arr[1]!r}")
        return Point(arr)

    def tangent(self, p: Point, components) -> TangentVector:
        arr = np.asarray(components, dtype=float)
        if arr.shape != (2,):
            raise DimensionMismatch(f"expected 2 components, got shape {arr.shape}")
        return TangentVector(p, arr)

    def project_tangent(self, p: Point, components) -> TangentVector:
        return self.tangent(p, components)

    def metric_at(self, p: Point) -> np.ndarray:
        return np.eye(2) / float(p.coords[1]) ** 2

    def raise_gradient(self, p: Point, coord_grad) -> TangentVector:
        scale = float(p.coords[1]) ** 2
        return self.tangent(p, scale * np.asarray(coord_grad, dtype=float))

    def chart_at(self, p: Point) -> Chart:
        return self._chart

    def chart_for_curve(self, samples) -> Chart:
        return self._chart

    def _scale(self, p: Point, q: Point) -> float:
        return float(
            max(
                abs(p.coords[0]),
                abs(q.coords[0]),
                p.coords[1],
                q.coords[1],
            )
        )

    def exp_map(self, v: TangentVector) -> Point:
        x0, y0 = float(v.base.coords[0]), float(v.base.coords[1])
        a, b = float(v.components[0]), float(v.components[1])
        speed = np.hypot(a, b) / y0
        if speed < 1e-300:
            return Point(np.array(v.base.coords))
        if abs(a) <= VERTICAL_CUTOFF * np.hypot(a, b):
            return Point(np.array([x0, y0 * np.exp(b / y0)]))
        c = x0 + (b / a) * y0
        r = (y0 / abs(a)) * np.hypot(a, b)
        s0 = np.arcsinh(b / a)
        s1 = s0 - np.sign(a) * speed
        y1 = max(r * _sech(s1), np.finfo(float).tiny)
        return Point(np.array([c - r * np.tanh(s1), y1]))

    def log_map(self, p: Point, q: Point) -> TangentVector:
        xp, yp = float(p.coords[0]), float(p.coords[1])
        xq, yq = float(q.coords[0]), float(q.coords[1])
        dx = xq - xp
        if abs(dx) <= VERTICAL_CUTOFF * self._scale(p, q):
            return TangentVector(p, np.array([0.0, yp * np.log(yq / yp)]))
        c = 0.5 * (xp + xq) + (yq - yp) * (yq + yp) / (2.0 * dx)
        r = np.hypot(xp - c, yp)
        sp = np.arcsinh((c - xp) / yp)
        sq = np.arcsinh((c - xq) / yq)
        ds = sq - sp
        sech = _sech(sp)
        return TangentVector(
            p, ds * np.array([-r * sech**2, -r * sech * np.tanh(sp)])
        )

    def dist(self, p: Point, q: Point) -> float:
        xp, yp = float(p.coords[0]), float(p.coords[1])
        xq, yq = float(q.coords[0]), float(q.coords[1])
        dx = xq - xp
        if abs(dx) <= VERTICAL_CUTOFF * self._scale(p, q):
            return abs(float(np.log(yq / yp)))
        c = 0.5 * (xp + xq) + (yq - yp) * (yq + yp) / (2.0 * dx)
        return abs(float(np.arcsinh((c - xq) / yq) - np.arcsinh((c - xp) / yp)))

    def geodesic_between(self, p: Point, o: Point) -> Curve:
        p = self.validate_point(p)
        o = self.validate_point(o)
        if np.array_equal(p.coords, o.coords):
            return constant_curve(self, p)
        xp, yp = float(p.coords[0]), float(p.coords[1])
        xo, yo = float(o.coords[0]), float(o.coords[1])
        dx = xo - xp
        if abs(dx) <= VERTICAL_CUTOFF * self._scale(p, o):
            k = np.log(yo / yp)

            def v_position(t: float) -> np.ndarray:
                return np.array([xp, yp * np.exp(k * t)])

            def v_velocity(t: float) -> np.ndarray:
                return np.array([0.0, yp * k * np.exp(k * t)])

            return Curve(
                manifold=self,
                position_fn=pin_endpoints(v_position, p, o),
                velocity_fn=v_velocity,
                start=p,
                end=o,
                is_geodesic=True,
                length=abs(float(k)),
            )

        c = 0.5 * (xp + xo) + (yo - yp) * (yo + yp) / (2.0 * dx)
        r = np.hypot(xp - c, yp)
        sp = np.arcsinh((c - xp) / yp)
        so = np.arcsinh((c - xo) / yo)
        ds = so - sp

        def position(t: float) -> np.ndarray:
            s = sp + t * ds
            return np.array([c - r * np.tanh(s), r * _sech(s)])

        def velocity(t: float) -> np.ndarray:
            s = sp + t * ds
            sech = _sech(s)
            return ds * np.array([-r * sech**2, -r * sech * np.tanh(s)])

        return Curve(
            manifold=self,
            position_fn=pin_endpoints(position, p, o),
            velocity_fn=velocity,
            start=p,
            end=o,
            is_geodesic=True,
            length=abs(float(ds)),
        )

    def orthonormal_frame(self, p: Point) -> OrthonormalFrame:
        y = float(p.coords[1])
        return OrthonormalFrame(
            p,
            (
                TangentVector(p, np.array([y, 0.0])),
                TangentVector(p, np.array([0.0, y])),
            ),
        )

    def random_point(self, rng: np.random.Generator) -> Point:
        x = rng.standard_normal()
        y = float(np.exp(0.5 * rng.standard_normal()))
        return Point(np.array([x, y]))
