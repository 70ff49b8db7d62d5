"""The unit 2-sphere embedded in R^3.

Points are unit vectors; tangent vectors live in the plane orthogonal to the
base point.  Charts are rotated spherical coordinates whose pole is chosen to
stay away from the points of interest.
"""

from __future__ import annotations

import numpy as np

from ..errors import (
    CutLocusAmbiguity,
    DimensionMismatch,
    InvalidCurve,
    InvalidPoint,
    InvalidTangent,
)
from .base import (
    Chart,
    Curve,
    Manifold,
    OrthonormalFrame,
    Point,
    TangentVector,
    constant_curve,
    pin_endpoints,
)

# Points of interest must stay at least this far (radians) from a chart pole.
POLE_MARGIN = 0.1

# Inner products at or below -1 + this slack mean the base point pair is
# treated as antipodal and the minimising geodesic as ambiguous.
ANTIPODAL_SLACK = 1e-9


def _pole_frame(n: np.ndarray) -> np.ndarray:
    """Right-handed orthonormal rows (u, w, n) completing the pole axis n."""
    j = int(np.argmin(np.abs(n)))
    e = np.zeros(3)
    e[j] = 1.0
    u = e - np.dot(e, n) * n
    u /= np.linalg.norm(u)
    w = np.cross(n, u)
    return np.array([u, w, n])


class SphericalChart(Chart):
    """Colatitude/longitude coordinates after rotating ``pole`` to the z-axis.

    Chart coordinates are (theta, phi) with theta in (0, pi) measured from the
    pole; the metric is diag(1, sin(theta)^2).
    """

    dim = 2
    angular = (1,)

    def __init__(self, pole: np.ndarray):
        pole = np.asarray(pole, dtype=float)
        norm = np.linalg.norm(pole)
        if norm < 1e-12:
            raise ValueError("chart pole must be a nonzero vector")
        self.pole = pole / norm
        self.rotation = _pole_frame(self.pole)

    def to_chart(self, p: Point) -> np.ndarray:
        q = self.rotation @ p.coords
        theta = np.arctan2(np.hypot(q[0], q[1]), q[2])
        phi = np.arctan2(q[1], q[0])
        return np.array([theta, phi])

    def from_chart(self, x: np.ndarray) -> Point:
        theta, phi = float(x[0]), float(x[1])
        q = np.array(
            [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)]
        )
        return Point(self.rotation.T @ q)

    def metric(self, x: np.ndarray) -> np.ndarray:
        return np.diag([1.0, np.sin(float(x[0])) ** 2])

    def christoffel(self, x: np.ndarray) -> np.ndarray:
        theta = float(x[0])
        gamma = np.zeros((2, 2, 2))
        gamma[0, 1, 1] = -np.sin(theta) * np.cos(theta)
        cot = np.cos(theta) / np.sin(theta)
        gamma[1, 0, 1] = cot
        gamma[1, 1, 0] = cot
        return gamma

    def _basis(self, x: np.ndarray) -> np.ndarray:
        """Coordinate basis vectors (d/dtheta, d/dphi) as rotated ambient rows."""
        theta, phi = float(x[0]), float(x[1])
        d_theta = np.array(
            [np.cos(theta) * np.cos(phi), np.cos(theta) * np.sin(phi), -np.sin(theta)]
        )
        d_phi = np.array([-np.sin(theta) * np.sin(phi), np.sin(theta) * np.cos(phi), 0.0])
        return np.array([d_theta, d_phi])

    def push(self, x: np.ndarray, comps: np.ndarray) -> np.ndarray:
        basis = self._basis(x)
        return self.rotation.T @ (comps[0] * basis[0] + comps[1] * basis[1])

    def pull(self, p: Point, comps: np.ndarray) -> np.ndarray:
        x = self.to_chart(p)
        basis = self._basis(x)
        w = self.rotation @ np.asarray(comps, dtype=float)
        sin_theta = np.sin(float(x[0]))
        return np.array([w @ basis[0], (w @ basis[1]) / sin_theta**2])


class Sphere2(Manifold):
    """S^2 with the round metric induced from R^3."""

    kind = "sphere2"

    def __init__(self, transport_steps: int = 256, bvp_tol: float = 1e-10):
        super().__init__(transport_steps, bvp_tol)
        self.dim = 2
        self.coord_dim = 3

    def point(self, coords) -> Point:
        arr = np.asarray(coords, dtype=float)
        if arr.shape != (3,):
            raise InvalidPoint(f"expected 3 ambient coordinates, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidPoint("coordinates must be finite")
        norm = np.linalg.norm(arr)
        if abs(norm - 1.0) > 1e-9:
            raise InvalidPoint(f"point norm {norm!r} is not 1 within 1e-9")
        if abs(norm - 1.0) > 1e-12:
            arr = arr / norm
        return Point(arr)

    def tangent(self, p: Point, components) -> TangentVector:
        arr = np.asarray(components, dtype=float)
        if arr.shape != (3,):
            raise DimensionMismatch(f"expected 3 components, got shape {arr.shape}")
        radial = abs(float(np.dot(p.coords, arr)))
        if radial > 1e-9 * (1.0 + np.linalg.norm(arr)):
            raise InvalidTangent(
                f"components have radial part {radial!r}; not tangent to the sphere"
            )
        return TangentVector(p, arr - np.dot(p.coords, arr) * p.coords)

    def project_tangent(self, p: Point, components) -> TangentVector:
        arr = np.asarray(components, dtype=float)
        if arr.shape != (3,):
            raise DimensionMismatch(f"expected 3 components, got shape {arr.shape}")
        return TangentVector(p, arr - np.dot(p.coords, arr) * p.coords)

    def metric_at(self, p: Point) -> np.ndarray:
        return np.eye(3) - np.outer(p.coords, p.coords)

    def raise_gradient(self, p: Point, coord_grad) -> TangentVector:
        return self.project_tangent(p, coord_grad)

    def chart_at(self, p: Point) -> Chart:
        axis = int(np.argmin(np.abs(p.coords)))
        pole = np.zeros(3)
        pole[axis] = 1.0
        return SphericalChart(pole)

    def chart_for_curve(self, samples) -> Chart:
        matrix = np.array([s.coords for s in samples])
        _, _, vt = np.linalg.svd(matrix)
        pole = vt[-1]
        lead = np.flatnonzero(np.abs(pole) > 1e-12)
        if lead.size and pole[lead[0]] < 0:
            pole = -pole
        cos_angles = np.abs(matrix @ pole)
        if np.max(cos_angles) > np.cos(POLE_MARGIN):
            raise InvalidCurve(
                "curve passes within 0.1 rad of the best available chart pole"
            )
        return SphericalChart(pole)

    def exp_map(self, v: TangentVector) -> Point:
        theta = np.linalg.norm(v.components)
        if theta < 1e-300:
            return Point(np.array(v.base.coords))
        out = np.cos(theta) * v.base.coords + np.sin(theta) / theta * v.components
        return Point(out / np.linalg.norm(out))

    def log_map(self, p: Point, q: Point) -> TangentVector:
        cos = float(np.dot(p.coords, q.coords))
        if cos <= -1.0 + ANTIPODAL_SLACK:
            raise CutLocusAmbiguity(
                "base point pair is antipodal; the minimising geodesic is not unique"
            )
        theta = np.arccos(np.clip(cos, -1.0, 1.0))
        w = q.coords - cos * p.coords
        w_norm = np.linalg.norm(w)
        if w_norm < 1e-300:
            return TangentVector(p, np.zeros(3))
        return TangentVector(p, (theta / w_norm) * w)

    def dist(self, p: Point, q: Point) -> float:
        cross = np.linalg.norm(np.cross(p.coords, q.coords))
        dot = float(np.dot(p.coords, q.coords))
        return float(np.arctan2(cross, dot))

    def geodesic_between(self, p: Point, o: Point) -> Curve:
        p = self.validate_point(p)
        o = self.validate_point(o)
        v = self.log_map(p, o)
        theta = np.linalg.norm(v.components)
        if theta < 1e-14:
            return constant_curve(self, p)
        axis_p = np.array(p.coords)
        axis_t = v.components / theta

        def position(t: float) -> np.ndarray:
            return np.cos(theta * t) * axis_p + np.sin(theta * t) * axis_t

        def velocity(t: float) -> np.ndarray:
            return theta * (-np.sin(theta * t) * axis_p + np.cos(theta * t) * axis_t)

        return Curve(
            manifold=self,
            position_fn=pin_endpoints(position, p, o),
            velocity_fn=velocity,
            start=p,
            end=o,
            is_geodesic=True,
            length=float(theta),
        )

    def orthonormal_frame(self, p: Point) -> OrthonormalFrame:
        drop = int(np.argmax(np.abs(p.coords)))
        vectors = []
        for i in range(3):
            if i == drop:
                continue
            e = np.zeros(3)
            e[i] = 1.0
            v = e - np.dot(e, p.coords) * p.coords
            for u in vectors:
                v = v - np.dot(v, u) * u
            v /= np.linalg.norm(v)
            vectors.append(v)
        return OrthonormalFrame(p, tuple(TangentVector(p, v) for v in vectors))

    def random_point(self, rng: np.random.Generator) -> Point:
        while True:
            raw = rng.standard_normal(3)
            norm = np.linalg.norm(raw)
            if norm > 1e-6:
                return Point(raw / norm)

    def latitude_loop(self, colatitude: float) -> Curve:
        """Closed constant-colatitude circle around the z-axis, t in [0, 1].

        Not a geodesic (except at the equator); used to exercise transport
        along non-geodesic curves, where one full loop rotates tangent
        vectors by 2*pi*(1 - cos(colatitude)).
        """
        theta = float(colatitude)
        if not 0.0 < theta < np.pi:
            raise InvalidCurve("colatitude must lie strictly between 0 and pi")
        sin_t, cos_t = np.sin(theta), np.cos(theta)

        def position(t: float) -> np.ndarray:
            phi = 2.0 * np.pi * t
            return np.array([sin_t * np.cos(phi), sin_t * np.sin(phi), cos_t])

        def velocity(t: float) -> np.ndarray:
            phi = 2.0 * np.pi * t
            return 2.0 * np.pi * sin_t * np.array([-np.sin(phi), np.cos(phi), 0.0])

        start = Point(position(0.0))
        return Curve(
            manifold=self,
            position_fn=position,
            velocity_fn=velocity,
            start=start,
            end=start,
            is_geodesic=False,
            length=2.0 * np.pi * sin_t,
        )
