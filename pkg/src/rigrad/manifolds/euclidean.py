"""Flat n-dimensional space with the standard inner product."""

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
    pin_endpoints,
)


class Euclidean(Manifold):
    """R^n with the identity metric; geodesics are straight segments."""

    kind = "euclidean"

    def __init__(self, dim: int, transport_steps: int = 256, bvp_tol: float = 1e-10):
        super().__init__(transport_steps, bvp_tol)
        if dim < 1:
            raise ValueError(f"dimension must be at least 1, got {dim}")
        self.dim = int(dim)
        self.coord_dim = self.dim
        self._chart = IdentityChart(
            self.dim,
            metric_fn=lambda x: np.eye(self.dim),
            christoffel_fn=lambda x: np.zeros((self.dim, self.dim, self.dim)),
            validate_fn=lambda x: self.point(x),
        )

    def __repr__(self):
        return f"Euclidean(dim={self.dim})"

    def point(self, coords) -> Point:
        arr = np.asarray(coords, dtype=float)
        if arr.shape != (self.dim,):
            raise InvalidPoint(f"expected {self.dim} coordinates, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidPoint("coordinates must be finite")
        return Point(arr)

    def tangent(self, p: Point, components) -> TangentVector:
        arr = np.asarray(components, dtype=float)
        if arr.shape != (self.dim,):
            raise DimensionMismatch(
                f"expected {self.dim} components, got shape {arr.shape}"
            )
        return TangentVector(p, arr)

    def project_tangent(self, p: Point, components) -> TangentVector:
        return self.tangent(p, components)

    def metric_at(self, p: Point) -> np.ndarray:
        return np.eye(self.dim)

    def raise_gradient(self, p: Point, coord_grad) -> TangentVector:
        return self.tangent(p, coord_grad)

    def chart_at(self, p: Point) -> Chart:
        return self._chart

    def chart_for_curve(self, samples) -> Chart:
        return self._chart

    def exp_map(self, v: TangentVector) -> Point:
        return Point(v.base.coords + v.components)

    def log_map(self, p: Point, q: Point) -> TangentVector:
        return TangentVector(p, q.coords - p.coords)

    def dist(self, p: Point, q: Point) -> float:
        return float(np.linalg.norm(q.coords - p.coords))

    def geodesic_between(self, p: Point, o: Point) -> Curve:
        p = self.validate_point(p)
        o = self.validate_point(o)
        delta = o.coords - p.coords
        start = np.array(p.coords)
        return Curve(
            manifold=self,
            position_fn=pin_endpoints(lambda t: start + t * delta, p, o),
            velocity_fn=lambda t: np.array(delta),
            start=p,
            end=o,
            is_geodesic=True,
            length=float(np.linalg.norm(delta)),
        )

    def orthonormal_frame(self, p: Point) -> OrthonormalFrame:
        vectors = tuple(TangentVector(p, e) for e in np.eye(self.dim))
        return OrthonormalFrame(p, vectors)

    def random_point(self, rng: np.random.Generator) -> Point:
        return Point(rng.standard_normal(self.dim))

    def cut_locus_check(self, p: Point, q: Point) -> None:
        """Flat space has no cut locus; present for interface symmetry."""
        return None
