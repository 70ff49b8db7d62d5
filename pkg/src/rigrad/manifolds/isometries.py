"""Metric-preserving maps for each supported manifold.

Flat space gets rigid motions, the sphere gets ambient rotations (including
reflections), and the half-plane gets real Moebius maps with unit
determinant.  Every map knows its differential and its inverse, which is all
the invariance checks downstream need.
"""

from __future__ import annotations

from abc import ABC, abstractmethod

import numpy as np

from ..errors import InvalidIsometry, WrongManifold
from .base import Manifold, OrthonormalFrame, Point, TangentVector
from .euclidean import Euclidean
from .halfplane import HalfPlane2
from .sphere import Sphere2

ORTHOGONALITY_TOL = 1e-10
DETERMINANT_TOL = 1e-12


class Isometry(ABC):
    """A distance-preserving self-map of a fixed manifold."""

    manifold: Manifold

    @abstractmethod
    def apply(self, p: Point) -> Point:
        ...

    @abstractmethod
    def differential(self, u: TangentVector) -> TangentVector:
        """Image of the tangent vector ``u`` under the map's derivative."""

    @abstractmethod
    def inverse(self) -> "Isometry":
        ...

    def push_frame(self, frame: OrthonormalFrame) -> OrthonormalFrame:
        base = self.apply(frame.base)
        return OrthonormalFrame(base, tuple(self.differential(v) for v in frame.vectors))


def _check_orthogonal(matrix: np.ndarray, dim: int) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=float)
    if matrix.shape != (dim, dim):
        raise InvalidIsometry(f"expected a {dim}x{dim} matrix, got {matrix.shape}")
    defect = np.max(np.abs(matrix.T @ matrix - np.eye(dim)))
    if defect > ORTHOGONALITY_TOL:
        raise InvalidIsometry(f"matrix is not orthogonal (defect {defect:.2e})")
    return matrix


class EuclideanMotion(Isometry):
    """x -> Qx + b with Q orthogonal."""

    def __init__(self, manifold: Euclidean, matrix, offset):
        if manifold.kind != "euclidean":
            raise WrongManifold("EuclideanMotion requires a Euclidean manifold")
        self.manifold = manifold
        self.matrix = _check_orthogonal(matrix, manifold.dim)
        self.offset = np.asarray(offset, dtype=float)
        if self.offset.shape != (manifold.dim,):
            raise InvalidIsometry(f"offset shape {self.offset.shape} does not match dim")

    def apply(self, p: Point) -> Point:
        return self.manifold.point(self.matrix @ p.coords + self.offset)

    def differential(self, u: TangentVector) -> TangentVector:
        return TangentVector(self.apply(u.base), self.matrix @ u.components)

    def inverse(self) -> "EuclideanMotion":
        return EuclideanMotion(self.manifold, self.matrix.T, -self.matrix.T @ self.offset)


class SphereRotation(Isometry):
    """p -> Rp with R in O(3)."""

    def __init__(self, manifold: Sphere2, matrix):
        if manifold.kind != "sphere2":
            raise WrongManifold("SphereRotation requires the sphere manifold")
        self.manifold = manifold
        self.matrix = _check_orthogonal(matrix, 3)

    def apply(self, p: Point) -> Point:
        return self.manifold.point(self.matrix @ p.coords)

    def differential(self, u: TangentVector) -> TangentVector:
        return self.manifold.project_tangent(self.apply(u.base), self.matrix @ u.components)

    def inverse(self) -> "SphereRotation":
        return SphereRotation(self.manifold, self.matrix.T)


class MoebiusMap(Isometry):
    """z -> (az + b) / (cz + d) on the upper half-plane, with ad - bc = 1."""

    def __init__(self, manifold: HalfPlane2, a: float, b: float, c: float, d: float):
        if manifold.kind != "half_plane2":
            raise WrongManifold("MoebiusMap requires the half-plane manifold")
        self.manifold = manifold
        det = a * d - b * c
        if abs(det - 1.0) > DETERMINANT_TOL:
            raise InvalidIsometry(f"coefficient determinant {det!r} must equal 1")
        self.a, self.b, self.c, self.d = float(a), float(b), float(c), float(d)

    def _z(self, p: Point) -> complex:
        return complex(p.coords[0], p.coords[1])

    def apply(self, p: Point) -> Point:
        z = self._z(p)
        w = (self.a * z + self.b) / (self.c * z + self.d)
        return self.manifold.point(np.array([w.real, w.imag]))

    def differential(self, u: TangentVector) -> TangentVector:
        z = self._z(u.base)
        scale = 1.0 / (self.c * z + self.d) ** 2
        w = scale * complex(u.components[0], u.components[1])
        return TangentVector(self.apply(u.base), np.array([w.real, w.imag]))

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(self.manifold, self.d, -self.b, -self.c, self.a)


def coordinate_swap(manifold: Euclidean, i: int, j: int) -> EuclideanMotion:
    """The rigid motion exchanging coordinates i and j."""
    if not (0 <= i < manifold.dim and 0 <= j < manifold.dim):
        raise InvalidIsometry(f"swap indices ({i}, {j}) out of range for dim {manifold.dim}")
    matrix = np.eye(manifold.dim)
    matrix[[i, j]] = matrix[[j, i]]
    return EuclideanMotion(manifold, matrix, np.zeros(manifold.dim))


def random_isometry(manifold: Manifold, rng: np.random.Generator) -> Isometry:
    """Seeded sample from the manifold's isometry group."""
    if manifold.kind == "euclidean":
        q, r = np.linalg.qr(rng.standard_normal((manifold.dim, manifold.dim)))
        q = q * np.sign(np.diag(r))
        return EuclideanMotion(manifold, q, rng.standard_normal(manifold.dim))
    if manifold.kind == "sphere2":
        q, r = np.linalg.qr(rng.standard_normal((3, 3)))
        q = q * np.sign(np.diag(r))
        return SphereRotation(manifold, q)
    if manifold.kind == "half_plane2":
        while True:
            a, b, c, d = rng.standard_normal(4)
            det = a * d - b * c
            if abs(det) > 1e-3:
                break
        if det < 0.0:
            b, a = a, b
            d, c = c, d
            det = -det
        root = np.sqrt(det)
        return MoebiusMap(manifold, a / root, b / root, c / root, d / root)
    raise WrongManifold(f"no isometry family for manifold kind {manifold.kind!r}")
