"""Quadrature rules on [0, 1] for the path integrals."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParseError

RULES = ("gauss_legendre", "trapezoid")


def nodes_weights(rule: str, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the given rule with n nodes on [0, 1]."""
    if rule == "gauss_legendre":
        if n < 1:
            raise ParseError("gauss_legendre needs at least 1 node")
        x, w = np.polynomial.legendre.leggauss(n)
        return 0.5 * (x + 1.0), 0.5 * w
    if rule == "trapezoid":
        if n < 2:
            raise ParseError("trapezoid needs at least 2 nodes")
        x = np.linspace(0.0, 1.0, n)
        w = np.full(n, 1.0 / (n - 1))
        w[0] *= 0.5
        w[-1] *= 0.5
        return x, w
    raise ParseError(f"unknown quadrature rule {rule!r}; expected one of {RULES}")


@dataclass(frozen=True)
class Quadrature:
    """Integration policy: a rule, a node count, and an optional refinement loop.

    With ``refine`` on, results are recomputed with doubled node counts until
    two successive answers agree to ``tol`` entrywise or ``max_nodes`` is hit.
    """

    rule: str = "gauss_legendre"
    nodes: int = 32
    refine: bool = True
    tol: float = 1e-10
    max_nodes: int = 1024

    def __post_init__(self):
        if self.nodes < 2:
            raise ParseError("quadrature needs at least 2 nodes")
        nodes_weights(self.rule, self.nodes)  # validates the rule name
        if self.tol <= 0.0:
            raise ParseError("quadrature tol must be positive")
        if self.max_nodes < self.nodes:
            raise ParseError("max_nodes must be at least the starting node count")

    def nodes_weights(self, n: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        return nodes_weights(self.rule, self.nodes if n is None else n)

    def schedule(self) -> list[int]:
        """Node counts to try in order; a single entry when refine is off."""
        if not self.refine:
            return [self.nodes]
        counts = [self.nodes]
        while counts[-1] * 2 <= self.max_nodes:
            counts.append(counts[-1] * 2)
        return counts
