"""Polynomial building blocks on the reference element [0, 1].

Contains Gauss-Legendre rules, shifted Legendre polynomials (the orthogonal
basis used for element-local projections) and nodal Lagrange bases with
Gauss-Lobatto or equispaced nodes.

All objects live on [0, 1]; an element (a, b) is reached through
``x = a + (b - a) * xi``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import InvalidParameterError

MAX_GAUSS_POINTS = 64
NODE_PLACEMENTS = ("gauss_lobatto", "equispaced")


@dataclass(frozen=True)
class QuadratureRule:
    """Quadrature rule on [0, 1]; the weights sum to one."""

    points: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return self.points.size

    def integrate(self, f, a: float = 0.0, b: float = 1.0) -> float:
        """Approximate the integral of a vectorised ``f`` over (a, b)."""
        h = b - a
        return float(h * np.dot(self.weights, f(a + h * self.points)))


def _legendre_and_derivative(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Bonnet recurrence on [-1, 1]
    p0 = np.ones_like(x)
    p1 = x.copy()
    if n == 0:
        return p0, np.zeros_like(x)
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    return p1, dp


@lru_cache(maxsize=None)
def _gauss_legendre_cached(n: int) -> QuadratureRule:
    i = np.arange(1, n + 1)
    x = np.cos(np.pi * (i - 0.25) / (n + 0.5))
    for _ in range(100):
        p, dp = _legendre_and_derivative(n, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) <= 1e-15:
            break
    _, dp = _legendre_and_derivative(n, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    # ascending order, mapped to [0, 1]
    pts = (1.0 + x[::-1]) / 2.0
    wts = w[::-1] / 2.0
    pts.setflags(write=False)
    wts.setflags(write=False)
    return QuadratureRule(pts, wts)


def gauss_legendre(n: int) -> QuadratureRule:
    """n-point Gauss-Legendre rule on [0, 1], exact up to degree ``2n - 1``.

    Nodes are found by Newton iteration on the Legendre polynomial of degree
    ``n`` starting from the usual cosine guesses.
    """
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_GAUSS_POINTS:
        raise InvalidParameterError(
            f"number of Gauss points must be in [1, {MAX_GAUSS_POINTS}], got {n!r}"
        )
    return _gauss_legendre_cached(int(n))


def gauss_lobatto_nodes(p: int) -> np.ndarray:
    """The p+1 Gauss-Lobatto nodes on [0, 1] (endpoints included)."""
    if p < 1:
        raise InvalidParameterError("Gauss-Lobatto nodes need p >= 1")
    interior = np.polynomial.legendre.Legendre.basis(p).deriv().roots()
    x = np.concatenate(([-1.0], np.sort(interior.real), [1.0]))
    nodes = (1.0 + x) / 2.0
    # symmetrise to remove round-off asymmetry
    nodes = 0.5 * (nodes + (1.0 - nodes[::-1]))
    nodes[0], nodes[-1] = 0.0, 1.0
    return nodes


def shifted_legendre(k: int, xi):
    """Legendre polynomial of degree k on [0, 1], normalised to 1 at xi = 1.

    Satisfies ``int_0^1 L_j L_k = delta_jk / (2k + 1)``.
    """
    if k < 0:
        raise InvalidParameterError("Legendre degree must be non-negative")
    x = 2.0 * np.asarray(xi, dtype=float) - 1.0
    p0 = np.ones_like(x)
    if k == 0:
        return p0 if p0.ndim else float(p0)
    p1 = x
    for m in range(2, k + 1):
        p0, p1 = p1, ((2 * m - 1) * x * p1 - (m - 1) * p0) / m
    return p1 if p1.ndim else float(p1)


def legendre_table(q: int, xi: np.ndarray) -> np.ndarray:
    """Values ``L_k(xi_i)`` as an array of shape (len(xi), q + 1)."""
    xi = np.asarray(xi, dtype=float)
    return np.stack([shifted_legendre(k, xi) for k in range(q + 1)], axis=-1)


class LagrangeBasis:
    """Nodal Lagrange basis of degree p on [0, 1].

    ``ref_nodes[0] == 0`` and ``ref_nodes[p] == 1``, so the first and last
    functions are the vertex functions that glue neighbouring elements.

    Parameters
    ----------
    degree : int
        Polynomial degree p >= 1.
    nodes : {"gauss_lobatto", "equispaced"}
        Placement of the interior nodes.
    """

    def __init__(self, degree: int, nodes: str = "gauss_lobatto"):
        if not isinstance(degree, (int, np.integer)) or degree < 1:
            raise InvalidParameterError(f"degree must be an integer >= 1, got {degree!r}")
        if nodes not in NODE_PLACEMENTS:
            raise InvalidParameterError(f"unknown node placement {nodes!r}")
        self.degree = int(degree)
        self.placement = nodes
        if nodes == "gauss_lobatto":
            ref = gauss_lobatto_nodes(self.degree)
        else:
            ref = np.linspace(0.0, 1.0, self.degree + 1)
        ref.setflags(write=False)
        self.ref_nodes = ref
        diff = ref[:, None] - ref[None, :]
        np.fill_diagonal(diff, 1.0)
        self._denom = np.prod(diff, axis=1)

    @property
    def n_local(self) -> int:
        return self.degree + 1

    def __repr__(self):
        return f"LagrangeBasis(degree={self.degree}, nodes={self.placement!r})"

    def values(self, xi) -> np.ndarray:
        """Table ``b_k(xi_i)`` of shape (len(xi), p + 1)."""
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        d = xi[:, None] - self.ref_nodes[None, :]
        out = np.empty((xi.size, self.n_local))
        for k in range(self.n_local):
            others = np.delete(d, k, axis=1)
            out[:, k] = np.prod(others, axis=1) / self._denom[k]
        return out

    def derivatives(self, xi) -> np.ndarray:
        """Table ``b_k'(xi_i)`` of shape (len(xi), p + 1), derivative in xi."""
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        d = xi[:, None] - self.ref_nodes[None, :]
        n = self.n_local
        out = np.zeros((xi.size, n))
        for k in range(n):
            for m in range(n):
                if m == k:
                    continue
                keep = [j for j in range(n) if j not in (k, m)]
                out[:, k] += np.prod(d[:, keep], axis=1)
            out[:, k] /= self._denom[k]
        return out


def lagrange_eval(basis: LagrangeBasis, k: int, xi: float) -> float:
    return float(basis.values(xi)[0, k])


def lagrange_deriv(basis: LagrangeBasis, k: int, xi: float) -> float:
    return float(basis.derivatives(xi)[0, k])
