"""Element-local L2 projection onto discontinuous piecewise polynomials.

On every temporal element the projection onto polynomials of degree q is
expanded in shifted Legendre polynomials. Their Gram matrix on [0, 1] is
``diag(1 / (2k + 1))``, so the coefficients follow from plain moments and no
normal equations are ever solved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidParameterError
from .mesh import Mesh1D
from .polybasis import LagrangeBasis, QuadratureRule, gauss_legendre, legendre_table


@dataclass(frozen=True)
class ProjectionCoeffs:
    """Legendre coefficients of a projection on one element (a, b)."""

    a: float
    b: float
    coeffs: np.ndarray

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, t):
        xi = (np.asarray(t, dtype=float) - self.a) / (self.b - self.a)
        return legendre_table(self.degree, np.atleast_1d(xi)) @ self.coeffs

    def l2_norm(self) -> float:
        k = np.arange(self.coeffs.size)
        return float(np.sqrt((self.b - self.a) * np.sum(self.coeffs**2 / (2 * k + 1))))


def project_element(f, a: float, b: float, q: int, quad: QuadratureRule | None = None) -> ProjectionCoeffs:
    """L2 projection of a vectorised ``f`` on (a, b) onto polynomials of degree q.

    ``c_k = (2k + 1) * int_0^1 f(a + h xi) L_k(xi) dxi``, evaluated with
    ``quad`` (default: a Gauss rule exact for ``f`` of degree ``q + 4``).
    """
    if not b > a:
        raise InvalidParameterError(f"degenerate element ({a}, {b})")
    if q < 0:
        raise InvalidParameterError("projection degree must be non-negative")
    if quad is None:
        quad = gauss_legendre(q + 3)
    h = b - a
    fv = np.asarray(f(a + h * quad.points), dtype=float)
    L = legendre_table(q, quad.points)
    k = np.arange(q + 1)
    c = (2 * k + 1) * ((quad.weights * fv) @ L)
    return ProjectionCoeffs(float(a), float(b), c)


def project(f, mesh: Mesh1D, q: int, quad: QuadratureRule | None = None) -> list[ProjectionCoeffs]:
    """Apply :func:`project_element` on every element of ``mesh``."""
    return [project_element(f, a, b, q, quad) for a, b in mesh.elements()]


def basis_projection_coefficients(basis: LagrangeBasis, q: int) -> np.ndarray:
    """Matrix C with ``C[k, a]`` the k-th Legendre coefficient of Q^q b_a.

    Independent of the element size, since projection commutes with the
    affine map to [0, 1].
    """
    p = basis.degree
    quad = gauss_legendre(max(p, q) + 1)
    B = basis.values(quad.points)
    L = legendre_table(q, quad.points)
    k = np.arange(q + 1)
    return (2 * k + 1)[:, None] * (L.T * quad.weights) @ B


def local_perturbed_mass(p: int, q: int, h: float, basis: LagrangeBasis) -> np.ndarray:
    """Local matrix ``G[a, b] = <b_b, Q^q b_a>`` on an element of size h.

    Equals ``h * C^T D C`` with ``D = diag(1 / (2k + 1))``; symmetric positive
    semi-definite with rank ``min(q, p) + 1``.
    """
    if basis.degree != p:
        raise InvalidParameterError(f"basis has degree {basis.degree}, expected {p}")
    if q < 0:
        raise InvalidParameterError("projection degree must be non-negative")
    if not h > 0:
        raise InvalidParameterError("element size must be positive")
    C = basis_projection_coefficients(basis, q)
    d = 1.0 / (2 * np.arange(q + 1) + 1)
    G1 = C.T @ (d[:, None] * C)
    G1 = 0.5 * (G1 + G1.T)
    return h * G1
