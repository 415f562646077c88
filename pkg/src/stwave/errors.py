"""Space-time error norms by tensor-product quadrature, and convergence orders."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .assembly import (
    AxisQuadrature,
    QuadraturePlan,
    _row_chunks,
    axis_quadrature,
    element_dofs,
    expand_coefficients,
    sample_grid,
)
from .exceptions import InvalidParameterError
from .mesh import Mesh1D
from .polybasis import LagrangeBasis
from .solutions import ExactSolution


@dataclass(frozen=True)
class ErrorPair:
    l2: float
    h1_semi: float


def error_plans(degree: int, *, T: float, L: float = 1.0, singular_end: bool = False, boost: int = 0):
    """Default ``(plan_x, plan_t)`` for error norms: ``p + 3`` points per sub-cell."""
    n = degree + 3 + boost
    return (
        QuadraturePlan(n, max_cell=L / 32),
        QuadraturePlan(n, max_cell=T / 32, graded_end=singular_end),
    )


def _spatial_contractions(U: np.ndarray, qx: AxisQuadrature):
    # U @ Bx^T and U @ Dx^T, shape (n_time_nodes, n_points_x)
    return (qx.values @ U.T).T, (qx.derivs @ U.T).T


def _discrete_fields(UB: np.ndarray, UD: np.ndarray, qt: AxisQuadrature, rows: slice):
    Bt, Dt = qt.values[rows], qt.derivs[rows]
    return Bt @ UB, Dt @ UB, Bt @ UD


def error_norms(
    coeffs: np.ndarray,
    mesh_x: Mesh1D,
    mesh_t: Mesh1D,
    basis: LagrangeBasis,
    exact: ExactSolution,
    plan_x: QuadraturePlan | None = None,
    plan_t: QuadraturePlan | None = None,
) -> ErrorPair:
    """``||u - u_h||_{L2(Q)}`` and ``|u - u_h|_{H1(Q)}``.

    ``coeffs`` is the time-major unknown vector; the coefficients at t = 0
    and on the spatial boundary are implicit zeros.
    """
    if plan_x is None or plan_t is None:
        dx, dt = error_plans(basis.degree, T=mesh_t.right, L=mesh_x.right, singular_end=exact.singular_at_T)
        plan_x, plan_t = plan_x or dx, plan_t or dt
    qx = axis_quadrature(mesh_x, basis, plan_x)
    qt = axis_quadrature(mesh_t, basis, plan_t)
    p = basis.degree
    U = expand_coefficients(coeffs, p * mesh_t.n_elements + 1, p * mesh_x.n_elements + 1)
    UB, UD = _spatial_contractions(U, qx)
    l2 = h1 = 0.0
    for rows in _row_chunks(qt.points.size, qx.points.size):
        uh, uh_t, uh_x = _discrete_fields(UB, UD, qt, rows)
        t = qt.points[rows]
        e = sample_grid(exact.u, qx.points, t) - uh
        et = sample_grid(exact.du_dt, qx.points, t) - uh_t
        ex = sample_grid(exact.du_dx, qx.points, t) - uh_x
        wt = qt.weights[rows]
        l2 += wt @ (e**2) @ qx.weights
        h1 += wt @ (et**2 + ex**2) @ qx.weights
    return ErrorPair(math.sqrt(l2), math.sqrt(h1))


def discrete_l2_norm(
    coeffs: np.ndarray,
    mesh_x: Mesh1D,
    mesh_t: Mesh1D,
    basis: LagrangeBasis,
    plan_x: QuadraturePlan | None = None,
    plan_t: QuadraturePlan | None = None,
) -> float:
    """``||u_h||_{L2(Q)}``, exact for the default plans (degree 2p integrands)."""
    p = basis.degree
    plan_x = plan_x or QuadraturePlan(p + 1)
    plan_t = plan_t or QuadraturePlan(p + 1)
    qx = axis_quadrature(mesh_x, basis, plan_x)
    qt = axis_quadrature(mesh_t, basis, plan_t)
    U = expand_coefficients(coeffs, p * mesh_t.n_elements + 1, p * mesh_x.n_elements + 1)
    UB, UD = _spatial_contractions(U, qx)
    total = 0.0
    for rows in _row_chunks(qt.points.size, qx.points.size):
        uh = _discrete_fields(UB, UD, qt, rows)[0]
        total += qt.weights[rows] @ (uh**2) @ qx.weights
    return math.sqrt(total)


def _basis_at(mesh: Mesh1D, basis: LagrangeBasis, x: np.ndarray) -> sp.csr_matrix:
    x = np.asarray(x, dtype=float)
    e = np.clip(np.searchsorted(mesh.vertices, x, side="right") - 1, 0, mesh.n_elements - 1)
    xi = (x - mesh.vertices[e]) / mesh.sizes[e]
    p = basis.degree
    cols = element_dofs(mesh.n_elements, p)[e]
    rows = np.repeat(np.arange(x.size), p + 1)
    return sp.csr_matrix((basis.values(xi).ravel(), (rows, cols.ravel())), shape=(x.size, p * mesh.n_elements + 1))


def evaluate_discrete(
    coeffs: np.ndarray, mesh_x: Mesh1D, mesh_t: Mesh1D, basis: LagrangeBasis, x, t
) -> np.ndarray:
    """Values of the discrete solution on the grid ``t x x``, shape (len(t), len(x))."""
    p = basis.degree
    U = expand_coefficients(coeffs, p * mesh_t.n_elements + 1, p * mesh_x.n_elements + 1)
    Bx = _basis_at(mesh_x, basis, np.atleast_1d(x))
    Bt = _basis_at(mesh_t, basis, np.atleast_1d(t))
    return Bt @ (Bx @ U.T).T


def function_l2_norm(f, mesh_x: Mesh1D, mesh_t: Mesh1D, plan_x: QuadraturePlan, plan_t: QuadraturePlan) -> float:
    """``||f||_{L2(Q)}`` for a callable ``f(x, t)``."""
    basis = LagrangeBasis(1)
    qx = axis_quadrature(mesh_x, basis, plan_x)
    qt = axis_quadrature(mesh_t, basis, plan_t)
    total = 0.0
    for rows in _row_chunks(qt.points.size, qx.points.size):
        G = sample_grid(f, qx.points, qt.points[rows])
        total += qt.weights[rows] @ (G**2) @ qx.weights
    return math.sqrt(total)


def eoc(errors) -> list[float]:
    """Orders ``log2(e_{k-1} / e_k)`` between consecutive bisection levels.

    The first level has no order; the result has ``len(errors) - 1`` entries.
    """
    e = [float(v) for v in errors]
    if len(e) < 2:
        raise InvalidParameterError("need at least two errors")
    if any(not v > 0 or not math.isfinite(v) for v in e):
        raise InvalidParameterError("errors must be positive and finite")
    return [math.log(a / b) / math.log(2.0) for a, b in zip(e[:-1], e[1:])]
