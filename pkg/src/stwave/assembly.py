"""Galerkin matrices in space and time and the space-time load vector.

Global node numbering on a 1D mesh with N elements and degree p: local node
k of element e is global node ``e * p + k``, giving ``p * N + 1`` nodes.

* Space: the two boundary nodes are dropped (homogeneous Dirichlet data), so
  there are ``M_x = p * N_x - 1`` unknowns and interior node ``j`` becomes
  unknown ``j - 1``.
* Time: trial functions exclude the node at t = 0 (``u_h(., 0) = 0``) and test
  functions exclude the node at t = T. The stored temporal matrices are the
  symmetric parent matrices with their last row and first column removed;
  row n is test function n, column m - 1 is trial function m.

Unknowns are ordered time-major: global index ``n * M_x + i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .exceptions import EvaluationError, InvalidParameterError
from .mesh import Mesh1D
from .polybasis import LagrangeBasis, gauss_legendre
from .projection import local_perturbed_mass

# samples per chunk when evaluating functions on tensor quadrature grids
GRID_CHUNK = 2_000_000


@lru_cache(maxsize=64)
def _reference_matrices(degree: int, placement: str) -> tuple[np.ndarray, np.ndarray]:
    basis = LagrangeBasis(degree, placement)
    quad = gauss_legendre(degree + 1)
    B = basis.values(quad.points)
    D = basis.derivatives(quad.points)
    mass = (B.T * quad.weights) @ B
    stiff = (D.T * quad.weights) @ D
    return 0.5 * (mass + mass.T), 0.5 * (stiff + stiff.T)


def local_mass(basis: LagrangeBasis, h: float) -> np.ndarray:
    """Exact element mass matrix on an element of size h."""
    return h * _reference_matrices(basis.degree, basis.placement)[0]


def local_stiffness(basis: LagrangeBasis, h: float) -> np.ndarray:
    """Exact element stiffness matrix on an element of size h."""
    return _reference_matrices(basis.degree, basis.placement)[1] / h


def element_dofs(n_elements: int, degree: int) -> np.ndarray:
    """Global node indices, shape (n_elements, degree + 1)."""
    return degree * np.arange(n_elements)[:, None] + np.arange(degree + 1)[None, :]


def node_coordinates(mesh: Mesh1D, basis: LagrangeBasis) -> np.ndarray:
    """Coordinates of all ``p * N + 1`` global nodes."""
    p = basis.degree
    a = mesh.vertices[:-1, None]
    h = mesh.sizes[:, None]
    x = (a + h * basis.ref_nodes[None, :-1]).ravel()
    return np.append(x, mesh.right)


def _assemble_parent(mesh: Mesh1D, basis: LagrangeBasis, local) -> sp.csr_matrix:
    p = basis.degree
    n = p * mesh.n_elements + 1
    dofs = element_dofs(mesh.n_elements, p)
    rows = np.repeat(dofs, p + 1, axis=1).ravel()
    cols = np.tile(dofs, (1, p + 1)).ravel()
    vals = np.concatenate([local(h).ravel() for h in mesh.sizes])
    # duplicates are summed in ascending element order -> reproducible
    return sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()


@dataclass(frozen=True)
class SpatialMatrices:
    """Mass matrix ``M`` and stiffness matrix ``A`` on the interior nodes."""

    M: sp.csr_matrix
    A: sp.csr_matrix
    mesh: Mesh1D
    basis: LagrangeBasis

    @property
    def size(self) -> int:
        return self.M.shape[0]


@dataclass(frozen=True)
class TemporalMatrices:
    """Temporal stiffness ``A`` and (perturbed) mass ``Mtilde``.

    Both are ``p N_t x p N_t``: rows are test functions 0..pN_t-1, columns
    trial functions 1..pN_t. ``A_parent`` / ``M_parent`` keep the full
    symmetric matrices over all ``p N_t + 1`` nodes.
    """

    A: sp.csr_matrix
    Mtilde: sp.csr_matrix
    A_parent: sp.csr_matrix
    M_parent: sp.csr_matrix
    mesh: Mesh1D
    basis: LagrangeBasis
    stabilised: bool
    projection_degree: int | None = None

    @property
    def size(self) -> int:
        return self.A.shape[0]


def assemble_spatial(mesh_x: Mesh1D, basis: LagrangeBasis) -> SpatialMatrices:
    if basis.degree * mesh_x.n_elements < 2:
        raise InvalidParameterError("spatial space has no interior nodes")
    M = _assemble_parent(mesh_x, basis, lambda h: local_mass(basis, h))
    A = _assemble_parent(mesh_x, basis, lambda h: local_stiffness(basis, h))
    interior = slice(1, -1)
    return SpatialMatrices(M[interior, interior].tocsr(), A[interior, interior].tocsr(), mesh_x, basis)


def assemble_temporal(
    mesh_t: Mesh1D,
    basis: LagrangeBasis,
    stabilised: bool = True,
    projection_degree: int | None = None,
) -> TemporalMatrices:
    """Assemble the temporal matrices.

    With ``stabilised`` the mass matrix is perturbed by the element-local
    projection onto degree ``projection_degree`` (default ``p - 1``);
    otherwise the exact mass matrix is used.
    """
    p = basis.degree
    A_par = _assemble_parent(mesh_t, basis, lambda h: local_stiffness(basis, h))
    if stabilised:
        q = p - 1 if projection_degree is None else projection_degree
        M_par = _assemble_parent(mesh_t, basis, lambda h: local_perturbed_mass(p, q, h, basis))
    else:
        q = None
        M_par = _assemble_parent(mesh_t, basis, lambda h: local_mass(basis, h))
    return TemporalMatrices(
        A=A_par[:-1, 1:].tocsr(),
        Mtilde=M_par[:-1, 1:].tocsr(),
        A_parent=A_par,
        M_parent=M_par,
        mesh=mesh_t,
        basis=basis,
        stabilised=stabilised,
        projection_degree=q,
    )


# --------------------------------------------------------------------------
# quadrature on a whole axis


@dataclass(frozen=True)
class QuadraturePlan:
    """How to integrate along one axis of the space-time cylinder.

    Each element is split into ``ceil(h / max_cell)`` equal sub-cells (one if
    ``max_cell`` is None) carrying a ``points``-point Gauss rule. With
    ``graded_end`` the last element is first cut geometrically toward its
    right endpoint into ``graded_pieces`` pieces of widths ``h r, h r^2, ...``
    plus a final piece closing the gap; this handles integrands with an
    integrable singularity at the right end of the axis.
    """

    points: int
    max_cell: float | None = None
    graded_end: bool = False
    graded_pieces: int = 30
    grading_ratio: float = 0.5

    def boosted(self, k: int) -> "QuadraturePlan":
        return QuadraturePlan(self.points + k, self.max_cell, self.graded_end, self.graded_pieces, self.grading_ratio)

    def doubled(self) -> "QuadraturePlan":
        return QuadraturePlan(2 * self.points, self.max_cell, self.graded_end, self.graded_pieces, self.grading_ratio)


# Temporal plans are QuadraturePlans with the graded end switched on.
TemporalQuadraturePlan = QuadraturePlan


def _graded_breaks(a: float, b: float, pieces: int, ratio: float) -> np.ndarray:
    h = b - a
    if pieces <= 1:
        return np.array([a, b])
    widths = h * (1 - ratio) * ratio ** np.arange(pieces - 1)
    cuts = a + np.cumsum(widths)
    return np.concatenate(([a], cuts, [b]))


@dataclass(frozen=True)
class AxisQuadrature:
    """Composite quadrature along one mesh, with basis tables.

    ``values`` and ``derivs`` are sparse ``(n_points, p N + 1)`` matrices of
    the global nodal basis functions (derivatives in physical units) at the
    quadrature points.
    """

    points: np.ndarray
    weights: np.ndarray
    element: np.ndarray
    values: sp.csr_matrix
    derivs: sp.csr_matrix
    n_nodes: int = field(default=0)

    def weighted_values(self) -> sp.csr_matrix:
        return sp.diags(self.weights) @ self.values


def axis_quadrature(mesh: Mesh1D, basis: LagrangeBasis, plan: QuadraturePlan) -> AxisQuadrature:
    if plan.points < 1:
        raise InvalidParameterError("quadrature plan needs at least one point")
    rule = gauss_legendre(plan.points)
    p = basis.degree
    pts, wts, elem = [], [], []
    n_el = mesh.n_elements
    for e, (a, b) in enumerate(mesh.elements()):
        if plan.graded_end and e == n_el - 1:
            breaks = _graded_breaks(a, b, plan.graded_pieces, plan.grading_ratio)
        else:
            breaks = np.array([a, b])
        cells = []
        for lo, hi in zip(breaks[:-1], breaks[1:]):
            m = 1 if plan.max_cell is None else max(1, int(np.ceil((hi - lo) / plan.max_cell - 1e-12)))
            cells.append(np.linspace(lo, hi, m + 1))
        for c in cells:
            lo, width = c[:-1, None], np.diff(c)[:, None]
            pts.append((lo + width * rule.points[None, :]).ravel())
            wts.append((width * rule.weights[None, :]).ravel())
            elem.append(np.full(pts[-1].size, e))
    points = np.concatenate(pts)
    weights = np.concatenate(wts)
    element = np.concatenate(elem)

    h = mesh.sizes[element]
    xi = (points - mesh.vertices[element]) / h
    xi = np.clip(xi, 0.0, 1.0)
    B = basis.values(xi)
    D = basis.derivatives(xi) / h[:, None]
    n_nodes = p * n_el + 1
    cols = element_dofs(n_el, p)[element]
    rows = np.repeat(np.arange(points.size), p + 1)
    shape = (points.size, n_nodes)
    values = sp.csr_matrix((B.ravel(), (rows, cols.ravel())), shape=shape)
    derivs = sp.csr_matrix((D.ravel(), (rows, cols.ravel())), shape=shape)
    return AxisQuadrature(points, weights, element, values, derivs, n_nodes)


def load_plans(degree: int, *, T: float, L: float = 1.0, singular_end: bool = False, boost: int = 0):
    """Default ``(plan_x, plan_t)`` for the load vector: ``p + 4`` points per sub-cell."""
    n = degree + 4 + boost
    return (
        QuadraturePlan(n, max_cell=L / 32),
        QuadraturePlan(n, max_cell=T / 32, graded_end=singular_end),
    )


def _row_chunks(n_rows: int, n_cols: int, budget: int = GRID_CHUNK):
    step = max(1, budget // max(1, n_cols))
    for start in range(0, n_rows, step):
        yield slice(start, min(n_rows, start + step))


def sample_grid(f, x: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Evaluate ``f(x, t)`` on the tensor grid ``t x x`` (shape (len(t), len(x))).

    Raises :class:`EvaluationError` naming the first non-finite sample.
    """
    G = np.asarray(f(x[None, :], t[:, None]), dtype=float)
    G = np.broadcast_to(G, (t.size, x.size))
    bad = ~np.isfinite(G)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        loc = (float(x[j]), float(t[i]))
        raise EvaluationError(f"non-finite sample {G[i, j]!r} at (x, t) = {loc}", loc)
    return G


def assemble_load(
    f,
    mesh_x: Mesh1D,
    mesh_t: Mesh1D,
    basis: LagrangeBasis,
    quad_x: QuadraturePlan,
    quad_t: QuadraturePlan,
) -> np.ndarray:
    """Load vector ``<f, psi_i phi_n>`` in time-major order.

    ``f`` is called as ``f(x, t)`` with broadcastable arrays.
    """
    qx = axis_quadrature(mesh_x, basis, quad_x)
    qt = axis_quadrature(mesh_t, basis, quad_t)
    Px = qx.weighted_values().tocsc()
    Pt = qt.weighted_values().tocsr()
    F = np.zeros((qt.n_nodes, qx.n_nodes))
    for rows in _row_chunks(qt.points.size, qx.points.size):
        G = sample_grid(f, qx.points, qt.points[rows])
        GX = (Px.T @ G.T).T
        F += Pt[rows].T @ GX
    return np.ascontiguousarray(F[:-1, 1:-1]).ravel()


def expand_coefficients(u: np.ndarray, n_time_nodes: int, n_space_nodes: int) -> np.ndarray:
    """Embed a time-major unknown vector into the full nodal array.

    Returns shape ``(n_time_nodes, n_space_nodes)`` with zeros at t = 0 and at
    both spatial boundary nodes.
    """
    nt, nx = n_time_nodes - 1, n_space_nodes - 2
    u = np.asarray(u, dtype=float)
    if u.size != nt * nx:
        raise InvalidParameterError(f"coefficient vector has length {u.size}, expected {nt * nx}")
    U = np.zeros((n_time_nodes, n_space_nodes))
    U[1:, 1:-1] = u.reshape(nt, nx)
    return U
