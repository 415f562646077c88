"""The space-time system ``K = -A_t (x) M_x + Mtilde_t (x) A_x`` and its solution.

Two direct solvers share one contract:

``"march"``
    The truncated temporal matrices are block lower triangular with ``p x p``
    diagonal blocks (one block per temporal element), so ``K`` is block lower
    triangular with blocks of size ``p M_x``. Each diagonal block depends on
    the element size only; it is factorised once per distinct size and the
    system is solved by block forward substitution.
``"lu"``
    Sparse LU with partial pivoting (SuperLU) of the flattened matrix.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .assembly import SpatialMatrices, TemporalMatrices
from .exceptions import AccuracyWarning, SolverError, StructureError

RESIDUAL_TOL = 1e-10
# pivots below this fraction of the largest one count as rank deficiency
PIVOT_TOL = 1e-13
SOLVERS = ("march", "lu")


@dataclass(frozen=True)
class KroneckerSystem:
    temporal: TemporalMatrices
    spatial: SpatialMatrices

    def __post_init__(self):
        At, Mt = self.temporal.A, self.temporal.Mtilde
        Ax, Mx = self.spatial.A, self.spatial.M
        if At.shape != Mt.shape or At.shape[0] != At.shape[1]:
            raise StructureError(f"temporal matrices have shapes {At.shape} and {Mt.shape}")
        if Ax.shape != Mx.shape or Ax.shape[0] != Ax.shape[1]:
            raise StructureError(f"spatial matrices have shapes {Ax.shape} and {Mx.shape}")

    @property
    def n_time(self) -> int:
        return self.temporal.size

    @property
    def n_space(self) -> int:
        return self.spatial.size

    @property
    def dimension(self) -> int:
        return self.n_time * self.n_space


def flatten(system: KroneckerSystem) -> sp.csr_matrix:
    """Assemble ``K`` as a sparse matrix in time-major ordering."""
    t, s = system.temporal, system.spatial
    K = sp.kron(-t.A, s.M, format="csr") + sp.kron(t.Mtilde, s.A, format="csr")
    K.sort_indices()
    return K


def _check_length(system: KroneckerSystem, v: np.ndarray):
    if v.ndim != 1 or v.size != system.dimension:
        raise StructureError(f"vector of shape {v.shape} does not match dimension {system.dimension}")


def apply(system: KroneckerSystem, v: np.ndarray) -> np.ndarray:
    """Matrix-free product ``K v`` via ``(A (x) B) vec(V) = vec(A V B^T)``."""
    v = np.asarray(v, dtype=float)
    _check_length(system, v)
    t, s = system.temporal, system.spatial
    V = v.reshape(system.n_time, system.n_space)
    W = -(s.M @ (t.A @ V).T).T + (s.A @ (t.Mtilde @ V).T).T
    return W.ravel()


def relative_residual(system: KroneckerSystem, u: np.ndarray, rhs: np.ndarray) -> float:
    r = apply(system, u) - rhs
    nf = np.linalg.norm(rhs)
    nr = np.linalg.norm(r)
    if nf == 0.0:
        return 0.0 if nr == 0.0 else float("inf")
    return float(nr / nf)


def _factorise(K: sp.spmatrix, offset: int = 0):
    try:
        lu = splu(sp.csc_matrix(K), permc_spec="COLAMD")
    except RuntimeError as exc:
        raise SolverError(f"factorisation failed: {exc}", pivot=offset) from exc
    piv = np.abs(lu.U.diagonal())
    scale = piv.max() if piv.size else 0.0
    k = int(np.argmin(piv))
    if not np.isfinite(scale) or scale == 0.0 or piv[k] <= PIVOT_TOL * scale:
        col = int(np.flatnonzero(lu.perm_c == k)[0])
        raise SolverError(
            f"numerically singular pivot {piv[k]:.3e} (largest {scale:.3e}) at unknown {offset + col}",
            pivot=offset + col,
        )
    return lu


def _solve_lu(system: KroneckerSystem, rhs: np.ndarray) -> np.ndarray:
    lu = _factorise(flatten(system))
    return lu.solve(rhs)


def temporal_block_size(temporal: TemporalMatrices) -> int | None:
    """Block size p if the truncated temporal matrices are block lower triangular."""
    p = temporal.basis.degree
    for mat in (temporal.A, temporal.Mtilde):
        coo = mat.tocoo()
        nz = coo.data != 0.0
        if np.any(coo.col[nz] // p > coo.row[nz] // p):
            return None
    return p


def _solve_march(system: KroneckerSystem, rhs: np.ndarray) -> np.ndarray:
    t, s = system.temporal, system.spatial
    p = temporal_block_size(t)
    if p is None:
        raise StructureError("temporal matrices are not block lower triangular")
    nt, nx = system.n_time, system.n_space
    At, Mt = t.A.tocsr(), t.Mtilde.tocsr()
    Mx, Ax = s.M.tocsc(), s.A.tocsc()
    F = rhs.reshape(nt, nx)
    U = np.zeros((nt, nx))
    factors = {}
    for r in range(nt // p):
        rows = slice(r * p, (r + 1) * p)
        a_blk = At[rows, rows].toarray()
        m_blk = Mt[rows, rows].toarray()
        key = (a_blk.tobytes(), m_blk.tobytes())
        lu = factors.get(key)
        if lu is None:
            D = sp.kron(-a_blk, Mx) + sp.kron(m_blk, Ax)
            lu = _factorise(D, offset=r * p * nx)
            factors[key] = lu
        # rows of the current block still hold zeros in U, so the full-row
        # products only pick up already computed (earlier) blocks
        coupling = -(Mx @ (At[rows] @ U).T).T + (Ax @ (Mt[rows] @ U).T).T
        b = (F[rows] - coupling).ravel()
        U[rows] = lu.solve(b).reshape(p, nx)
    return U.ravel()


def solve(system: KroneckerSystem, rhs: np.ndarray, method: str = "march", rtol: float = RESIDUAL_TOL) -> np.ndarray:
    """Solve ``K u = rhs``.

    Raises :class:`SolverError` on a singular or numerically rank-deficient
    factorisation and issues an :class:`AccuracyWarning` if the relative
    residual exceeds ``rtol``.
    """
    rhs = np.asarray(rhs, dtype=float)
    _check_length(system, rhs)
    if method == "march":
        u = _solve_march(system, rhs)
    elif method == "lu":
        u = _solve_lu(system, rhs)
    else:
        raise ValueError(f"unknown solver {method!r}; choose from {SOLVERS}")
    if not np.all(np.isfinite(u)):
        raise SolverError("solution contains non-finite values")
    res = relative_residual(system, u, rhs)
    if res > rtol:
        warnings.warn(f"relative residual {res:.3e} exceeds {rtol:.1e}", AccuracyWarning, stacklevel=2)
    return u
