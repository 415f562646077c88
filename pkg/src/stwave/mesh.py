"""One-dimensional meshes for the spatial and the temporal interval."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidParameterError


@dataclass(frozen=True)
class Mesh1D:
    """Decomposition of an interval by a strictly increasing vertex list.

    Element ``k`` is ``(vertices[k], vertices[k+1])``. Only the vertices are
    stored; everything else is derived from them.
    """

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 1 or v.size < 2:
            raise InvalidParameterError("a mesh needs at least two vertices")
        if not np.all(np.isfinite(v)):
            raise InvalidParameterError("mesh vertices must be finite")
        if np.any(np.diff(v) <= 0.0):
            raise InvalidParameterError("mesh vertices must be strictly increasing")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def n_elements(self) -> int:
        return self.vertices.size - 1

    @property
    def sizes(self) -> np.ndarray:
        return np.diff(self.vertices)

    @property
    def left(self) -> float:
        return float(self.vertices[0])

    @property
    def right(self) -> float:
        return float(self.vertices[-1])

    @property
    def length(self) -> float:
        return self.right - self.left

    def elements(self):
        """Yield ``(a, b)`` for every element in ascending order."""
        for a, b in zip(self.vertices[:-1], self.vertices[1:]):
            yield float(a), float(b)

    def __eq__(self, other):
        if not isinstance(other, Mesh1D):
            return NotImplemented
        return np.array_equal(self.vertices, other.vertices)

    def __hash__(self):
        return hash(self.vertices.tobytes())

    def __repr__(self):
        return f"Mesh1D(n_elements={self.n_elements}, [{self.left}, {self.right}])"


def starting_spatial_mesh() -> Mesh1D:
    """Coarse non-uniform mesh of (0, 1) with vertices 0, 1/4, 1."""
    return Mesh1D(np.array([0.0, 0.25, 1.0]))


def starting_temporal_mesh(T: float) -> Mesh1D:
    """Coarse non-uniform mesh of (0, T) with vertices 0, T/8, T/4, T."""
    if not np.isfinite(T) or T <= 0:
        raise InvalidParameterError(f"terminal time must be positive, got {T!r}")
    return Mesh1D(np.array([0.0, T / 8, T / 4, T]))


def refine_uniform(mesh: Mesh1D) -> Mesh1D:
    """Bisect every element at its midpoint."""
    v = mesh.vertices
    out = np.empty(2 * v.size - 1)
    out[0::2] = v
    out[1::2] = 0.5 * (v[:-1] + v[1:])
    return Mesh1D(out)


def refine(mesh: Mesh1D, times: int) -> Mesh1D:
    """Apply :func:`refine_uniform` ``times`` times."""
    if times < 0:
        raise InvalidParameterError("number of refinements must be non-negative")
    for _ in range(times):
        mesh = refine_uniform(mesh)
    return mesh


def mesh_stats(mesh: Mesh1D) -> tuple[float, float]:
    """Return ``(h_max, h_min)``."""
    h = mesh.sizes
    return float(h.max()), float(h.min())
