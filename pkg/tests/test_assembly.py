import numpy as np
import pytest

from stwave.assembly import (
    QuadraturePlan,
    assemble_load,
    assemble_spatial,
    assemble_temporal,
    axis_quadrature,
    element_dofs,
    expand_coefficients,
    load_plans,
    node_coordinates,
)
from stwave.exceptions import EvaluationError, InvalidParameterError
from stwave.linsystem import KroneckerSystem, flatten
from stwave.mesh import Mesh1D, refine, starting_spatial_mesh, starting_temporal_mesh
from stwave.polybasis import LagrangeBasis, gauss_legendre
from stwave.solutions import make_u1


def _uniform(n, length=1.0):
    return Mesh1D(np.linspace(0.0, length, n + 1))


def test_coarse_spatial_matrices_p1():
    sm = assemble_spatial(starting_spatial_mesh(), LagrangeBasis(1))
    np.testing.assert_allclose(sm.A.toarray(), [[16 / 3]], rtol=1e-14)
    np.testing.assert_allclose(sm.M.toarray(), [[1 / 3]], rtol=1e-14)


def _tridiag(n, lower, diag, upper):
    return np.diag(np.full(n, diag)) + np.diag(np.full(n - 1, lower), -1) + np.diag(np.full(n - 1, upper), 1)


def test_uniform_temporal_parents_p1():
    n, h = 6, 0.5
    basis = LagrangeBasis(1)
    stab = assemble_temporal(_uniform(n, n * h), basis)
    plain = assemble_temporal(_uniform(n, n * h), basis, stabilised=False)
    exp_stab = _tridiag(n + 1, h / 4, h / 2, h / 4)
    exp_stab[0, 0] = exp_stab[-1, -1] = h / 4
    exp_plain = _tridiag(n + 1, h / 6, 2 * h / 3, h / 6)
    exp_plain[0, 0] = exp_plain[-1, -1] = h / 3
    np.testing.assert_allclose(stab.M_parent.toarray(), exp_stab, atol=1e-15)
    np.testing.assert_allclose(plain.M_parent.toarray(), exp_plain, atol=1e-15)
    np.testing.assert_allclose(stab.Mtilde.toarray(), exp_stab[:-1, 1:], atol=1e-15)
    exp_a = _tridiag(n + 1, -1 / h, 2 / h, -1 / h)
    exp_a[0, 0] = exp_a[-1, -1] = 1 / h
    np.testing.assert_allclose(stab.A_parent.toarray(), exp_a, atol=1e-13)
    assert stab.projection_degree == 0 and plain.projection_degree is None


@pytest.mark.parametrize("p", [1, 2, 4])
def test_full_degree_projection_gives_plain_mass(p):
    basis = LagrangeBasis(p)
    mesh = refine(starting_temporal_mesh(10.0), 1)
    a = assemble_temporal(mesh, basis, projection_degree=p).M_parent.toarray()
    b = assemble_temporal(mesh, basis, stabilised=False).M_parent.toarray()
    np.testing.assert_allclose(a, b, atol=1e-13)


@pytest.mark.parametrize("p", range(1, 7))
def test_parent_matrices_symmetric(p):
    basis = LagrangeBasis(p)
    tm = assemble_temporal(refine(starting_temporal_mesh(10.0), 2), basis)
    sm = assemble_spatial(refine(starting_spatial_mesh(), 2), basis)
    for mat in (tm.A_parent, tm.M_parent, sm.A, sm.M):
        d = abs(mat - mat.T).max()
        assert d <= 1e-13 * abs(mat).max()


@pytest.mark.parametrize("p", range(1, 7))
def test_truncated_temporal_matrices_are_block_lower_triangular(p):
    tm = assemble_temporal(refine(starting_temporal_mesh(10.0), 1), LagrangeBasis(p))
    n = tm.size
    assert tm.A.shape == (n, n) and n == p * tm.mesh.n_elements
    for mat in (tm.A, tm.Mtilde):
        dense = mat.toarray()
        for r in range(n):
            assert np.all(dense[r, (r // p + 1) * p :] == 0.0)


def _direct_p1_system(mesh_x, mesh_t):
    # direct p = 1 construction: element means of hat functions in time
    nx, nt = mesh_x.n_elements, mesh_t.n_elements
    Ax = np.zeros((nx + 1, nx + 1))
    Mx = np.zeros((nx + 1, nx + 1))
    for e, h in enumerate(mesh_x.sizes):
        idx = np.ix_([e, e + 1], [e, e + 1])
        Ax[idx] += np.array([[1, -1], [-1, 1]]) / h
        Mx[idx] += np.array([[2, 1], [1, 2]]) * h / 6
    At = np.zeros((nt + 1, nt + 1))
    Mt = np.zeros((nt + 1, nt + 1))
    for e, h in enumerate(mesh_t.sizes):
        idx = np.ix_([e, e + 1], [e, e + 1])
        At[idx] += np.array([[1, -1], [-1, 1]]) / h
        Mt[idx] += h / 4
    K = np.zeros(((nt) * (nx - 1), nt * (nx - 1)))
    for n in range(nt):
        for m in range(nt):
            for i in range(nx - 1):
                for j in range(nx - 1):
                    K[n * (nx - 1) + i, m * (nx - 1) + j] = (
                        -At[n, m + 1] * Mx[i + 1, j + 1] + Mt[n, m + 1] * Ax[i + 1, j + 1]
                    )
    return K


@pytest.mark.parametrize("level", [0, 1, 2])
def test_patch_test_p1(level):
    mesh_x = refine(starting_spatial_mesh(), level)
    mesh_t = refine(starting_temporal_mesh(10.0), level)
    basis = LagrangeBasis(1)
    K = flatten(KroneckerSystem(assemble_temporal(mesh_t, basis), assemble_spatial(mesh_x, basis))).toarray()
    oracle = _direct_p1_system(mesh_x, mesh_t)
    np.testing.assert_allclose(K, oracle, atol=1e-13 * np.abs(oracle).max())


@pytest.mark.parametrize("c", [2.0, 0.5, 4.0])
@pytest.mark.parametrize("p", [1, 3])
def test_dilation_scaling(p, c):
    basis = LagrangeBasis(p)
    mesh = refine(starting_temporal_mesh(1.0), 1)
    base = assemble_temporal(mesh, basis)
    scaled = assemble_temporal(Mesh1D(c * mesh.vertices), basis)
    for got, want in ((scaled.A, base.A / c), (scaled.Mtilde, c * base.Mtilde)):
        diff = np.abs(got.toarray() - want.toarray())
        assert np.all(diff <= 2 * np.spacing(np.abs(want.toarray())))


def test_element_dofs_and_nodes():
    np.testing.assert_array_equal(element_dofs(3, 2), [[0, 1, 2], [2, 3, 4], [4, 5, 6]])
    x = node_coordinates(starting_spatial_mesh(), LagrangeBasis(2))
    np.testing.assert_allclose(x, [0, 0.125, 0.25, 0.625, 1.0])


def test_spatial_needs_interior_nodes():
    with pytest.raises(InvalidParameterError):
        assemble_spatial(Mesh1D(np.array([0.0, 1.0])), LagrangeBasis(1))


def test_axis_quadrature_integrates_exactly():
    mesh = refine(starting_temporal_mesh(10.0), 1)
    for plan in (QuadraturePlan(3), QuadraturePlan(3, max_cell=0.5), QuadraturePlan(3, 10 / 32, graded_end=True)):
        q = axis_quadrature(mesh, LagrangeBasis(2), plan)
        assert q.weights.sum() == pytest.approx(10.0, rel=1e-14)
        assert q.weights @ q.points**5 == pytest.approx(10**6 / 6, rel=1e-13)
        assert np.all(np.diff(q.points) > 0)


def _load(f, level, p, plans):
    mesh_x = refine(starting_spatial_mesh(), level)
    mesh_t = refine(starting_temporal_mesh(10.0), level)
    return assemble_load(f, mesh_x, mesh_t, LagrangeBasis(p), *plans), mesh_x, mesh_t


def test_zero_load():
    F, _, _ = _load(lambda x, t: 0 * x * t, 1, 2, load_plans(2, T=10.0))
    assert F.shape == ((2 * 6) * (2 * 4 - 1),)
    assert np.all(F == 0.0)


@pytest.mark.parametrize("p", [1, 3])
def test_constant_load_sums_to_column_integrals(p):
    # sum over all temporal test functions (including the one at t = T) is T * int psi_i
    plans = (QuadraturePlan(p + 1), QuadraturePlan(p + 1))
    F, mesh_x, mesh_t = _load(lambda x, t: np.ones(np.broadcast(x, t).shape), 1, p, plans)
    basis = LagrangeBasis(p)
    n_space = p * mesh_x.n_elements - 1
    q = gauss_legendre(p + 1)
    node_weights = q.weights @ basis.values(q.points)
    last_node = mesh_t.sizes[-1] * node_weights[-1]
    psi = np.zeros(p * mesh_x.n_elements + 1)
    for e, h in enumerate(mesh_x.sizes):
        psi[element_dofs(mesh_x.n_elements, p)[e]] += h * node_weights
    psi = psi[1:-1]
    col = F.reshape(-1, n_space).sum(axis=0)
    np.testing.assert_allclose(col + last_node * psi, 10.0 * psi, rtol=1e-13)
    if p == 1:
        interior = (mesh_x.sizes[:-1] + mesh_x.sizes[1:]) / 2
        np.testing.assert_allclose(psi, interior, rtol=1e-14)


def test_u1_load_matches_overintegrated_oracle():
    f = make_u1(10.0).f
    px, pt = load_plans(1, T=10.0)
    F, _, _ = _load(f, 2, 1, (px, pt))
    ref, _, _ = _load(f, 2, 1, (QuadraturePlan(4 * px.points, px.max_cell), QuadraturePlan(4 * pt.points, pt.max_cell)))
    assert np.linalg.norm(F - ref) <= 1e-10 * np.linalg.norm(ref)


def test_nonfinite_load_reports_location():
    def bad(x, t):
        return np.where((x > 0.5) & (t > 5.0), np.nan, 1.0)

    with pytest.raises(EvaluationError) as info:
        _load(bad, 0, 1, load_plans(1, T=10.0))
    x, t = info.value.location
    assert x > 0.5 and t > 5.0


def test_expand_coefficients():
    U = expand_coefficients(np.arange(6.0), 3, 5)
    assert U.shape == (3, 5)
    assert np.all(U[0] == 0) and np.all(U[:, 0] == 0) and np.all(U[:, -1] == 0)
    np.testing.assert_array_equal(U[1:, 1:-1].ravel(), np.arange(6.0))
    with pytest.raises(InvalidParameterError):
        expand_coefficients(np.arange(5.0), 3, 5)
