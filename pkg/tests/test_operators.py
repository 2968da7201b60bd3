import numpy as np
import pytest

from blockrg import lattice as lat, operators as ops


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def test_delta_field_pairing(rng):
    g = lat.make_geometry(1, 3, 1, 2)
    f = ops.random_field(g, rng)
    for site in [(0,), (4,), (8,)]:
        assert ops.inner(ops.delta_field(g, site), f) == pytest.approx(
            f.values[lat.site_to_flat(g, site)])


def test_delta_field_norm():
    g = lat.make_geometry(1, 3, 1, 2)
    d = ops.delta_field(g, (4,))
    assert ops.inner(d, d).real == pytest.approx(3.0)  # eta**-d = 3
    assert d.values[lat.site_to_flat(g, (4,))] == pytest.approx(3.0)
    with pytest.raises(ops.OperatorError):
        ops.delta_field(g, (9,))


def test_identity_and_adjoint(rng):
    g = lat.make_geometry(2, 3, 1, 1)
    f = ops.random_field(g, rng)
    assert np.allclose(ops.apply(ops.identity(g), f).values, f.values)
    A = ops.KernelOperator(g, g, rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9)))
    assert np.array_equal(ops.adjoint(ops.adjoint(A)).kernel, A.kernel)
    h, f2 = ops.random_field(g, rng), ops.random_field(g, rng)
    lhs = ops.inner(h, ops.apply(A, f2))
    rhs = ops.inner(ops.apply(ops.adjoint(A), h), f2)
    assert lhs == pytest.approx(rhs, rel=1e-13)


def test_invert_two_site_neumann():
    # 2-site Neumann stencil at eta = 1: (-Lap + 1) has the hand-solved matrix
    T = ops._neumann_lap_1d(2, 1.0)
    assert np.allclose(T, [[-1.0, 1.0], [1.0, -1.0]])
    M = -T + np.eye(2)
    assert np.allclose(M, [[2.0, -1.0], [-1.0, 2.0]])
    rng = np.random.default_rng(4)
    f = rng.standard_normal(2)
    assert np.max(np.abs(M @ np.linalg.solve(M, f) - f)) < 1e-14


def test_invert_roundtrip(rng):
    g = lat.make_geometry(1, 3, 1, 2)
    lap = ops.neumann_laplacian(g)
    A = ops.scale(lap, -1.0) + ops.identity(g)
    Ainv = ops.invert(A)
    f = ops.random_field(g, rng)
    back = ops.apply(A, ops.apply(Ainv, f))
    assert np.max(np.abs(back.values - f.values)) < 1e-12 * np.max(np.abs(f.values))
    assert ops.rel_frobenius(ops.invert(Ainv), A) < 1e-12


def test_singular_raises():
    g = lat.make_geometry(1, 3, 1, 1)
    lap = ops.neumann_laplacian(g)  # constants in kernel -> singular
    with pytest.raises(ops.SingularOperatorError):
        ops.invert(lap)


def test_compose_adjoint_algebra(rng):
    g = lat.make_geometry(1, 3, 1, 2)
    c = lat.coarse_geometry(g, 1)
    Q = ops.averaging(g, 1)
    A = ops.KernelOperator(c, c, rng.standard_normal((3, 3)))
    lhs = ops.adjoint(A @ Q)
    rhs = ops.adjoint(Q) @ ops.adjoint(A)
    assert np.allclose(lhs.kernel, rhs.kernel, atol=1e-14)


def test_forward_diff_reference():
    g = lat.make_geometry(1, 3, 0, 1)  # 3 sites, eta = 1
    f = ops.Field(g, [0.0, 1.0, 2.0])
    out = ops.apply(ops.forward_diff(g, 0), f)
    assert np.allclose(out.values, [1.0, 1.0, 0.0])
    const = ops.constant_field(g, 2.3)
    assert np.allclose(ops.apply(ops.forward_diff(g, 0), const).values, 0.0)
    assert np.allclose(ops.apply(ops.backward_diff(g, 0), const).values, 0.0)


def test_integration_by_parts(rng):
    # <f, del g> = <del^dagger f, g> - conj(f_0) g_0 + conj(f_{N-1}) g_{N-1}
    g = lat.make_geometry(1, 3, 1, 2)
    f, h = ops.random_field(g, rng), ops.random_field(g, rng)
    lhs = ops.inner(f, ops.apply(ops.forward_diff(g, 0), h))
    rhs = ops.inner(ops.apply(ops.backward_diff(g, 0), f), h)
    rhs += -np.conj(f.values[0]) * h.values[0] + np.conj(f.values[-1]) * h.values[-1]
    assert lhs == pytest.approx(rhs, abs=1e-12 * max(1.0, abs(lhs)))


def test_leibniz_rule(rng):
    g = lat.make_geometry(1, 3, 1, 2)
    D = ops.forward_diff(g, 0).matrix
    f = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    h = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    fg = D @ (f * h)
    h_shift = np.append(h[1:], h[-1])  # Neumann ghost
    rhs = (D @ f) * h_shift + f * (D @ h)
    assert np.max(np.abs(fg - rhs)) < 1e-12


def test_neumann_laplacian_reference():
    g = lat.make_geometry(1, 3, 1, 1)
    M = ops.neumann_laplacian(g).matrix
    eta2 = g.spacing**2
    expect = np.array([[-1, 1, 0], [1, -2, 1], [0, 1, -1]]) / eta2
    assert np.allclose(M, expect)
    assert np.allclose(M @ np.ones(3), 0.0, atol=1e-12)


def test_laplacian_positivity_form(rng):
    g = lat.make_geometry(2, 3, 1, 1)
    lap = ops.neumann_laplacian(g)
    f = ops.random_field(g, rng)
    quad = -ops.inner(f, ops.apply(lap, f)).real
    # oracle: explicit bond sum
    vals = f.values.reshape(3, 3)
    bonds = 0.0
    for i in range(3):
        for j in range(3):
            if i + 1 < 3:
                bonds += abs(vals[i + 1, j] - vals[i, j]) ** 2
            if j + 1 < 3:
                bonds += abs(vals[i, j + 1] - vals[i, j]) ** 2
    expect = g.spacing**g.d * bonds / g.spacing**2
    assert quad == pytest.approx(expect, rel=1e-12)
    assert quad >= 0.0


def test_averaging_reference():
    g = lat.make_geometry(1, 3, 1, 2)
    Q = ops.averaging(g, 1)
    f = ops.Field(g, [1, 2, 3, 0, 0, 0, 0, 0, 0])
    assert np.allclose(ops.apply(Q, f).values, [2.0, 0.0, 0.0])
    ones = ops.constant_field(g, 1.0)
    assert np.allclose(ops.apply(Q, ones).values, 1.0)


def test_averaging_partial_isometry():
    g = lat.make_geometry(2, 3, 1, 2)
    for j in (1, 2):
        Q = ops.averaging(g, j)
        coarse = lat.coarse_geometry(g, j)
        QQs = Q @ ops.adjoint(Q)
        assert ops.rel_frobenius(QQs, ops.identity(coarse)) < 1e-14
        P = ops.block_projector(g, j)
        assert ops.rel_frobenius(P @ P, P) < 1e-14
        assert ops.self_adjointness_defect(P) < 1e-14


def test_scaling_unitary(rng):
    g = lat.make_geometry(2, 3, 1, 2)
    S0 = ops.scaling_unitary(g, 0)
    assert np.allclose(S0.matrix, np.eye(g.site_count))
    S = ops.scaling_unitary(g, 1)
    f = ops.random_field(g, rng)
    assert ops.norm(ops.apply(S, f)) == pytest.approx(ops.norm(f), rel=1e-14)
    # semigroup
    S2 = ops.scaling_unitary(lat.scale_geometry(g, 1), 1)
    both = S2 @ S
    direct = ops.scaling_unitary(g, 2)
    assert ops.rel_frobenius(both, direct) < 1e-14


@pytest.mark.parametrize("d", [1, 2])
def test_laplacian_scaling_intertwining(d):
    g = lat.make_geometry(d, 3, 1, 2 if d == 1 else 1)
    S = ops.scaling_unitary(g, 1)
    lam = 3.0
    lhs = lam**2 * (ops.adjoint(S) @ ops.neumann_laplacian(lat.scale_geometry(g, 1)) @ S)
    assert ops.rel_frobenius(lhs, ops.neumann_laplacian(g)) < 1e-12


def test_spectrum_1d_closed_form():
    for n in (2, 5, 27):
        rep = ops.laplacian_spectrum_1d(n, 1.0 / 3.0)
        assert ops.spectrum_rel_error(rep) < 1e-10
    rep2 = ops.laplacian_spectrum_1d(2, 1.0)
    assert np.allclose(rep2.eigenvalues, [-2.0, 0.0])


def test_chebyshev_basics():
    alpha = np.linspace(-1, 1, 7)
    assert np.allclose(ops.chebyshev_u(0, alpha), 1.0)
    assert np.allclose(ops.chebyshev_u(1, alpha), 2 * alpha)
    assert np.allclose(np.sort(ops.chebyshev_roots(2)), [-0.5, 0.5])


def test_chebyshev_roots_vs_polynomial():
    for n in (3, 8, 15):
        # independent oracle: monomial coefficients by recurrence, then np.roots
        coeffs = {0: np.array([1.0]), 1: np.array([0.0, 2.0])}
        for mm in range(2, n + 1):
            a = np.zeros(mm + 1)
            a[1:] += 2.0 * coeffs[mm - 1]
            a[: mm - 1] -= coeffs[mm - 2]
            coeffs[mm] = a
        numeric = np.sort(np.roots(coeffs[n][::-1]).real)
        assert np.max(np.abs(numeric - ops.chebyshev_roots(n))) < 1e-10
        assert np.max(np.abs(ops.chebyshev_u(n, ops.chebyshev_roots(n)))) < 1e-9


def test_min_eigenvalue():
    g = lat.make_geometry(1, 3, 1, 1)
    assert ops.min_eigenvalue(ops.identity(g)) == pytest.approx(1.0)
    negl = ops.scale(ops.neumann_laplacian(g), -1.0)
    assert abs(ops.min_eigenvalue(negl)) < 1e-12
    bad = ops.KernelOperator(g, g, np.array([[0, 1, 0], [0, 0, 0], [0, 0, 0.0]]))
    with pytest.raises(ops.OperatorError):
        ops.min_eigenvalue(bad)


def test_unit_cube_coercivity():
    # -Lap + a Q*Q >= c (-Lap + 1) on one unit cube, c > 0
    from blockrg import multiscale as ms
    g = lat.make_geometry(1, 3, 1, 1)
    D0 = ms.defining_operator(g, ms.MultiscaleParams(), 1)
    ref = ops.scale(ops.neumann_laplacian(g), -1.0) + ops.identity(g)
    c = ops.min_eigenvalue(D0) / ops.min_eigenvalue(ref)
    assert c > 0


def test_neumann_free_compatibility():
    # fields symmetric at the boundary: Neumann Laplacian of restriction equals
    # the free stencil on the enlarged patch, exactly
    g = lat.make_geometry(1, 3, 1, 1)
    N = g.sites_per_axis
    patch = lat.FreePatch(d=1, L=3, k=1, lo=(-1,), hi=(N,))
    rng = np.random.default_rng(0)
    inner_vals = rng.standard_normal(N)
    full = np.concatenate([[inner_vals[0]], inner_vals, [inner_vals[-1]]])
    M = ops.free_laplacian_patch(patch)
    free_applied = (M @ full)[1:-1]
    neu = ops.neumann_laplacian(g).matrix @ inner_vals
    assert np.allclose(free_applied, neu, atol=1e-13)


def test_interior_stencil_reflection_symmetric():
    # conjugating the interior stencil by an axis reflection leaves it unchanged
    patch = lat.FreePatch(d=1, L=3, k=1, lo=(-4,), hi=(3,))
    M = ops.free_laplacian_patch(patch)
    n = patch.site_count
    P = np.zeros((n, n))
    sites = lat.patch_sites(patch)[:, 0]
    index = {int(s): i for i, s in enumerate(sites)}
    for s, i in index.items():
        P[index[-1 - s], i] = 1.0  # reflection about -1/2 maps the patch to itself
    inner = ops.patch_interior_mask(patch)
    lhs = (P @ M @ P)[np.ix_(inner, inner)]
    rhs = M[np.ix_(inner, inner)]
    assert np.allclose(lhs, rhs, atol=1e-14)
