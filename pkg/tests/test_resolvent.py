import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from psido import catalog
from psido.errors import NearSingular
from psido.quantize import GridContext, GridOperator, heat_operator, quantize
from psido.resolvent import (
    ResolventFamily,
    default_t_grid,
    first_defect,
    interpolation_constant,
    loglog_slope,
    naive_inverse_defect,
    parametrix_family,
    resolvent_symbol,
    true_resolvent,
)
from psido.sobolev import build_pack, op_sobolev_norm
from psido.symbols import Region, bracket_symbol, estimate_seminorms

TS = (1, 2, 4, 8, 16, 32, 64)
WIDE = Region(xi_range=(-64, 64), nx=32, nxi=1025)


@pytest.fixture(scope="module")
def family(grid, c2):
    return ResolventFamily(c2, heat_operator(grid), grid)


def test_default_t_grid():
    assert default_t_grid() == tuple(sorted([-t for t in TS] + list(TS)))


def test_symbol_bounded_by_inverse_t(c2):
    x, xi = np.linspace(-np.pi, np.pi, 16), np.linspace(-40, 40, 161)
    for t in (1, -3, 64):
        v = np.abs(resolvent_symbol(c2, t)(x, xi))
        assert v.max() <= 1 / abs(t)
    assert resolvent_symbol(c2, 5).m == -2


@pytest.mark.parametrize("a", [0.0, 0.5, 1.0])
def test_interpolation_bound(a):
    xs = np.concatenate([-np.logspace(-2, 4, 200), np.logspace(-2, 4, 200)])
    ts = np.concatenate([-np.logspace(0, 3, 60), np.logspace(0, 3, 60)])
    assert interpolation_constant(a, xs, ts) <= 2.0


def test_symbol_seminorm_sweep(c2):
    at = [estimate_seminorms(resolvent_symbol(c2, t), (1, 2), WIDE).max() for t in TS]
    assert max(at) / min(at) <= 3
    # order -m + 1/2 with m = 2: decay rate t^(-1/4)
    half = np.array([estimate_seminorms(resolvent_symbol(c2, t), (1, 2), WIDE, order=-1.5).max() for t in TS])
    scaled = half * np.array(TS) ** 0.25
    assert scaled.max() / scaled.min() <= 3
    assert np.all(np.diff(half) < 0)
    base = np.array([estimate_seminorms(resolvent_symbol(c2, t), (0, 0), WIDE, order=-1.5).max() for t in TS])
    assert loglog_slope(TS, base) == pytest.approx(-0.25, abs=0.02)


def test_naive_defect_constant_coefficients(grid):
    D = naive_inverse_defect(bracket_symbol(2.0), 3.0, grid)
    assert np.linalg.norm(D.matrix, 2) <= 1e-10


def test_naive_defect_variable_coefficients(c2):
    sups = []
    for N in (128, 256, 512):
        g = GridContext(N)
        pack = build_pack(g, ())
        sups.append(max(op_sobolev_norm(pack, naive_inverse_defect(c2, t, g), 0, 1) for t in TS))
    assert max(sups) / min(sups) <= 2
    g = GridContext(256)
    pack = build_pack(g, ())
    half = [op_sobolev_norm(pack, naive_inverse_defect(c2, t, g), 0, 0.5) for t in (1, 64)]
    assert half[1] <= half[0] / 3


def test_parametrix_exact_for_constant_coefficients(grid):
    c = bracket_symbol(2.0)
    for t in (1.0, -7.0):
        G = parametrix_family(c, None, t, 3, grid).matrix
        exact = np.linalg.inv(quantize(c, grid).matrix + 1j * t * np.eye(grid.N))
        assert np.linalg.norm(G - exact, 2) <= 1e-10


def test_residual_is_neumann_tail(family, grid):
    t, k = 4.0, 2
    E, _ = first_defect(family.c, family.R, t, grid)
    G = family.parametrix(t, k).matrix
    res = (family.T.matrix + 1j * t * np.eye(grid.N)) @ G - np.eye(grid.N)
    np.testing.assert_allclose(res, -np.linalg.matrix_power(E, k + 1), atol=1e-10)


def test_parametrix_residual_uniform(family):
    k1 = [family.residual(t, 1, 0.0, 1.0) for t in TS]
    assert max(k1) < 1.0 and max(k1) == k1[0]
    k6 = [family.residual(t, 6, -1.0, 1.0) for t in TS]
    assert max(k6) < 0.1


def test_literal_defect_keeps_smoothing_term(family, grid):
    lit = [np.linalg.norm(first_defect(family.c, family.R, t, grid, literal=True)[0], 2) for t in (16, 64)]
    cor = [np.linalg.norm(first_defect(family.c, family.R, t, grid)[0], 2) for t in (16, 64)]
    assert lit[1] > 0.5 * np.linalg.norm(family.R.matrix, 2)
    assert cor[1] < cor[0] and cor[1] < lit[1] / 10


def test_true_resolvent_bound_and_factor(c2, grid):
    R = heat_operator(grid)
    pack = build_pack(grid, ())
    res = {t: true_resolvent(c2, R, t, grid, pack) for t in (4, 64)}
    for t, r in res.items():
        assert np.linalg.norm(r.inverse.matrix, 2) <= 1 / t * (1 + 1e-12)
        assert np.isfinite(r.R1_guillemin)
    assert res[64].R1_norm <= 0.5 * res[4].R1_norm
    Q = quantize(resolvent_symbol(c2, 4), grid).matrix
    np.testing.assert_allclose(Q @ (np.eye(grid.N) + res[4].R1.matrix), res[4].inverse.matrix, atol=1e-10)


def test_r1_sobolev_bounded(c2, grid):
    R = heat_operator(grid)
    pack = build_pack(grid, ())
    v = [op_sobolev_norm(pack, true_resolvent(c2, R, t, grid, pack).R1.matrix, 0, 1) for t in TS]
    w = [op_sobolev_norm(pack, true_resolvent(c2, R, t, grid, pack).R1.matrix, -1, 0) for t in TS]
    assert max(v) < 10 * min(v[:1]) and max(w) < 10 * w[0]


def test_near_singular(small_grid):
    c = bracket_symbol(0.0)
    R = GridOperator(-(1 + 1j) * np.eye(small_grid.N), small_grid)
    with pytest.raises(NearSingular):
        true_resolvent(c, R, 1.0, small_grid)


def test_adjoint_symmetry(family):
    for t in (2.0, 16.0):
        np.testing.assert_allclose(family.resolvent(t).matrix.conj().T, family.resolvent(-t).matrix,
                                   atol=1e-14)


@given(st.floats(1, 64), st.floats(1, 64), st.booleans())
def test_resolvent_identity(t, s, flip):
    grid = GridContext(64)
    fam = ResolventFamily(catalog.c2_symbol(), heat_operator(grid), grid)
    s = -s if flip else s
    A, B = fam.resolvent(t).matrix, fam.resolvent(s).matrix
    lhs = A - B
    rhs = -1j * (t - s) * A @ B
    assert np.linalg.norm(lhs - rhs) <= 1e-9 * max(np.linalg.norm(A), 1e-300)


@pytest.mark.parametrize("k", [0, 2, 5])
def test_left_right_parametrices_agree(family, k):
    # q E_1 = F_1 q, so both Neumann sums give the same operator
    for t in TS:
        d = family.parametrix(t, k).matrix - family.parametrix(t, k, side="left").matrix
        assert op_sobolev_norm(family.pack, d, -2, 2) <= 1e-8


def test_loglog_slope():
    ts = np.array([4, 8, 16, 32])
    assert loglog_slope(ts, 3.0 / ts) == pytest.approx(-1.0)
