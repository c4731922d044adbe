import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from psido import catalog
from psido.quantize import GridContext, heat_operator, identity, quantize
from psido.sobolev import build_pack, guillemin_norm, op_sobolev_norm, pack_operator, sobolev_norm
from psido.symbols import bracket_symbol, r_symbol


def test_p0_is_identity(grid):
    pack = build_pack(grid, (0,))
    np.testing.assert_array_equal(pack.matrix(0), np.eye(grid.N))


def test_p2_eigenvalues(grid):
    pack = build_pack(grid, (2, -2))
    r = r_symbol()(0.0, grid.xi)[0]
    for k in (-50, -3, 0, 5, 60):
        u = grid.plane_wave(k)
        v = pack.matrix(2) @ u
        lam = 0.5 * (1 + r[k + grid.N // 2] ** 2)
        np.testing.assert_allclose(v, lam * u, rtol=1e-8, atol=1e-8 * lam)
    np.testing.assert_allclose(pack.matrix(-2) @ pack.matrix(2), np.eye(grid.N), atol=1e-10)


def test_sobolev_norm_of_plane_wave(grid, pack):
    assert sobolev_norm(pack, np.zeros(grid.N), 2) == 0
    k = 12
    lam = 0.5 * (1 + r_symbol()(0.0, grid.xi[k + grid.N // 2]) ** 2)
    assert sobolev_norm(pack, grid.plane_wave(k), 2) == pytest.approx(np.sqrt(grid.L) * lam, rel=1e-10)
    assert sobolev_norm(pack, grid.plane_wave(k), 0) == pytest.approx(np.sqrt(grid.L), rel=1e-12)


@given(st.integers(0, 2 ** 32 - 1), st.floats(-3, 3), st.floats(0, 3))
def test_norm_monotone_in_s(seed, s, gap):
    grid = GridContext(64)
    pack = build_pack(grid, ())
    u = np.random.default_rng(seed).standard_normal(64)
    # r >= 1 makes every weight of P_s at least 1/2^{|s|}-comparable; the pack constant is 1
    assert sobolev_norm(pack, u, s) <= sobolev_norm(pack, u, s + gap) * 1.0000001


def test_identity_operator_norm(grid, pack):
    for s in (-2, 0, 1.5):
        assert op_sobolev_norm(pack, identity(grid), s, s) == pytest.approx(1.0, abs=1e-10)


def test_refinement_of_order_two_operator(c2):
    at, above = [], []
    for N in (128, 256, 512):
        g = GridContext(N)
        pack = build_pack(g, ())
        T = quantize(c2, g)
        at.append(op_sobolev_norm(pack, T, 0, -2))
        above.append(op_sobolev_norm(pack, T, 0, -1))
    assert max(at) / min(at) <= 2
    assert above[1] / above[0] >= 1.5 and above[2] / above[1] >= 1.5


def test_guillemin_norms(grid, pack, rng):
    assert guillemin_norm(pack, np.zeros((grid.N, grid.N)), 2) == 0
    heat = heat_operator(grid, 0.1)
    heat2 = heat_operator(grid, 0.3)
    K = catalog.bump_rank_one(grid)
    for n in (1, 2, 3):
        for A, B in ((heat, heat2), (K, heat), (heat2, K)):
            lhs = guillemin_norm(pack, (A @ B).matrix, n)
            assert lhs <= guillemin_norm(pack, A.matrix, n) * guillemin_norm(pack, B.matrix, n) * (1 + 1e-12)


def test_heat_guillemin_refinement_stable():
    for n in (1, 2, 3, 4):
        v = [guillemin_norm(build_pack(GridContext(N), ()), heat_operator(GridContext(N)).matrix, n)
             for N in (256, 512, 1024)]
        assert max(v) / min(v) <= 2


def test_duality(grid, pack, rng):
    u = rng.standard_normal(grid.N) + 1j * rng.standard_normal(grid.N)
    v = rng.standard_normal(grid.N)
    for s in (1.0, 2.0):
        pair = abs(np.vdot(u, v)) * grid.h
        assert pair <= sobolev_norm(pack, u, s) * sobolev_norm(pack, v, -s) * (1 + 1e-12)
        w = pack.matrix(s) @ (pack.matrix(s) @ u)
        pair = abs(np.vdot(u, w)) * grid.h
        assert pair == pytest.approx(sobolev_norm(pack, u, s) * sobolev_norm(pack, w, -s), rel=1e-9)


def test_generator_independence():
    ratios = []
    for N in (128, 256, 512):
        g = GridContext(N)
        pack = build_pack(g, ())
        B = quantize(bracket_symbol(2.0), g).matrix
        r = op_sobolev_norm(pack, B, 2, 0, band=1.0), op_sobolev_norm(pack, np.linalg.inv(B), 0, 2, band=1.0)
        ratios.append(r)
    C = max(max(r) for r in ratios)
    assert C < 4
    assert max(r[0] for r in ratios) / min(r[0] for r in ratios) <= 2


def test_guillemin_dominates_sobolev(grid, pack):
    T = heat_operator(grid, 0.2).matrix
    n = 2
    g = guillemin_norm(pack, T, n)
    for s in (-2, -1, 0, 1, 2):
        for sp in (-2, 0, 2):
            assert op_sobolev_norm(pack, T, s, sp) <= g * (1 + 1e-12)


def test_pack_operator_metadata(grid, pack):
    P = pack_operator(pack, 2)
    assert P.order == 2 and P.N == grid.N
