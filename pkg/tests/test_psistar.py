import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from psido import catalog
from psido.errors import NotPositiveDefinite, Singular
from psido.psistar import (
    elliptic_inverse_order,
    holomorphic_calculus,
    pk_norms,
    pk_values,
    semi_ideal_product_check,
    smoothing_after,
    spectral_inverse,
    t_sobolev_scale,
)
from psido.quantize import GridContext, GridOperator, heat_operator, quantize
from psido.sobolev import build_pack, sobolev_norm
from psido.symbols import bracket_symbol

NS = (128, 256, 512)
C2 = catalog.c2_symbol()


def T_of(g):
    return quantize(C2, g)


def unitary(N, rng):
    Q, R = np.linalg.qr(rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N)))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def test_zero_operator(small_grid):
    T = T_of(small_grid)
    assert pk_values(T, np.zeros((small_grid.N,) * 2), 3) == [0.0] * 4


@given(st.integers(0, 2**32 - 1))
def test_pk_monotone_and_p0(seed):
    rng = np.random.default_rng(seed)
    T = rng.standard_normal((8, 8))
    A = rng.standard_normal((8, 8))
    p = pk_values(T, A, 3)
    assert p[0] == pytest.approx(np.linalg.norm(A, 2))
    assert all(b >= a for a, b in zip(p, p[1:]))


def test_pk_recursion_small():
    T, A = np.diag([2.0, 3.0]), np.eye(2)
    # p1 = |A| + |TA| + |AT| + |TAT| = 1 + 3 + 3 + 9
    assert pk_values(T, A, 1)[1] == pytest.approx(16.0)


def test_heat_is_in_J2():
    probe = pk_norms(T_of, catalog.heat, 2, NS)
    assert probe.member(2)
    assert probe.member(0)


def test_identity_not_in_J1():
    probe = pk_norms(T_of, lambda g: np.eye(g.N), 1, NS)
    assert not probe.member(1)
    # T I T dominates and grows like N^4 for order-2 T; p_1 grows at least like N^2
    assert min(probe.growth(1)) >= 4


def test_oscillatory_not_in_J1():
    probe = pk_norms(T_of, catalog.oscillatory, 1, NS)
    assert probe.member(0) and not probe.member(1)


def test_t_sobolev_zero_and_plane_wave():
    g = GridContext(64)
    T = quantize(bracket_symbol(2.0), g)
    assert t_sobolev_scale(T, np.zeros(g.N), 3) == [0.0] * 4
    k = 5
    f = np.exp(1j * g.xi[k] * g.x)
    q = t_sobolev_scale(T, f, 2)
    m = 1 + g.xi[k] ** 2
    assert q[0] == pytest.approx(np.sqrt(g.L))
    assert q[1] == pytest.approx((1 + m) * np.sqrt(g.L))
    assert q[2] == pytest.approx((1 + m) ** 2 * np.sqrt(g.L))


def test_t_sobolev_comparable_to_sobolev(rng):
    g = GridContext(128)
    T = T_of(g)
    pack = build_pack(g, ())
    ratios = []
    for _ in range(10):
        fh = np.zeros(g.N, complex)
        band = np.abs(g.xi) <= g.Xi / 4
        fh[band] = rng.standard_normal(band.sum()) + 1j * rng.standard_normal(band.sum())
        f = g.from_freq(fh)
        ratios.append(t_sobolev_scale(T, f, 1)[1] / sobolev_norm(pack, f, 2))
    assert max(ratios) / min(ratios) <= 3


def test_product_check_examples(rng):
    g = GridContext(64)
    H = catalog.heat(g).matrix
    assert semi_ideal_product_check(T_of(g), H, np.zeros_like(H), H, 2) == 0.0
    vals, grow = [], []
    for N in NS:
        g = GridContext(N)
        H, T = catalog.heat(g).matrix, T_of(g).matrix
        X = unitary(N, rng)
        vals.append(semi_ideal_product_check(T, H, X, H, 2))
        grow.append(semi_ideal_product_check(T, H, X, np.eye(N), 1))
    assert max(vals) / min(vals) <= 3
    assert grow[-1] / grow[0] > 3


def test_submultiplicative_constant():
    g = GridContext(128)
    T = T_of(g).matrix
    ops = {"h1": catalog.heat(g, 0.1).matrix, "h2": catalog.heat(g, 0.2).matrix,
           "th": catalog.theta_heat(g, 0.2).matrix, "b": catalog.bump_rank_one(g).matrix,
           "h5": catalog.heat(g, 0.5).matrix}
    p = {k: pk_values(T, v, 2)[2] for k, v in ops.items()}

    def r(a, b):
        return pk_values(T, ops[a] @ ops[b], 2)[2] / (p[a] * p[b])

    cal = ["h1", "h2", "th", "b"]
    C = max(r(a, b) for a in cal for b in cal)
    held = [r(a, "h5") for a in ops] + [r("h5", b) for b in cal]
    assert max(held) <= 3 * C


def test_action_on_t_sobolev_scale(rng):
    Cs = []
    for N in NS:
        g = GridContext(N)
        T, H = T_of(g), catalog.heat(g).matrix
        pk = pk_values(T, H, 2)[2]
        worst = 0.0
        for _ in range(5):
            f = rng.standard_normal(N)
            worst = max(worst, t_sobolev_scale(T, H @ f, 2, g)[2] / (pk * np.linalg.norm(f) * np.sqrt(g.h)))
        Cs.append(worst)
    assert max(Cs) <= 1.0 + 1e-12
    assert max(Cs) / min(Cs) <= 3


def test_spectral_inverse_examples(grid):
    R0 = GridOperator(np.zeros((grid.N,) * 2), grid)
    assert np.abs(spectral_inverse(R0).matrix).max() == 0.0
    P = catalog.bump_rank_one(grid).matrix
    P = P / np.linalg.norm(P, 2)  # rank-1 orthogonal projector
    R = GridOperator(-0.5 * P, grid)
    np.testing.assert_allclose(spectral_inverse(R).matrix, P, atol=1e-12)
    with pytest.raises(Singular):
        spectral_inverse(GridOperator(-P, grid))


def test_spectral_inverse_of_smoothing_is_smoothing(grid):
    R = catalog.scaled(heat_operator(grid), 0.5)
    ok, _ = smoothing_after(spectral_inverse(R))
    assert ok


def test_elliptic_inverse_order():
    rep = elliptic_inverse_order(lambda g: GridOperator(np.eye(g.N), g), lambda x, xi: np.ones_like(xi + x), 0,
                                 Ns=(64, 128))
    assert rep.stable and rep.norms == pytest.approx([1.0, 1.0])
    rep = elliptic_inverse_order(T_of, lambda x, xi: C2(x, xi), 2, Ns=(256, 512))
    assert rep.stable
    assert max(rep.symbol_C) / min(rep.symbol_C) <= 2


def test_elliptic_inverse_rejects_indefinite():
    with pytest.raises(NotPositiveDefinite):
        elliptic_inverse_order(lambda g: GridOperator(-np.eye(g.N), g), lambda x, xi: -np.ones_like(xi), 0,
                               Ns=(64,))


def test_holomorphic_calculus_closure(grid):
    A = catalog.scaled(heat_operator(grid), 0.5)
    F = holomorphic_calculus(A, lambda w: w / (1 - w), radius=0.75)
    exact = A.matrix @ np.linalg.inv(np.eye(grid.N) - A.matrix)
    np.testing.assert_allclose(F.matrix, exact, atol=1e-10)
    ok, _ = smoothing_after(F)
    assert ok


def test_oscillatory_fails_membership(grid):
    ok, _ = smoothing_after(catalog.oscillatory(grid))
    assert not ok
