import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from psido import jets
from psido.errors import DomainViolation, NotElliptic, OrderMismatch
from psido.symbols import (
    Region,
    asymptotic_sum,
    bracket_symbol,
    compose_scalar,
    constant_symbol,
    estimate_seminorms,
    expr_symbol,
    fd_derivative,
    holo_derivative_check,
    identity_fn,
    is_elliptic,
    japanese,
    log_fn,
    make_symbol,
    power_family,
    r_symbol,
    reciprocal_fn,
)

XS = np.linspace(-np.pi, np.pi, 9)
XIS = np.linspace(-30, 30, 121)
SMALL = Region(xi_range=(-16, 16), nx=32, nxi=257)


def test_make_symbol_constant():
    a = make_symbol(0, lambda x, xi: 1.0 + 0 * xi)
    np.testing.assert_array_equal(a(XS, XIS), 1.0)
    assert a.period is None and a.real


def test_make_symbol_xi_with_analytic_derivative():
    def deriv(alpha, beta):
        if alpha:
            return lambda x, xi: 0 * xi
        return [lambda x, xi: xi, lambda x, xi: 1 + 0 * xi, lambda x, xi: 0 * xi][min(beta, 2)]

    a = make_symbol(1, lambda x, xi: np.asarray(xi) * 1.0, deriv=deriv)
    np.testing.assert_allclose(a.deriv(0, 1, XS, XIS), 1.0)


def test_make_symbol_detects_jets_and_period(c2):
    a = make_symbol(2, lambda x, xi: (1 + xi * xi) * (2 + jets.sin(x)),
                    homog_terms=[(2, lambda x, xi: xi * xi * (2 + jets.sin(x)))])
    assert a.period == pytest.approx(2 * np.pi)
    assert a.is_classical
    np.testing.assert_allclose(a(XS, XIS), c2(XS, XIS))
    assert np.isfinite(estimate_seminorms(a).max())


def test_opaque_symbol_uses_finite_differences():
    a = make_symbol(2, lambda x, xi: (1 + xi ** 2) * (2 + np.sin(x)) * np.ones(np.broadcast(x, xi).shape))
    exact = 2 * np.cos(XS)[:, None] * np.ones_like(XIS)[None, :]
    np.testing.assert_allclose(a.deriv(1, 2, XS, XIS), exact, atol=1e-4)


def test_fd_mixed_derivative_accuracy():
    X, XI = np.meshgrid(XS, np.linspace(-3, 3, 7), indexing="ij")
    d = fd_derivative(lambda x, xi: np.sin(x) * np.exp(0.3 * xi), X, XI, 1, 2)
    np.testing.assert_allclose(d, 0.09 * np.cos(X) * np.exp(0.3 * XI), atol=1e-5)


def test_seminorm_examples(c2):
    one = constant_symbol(1.0)
    assert estimate_seminorms(one, (0, 0))[(0, 0)] == 1.0
    xi = expr_symbol(1, lambda x, xi: xi, period=None)
    assert estimate_seminorms(xi, (0, 1))[(0, 1)] == pytest.approx(1.0)
    coarse = estimate_seminorms(c2, (1, 2))[(1, 2)]
    fine = estimate_seminorms(c2, (1, 2), Region(nx=256, nxi=1025))[(1, 2)]
    assert np.isfinite(coarse) and abs(coarse - fine) <= 0.05 * fine


def test_homogeneous_remainder_drops_an_order(c2):
    lead = c2.homog_terms[0][1]
    rest = c2 - lead
    rep = estimate_seminorms(rest, (2, 2), order=c2.m - 1)
    big = estimate_seminorms(rest, (2, 2), SMALL.scaled(4), order=c2.m - 1)
    assert big.max() <= 2 * rep.max()


@pytest.mark.parametrize("m", [-1.0, 1.0, 2.0])
def test_calibration_orders(m):
    a = bracket_symbol(m)
    at = [estimate_seminorms(a, (0, 2), SMALL.scaled(f)).max() for f in (1, 4)]
    below = [estimate_seminorms(a, (0, 2), SMALL.scaled(f), order=m - 0.5).max() for f in (1, 4)]
    assert at[1] <= 1.01 * at[0]
    assert below[1] >= 1.8 * below[0]


def test_ellipticity_examples():
    assert is_elliptic(bracket_symbol(2), 1.0)
    assert not is_elliptic(expr_symbol(0, lambda x, xi: jets.sin(xi), period=None), 1.0)
    assert is_elliptic(expr_symbol(1, lambda x, xi: xi, period=None), 2.0)


def test_compose_scalar_examples(c2):
    a = bracket_symbol(2)
    same = compose_scalar(identity_fn(), a)
    np.testing.assert_allclose(same(XS, XIS), a(XS, XIS))
    inv = compose_scalar(reciprocal_fn(), a)
    assert inv.m == -2
    np.testing.assert_allclose(inv(XS, XIS), np.broadcast_to(1 / (1 + XIS ** 2), (XS.size, XIS.size)))
    lg = compose_scalar(log_fn(order=0.1), r_symbol())
    assert np.isfinite(estimate_seminorms(lg, (0, 3), order=0.1).max())


def test_compose_scalar_requires_ellipticity():
    a = expr_symbol(0, lambda x, xi: jets.sin(xi) + 2.0, period=None)
    with pytest.raises(NotElliptic):
        compose_scalar(reciprocal_fn(), expr_symbol(0, lambda x, xi: jets.sin(xi), period=None))
    assert compose_scalar(reciprocal_fn(), a).m == 0


def test_compose_scalar_continuity(c2):
    f = reciprocal_fn()
    base = compose_scalar(f, c2, mu=2.0)
    diffs = []
    for d in (1e-1, 1e-2, 1e-3):
        pert = c2 + expr_symbol(2, lambda x, xi, d=d: d * (1 + xi * xi) * jets.cos(x))
        diffs.append(estimate_seminorms(compose_scalar(f, pert, mu=2.0) - base, (1, 1), SMALL, order=-2).max())
    assert diffs[1] / diffs[0] == pytest.approx(0.1, rel=0.2)
    assert diffs[2] / diffs[1] == pytest.approx(0.1, rel=0.2)


def test_r_symbol():
    r = r_symbol()
    assert r(0.0, 3.0) == pytest.approx(3.0)
    assert r(0.0, 0.0) == pytest.approx(1.0)
    xi = np.linspace(-6, 6, 24001)
    v = r(0.0, xi)[0]
    assert v.min() >= 1.0
    big = np.abs(xi) >= 2
    np.testing.assert_array_equal(v[big], np.abs(xi[big]))
    near = np.abs(xi - 2) < 0.01
    d = r.deriv(0, 1, np.zeros(1), xi[near])[0]
    assert np.max(np.abs(np.diff(d))) < 1e-6
    assert np.all(np.diff(r(0.0, np.linspace(2, 6, 9))[0]) > 0)


def test_power_family_examples():
    r2 = r_symbol() * r_symbol()
    np.testing.assert_allclose(power_family(r2, 0)(XS, XIS), 1.0)
    np.testing.assert_allclose(power_family(r2, 1)(XS, XIS), r2(XS, XIS))
    z = -0.5 + 1j
    az = power_family(r2, z)(XS, XIS)
    np.testing.assert_allclose(np.abs(az), 1 / r_symbol()(XS, XIS), rtol=1e-14)
    np.testing.assert_allclose(az * power_family(r2, -z)(XS, XIS), 1.0, atol=1e-14)
    with pytest.raises(DomainViolation):
        power_family(expr_symbol(1, lambda x, xi: xi, period=None), 0.5)(XS, XIS)


unit = st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False)


@given(unit, unit)
def test_power_group_law(z, w):
    from psido.catalog import c2_symbol
    a = c2_symbol()
    lhs = power_family(a, z)(XS, XIS) * power_family(a, w)(XS, XIS)
    rhs = power_family(a, z + w)(XS, XIS)
    scale = np.max(np.abs(a(XS, XIS))) ** (abs(z.real) + abs(w.real))
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * max(scale, 1.0) * np.max(np.abs(rhs)).clip(1)


def test_asymptotic_sum_examples():
    a0 = bracket_symbol(0.0)
    s = asymptotic_sum([a0], thresholds=[8.0])
    xi = np.linspace(-40, 40, 801)
    diff = np.abs(s(0.0, xi) - a0(0.0, xi))[0]
    assert np.all(diff[np.abs(xi) > 16] == 0)
    assert np.all(asymptotic_sum([])(XS, XIS) == 0)
    terms = [bracket_symbol(0.0), bracket_symbol(-1.0), bracket_symbol(-2.0)]
    total = asymptotic_sum(terms)
    resid = total - (terms[0] + terms[1])
    r1 = estimate_seminorms(resid, (0, 2), SMALL, order=-2).max()
    r4 = estimate_seminorms(resid, (0, 2), SMALL.scaled(4), order=-2).max()
    assert np.isfinite(r1) and r4 <= 2 * r1
    with pytest.raises(OrderMismatch):
        asymptotic_sum([bracket_symbol(0.0), bracket_symbol(0.0)])


def test_asymptotic_sum_residual_orders():
    terms = [bracket_symbol(-float(j)) for j in range(4)]
    total = asymptotic_sum(terms)
    for k in range(1, 4):
        rest = total - sum(terms[1:k], terms[0])
        v = [estimate_seminorms(rest, (0, 0), SMALL.scaled(f), order=-k).max() for f in (1, 2)]
        assert v[1] <= 2 * v[0]


def test_holomorphy_examples():
    r = r_symbol()
    c = holo_derivative_check(lambda z: power_family(r, z), -1.0, 0.0, region=SMALL)
    assert np.isfinite(c) and c < 10
    const = holo_derivative_check(lambda z: constant_symbol(2.0) + 0 * z, 0.0, 0.0, region=SMALL,
                                  derivative=lambda z: constant_symbol(0.0))
    assert const == 0
    below = holo_derivative_check(lambda z: power_family(r, z), -1.0, -0.5, region=SMALL)
    assert np.isfinite(below)


def test_japanese_bracket_convention():
    assert japanese(0.0) == 1.0
    assert japanese(np.sqrt(3.0)) == pytest.approx(2.0)
