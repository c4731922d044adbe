"""Quantitative checks shared by the acceptance tests and the CLI.

Each ``check_*`` function returns a list of :class:`Record`; a record holds
one measured value, the threshold it is compared with and the verdict.
Sweeps that feed log-log plots also return their raw rows in ``plotdata``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import catalog
from .calculus import moyal_compose
from .powers import Spectral, oracle_power, power_report
from .psistar import (
    elliptic_inverse_order,
    pk_norms,
    pk_values,
    semi_ideal_product_check,
    smoothing_after,
    spectral_inverse,
)
from .quantize import GridContext, GridOperator, extract_symbol, hormander_bound, quantize
from .resolvent import ResolventFamily, loglog_slope
from .sobolev import build_pack, op_sobolev_norm
from .symbols import DEFAULT_L, bracket_symbol, expr_symbol, holo_defects, power_family, r_symbol
from . import jets

REFINE = (128, 256, 512)
POWER_REFINE = (256, 512, 1024)
T_SWEEP = (1, 2, 4, 8, 16, 32, 64)
Z_ROUTES = (-1, -0.5, 0.5, 2, 1j, 0.3 + 0.7j)
Z_LAW = (-0.5, 0.5, 1j)

TOL = {
    "resolvent_bound": 1e-12,
    "gap_slope": -1.0,
    "gap_slope_tol": 0.2,
    "stable_ratio": 2.0,
    "growth": 1.5,
    "contour": 1e-7,
    "ode": 1e-6,
    "group_law": 1e-10,
    "adjoint": 1e-10,
    "law_drift": 2.0,
    "hormander": 1e-6,
    "holo_lo": 5.0,
    "holo_hi": 20.0,
    "pk_ratio": 3.0,
    "identity_growth": 3.0,
    "product_slack": 3.0,
}

ANCHORS = {
    "resolvent_bound": "‖(q(c)+it)^{−1}‖ ≤ |t|^{−1}",
    "resolvent_gap": "‖(T+it)^{−1} − G_t‖ ≤ C|t|^{−1}",
    "composition": "q(a)q(b) − q(Σ_{j≤k} a#_j b) of order m+n−k−1",
    "power_routes": "A^z by spectral, contour and ODE routes",
    "sigma_power_law": "σ^{(mz)}(A^z) = σ^{(m)}(A)^z",
    "hormander": "‖q(a)‖² ≤ M² + ‖R‖ + ‖q(r_d)‖",
    "holomorphy": "z ↦ r^z holomorphic in S^{Re z+ε}",
    "spectral_invariance": "(I + R)^{−1} = I + R_1, R_1 smoothing",
    "elliptic_inverse": "P^{−1} of order −m",
    "semi_ideal": "p_{k+1}(A) = p_k(A) + p_k(TA) + p_k(AT) + p_k(TAT)",
    "sobolev": "P_s = ½(I + q(r^{s/2})²); q(a) : H^s → H^{s−r}",
}


@dataclass
class Record:
    experiment: str
    check: str
    N: int
    t_or_z: str
    value: float
    threshold: str
    passed: bool
    anchor: str

    def row(self):
        d = asdict(self)
        d["pass"] = d.pop("passed")
        d.pop("anchor")
        return d


@dataclass
class Outcome:
    records: list = field(default_factory=list)
    plotdata: dict = field(default_factory=dict)  # name -> list of row dicts

    def extend(self, other: "Outcome"):
        self.records += other.records
        self.plotdata.update(other.plotdata)
        return self

    @property
    def passed(self):
        return all(r.passed for r in self.records)


def _fmt(z):
    z = complex(z)
    return f"{z.real:g}" if z.imag == 0 else f"{z.real:g}{z.imag:+g}i"


def _tol(tol, key):
    return (tol or {}).get(key, TOL[key])


def _map(fn, items, threads=1):
    if threads <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(threads) as ex:
        return list(ex.map(fn, items))


def _ratio(v):
    v = np.asarray(v, float)
    return float(v.max() / v.min())


# -- resolvent ---------------------------------------------------------------------------

def check_resolvent_bound(N=256, L=DEFAULT_L, t_max=64, tol=None, threads=1) -> Outcome:
    grid = GridContext(N, L)
    c = catalog.c2_symbol()
    fam = ResolventFamily(c, catalog.heat(grid), grid)
    ts = [s * t for t in T_SWEEP if t <= t_max for s in (-1, 1)]
    thr = _tol(tol, "resolvent_bound")

    def one(t):
        return float(np.linalg.norm(fam.resolvent(t).matrix, 2) * abs(t) - 1.0)

    # warm the cached operator before threads share it
    fam.T
    viol = _map(one, ts, threads)
    out = Outcome()
    for t, v in zip(ts, viol):
        out.records.append(Record("resolvent_sweep", "resolvent_bound", N, f"{t:g}", v, f"<= {thr:g}",
                                  v <= thr, ANCHORS["resolvent_bound"]))
    return out


def resolvent_gaps(N=256, L=DEFAULT_L, ks=(0, 1, 2), t_max=64, threads=1):
    grid = GridContext(N, L)
    fam = ResolventFamily(catalog.c2_symbol(), catalog.heat(grid), grid)
    fam.T
    ts = [t for t in T_SWEEP if 4 <= t <= t_max]
    rows = []
    for k in ks:
        gaps = _map(lambda t: fam.gap(t, k), ts, threads)
        rows.append((k, ts, gaps, loglog_slope(ts, gaps)))
    return rows


def check_resolvent_gap(N=256, L=DEFAULT_L, t_max=64, tol=None, threads=1) -> Outcome:
    target, width = _tol(tol, "gap_slope"), _tol(tol, "gap_slope_tol")
    out = Outcome()
    plot = []
    for k, ts, gaps, slope in resolvent_gaps(N, L, (0, 1, 2), t_max, threads):
        for t, g in zip(ts, gaps):
            plot.append({"k": k, "t": t, "gap": g, "slope": slope})
        if k == 0:
            out.records.append(Record("resolvent_sweep", "resolvent_gap_slope", N,
                                      f"{ts[0]:g}..{ts[-1]:g}", slope,
                                      f"{target:g} +- {width:g}", abs(slope - target) <= width,
                                      ANCHORS["resolvent_gap"]))
    out.plotdata["resolvent_decay"] = plot
    return out


# -- calculus ------------------------------------------------------------------------------

def composition_norms(k, Ns=REFINE, L=DEFAULT_L, threads=1):
    a, b = catalog.c2_symbol(), bracket_symbol(-1.0)
    P = moyal_compose(a, b, k).symbol
    target = k + 1 - a.m - b.m

    def one(N):
        grid = GridContext(N, L)
        pack = build_pack(grid, ())
        D = quantize(a, grid).matrix @ quantize(b, grid).matrix - quantize(P, grid).matrix
        return op_sobolev_norm(pack, D, 0, target), op_sobolev_norm(pack, D, 0, target + 1)

    return target, _map(one, Ns, threads)


def check_composition(Ns=REFINE, L=DEFAULT_L, tol=None, threads=1) -> Outcome:
    sr, gr = _tol(tol, "stable_ratio"), _tol(tol, "growth")
    out = Outcome()
    for k in (0, 1, 2):
        target, vals = composition_norms(k, Ns, L, threads)
        at, above = [v[0] for v in vals], [v[1] for v in vals]
        ratio = _ratio(at)
        growth = min(b / a for a, b in zip(above, above[1:]))
        out.records.append(Record("compose", f"order_drop_k{k}_stable", Ns[-1], f"s'={target:g}",
                                  ratio, f"<= {sr:g}", ratio <= sr, ANCHORS["composition"]))
        out.records.append(Record("compose", f"order_drop_k{k}_growth", Ns[-1], f"s'={target + 1:g}",
                                  growth, f">= {gr:g}", growth >= gr, ANCHORS["composition"]))
    return out


# -- powers ------------------------------------------------------------------------------------

def check_power_routes(N=256, L=DEFAULT_L, tol=None, threads=1) -> Outcome:
    grid = GridContext(N, L)
    A = quantize(catalog.c2_symbol(), grid)
    sp = Spectral.of(A)
    tc, to = _tol(tol, "contour"), _tol(tol, "ode")
    reps = _map(lambda z: power_report(A, z, spectral=sp), Z_ROUTES, threads)
    out = Outcome()
    for z, rep in zip(Z_ROUTES, reps):
        d = rep.discrepancies
        out.records.append(Record("powers", "oracle_vs_contour", N, _fmt(z), d["contour"], f"<= {tc:g}",
                                  d["contour"] <= tc, ANCHORS["power_routes"]))
        out.records.append(Record("powers", "oracle_vs_ode", N, _fmt(z), d["ode"], f"<= {to:g}",
                                  d["ode"] <= to, ANCHORS["power_routes"]))
    a, b = 0.3 + 0.2j, -0.6 + 0.1j
    Aab = oracle_power(sp, a + b).matrix
    law = float(np.linalg.norm(oracle_power(sp, a).matrix @ oracle_power(sp, b).matrix - Aab, 2)
                / np.linalg.norm(Aab, 2))
    Aa = oracle_power(sp, a).matrix
    adj = float(np.linalg.norm(Aa.conj().T - oracle_power(sp, np.conj(a)).matrix, 2)
                / np.linalg.norm(Aa, 2))
    tg, ta = _tol(tol, "group_law"), _tol(tol, "adjoint")
    out.records.append(Record("powers", "group_law", N, f"{_fmt(a)},{_fmt(b)}", law, f"<= {tg:g}",
                              law <= tg, "A^a A^b = A^{a+b}"))
    out.records.append(Record("powers", "adjoint", N, _fmt(a), adj, f"<= {ta:g}", adj <= ta,
                              "(A^z)^† = A^{z̄}"))
    return out


def power_law_constant(z, N, L=DEFAULT_L):
    """Fitted ``C`` in ``|sigma(A^z) - c^z| / |c^z| <= C <xi>^{-1}`` on ``4 <= |xi| <= Xi/4``."""
    grid = GridContext(N, L)
    c = catalog.c2_symbol()
    A = quantize(c, grid)
    tab = extract_symbol(oracle_power(A, z), "weyl")
    ref = c(grid.x, grid.xi).astype(complex) ** complex(z)
    win = (np.abs(grid.xi) >= 4) & (np.abs(grid.xi) <= grid.Xi / 4)
    rel = np.abs(tab - ref)[:, win] / np.abs(ref[:, win])
    return float(np.max(rel * np.sqrt(1 + grid.xi[win] ** 2)[None, :]))


def check_power_law(Ns=POWER_REFINE, L=DEFAULT_L, tol=None, threads=1) -> Outcome:
    thr = _tol(tol, "law_drift")
    out = Outcome()
    for z in Z_LAW:
        Cs = _map(lambda N: power_law_constant(z, N, L), Ns, threads)
        drift = _ratio(Cs)
        out.records.append(Record("powers", "sigma_power_law", Ns[-1], _fmt(z), drift, f"<= {thr:g}",
                                  drift <= thr, ANCHORS["sigma_power_law"]))
    return out


def check_holomorphy(z0s=(0.5, -0.5 + 0.5j, 1j), tol=None) -> Outcome:
    lo, hi = _tol(tol, "holo_lo"), _tol(tol, "holo_hi")
    r = r_symbol()
    out = Outcome()
    for z0 in z0s:
        d = holo_defects(lambda z: power_family(r, z), z0, order_window=0.1)
        ratio = d[1e-2] / d[1e-3]
        out.records.append(Record("axioms", "holomorphy_ratio", 0, _fmt(z0), ratio, f"[{lo:g}, {hi:g}]",
                                  lo <= ratio <= hi, ANCHORS["holomorphy"]))
    return out


# -- boundedness -----------------------------------------------------------------------------

def check_hormander(N=256, L=DEFAULT_L, tol=None, threads=1) -> Outcome:
    grid = GridContext(N, L)
    thr = _tol(tol, "hormander")
    items = list(catalog.order_zero_symbols().items())
    res = _map(lambda kv: hormander_bound(kv[1], grid=grid), items, threads)
    out = Outcome()
    for (name, _), h in zip(items, res):
        slack = h.bound - h.norm ** 2
        out.records.append(Record("axioms", f"hormander_{name}", N, "", slack, f">= {-thr:g}",
                                  slack >= -thr, ANCHORS["hormander"]))
        out.records.append(Record("axioms", f"hormander_ratio_{name}", N, "", h.ratio, ">= 1",
                                  h.ratio >= 1.0, ANCHORS["hormander"]))
    return out


# -- sobolev -------------------------------------------------------------------------------------

def sobolev_test_symbols():
    return {
        (2, 0): catalog.c2_symbol(),
        (1, 1): expr_symbol(1, lambda x, xi: jets.bracket(xi) * (2 + jets.cos(x)), name="<xi>(2+cos x)"),
        (-2, 0): expr_symbol(-2, lambda x, xi: (2 + jets.sin(x)) / (1 + xi * xi),
                             name="(2+sin x)/<xi>^2"),
    }


def check_sobolev(Ns=REFINE, L=DEFAULT_L, tol=None, threads=1) -> Outcome:
    sr, gr = _tol(tol, "stable_ratio"), _tol(tol, "growth")
    out = Outcome()
    grid = GridContext(Ns[1], L)
    P0 = build_pack(grid, (0,)).matrix(0)
    exact = float(np.max(np.abs(P0 - np.eye(grid.N))))
    out.records.append(Record("sobolev", "P0_identity", grid.N, "", exact, "== 0", exact == 0.0,
                              ANCHORS["sobolev"]))
    for (r, s), a in sobolev_test_symbols().items():
        def one(N):
            g = GridContext(N, L)
            pack = build_pack(g, ())
            Q = quantize(a, g)
            return op_sobolev_norm(pack, Q, s, s - r), op_sobolev_norm(pack, Q, s, s - r + 1)

        vals = _map(one, Ns, threads)
        at, above = [v[0] for v in vals], [v[1] for v in vals]
        ratio = _ratio(at)
        growth = min(b / a for a, b in zip(above, above[1:]))
        tag = f"r={r:g},s={s:g}"
        out.records.append(Record("sobolev", "order_stable", Ns[-1], tag, ratio, f"<= {sr:g}",
                                  ratio <= sr, ANCHORS["sobolev"]))
        out.records.append(Record("sobolev", "order_plus_one_growth", Ns[-1], tag, growth, f">= {gr:g}",
                                  growth >= gr, ANCHORS["sobolev"]))
    return out


# -- spectral invariance and semi-ideals --------------------------------------------------

def check_spectral_invariance(N=256, L=DEFAULT_L, tol=None, threads=1) -> Outcome:
    grid = GridContext(N, L)
    out = Outcome()
    for name, R in catalog.smoothing_set(grid).items():
        R1 = spectral_inverse(R)
        ok, (a, b) = smoothing_after(R1, orders=range(1, 5))
        out.records.append(Record("psistar_scan", f"inverse_smoothing_{name}", N, "orders -1..-4",
                                  float(R.norm()), "<= 0.5 and member", bool(ok and R.norm() <= 0.5 + 1e-12),
                                  ANCHORS["spectral_invariance"]))
    c = catalog.c2_symbol()
    sr, dr = _tol(tol, "stable_ratio"), _tol(tol, "law_drift")
    rep = elliptic_inverse_order(lambda g: quantize(c, g), c, 2, Ns=REFINE)
    out.records.append(Record("psistar_scan", "elliptic_inverse_stable", REFINE[-1], "H^0->H^2",
                              rep.ratio, f"<= {sr:g}", rep.ratio <= sr, ANCHORS["elliptic_inverse"]))
    Cs = [v for v in rep.symbol_C if np.isfinite(v)]
    drift = _ratio(Cs)
    out.records.append(Record("psistar_scan", "elliptic_inverse_symbol", REFINE[-1], "4<=|xi|<=Xi/4",
                              drift, f"<= {dr:g}", drift <= dr, ANCHORS["elliptic_inverse"]))
    return out


def random_unitary(N, rng):
    Z = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def check_semi_ideals(Ns=REFINE, L=DEFAULT_L, seed=0, tol=None) -> Outcome:
    pr, ig, sl = _tol(tol, "pk_ratio"), _tol(tol, "identity_growth"), _tol(tol, "product_slack")
    c = catalog.c2_symbol()
    T_of = lambda g: quantize(c, g)  # noqa: E731
    out = Outcome()
    heat = pk_norms(T_of, catalog.heat, 4, Ns, L, "heat")
    out.records.append(Record("psistar_scan", "heat_in_J4", Ns[-1], "k=4", heat.ratio(4), f"<= {pr:g}",
                              heat.member(4, pr), ANCHORS["semi_ideal"]))
    ident = pk_norms(T_of, lambda g: np.eye(g.N), 1, Ns, L, "identity")
    growth = min(ident.growth(1))
    out.records.append(Record("psistar_scan", "identity_not_in_J1", Ns[-1], "k=1", growth, f">= {ig:g}",
                              growth >= ig, ANCHORS["semi_ideal"]))
    rng = np.random.default_rng(seed)
    vals, calib, held = [], [], []
    for N in Ns:
        g = GridContext(N, L)
        T = T_of(g).matrix
        heat1 = catalog.heat(g, 0.1).matrix
        vals.append(semi_ideal_product_check(T, heat1, random_unitary(N, rng), heat1, 2))
        cal = {"heat0.1": heat1, "heat0.2": catalog.heat(g, 0.2).matrix,
               "theta0.2": catalog.theta_heat(g, 0.2).matrix, "bump": catalog.bump_rank_one(g).matrix}
        new = {"heat0.5": catalog.heat(g, 0.5).matrix}
        p = {k: pk_values(T, v, 2)[2] for k, v in {**cal, **new}.items()}
        X1, X2 = random_unitary(N, rng), random_unitary(N, rng)

        def scaled_ratio(a, b, X):
            ops = {**cal, **new}
            return semi_ideal_product_check(T, ops[a], X, ops[b], 2) / (p[a] * p[b])

        calib += [scaled_ratio(a, b, X1) for a in cal for b in cal]
        held += [scaled_ratio(a, b, X2) for a in {**cal, **new} for b in new]
        held += [scaled_ratio(a, b, X2) for a in new for b in cal]
    ratio = _ratio(vals)
    out.records.append(Record("psistar_scan", "product_stable", Ns[-1], "k=2", ratio, f"<= {pr:g}",
                              ratio <= pr, ANCHORS["semi_ideal"]))
    worst = max(held) / max(calib)
    out.records.append(Record("psistar_scan", "product_continuity", Ns[-1], "k=2", worst, f"<= {sl:g}",
                              worst <= sl, ANCHORS["semi_ideal"]))
    return out


# -- experiments --------------------------------------------------------------------------------

def run_experiment(name, N=256, L=DEFAULT_L, tol=None, seed=0, threads=1, t_max=64) -> Outcome:
    out = Outcome()
    if name in ("axioms", "full_suite"):
        out.extend(check_hormander(N, L, tol, threads))
        out.extend(check_holomorphy(tol=tol))
    if name in ("compose", "full_suite"):
        out.extend(check_composition(REFINE, L, tol, threads))
    if name in ("parametrix", "full_suite"):
        out.extend(check_parametrix(REFINE, L, tol, threads))
    if name in ("sobolev", "full_suite"):
        out.extend(check_sobolev(REFINE, L, tol, threads))
    if name in ("resolvent_sweep", "full_suite"):
        out.extend(check_resolvent_bound(N, L, t_max, tol, threads))
        out.extend(check_resolvent_gap(N, L, t_max, tol, threads))
    if name in ("powers", "full_suite"):
        out.extend(check_power_routes(N, L, tol, threads))
        out.extend(check_power_law(POWER_REFINE, L, tol, threads))
    if name in ("psistar_scan", "full_suite"):
        out.extend(check_spectral_invariance(N, L, tol, threads))
        out.extend(check_semi_ideals(REFINE, L, seed, tol))
    return out


EXPERIMENTS = ("axioms", "compose", "parametrix", "sobolev", "resolvent_sweep", "powers",
               "psistar_scan", "full_suite")


def check_parametrix(Ns=REFINE, L=DEFAULT_L, tol=None, threads=1) -> Outcome:
    """``sup_t ||(T + i t) G_t - I||_{H^-1 -> H^1}`` with ``k = 6`` is finite and refinement-stable."""
    ts = list(T_SWEEP)
    sups, plot = [], []
    for N in Ns:
        grid = GridContext(N, L)
        fam = ResolventFamily(catalog.c2_symbol(), catalog.heat(grid), grid)
        fam.T
        res = _map(lambda t: fam.residual(t, 6, -1.0, 1.0), ts, threads)
        sups.append(max(res))
        plot += [{"N": N, "t": t, "residual": r} for t, r in zip(ts, res)]
    ratio = _ratio(sups)
    thr = _tol(tol, "stable_ratio")
    out = Outcome()
    out.records.append(Record("parametrix", "residual_uniform_k6", Ns[-1], f"{ts[0]}..{ts[-1]}", ratio,
                              f"<= {thr:g}", ratio <= thr, ANCHORS["resolvent_gap"]))
    out.plotdata["parametrix_residual"] = plot
    return out
