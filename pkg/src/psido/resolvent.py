"""Resolvents ``(T + i t)^{-1}`` of ``T = q(c) + R`` along the imaginary axis."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NearSingular
from .quantize import GridContext, GridOperator, Provenance, quantize
from .sobolev import SobolevPack, build_pack, guillemin_norm, op_sobolev_norm
from .symbols import PointwiseSymbol, Symbol

T_GRID = (1, 2, 4, 8, 16, 32, 64)
COND_LIMIT = 1e12


def default_t_grid(t_max=64):
    ts = [t for t in T_GRID if t <= t_max]
    return tuple(sorted([-t for t in ts] + ts))


def resolvent_symbol(c: Symbol, t) -> Symbol:
    """Pointwise ``(c + i t)^{-1}`` of order ``-m``."""
    t = float(t)
    return PointwiseSymbol(-c.m, lambda C: 1.0 / (C + 1j * t), (c,),
                           name=f"({c.name}+{t:g}i)^-1")


def shifted_symbol(c: Symbol, t) -> Symbol:
    t = float(t)
    return PointwiseSymbol(c.order, lambda C: C + 1j * t, (c,), name=f"{c.name}+{t:g}i",
                           homog_terms=c.homog_terms)


def interpolation_constant(a, xs, ts) -> float:
    """Smallest ``C`` with ``|x + i t|^{-1} <= C <x>^{-a} |t|^{a-1}`` on the sample grid."""
    X, Tt = np.meshgrid(np.asarray(xs, float), np.asarray(ts, float), indexing="ij")
    lhs = 1.0 / np.abs(X + 1j * Tt)
    rhs = np.sqrt(1 + X ** 2) ** (-a) * np.abs(Tt) ** (a - 1)
    return float(np.max(lhs / rhs))


def _shifted(T, t):
    return T + 1j * t * np.eye(T.shape[0])


def naive_inverse_defect(c: Symbol, t, grid: GridContext) -> GridOperator:
    """``q(c + i t) q((c + i t)^{-1}) - I``."""
    M = quantize(shifted_symbol(c, t), grid).matrix @ quantize(resolvent_symbol(c, t), grid).matrix
    return GridOperator(M - np.eye(grid.N), grid, -1.0, Provenance("derived", f"D_{t:g}"))


def _R_matrix(R, grid):
    if R is None:
        return np.zeros((grid.N, grid.N), dtype=complex)
    return R.matrix if isinstance(R, GridOperator) else np.asarray(R)


def first_defect(c, R, t, grid, literal=False):
    """``E_1(t) = I - (T + i t) q((c + i t)^{-1})``.

    ``literal=True`` uses ``I - q(c + i t) q((c + i t)^{-1}) - R`` instead,
    whose composition residual keeps the bounded term ``-R``.
    """
    Rm = _R_matrix(R, grid)
    Q = quantize(resolvent_symbol(c, t), grid).matrix
    Tt = _shifted(quantize(c, grid).matrix, t)
    if literal:
        E = np.eye(grid.N) - Tt @ Q - Rm
    else:
        E = np.eye(grid.N) - (Tt + Rm) @ Q
    return E, Q


def parametrix_family(c: Symbol, R, t, k, grid: GridContext, literal=False, side="right") -> GridOperator:
    """``G_t = q((c+it)^{-1}) (I + sum_{j=1..k} E_1^j)``.

    With the default ``E_1`` the residual is ``(T + i t) G_t - I = -E_1^{k+1}``.
    ``side="left"`` builds ``(I + sum F_1^j) q((c+it)^{-1})`` with
    ``F_1 = I - q((c+it)^{-1}) (T + i t)``.
    """
    if k > 8:
        raise ValueError("k must be at most 8")
    Rm = _R_matrix(R, grid)
    I = np.eye(grid.N)
    if side == "right":
        E, Q = first_defect(c, R, t, grid, literal)
    else:
        Q = quantize(resolvent_symbol(c, t), grid).matrix
        E = I - Q @ (_shifted(quantize(c, grid).matrix, t) + Rm)
    S, P = I.astype(complex), I.astype(complex)
    for _ in range(k):
        P = P @ E
        S = S + P
    G = Q @ S if side == "right" else S @ Q
    return GridOperator(G, grid, -c.m, Provenance("derived", f"G_{t:g}"))


def full_operator(c: Symbol, R, grid: GridContext) -> GridOperator:
    M = quantize(c, grid).matrix + _R_matrix(R, grid)
    return GridOperator(M, grid, c.order, Provenance("derived", f"q({c.name})+R"))


@dataclass
class TrueResolvent:
    t: float
    inverse: GridOperator
    R1: GridOperator
    R1_norm: float
    R1_guillemin: float
    cond: float


def true_resolvent(c: Symbol, R, t, grid: GridContext, pack: SobolevPack = None) -> TrueResolvent:
    """Dense ``(T + i t)^{-1}`` and ``R_1(t) = q((c+it)^{-1})^{-1} (T+it)^{-1} - I``."""
    T = full_operator(c, R, grid).matrix
    Tt = _shifted(T, t)
    cond = np.linalg.cond(Tt)
    if cond > COND_LIMIT:
        raise NearSingular(f"condition number {cond:.3g}")
    inv = np.linalg.inv(Tt)
    Q = quantize(resolvent_symbol(c, t), grid).matrix
    R1 = np.linalg.solve(Q, inv) - np.eye(grid.N)
    pack = pack or build_pack(grid, ())
    return TrueResolvent(float(t), GridOperator(inv, grid, -c.m, Provenance("derived", "resolvent")),
                         GridOperator(R1, grid, -1.0, Provenance("derived", "R1")),
                         float(np.linalg.norm(R1, 2)), guillemin_norm(pack, R1, 1), cond)


@dataclass
class ResolventFamily:
    """Sweep container over ``t_grid`` for ``T = q(c) + R``."""

    c: Symbol
    R: GridOperator
    grid: GridContext
    t_grid: tuple = field(default_factory=default_t_grid)

    def __post_init__(self):
        self.pack = build_pack(self.grid, ())
        self._cache = {}

    @property
    def T(self):
        if "T" not in self._cache:
            self._cache["T"] = full_operator(self.c, self.R, self.grid)
        return self._cache["T"]

    def symbol(self, t):
        return resolvent_symbol(self.c, t)

    def resolvent(self, t) -> GridOperator:
        key = ("inv", float(t))
        if key not in self._cache:
            self._cache[key] = GridOperator(np.linalg.inv(_shifted(self.T.matrix, t)), self.grid,
                                            -self.c.m, Provenance("derived", "resolvent"))
        return self._cache[key]

    def parametrix(self, t, k, **kw) -> GridOperator:
        return parametrix_family(self.c, self.R, t, k, self.grid, **kw)

    def gap(self, t, k, s=-1.0, s_prime=1.0, **kw) -> float:
        """``||(T + i t)^{-1} - G_t||_{H^s -> H^s'}``."""
        D = self.resolvent(t).matrix - self.parametrix(t, k, **kw).matrix
        return op_sobolev_norm(self.pack, D, s, s_prime)

    def residual(self, t, k, s=-1.0, s_prime=1.0, **kw) -> float:
        G = self.parametrix(t, k, **kw).matrix
        D = _shifted(self.T.matrix, t) @ G - np.eye(self.grid.N)
        return op_sobolev_norm(self.pack, D, s, s_prime)


def loglog_slope(ts, values) -> float:
    ts, values = np.abs(np.asarray(ts, float)), np.asarray(values, float)
    return float(np.polyfit(np.log(ts), np.log(values), 1)[0])
