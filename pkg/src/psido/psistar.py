"""Semi-ideals ``J_k(T)``, their norms ``p_k`` and spectral invariance probes.

``p_0(A) = ||A||`` and

    p_{k+1}(A) = p_k(A) + p_k(T A) + p_k(A T) + p_k(T A T).

On a fixed grid every matrix is bounded, so membership is decided by
refinement: ``A`` is in ``J_k`` when ``p_k`` (of ``A`` and of ``A^H``)
stays within a factor ``STABLE_RATIO`` across the grid sizes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import NotPositiveDefinite, Singular
from .quantize import (
    GridContext,
    GridOperator,
    Provenance,
    extract_symbol,
    smoothing_membership,
)
from .sobolev import build_pack, op_sobolev_norm
from .symbols import japanese

REFINEMENT_NS = (128, 256, 512)
STABLE_RATIO = 3.0


def _mat(A):
    return A.matrix if isinstance(A, GridOperator) else np.asarray(A)


def pk_values(T, A, k_max) -> list:
    """``[p_0(A), ..., p_{k_max}(A)]`` with shared products ``T^a A T^b``."""
    Tm, Am = _mat(T), _mat(A)
    mats, memo = {(0, 0): Am}, {}

    def mat(a, b):
        if (a, b) not in mats:
            mats[(a, b)] = Tm @ mat(a - 1, b) if a > 0 else mat(a, b - 1) @ Tm
        return mats[(a, b)]

    def p(k, a, b):
        key = (k, a, b)
        if key not in memo:
            if k == 0:
                memo[key] = float(np.linalg.norm(mat(a, b), 2))
            else:
                memo[key] = (p(k - 1, a, b) + p(k - 1, a + 1, b) + p(k - 1, a, b + 1)
                             + p(k - 1, a + 1, b + 1))
        return memo[key]

    return [p(k, 0, 0) for k in range(k_max + 1)]


@dataclass
class SemiIdealProbe:
    k_max: int
    Ns: tuple
    trace: dict  # N -> [p_0..p_kmax] (max over A and A^H)
    label: str = ""

    def p(self, N):
        return self.trace[N]

    def ratio(self, k):
        v = np.array([self.trace[N][k] for N in self.Ns])
        if np.all(v == 0):
            return 1.0
        return float(v.max() / v.min()) if v.min() > 0 else np.inf

    def growth(self, k):
        """Per-doubling growth factors of ``p_k``."""
        v = [self.trace[N][k] for N in self.Ns]
        return [b / a if a > 0 else np.inf for a, b in zip(v, v[1:])]

    def member(self, k, ratio=STABLE_RATIO):
        return self.ratio(k) <= ratio


def pk_norms(T_of: Callable, A_of: Callable, k_max: int, Ns: Sequence[int] = REFINEMENT_NS,
             L=None, label="") -> SemiIdealProbe:
    """Refinement trace of ``p_k`` for operators built per grid.

    ``T_of(grid)`` and ``A_of(grid)`` return operators on ``grid``.  Both
    ``A`` and ``A^H`` are probed; the trace holds the larger value.
    """
    trace = {}
    for N in Ns:
        grid = GridContext(N) if L is None else GridContext(N, L)
        T, A = _mat(T_of(grid)), _mat(A_of(grid))
        p = pk_values(T, A, k_max)
        pH = pk_values(T, A.conj().T, k_max)
        trace[N] = [max(a, b) for a, b in zip(p, pH)]
    return SemiIdealProbe(k_max, tuple(Ns), trace, label)


def t_sobolev_scale(T, f, k_max, grid: GridContext = None) -> list:
    """``q_0(f) = ||f||``, ``q_k(f) = q_{k-1}(f) + q_{k-1}(T f)`` (continuum-scaled)."""
    Tm = _mat(T)
    grid = grid or (T.grid if isinstance(T, GridOperator) else None)
    scale = np.sqrt(grid.h) if grid is not None else 1.0
    f = np.asarray(f, dtype=complex)
    vecs = [f]
    for _ in range(k_max):
        vecs.append(Tm @ vecs[-1])

    def q(k, i):
        if k == 0:
            return float(np.linalg.norm(vecs[i]) * scale)
        return q(k - 1, i) + q(k - 1, i + 1)

    return [q(k, 0) for k in range(k_max + 1)]


def semi_ideal_product_check(T, A, X, B, k) -> float:
    """``p_k(A X B)``."""
    return pk_values(T, _mat(A) @ _mat(X) @ _mat(B), k)[k]


def spectral_inverse(R: GridOperator, cond_limit=1e10) -> GridOperator:
    """``R_1 = (I + R)^{-1} - I``."""
    I = np.eye(R.N)
    M = I + R.matrix
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > cond_limit:
        raise Singular(f"I + R has condition number {cond:.3g}")
    R1 = np.linalg.solve(M, I) - I
    return GridOperator(R1, R.grid, -np.inf, Provenance("derived", "R1"))


@dataclass
class InverseOrderReport:
    Ns: tuple
    norms: list  # ||P^{-1}||_{H^s -> H^{s+m}} per N
    ratio: float
    symbol_C: list  # fitted C in |b - 1/p| / |1/p| <= C <xi>^{-1} per N
    stable: bool


def elliptic_inverse_order(P_of: Callable, symbol, m, Ns: Sequence[int] = REFINEMENT_NS,
                           s=0.0, window=(4.0, 0.25)) -> InverseOrderReport:
    """Is ``P^{-1}`` of order ``-m``?

    ``||P^{-1}||_{H^s -> H^{s+m}}`` must be refinement-stable, and the
    extracted symbol of ``P^{-1}`` must match ``1/symbol`` to relative
    accuracy ``C <xi>^{-1}`` on ``window[0] <= |xi| <= window[1] Xi``.
    """
    norms, Cs = [], []
    for N in Ns:
        grid = GridContext(N)
        P = P_of(grid)
        M = _mat(P)
        if np.linalg.norm(M - M.conj().T) > 1e-10 * np.linalg.norm(M):
            raise NotPositiveDefinite("operator is not Hermitian")
        w, V = np.linalg.eigh(0.5 * (M + M.conj().T))
        if w[0] <= 0:
            raise NotPositiveDefinite(f"smallest eigenvalue {w[0]:.3g}")
        inv = (V / w) @ V.conj().T
        pack = build_pack(grid, ())
        norms.append(op_sobolev_norm(pack, inv, s, s + m))
        tab = extract_symbol(GridOperator(inv, grid), "weyl")
        ref = 1.0 / symbol(grid.x, grid.xi)
        win = (np.abs(grid.xi) >= window[0]) & (np.abs(grid.xi) <= window[1] * grid.Xi)
        if np.any(win):
            rel = np.abs(tab - ref)[:, win] / np.abs(ref[:, win])
            Cs.append(float(np.max(rel * japanese(grid.xi[win])[None, :])))
        else:
            Cs.append(np.nan)
    v = np.array(norms)
    ratio = float(v.max() / v.min())
    return InverseOrderReport(tuple(Ns), norms, ratio, Cs, ratio <= 2.0)


def holomorphic_calculus(A: GridOperator, f: Callable, radius=None, nodes=64) -> GridOperator:
    """``f(A) = (1/2 pi i) \\oint f(w) (w - A)^{-1} dw`` on a circle around the spectrum."""
    M = A.matrix
    rad = radius if radius is not None else 0.5 * (1 + np.linalg.norm(M, 2))
    I = np.eye(A.N)
    out = np.zeros_like(M)
    for j in range(nodes):
        w = rad * np.exp(2j * np.pi * j / nodes)
        out += f(w) * w / nodes * np.linalg.solve(w * I - M, I)
    return GridOperator(out, A.grid, -np.inf, Provenance("derived", "f(A)"))


def smoothing_after(op: GridOperator, orders=range(1, 5)):
    """Membership verdict for ``op`` and its adjoint."""
    a = smoothing_membership(op, orders)
    b = smoothing_membership(GridOperator(op.matrix.conj().T, op.grid), orders)
    return a.verdict and b.verdict, (a, b)
