"""Sobolev scale ``H^(s)`` built from ``P_s = (I + q(r^{s/2})^2) / 2``.

``P_s`` for ``s < 0`` is the inverse of ``P_{-s}``.  Because ``r`` does not
depend on ``x`` every ``P_s`` is a Fourier multiplier, so norms are computed
in the plane-wave basis.

Operator norms are, by default, restricted to the resolved band
``|xi| <= band * Xi`` with ``band = 1/2``.  Near the Nyquist frequency the
grid cannot represent the symbol calculus (frequencies wrap around), and
unrestricted norms pick up a spurious factor ``Xi^k`` there.  Pass
``band=1.0`` for the full matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SingularPs
from .quantize import GridContext, GridOperator, Provenance, quantize
from .symbols import power_family, r_symbol

DEFAULT_ORDERS = (-4, -3, -2, -1, 0, 1, 2, 3, 4)
DEFAULT_BAND = 0.5
COND_LIMIT = 1e12


@dataclass
class SobolevPack:
    grid: GridContext
    orders: tuple
    P: dict = field(default_factory=dict)
    weights: dict = field(default_factory=dict)

    def weight(self, s):
        """Eigenvalues of ``P_s`` on the plane waves, ordered by ``xi``."""
        s = float(s)
        if s not in self.weights:
            _add_order(self, s)
        return self.weights[s]

    def matrix(self, s):
        s = float(s)
        if s not in self.P:
            _add_order(self, s)
        return self.P[s]


def _positive_part(grid, s):
    """``P_s`` for ``s >= 0`` through the Weyl quantization of ``r^{s/2}``."""
    if s == 0:
        return np.eye(grid.N, dtype=complex)
    q = quantize(power_family(r_symbol(), s / 2), grid).matrix
    return 0.5 * (np.eye(grid.N) + q @ q)


def _add_order(pack, s):
    grid = pack.grid
    if s >= 0:
        P = _positive_part(grid, s)
    else:
        Pp = pack.matrix(-s)
        cond = np.linalg.cond(Pp)
        if cond > COND_LIMIT:
            raise SingularPs(f"P_{-s} has condition number {cond:.3g}")
        P = np.linalg.inv(Pp)
    pack.P[s] = P
    pack.weights[s] = np.real(np.diag(grid.fourier(P)))


def build_pack(grid: GridContext, orders=DEFAULT_ORDERS) -> SobolevPack:
    pack = SobolevPack(grid, tuple(float(s) for s in orders))
    for s in sorted(pack.orders, key=lambda v: (v < 0, abs(v))):
        pack.matrix(s)
    return pack


def pack_operator(pack: SobolevPack, s) -> GridOperator:
    return GridOperator(pack.matrix(s), pack.grid, float(s), Provenance("derived", f"P_{s:g}"))


def sobolev_norm(pack: SobolevPack, u, s) -> float:
    """``||P_s u||`` scaled by ``sqrt(L/N)``."""
    grid = pack.grid
    uh = grid.to_freq(np.asarray(u, dtype=complex))
    return float(np.linalg.norm(pack.weight(s) * uh) * np.sqrt(grid.h))


def _band_norm(M, idx):
    return float(np.linalg.norm(M[np.ix_(idx, idx)], 2))


def op_sobolev_norm(pack: SobolevPack, T, s, s_prime, band=DEFAULT_BAND) -> float:
    """Norm of ``T : H^(s) -> H^(s')``, i.e. ``||P_{s'} T P_{-s}||``."""
    grid = pack.grid
    M = T.matrix if isinstance(T, GridOperator) else np.asarray(T)
    Mh = grid.fourier(M)
    W = pack.weight(s_prime)[:, None] * Mh / pack.weight(s)[None, :]
    return _band_norm(W, grid.band(band))


def guillemin_norm(pack: SobolevPack, T, n, band=DEFAULT_BAND) -> float:
    """``||P_n T P_n||``: the norm of ``T : H^(-n) -> H^(n)``."""
    return op_sobolev_norm(pack, T, -n, n, band)
