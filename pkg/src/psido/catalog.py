"""Built-in symbols and smoothing kernels used by tests, scripts and the CLI."""

from __future__ import annotations

from typing import Callable

import numpy as np

from . import jets
from .quantize import GridContext, GridOperator, Provenance, heat_operator, smoothing_from_kernel
from .symbols import (
    Symbol,
    bracket_symbol,
    constant_symbol,
    expr_symbol,
    r_symbol,
)


def c2_symbol() -> Symbol:
    """``<xi>^2 (2 + sin x)``, real, elliptic of order 2 and ``>= 1``."""
    lead = expr_symbol(2, lambda x, xi: xi * xi * (2 + jets.sin(x)), name="xi^2(2+sin x)")
    return expr_symbol(2, lambda x, xi: (1 + xi * xi) * (2 + jets.sin(x)), name="c2",
                       homog_terms=[(2, lead)])


def r2_symbol() -> Symbol:
    """``r^2``: the Laplacian-like multiplier."""
    r = r_symbol()
    return r * r


def xi_symbol() -> Symbol:
    lead = expr_symbol(1, lambda x, xi: xi, period=None, name="xi")
    return expr_symbol(1, lambda x, xi: xi, period=None, name="xi", homog_terms=[(1, lead)])


def order_zero_symbols() -> dict:
    """Five real order-0 symbols for boundedness checks."""
    return {
        "h1": expr_symbol(0, lambda x, xi: (2 + jets.sin(x)) * jets.cos(jets.arctan(xi)),
                          name="(2+sin x)cos(arctan xi)"),
        "h2": expr_symbol(0, lambda x, xi: jets.sin(x) * xi / jets.bracket(xi),
                          name="sin x xi/<xi>"),
        "h3": expr_symbol(0, lambda x, xi: 0.5 * (1 + jets.cos(x)) * xi * xi / (1 + xi * xi),
                          name="(1+cos x)xi^2/(2<xi>^2)"),
        "h4": constant_symbol(0.7),
        "h5": expr_symbol(0, lambda x, xi: xi / jets.bracket(xi) + 0.3 * jets.cos(x),
                          name="xi/<xi>+0.3cos x"),
    }


# -- smoothing kernels ---------------------------------------------------------------

def heat(grid: GridContext, t=0.1) -> GridOperator:
    return heat_operator(grid, t)


def theta_heat(grid: GridContext, t=0.1, terms=50) -> GridOperator:
    """Periodised Gaussian heat kernel summed over ``|n| <= terms`` images."""
    L = grid.L

    def K(x, y):
        d = x - y
        out = np.zeros_like(d)
        for n in range(-terms, terms + 1):
            out = out + np.exp(-(d - n * L) ** 2 / (4 * t))
        return out / np.sqrt(4 * np.pi * t)

    return smoothing_from_kernel(K, grid, f"theta_heat({t:g})")


def bump_rank_one(grid: GridContext, width=1.0) -> GridOperator:
    """``phi(x) phi(y)`` with a unit-norm Gaussian bump ``phi``."""
    phi = np.exp(-(grid.x / width) ** 2)
    phi = phi / (np.linalg.norm(phi) * np.sqrt(grid.h))
    return smoothing_from_kernel(lambda x, y: np.interp(x, grid.x, phi) * np.interp(y, grid.x, phi),
                                 grid, "bump")


def oscillatory(grid: GridContext, fraction=0.75) -> GridOperator:
    """``e^{i xi0 (x - y)}`` with ``xi0`` tied to the grid (``fraction * Xi``).

    On every grid this sits at a fixed fraction of the resolved band, so it
    does not behave as a smoothing operator under refinement.
    """
    xi0 = fraction * grid.Xi
    k = np.round(xi0 * grid.L / (2 * np.pi))
    xi0 = 2 * np.pi * k / grid.L
    op = smoothing_from_kernel(lambda x, y: np.exp(1j * xi0 * (x - y)) / grid.L, grid,
                               f"osc({fraction:g})")
    op.order = 0.0
    return op


def scaled(op: GridOperator, norm=0.5, sign=1.0) -> GridOperator:
    """``op`` rescaled to spectral norm ``norm``."""
    n = op.norm()
    return GridOperator(sign * norm / n * op.matrix, op.grid, op.order,
                        Provenance(op.provenance.kind, f"{op.provenance.label}*{norm:g}"))


def smoothing_set(grid: GridContext) -> dict:
    """Three smoothing operators of norm ``1/2``."""
    return {
        "heat": scaled(heat(grid, 0.1), 0.5),
        "theta_heat": scaled(theta_heat(grid, 0.2), 0.5, -1.0),
        "bump": scaled(bump_rank_one(grid), 0.5, -1.0),
    }


SYMBOLS: dict[str, Callable[[], Symbol]] = {
    "one": lambda: constant_symbol(1.0),
    "xi": xi_symbol,
    "bracket": lambda: bracket_symbol(1.0),
    "r": r_symbol,
    "r2": r2_symbol,
    "c2": c2_symbol,
}

KERNELS: dict[str, Callable[..., GridOperator]] = {
    "heat": heat,
    "theta_heat": theta_heat,
    "bump": bump_rank_one,
    "oscillatory": oscillatory,
}

ENTRIES = (
    ("one", "the constant symbol 1; q(1) = I"),
    ("xi", "xi: q(xi) = -i d/dx"),
    ("bracket(m)", "<xi>^m = (1 + xi^2)^{m/2}"),
    ("r", "smooth r >= 1 with r = |xi| for |xi| >= 2; defines P_s = (I + q(r^{s/2})^2)/2"),
    ("r2", "r^2"),
    ("c2 = ⟨ξ⟩²(2+sin x)", "standard elliptic test symbol"),
    ("h1..h5", "real order-0 symbols for the square-root norm bound"),
    ("heat(t)", "R = e^{−tΔ}, the model smoothing operator"),
    ("theta_heat(t)", "periodised Gaussian kernel (4 pi t)^{-1/2} sum_n e^{-(x-y-nL)^2/4t}"),
    ("bump", "rank-one kernel phi(x) phi(y), phi a normalised Gaussian"),
    ("oscillatory", "e^{i xi0 (x-y)} with xi0 = 0.75 Xi; not smoothing under refinement"),
)


def symbol(name: str) -> Symbol:
    if name in SYMBOLS:
        return SYMBOLS[name]()
    if name.startswith("bracket"):
        return bracket_symbol(float(name[len("bracket"):].strip("()") or 1.0))
    zero = order_zero_symbols()
    if name in zero:
        return zero[name]
    raise KeyError(name)


def list_catalog() -> str:
    return "\n".join(f"{k}: {v}" for k, v in ENTRIES)
