"""Symbolic composition, adjoints, principal symbols and parametrices."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import jets
from .errors import NotClassical, NotElliptic
from .jets import Jet
from .quantize import GridOperator, Provenance, _norm_conv
from .symbols import (
    ASYM_START,
    PointwiseSymbol,
    Region,
    Symbol,
    asymptotic_sum,
    constant_symbol,
    cutoff_symbol,
    is_elliptic,
    _add_orders,
    _common_period,
)

#: sign ``s`` in the Weyl term ``(s i / 2)^j``; fixed by the quantizer-match test
MOYAL_SIGN = -1


def _dxi(table, p):
    """Taylor table of ``d_xi^p f`` from the table of ``f`` (drops ``p`` orders)."""
    K = table.shape[0] - 1 - p
    n = np.arange(K + 1)
    fac = np.array([math.factorial(i + p) / math.factorial(i) for i in n])
    return table[p:] * fac.reshape((-1,) + (1,) * (table.ndim - 1))


class MoyalTerm(Symbol):
    """Single term of the composition expansion; needs operand x-derivatives."""

    direct = False

    def __init__(self, a, b, j, convention="weyl", sign=MOYAL_SIGN):
        period = _common_period((a, b))
        order = _add_orders(a.order, b.order)
        if not isinstance(order, float):
            order = order - j
        super().__init__(order, name=f"P{j}({a.name},{b.name})", period=period,
            x_points=max(a.x_points, b.x_points))
        self.a, self.b, self.j = a, b, j
        self.convention = convention
        self.sign = sign

    def _pairs(self):
        j = self.j
        if self.convention == "kn":
            # (1/j!) (-i)^j d_xi^j a * d_x^j b
            yield (-1j) ** j / math.factorial(j), (0, j), (j, 0)
            return
        c0 = (self.sign * 0.5j) ** j / math.factorial(j)
        for p in range(j + 1):
            coef = c0 * math.comb(j, p) * (-1) ** (j - p)
            # d_xi^p d_x^{j-p} a  *  d_x^p d_xi^{j-p} b
            yield coef, (j - p, p), (p, j - p)

    def _table(self, x, xi, K):
        out = None
        for coef, (ax, axi), (bx, bxi) in self._pairs():
            A = _dxi(self.a.taylor(x, xi, K + axi, dx=ax), axi)
            B = _dxi(self.b.taylor(x, xi, K + bxi, dx=bx), bxi)
            term = (Jet(A) * Jet(B)).c * coef
            out = term if out is None else out + term
        return out


@dataclass
class CompositionResult:
    symbol: Symbol
    terms: list
    order: complex
    residual_order: float
    convention: str = "weyl"


def moyal_compose(a: Symbol, b: Symbol, k: int, convention="weyl", sign=MOYAL_SIGN) -> CompositionResult:
    """Composition expansion ``P_k(a, b) = sum_{j<=k} term_j``.

    Weyl: ``term_j = (1/j!) (s i/2)^j (d_xi d_y - d_x d_eta)^j a(x,xi) b(y,eta)`` on
    the diagonal with ``s = MOYAL_SIGN``.  Kohn-Nirenberg:
    ``term_j = (1/j!) (-i)^j d_xi^j a d_x^j b``.  Term 0 is the product ``ab``.
    """
    conv = _norm_conv(convention)
    if k < 0:
        raise ValueError("k must be nonnegative")
    terms = [a * b]
    for j in range(1, k + 1):
        if a.period is None and b.period is None:
            break  # all corrections vanish for x-independent symbols
        terms.append(MoyalTerm(a, b, j, conv, sign))
    order = terms[0].order
    sym = terms[0] if len(terms) == 1 else PointwiseSymbol(
        order, lambda *us: sum(us[1:], us[0]), terms, name=f"P{k}({a.name},{b.name})")
    sym.real = False
    if len(terms) == 1:
        sym.real = a.real and b.real
    return CompositionResult(sym, terms, order, float(np.real(order)) - k - 1, conv)


def sharp_adjoint(T: GridOperator) -> GridOperator:
    """Conjugate transpose; the order's imaginary part flips sign."""
    return GridOperator(T.matrix.conj().T, T.grid, np.conj(T.order),
                        Provenance("derived", f"#({T.provenance.label})", T.convention))


def principal_symbol(a: Symbol) -> Symbol:
    """Leading homogeneous component of a classical symbol."""
    if not a.homog_terms:
        if np.isinf(a.m):
            return constant_symbol(0.0)
        raise NotClassical(f"{a.name} carries no homogeneous expansion")
    return a.homog_terms[0][1]


def principal_nonvanishing(a: Symbol, n=257, x=None) -> bool:
    """Principal symbol nonzero on the unit cosphere ``|xi| = 1``."""
    p = principal_symbol(a)
    x = np.linspace(-np.pi, np.pi, n, endpoint=False) if x is None else x
    v = p(x, np.array([-1.0, 1.0]))
    return bool(np.all(np.abs(v) > 1e-12))


def excised_inverse(a: Symbol, scale=1.0) -> Symbol:
    """``chi(xi / scale) / a``, zero where the cutoff vanishes."""
    chi = cutoff_symbol(scale)

    def fn(A, C):
        live = np.asarray(C.value) != 0
        safe = jets.where(live, A, 1.0)
        return jets.where(live, C / safe, 0.0)

    homog = []
    if a.homog_terms:
        from .symbols import reciprocal_symbol
        d, h = a.homog_terms[0]
        homog = [(-d, reciprocal_symbol(h))]
    order = -a.order if not isinstance(a.order, float) else np.inf
    return PointwiseSymbol(order, fn, (a, chi), name=f"chi/{a.name}", real=a.real,
                           homog_terms=homog)


DEFAULT_PARAMETRIX_K = 4
MAX_PARAMETRIX_K = 6


@dataclass
class Parametrix:
    symbol: Symbol
    terms: list
    b0: Symbol
    k: int

    def residual(self, a, convention="weyl"):
        """``P_k(a, b) - 1`` as a symbol."""
        return moyal_compose(a, self.symbol, self.k, convention).symbol - 1.0


def parametrix(a: Symbol, k=DEFAULT_PARAMETRIX_K, mu=1.0, convention="weyl", region=None,
               summed=True) -> Parametrix:
    """Right parametrix ``b ~ b_0 # (1 + e + e#e + ...)`` with ``a # b_0 = 1 - e``.

    ``b_0 = chi / a`` and the Neumann terms ``b_0 # e^{#n}`` (order ``-m - n``)
    are combined by :func:`asymptotic_sum` (``summed=True``) or added plainly.
    """
    if k > MAX_PARAMETRIX_K:
        raise ValueError(f"k={k} exceeds {MAX_PARAMETRIX_K}")
    if not is_elliptic(a, mu, region):
        raise NotElliptic(f"{a.name} is not elliptic with parameter {mu}")
    b0 = excised_inverse(a)
    e = 1.0 - moyal_compose(a, b0, k, convention).symbol
    terms = [b0]
    power = None
    for n in range(1, k + 1):
        power = e if power is None else moyal_compose(power, e, k, convention).symbol
        t = moyal_compose(b0, power, k, convention).symbol
        t.order = b0.order - n if not isinstance(b0.order, float) else b0.order
        terms.append(t)
    if summed and len(terms) > 1:
        # b_0 already carries chi(xi); chi(2 xi) = 1 on its support, so term 0 is kept whole
        sym = asymptotic_sum(terms, thresholds=[0.5] + [ASYM_START] * k, region=region)
    else:
        sym = terms[0] if len(terms) == 1 else PointwiseSymbol(
            b0.order, lambda *us: sum(us[1:], us[0]), terms, name="parametrix")
    sym.homog_terms = b0.homog_terms
    return Parametrix(sym, terms, b0, k)
