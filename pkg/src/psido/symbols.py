"""Symbols on the periodic phase space ``(x, xi)``.

A :class:`Symbol` is an evaluable function ``a(x, xi)`` with a declared
(possibly complex) order.  Evaluation always uses tensor semantics:
``a.taylor(x, xi, K, dx)`` takes 1-D arrays and returns the frequency
Taylor table of ``d^dx/dx^dx a`` with shape ``(K + 1, len(x), len(xi))``.
Frequency derivatives are exact (truncated Taylor arithmetic); position
derivatives are spectral on an internal grid over one period in ``x``.
Symbols built from an opaque callable fall back to finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import jets
from .errors import (
    DerivativeUnavailable,
    DomainViolation,
    NonFiniteValue,
    NotElliptic,
    OrderMismatch,
)
from .jets import Jet

TWO_PI = 2.0 * np.pi
DEFAULT_L = 16.0 * np.pi
DEFAULT_N = 256

# finite differences: first-order step and depth; order-n steps follow
# eps^(1/(n+4)), the balance point for an O(h^4) Richardson scheme
FD_STEP_X = 1e-4
FD_STEP_XI = 1e-4
FD_MAX_ORDER = 4


def fd_step(n):
    return max(FD_STEP_X, np.finfo(float).eps ** (1.0 / (n + 4))) if n > 1 else FD_STEP_X


def japanese(xi):
    """``<xi> = (1 + xi^2)^{1/2}`` on plain arrays."""
    return np.sqrt(1.0 + np.asarray(xi, dtype=float) ** 2)


def _real_order(order):
    order = complex(order) if not (isinstance(order, float) and np.isinf(order)) else order
    return order.real if isinstance(order, complex) else float(order)


def _common_period(symbols):
    periods = {s.period for s in symbols if s.period is not None}
    if not periods:
        return None
    period = periods.pop()
    for p in periods:
        if not np.isclose(p, period):
            raise ValueError(f"incompatible x-periods {p} and {period}")
    return period


def _spectral(G, period, x_grid, x, dx):
    """Differentiate ``dx`` times along axis 1 and resample at ``x``."""
    n = G.shape[1]
    if dx == 0 and x.shape == x_grid.shape and np.array_equal(x, x_grid):
        return G
    F = np.fft.fft(G, axis=1) / n
    k = np.fft.fftfreq(n, d=1.0 / n)
    if n % 2 == 0:
        # split the Nyquist mode symmetrically so real tables stay real
        F = np.concatenate([F, F[:, n // 2:n // 2 + 1] / 2], axis=1)
        F[:, n // 2] /= 2
        k = np.concatenate([k, [n / 2]])
    wave = TWO_PI * k / period
    if dx:
        F = F * ((1j * wave) ** dx)[None, :, None]
    E = np.exp(1j * np.outer(x - x_grid[0], wave))
    out = np.einsum("xn,knj->kxj", E, F)
    if not np.iscomplexobj(G):
        out = out.real
    return out


class Symbol:
    """Base class.  Subclasses implement :meth:`_table`."""

    #: evaluable at arbitrary ``x`` without going through the internal grid
    direct = True

    def __init__(self, order, *, name="", homog_terms=(), real=False, period=None, x_points=64):
        if isinstance(order, float) and np.isinf(order):
            self.order = order
        else:
            self.order = complex(order)
        self.name = name
        self.homog_terms = tuple(homog_terms)
        self.real = bool(real)
        self.period = period
        self.x_points = int(x_points)
        self._grid_cache = {}

    def __repr__(self):
        return f"{type(self).__name__}({self.name or '?'}, order={self.order})"

    @property
    def m(self):
        """Real part of the order."""
        return _real_order(self.order)

    @property
    def is_classical(self):
        return bool(self.homog_terms)

    @property
    def fd_step(self):
        return 0.0

    # -- evaluation --------------------------------------------------------
    def _table(self, x, xi, K):
        raise NotImplementedError

    def x_grid(self):
        if self.period is None:
            return np.zeros(1)
        n = self.x_points
        return -self.period / 2 + self.period * np.arange(n) / n

    def grid_table(self, xi, K):
        """Taylor table on the internal x-grid (cached per frequency set)."""
        xi = np.ascontiguousarray(xi, dtype=float)
        key = xi.tobytes()
        hit = self._grid_cache.get(key)
        if hit is not None and hit.shape[0] > K:
            return hit[:K + 1]
        table = self._table(self.x_grid(), xi, K)
        if len(self._grid_cache) > 32:
            self._grid_cache.clear()
        self._grid_cache[key] = table
        return table

    def taylor(self, x, xi, K=0, dx=0):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        if self.period is None:
            T = self._table(np.zeros(1), xi, K)
            if dx:
                T = np.zeros_like(T)
            return np.ascontiguousarray(np.broadcast_to(T, (T.shape[0], x.size, xi.size)))
        if dx == 0 and self.direct:
            return self._table(x, xi, K)
        return _spectral(self.grid_table(xi, K), self.period, self.x_grid(), x, dx)

    def __call__(self, x, xi):
        scalar = np.ndim(x) == 0 and np.ndim(xi) == 0
        out = self.taylor(x, xi, 0)[0]
        return out[0, 0] if scalar else out

    def deriv(self, alpha, beta, x, xi):
        """Table of ``d_x^alpha d_xi^beta a`` on the tensor grid ``x * xi``."""
        return math.factorial(beta) * self.taylor(x, xi, beta, dx=alpha)[beta]

    # -- algebra -------------------------------------------------------------
    def __add__(self, other):
        other = as_symbol(other)
        order = self.order if _real_order(self.order) >= _real_order(other.order) else other.order
        return PointwiseSymbol(order, lambda a, b: a + b, (self, other),
                               name=f"({self.name}+{other.name})", real=self.real and other.real)

    __radd__ = __add__

    def _fixed(self):
        """True when ``self`` is its own leading homogeneous term (constants)."""
        return bool(self.homog_terms) and self.homog_terms[0][1] is self

    def __neg__(self):
        out = PointwiseSymbol(self.order, lambda a: -a, (self,), name=f"-{self.name}", real=self.real)
        return _set_homog(out, self, lambda h: -h)

    def __sub__(self, other):
        return self + (-as_symbol(other))

    def __rsub__(self, other):
        return as_symbol(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, Symbol):
            out = PointwiseSymbol(_add_orders(self.order, other.order), lambda a, b: a * b,
                                  (self, other), name=f"{self.name}*{other.name}",
                                  real=self.real and other.real)
            if self.homog_terms and other.homog_terms:
                (d1, h1), (d2, h2) = self.homog_terms[0], other.homog_terms[0]
                if self._fixed() and other._fixed():
                    out.homog_terms = ((0, out),)
                else:
                    out.homog_terms = ((d1 + d2, h1 * h2),)
            return out
        c = complex(other)
        c = c.real if c.imag == 0 else c
        out = PointwiseSymbol(self.order, lambda a: a * c, (self,), name=f"{c}*{self.name}",
                              real=self.real and np.isreal(c))
        return _set_homog(out, self, lambda h: h * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Symbol):
            return self * reciprocal_symbol(other)
        return self * (1.0 / other)

    def conj(self):
        order = self.order if isinstance(self.order, float) else self.order.conjugate()
        out = PointwiseSymbol(order, jets.conj, (self,), name=f"conj({self.name})")
        return _set_homog(out, self, lambda h: h.conj(), np.conj)


def _set_homog(out, src, fn, deg=lambda d: d):
    """Map the leading homogeneous terms of ``src`` onto ``out``; fixed points stay fixed."""
    if src._fixed():
        out.homog_terms = ((deg(src.homog_terms[0][0]), out),)
    else:
        out.homog_terms = tuple((deg(d), fn(h)) for d, h in src.homog_terms)
    return out


def _add_orders(a, b):
    if isinstance(a, float) or isinstance(b, float):
        return -np.inf
    return a + b


def _as_table(out, K, nx, nxi):
    if isinstance(out, Jet):
        c = out.c
    else:
        c = Jet.constant(out, K).c
    return np.ascontiguousarray(np.broadcast_to(c, (K + 1, nx, nxi)))


class ExprSymbol(Symbol):
    """Symbol given by an expression that accepts a :class:`Jet` for ``xi``."""

    def __init__(self, order, expr, **kw):
        super().__init__(order, **kw)
        self.expr = expr

    def _table(self, x, xi, K):
        out = self.expr(x[:, None], Jet.variable(xi[None, :], K))
        return _as_table(out, K, x.size, xi.size)


class PointwiseSymbol(Symbol):
    """Pointwise function of other symbols, evaluated through their jets."""

    def __init__(self, order, fn, operands, **kw):
        operands = tuple(operands)
        kw.setdefault("period", _common_period(operands))
        kw.setdefault("x_points", max([s.x_points for s in operands] + [16]))
        kw.setdefault("real", False)
        super().__init__(order, **kw)
        self.fn = fn
        self.operands = operands
        self.direct = all(s.direct for s in operands)

    def _table(self, x, xi, K):
        args = [Jet(s.taylor(x, xi, K)) for s in self.operands]
        return _as_table(self.fn(*args), K, x.size, xi.size)


class OpaqueSymbol(Symbol):
    """Symbol from a plain callable; derivatives from ``deriv`` or finite differences."""

    def __init__(self, order, func, deriv=None, **kw):
        super().__init__(order, **kw)
        self.func = func
        self.deriv_supplier = deriv

    @property
    def fd_step(self):
        return 0.0 if self.deriv_supplier is not None else FD_STEP_XI

    def _values(self, x, xi):
        X, XI = np.meshgrid(x, xi, indexing="ij")
        return np.asarray(self.func(X, XI)) * np.ones(X.shape)

    def _derivative(self, alpha, beta, x, xi):
        X, XI = np.meshgrid(x, xi, indexing="ij")
        if self.deriv_supplier is not None:
            d = self.deriv_supplier(alpha, beta)
            if d is None:
                raise DerivativeUnavailable(f"no supplier for ({alpha}, {beta})")
            return np.asarray(d(X, XI)) * np.ones(X.shape)
        if alpha > FD_MAX_ORDER or beta > FD_MAX_ORDER:
            raise DerivativeUnavailable(
                f"finite differences limited to order {FD_MAX_ORDER}, asked ({alpha}, {beta})")
        return fd_derivative(self.func, X, XI, alpha, beta)

    def _table(self, x, xi, K):
        out = [self._values(x, xi)]
        for n in range(1, K + 1):
            out.append(self._derivative(0, n, x, xi) / math.factorial(n))
        return np.array(out)

    def taylor(self, x, xi, K=0, dx=0):
        if dx == 0:
            return super().taylor(x, xi, K, 0)
        x = np.atleast_1d(np.asarray(x, dtype=float))
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        if self.period is None:
            return np.zeros((K + 1, x.size, xi.size))
        return np.array([self._derivative(dx, n, x, xi) / math.factorial(n)
                         for n in range(K + 1)])


def _central(f, n, h):
    """n-th central difference of ``f(shift)`` with step ``h``."""
    acc = 0.0
    for i in range(n + 1):
        acc = acc + (-1) ** i * math.comb(n, i) * f((n / 2 - i) * h)
    return acc / h ** n


def fd_derivative(func, X, XI, alpha, beta):
    """Mixed derivative by nested central differences with one Richardson step."""

    def D(scale):
        hx = fd_step(alpha) * scale
        hxi = fd_step(beta) * (1.0 + np.abs(XI)) * scale

        def fx(sx):
            return _central(lambda sxi: np.asarray(func(X + sx, XI + sxi), dtype=complex), beta, hxi) \
                if beta else np.asarray(func(X + sx, XI), dtype=complex)

        return _central(fx, alpha, hx) if alpha else fx(0.0)

    out = (4.0 * D(0.5) - D(1.0)) / 3.0
    if np.all(np.isreal(func(X, XI))):
        out = out.real
    return out


def as_symbol(v):
    if isinstance(v, Symbol):
        return v
    return constant_symbol(v)


def constant_symbol(c):
    c = complex(c)
    c = c.real if c.imag == 0 else c
    if c == 0:
        order = -np.inf
    else:
        order = 0
    out = ExprSymbol(order, lambda x, xi: c + 0.0 * xi, name=f"{c:g}", real=np.isreal(c))
    if c != 0:
        out.homog_terms = ((0, out),)
    return out


def _detect(func, period):
    rng = np.random.default_rng(0)
    xs = rng.uniform(-np.pi, np.pi, 5)
    xis = rng.uniform(-10, 10, 5)
    X, XI = np.meshgrid(xs, xis, indexing="ij")
    vals = np.asarray(func(X, XI)) * np.ones(X.shape)
    real = bool(np.all(np.abs(np.imag(vals)) == 0))
    if period == "auto":
        dep = not np.allclose(vals, vals[:1, :], rtol=0, atol=0)
        period = TWO_PI if dep else None
    jet_ok = False
    try:
        out = func(X[:, :1], Jet.variable(XI[:1, :], 2))
        jet_ok = isinstance(out, Jet) and np.all(np.isfinite(out.c))
    except Exception:
        jet_ok = False
    return real, period, jet_ok


def make_symbol(order, eval, deriv=None, homog_terms=None, *, name="", period="auto",
                real=None, x_points=64) -> Symbol:
    """Build a symbol from ``eval(x, xi)``.

    When ``eval`` works on :class:`~psido.jets.Jet` frequencies (write it with
    the functions of :mod:`psido.jets`) derivatives are exact; otherwise they
    come from ``deriv(alpha, beta)`` or finite differences.  ``homog_terms``
    is a list of ``(degree, evaluable)`` pairs; evaluables may be symbols or
    plain callables.
    """
    detected_real, period, jet_ok = _detect(eval, period)
    real = detected_real if real is None else real
    homog = []
    for deg, h in homog_terms or ():
        if not isinstance(h, Symbol):
            h = make_symbol(deg, h, period=period, name=f"{name}_h{deg}")
        homog.append((deg, h))
    kw = dict(name=name, homog_terms=homog, real=real, period=period, x_points=x_points)
    if deriv is None and jet_ok:
        return ExprSymbol(order, eval, **kw)
    return OpaqueSymbol(order, eval, deriv=deriv, **kw)


def expr_symbol(order, expr, *, name="", homog_terms=(), real=True, period=TWO_PI, x_points=64):
    """Direct constructor for jet-aware expressions (no probing)."""
    return ExprSymbol(order, expr, name=name, homog_terms=homog_terms, real=real,
                      period=period, x_points=x_points)


# -- sampling regions and seminorms --------------------------------------------

@dataclass(frozen=True)
class Region:
    x_range: tuple = (-DEFAULT_L / 2, DEFAULT_L / 2)
    xi_range: tuple = (-16.0, 16.0)
    nx: int = 128
    nxi: int = 513

    def xs(self):
        lo, hi = self.x_range
        return lo + (hi - lo) * np.arange(self.nx) / self.nx

    def xis(self):
        return np.linspace(self.xi_range[0], self.xi_range[1], self.nxi)

    def scaled(self, factor):
        """Same sample spacing in xi, range multiplied by ``factor``."""
        lo, hi = self.xi_range
        n = int(round((self.nxi - 1) * factor)) + 1
        return Region(self.x_range, (lo * factor, hi * factor), self.nx, n)


DEFAULT_REGION = Region()


@dataclass
class SeminormReport:
    entries: dict
    region: Region
    fd_step: float = 0.0
    order: float = 0.0

    def __getitem__(self, key):
        return self.entries[key]

    def max(self):
        return max(self.entries.values()) if self.entries else 0.0


def estimate_seminorms(a: Symbol, max_order=(3, 3), region: Region = None, order=None) -> SeminormReport:
    """``sup |d_x^alpha d_xi^beta a| <xi>^{beta - m}`` over the sampled region.

    ``order`` overrides the declared order ``m`` used in the weight.
    """
    region = region or DEFAULT_REGION
    xs, xis = region.xs(), region.xis()
    m = a.m if order is None else float(np.real(order))
    amax, bmax = max_order
    bracket = japanese(xis)
    entries = {}
    for alpha in range(amax + 1):
        T = a.taylor(xs, xis, bmax, dx=alpha)
        if not np.all(np.isfinite(T)):
            raise NonFiniteValue(f"{a.name}: non-finite values on region")
        for beta in range(bmax + 1):
            d = math.factorial(beta) * np.abs(T[beta])
            entries[(alpha, beta)] = float(np.max(d * bracket[None, :] ** (beta - m)))
    return SeminormReport(entries, region, a.fd_step, m)


def is_elliptic(a: Symbol, mu: float, region: Region = None) -> bool:
    """``|a| >= mu^{-1} <xi>^m`` at every sample with ``|xi| >= mu``."""
    if mu <= 0:
        raise ValueError("ellipticity parameter must be positive")
    region = region or DEFAULT_REGION
    xis = region.xis()
    xis = xis[np.abs(xis) >= mu]
    if xis.size == 0:
        return True
    vals = np.abs(a(region.xs(), xis))
    return bool(np.all(vals >= japanese(xis)[None, :] ** a.m / mu))


# -- scalar functions and composition -------------------------------------------

@dataclass(frozen=True)
class ScalarFunction:
    """Smooth scalar function of symbol order ``order`` on ``domain``.

    ``derivs(t, n)`` returns ``[f(t), f'(t), ..., f^{(n)}(t)]``.  ``domain`` is
    ``None`` for the complex plane, or ``(lo, hi)`` for a real interval.
    """

    order: float
    derivs: Callable
    domain: Optional[tuple] = None
    name: str = "f"

    def check_domain(self, values):
        if self.domain is None:
            return
        lo, hi = self.domain
        v = np.asarray(values)
        if np.iscomplexobj(v) and np.any(np.abs(v.imag) > 1e-12 * (1 + np.abs(v.real))):
            raise DomainViolation(f"{self.name}: complex values on real domain")
        v = np.real(v)
        if np.any(v < lo) or np.any(v > hi):
            raise DomainViolation(f"{self.name}: values leave [{lo}, {hi}]")


def identity_fn():
    def derivs(t, n):
        out = [t, np.ones_like(t)] + [np.zeros_like(t)] * max(n - 1, 0)
        return out[:n + 1]
    return ScalarFunction(1.0, derivs, None, "id")


def reciprocal_fn(eps=1e-12):
    def derivs(t, n):
        return [(-1) ** k * math.factorial(k) * t ** (-k - 1.0) for k in range(n + 1)]
    return ScalarFunction(-1.0, derivs, (eps, np.inf), "inv")


def log_fn(lower=1.0, order=0.0):
    """``log t`` on ``[lower, inf)``; lies in every positive order."""
    def derivs(t, n):
        return [np.log(t)] + [(-1) ** (k - 1) * math.factorial(k - 1) * t ** (-float(k))
                              for k in range(1, n + 1)]
    return ScalarFunction(order, derivs, (lower, np.inf), "log")


def power_fn(p, lower=1e-12):
    def derivs(t, n):
        out = []
        coef = 1.0 + 0j if np.iscomplexobj(p) else 1.0
        for k in range(n + 1):
            out.append(coef * np.asarray(t, dtype=complex if np.iscomplexobj(p) else float) ** (p - k))
            coef = coef * (p - k)
        return out
    return ScalarFunction(float(np.real(p)), derivs, (lower, np.inf), f"pow{p}")


def compose_scalar(f: ScalarFunction, a: Symbol, mu: float = 1.0, region: Region = None) -> Symbol:
    """``f o a`` with declared order ``m * k``."""
    if f.order < 0 and not is_elliptic(a, mu, region):
        raise NotElliptic(f"{a.name} is not elliptic with parameter {mu}")

    def fn(A):
        f.check_domain(A.value)
        return A.apply(f.derivs(A.value, A.order))

    return PointwiseSymbol(a.m * f.order, fn, (a,), name=f"{f.name}({a.name})",
                           real=a.real and f.domain is not None)


def reciprocal_symbol(a: Symbol) -> Symbol:
    """Pointwise ``1 / a``; no ellipticity check (callers guard)."""
    order = -a.order if not isinstance(a.order, float) else np.inf
    out = PointwiseSymbol(order, lambda u: 1.0 / u, (a,), name=f"1/{a.name}", real=a.real)
    return _set_homog(out, a, reciprocal_symbol, lambda d: -d)


# -- reference symbols ---------------------------------------------------------

def bracket_symbol(power=1.0):
    """``<xi>^power`` (x-independent)."""
    p = power
    homog = [(p, expr_symbol(p, lambda x, xi: jets.power(jets.absolute(xi), p), period=None,
                             name=f"|xi|^{p}"))]
    return expr_symbol(p, lambda x, xi: jets.power(jets.bracket(xi), p), period=None,
                       name=f"<xi>^{p}", homog_terms=homog)


def cutoff_symbol(scale=1.0):
    """``chi(xi / scale)``: 0 for ``|xi| <= scale``, 1 for ``|xi| >= 2 scale``."""
    t = float(scale)
    return expr_symbol(0, lambda x, xi: jets.cutoff(xi / t), period=None, name=f"chi(xi/{t:g})",
                       homog_terms=[(0, constant_symbol(1.0))])


def r_symbol():
    """Smooth ``r >= 1`` with ``r(xi) = |xi|`` for ``|xi| >= 2``."""

    def expr(x, xi):
        chi = jets.cutoff(xi)
        return chi * jets.absolute(xi) + (1.0 - chi)

    lead = expr_symbol(1, lambda x, xi: jets.absolute(xi), period=None, name="|xi|")
    return expr_symbol(1, expr, period=None, name="r", homog_terms=[(1, lead)])


def power_family(a: Symbol, z) -> Symbol:
    """Pointwise ``a^z`` for a positive symbol, order ``m z``."""
    z = complex(z)

    def fn(A):
        v = np.asarray(A.value)
        if np.any(np.abs(np.imag(v)) > 1e-12 * (1 + np.abs(v))) or np.any(np.real(v) <= 0):
            raise DomainViolation(f"{a.name} is not positive")
        return jets.power(A.real, z)

    zc = z.real if z.imag == 0 else z
    out = PointwiseSymbol(a.m * z, fn, (a,), name=f"{a.name}^{zc}", real=z.imag == 0)
    if a._fixed():
        return _set_homog(out, a, None, lambda d: d * z)
    out.homog_terms = tuple((d * z, power_family(h, z)) for d, h in a.homog_terms[:1])
    return out


def power_family_derivative(a: Symbol, z) -> Symbol:
    """``d/dz a^z = a^z log a``."""
    z = complex(z)
    return PointwiseSymbol(a.m * z, lambda A: jets.power(A.real, z) * jets.log(A.real), (a,),
                           name=f"d/dz {a.name}^z")


# -- asymptotic summation ---------------------------------------------------------

ASYM_START = 4.0
ASYM_CAP = 2.0 ** 20


def asymptotic_sum(terms: Sequence[Symbol], thresholds=None, region: Region = None) -> Symbol:
    """``sum_j chi(xi / t_j) a_j`` with thresholds grown until term ``j`` is ``<= 2^-j``.

    Smallness is measured in the seminorms one order above the term's own
    order, with derivatives up to order ``j`` (capped at 3).
    """
    terms = list(terms)
    if not terms:
        return constant_symbol(0.0)
    mu = terms[0].m
    for j, t in enumerate(terms):
        if not np.isinf(t.m) and not np.isclose(t.m, mu - j, atol=1e-9):
            raise OrderMismatch(f"term {j} has order {t.m}, expected {mu - j}")
    region = region or Region(xi_range=(-256.0, 256.0), nx=64, nxi=2049)
    thresholds = list(thresholds) if thresholds is not None else [ASYM_START] * len(terms)
    pieces, final = [], []
    prev = 0.0
    for j, a in enumerate(terms):
        t = max(float(thresholds[j]), prev)
        d = min(j, 3)
        while True:
            piece = cutoff_symbol(t) * a
            rep = estimate_seminorms(piece, (d, d), region, order=mu - j + 1)
            if rep.max() <= 2.0 ** (-j) or t >= ASYM_CAP:
                break
            t *= 2.0
        prev = t
        final.append(t)
        pieces.append(piece)
    homog = []
    if all(t.is_classical for t in terms):
        homog = [(t.homog_terms[0][0], t.homog_terms[0][1]) for t in terms]
    out = PointwiseSymbol(terms[0].order, lambda *us: sum(us[1:], us[0]), pieces,
                          name="asum(" + ",".join(t.name for t in terms) + ")",
                          homog_terms=homog, real=all(t.real for t in terms))
    out.thresholds = tuple(final)
    return out


# -- holomorphy ---------------------------------------------------------------------

HOLO_STEPS = (1e-2, 1e-3)
HOLO_DIRECTIONS = (1.0, 1j, np.exp(0.25j * np.pi))


def _numeric_derivative(family, z0, h=1e-3):
    return (8.0 * (family(z0 + h) - family(z0 - h)) - (family(z0 + 2 * h) - family(z0 - 2 * h))) \
        * (1.0 / (12.0 * h))


def holo_defects(family, z0, order_window=0.0, derivative=None, region=None,
                 max_order=(2, 2), steps=HOLO_STEPS, directions=HOLO_DIRECTIONS):
    """Raw difference-quotient defects ``p(Q(w) - f'(z0))`` keyed by ``|w|``."""
    z0 = complex(z0)
    f0 = family(z0)
    d0 = derivative(z0) if derivative is not None else _numeric_derivative(family, z0)
    order = f0.m + order_window
    out = {}
    for s in steps:
        worst = 0.0
        for u in directions:
            w = s * u
            q = (family(z0 + w) - f0) * (1.0 / w) - d0
            worst = max(worst, estimate_seminorms(q, max_order, region, order=order).max())
        out[s] = worst
    return out


def holo_derivative_check(family, z0, order_window=0.0, derivative=None, region=None,
                          max_order=(2, 2)) -> float:
    """``sup_w p(Q(w) - f'(z0)) / |w|``; finite certifies first-order holomorphy."""
    d = holo_defects(family, z0, order_window, derivative, region, max_order)
    return max(v / s for s, v in d.items())
