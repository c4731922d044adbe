"""Truncated Taylor arithmetic in the frequency variable.

A :class:`Jet` stores ``c[n] = f^{(n)}(xi) / n!`` along axis 0 for
``n = 0..K``; the remaining axes carry the sample points.  Symbols are
written once as functions of ``(x, xi)`` and evaluated either on plain
arrays or on jets, which gives exact frequency derivatives to any order.

The module-level functions (:func:`sqrt`, :func:`exp`, ...) dispatch on
their argument so the same expression works for both.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "Jet",
    "absolute",
    "arctan",
    "bracket",
    "conj",
    "cos",
    "cutoff",
    "exp",
    "log",
    "power",
    "real_part",
    "sin",
    "smooth_step",
    "sqrt",
    "tanh",
    "value",
    "where",
]


class Jet:
    """Univariate truncated Taylor series with array-valued coefficients."""

    __array_priority__ = 1000

    def __init__(self, coeffs):
        self.c = np.asarray(coeffs)

    @classmethod
    def variable(cls, xi, order):
        xi = np.asarray(xi, dtype=float)
        c = np.zeros((order + 1,) + xi.shape)
        c[0] = xi
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def constant(cls, v, order, shape=()):
        v = np.asarray(v)
        shape = np.broadcast_shapes(v.shape, shape)
        c = np.zeros((order + 1,) + shape, dtype=np.result_type(v, float))
        c[0] = v
        return cls(c)

    @property
    def order(self):
        return self.c.shape[0] - 1

    @property
    def value(self):
        return self.c[0]

    def derivative(self, n):
        """Value of the n-th derivative, ``n! c[n]``."""
        return math.factorial(n) * self.c[n]

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.c + other.c)
        other = np.asarray(other)
        shape = np.broadcast_shapes(self.c.shape[1:], other.shape)
        c = np.zeros(self.c.shape[:1] + shape, dtype=np.result_type(self.c, other))
        c[:] = self.c
        c[0] += other
        return Jet(c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c * np.asarray(other)[None])
        a, b = self.c, other.c
        K = min(a.shape[0], b.shape[0]) - 1
        shape = np.broadcast_shapes(a.shape[1:], b.shape[1:])
        out = np.zeros((K + 1,) + shape, dtype=np.result_type(a, b))
        for n in range(K + 1):
            for i in range(n + 1):
                out[n] += a[i] * b[n - i]
        return Jet(out)

    __rmul__ = __mul__

    def reciprocal(self):
        u = self.c
        K = u.shape[0] - 1
        w = np.zeros_like(u, dtype=np.result_type(u, float))
        inv0 = 1.0 / u[0]
        w[0] = inv0
        for n in range(1, K + 1):
            acc = np.zeros_like(w[0])
            for i in range(1, n + 1):
                acc = acc + u[i] * w[n - i]
            w[n] = -inv0 * acc
        return Jet(w)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return Jet(self.c / np.asarray(other)[None])

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, (int, np.integer)) and p >= 0:
            out = Jet.constant(1.0, self.order, self.c.shape[1:])
            base = self
            while p:
                if p & 1:
                    out = out * base
                p >>= 1
                if p:
                    base = base * base
            return out
        return power(self, p)

    def conj(self):
        return Jet(np.conj(self.c))

    @property
    def real(self):
        return Jet(np.real(self.c))

    def apply(self, derivs):
        """Compose with a scalar function given its derivatives at ``value``.

        ``derivs[n]`` is ``f^{(n)}(self.value)`` for ``n = 0..K``.
        """
        K = self.order
        h = Jet(self.c.copy())
        h.c[0] = 0.0
        out = Jet.constant(derivs[K] / math.factorial(K), K, self.c.shape[1:])
        for n in range(K - 1, -1, -1):
            out = out * h + derivs[n] / math.factorial(n)
        return out


# -- dispatching elementary functions ---------------------------------------

def value(u):
    return u.value if isinstance(u, Jet) else u


def power(u, p):
    """``u ** p`` on the principal branch; requires ``u != 0`` for jets."""
    if not isinstance(u, Jet):
        u = np.asarray(u)
        if np.iscomplexobj(p) or np.iscomplexobj(u):
            return np.asarray(u, dtype=complex) ** p
        return u ** p
    c = u.c
    K = c.shape[0] - 1
    dtype = np.result_type(c, np.asarray(p), float)
    w = np.zeros(c.shape, dtype=dtype)
    u0 = c[0].astype(dtype)
    w[0] = u0 ** p
    for n in range(1, K + 1):
        acc = np.zeros_like(w[0])
        for i in range(1, n + 1):
            acc = acc + (p * i - (n - i)) * c[i] * w[n - i]
        w[n] = acc / (n * u0)
    return Jet(w)


def sqrt(u):
    if isinstance(u, Jet):
        return power(u, 0.5)
    return np.sqrt(u)


def exp(u):
    if not isinstance(u, Jet):
        return np.exp(u)
    c = u.c
    K = c.shape[0] - 1
    w = np.zeros_like(c, dtype=np.result_type(c, float))
    w[0] = np.exp(c[0])
    for n in range(1, K + 1):
        acc = np.zeros_like(w[0])
        for i in range(1, n + 1):
            acc = acc + i * c[i] * w[n - i]
        w[n] = acc / n
    return Jet(w)


def log(u):
    if not isinstance(u, Jet):
        u = np.asarray(u)
        return np.log(u.astype(complex)) if np.iscomplexobj(u) else np.log(u)
    c = u.c
    K = c.shape[0] - 1
    w = np.zeros_like(c, dtype=np.result_type(c, float))
    w[0] = np.log(c[0])
    for n in range(1, K + 1):
        acc = np.zeros_like(w[0])
        for i in range(1, n):
            acc = acc + i * w[i] * c[n - i]
        w[n] = (c[n] - acc / n) / c[0]
    return Jet(w)


def _sincos(u):
    c = u.c
    K = c.shape[0] - 1
    dtype = np.result_type(c, float)
    s = np.zeros_like(c, dtype=dtype)
    co = np.zeros_like(c, dtype=dtype)
    s[0] = np.sin(c[0])
    co[0] = np.cos(c[0])
    for n in range(1, K + 1):
        acc_s = np.zeros_like(s[0])
        acc_c = np.zeros_like(s[0])
        for i in range(1, n + 1):
            acc_s = acc_s + i * c[i] * co[n - i]
            acc_c = acc_c - i * c[i] * s[n - i]
        s[n] = acc_s / n
        co[n] = acc_c / n
    return Jet(s), Jet(co)


def sin(u):
    return _sincos(u)[0] if isinstance(u, Jet) else np.sin(u)


def cos(u):
    return _sincos(u)[1] if isinstance(u, Jet) else np.cos(u)


def _integrate(u0_value, dw):
    """Jet whose derivative is ``dw`` (one order lower) and value ``u0_value``."""
    K = dw.c.shape[0]
    w = np.zeros((K + 1,) + dw.c.shape[1:], dtype=dw.c.dtype)
    w[0] = u0_value
    for n in range(1, K + 1):
        w[n] = dw.c[n - 1] / n
    return Jet(w)


def _shift_down(u):
    """Taylor series of ``u'`` truncated one order lower."""
    c = u.c
    K = c.shape[0] - 1
    d = np.array([(n + 1) * c[n + 1] for n in range(K)]) if K > 0 else np.zeros((0,) + c.shape[1:])
    return Jet(d)


def arctan(u):
    if not isinstance(u, Jet):
        return np.arctan(u)
    if u.order == 0:
        return Jet(np.arctan(u.c))
    low = Jet(u.c[:-1])
    du = _shift_down(u)
    return _integrate(np.arctan(u.c[0]), du / (1.0 + low * low))


def tanh(u):
    if not isinstance(u, Jet):
        return np.tanh(u)
    e = exp(2.0 * u)
    return (e - 1.0) / (e + 1.0)


def absolute(u):
    """``|u|``; for jets valid only away from ``u = 0``."""
    if not isinstance(u, Jet):
        return np.abs(u)
    return u * np.sign(u.c[0])


def conj(u):
    return u.conj() if isinstance(u, Jet) else np.conj(u)


def real_part(u):
    return u.real if isinstance(u, Jet) else np.real(u)


def where(cond, a, b):
    if not isinstance(a, Jet) and not isinstance(b, Jet):
        return np.where(cond, a, b)
    ref = a if isinstance(a, Jet) else b
    K, shape = ref.order, ref.c.shape[1:]
    a = a if isinstance(a, Jet) else Jet.constant(a, K, shape)
    b = b if isinstance(b, Jet) else Jet.constant(b, K, shape)
    return Jet(np.where(np.asarray(cond)[None], a.c, b.c))


def bracket(u):
    """Japanese bracket ``(1 + u^2)^{1/2}``."""
    return sqrt(1.0 + u * u)


# exp(-1/t) underflows to exactly zero long before this; derivatives up to
# order ~12 are below 1e-19 here as well.
_MOLLIFIER_FLOOR = 1e-2


def _mollifier(t):
    t0 = value(t)
    live = np.asarray(t0) > _MOLLIFIER_FLOOR
    safe = where(live, t, 1.0)
    return where(live, exp(-1.0 / safe), 0.0)


def smooth_step(t):
    """C-infinity step: 0 for ``t <= 0``, 1 for ``t >= 1``."""
    a = _mollifier(t)
    b = _mollifier(1.0 - t)
    # exact 1 where b vanishes (a / a is not exactly 1 in floating point)
    return where(np.asarray(value(b)) == 0, 1.0, a / (a + b))


def cutoff(xi):
    """Excision function: 0 on ``[-1, 1]``, 1 outside ``[-2, 2]``."""
    xi0 = np.asarray(value(xi))
    outside = np.abs(xi0) > 1.0
    # |xi| is only needed where the step can be nonzero
    safe = where(outside, xi, 2.0)
    return where(outside, smooth_step(absolute(safe) - 1.0), 0.0)
