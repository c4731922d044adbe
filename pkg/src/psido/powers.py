"""Complex powers ``A^z`` of positive definite operators by three routes.

* spectral oracle: ``V diag(lambda^z) V^H``
* contour integral: trapezoid rule for ``(1/2 pi i) \\oint lambda^z (lambda - A)^{-1} dlambda``
  in the logarithmic variable ``lambda = e^u``
* ODE: classical RK4 for ``dY/ds = Y (z/n) log A`` on ``[0, 1]``, raised to the ``n``-th power

plus the symbolic family ``z -> q(s^z + a_2(z)) + R(z)`` and its checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from . import jets
from .calculus import _dxi
from .errors import ContourTouchesSpectrum, NotInvertible, NotPositiveDefinite
from .jets import Jet
from .quantize import GridContext, GridOperator, Provenance, quantize
from .sobolev import SobolevPack, build_pack, op_sobolev_norm
from .symbols import (
    PointwiseSymbol,
    Symbol,
    compose_scalar,
    log_fn,
    power_family,
    r_symbol,
    reciprocal_symbol,
)

CONTOUR_NODES = 64
SHIFT_THRESHOLD = -0.25
ODE_STEPS = 200


# -- spectral oracle -------------------------------------------------------------

@dataclass
class Spectral:
    """Eigendecomposition of a Hermitian positive definite operator."""

    w: np.ndarray
    V: np.ndarray
    grid: GridContext

    @classmethod
    def of(cls, A: GridOperator, delta=0.0):
        M = A.matrix
        if np.linalg.norm(M - M.conj().T) > 1e-10 * np.linalg.norm(M):
            raise NotPositiveDefinite("operator is not Hermitian")
        w, V = np.linalg.eigh(0.5 * (M + M.conj().T))
        if w[0] <= delta:
            raise NotPositiveDefinite(f"smallest eigenvalue {w[0]:.3g} <= {delta}")
        return cls(w, V, A.grid)

    def apply(self, f):
        return (self.V * f(self.w)) @ self.V.conj().T

    def power(self, z):
        z = complex(z)
        return self.apply(lambda w: np.exp(z * np.log(w)))

    def log(self):
        return self.apply(np.log)


def _spectral(A):
    return A if isinstance(A, Spectral) else Spectral.of(A)


def oracle_power(A, z) -> GridOperator:
    """``A^z`` on the principal branch through the spectral theorem."""
    sp = _spectral(A)
    return GridOperator(sp.power(z), sp.grid, 0.0, Provenance("derived", f"oracle^{z}"))


# -- contour route ----------------------------------------------------------------

def spectral_bounds(M, tol=1e-10):
    """Extreme eigenvalues of a Hermitian matrix by Lanczos (dense fallback)."""
    n = M.shape[0]
    if n <= 64:
        w = np.linalg.eigvalsh(M)
        return float(w[0]), float(w[-1])
    try:
        lo = eigsh(M, k=1, which="SA", tol=tol, return_eigenvectors=False)[0]
        hi = eigsh(M, k=1, which="LA", tol=tol, return_eigenvectors=False)[0]
    except ArpackNoConvergence:
        w = np.linalg.eigvalsh(M)
        lo, hi = w[0], w[-1]
    return float(lo), float(hi)


@dataclass(frozen=True)
class LogContour:
    """Ellipse in ``u = log(lambda)`` with foci ``a < b`` and parameter ``rho``."""

    a: float
    b: float
    rho: float

    @classmethod
    def around(cls, lo, hi, margin=0.1):
        if not lo > 0:
            raise ContourTouchesSpectrum(f"spectrum reaches {lo:.3g} <= 0")
        a, b = math.log(lo) - margin, math.log(hi) + margin
        h = 0.5 * (b - a)
        # nearest excluded singularities are log(lambda) +- 2 pi i; balance
        # inner and outer convergence rates
        rho_out = math.asinh(2 * np.pi / h)
        return cls(a, b, 0.5 * rho_out)

    def nodes(self, n):
        c, h = 0.5 * (self.a + self.b), 0.5 * (self.b - self.a)
        th = 2 * np.pi * np.arange(n) / n
        u = c + h * (np.cosh(self.rho) * np.cos(th) + 1j * np.sinh(self.rho) * np.sin(th))
        du = h * (-np.cosh(self.rho) * np.sin(th) + 1j * np.sinh(self.rho) * np.cos(th))
        return u, du * (2 * np.pi / n)


def _shift(z):
    z = complex(z)
    k = 0
    while (z - k).real > SHIFT_THRESHOLD:
        k += 1
    return z - k, k


def contour_power(A: GridOperator, z, nodes=CONTOUR_NODES, bounds=None) -> GridOperator:
    """``A^z`` from the trapezoid rule on a contour enclosing the spectrum.

    ``z`` is first reduced to ``Re z <= -1/4`` by an integer shift ``k`` and
    ``A^z = A^k A^{z-k}``.
    """
    M = A.matrix
    lo, hi = bounds if bounds is not None else spectral_bounds(M)
    if not lo > 0:
        raise ContourTouchesSpectrum(f"spectrum reaches {lo:.3g} <= 0")
    w, k = _shift(z)
    contour = LogContour.around(lo, hi)
    us, dus = contour.nodes(nodes)
    I = np.eye(A.N)
    out = np.zeros_like(M)
    for u, du in zip(us, dus):
        lam = np.exp(u)
        # lambda^w (lambda - A)^{-1} dlambda / (2 pi i),  dlambda = lambda du
        out += (np.exp(w * u) * lam * du / (2j * np.pi)) * np.linalg.solve(lam * I - M, I)
    for _ in range(k):
        out = M @ out
    return GridOperator(out, A.grid, 0.0, Provenance("derived", f"contour^{z}"))


# -- generator and ODE route ------------------------------------------------------------

@dataclass
class GeneratorReport:
    P: GridOperator
    defect_norm: float
    s: float
    s_target: float


def generator(A: GridOperator, s_full: Symbol = None, pack: SobolevPack = None, s=0.0,
              eps=0.1) -> GeneratorReport:
    """``P = log A`` and, when ``s_full`` is given, ``||P - q(log s_full)||_{H^s -> H^{s - eps}}``."""
    sp = _spectral(A)
    P = GridOperator(sp.log(), sp.grid, 0.0, Provenance("derived", "log"))
    defect = np.nan
    if s_full is not None:
        lower = float(np.min(np.real(s_full(sp.grid.x, sp.grid.xi))))
        logs = compose_scalar(log_fn(lower=min(lower, 1.0) * 0.5, order=eps), s_full)
        pack = pack or build_pack(sp.grid, ())
        defect = op_sobolev_norm(pack, P.matrix - quantize(logs, sp.grid).matrix, s, s - eps)
    return GeneratorReport(P, defect, s, s - eps)


def _rk4_step_matrix(B, h):
    """One classical RK4 step for ``Y' = Y B``: ``Y_{n+1} = Y_n S``."""
    I = np.eye(B.shape[0])
    hB = h * B
    return I + hB @ (I + hB @ (I + hB @ (I + hB / 4) / 3) / 2)


def ode_power(A, z, steps=ODE_STEPS, P=None, path="straight") -> GridOperator:
    """Integrate ``dA_s/ds = A_s (z/n) P`` over ``[0, 1]`` with RK4, then raise to ``n``.

    ``n = max(1, ceil(|z|))`` keeps each segment of length at most 1.
    ``path="L"`` integrates along ``0 -> Re z -> z`` instead of the segment.
    """
    grid = A.grid if isinstance(A, GridOperator) else A.grid
    if P is None:
        P = _spectral(A).log()
    elif isinstance(P, GridOperator):
        P = P.matrix
    z = complex(z)
    n = max(1, math.ceil(abs(z)))

    def run(zz):
        S = _rk4_step_matrix((zz / n) * P, 1.0 / steps)
        return np.linalg.matrix_power(S, steps)

    if path == "straight":
        Y = run(z)
    elif path == "L":
        Y = run(z.real) @ run(1j * z.imag)
    else:
        raise ValueError(f"unknown path {path!r}")
    Y = np.linalg.matrix_power(Y, n)
    return GridOperator(Y, grid, 0.0, Provenance("derived", f"ode^{z}"))


# -- symbolic family ----------------------------------------------------------------

def _binom(z, n):
    out = 1.0 + 0j
    for i in range(n):
        out *= (z - i) / (i + 1)
    return out


class PowerCorrection(Symbol):
    """Second-order Weyl term of the symbol of ``q(s)^z``.

    Integrating the second-order resolvent parametrix term against
    ``lambda^z`` gives

        a_2 = (1/8) [2 Q3 C(z,3) s^{z-3} + Q2 C(z,2) s^{z-2}]

    with ``Q3 = -s_xixi s_x^2 + 2 s_xxi s_x s_xi - s_xx s_xi^2`` and
    ``Q2 = 2 (s_xxi^2 - s_xixi s_xx)``.
    """

    direct = False

    def __init__(self, s: Symbol, z):
        z = complex(z)
        super().__init__(s.m * z - 2, name=f"a2({s.name},{z})", period=s.period,
                         x_points=s.x_points)
        self.s, self.z = s, z

    def _table(self, x, xi, K):
        s, z = self.s, self.z
        t0 = s.taylor(x, xi, K + 2)
        t1 = s.taylor(x, xi, K + 1, dx=1)
        t2 = s.taylor(x, xi, K, dx=2)
        S0 = Jet(t0[:K + 1])
        sxi, sxixi = Jet(_dxi(t0, 1)[:K + 1]), Jet(_dxi(t0, 2))
        sx, sxxi = Jet(t1[:K + 1]), Jet(_dxi(t1, 1))
        sxx = Jet(t2)
        Q3 = -1.0 * sxixi * sx * sx + 2.0 * sxxi * sx * sxi - sxx * sxi * sxi
        Q2 = 2.0 * (sxxi * sxxi - sxixi * sxx)
        out = (2.0 * _binom(z, 3)) * Q3 * jets.power(S0, z - 3) \
            + _binom(z, 2) * Q2 * jets.power(S0, z - 2)
        return (out * 0.125).c


@dataclass
class HoloFamily:
    """``z -> q(r^{m z} b(z)) + R(z)`` on a disc ``|z - center| <= radius``."""

    m: float
    d: float
    b: Callable
    R: Optional[Callable] = None
    grid: Optional[GridContext] = None
    center: complex = 0.0
    radius: float = np.inf
    full_symbol: Optional[Callable] = None
    exact: Optional[Callable] = None

    def symbol(self, z) -> Symbol:
        if self.full_symbol is not None:
            return self.full_symbol(z)
        if self.m == 0:
            return self.b(z)
        return power_family(r_symbol(), self.m * z) * self.b(z)

    def quantized(self, z) -> GridOperator:
        return quantize(self.symbol(z), self.grid)

    def remainder(self, z) -> GridOperator:
        if self.R is not None:
            return self.R(z)
        if self.exact is not None:
            return self.exact(z) - self.quantized(z)
        return GridOperator(np.zeros((self.grid.N,) * 2), self.grid, -np.inf)

    def __call__(self, z) -> GridOperator:
        if self.exact is not None:
            return self.exact(z)
        return self.quantized(z) + self.remainder(z)

    def contains(self, z):
        return abs(complex(z) - self.center) <= self.radius + 1e-12


def symbolic_symbol(s_full: Symbol, z, k=2) -> Symbol:
    """``s^z`` plus the Weyl corrections up to Moyal order ``k`` (odd orders vanish)."""
    if k > 3:
        raise NotImplementedError("corrections implemented through Moyal order 3")
    lead = power_family(s_full, z)
    if k < 2 or s_full.period is None:
        return lead
    corr = PowerCorrection(s_full, z)
    out = PointwiseSymbol(lead.order, lambda a, b: a + b, (lead, corr),
                          name=f"{s_full.name}^{complex(z)}+a2", homog_terms=lead.homog_terms)
    return out


def symbolic_power(s_full: Symbol, z=None, k=2, grid: GridContext = None, A: GridOperator = None):
    """Holomorphic family with leading symbol ``(s r^{-m})^z r^{m z} = s^z``.

    The remainder ``R(z)`` is the oracle power of ``A`` (default ``q(s_full)``)
    minus the quantized symbolic part.  With ``z`` given, returns the
    family's symbol at that point instead.
    """
    if z is not None:
        return symbolic_symbol(s_full, z, k)
    grid = grid or GridContext()
    A = A if A is not None else quantize(s_full, grid)
    sp = Spectral.of(A)
    m = s_full.m
    r = r_symbol()

    def b(zz):
        return symbolic_symbol(s_full, zz, k) * power_family(r, -m * zz)

    fam = HoloFamily(m, 0.0, b, grid=grid,
                     full_symbol=lambda zz: symbolic_symbol(s_full, zz, k),
                     exact=lambda zz: oracle_power(sp, zz))
    fam.R = lambda zz: oracle_power(sp, zz) - fam.quantized(zz)
    fam.spectral = sp
    return fam


def inverse_family(F: HoloFamily, samples=8, cond_limit=1e10) -> HoloFamily:
    """``z -> F(z)^{-1}`` on the disc of half the radius.

    Symbol part: pointwise reciprocal of ``F``'s symbol; remainder: exact
    inverse minus its quantization.
    """
    F0 = F(0.0)
    if np.linalg.norm(F0.matrix - np.eye(F0.N), 2) > 1e-10:
        raise ValueError("F(0) is not the identity")
    radius = F.radius / 2 if np.isfinite(F.radius) else 1.0
    for t in range(samples):
        z = F.center + radius * np.exp(2j * np.pi * t / samples)
        cond = np.linalg.cond(F(z).matrix)
        if not np.isfinite(cond) or cond > cond_limit:
            raise NotInvertible(f"condition number {cond:.3g} at z={z:.3g}")

    def exact(z):
        Fz = F(z)
        return GridOperator(np.linalg.inv(Fz.matrix), Fz.grid, -Fz.order,
                            Provenance("derived", "inverse"))

    def sym(z):
        return reciprocal_symbol(F.symbol(z))

    G = HoloFamily(-F.m, -F.d, lambda z: sym(z), grid=F.grid, center=F.center, radius=radius,
                   full_symbol=sym, exact=exact)
    G.R = lambda z: exact(z) - quantize(sym(z), F.grid)
    return G


@dataclass
class ContinuityScan:
    z: np.ndarray
    norms: np.ndarray
    max_norm: float
    modulus: float


def norm_continuity_scan(F, re_values=None, im_values=None) -> ContinuityScan:
    """``||F(z)||`` on a grid in ``Re(m z) <= 0`` with a modulus-of-continuity estimate."""
    re_values = np.linspace(-1.0, 0.0, 5) if re_values is None else np.asarray(re_values)
    im_values = np.linspace(-1.0, 1.0, 5) if im_values is None else np.asarray(im_values)
    Z = re_values[:, None] + 1j * im_values[None, :]
    m = getattr(F, "m", 1.0)
    norms = np.full(Z.shape, np.nan)
    for idx, z in np.ndenumerate(Z):
        if (m * z).real <= 1e-12:
            norms[idx] = F(z).norm()
    mod = 0.0
    for axis in (0, 1):
        dn = np.abs(np.diff(norms, axis=axis))
        dz = np.abs(np.diff(Z, axis=axis))
        ratio = dn / dz
        if np.any(np.isfinite(ratio)):
            mod = max(mod, float(np.nanmax(ratio)))
    return ContinuityScan(Z, norms, float(np.nanmax(norms)), mod)


# -- reports -------------------------------------------------------------------------

@dataclass
class PowerReport:
    z: complex
    oracle: GridOperator
    contour: GridOperator
    ode: GridOperator
    symbolic: Optional[GridOperator]
    discrepancies: dict = field(default_factory=dict)


def _rel(a, b):
    return float(np.linalg.norm(a - b, 2) / np.linalg.norm(b, 2))


def power_report(A: GridOperator, z, s_full: Symbol = None, k=2, steps=ODE_STEPS,
                 nodes=CONTOUR_NODES, spectral: Spectral = None) -> PowerReport:
    """All routes at one ``z`` with relative l2 discrepancies against the oracle."""
    sp = spectral or Spectral.of(A)
    orc = oracle_power(sp, z)
    con = contour_power(A, z, nodes, bounds=(sp.w[0], sp.w[-1]))
    P = sp.log()
    ode = ode_power(A, z, steps, P=P)
    sym = quantize(symbolic_symbol(s_full, z, k), A.grid) if s_full is not None else None
    disc = {"contour": _rel(con.matrix, orc.matrix), "ode": _rel(ode.matrix, orc.matrix)}
    if sym is not None:
        disc["symbolic"] = _rel(sym.matrix, orc.matrix)
    return PowerReport(complex(z), orc, con, ode, sym, disc)


def cauchy_riemann_defect(F, z, u, h):
    """``|| d_x F(z) u - d_y F(z) u / i ||`` by forward differences of step ``h``."""
    z = complex(z)
    f0 = F(z) @ u
    dx = (F(z + h) @ u - f0) / h
    dy = (F(z + 1j * h) @ u - f0) / (1j * h)
    return float(np.linalg.norm(dx - dy) / max(np.linalg.norm(f0), 1e-300))


def positivity_shift(A: GridOperator, eps) -> tuple:
    """``A + mu I`` with ``mu = max(0, eps - lambda_min + 1e-6)``."""
    lo, _ = spectral_bounds(A.matrix)
    mu = max(0.0, eps - lo + 1e-6)
    if mu == 0:
        return A, 0.0
    return A + mu, mu
