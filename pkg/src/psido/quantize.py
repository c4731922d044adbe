"""Periodic-grid quantization, symbol extraction and the smoothing ideal.

The grid has ``N`` points on a period ``L``::

    x_j  = -L/2 + j L / N,        j = 0..N-1
    xi_k = 2 pi k / L,            k = -N/2..N/2-1

Weyl quantization evaluates the symbol at the midpoints ``(x_j + x_l)/2``;
Kohn-Nirenberg (``"kn"``) at the left point ``x_j``.  Both are assembled
with one FFT over the frequency axis and an index gather.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from .errors import ConventionMismatch, DomainViolation
from .symbols import DEFAULT_L, Symbol, japanese

CONVENTIONS = ("weyl", "kn")
_CONV_CODE = {"weyl": 0, "kn": 1}
_CONV_NAME = {0: "weyl", 1: "kn", 2: "other"}
MAGIC = b"PSIDOP1\0"
# relative size of odd plane-wave offsets treated as roundoff
ODD_TOL = 1e-10


def _norm_conv(convention):
    c = {"kohn_nirenberg": "kn", "kohn-nirenberg": "kn"}.get(convention, convention)
    if c not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    return c


@dataclass(frozen=True)
class GridContext:
    """Uniform periodic grid with ``N`` points on a period ``L``."""

    N: int = 256
    L: float = DEFAULT_L

    def __post_init__(self):
        if self.N < 16 or self.N % 2:
            raise ValueError("N must be even and at least 16")
        if not self.L > 0:
            raise ValueError("L must be positive")

    @property
    def h(self):
        return self.L / self.N

    @property
    def Xi(self):
        """Nyquist frequency ``pi N / L``."""
        return np.pi * self.N / self.L

    @cached_property
    def x(self):
        return -self.L / 2 + self.h * np.arange(self.N)

    @cached_property
    def xi(self):
        return 2 * np.pi * np.arange(-self.N // 2, self.N // 2) / self.L

    @cached_property
    def _sign(self):
        # e^{-i xi_k x_0} = (-1)^k
        return (-1.0) ** np.arange(-self.N // 2, self.N // 2)

    @cached_property
    def U(self):
        """Unitary ``U[j, k] = exp(i xi_k x_j) / sqrt(N)``."""
        return np.exp(1j * np.outer(self.x, self.xi)) / np.sqrt(self.N)

    def to_freq(self, v, axis=0):
        """``U^H v`` along ``axis`` via FFT."""
        v = np.moveaxis(np.asarray(v), axis, 0)
        out = np.fft.fftshift(np.fft.fft(v, axis=0), axes=0) / np.sqrt(self.N)
        out = out * self._sign.reshape((-1,) + (1,) * (out.ndim - 1))
        return np.moveaxis(out, 0, axis)

    def from_freq(self, c, axis=0):
        """``U c`` along ``axis``; inverse of :meth:`to_freq`."""
        c = np.moveaxis(np.asarray(c), axis, 0)
        c = c * self._sign.reshape((-1,) + (1,) * (c.ndim - 1))
        out = np.fft.ifft(np.fft.ifftshift(c, axes=0), axis=0) * np.sqrt(self.N)
        return np.moveaxis(out, 0, axis)

    def fourier(self, M):
        """``U^H M U``: the matrix in the plane-wave basis ordered by ``xi``."""
        B = self.to_freq(M, axis=0)
        return self.to_freq(B.conj().T, axis=0).conj().T

    def from_fourier(self, Mh):
        B = self.from_freq(Mh, axis=0)
        return self.from_freq(B.conj().T, axis=0).conj().T

    def band(self, fraction=0.5):
        """Indices of frequencies with ``|xi| <= fraction * Xi``."""
        return np.nonzero(np.abs(self.xi) <= fraction * self.Xi + 1e-12)[0]

    def doubled(self):
        """Companion grid of twice the period with the same spacing."""
        return GridContext(2 * self.N, 2 * self.L)

    def refined(self, factor=2):
        return GridContext(self.N * factor, self.L)

    def plane_wave(self, k):
        """``exp(i xi_k x)`` for the frequency index ``k`` in ``-N/2..N/2-1``."""
        return np.exp(1j * self.xi[k + self.N // 2] * self.x)


@dataclass(frozen=True)
class Provenance:
    kind: str  # "quantized" | "smoothing" | "derived"
    label: str = ""
    convention: Optional[str] = None


@dataclass
class GridOperator:
    """Dense operator on a :class:`GridContext` with a declared order."""

    matrix: np.ndarray
    grid: GridContext
    order: complex = 0.0
    provenance: Provenance = field(default_factory=lambda: Provenance("derived"))
    symbol: Optional[Symbol] = None

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        n = self.grid.N
        if self.matrix.shape != (n, n):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match N={n}")
        if not np.all(np.isfinite(self.matrix)):
            raise ValueError("matrix has non-finite entries")

    @property
    def N(self):
        return self.grid.N

    @property
    def convention(self):
        return self.provenance.convention

    @property
    def m(self):
        o = self.order
        return float(np.real(o))

    def _derived(self, M, order, label):
        return GridOperator(M, self.grid, order, Provenance("derived", label))

    def __matmul__(self, other):
        if isinstance(other, GridOperator):
            _same_grid(self, other)
            return self._derived(self.matrix @ other.matrix, _sum_order(self.order, other.order),
                                 "product")
        return self.matrix @ np.asarray(other)

    def __add__(self, other):
        if isinstance(other, GridOperator):
            _same_grid(self, other)
            return self._derived(self.matrix + other.matrix, _max_order(self.order, other.order),
                                 "sum")
        return self._derived(self.matrix + other * np.eye(self.N), _max_order(self.order, 0), "sum")

    __radd__ = __add__

    def __neg__(self):
        return self._derived(-self.matrix, self.order, "neg")

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, c):
        return self._derived(c * self.matrix, self.order, "scaled")

    __rmul__ = __mul__

    @property
    def H(self):
        return self._derived(self.matrix.conj().T, np.conj(self.order), "adjoint")

    def fourier(self):
        return self.grid.fourier(self.matrix)

    def norm(self):
        """Spectral norm."""
        return float(np.linalg.norm(self.matrix, 2))

    def is_hermitian(self, tol=1e-10):
        M = self.matrix
        return np.linalg.norm(M - M.conj().T) <= tol * max(np.linalg.norm(M), 1e-300)


def _same_grid(a, b):
    if a.grid != b.grid:
        raise ValueError("operators live on different grids")


def _sum_order(a, b):
    if np.isinf(np.real(a)) or np.isinf(np.real(b)):
        return -np.inf
    return complex(a) + complex(b)


def _max_order(a, b):
    return a if np.real(a) >= np.real(b) else b


def identity(grid):
    return GridOperator(np.eye(grid.N), grid, 0.0, Provenance("derived", "I"))


def multiplier(grid, weights, order=0.0, label="multiplier"):
    """Fourier multiplier with ``weights[k]`` on ``exp(i xi_k x)``."""
    Mh = np.diag(np.asarray(weights, dtype=complex))
    return GridOperator(grid.from_fourier(Mh), grid, order, Provenance("derived", label))


# -- quantization ---------------------------------------------------------------

def _symbol_table(a, x, xi):
    if isinstance(a, Symbol):
        return a.taylor(x, xi, 0)[0]
    X, XI = np.meshgrid(x, xi, indexing="ij")
    return np.asarray(a(X, XI), dtype=complex) * np.ones(X.shape)


def quantize(a, grid: GridContext, convention="weyl") -> GridOperator:
    """Quantize ``a`` on ``grid``.

    Weyl: ``M[j,l] = (1/N) sum_k exp(i xi_k (x_j - x_l)) a((x_j + x_l)/2, xi_k)``.
    KN:   the same with ``a(x_j, xi_k)``.
    """
    conv = _norm_conv(convention)
    N = grid.N
    j = np.arange(N)
    diff = (j[:, None] - j[None, :]) % N
    if conv == "weyl":
        mids = -grid.L / 2 + grid.h * np.arange(2 * N - 1) / 2
        A = _symbol_table(a, mids, grid.xi)
        F = np.fft.ifft(np.fft.ifftshift(A, axes=1), axis=1)
        M = F[j[:, None] + j[None, :], diff]
    else:
        A = _symbol_table(a, grid.x, grid.xi)
        F = np.fft.ifft(np.fft.ifftshift(A, axes=1), axis=1)
        M = F[j[:, None], diff]
    order = a.order if isinstance(a, Symbol) else 0.0
    name = a.name if isinstance(a, Symbol) else getattr(a, "__name__", "callable")
    return GridOperator(M, grid, order, Provenance("quantized", name, conv),
                        symbol=a if isinstance(a, Symbol) else None)


# -- extraction ------------------------------------------------------------------

def _extract_kn(M, grid):
    E = np.exp(1j * np.outer(grid.x, grid.xi))
    return np.conj(E) * (M @ E)


def _weyl_even(Mh, grid):
    """Wigner-type extraction from even-offset diagonals of ``U^H M U``."""
    N = grid.N
    ms = np.arange(-N // 4, N // 4)
    k = np.arange(N)
    rows = (k[None, :] + ms[:, None]) % N
    cols = (k[None, :] - ms[:, None]) % N
    D = Mh[rows, cols]  # (m, k)
    kappa = 2 * np.pi * 2 * ms / grid.L
    phase = np.exp(1j * np.outer(grid.x, kappa))  # (j, m)
    return phase @ D


def _odd_weight(Mh):
    N = Mh.shape[0]
    i = np.arange(N)
    odd = ((i[:, None] - i[None, :]) % 2).astype(bool)
    return np.linalg.norm(Mh[odd]), np.linalg.norm(Mh)


def extract_symbol(T: GridOperator, convention="weyl", companion: GridOperator = None) -> np.ndarray:
    """Sampled symbol table ``a[j, k] ~ a(x_j, xi_k)``.

    Kohn-Nirenberg extraction is an exact left inverse of KN quantization.
    Weyl extraction needs a companion operator on :meth:`GridContext.doubled`;
    it is built by re-quantizing when ``T`` carries its symbol.  Operators
    whose plane-wave matrix has no odd off-diagonals are handled on the grid
    itself.
    """
    conv = _norm_conv(convention)
    grid = T.grid
    if conv == "kn":
        return _extract_kn(T.matrix, grid)
    Mh = grid.fourier(T.matrix)
    odd, total = _odd_weight(Mh)
    if odd <= ODD_TOL * max(total, 1e-300):
        return _weyl_even(Mh, grid)
    if companion is None and T.symbol is not None and T.convention == "weyl":
        companion = quantize(T.symbol, grid.doubled(), "weyl")
    if companion is None:
        raise ConventionMismatch("Weyl extraction needs a doubled-grid companion")
    g2 = companion.grid
    if g2 != grid.doubled():
        raise ConventionMismatch("companion is not on the doubled grid")
    big = _weyl_even(g2.fourier(companion.matrix), g2)
    N = grid.N
    rows = np.arange(N) + N // 2
    cols = 2 * np.arange(-N // 2, N // 2) + N
    return big[np.ix_(rows, cols)]


# -- smoothing operators -------------------------------------------------------------

def smoothing_from_kernel(K: Callable, grid: GridContext, name="kernel") -> GridOperator:
    """``M[j, l] = (L/N) K(x_j, x_l)``, order ``-inf``."""
    X, Y = np.meshgrid(grid.x, grid.x, indexing="ij")
    M = grid.h * np.asarray(K(X, Y), dtype=complex) * np.ones(X.shape)
    return GridOperator(M, grid, -np.inf, Provenance("smoothing", name))


def heat_operator(grid: GridContext, t=0.1) -> GridOperator:
    """``exp(-t Delta)`` as the Fourier multiplier ``exp(-t xi^2)``."""
    op = multiplier(grid, np.exp(-t * grid.xi ** 2), -np.inf, f"heat({t:g})")
    op.provenance = Provenance("smoothing", f"heat({t:g})")
    return op


@dataclass
class MembershipReport:
    orders: tuple
    head: np.ndarray
    tail: np.ndarray
    passed: np.ndarray
    floor: float

    @property
    def verdict(self):
        return bool(np.all(self.passed))

    def __bool__(self):
        return self.verdict


MEMBERSHIP_SLACK = 1.5
MEMBERSHIP_FLOOR = 1e-10


def smoothing_membership(T: GridOperator, orders=range(1, 7), slack=MEMBERSHIP_SLACK,
                         floor=MEMBERSHIP_FLOOR) -> MembershipReport:
    """Does the extracted symbol behave like an element of every ``S^{-M}``?

    For each order ``M`` the weighted size ``|a| <xi>^M`` over the outer
    half of the frequency range (the part a larger grid would add) is
    compared with the inner half.  A symbol of order ``-M`` keeps the outer
    sup within ``slack`` of the inner one; anything of higher order makes it
    grow.  Values below ``floor`` (relative to the operator size) count as
    zero.
    """
    grid = T.grid
    a = np.abs(_extract_kn(T.matrix, grid))
    absxi = np.abs(grid.xi)
    inner = absxi <= grid.Xi / 2
    scale = max(np.max(np.abs(T.matrix)) * grid.N, 1.0)
    orders = tuple(orders)
    head, tail = [], []
    for M in orders:
        w = a * japanese(grid.xi)[None, :] ** M
        head.append(w[:, inner].max())
        tail.append(w[:, ~inner].max())
    head, tail = np.array(head), np.array(tail)
    passed = (tail <= slack * head) | (tail <= floor * scale * japanese(grid.Xi) ** np.array(orders))
    return MembershipReport(orders, head, tail, passed, floor)


# -- boundedness and symmetry ------------------------------------------------------------

@dataclass
class HormanderResult:
    bound: float
    norm: float
    M: float
    witnesses: dict

    @property
    def sqrt_bound(self):
        return float(np.sqrt(self.bound))

    @property
    def ratio(self):
        """``sqrt(bound) / ||q(a)||`` (infinite when the norm vanishes)."""
        return self.sqrt_bound / self.norm if self.norm > 0 else np.inf


def hormander_bound(a: Symbol, d=2, grid: GridContext = None, k=None, region=None) -> HormanderResult:
    """Square-root construction bounding ``||q(a)||^2``.

    With ``M = sup|a| + 1`` and ``b_0 = (M^2 - a^2)^{1/2}`` the corrections
    ``b_{j+1} = b_j + r_j / (2 b_j)`` with ``r_j = M^2 - P(a,a) - P(b_j,b_j)``
    push the remainder ``r_d`` down in order.  Since

        q(a)^2 + q(b_d)^2 = M^2 - q(r_d) + R,

    with ``R`` collecting the composition defects, and ``q(b_d)^2 >= 0``,
    one gets ``||q(a)||^2 <= M^2 + ||R|| + ||q(r_d)||``.
    """
    from .calculus import moyal_compose
    from .symbols import DEFAULT_REGION, PointwiseSymbol, constant_symbol

    if not a.real:
        raise DomainViolation(f"{a.name} is not real")
    grid = grid or GridContext()
    region = region or DEFAULT_REGION
    k = d + 1 if k is None else k
    vals = a(region.xs(), region.xis())
    if np.max(np.abs(np.imag(vals))) > 0:
        raise DomainViolation(f"{a.name} is not real")
    M = float(np.max(np.abs(np.real(vals)))) + 1.0
    M2 = M * M
    aa = moyal_compose(a, a, k).symbol
    b = PointwiseSymbol(0, lambda A: (M2 - A.real * A.real) ** 0.5, (a,), name="b0", real=True)
    for _ in range(d):
        bb = moyal_compose(b, b, k).symbol
        r = PointwiseSymbol(0, lambda AA, BB, B: (M2 - AA - BB).real / (2.0 * B), (aa, bb, b),
                            real=True)
        b = PointwiseSymbol(0, lambda B, Rj: B + Rj, (b, r), name="b", real=True)
    bb = moyal_compose(b, b, k).symbol
    rd = PointwiseSymbol(0, lambda AA, BB: (M2 - AA - BB).real, (aa, bb), name="r_d", real=True)
    qa = quantize(a, grid)
    qb = quantize(b, grid)
    qr = quantize(rd, grid)
    eye = np.eye(grid.N)
    R = qr.matrix - (M2 * eye - qa.matrix @ qa.matrix - qb.matrix @ qb.matrix)
    nR = float(np.linalg.norm(R, 2))
    nr = qr.norm()
    bound = M2 + nR + nr
    return HormanderResult(bound, qa.norm(), M,
                           {"r_d": rd, "b_d": b, "R": GridOperator(R, grid, -np.inf),
                            "norm_R": nR, "norm_q_rd": nr, "constant": constant_symbol(M2)})


def check_symmetric(a: Symbol, grid: GridContext = None, convention="weyl") -> float:
    """``||M - M^H|| / ||M||`` for the quantization of ``a``."""
    grid = grid or GridContext()
    M = quantize(a, grid, convention).matrix
    n = np.linalg.norm(M, 2)
    return float(np.linalg.norm(M - M.conj().T, 2) / n) if n > 0 else 0.0


# -- serialization ------------------------------------------------------------------

def to_bytes(T: GridOperator) -> bytes:
    """16-byte header (magic, N as u32, convention as u8, padding) + row-major complex128."""
    code = _CONV_CODE.get(T.convention, 2)
    header = MAGIC + struct.pack("<IB3x", T.N, code)
    return header + np.ascontiguousarray(T.matrix, dtype="<c16").tobytes()


def from_bytes(data: bytes, L=DEFAULT_L) -> GridOperator:
    if data[:8] != MAGIC:
        raise ValueError("not an operator dump")
    N, code = struct.unpack("<IB3x", data[8:16])
    M = np.frombuffer(data[16:], dtype="<c16")
    if M.size != N * N:
        raise ValueError("truncated operator dump")
    conv = _CONV_NAME[code]
    return GridOperator(M.reshape(N, N).copy(), GridContext(N, L), 0.0,
                        Provenance("derived", "loaded", None if conv == "other" else conv))


def write_binary(T: GridOperator, path):
    with open(path, "wb") as fh:
        fh.write(to_bytes(T))


def read_binary(path, L=DEFAULT_L) -> GridOperator:
    with open(path, "rb") as fh:
        return from_bytes(fh.read(), L)


def to_csv(T: GridOperator) -> str:
    """Long format ``row,col,real,imag``."""
    buf = io.StringIO()
    buf.write("row,col,real,imag\n")
    M = T.matrix
    for r in range(T.N):
        for c in range(T.N):
            z = M[r, c]
            buf.write(f"{r},{c},{z.real:.17g},{z.imag:.17g}\n")
    return buf.getvalue()


def from_csv(text: str, L=DEFAULT_L) -> GridOperator:
    data = np.loadtxt(io.StringIO(text), delimiter=",", skiprows=1, ndmin=2)
    N = int(round(np.sqrt(len(data))))
    M = np.zeros((N, N), dtype=complex)
    M[data[:, 0].astype(int), data[:, 1].astype(int)] = data[:, 2] + 1j * data[:, 3]
    return GridOperator(M, GridContext(N, L), 0.0, Provenance("derived", "loaded"))
