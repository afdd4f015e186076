"""Coefficient tables theta_{i,j} of the two-variable moment series.

The table is generated row by row from the four-term recurrence
sum_{l,k in {0,1}} C^{l,k}_{i,j} theta_{i-l, j-k} = 0, theta_{1,1} = 1,
with out-of-range entries zero.  C^{0,0} vanishes only at (1,1) for
kappa >= 0, so the solve is always well posed.  Two backends: exact
Fraction arithmetic and a numpy float path filled along anti-diagonals.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .eigen import a_coef, b_coef, c_coef
from .spectrum import _exact

BACKEND_RATIONAL = "rational"
BACKEND_FLOAT = "float"

_RATIONAL_N_CAP = 60  # auto backend switches to float above this
_TABLE_MAGIC = "theta-table v1"


class TailCheckError(ValueError):
    """Series tail too large at the requested radius."""

    def __init__(self, msg, r_max=None):
        super().__init__(msg)
        self.r_max = r_max


class SeriesValue(NamedTuple):
    value: complex
    tail: float       # magnitude of the last two anti-diagonal blocks
    warning: bool     # tail exceeds 1e-6 of the absolute partial sum


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    residual: float
    window: tuple


# ---- recurrence coefficients ----

def recurrence_coeff(i: int, j: int, l: int, k: int, gamma, kappa):
    """C^{l,k}_{i,j} of the four-term relation, l,k in {0,1}."""
    if l not in (0, 1) or k not in (0, 1):
        raise ValueError(f"stencil offsets must be 0 or 1, got (l,k)=({l},{k})")
    g = _exact(gamma)
    kap = _exact(kappa)
    d = i - j
    if (l, k) == (0, 0):
        return -kap * d * d / 2 - (i + j - 2)
    if (l, k) == (0, 1):
        return kap * (d + 1) ** 2 / 2 + (1 - kap * g) * (d + 1) \
            + kap * g * g - kap * g / 2 - 3 * g
    if (l, k) == (1, 0):
        return kap * (1 - d) ** 2 / 2 + (1 - kap * g) * (1 - d) \
            + kap * g * g - kap * g / 2 - 3 * g
    return -kap * d * d / 2 + (i + j) - kap * g * g + kap * g + 6 * g - 4


# ---- table construction ----

@dataclass(frozen=True)
class CoeffTable:
    N: int
    gamma: object
    kappa: object
    backend: str
    entries: object   # nested Fraction lists (rational) or (N,N) float ndarray

    def get(self, i: int, j: int):
        if not (1 <= i <= self.N and 1 <= j <= self.N):
            raise IndexError(f"(i,j)=({i},{j}) outside 1..{self.N}")
        if self.backend == BACKEND_RATIONAL:
            return self.entries[i - 1][j - 1]
        return float(self.entries[i - 1, j - 1])

    def diagonal(self):
        if self.backend == BACKEND_RATIONAL:
            return [self.entries[i][i] for i in range(self.N)]
        return np.diagonal(self.entries).copy()

    def _float_entries(self) -> np.ndarray:
        if self.backend == BACKEND_FLOAT:
            return self.entries
        return np.array([[float(v) for v in row] for row in self.entries])


def _is_rational_like(x) -> bool:
    return isinstance(x, (int, Fraction))


def build_theta_table(gamma, kappa, N: int, backend: Optional[str] = None) -> CoeffTable:
    """theta table up to index N.

    backend None picks rational for rational-like inputs up to N=60,
    float otherwise.  Float overflow raises with the failing index.
    """
    if N < 1:
        raise ValueError("N must be positive")
    if not float(kappa) >= 0:
        raise ValueError(f"kappa must be nonnegative, got {kappa}")
    if backend is None:
        backend = BACKEND_RATIONAL if (
            _is_rational_like(gamma) and _is_rational_like(kappa)
            and N <= _RATIONAL_N_CAP) else BACKEND_FLOAT
    if backend == BACKEND_RATIONAL:
        return _build_rational(Fraction(gamma), Fraction(kappa), N)
    if backend == BACKEND_FLOAT:
        return _build_float(float(gamma), float(kappa), N)
    raise ValueError(f"unknown backend {backend!r}")


def _build_rational(g: Fraction, kap: Fraction, N: int) -> CoeffTable:
    zero = Fraction(0)
    rows = [[zero] * N for _ in range(N)]
    rows[0][0] = Fraction(1)
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            if i == 1 and j == 1:
                continue
            acc = zero
            if j >= 2:
                acc += recurrence_coeff(i, j, 0, 1, g, kap) * rows[i - 1][j - 2]
            if i >= 2:
                acc += recurrence_coeff(i, j, 1, 0, g, kap) * rows[i - 2][j - 1]
            if i >= 2 and j >= 2:
                acc += recurrence_coeff(i, j, 1, 1, g, kap) * rows[i - 2][j - 2]
            rows[i - 1][j - 1] = -acc / recurrence_coeff(i, j, 0, 0, g, kap)
    return CoeffTable(N=N, gamma=g, kappa=kap, backend=BACKEND_RATIONAL, entries=rows)


def _build_float(g: float, kap: float, N: int) -> CoeffTable:
    # padded grid: row/col 0 hold the out-of-range zeros, filled by anti-diagonal
    G = np.zeros((N + 1, N + 1))
    G[1, 1] = 1.0
    cg = kap * g * g - kap * g / 2.0 - 3.0 * g
    c11_const = -kap * g * g + kap * g + 6.0 * g - 4.0
    for s in range(3, 2 * N + 1):
        i = np.arange(max(1, s - N), min(N, s - 1) + 1)
        j = s - i
        d = (i - j).astype(float)
        c00 = -kap * d * d / 2.0 - (s - 2.0)
        c01 = kap * (d + 1.0) ** 2 / 2.0 + (1.0 - kap * g) * (d + 1.0) + cg
        c10 = kap * (1.0 - d) ** 2 / 2.0 + (1.0 - kap * g) * (1.0 - d) + cg
        c11 = -kap * d * d / 2.0 + s + c11_const
        with np.errstate(over="ignore", invalid="ignore"):
            vals = -((c01 * G[i, j - 1] + c10 * G[i - 1, j])
                     + c11 * G[i - 1, j - 1]) / c00
        bad = ~np.isfinite(vals)
        if bad.any():
            b = int(np.argmax(bad))
            raise OverflowError(
                f"float overflow at theta({int(i[b])},{int(j[b])}); "
                f"use the rational backend or a smaller N")
        G[i, j] = vals
    return CoeffTable(N=N, gamma=g, kappa=kap, backend=BACKEND_FLOAT,
                      entries=G[1:, 1:])


# ---- band structure ----

def truncation_width(table: CoeffTable, tol=None) -> Optional[int]:
    """Smallest M with all |theta| <= tol beyond |i-j| > M; None if no band fits.

    Nonzero entries reaching the table corner |i-j| = N-1 leave no in-table
    evidence of banding, hence None.
    """
    if tol is None:
        tol = Fraction(0) if table.backend == BACKEND_RATIONAL else 0.0
    if table.backend == BACKEND_RATIONAL:
        m = 0
        for i in range(1, table.N + 1):
            for j in range(1, table.N + 1):
                if abs(table.entries[i - 1][j - 1]) > tol:
                    m = max(m, abs(i - j))
    else:
        ii, jj = np.nonzero(np.abs(table.entries) > tol)
        m = int(np.max(np.abs(ii - jj))) if len(ii) else 0
    if m >= table.N - 1:
        return None
    return m


# ---- evaluation ----

def _abs_partial_and_tail(entries_abs: np.ndarray, aw: float, awbar: float):
    N = entries_abs.shape[0]
    pw = aw ** np.arange(N)
    pb = awbar ** np.arange(N)
    S = float(pw @ entries_abs @ pb)
    T = float(entries_abs[N - 1, N - 1] * pw[N - 1] * pb[N - 1])
    if N >= 2:
        T += float(entries_abs[N - 1, N - 2] * pw[N - 1] * pb[N - 2])
        T += float(entries_abs[N - 2, N - 1] * pw[N - 2] * pb[N - 1])
    return S, T


def eval_theta(table: CoeffTable, w, wbar) -> SeriesValue:
    """Partial sum of Theta at (w, wbar) with a corner-block tail heuristic."""
    ent = table._float_entries()
    N = table.N
    w = complex(w)
    wbar = complex(wbar)
    pw = w ** np.arange(N)
    pb = wbar ** np.arange(N)
    value = complex(pw @ ent @ pb)
    S, T = _abs_partial_and_tail(np.abs(ent), abs(w), abs(wbar))
    return SeriesValue(value=value, tail=T, warning=T > 1e-6 * S)


def eval_rho(table: CoeffTable, w, wbar) -> SeriesValue:
    """((1-w)(1-wbar))^gamma * Theta(w, wbar), principal branch."""
    base = eval_theta(table, w, wbar)
    pref = ((1 - complex(w)) * (1 - complex(wbar))) ** float(table.gamma)
    return SeriesValue(value=pref * base.value, tail=abs(pref) * base.tail,
                       warning=base.warning)


def fourier_series(table: CoeffTable, n: int):
    """Coefficients of f_n(xi) = sum_j theta_{j+n, j} xi^{j-1}.

    Negative n is extracted literally and checked against the reflection
    identity f_{-n} = xi^n f_n before returning.
    """
    N = table.N
    if abs(n) > N - 1:
        raise ValueError(f"|n| must be < N={N}, got n={n}")
    rational = table.backend == BACKEND_RATIONAL
    zero = Fraction(0) if rational else 0.0
    length = N - max(n, 0)
    out = []
    for j in range(1, length + 1):
        i = j + n
        out.append(table.get(i, j) if i >= 1 else zero)
    if n < 0:
        m = -n
        ref = fourier_series(table, m)
        for k in range(m):
            if abs(out[k]) > (0 if rational else 1e-12):
                raise AssertionError(
                    f"reflection identity violated: f_{n} has nonzero xi^{k} term")
        for k, v in enumerate(ref):
            d = abs(out[m + k] - v)
            if d > (0 if rational else 1e-12 * max(1.0, abs(float(v)))):
                raise AssertionError(
                    f"reflection identity violated at coefficient {k} of f_{n}")
    if not rational:
        return np.array(out, dtype=float)
    return out


def rec3_residual(table: CoeffTable, n: int, order: int):
    """Max abs coefficient, up to xi^order, of the coupled radial ODE residual

    xi A_{n+1} f_{n+1} + A_{-n+1} f_{n-1} + (B_n + (1-xi) C_n) f_n
      + 2 xi (xi - 1) f_n' .

    Exact in the rational backend; zero for every table (band or not) as the
    system is just the Fourier transcription of the defining relation.
    """
    N = table.N
    max_order = N - abs(n) - 2
    if order > max_order:
        raise ValueError(
            f"order {order} exceeds table knowledge {max_order} for n={n}")
    g, kap = table.gamma, table.kappa
    A_up = a_coef(n + 1, g, kap)
    A_dn = a_coef(-n + 1, g, kap)
    B = b_coef(n, g, kap)
    C = c_coef(n, g, kap)
    fp = fourier_series(table, n + 1)
    fm = fourier_series(table, n - 1)
    f0 = fourier_series(table, n)
    rational = table.backend == BACKEND_RATIONAL
    zero = Fraction(0) if rational else 0.0

    def at(c, idx):
        return c[idx] if 0 <= idx < len(c) else zero

    worst = zero
    for p in range(order + 1):
        r = A_up * at(fp, p - 1) + A_dn * at(fm, p) + B * at(f0, p) \
            + C * (at(f0, p) - at(f0, p - 1)) \
            + 2 * (p - 1) * at(f0, p - 1) - 2 * p * at(f0, p)
        worst = max(worst, abs(r))
    return worst


# ---- asymptotics and integral means ----

def diagonal_growth_exponent(table: CoeffTable) -> float:
    """Estimate of the blow-up exponent from diagonal growth theta_{j,j} ~ j^(bt-1).

    Consecutive-ratio estimates e_j = j (theta_{j+1,j+1}/theta_{j,j} - 1)
    carry a 1/j bias; the Richardson combination j e_j - (j-1) e_{j-1}
    removes it.  Fit window: top half of the table.
    """
    N = table.N
    if N < 8:
        raise ValueError("table too small for a growth fit")
    d = np.array([float(v) for v in table.diagonal()])
    lo = N // 2
    window = d[lo - 1:]
    if np.any(window <= 0):
        raise ValueError(
            "non-positive diagonal entries in the fit window; "
            "growth exponent undefined")
    j = np.arange(lo, N, dtype=float)          # ratio j -> j+1
    e = j * (d[lo:] / d[lo - 1:-1] - 1.0)
    R = j[1:] * e[1:] - j[:-1] * e[:-1]
    take = max(4, len(R) // 4)
    return float(np.median(R[-take:])) + 1.0


def _fourier_values(entries: np.ndarray, xi: float) -> np.ndarray:
    N = entries.shape[0]
    xp = xi ** np.arange(N)
    out = np.empty(N)
    for n in range(N):
        band = np.diagonal(entries, offset=-n)
        out[n] = band @ xp[:band.size]
    return out


def integral_means(table: CoeffTable, r: float, n_phi: int = 1024,
                   tail_tol: float = 1e-6) -> float:
    """Integral of rho(r e^{i phi}, r e^{-i phi}) over phi in [0, 2pi).

    Preconditions: n_phi a power of two >= 256; the corner-block tail at
    radius r must stay below tail_tol of the absolute partial sum, else a
    TailCheckError reports the largest admissible radius.
    """
    if not 0.0 < r < 1.0:
        raise ValueError(f"radius must lie in (0,1), got {r}")
    if n_phi < 256 or (n_phi & (n_phi - 1)) != 0:
        raise ValueError(f"n_phi must be a power of two >= 256, got {n_phi}")
    ent = table._float_entries()
    ent_abs = np.abs(ent)

    def frac(x):
        S, T = _abs_partial_and_tail(ent_abs, x, x)
        return T / S

    if frac(r) > tail_tol:
        lo, hi = 1e-6, r
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if frac(mid) > tail_tol:
                hi = mid
            else:
                lo = mid
        raise TailCheckError(
            f"series tail at r={r} exceeds tail_tol={tail_tol}; "
            f"largest admissible radius is about {lo:.6f} "
            f"(increase N or tail_tol)", r_max=lo)

    N = table.N
    xi = r * r
    ff = _fourier_values(ent, xi)
    cn = ff * r ** np.arange(N)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    theta_vals = cn[0] + 2.0 * (np.cos(np.outer(np.arange(1, N), phi)).T @ cn[1:])
    g = float(table.gamma)
    integrand = (1.0 - 2.0 * r * np.cos(phi) + r * r) ** g * theta_vals
    return float(2.0 * np.pi * np.mean(integrand))


def fit_beta(samples: Sequence[Tuple[float, float]]) -> FitResult:
    """Least-squares slope of log I against -log(1-r)."""
    if len(samples) < 4:
        raise ValueError("need at least 4 samples for a slope fit")
    r = np.array([s[0] for s in samples], dtype=float)
    I = np.array([s[1] for s in samples], dtype=float)
    if np.any(I <= 0):
        raise ValueError("non-positive integral means in fit input")
    x = -np.log1p(-r)
    y = np.log(I)
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.max(np.abs(y - (slope * x + intercept))))
    return FitResult(slope=float(slope), intercept=float(intercept),
                     residual=resid, window=tuple(float(v) for v in r))


# ---- text export ----

def _fmt_scalar(v, backend: str) -> str:
    if backend == BACKEND_RATIONAL:
        return str(Fraction(v))
    return "%.17g" % float(v)


def save_table(table: CoeffTable, dest) -> None:
    """Plain-text dump: header line, then one `i j value` row per entry."""
    own = not hasattr(dest, "write")
    fh = open(dest, "w") if own else dest
    try:
        fh.write(f"{_TABLE_MAGIC} gamma={_fmt_scalar(table.gamma, table.backend)} "
                 f"kappa={_fmt_scalar(table.kappa, table.backend)} "
                 f"N={table.N} backend={table.backend}\n")
        for i in range(1, table.N + 1):
            for j in range(1, table.N + 1):
                fh.write(f"{i} {j} {_fmt_scalar(table.get(i, j), table.backend)}\n")
    finally:
        if own:
            fh.close()


def load_table(src) -> CoeffTable:
    own = not hasattr(src, "read")
    fh = open(src) if own else src
    try:
        header = fh.readline().strip()
        if not header.startswith(_TABLE_MAGIC):
            raise ValueError(f"not a theta-table file: header {header!r}")
        fields = dict(tok.split("=", 1) for tok in header[len(_TABLE_MAGIC):].split())
        N = int(fields["N"])
        backend = fields["backend"]
        if backend not in (BACKEND_RATIONAL, BACKEND_FLOAT):
            raise ValueError(f"unknown backend {backend!r} in table file")
        rational = backend == BACKEND_RATIONAL
        gamma = Fraction(fields["gamma"]) if rational else float(fields["gamma"])
        kappa = Fraction(fields["kappa"]) if rational else float(fields["kappa"])
        if rational:
            entries = [[Fraction(0)] * N for _ in range(N)]
        else:
            entries = np.zeros((N, N))
        seen = 0
        for line in fh:
            line = line.strip()
            if not line:
                continue
            si, sj, sv = line.split()
            i, j = int(si), int(sj)
            if rational:
                entries[i - 1][j - 1] = Fraction(sv)
            else:
                entries[i - 1, j - 1] = float(sv)
            seen += 1
        if seen != N * N:
            raise ValueError(f"expected {N * N} entries, found {seen}")
        return CoeffTable(N=N, gamma=gamma, kappa=kappa, backend=backend,
                          entries=entries)
    finally:
        if own:
            fh.close()
