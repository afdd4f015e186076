"""Tridiagonal eigenproblem for the angular profile at the unit-circle limit.

On a truncation curve (M, gamma) the coupled coefficient system closes on the
band |n| <= M and the limit profile solves a (2M+1)-point three-term relation
R[psi]_n = (A_{n+1} psi_{n+1} + A_{-n+1} psi_{n-1} + B_n psi_n)/2 = beta~ psi_n.
The reflection-symmetric subspace psi_n = psi_{-n} reduces to (M+1)x(M+1).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence

import numpy as np

from .spectrum import CurveParams, InvalidCurveError, curve_point, _exact

_CERT_TOL = 1e-10


class EigenCertificationError(RuntimeError):
    """Raised when an eigenpair cannot be certified to the residual bound."""


# ---- recurrence coefficients of the radial ODE system ----

def a_coef(n: int, gamma, kappa):
    g = _exact(gamma)
    k = _exact(kappa)
    return k * (n - g) ** 2 / 2 + n - 3 * g - k * g * (1 - g) / 2


def b_coef(n: int, gamma, kappa):
    g = _exact(gamma)
    k = _exact(kappa)
    return -k * (n * n + g * g - g) + 6 * g


def c_coef(n: int, gamma, kappa):
    g = _exact(gamma)
    k = _exact(kappa)
    return k * (n * n - 2 * g + 2 * g * g) / 2 - n - 6 * g


@dataclass(frozen=True)
class TridiagSystem:
    M: int
    gamma: object
    kappa: object

    def a(self, n: int):
        return a_coef(n, self.gamma, self.kappa)

    def b(self, n: int):
        return b_coef(n, self.gamma, self.kappa)

    def c(self, n: int):
        return c_coef(n, self.gamma, self.kappa)


def build_system(curve: CurveParams) -> TridiagSystem:
    """Coefficients A, B, C on the curve; checks the band closure A_{-M} = 0."""
    params = curve_point(curve)
    sys = TridiagSystem(M=curve.M, gamma=_exact(curve.gamma), kappa=params.kappa)
    closure = sys.a(-curve.M)
    if isinstance(closure, Fraction):
        if closure != 0:
            raise InvalidCurveError(
                f"band closure violated: A_{{-M}} = {closure} on (M={curve.M}, "
                f"gamma={curve.gamma})")
    else:
        scale = max(1.0, abs(float(params.kappa)) * (curve.M + abs(float(curve.gamma))) ** 2)
        if abs(float(closure)) > 1e-10 * scale:
            raise InvalidCurveError(
                f"band closure violated: A_{{-M}} = {closure} on (M={curve.M}, "
                f"gamma={curve.gamma})")
    return sys


# ---- matrices ----

def reduced_matrix(sys: TridiagSystem) -> List[list]:
    """Symmetric-subspace matrix, rows n = 0..M.

    Row 0 carries the folded off-diagonal A_1 (doubled); rows n >= 1 carry
    sub A_{-n+1}/2, diag B_n/2, super A_{n+1}/2.  Scalar type follows gamma.
    """
    M = sys.M
    two = _exact(2)
    R = [[sys.b(0) * 0 for _ in range(M + 1)] for _ in range(M + 1)]
    R[0][0] = sys.b(0) / two
    if M >= 1:
        R[0][1] = sys.a(1)
    for n in range(1, M + 1):
        R[n][n - 1] = sys.a(-n + 1) / two
        R[n][n] = sys.b(n) / two
        if n < M:
            R[n][n + 1] = sys.a(n + 1) / two
    return R


def full_matrix(sys: TridiagSystem) -> List[list]:
    """Unreduced matrix on the full band, basis n = -M..M."""
    M = sys.M
    two = _exact(2)
    size = 2 * M + 1
    R = [[sys.b(0) * 0 for _ in range(size)] for _ in range(size)]
    for idx, n in enumerate(range(-M, M + 1)):
        R[idx][idx] = sys.b(n) / two
        if idx > 0:
            R[idx][idx - 1] = sys.a(-n + 1) / two
        if idx < size - 1:
            R[idx][idx + 1] = sys.a(n + 1) / two
    return R


def antisymmetric_matrix(sys: TridiagSystem) -> List[list]:
    """Odd-subspace matrix (psi_{-n} = -psi_n), rows n = 1..M.

    Excluded from spectrum selection; kept so the full-matrix spectrum can be
    reconciled as reduced + antisymmetric.
    """
    M = sys.M
    two = _exact(2)
    R = [[sys.b(1) * 0 for _ in range(M)] for _ in range(M)]
    for idx, n in enumerate(range(1, M + 1)):
        R[idx][idx] = sys.b(n) / two
        if idx > 0:
            R[idx][idx - 1] = sys.a(-n + 1) / two
        if idx < M - 1:
            R[idx][idx + 1] = sys.a(n + 1) / two
    return R


# ---- numeric eigensolve with certification ----

@dataclass(frozen=True)
class EigenResult:
    values: np.ndarray       # ascending
    vectors: np.ndarray      # column k pairs with values[k], unit 2-norm
    residuals: np.ndarray    # ||R v - lambda v||_2 per pair


def _tridiag_exact(matrix):
    """(diag, sub, super) as Fractions when the input is exact and tridiagonal."""
    rows = [list(r) for r in matrix]
    n = len(rows)
    for r in rows:
        if len(r) != n:
            return None
        for x in r:
            if not isinstance(x, (int, Fraction)):
                return None
    for i in range(n):
        for j in range(n):
            if abs(i - j) > 1 and rows[i][j] != 0:
                return None
    diag = [Fraction(rows[i][i]) for i in range(n)]
    sub = [Fraction(rows[i + 1][i]) for i in range(n - 1)]
    sup = [Fraction(rows[i][i + 1]) for i in range(n - 1)]
    return diag, sub, sup


def _char_poly(diag, sub, sup):
    # leading principal minors of (T - x I); ascending coefficients, exact
    prev = [Fraction(1)]
    cur = [diag[0], Fraction(-1)]
    for k in range(1, len(diag)):
        d, ef = diag[k], sub[k - 1] * sup[k - 1]
        nxt = [Fraction(0)] * (len(cur) + 1)
        for i, c in enumerate(cur):
            nxt[i] += d * c
            nxt[i + 1] -= c
        for i, c in enumerate(prev):
            nxt[i] -= ef * c
        prev, cur = cur, nxt
    return cur


_DEN_CAP = 1 << 200   # stops Newton iterates from squaring bignum denominators


def _exact_eigenvalues(diag, sub, sup, seeds):
    """Newton-polish float seeds on the exact characteristic polynomial.

    Rational input makes the spectrum an exact object, so each eigenvalue is
    pinned by a sign-change bracket and the brackets must be pairwise
    disjoint; LAPACK values are only starting guesses.  Near band-closure
    crossings the matrix is nonnormal enough that float eigenvalues carry
    ~1e-9 error, far above the certification bound, which is why this path
    exists at all.
    """
    p = _char_poly(diag, sub, sup)
    dp = _polyder(p)
    out = []
    for seed in seeds:
        x = Fraction(seed)
        for _ in range(8):
            fx = _polyval(p, x)
            if fx == 0:
                break
            dfx = _polyval(dp, x)
            if dfx == 0:
                raise EigenCertificationError(
                    f"stationary characteristic polynomial at {float(x)}")
            step = fx / dfx
            x = Fraction(round((x - step) * _DEN_CAP), _DEN_CAP)
            if abs(step) * (1 << 150) < max(1, abs(x)):
                break
        h = Fraction(1, 10 ** 13) * max(1, abs(x))
        lo, hi = _polyval(p, x - h), _polyval(p, x + h)
        for _ in range(3):
            if lo != 0 and hi != 0:
                break
            h /= 7
            lo, hi = _polyval(p, x - h), _polyval(p, x + h)
        if lo == 0 or hi == 0 or (lo < 0) == (hi < 0):
            raise EigenCertificationError(
                f"no sign-change certificate at eigenvalue {float(x)}")
        out.append((x, h))
    out.sort(key=lambda t: t[0])
    for (a, ha), (b, hb) in zip(out, out[1:]):
        if b - a <= ha + hb:
            raise EigenCertificationError(
                f"eigenvalue brackets at {float(a)} and {float(b)} overlap")
    return [float(x) for x, _ in out]


def eigen_solve(matrix) -> EigenResult:
    """All eigenvalues of a (small, real-spectrum) matrix with certified residuals.

    Exact tridiagonal input (int or Fraction entries) gets its eigenvalues
    refined on the exact characteristic polynomial, each certified by a
    sign-change bracket; float input keeps the plain LAPACK values.  Every
    returned vector is the smallest singular vector of (R - lambda I), the
    minimizer of ||R v - lambda v|| at that lambda; any pair failing the
    1e-10 bound raises EigenCertificationError carrying the offending matrix.
    """
    mat = np.array([[float(x) for x in row] for row in matrix], dtype=float)
    vals, _ = np.linalg.eig(mat)
    if np.max(np.abs(vals.imag)) > 1e-8 * max(1.0, np.max(np.abs(vals.real))):
        raise EigenCertificationError(
            f"unexpected complex spectrum {vals} for matrix {mat.tolist()}")
    lams = sorted(float(v) for v in vals.real)
    exact = _tridiag_exact(matrix)
    if exact is not None:
        lams = _exact_eigenvalues(*exact, lams)
    eye = np.eye(mat.shape[0])
    out_vecs = []
    out_res = []
    for lam in lams:
        vec = np.linalg.svd(mat - lam * eye)[2][-1]
        res = float(np.linalg.norm(mat @ vec - lam * vec))
        if res > _CERT_TOL:
            raise EigenCertificationError(
                f"residual {res:.3e} > {_CERT_TOL} for eigenvalue {lam} of "
                f"matrix {mat.tolist()}")
        out_vecs.append(vec)
        out_res.append(res)
    return EigenResult(values=np.array(lams),
                       vectors=np.array(out_vecs).T,
                       residuals=np.array(out_res))


# ---- closed-form eigenfunctions and the angular ODE residual ----

def eigenfunction_poly(curve: CurveParams, l: int) -> list:
    """Angular eigenfunction for even l as a degree-M polynomial in x = (1-cos phi)/2.

    x^{l/2} * F(l/2 - M, l/2 + G; 1/2 + l - M + G; x) with
    G = gamma (3M + 1 + 4 gamma)/(M + 3 gamma); the first parameter is a
    nonpositive integer so the series terminates at total degree M.
    Coefficients are exact for rational gamma, ascending in x.
    """
    M = curve.M
    if l % 2 != 0 or not 0 <= l <= 2 * M:
        raise ValueError(f"l must be even in [0, {2 * M}], got {l}")
    g = _exact(curve.gamma)
    denom = M + 3 * g
    if denom == 0:
        raise InvalidCurveError("gamma = -M/3 is outside the admissible range")
    G = g * (3 * M + 1 + 4 * g) / denom
    half = l // 2
    a = half - M
    b = half + G
    c = Fraction(1, 2) + l - M + G if isinstance(G, Fraction) else 0.5 + l - M + G
    coeffs = [g * 0 for _ in range(half)]
    term = g * 0 + 1
    coeffs.append(term)
    k = 0
    while a + k != 0:
        ck = c + k
        if ck == 0:
            raise ValueError(
                f"hypergeometric lower parameter hits a nonpositive integer at k={k}")
        term = term * (a + k) * (b + k) / (ck * (k + 1))
        coeffs.append(term)
        k += 1
    return coeffs


def _polyval(coeffs: Sequence, x):
    acc = x * 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _polyder(coeffs: Sequence) -> list:
    return [k * c for k, c in enumerate(coeffs)][1:] or [coeffs[0] * 0]


def lpsi_residual(psi: Sequence, beta_tilde, gamma, kappa, phi_grid) -> float:
    """Max abs residual of the angular ODE over phi_grid.

    psi is the polynomial in x = (1 - cos phi)/2 (ascending coefficients);
    derivatives in phi come from the chain rule
    Psi'  = p'(x) sin(phi)/2,
    Psi'' = p''(x) x (1-x) + p'(x) (1 - 2x)/2.
    """
    p = [float(c) for c in psi]
    dp = _polyder(p)
    ddp = _polyder(dp)
    g = float(gamma)
    k = float(kappa)
    bt = float(beta_tilde)
    phi = np.asarray(phi_grid, dtype=float)
    cphi = np.cos(phi)
    sphi = np.sin(phi)
    x = (1.0 - cphi) / 2.0
    P = _polyval(p, x)
    P1 = _polyval(dp, x) * sphi / 2.0
    P2 = _polyval(ddp, x) * x * (1.0 - x) + _polyval(dp, x) * (1.0 - 2.0 * x) / 2.0
    res = (k / 2.0) * (1.0 - cphi) * P2 - (1.0 - k * g) * sphi * P1 \
        + ((k * (2 * g - 1) / 2.0 - 3.0) * g * cphi
           - (k * (g - 1) / 2.0 - 3.0) * g - bt) * P
    return float(np.max(np.abs(res)))


def beta_from_lambda(curve: CurveParams, lam):
    """Eigenvalue as a quadratic in the hypergeometric index lambda.

    beta~ = kappa lam^2/4 + (kappa gamma - kappa/4 - 1) lam + kappa gamma^2/2;
    agrees with eigen_beta_closed at integer lam = l.
    """
    params = curve_point(curve)
    k = _exact(params.kappa)
    g = _exact(curve.gamma)
    lam = _exact(lam)
    return k * lam * lam / 4 + (k * g - k / 4 - 1) * lam + k * g * g / 2


# ---- eigenvalue selection ----

def _angular_profile(vec: np.ndarray, x_grid: np.ndarray) -> np.ndarray:
    # symmetric subspace: Psi(phi) = psi_0 + 2 sum_n psi_n T_n(cos phi), cos phi = 1-2x
    cheb = np.concatenate(([vec[0]], 2.0 * vec[1:]))
    return np.polynomial.chebyshev.chebval(1.0 - 2.0 * x_grid, cheb)


def select_beta_tilde(result: EigenResult, curve: CurveParams) -> float:
    """Pick the eigenvalue whose angular profile is nonnegative, largest wins.

    Checked on a 1024-point x grid at tolerance -1e-10 after sign
    normalization; the selected value must also be the global maximum.
    """
    x_grid = np.linspace(0.0, 1.0, 1024)
    candidates = []
    for k, lam in enumerate(result.values):
        prof = _angular_profile(result.vectors[:, k], x_grid)
        hi = prof[np.argmax(np.abs(prof))]
        if hi < 0:
            prof = -prof
        if prof.min() >= -1e-10 * max(1.0, prof.max()):
            candidates.append(float(lam))
    if not candidates:
        raise EigenCertificationError(
            f"no eigenvalue with nonnegative profile on (M={curve.M}, "
            f"gamma={curve.gamma})")
    pick = max(candidates)
    top = float(np.max(result.values))
    if abs(pick - top) > 1e-10 * max(1.0, abs(top)):
        raise EigenCertificationError(
            f"nonnegative-profile eigenvalue {pick} is not the spectral "
            f"maximum {top} on (M={curve.M}, gamma={curve.gamma})")
    return pick
