"""Gauss 2F1 on the real interval, closed-form moment functions, PDE residual.

The hypergeometric routine covers exactly what the closed forms need:
terminating series (exact in rational arithmetic), direct series for
x <= 0.9, and the 1-x connection formula up to x < 1.
"""
from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import Callable, NamedTuple

from .spectrum import _exact

_SERIES_EPS = 1e-16
_SERIES_CAP = 100000
_SERIES_SPLIT = 0.9


def _nonpositive_int(v):
    # returns -v (termination length) when v is a nonpositive integer
    if isinstance(v, Fraction):
        if v.denominator == 1 and v <= 0:
            return -int(v)
        return None
    f = float(v)
    if f <= 0 and float(f).is_integer():
        return -int(f)
    return None


def _terminating_sum(a, b, c, x, n_terms: int):
    term = x * 0 + 1
    acc = term
    for k in range(n_terms):
        ck = c + k
        if ck == 0:
            raise ValueError(
                f"2F1 lower parameter c={c} hits zero at k={k} before termination")
        term = term * (a + k) * (b + k) * x / (ck * (k + 1))
        acc = acc + term
    return acc


def _gamma_or_none(v: float):
    try:
        return math.gamma(v)
    except ValueError:
        return None   # pole: nonpositive integer


def hyp2f1(a, b, c, x):
    """2F1(a, b; c; x) for real x in (-1, 1).

    Terminating cases (a or b a nonpositive integer) are summed exactly and
    stay rational for rational inputs.  Otherwise: direct series up to
    x = 0.9, the 1-x connection formula beyond; integral c-a-b degenerates
    the connection, so those fall back to the (slow) direct series.
    """
    na = _nonpositive_int(a)
    nb = _nonpositive_int(b)
    n_stop = None
    if na is not None or nb is not None:
        n_stop = min(v for v in (na, nb) if v is not None)
    nc = _nonpositive_int(c)
    if nc is not None and (n_stop is None or nc < n_stop):
        raise ValueError(
            f"2F1 undefined: c={c} is a nonpositive integer reached by the series")

    if n_stop is not None:
        exact = all(isinstance(v, (int, Fraction)) for v in (a, b, c, x))
        if exact:
            return _terminating_sum(_exact(a), _exact(b), _exact(c), _exact(x), n_stop)
        return _terminating_sum(float(a), float(b), float(c), float(x), n_stop)

    xf = float(x)
    if not -1.0 < xf < 1.0:
        raise ValueError(
            f"non-terminating 2F1 needs -1 < x < 1, got x={xf}")
    af, bf, cf = float(a), float(b), float(c)
    if xf <= _SERIES_SPLIT:
        return _direct_series(af, bf, cf, xf)

    # 1-x connection
    s = cf - af - bf
    if abs(s - round(s)) < 1e-12:
        # degenerate (logarithmic) case: the direct series still converges
        # for |x| < 1, only slowly, so take the slow path instead of failing
        return _direct_series(af, bf, cf, xf)
    y = 1.0 - xf
    gc = math.gamma(cf)
    g1a, g1b = _gamma_or_none(cf - af), _gamma_or_none(cf - bf)
    coef1 = 0.0
    if g1a is not None and g1b is not None:
        coef1 = gc * math.gamma(s) / (g1a * g1b)
    g2a, g2b = _gamma_or_none(af), _gamma_or_none(bf)
    coef2 = 0.0
    if g2a is not None and g2b is not None:
        coef2 = gc * math.gamma(-s) / (g2a * g2b)
    out = 0.0
    if coef1 != 0.0:
        out += coef1 * _direct_series(af, bf, af + bf - cf + 1.0, y)
    if coef2 != 0.0:
        out += coef2 * y ** s * _direct_series(cf - af, cf - bf, s + 1.0, y)
    return out


def _direct_series(a: float, b: float, c: float, x: float) -> float:
    term = 1.0
    acc = 1.0
    small = 0
    for k in range(_SERIES_CAP):
        term *= (a + k) * (b + k) * x / ((c + k) * (k + 1))
        acc += term
        if abs(term) <= _SERIES_EPS * max(1.0, abs(acc)):
            small += 1
            if small >= 2:
                return acc
        else:
            small = 0
    raise RuntimeError(f"2F1 series did not converge at x={x}")


# ---- closed-form moment functions ----

def rho_M0(w, wbar, kappa) -> complex:
    """Width-0 closed form: ((1-w)(1-wbar))^e1 / (1-w wbar)^e2.

    e1 = (6+kappa)/(2 kappa), e2 = (6+kappa)^2/(8 kappa); the carried
    exponent is q = (2+kappa)(6+kappa)/(8 kappa).
    """
    k = float(kappa)
    if k <= 0:
        raise ValueError("kappa must be positive for the width-0 family")
    w = complex(w)
    wbar = complex(wbar)
    if abs(w * wbar) >= 1 or abs(w) >= 1 or abs(wbar) >= 1:
        raise ValueError("arguments must satisfy |w|, |wbar| < 1")
    e1 = (6.0 + k) / (2.0 * k)
    e2 = (6.0 + k) ** 2 / (8.0 * k)
    val = cmath.exp(e1 * (cmath.log(1 - w) + cmath.log(1 - wbar))
                    - e2 * cmath.log(1 - w * wbar))
    return val


class RhoM1Value(NamedTuple):
    value: complex
    q: float
    kappa: float


def rho_M1(w, wbar, gamma) -> RhoM1Value:
    """Width-1 closed form via two Gauss functions of xi = w wbar.

    Normalized to rho(0,0) = 1; carries kappa = 2(3g+1)/(2g^2+g+1),
    q = g(g+1)(g+3)/(2g^2+g+1), reported alongside the value.
    """
    g = float(gamma)
    if g <= -1.0 / 3.0:
        raise ValueError("gamma must exceed -1/3 on the width-1 family")
    w = complex(w)
    wbar = complex(wbar)
    xi = w * wbar
    if abs(xi.imag) > 1e-12 * (1.0 + abs(xi)):
        raise ValueError(
            "w*wbar must be real (conjugate or real argument pairs)")
    x = xi.real
    if not -1.0 < x < 1.0:
        raise ValueError(f"need -1 < w*wbar < 1, got {x}")
    D1 = 2.0 * g * g + g + 1.0
    kappa = 2.0 * (3.0 * g + 1.0) / D1
    q = g * (g + 1.0) * (g + 3.0) / D1
    E = (g + 1.0) * (3.0 * g * g + 6.0 * g - 1.0) / D1
    phi1 = hyp2f1((g + 1.0) * (1.0 - 3.0 * g) / D1,
                  (1.0 - g - 4.0 * g * g) / D1,
                  (g + 1.0) ** 2 / D1, x)
    phi2 = hyp2f1((1.0 - g) * (2.0 + g) / D1,
                  2.0 * (1.0 - g * g) / D1,
                  (3.0 * g * g + 3.0 * g + 2.0) / D1, x)
    s = (w + wbar) / 2.0
    bracket = (1.0 - s) * phi1 + ((1.0 - 3.0 * g) / (1.0 + g)) * (1.0 - x) * s * phi2
    pref = cmath.exp(g * (cmath.log(1 - w) + cmath.log(1 - wbar))
                     - E * math.log(1.0 - x))
    return RhoM1Value(value=pref * bracket, q=q, kappa=kappa)


def deterministic_map_derivative(w, t: float) -> complex:
    """Derivative of the zero-noise interior map: e^t (1-w)/(1+w)^3."""
    w = complex(w)
    if w == -1:
        raise ValueError("pole at w = -1")
    return math.exp(t) * (1 - w) / (1 + w) ** 3


# ---- PDE residual ----

_D1_STENCIL = {-2: 1.0, -1: -8.0, 1: 8.0, 2: -1.0}           # /12h
_D2_STENCIL = {-2: -1.0, -1: 16.0, 0: -30.0, 1: 16.0, 2: -1.0}  # /12h^2


def pde_residual(rho_evaluator: Callable, q: float, kappa: float,
                 w, wbar, h: float = 1e-3) -> float:
    """|L[rho] + q rho| / max(1, |rho|) with 4th-order central differences.

    L = -kappa/2 (w d_w - wbar d_wbar)^2
        + (w+1)/(w-1) w d_w + (wbar+1)/(wbar-1) wbar d_wbar
        - q/(w-1)^2 - q/(wbar-1)^2 + q .

    The two arguments are shifted independently along the real direction;
    analyticity in each makes that the complex derivative.
    """
    w = complex(w)
    wbar = complex(wbar)
    f = {}
    for sw in range(-2, 3):
        for sb in range(-2, 3):
            f[(sw, sb)] = complex(rho_evaluator(w + sw * h, wbar + sb * h))
    rho = f[(0, 0)]
    d_w = sum(c * f[(s, 0)] for s, c in _D1_STENCIL.items()) / (12 * h)
    d_b = sum(c * f[(0, s)] for s, c in _D1_STENCIL.items()) / (12 * h)
    d_ww = sum(c * f[(s, 0)] for s, c in _D2_STENCIL.items()) / (12 * h * h)
    d_bb = sum(c * f[(0, s)] for s, c in _D2_STENCIL.items()) / (12 * h * h)
    d_wb = sum(cs * ct * f[(s, t)]
               for s, cs in _D1_STENCIL.items()
               for t, ct in _D1_STENCIL.items()) / (144 * h * h)
    # (w d_w - wbar d_wbar)^2 rho
    P2 = w * d_w + w * w * d_ww - 2 * w * wbar * d_wb + wbar * d_b + wbar * wbar * d_bb
    L = (-kappa / 2.0) * P2 \
        + (w + 1) / (w - 1) * w * d_w + (wbar + 1) / (wbar - 1) * wbar * d_b \
        - q * rho / (w - 1) ** 2 - q * rho / (wbar - 1) ** 2 + q * rho
    return abs(L + q * rho) / max(1.0, abs(rho))
