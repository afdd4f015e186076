"""Tridiagonal angular systems: matrices, eigenvalues, eigenfunctions."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

import slespec as S


def curve_gammas(M, count, seed):
    """Random admissible rational gammas for the M-curve."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        g = Fraction(int(rng.integers(1, 160)), 48)
        try:
            S.curve_point(S.CurveParams(M, g))
        except S.InvalidCurveError:
            continue
        out.append(g)
    return out


# ---- coefficient functions ----

def test_coefficients_at_unit_curve():
    g, k = Fraction(1), Fraction(2)
    assert S.a_coef(1, g, k) == Fraction(-2)
    assert S.a_coef(0, g, k) == Fraction(-2)
    assert S.a_coef(-1, g, k) == 0
    assert S.b_coef(0, g, k) == Fraction(6)
    assert S.b_coef(1, g, k) == Fraction(4)
    assert S.c_coef(0, g, k) == Fraction(-6)
    assert S.c_coef(1, g, k) == Fraction(-6)


@given(g=st.fractions(min_value=Fraction(-1), max_value=Fraction(2),
                      max_denominator=8),
       k=st.fractions(min_value=Fraction(0), max_value=Fraction(8),
                      max_denominator=6),
       n=st.integers(-4, 4))
def test_b_coef_even_in_n(g, k, n):
    assert S.b_coef(n, g, k) == S.b_coef(-n, g, k)


def test_band_closure_on_curves():
    for (M, g) in [(0, Fraction(1)), (1, Fraction(1)), (2, Fraction(1, 2)),
                   (3, Fraction(1, 3)), (5, Fraction(3, 4))]:
        sysM = S.build_system(S.CurveParams(M, g))
        assert sysM.a(-M) == 0


# ---- matrices ----

def test_reduced_matrix_anchor():
    sysM = S.build_system(S.CurveParams(1, 1))
    assert S.reduced_matrix(sysM) == [[Fraction(3), Fraction(-2)],
                                      [Fraction(-1), Fraction(2)]]


def test_full_matrix_anchor_and_split():
    sysM = S.build_system(S.CurveParams(1, 1))
    assert S.full_matrix(sysM) == [
        [Fraction(2), Fraction(-1), Fraction(0)],
        [Fraction(-1), Fraction(3), Fraction(-1)],
        [Fraction(0), Fraction(-1), Fraction(2)],
    ]
    # full spectrum = reduced (even) + antisymmetric (odd)
    full = sorted(S.eigen_solve(S.full_matrix(sysM)).values)
    red = S.eigen_solve(S.reduced_matrix(sysM)).values
    anti = S.eigen_solve(S.antisymmetric_matrix(sysM)).values
    merged = sorted(list(red) + list(anti))
    assert np.allclose(full, merged, atol=1e-12)


def test_eigen_solve_certifies_residuals():
    res = S.eigen_solve([[Fraction(3), Fraction(-2)], [Fraction(-1), Fraction(2)]])
    assert sorted(res.values) == [pytest.approx(1.0), pytest.approx(4.0)]
    assert max(res.residuals) < 1e-12


def test_eigen_solve_rejects_complex_spectrum():
    with pytest.raises(S.EigenCertificationError):
        S.eigen_solve([[0.0, -1.0], [1.0, 0.0]])


# ---- closed-form eigenvalues ----

@pytest.mark.parametrize("M", range(0, 11))
def test_reduced_eigenvalues_match_closed_form(M):
    for g in curve_gammas(M, 3, seed=100 + M):
        c = S.CurveParams(M, g)
        res = S.eigen_solve(S.reduced_matrix(S.build_system(c)))
        want = sorted(float(S.eigen_beta_closed(c, l)) for l in range(0, 2 * M + 1, 2))
        got = sorted(res.values)
        scale = max(1.0, max(abs(v) for v in want))
        assert max(abs(a - b) for a, b in zip(got, want)) < 1e-10 * scale


def test_antisymmetric_eigenvalues_are_odd_levels():
    c = S.CurveParams(2, Fraction(1, 2))
    res = S.eigen_solve(S.antisymmetric_matrix(S.build_system(c)))
    want = sorted(float(S.eigen_beta_closed(c, l)) for l in (1, 3))
    assert np.allclose(sorted(res.values), want, atol=1e-12)


@given(M=st.integers(0, 6), lam=st.integers(0, 12))
def test_beta_from_lambda_interpolates_levels(M, lam):
    if lam > 2 * M:
        return
    c = S.CurveParams(M, Fraction(2, 3))
    try:
        S.curve_point(c)
    except S.InvalidCurveError:
        return
    assert S.beta_from_lambda(c, lam) == S.eigen_beta_closed(c, lam)


# ---- selection ----

def test_selection_picks_top_and_nonnegative():
    c = S.CurveParams(1, 1)
    res = S.eigen_solve(S.reduced_matrix(S.build_system(c)))
    bt = S.select_beta_tilde(res, c)
    assert bt == pytest.approx(4.0, abs=1e-12)
    assert bt == pytest.approx(float(S.beta_tilde_on_curve(c)), abs=1e-10)


@pytest.mark.parametrize("M", range(1, 7))
def test_selection_agrees_with_piecewise_rule(M):
    gM = S.gamma_transition(M)
    for g in (Fraction(1, 32), Fraction(3, 4), Fraction(3, 2)):
        if abs(float(g) - gM) < 1e-3:
            continue
        c = S.CurveParams(M, g)
        try:
            S.curve_point(c)
        except S.InvalidCurveError:
            continue
        res = S.eigen_solve(S.reduced_matrix(S.build_system(c)))
        bt = S.select_beta_tilde(res, c)
        assert bt == pytest.approx(float(S.beta_tilde_on_curve(c)), abs=1e-9)


# ---- eigenfunctions ----

def test_eigenfunction_poly_anchor():
    c = S.CurveParams(1, 1)
    assert S.eigenfunction_poly(c, 0) == [Fraction(1), Fraction(-4, 3)]
    assert S.eigenfunction_poly(c, 2) == [Fraction(0), Fraction(1)]


def test_lpsi_residual_small_on_eigenpairs():
    c = S.CurveParams(1, 1)
    phi = np.linspace(0.15, 2 * np.pi - 0.15, 40)
    for l in (0, 2):
        psi = [float(v) for v in S.eigenfunction_poly(c, l)]
        bt = float(S.eigen_beta_closed(c, l))
        assert S.lpsi_residual(psi, bt, 1.0, 2.0, phi) < 1e-12


def test_lpsi_residual_flags_wrong_eigenvalue():
    c = S.CurveParams(1, 1)
    psi = [float(v) for v in S.eigenfunction_poly(c, 2)]
    phi = np.linspace(0.15, 2 * np.pi - 0.15, 40)
    assert S.lpsi_residual(psi, 3.9, 1.0, 2.0, phi) > 1e-3


@pytest.mark.parametrize("M,g", [(2, Fraction(1, 2)), (3, Fraction(1, 3)),
                                 (4, Fraction(5, 4))])
def test_eigenfunction_satisfies_operator(M, g):
    c = S.CurveParams(M, g)
    p = S.curve_point(c)
    phi = np.linspace(0.2, 2 * np.pi - 0.2, 60)
    for l in range(0, 2 * M + 1, 2):
        psi = [float(v) for v in S.eigenfunction_poly(c, l)]
        bt = float(S.eigen_beta_closed(c, l))
        assert S.lpsi_residual(psi, bt, float(g), float(p.kappa), phi) < 1e-9


def test_eigenvector_matches_eigenfunction_expansion():
    # numeric eigenvector of the reduced matrix == Chebyshev coefficients of
    # the closed-form polynomial profile, up to scale
    c = S.CurveParams(1, 1)
    res = S.eigen_solve(S.reduced_matrix(S.build_system(c)))
    k = int(np.argmax(res.values))
    vec = res.vectors[:, k]
    x = np.linspace(0.0, 1.0, 33)
    prof_vec = S.eigen._angular_profile(vec, x)
    poly = [float(v) for v in S.eigenfunction_poly(c, 2)]
    prof_poly = np.polyval(poly[::-1], x)
    ratio = prof_vec[1:] / prof_poly[1:]
    assert np.max(np.abs(ratio - ratio[0])) < 1e-10
