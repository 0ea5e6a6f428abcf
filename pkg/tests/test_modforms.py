"""Tests for exact q-expansions, bases, and decompositions."""

import math

import pytest
from gmpy2 import mpq

from g2eis import arith
from g2eis.arith import CertifiedComplex, zeta_real
from g2eis.modforms import (
    InconsistentSystem,
    QSeries,
    RankDeficientGenerators,
    cusp_monomials,
    decompose_delta_power,
    delta_q,
    delta_q_product,
    dims,
    eisenstein_q,
    miller_basis,
    qseries_eval,
    sigma_table,
    solve_in_span,
)

# ---------------------------------------------------------------------------
# QSeries basics
# ---------------------------------------------------------------------------


def test_qseries_truncation_and_access():
    s = QSeries([1, 2, 3])
    assert s.coeff(2) == 3
    with pytest.raises(IndexError):
        s.coeff(3)
    with pytest.raises(IndexError):
        s[-1]


def test_qseries_arithmetic_truncates_to_min_order():
    a = QSeries([1, 1, 1, 1])
    b = QSeries([1, 2])
    assert (a + b).order == 2
    assert (a * b).order == 2
    assert (a * b).coeffs == [mpq(1), mpq(3)]


def test_qseries_pow_matches_repeated_product():
    s = QSeries([1, 3, -2, 5, 7])
    assert s ** 3 == s * s * s
    assert s ** 1 == s
    assert s ** 0 == QSeries.one(5)


# ---------------------------------------------------------------------------
# Eisenstein and discriminant expansions
# ---------------------------------------------------------------------------


def test_sigma_table_matches_naive_divisor_sum():
    t = sigma_table(3, 20)
    for n in range(1, 20):
        assert t[n] == sum(d ** 3 for d in range(1, n + 1) if n % d == 0)


def test_eisenstein_first_coefficients():
    e4 = eisenstein_q(4, 3)
    assert e4.coeffs == [mpq(1), mpq(240), mpq(2160)]
    e6 = eisenstein_q(6, 2)
    assert e6.coeffs == [mpq(1), mpq(-504)]
    for k in (4, 6, 8, 10, 12, 14):
        assert eisenstein_q(k, 5).coeff(0) == 1


def test_eisenstein_normalizer_matches_zeta_route():
    # the q-coefficient normalizer -2k/B_k must equal (2 pi)^k/((k-1)! zeta(k))
    # up to the sign (-1)^(k/2) coming from i^k; checked as ball containment
    for k in (4, 6, 8, 12):
        target = mpq(-2 * k) / __import__("g2eis.arith", fromlist=["bernoulli"]).bernoulli(k)
        with arith.precision(200):
            two_pi = arith.CertifiedReal.pi() * 2
            rho = two_pi.powi(k) / (
                arith.CertifiedReal.from_exact(math.factorial(k - 1))
                * zeta_real(k, 160))
            sign = 1 if (k // 2) % 2 == 0 else -1
            assert (rho * sign).contains_exact(target), k


def test_eisenstein_rejects_bad_weights():
    for k in (2, 3, 5, 0, -4):
        with pytest.raises(ValueError):
            eisenstein_q(k, 4)


def test_delta_two_constructions_agree():
    assert delta_q(25) == delta_q_product(25)


def test_delta_known_coefficients():
    d = delta_q(6)
    assert d.coeff(0) == 0
    assert d.coeff(1) == 1
    assert d.coeff(2) == -24
    assert d.coeff(3) == 252
    assert d.coeff(4) == -1472
    assert d.coeff(5) == 4830


def test_e4_cubed_minus_e6_squared_identity():
    N = 16
    lhs = eisenstein_q(4, N) ** 3 - eisenstein_q(6, N) ** 2
    assert lhs == delta_q(N) * 1728


def test_e8_equals_e4_squared():
    assert eisenstein_q(8, 12) == eisenstein_q(4, 12) ** 2


# ---------------------------------------------------------------------------
# Dimensions and bases
# ---------------------------------------------------------------------------


def test_dims_known_values():
    assert dims(50) == (4, 3)
    assert dims(14) == (1, 0)
    assert dims(24) == (3, 2)
    assert dims(0) == (1, 0)
    assert dims(2) == (0, 0)
    assert dims(12) == (2, 1)


def test_dims_against_monomial_count():
    # dim S_k equals the number of monomial products D E4^a E6^b of weight k,
    # and dim M_k the number with 4a + 6b = k; independent combinatorial oracle
    for k in range(4, 80, 2):
        m, s = dims(k)
        assert s == len(cusp_monomials(k)), k
        count_m = sum(1 for b in range((k // 6) + 1) if (k - 6 * b) % 4 == 0
                      and k - 6 * b >= 0)
        assert m == count_m, k


def test_dims_rejects_odd():
    with pytest.raises(ValueError):
        dims(13)


def test_miller_basis_s12_is_delta():
    basis = miller_basis(12, 8)
    assert len(basis) == 1
    assert basis[0] == delta_q(8)


def test_miller_basis_s14_empty():
    assert miller_basis(14, 6) == []


def test_miller_basis_echelon_property():
    for k in (24, 36, 50):
        sdim = dims(k)[1]
        basis = miller_basis(k, dims(k)[0] + 6)
        for i, g in enumerate(basis, start=1):
            assert g.coeff(0) == 0
            for j in range(1, sdim + 1):
                assert g.coeff(j) == (1 if j == i else 0), (k, i, j)


def test_s50_reference_basis_in_span_unit_triangular():
    basis = miller_basis(50, 10)
    f1 = QSeries([0, 1, -2064, 1358532] + [0] * 6)
    f2 = QSeries([0, 0, 1, -1080] + [0] * 6)
    f3 = QSeries([0, 0, 0, 1] + [0] * 6)
    rows = []
    for f in (f1, f2, f3):
        sol = solve_in_span(f.truncate(4), [g.truncate(4) for g in basis])
        rows.append(sol)
    assert rows[0] == [1, -2064, 1358532]
    assert rows[1] == [0, 1, -1080]
    assert rows[2] == [0, 0, 1]


# ---------------------------------------------------------------------------
# solve_in_span
# ---------------------------------------------------------------------------


def test_solve_trivial_first_generator():
    gens = [eisenstein_q(4, 8), eisenstein_q(6, 8)]
    assert solve_in_span(gens[0], gens) == [1, 0]


def test_solve_delta_in_e12_e4e8():
    N = 8
    gens = [eisenstein_q(12, N), eisenstein_q(4, N) * eisenstein_q(8, N)]
    sol = solve_in_span(delta_q(N), gens)
    recon = gens[0] * sol[0] + gens[1] * sol[1]
    assert recon == delta_q(N)
    assert sol[0] + sol[1] == 0  # cuspidal constant term


def test_solve_inconsistent_constant_term():
    target = QSeries([1, 5, 7, 0, 0])
    gens = [delta_q(5), delta_q(5) * 3]
    with pytest.raises(InconsistentSystem):
        solve_in_span(target, [delta_q(5), eisenstein_q(4, 5) * 0 + delta_q(5) * 2])
    with pytest.raises((InconsistentSystem, RankDeficientGenerators)):
        solve_in_span(target, gens)


def test_solve_rank_deficient_reported():
    d = delta_q(6)
    with pytest.raises(RankDeficientGenerators):
        solve_in_span(d * 2, [d, d * 1])


# ---------------------------------------------------------------------------
# decompose_delta_power
# ---------------------------------------------------------------------------


def test_decompose_h2_exact_reference_values():
    dec = decompose_delta_power(2, 6)
    c = dec.coefficients()
    assert c[0] == mpq(70933884092880847, 655667091203604480000)
    assert c[1] == mpq(-1912212380581, 26083744727040000)
    assert c[2] == mpq(-97825033079, 2804992903544832)
    assert [t[1:] for t in dec.terms] == [(0, 24), (4, 20), (6, 18)]


def test_decompose_reconstructs_delta_power():
    for h in (1, 2, 3, 5):
        N = dims(12 * h)[0] + 4
        dec = decompose_delta_power(h, N)
        assert dec.reconstruct(N) == delta_q(N) ** h, h


def test_decompose_constant_terms_cancel():
    for h in (1, 2, 3, 4, 5):
        dec = decompose_delta_power(h, dims(12 * h)[0] + 3)
        assert sum(dec.coefficients()) == 0, h


def test_decompose_h5_matches_printed_approximations():
    dec = decompose_delta_power(5, 10)
    printed = [-2.7768336e-7, 1.41222683e-7, 9.5721307e-8,
               3.3445439e-8, 6.67556586e-9, 6.1836892e-10]
    c = dec.coefficients()
    assert len(c) == 6
    assert [t[1:] for t in dec.terms] == [
        (0, 60), (4, 56), (6, 54), (8, 52), (10, 50), (12, 48)]
    for got, want in zip(c, printed):
        assert abs(float(got) - want) <= abs(want) * 1e-6, (got, want)


# ---------------------------------------------------------------------------
# qseries_eval
# ---------------------------------------------------------------------------


def _tau(re, im):
    return CertifiedComplex.from_exact(re, im)


def test_eval_zero_series_zero_radius():
    z = qseries_eval(QSeries.zero(5), _tau(mpq(1, 3), 2),
                     tail_bound_exponent=3, tail_bound_scale=0)
    assert complex(z.mid) == 0
    assert z.rad == 0.0


def test_eval_requires_growth_bound():
    with pytest.raises(ValueError):
        qseries_eval(delta_q(5), _tau(0, 1))


def test_eval_requires_upper_half_plane():
    with pytest.raises(ValueError):
        qseries_eval(delta_q(5), _tau(0, -1), tail_bound_exponent=7)


def test_eval_e4_doubled_truncation_overlaps():
    # |c_n(E4)| = 240 sigma_3(n) <= 240 n^4
    a = qseries_eval(eisenstein_q(4, 12), _tau(0, 1),
                     tail_bound_exponent=4, tail_bound_scale=240)
    b = qseries_eval(eisenstein_q(4, 24), _tau(0, 1),
                     tail_bound_exponent=4, tail_bound_scale=240)
    assert a.overlaps(b)
    assert b.rad < a.rad


def test_eval_delta_positive_on_imaginary_axis():
    # Deligne: |c(D; n)| <= sigma_0(n) n^5.5 <= n^6.5
    v = qseries_eval(delta_q(30), _tau(0, 2), tail_bound_exponent=6.5)
    re = v.real_ball()
    assert re.lower() > 0
    assert v.imag_ball().contains_exact(0)


def test_eval_e6_vanishes_at_i():
    v = qseries_eval(eisenstein_q(6, 40), _tau(0, 1),
                     tail_bound_exponent=6, tail_bound_scale=1008)
    assert v.contains_exact(0, 0)
    assert v.rad < 1e-6


def test_eval_e4_at_i_against_theta_oracle():
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 40
    qn = mpmath.exp(-mpmath.pi)  # nome at tau = i
    th2 = mpmath.jtheta(2, 0, qn)
    th3 = mpmath.jtheta(3, 0, qn)
    th4 = mpmath.jtheta(4, 0, qn)
    ref = (th2 ** 8 + th3 ** 8 + th4 ** 8) / 2
    v = qseries_eval(eisenstein_q(4, 40), _tau(0, 1),
                     tail_bound_exponent=4, tail_bound_scale=240)
    assert abs(float(v.mid.real) - float(ref)) < 1e-12
    assert v.rad < 1e-12


def test_eval_delta_against_theta_oracle():
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 40
    tau = mpmath.mpc(0.5, 1)
    qn = mpmath.exp(1j * mpmath.pi * tau)
    ref = (mpmath.jtheta(2, 0, qn) * mpmath.jtheta(3, 0, qn)
           * mpmath.jtheta(4, 0, qn)) ** 8 / 256
    v = qseries_eval(delta_q(40), _tau(mpq(1, 2), 1), tail_bound_exponent=6.5)
    assert abs(complex(v.mid) - complex(ref)) < 1e-12, (v, ref)
