"""Vector-valued Eisenstein expansions, certified evaluation, tail estimate."""

import pytest
from gmpy2 import mpq

from g2eis.arith import (
    CertifiedComplex,
    CertifiedReal,
    bernoulli,
    binomial,
    factorial,
    precision,
)
from g2eis.eisenstein import (
    VVQSeries,
    classical_eis_tail,
    eval_vv_eis,
    vv_eis_coeffs,
)
from g2eis.modforms import QSeries, eisenstein_q, qseries_eval, sigma_table
from g2eis.symd import S, from_xtau_basis, pi_low, sym_action


def test_vv_eis_rejects_bad_args():
    with pytest.raises(ValueError):
        vv_eis_coeffs(7, 2, 0, 10)  # odd weight
    with pytest.raises(ValueError):
        vv_eis_coeffs(8, 3, 0, 10)  # odd d
    with pytest.raises(ValueError):
        vv_eis_coeffs(6, 4, 0, 10)  # k <= 2 + d
    with pytest.raises(ValueError):
        vv_eis_coeffs(8, 2, 3, 10)  # j out of range
    with pytest.raises(ValueError):
        vv_eis_coeffs(8, 2, 0, 0)


def test_classical_case_is_weight_four_series():
    N = 30
    vv = vv_eis_coeffs(4, 0, 0, N)
    assert vv.d == 0
    assert vv.prefactor_powers == (0,)
    assert vv.components[0] == eisenstein_q(4, N)


def test_top_component_case_is_shifted_classical():
    N = 25
    for k, d in ((8, 4), (6, 2), (12, 6)):
        vv = vv_eis_coeffs(k, d, d, N)
        assert vv.components[d] == eisenstein_q(k + d, N)
        assert vv.prefactor_powers[d] == 0
        assert all(vv.components[r].is_zero() for r in range(d))


def test_components_below_j_vanish_and_constant_term():
    vv = vv_eis_coeffs(10, 4, 2, 20)
    for r in range(2):
        assert vv.components[r].is_zero()
    # constant term is exactly (X - tau)^j
    for r in range(5):
        assert vv.coeff(r, 0) == (1 if r == 2 else 0)


def test_pi_low_projection_is_classical_series():
    N = 22
    for k, d, j in ((8, 2, 0), (8, 2, 1), (8, 2, 2), (10, 4, 1), (12, 6, 3)):
        vv = vv_eis_coeffs(k, d, j, N)
        assert pi_low(vv.components, j) == eisenstein_q(k + 2 * j - d, N)


def test_coefficients_match_display_after_zeta_cancellation():
    """The displayed coefficient binom(d-j, r-j) (-2 pi i)^(w+r-j) /
    ((w+r-j-1)! zeta(w)) n^(r-j) sigma_{w-1}(n), with the even zeta value
    zeta(w) = (-1)^(w/2+1) B_w (2 pi)^w / (2 w!), reduces to the exact
    rational -2 w! binom(d-j, p) / (B_w (w+p-1)!) n^p sigma_{w-1}(n)
    relative to the stored unit (-2 pi i)^p."""
    k, d, j, N = 8, 4, 2, 15
    w = k + 2 * j - d
    vv = vv_eis_coeffs(k, d, j, N)
    sig = sigma_table(w - 1, N)
    for r in range(j, d + 1):
        p = r - j
        lead = mpq(-2) * factorial(w) * binomial(d - j, p) \
            / (bernoulli(w) * factorial(w + p - 1))
        for n in range(1, N):
            assert vv.coeff(r, n) == lead * mpq(n) ** p * sig[n]
            assert isinstance(vv.coeff(r, n), type(mpq(0)))


def test_vvqseries_validation():
    with pytest.raises(ValueError):
        VVQSeries(1, [QSeries.zero(5)])  # wrong component count
    with pytest.raises(ValueError):
        VVQSeries(1, [QSeries.zero(5), QSeries.zero(6)])  # ragged orders
    with pytest.raises(ValueError):
        VVQSeries(0, [QSeries.zero(5)], [-1])


# -- the classical tail estimate ----------------------------------------------


def test_tail_decreasing_in_cutoff_and_vanishing():
    y = CertifiedReal.from_exact(1)
    uppers = [classical_eis_tail(0, 3, N, y).upper() for N in (20, 40, 80)]
    assert uppers[0] > uppers[1] > uppers[2] > 0
    assert classical_eis_tail(0, 3, 200, y).upper() < 1e-100


def test_tail_precondition_enforced():
    y = CertifiedReal.from_exact(1)
    with pytest.raises(ValueError):
        classical_eis_tail(40, 31, 2, y)  # N below the monotone range
    with pytest.raises(ValueError):
        classical_eis_tail(-1, 3, 20, y)
    with pytest.raises(ValueError):
        classical_eis_tail(0, 1, 20, y)
    with pytest.raises(ValueError):
        classical_eis_tail(0, 3, 20, CertifiedReal.from_exact(-1))


def test_tail_dominates_brute_force_sum():
    """(a, b, N, y) = (0, 3, 20, 1): the actual series tail, summed far past
    the point of underflow, stays below the certified bound."""
    y = CertifiedReal.from_exact(1)
    bound = classical_eis_tail(0, 3, 20, y)
    sig = sigma_table(3, 400)
    with precision(288):
        two_pi_y = CertifiedReal.pi() * 2
        acc = CertifiedReal.from_exact(0)
        for n in range(20, 400):
            acc = acc + (-(two_pi_y * n)).exp() * sig[n]
    assert acc.upper() <= bound.upper()
    assert acc.upper() > 0


def test_tail_dominates_on_parameter_grid():
    """Ten (a, b) cases: empirical tails never exceed the estimate."""
    grid = [(0, 3), (1, 3), (0, 5), (2, 7), (1, 9),
            (0, 7), (3, 5), (2, 5), (1, 7), (4, 7)]
    N = 12
    y = CertifiedReal.from_exact(1)
    with precision(288):
        two_pi_y = CertifiedReal.pi() * 2
        for a, b in grid:
            bound = classical_eis_tail(a, b, N, y)
            sig = sigma_table(b, 300)
            acc = CertifiedReal.from_exact(0)
            for n in range(N, 300):
                acc = acc + (-(two_pi_y * n)).exp() * (sig[n] * mpq(n) ** a)
            assert acc.upper() <= bound.upper()


# -- certified evaluation ------------------------------------------------------


def _tau(re, im):
    return CertifiedComplex.from_exact(mpq(re), mpq(im))


def test_eval_classical_matches_qseries_eval():
    tau = _tau(0, 1)
    for k in (4, 6):
        val = eval_vv_eis(k, 0, 0, tau, mpq(1, 10**30))
        direct = qseries_eval(eisenstein_q(k, 80), tau,
                              tail_bound_exponent=k - 1,
                              tail_bound_scale=600)
        assert val.coeffs[0].overlaps(direct)
        assert val.coeffs[0].rad <= 1e-30


def test_eval_slash_invariance_at_inversion():
    """(c tau + d)^-k sym(S^-1) F(S tau) recovers F(tau) within radii."""
    k, d, j = 8, 2, 1
    for re, im in ((0, 1), (0, 2)):
        tau = _tau(re, im)
        with precision(320):
            s_tau = CertifiedComplex.from_exact(-1) / tau
            p_here = from_xtau_basis(
                eval_vv_eis(k, d, j, tau, mpq(1, 10**25)).coeffs, tau)
            p_image = from_xtau_basis(
                eval_vv_eis(k, d, j, s_tau, mpq(1, 10**25)).coeffs, s_tau)
            pulled = sym_action(S.inverse(), p_image).scale(tau.powi(-k))
            for a, b in zip(pulled.coeffs, p_here.coeffs):
                assert a.overlaps(b)


def test_eval_constant_term_dominates_high_on_the_axis():
    k, d, j = 8, 2, 1
    val = eval_vv_eis(k, d, j, _tau(0, 20), mpq(1, 10**40))
    for r in range(d + 1):
        c = val.coeffs[r]
        if r == j:
            assert (c - 1).mag_upper() < 1e-30
        else:
            assert c.mag_upper() < 1e-30


def test_eval_unreachable_target_raises():
    with pytest.raises(ValueError):
        eval_vv_eis(8, 2, 1, _tau(0, 1), mpq(1, 10**200), prec=64)
    with pytest.raises(ValueError):
        eval_vv_eis(8, 2, 1, _tau(0, 1), 0)
    with pytest.raises(ValueError):
        eval_vv_eis(8, 2, 1, _tau(0, -1), mpq(1, 10**10))
