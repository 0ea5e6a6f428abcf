"""Eichler integral evaluation and modular deficits."""

import math
import random

import pytest
from gmpy2 import mpq

from g2eis.arith import (
    CertifiedComplex,
    CertifiedReal,
    factorial,
    precision,
)
from g2eis.cocycle import ParabolicCocycle, cocycle_eval, period_polynomial
from g2eis.eichler import (
    EichlerIntegral,
    deficit_eval,
    delta_eichler,
    eichler_eval,
)
from g2eis.g2es import TargetUnreachable
from g2eis.modforms import QSeries, delta_q, eisenstein_q, qseries_eval
from g2eis.symd import GroupElement

S = GroupElement(0, -1, 1, 0)
T = GroupElement(1, 1, 0, 1)


@pytest.fixture(scope="module")
def ed():
    return delta_eichler()


@pytest.fixture(scope="module")
def phi():
    return ParabolicCocycle(12, period_polynomial(delta_q(40), 12, prec=256))


def _ball_contains(ball: CertifiedComplex, other: CertifiedComplex) -> bool:
    diff = ball - other
    return abs(complex(diff)) <= ball.rad + 1e-300


def _overlap(x: CertifiedComplex, y: CertifiedComplex) -> bool:
    diff = x - y
    return abs(complex(diff)) <= diff.rad


# ---------------------------------------------------------------------------
# The integral object.
# ---------------------------------------------------------------------------


def test_weight_convention(ed):
    assert ed.k == 12
    assert ed.weight == -10


def test_expansion_extends_and_is_consistent(ed):
    series = ed.expansion(60)
    assert series.order >= 61
    assert ed.coefficient(30) == delta_q(31).coeff(30)
    assert ed.coefficient(1) == 1
    assert ed.coefficient(0) == 0


def test_rejects_non_normalized_supplier():
    with pytest.raises(ValueError, match="normalized"):
        EichlerIntegral(12, lambda n: QSeries([0, 2] + [1] * n))


def test_rejects_odd_or_small_weight():
    with pytest.raises(ValueError, match="even source weight"):
        EichlerIntegral(5, lambda n: delta_q(n + 1))
    with pytest.raises(ValueError, match="even source weight"):
        eichler_eval(delta_q(30), 2, CertifiedComplex.from_exact(0, 1), 0.1)


def test_rejects_supplier_that_rewrites_history():
    calls = []

    def shifty(n_max):
        calls.append(n_max)
        head = [0, 1, -24] if len(calls) == 1 else [0, 1, 99]
        return QSeries(head + [0] * n_max)

    integral = EichlerIntegral(12, shifty)
    with pytest.raises(ValueError, match="changed earlier terms"):
        integral.expansion(40)


def test_weight_mismatch_rejected(ed):
    with pytest.raises(ValueError, match="weight mismatch"):
        eichler_eval(ed, 10, CertifiedComplex.from_exact(0, 1), 1e-10)


# ---------------------------------------------------------------------------
# Pointwise values.
# ---------------------------------------------------------------------------


def test_eval_meets_target(ed):
    for tau, target in [
        (CertifiedComplex.from_exact(mpq(1, 3), mpq(1, 2)), 1e-25),
        (CertifiedComplex.from_exact(0, mpq(1, 20)), 1e-20),
        (CertifiedComplex.from_exact(mpq(-7, 5), 3), 1e-45),
    ]:
        value = eichler_eval(ed, 12, tau, target)
        assert value.rad <= target


def test_requires_upper_half_plane(ed):
    with pytest.raises(ValueError, match="Im tau > 0"):
        eichler_eval(ed, 12, CertifiedComplex.from_exact(1, -1), 1e-10)
    with pytest.raises(ValueError):
        eichler_eval(ed, 12, CertifiedComplex.from_exact(1, 0), 1e-10)


def test_target_must_be_sensible(ed):
    tau = CertifiedComplex.from_exact(0, 1)
    with pytest.raises(ValueError, match="target_error"):
        eichler_eval(ed, 12, tau, 2.0)
    with pytest.raises(ValueError, match="target_error"):
        eichler_eval(ed, 12, tau, 0)


def test_short_series_cannot_reach_tight_target():
    short = delta_q(8)
    tau = CertifiedComplex.from_exact(0, mpq(1, 2))
    with pytest.raises(TargetUnreachable):
        eichler_eval(short, 12, tau, 1e-30)


def test_leading_term_dominates(ed):
    """The n = 1 term carries the value up to exponentially smaller rest."""
    with precision(300):
        two_pi = CertifiedReal.pi() * 2
        pref_mag = CertifiedReal.from_exact(factorial(10)) / two_pi.powi(11)
        # front factor is -i Gamma(11) / (2 pi)^11
        pref = -CertifiedComplex.i_times(CertifiedComplex.from_real(pref_mag))
        gaps = []
        for y in (2, 3, 4):
            tau = CertifiedComplex.from_exact(0, y)
            lead = pref * CertifiedComplex.from_real((-(two_pi * y)).exp())
            value = eichler_eval(ed, 12, tau, 1e-60)
            gaps.append((value - lead).mag_upper())
        # each extra unit of height shrinks the gap by about e^(-4 pi)
        assert gaps[1] < gaps[0] * 1e-4
        assert gaps[2] < gaps[1] * 1e-4


def test_vanishes_towards_cusp(ed):
    value = eichler_eval(ed, 12, CertifiedComplex.from_exact(0, 10), 1e-40)
    assert value.mag_upper() < 1e-20


def test_ball_nesting_under_tightened_truncation(ed):
    tau = CertifiedComplex.from_exact(mpq(2, 7), mpq(3, 4))
    coarse = eichler_eval(ed, 12, tau, 1e-12)
    fine = eichler_eval(ed, 12, tau, 1e-24)
    assert fine.rad < coarse.rad
    assert _ball_contains(coarse, fine)


def test_plain_qseries_input_matches_integral(ed):
    tau = CertifiedComplex.from_exact(mpq(1, 2), 1)
    via_series = eichler_eval(delta_q(200), 12, tau, 1e-30)
    via_object = eichler_eval(ed, 12, tau, 1e-30)
    assert _overlap(via_series, via_object)
    assert abs(complex(via_series - via_object)) < 1e-28


# ---------------------------------------------------------------------------
# Modular deficits.
# ---------------------------------------------------------------------------


def test_deficit_identity_element_exact_zero(ed):
    tau = CertifiedComplex.from_exact(mpq(1, 3), 1)
    for gamma in (GroupElement.identity(), GroupElement.identity().negate()):
        value = deficit_eval(ed, gamma, -10, tau)
        assert complex(value) == 0 and value.rad == 0.0


def test_deficit_of_modular_form_contains_zero():
    def e4(t):
        # |240 sigma_3(n)| <= 240 zeta(3) n^3 <= 289 n^3
        return qseries_eval(eisenstein_q(4, 80), t,
                            tail_bound_exponent=3, tail_bound_scale=289)

    for gamma in (S, GroupElement(1, 0, 1, 1), GroupElement(2, 1, 7, 4)):
        for tau in (CertifiedComplex.from_exact(mpq(1, 3), 1),
                    CertifiedComplex.from_exact(mpq(-1, 4), mpq(3, 2))):
            value = deficit_eval(e4, gamma, 4, tau)
            assert abs(complex(value)) <= value.rad


def test_deficit_at_inversion_matches_period_values(ed, phi):
    tau = CertifiedComplex.from_exact(0, 1)
    deficit = deficit_eval(ed, S, -10, tau, target_error=mpq(1, 10 ** 35))
    period = cocycle_eval(phi, S).eval(tau)
    assert _overlap(deficit, period)
    assert abs(complex(deficit - period)) < 1e-33


def test_deficit_matches_cocycle_on_random_words(ed, phi):
    rng = random.Random(41)
    alphabet = [S, T, T.inverse()]

    def rand_elt():
        g = GroupElement.identity()
        for _ in range(rng.randint(1, 6)):
            g = g * rng.choice(alphabet)
        return g

    taus = [CertifiedComplex.from_exact(mpq(1, 3), 1),
            CertifiedComplex.from_exact(mpq(-2, 5), 2),
            CertifiedComplex.from_exact(mpq(1, 7), mpq(4, 5))]
    for _ in range(5):
        gamma = rand_elt()
        for tau in taus:
            deficit = deficit_eval(ed, gamma, -10, tau,
                                   target_error=mpq(1, 10 ** 35))
            value = cocycle_eval(phi, gamma.inverse()).eval(tau)
            assert _overlap(deficit, value)


def test_deficit_asymmetric_word_distinguishes_conventions(ed, phi):
    """gamma = S T^2 has phi(gamma) != phi(gamma^-1); the deficit must
    land on the inverse side."""
    gamma = S * T * T
    tau = CertifiedComplex.from_exact(mpq(1, 3), 1)
    deficit = deficit_eval(ed, gamma, -10, tau, target_error=mpq(1, 10 ** 35))
    right = cocycle_eval(phi, gamma.inverse()).eval(tau)
    wrong = cocycle_eval(phi, gamma).eval(tau)
    assert _overlap(deficit, right)
    assert abs(complex(deficit - wrong)) > 1.0


def test_deficit_rejects_junk_function():
    tau = CertifiedComplex.from_exact(0, 1)
    with pytest.raises(TypeError, match="EichlerIntegral or a callable"):
        deficit_eval(42, S, -10, tau)


def test_cauchy_riemann_residual(ed):
    """Central finite differences along both axes agree for a holomorphic
    function; the mismatch at step 1e-5 stays under 1e-10."""
    h = mpq(1, 10 ** 5)
    target = mpq(1, 10 ** 20)

    def at(re, im):
        return eichler_eval(
            ed, 12, CertifiedComplex.from_exact(re, im), target)

    with precision(280):
        two_h = CertifiedComplex.from_exact(2 * h)
        d_re = (at(h, 1) - at(-h, 1)) / two_h
        d_im = (at(0, 1 + h) - at(0, 1 - h)) \
            / CertifiedComplex.i_times(two_h)
        residual = d_re - d_im
    assert abs(complex(residual)) < 1e-10
