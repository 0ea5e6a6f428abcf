"""Tests for the second order Eisenstein coefficient engine."""

import os

import pytest
from gmpy2 import mpfr, mpq

from g2eis.arith import CertifiedComplex, CertifiedReal, _ctx, precision
from g2eis.cocycle import ParabolicCocycle, period_polynomial
from g2eis.g2es import (
    DoubleCosetRep,
    G2ESCoefficients,
    TargetUnreachable,
    coeff_tail_bound,
    coset_reps,
    eval_g2es,
    g2es_coeff_batch_triv_sym,
    g2es_coeff_sym_triv,
    g2es_coeff_triv_sym,
    kernel_available,
    series_tail_bound,
)
from g2eis.modforms import delta_q
from g2eis.symd import GroupElement, PolyD


CTX = _ctx(220)


def ball_sep(a: CertifiedComplex, b: CertifiedComplex) -> float:
    """Upper bound on |mid(a) - mid(b)| as a float."""
    re = abs(float(CTX.sub(a.real_ball().mid, b.real_ball().mid)))
    im = abs(float(CTX.sub(a.imag_ball().mid, b.imag_ball().mid)))
    return max(re, im)


def overlap(a: CertifiedComplex, b: CertifiedComplex) -> bool:
    return ball_sep(a, b) <= a.rad + b.rad


@pytest.fixture(scope="module")
def phi12():
    """Cocycle attached to the weight-12 cusp form (degree 10)."""
    return ParabolicCocycle(12, period_polynomial(delta_q(40), 12, prec=256))


@pytest.fixture(scope="module")
def zero_phi():
    zero = CertifiedComplex.from_exact(0)
    return ParabolicCocycle(12, PolyD([zero] * 11))


# ---------------------------------------------------------------------------
# Coset representatives
# ---------------------------------------------------------------------------


def test_coset_reps_counts_totients():
    reps = coset_reps(6)
    # phi(1) + ... + phi(6) = 1 + 1 + 2 + 2 + 4 + 2
    assert len(reps) == 12
    assert len([r for r in reps if r.gamma.c == 5]) == 4


def test_coset_reps_are_unimodular():
    for rep in coset_reps(12):
        g = rep.gamma
        assert g.a * g.d - g.b * g.c == 1
        assert 0 <= g.d < g.c or (g.c == 1 and g.d == 0)


def test_coset_rep_c1_is_inversion_shaped():
    rep = DoubleCosetRep(1, 0)
    assert (rep.gamma.a, rep.gamma.b, rep.gamma.c, rep.gamma.d) == (0, -1, 1, 0)


def test_coset_rep_validates_inputs():
    with pytest.raises(ValueError):
        DoubleCosetRep(4, 2)  # gcd 2
    with pytest.raises(ValueError):
        DoubleCosetRep(3, 3)  # d out of range
    with pytest.raises(ValueError):
        DoubleCosetRep(0, 0)


# ---------------------------------------------------------------------------
# Coefficients: degenerate cases and gates
# ---------------------------------------------------------------------------


def test_zero_cocycle_gives_exact_zero(zero_phi):
    z = g2es_coeff_triv_sym(14, zero_phi, 10, 3, c_max=10)
    assert z.rad == 0.0
    assert z.real_ball().mid == 0 and z.imag_ball().mid == 0


def test_divergence_gate_triv_sym(phi12):
    # k + 2j - 2l + 2 = 4 + 2 - 24 + 2 < 0 for j = 1, l = 12
    with pytest.raises(ValueError, match="diverges"):
        g2es_coeff_triv_sym(4, phi12, 1, 1, c_max=5)


def test_divergence_gate_sym_triv(phi12):
    with pytest.raises(ValueError, match="diverges"):
        g2es_coeff_sym_triv(4, phi12, 1, 0, c_max=5)


def test_sym_triv_component_above_degree_is_zero(phi12):
    z = g2es_coeff_sym_triv(16, phi12, 2, 11, c_max=8)
    assert z.rad == 0.0 and z.real_ball().mid == 0


def test_coefficient_requires_positive_index(phi12):
    with pytest.raises(ValueError):
        g2es_coeff_triv_sym(14, phi12, 10, 0, c_max=5)


# ---------------------------------------------------------------------------
# Representative independence of the summand
# ---------------------------------------------------------------------------


def test_summand_invariant_under_translation_on_both_sides(phi12):
    from g2eis.g2es import _summand_triv_sym

    base = GroupElement(2, 1, 7, 4)  # det 1, c = 7
    reference = _summand_triv_sym(14, phi12, 10, base, [1, 2, 5], 256)
    T = GroupElement(1, 1, 0, 1)
    for m in (-2, 1, 2):
        for mp in (-1, 2):
            shifted = T ** m * base * T ** mp
            moved = _summand_triv_sym(14, phi12, 10, shifted, [1, 2, 5], 256)
            for z_ref, z_mov in zip(reference, moved):
                assert overlap(z_ref, z_mov)
                assert ball_sep(z_ref, z_mov) < 1e-50


# ---------------------------------------------------------------------------
# Kernel vs ball arithmetic
# ---------------------------------------------------------------------------


@pytest.mark.skipif(not kernel_available(), reason="compiled kernel not built")
def test_kernel_fold_matches_cocycle_values(phi12):
    from array import array

    from g2eis import g2es as mod

    dc = mod._kernel_module()
    re_hi, re_lo, im_hi, im_lo = [], [], [], []
    eps = 0.0
    mag = 0.0
    for coef in phi12.phi_S.coeffs:
        rh, rl, rr = mod._split_dd(coef.real_ball().mid)
        ih, il, ir = mod._split_dd(coef.imag_ball().mid)
        re_hi.append(rh)
        re_lo.append(rl)
        im_hi.append(ih)
        im_lo.append(il)
        eps = max(eps, coef.rad + rr + ir)
        mag = max(mag, abs(rh) + abs(ih))
    arrs = tuple(array("d", xs) for xs in (re_hi, re_lo, im_hi, im_lo))

    for c, dlow in [(1, 0), (2, 1), (3, 2), (12, 5), (97, 31), (293, 121)]:
        a = pow(dlow, -1, c) if c > 1 else 0
        b = (a * dlow - 1) // c
        gamma = GroupElement(a, b, c, dlow)
        want = phi12.value(gamma.inverse())
        vrh, vrl, vih, vil, err, _ = dc.fold_value(c, dlow, 10, *arrs, eps, mag)
        for i, coef in enumerate(want.coeffs):
            got_re = abs(float(CTX.sub(CTX.sub(coef.real_ball().mid,
                                               mpfr(vrh[i])), mpfr(vrl[i]))))
            got_im = abs(float(CTX.sub(CTX.sub(coef.imag_ball().mid,
                                               mpfr(vih[i])), mpfr(vil[i]))))
            assert max(got_re, got_im) <= err + coef.rad + 1e-280


@pytest.mark.skipif(not kernel_available(), reason="compiled kernel not built")
@pytest.mark.parametrize("k", [8, 14])
def test_kernel_and_ball_batches_agree(phi12, k):
    ns = [1, 2, 3, 4]
    fast = g2es_coeff_batch_triv_sym(k, phi12, 10, ns, c_max=50,
                                     backend="kernel")
    slow = g2es_coeff_batch_triv_sym(k, phi12, 10, ns, c_max=50,
                                     backend="ball")
    for zf, zs in zip(fast, slow):
        assert overlap(zf, zs)
        # midpoints should in fact be far closer than the analytic tails
        assert ball_sep(zf, zs) <= 1e-12 * (1.0 + abs(float(zf.imag_ball().mid)))


def test_backend_env_override(phi12, monkeypatch):
    from g2eis import g2es as mod

    monkeypatch.setenv("G2EIS_BACKEND", "ball")
    assert mod._backend_choice(None) == "ball"
    monkeypatch.setenv("G2EIS_BACKEND", "bogus")
    with pytest.raises(ValueError):
        mod._backend_choice(None)
    monkeypatch.delenv("G2EIS_BACKEND")
    assert mod._backend_choice(None) == "auto"
    assert mod._backend_choice("kernel") == "kernel"


def test_kernel_request_fails_loudly_when_missing(phi12, monkeypatch):
    from g2eis import g2es as mod

    monkeypatch.setattr(mod, "_kernel_module", lambda: None)
    with pytest.raises(RuntimeError, match="kernel"):
        g2es_coeff_batch_triv_sym(14, phi12, 10, [1], c_max=5,
                                  backend="kernel")


# ---------------------------------------------------------------------------
# Truncation tails
# ---------------------------------------------------------------------------


def test_coeff_tail_bound_dominates_observed_tail(phi12):
    k, j, l = 14, 10, 12
    ns = [1, 2, 3]
    small = g2es_coeff_batch_triv_sym(k, phi12, j, ns, c_max=4,
                                      backend="auto")
    big = g2es_coeff_batch_triv_sym(k, phi12, j, ns, c_max=64,
                                    backend="auto")
    per_n = coeff_tail_bound(k, j, l, 4)
    for n, (zs, zb) in enumerate(zip(small, big), start=1):
        observed = ball_sep(zs, zb)
        allowed = float(per_n.upper()) * n ** (k + j - 1) + zs.rad + zb.rad
        assert observed <= allowed


def test_coeff_tail_bound_decreases_in_cutoff():
    a = coeff_tail_bound(14, 10, 12, 2)
    b = coeff_tail_bound(14, 10, 12, 8)
    assert float(b.upper()) < float(a.upper())


def test_series_tail_bound_rejects_pre_monotone_cutoff():
    y = CertifiedReal.from_exact(1)
    with pytest.raises(ValueError):
        series_tail_bound(14, 10, 12, 2, y)


def test_series_tail_bound_shrinks_rapidly():
    y = CertifiedReal.from_exact(1)
    t40 = float(series_tail_bound(14, 10, 12, 40, y).upper())
    t80 = float(series_tail_bound(14, 10, 12, 80, y).upper())
    assert t80 < t40 * 1e-30


# ---------------------------------------------------------------------------
# Ball nesting under refinement
# ---------------------------------------------------------------------------


def test_coefficients_nest_under_doubled_cutoff(phi12):
    for k in (8, 14):
        coarse = g2es_coeff_triv_sym(k, phi12, 10, 2, c_max=6)
        fine = g2es_coeff_triv_sym(k, phi12, 10, 2, c_max=48)
        assert ball_sep(coarse, fine) + fine.rad <= coarse.rad


def test_sym_triv_nests_under_doubled_cutoff(phi12):
    coarse = g2es_coeff_sym_triv(16, phi12, 2, 3, c_max=6)
    fine = g2es_coeff_sym_triv(16, phi12, 2, 3, c_max=24)
    assert ball_sep(coarse, fine) + fine.rad <= coarse.rad


# ---------------------------------------------------------------------------
# Batch container and cache
# ---------------------------------------------------------------------------


def test_coefficient_container_shape_checks(phi12):
    batch = G2ESCoefficients.compute_triv_sym(14, phi12, 10, n_max=3, c_max=6)
    assert len(batch) == 3
    z = batch.entry(2)
    assert isinstance(z, CertifiedComplex)
    with pytest.raises(ValueError):
        batch.entry(4)
    with pytest.raises(ValueError):
        batch.entry(1, r=2)  # r only meaningful for the other shape


def test_eval_cache_reuses_and_extends(phi12):
    from g2eis import g2es as mod

    mod._EVAL_CACHE.clear()
    first = mod._cached_coeffs(14, phi12, 10, 3, 8, 256, "auto")
    again = mod._cached_coeffs(14, phi12, 10, 2, 8, 256, "auto")
    assert ball_sep(first[1], again[1]) == 0.0
    wider = mod._cached_coeffs(14, phi12, 10, 2, 16, 256, "auto")
    assert wider[1].rad < again[1].rad


# ---------------------------------------------------------------------------
# Series evaluation
# ---------------------------------------------------------------------------


def test_eval_g2es_zero_cocycle_is_zero(zero_phi):
    tau = CertifiedComplex.from_exact(0, 2)
    z = eval_g2es(14, zero_phi, 10, tau, target_error=1e-20)
    assert z.rad == 0.0 and z.real_ball().mid == 0


def test_eval_g2es_requires_upper_half_plane(phi12):
    with pytest.raises(ValueError):
        eval_g2es(14, phi12, 10, CertifiedComplex.from_exact(1, -2),
                  target_error=1e-10)


def test_eval_g2es_unreachable_target_raises(phi12):
    tau = CertifiedComplex.from_exact(0, 2)
    with pytest.raises(TargetUnreachable):
        eval_g2es(14, phi12, 10, tau, target_error=1e-280)


def test_eval_g2es_meets_target_and_nests(phi12):
    tau = CertifiedComplex.from_exact(mpq(1, 2), 2)
    coarse = eval_g2es(14, phi12, 10, tau, target_error=1e-12)
    fine = eval_g2es(14, phi12, 10, tau, target_error=1e-18)
    assert coarse.rad <= 1e-12
    assert fine.rad <= 1e-18
    assert ball_sep(coarse, fine) <= coarse.rad + fine.rad


@pytest.mark.skipif(not kernel_available(), reason="compiled kernel not built")
def test_eval_g2es_backends_agree(phi12):
    tau = CertifiedComplex.from_exact(mpq(1, 3), 3)
    a = eval_g2es(14, phi12, 10, tau, target_error=1e-14, backend="kernel")
    b = eval_g2es(14, phi12, 10, tau, target_error=1e-14, backend="ball")
    assert overlap(a, b)
    assert ball_sep(a, b) <= 2e-14
