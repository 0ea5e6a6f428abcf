"""Certified evaluation of Eichler integrals of cusp forms.

The Eichler integral of a weight-k cusp form f = sum c(n) q^n is the
cusp expansion

    I(f)(tau) = -Gamma(k-1) / (2 pi i)^(k-1)
                * sum_{n>=1} c(n) n^(1-k) e(n tau),

a holomorphic function on the upper half plane that transforms with
weight 2-k up to a polynomial deficit of degree k-2.  The deficit under
a group element is what ties these integrals to the parabolic cocycles
in :mod:`.cocycle`: applying the weight-(2-k) slash of gamma and
subtracting the untouched value reproduces the cocycle value at
gamma^-1 as a polynomial in tau.

Tail bounds rest on the Deligne coefficient bound for a normalized
cuspidal eigenform, |c(n)| <= sigma_0(n) n^((k-1)/2) (imported theorem),
together with the elementary divisor-count estimate
sigma_0(n) <= 2 sqrt(n).  The summand of the cusp expansion is then at
most 2 n^(1-k/2) e^(-2 pi n y) <= 2 e^(-2 pi n y) for every n >= 1 and
k >= 2, which feeds straight into the exponential tail machinery of
:mod:`.modforms`.
"""

from __future__ import annotations

import math

from gmpy2 import mpq, mpz

from .arith import (
    DEFAULT_PRECISION,
    GUARD_BITS,
    CertifiedComplex,
    CertifiedReal,
    factorial,
    fadd_up,
    precision,
)
from .g2es import TargetUnreachable
from .modforms import QSeries, delta_q, exp_tail_bound, qseries_eval
from .symd import GroupElement

__all__ = [
    "EichlerIntegral",
    "delta_eichler",
    "eichler_eval",
    "deficit_eval",
]


# ---------------------------------------------------------------------------
# The integral as an object: source form, coefficient access, truncation cap.
# ---------------------------------------------------------------------------


class EichlerIntegral:
    """Eichler integral of a normalized cuspidal eigenform.

    Holds the source weight ``k``, a coefficient supplier, and the
    truncation policy (a hard cap ``n_cap`` on how many expansion terms
    an evaluation may request before giving up).  The supplier is a
    callable ``expand(n_max) -> QSeries`` returning the eigenform's
    q-expansion through at least q^n_max; expansions are cached and only
    ever grow.  Instances are immutable apart from that cache.

    The value decays like e^(-2 pi Im tau) as Im tau grows, so the
    integral vanishes towards the cusp.
    """

    def __init__(self, k: int, expand, n_cap: int = 4_000_000):
        if k % 2 != 0 or k < 4:
            raise ValueError("even source weight k >= 4 required")
        if n_cap < 2:
            raise ValueError("n_cap must allow at least two terms")
        self.k = k
        self.n_cap = n_cap
        self._expand = expand
        self._series = expand(2)
        if not isinstance(self._series, QSeries):
            raise TypeError("coefficient supplier must return a QSeries")
        if self._series.order < 3:
            raise ValueError("coefficient supplier returned too few terms")
        if self._series.coeffs[0] != 0 or self._series.coeffs[1] != 1:
            raise ValueError("normalized cuspidal eigenform required: "
                             "c(0) = 0 and c(1) = 1")

    @property
    def weight(self) -> int:
        """The weight the integral itself transforms with, 2 - k."""
        return 2 - self.k

    def expansion(self, n_max: int) -> QSeries:
        """The source form's q-expansion through at least q^n_max."""
        if n_max > self.n_cap:
            raise TargetUnreachable(
                f"expansion to q^{n_max} exceeds the truncation cap "
                f"{self.n_cap}")
        if self._series.order <= n_max:
            series = self._expand(n_max)
            if series.order <= n_max:
                raise ValueError("coefficient supplier returned fewer terms "
                                 "than requested")
            if series.coeffs[:self._series.order] != self._series.coeffs:
                raise ValueError("coefficient supplier changed earlier terms")
            self._series = series
        return self._series

    def coefficient(self, n: int) -> mpq:
        """The source form's coefficient c(n)."""
        if n < 0:
            raise ValueError("coefficient index must be nonnegative")
        return self.expansion(n).coeff(n)

    def eval(self, tau: CertifiedComplex, target_error,
             prec: int | None = None) -> CertifiedComplex:
        return eichler_eval(self, self.k, tau, target_error, prec=prec)


def delta_eichler(n_cap: int = 4_000_000) -> EichlerIntegral:
    """The Eichler integral of the weight-12 discriminant cusp form."""
    return EichlerIntegral(12, lambda n_max: delta_q(n_max + 1), n_cap=n_cap)


# ---------------------------------------------------------------------------
# Pointwise evaluation with a certified tail.
# ---------------------------------------------------------------------------


def _front_unit(k: int) -> int:
    """Power p with -1/i^(k-1) = i^p, so the prefactor is i^p (k-2)!/(2 pi)^(k-1)."""
    return (2 - (k - 1)) % 4


def _truncation_order(pref_mag: float, y_low: float, target: float,
                      n_cap: int) -> int:
    """Smallest n_max with pref_mag * 2 e^(-2 pi (n_max) y) / (2 pi y)
    comfortably below target/2, by closed-form estimate plus margin.

    The certified check happens later through exp_tail_bound; this only
    has to land close, so plain floats suffice.
    """
    two_pi_y = 2.0 * math.pi * y_low
    # pref_mag * 2 e^(-2 pi n y) / (2 pi y) = target / 2
    ratio = 4.0 * pref_mag / (two_pi_y * target)
    if ratio <= 1.0:
        return 2
    n = int(math.ceil(math.log(ratio) / two_pi_y)) + 2
    return max(2, min(n, n_cap))


def eichler_eval(f, k: int, tau: CertifiedComplex, target_error,
                 prec: int | None = None) -> CertifiedComplex:
    """Certified value of the Eichler integral of f at tau, Im tau > 0.

    ``f`` is an :class:`EichlerIntegral` or the eigenform's q-expansion
    as a :class:`QSeries` (which must then carry enough terms; an
    EichlerIntegral extends itself on demand).  The returned ball's
    radius covers the series tail, via the Deligne bound, and all
    arithmetic rounding; it is at most ``target_error`` or the call
    raises :class:`TargetUnreachable`.
    """
    target = float(target_error)
    if not 0 < target < 1:
        raise ValueError("target_error must lie in (0, 1)")
    if isinstance(f, EichlerIntegral):
        if k != f.k:
            raise ValueError(f"weight mismatch: integral has k = {f.k}")
        n_cap = f.n_cap
    elif isinstance(f, QSeries):
        if k % 2 != 0 or k < 4:
            raise ValueError("even source weight k >= 4 required")
        n_cap = f.order - 1
    else:
        raise TypeError("f must be an EichlerIntegral or a QSeries")
    if prec is None:
        prec = max(DEFAULT_PRECISION, int(-math.log2(target)) + 64)

    with precision(prec + GUARD_BITS):
        y = tau.imag_ball()
        y_low = y.lower()
        if y_low <= 0:
            raise ValueError("eichler_eval requires Im tau > 0")
        two_pi = CertifiedReal.pi() * 2
        pref_mag = CertifiedReal.from_exact(factorial(k - 2)) \
            / two_pi.powi(k - 1)
        pref = CertifiedComplex.from_real(pref_mag)
        for _ in range(_front_unit(k)):
            pref = CertifiedComplex.i_times(pref)

        n_max = _truncation_order(pref_mag.upper(), y_low, target, n_cap)
        while True:
            tail = exp_tail_bound(2, 0, n_max + 1, y, two_pi) * pref_mag
            if tail.upper() <= target / 2:
                break
            if n_max >= n_cap:
                raise TargetUnreachable(
                    f"tail bound stalls at {tail.upper():.3e} with "
                    f"{n_max} terms; target {target:.3e} needs more than "
                    f"the cap {n_cap} allows")
            n_max = min(2 * n_max, n_cap)

        if isinstance(f, EichlerIntegral):
            series = f.expansion(n_max)
        else:
            series = f
        weighted = QSeries(
            [mpq(0)]
            + [series.coeffs[n] / mpz(n) ** (k - 1)
               for n in range(1, n_max + 1)])
        # Summand bound past the truncation: |c(n) n^(1-k)| <= 2 (Deligne
        # plus sigma_0(n) <= 2 sqrt(n); see the module docstring).
        total = pref * qseries_eval(weighted, tau, tail_bound_exponent=0,
                                    tail_bound_scale=2, prec=prec)
        if total.rad <= target:
            return total
        if prec >= 16 * DEFAULT_PRECISION:
            raise TargetUnreachable(
                f"radius {total.rad:.3e} misses target {target:.3e} at "
                f"{prec} bits")
        prec *= 2
        return eichler_eval(f, k, tau, target_error, prec=prec)


# ---------------------------------------------------------------------------
# Modular deficit under a group element.
# ---------------------------------------------------------------------------


def deficit_eval(g, gamma: GroupElement, k: int, tau: CertifiedComplex,
                 target_error=mpq(1, 10 ** 30),
                 prec: int | None = None) -> CertifiedComplex:
    """The weight-k modular deficit of g under gamma:

        (g |_k (gamma - 1))(tau) = (c tau + d)^(-k) g(gamma tau) - g(tau)

    for gamma = (a b; c d).  For the Eichler integral of a weight-k'
    eigenform, evaluated at k = 2 - k', this deficit is a polynomial in
    tau: the parabolic cocycle of :mod:`.cocycle` evaluated at gamma^-1
    (the inversion compensates the left-versus-right cocycle convention;
    the cocycle relation folds values from the left while the slash acts
    from the right).

    ``g`` is an :class:`EichlerIntegral` (evaluated to ``target_error``)
    or any callable tau -> CertifiedComplex with the accuracy budget
    already bound in; errors from g propagate into the returned radius.
    A weight-k modular function has deficit zero, so the returned ball
    then contains 0; for gamma = +-I the deficit is exactly zero at even
    k and the zero ball is returned without evaluating g.
    """
    if isinstance(g, EichlerIntegral):
        evaluate = lambda t: g.eval(t, target_error, prec=prec)
    elif callable(g):
        evaluate = g
    else:
        raise TypeError("g must be an EichlerIntegral or a callable")
    a, b, c, d = gamma.tuple()
    if c == 0 and b == 0 and a == d and k % 2 == 0:
        return CertifiedComplex.from_exact(0)
    wp = (prec if prec is not None else DEFAULT_PRECISION) + GUARD_BITS
    with precision(wp):
        num = tau * a + CertifiedComplex.from_exact(b)
        den = tau * c + CertifiedComplex.from_exact(d)
        moved = num / den
        if moved.imag_ball().lower() <= 0:
            raise ValueError("gamma tau has no certified positive "
                             "imaginary part; tighten tau")
        jpow = den.powi(-k)
        left = jpow * evaluate(moved)
        return left - evaluate(tau)
