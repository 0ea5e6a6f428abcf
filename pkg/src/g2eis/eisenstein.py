"""Vector-valued Eisenstein series for the symmetric-power action.

The weight-k series with lowest surviving component j has an expansion
sum_r (X - tau)^r sum_n c(n)_r e(n tau) whose coefficients are exact
rationals once the transcendental unit (-2 pi i)^(r-j) is factored out of
component r.  This module produces those exact expansions, certified point
evaluations, and the classical tail estimate used to truncate them.
"""

from __future__ import annotations

import math

from gmpy2 import mpq

from .arith import (
    CertifiedComplex,
    CertifiedReal,
    DEFAULT_PRECISION,
    GUARD_BITS,
    bernoulli,
    binomial,
    factorial,
    fadd_up,
    inc_gamma_upper_int,
    precision,
)
from .modforms import QSeries, sigma_table
from .symd import PolyD


class VVQSeries:
    """Truncated Fourier expansion of a polynomial-valued modular form.

    `components[r]` holds the q-expansion paired with (X - tau)^r, stored as
    exact rationals; the mathematical coefficient carries the extra factor
    (-2 pi i)^prefactor_powers[r].  All components share one truncation
    order.
    """

    __slots__ = ("d", "components", "prefactor_powers")

    def __init__(self, d: int, components, prefactor_powers=None):
        components = tuple(components)
        if d < 0 or len(components) != d + 1:
            raise ValueError("need one component per power 0..d")
        orders = {c.order for c in components}
        if len(orders) != 1:
            raise ValueError("components must share a truncation order")
        if prefactor_powers is None:
            prefactor_powers = (0,) * (d + 1)
        prefactor_powers = tuple(int(p) for p in prefactor_powers)
        if len(prefactor_powers) != d + 1 or any(p < 0 for p in prefactor_powers):
            raise ValueError("need one nonnegative prefactor power per component")
        self.d = d
        self.components = components
        self.prefactor_powers = prefactor_powers

    @property
    def order(self) -> int:
        return self.components[0].order

    def coeff(self, r: int, n: int) -> mpq:
        """Stored rational coefficient of (X - tau)^r e(n tau)."""
        if not 0 <= r <= self.d:
            raise ValueError("component index out of range")
        return self.components[r].coeff(n)

    def __repr__(self):
        return (f"VVQSeries(d={self.d}, order={self.order}, "
                f"prefactor_powers={self.prefactor_powers})")


def _validate_vv_eis_args(k: int, d: int, j: int) -> None:
    if d < 0 or d % 2 != 0 or k % 2 != 0:
        raise ValueError("even k and even d >= 0 required")
    if k <= 2 + d:
        raise ValueError("weight too small: k > 2 + d required for convergence")
    if not 0 <= j <= d:
        raise ValueError("component index j out of range")


def vv_eis_coeffs(k: int, d: int, j: int, N: int) -> VVQSeries:
    """Exact expansion of the weight-k symmetric-power Eisenstein series
    whose constant term is (X - tau)^j, truncated before q^N.

    Component r (j <= r <= d) carries, relative to the unit
    (-2 pi i)^(r-j), the rational coefficients
    binom(d-j, r-j) * rho_w * (w-1)!/(w+r-j-1)! * n^(r-j) * sigma_{w-1}(n)
    with w = k + 2j - d and rho_w the classical Eisenstein normalizer
    -2w / B_w; components below j vanish.
    """
    _validate_vv_eis_args(k, d, j)
    if N < 1:
        raise ValueError("need at least the constant term")
    w = k + 2 * j - d
    rho = mpq(-2 * w) / bernoulli(w)
    sig = sigma_table(w - 1, N) if N > 1 else [mpq(0)]
    components = []
    powers = []
    for r in range(d + 1):
        if r < j:
            components.append(QSeries.zero(N))
            powers.append(0)
            continue
        p = r - j
        scale = rho * binomial(d - j, p) * factorial(w - 1) / factorial(w + p - 1)
        coeffs = [mpq(0)] * N
        if r == j:
            coeffs[0] = mpq(1)
        for n in range(1, N):
            coeffs[n] = scale * sig[n] * mpq(n) ** p
        components.append(QSeries(coeffs))
        powers.append(p)
    return VVQSeries(d, components, powers)


def classical_eis_tail(a: int, b: int, N: int, y: CertifiedReal,
                       prec: int = DEFAULT_PRECISION) -> CertifiedReal:
    """Certified bound for |sum_{n >= N} n^a sigma_b(n) e(n tau)|, Im tau = y:

        b * Gamma(a+b+1, 2 pi (N-1) y) / ((b-1) (2 pi y)^(a+b+1)),

    valid once N >= 1 + (a+b)/(2 pi y) so the summand is decreasing."""
    if a < 0 or b <= 1:
        raise ValueError("a >= 0 and b > 1 required")
    with precision(prec + GUARD_BITS):
        y = CertifiedReal._coerce(y)
        if y.lower() <= 0:
            raise ValueError("positive imaginary part required")
        two_pi_y = CertifiedReal.pi() * 2 * y
        threshold = (a + b) / two_pi_y
        if N < 1 + threshold.upper():
            raise ValueError(
                f"truncation order {N} below the monotone range; "
                f"need N >= 1 + (a+b)/(2 pi y) ~ {1 + threshold.upper():.3f}")
        gam = inc_gamma_upper_int(a + b + 1, two_pi_y * (N - 1),
                                  prec + GUARD_BITS)
        return gam * b / (two_pi_y.powi(a + b + 1) * (b - 1))


def _component_scales(k: int, d: int, j: int):
    """Magnitude |rational scale| * (2 pi)^p per component r = j..d, as balls,
    together with the divisor-sum parameters (a, b) = (r - j, w - 1)."""
    w = k + 2 * j - d
    rho = mpq(-2 * w) / bernoulli(w)
    two_pi = CertifiedReal.pi() * 2
    out = []
    for p in range(0, d - j + 1):
        scale = abs(rho * binomial(d - j, p)
                    * factorial(w - 1) / factorial(w + p - 1))
        out.append((p, w - 1,
                    CertifiedReal.from_exact(scale) * two_pi.powi(p)))
    return out


def eval_vv_eis(k: int, d: int, j: int, tau: CertifiedComplex,
                target_error, prec: int = DEFAULT_PRECISION) -> PolyD:
    """Certified value of the symmetric-power Eisenstein series at tau,
    returned as coefficients with respect to the (X - tau)^r basis.

    The truncation order is the smallest N whose certified component tails
    all fit under target_error / (d + 1); the summed radii must then land
    under target_error, otherwise the target is declared unreachable at the
    working precision.
    """
    _validate_vv_eis_args(k, d, j)
    tgt = float(target_error)
    if not tgt > 0:
        raise ValueError("target_error must be positive")
    with precision(prec + GUARD_BITS):
        if not isinstance(tau, CertifiedComplex):
            tau = CertifiedComplex.from_exact(tau)
        y = tau.imag_ball()
        if y.lower() <= 0:
            raise ValueError("Im tau > 0 required")
        scales = _component_scales(k, d, j)
        per_component = tgt / (d + 1)

        def tail_upper(N: int) -> float:
            worst = 0.0
            for a, b, amp in scales:
                t = (amp * classical_eis_tail(a, b, N, y, prec)).upper()
                worst = max(worst, t)
            return worst

        # smallest N in the tail lemma's monotone range
        two_pi_y = CertifiedReal.pi() * 2 * y
        a_max = d - j
        b = k + 2 * j - d - 1
        n_lo = int(math.floor(((a_max + b) / two_pi_y).upper())) + 2
        n_hi = n_lo
        cap = 1 << 22
        while tail_upper(n_hi) > per_component:
            n_hi *= 2
            if n_hi > cap:
                raise ValueError("target_error unreachable: truncation order "
                                 "would exceed the configured cap")
        # binary search for the smallest satisfying order
        lo, hi = n_lo, n_hi
        while lo < hi:
            mid = (lo + hi) // 2
            if tail_upper(mid) <= per_component:
                hi = mid
            else:
                lo = mid + 1
        N = lo

        vv = vv_eis_coeffs(k, d, j, N)
        two_pi = CertifiedReal.pi() * 2
        q = CertifiedComplex.i_times(CertifiedComplex.from_real(two_pi)
                                     * tau).exp()
        accs = [CertifiedComplex.from_exact(vv.coeff(r, 0))
                for r in range(d + 1)]
        qn = CertifiedComplex.from_exact(1)
        for n in range(1, N):
            qn = qn * q
            for r in range(j, d + 1):
                c = vv.coeff(r, n)
                if c != 0:
                    accs[r] = accs[r] + qn * c
        minus_two_pi_i = -CertifiedComplex.i_times(
            CertifiedComplex.from_real(two_pi))
        values: list[CertifiedComplex] = []
        for r in range(d + 1):
            if r < j:
                values.append(CertifiedComplex.from_exact(0))
                continue
            a, b_, amp = scales[r - j]
            val = accs[r] * minus_two_pi_i.powi(a)
            tail = (amp * classical_eis_tail(a, b_, N, y, prec)).mag_upper()
            values.append(CertifiedComplex(val.mid, fadd_up(val.rad, tail)))
        if sum(v.rad for v in values) > tgt:
            raise ValueError("target_error unreachable at this precision; "
                             "raise prec or relax the target")
        return PolyD(values)


__all__ = [
    "VVQSeries",
    "vv_eis_coeffs",
    "classical_eis_tail",
    "eval_vv_eis",
]
