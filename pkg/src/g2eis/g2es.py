"""Second order Eisenstein series of level one: coefficients and evaluation.

A parabolic cocycle phi of weight l (valued in polynomials of degree at most
l - 2) determines, for each even weight k in the convergent range, a second
order Eisenstein series.  Its Fourier coefficients are sums over the double
cosets of the translation subgroup, indexed by bottom rows (c, d) with c >= 1,
0 <= d < c and gcd(c, d) = 1.  This module computes those coefficients as
certified balls, bounds the two truncation tails (in the coset parameter c
and in the Fourier index n), and evaluates the series at a point of the upper
half plane to a requested accuracy.

Two shapes of polynomial seed are supported, mirroring the two ways the
symmetric-power action can sit in the summand:

* ``triv_sym``: the seed is (X - tau)^j and the cocycle values are paired
  against shifted binomial powers; coefficients are scalars.
* ``sym_triv``: the seed is constant and the summand keeps a free polynomial
  slot; coefficients carry an extra basis index r.

Sums over cosets run either through the certified ball path (exact group
words, ball arithmetic everywhere) or through the compiled double-double
kernel in ``_dcsum`` when it is available.  Both paths produce balls whose
radius accounts for every rounding and truncation step.
"""

from __future__ import annotations

import math
import os
import weakref
from typing import Iterable, Iterator, Sequence

from gmpy2 import mpfr, mpq, mpz

from .arith import (
    DEFAULT_PRECISION,
    GUARD_BITS,
    CertifiedComplex,
    CertifiedReal,
    _ctx,
    binomial,
    factorial,
    fadd_up,
    precision,
    zeta_real,
    inc_gamma_upper_int,
)
from .cocycle import ParabolicCocycle, cocycle_sum_bound
from .modforms import exp_tail_bound
from .symd import GroupElement, PolyD, pair, xtau_power

__all__ = [
    "DoubleCosetRep",
    "G2ESCoefficients",
    "TargetUnreachable",
    "coset_reps",
    "coeff_tail_bound",
    "series_tail_bound",
    "g2es_coeff_triv_sym",
    "g2es_coeff_batch_triv_sym",
    "g2es_coeff_sym_triv",
    "eval_g2es",
    "kernel_available",
]

# Hard caps for the automatic truncation searches in eval_g2es.  They are
# generous: the compiled kernel handles a few times 10^8 cosets in minutes,
# and Fourier truncation beyond 2^20 terms never helps at double the cost.
_COSET_CAP = 1 << 26
_FOURIER_CAP = 1 << 20


class TargetUnreachable(ValueError):
    """A requested target error cannot be met within the configured caps."""


def _kernel_module():
    try:
        from . import _dcsum
    except ImportError:
        return None
    return _dcsum


def kernel_available() -> bool:
    """Whether the compiled double-double coset-sum kernel was built."""
    return _kernel_module() is not None


def _backend_choice(backend: str | None) -> str:
    """Resolve the coset-sum backend: explicit argument, then environment."""
    choice = backend or os.environ.get("G2EIS_BACKEND") or "auto"
    if choice not in ("auto", "kernel", "ball"):
        raise ValueError("backend must be one of 'auto', 'kernel', 'ball'")
    if choice == "kernel" and not kernel_available():
        raise RuntimeError("compiled kernel requested but g2eis._dcsum is "
                           "not built; reinstall without G2EIS_SKIP_EXT")
    return choice


class DoubleCosetRep:
    """A coset of the translation subgroup acting on both sides.

    The coset is determined by the bottom row (c, d) with c >= 1,
    0 <= d < c and gcd(c, d) = 1.  ``gamma`` is the canonical matrix
    completion: the top row solves a*d - b*c = 1 with 0 <= a < c.
    """

    __slots__ = ("c", "d", "gamma")

    def __init__(self, c: int, d: int):
        if c < 1:
            raise ValueError("coset representative requires c >= 1")
        if not 0 <= d < c:
            raise ValueError("coset representative requires 0 <= d < c")
        if math.gcd(c, d) != 1:
            raise ValueError("coset representative requires gcd(c, d) = 1")
        self.c = c
        self.d = d
        a = pow(d, -1, c) if c > 1 else 0
        b = (a * d - 1) // c
        self.gamma = GroupElement(a, b, c, d)

    def __repr__(self) -> str:
        return f"DoubleCosetRep(c={self.c}, d={self.d})"

    def __eq__(self, other) -> bool:
        return (isinstance(other, DoubleCosetRep)
                and self.c == other.c and self.d == other.d)

    def __hash__(self) -> int:
        return hash((self.c, self.d))


def _iter_reps(c_max: int) -> Iterator[DoubleCosetRep]:
    for c in range(1, c_max + 1):
        for d in range(c):
            if math.gcd(c, d) == 1:
                yield DoubleCosetRep(c, d)


def coset_reps(c_max: int) -> list[DoubleCosetRep]:
    """All double-coset representatives with c <= c_max, ordered by (c, d)."""
    if c_max < 0:
        raise ValueError("c_max must be nonnegative")
    return list(_iter_reps(c_max))


# ---------------------------------------------------------------------------
# Parameter gates.
#
# The coset sum for the triv_sym shape converges absolutely when the
# per-coset decay exponent k + 2j - 2l + 2 is positive; the same condition
# makes both stated tail bounds finite.  For the sym_triv shape the decay
# exponent is k - l + 1, so k > l is required.  All weights are even.
# ---------------------------------------------------------------------------


def _check_phi(phi) -> tuple[int, int]:
    if not isinstance(phi, ParabolicCocycle):
        raise TypeError("phi must be a ParabolicCocycle")
    return phi.d, phi.k


def _check_triv_sym_params(k: int, j: int, l: int) -> None:
    d = l - 2
    if l % 2 or l <= 3:
        raise ValueError("cocycle weight l must be even and > 3")
    if k % 2:
        raise ValueError("series weight k must be even")
    if not 0 <= j <= d:
        raise ValueError(f"seed exponent j must satisfy 0 <= j <= {d}")
    if k + 2 * j - 2 * l + 2 <= 0:
        raise ValueError("series diverges: need k + 2j - 2l + 2 > 0 for a "
                         "cocycle of weight l")


def _check_sym_triv_params(k: int, l: int) -> None:
    if l % 2 or l <= 3:
        raise ValueError("cocycle weight l must be even and > 3")
    if k % 2:
        raise ValueError("series weight k must be even")
    if k <= l:
        raise ValueError("series diverges: need k > l for a cocycle of "
                         "weight l")


def _phi_is_zero(phi: ParabolicCocycle) -> bool:
    for coeff in phi.phi_S.coeffs:
        if isinstance(coeff, CertifiedComplex):
            if coeff.mid != 0 or coeff.rad != 0.0:
                return False
        elif isinstance(coeff, CertifiedReal):
            if coeff.mid != 0 or coeff.rad != 0.0:
                return False
        elif coeff != 0:
            return False
    return True


# ---------------------------------------------------------------------------
# Stated tail bounds.  Both combine the convexity bound on the cocycle values
# (growth c^(l-2) times the constant in cocycle_sum_bound) with elementary
# comparison of the remaining sum against an integral.
# ---------------------------------------------------------------------------


def coeff_tail_bound(k: int, j: int, l: int, C: int,
                     prec: int = DEFAULT_PRECISION) -> CertifiedReal:
    """Bound for the c >= C part of the n-th coefficient, per n^(k+j-1).

    The value multiplies n^(k+j-1): the absolute value of the sum of all
    coset terms with c >= C in the n-th Fourier coefficient (triv_sym shape)
    is at most coeff_tail_bound(k, j, l, C) * n^(k+j-1).  Requires C >= 1
    and the convergence gate k + 2j - 2l + 2 > 0.
    """
    _check_triv_sym_params(k, j, l)
    if C < 1:
        raise ValueError("C >= 1 required")
    m = k + 2 * j - 2 * l + 2
    with precision(prec + GUARD_BITS):
        bracket = mpq(1, m * C ** (m + 1)) + (1 if C == 1 else 0)
        rational = bracket * mpq(2 ** j * factorial(l - 2) ** 2,
                                 factorial(k - 1))
        e_sq = CertifiedReal.from_exact(2).exp()
        zeta = zeta_real(mpq(l - 1, 2), prec + GUARD_BITS)
        two_pi = CertifiedReal.pi() * 2
        return (CertifiedReal.from_exact(rational) * e_sq * zeta * zeta
                * two_pi.powi(k + j - l))


def series_tail_bound(k: int, j: int, l: int, N: int, y,
                      prec: int = DEFAULT_PRECISION) -> CertifiedReal:
    """Bound for the n >= N tail of the series at height y (triv_sym shape).

    Bounds sum_{n >= N} |c(n)| e^(-2 pi n y) by comparison with an upper
    incomplete gamma integral.  Requires the convergence gate
    k + 2j - 2l + 2 > 0 and N inside the monotone range
    N >= 1 + (k + j) / (2 pi y).
    """
    _check_triv_sym_params(k, j, l)
    if not isinstance(N, (int, mpz)) or N < 1:
        raise ValueError("N must be a positive integer")
    m = k + 2 * j - 2 * l + 2
    with precision(prec + GUARD_BITS):
        yb = y if isinstance(y, CertifiedReal) else CertifiedReal.from_exact(y)
        if yb.lower() <= 0:
            raise ValueError("height y > 0 required")
        two_pi = CertifiedReal.pi() * 2
        if (two_pi * yb * (N - 1)).lower() < k + j:
            raise ValueError("N outside the monotone range: need "
                             "N >= 1 + (k + j) / (2 pi y)")
        rational = mpq((m + 1) * 2 ** j * factorial(l - 2) ** 2,
                       m * factorial(k - 1))
        e_sq = CertifiedReal.from_exact(2).exp()
        zeta = zeta_real(mpq(l - 1, 2), prec + GUARD_BITS)
        gam = inc_gamma_upper_int(k + j, two_pi * yb * (N - 1),
                                  prec + GUARD_BITS)
        return (CertifiedReal.from_exact(rational) * e_sq * zeta * zeta
                * gam / (two_pi.powi(l) * yb.powi(k + j)))


# ---------------------------------------------------------------------------
# Sharper internal tails.  Used for the certified radii attached to computed
# coefficients.  For a single coset term, pairing the cocycle value against
# (X + d/c)^(d-j+r) satisfies
#
#   |pair(v, (X + x)^e)| <= sum_i |v_i| * binomial(e, d-i) / binomial(d, i)
#                        <= sum_i |v_i|
#
# since |x| = d/c < 1 and binomial(e, t) <= binomial(d, t) for e <= d.  The
# cocycle magnitude bound gives sum_i |v_i| <= Q c^(l-2) with Q the constant
# cocycle_sum_bound(1, l).  Summing the at most c admissible residues d and
# comparing with an integral over c then bounds the whole c >= C1 tail of
# the n-th coefficient by
#
#   Q * (C1^-M + C1^(1-M) / (M-1)) * sum_r binom(j, r) (2 pi)^(k+r)
#         n^(k+r-1) / (k+r-1)!
#
# where M = k + 2j - 2l + 3 (at least 3 under the convergence gate).
# ---------------------------------------------------------------------------


def _triv_sym_amplitudes(k: int, j: int,
                         prec: int = 64) -> list[CertifiedReal]:
    """The per-r factors binom(j, r) (2 pi)^(k+r) / (k+r-1)!."""
    with precision(prec + GUARD_BITS):
        two_pi = CertifiedReal.pi() * 2
        return [CertifiedReal.from_exact(mpq(binomial(j, r),
                                             factorial(k + r - 1)))
                * two_pi.powi(k + r)
                for r in range(j + 1)]


def _coeff_tail_sharp(k: int, j: int, l: int, c_from: int,
                      n_values: Sequence[int]) -> list[float]:
    """Upper bounds on the absolute coefficient tails over c >= c_from."""
    M = k + 2 * j - 2 * l + 3
    with precision(96):
        q_const = cocycle_sum_bound(1, l, 96)
        bracket = CertifiedReal.from_exact(
            mpq(1, c_from ** M) + mpq(1, (M - 1) * c_from ** (M - 1)))
        amps = _triv_sym_amplitudes(k, j, 96)
        scale = q_const * bracket
        out = []
        for n in n_values:
            acc = CertifiedReal.from_exact(0)
            for r in range(j + 1):
                acc = acc + amps[r] * (n ** (k + r - 1))
            out.append((scale * acc).upper())
        return out


def _coeff_fullsum_bound(k: int, j: int, l: int, n: int) -> CertifiedReal:
    """Upper bound on |c(n)| over all cosets (used for Fourier-tail search).

    Same counting as _coeff_tail_sharp with the c-sum bounded by
    zeta(M - 1) >= sum_c c * c^(-M).
    """
    M = k + 2 * j - 2 * l + 3
    with precision(96):
        q_const = cocycle_sum_bound(1, l, 96)
        zs = zeta_real(M - 1, 96)
        amps = _triv_sym_amplitudes(k, j, 96)
        acc = CertifiedReal.from_exact(0)
        for r in range(j + 1):
            acc = acc + amps[r] * (n ** (k + r - 1))
        return q_const * zs * acc


# ---------------------------------------------------------------------------
# Ball-path summands.
# ---------------------------------------------------------------------------


def _unit_power_times(z: CertifiedComplex, quarter_turns: int
                      ) -> CertifiedComplex:
    """Multiply by i^quarter_turns exactly."""
    for _ in range(quarter_turns % 4):
        z = CertifiedComplex.i_times(z)
    return z


def _summand_triv_sym(k: int, phi: ParabolicCocycle, j: int,
                      gamma: GroupElement, n_values: Sequence[int],
                      prec: int = DEFAULT_PRECISION
                      ) -> list[CertifiedComplex]:
    """Contribution of one coset to each requested coefficient (triv_sym).

    ``gamma`` may be any group element with c > 0 representing its coset;
    the value only depends on the coset because left translations leave the
    cocycle value at gamma^-1 unchanged and right translations shift d by a
    multiple of c, which changes neither d/c modulo 1 nor the pairing
    against (X + d/c)^e after re-expansion -- this invariance is exercised
    by the test suite.
    """
    d, l = _check_phi(phi)
    c, dd = gamma.c, gamma.d
    if c <= 0:
        raise ValueError("coset summand requires c > 0")
    v = phi.value(gamma.inverse())
    x = mpq(dd, c)
    with precision(prec + GUARD_BITS):
        two_pi = CertifiedReal.pi() * 2
        inv_cpow = mpq(1, mpz(c) ** (k + 2 * j - d))
        weights = []
        for r in range(j + 1):
            paired = pair(v, xtau_power(-x, d - j + r, d))
            if not isinstance(paired, CertifiedComplex):
                paired = CertifiedComplex.from_exact(paired)
            amp = CertifiedComplex.from_real(two_pi.powi(k + r)) * paired
            amp = amp * CertifiedComplex.from_exact(
                mpq(binomial(j, r), factorial(k + r - 1)) * inv_cpow)
            # global sign (-1)^(j-k) joins i^(k+r): i^(2j - k + r) overall
            weights.append(_unit_power_times(amp, 2 * j - k + r))
        out = []
        for n in n_values:
            phase_arg = two_pi * CertifiedReal.from_exact(
                mpq((n * dd) % c, c))
            phase = CertifiedComplex.i_times(
                CertifiedComplex.from_real(phase_arg)).exp()
            acc = CertifiedComplex.from_exact(0)
            for r in range(j + 1):
                acc = acc + weights[r] * mpz(n) ** (k + r - 1)
            out.append(phase * acc)
        return out


def _ball_batch_triv_sym(k: int, phi: ParabolicCocycle, j: int,
                         n_values: Sequence[int], c_max: int,
                         prec: int) -> list[CertifiedComplex]:
    acc = [CertifiedComplex.from_exact(0) for _ in n_values]
    for rep in _iter_reps(c_max):
        terms = _summand_triv_sym(k, phi, j, rep.gamma, n_values, prec)
        acc = [a + t for a, t in zip(acc, terms)]
    return acc


# ---------------------------------------------------------------------------
# Kernel-path batches.
# ---------------------------------------------------------------------------


def _split_dd(x: mpfr) -> tuple[float, float, float]:
    """Split a high precision real into hi + lo doubles plus residual bound."""
    hi = float(x)
    if not math.isfinite(hi):
        raise ValueError("midpoint out of double range for the kernel")
    ctx = _ctx(max(x.precision, 53) + 64)
    rem = ctx.sub(x, mpfr(hi))
    lo = float(rem)
    resid = abs(float(ctx.sub(rem, mpfr(lo)))) * 1.0000001 + 1e-300
    return hi, lo, resid


def _kernel_batch_triv_sym(k: int, phi: ParabolicCocycle, j: int,
                           n_max: int, c_max: int,
                           prec: int) -> list[CertifiedComplex]:
    """Run the compiled kernel and wrap its output as balls (no c-tail)."""
    dcsum = _kernel_module()
    d, l = phi.d, phi.k
    from array import array

    # Cocycle generator value, split to double-double with error budget.
    re_hi = array("d", [0.0] * (d + 1))
    re_lo = array("d", [0.0] * (d + 1))
    im_hi = array("d", [0.0] * (d + 1))
    im_lo = array("d", [0.0] * (d + 1))
    phi_eps = 0.0
    phi_mag = 0.0
    with precision(prec + GUARD_BITS):
        for i, coeff in enumerate(phi.phi_S.coeffs):
            if not isinstance(coeff, CertifiedComplex):
                coeff = CertifiedComplex.from_exact(coeff)
            rh, rl, rr = _split_dd(coeff.mid.real)
            ih, il, ir = _split_dd(coeff.mid.imag)
            re_hi[i], re_lo[i] = rh, rl
            im_hi[i], im_lo[i] = ih, il
            phi_eps = max(phi_eps, fadd_up(coeff.rad, fadd_up(rr, ir)))
            phi_mag = max(phi_mag, abs(rh) + abs(ih) + 1e-300)

        # Per-r complex amplitudes K_r = i^(2j-k+r) binom(j,r) (2pi)^(k+r)
        #                                  / (k+r-1)!
        two_pi = CertifiedReal.pi() * 2
        k_re_hi = array("d", [0.0] * (j + 1))
        k_re_lo = array("d", [0.0] * (j + 1))
        k_im_hi = array("d", [0.0] * (j + 1))
        k_im_lo = array("d", [0.0] * (j + 1))
        k_abs = array("d", [0.0] * (j + 1))
        for r in range(j + 1):
            amp = CertifiedComplex.from_real(
                two_pi.powi(k + r)
                * CertifiedReal.from_exact(mpq(binomial(j, r),
                                               factorial(k + r - 1))))
            amp = _unit_power_times(amp, 2 * j - k + r)
            rh, rl, _ = _split_dd(amp.mid.real)
            ih, il, _ = _split_dd(amp.mid.imag)
            k_re_hi[r], k_re_lo[r] = rh, rl
            k_im_hi[r], k_im_lo[r] = ih, il
            k_abs[r] = abs(rh) + abs(ih)

        # Pairing weights W[r][i] = (-1)^(d-i) binom(d-j+r, d-i) / binom(d, i)
        # (zero when i < j - r); |W| <= 1 throughout.
        w_hi = array("d", [0.0] * ((j + 1) * (d + 1)))
        w_lo = array("d", [0.0] * ((j + 1) * (d + 1)))
        for r in range(j + 1):
            e = d - j + r
            for i in range(max(0, j - r), d + 1):
                w = mpq(binomial(e, d - i), binomial(d, i))
                if (d - i) % 2:
                    w = -w
                # convert at explicit precision: a bare mpfr() call would
                # round the exact rational at the global 53-bit context
                wh, wl, _ = _split_dd(mpfr(w, 192))
                w_hi[r * (d + 1) + i] = wh
                w_lo[r * (d + 1) + i] = wl

        # Fourier-index powers n^(k+r-1), exact integers split to dd.
        nr_hi = array("d", [0.0] * (n_max * (j + 1)))
        nr_lo = array("d", [0.0] * (n_max * (j + 1)))
        for n in range(1, n_max + 1):
            for r in range(j + 1):
                # explicit precision again: these integers exceed 53 bits
                nh, nl, _ = _split_dd(mpfr(mpz(n) ** (k + r - 1), 256))
                nr_hi[(n - 1) * (j + 1) + r] = nh
                nr_lo[(n - 1) * (j + 1) + r] = nl

        # Error amplitude per n: (sum_r |K_r| n^(k+r-1)) inflated 2 percent.
        sr_err = array("d", [0.0] * n_max)
        for n in range(1, n_max + 1):
            s = 0.0
            for r in range(j + 1):
                s += k_abs[r] * float(mpz(n) ** (k + r - 1))
            sr_err[n - 1] = s * 1.02

    out_re_hi = array("d", [0.0] * n_max)
    out_re_lo = array("d", [0.0] * n_max)
    out_im_hi = array("d", [0.0] * n_max)
    out_im_lo = array("d", [0.0] * n_max)
    out_err = array("d", [0.0] * n_max)

    dcsum.coeff_batch(c_max, n_max, d, j, k + 2 * j - d,
                      re_hi, re_lo, im_hi, im_lo, phi_eps, phi_mag,
                      k_re_hi, k_re_lo, k_im_hi, k_im_lo, k_abs,
                      w_hi, w_lo, nr_hi, nr_lo, sr_err,
                      out_re_hi, out_re_lo, out_im_hi, out_im_lo, out_err)

    results = []
    with precision(prec + GUARD_BITS):
        ctx = _ctx(prec + GUARD_BITS)
        for idx in range(n_max):
            # hi + lo spans at most ~107 bits, so the sum is exact here.
            mid_re = ctx.add(mpfr(out_re_hi[idx]), mpfr(out_re_lo[idx]))
            mid_im = ctx.add(mpfr(out_im_hi[idx]), mpfr(out_im_lo[idx]))
            ball = CertifiedComplex.from_parts(
                CertifiedReal(mid_re, 0.0), CertifiedReal(mid_im, 0.0))
            results.append(CertifiedComplex(
                ball.mid, fadd_up(ball.rad, out_err[idx] * 1.02)))
    return results


# ---------------------------------------------------------------------------
# Public coefficient interfaces.
# ---------------------------------------------------------------------------


def g2es_coeff_batch_triv_sym(k: int, phi: ParabolicCocycle, j: int,
                              n_values: Sequence[int], c_max: int,
                              prec: int = DEFAULT_PRECISION,
                              backend: str | None = None
                              ) -> list[CertifiedComplex]:
    """Certified coefficients c(n) for n in n_values (triv_sym shape).

    Each ball encloses the full coset sum: the computed part runs over
    c <= c_max and the radius absorbs the proven bound on the c > c_max
    remainder.
    """
    d, l = _check_phi(phi)
    _check_triv_sym_params(k, j, l)
    if c_max < 1:
        raise ValueError("c_max >= 1 required")
    n_values = list(n_values)
    if any((not isinstance(n, (int, mpz))) or n < 1 for n in n_values):
        raise ValueError("Fourier indices must be positive integers")
    if _phi_is_zero(phi):
        return [CertifiedComplex.from_exact(0) for _ in n_values]

    choice = _backend_choice(backend)
    use_kernel = (choice == "kernel"
                  or (choice == "auto" and kernel_available()))
    if use_kernel:
        n_max = max(n_values)
        batch = _kernel_batch_triv_sym(k, phi, j, n_max, c_max, prec)
        partial = [batch[n - 1] for n in n_values]
    else:
        partial = _ball_batch_triv_sym(k, phi, j, n_values, c_max, prec)

    tails = _coeff_tail_sharp(k, j, l, c_max + 1, n_values)
    return [CertifiedComplex(z.mid, fadd_up(z.rad, t))
            for z, t in zip(partial, tails)]


def g2es_coeff_triv_sym(k: int, phi: ParabolicCocycle, j: int, n: int,
                        c_max: int, prec: int = DEFAULT_PRECISION,
                        backend: str | None = None) -> CertifiedComplex:
    """Certified n-th coefficient for the seed (X - tau)^j."""
    return g2es_coeff_batch_triv_sym(k, phi, j, [n], c_max, prec,
                                     backend)[0]


def g2es_coeff_sym_triv(k: int, phi: ParabolicCocycle, n: int, r: int,
                        c_max: int,
                        prec: int = DEFAULT_PRECISION) -> CertifiedComplex:
    """Certified coefficient of (X - tau)^r e(n tau) (sym_triv shape).

    The summand pairs the cocycle value against the slashed constant seed;
    expanding the slash in the (X - tau)^r basis gives, for each coset,

      e(n d / c) / c^k * sum_{j'>=r} v_{j'} sum_{l'=r}^{j'}
        (-2 pi i)^(k-j'+l') / (k-j'+l'-1)! binom(l', r) binom(j', l')
        (-d/c)^(l'-r) n^(k-j'+l'-1).

    Indices r beyond the polynomial degree give exactly zero.
    """
    d, l = _check_phi(phi)
    _check_sym_triv_params(k, l)
    if n < 1:
        raise ValueError("Fourier index n must be a positive integer")
    if r < 0:
        raise ValueError("component index r must be nonnegative")
    if c_max < 1:
        raise ValueError("c_max >= 1 required")
    if r > d:
        return CertifiedComplex.from_exact(0)
    if _phi_is_zero(phi):
        return CertifiedComplex.from_exact(0)

    with precision(prec + GUARD_BITS):
        two_pi = CertifiedReal.pi() * 2
        acc = CertifiedComplex.from_exact(0)
        for rep in _iter_reps(c_max):
            c, dd = rep.c, rep.d
            v = phi.value(rep.gamma.inverse())
            phase_arg = two_pi * CertifiedReal.from_exact(
                mpq((n * dd) % c, c))
            phase = CertifiedComplex.i_times(
                CertifiedComplex.from_real(phase_arg)).exp()
            inner = CertifiedComplex.from_exact(0)
            for jp in range(r, d + 1):
                vj = v.coeffs[jp]
                if not isinstance(vj, CertifiedComplex):
                    vj = CertifiedComplex.from_exact(vj)
                for lp in range(r, jp + 1):
                    w = k - jp + lp
                    rat = (mpq(binomial(lp, r) * binomial(jp, lp),
                               factorial(w - 1))
                           * mpq(-dd, c) ** (lp - r) * mpz(n) ** (w - 1))
                    term = CertifiedComplex.from_real(two_pi.powi(w))
                    # (-2 pi i)^w = (2 pi)^w * (-i)^w = (2 pi)^w * i^(3w)
                    term = _unit_power_times(term, 3 * w)
                    inner = inner + term * (vj * rat)
            acc = acc + phase * inner * mpq(1, mpz(c) ** k)

        # Tail over c > c_max: |v_{j'}| <= Q c^(l-2), |d/c| < 1, so each
        # coset term is at most Q c^(l-2-k) W(n) with W(n) the sum of the
        # absolute inner amplitudes; at most c residues per c and integral
        # comparison in c give the bracket below (decay p = k - l + 1 >= 3).
        p = k - l + 1
        q_const = cocycle_sum_bound(1, l, 96)
        c_from = c_max + 1
        bracket = CertifiedReal.from_exact(
            mpq(1, c_from ** p) + mpq(1, (p - 1) * c_from ** (p - 1)))
        w_amp = CertifiedReal.from_exact(0)
        for jp in range(r, d + 1):
            for lp in range(r, jp + 1):
                w = k - jp + lp
                w_amp = w_amp + (CertifiedReal.from_exact(
                    mpq(binomial(lp, r) * binomial(jp, lp),
                        factorial(w - 1)) * mpz(n) ** (w - 1))
                    * two_pi.powi(w))
        tail = (q_const * bracket * w_amp).upper()
        return CertifiedComplex(acc.mid, fadd_up(acc.rad, tail))


class G2ESCoefficients:
    """A batch of certified Fourier coefficients of one series.

    ``shape`` is "triv_sym" or "sym_triv".  For triv_sym, ``entry(n)`` is
    the scalar coefficient of e(n tau).  For sym_triv, ``entry(n, r)`` is
    the coefficient of (X - tau)^r e(n tau).
    """

    __slots__ = ("shape", "k", "j", "c_max", "n_max", "_entries")

    def __init__(self, shape: str, k: int, j: int | None, c_max: int,
                 n_max: int, entries: dict):
        self.shape = shape
        self.k = k
        self.j = j
        self.c_max = c_max
        self.n_max = n_max
        self._entries = entries

    @classmethod
    def compute_triv_sym(cls, k: int, phi: ParabolicCocycle, j: int,
                         n_max: int, c_max: int,
                         prec: int = DEFAULT_PRECISION,
                         backend: str | None = None) -> "G2ESCoefficients":
        ns = list(range(1, n_max + 1))
        coeffs = g2es_coeff_batch_triv_sym(k, phi, j, ns, c_max, prec,
                                           backend)
        return cls("triv_sym", k, j, c_max, n_max,
                   {n: z for n, z in zip(ns, coeffs)})

    @classmethod
    def compute_sym_triv(cls, k: int, phi: ParabolicCocycle, n_max: int,
                         c_max: int,
                         prec: int = DEFAULT_PRECISION) -> "G2ESCoefficients":
        entries = {}
        for n in range(1, n_max + 1):
            for r in range(phi.d + 1):
                entries[(n, r)] = g2es_coeff_sym_triv(k, phi, n, r, c_max,
                                                      prec)
        return cls("sym_triv", k, None, c_max, n_max, entries)

    def entry(self, n: int, r: int | None = None) -> CertifiedComplex:
        if not 1 <= n <= self.n_max:
            raise ValueError(f"index {n} outside the computed range "
                             f"1..{self.n_max}")
        if self.shape == "triv_sym":
            if r is not None:
                raise ValueError("triv_sym coefficients carry no component "
                                 "index")
            return self._entries[n]
        if r is None:
            raise ValueError("sym_triv coefficients need a component index")
        if (n, r) not in self._entries:
            raise ValueError(f"no component {r} in the computed batch")
        return self._entries[(n, r)]

    def __len__(self) -> int:
        return len(self._entries)


# ---------------------------------------------------------------------------
# Point evaluation.
# ---------------------------------------------------------------------------

_EVAL_CACHE: "weakref.WeakKeyDictionary[ParabolicCocycle, dict]" = (
    weakref.WeakKeyDictionary())


def _cached_coeffs(k: int, phi: ParabolicCocycle, j: int, n_max: int,
                   c_max: int, prec: int,
                   backend: str | None) -> list[CertifiedComplex]:
    """Coefficient batch reuse across evaluation points.

    A cached batch computed with at least as many cosets and Fourier terms
    (and at least the requested precision) is valid for any smaller request:
    its radii bound a tail that is no larger.
    """
    per_phi = _EVAL_CACHE.setdefault(phi, {})
    key = (k, j)
    cached = per_phi.get(key)
    if cached is not None:
        cached_cmax, cached_nmax, cached_prec, coeffs = cached
        if (cached_cmax >= c_max and cached_nmax >= n_max
                and cached_prec >= prec):
            return coeffs[:n_max]
        # Recompute the union so the cache only ever improves.
        c_max = max(c_max, cached_cmax)
        n_max = max(n_max, cached_nmax)
        prec = max(prec, cached_prec)
    coeffs = g2es_coeff_batch_triv_sym(k, phi, j, list(range(1, n_max + 1)),
                                       c_max, prec, backend)
    per_phi[key] = (c_max, n_max, prec, coeffs)
    return coeffs


def eval_g2es(k: int, phi: ParabolicCocycle, j: int, tau,
              target_error, prec: int = DEFAULT_PRECISION,
              backend: str | None = None) -> CertifiedComplex:
    """Certified value at tau of the weight-k series with seed (X - tau)^j.

    Picks the Fourier truncation N from the stated series tail bound and the
    coset truncation from the sharp coefficient tail, splitting the target
    half and half, then sums the certified coefficient batch against powers
    of e(tau).  The returned radius additionally carries all arithmetic
    error, so it can slightly exceed target_error; the truncation choices
    alone are certified not to exceed it.
    """
    d, l = _check_phi(phi)
    _check_triv_sym_params(k, j, l)
    if not isinstance(tau, CertifiedComplex):
        tau = CertifiedComplex.from_exact(*tau) if isinstance(tau, tuple) \
            else CertifiedComplex.from_real(tau)
    y = tau.imag_ball()
    if y.lower() <= 0:
        raise ValueError("tau must lie in the upper half plane")
    target = float(target_error)
    if not target > 0:
        raise ValueError("target_error must be positive")
    if _phi_is_zero(phi):
        return CertifiedComplex.from_exact(0)

    with precision(prec + GUARD_BITS):
        half = target / 2
        two_pi = CertifiedReal.pi() * 2

        # Fourier truncation: smallest N in the monotone range whose stated
        # tail bound fits half the budget.
        n_lo = max(1, int(math.floor(
            (CertifiedReal.from_exact(k + j) / (two_pi * y)).upper())) + 2)
        n_hi = n_lo
        while series_tail_bound(k, j, l, n_hi, y, prec).upper() > half:
            n_hi *= 2
            if n_hi > _FOURIER_CAP:
                raise TargetUnreachable(
                    "target_error unreachable: Fourier truncation would "
                    "exceed the configured cap")
        lo, hi = n_lo, n_hi
        while lo < hi:
            mid = (lo + hi) // 2
            if series_tail_bound(k, j, l, mid, y, prec).upper() <= half:
                hi = mid
            else:
                lo = mid + 1
        n_trunc = lo

        # Coset truncation: the summed coefficient tails, damped by
        # |e(tau)|^n, must fit the other half of the budget.  This search
        # only selects the cutoff; the radius actually returned flows from
        # the coefficient balls through the certified summation below.
        qn_mag = (-(two_pi * y)).exp()
        damping = []
        qd = CertifiedReal.from_exact(1)
        for n in range(1, n_trunc):
            qd = qd * qn_mag
            damping.append(qd.upper())

        def coset_budget_used(c_top: int) -> float:
            tails = _coeff_tail_sharp(k, j, l, c_top + 1,
                                      list(range(1, n_trunc)))
            return math.fsum(t * w for t, w in zip(tails, damping)) \
                * 1.0000001

        c_lo, c_hi = 1, 1
        while coset_budget_used(c_hi) > half:
            c_hi *= 2
            if c_hi > _COSET_CAP:
                raise TargetUnreachable(
                    "target_error unreachable: coset truncation would "
                    "exceed the configured cap")
        lo, hi = c_lo, c_hi
        while lo < hi:
            mid = (lo + hi) // 2
            if coset_budget_used(mid) <= half:
                hi = mid
            else:
                lo = mid + 1
        c_trunc = lo

        coeffs = _cached_coeffs(k, phi, j, n_trunc - 1, c_trunc, prec,
                                backend)

        q_point = CertifiedComplex.i_times(
            CertifiedComplex.from_real(two_pi) * tau).exp()
        value = CertifiedComplex.from_exact(0)
        q_pow = CertifiedComplex.from_exact(1)
        for n in range(1, n_trunc):
            q_pow = q_pow * q_point
            value = value + coeffs[n - 1] * q_pow
        tail = series_tail_bound(k, j, l, n_trunc, y, prec).upper()
        return CertifiedComplex(value.mid, fadd_up(value.rad, tail))
