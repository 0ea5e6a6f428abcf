"""Parabolic cocycles of level-one eigenforms.

The cocycle attached to a cusp form is pinned down by its value at the
inversion generator, the period polynomial built from critical completed
L-values; values on arbitrary group elements then follow from the cocycle
relation folded over a word decomposition.  The module also provides the
closed-form magnitude bounds used to certify double-coset truncations.
"""

from __future__ import annotations

import math
import threading

from gmpy2 import mpq

from .arith import (
    CertifiedComplex,
    CertifiedReal,
    DEFAULT_PRECISION,
    GUARD_BITS,
    binomial,
    factorial,
    fadd_up,
    inc_gamma_upper_int,
    precision,
    zeta_real,
)
from .modforms import QSeries, exp_tail_bound
from .symd import GroupElement, PolyD, S, T, sym_action


def _check_eigenform_shape(f: QSeries, k: int) -> None:
    if k % 2 != 0 or k < 4:
        raise ValueError("even weight k >= 4 required")
    if f.order < 2 or f.coeff(0) != 0 or f.coeff(1) != 1:
        raise ValueError("expected a normalized cusp form: c(0)=0, c(1)=1")


def lambda_completed(f: QSeries, k: int, s: int,
                     prec: int = DEFAULT_PRECISION) -> CertifiedComplex:
    """Completed L-value Lambda(f,s) = Gamma(s) (2 pi)^-s L(f,s).

    Computed by the split-at-one incomplete-gamma series
    Lambda(f,s) = sum_n c(n) [ (2 pi n)^-s Gamma(s, 2 pi n)
                              + i^k (2 pi n)^(s-k) Gamma(k-s, 2 pi n) ].
    The tail is certified with the Deligne bound
    |c(n)| <= sigma_0(n) n^((k-1)/2) <= n^((k+1)/2) (imported theorem) and
    Gamma(a,x) <= 2 x^(a-1) e^-x for x >= 2(a-1), which collapses each
    bracket past the cutoff to at most e^(-2 pi n).
    """
    _check_eigenform_shape(f, k)
    if not 1 <= s <= k - 1:
        raise ValueError("s must lie in 1..k-1")
    wp = prec + GUARD_BITS
    with precision(wp):
        # cutoff: e^(-2 pi N) N^alpha below the target, and large enough for
        # the bracket estimate (2 pi n >= 2(k-2))
        alpha = (k + 1 + 1) // 2
        N = max(int((prec + 10) * math.log(2) / (2 * math.pi)) + k,
                int((k - 2) / math.pi) + 2)
        N = min(N, f.order)
        i_to_k = (-1) ** (k // 2)  # i^k for even k
        two_pi = CertifiedReal.pi() * 2
        acc = CertifiedReal.from_exact(0)
        for n in range(1, N):
            c = f.coeff(n)
            if c == 0:
                continue
            x = two_pi * n
            t1 = inc_gamma_upper_int(s, x, wp) / x.powi(s)
            t2 = inc_gamma_upper_int(k - s, x, wp) * x.powi(s - k)
            acc = acc + (t1 + t2 * i_to_k) * c
        tail = exp_tail_bound(CertifiedReal.from_exact(1), alpha, N,
                              CertifiedReal.from_exact(1), two_pi)
        out = CertifiedReal(acc.mid, fadd_up(acc.rad, tail.mag_upper()))
        return CertifiedComplex.from_real(out)


def critical_l_value(f: QSeries, k: int, s: int,
                     prec: int = DEFAULT_PRECISION) -> CertifiedComplex:
    """L(f,s) = Lambda(f,s) (2 pi)^s / (s-1)! at integer s in 1..k-1."""
    lam = lambda_completed(f, k, s, prec)
    with precision(prec + GUARD_BITS):
        scale = (CertifiedReal.pi() * 2).powi(s) / factorial(s - 1)
        return lam * CertifiedComplex.from_real(scale)


def period_polynomial(f: QSeries, k: int,
                      prec: int = DEFAULT_PRECISION) -> PolyD:
    """The cocycle's value at the inversion generator, from critical L-values.

    The display sum_{j=0}^{k-2} X^(k-2-j) (k-2)!/((k-2-j)! (2 pi i)^(j+1))
    L(f; j+1) simplifies, via Lambda(f,s) = Gamma(s)(2 pi)^-s L(f,s), to
    coefficient(X^(k-2-j)) = binom(k-2, j) (-i)^(j+1) Lambda(f, j+1),
    which is how it is evaluated (exact unit factors, no pi cancellation).
    """
    _check_eigenform_shape(f, k)
    d = k - 2
    with precision(prec + GUARD_BITS):
        coeffs: list[CertifiedComplex] = [None] * (d + 1)
        for j in range(0, d + 1):
            lam = lambda_completed(f, k, j + 1, prec)
            # multiply by (-i)^(j+1) exactly
            for _ in range(j + 1):
                lam = -CertifiedComplex.i_times(lam)
            coeffs[d - j] = lam * binomial(d, j)
        return PolyD(coeffs)


def word_decompose(gamma: GroupElement) -> list[GroupElement]:
    """A word in S, T, T^-1 whose exact product is gamma.

    Euclidean reduction on the bottom row: repeatedly shift the lower-right
    entry by the nearest multiple of the lower-left one (ties at
    half-integers round toward zero) and swap with the inversion generator.
    """
    word: list[GroupElement] = []
    tinv = T.inverse()

    def emit_t_power(m: int):
        step = T if m > 0 else tinv
        word.extend([step] * abs(m))

    g = gamma
    # right-multiplications applied to g; their inverses, reversed, complete
    # the word so that gamma = (reduced terminal) * reversed-inverses
    applied: list[GroupElement] = []
    while g.c != 0:
        q = _round_half_toward_zero(g.d, g.c)
        t_shift = T ** (-q)
        g = g * t_shift
        applied.append(t_shift)
        g = g * S.inverse()
        applied.append(S.inverse())
    # terminal form: (1, b; 0, 1) or (-1, b; 0, -1)
    if g.a == 1:
        emit_t_power(g.b)
    else:
        # (-1, b; 0, -1) = S^2 T^(-b)
        word.extend([S, S])
        emit_t_power(-g.b)
    # applied steps are only T-powers and S^-1, so their inverses are
    # T-powers and S
    for step in reversed(applied):
        if step.c == 0:
            emit_t_power(-step.b)
        else:
            word.append(S)
    return word


def _round_half_toward_zero(num: int, den: int) -> int:
    r = mpq(num, den)
    fl = math.floor(r)
    frac = r - fl
    if frac > mpq(1, 2):
        return fl + 1
    if frac < mpq(1, 2):
        return fl
    return fl if fl >= 0 else fl + 1


class ParabolicCocycle:
    """A parabolic cocycle for the weight-k symmetric-power action,
    determined by its value at the inversion generator.

    Values on arbitrary elements come from folding the relation
    phi(g1 g2) = sym(g1) phi(g2) + phi(g1) over a word decomposition;
    phi vanishes on T-powers and, by even-weight parity, on -I, so words
    are first reduced to a canonical sign.  The cache is guarded by a lock
    for concurrent use.
    """

    def __init__(self, k: int, phi_S: PolyD):
        if k % 2 != 0 or k < 4:
            raise ValueError("even weight k >= 4 required")
        if phi_S.d != k - 2:
            raise ValueError("phi(S) must have degree bound k-2")
        self.k = k
        self.d = k - 2
        self.phi_S = phi_S
        self._cache: dict[GroupElement, PolyD] = {}
        self._lock = threading.Lock()

    @classmethod
    def from_eigenform(cls, f: QSeries, k: int,
                       prec: int = DEFAULT_PRECISION) -> "ParabolicCocycle":
        return cls(k, period_polynomial(f, k, prec))

    def _zero(self) -> PolyD:
        return PolyD([CertifiedComplex.from_exact(0)] * (self.d + 1))

    def value(self, gamma: GroupElement) -> PolyD:
        cached = self._cache.get(gamma)
        if cached is not None:
            return cached
        # phi(-g) = phi(g): reduce to a canonical sign first (even weight)
        if gamma.c < 0 or (gamma.c == 0 and gamma.a < 0):
            result = self.value(gamma.negate())
        else:
            result = self._fold(word_decompose(gamma))
        with self._lock:
            self._cache[gamma] = result
        return result

    def _fold(self, word: list[GroupElement]) -> PolyD:
        # group the word into runs of T-powers and single inversions, then
        # fold v <- sym(w) v + phi(w) from the right; phi(T^m) = 0, so a
        # still-zero accumulator is tracked as None and stays exact
        runs: list[GroupElement] = []
        t_count = 0
        for w in word:
            if w.c == 0:
                t_count += w.b
            else:
                if t_count:
                    runs.append(T ** t_count)
                    t_count = 0
                runs.append(w)
        if t_count:
            runs.append(T ** t_count)
        v: PolyD | None = None
        for w in reversed(runs):
            if v is not None:
                v = sym_action(w, v)
            if w.c != 0:  # the inversion generator carries phi(S)
                v = self.phi_S if v is None else v + self.phi_S
        return self._zero() if v is None else v


def cocycle_eval(phi: ParabolicCocycle, gamma: GroupElement) -> PolyD:
    """phi(gamma) via the cocycle relation over a word decomposition."""
    return phi.value(gamma)


def cocycle_sum_bound(c: int, l: int,
                      prec: int = DEFAULT_PRECISION) -> CertifiedReal:
    """Bound on the coefficient-magnitude sum of a weight-l cocycle value at
    gamma^-1 with lower row (c, d), |d| < |c|:
    c^(l-2) e^2 Gamma(l-1)^2 (2 pi)^-l zeta((l-1)/2)^2."""
    if l <= 3:
        raise ValueError("l > 3 required")
    if c < 1:
        raise ValueError("positive c required")
    with precision(prec + GUARD_BITS):
        e2 = CertifiedReal.from_exact(2).exp()
        z = zeta_real(mpq(l - 1, 2), prec)
        two_pi = CertifiedReal.pi() * 2
        gam = factorial(l - 2)
        val = (e2 * (gam * gam) * z * z
               * CertifiedReal.from_exact(c).powi(l - 2)
               / two_pi.powi(l))
        return val


def twisted_l_bound(c: int, k: int,
                    prec: int = DEFAULT_PRECISION) -> CertifiedReal:
    """Bound on additively twisted L-values at denominators c:
    c^(k-2) Gamma(k-1) (2 pi)^(1-k) zeta((k-1)/2)^2."""
    if k <= 3:
        raise ValueError("k > 3 required")
    if c == 0:
        raise ValueError("nonzero c required")
    c = abs(c)
    with precision(prec + GUARD_BITS):
        z = zeta_real(mpq(k - 1, 2), prec)
        two_pi = CertifiedReal.pi() * 2
        val = (z * z * factorial(k - 2)
               * CertifiedReal.from_exact(c).powi(k - 2)
               / two_pi.powi(k - 1))
        return val


__all__ = [
    "ParabolicCocycle",
    "lambda_completed",
    "critical_l_value",
    "period_polynomial",
    "word_decompose",
    "cocycle_eval",
    "cocycle_sum_bound",
    "twisted_l_bound",
]
