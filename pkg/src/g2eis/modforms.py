"""Exact q-expansions of level-one modular forms and exact linear algebra.

Series coefficients are exact rationals throughout; only `qseries_eval`
produces numerics, and it returns a ball whose radius covers both rounding
and the truncated tail of the expansion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from gmpy2 import mpq

from .arith import (
    CertifiedComplex,
    CertifiedReal,
    DEFAULT_PRECISION,
    GUARD_BITS,
    as_rational,
    bernoulli,
    fadd_up,
    inc_gamma_upper_int,
    precision,
)


class SpanSolveError(ValueError):
    """Base failure of an exact solve in the span of generators."""


class InconsistentSystem(SpanSolveError):
    """The target is not an exact linear combination of the generators."""


class RankDeficientGenerators(SpanSolveError):
    """The generators are linearly dependent on the sampled coefficients."""


class QSeries:
    """Truncated q-expansion with exact rational coefficients.

    `coeffs[n]` is the coefficient of q^n for 0 <= n < order.  Arithmetic
    truncates to the shorter operand; reading past the truncation raises
    instead of inventing zeros.
    """

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs, order: int | None = None):
        coeffs = [as_rational(c) for c in coeffs]
        if order is None:
            order = len(coeffs)
        if order != len(coeffs):
            raise ValueError("order must equal the number of coefficients")
        if order < 1:
            raise ValueError("a series needs at least the constant term")
        self.coeffs = coeffs
        self.order = order

    @staticmethod
    def zero(order: int) -> "QSeries":
        return QSeries([mpq(0)] * order)

    @staticmethod
    def one(order: int) -> "QSeries":
        return QSeries([mpq(1)] + [mpq(0)] * (order - 1))

    def coeff(self, n: int) -> mpq:
        if not 0 <= n < self.order:
            raise IndexError(
                f"coefficient q^{n} beyond truncation order {self.order}")
        return self.coeffs[n]

    __getitem__ = coeff

    def truncate(self, order: int) -> "QSeries":
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        return QSeries(self.coeffs[:order])

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.order, tuple(self.coeffs)))

    def __repr__(self):
        head = ", ".join(str(c) for c in self.coeffs[:6])
        more = ", ..." if self.order > 6 else ""
        return f"QSeries([{head}{more}], order={self.order})"

    # -- ring operations -----------------------------------------------------

    def _scalar(self, c) -> "QSeries":
        c = as_rational(c)
        return QSeries([c * a for a in self.coeffs])

    def __add__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        n = min(self.order, other.order)
        return QSeries([self.coeffs[i] + other.coeffs[i] for i in range(n)])

    def __sub__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        n = min(self.order, other.order)
        return QSeries([self.coeffs[i] - other.coeffs[i] for i in range(n)])

    def __neg__(self):
        return QSeries([-a for a in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, (int, mpq)):
            return self._scalar(other)
        if not isinstance(other, QSeries):
            return NotImplemented
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = [mpq(0)] * n
        for i in range(n):
            ai = a[i]
            if ai == 0:
                continue
            for j in range(n - i):
                bj = b[j]
                if bj != 0:
                    out[i + j] += ai * bj
        return QSeries(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers of a q-series not supported")
        out = QSeries.one(self.order)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base if e > 1 else base
            e >>= 1
        return out

    def q_shift(self, m: int) -> "QSeries":
        """Multiply by q^m, keeping the truncation order."""
        if m < 0:
            raise ValueError("negative shift")
        return QSeries(([mpq(0)] * m + self.coeffs)[:self.order])


# ---------------------------------------------------------------------------
# Classical series.
# ---------------------------------------------------------------------------


def sigma_table(power: int, N: int) -> list[mpq]:
    """Divisor sums sigma_power(n) for 0 <= n < N (entry 0 unused, set 0)."""
    table = [0] * N
    for d in range(1, N):
        dp = d ** power
        for m in range(d, N, d):
            table[m] += dp
    return [mpq(v) for v in table]


def eisenstein_q(k: int, N: int) -> QSeries:
    """Normalized Eisenstein series E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n."""
    if k % 2 != 0 or k < 4:
        raise ValueError("eisenstein_q requires even weight k >= 4")
    if N < 1:
        raise ValueError("need at least the constant term")
    factor = mpq(-2 * k) / bernoulli(k)
    sig = sigma_table(k - 1, N)
    return QSeries([mpq(1)] + [factor * sig[n] for n in range(1, N)])


def delta_q(N: int) -> QSeries:
    """Discriminant cusp form via (E4^3 - E6^2)/1728, normalized c(1) = 1."""
    if N < 2:
        raise ValueError("delta_q needs order at least 2")
    e4 = eisenstein_q(4, N)
    e6 = eisenstein_q(6, N)
    return (e4 ** 3 - e6 ** 2) * mpq(1, 1728)


def delta_q_product(N: int) -> QSeries:
    """Independent construction of the discriminant: q prod (1-q^n)^24."""
    if N < 2:
        raise ValueError("needs order at least 2")
    prod = QSeries.one(N)
    for n in range(1, N):
        factor = QSeries([mpq(1)] + [mpq(0)] * (N - 1))
        if n < N:
            factor.coeffs[n] = mpq(-1)
        prod = prod * (factor ** 24)
    return prod.q_shift(1)


def dims(k: int) -> tuple[int, int]:
    """(dim M_k, dim S_k) for level one and even weight k >= 0."""
    if k % 2 != 0 or k < 0:
        raise ValueError("dims requires even k >= 0")
    if k == 0:
        return (1, 0)
    if k == 2:
        return (0, 0)
    m = k // 12 + (0 if k % 12 == 2 else 1)
    return (m, m - 1)


# ---------------------------------------------------------------------------
# Bases and exact solves.
# ---------------------------------------------------------------------------


def cusp_monomials(k: int) -> list[tuple[int, int]]:
    """Exponent pairs (a, b) with 4a + 6b = k - 12: the products D*E4^a*E6^b
    spanning the weight-k cusp forms, ordered by decreasing a."""
    if k % 2 != 0:
        raise ValueError("even weight required")
    pairs = []
    for b in range(0, (k - 12) // 6 + 1):
        rem = k - 12 - 6 * b
        if rem >= 0 and rem % 4 == 0:
            pairs.append((rem // 4, b))
    pairs.sort(reverse=True)
    return pairs


def _cusp_spanning_set(k: int, N: int) -> list[QSeries]:
    d = delta_q(N)
    e4 = eisenstein_q(4, N)
    e6 = eisenstein_q(6, N)
    return [d * e4 ** a * e6 ** b for a, b in cusp_monomials(k)]


def miller_basis(k: int, N: int) -> list[QSeries]:
    """Echelonized basis of the weight-k cusp space: g_i = q^i + O(q^(s+1)).

    Built from the spanning products D*E4^a*E6^b and exact Gauss-Jordan
    elimination on the coefficient rows.
    """
    if k % 2 != 0 or k < 0:
        raise ValueError("even weight required")
    mdim, sdim = dims(k)
    if N <= mdim:
        raise ValueError("truncation order must exceed dim M_k")
    if sdim == 0:
        return []
    rows = [list(s.coeffs) for s in _cusp_spanning_set(k, N)]
    _echelonize(rows)
    basis = [QSeries(r) for r in rows[:sdim]]
    for i, g in enumerate(basis, start=1):
        lead = [g.coeff(j) for j in range(1, sdim + 1)]
        expect = [mpq(1) if j == i else mpq(0) for j in range(1, sdim + 1)]
        if lead != expect:
            raise ValueError("insufficient truncation for echelonization")
    return basis


def _echelonize(rows: list[list[mpq]]) -> None:
    """In-place exact reduced row echelon form."""
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
        if r == nrows:
            break


def solve_in_span(target: QSeries, generators: list[QSeries]) -> list[mpq]:
    """Exact coefficients x with sum x_i gen_i = target to truncation order.

    Raises InconsistentSystem when no combination matches, and
    RankDeficientGenerators when the generators are dependent (no unique x).
    """
    if not generators:
        raise RankDeficientGenerators("no generators")
    n = min([g.order for g in generators] + [target.order])
    g = len(generators)
    if n <= g:
        raise ValueError("truncation order must exceed the generator count")
    # augmented matrix [A | b] with rows indexed by q-power
    aug = [[gen.coeffs[i] for gen in generators] + [target.coeffs[i]]
           for i in range(n)]
    piv_cols: list[int] = []
    r = 0
    for c in range(g + 1):
        pivot = next((i for i in range(r, n) if aug[i][c] != 0), None)
        if pivot is None:
            continue
        if c == g:
            raise InconsistentSystem(
                "target is not in the span of the generators")
        aug[r], aug[pivot] = aug[pivot], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(n):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        piv_cols.append(c)
        r += 1
        if r == n:
            break
    if len(piv_cols) < g:
        raise RankDeficientGenerators(
            "generators are linearly dependent to this truncation order")
    sol = [mpq(0)] * g
    for row, c in enumerate(piv_cols):
        sol[c] = aug[row][g]
    return sol


@dataclass(frozen=True)
class ProductDecomposition:
    """target = sum of c * E_a * E_b terms; a = 0 marks a single factor E_b."""

    terms: tuple[tuple[mpq, int, int], ...]

    def coefficients(self) -> list[mpq]:
        return [t[0] for t in self.terms]

    def reconstruct(self, N: int) -> QSeries:
        acc = QSeries.zero(N)
        for c, a, b in self.terms:
            prod = eisenstein_q(b, N)
            if a != 0:
                prod = eisenstein_q(a, N) * prod
            acc = acc + prod * c
        return acc


def product_candidates(k: int) -> list[tuple[int, int]]:
    """Weight-k product candidates (a, b): E_k itself, then E_a E_{k-a} for
    a = 4, 6, 8, ... , truncated to the first dim M_k entries."""
    mdim, _ = dims(k)
    cands = [(0, k)]
    a = 4
    while len(cands) < mdim:
        if k - a < 4:
            raise ValueError(f"not enough product candidates at weight {k}")
        cands.append((a, k - a))
        a += 2
    return cands


def decompose_delta_power(h: int, N: int) -> ProductDecomposition:
    """Express the h-th power of the discriminant in Eisenstein products.

    D^h = c_1 E_{12h} + sum_{i>=2} c_i E_{a_i} E_{12h-a_i}, with the
    candidate list fixed as E_{12h}, E_4 E_{12h-4}, E_6 E_{12h-6}, ...
    """
    if h < 1:
        raise ValueError("h must be a positive integer")
    k = 12 * h
    mdim, _ = dims(k)
    if N <= mdim:
        raise ValueError("truncation order must exceed dim M_k")
    cands = product_candidates(k)
    gens = []
    for a, b in cands:
        gen = eisenstein_q(b, N)
        if a != 0:
            gen = eisenstein_q(a, N) * gen
        gens.append(gen)
    target = delta_q(N) ** h
    sol = solve_in_span(target, gens)
    return ProductDecomposition(
        tuple((c, a, b) for c, (a, b) in zip(sol, cands)))


# ---------------------------------------------------------------------------
# Certified pointwise evaluation.
# ---------------------------------------------------------------------------


def exp_tail_bound(scale, alpha: int, start: int, y: CertifiedReal,
                   two_pi: CertifiedReal) -> CertifiedReal:
    """Upper bound for sum_{n >= start} scale * n^alpha * e^(-2 pi n y).

    Once n^alpha e^(-2 pi n y) is decreasing (n >= alpha / (2 pi y)) the sum
    is bounded by the integral from start-1, which is
    scale * Gamma(alpha+1, 2 pi (start-1) y) / (2 pi y)^(alpha+1); any terms
    before the decreasing range are added explicitly.
    """
    if alpha < 0:
        raise ValueError("nonnegative integer exponent required")
    scale = CertifiedReal._coerce(scale)
    two_pi_y = two_pi * y
    n_dec = alpha / two_pi_y.mag_lower() if two_pi_y.mag_lower() > 0 else math.inf
    if not math.isfinite(n_dec):
        return CertifiedReal(two_pi.mid, math.inf)
    n0 = max(start, int(math.ceil(n_dec)) + 1)
    extra = CertifiedReal.from_exact(0)
    for n in range(start, n0):
        extra = extra + (-(two_pi_y * n)).exp() * (n ** alpha)
    gam = inc_gamma_upper_int(alpha + 1, two_pi_y * (n0 - 1),
                              prec=max(two_pi.mid.precision, 64))
    integral = gam / two_pi_y.powi(alpha + 1)
    return scale * (extra + integral)


def qseries_eval(s: QSeries, tau: CertifiedComplex,
                 tail_bound_exponent=None, tail_bound_scale=1,
                 prec: int = DEFAULT_PRECISION) -> CertifiedComplex:
    """Certified value of sum c(n) e(n tau) at Im tau > 0.

    The caller must supply a proven growth bound |c(n)| <= scale * n^exponent;
    the radius then covers the tail past the truncation order.  A fractional
    exponent is rounded up to the next integer (n^a <= n^ceil(a) for n >= 1).
    """
    if tail_bound_exponent is None:
        raise ValueError("growth bound missing: pass tail_bound_exponent "
                         "(and tail_bound_scale) proven for this series")
    with precision(prec + GUARD_BITS):
        y = tau.imag_ball()
        if y.lower() <= 0:
            raise ValueError("qseries_eval requires Im tau > 0")
        two_pi = CertifiedReal.pi() * 2
        # q = e(tau), iterated powers keep the enclosure tight
        q = CertifiedComplex.i_times(CertifiedComplex.from_real(two_pi)
                                     * tau).exp()
        acc = CertifiedComplex.from_exact(s.coeffs[0])
        qn = CertifiedComplex.from_exact(1)
        for n in range(1, s.order):
            qn = qn * q
            c = s.coeffs[n]
            if c != 0:
                acc = acc + qn * c
        scale = as_rational(tail_bound_scale)
        if scale < 0:
            raise ValueError("tail_bound_scale must be nonnegative")
        if scale == 0:
            return acc
        alpha = math.ceil(tail_bound_exponent)
        tail = exp_tail_bound(CertifiedReal.from_exact(scale), alpha,
                              s.order, y, two_pi)
        return CertifiedComplex(acc.mid, fadd_up(acc.rad, tail.mag_upper()))


__all__ = [
    "QSeries",
    "ProductDecomposition",
    "SpanSolveError",
    "InconsistentSystem",
    "RankDeficientGenerators",
    "sigma_table",
    "eisenstein_q",
    "delta_q",
    "delta_q_product",
    "dims",
    "cusp_monomials",
    "miller_basis",
    "solve_in_span",
    "product_candidates",
    "decompose_delta_power",
    "exp_tail_bound",
    "qseries_eval",
]
