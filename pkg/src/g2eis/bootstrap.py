"""Representations of powers of the discriminant times its Eichler integral.

For h >= 2 the weight-12h decomposition D^h = sum_i c_i E_{a_i} E_{b_i}
lifts to an identity of holomorphic functions

    D(tau)^h I(tau) = remainder(tau) - sum_i c_i E_{a_i}(tau) G_{b_i-10}(tau),

where I is the Eichler integral of the discriminant, G_k is the certified
weight-k second-order Eisenstein series seeded with the tenth power of
(X - tau) against the discriminant's parabolic cocycle, and the remainder
is a cusp form of weight 12h - 10.  The remainder is pinned down by point
evaluations of the left-hand side plus the Eisenstein part at a generic
family of points; once built, the whole representation evaluates much
faster than the direct Fourier series of D^h I, which is the point of
chaining stages: a few slow evaluations buy a fast evaluator for the
next, larger h.

The remainder is stored as certified coordinates in the monomial cusp
basis D E4^alpha E6^beta so that both its exact-series q-expansion and
certified point values need nothing beyond the three classical series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from gmpy2 import mpq

from .arith import (
    DEFAULT_PRECISION,
    GUARD_BITS,
    CertifiedComplex,
    CertifiedReal,
    precision,
)
from .cocycle import ParabolicCocycle, period_polynomial
from .eichler import delta_eichler, eichler_eval
from .g2es import TargetUnreachable, eval_g2es
from .modforms import (
    QSeries,
    cusp_monomials,
    decompose_delta_power,
    delta_q,
    dims,
    eisenstein_q,
    exp_tail_bound,
    qseries_eval,
)

__all__ = [
    "G2ESRepresentation",
    "IllConditionedPoints",
    "basis_coordinates",
    "bootstrap_chain",
    "build_representation",
    "delta_cocycle",
    "eval_classical_eisenstein",
    "eval_delta",
    "eval_representation",
    "solve_point",
]


class IllConditionedPoints(ValueError):
    """The basis-evaluation matrix fell below the conditioning gate."""


# ---------------------------------------------------------------------------
# Certified point values of the classical ingredients.
# ---------------------------------------------------------------------------


def _series_point(series_fn, scale, alpha: int, tau: CertifiedComplex,
                  target: float, prec: int) -> CertifiedComplex:
    """Evaluate a q-series with proven growth |c(n)| <= scale n^alpha,
    choosing the truncation so the tail fits half the target."""
    with precision(prec + GUARD_BITS):
        y = tau.imag_ball()
        if y.lower() <= 0:
            raise ValueError("evaluation requires Im tau > 0")
        two_pi = CertifiedReal.pi() * 2
        order = 8
        while exp_tail_bound(scale, alpha, order, y,
                             two_pi).upper() > target / 2:
            order *= 2
            if order > 1 << 21:
                raise TargetUnreachable(
                    f"classical series tail stalls above {target:.3e}")
        return qseries_eval(series_fn(order), tau, tail_bound_exponent=alpha,
                            tail_bound_scale=scale, prec=prec)


def _bits_for(target: float) -> int:
    return max(DEFAULT_PRECISION, int(-math.log2(target)) + 64)


def eval_delta(tau: CertifiedComplex, target_error,
               prec: int | None = None) -> CertifiedComplex:
    """Certified value of the discriminant cusp form.

    Tail via the Deligne bound |c(n)| <= sigma_0(n) n^(11/2) <= 2 n^6
    (imported theorem plus sigma_0(n) <= 2 sqrt(n))."""
    target = float(target_error)
    if not 0 < target < 1:
        raise ValueError("target_error must lie in (0, 1)")
    if prec is None:
        prec = _bits_for(target)
    return _series_point(delta_q, 2, 6, tau, target, prec)


def eval_classical_eisenstein(a: int, tau: CertifiedComplex, target_error,
                              prec: int | None = None) -> CertifiedComplex:
    """Certified value of the classical weight-a Eisenstein series, constant
    term 1; a = 0 returns exactly 1.

    The coefficient of q^n is (-2a/B_a) sigma_{a-1}(n), and
    sigma_{a-1}(n) <= zeta(a-1) n^(a-1) <= (5/4) n^(a-1) for a >= 4."""
    if a == 0:
        return CertifiedComplex.from_exact(1)
    if a % 2 != 0 or a < 4:
        raise ValueError("even weight a >= 4 (or 0) required")
    target = float(target_error)
    if not 0 < target < 1:
        raise ValueError("target_error must lie in (0, 1)")
    if prec is None:
        prec = _bits_for(target)
    lead = abs(eisenstein_q(a, 2).coeff(1))
    return _series_point(lambda n: eisenstein_q(a, n), lead * mpq(5, 4),
                         a - 1, tau, target, prec)


_COCYCLE_CACHE: dict[int, ParabolicCocycle] = {}


def delta_cocycle(prec: int = DEFAULT_PRECISION) -> ParabolicCocycle:
    """The discriminant's parabolic cocycle, shared across builds."""
    phi = _COCYCLE_CACHE.get(prec)
    if phi is None:
        phi = ParabolicCocycle(12, period_polynomial(delta_q(40), 12, prec))
        _COCYCLE_CACHE[prec] = phi
    return phi


# ---------------------------------------------------------------------------
# The representation object.
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class G2ESRepresentation:
    """D^h I = remainder - sum of terms, evaluatable anywhere on the upper
    half plane.

    ``terms`` holds (coefficient, classical weight a, series weight k);
    each stands for coefficient * E_a * G_k with G_k the second-order
    series seeded by (X - tau)^10 against ``phi``.  The remainder is the
    weight-(12h - 10) cusp form with certified coordinates ``coords`` in
    the monomial basis D E4^alpha E6^beta listed in ``monomials``; its
    constant q-coefficient is exactly zero by construction.  Instances
    are immutable; ``solve_points`` and ``intermediates`` record the
    evaluations that determined the remainder (empty when the cusp space
    is trivial and no evaluation was needed).
    """

    h: int
    terms: tuple[tuple[mpq, int, int], ...]
    phi: ParabolicCocycle
    monomials: tuple[tuple[int, int], ...]
    coords: tuple[CertifiedComplex, ...]
    solve_points: tuple[CertifiedComplex, ...]
    intermediates: tuple[CertifiedComplex, ...]
    determinant: CertifiedComplex | None = None

    @property
    def remainder_weight(self) -> int:
        return 12 * self.h - 10

    def remainder_coefficients(self, n_max: int) -> list[CertifiedComplex]:
        """Certified q-expansion of the remainder through q^n_max."""
        out = [CertifiedComplex.from_exact(0) for _ in range(n_max + 1)]
        if not self.monomials:
            return out
        series = _monomial_series(self.monomials, n_max + 1)
        with precision(DEFAULT_PRECISION + GUARD_BITS):
            for coord, mono in zip(self.coords, series):
                for n in range(1, n_max + 1):
                    c = mono.coeff(n)
                    if c != 0:
                        out[n] = out[n] + coord * c
        return out

    def miller_coordinates(self) -> tuple[CertifiedComplex, ...]:
        """Coordinates in the echelon cusp basis m_i = q^i + O(q^(dim+1)):
        simply the remainder's coefficients of q^1..q^dim."""
        dim = len(self.monomials)
        return tuple(self.remainder_coefficients(dim)[1:]) if dim else ()

    def remainder_eval(self, tau: CertifiedComplex, target_error,
                       prec: int | None = None) -> CertifiedComplex:
        """Certified remainder value from the three classical factors."""
        target = float(target_error)
        if not 0 < target < 1:
            raise ValueError("target_error must lie in (0, 1)")
        if not self.monomials:
            return CertifiedComplex.from_exact(0)
        if prec is None:
            prec = _bits_for(target)
        with precision(prec + GUARD_BITS):
            y_low = tau.imag_ball().lower()
            if y_low <= 0:
                raise ValueError("remainder_eval requires Im tau > 0")
            # rough magnitudes to share the budget: |D| <= 2 e^(-2 pi y)
            # once y >= 1/2 (and we only care about overestimates),
            # |E_a| <= 2 similarly; stay crude but safe with floats.
            d_rough = min(1.0, 2.0 * math.exp(-2.0 * math.pi * y_low))
            weight = 0.0
            for coord, (alpha, beta) in zip(self.coords, self.monomials):
                weight += coord.mag_upper() * d_rough * 4.0 ** (alpha + beta)
            weight = max(weight, 1e-300)
            share = target / (4.0 * (1 + 2 * len(self.monomials)))
            d_val = eval_delta(tau, share * d_rough / weight, prec=prec)
            e4 = eval_classical_eisenstein(4, tau, share / weight, prec=prec)
            e6 = eval_classical_eisenstein(6, tau, share / weight, prec=prec)
            acc = CertifiedComplex.from_exact(0)
            for coord, (alpha, beta) in zip(self.coords, self.monomials):
                acc = acc + coord * (d_val * e4.powi(alpha) * e6.powi(beta))
            return acc


def _monomial_series(monomials, order: int) -> list[QSeries]:
    d = delta_q(order)
    e4 = eisenstein_q(4, order)
    e6 = eisenstein_q(6, order)
    return [d * e4 ** alpha * e6 ** beta for alpha, beta in monomials]


def basis_coordinates(rep: G2ESRepresentation,
                      basis: list[QSeries]) -> tuple[CertifiedComplex, ...]:
    """Remainder coordinates in a user-supplied cusp basis.

    ``basis`` lists exact q-expansions f_1, ..., f_dim with f_i starting
    at q^i (unit leading coefficient not required, only nonzero), each
    carrying at least dim + 1 coefficients.  Forward substitution against
    the remainder's certified expansion gives the coordinates; with a
    unit-triangular basis this is the usual echelon-to-display
    conversion.
    """
    dim = len(rep.monomials)
    if len(basis) != dim:
        raise ValueError(f"need exactly {dim} basis forms")
    head = rep.remainder_coefficients(dim)
    with precision(DEFAULT_PRECISION + GUARD_BITS):
        coords: list[CertifiedComplex] = []
        for i in range(1, dim + 1):
            f = basis[i - 1]
            if f.order < dim + 1:
                raise ValueError("basis expansions need at least "
                                 f"{dim + 1} coefficients")
            if any(f.coeff(n) != 0 for n in range(i)) or f.coeff(i) == 0:
                raise ValueError(f"basis form {i} must start at q^{i}")
            value = head[i]
            for l, prev in enumerate(coords, start=1):
                c = basis[l - 1].coeff(i)
                if c != 0:
                    value = value - prev * c
            coords.append(value / CertifiedComplex.from_exact(f.coeff(i)))
        return tuple(coords)


# ---------------------------------------------------------------------------
# Building a representation from point evaluations.
# ---------------------------------------------------------------------------


def _default_evaluator():
    integral = delta_eichler()
    return lambda tau, target: eichler_eval(integral, 12, tau, target)


def solve_point(j: int) -> CertifiedComplex:
    """The generic point family 1/j + (j+1)i used for the linear solve."""
    if j < 1:
        raise ValueError("point index must be positive")
    return CertifiedComplex.from_exact(mpq(1, j), j + 1)


def _eisenstein_part(terms, phi, tau, target: float,
                     prec: int) -> CertifiedComplex:
    """sum c_i E_{a_i}(tau) G_{k_i}(tau) with radius aimed at target."""
    acc = CertifiedComplex.from_exact(0)
    rough = []
    for c, a, k in terms:
        e_mag = eval_classical_eisenstein(a, tau, 1e-6, prec=64).mag_upper()
        g_mag = eval_g2es(k, phi, 10, tau, 1e-6, prec=96).mag_upper()
        rough.append((float(abs(c)) * (e_mag + 1e-30),
                      float(abs(c)) * (g_mag + 1e-30)))
    share = target / (4.0 * max(1, len(terms)))
    for (c, a, k), (ce_mag, cg_mag) in zip(terms, rough):
        e_val = eval_classical_eisenstein(
            a, tau, min(share / max(cg_mag, 1e-290), 0.5), prec=prec)
        g_val = eval_g2es(
            k, phi, 10, tau, min(share / max(ce_mag, 1e-290), 0.5), prec=prec)
        acc = acc + (e_val * g_val) * c
    return acc


def _solve_ball_system(matrix, rhs):
    """Gaussian elimination with midpoint pivoting on certified balls,
    guarded by a scale-invariant determinant conditioning gate.  Returns
    the solution vector together with the certified determinant.

    The gate compares |det| = prod |pivots| against 10^-3 per stage of
    the eliminated row's remaining norm: every pivot must carry at least
    a thousandth of its row.  Row norms of the eliminated (not the raw)
    matrix are the meaningful yardstick here because evaluation rows at
    points of growing height are scaled by e^(-2 pi Im tau) each; a gate
    on raw row norms would reject every usable point family outright,
    while the staged form still rejects degenerate sets (repeated or
    near-dependent points leave a later row with no dominant pivot)."""
    n = len(rhs)
    a = [row[:] for row in matrix]
    b = rhs[:]
    det = CertifiedComplex.from_exact(1)
    gate = 1.0
    for col in range(n):
        pivot_row = max(range(col, n), key=lambda r: a[r][col].mag_lower())
        if pivot_row != col:
            a[col], a[pivot_row] = a[pivot_row], a[col]
            b[col], b[pivot_row] = b[pivot_row], b[col]
            det = -det
        pivot = a[col][col]
        row_norm = math.sqrt(math.fsum(
            a[col][cc].mag_upper() ** 2 for cc in range(col, n)))
        gate *= 1e-3 * row_norm
        if pivot.mag_lower() < 1e-3 * row_norm:
            raise IllConditionedPoints(
                f"pivot lower bound {pivot.mag_lower():.3e} under the "
                f"conditioning gate {1e-3 * row_norm:.3e} at stage "
                f"{col + 1} (|det| >= {det.mag_lower():.3e} required "
                f">= {gate:.3e}); point set rejected")
        det = det * pivot
        for r in range(col + 1, n):
            factor = a[r][col] / pivot
            a[r][col] = CertifiedComplex.from_exact(0)
            for cc in range(col + 1, n):
                a[r][cc] = a[r][cc] - factor * a[col][cc]
            b[r] = b[r] - factor * b[col]
    out: list[CertifiedComplex] = [None] * n
    for col in range(n - 1, -1, -1):
        value = b[col]
        for cc in range(col + 1, n):
            value = value - a[col][cc] * out[cc]
        out[col] = value / a[col][col]
    return out, det


def build_representation(h: int, evaluator=None, target_error=mpq(1, 10 ** 30),
                         prec: int | None = None) -> G2ESRepresentation:
    """Build the representation of D^h I for h >= 2.

    ``evaluator(tau, target) -> CertifiedComplex`` supplies certified
    values of the Eichler integral I; None selects the direct Fourier
    series.  ``target_error`` aims the certified radii of the remainder's
    basis coordinates.  The remainder is solved from point evaluations of
    D^h I + (Eisenstein part) at the generic points 1/j + (j+1)i; when
    the cusp space in weight 12h - 10 is trivial (h = 2) the remainder is
    identically zero and nothing is evaluated.

    Raises :class:`IllConditionedPoints` if the basis-evaluation matrix
    fails the determinant gate, :class:`TargetUnreachable` if the
    compounded radii land above the requested target.
    """
    if h < 2:
        raise ValueError("h >= 2 required (h = 1 has no Eisenstein-product "
                         "decomposition of the discriminant)")
    target = float(target_error)
    if not 0 < target < 1:
        raise ValueError("target_error must lie in (0, 1)")
    if prec is None:
        prec = _bits_for(target) + 32
    mdim, _ = dims(12 * h)
    decomp = decompose_delta_power(h, mdim + 2)
    terms = tuple((c, a, b - 10) for c, a, b in decomp.terms)
    phi = delta_cocycle(max(prec, DEFAULT_PRECISION))
    _, sdim = dims(12 * h - 10)
    if sdim == 0:
        return G2ESRepresentation(h=h, terms=terms, phi=phi, monomials=(),
                                  coords=(), solve_points=(),
                                  intermediates=())
    if evaluator is None:
        evaluator = _default_evaluator()

    monomials = tuple(cusp_monomials(12 * h - 10))
    if len(monomials) != sdim:
        raise RuntimeError("monomial count disagrees with the cusp "
                           "dimension")  # pragma: no cover
    points = [solve_point(j) for j in range(1, sdim + 1)]

    budget = target / 16.0
    for _ in range(3):
        with precision(prec + GUARD_BITS):
            rhs = []
            matrix = []
            for tau in points:
                d_val = eval_delta(tau, budget, prec=prec)
                d_mag = max(d_val.mag_upper(), 1e-290)
                # the D^h factor rescales the oracle's error, so the oracle
                # budget relaxes by |D|^-h (clamped into a sane range)
                oracle_target = min(max(budget / d_mag ** h, 1e-250), 0.5)
                lhs = d_val.powi(h) * evaluator(tau, oracle_target)
                f_e = _eisenstein_part(terms, phi, tau, budget, prec)
                rhs.append(lhs + f_e)
                e4 = eval_classical_eisenstein(4, tau, budget * d_mag,
                                               prec=prec)
                e6 = eval_classical_eisenstein(6, tau, budget * d_mag,
                                               prec=prec)
                matrix.append([d_val * e4.powi(alpha) * e6.powi(beta)
                               for alpha, beta in monomials])
            coords, det = _solve_ball_system(matrix, rhs)
        worst = max(c.rad for c in coords)
        if worst <= target:
            return G2ESRepresentation(
                h=h, terms=terms, phi=phi, monomials=monomials,
                coords=tuple(coords), solve_points=tuple(points),
                intermediates=tuple(rhs), determinant=det)
        budget /= 4.0 * max(2.0, worst / target)
        if budget <= 1e-280:
            break
    raise TargetUnreachable(
        f"compounded remainder radius {worst:.3e} exceeds the requested "
        f"target {target:.3e}")


# ---------------------------------------------------------------------------
# Evaluating a representation, and chaining stages.
# ---------------------------------------------------------------------------


def eval_representation(rep: G2ESRepresentation, tau: CertifiedComplex,
                        target_error,
                        prec: int | None = None) -> CertifiedComplex:
    """Certified value of D(tau)^h I(tau) through the representation:
    remainder(tau) minus the Eisenstein part, budget split across terms.
    """
    target = float(target_error)
    if not 0 < target < 1:
        raise ValueError("target_error must lie in (0, 1)")
    if prec is None:
        prec = _bits_for(target)
    with precision(prec + GUARD_BITS):
        if tau.imag_ball().lower() <= 0:
            raise ValueError("eval_representation requires Im tau > 0")
        budget = target / 4.0
        for _ in range(3):
            remainder = rep.remainder_eval(tau, budget, prec=prec)
            if remainder.rad > target:
                # The stored coordinate radii floor the remainder radius no
                # matter how tight the budget; retrying cannot help.
                raise TargetUnreachable(
                    f"remainder radius {remainder.rad:.3e} exceeds the "
                    f"requested target {target:.3e}; the representation "
                    f"was built too coarsely for this evaluation")
            value = remainder \
                - _eisenstein_part(rep.terms, rep.phi, tau, budget, prec)
            if value.rad <= target:
                return value
            budget /= 4.0 * max(2.0, value.rad / target)
            if budget <= 1e-280:
                break
        raise TargetUnreachable(
            f"evaluation radius {value.rad:.3e} exceeds the requested "
            f"target {target:.3e}")


def bootstrap_chain(h_list, target_error=mpq(1, 10 ** 30),
                    prec: int | None = None) -> list[G2ESRepresentation]:
    """Build representations for an ascending list of powers, each stage
    past the first evaluated through its predecessor.

    The first entry must be 2, the self-contained stage: its remainder
    vanishes outright, so the Fourier-series evaluator it wraps is never
    consulted for a linear solve.  Stage i > 1 uses stage i-1's
    eval_representation divided by D^{h_{i-1}} as its point oracle for I;
    all stage radii flow through the certified arithmetic, so the error
    budgets compound explicitly into the remainder radii.

    Tight targets get expensive fast: the linear solve at the generic
    points amplifies the point radii by many orders (the rows are nearly
    parallel), the inner stages absorb that through their own budgets,
    and the low-weight series those stages carry need coset truncations
    that grow roughly like a power of the inverse budget with quadratic
    kernel cost.  Targets around 1e-12 chain in seconds; 1e-25 takes the
    better part of an hour.  For tight remainders prefer the direct
    builder, which only ever meets its own high-weight series.
    """
    h_list = list(h_list)
    if not h_list:
        raise ValueError("h_list must not be empty")
    if h_list[0] != 2:
        raise ValueError("the chain must start at h = 2, the "
                         "self-contained stage")
    if any(b <= a for a, b in zip(h_list, h_list[1:])):
        raise ValueError("h_list must be strictly ascending")
    reps = [build_representation(2, None, target_error, prec=prec)]
    for h in h_list[1:]:
        prev = reps[-1]

        def chained(tau, tgt, _prev=prev):
            d_val = eval_delta(tau, max(min(1e-30, float(tgt) * 1e-3),
                                        1e-200))
            d_mag = max(d_val.mag_upper(), 1e-290) ** _prev.h
            inner_target = min(max(tgt * d_mag / 4.0, 1e-200), tgt / 4.0)
            inner = eval_representation(_prev, tau, inner_target)
            return inner / d_val.powi(_prev.h)

        reps.append(build_representation(h, chained, target_error, prec=prec))
    return reps
