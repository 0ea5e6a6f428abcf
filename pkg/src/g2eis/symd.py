"""The symmetric-power representation on degree-d polynomials.

Polynomials live in the monomial basis X^0..X^d with either exact rational
or certified complex coefficients; the two modes share all code paths since
both scalar types support the same arithmetic.  Matrix entries stay exact
integers, so the action of a group element on an exact polynomial is exact.
"""

from __future__ import annotations

from gmpy2 import mpq

from .arith import CertifiedComplex, as_rational, binomial


class GroupElement:
    """An integer matrix (a b; c d) with determinant one."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: int, b: int, c: int, d: int):
        a, b, c, d = int(a), int(b), int(c), int(d)
        if a * d - b * c != 1:
            raise ValueError(f"determinant must be 1, got {a * d - b * c}")
        self.a, self.b, self.c, self.d = a, b, c, d

    @staticmethod
    def identity() -> "GroupElement":
        return GroupElement(1, 0, 0, 1)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "GroupElement":
        return GroupElement(self.d, -self.b, -self.c, self.a)

    def __pow__(self, n: int) -> "GroupElement":
        if n < 0:
            return self.inverse() ** (-n)
        out = GroupElement.identity()
        base = self
        while n:
            if n & 1:
                out = out * base
            if n > 1:
                base = base * base
            n >>= 1
        return out

    def negate(self) -> "GroupElement":
        """The matrix -g, as a raw tuple (determinant of -g is still 1 only
        for even size; here (-a)(-d) - (-b)(-c) = 1, so it stays valid)."""
        return GroupElement(-self.a, -self.b, -self.c, -self.d)

    def tuple(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.tuple() == other.tuple()

    def __hash__(self):
        return hash(self.tuple())

    def __repr__(self):
        return f"GroupElement({self.a}, {self.b}, {self.c}, {self.d})"


S = GroupElement(0, -1, 1, 0)
T = GroupElement(1, 1, 0, 1)


class PolyD:
    """A polynomial of degree bound d: exactly d+1 coefficients of X^0..X^d."""

    __slots__ = ("d", "coeffs")

    def __init__(self, coeffs, d: int | None = None):
        coeffs = list(coeffs)
        if d is None:
            d = len(coeffs) - 1
        if len(coeffs) != d + 1:
            raise ValueError(f"need exactly {d + 1} coefficients")
        self.d = d
        self.coeffs = coeffs

    @staticmethod
    def zero(d: int, exact: bool = True) -> "PolyD":
        z = mpq(0) if exact else CertifiedComplex.from_exact(0)
        return PolyD([z] * (d + 1))

    @staticmethod
    def monomial(j: int, d: int) -> "PolyD":
        if not 0 <= j <= d:
            raise ValueError("monomial degree out of range")
        return PolyD([mpq(1) if i == j else mpq(0) for i in range(d + 1)])

    def is_exact(self) -> bool:
        return not any(isinstance(c, CertifiedComplex) for c in self.coeffs)

    def __add__(self, other: "PolyD") -> "PolyD":
        self._check(other)
        return PolyD([x + y for x, y in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "PolyD") -> "PolyD":
        self._check(other)
        return PolyD([x - y for x, y in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> "PolyD":
        return PolyD([-x for x in self.coeffs])

    def scale(self, c) -> "PolyD":
        return PolyD([x * c for x in self.coeffs])

    def eval(self, x):
        """Horner evaluation; x may be exact or a certified complex."""
        acc = self.coeffs[self.d]
        for j in range(self.d - 1, -1, -1):
            acc = acc * x + self.coeffs[j]
        return acc

    def _check(self, other: "PolyD"):
        if self.d != other.d:
            raise ValueError("degree bounds differ")

    def __eq__(self, other):
        if not isinstance(other, PolyD):
            return NotImplemented
        return self.d == other.d and all(
            x == y for x, y in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.d, tuple(str(c) for c in self.coeffs)))

    def __repr__(self):
        return f"PolyD({self.coeffs!r})"


def _int_poly_pow_table(p0: int, p1: int, d: int) -> list[list[int]]:
    """Coefficient lists of (p0 + p1 X)^e for e = 0..d, exact integers."""
    table = [[1]]
    for _ in range(d):
        prev = table[-1]
        nxt = [0] * (len(prev) + 1)
        for i, c in enumerate(prev):
            nxt[i] += c * p0
            nxt[i + 1] += c * p1
        table.append(nxt)
    return table


def sym_action(gamma: GroupElement, p: PolyD) -> PolyD:
    """Apply the d-th symmetric power of gamma to p.

    The defining substitution acts for the inverse element:
    (sym g^-1 p)(X) = (cX + d)^d p((aX + b)/(cX + d)) for g = (a b; c d),
    so the action of gamma itself substitutes the entries of gamma^-1.
    """
    d = p.d
    g = gamma.inverse()
    num = _int_poly_pow_table(g.b, g.a, d)    # (aX + b)^j, ascending powers
    den = _int_poly_pow_table(g.d, g.c, d)    # (cX + d)^(d-j)
    out = [None] * (d + 1)
    for j, pj in enumerate(p.coeffs):
        nj, dj = num[j], den[d - j]
        for u, cu in enumerate(nj):
            if cu == 0:
                continue
            for v, cv in enumerate(dj):
                if cv == 0:
                    continue
                w = cu * cv
                term = pj * w
                out[u + v] = term if out[u + v] is None else out[u + v] + term
    zero = mpq(0) if p.is_exact() else CertifiedComplex.from_exact(0)
    return PolyD([zero if c is None else c for c in out])


def pair(p: PolyD, q: PolyD):
    """Self-duality pairing: sum (-1)^(d-i) binom(d,i)^-1 p_i q_{d-i}.

    For even d this gives the evaluation identity pair(p, (X-t)^d) = p(t);
    an odd degree bound picks up the extra sign (-1)^d.  All series
    machinery in this package runs at even d.
    """
    p._check(q)
    d = p.d
    acc = None
    for i in range(d + 1):
        w = mpq((-1) ** (d - i), binomial(d, i))
        term = p.coeffs[i] * q.coeffs[d - i] * w
        acc = term if acc is None else acc + term
    return acc


def dual_apply(w: PolyD, v: PolyD):
    """Apply the dual functional of w: the pairing against v."""
    return pair(w, v)


def xtau_power(tau, r: int, d: int) -> PolyD:
    """(X - tau)^r as a degree-d polynomial; tau exact or certified."""
    if not 0 <= r <= d:
        raise ValueError("power out of range")
    if isinstance(tau, CertifiedComplex):
        neg_tau = -tau
        powers = [CertifiedComplex.from_exact(1)]
    else:
        neg_tau = -as_rational(tau)
        powers = [mpq(1)]
    for _ in range(r):
        powers.append(powers[-1] * neg_tau)
    coeffs = []
    for i in range(d + 1):
        if i <= r:
            coeffs.append(powers[r - i] * binomial(r, i))
        else:
            coeffs.append(powers[0] * 0)
    return PolyD(coeffs)


def from_xtau_basis(components, tau) -> PolyD:
    """Combine coefficients f_r in the (X - tau)^r basis into monomial form."""
    d = len(components) - 1
    acc = None
    for r, f in enumerate(components):
        term = xtau_power(tau, r, d).scale(f)
        acc = term if acc is None else acc + term
    return acc


def to_xtau_basis(p: PolyD, tau) -> list:
    """Coefficients of p in the (X - tau)^r basis: Taylor at tau, exact
    binomial re-expansion f_r = sum_{i>=r} binom(i,r) p_i tau^(i-r)."""
    d = p.d
    if isinstance(tau, CertifiedComplex):
        powers = [CertifiedComplex.from_exact(1)]
    else:
        tau = as_rational(tau)
        powers = [mpq(1)]
    for _ in range(d):
        powers.append(powers[-1] * tau)
    out = []
    for r in range(d + 1):
        acc = None
        for i in range(r, d + 1):
            term = p.coeffs[i] * powers[i - r] * binomial(i, r)
            acc = term if acc is None else acc + term
        out.append(acc)
    return out


def pi_low(components, j: int):
    """Lowest-component projection of a vector-valued q-expansion.

    `components` lists the coefficient expansions f_r in the (X - tau)^r
    basis for r = 0..d; every component below index j must vanish
    identically, and the projection returns f_j (weight k + 2j - d).
    """
    components = list(components)
    if not 0 <= j < len(components):
        raise ValueError("component index out of range")
    for r in range(j):
        comp = components[r]
        if not comp.is_zero():
            raise ValueError(
                f"component {r} below the projection index {j} is nonzero")
    return components[j]


__all__ = [
    "GroupElement",
    "S",
    "T",
    "PolyD",
    "sym_action",
    "pair",
    "dual_apply",
    "xtau_power",
    "from_xtau_basis",
    "to_xtau_basis",
    "pi_low",
]
