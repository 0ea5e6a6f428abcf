"""Certified evaluation of Eichler integrals and second order Eisenstein
series of level one.

The package exposes ball-arithmetic numerics (`arith`), exact q-expansions
and cusp-form bases (`modforms`), the finite-dimensional symmetric-power
action (`symd`), parabolic cocycles attached to cusp forms (`cocycle`),
vector-valued Eisenstein series (`eisenstein`), generalized second order
Eisenstein series via double-coset summation (`g2es`), Eichler integrals
(`eichler`), and the bootstrapping decomposition of weight-(12h) products
(`bootstrap`), plus a JSON command line front end (`cli`).
"""

from .arith import (
    CertifiedComplex,
    CertifiedReal,
    DEFAULT_PRECISION,
    ExactRational,
    bernoulli,
    binomial,
    factorial,
    inc_gamma_upper_int,
    zeta_real,
)

__version__ = "0.1.0"

__all__ = [
    "CertifiedComplex",
    "CertifiedReal",
    "DEFAULT_PRECISION",
    "ExactRational",
    "bernoulli",
    "binomial",
    "factorial",
    "inc_gamma_upper_int",
    "zeta_real",
    "__version__",
]
