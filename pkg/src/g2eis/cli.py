"""Batch command line front end with machine-readable output.

Four subcommands cover the pipelines: ``decompose`` prints the exact
Eisenstein-product decomposition of a discriminant power, ``eval-eichler``
evaluates the discriminant's Eichler integral at a point (directly or
through a product-plus-remainder representation), ``g2es-coeffs`` tabulates
certified Fourier coefficients of a second-order series, and ``bootstrap``
builds representation chains and serializes them.

Conventions shared by every subcommand:

* exact rationals print as ``num/den`` decimal strings, never as floats;
* certified values print as midpoint plus radius, and serialize as
  ``{"mid_re", "mid_im", "radius", "precision"}`` with decimal strings
  carrying the full working precision;
* the default precision comes from the ``G2EIS_PRECISION`` environment
  variable when set;
* exit codes: 0 success, 2 usage or precondition error, 3 a requested
  accuracy target could not be certified, 4 the linear solve rejected its
  point set.

Output ordering is deterministic: tables are sorted by index, stages by
position in the chain.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from gmpy2 import mpfr, mpq

from .arith import (
    DEFAULT_PRECISION,
    GUARD_BITS,
    CertifiedComplex,
    precision,
)
from .bootstrap import (
    G2ESRepresentation,
    IllConditionedPoints,
    bootstrap_chain,
    build_representation,
    delta_cocycle,
    eval_delta,
    eval_representation,
    solve_point,
)
from .cocycle import ParabolicCocycle
from .eichler import delta_eichler, eichler_eval
from .g2es import TargetUnreachable, g2es_coeff_batch_triv_sym
from .modforms import decompose_delta_power, dims
from .symd import PolyD

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_TARGET = 3
EXIT_CONDITIONING = 4


# ---------------------------------------------------------------------------
# Job configuration and serialization helpers.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JobConfig:
    """Resolved per-invocation settings shared by the subcommands."""

    precision: int
    target_error: mpq
    c_max: int | None = None  # None means choose from the tail bounds
    n_max: int | None = None
    fmt: str = "text"

    def __post_init__(self):
        if self.precision <= 0:
            raise ValueError("precision must be a positive bit count")
        if not self.target_error > 0:
            raise ValueError("target error must be positive")
        if self.fmt not in ("text", "json"):
            raise ValueError("output format must be text or json")


def _env_precision() -> int:
    raw = os.environ.get("G2EIS_PRECISION")
    if raw is None:
        return DEFAULT_PRECISION
    try:
        bits = int(raw)
    except ValueError:
        raise ValueError(f"G2EIS_PRECISION must be an integer, got {raw!r}")
    if bits <= 0:
        raise ValueError("G2EIS_PRECISION must be positive")
    return bits


def _parse_rational(text: str) -> mpq:
    """num/den or decimal string to an exact rational."""
    return mpq(Fraction(text.strip()))


def _rat_str(q) -> str:
    q = mpq(q)
    return f"{q.numerator}/{q.denominator}"


def _decimal_digits(prec: int) -> int:
    # enough decimal digits that reading back at the same binary precision
    # recovers the midpoint bit for bit
    return int(math.ceil(prec * math.log10(2))) + 4


def _mid_strings(ball: CertifiedComplex, prec: int) -> tuple[str, str]:
    digits = _decimal_digits(prec)
    re = mpfr(ball.mid.real, prec)
    im = mpfr(ball.mid.imag, prec)
    return f"{re:.{digits}e}", f"{im:.{digits}e}"


def ball_to_json(ball: CertifiedComplex, prec: int) -> dict:
    mid_re, mid_im = _mid_strings(ball, prec)
    return {"mid_re": mid_re, "mid_im": mid_im,
            "radius": repr(ball.rad), "precision": prec}


def ball_from_json(obj: dict) -> CertifiedComplex:
    prec = int(obj["precision"])
    with precision(prec):
        mid = CertifiedComplex.from_real(mpfr(obj["mid_re"], prec)) \
            + CertifiedComplex.i_times(
                CertifiedComplex.from_real(mpfr(obj["mid_im"], prec)))
    return CertifiedComplex(mid.mid, float(obj["radius"]))


def _ball_text(ball: CertifiedComplex, prec: int) -> str:
    mid_re, mid_im = _mid_strings(ball, prec)
    return f"{mid_re} + {mid_im}*i  +/- {ball.rad:.6e}"


def representation_to_json(rep: G2ESRepresentation, prec: int) -> dict:
    """JSON form of a representation; exact fields stay exact."""
    stage = {
        "h": rep.h,
        "precision": prec,
        "terms": [{"c": _rat_str(c), "classical_weight": a,
                   "second_order_weight": k + 10}
                  for c, a, k in rep.terms],
        "remainder_zero": not rep.monomials,
        "monomials": [list(m) for m in rep.monomials],
        "coordinates": [ball_to_json(c, prec) for c in rep.coords],
        "remainder_coefficients": [
            ball_to_json(c, prec)
            for c in rep.remainder_coefficients(len(rep.monomials))[1:]],
        "solve_points": [{"re": _rat_str(j_point[0]), "im": str(j_point[1])}
                         for j_point in
                         ((mpq(1, j), j + 1)
                          for j in range(1, len(rep.solve_points) + 1))],
        "intermediates": [ball_to_json(v, prec) for v in rep.intermediates],
        "determinant": (None if rep.determinant is None
                        else ball_to_json(rep.determinant, prec)),
    }
    return stage


def representation_from_json(obj: dict) -> G2ESRepresentation:
    """Rebuild a representation serialized by :func:`representation_to_json`.

    Exact fields come back bit for bit; certified fields carry the same
    radii and the same midpoints at the recorded precision.  The cocycle
    is reconstructed from the recorded precision.
    """
    prec = int(obj["precision"])
    terms = tuple((mpq(t["c"]), int(t["classical_weight"]),
                   int(t["second_order_weight"]) - 10)
                  for t in obj["terms"])
    phi = delta_cocycle(max(prec, DEFAULT_PRECISION))
    points = tuple(solve_point(j)
                   for j in range(1, len(obj["solve_points"]) + 1))
    det = obj.get("determinant")
    return G2ESRepresentation(
        h=int(obj["h"]),
        terms=terms,
        phi=phi,
        monomials=tuple((int(a), int(b)) for a, b in obj["monomials"]),
        coords=tuple(ball_from_json(c) for c in obj["coordinates"]),
        solve_points=points,
        intermediates=tuple(ball_from_json(v)
                            for v in obj["intermediates"]),
        determinant=None if det is None else ball_from_json(det),
    )


# ---------------------------------------------------------------------------
# Subcommands.  Each takes parsed args plus the resolved JobConfig and
# returns an exit code; unexpected numeric failures are mapped in main().
# ---------------------------------------------------------------------------


def cmd_decompose(args, config: JobConfig, out) -> int:
    h = args.h
    if h < 1:
        print("error: --h must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    mdim, _ = dims(12 * h)
    decomp = decompose_delta_power(h, mdim + 2)
    if config.fmt == "json":
        payload = {
            "h": h,
            "terms": [{"c": _rat_str(c), "classical_weight": a,
                       "second_order_weight": b}
                      for c, a, b in decomp.terms],
        }
        print(json.dumps(payload, indent=2), file=out)
        return EXIT_OK
    print(f"product decomposition of the weight-{12 * h} power (h = {h}):",
          file=out)
    for i, (c, a, b) in enumerate(decomp.terms, start=1):
        label = f"E_{a} x " if a else ""
        print(f"  c_{i} = {_rat_str(c)}", file=out)
        print(f"        ~ {float(c):.10e}   ({label}second order weight {b})",
              file=out)
    return EXIT_OK


def cmd_eval_eichler(args, config: JobConfig, out) -> int:
    try:
        re = _parse_rational(args.tau[0])
        im = _parse_rational(args.tau[1])
    except (ValueError, ZeroDivisionError):
        print("error: --tau expects two rational or decimal numbers",
              file=sys.stderr)
        return EXIT_USAGE
    if im <= 0:
        print("error: the point must lie in the upper half plane (Im > 0)",
              file=sys.stderr)
        return EXIT_USAGE
    tau = CertifiedComplex.from_exact(re, im)
    target = config.target_error
    prec = config.precision

    def direct(point, tgt):
        return eichler_eval(delta_eichler(), 12, point, tgt, prec=prec)

    def compute(tgt):
        if args.h is None:
            return direct(tau, tgt), "direct"
        d_val = eval_delta(tau, max(float(tgt) * 1e-3, 1e-200), prec=prec)
        d_mag = max(d_val.mag_upper(), 1e-290) ** args.h
        build_target = min(max(float(tgt) * d_mag * 1e-3, 1e-250), 1e-25)
        rep = build_representation(args.h, target_error=mpq(
            Fraction(build_target)), prec=prec)
        inner = min(max(float(tgt) * d_mag / 4.0, 1e-250), float(tgt) / 4.0)
        value = eval_representation(rep, tau, mpq(Fraction(inner)),
                                    prec=prec)
        return value / d_val.powi(args.h), "representation"

    try:
        value, mode = compute(target)
    except TargetUnreachable as exc:
        print(f"error: {exc}", file=sys.stderr)
        # flag a partial result at a coarser target when one is certifiable
        try:
            value, mode = compute(target * 10 ** 6)
        except (TargetUnreachable, IllConditionedPoints):
            return EXIT_TARGET
        print("partial result (radius exceeds the requested target):",
              file=sys.stderr)
        print(_ball_text(value, prec), file=sys.stderr)
        return EXIT_TARGET

    if config.fmt == "json":
        payload = ball_to_json(value, prec)
        payload["mode"] = mode
        if args.h is not None:
            payload["h"] = args.h
        print(json.dumps(payload, indent=2), file=out)
    else:
        print(f"integral value at tau = {_rat_str(re)} + {_rat_str(im)}*i "
              f"({mode}):", file=out)
        print(f"  {_ball_text(value, prec)}", file=out)
    return EXIT_OK


def cmd_g2es_coeffs(args, config: JobConfig, out) -> int:
    k, j, n_max = args.k, args.j, args.n
    if n_max < 1:
        print("error: --n must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    prec = config.precision
    if args.zero_cocycle:
        phi = ParabolicCocycle(12, PolyD.zero(10))
    else:
        phi = delta_cocycle(max(prec, DEFAULT_PRECISION))

    if args.cmax is not None:
        c_max = args.cmax
        if c_max < 1:
            print("error: --cmax must be at least 1", file=sys.stderr)
            return EXIT_USAGE
    else:
        c_max = _auto_cmax(k, j, phi, n_max, float(config.target_error))
        if c_max is None:
            print("error: no coset cutoff reaches the requested target; "
                  "pass --cmax explicitly", file=sys.stderr)
            return EXIT_TARGET

    try:
        coeffs = g2es_coeff_batch_triv_sym(
            k, phi, j, list(range(1, n_max + 1)), c_max, prec, None)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if config.fmt == "json":
        payload = {
            "k": k, "j": j, "c_max": c_max, "precision": prec,
            "coefficients": [
                dict(ball_to_json(c, prec), n=n)
                for n, c in enumerate(coeffs, start=1)],
        }
        print(json.dumps(payload, indent=2), file=out)
    else:
        print(f"second order series coefficients (k={k}, j={j}, "
              f"coset cutoff {c_max}):", file=out)
        for n, c in enumerate(coeffs, start=1):
            print(f"  n={n:<3d} {_ball_text(c, prec)}", file=out)
    return EXIT_OK


def _auto_cmax(k: int, j: int, phi, n_max: int, target: float) -> int | None:
    """Smallest power-of-two coset cutoff whose sharp tail bound meets the
    target at every tabulated index, or None under the configured cap."""
    from .g2es import _COSET_CAP, _coeff_tail_sharp
    l = phi.k
    c = 64
    while c <= _COSET_CAP:
        tails = _coeff_tail_sharp(k, j, l, c + 1, list(range(1, n_max + 1)))
        if max(tails) <= target:
            return c
        c *= 2
    return None


def cmd_bootstrap(args, config: JobConfig, out) -> int:
    try:
        chain = [int(part) for part in args.chain.split(",") if part.strip()]
    except ValueError:
        print("error: --chain expects comma-separated integers",
              file=sys.stderr)
        return EXIT_USAGE
    prec = config.precision
    try:
        reps = bootstrap_chain(chain, target_error=config.target_error,
                               prec=prec)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IllConditionedPoints as exc:
        _, sdim = dims(12 * chain[-1] - 10)
        points = ", ".join(
            f"1/{j} + {j + 1}i" for j in range(1, sdim + 1))
        print(f"error: conditioning gate rejected the point set "
              f"[{points}]: {exc}", file=sys.stderr)
        return EXIT_CONDITIONING

    if config.fmt == "json":
        payload = {"chain": chain,
                   "target_error": _rat_str(config.target_error),
                   "stages": [representation_to_json(rep, prec)
                              for rep in reps]}
        print(json.dumps(payload, indent=2), file=out)
        return EXIT_OK

    for rep in reps:
        print(f"stage h = {rep.h}  (remainder dimension "
              f"{len(rep.monomials)}):", file=out)
        for i, (c, a, k) in enumerate(rep.terms, start=1):
            label = f"E_{a} x " if a else ""
            print(f"  c_{i} = {_rat_str(c)}   "
                  f"({label}second order weight {k + 10})", file=out)
        if not rep.monomials:
            print(f"  remainder = 0 (exact: the weight-"
                  f"{rep.remainder_weight} cusp space is trivial)", file=out)
            continue
        print("  remainder q-expansion coefficients "
              "(echelon coordinates):", file=out)
        for n, c in enumerate(rep.miller_coordinates(), start=1):
            print(f"    q^{n}: {_ball_text(c, prec)}", file=out)
        print("  solve points:", ", ".join(
            f"1/{j} + {j + 1}i" for j in range(1, len(rep.solve_points) + 1)),
            file=out)
        if rep.determinant is not None:
            print(f"  solve determinant: "
                  f"{_ball_text(rep.determinant, prec)}", file=out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing and dispatch.
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="g2eis",
        description="Certified evaluation of Eichler integrals and second "
                    "order Eisenstein series of level one.")
    parser.add_argument("--precision", type=int, default=None,
                        help="working precision in bits (default: "
                             "G2EIS_PRECISION or %d)" % DEFAULT_PRECISION)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose",
                       help="Eisenstein-product decomposition of a "
                            "discriminant power")
    p.add_argument("--h", type=int, required=True,
                   help="power of the discriminant (h >= 1)")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("eval-eichler",
                       help="certified value of the discriminant's Eichler "
                            "integral at a point")
    p.add_argument("--tau", nargs=2, required=True, metavar=("RE", "IM"),
                   help="point as two rationals or decimals, Im > 0")
    p.add_argument("--h", type=int, default=None,
                   help="evaluate through the h-stage representation "
                        "instead of the direct series")
    p.add_argument("--target-err", default="1/1000000000000000000000000"
                                           "000000",
                   help="requested certified radius (default 1e-30)")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("g2es-coeffs",
                       help="certified Fourier coefficients of a second "
                            "order series")
    p.add_argument("--k", type=int, required=True, help="series weight")
    p.add_argument("--j", type=int, required=True, help="seed exponent")
    p.add_argument("--n", type=int, required=True,
                   help="tabulate coefficients 1..n")
    p.add_argument("--cmax", type=int, default=None,
                   help="coset cutoff (default: from the tail bounds and "
                        "--target-err)")
    p.add_argument("--target-err", default="1/1000000000000000",
                   help="coefficient tail target for the automatic cutoff "
                        "(default 1e-15)")
    p.add_argument("--zero-cocycle", action="store_true",
                   help="use the zero cocycle (every coefficient is "
                        "exactly zero)")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("bootstrap",
                       help="build and serialize representation chains")
    p.add_argument("--chain", required=True,
                   help="comma-separated ascending powers starting at 2, "
                        "e.g. 2,5")
    p.add_argument("--target-err", default="1/1000000000000",
                   help="remainder coordinate radius target "
                        "(default 1e-12)")
    p.add_argument("--json", action="store_true")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        prec = args.precision if args.precision is not None \
            else _env_precision()
        target = _parse_rational(getattr(args, "target_err", "1/10") or
                                 "1/10")
        config = JobConfig(
            precision=prec,
            target_error=target,
            fmt="json" if getattr(args, "json", False) else "text")
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    commands = {
        "decompose": cmd_decompose,
        "eval-eichler": cmd_eval_eichler,
        "g2es-coeffs": cmd_g2es_coeffs,
        "bootstrap": cmd_bootstrap,
    }
    try:
        return commands[args.command](args, config, sys.stdout)
    except TargetUnreachable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TARGET
    except IllConditionedPoints as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONDITIONING


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
