"""``hypersep`` command line.

Every subcommand prints one JSON report on stdout::

    {"command": ..., "inputs": {...}, "outputs": {...}, "warnings": [...], "timing": ...}

Exit status is 0 on success, 1 when the computation raised a domain error
(the report then carries ``error.name``) and 2 on usage errors.
Point sets are exchanged as ``{"points": [[re, im], ...]}``.
"""

import argparse
import csv
import json
import logging
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .carleson import (
    Arc,
    CarlesonSquare,
    coefficient_carleson_constant,
    discrete_carleson_constant,
)
from .decomposition import IntermediateOracle, decompose, verify_certificate
from .exceptions import HypersepError
from .geometry import (
    LEMMA1_SUP,
    geodesic_segment,
    lemma1_depth_ratio,
    pseudo_distance,
    radial_projection,
)
from .oscillation import (
    AnalyticCoefficient,
    RatioMap,
    a_points,
    contour_count,
    corollary_pipeline,
    find_zeros,
    nehari_oracle,
    schwarzian,
    solve_series,
)
from .partition import PartitionConfig, partition_arc, verify_partition
from .separation import best_split_delta, split_two_separated, uniform_separation_constant
from .synthetic import explicit_lambda, random_partition_instance, random_reduced_set
from .validation import check_disc_point, check_disc_points, points_to_pairs

logger = logging.getLogger("hypersep")


# -- I/O helpers -------------------------------------------------------------------


def read_points(path):
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or "points" not in doc:
        raise ValueError(f"{path}: expected an object with a 'points' list")
    pairs = doc["points"]
    if not all(isinstance(p, (list, tuple)) and len(p) == 2 for p in pairs):
        raise ValueError(f"{path}: every point must be a [re, im] pair")
    return check_disc_points(np.array(pairs, dtype=float).reshape(-1, 2), allow_empty=True)


def write_points(path, points):
    with open(path, "w") as fh:
        json.dump({"points": points_to_pairs(points)}, fh, indent=1)
        fh.write("\n")


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def jsonable(obj):
    """Convert numpy scalars, complex numbers and non-finite floats for JSON."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, (complex, np.complexfloating)):
        return [jsonable(obj.real), jsonable(obj.imag)]
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    return obj


def _complex(text):
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}")


def _coef(text):
    try:
        return AnalyticCoefficient.from_spec(text)
    except HypersepError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _square(args):
    if args.square is not None:
        return CarlesonSquare(Arc(*args.square))
    return CarlesonSquare(Arc.centered(args.center, args.length))


# -- subcommands ---------------------------------------------------------------------


def cmd_dist(args, rep):
    z = check_disc_point(complex(args.x1, args.y1), "z")
    w = check_disc_point(complex(args.x2, args.y2), "w")
    rep["inputs"] = {"z": z, "w": w}
    rep["outputs"] = {"rho": pseudo_distance(z, w)}


def cmd_geodesic(args, rep):
    z, w = complex(args.x1, args.y1), complex(args.x2, args.y2)
    rep["inputs"] = {"z": z, "w": w, "samples": args.samples}
    seg = geodesic_segment(z, w)
    out = seg.to_dict()
    out["carrier_residual"] = float(np.max(np.abs(seg.carrier_residual(seg.sample(args.samples)))))
    out["min_modulus"] = seg.min_modulus()
    try:
        out["projection"] = radial_projection(seg).to_dict()
    except HypersepError as exc:
        out["projection"] = None
        rep["warnings"].append(f"{type(exc).__name__}: {exc}")
    rep["outputs"] = out
    if args.plot:
        t = np.linspace(0.0, 1.0, args.samples)
        p = np.atleast_1d(seg.point_at(t))
        write_csv(args.plot, ["t", "re", "im"], zip(t, p.real, p.imag))


def cmd_lemma1_scan(args, rep):
    rep["inputs"] = {"lmin": args.lmin, "lmax": args.lmax, "steps": args.steps}
    ell = np.geomspace(args.lmin, args.lmax, args.steps)
    ratio = lemma1_depth_ratio(ell)
    k = int(np.argmax(ratio))
    rep["outputs"] = {
        "bound": LEMMA1_SUP,
        "max_ratio": float(ratio[k]),
        "argmax_ell": float(ell[k]),
        "min_ratio": float(ratio.min()),
        "all_below_bound": bool(np.all(ratio <= LEMMA1_SUP)),
        "gap_to_bound": float(LEMMA1_SUP - ratio[k]),
    }
    if args.plot:
        write_csv(args.plot, ["ell", "ratio"], zip(ell, ratio))


def cmd_partition(args, rep):
    rng = np.random.default_rng(args.seed)
    if args.random:
        arc, xi, r = random_partition_instance(rng, epsilon=args.epsilon)
    else:
        if args.square is None and args.length is None:
            raise argparse.ArgumentTypeError("give --arc A B, --center/--length or --random")
        arc = _square(args).base
        xi = read_points(args.points) if args.points else np.empty(0, dtype=complex)
        r = args.r
    rep["inputs"] = {"arc": arc, "r": r, "epsilon": args.epsilon, "points": points_to_pairs(xi)}
    res = partition_arc(arc, xi, r, PartitionConfig(epsilon=args.epsilon))
    check = verify_partition(arc, res, xi, r, seed=args.seed)
    rep["outputs"] = {"partition": res.to_dict(), "verification": check.to_dict(), "ok": check.ok}
    if args.plot:
        write_csv(args.plot, ["a", "b", "length"], ((s.a, s.b, s.length) for s in res.subarcs))


def cmd_separation(args, rep):
    pts = read_points(args.points)
    rep["inputs"] = {"points": points_to_pairs(pts), "split": args.split}
    sep = uniform_separation_constant(pts)
    out = {"separation": sep.to_dict(), "best_split_delta": best_split_delta(pts)}
    if args.split is not None:
        A, B = split_two_separated(pts, args.split)
        out["split"] = {"A": A, "B": B}
    rep["outputs"] = out
    if args.plot:
        D = np.abs(pts[:, None] - pts[None, :]) / np.abs(1 - np.conj(pts)[:, None] * pts[None, :])
        np.fill_diagonal(D, 1.0)
        logs = np.log(D).sum(axis=1)
        write_csv(args.plot, ["index", "re", "im", "log_product"],
                  ((i, z.real, z.imag, s) for i, (z, s) in enumerate(zip(pts, logs))))


def cmd_carleson_points(args, rep):
    pts = read_points(args.points)
    rep["inputs"] = {"points": points_to_pairs(pts), "max_depth": args.max_depth}
    rep["outputs"] = discrete_carleson_constant(pts, max_depth=args.max_depth).to_dict()


def cmd_carleson_coef(args, rep):
    rep["inputs"] = {"coef": args.coef.spec, "p": args.p, "max_depth": args.max_depth, "quad_tol": args.quad_tol}
    est = coefficient_carleson_constant(args.coef, args.p, max_depth=args.max_depth, quad_tol=args.quad_tol)
    rep["outputs"] = est.to_dict()


def _oracle(args, pts, rng):
    kind, _, rest = args.oracle.partition(":")
    if kind == "midpoint":
        return IntermediateOracle.midpoint(float(rest) if rest else 0.5)
    if kind == "points":
        return IntermediateOracle.from_points(read_points(rest))
    if kind == "random":
        return IntermediateOracle.from_points(explicit_lambda(rng, pts))
    if kind == "nehari":
        return nehari_oracle(AnalyticCoefficient.from_spec(rest))
    raise argparse.ArgumentTypeError(f"unknown oracle {args.oracle!r}")


def cmd_decompose(args, rep):
    rng = np.random.default_rng(args.seed)
    if args.synthetic:
        Q, pts = random_reduced_set(rng)
    else:
        if args.points is None or (args.square is None and args.length is None):
            raise argparse.ArgumentTypeError("give --points and a square, or --synthetic")
        Q, pts = _square(args), read_points(args.points)
    if args.write_points:
        write_points(args.write_points, pts)
    rep["inputs"] = {"square": Q, "points": points_to_pairs(pts), "oracle": args.oracle}
    cert = decompose(Q, pts, _oracle(args, pts, rng))
    check = verify_certificate(cert, Q)
    rep["outputs"] = {"certificate": cert.to_dict(), "verification": check.to_dict(), "ok": check.ok}
    if args.plot:
        rows = []
        for gen in cert.to_dict()["generations"]:
            for role in ("S", "M", "Lambda"):
                rows += [(gen["j"], role, re, im) for re, im in gen[role]]
        write_csv(args.plot, ["generation", "role", "re", "im"], rows)


def cmd_ode(args, rep):
    rep["inputs"] = {"coef": args.coef.spec, "f0": args.f0, "f1": args.f1, "R": args.R, "N": args.N}
    sol = solve_series(args.coef, args.f0, args.f1, N=args.N, R=args.R)
    out = {"terms": sol.N, "tail": sol.tail_estimate(args.R),
           "coefficients": [complex(c) for c in sol.coeffs[: args.show]]}
    if np.any(sol.coeffs):
        zeros, mult = find_zeros(sol, args.R, tol=args.tol, return_multiplicity=True)
        dc = sol.derivative_coeffs(1)
        out["contour_count"] = contour_count(
            lambda z: np.polynomial.polynomial.polyval(z, sol.coeffs),
            lambda z: np.polynomial.polynomial.polyval(z, dc), args.R)
    else:
        zeros, mult = [], []
        rep["warnings"].append("trivial solution: zeros are not isolated")
    out["zeros"] = points_to_pairs(zeros)
    out["multiplicities"] = mult
    rep["outputs"] = out
    if args.write_points:
        write_points(args.write_points, zeros)
    if args.plot:
        write_csv(args.plot, ["re", "im", "multiplicity"], ((z.real, z.imag, m) for z, m in zip(zeros, mult)))


def cmd_schwarzian(args, rep):
    z = complex(args.x, args.y)
    rep["inputs"] = {"map": args.map, "ratio": args.ratio.spec if args.ratio else None, "z": z,
                     "a": args.a}
    if args.ratio is not None:
        f1 = solve_series(args.ratio, 0.0, 1.0, R=args.R)
        f2 = solve_series(args.ratio, 1.0, 0.0, R=args.R)
        out = {"schwarzian": schwarzian(RatioMap(f1, f2), z), "expected": 2.0 * args.ratio(z)}
        if args.a is not None:
            a = math.inf if args.a.lower() in ("inf", "infinity") else complex(args.a)
            out["a_points"] = points_to_pairs(a_points(f1, f2, a, args.R))
    else:
        out = {"schwarzian": schwarzian(args.map or "identity", z)}
    rep["outputs"] = out


def cmd_verify_corollary(args, rep):
    rep["inputs"] = {"coef": args.coef.spec, "p": args.p, "R": args.R, "f0": args.f0, "f1": args.f1,
                     "max_depth": args.max_depth, "quad_tol": args.quad_tol}
    res = corollary_pipeline(args.coef, p=args.p, R=args.R, f0=args.f0, f1=args.f1,
                             max_depth=args.max_depth, quad_tol=args.quad_tol, seed=args.seed,
                             threads=args.threads, keep_certificates=args.keep_certificates)
    rep["outputs"] = res.data
    rep["warnings"].extend(res.warnings)
    if args.plot:
        write_csv(args.plot, ["re", "im"], res.data["zeros"])


# -- parser ---------------------------------------------------------------------------


def _add_square(p, required=False):
    g = p.add_argument_group("square / arc")
    g.add_argument("--arc", dest="square", nargs=2, type=float, metavar=("A", "B"),
                   help="base arc endpoints in radians")
    g.add_argument("--center", type=float, default=0.0, help="arc centre angle (with --length)")
    g.add_argument("--length", type=float, help="normalised arc length |I|")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="RNG seed (default 0)")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker threads (default 1)")
    common.add_argument("--plot", metavar="PATH", default=argparse.SUPPRESS, help="write CSV plot data")
    common.add_argument("--timing", action="store_true", default=argparse.SUPPRESS,
                        help="include wall-clock timing in the report")

    parser = argparse.ArgumentParser(prog="hypersep", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--plot", metavar="PATH")
    parser.add_argument("--timing", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_, description=help_)
        p.set_defaults(func=func)
        return p

    p = add("dist", cmd_dist, "pseudo-hyperbolic distance between two points")
    for n in ("x1", "y1", "x2", "y2"):
        p.add_argument(n, type=float)

    p = add("geodesic", cmd_geodesic, "hyperbolic segment between two points (plot: t,re,im)")
    for n in ("x1", "y1", "x2", "y2"):
        p.add_argument(n, type=float)
    p.add_argument("--samples", type=int, default=257)

    p = add("lemma1-scan", cmd_lemma1_scan, "depth ratio of inner-corner geodesics (plot: ell,ratio)")
    p.add_argument("--lmin", type=float, default=1e-6)
    p.add_argument("--lmax", type=float, default=0.4999)
    p.add_argument("--steps", type=int, default=4096)

    p = add("partition", cmd_partition, "partition an arc around separated points (plot: a,b,length)")
    _add_square(p)
    p.add_argument("--r", type=float, default=0.99)
    p.add_argument("--points", metavar="FILE")
    p.add_argument("--epsilon", type=float, default=0.3)
    p.add_argument("--random", action="store_true", help="draw a random instance from --seed")

    p = add("separation", cmd_separation, "separation constants (plot: index,re,im,log_product)")
    p.add_argument("--points", metavar="FILE", required=True)
    p.add_argument("--split", type=float, help="also split into two sets separated by this threshold")

    p = add("carleson-points", cmd_carleson_points, "discrete Carleson constant of a point set")
    p.add_argument("--points", metavar="FILE", required=True)
    p.add_argument("--max-depth", type=int, default=12)

    p = add("carleson-coef", cmd_carleson_coef, "Carleson constant of |A|^p (1-|z|^2)^(2p-1) dm")
    p.add_argument("--coef", type=_coef, required=True)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--max-depth", type=int, default=6)
    p.add_argument("--quad-tol", type=float, default=1e-6)

    p = add("decompose", cmd_decompose, "decomposition certificate for a square (plot: generation,role,re,im)")
    _add_square(p)
    p.add_argument("--points", metavar="FILE")
    p.add_argument("--oracle", default="midpoint",
                   help="midpoint[:t] | points:FILE | random | nehari:COEF (default midpoint)")
    p.add_argument("--synthetic", action="store_true", help="random reduced point set from --seed")
    p.add_argument("--write-points", metavar="FILE")

    p = add("ode", cmd_ode, "zeros of a series solution of f''+Af=0 (plot: re,im,multiplicity)")
    p.add_argument("--coef", type=_coef, required=True)
    p.add_argument("--f0", type=_complex, default=0.0)
    p.add_argument("--f1", type=_complex, default=1.0)
    p.add_argument("--R", type=float, default=0.99)
    p.add_argument("--N", type=int)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--show", type=int, default=8, help="number of coefficients to echo")
    p.add_argument("--write-points", metavar="FILE")

    p = add("schwarzian", cmd_schwarzian, "Schwarzian derivative of a map or a solution ratio")
    p.add_argument("x", type=float)
    p.add_argument("y", type=float)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--map", help="identity | mobius:a,b,c,d | exp:lam | power-map:alpha")
    g.add_argument("--ratio", type=_coef, metavar="COEF", help="w = f1/f2 for solutions of f''+Af=0")
    p.add_argument("--a", help="with --ratio: also list solutions of w = a (complex or inf)")
    p.add_argument("--R", type=float, default=0.9)

    p = add("verify-corollary", cmd_verify_corollary, "zero set of a solution through the whole chain")
    p.add_argument("--coef", type=_coef, required=True)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--R", type=float, default=0.99)
    p.add_argument("--f0", type=_complex, default=0.0)
    p.add_argument("--f1", type=_complex, default=10.0)
    p.add_argument("--max-depth", type=int, default=6)
    p.add_argument("--quad-tol", type=float, default=1e-6)
    p.add_argument("--keep-certificates", action="store_true")
    return parser


def _configure_logging():
    level = os.environ.get("HYPERSEP_LOG", "off").lower()
    if level == "off":
        logging.getLogger("hypersep").addHandler(logging.NullHandler())
        return
    logging.basicConfig(stream=sys.stderr, level=logging.DEBUG if level == "debug" else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None):
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    rep = {"command": args.command, "inputs": {}, "outputs": {}, "warnings": [], "timing": None}
    start = time.perf_counter()
    code = 0
    try:
        args.func(args, rep)
    except argparse.ArgumentTypeError as exc:
        parser.print_usage(sys.stderr)
        print(f"hypersep {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (HypersepError, ValueError, OSError) as exc:
        logger.info("%s failed: %s", args.command, exc)
        rep["outputs"] = None
        rep["error"] = {"name": type(exc).__name__, "message": str(exc)}
        code = 1
    if args.timing:
        rep["timing"] = {"wall_seconds": time.perf_counter() - start}
    json.dump(jsonable(rep), sys.stdout, indent=2)
    sys.stdout.write("\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
