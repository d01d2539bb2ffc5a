"""Command-line interface.

Exit codes: 0 success, 2 bad input (missing file, malformed data, unknown
scheme, bad flag), 3 numerical failure (resonance, antipodal points,
singular systems), 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

import numpy as np

from bhsubdiv import __version__
from bhsubdiv.errors import InputError, InvariantError, NumericalError
from bhsubdiv.euclid import finite_difference_norms, polynomial_reproduction_error, subdivide
from bhsubdiv.fairness import benchmark_polygons, discrete_curvature, energy_decay_report
from bhsubdiv.io import (
    dumps_json,
    format_csv,
    read_manifold_polygon,
    read_mask,
    read_polygon,
    resolve_scheme,
    write_atomic,
)
from bhsubdiv.manifold import PERTURBATION_RULES, angle_proximity_grid, chart_proximity, manifold_subdivide
from bhsubdiv.spaceform import SpaceFormContext, curvature_solution
from bhsubdiv.stencils import derive_hierarchy_mask, verify_sum_rules
from bhsubdiv.symbol import full_symbol, regularity_class, symbol_magnitude
from bhsubdiv.variational import appendix_verification, oracle_sweep

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_INVARIANT = 0, 2, 3, 4

DEFAULT_PAIRS = "1,1;1.5,-1;0.5,2;-1,0.3"


# -- flag parsing helpers --------------------------------------------------


def _positive_int(minimum):
    def parse(text):
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
        if value < minimum:
            raise argparse.ArgumentTypeError(f"must be >= {minimum}, got {value}")
        return value

    return parse


def _finite_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not np.isfinite(value):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text!r}")
    return value


def _pair(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated curvatures, got {text!r}")
    return tuple(_finite_float(p) for p in parts)


def _pairs(text):
    return [_pair(p) for p in text.split(";") if p.strip()]


def _h_grid(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected lo:hi:n, got {text!r}")
    lo, hi = _finite_float(parts[0]), _finite_float(parts[1])
    n = _positive_int(2)(parts[2])
    if not 0 < lo < hi:
        raise argparse.ArgumentTypeError(f"need 0 < lo < hi, got {lo}:{hi}")
    return np.geomspace(lo, hi, n)


def _scheme_list(text):
    ids = [s.strip() for s in text.split(",") if s.strip()]
    if not ids:
        raise argparse.ArgumentTypeError("expected at least one scheme id")
    return ids


def _closedness(args):
    return {None: None, "closed": True, "open": False}[args.topology]


def _vertex_table(vertices: np.ndarray, fmt: str, meta: dict) -> str:
    if fmt == "json":
        return dumps_json({**meta, "vertices": vertices})
    names = ["x", "y", "z"] if vertices.shape[1] <= 3 else [f"x{i}" for i in range(vertices.shape[1])]
    return format_csv(names[: vertices.shape[1]], (list(map(float, row)) for row in vertices))


# -- commands -----------------------------------------------------------------


def cmd_subdivide(args) -> int:
    mask = resolve_scheme(args.scheme)
    poly = read_polygon(args.input, _closedness(args))
    out = subdivide(poly, mask, args.iters)
    if not np.array_equal(out.vertices[:: 2**args.iters], poly.vertices):
        raise InvariantError("original vertices were not retained by the refinement")
    meta = {"scheme": mask.scheme_name, "iters": args.iters, "closed": out.closed}
    write_atomic(args.output, _vertex_table(out.vertices, args.format, meta))
    return EXIT_OK


def _reproduction_degree(mask) -> int:
    degree = -1
    for rep in verify_sum_rules(mask, 2 * mask.half_width + 1):
        if not rep.satisfied:
            break
        degree = rep.degree
    return degree


def cmd_derive_stencil(args) -> int:
    mask = derive_hierarchy_mask(args.m)
    den = mask.common_denominator
    cert = regularity_class(full_symbol(mask))
    degree = _reproduction_degree(mask)
    payload = {
        "scheme": mask.scheme_name,
        "m": args.m,
        "offsets": list(mask.offsets),
        "denominator": den,
        "coefficients": [f"{n}/{den}" for n in mask.numerators()],
        "reduced": list(mask.coefficients),
        "degree": degree,
        "zero_order": cert.zero_order,
        "regularity": cert.label,
        "regularity_basis": cert.basis,
        "reproduction_errors": {str(d): polynomial_reproduction_error(mask, d) for d in range(degree + 2)},
    }
    if args.format == "csv":
        text = format_csv(["offset", "coefficient"], zip(mask.offsets, payload["coefficients"]))
    else:
        text = dumps_json(payload)
    write_atomic(args.output, text)
    return EXIT_OK


def cmd_analyze_symbol(args) -> int:
    mask = read_mask(args.mask_file) if args.mask_file else resolve_scheme(args.scheme)
    sym = full_symbol(mask)
    cert = regularity_class(sym)
    payload = {
        "scheme": mask.scheme_name,
        "coefficients": list(mask.coefficients),
        "zero_order": cert.zero_order,
        "regularity": cert.label,
        "regularity_basis": cert.basis,
        "sharp": cert.sharp,
        "derivatives": [{"k": k, "value": str(v)} for k, v in cert.derivative_table],
    }
    write_atomic(args.output, dumps_json(payload))
    if args.magnitude_csv:
        write_atomic(args.magnitude_csv, format_csv(["omega", "magnitude"], symbol_magnitude(sym, args.samples)))
    if args.fd_csv:
        rows = finite_difference_norms(mask, args.fd_levels, args.fd_max_k)
        write_atomic(
            args.fd_csv,
            format_csv(["level", "k", "norm", "scaled"], ((r.level, r.k, r.norm, r.scaled) for r in rows)),
        )
    return EXIT_OK


def cmd_verify_variational(args) -> int:
    report = appendix_verification()
    sweep = oracle_sweep(args.trials, args.seed)
    payload = {
        "appendix_ok": report.ok,
        "appendix_failures": report.failures(),
        "slopes": list(report.slopes),
        "slope_square_sum": report.slope_square_sum,
        "minimiser": [Fraction(c) / 256 for c in report.check("minimiser").computed],
        **sweep,
    }
    write_atomic(args.output, dumps_json(payload))
    if args.strict and not report.ok:
        raise InvariantError(f"{len(report.failures())} reference coefficient(s) disagree with the recomputation")
    return EXIT_OK


def cmd_benchmark(args) -> int:
    if args.input:
        polys = {str(args.input): read_polygon(args.input, _closedness(args))}
    else:
        polys = benchmark_polygons()
    masks = [resolve_scheme(s) for s in args.schemes]
    rows, curvature_rows = [], []
    for name, poly in polys.items():
        for mask in masks:
            for rep in energy_decay_report(poly, mask, args.levels):
                rows.append((name, mask.scheme_name, rep.level, rep.vertex_count, rep.energy, rep.variance))
            if args.curvature_csv:
                prof = discrete_curvature(subdivide(poly, mask, args.levels))
                for i, k in zip(prof.indices, prof.kappa):
                    curvature_rows.append((name, mask.scheme_name, int(i), float(k)))
    header = ["polygon", "scheme", "level", "vertices", "energy", "variance"]
    if args.format == "json":
        text = dumps_json([dict(zip(header, r)) for r in rows])
    else:
        text = format_csv(header, rows)
    write_atomic(args.output, text)
    if args.curvature_csv:
        write_atomic(args.curvature_csv, format_csv(["polygon", "scheme", "vertex", "kappa"], curvature_rows))
    return EXIT_OK


def cmd_proximity(args) -> int:
    kj, kj1 = args.kappas
    rows = [(r["h"], r["alpha_K"], r["alpha_0"], r["deviation"]) for r in angle_proximity_grid(args.K, [(kj, kj1)], args.h_grid)]
    header = ["h", "alpha_K", "alpha_0", "deviation"]
    text = dumps_json([dict(zip(header, r)) for r in rows]) if args.format == "json" else format_csv(header, rows)
    write_atomic(args.output, text)
    if args.profile_csv:
        curved = SpaceFormContext(args.K, args.profile_edge, kj, kj1)
        flat = SpaceFormContext(0.0, args.profile_edge, kj, kj1)
        s = np.linspace(0.0, args.profile_edge, args.samples)
        prof = [(float(t), curvature_solution(curved, float(t)), curvature_solution(flat, float(t))) for t in s]
        write_atomic(args.profile_csv, format_csv(["s", "kappa_K", "kappa_0"], prof))
    return EXIT_OK


def cmd_manifold_subdivide(args) -> int:
    poly = read_manifold_polygon(args.input)
    out = manifold_subdivide(poly, args.iters, args.rule)
    if not np.array_equal(out.vertices[:: 2**args.iters], poly.vertices):
        raise InvariantError("original manifold vertices were not retained")
    meta = {"geometry": out.geometry, "closed": out.closed, "iters": args.iters, "rule": args.rule}
    write_atomic(args.output, _vertex_table(out.vertices, args.format, meta))
    return EXIT_OK


def cmd_manifold_proximity(args) -> int:
    geometries = ["sphere", "disk"] if args.geometry == "both" else [args.geometry]
    curvature = {"sphere": 1.0, "disk": -1.0}
    if args.mode == "angle":
        header = ["geometry", "K", "kappa_j", "kappa_j1", "h", "alpha_K", "alpha_0", "deviation"]
        rows = [
            (g, *(r[c] for c in header[1:]))
            for g in geometries
            for r in angle_proximity_grid(curvature[g], args.pairs, args.h_grid)
        ]
    else:
        header = ["geometry", "reference", "spacing", "h", "deviation"]
        rows = [
            (g, args.reference, float(t), e, d)
            for g in geometries
            for t, (e, d) in zip(args.h_grid, chart_proximity(g, args.h_grid, args.reference))
        ]
    text = dumps_json([dict(zip(header, r)) for r in rows]) if args.format == "json" else format_csv(header, rows)
    write_atomic(args.output, text)
    return EXIT_OK


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bhsubdiv", description="Biharmonic interpolatory curve subdivision.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_output(p, formats=("csv", "json"), default=None):
        p.add_argument("--output", "-o", default="-", help="output path ('-' for stdout)")
        p.add_argument("--format", choices=formats, default=default or formats[0])

    def add_topology(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--closed", dest="topology", action="store_const", const="closed", help="treat input as closed")
        g.add_argument("--open", dest="topology", action="store_const", const="open", help="treat input as open")
        p.set_defaults(topology=None)

    p = sub.add_parser("subdivide", help="refine a polygon with a linear mask")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--scheme", default="bh6", help="dgl4, bh6, bh8 or bh<2m>")
    p.add_argument("--iters", type=_positive_int(0), default=5)
    add_topology(p)
    add_output(p)
    p.set_defaults(func=cmd_subdivide)

    p = sub.add_parser("derive-stencil", help="derive the 2m-point hierarchy mask exactly")
    p.add_argument("--m", type=_positive_int(2), required=True)
    add_output(p, ("json", "csv"))
    p.set_defaults(func=cmd_derive_stencil)

    p = sub.add_parser("analyze-symbol", help="certify zero order and regularity of a mask")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--scheme", default="bh6")
    src.add_argument("--mask-file")
    p.add_argument("--magnitude-csv", help="also write |a(e^{i omega})| on [0, pi]")
    p.add_argument("--samples", type=_positive_int(2), default=513)
    p.add_argument("--fd-csv", help="also write finite-difference norms of the refined delta")
    p.add_argument("--fd-levels", type=_positive_int(3), default=8)
    p.add_argument("--fd-max-k", type=_positive_int(1), default=5)
    p.add_argument("--output", "-o", default="-")
    p.set_defaults(func=cmd_analyze_symbol)

    p = sub.add_parser("verify-variational", help="exact six-point checks and random-window oracle")
    p.add_argument("--trials", type=_positive_int(1), default=200)
    p.add_argument("--seed", type=_positive_int(0), default=0)
    p.add_argument("--strict", action="store_true", help="exit 4 if any reference coefficient disagrees")
    p.add_argument("--output", "-o", default="-")
    p.set_defaults(func=cmd_verify_variational)

    p = sub.add_parser("benchmark", help="energy and curvature variance per refinement level")
    p.add_argument("--input", "-i", help="polygon file (default: built-in benchmark set)")
    p.add_argument("--schemes", type=_scheme_list, default=["dgl4", "bh6", "bh8"])
    p.add_argument("--levels", type=_positive_int(1), default=7)
    p.add_argument("--curvature-csv", help="also write final-level curvature per vertex")
    add_topology(p)
    add_output(p)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("proximity", help="insertion angle deviation from the flat case")
    p.add_argument("--K", type=_finite_float, required=True)
    p.add_argument("--kappas", type=_pair, required=True, help="kappa_j,kappa_j1")
    p.add_argument("--h-grid", type=_h_grid, default=_h_grid("1e-3:1e-1:21"), help="lo:hi:n, geometric")
    p.add_argument("--profile-csv", help="also write the curvature solution along one edge")
    p.add_argument("--profile-edge", type=_finite_float, default=1.0)
    p.add_argument("--samples", type=_positive_int(2), default=101)
    add_output(p)
    p.set_defaults(func=cmd_proximity)

    p = sub.add_parser("manifold-subdivide", help="refine a polygon on the sphere or in the Poincare disk")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--iters", type=_positive_int(0), default=5)
    p.add_argument("--rule", choices=PERTURBATION_RULES, default="arc")
    add_output(p, ("json", "csv"))
    p.set_defaults(func=cmd_manifold_subdivide)

    p = sub.add_parser("manifold-proximity", help="proximity data for sphere and disk")
    p.add_argument("--geometry", choices=["sphere", "disk", "both"], default="both")
    p.add_argument("--mode", choices=["angle", "chart"], default="angle")
    p.add_argument("--pairs", type=_pairs, default=_pairs(DEFAULT_PAIRS), help="'a,b;c,d;...'")
    p.add_argument("--reference", choices=["flat", "bh6"], default="flat", help="chart mode reference")
    p.add_argument("--h-grid", type=_h_grid, default=_h_grid("1e-3:1e-1:21"))
    add_output(p)
    p.set_defaults(func=cmd_manifold_proximity)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "func", None) is cmd_proximity and args.profile_edge <= 0:
        parser.error("--profile-edge must be positive")
    try:
        return args.func(args)
    except InputError as exc:
        code, err = EXIT_INPUT, exc
    except NumericalError as exc:
        code, err = EXIT_NUMERIC, exc
    except InvariantError as exc:
        code, err = EXIT_INVARIANT, exc
    msg = str(err).splitlines()[0] if str(err) else type(err).__name__
    print(f"bhsubdiv {args.command}: error: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
