"""Command-line interface: ``svdensity {density,radial,mc,check,special}``.

All output is CSV with 17 significant digits.  Exit codes: 0 success,
1 usage error, 2 numeric failure, 3 a checked threshold or invariant
failed.
"""

from __future__ import annotations

import argparse
import io
import math
import sys
from contextlib import contextmanager
from typing import Callable, Optional, Sequence

import numpy as np

from . import density, experiment, special
from .quadrature import QuadratureError
from .spectrum import SingularSpectrum, read_spectrum_file

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_THRESHOLD = 0, 1, 2, 3


class UsageError(Exception):
    pass


class ThresholdError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; 2 is reserved for numeric failures here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _row(*values) -> str:
    return ",".join(fmt(v) for v in values) + "\n"


def _parse_g(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise UsageError(f"--g: {exc}") from None


def _parse_grid(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError("--grid must look like lo:hi:n")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"--grid: {exc}") from None
    if n < 2:
        raise UsageError("--grid needs at least 2 points")
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        raise UsageError("--grid needs finite lo < hi")
    return lo, hi, n


def _spectrum(args) -> SingularSpectrum:
    if (args.g is None) == (args.spectrum_file is None):
        raise UsageError("give exactly one of --g and --spectrum-file")
    try:
        values = _parse_g(args.g) if args.g is not None else read_spectrum_file(args.spectrum_file)
        return SingularSpectrum(values)
    except OSError as exc:
        raise UsageError(f"cannot read spectrum file: {exc}") from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None


@contextmanager
def _output(path: Optional[str]):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _spectrum_comment(spec: SingularSpectrum) -> str:
    return (f"# spectrum={';'.join(fmt(v) for v in spec.g)}\n"
            f"# atom_at_origin={fmt(spec.atom_at_origin)}\n"
            f"# normalization={fmt(density.normalization(spec))}\n")


def _grid_points(grid) -> np.ndarray:
    lo, hi, n = grid
    return np.linspace(lo, hi, n)


def _curve(args, header: str, f: Callable[[SingularSpectrum, float], float]) -> int:
    spec = _spectrum(args)
    grid = _parse_grid(args.grid)
    buf = io.StringIO()
    buf.write(_spectrum_comment(spec))
    buf.write(header + "\n")
    for x in _grid_points(grid):
        buf.write(_row(x, f(spec, float(x)) if x > 0 else 0.0))
    with _output(args.out) as fh:
        fh.write(buf.getvalue())
    return EXIT_OK


def cmd_density(args) -> int:
    return _curve(args, "s,psi", lambda spec, s: density.psi_value(spec, s, args.side))


def cmd_radial(args) -> int:
    return _curve(args, "r,psi1", lambda spec, r: density.psi_radial(spec, r, args.side))


def histogram_csv(hist: experiment.RadialHistogram, report: experiment.ComparisonReport) -> str:
    buf = io.StringIO()
    buf.write("bin_lo,bin_hi,count,expected,zscore\n")
    for k in range(len(hist.counts)):
        buf.write(_row(hist.edges[k], hist.edges[k + 1], int(hist.counts[k]),
                       report.expected[k], report.zscores[k]))
    return buf.getvalue()


def density_csv(hist: experiment.RadialHistogram, report: experiment.ComparisonReport) -> str:
    """Histogram scaled to a density of ``|z|``, next to the bin average of the analytic curve."""
    scale = hist.n_samples * hist.n_matrix * hist.bin_width
    observed = hist.density()
    buf = io.StringIO()
    buf.write("bin_lo,bin_hi,density,expected_density\n")
    for k in range(len(hist.counts)):
        buf.write(_row(hist.edges[k], hist.edges[k + 1], observed[k], report.expected[k] / scale))
    return buf.getvalue()


def report_csv(report: experiment.ComparisonReport) -> str:
    return ("chi_square,dof,tv_distance,max_abs_z,discarded\n"
            + _row(report.chi_square, report.dof, report.tv_distance,
                   report.max_abs_z, report.discarded))


def cmd_mc(args) -> int:
    spec = _spectrum(args)
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    if not args.bin_width > 0:
        raise UsageError("--bin-width must be > 0")
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    if not 0 <= args.seed < 2**64:
        raise UsageError("--seed must be in [0, 2**64)")
    hist = experiment.run_mc(spec, args.samples, args.bin_width, args.seed, args.workers)
    expected = experiment.expected_histogram(spec, hist.edges, args.samples)
    report = experiment.compare(hist, expected)
    with _output(args.out) as fh:
        fh.write(histogram_csv(hist, report))
    if args.report:
        with _output(args.report) as fh:
            fh.write(report_csv(report))
    if args.density_out:
        with _output(args.density_out) as fh:
            fh.write(density_csv(hist, report))
    if report.tv_distance > args.tv_threshold:
        raise ThresholdError(
            f"tv_distance {fmt(report.tv_distance)} exceeds threshold {fmt(args.tv_threshold)}")
    return EXIT_OK


def run_checks(spec: SingularSpectrum, tol: float = 1e-8) -> list[tuple[str, bool, str]]:
    """Invariant battery on one spectrum: ``(name, passed, detail)`` per check."""
    results = []
    g = spec.block_values
    nonzero = [v for v in g if v > 0]

    mass = density.normalization(spec)
    total = mass + spec.atom_at_origin
    if spec.is_scalar:
        results.append(("normalization", mass == 0.0,
                        f"scalar spectrum: mass on the circle |z|^2={fmt(g[0])}"))
    else:
        results.append(("normalization", abs(total - 1.0) <= tol,
                        f"continuous={fmt(mass)} atom={fmt(spec.atom_at_origin)}"))

    lo, hi = nonzero[0], nonzero[-1]
    outside = [lo * 0.5, lo * (1 - 1e-6), hi * (1 + 1e-6), hi * 2]
    inside = np.linspace(lo, hi, 41)[1:-1] if hi > lo else []
    if g[0] == 0.0:
        outside = [hi * (1 + 1e-6), hi * 2]
        inside = np.linspace(0, hi, 41)[1:-1]
    vals_out = [density.psi_value(spec, s) for s in outside]
    vals_in = [density.psi_value(spec, float(s)) for s in inside]
    results.append(("support", all(v == 0.0 for v in vals_out) and all(v >= -tol for v in vals_in),
                     f"max outside={fmt(max(abs(v) for v in vals_out))} "
                     f"min inside={fmt(min(vals_in) if vals_in else 0.0)}"))

    if spec.is_distinct and spec.n >= 2:
        worst = 0.0
        for s in inside[::5]:
            for i, gi in enumerate(spec.g):
                if gi > s:
                    a = density.f_delta_sum(spec, i, float(s))
                    b = density.f_delta_quad(spec, i, float(s))
                    worst = max(worst, abs(a - b) / max(1.0, abs(a)))
        results.append(("path_equivalence", worst <= tol, f"max deviation={fmt(worst)}"))

        worst = 0.0
        for s in [float(x) for x in inside[::5]] + [hi * 1.5]:
            terms = [density.f_delta_sum(spec, i, s) for i in range(spec.n)]
            scale = math.fsum(abs(t) for t in terms) or 1.0
            worst = max(worst, abs(math.fsum(terms)) / scale)
        results.append(("antisymmetry", worst <= 1e-10, f"max |sum|/sum|.|={fmt(worst)}"))

    c = 2.5
    scaled = spec.scaled(c)
    worst = 0.0
    for s in inside[::5]:
        a = density.psi_value(spec, float(s))
        b = c * density.psi_value(scaled, c * float(s))
        worst = max(worst, abs(a - b) / max(1e-300, abs(a), 1.0))
    results.append(("scaling", worst <= tol, f"max deviation={fmt(worst)}"))
    return results


def cmd_check(args) -> int:
    spec = _spectrum(args)
    if spec.n < 1:
        raise UsageError("empty spectrum")
    results = run_checks(spec)
    buf = io.StringIO()
    buf.write(f"# spectrum={';'.join(fmt(v) for v in spec.g)}\n")
    buf.write(f"# atom_at_origin={fmt(spec.atom_at_origin)}\n")
    buf.write(f"# continuous_mass={fmt(density.normalization(spec))}\n")
    buf.write("check,status,detail\n")
    for name, ok, detail in results:
        buf.write(f"{name},{'pass' if ok else 'FAIL'},{detail}\n")
    with _output(args.out) as fh:
        fh.write(buf.getvalue())
    failed = [name for name, ok, _ in results if not ok]
    if failed:
        raise ThresholdError("failed checks: " + ", ".join(failed))
    return EXIT_OK


def cmd_special(args) -> int:
    if args.kind == "rank-one":
        if args.n is None or args.g1 is None or args.gval is None:
            raise UsageError("rank-one needs --g1, --gval and --n")
        g1, g, n = args.g1, args.gval, args.n
        try:
            spec = SingularSpectrum([g1] + [g] * (n - 1))
            closed = lambda s: special.psi_rank_one(g1, g, n, s)  # noqa: E731
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        default = (max(g1, 1e-3 * g), g)
        scale = 1.0
    else:
        if args.m is None or args.n is None:
            raise UsageError("truncated needs --m and --n")
        m, n = args.m, args.n
        try:
            special.truncated_constant(m, n)
        except (TypeError, ValueError) as exc:
            raise UsageError(str(exc)) from None
        spec = SingularSpectrum([0.0] * m + [1.0] * (n - m))
        closed = lambda s: special.psi_truncated(m, n, s)  # noqa: E731
        default = (0.0, 1.0)
        # the general path leaves M/N of the mass in the origin atom
        scale = n / (n - m)
    if args.grid:
        lo, hi, points = _parse_grid(args.grid)
    else:
        lo, hi = default
        points = 101
    buf = io.StringIO()
    buf.write(f"# spectrum={';'.join(fmt(v) for v in spec.g)}\n")
    buf.write("s,closed_form,general\n")
    worst = 0.0
    support = (spec.block_values[0], spec.block_values[-1])
    for s in np.linspace(lo, hi, points):
        s = float(s)
        if s <= 0:
            continue
        side = args.side
        if side is None:
            # at the ends of the support, take the limit from inside
            side = "hi" if s <= support[0] else "lo" if s >= support[1] else None
        a = closed(s)
        b = scale * density.psi_value(spec, s, side)
        buf.write(_row(s, a, b))
        if a != 0.0:
            worst = max(worst, abs(a - b) / abs(a))
        elif b != 0.0:
            worst = math.inf
    buf.write(f"# max_rel_deviation={fmt(worst)}\n")
    with _output(args.out) as fh:
        fh.write(buf.getvalue())
    return EXIT_OK


def _add_spectrum(p: argparse.ArgumentParser) -> None:
    p.add_argument("--g", help="comma-separated squared singular values")
    p.add_argument("--spectrum-file", help="file with one value per line ('#' comments)")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="output file (default: standard output)")
    p.add_argument("--side", choices=("lo", "hi"), default=None,
                   help="one-sided limit at s equal to one of the g (default: average)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="svdensity",
                     description="Eigenvalue density of U sqrt(G) for Haar unitary U.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, helptext in (("density", "psi(s) on a grid of s = |z|^2"),
                           ("radial", "psi1(r) = 2 r psi(r^2) on a grid of r = |z|")):
        p = sub.add_parser(name, help=helptext)
        _add_spectrum(p)
        p.add_argument("--grid", required=True, help="lo:hi:n")
        _add_common(p)

    p = sub.add_parser("mc", help="Monte Carlo histogram of |z| against the density")
    _add_spectrum(p)
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--bin-width", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="histogram CSV (default: standard output)")
    p.add_argument("--report", help="summary CSV")
    p.add_argument("--density-out", help="density-normalised histogram CSV")
    p.add_argument("--tv-threshold", type=float, default=0.02)

    p = sub.add_parser("check", help="invariant battery on one spectrum")
    _add_spectrum(p)
    p.add_argument("--out")

    p = sub.add_parser("special", help="closed-form special cases against the general path")
    p.add_argument("kind", choices=("rank-one", "truncated"))
    p.add_argument("--g1", type=float, help="rank-one: the odd value")
    p.add_argument("--gval", type=float, help="rank-one: the repeated value")
    p.add_argument("--m", type=int, help="truncated: number of removed rows/columns")
    p.add_argument("--n", type=int, help="matrix size")
    p.add_argument("--grid", help="lo:hi:n in s")
    _add_common(p)
    return parser


COMMANDS = {
    "density": cmd_density,
    "radial": cmd_radial,
    "mc": cmd_mc,
    "check": cmd_check,
    "special": cmd_special,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"svdensity: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ThresholdError as exc:
        print(f"svdensity: {exc}", file=sys.stderr)
        return EXIT_THRESHOLD
    except (QuadratureError, ArithmeticError, ValueError) as exc:
        print(f"svdensity: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
