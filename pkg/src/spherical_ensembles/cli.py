"""Command-line interface: sample, density, moments, spacings, validate.

Exit codes: 0 ok, 1 validation failure, 2 usage or configuration error,
3 I/O error, 4 numerical failure. CSV output starts with one
``# key=value;...`` metadata line, then a header row. Floats are written
with ``repr`` so identical runs give byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import secrets
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, analytic, exactseries, stats, validation
from .eigen import EigenError, eigenvalues_many
from .ensembles import RngState, sample_batch
from .matrix import EnsembleSpec

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NUMERIC = 4

TOOL = "spherical-ensembles"


class ConfigError(ValueError):
    pass


# --------------------------------------------------------------------------
# argument parsing


def _rational(text: str) -> Fraction:
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a decimal or p/q rational: {text!r}")
    return value


def _seed(text: str):
    if text == "auto":
        return "auto"
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer or 'auto', got {text!r}")
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must lie in [0, 2^64)")
    return value


def _grid(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("grid must be min:max:steps")
    try:
        lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi and steps >= 2):
        raise argparse.ArgumentTypeError("grid needs finite min < max and steps >= 2")
    return lo, hi, steps


def _range(text: str) -> tuple[float, float]:
    parts = text.split(":")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except (ValueError, IndexError):
        raise argparse.ArgumentTypeError("range must be lo:hi")
    if len(parts) != 2 or not lo < hi:
        raise argparse.ArgumentTypeError("range must be lo:hi with lo < hi")
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--beta", type=int, choices=(1, 2, 4), default=2, help="Dyson index")
    common.add_argument("--dim", type=int, default=None, help="matrix size N")
    size = common.add_mutually_exclusive_group()
    size.add_argument("--radius", type=_rational, help="Frobenius norm r of the spherical ensemble (decimal)")
    size.add_argument("--radius-sq", type=_rational, help="r^2 as an exact rational, e.g. 8 for r = sqrt(8)")
    size.add_argument("--q", type=_rational, help="Gaussian ensemble G_beta(N, q) instead of a spherical one")
    common.add_argument("--count", type=int, default=None, help="number of sampled matrices")
    common.add_argument("--seed", type=_seed, default=1, help="integer seed, or 'auto' for fresh entropy (recorded)")
    common.add_argument("--output", default="-", help="output path, '-' for standard output")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--workers", type=int, default=1, help="sampling threads")

    parser = argparse.ArgumentParser(prog=TOOL, description="Spherical random matrix ensembles.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("sample", parents=[common], help="sorted eigenvalues of sampled matrices")

    p = sub.add_parser("density", parents=[common], help="closed-form beta = 2 spectral density on a grid")
    p.add_argument("--grid", type=_grid, default=None, help="min:max:steps (default -r:r:401)")

    p = sub.add_parser("moments", parents=[common], help="exact or Monte Carlo spectral moments")
    p.add_argument("--mode", choices=("exact", "mc"), default="exact")
    p.add_argument("--max-k", type=int, default=8)
    p.add_argument("--gaussian-moments", type=Path, default=None,
                   help="CSV of Gaussian moments (k,m_k; optional '# q=...' line) for exact mode at beta != 2")

    p = sub.add_parser("spacings", parents=[common], help="mean-normalized middle-bulk spacings and histogram")
    p.add_argument("--take", type=int, default=21, help="odd number of middle eigenvalues per matrix")
    p.add_argument("--bins", type=int, default=50)
    p.add_argument("--range", type=_range, default=(0.0, 4.0), help="histogram range lo:hi")
    p.add_argument("--compare", choices=("gue",), default=None, help="reference run for a two-sample KS")
    p.add_argument("--full", action="store_true", help="2000 matrices per ensemble unless --count is given")

    p = sub.add_parser("validate", help="run the acceptance checks")
    p.add_argument("--quick", action="store_true", help="reduced Monte Carlo sizes with looser thresholds")
    p.add_argument("--golden-dir", type=Path, default=None)
    return parser


# --------------------------------------------------------------------------
# configuration


DEFAULT_DIM = {"sample": 8, "density": 4, "moments": 8, "spacings": 100}
DEFAULT_COUNT = {"sample": 10, "density": 0, "moments": 5000, "spacings": 500}


def resolve(args: argparse.Namespace) -> argparse.Namespace:
    """Fill per-command defaults and validate; raises ConfigError."""
    if args.dim is None:
        args.dim = DEFAULT_DIM[args.command]
    if args.count is None:
        args.count = 2000 if getattr(args, "full", False) else DEFAULT_COUNT[args.command]
    if args.dim < 1:
        raise ConfigError(f"--dim must be positive, got {args.dim}")
    if args.count < 0 or (args.command != "density" and args.count < 1):
        raise ConfigError(f"--count must be positive, got {args.count}")
    if args.workers < 1:
        raise ConfigError("--workers must be positive")
    for name in ("radius", "radius_sq", "q"):
        v = getattr(args, name)
        if v is not None and v <= 0:
            raise ConfigError(f"--{name.replace('_', '-')} must be positive")
    if args.seed == "auto":
        args.seed = secrets.randbits(64)
    return args


def make_spec(args) -> EnsembleSpec:
    try:
        return _make_spec(args)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _make_spec(args) -> EnsembleSpec:
    if args.q is not None:
        return EnsembleSpec.gaussian(args.beta, args.dim, args.q)
    if args.radius is not None:
        return EnsembleSpec.spherical(args.beta, args.dim, r_squared=args.radius**2)
    if args.radius_sq is not None:
        return EnsembleSpec.spherical(args.beta, args.dim, r_squared=args.radius_sq)
    return EnsembleSpec.spherical(args.beta, args.dim, r_squared=Fraction(args.dim))


def config_echo(args) -> dict:
    out = {}
    for key, value in sorted(vars(args).items()):
        if key == "seed":
            continue
        if isinstance(value, tuple):
            value = ":".join(str(v) for v in value)
        out[key] = "" if value is None else str(value)
    return out


# --------------------------------------------------------------------------
# output


def _cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (np.floating,)):
        return repr(float(v))
    return str(v)


def _json_cell(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, Fraction):
        return str(v)
    return v


def render(metadata: dict, columns: list[str], rows: list[list], fmt: str) -> str:
    if fmt == "json":
        doc = {"metadata": metadata, "columns": columns, "rows": [[_json_cell(c) for c in row] for row in rows]}
        return json.dumps(doc, indent=1) + "\n"
    buf = io.StringIO()
    meta = ";".join(f"{k}={str(v).replace(';', ',')}" for k, v in metadata.items())
    buf.write(f"# {meta}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(c) for c in row])
    return buf.getvalue()


def write_output(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def base_metadata(args, spec: EnsembleSpec | None) -> dict:
    meta = {"tool": TOOL, "version": __version__, "command": args.command}
    if spec is not None:
        meta["ensemble"] = spec.name
        if spec.kind == "spherical":
            meta["r_squared"] = str(spec.r_squared)
        else:
            meta["q"] = str(spec.q)
    meta["seed"] = args.seed
    meta.update({f"config.{k}": v for k, v in config_echo(args).items()})
    return meta


# --------------------------------------------------------------------------
# commands


def _spectra(spec, count, rng, workers, chunk=256):
    return eigenvalues_many(sample_batch(spec, count, rng, workers=workers), chunk=chunk)


def cmd_sample(args) -> tuple[dict, list[str], list[list]]:
    spec = make_spec(args)
    spectra = _spectra(spec, args.count, RngState(args.seed), args.workers)
    rows = [[i] + [float(v) for v in s.values] for i, s in enumerate(spectra)]
    cols = ["index"] + [f"lambda_{j + 1}" for j in range(args.dim)]
    return base_metadata(args, spec), cols, rows


def cmd_density(args):
    if args.beta != 2:
        raise ConfigError("the closed-form density exists for beta = 2 only")
    if args.q is not None:
        raise ConfigError("density is for the spherical ensemble; use --radius or --radius-sq")
    if args.dim < 2:
        raise ConfigError("density needs --dim >= 2 (N = 1 is two point masses)")
    spec = make_spec(args)
    r = spec.r
    model = analytic.build_density_model(args.dim, r)
    lo, hi, steps = args.grid if args.grid is not None else (-r, r, 401)
    xs = np.linspace(lo, hi, steps)
    fs = model.evaluate(xs)
    rows = []
    for x, f in zip(xs, fs):
        flag = "divergent" if math.isinf(f) else ""
        rows.append([float(x), float(f), flag])
    meta = base_metadata(args, spec)
    meta.update({
        "density_form": "pi^piFactor * p(u) * (1-u^2)^exponent / r with u = x/r",
        "p_coefficients": ",".join(str(c) for c in model.p.coeffs),
        "exponent": str(model.exponent),
        "piFactor": model.pi_factor,
        "l1_to_semicircle_unit_variance": repr(analytic.l1_to_semicircle(model)),
    })
    return meta, ["x", "f", "flag"], rows


def read_gaussian_moments(path: Path) -> tuple[Fraction, dict[int, Fraction]]:
    q = Fraction(1)
    moments: dict[int, Fraction] = {}
    text = path.read_text(encoding="utf-8")
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("q="):
                q = Fraction(body[2:].strip())
            continue
        k, _, value = line.partition(",")
        if k.strip() == "k":
            continue
        try:
            moments[int(k)] = Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"bad moment line {line!r} in {path}")
    moments.setdefault(0, Fraction(1))
    return q, moments


def cmd_moments(args):
    if args.max_k < 0:
        raise ConfigError("--max-k must be nonnegative")
    spec = make_spec(args)
    meta = base_metadata(args, spec)
    ks = range(args.max_k + 1)
    if args.mode == "exact":
        if spec.beta == 2:
            exact = list(exactseries.moment_table(spec, args.max_k).moments)
            meta["source"] = "Harer-Zagier closed form"
        elif args.gaussian_moments is not None:
            q_file, gm = read_gaussian_moments(args.gaussian_moments)
            missing = [k for k in ks if k % 2 == 0 and k not in gm]
            if missing:
                raise ConfigError(f"Gaussian moment file lacks even orders {missing}")
            if spec.kind == "spherical":
                exact = [exactseries.moment_spherical(k, spec, gm.get(k, 0), q_file) for k in ks]
            else:
                # m_k(G(q')) = (q/q')^(k/2) m_k(G(q)) by scaling
                ratio = q_file / exactseries.as_fraction(spec.q)
                exact = [Fraction(0) if k % 2 else ratio ** (k // 2) * gm[k] for k in ks]
            meta["source"] = f"Gaussian moments from {args.gaussian_moments} at q={q_file}"
        else:
            raise ConfigError("exact moments need beta = 2, or --gaussian-moments FILE for beta = 1, 4")
        rows = [[k, str(m), float(m), exactseries.moment_semicircle(k)] for k, m in zip(ks, exact)]
        return meta, ["k", "m_k", "m_k_float", "catalan_limit"], rows
    spectra = _spectra(spec, args.count, RngState(args.seed), args.workers)
    mom = stats.empirical_moments(spectra, args.max_k)
    exact = None
    if spec.beta == 2:
        exact = exactseries.moment_table(spec, args.max_k).moments
    rows = []
    for k in ks:
        rows.append([k, float(mom.m[k]), float(mom.se[k]), "" if exact is None else str(exact[k]),
                     exactseries.moment_semicircle(k)])
    meta["se_convention"] = "matrix-level: one value of (1/N) sum lambda^k per matrix"
    return meta, ["k", "m_k", "se", "exact", "catalan_limit"], rows


def cmd_spacings(args):
    if args.take < 1 or args.take % 2 == 0:
        raise ConfigError("--take must be a positive odd integer")
    if args.dim < args.take:
        raise ConfigError(f"spacings need --dim >= {args.take}, got {args.dim}")
    if args.bins < 1:
        raise ConfigError("--bins must be positive")
    spec = make_spec(args)
    rng = RngState(args.seed)
    spectra = _spectra(spec, args.count, rng, args.workers, chunk=64)
    sample = stats.pooled_spacings(spectra, args.take)
    lo, hi = args.range
    hist = stats.histogram(sample.spacings, lo, hi, args.bins)
    meta = base_metadata(args, spec)
    start, stop = stats.middle_window(args.dim, args.take)
    meta.update({
        "convention": sample.convention,
        "window": f"{start}..{stop - 1}",
        "spacings": sample.spacings.size,
        "raw_mean": repr(sample.raw_mean),
        "degenerate": sample.degenerate,
        "overflow": hist.overflow,
        "ks_wigner_surmise": repr(stats.ks_distance(sample.spacings, stats.wigner_surmise_gue_cdf)),
    })
    if args.compare == "gue":
        ref_spec = EnsembleSpec.gaussian(2, args.dim, args.dim)
        # a disjoint block of streams keeps the reference independent of the main run
        ref = _spectra(ref_spec, args.count, rng.substream(10**9), args.workers, chunk=64)
        ref_sample = stats.pooled_spacings(ref, args.take)
        meta["compare"] = ref_spec.name
        meta["ks_vs_gue"] = repr(stats.ks_distance(sample.spacings, ref_sample.spacings))
    rows = [["spacing", i, float(s), "", "", "", ""] for i, s in enumerate(sample.spacings)]
    dens = hist.density()
    edges = hist.edges
    for b in range(hist.bin_count):
        rows.append(["histogram", b, "", float(edges[b]), float(edges[b + 1]), int(hist.counts[b]), float(dens[b])])
    return meta, ["section", "index", "spacing", "bin_lo", "bin_hi", "count", "density"], rows


def cmd_validate(args) -> int:
    def report(res):
        print(res.line(), flush=True)

    results = validation.run_all(quick=args.quick, golden_dir=args.golden_dir, report=report)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed" + (
        "" if not failed else "; failed: " + ", ".join(f"[{r.number}] {r.name}" for r in failed)))
    return EXIT_OK if not failed else EXIT_VALIDATION


COMMANDS = {"sample": cmd_sample, "density": cmd_density, "moments": cmd_moments, "spacings": cmd_spacings}


_VALUE_FLAGS = ("--grid", "--range")


def _join_negative_values(argv: list[str]) -> list[str]:
    # argparse reads "-2:2:401" as an option; rewrite to "--grid=-2:2:401"
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") and ":" in argv[i + 1]:
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        if args.command == "validate":
            return cmd_validate(args)
        args = resolve(args)
        meta, cols, rows = COMMANDS[args.command](args)
        text = render(meta, cols, rows, args.format)
    except ConfigError as exc:
        print(f"{TOOL}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"{TOOL}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (EigenError, ArithmeticError) as exc:
        print(f"{TOOL}: numerical failure: {exc.__class__.__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    try:
        write_output(text, args.output)
    except OSError as exc:
        print(f"{TOOL}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
