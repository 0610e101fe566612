"""Command-line interface.

Subcommands: ``extract``, ``predict``, ``budget``, ``bound``, ``synth``.
Matrix and measurement arguments accept a CSV path or ``bundled:<name>``
(tin, al, tin_hf, al_hf). Bundled measurements are the deterministic
reconstructions from :func:`surfloss.reference.published_measurements`.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import warnings
from pathlib import Path

from . import __version__
from .bounds import upper_bound
from .core import (
    REGIONS,
    BoundError,
    DomainError,
    EmptyEnsembleError,
    ExtractionConfig,
    MatrixValidationError,
    ParseError,
    Region,
    SolverError,
    SurflossError,
)
from .ingest import (
    bundled_matrix,
    read_measurements,
    read_participation,
    results_document,
    write_measurements,
)
from .pipeline import run_extraction
from .predict import loss_budget, predict_q
from .reference import DISPLAY_EXPONENT, DISPLAY_SCALE, PUBLISHED, reference_tangents
from .synth import SynthSpec, generate

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_PARSE = 4
EXIT_VALIDATION = 5
EXIT_SOLVER = 6

_SUPERSCRIPT = str.maketrans("-0123456789", "⁻⁰¹²³⁴⁵⁶⁷⁸⁹")


def scale_label(region: Region) -> str:
    return f"(×10{str(DISPLAY_EXPONENT[region]).translate(_SUPERSCRIPT)})"


def format_estimate(e) -> str:
    """``mean ± std`` or ``<bound`` in the region's display scale."""
    s = DISPLAY_SCALE[e.region]
    if e.resolvable:
        return f"{e.mean / s:.1f} ± {e.std / s:.1f}"
    return f"<{e.upper_bound / s:.1f}"


def format_table(estimates) -> str:
    lines = [f"{'Region':<7}{'Loss tangent':<16}Scale"]
    for r in REGIONS:
        lines.append(f"{r.value:<7}{format_estimate(estimates[r]):<16}{scale_label(r)}")
    return "\n".join(lines)


def _load_matrix(spec, units):
    if spec.startswith("bundled:"):
        return bundled_matrix(spec.split(":", 1)[1])
    return read_participation(spec, units)


def _load_measurements(spec):
    if spec.startswith("bundled:"):
        from .reference import published_measurements

        name = spec.split(":", 1)[1]
        if name not in PUBLISHED:
            raise KeyError(f"unknown bundled dataset {name!r}")
        return published_measurements(name)
    return read_measurements(spec)


def _config(args) -> ExtractionConfig:
    scale = _parse_tangents(args.scale) if args.scale else {}
    return ExtractionConfig(n_samples=args.samples, rng_seed=args.seed, participation_units=args.units,
                            region_scale=scale)


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _json(doc) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _run(args, matrix_spec, measurements_path):
    matrix = _load_matrix(matrix_spec, args.units)
    measurements = _load_measurements(measurements_path)
    return run_extraction(matrix, measurements, _config(args), strict=args.strict, workers=args.workers)


def cmd_extract(args):
    run = _run(args, args.matrix, args.measurements)
    doc = results_document(run.estimates.values(), run.config, run.result.diagnostics())
    doc["diagnostics"]["bound_rule"] = "other-region minima clamped at zero"
    out = Path(args.out)
    _atomic_write(out / "results.json", _json(doc))
    print(format_table(run.estimates))
    return EXIT_OK


def _predict_doc(run):
    measured = {s.design: s for s in run.stats}
    records = []
    for p in predict_q(run.matrix, run.result):
        rec = p.to_dict()
        s = measured[p.design]
        rec["measured_mean_q_tls"] = s.mean_q_tls
        rec["measured_std_err_q_tls"] = s.std_err_q_tls
        rec["n_resonators"] = s.n_resonators
        records.append(rec)
    return records


def cmd_predict(args):
    run = _run(args, args.matrix, args.measurements)
    predicted = predict_q(run.matrix, run.result)
    doc = {"predicted_q": _predict_doc(run), "config": run.config.to_dict(),
           "generated_by": f"surfloss {__version__}"}
    out = Path(args.out)
    _atomic_write(out / "predict.json", _json(doc))
    if args.svg:
        from .plots import scatter_svg

        scatter_svg(out / "predict.svg", predicted, run.stats)
    for rec in doc["predicted_q"]:
        q = rec["mean_q_tls"]
        pred = "inf" if q is None else f"{q:.3e} ± {2 * rec['std_q_tls']:.2e}"
        print(f"{rec['design']:<10} measured {rec['measured_mean_q_tls']:.3e} ± "
              f"{rec['measured_std_err_q_tls']:.2e}   predicted {pred} (2σ)")
    return EXIT_OK


def cmd_budget(args):
    if len(args.inputs) % 2:
        raise _UsageError("budget expects MATRIX MEASUREMENTS pairs")
    pairs = [(args.inputs[i], args.inputs[i + 1]) for i in range(0, len(args.inputs), 2)]
    loaded = [(_load_matrix(m, args.units), _load_measurements(q)) for m, q in pairs]
    sets = {}
    for (mspec, qpath), (matrix, measurements) in zip(pairs, loaded):
        run = run_extraction(matrix, measurements, _config(args), strict=args.strict, workers=args.workers)
        name = _set_name(matrix, qpath, sets)
        sets[name] = loss_budget(run.matrix, run.result, run.stats)
    doc = {"loss_budget": [dict(b.to_dict(), set=name) for name, bs in sets.items() for b in bs],
           "config": _config(args).to_dict(), "generated_by": f"surfloss {__version__}"}
    out = Path(args.out)
    _atomic_write(out / "budget.json", _json(doc))
    if args.svg:
        from .plots import budget_svg

        budget_svg(out / "budget.svg", sets, Region.parse(args.highlight))
    for name, budgets in sets.items():
        for b in budgets:
            parts = "  ".join(f"{r.value}={b.per_region_loss[r]:.2e}" for r in REGIONS)
            print(f"{name:<12}{b.design.label:<10} measured {b.total_loss:.3e}  predicted "
                  f"{b.predicted_total:.3e}  {parts}")
    return EXIT_OK


def _set_name(matrix, path, taken):
    d = matrix.rows[0]
    base = " ".join(t for t in (d.material, "w/" + d.process if d.process != "none" else "") if t)
    base = base or Path(path).stem
    name, k = base, 2
    while name in taken:
        name, k = f"{base}#{k}", k + 1
    return name


def cmd_bound(args):
    run = _run(args, args.matrix, args.measurements)
    region = Region.parse(args.region)
    design = run.matrix.accentuating_row(region)
    value = upper_bound(run.matrix, run.stats_for(design), run.estimates, region,
                        region_scale=run.config.region_scale)
    est = run.estimates[region]
    doc = {"region": region.value, "design": design.label, "upper_bound": value,
           "mean": est.mean, "std": est.std, "resolvable": est.resolvable,
           "config": run.config.to_dict(), "generated_by": f"surfloss {__version__}"}
    _atomic_write(Path(args.out) / f"bound_{region.value}.json", _json(doc))
    print(f"{region.value} upper bound <{value / DISPLAY_SCALE[region]:.2f} {scale_label(region)}")
    return EXIT_OK


def _parse_tangents(text):
    out = {}
    for item in text.split(","):
        key, _, value = item.partition("=")
        try:
            out[Region.parse(key)] = float(value)
        except ValueError:
            raise _UsageError(f"bad value {item!r}; expected e.g. MS=4.6e-4") from None
    return out


def cmd_synth(args):
    matrix = _load_matrix(args.matrix, args.units)
    if args.tangents:
        tangents = _parse_tangents(args.tangents)
    else:
        tangents = reference_tangents(args.reference)
    spec = SynthSpec(matrix, tangents, args.n, args.noise, args.q_hp, args.seed)
    records = generate(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=out, suffix=".csv")
    os.close(fd)
    write_measurements(tmp, records)
    os.replace(tmp, out / args.name)
    print(f"wrote {len(records)} measurements to {out / args.name}")
    return EXIT_OK


class _UsageError(Exception):
    pass


def _common(p, samples=True):
    p.add_argument("--units", choices=("percent", "fraction"), default="percent",
                   help="units of the participation CSV (default percent)")
    p.add_argument("--out", default=".", help="output directory")
    if samples:
        p.add_argument("--samples", type=int, default=10_000, help="Monte-Carlo samples")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--strict", action="store_true", help="flagged measurements are errors")
        p.add_argument("--workers", type=int, default=1, help="solver threads (result unchanged)")
        p.add_argument("--scale", help="per-region loss-factor to loss-tangent factors, e.g. MA=0.5")


def build_parser():
    parser = argparse.ArgumentParser(prog="surfloss", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"surfloss {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract per-region loss tangents")
    p.add_argument("matrix")
    p.add_argument("measurements")
    _common(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("predict", help="predicted vs measured Q_TLS")
    p.add_argument("matrix")
    p.add_argument("measurements")
    _common(p)
    p.add_argument("--svg", action="store_true", help="also write predict.svg")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("budget", help="per-design loss budget for one or more datasets")
    p.add_argument("inputs", nargs="+", metavar="MATRIX MEASUREMENTS")
    _common(p)
    p.add_argument("--svg", action="store_true", help="also write budget.svg")
    p.add_argument("--highlight", default="SA", help="region drawn inside the bars (default SA)")
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("bound", help="upper bound for one region")
    p.add_argument("matrix")
    p.add_argument("measurements")
    p.add_argument("--region", required=True)
    _common(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("synth", help="generate synthetic measurements")
    p.add_argument("matrix")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--tangents", help="e.g. MS=4.6e-4,SA=1.7e-3,MA=3.3e-3,Si=2.6e-7")
    src.add_argument("--reference", default="tin", choices=("tin", "tin_hf", "al", "al_hf"),
                     help="use a published tangent set (default tin)")
    p.add_argument("--n", type=int, default=30, help="resonators per design")
    p.add_argument("--noise", type=float, default=0.05, help="relative Q_TLS dispersion")
    p.add_argument("--q-hp", type=float, default=None, help="fixed high-power Q (default: infinite)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--name", default="measurements.csv", help="output file name")
    _common(p, samples=False)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        warnings.showwarning = lambda msg, *a, **k: print(f"warning: {msg}", file=sys.stderr)
        try:
            return args.func(args)
        except _UsageError as exc:
            parser.error(str(exc))
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
        except ParseError as exc:
            print(f"parse error: {exc}", file=sys.stderr)
            return EXIT_PARSE
        except (MatrixValidationError, DomainError, EmptyEnsembleError, KeyError) as exc:
            print(f"validation error: {exc}", file=sys.stderr)
            return EXIT_VALIDATION
        except (SolverError, BoundError) as exc:
            print(f"solver error: {exc}", file=sys.stderr)
            return EXIT_SOLVER
        except SurflossError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
