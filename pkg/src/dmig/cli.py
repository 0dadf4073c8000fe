"""Command-line frontend: eval, synth, oracle and plot subcommands.

Exit code policy: 0 for successful computation (metric findings such as
negative MIG or pathology flags are results, not errors), 1 for
estimation/metric failures and failed oracle checks, 2 for operational
problems (missing or malformed files, invalid flag values).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .dataio import (
    format_float,
    read_dataset,
    read_series,
    read_truth,
    write_dataset,
    write_report,
    write_series,
    write_truth,
)
from .errors import DmigError, FileFormatError, SpecValidationError
from .estimation import (
    DISCRETE,
    EstimatorConfig,
    conditional_entropy,
    entropy_continuous,
    entropy_discrete,
    mi_continuous,
    mi_discrete,
)
from .metrics import MetricReport, evaluate
from .plotting import METRICS, PlotSpec, render_series_scatter
from .synthetic import (
    SyntheticSpec,
    gaussian_truth,
    gen_discrete_joint,
    gen_gaussian_pair,
    gen_trajectory,
)

__all__ = ["main"]


def _cell(v: float | None) -> str:
    if v is None:
        return "none"
    if not np.isfinite(v):
        return format_float(v)
    return f"{v:.4f}"


def _dim(j: int | None) -> str:
    return "none" if j is None else f"z{j + 1}"


def _print_report(report: MetricReport, heading: str | None = None) -> None:
    if heading:
        print(heading)
    print(
        f"{'attribute':<14}{'mig':>10}{'dmig':>10}{'scc':>10}  "
        f"{'branch':<14}{'top':>5}{'runner':>8}{'denominator':>13}  flags"
    )
    for a in report.per_attribute:
        name = a.name if a.name is not None else "?"
        flags = ",".join(sorted(a.flags)) if a.flags else "-"
        print(
            f"{'a' + name:<14}{_cell(a.mig):>10}{_cell(a.dmig):>10}{_cell(a.scc):>10}  "
            f"{a.branch:<14}{_dim(a.top_dim):>5}{_dim(a.runner_up_dim):>8}"
            f"{_cell(a.denominator):>13}  {flags}"
        )
    print(f"{'mean':<14}{_cell(report.mean_mig):>10}{_cell(report.mean_dmig):>10}")


def _estimator_config(args: argparse.Namespace) -> EstimatorConfig:
    return EstimatorConfig(k=args.k, jitter=args.jitter, seed=args.seed)


def cmd_eval(args: argparse.Namespace) -> int:
    cfg = _estimator_config(args)
    if len(args.dataset) == 1:
        path = args.dataset[0]
        report = evaluate(read_dataset(path), cfg, workers=args.workers)
        out = Path(args.out) if args.out else Path(path).with_suffix(".report")
        write_report(report, out)
        _print_report(report)
        print(f"report written to {out}")
    else:
        series = []
        for t, path in enumerate(args.dataset):
            series.append((t, evaluate(read_dataset(path), cfg, workers=args.workers)))
        out = Path(args.out) if args.out else Path(args.dataset[0]).with_suffix(".series")
        write_series(series, out)
        for t, report in series:
            _print_report(report, heading=f"epoch {t}")
        print(f"series written to {out}")
    return 0


def _parse_pmf(text: str) -> tuple[tuple[float, ...], ...]:
    try:
        return tuple(
            tuple(float(v) for v in row.split(",")) for row in text.split(";")
        )
    except ValueError:
        raise SpecValidationError(
            f"bad --pmf value {text!r}; expected rows like '0.4,0.1;0.1,0.4'"
        ) from None


def cmd_synth(args: argparse.Namespace) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.family == "gaussian_pair":
        spec = SyntheticSpec(
            family="gaussian_pair",
            n=args.n,
            seed=args.seed,
            rho=args.rho,
            d_total=args.d_total,
        )
        ds, truth = gen_gaussian_pair(spec)
        _write_pair(ds, truth, args.family, out_dir)
    elif args.family == "discrete_joint":
        spec = SyntheticSpec(
            family="discrete_joint",
            n=args.n,
            seed=args.seed,
            pmf=_parse_pmf(args.pmf),
            d_total=args.d_total,
        )
        ds, truth = gen_discrete_joint(spec)
        _write_pair(ds, truth, args.family, out_dir)
    else:
        schedule = tuple(np.geomspace(args.noise_start, args.noise_end, args.epochs))
        spec = SyntheticSpec(
            family="trajectory",
            n=args.n,
            seed=args.seed,
            rho=args.rho,
            noise_schedule=schedule,
            d_total=args.d_total,
        )
        epochs = gen_trajectory(spec)
        width = len(str(len(epochs) - 1))
        for t, ds in epochs:
            path = out_dir / f"trajectory_epoch{t:0{width}d}.csv"
            write_dataset(ds, path)
        truth_path = out_dir / "trajectory.truth"
        write_truth("trajectory", gaussian_truth(args.rho), truth_path)
        print(f"wrote {len(epochs)} epoch datasets and {truth_path} to {out_dir}")
    return 0


def _write_pair(ds, truth, family: str, out_dir: Path) -> None:
    csv_path = out_dir / f"{family}.csv"
    truth_path = out_dir / f"{family}.truth"
    write_dataset(ds, csv_path)
    write_truth(family, truth, truth_path)
    print(f"wrote {csv_path} and {truth_path}")


def cmd_oracle(args: argparse.Namespace) -> int:
    path = Path(args.dataset)
    truth_path = path.with_suffix(".truth")
    family, truth = read_truth(truth_path)
    ds = read_dataset(path)
    if ds.m != 2:
        raise FileFormatError(
            f"{truth_path} describes 2 attributes but {path} has M={ds.m}"
        )
    cfg = _estimator_config(args)
    a1, a2 = ds.attributes

    def marginal(a):
        return entropy_discrete(a) if a.kind == DISCRETE else entropy_continuous(a, cfg)

    if a1.kind == DISCRETE and a2.kind == DISCRETE:
        i_est = mi_discrete(a1, a2)
    else:
        i_est = mi_continuous(a1, a2, cfg)
    rows = [
        ("h_a1", marginal(a1), truth.h_a[0]),
        ("h_a2", marginal(a2), truth.h_a[1]),
        ("i_a1a2", i_est, truth.i_a1a2),
        ("h_cond12", conditional_entropy(a1, a2, cfg), truth.h_cond[0][1]),
        ("h_cond21", conditional_entropy(a2, a1, cfg), truth.h_cond[1][0]),
    ]
    if any(np.isfinite(v) for v in truth.ideal_dmig):
        report = evaluate(ds, cfg)
        for i in range(2):
            if np.isfinite(truth.ideal_dmig[i]):
                rows.append(
                    (f"dmig_a{i + 1}", report.per_attribute[i].dmig, truth.ideal_dmig[i])
                )

    print(f"oracle check: {family} (tolerance {args.tol})")
    print(f"{'quantity':<10}{'estimate':>14}{'truth':>14}{'abs error':>12}  verdict")
    failures = 0
    for label, est, tru in rows:
        err = abs(est - tru)
        ok = err <= args.tol
        failures += 0 if ok else 1
        print(
            f"{label:<10}{est:>14.6f}{tru:>14.6f}{err:>12.6f}  "
            f"{'PASS' if ok else 'FAIL'}"
        )
    if failures:
        print(f"{failures} of {len(rows)} checks failed")
        return 1
    print(f"all {len(rows)} checks passed")
    return 0


def _range_arg(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected 'lo:hi', got {text!r}"
        ) from None
    return (lo, hi)


def cmd_plot(args: argparse.Namespace) -> int:
    series = read_series(args.series)
    out = (
        Path(args.out)
        if args.out
        else Path(args.series).with_name(
            f"{Path(args.series).stem}_{args.x}_{args.y}.svg"
        )
    )
    spec = PlotSpec(
        x_metric=args.x,
        y_metric=args.y,
        out_path=str(out),
        x_range=args.x_range,
        y_range=args.y_range,
    )
    svg = render_series_scatter(series, spec)
    out.write_text(svg, encoding="utf-8", newline="\n")
    print(f"plot written to {out}")
    return 0


def _add_estimator_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=3, help="kNN neighbor count (default 3)")
    p.add_argument(
        "--jitter",
        type=float,
        default=1e-10,
        help="tie-breaking noise amplitude relative to column std (default 1e-10)",
    )
    p.add_argument("--seed", type=int, default=0, help="estimator seed (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dmig",
        description=(
            "Dependency-aware disentanglement metrics: evaluate MIG/DMIG/SCC "
            "over latent-representation datasets."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser(
        "eval",
        help="evaluate dataset file(s) and write a report or epoch series",
        description=(
            "Evaluate one dataset into a report, or several (in epoch order) "
            "into a series file."
        ),
    )
    p_eval.add_argument("dataset", nargs="+", help="dataset CSV path(s)")
    _add_estimator_flags(p_eval)
    p_eval.add_argument("--out", default=None, help="output report/series path")
    p_eval.add_argument(
        "--workers", type=int, default=1, help="threads for the MI grid (default 1)"
    )
    p_eval.set_defaults(func=cmd_eval)

    p_synth = sub.add_parser(
        "synth",
        help="generate a synthetic dataset with a ground-truth sidecar",
        description="Generate synthetic datasets with closed-form ground truth.",
    )
    p_synth.add_argument(
        "--family",
        required=True,
        choices=["gaussian_pair", "discrete_joint", "trajectory"],
    )
    p_synth.add_argument("--n", type=int, default=20000, help="sample count")
    p_synth.add_argument("--seed", type=int, default=0, help="generator seed")
    p_synth.add_argument(
        "--rho", type=float, default=0.8, help="attribute correlation, |rho| < 1"
    )
    p_synth.add_argument(
        "--pmf",
        default="0.4,0.1;0.1,0.4",
        help="discrete_joint table, rows ';'-separated, cells ','-separated",
    )
    p_synth.add_argument(
        "--epochs", type=int, default=30, help="trajectory epoch count"
    )
    p_synth.add_argument(
        "--noise-start", type=float, default=10.0, help="trajectory initial sigma"
    )
    p_synth.add_argument(
        "--noise-end", type=float, default=0.01, help="trajectory final sigma"
    )
    p_synth.add_argument(
        "--d-total", type=int, default=2, help="total latent dimensions (>= 2)"
    )
    p_synth.add_argument("--out-dir", default=".", help="output directory")
    p_synth.set_defaults(func=cmd_synth)

    p_oracle = sub.add_parser(
        "oracle",
        help="compare estimates against a ground-truth sidecar",
        description=(
            "Estimate entropies/MI on a synthetic dataset and compare with its "
            "<stem>.truth sidecar at the given tolerance."
        ),
    )
    p_oracle.add_argument("dataset", help="dataset CSV path (with <stem>.truth)")
    _add_estimator_flags(p_oracle)
    p_oracle.add_argument(
        "--tol", type=float, default=0.03, help="absolute tolerance (default 0.03)"
    )
    p_oracle.set_defaults(func=cmd_oracle)

    p_plot = sub.add_parser(
        "plot",
        help="render an SVG scatter of one metric against another",
        description="Scatter a metric pair across the epochs of a series file.",
    )
    p_plot.add_argument("series", help="series file path")
    p_plot.add_argument("--x", required=True, choices=list(METRICS))
    p_plot.add_argument("--y", required=True, choices=list(METRICS))
    p_plot.add_argument("--out", default=None, help="output SVG path")
    p_plot.add_argument(
        "--x-range", type=_range_arg, default=None, help="fixed x axis as 'lo:hi'"
    )
    p_plot.add_argument(
        "--y-range", type=_range_arg, default=None, help="fixed y axis as 'lo:hi'"
    )
    p_plot.set_defaults(func=cmd_plot)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return 2
    except (FileFormatError, SpecValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DmigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
