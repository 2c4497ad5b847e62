"""Command-line interface: ``condper <subcommand> [flags]``.

Exit status is 0 on success, 1 for invalid input (bad flags, unreadable or
malformed files) and 2 when the computation itself fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings

from . import experiments
from .errors import ComputationError, ValidationError
from .pipeline import PipelineConfig, conditional_score, periodicity_score
from .rqa import det_matrix, percent_determinism, write_matrix_text
from .signals import FAMILIES, generate, parse_generator, read_csv


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_range(text: str) -> list[int]:
    """``a..b`` (inclusive), ``a,b,c`` or a single integer."""
    try:
        if ".." in text:
            lo, hi = (int(p) for p in text.split("..", 1))
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a..b or a comma list of integers, got {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma list of numbers, got {text!r}")


def _str_list(text: str) -> list[str]:
    return [p.strip() for p in text.split(",") if p.strip()]


def _add_inputs(p, count: int) -> None:
    for k in range(1, count + 1):
        p.add_argument(f"--gen{k}", metavar="SPEC", help="family:cycles[:amplitude[:damping]]")
        p.add_argument(f"--input{k}", metavar="CSV", help="t,value or value-only CSV file")
    p.add_argument("--noise", type=float, default=0.0, help="noise std as a fraction of amplitude")
    p.add_argument("--points", type=int, default=300)
    p.add_argument("--seed", type=int, default=0)


def _add_pipeline(p, dim_default=None, eps_required=True) -> None:
    g = p.add_mutually_exclusive_group(required=eps_required)
    g.add_argument("--epsilon", type=float)
    g.add_argument("--dim", type=int, default=dim_default, help="embedding dimension M")
    p.add_argument("--pcs", type=int, default=2, help="principal components K")
    p.add_argument("--embed-points", type=int, help="points N in the embedding")
    p.add_argument("--sma", type=int, help="odd SMA window (default from the cycle rule)")
    p.add_argument("--no-mean-shift", action="store_true")
    p.add_argument("--angle", type=float, default=math.pi / 16, help="mean-shift angle (radians)")


def _add_output(p, default_format: str) -> None:
    p.add_argument("--format", choices=("csv", "json"), default=default_format)
    p.add_argument("--output", metavar="PATH", help="write here instead of stdout")


def _add_sweep_common(p) -> None:
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, help="worker processes (default: available CPUs)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="condper", description="Conditional periodicity scores and %%DET.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")

    p = sub.add_parser("score", help="conditional score of a pair")
    _add_inputs(p, 2)
    _add_pipeline(p)
    _add_output(p, "json")

    p = sub.add_parser("selfscore", help="periodicity score of one series")
    _add_inputs(p, 1)
    _add_pipeline(p)
    _add_output(p, "json")

    p = sub.add_parser("det", help="%%DET of a pair")
    _add_inputs(p, 2)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--tau", type=int, required=True, help="index lag")
    p.add_argument("--tol", type=float, required=True)
    p.add_argument("--mindl", type=int, default=2)
    p.add_argument("--pcs", type=int, default=2)
    p.add_argument("--sma", type=int)
    p.add_argument("--matrix", metavar="PATH", help="also write the 0/1 recurrence matrix")
    _add_output(p, "json")

    p = sub.add_parser("sweep-periodicity", help="mean score against w2")
    p.add_argument("--w1", type=int, default=2)
    p.add_argument("--w2", type=_int_range, default=_int_range("2..20"))
    p.add_argument("--family", default="cosine")
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--points", type=int, default=200)
    _add_pipeline(p, dim_default=16, eps_required=False)
    _add_sweep_common(p)
    _add_output(p, "csv")

    p = sub.add_parser("sweep-noise", help="score across families, damping and noise")
    p.add_argument("--w1", type=int, default=3)
    p.add_argument("--w2", type=int, default=7)
    p.add_argument("--families", type=_str_list, default=list(FAMILIES))
    p.add_argument("--noise-levels", type=_float_list, default=[0.0, 0.05, 0.25, 0.5, 0.75])
    p.add_argument("--damping-levels", type=_float_list, default=[0.05, 0.4, 0.8])
    p.add_argument("--points", type=int, default=300)
    _add_pipeline(p, dim_default=16, eps_required=False)
    _add_sweep_common(p)
    _add_output(p, "csv")

    p = sub.add_parser("sweep-dimension", help="score of one pair against M")
    p.add_argument("--w1", type=int, default=3)
    p.add_argument("--w2", type=int, default=7)
    p.add_argument("--family", default="cosine")
    p.add_argument("--dim", type=_int_range, default=_int_range("2..60"))
    p.add_argument("--epsilons", type=_float_list, default=[0.1, 0.05, 0.02])
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--points", type=int, default=300)
    p.add_argument("--embed-points", type=int, help="default: --points")
    p.add_argument("--pcs", type=int, default=2)
    p.add_argument("--sma", type=int, default=9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int)
    _add_output(p, "csv")

    p = sub.add_parser("compare-det", help="score against %%DET over w2, M and tau")
    p.add_argument("--w1", type=int, default=2)
    p.add_argument("--w2", type=_int_range, default=_int_range("2..20"))
    p.add_argument("--dims", type=_int_range, default=[16, 17, 18])
    p.add_argument("--taus", type=_int_range, default=[2, 3, 4])
    p.add_argument("--tol", type=float, default=0.9)
    p.add_argument("--mindl", type=int, default=15)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--pcs", type=int, default=2)
    p.add_argument("--sma", type=int, help="SMA window for the score (default from the cycle rule)")
    p.add_argument("--det-sma", type=int, default=11, help="SMA window for %%DET (0 disables)")
    _add_sweep_common(p)
    _add_output(p, "csv")
    return parser


def _series(args, k: int, stream: int):
    gen = getattr(args, f"gen{k}")
    path = getattr(args, f"input{k}")
    if gen is not None and path is not None:
        raise ValidationError(f"--gen{k} and --input{k} are mutually exclusive")
    if path is not None:
        try:
            return read_csv(path)
        except OSError as exc:
            raise ValidationError(f"cannot read {path}: {exc.strerror or exc}") from None
    if gen is None:
        raise ValidationError(f"one of --gen{k} or --input{k} is required")
    seed = experiments.trial_seed(args.seed, stream)
    return generate(parse_generator(gen, args.points, args.noise, seed))


def _pipeline_config(args) -> PipelineConfig:
    return PipelineConfig(
        M=args.dim if args.epsilon is None else None,
        epsilon=args.epsilon,
        N=args.embed_points,
        K=args.pcs,
        sma_window=args.sma,
        mean_shift=not args.no_mean_shift,
        angle_threshold=args.angle,
        seed=args.seed,
    )


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _round(x):
    if isinstance(x, float):
        return float(f"{x:.12g}") if math.isfinite(x) else None
    if isinstance(x, dict):
        return {k: _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    return x


def _csv_text(rows: list[dict], header: list[str] | None = None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = header or list(rows[0])
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(row[h]) for h in header])
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(_round(obj), indent=2) + "\n"


def _cmd_score(args) -> str:
    config = _pipeline_config(args)
    if args.command == "selfscore":
        report = periodicity_score(_series(args, 1, 0), config)
    else:
        report = conditional_score(_series(args, 1, 0), _series(args, 2, 1), config)
    data = report.to_dict()
    if args.format == "json":
        return json.dumps(data, indent=2) + "\n"
    scalars = {k: v for k, v in data.items() if k != "diagram"}
    return _csv_text([scalars])


def _cmd_det(args) -> str:
    a, b = _series(args, 1, 0), _series(args, 2, 1)
    matrix = det_matrix(a, b, args.dim, args.tau, args.tol, args.pcs, args.sma)
    result = percent_determinism(matrix, args.mindl)
    if args.matrix:
        with open(args.matrix, "w", encoding="utf-8", newline="\n") as fh:
            write_matrix_text(matrix, fh)
    data = {
        "percent_det": result.percent_det,
        "recurrence_count": result.recurrence_count,
        "empty": result.empty,
        "min_dl": result.min_dl,
        "n1": matrix.n1,
        "n2": matrix.n2,
        "diagonal_histogram": [[k, v] for k, v in result.diagonal_histogram.items()],
    }
    if args.format == "json":
        return _json_text(data)
    scalars = ("percent_det", "recurrence_count", "min_dl", "n1", "n2")
    return _csv_text([{k: data[k] for k in scalars}])


def _sweep_kwargs(args) -> dict:
    return dict(samples=args.samples, seed=args.seed, jobs=args.jobs)


def _cmd_sweep_periodicity(args) -> str:
    rows = experiments.sweep_periodicity(
        args.w1, args.w2, M=None if args.epsilon is not None else args.dim, epsilon=args.epsilon,
        noise=args.noise, points=args.points, family=args.family, K=args.pcs,
        sma_window=args.sma, **_sweep_kwargs(args),
    )
    return _rows_out(args, rows)


def _cmd_sweep_noise(args) -> str:
    rows = experiments.sweep_noise(
        args.families, args.noise_levels, args.damping_levels, w1=args.w1, w2=args.w2,
        M=None if args.epsilon is not None else args.dim, epsilon=args.epsilon,
        points=args.points, K=args.pcs, sma_window=args.sma, **_sweep_kwargs(args),
    )
    return _rows_out(args, rows)


def _cmd_sweep_dimension(args) -> str:
    result = experiments.sweep_dimension(
        args.dim, seed=args.seed, w1=args.w1, w2=args.w2, epsilons=args.epsilons,
        noise=args.noise, points=args.points, N=args.embed_points, family=args.family,
        K=args.pcs, sma_window=args.sma, jobs=args.jobs,
    )
    if args.format == "json":
        return _json_text(result)
    rows = [dict(kind="score", M=r["M"], value=math.nan if r["score"] is None else r["score"])
            for r in result["scores"]]
    rows += [dict(kind="min_dim", M=r["M"], value=r["epsilon"]) for r in result["markers"]]
    return _csv_text(rows)


def _cmd_compare_det(args) -> str:
    rows = experiments.compare_det(
        args.w1, args.w2, dims=args.dims, taus=args.taus, tol=args.tol, min_dl=args.mindl,
        noise=args.noise, points=args.points, K=args.pcs, sma_window=args.sma,
        det_sma_window=args.det_sma or None, **_sweep_kwargs(args),
    )
    return _rows_out(args, rows)


def _rows_out(args, rows: list[dict]) -> str:
    if args.format == "json":
        return _json_text(rows)
    return _csv_text(rows)


_COMMANDS = {
    "score": _cmd_score,
    "selfscore": _cmd_score,
    "det": _cmd_det,
    "sweep-periodicity": _cmd_sweep_periodicity,
    "sweep-noise": _cmd_sweep_noise,
    "sweep-dimension": _cmd_sweep_dimension,
    "compare-det": _cmd_compare_det,
}


def _one_line(message) -> str:
    return " ".join(str(message).split())


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"condper: error: {_one_line(exc)}", file=sys.stderr)
        return 1
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            text = _COMMANDS[args.command](args)
        for w in caught:
            print(f"condper: warning: {_one_line(w.message)}", file=sys.stderr)
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except (ValidationError, OSError) as exc:
        print(f"condper: error: {_one_line(exc)}", file=sys.stderr)
        return 1
    except ComputationError as exc:
        print(f"condper: computation failed: {_one_line(exc)}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
