"""Command-line interface.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric failure.
"""
from __future__ import annotations

import argparse
import sys
from typing import List, Optional

import numpy as np

from . import __version__
from ._rng import DEFAULT_SEED
from .bandwidth import CvConfig, column_scale, reference_bandwidths, select_cv
from .data import Bandwidths, DataError
from .estimator import fit
from .io import DatasetSchema, load_model, parse_dataset, parse_grid, save_model, write_grid_csv
from .kernels import KERNEL_FAMILIES, KernelSpec
from .noise import NoiseSpec, validate_noise_class
from .simharness import ESTIMATORS, RateConfig, ScenarioConfig, rate_experiment, run_scenario, write_risk_csv
from .theory import DiscretePmf, are, bias_corollary1, bias_lemma2, bias_oracle_quadrature

EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _csv_floats(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _csv_ints(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _ladder(text: str):
    """``start:factor:stop`` geometric ladder, or a comma list."""
    if ":" not in text:
        return tuple(_csv_ints(text))
    try:
        start, factor, stop = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:factor:stop, got {text!r}") from None
    if start < 1 or factor <= 1 or stop < start:
        raise argparse.ArgumentTypeError(f"bad ladder {text!r}")
    out, v = [], start
    while v <= stop * (1 + 1e-12):
        out.append(int(round(v)))
        v *= factor
    return tuple(out)


def _add_kernel(p):
    p.add_argument("--kernel", choices=KERNEL_FAMILIES, default="epanechnikov")


def _add_noise(p):
    p.add_argument("--noise", choices=("uniform", "trapezoid"), default="uniform")
    p.add_argument("--gamma1", type=float)
    p.add_argument("--gamma2", type=float)


def _noise(args, checked: bool = True) -> NoiseSpec:
    if args.noise == "uniform":
        g1 = 0.5 if args.gamma1 is None else args.gamma1
        g2 = 0.5 if args.gamma2 is None else args.gamma2
    else:
        g1 = 0.375 if args.gamma1 is None else args.gamma1
        g2 = 0.625 if args.gamma2 is None else args.gamma2
    if not checked:
        return NoiseSpec.unchecked(args.noise, g1, g2)
    try:
        return NoiseSpec(args.noise, g1, g2)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _seed(args) -> int:
    if args.seed is None:
        print(f"no --seed given; using {DEFAULT_SEED}", file=sys.stderr)
        return DEFAULT_SEED
    return args.seed


def _out(args):
    return sys.stdout if args.out in (None, "-") else open(args.out, "w", newline="")


def cmd_fit(args) -> int:
    schema = DatasetSchema(tuple(c for c in args.discrete.split(",") if c) if args.discrete else (),
                           tuple(c for c in args.continuous.split(",") if c) if args.continuous else None)
    data = parse_dataset(args.data, schema)
    kernel, noise, seed = KernelSpec(args.kernel), _noise(args), _seed(args)
    if args.bandwidth is not None:
        if args.cv:
            raise UsageError("--cv and --bandwidth are mutually exclusive")
        bw = Bandwidths.from_vector(args.bandwidth, data.p)
        bw.check_dims(data.p, data.q)
    elif args.cv:
        bw = select_cv(data, kernel, noise, CvConfig(grid_size=args.cv_grid, floor=args.cv_floor, seed=seed))
    else:
        bw = reference_bandwidths(data.n, data.p, data.q, kernel.order, noise, column_scale(data.x))
    model = fit(data, kernel, noise, bw, seed)
    save_model(model, args.out, dataset_path=args.data, embed_data=args.embed_data)
    print(f"fitted n={data.n} p={data.p} q={data.q} h={bw.h.tolist()} b={bw.b.tolist()} -> {args.out}",
          file=sys.stderr)
    return 0


def cmd_eval(args) -> int:
    model = load_model(args.model)
    grid = parse_grid(args.grid, model.dataset.z_names, model.dataset.x_names)
    fh = _out(args)
    try:
        write_grid_csv(fh, model, grid)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def cmd_simulate(args) -> int:
    seed = _seed(args)
    scenarios = args.scenario or ["p=1,q=1,m=1", "p=1,q=1,m=15"]
    estimators = tuple(e for e in args.estimators.split(",") if e)
    tables = []
    for text in scenarios:
        try:
            cfg = ScenarioConfig.parse(text, n_list=tuple(args.n), n_sim=args.nsim, estimators=estimators,
                                       kernel=args.kernel, cv_grid=args.cv_grid, seed=seed)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        table = run_scenario(cfg, threads=args.threads)
        tables.append(table)
        for n in cfg.n_list:
            meds = "  ".join(f"{e}={table.median(e, n):.5f}" for e in cfg.estimators)
            print(f"{cfg.label} n={n} median RASE: {meds}")
    if args.out:
        write_risk_csv(tables, args.out)
    return 0


def cmd_rates(args) -> int:
    try:
        cfg = RateConfig(p=args.p, q=args.q, ell=args.ell, m=args.m, ladder=args.ladder, reps=args.reps,
                         error_mode=args.mode, kernel=args.kernel, noise=args.noise, b_scale=args.b_scale,
                         seed=_seed(args))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    res = rate_experiment(cfg)
    summary = f"# slope={res.slope:.6f} stderr={res.stderr:.6f} target={res.target:.6f}"
    fh = _out(args)
    try:
        fh.write("n,rmse\n")
        for n, e in res.rows():
            fh.write(f"{n},{e!r}\n")
        fh.write(summary + "\n")
    finally:
        if fh is not sys.stdout:
            fh.close()
    if args.out not in (None, "-"):
        print(summary)
    return 0


def cmd_bias(args) -> int:
    try:
        pmf = DiscretePmf(args.zmin, args.pmf)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.h <= 0:
        raise UsageError("--h must be positive")
    kernel, noise = KernelSpec(args.kernel), _noise(args)
    if noise.shape == "uniform":
        print(f"corollary1 {bias_corollary1(pmf, args.z, args.h, kernel):.12g}")
    else:
        print("corollary1 n/a (requires uniform noise)")
    print(f"lemma2     {bias_lemma2(pmf, args.z, args.h, kernel, noise):.12g}")
    print(f"oracle     {bias_oracle_quadrature(pmf, args.z, args.h, kernel, noise):.12g}")
    return 0


def cmd_are(args) -> int:
    if not 0.0 <= args.f <= 1.0:
        raise UsageError("--f must lie in [0, 1]")
    print(f"{are(args.f, _noise(args), KernelSpec(args.kernel)):.6f}")
    return 0


def cmd_validate_noise(args) -> int:
    print(validate_noise_class(_noise(args, checked=False)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="jitterkde", description="Jittering kernel density estimation for mixed data.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("fit", help="fit a model to a CSV file and save it as JSON")
    p.add_argument("data")
    p.add_argument("--discrete", default="", help="comma-separated integer columns")
    p.add_argument("--continuous", help="comma-separated continuous columns (default: all others)")
    _add_kernel(p)
    _add_noise(p)
    p.add_argument("--cv", action="store_true", help="select bandwidths by likelihood cross-validation")
    p.add_argument("--bandwidth", type=_csv_floats, help="fixed bandwidths, discrete columns first")
    p.add_argument("--cv-grid", type=int, default=15)
    p.add_argument("--cv-floor", type=float, default=1e-10)
    p.add_argument("--seed", type=int)
    p.add_argument("--embed-data", action="store_true", help="store the data inside the model file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("eval", help="evaluate a saved model on a grid")
    p.add_argument("model")
    p.add_argument("--grid", required=True, help='e.g. "z1=0:15;x1=-2:0.4:2"')
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("simulate", help="RASE comparison on simulated mixed data")
    p.add_argument("--scenario", action="append", help='e.g. "p=1,q=1,m=15" (repeatable)')
    p.add_argument("--n", type=_csv_ints, default=[50, 200])
    p.add_argument("--nsim", type=int, default=200)
    p.add_argument("--estimators", default="jkde,jkde2,liracine", help=f"subset of {','.join(ESTIMATORS)}")
    _add_kernel(p)
    p.add_argument("--cv-grid", type=int, default=15)
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("rates", help="empirical convergence rate at a point")
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--ladder", type=_ladder, default=(250, 500, 1000, 2000, 4000, 8000, 16000))
    p.add_argument("--reps", type=int, default=400)
    p.add_argument("--mode", choices=("pointwise", "sup"), default="pointwise")
    _add_kernel(p)
    p.add_argument("--noise", choices=("uniform", "trapezoid"), default="uniform")
    p.add_argument("--b-scale", type=float, default=1.0)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("bias", help="exact finite-sample bias for a univariate pmf")
    p.add_argument("--pmf", type=_csv_floats, required=True)
    p.add_argument("--zmin", type=int, default=0)
    p.add_argument("--z", type=int, required=True)
    p.add_argument("--h", type=float, required=True)
    _add_kernel(p)
    _add_noise(p)
    p.set_defaults(func=cmd_bias)

    p = sub.add_parser("are", help="asymptotic efficiency relative to the sample frequency")
    p.add_argument("--f", type=float, required=True)
    _add_kernel(p)
    _add_noise(p)
    p.set_defaults(func=cmd_are)

    p = sub.add_parser("validate-noise", help="check a noise density against the admissible class")
    _add_noise(p)
    p.set_defaults(func=cmd_validate_noise)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("missing subcommand (fit, eval, simulate, rates, bias, are, validate-noise)")
        return args.func(args)
    except UsageError as exc:
        print(f"jitterkde: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"jitterkde: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (FloatingPointError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"jitterkde: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"jitterkde: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
