"""Command-line harness: score computation, sampling, benchmarks, verification.

Matrix files are headerless CSV, one row per line, full-precision decimals.
Reports are CSV (config in '#' comment lines) or JSON (schema "1"); identical
config and seed reproduce byte-identical reports.

Exit codes: 0 success, 1 usage error, 2 validation error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from math import ceil

import numpy as np

from . import __version__
from .dpp import (
    derived_rng,
    pmf_kdpp,
    pmf_lensemble,
    sample_kdpp_many,
    sample_lensemble_many,
    sample_projection_dpp,
)
from .errors import ValidationError
from .estimators import iid_sketch_solve, loss
from .fastsamplers import default_step_budget, sample_kdpp_mcmc, sample_projection_dpp_intermediate
from .linalg import lstsq, numerical_rank, truncated_svd_error
from .lowrank import nystrom, nystrom_error_nuclear, reconstruction_error, subset_size_for
from .scores import (
    coherence,
    effective_dimension,
    leverage_approx,
    leverage_exact,
    ridge_leverage_exact,
    sampling_distribution,
)
from .synthetic import gaussian_problem, random_psd
from .verify import SUITES, run_checks

USAGE_EXIT, VALIDATION_EXIT, VERIFY_EXIT = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def read_matrix(path: str) -> np.ndarray:
    """Parse a headerless CSV matrix, reporting the offending line on failure."""
    rows = []
    width = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            try:
                row = [float(f) for f in fields]
            except ValueError as exc:
                raise ValidationError(f"{path}:{lineno}: cannot parse row: {exc}") from None
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise ValidationError(
                    f"{path}:{lineno}: expected {width} columns, found {len(row)}"
                )
            rows.append(row)
    if not rows:
        raise ValidationError(f"{path}: empty matrix file")
    return np.array(rows)


def write_matrix(path: str, a: np.ndarray):
    with open(path, "w") as fh:
        for row in np.atleast_2d(a):
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


def write_report(out, fmt: str, command: str, config: dict, rows: list[dict], summary: dict | None = None):
    """Emit a deterministic report to a path or stream."""
    payload = {
        "schema": "1",
        "version": __version__,
        "command": command,
        "config": {k: (v if not isinstance(v, np.generic) else v.item()) for k, v in config.items()},
        "summary": summary or {},
        "rows": rows,
    }
    if fmt == "json":
        text = json.dumps(payload, sort_keys=True, indent=2, default=_fmt) + "\n"
    else:
        lines = [f"# schema=1", f"# version={__version__}", f"# command={command}"]
        for k in sorted(config):
            lines.append(f"# {k}={_fmt(config[k])}")
        for k in sorted(summary or {}):
            lines.append(f"# {k}={_fmt(summary[k])}")
        if rows:
            header = list(rows[0].keys())
            lines.append(",".join(header))
            for row in rows:
                lines.append(",".join(_fmt(row[h]) for h in header))
        text = "\n".join(lines) + "\n"
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _resolved_config(args, keys) -> dict:
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def _load_data(args) -> np.ndarray:
    if args.input:
        return read_matrix(args.input)
    if args.n and args.d:
        x, _, _ = gaussian_problem(args.n, args.d, 0.0, args.seed, args.planted_scale)
        return x
    raise UsageError("provide --input FILE or both --n and --d")


def _load_kernel(args) -> np.ndarray:
    if args.kernel:
        return read_matrix(args.kernel)
    if args.input:
        x = read_matrix(args.input)
        return x @ x.T
    if args.n:
        return random_psd(args.n, args.seed, rank=args.d or None)
    raise UsageError("provide --kernel FILE, --input FILE, or --n")


def cmd_scores(args) -> int:
    x = _load_data(args)
    lam = args.lam
    lev = leverage_exact(x)
    ridge = ridge_leverage_exact(x, lam)
    approx = leverage_approx(x, args.seed) if x.shape[0] >= x.shape[1] else np.full(len(lev), np.nan)
    rows = [
        {
            "index": i,
            "leverage": lev[i],
            "leverage_approx": approx[i],
            "ridge_leverage": ridge[i],
        }
        for i in range(len(lev))
    ]
    summary = {
        "coherence": coherence(x),
        "effective_dimension": effective_dimension(x, lam),
        "rank": numerical_rank(x),
    }
    config = _resolved_config(args, ("input", "n", "d", "seed", "lam", "planted_scale"))
    write_report(args.out, args.format, "scores", config, rows, summary)
    return 0


def cmd_sample(args) -> int:
    method = args.method
    rows: list[dict] = []
    if method in ("projection", "intermediate"):
        x = _load_data(args)
        q, _ = np.linalg.qr(x)
        u = q[:, : numerical_rank(x)]
        kernel = x @ x.T
        k = u.shape[1]
    else:
        kernel = _load_kernel(args)
        k = args.k
    if args.pmf:
        if method == "dpp":
            table = pmf_lensemble(kernel)
        else:
            if k is None:
                raise UsageError(f"method {method} needs --k for --pmf")
            table = pmf_kdpp(kernel, k)
        rows = [
            {"subset": " ".join(map(str, s)), "probability": p}
            for s, p in sorted(table.probs.items())
        ]
    else:
        if method == "dpp":
            samples = sample_lensemble_many(kernel, args.reps, args.seed)
        elif method == "kdpp":
            if k is None:
                raise UsageError("method kdpp needs --k")
            samples = sample_kdpp_many(kernel, k, args.reps, args.seed)
        elif method == "projection":
            samples = [sample_projection_dpp(u, derived_rng(args.seed, i)) for i in range(args.reps)]
        elif method == "intermediate":
            samples = [
                sample_projection_dpp_intermediate(u, derived_rng(args.seed, i))
                for i in range(args.reps)
            ]
        elif method == "mcmc":
            if k is None:
                raise UsageError("method mcmc needs --k")
            steps = args.steps or default_step_budget(kernel.shape[0], k, args.eps or 0.05)
            samples = [
                sample_kdpp_mcmc(kernel, k, steps, derived_rng(args.seed, i))
                for i in range(args.reps)
            ]
        else:
            raise UsageError(f"unknown method {method!r}")
        rows = [
            {"rep": i, "seed": args.seed, "subset": " ".join(map(str, s))}
            for i, s in enumerate(samples)
        ]
    config = _resolved_config(
        args, ("input", "kernel", "n", "d", "seed", "method", "k", "reps", "steps", "eps")
    )
    write_report(args.out, args.format, "sample", config, rows)
    return 0


def cmd_lsq_bench(args) -> int:
    if args.input:
        x = read_matrix(args.input)
        y = read_matrix(args.y).ravel() if args.y else None
        if y is None:
            raise UsageError("--input for lsq-bench also needs --y")
        w_true = None
    else:
        if not (args.n and args.d):
            raise UsageError("provide --input/--y or --n and --d")
        x, y, noise = gaussian_problem(args.n, args.d, args.sigma, args.seed, args.planted_scale)
        w_true = noise.w_true
    n, d = x.shape
    w_star = lstsq(x, y)
    base = loss(x, y, w_star)
    base_is_zero = base <= 1e-12 * (1.0 + float(y @ y))
    k_values = args.k_list or [d * (int(ceil(np.log(max(d, 2)))) + 2)]
    all_methods = ("uniform", "squared_norm", "leverage", "projection_dpp")
    selected = set(args.methods) if args.methods else set(all_methods)
    if not selected <= set(all_methods):
        raise UsageError(f"unknown lsq-bench methods: {sorted(selected - set(all_methods))}")
    rows = []
    for mi, method in enumerate(all_methods):
        if method not in selected:
            continue
        iid = method != "projection_dpp"
        dist = sampling_distribution(x, method) if iid else None
        for k in k_values if iid else [d]:
            sols = np.empty((args.reps, d))
            if iid:
                for rep in range(args.reps):
                    rng = np.random.default_rng([args.seed, mi, k, rep])
                    sols[rep] = iid_sketch_solve(x, y, dist, k, rng)
            else:
                subsets = sample_kdpp_many(x @ x.T, d, args.reps, args.seed)
                for rep, s in enumerate(subsets):
                    sols[rep] = np.linalg.solve(x[s], y[s])
            losses = np.array([loss(x, y, w) for w in sols])
            mean_sol = sols.mean(axis=0)
            row = {
                "method": method,
                "k": k,
                "mean_loss_ratio": 1.0 if base_is_zero else float(np.mean(losses) / base),
                "bias_norm": float(np.linalg.norm(mean_sol - w_star)),
                "bias_stderr": float(np.linalg.norm(sols.std(axis=0) / np.sqrt(args.reps))),
            }
            if w_true is not None:
                row["mse"] = float(np.mean(np.sum((sols - w_true) ** 2, axis=1)))
            rows.append(row)
    config = _resolved_config(
        args, ("input", "y", "n", "d", "sigma", "seed", "reps", "planted_scale", "k")
    )
    write_report(args.out, args.format, "lsq-bench", config, rows)
    return 0


def cmd_lowrank_bench(args) -> int:
    kernel_mode = bool(args.kernel)
    if kernel_mode:
        l = read_matrix(args.kernel)
        n = l.shape[0]
    else:
        x = _load_data(args)
        l = x @ x.T
        n = x.shape[0]
    r = args.r
    if r is None:
        raise UsageError("lowrank-bench needs --r")
    eps = args.eps or 1.0
    k_values = args.k_list or [subset_size_for(r, eps)]
    if kernel_mode:
        baseline = truncated_svd_error(l, r, "nuclear")
        def subset_error(s):
            return nystrom_error_nuclear(l, nystrom(l, s))
        ridge_scores = np.clip(np.diag(l @ np.linalg.inv(l + np.eye(n))), 1e-12, None)
    else:
        baseline = truncated_svd_error(x, r, "fro2")
        def subset_error(s):
            return reconstruction_error(x, s)
        ridge_scores = np.clip(ridge_leverage_exact(x, 1.0), 1e-12, None)
    ridge_dist = ridge_scores / ridge_scores.sum()
    rows = []
    for mi, method in enumerate(("uniform", "ridge_leverage", "kdpp")):
        for k in k_values:
            errs = []
            for rep in range(args.reps):
                rng = np.random.default_rng([args.seed, mi, k, rep])
                if method == "uniform":
                    s = np.sort(rng.choice(n, size=min(k, n), replace=False))
                elif method == "ridge_leverage":
                    s = np.sort(rng.choice(n, size=min(k, n), replace=False, p=ridge_dist))
                else:
                    s = sample_kdpp_many(l, min(k, numerical_rank(l)), 1, int(rng.integers(2**31)))[0]
                errs.append(subset_error(s))
            rows.append(
                {
                    "method": method,
                    "k": k,
                    "mean_error": float(np.mean(errs)),
                    "baseline": baseline,
                    "ratio": float(np.mean(errs) / baseline) if baseline > 0 else 1.0,
                }
            )
    config = _resolved_config(
        args, ("input", "kernel", "n", "d", "seed", "r", "eps", "reps", "k")
    )
    write_report(args.out, args.format, "lowrank-bench", config, rows)
    return 0


def cmd_verify(args) -> int:
    kernel = read_matrix(args.kernel) if args.kernel else None
    results = run_checks(args.suite, kernel)
    rows = [
        {
            "check": r.name,
            "suite": r.suite,
            "status": "PASS" if r.passed else "FAIL",
            "detail": r.detail,
        }
        for r in results
    ]
    failures = [r for r in results if not r.passed]
    for row in rows:
        print(f"[{row['status']}] {row['check']}: {row['detail']}")
    if args.out:
        summary = {"checks": len(results), "failures": len(failures)}
        config = _resolved_config(args, ("suite", "kernel", "seed"))
        write_report(args.out, args.format, "verify", config, rows, summary)
    return VERIFY_EXIT if failures else 0


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dppnla", description=__doc__)
    sub = parser.add_subparsers(dest="cmd", required=True)

    def common(p, kernel=False):
        p.add_argument("--input", help="data matrix CSV (rows are points)")
        if kernel:
            p.add_argument("--kernel", help="PSD kernel matrix CSV")
        p.add_argument("--n", type=int, help="synthetic: number of rows")
        p.add_argument("--d", type=int, help="synthetic: number of columns")
        p.add_argument("--seed", type=int, default=0, help="base RNG seed (default 0)")
        p.add_argument("--planted-scale", dest="planted_scale", type=float,
                       help="synthetic: scale factor of the first row (coherence planting)")
        p.add_argument("--out", help="report path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("scores", help="exact and approximate row scores")
    common(p)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0, help="ridge parameter")
    p.set_defaults(fn=cmd_scores)

    p = sub.add_parser("sample", help="draw DPP subsets or emit enumeration pmfs")
    common(p, kernel=True)
    p.add_argument("--method", choices=("dpp", "kdpp", "projection", "intermediate", "mcmc"),
                   default="dpp")
    p.add_argument("--k", type=int, help="subset size for kdpp/mcmc")
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--steps", type=int, help="mcmc transitions (default: step budget)")
    p.add_argument("--eps", type=float, help="mcmc accuracy for the default budget")
    p.add_argument("--pmf", action="store_true", help="emit the exact pmf table instead")
    p.set_defaults(fn=cmd_sample)

    p = sub.add_parser("lsq-bench", help="sketched least-squares benchmark")
    common(p)
    p.add_argument("--y", help="target vector CSV (with --input)")
    p.add_argument("--sigma", type=float, default=0.1, help="synthetic noise level")
    p.add_argument("--k", dest="k_list", type=_int_list, help="i.i.d. sample sizes, comma-separated")
    p.add_argument("--methods", type=lambda s: [v for v in s.split(",") if v],
                   help="restrict to a comma-separated method subset")
    p.add_argument("--reps", type=int, default=200)
    p.set_defaults(fn=cmd_lsq_bench)

    p = sub.add_parser("lowrank-bench", help="subset-selection / Nystrom benchmark")
    common(p, kernel=True)
    p.add_argument("--r", type=int, help="target rank")
    p.add_argument("--eps", type=float, help="accuracy parameter (sets default k)")
    p.add_argument("--k", dest="k_list", type=_int_list, help="subset sizes, comma-separated")
    p.add_argument("--reps", type=int, default=50)
    p.set_defaults(fn=cmd_lowrank_bench)

    p = sub.add_parser("verify", help="run the oracle verification suites")
    p.add_argument("--suite", choices=("all",) + SUITES, default="all")
    p.add_argument("--kernel", help="additionally validate this kernel file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="also write a report to this path")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(fn=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return VALIDATION_EXIT
    except (RuntimeError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return VALIDATION_EXIT


if __name__ == "__main__":
    sys.exit(main())
