"""Command-line front end.

Every subcommand writes its artifacts plus ``report.json`` into ``--out``.
Exit codes: 0 success, 1 failed check, 2 usage error, 3 I/O or parse error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import brownian, kpca, krr, pca
from .data import gen_rotated_ellipses, gen_shell_ball, read_csv, write_csv
from .errors import InvalidInput, KlpcaError, ParseError, UsageError
from .experiments import best_axis_accuracy, sinusoid_correlation
from .kernels import VARIANTS, KernelSpec
from .linalg import jacobi_eigh, power_iteration, power_ratio_history

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
MC_FAIL_SE = 5.0


@dataclass
class RunReport:
    command: str
    parameters: dict = field(default_factory=dict)
    metrics: dict = field(default_factory=dict)
    artifacts: list = field(default_factory=list)
    seed: int = 0

    def to_dict(self) -> dict:
        params = {
            k: v if isinstance(v, (int, float, str)) and not isinstance(v, bool) else str(v)
            for k, v in self.parameters.items()
        }
        for k, v in self.metrics.items():
            if not math.isfinite(v):
                raise ValueError(f"metric {k} is not finite")
        return {
            "command": self.command,
            "parameters": params,
            "metrics": {k: float(v) for k, v in self.metrics.items()},
            "artifacts": [str(a) for a in self.artifacts],
            "seed": int(self.seed),
        }

    def write(self, out: Path) -> Path:
        path = out / "report.json"
        self.artifacts.append(path)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        return path


# ---------------------------------------------------------------------------
# helpers


def _kernel(args) -> KernelSpec:
    name = args.kernel.replace("-", "_")
    if name not in VARIANTS:
        raise UsageError(f"unknown kernel {args.kernel!r}")
    if name == "gaussian":
        if args.sigma is None or args.sigma <= 0:
            raise UsageError("--sigma must be positive for the gaussian kernel")
        return KernelSpec.gaussian(args.sigma)
    return KernelSpec(name)


def _samples(args) -> tuple[np.ndarray, dict]:
    """Load a d x n sample matrix from the CSV argument or a generator.

    The extra dict carries labels or angles for generated sets.
    """
    if args.input and args.gen:
        raise UsageError("give either an input CSV or --gen, not both")
    if args.input:
        return read_csv(args.input).T, {}
    gen = args.gen
    if gen == "shell-ball":
        cloud = gen_shell_ball(args.n_shell, args.n_ball, args.seed)
        return cloud.points, {"label": cloud.labels}
    if gen == "ellipses":
        stack = gen_rotated_ellipses(args.images, args.resolution)
        return stack.matrix, {"angle": stack.angles}
    rng = np.random.default_rng(args.seed)
    if gen == "random":
        return rng.standard_normal((args.dim, args.samples)), {}
    if gen == "rank1":
        direction = rng.standard_normal(args.dim)
        return np.outer(direction, rng.standard_normal(args.samples)) + 1.0, {}
    raise UsageError("need an input CSV or --gen")


def _out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _add_gen_flags(p, gens):
    p.add_argument("input", nargs="?", help="CSV file, one sample per row")
    p.add_argument("--gen", choices=gens)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-shell", type=int, default=200)
    p.add_argument("--n-ball", type=int, default=50)
    p.add_argument("--images", type=int, default=36)
    p.add_argument("--resolution", type=int, default=64)
    p.add_argument("--dim", type=int, default=5)
    p.add_argument("--samples", type=int, default=100)


# ---------------------------------------------------------------------------
# subcommands


def cmd_pca(args) -> tuple[RunReport, int]:
    X, _ = _samples(args)
    d = X.shape[0]
    l = args.components if args.components is not None else d
    if not 1 <= l <= d:
        raise UsageError(f"--components must be in [1, {d}]")
    model = pca.fit(X)
    Y = pca.transform(model, X)
    Xr = pca.reconstruct(model, Y, l)
    out = _out(args)
    report = RunReport("pca", vars_for_report(args), seed=args.seed)
    for name, M in (("scores.csv", Y[:l].T), ("reconstruction.csv", Xr.T)):
        write_csv(out / name, M)
        report.artifacts.append(out / name)
    report.metrics.update({f"eigenvalue_{j + 1}": v for j, v in enumerate(model.eigenvalues)})
    report.metrics["eigenvalue_sum"] = float(np.sum(model.eigenvalues))
    report.metrics["covariance_trace"] = float(np.trace(pca.covariance(X)))
    report.metrics["residual_hs2"] = float(np.sum((X - Xr) ** 2))
    report.metrics["components"] = l
    return report, EXIT_OK


def cmd_kpca(args) -> tuple[RunReport, int]:
    kernel = _kernel(args)
    X, extra = _samples(args)
    model = kpca.fit(X, kernel, args.components)
    emb = kpca.project(model, X, raw=args.raw_pce)
    out = _out(args)
    report = RunReport("kpca", vars_for_report(args), seed=args.seed)
    header = [f"pc{j + 1}" for j in range(emb.shape[1])]
    table = emb
    for name, col in extra.items():
        header.append(name)
        table = np.column_stack([table, col])
    write_csv(out / "embedding.csv", table, header=header)
    report.artifacts.append(out / "embedding.csv")
    report.metrics.update({f"spectrum_{j + 1}": v for j, v in enumerate(model.spectrum)})
    report.metrics["retained"] = model.k_retained
    report.metrics["rank"] = model.rank
    if "label" in extra:
        labels = extra["label"]
        report.metrics["separability_accuracy"] = best_axis_accuracy(emb, labels)
        lin = pca.transform(pca.fit(X), X).T
        report.metrics["pca_separability_accuracy"] = best_axis_accuracy(lin, labels)
    if "angle" in extra:
        for j in range(emb.shape[1]):
            report.metrics[f"pc{j + 1}_sinusoid_corr"] = sinusoid_correlation(emb[:, j], extra["angle"])
    return report, EXIT_OK


def cmd_krr(args) -> tuple[RunReport, int]:
    if args.beta is None or args.beta <= 0:
        raise UsageError("--beta must be positive")
    kernel = _kernel(args)
    table = read_csv(args.input)
    if table.shape[1] < 2:
        raise UsageError("input CSV needs at least one feature column and a y column")
    T, y = table[:, :-1].T, table[:, -1]
    model = krr.fit(T, y, args.beta, kernel)
    fitted = model.fitted
    out = _out(args)
    report = RunReport("krr", vars_for_report(args), seed=args.seed)
    write_csv(out / "coefficients.csv", model.coefficients, header=["c"])
    write_csv(out / "fitted.csv", np.column_stack([y, fitted]), header=["y", "fitted"])
    report.artifacts += [out / "coefficients.csv", out / "fitted.csv"]
    if args.predict:
        P = read_csv(args.predict)
        if P.shape[1] != T.shape[0]:
            raise ParseError(f"prediction points need {T.shape[0]} columns, got {P.shape[1]}")
        pred = krr.predict(model, P.T)
        write_csv(out / "predictions.csv", np.column_stack([P, pred]))
        report.artifacts.append(out / "predictions.csv")
    report.metrics["objective"] = krr.objective(T, y, args.beta, kernel, model.coefficients)
    report.metrics["objective_at_zero"] = krr.objective(T, y, args.beta, kernel, np.zeros_like(y))
    report.metrics["max_train_residual"] = float(np.max(np.abs(fitted - y)))
    return report, EXIT_OK


def _parse_grid(text: str) -> brownian.BrownianGrid:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad grid {text!r}") from None
    try:
        return brownian.BrownianGrid(np.array(vals))
    except InvalidInput as exc:
        raise UsageError(str(exc)) from None


def cmd_power(args) -> tuple[RunReport, int]:
    if (args.matrix is None) == (args.brownian_grid is None):
        raise UsageError("give exactly one of --matrix or --brownian-grid")
    if args.matrix is not None:
        G = read_csv(args.matrix)
    else:
        G = brownian.min_kernel_matrix(_parse_grid(args.brownian_grid))
    if args.steps < 1:
        raise UsageError("--steps must be >= 1")
    x0 = np.zeros(G.shape[0])
    x0[0] = 1.0
    history = power_ratio_history(G, x0, args.steps)
    est, vec = power_iteration(G, x0, args.steps)
    oracle = jacobi_eigh(G)
    report = RunReport("power", vars_for_report(args), seed=args.seed)
    for k, r in enumerate(history, start=1):
        print(f"step {k:4d}  ratio {r:.10f}")
        report.metrics[f"ratio_step_{k}"] = r
    print(f"estimate {est:.10f}  vector {np.array2string(vec, precision=4)}")
    print(f"jacobi   {oracle.eigenvalues[0]:.10f}  vector {np.array2string(oracle.eigenvectors[:, 0], precision=4)}")
    report.metrics["estimate"] = est
    report.metrics["oracle"] = float(oracle.eigenvalues[0])
    report.metrics["abs_error"] = abs(est - oracle.eigenvalues[0])
    for i, v in enumerate(vec):
        report.metrics[f"vector_{i + 1}"] = float(v)
        report.metrics[f"oracle_vector_{i + 1}"] = float(oracle.eigenvectors[i, 0])
    _out(args)
    return report, EXIT_OK


def brownian_checks(grid: brownian.BrownianGrid, n_paths: int, seed: int, which: str = "all"):
    """Run exact and/or Monte Carlo checks.

    Returns ``(metrics, rows, ok)`` where rows describe the MC checks and
    ``ok`` is False if an exact check fails or an MC check exceeds 5 SE.
    """
    metrics: dict[str, float] = {}
    rows = []
    ok = True
    x = grid.points
    if which in ("all", "exact"):
        K = brownian.min_kernel_matrix(grid)
        A = brownian.cholesky_factor(grid)
        fres = float(np.linalg.norm(A @ A.T - K) / np.linalg.norm(K))
        det_eig = float(np.prod(jacobi_eigh(K).eigenvalues))
        det_cf = brownian.det_closed_form(grid)
        drel = abs(det_cf - det_eig) / abs(det_cf)
        metrics.update(factorization_residual=fres, det_closed_form=det_cf, det_rel_error=drel)
        ok &= fres < 1e-12 and drel < 1e-8
    if which in ("all", "mc"):
        ens = brownian.sample_paths(grid, n_paths, seed)

        def record(name, est, target):
            nonlocal ok
            z = est.discrepancy(target)
            metrics[f"{name}_se"] = z
            rows.append([name, complex(est.value), complex(target), est.se, z])
            ok &= z <= MC_FAIL_SE

        N = len(grid)
        for k in range(N):
            record(f"charfn_{k}", brownian.mc_char_function(ens, k), np.exp(-x[k] / 2))
            for order in (2, 4):
                record(f"moment{order}_{k}", brownian.mc_moment(ens, k, order), brownian.gaussian_moment(x[k], order))
        for i in range(N - 1):
            j = i + 1
            record(f"charpair_{i}_{j}", brownian.mc_char_function(ens, i, j), np.exp(-abs(x[i] - x[j]) / 2))
            for n in range(3):
                chk = brownian.mc_transform_monomial(ens, i, j, n)
                record(f"transform_n{n}_{i}_{j}", chk.estimate, chk.closed_form)
            F = np.exp(1j * ens.paths[:, i]) + ens.paths[:, i] ** 2
            record(f"semigroup_{i}_{j}", brownian.mc_semigroup_gap(ens, i, j, F), 0.0)
    return metrics, rows, ok


def cmd_brownian(args) -> tuple[RunReport, int]:
    grid = _parse_grid(args.grid)
    if args.paths < 2:
        raise UsageError("--paths must be >= 2")
    metrics, rows, ok = brownian_checks(grid, args.paths, args.seed, args.checks)
    out = _out(args)
    report = RunReport("brownian", vars_for_report(args), metrics, seed=args.seed)
    if rows:
        path = out / "mc_checks.csv"
        with open(path, "w") as fh:
            fh.write("check,estimate_re,estimate_im,target_re,target_im,se,discrepancy_se\n")
            for name, est, tgt, se, z in rows:
                fh.write(f"{name},{est.real:.17g},{est.imag:.17g},{tgt.real:.17g},{tgt.imag:.17g},{se:.17g},{z:.17g}\n")
        report.artifacts.append(path)
    for name, value in sorted(metrics.items()):
        print(f"{name:28s} {value:.6g}")
    print("PASS" if ok else "FAIL")
    return report, EXIT_OK if ok else EXIT_CHECK


# ---------------------------------------------------------------------------


def vars_for_report(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("func", "out") and v is not None}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="klpca", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pca", help="linear PCA: scores, reconstruction, residual")
    _add_gen_flags(p, ["random", "rank1", "shell-ball", "ellipses"])
    p.add_argument("--components", type=int)
    p.add_argument("--out", default="out/pca")
    p.set_defaults(func=cmd_pca)

    p = sub.add_parser("kpca", help="kernel PCA embedding")
    _add_gen_flags(p, ["shell-ball", "ellipses", "random", "rank1"])
    p.add_argument("--kernel", default="gaussian")
    p.add_argument("--sigma", type=float)
    p.add_argument("--components", type=int, default=2)
    p.add_argument("--raw-pce", action="store_true", help="project uncentered kernel columns")
    p.add_argument("--out", default="out/kpca")
    p.set_defaults(func=cmd_kpca)

    p = sub.add_parser("krr", help="kernel ridge regression")
    p.add_argument("input", help="CSV: feature columns then a y column")
    p.add_argument("--kernel", default="gaussian")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--beta", type=float)
    p.add_argument("--predict", help="CSV of points to evaluate")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="out/krr")
    p.set_defaults(func=cmd_krr)

    p = sub.add_parser("power", help="power iteration vs Jacobi oracle")
    p.add_argument("--matrix", help="CSV of a symmetric PSD matrix")
    p.add_argument("--brownian-grid", help="comma-separated grid, e.g. 1,2,3")
    p.add_argument("--steps", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="out/power")
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("brownian", help="Brownian exact and Monte Carlo checks")
    p.add_argument("--grid", default="1,2,3")
    p.add_argument("--paths", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--checks", choices=["all", "exact", "mc"], default="all")
    p.add_argument("--out", default="out/brownian")
    p.set_defaults(func=cmd_brownian)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, code = args.func(args)
    except (UsageError, InvalidInput) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except KlpcaError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_CHECK
    report.write(Path(args.out))
    return code


if __name__ == "__main__":
    sys.exit(main())
